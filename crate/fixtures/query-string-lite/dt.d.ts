export interface ParsedQuery {
    [key: string]: string | string[] | null;
}

export function parse(query: string, options?: { sort?: boolean; arrayFormat?: 'bracket' | 'index' | 'none' }): ParsedQuery;
export function stringify(object: object): string;
