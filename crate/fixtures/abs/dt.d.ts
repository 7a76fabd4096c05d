declare function abs(input?: string): string;
export = abs;
