declare function leftPad(str: string | number, len: number, ch?: string | number): string;

export = leftPad;
