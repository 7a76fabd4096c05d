export = SmartTruncate;

declare function SmartTruncate(string: string, length: number): string;
