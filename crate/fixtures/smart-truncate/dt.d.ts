export function smartTruncate(string: string, length: number): string;
