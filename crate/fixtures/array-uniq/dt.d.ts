declare function arrayUniq<T>(array: ReadonlyArray<T>): T[];

export = arrayUniq;
