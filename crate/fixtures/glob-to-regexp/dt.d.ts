declare function GlobToRegExp(glob: string, options?: GlobToRegExp.Options): RegExp;

declare namespace GlobToRegExp {
    interface Options {
        extended?: boolean;
        globstar?: boolean;
        flags?: string;
    }
}

export = GlobToRegExp;
