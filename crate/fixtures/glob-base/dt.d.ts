declare function globbase(basePath?: string): globbase.GlobBaseResult;

declare namespace globbase {
  interface GlobBaseResult {
      base: string;
      isGlob: boolean;
      glob: string;
  }
}

export = globbase;
