export = dirnameRegex;

declare function dirnameRegex(): RegExp;
