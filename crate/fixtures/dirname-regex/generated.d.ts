export = DirnameRegex;

declare function DirnameRegex(): RegExp;
