declare class TinyEmitter {
    private events: any;
    static defaultMaxListeners: number;
    on(event: string, callback: (...args: any[]) => void, ctx?: object): this;
    emit(event: string, ...args: any[]): this;
    off(event: string, callback?: Function): this;
}

export = TinyEmitter;
