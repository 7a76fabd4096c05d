/// <reference types="node" />

import { Readable } from 'stream';

declare function toStream(text: string): Readable;

export = toStream;
