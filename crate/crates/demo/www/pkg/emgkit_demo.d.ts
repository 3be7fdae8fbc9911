/* tslint:disable */
/* eslint-disable */

/**
 * Modes of one span with their instantaneous frequency tracks.
 */
export class Modes {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    count(): number;
    /**
     * Median instantaneous frequency of mode `k` after edge trimming.
     */
    if_median(k: number): number;
    imf(k: number): Float64Array;
    /**
     * Instantaneous frequency of mode `k` in Hz.
     */
    inst_freq(k: number): Float64Array;
    residual(): Float64Array;
}

export function decompose(samples: Float64Array, fs: number, max_modes: number): Modes;

export function feature_names(): string[];

/**
 * The eight time-domain features of one window, in [`feature_names`] order.
 */
export function features(samples: Float64Array, wamp_threshold: number): Float64Array;

/**
 * Movement names accepted by [`synth_recording`], in index order.
 */
export function movement_names(): string[];

/**
 * One channel of a synthetic recording at 500 Hz.
 */
export function synth_recording(class_index: number, seed: number, channel: number): Float64Array;

/**
 * `[onset, window_len, start_1, start_2, …]` for the default windowing with
 * the given onset threshold.
 */
export function windows(samples: Float64Array, fs: number, threshold: number): Uint32Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_modes_free: (a: number, b: number) => void;
    readonly decompose: (a: number, b: number, c: number, d: number) => [number, number, number];
    readonly feature_names: () => [number, number];
    readonly features: (a: number, b: number, c: number) => [number, number, number, number];
    readonly modes_count: (a: number) => number;
    readonly modes_if_median: (a: number, b: number) => number;
    readonly modes_imf: (a: number, b: number) => [number, number];
    readonly modes_inst_freq: (a: number, b: number) => [number, number];
    readonly modes_residual: (a: number) => [number, number];
    readonly movement_names: () => [number, number];
    readonly synth_recording: (a: number, b: number, c: number) => [number, number, number, number];
    readonly windows: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __externref_drop_slice: (a: number, b: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
