/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_modes_free: (a: number, b: number) => void;
export const decompose: (a: number, b: number, c: number, d: number) => [number, number, number];
export const feature_names: () => [number, number];
export const features: (a: number, b: number, c: number) => [number, number, number, number];
export const modes_count: (a: number) => number;
export const modes_if_median: (a: number, b: number) => number;
export const modes_imf: (a: number, b: number) => [number, number];
export const modes_inst_freq: (a: number, b: number) => [number, number];
export const modes_residual: (a: number) => [number, number];
export const movement_names: () => [number, number];
export const synth_recording: (a: number, b: number, c: number) => [number, number, number, number];
export const windows: (a: number, b: number, c: number, d: number) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __externref_drop_slice: (a: number, b: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
