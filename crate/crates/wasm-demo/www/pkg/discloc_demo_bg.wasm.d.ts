/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_fundusdemo_free: (a: number, b: number) => void;
export const box_overlap: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number, number, number];
export const fundusdemo_height: (a: number) => number;
export const fundusdemo_localize: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number) => [number, number, number, number];
export const fundusdemo_new: (a: number, b: number, c: number, d: number) => number;
export const fundusdemo_rgba: (a: number) => [number, number];
export const fundusdemo_stage_rgba: (a: number, b: number, c: number) => [number, number];
export const fundusdemo_width: (a: number) => number;
export const roc_explorer: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __wbindgen_start: () => void;
