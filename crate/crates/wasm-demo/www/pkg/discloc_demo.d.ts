/* tslint:disable */
/* eslint-disable */

/**
 * A rendered synthetic fundus and the trace of the last localization.
 */
export class FundusDemo {
    free(): void;
    [Symbol.dispose](): void;
    height(): number;
    /**
     * Runs the localizer at a working size equal to the image size.
     * Radii and areas are in working pixels. Returns a JSON summary.
     */
    localize(channel: string, fringe_margin: number, top_percentile: number, erode_radius: number, dilate_radius: number, min_blob_area: number, radius_expansion: number): string;
    constructor(seed: number, size: number, fringe: boolean, spots: boolean);
    /**
     * The rendered image as RGBA.
     */
    rgba(): Uint8Array;
    /**
     * RGBA of a stage from the last `localize` call, or an empty buffer.
     * Stages are at working size, which here equals the image size.
     */
    stage_rgba(name: string): Uint8Array;
    width(): number;
}

/**
 * IOU and ground-truth coverage of two boxes as JSON.
 */
export function box_overlap(px: number, py: number, pw: number, ph: number, tx: number, ty: number, tw: number, th: number): string;

/**
 * Simulated classifier scores: glaucoma centred `separation / 2` above
 * healthy. Returns the ROC curve, AUC and the operating point at
 * `target_specificity` as JSON.
 */
export function roc_explorer(positives: number, negatives: number, separation: number, levels: number, target_specificity: number, seed: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_fundusdemo_free: (a: number, b: number) => void;
    readonly box_overlap: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number, number, number];
    readonly fundusdemo_height: (a: number) => number;
    readonly fundusdemo_localize: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number) => [number, number, number, number];
    readonly fundusdemo_new: (a: number, b: number, c: number, d: number) => number;
    readonly fundusdemo_rgba: (a: number) => [number, number];
    readonly fundusdemo_stage_rgba: (a: number, b: number, c: number) => [number, number];
    readonly fundusdemo_width: (a: number) => number;
    readonly roc_explorer: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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
