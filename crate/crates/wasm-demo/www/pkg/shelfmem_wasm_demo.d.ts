/* tslint:disable */
/* eslint-disable */

export class Session {
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Most likely class per cell, darkened where the class is uncertain.
     */
    belief_rgba(): Uint8Array;
    cols(): number;
    /**
     * `method` is one of `informed-push`, `random-push`, `view-only`,
     * `random-view`.
     */
    constructor(seed: number, method: string, budget: number, wall: boolean);
    object_count(): number;
    rows(): number;
    scene_json(): string;
    /**
     * One planner step as JSON, or `null` when the episode has ended.
     */
    step(): string;
    /**
     * Top-down ground truth, one RGBA pixel per cell, row 0 at the front.
     */
    truth_rgba(): Uint8Array;
    /**
     * Column occupancy variance: white is certain, red is the prior.
     */
    uncertainty_rgba(): Uint8Array;
    readonly done: boolean;
}

/**
 * Voxel evidence calculator for the page, as JSON.
 */
export function beta_evidence(hits: number, misses: number, weight: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_session_free: (a: number, b: number) => void;
    readonly beta_evidence: (a: number, b: number, c: number) => [number, number, number, number];
    readonly session_belief_rgba: (a: number) => [number, number];
    readonly session_cols: (a: number) => number;
    readonly session_done: (a: number) => number;
    readonly session_new: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
    readonly session_object_count: (a: number) => number;
    readonly session_rows: (a: number) => number;
    readonly session_scene_json: (a: number) => [number, number];
    readonly session_step: (a: number) => [number, number, number, number];
    readonly session_truth_rgba: (a: number) => [number, number];
    readonly session_uncertainty_rgba: (a: number) => [number, number];
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
