/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_session_free: (a: number, b: number) => void;
export const beta_evidence: (a: number, b: number, c: number) => [number, number, number, number];
export const session_belief_rgba: (a: number) => [number, number];
export const session_cols: (a: number) => number;
export const session_done: (a: number) => number;
export const session_new: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
export const session_object_count: (a: number) => number;
export const session_rows: (a: number) => number;
export const session_scene_json: (a: number) => [number, number];
export const session_step: (a: number) => [number, number, number, number];
export const session_truth_rgba: (a: number) => [number, number];
export const session_uncertainty_rgba: (a: number) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __wbindgen_start: () => void;
