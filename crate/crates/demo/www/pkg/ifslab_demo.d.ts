/* tslint:disable */
/* eslint-disable */

/**
 * Level-`n` cylinders at `t`; `derived` selects the words `v3`, `|v3| <= n`.
 */
export function cylinders(t: string, n: number, derived: boolean): string;

/**
 * `d_level` of the family and the first-level dimension of the derived
 * system of level `derived_level` at `steps + 1` parameters.
 */
export function dimension_curve(t_lo: string, t_hi: string, steps: number, level: number, derived_level: number): string;

/**
 * Overlapping pairs among the derived level-`n` cylinders at `steps + 1`
 * parameters, and the longest window where there are none.
 */
export function disjoint_scan(n: number, t_lo: string, t_hi: string, steps: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly cylinders: (a: number, b: number, c: number, d: number) => [number, number];
    readonly dimension_curve: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number];
    readonly disjoint_scan: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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
