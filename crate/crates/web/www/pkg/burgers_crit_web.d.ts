/* tslint:disable */
/* eslint-disable */

/**
 * `[x0, t0, v0, kappa, alpha, beta, gamma]` for `"standard"` or `"generalized"`.
 */
export function catastrophe(model: string): Float64Array;

/**
 * `U(X, T)` at `n` evenly spaced `X` in `[x_lo, x_hi]`.
 */
export function profile_curve(t: number, x_lo: number, x_hi: number, n: number): Float64Array;

/**
 * Shock front of the standard model: `[t_0..t_m, x_0..x_m]`.
 */
export function shock_front(t_end: number, steps: number): Float64Array;

/**
 * Viscous solution at time `t` next to the profile formula:
 * `[x_0..x_n, u_0..u_n, ui_0..ui_n]` with `n = nx`.
 */
export function viscous_vs_profile(model: string, eps: number, t: number, nx: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly catastrophe: (a: number, b: number) => [number, number, number, number];
    readonly profile_curve: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly shock_front: (a: number, b: number) => [number, number, number, number];
    readonly viscous_vs_profile: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
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
