/* tslint:disable */
/* eslint-disable */

/**
 * Rows of `[κt, M₂/N, C]` for a short Trotter run, flattened.
 */
export function evolve_magic(flavors: string, local_dim: number, t_end: number, every: number): Float64Array;

/**
 * `[M₂, P(ν₁), P(ν₂), P(ν₃)]` of one flavor state for the given mixing angles.
 */
export function flavor_magic(flavor: string, local_dim: number, sin2_theta12: number, sin2_theta23: number, sin2_theta13: number, delta_cp: number): Float64Array;

/**
 * Rows of `[κt, analytic_3f, analytic_2f]`, flattened.
 */
export function magic_power_curve(kt_max: number, points: number): Float64Array;

export function max_demo_neutrinos(): number;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly evolve_magic: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly flavor_magic: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly magic_power_curve: (a: number, b: number) => [number, number, number, number];
    readonly max_demo_neutrinos: () => number;
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
