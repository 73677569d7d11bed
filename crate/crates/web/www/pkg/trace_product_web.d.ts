/* tslint:disable */
/* eslint-disable */

/**
 * Generate a seeded instance, check it, and decompose it back.
 */
export function generate_and_decompose(family: string, n: number, m: number, real: boolean, positive: boolean, seed: number): string;

/**
 * The Hadamard pair of a real symmetric `C` (row-major `entries`, side `n`):
 * its pair residual, the residual of the self-composed triple, and the
 * operator Schmidt rank of `A ↦ A∘C`.
 */
export function hadamard_check(n: number, entries: Float64Array): string;

/**
 * Weighted identity with exponents `alpha`, `beta` on `n × n` positive
 * definite matrices. `matched` builds the maps from a random positive form;
 * otherwise every map is the identity, which passes only when the exponents
 * agree.
 */
export function weighted_residual(n: number, alpha: Float64Array, beta: Float64Array, matched: boolean, trials: number, seed: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly generate_and_decompose: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number];
    readonly hadamard_check: (a: number, b: number, c: number) => [number, number];
    readonly weighted_residual: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number];
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
