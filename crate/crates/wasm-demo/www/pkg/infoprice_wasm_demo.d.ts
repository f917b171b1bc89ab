/* tslint:disable */
/* eslint-disable */

/**
 * Gaussian market with its signal, investor and position limits.
 */
export class GaussianDemo {
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Records `[bits, cost_down, cost_up]` from the minimum information
     * level up to `max_bits`.
     */
    cost_vs_information(max_bits: number, points: number): Float64Array;
    /**
     * Records `[xi, cost, bits]` for `points` signals evenly spaced on
     * `[lo, hi]`.
     */
    cost_vs_signal(lo: number, hi: number, points: number): Float64Array;
    /**
     * Signal at which the observation carries the least information.
     */
    critical_signal(): number;
    /**
     * Signal-averaged cost.
     */
    flat_rate(): number;
    /**
     * Pass `Infinity` as `borrow_cap` for unlimited borrowing.
     */
    constructor(mu: number, sigma2: number, s0: number, delta: number, mu_eps: number, sigma2_eps: number, alpha: number, w0: number, allow_stock_short: boolean, borrow_cap: number);
}

/**
 * Binary market costs `[c(0), c(1), c(2), flat_rate, grossman_stiglitz]`.
 */
export function binary_costs(p: number, s0: number, delta: number, q: number, alpha: number, w0: number, allow_stock_short: boolean, borrow_cap: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_gaussiandemo_free: (a: number, b: number) => void;
    readonly binary_costs: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number, number, number];
    readonly gaussiandemo_cost_vs_information: (a: number, b: number, c: number) => [number, number, number, number];
    readonly gaussiandemo_cost_vs_signal: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly gaussiandemo_critical_signal: (a: number) => number;
    readonly gaussiandemo_flat_rate: (a: number) => [number, number, number];
    readonly gaussiandemo_new: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number, j: number) => [number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
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
