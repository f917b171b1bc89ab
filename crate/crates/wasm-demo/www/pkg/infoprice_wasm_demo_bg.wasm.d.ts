/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_gaussiandemo_free: (a: number, b: number) => void;
export const binary_costs: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number, number, number];
export const gaussiandemo_cost_vs_information: (a: number, b: number, c: number) => [number, number, number, number];
export const gaussiandemo_cost_vs_signal: (a: number, b: number, c: number, d: number) => [number, number, number, number];
export const gaussiandemo_critical_signal: (a: number) => number;
export const gaussiandemo_flat_rate: (a: number) => [number, number, number];
export const gaussiandemo_new: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number, j: number) => [number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
