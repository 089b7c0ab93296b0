/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_coredemo_free: (a: number, b: number) => void;
export const __wbg_epidemicdemo_free: (a: number, b: number) => void;
export const coredemo_advance: (a: number, b: number, c: number) => [number, number];
export const coredemo_at_home: (a: number) => [number, number];
export const coredemo_conservation_residual: (a: number) => number;
export const coredemo_new: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number];
export const coredemo_time: (a: number) => number;
export const coredemo_total: (a: number) => [number, number, number, number];
export const coredemo_travelers: (a: number) => [number, number];
export const epidemicdemo_advance: (a: number, b: number, c: number) => [number, number];
export const epidemicdemo_infected_at_home: (a: number) => [number, number];
export const epidemicdemo_infected_travelers: (a: number) => [number, number];
export const epidemicdemo_new: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number) => [number, number, number];
export const epidemicdemo_time: (a: number) => number;
export const epidemicdemo_totals: (a: number) => [number, number];
export const equilibrium_profile: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
