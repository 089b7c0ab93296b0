/* tslint:disable */
/* eslint-disable */

/**
 * The base model started from residents only.
 */
export class CoreDemo {
    free(): void;
    [Symbol.dispose](): void;
    advance(steps: number, dt: number): void;
    /**
     * `u(y)`.
     */
    at_home(): Float64Array;
    /**
     * `max_y |h(t, y) − h(0, y)| / max h(0)`.
     */
    conservation_residual(): number;
    /**
     * Residents form a Gaussian blob of unit mass and width `width` at the centre.
     */
    constructor(n: number, length: number, alpha: number, gamma: number, epsilon: number, sigma: number, width: number);
    time(): number;
    /**
     * Everybody, at home or travelling, by location.
     */
    total(): Float64Array;
    /**
     * `∫ v(x, y) dy`.
     */
    travelers(): Float64Array;
}

/**
 * SI epidemic seeded in the centre column.
 */
export class EpidemicDemo {
    free(): void;
    [Symbol.dispose](): void;
    advance(steps: number, dt: number): void;
    /**
     * Infected residents `i₁(y)`.
     */
    infected_at_home(): Float64Array;
    /**
     * Pooled infected travelers `I(x)`.
     */
    infected_travelers(): Float64Array;
    constructor(n: number, length: number, alpha: number, gamma: number, epsilon: number, sigma: number, kappa1: number, kappa2: number, nu: number);
    time(): number;
    /**
     * `[∫s₁, ∫i₁, ∫∫s₂, ∫∫i₂]`.
     */
    totals(): Float64Array;
}

/**
 * Equilibrium traveler profile per unit resident density.
 */
export function equilibrium_profile(n: number, length: number, alpha: number, gamma: number, epsilon: number, sigma: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_coredemo_free: (a: number, b: number) => void;
    readonly __wbg_epidemicdemo_free: (a: number, b: number) => void;
    readonly coredemo_advance: (a: number, b: number, c: number) => [number, number];
    readonly coredemo_at_home: (a: number) => [number, number];
    readonly coredemo_conservation_residual: (a: number) => number;
    readonly coredemo_new: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number];
    readonly coredemo_time: (a: number) => number;
    readonly coredemo_total: (a: number) => [number, number, number, number];
    readonly coredemo_travelers: (a: number) => [number, number];
    readonly epidemicdemo_advance: (a: number, b: number, c: number) => [number, number];
    readonly epidemicdemo_infected_at_home: (a: number) => [number, number];
    readonly epidemicdemo_infected_travelers: (a: number) => [number, number];
    readonly epidemicdemo_new: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number) => [number, number, number];
    readonly epidemicdemo_time: (a: number) => number;
    readonly epidemicdemo_totals: (a: number) => [number, number];
    readonly equilibrium_profile: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
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
