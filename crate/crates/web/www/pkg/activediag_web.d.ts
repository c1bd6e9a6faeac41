/* tslint:disable */
/* eslint-disable */

/**
 * An interactive session against a hidden multi-fault state.
 */
export class DiagnosisSession {
    free(): void;
    [Symbol.dispose](): void;
    constructor(objects: number, queries: number, prior: number, noise: number, seed: number);
    /**
     * Asks `query` of the hidden state and returns the noisy response.
     */
    observe(query: number): boolean;
    parents(query: number): Uint32Array;
    /**
     * Indices of the truly faulty objects.
     */
    reveal(): Uint32Array;
    /**
     * Query the named selector (`auc_sf`, `entropy_sf` or `random`) would ask next.
     */
    suggest(selector: string): number;
    /**
     * Current posterior, ranking and AUC figures as JSON.
     */
    view(): string;
}

/**
 * Mean empirical AUC per step for the AUC, entropy and random selectors on
 * one generated graph.
 */
export function compare_selectors(objects: number, queries: number, prior: number, noise: number, budget: number, realizations: number, seed: number): string;

/**
 * ROC estimate for comma- or space-separated fault probabilities.
 */
export function roc_analysis(marginals: string): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_diagnosissession_free: (a: number, b: number) => void;
    readonly compare_selectors: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number, number];
    readonly diagnosissession_new: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
    readonly diagnosissession_observe: (a: number, b: number) => [number, number, number];
    readonly diagnosissession_parents: (a: number, b: number) => [number, number, number, number];
    readonly diagnosissession_reveal: (a: number) => [number, number];
    readonly diagnosissession_suggest: (a: number, b: number, c: number) => [number, number, number];
    readonly diagnosissession_view: (a: number) => [number, number, number, number];
    readonly roc_analysis: (a: number, b: number) => [number, number, number, number];
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
