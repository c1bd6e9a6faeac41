/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_diagnosissession_free: (a: number, b: number) => void;
export const compare_selectors: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number, number];
export const diagnosissession_new: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
export const diagnosissession_observe: (a: number, b: number) => [number, number, number];
export const diagnosissession_parents: (a: number, b: number) => [number, number, number, number];
export const diagnosissession_reveal: (a: number) => [number, number];
export const diagnosissession_suggest: (a: number, b: number, c: number) => [number, number, number];
export const diagnosissession_view: (a: number) => [number, number, number, number];
export const roc_analysis: (a: number, b: number) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __wbindgen_start: () => void;
