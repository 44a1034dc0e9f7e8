/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_ball_free: (a: number, b: number) => void;
export const ball_frame: (a: number) => [number, number];
export const ball_measure: (a: number, b: number, c: number, d: number) => [number, number, number, number];
export const ball_new: (a: bigint) => number;
export const ball_reset: (a: number) => void;
export const ball_rotate: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
export const berry_latitude: (a: number, b: number, c: number) => [number, number, number, number];
export const berry_triangle: (a: number, b: number, c: number) => [number, number, number, number];
export const measurement_stats: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: bigint) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_start: () => void;
