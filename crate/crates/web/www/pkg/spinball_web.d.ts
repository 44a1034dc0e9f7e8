/* tslint:disable */
/* eslint-disable */

/**
 * A live ball: drag to rotate, press to measure.
 */
export class Ball {
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Current frame as JSON.
     */
    frame(): string;
    measure(x: number, y: number, z: number): string;
    constructor(seed: bigint);
    reset(): void;
    /**
     * Turns the ball by `angle` about a world axis, in as many sub-events
     * as the drag cap requires. Returns the last frame.
     */
    rotate(x: number, y: number, z: number, angle: number): string;
}

/**
 * Berry phase around the circle of polar angle `theta` (radians).
 */
export function berry_latitude(theta: number, up: boolean, samples: number): string;

/**
 * Berry phase around the geodesic triangle ẑ → b → c, vertices given as
 * flat `[bx, by, bz, cx, cy, cz]`.
 */
export function berry_triangle(vertices: Float64Array, up: boolean): string;

/**
 * Rotate-measure-derotate statistics for the state `(a, b)` along an axis.
 */
export function measurement_stats(a_re: number, a_im: number, b_re: number, b_im: number, x: number, y: number, z: number, trials: number, seed: bigint): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_ball_free: (a: number, b: number) => void;
    readonly ball_frame: (a: number) => [number, number];
    readonly ball_measure: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly ball_new: (a: bigint) => number;
    readonly ball_reset: (a: number) => void;
    readonly ball_rotate: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly berry_latitude: (a: number, b: number, c: number) => [number, number, number, number];
    readonly berry_triangle: (a: number, b: number, c: number) => [number, number, number, number];
    readonly measurement_stats: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: bigint) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
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
