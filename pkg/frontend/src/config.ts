/** Static UI configuration: service location and the virtual viewing
 * geometry that maps screen pixels to gaze degrees.
 *
 * The capture area is declared to span +/-15 degrees of yaw horizontally
 * and +/-10 degrees of pitch vertically, matching the stimulus grid
 * extents served by the backend.  The geometry travels with every
 * submitted recording (in `meta`) so the mapping is auditable.
 */

export interface VirtualGeometry {
  /** Capture-area size in CSS pixels. */
  widthPx: number;
  heightPx: number;
  /** Half-extent of the horizontal field mapped onto widthPx. */
  yawHalfDeg: number;
  /** Half-extent of the vertical field mapped onto heightPx. */
  pitchHalfDeg: number;
}

export interface UiConfig {
  /** Base URL of the verification service. */
  baseUrl: string;
  /** Uniform rate the pointer trace is resampled to before submission. */
  captureRateHz: number;
  geometry: VirtualGeometry;
}

export const DEFAULT_CONFIG: UiConfig = {
  baseUrl: "http://127.0.0.1:8000",
  captureRateHz: 120,
  geometry: {
    widthPx: 900,
    heightPx: 600,
    yawHalfDeg: 15,
    pitchHalfDeg: 10,
  },
};

/** Rendered stimulus dot diameter in degrees. */
export const DOT_DIAMETER_DEG = 0.5;

/** Seconds of countdown shown before the first target onset. */
export const COUNTDOWN_S = 3;
