/** Pointer-trace conditioning: raw pointer-move events resampled to a
 * uniform rate and mapped through the virtual geometry into the
 * recording wire format.
 */

import type { UiConfig } from "./config.js";
import { pxToDeg } from "./geometry.js";
import { recordingSchema, type Recording } from "./schema.js";

export interface PointerSample {
  /** Seconds since capture start. */
  t: number;
  xPx: number;
  yPx: number;
}

/** Linear interpolation of the pointer path at time t (clamped at ends). */
function interpolate(samples: PointerSample[], t: number): PointerSample {
  const first = samples[0]!;
  const last = samples[samples.length - 1]!;
  if (t <= first.t) return { ...first, t };
  if (t >= last.t) return { ...last, t };
  // binary search for the bracketing pair
  let lo = 0;
  let hi = samples.length - 1;
  while (hi - lo > 1) {
    const mid = (lo + hi) >> 1;
    if (samples[mid]!.t <= t) lo = mid;
    else hi = mid;
  }
  const a = samples[lo]!;
  const b = samples[hi]!;
  const w = (t - a.t) / (b.t - a.t);
  return {
    t,
    xPx: a.xPx + w * (b.xPx - a.xPx),
    yPx: a.yPx + w * (b.yPx - a.yPx),
  };
}

export function averageRateHz(samples: PointerSample[]): number {
  if (samples.length < 2) return 0;
  const span = samples[samples.length - 1]!.t - samples[0]!.t;
  return span > 0 ? (samples.length - 1) / span : 0;
}

/**
 * Build a schema-valid recording from a raw pointer trace.
 *
 * The trace is resampled to config.captureRateHz over [0, durationS) and
 * mapped to degrees; the declared geometry is recorded in meta.  Throws
 * if the result does not satisfy the recording schema.
 */
export function toRecording(
  samples: PointerSample[],
  durationS: number,
  config: UiConfig,
): Recording {
  if (samples.length < 2) {
    throw new Error("pointer trace too short to submit");
  }
  const rate = config.captureRateHz;
  const n = Math.round(durationS * rate);
  const out = [];
  for (let i = 0; i < n; i++) {
    const t = i / rate;
    const p = interpolate(samples, t);
    const d = pxToDeg(config.geometry, p);
    out.push({ t, x_deg: d.xDeg, y_deg: d.yDeg, valid: true });
  }
  const recording: Recording = {
    rate_hz: rate,
    samples: out,
    meta: {
      source: "pointer",
      geometry_width_px: String(config.geometry.widthPx),
      geometry_height_px: String(config.geometry.heightPx),
      geometry_yaw_half_deg: String(config.geometry.yawHalfDeg),
      geometry_pitch_half_deg: String(config.geometry.pitchHalfDeg),
    },
  };
  return recordingSchema.parse(recording);
}
