/** Stimulus presentation: a dark dot over a light-gray background jumping
 * through the scheduled grid positions.
 *
 * The pure timing helpers are separated from the canvas renderer so the
 * schedule logic is unit-testable without a DOM.
 */

import { COUNTDOWN_S, DOT_DIAMETER_DEG, type VirtualGeometry } from "./config.js";
import { degToPx, pxPerDegX } from "./geometry.js";
import type { StimulusSchedule, StimulusTarget } from "./schema.js";

/** Target on screen at task-time t (seconds from first onset), or null
 * outside the task window. */
export function targetAt(
  schedule: StimulusSchedule,
  t: number,
): StimulusTarget | null {
  if (t < 0 || t >= schedule.total_s) return null;
  for (const target of schedule.targets) {
    if (t >= target.onset_s && t < target.onset_s + target.duration_s) {
      return target;
    }
  }
  return null;
}

export interface StimulusFrame {
  /** "countdown" before onset, "running" during, "done" after. */
  phase: "countdown" | "running" | "done";
  /** Remaining whole seconds of countdown (only in countdown phase). */
  countdown: number;
  target: StimulusTarget | null;
}

/** Frame description at wall-time t seconds from animation start (the
 * countdown occupies [0, COUNTDOWN_S); the task follows). */
export function frameAt(schedule: StimulusSchedule, t: number): StimulusFrame {
  if (t < COUNTDOWN_S) {
    return {
      phase: "countdown",
      countdown: Math.ceil(COUNTDOWN_S - t),
      target: null,
    };
  }
  const taskT = t - COUNTDOWN_S;
  if (taskT >= schedule.total_s) {
    return { phase: "done", countdown: 0, target: null };
  }
  return { phase: "running", countdown: 0, target: targetAt(schedule, taskT) };
}

export function drawFrame(
  ctx: CanvasRenderingContext2D,
  geom: VirtualGeometry,
  frame: StimulusFrame,
): void {
  ctx.fillStyle = "#d3d3d3"; // light gray background
  ctx.fillRect(0, 0, geom.widthPx, geom.heightPx);

  if (frame.phase === "countdown") {
    ctx.fillStyle = "#333";
    ctx.font = "48px sans-serif";
    ctx.textAlign = "center";
    ctx.textBaseline = "middle";
    ctx.fillText(String(frame.countdown), geom.widthPx / 2, geom.heightPx / 2);
    return;
  }
  if (frame.target) {
    const p = degToPx(geom, { xDeg: frame.target.x_deg, yDeg: frame.target.y_deg });
    const radius = (DOT_DIAMETER_DEG / 2) * pxPerDegX(geom);
    ctx.fillStyle = "#111";
    ctx.beginPath();
    ctx.arc(p.xPx, p.yPx, radius, 0, 2 * Math.PI);
    ctx.fill();
  }
}
