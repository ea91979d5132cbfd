/** Affine, invertible mapping between capture-area pixels and gaze degrees.
 *
 * Screen x grows rightward and maps to positive yaw; screen y grows
 * downward and maps to negative pitch (up is positive degrees), so the
 * on-screen layout matches the backend's coordinate convention.
 */

import type { VirtualGeometry } from "./config.js";

export interface DegPoint {
  xDeg: number;
  yDeg: number;
}

export interface PxPoint {
  xPx: number;
  yPx: number;
}

export function pxToDeg(geom: VirtualGeometry, p: PxPoint): DegPoint {
  return {
    xDeg: ((p.xPx - geom.widthPx / 2) / (geom.widthPx / 2)) * geom.yawHalfDeg,
    yDeg: -((p.yPx - geom.heightPx / 2) / (geom.heightPx / 2)) * geom.pitchHalfDeg,
  };
}

export function degToPx(geom: VirtualGeometry, d: DegPoint): PxPoint {
  return {
    xPx: geom.widthPx / 2 + (d.xDeg / geom.yawHalfDeg) * (geom.widthPx / 2),
    yPx: geom.heightPx / 2 - (d.yDeg / geom.pitchHalfDeg) * (geom.heightPx / 2),
  };
}

/** Pixels per degree along x, used to size the stimulus dot. */
export function pxPerDegX(geom: VirtualGeometry): number {
  return geom.widthPx / (2 * geom.yawHalfDeg);
}
