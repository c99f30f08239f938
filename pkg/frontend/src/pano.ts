/**
 * Equirectangular geometry: pixel -> sphere angles -> station-frame point.
 *
 * Distances are computed in the rig's own frame; a rigid motion of the rig
 * moves both endpoints alike, so world distances are identical and the
 * viewer needs no world pose.
 */

export function panoAngles(u: number, v: number, width: number, height: number):
    { alpha: number; beta: number } {
  return {
    alpha: Math.PI - (u * 2 * Math.PI) / width,
    beta: (Math.PI * v) / height,
  };
}

export function spherePoint(u: number, v: number, depthM: number,
                            width: number, height: number): [number, number, number] {
  const { alpha, beta } = panoAngles(u, v, width, height);
  const sb = Math.sin(beta);
  return [depthM * sb * Math.cos(alpha), depthM * sb * Math.sin(alpha),
          depthM * Math.cos(beta)];
}

export function segmentLength(p1: [number, number], d1: number,
                              p2: [number, number], d2: number,
                              width: number, height: number): number {
  const a = spherePoint(p1[0], p1[1], d1, width, height);
  const b = spherePoint(p2[0], p2[1], d2, width, height);
  return Math.hypot(a[0] - b[0], a[1] - b[1], a[2] - b[2]);
}

/**
 * Split a segment for drawing on the unwrapped raster. When the horizontal
 * gap exceeds half the panorama the shorter angular path crosses the
 * u = 0 border, so the line is drawn as two arcs, each with one endpoint
 * unwrapped past the border (the canvas clips them).
 */
export function wrapSplit(p1: [number, number], p2: [number, number], width: number):
    Array<[[number, number], [number, number]]> {
  const du = p2[0] - p1[0];
  if (Math.abs(du) <= width / 2) {
    return [[p1, p2]];
  }
  const shift = du > 0 ? width : -width;
  const p2Unwrapped: [number, number] = [p2[0] - shift, p2[1]];
  const p1Unwrapped: [number, number] = [p1[0] + shift, p1[1]];
  return [
    [p1, p2Unwrapped],
    [p1Unwrapped, p2],
  ];
}
