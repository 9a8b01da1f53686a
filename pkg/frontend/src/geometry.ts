/** Screen-space geometry: projection fitting and lasso hit-testing. */

export interface Pt {
  x: number;
  y: number;
}

export interface Transform {
  scale: number;
  offsetX: number;
  offsetY: number;
}

/**
 * Map data coordinates into a viewport, preserving aspect ratio and
 * flipping y so larger v2 is higher on screen. A degenerate span (single
 * point, or all points collinear on one axis) centers instead of scaling
 * to infinity.
 */
export function fitTransform(points: ReadonlyArray<{ v1: number; v2: number }>,
                             width: number, height: number,
                             margin = 24): Transform {
  if (points.length === 0) {
    return { scale: 1, offsetX: width / 2, offsetY: height / 2 };
  }
  let minX = Infinity, maxX = -Infinity, minY = Infinity, maxY = -Infinity;
  for (const p of points) {
    minX = Math.min(minX, p.v1);
    maxX = Math.max(maxX, p.v1);
    minY = Math.min(minY, p.v2);
    maxY = Math.max(maxY, p.v2);
  }
  const spanX = maxX - minX;
  const spanY = maxY - minY;
  const span = Math.max(spanX, spanY);
  const usable = Math.max(1, Math.min(width, height) - 2 * margin);
  const scale = span > 0 ? usable / span : 1;
  const midX = (minX + maxX) / 2;
  const midY = (minY + maxY) / 2;
  return {
    scale,
    offsetX: width / 2 - midX * scale,
    offsetY: height / 2 + midY * scale,
  };
}

export function toScreen(t: Transform, v1: number, v2: number): Pt {
  return { x: t.offsetX + v1 * t.scale, y: t.offsetY - v2 * t.scale };
}

/**
 * Ray-casting point-in-polygon test. The polygon is the freehand lasso
 * path; it needs no particular winding and may self-intersect, in which
 * case the even-odd rule applies, matching what the drawn outline shows.
 */
export function pointInPolygon(pt: Pt, polygon: ReadonlyArray<Pt>): boolean {
  if (polygon.length < 3) return false;
  let inside = false;
  for (let i = 0, j = polygon.length - 1; i < polygon.length; j = i++) {
    const a = polygon[i]!;
    const b = polygon[j]!;
    const crosses = a.y > pt.y !== b.y > pt.y &&
      pt.x < ((b.x - a.x) * (pt.y - a.y)) / (b.y - a.y) + a.x;
    if (crosses) inside = !inside;
  }
  return inside;
}

/** Doc ids whose screen positions fall inside the lasso polygon. */
export function selectInPolygon(
    docIds: ReadonlyArray<string>, screen: ReadonlyArray<Pt>,
    polygon: ReadonlyArray<Pt>): string[] {
  const hits: string[] = [];
  for (let i = 0; i < docIds.length; i++) {
    if (pointInPolygon(screen[i]!, polygon)) hits.push(docIds[i]!);
  }
  return hits;
}

/**
 * Every mark within `radius` of the cursor, nearest first. Returning all
 * of them keeps coincident points hover-discoverable.
 */
export function marksNear(screen: ReadonlyArray<Pt>, cursor: Pt,
                          radius: number): number[] {
  const found: Array<{ index: number; d2: number }> = [];
  const r2 = radius * radius;
  for (let i = 0; i < screen.length; i++) {
    const dx = screen[i]!.x - cursor.x;
    const dy = screen[i]!.y - cursor.y;
    const d2 = dx * dx + dy * dy;
    if (d2 <= r2) found.push({ index: i, d2 });
  }
  found.sort((a, b) => a.d2 - b.d2 || a.index - b.index);
  return found.map((f) => f.index);
}
