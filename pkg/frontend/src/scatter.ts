/** Scatter layout and canvas drawing. Layout is pure; drawing is thin. */

import type { ClusterPayload, ProjectionPoint } from "./api.js";
import { clusterColor, tagColor, UNTAGGED_COLOR } from "./colors.js";
import { fitTransform, toScreen, type Pt, type Transform } from "./geometry.js";
import type { ColorBy } from "./state.js";

export interface Mark {
  docId: string;
  x: number;
  y: number;
  color: string;
  selected: boolean;
  staged: boolean;
}

export interface Coloring {
  colorBy: ColorBy;
  tagNames: ReadonlyArray<string>;
  tags: ReadonlyMap<string, string | null>;
  clusters: ClusterPayload | null;
}

export function layout(projection: ReadonlyArray<ProjectionPoint>,
                       transform: Transform, coloring: Coloring,
                       selection: ReadonlySet<string>,
                       stagedIds: ReadonlySet<string>): Mark[] {
  return projection.map((point, index) => {
    const { x, y } = toScreen(transform, point.v1, point.v2);
    let color = UNTAGGED_COLOR;
    if (coloring.colorBy === "TAG") {
      color = tagColor(coloring.tags.get(point.doc_id) ?? null,
                       coloring.tagNames);
    } else if (coloring.clusters !== null) {
      const label = coloring.clusters.assignment[index];
      if (label !== undefined) color = clusterColor(label);
    }
    return {
      docId: point.doc_id,
      x,
      y,
      color,
      selected: selection.has(point.doc_id),
      staged: stagedIds.has(point.doc_id),
    };
  });
}

export function transformFor(projection: ReadonlyArray<ProjectionPoint>,
                             width: number, height: number): Transform {
  return fitTransform(projection, width, height);
}

export function drawScatter(ctx: CanvasRenderingContext2D,
                            width: number, height: number,
                            marks: ReadonlyArray<Mark>,
                            lasso: ReadonlyArray<Pt>): void {
  ctx.clearRect(0, 0, width, height);
  for (const mark of marks) {
    ctx.beginPath();
    ctx.arc(mark.x, mark.y, mark.selected ? 5 : 3.5, 0, Math.PI * 2);
    ctx.fillStyle = mark.color;
    ctx.globalAlpha = mark.staged ? 0.45 : 0.9;
    ctx.fill();
    if (mark.selected) {
      ctx.globalAlpha = 1;
      ctx.lineWidth = 1.5;
      ctx.strokeStyle = "#111111";
      ctx.stroke();
    }
  }
  ctx.globalAlpha = 1;
  if (lasso.length > 1) {
    ctx.beginPath();
    ctx.moveTo(lasso[0]!.x, lasso[0]!.y);
    for (const pt of lasso.slice(1)) ctx.lineTo(pt.x, pt.y);
    ctx.closePath();
    ctx.strokeStyle = "#111111";
    ctx.setLineDash([4, 3]);
    ctx.lineWidth = 1;
    ctx.stroke();
    ctx.setLineDash([]);
  }
}
