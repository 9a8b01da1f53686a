/** View model for the validation panel; rendering stays trivial. */

import type { ClusterPayload, ValidationReport } from "./api.js";

export interface SilhouetteBar {
  cluster: number | "TRIMMED";
  mean: number;
}

export interface PanelModel {
  placeholder: boolean;
  accuracyLine: string | null;
  silhouetteLine: string | null;
  bars: SilhouetteBar[];
}

export function formatAccuracy(accuracy: number, misclassified: number,
                               tagged: number): string {
  const percent = (accuracy * 100).toFixed(1);
  return `${percent}% (${misclassified}/${tagged} misclassified)`;
}

/**
 * Mean silhouette width per cluster, sorted by width descending. The
 * per-point values cover the tagged documents in load order, which is
 * exactly how the service subsets them.
 */
export function clusterBars(perPoint: ReadonlyArray<number>,
                            taggedDocIndexes: ReadonlyArray<number>,
                            clusters: ClusterPayload): SilhouetteBar[] {
  const sums = new Map<number | "TRIMMED", { total: number; n: number }>();
  perPoint.forEach((width, i) => {
    const docIndex = taggedDocIndexes[i];
    if (docIndex === undefined) return;
    const label = clusters.assignment[docIndex];
    if (label === undefined) return;
    const cell = sums.get(label) ?? { total: 0, n: 0 };
    cell.total += width;
    cell.n += 1;
    sums.set(label, cell);
  });
  const bars = [...sums.entries()].map(([cluster, cell]) => ({
    cluster,
    mean: cell.total / cell.n,
  }));
  bars.sort((a, b) => b.mean - a.mean);
  return bars;
}

export function buildPanel(report: ValidationReport | null, tagged: number,
                           taggedDocIndexes: ReadonlyArray<number>,
                           clusters: ClusterPayload | null): PanelModel {
  if (report === null ||
      (report.accuracy === undefined &&
       report.silhouette_index === undefined)) {
    return {
      placeholder: true,
      accuracyLine: null,
      silhouetteLine: null,
      bars: [],
    };
  }
  const accuracyLine =
    report.accuracy !== undefined && report.misclassified !== undefined
      ? formatAccuracy(report.accuracy, report.misclassified, tagged)
      : null;
  const silhouetteLine =
    report.silhouette_index !== undefined
      ? `silhouette ${report.silhouette_index.toFixed(3)}`
      : null;
  const bars =
    report.per_point_silhouette !== undefined && clusters !== null
      ? clusterBars(report.per_point_silhouette, taggedDocIndexes, clusters)
      : [];
  return { placeholder: false, accuracyLine, silhouetteLine, bars };
}
