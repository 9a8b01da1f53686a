/** Deterministic colors: a fixed tag_names order always paints the same. */

export const PALETTE = [
  "#4269d0", "#efb118", "#ff725c", "#6cc5b0", "#3ca951", "#ff8ab7",
  "#a463f2", "#97bbf5", "#9c6b4e", "#9498a0", "#e4cf5b", "#46aecc",
] as const;

export const UNTAGGED_COLOR = "#c7c9ce";
export const TRIMMED_COLOR = "#60646c";

export function tagColor(tag: string | null,
                         tagNames: ReadonlyArray<string>): string {
  if (tag === null) return UNTAGGED_COLOR;
  const index = tagNames.indexOf(tag);
  if (index < 0) return UNTAGGED_COLOR;
  return PALETTE[index % PALETTE.length]!;
}

export function clusterColor(label: number | "TRIMMED"): string {
  if (label === "TRIMMED") return TRIMMED_COLOR;
  return PALETTE[(label - 1) % PALETTE.length]!;
}
