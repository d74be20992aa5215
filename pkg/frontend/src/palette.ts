/** Fixed part palette: graph nodes and rendered boxes share one color per
 * node id, so the editor and the viewer correspond visually.
 */

export const PALETTE = [
  "#4e79a7",
  "#f28e2b",
  "#e15759",
  "#76b7b2",
  "#59a14f",
  "#edc948",
  "#b07aa1",
  "#ff9da7",
  "#9c755f",
  "#bab0ac",
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#9467bd",
  "#8c564b",
  "#e377c2",
] as const;

export function colorFor(nodeId: number): string {
  const index = ((nodeId % PALETTE.length) + PALETTE.length) % PALETTE.length;
  return PALETTE[index]!;
}
