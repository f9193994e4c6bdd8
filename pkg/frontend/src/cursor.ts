// Client-side structured cursor.
//
// The cursor selects whole sub-trees (elements) or template positions
// across a lish (slices), never arbitrary rectangles.  Arrow keys move to
// the sibling selection in the arrow's direction at the deepest ancestor
// level that actually moves that way on screen, preserving the selection's
// shape: stepping up from one row's column group lands on the same column
// group of the row above, not on a single cell.  The server remains the
// authority on what a selection covers (GET /docs/{id}/selection).

import { PlacementJson, Selection, Snapshot, isLishJson, lishElements, nodeAt } from "./types.js";
import { Path, isPrefix, pathsEqual } from "./paths.js";

export type ArrowKey = "up" | "down" | "left" | "right";

interface Box {
  x0: number;
  y0: number;
  x1: number;
  y1: number;
}

function boundsOf(layout: PlacementJson[], prefix: Path): Box | undefined {
  let box: Box | undefined;
  for (const p of layout) {
    if (!isPrefix(prefix, p.path)) continue;
    const cell = { x0: p.x, y0: p.y, x1: p.x + p.cs, y1: p.y + p.rs };
    box = box
      ? {
          x0: Math.min(box.x0, cell.x0),
          y0: Math.min(box.y0, cell.y0),
          x1: Math.max(box.x1, cell.x1),
          y1: Math.max(box.y1, cell.y1),
        }
      : cell;
  }
  return box;
}

function movesInDirection(from: Box, to: Box, key: ArrowKey): boolean {
  switch (key) {
    case "up":
      return to.y1 <= from.y0;
    case "down":
      return to.y0 >= from.y1;
    case "left":
      return to.x1 <= from.x0;
    case "right":
      return to.x0 >= from.x1;
  }
}

/** Sibling selection one step in the arrow's direction, or the original
 * selection when the edge is reached (arrows clamp, never collapse). */
export function arrowMove(snapshot: Snapshot, selection: Selection, key: ArrowKey): Selection {
  if ("slice" in selection) {
    return sliceArrow(snapshot, selection, key);
  }
  const path = selection.element;
  const from = boundsOf(snapshot.layout, path);
  if (!from) return selection;
  for (let level = path.length - 1; level >= 0; level--) {
    for (const step of [-1, 1]) {
      const candidate = path.slice();
      candidate[level] += step;
      if (candidate[level] < 0) continue;
      const to = boundsOf(snapshot.layout, candidate);
      if (to && movesInDirection(from, to, key)) {
        return { element: candidate };
      }
    }
  }
  return selection;
}

function sliceArrow(
  snapshot: Snapshot,
  selection: { slice: { lish: number[]; position: number } },
  key: ArrowKey,
): Selection {
  const { lish, position } = selection.slice;
  const node = nodeAt(snapshot.doc.root, lish);
  if (node === undefined || !isLishJson(node)) return selection;
  const template = lishElements(node)[0];
  if (!isLishJson(template)) return selection;
  const limit = lishElements(template).length - 1;
  const step = key === "left" || key === "up" ? -1 : 1;
  const next = Math.max(1, Math.min(limit, position + step));
  return { slice: { lish, position: next } };
}

/** Enter: one level finer (onto the template cell of the selected lish). */
export function drillIn(snapshot: Snapshot, selection: Selection): Selection {
  if ("slice" in selection) return selection;
  const node = nodeAt(snapshot.doc.root, selection.element);
  if (node !== undefined && isLishJson(node)) {
    return { element: [...selection.element, 0] };
  }
  return selection;
}

/** Escape: one level coarser; the root is a fixed point. */
export function drillOut(selection: Selection): Selection {
  if ("slice" in selection) {
    return { element: selection.slice.lish };
  }
  if (selection.element.length === 0) return selection;
  return { element: selection.element.slice(0, -1) };
}

/** Margin-cell click convention: selecting a marginal cell at
 * [...lish, 0, k] offers the slice at position k across that lish. */
export function sliceForMarginCell(snapshot: Snapshot, cell: Path): Selection | undefined {
  if (cell.length < 2 || cell[cell.length - 2] !== 0) return undefined;
  const lish = cell.slice(0, -2);
  const position = cell[cell.length - 1];
  if (position < 1) return undefined;
  const node = nodeAt(snapshot.doc.root, lish);
  if (node === undefined || !isLishJson(node)) return undefined;
  return { slice: { lish, position } };
}

export function sameSelection(a: Selection, b: Selection): boolean {
  if ("element" in a && "element" in b) return pathsEqual(a.element, b.element);
  if ("slice" in a && "slice" in b) {
    return pathsEqual(a.slice.lish, b.slice.lish) && a.slice.position === b.slice.position;
  }
  return false;
}
