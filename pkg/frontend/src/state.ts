// View state for one open document.
//
// The client is deliberately thin: layout comes from the snapshot,
// highlighted cell sets come from the server's governance answers, and
// every edit is submitted with the version it was based on.  A stale
// version triggers a re-fetch and a retry prompt, never a silent merge;
// answers arriving for an outdated selection or version are discarded.

import { ApiClient, CommandRejectedError, VersionConflictError } from "./api.js";
import { arrowMove, ArrowKey, drillIn, drillOut, sameSelection } from "./cursor.js";
import { marginality, Path, PathSet, isPrefix } from "./paths.js";
import {
  EditCommand,
  Selection,
  Snapshot,
  atomValue,
  isLishJson,
  nodeAt,
} from "./types.js";

export interface CellWarning {
  path: Path;
  message: string;
}

export interface ViewState {
  docId: string;
  snapshot?: Snapshot;
  selection: Selection;
  /** Cells covered by the current selection, as the server resolves it. */
  primary: PathSet;
  /** Governed set of the selected marginal cell (the live highlight). */
  secondary: PathSet;
  warning?: CellWarning;
  notice?: string;
  editing?: { path: Path; initial: string };
}

export interface CellView {
  path: Path;
  x: number;
  y: number;
  cs: number;
  rs: number;
  text: string;
  classes: string[];
}

type Listener = (state: ViewState) => void;

const DEPTH_SHADES = 4; // shading repeats past four margin levels

export class DocumentView {
  state: ViewState;
  private listeners: Listener[] = [];
  private selectToken = 0;

  constructor(private api: ApiClient, docId: string) {
    this.state = {
      docId,
      selection: { element: [] },
      primary: new PathSet(),
      secondary: new PathSet(),
    };
  }

  onChange(listener: Listener): void {
    this.listeners.push(listener);
  }

  private emit(): void {
    for (const listener of this.listeners) listener(this.state);
  }

  async load(): Promise<void> {
    this.state.snapshot = await this.api.snapshot(this.state.docId);
    this.emit();
    await this.select(this.state.selection);
  }

  /** Re-fetch on a change event for this document (SSE or 409). */
  async refresh(version?: number): Promise<void> {
    if (version !== undefined && this.state.snapshot?.version === version) return;
    await this.load();
  }

  async select(selection: Selection): Promise<void> {
    const snapshot = this.state.snapshot;
    if (!snapshot) return;
    this.state.selection = selection;
    this.state.warning = undefined;
    const token = ++this.selectToken;
    const primary = await this.api.selectionCells(this.state.docId, selection);
    let secondary: number[][] = [];
    if ("element" in selection) {
      const node = nodeAt(snapshot.doc.root, selection.element);
      if (node !== undefined && !isLishJson(node) && marginality(selection.element) > 0) {
        secondary = await this.api.governed(this.state.docId, selection.element);
      }
    }
    if (token !== this.selectToken) return; // a newer selection overtook this one
    this.state.primary = new PathSet(primary);
    this.state.secondary = new PathSet(secondary);
    this.emit();
  }

  async handleKey(key: ArrowKey | "enter" | "escape"): Promise<void> {
    const snapshot = this.state.snapshot;
    if (!snapshot) return;
    const selection = this.state.selection;
    const moved =
      key === "enter"
        ? drillIn(snapshot, selection)
        : key === "escape"
          ? drillOut(selection)
          : arrowMove(snapshot, selection, key);
    if (!sameSelection(moved, selection)) {
      await this.select(moved);
    }
  }

  startEditing(): void {
    const snapshot = this.state.snapshot;
    if (!snapshot || !("element" in this.state.selection)) return;
    const path = this.state.selection.element;
    const node = nodeAt(snapshot.doc.root, path);
    if (node === undefined || isLishJson(node)) return;
    const value = atomValue(node);
    this.state.editing = { path, initial: value === null ? "" : String(value) };
    this.emit();
  }

  /** Commit a cell edit; "=..." text becomes formula text, anything else a
   * value.  Strict-mode rejections surface as an inline warning. */
  async commitEdit(text: string): Promise<void> {
    const editing = this.state.editing;
    if (!editing) return;
    this.state.editing = undefined;
    const command: EditCommand = text.startsWith("=")
      ? { cmd: "set_formula", path: editing.path, text }
      : { cmd: "set_value", path: editing.path, value: parseScalar(text) };
    await this.submit([command], editing.path);
  }

  async submit(commands: EditCommand[], at?: Path): Promise<void> {
    const snapshot = this.state.snapshot;
    if (!snapshot) return;
    try {
      const result = await this.api.applyCommands(this.state.docId, snapshot.version, commands);
      this.state.notice = result.diagnostics.join("; ") || undefined;
      await this.load();
    } catch (error) {
      if (error instanceof VersionConflictError) {
        this.state.notice = "document changed elsewhere; re-fetched, please retry";
        await this.load();
        return;
      }
      if (error instanceof CommandRejectedError) {
        this.state.warning = { path: at ?? [], message: error.rejection.error };
        this.emit();
        return;
      }
      throw error;
    }
  }

  // --- refactoring gestures over the current selection ------------------

  async wrapSlice(): Promise<void> {
    const selection = this.state.selection;
    if (!("slice" in selection)) return;
    const { lish, position } = selection.slice;
    await this.submit([{ cmd: "wrap_columns", lish_path: lish, from: position, to: position }]);
  }

  async instantiateSibling(): Promise<void> {
    const selection = this.state.selection;
    if (!("element" in selection) || selection.element.length === 0) return;
    const path = selection.element;
    await this.submit([
      {
        cmd: "instantiate_element",
        lish_path: path.slice(0, -1),
        at_index: path[path.length - 1] + 1,
      },
    ]);
  }

  async deleteSelected(): Promise<void> {
    const selection = this.state.selection;
    if (!("element" in selection) || !this.canDelete()) return;
    await this.submit([{ cmd: "delete_element", path: selection.element }]);
  }

  /** Templates are load-bearing: the affordance is disabled on them. */
  canDelete(): boolean {
    const selection = this.state.selection;
    return (
      "element" in selection &&
      selection.element.length > 0 &&
      selection.element[selection.element.length - 1] !== 0
    );
  }

  async expandSelected(length: number): Promise<void> {
    const selection = this.state.selection;
    if (!("element" in selection)) return;
    await this.submit([{ cmd: "expand_atom", path: selection.element, length }]);
  }

  // --- grid view derivation ---------------------------------------------

  cells(): CellView[] {
    const snapshot = this.state.snapshot;
    if (!snapshot) return [];
    const selection = this.state.selection;
    return snapshot.layout.map((p) => {
      const classes = ["cell"];
      if (p.depth > 0) {
        classes.push(`margin-${((p.depth - 1) % DEPTH_SHADES) + 1}`);
      }
      if ("element" in selection && isPrefix(selection.element, p.path)) {
        classes.push("selected");
      }
      if (this.state.primary.has(p.path)) classes.push("in-selection");
      if (this.state.secondary.has(p.path)) classes.push("secondary");
      if (this.state.warning && isPrefix(this.state.warning.path, p.path)) {
        classes.push("warned");
      }
      const node = nodeAt(snapshot.doc.root, p.path);
      const value = node === undefined ? null : atomValue(node);
      return {
        path: p.path,
        x: p.x,
        y: p.y,
        cs: p.cs,
        rs: p.rs,
        text: value === null ? "" : String(value),
        classes,
      };
    });
  }
}

export function parseScalar(text: string): null | boolean | number | string {
  const trimmed = text.trim();
  if (trimmed === "") return null;
  if (trimmed === "true") return true;
  if (trimmed === "false") return false;
  if (/^[+-]?\d+$/.test(trimmed)) return parseInt(trimmed, 10);
  if (/^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$/.test(trimmed)) return parseFloat(trimmed);
  return text;
}
