// DOM rendering: one absolutely-positioned CSS grid per document, one div
// per cell spanning its tracks.  All classing decisions live in the view
// state; this layer only mirrors them into elements.

import { CellView, DocumentView } from "./state.js";
import { Path, pathKey } from "./paths.js";

export class GridRenderer {
  constructor(
    private container: HTMLElement,
    private onCellClick: (path: Path, withSlice: boolean) => void,
    private onEditCommit: (text: string) => void,
    private onEditCancel: () => void,
  ) {}

  render(view: DocumentView): void {
    const cells = view.cells();
    this.container.textContent = "";
    const grid = document.createElement("div");
    grid.className = "lish-grid";
    for (const cell of cells) {
      grid.appendChild(this.renderCell(view, cell));
    }
    this.container.appendChild(grid);
    const notice = view.state.notice;
    if (notice) {
      const bar = document.createElement("div");
      bar.className = "notice";
      bar.textContent = notice;
      this.container.appendChild(bar);
    }
  }

  private renderCell(view: DocumentView, cell: CellView): HTMLElement {
    const el = document.createElement("div");
    el.className = cell.classes.join(" ");
    el.dataset.path = pathKey(cell.path);
    el.style.gridColumn = `${cell.x + 1} / span ${cell.cs}`;
    el.style.gridRow = `${cell.y + 1} / span ${cell.rs}`;
    const editing = view.state.editing;
    if (editing && pathKey(editing.path) === pathKey(cell.path)) {
      el.appendChild(this.editor(editing.initial));
    } else {
      el.textContent = cell.text;
      if (cell.classes.includes("warned") && view.state.warning) {
        el.title = view.state.warning.message;
      }
      el.addEventListener("click", (event) => {
        this.onCellClick(cell.path, event.altKey);
      });
    }
    return el;
  }

  private editor(initial: string): HTMLInputElement {
    const input = document.createElement("input");
    input.className = "cell-editor";
    input.value = initial;
    input.addEventListener("keydown", (event) => {
      if (event.key === "Enter") {
        this.onEditCommit(input.value);
        event.stopPropagation();
      } else if (event.key === "Escape") {
        this.onEditCancel();
        event.stopPropagation();
      }
    });
    queueMicrotask(() => input.focus());
    return input;
  }
}
