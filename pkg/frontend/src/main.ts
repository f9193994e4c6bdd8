// Editor bootstrap: document picker, keyboard wiring, change events.

import { ApiClient } from "./api.js";
import { sliceForMarginCell } from "./cursor.js";
import { GridRenderer } from "./grid.js";
import { DocumentView } from "./state.js";
import { Path } from "./paths.js";

async function boot(): Promise<void> {
  const api = new ApiClient("");
  const picker = document.getElementById("doc-picker") as HTMLSelectElement;
  const gridHost = document.getElementById("grid-host") as HTMLElement;
  const toolbar = document.getElementById("toolbar") as HTMLElement;

  let view: DocumentView | undefined;
  let renderer: GridRenderer | undefined;

  const open = async (docId: string) => {
    view = new DocumentView(api, docId);
    renderer = new GridRenderer(
      gridHost,
      (path: Path, withSlice: boolean) => {
        if (!view) return;
        const slice = withSlice ? sliceForMarginCell(view.state.snapshot!, path) : undefined;
        void view.select(slice ?? { element: path });
      },
      (text) => void view?.commitEdit(text),
      () => {
        if (view) {
          view.state.editing = undefined;
          renderer?.render(view);
        }
      },
    );
    view.onChange(() => renderer?.render(view!));
    await view.load();
  };

  const ids = await api.listDocuments();
  for (const id of ids) {
    const option = document.createElement("option");
    option.value = option.textContent = id;
    picker.appendChild(option);
  }
  picker.addEventListener("change", () => void open(picker.value));
  if (ids.length) await open(ids[0]);

  document.addEventListener("keydown", (event) => {
    if (!view || view.state.editing) return;
    const keyMap: Record<string, "up" | "down" | "left" | "right" | "enter" | "escape"> = {
      ArrowUp: "up",
      ArrowDown: "down",
      ArrowLeft: "left",
      ArrowRight: "right",
      Enter: "enter",
      Escape: "escape",
    };
    const mapped = keyMap[event.key];
    if (mapped) {
      event.preventDefault();
      void view.handleKey(mapped);
    } else if (event.key === "F2" || event.key === "=") {
      view.startEditing();
      event.preventDefault();
    } else if (event.key.length === 1 && !event.ctrlKey && !event.metaKey) {
      view.startEditing();
    }
  });

  const actions: [string, () => void][] = [
    ["Wrap slice", () => void view?.wrapSlice()],
    ["New sibling", () => void view?.instantiateSibling()],
    ["Delete", () => void view?.deleteSelected()],
    ["Expand to range", () => void view?.expandSelected(3)],
  ];
  for (const [label, action] of actions) {
    const button = document.createElement("button");
    button.textContent = label;
    button.addEventListener("click", action);
    toolbar.appendChild(button);
  }

  api.events((id) => {
    if (view && id === view.state.docId) void view.refresh();
  });
}

window.addEventListener("load", () => void boot());
