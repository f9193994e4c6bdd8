import { describe, expect, it } from "vitest";

import { pathKey } from "../src/paths.js";
import { DocumentView } from "../src/state.js";
import { FakeApi, fixture, loadSnapshot } from "./helpers.js";

// The 2016 cell inside the workforce template's headcount table governs
// one cell per site per grade; the highlight must be exactly the server's
// answer, never a client-side guess.
const YEAR_CELL = [0, 2, 2, 0, 2];

function workforceView(): { view: DocumentView; api: FakeApi } {
  const api = new FakeApi();
  const snapshot = loadSnapshot("workforce");
  api.get("/docs/workforce", snapshot);
  api.get(`/docs/workforce/governed?path=${YEAR_CELL.join(",")}`, fixture("workforce.governed-2016.json"));
  api.routes.set("GET *", () => ({ body: [] }));
  api.get(
    `/docs/workforce/selection?sel=${encodeURIComponent(JSON.stringify({ element: YEAR_CELL }))}`,
    [YEAR_CELL],
  );
  return { view: new DocumentView(api.client, "workforce"), api };
}

describe("secondary selection highlighting", () => {
  it("selecting the 2016 template cell highlights exactly the 9 governed cells", async () => {
    const { view } = workforceView();
    await view.load();
    await view.select({ element: YEAR_CELL });

    const expected = fixture<number[][]>("workforce.governed-2016.json");
    expect(expected).toHaveLength(9);
    expect(view.state.secondary.size).toBe(9);
    for (const path of expected) {
      expect(view.state.secondary.has(path)).toBe(true);
    }

    const highlighted = view
      .cells()
      .filter((cell) => cell.classes.includes("secondary"))
      .map((cell) => pathKey(cell.path))
      .sort();
    expect(highlighted).toEqual(expected.map(pathKey).sort());
  });

  it("non-marginal cells produce no secondary highlight", async () => {
    const { view } = workforceView();
    await view.load();
    await view.select({ element: [1, 2, 2, 1, 2] });
    expect(view.state.secondary.size).toBe(0);
    expect(view.cells().every((cell) => !cell.classes.includes("secondary"))).toBe(true);
  });

  it("a stale governance answer is discarded when the selection moves on", async () => {
    const { view, api } = workforceView();
    await view.load();
    let release: (() => void) | undefined;
    const gate = new Promise<void>((resolve) => (release = resolve));
    const slowUrl = `/docs/workforce/selection?sel=${encodeURIComponent(
      JSON.stringify({ element: [1] }),
    )}`;
    api.routes.set("GET " + slowUrl, () => ({ body: [[1, 1, 1]] }));
    const first = view.select({ element: YEAR_CELL });
    const second = view.select({ element: [1] });
    release?.();
    await Promise.all([first, second]);
    // The later selection of a non-marginal element wins: no leftover
    // highlight from the first request may survive.
    expect(view.state.secondary.size).toBe(0);
  });

  it("margins are shaded by depth with a repeating scale", async () => {
    const { view } = workforceView();
    await view.load();
    const byPath = new Map(view.cells().map((cell) => [pathKey(cell.path), cell.classes]));
    expect(byPath.get(pathKey([0, 2, 2, 0, 0]))).toContain("margin-3");
    expect(byPath.get(pathKey(YEAR_CELL))).toContain("margin-2");
    expect(byPath.get(pathKey([1, 2, 2, 1, 2]))).not.toContain("margin-1");
  });
});
