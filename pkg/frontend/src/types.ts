// Wire types mirroring the document service's JSON encodings.

export type Scalar = null | boolean | number | string;

export interface AtomObject {
  v: Scalar;
  f?: string | null;
  fmt?: Record<string, string> | null;
}

export interface OrientedLish {
  lish: NodeJson[];
  orient?: "rows" | "cols";
}

export type NodeJson = Scalar | NodeJson[] | AtomObject | OrientedLish;

export interface DocumentJson {
  version: number;
  mode: "strict" | "relaxed";
  root: NodeJson;
}

export interface PlacementJson {
  path: number[];
  x: number;
  y: number;
  cs: number;
  rs: number;
  depth: number;
}

export interface Snapshot {
  id: string;
  version: number;
  doc: DocumentJson;
  layout: PlacementJson[];
}

export type Selection =
  | { element: number[] }
  | { slice: { lish: number[]; position: number } };

export interface EditCommand {
  cmd: string;
  [field: string]: unknown;
}

export interface ApplyResult {
  id: string;
  version: number;
  diagnostics: string[];
  doc: DocumentJson;
}

export interface ApplyRejection {
  error: string;
  report?: { ok: boolean; violations: { path: number[]; kind: string; detail: string }[] } | null;
}

export interface VersionConflict {
  error: "version-conflict";
  current_version: number;
}

export function isLishJson(node: NodeJson): node is NodeJson[] | OrientedLish {
  return Array.isArray(node) || (typeof node === "object" && node !== null && "lish" in node);
}

export function lishElements(node: NodeJson[] | OrientedLish): NodeJson[] {
  return Array.isArray(node) ? node : node.lish;
}

export function nodeAt(root: NodeJson, path: number[]): NodeJson | undefined {
  let node: NodeJson = root;
  for (const index of path) {
    if (!isLishJson(node)) return undefined;
    const elements = lishElements(node);
    if (index < 0 || index >= elements.length) return undefined;
    node = elements[index];
  }
  return node;
}

export function atomValue(node: NodeJson): Scalar {
  if (node === null || typeof node !== "object") return node as Scalar;
  if (!Array.isArray(node) && "v" in node) return (node as AtomObject).v;
  return null;
}
