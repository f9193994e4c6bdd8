// Path arithmetic shared by the cursor, highlighting and the grid view.
// Paths are arrays of 0-based indices; index 0 at any level is a margin.

export type Path = number[];

export function pathsEqual(a: Path, b: Path): boolean {
  return a.length === b.length && a.every((c, i) => c === b[i]);
}

export function isPrefix(prefix: Path, path: Path): boolean {
  return prefix.length <= path.length && prefix.every((c, i) => c === path[i]);
}

export function marginality(path: Path): number {
  return path.reduce((n, c) => n + (c === 0 ? 1 : 0), 0);
}

export function pathKey(path: Path): string {
  return path.join(",");
}

export class PathSet {
  private keys = new Set<string>();

  constructor(paths: Iterable<Path> = []) {
    for (const p of paths) this.add(p);
  }

  add(path: Path): void {
    this.keys.add(pathKey(path));
  }

  has(path: Path): boolean {
    return this.keys.has(pathKey(path));
  }

  get size(): number {
    return this.keys.size;
  }
}
