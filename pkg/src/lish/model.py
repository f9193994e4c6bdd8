"""Core data model for lish documents.

A lish is a non-empty list of nodes whose first element is the template
(the margin) governing the rest: wherever the template holds a lish, each
body element must hold a lish of the same length; wherever it holds an
atom, the body element may hold anything, including a further lish (a
dynamically spawned embedded range).  Atoms are single cells carrying a
scalar value plus optional formula text and an optional format map.

All values here are immutable; editing builds new trees (see lish.edit).
A path is a tuple of 0-based indices from the root.  Index 0 at any level
addresses that level's template, so a cell is marginal exactly when its
path contains a zero; ``marginality`` counts the zeros.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterator, Sequence, Union

Scalar = Union[None, bool, int, float, str]
Path = tuple[int, ...]

ORIENT_ROWS = "rows"
ORIENT_COLUMNS = "columns"

MODE_STRICT = "strict"
MODE_RELAXED = "relaxed"

# Version of the on-disk JSON format, not of any one document.
FORMAT_VERSION = 1


class LishError(Exception):
    """Base class for all errors raised by this package."""


class PathError(LishError):
    """A path does not address a node of the required kind."""

    def __init__(self, message: str, path: Path = ()):
        super().__init__(message)
        self.path = path


class DomainError(LishError):
    """An operation was applied to a node outside its domain."""


class SchemaError(LishError):
    """Malformed document JSON; ``pointer`` locates the offending value."""

    def __init__(self, message: str, pointer: str = ""):
        super().__init__(f"{pointer or '<document>'}: {message}")
        self.pointer = pointer


class ShapeError(LishError):
    """Ragged or empty input where a rectangular grid was required."""


class InvalidDocument(LishError):
    """An operation that requires a valid document was given a broken one."""

    def __init__(self, report: "ValidationReport", message: str = "document does not validate"):
        super().__init__(message)
        self.report = report


@dataclass(frozen=True)
class Atom:
    """One cell: a scalar value, optional formula text, optional format map.

    The three facets are independent; template cells typically use the
    value as a label while also carrying a formula or formatting for the
    cells they govern.  A value of None with no formula and no format is
    the canonical empty cell.
    """

    value: Scalar = None
    formula: str | None = None
    format: dict[str, str] | None = None

    def __post_init__(self) -> None:
        if self.formula is not None and not self.formula:
            raise ValueError("formula text must be non-empty when present")

    @property
    def is_empty(self) -> bool:
        return self.value is None and self.formula is None and self.format is None


@dataclass(frozen=True)
class Lish:
    """A non-empty ordered sequence of nodes; ``elements[0]`` is the template.

    ``orientation_override`` pins this lish's layout direction instead of
    the depth-alternating default ("rows" stacks elements vertically,
    "columns" lays them side by side).
    """

    elements: tuple["Node", ...]
    orientation_override: str | None = None

    def __post_init__(self) -> None:
        if not isinstance(self.elements, tuple):
            object.__setattr__(self, "elements", tuple(self.elements))
        if self.orientation_override not in (None, ORIENT_ROWS, ORIENT_COLUMNS):
            raise ValueError(f"bad orientation {self.orientation_override!r}")

    def __len__(self) -> int:
        return len(self.elements)

    def __getitem__(self, index: int) -> "Node":
        return self.elements[index]

    @property
    def template(self) -> "Node":
        return self.elements[0]

    @property
    def body(self) -> tuple["Node", ...]:
        return self.elements[1:]


Node = Union[Atom, Lish]


@dataclass(frozen=True)
class Document:
    """A root node plus the formula-placement mode and a runtime edit counter.

    ``version`` counts accepted edits within a session; it is not part of
    the serialized form.  ``mode`` is "strict" (formulae allowed on
    marginal cells only) or "relaxed" (body cells may override, with a
    warning).
    """

    root: Node
    mode: str = MODE_RELAXED
    id: str = ""
    version: int = 0

    def __post_init__(self) -> None:
        if self.mode not in (MODE_STRICT, MODE_RELAXED):
            raise ValueError(f"bad mode {self.mode!r}")


EMPTY_LISH = "empty-lish"
ATOM_UNDER_LISH_TEMPLATE = "atom-under-lish-template"
LENGTH_MISMATCH = "length-mismatch"
STRICT_FORMULA_PLACEMENT = "strict-formula-placement"


@dataclass(frozen=True)
class Violation:
    path: Path
    kind: str
    detail: str

    def to_json(self) -> dict:
        return {"path": list(self.path), "kind": self.kind, "detail": self.detail}


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {"ok": self.ok, "violations": [v.to_json() for v in self.violations]}


def fmt_path(path: Path) -> str:
    return "[" + ",".join(str(c) for c in path) + "]"


def parse_path(text: str) -> Path:
    """Parse the CLI/query path syntax: comma-separated indices, "" = root."""
    text = text.strip()
    if not text:
        return ()
    try:
        parts = tuple(int(p) for p in text.split(","))
    except ValueError:
        raise PathError(f"cannot parse path {text!r}") from None
    if any(p < 0 for p in parts):
        raise PathError(f"path indices must be non-negative: {text!r}")
    return parts


def marginality(path: Path) -> int:
    """Number of zero components; a cell is marginal iff this is >= 1."""
    return sum(1 for c in path if c == 0)


def node_at(root: Node, path: Path) -> Node:
    """Return the node addressed by ``path``, or raise PathError naming the
    failing prefix."""
    node = root
    for depth, index in enumerate(path):
        if isinstance(node, Atom):
            raise PathError(
                f"{fmt_path(path[:depth])} is an atom; cannot index into it",
                path[:depth],
            )
        if not 0 <= index < len(node):
            raise PathError(
                f"index {index} out of range at {fmt_path(path[: depth + 1])} "
                f"(lish of {len(node)})",
                path[: depth + 1],
            )
        node = node[index]
    return node


def iter_atoms(node: Node, base: Path = ()) -> Iterator[tuple[Path, Atom]]:
    """Yield (path, atom) for every cell in document order."""
    if isinstance(node, Atom):
        yield base, node
        return
    for i, el in enumerate(node.elements):
        yield from iter_atoms(el, base + (i,))


def atom_paths(node: Node) -> list[Path]:
    return [p for p, _ in iter_atoms(node)]


def zero_free_cells(node: Lish, base: Path) -> list[Path]:
    """Atomic descendant paths of ``node`` whose suffix beyond ``base`` has
    no zero component, i.e. the body data cells with every nested margin
    excluded."""
    out: list[Path] = []
    for i in range(1, len(node)):
        el = node[i]
        p = base + (i,)
        if isinstance(el, Atom):
            out.append(p)
        else:
            out.extend(zero_free_cells(el, p))
    return out


def validate(node: Node) -> ValidationReport:
    """Check the template rule over the whole tree.

    Every lish must be non-empty, and each body element must conform to
    the lish's template: an atomic template admits anything, a lish
    template requires a lish of the same length, position by position.
    The rule applies recursively inside templates and bodies alike.  All
    violations are collected; nothing is thrown.
    """
    out: list[Violation] = []
    _walk_validate(node, (), out)
    return ValidationReport(tuple(out))


def _walk_validate(node: Node, path: Path, out: list[Violation]) -> None:
    if isinstance(node, Atom):
        return
    if len(node) == 0:
        out.append(Violation(path, EMPTY_LISH, "a lish must contain at least its template element"))
        return
    template = node.template
    for i in range(1, len(node)):
        _conform(template, node[i], path + (0,), path + (i,), out)
    for i, el in enumerate(node.elements):
        _walk_validate(el, path + (i,), out)


def _conform(tpl: Node, el: Node, tpl_path: Path, el_path: Path, out: list[Violation]) -> None:
    if isinstance(tpl, Atom):
        return
    if isinstance(el, Atom):
        out.append(
            Violation(
                el_path,
                ATOM_UNDER_LISH_TEMPLATE,
                f"atom where the template at {fmt_path(tpl_path)} is a lish of {len(tpl)}",
            )
        )
        return
    if len(el) != len(tpl):
        out.append(
            Violation(
                el_path,
                LENGTH_MISMATCH,
                f"lish of {len(el)} where the template at {fmt_path(tpl_path)} has length {len(tpl)}",
            )
        )
        return
    for j in range(len(tpl)):
        _conform(tpl[j], el[j], tpl_path + (j,), el_path + (j,), out)


def validate_document(doc: Document) -> ValidationReport:
    """Structural validation plus the strict-mode formula placement policy."""
    out = list(validate(doc.root).violations)
    if doc.mode == MODE_STRICT:
        for path, atom in iter_atoms(doc.root):
            if atom.formula is not None and marginality(path) == 0:
                out.append(
                    Violation(
                        path,
                        STRICT_FORMULA_PLACEMENT,
                        "strict mode allows formulae on marginal cells only",
                    )
                )
    return ValidationReport(tuple(out))


def data_cells(doc: Document, path: Path) -> set[Path]:
    """All non-marginal cells in the body of the lish at ``path``.

    These are the cells a governing margin feeds into arithmetic; margins
    themselves (any zero in the suffix) are excluded.
    """
    node = node_at(doc.root, path)
    if isinstance(node, Atom):
        raise PathError(f"{fmt_path(path)} addresses an atom, not a lish", path)
    return set(zero_free_cells(node, path))


def from_grid(rows: Sequence[Sequence[Scalar]]) -> Lish:
    """Embed an r x c grid of scalars as a lish.

    Element 0 is a top margin of c+1 empty cells (corner included); each
    data row becomes a lish with an empty cell prepended as its row
    margin.  The result always validates.
    """
    if len(rows) < 1:
        raise ShapeError("grid needs at least one row")
    width = len(rows[0])
    if width < 1:
        raise ShapeError("grid needs at least one column")
    for i, row in enumerate(rows):
        if len(row) != width:
            raise ShapeError(f"row {i} has {len(row)} cells, expected {width}")
    margin = Lish(tuple(Atom() for _ in range(width + 1)))
    body = tuple(Lish((Atom(),) + tuple(Atom(v) for v in row)) for row in rows)
    return Lish((margin,) + body)


# --- JSON wire format -------------------------------------------------------
#
# Document: {"version":1,"mode":"strict"|"relaxed","root":<node>}
# Lish:     [<node>, ...], or {"lish":[...],"orient":"rows"|"cols"} when an
#           orientation override is present.
# Atom:     a bare scalar when formula and format are absent, otherwise
#           {"v":<scalar>,"f":<text>,"fmt":{...}} with null facets omitted.
#
# Canonical form: keys in the order shown, compact separators, shorthand
# whenever lossless, format maps with sorted keys.

_WIRE_ORIENT = {ORIENT_ROWS: "rows", ORIENT_COLUMNS: "cols"}
_ORIENT_WIRE = {"rows": ORIENT_ROWS, "cols": ORIENT_COLUMNS}


def node_to_json(node: Node) -> object:
    if isinstance(node, Atom):
        if node.formula is None and node.format is None:
            return node.value
        obj: dict = {"v": node.value}
        if node.formula is not None:
            obj["f"] = node.formula
        if node.format is not None:
            obj["fmt"] = dict(sorted(node.format.items()))
        return obj
    arr = [node_to_json(el) for el in node.elements]
    if node.orientation_override is not None:
        return {"lish": arr, "orient": _WIRE_ORIENT[node.orientation_override]}
    return arr


def node_from_json(obj: object, pointer: str = "") -> Node:
    if obj is None or isinstance(obj, (bool, int, float, str)):
        return Atom(obj)
    if isinstance(obj, list):
        return Lish(tuple(node_from_json(el, f"{pointer}/{i}") for i, el in enumerate(obj)))
    if isinstance(obj, dict):
        if "lish" in obj:
            return _lish_from_json(obj, pointer)
        if "v" in obj:
            return _atom_from_json(obj, pointer)
        raise SchemaError("object node must contain 'lish' or 'v'", pointer)
    raise SchemaError(f"unsupported JSON value of type {type(obj).__name__}", pointer)


def _lish_from_json(obj: dict, pointer: str) -> Lish:
    extra = set(obj) - {"lish", "orient"}
    if extra:
        raise SchemaError(f"unexpected keys {sorted(extra)}", pointer)
    arr = obj["lish"]
    if not isinstance(arr, list):
        raise SchemaError("'lish' must be an array", pointer + "/lish")
    orient = obj.get("orient")
    if orient not in (None, "rows", "cols"):
        raise SchemaError("'orient' must be 'rows' or 'cols'", pointer + "/orient")
    elements = tuple(node_from_json(el, f"{pointer}/lish/{i}") for i, el in enumerate(arr))
    return Lish(elements, orientation_override=_ORIENT_WIRE[orient] if orient else None)


def _atom_from_json(obj: dict, pointer: str) -> Atom:
    extra = set(obj) - {"v", "f", "fmt"}
    if extra:
        raise SchemaError(f"unexpected keys {sorted(extra)}", pointer)
    value = obj["v"]
    if value is not None and not isinstance(value, (bool, int, float, str)):
        raise SchemaError("'v' must be a scalar", pointer + "/v")
    formula = obj.get("f")
    if formula is not None:
        if not isinstance(formula, str) or not formula:
            raise SchemaError("'f' must be null or a non-empty string", pointer + "/f")
    fmt = obj.get("fmt")
    if fmt is not None:
        if not isinstance(fmt, dict) or not all(
            isinstance(k, str) and isinstance(v, str) for k, v in fmt.items()
        ):
            raise SchemaError("'fmt' must be null or a map of strings", pointer + "/fmt")
        fmt = dict(fmt)
    return Atom(value, formula, fmt)


def document_to_json(doc: Document) -> dict:
    return {"version": FORMAT_VERSION, "mode": doc.mode, "root": node_to_json(doc.root)}


def canonical_dumps(obj: object) -> bytes:
    try:
        return json.dumps(obj, separators=(",", ":"), ensure_ascii=False, allow_nan=False).encode(
            "utf-8"
        )
    except ValueError as exc:
        raise SchemaError(f"value not representable as JSON: {exc}") from exc


def serialize_json(doc: Document) -> bytes:
    """Canonical document bytes; parse(serialize(d)) preserves structure."""
    return canonical_dumps(document_to_json(doc))


def serialize_node(node: Node) -> bytes:
    """Canonical bytes of a single node (the document 'root' encoding)."""
    return canonical_dumps(node_to_json(node))


def parse_json(data: bytes | str, doc_id: str = "") -> Document:
    """Parse the wire format.

    Schema problems raise SchemaError with a JSON pointer.  Documents that
    break the template rule still parse (run ``validate_document`` to get
    the report) so broken files can be inspected and repaired.
    """
    try:
        obj = json.loads(data)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"not valid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise SchemaError("document must be a JSON object")
    missing = {"version", "mode", "root"} - set(obj)
    if missing:
        raise SchemaError(f"missing keys {sorted(missing)}")
    extra = set(obj) - {"version", "mode", "root"}
    if extra:
        raise SchemaError(f"unexpected keys {sorted(extra)}")
    if obj["version"] != FORMAT_VERSION:
        raise SchemaError(f"unsupported format version {obj['version']!r}", "/version")
    if obj["mode"] not in (MODE_STRICT, MODE_RELAXED):
        raise SchemaError("mode must be 'strict' or 'relaxed'", "/mode")
    root = node_from_json(obj["root"], "/root")
    return Document(root=root, mode=obj["mode"], id=doc_id, version=0)
