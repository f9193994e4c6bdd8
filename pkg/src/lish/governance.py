"""Margin governance: secondary selections, formula precedence, cursor.

A marginal cell governs the body cells obtained by the fan-out rule:
substitute every zero component of its path with all body indices at that
level simultaneously, keeping non-zero components fixed.  Where a branch
lands on a lish rather than a cell (a spawned embedded range), governance
descends to every data cell of that range, skipping the range's own
margins.

The inverse direction is computed directly: the margins governing a body
cell are exactly the valid atom-addressing paths obtained by zeroing any
non-empty subset of components of any prefix of the cell's path.  Prefix
masks are what carry governance through embedded ranges, where the margin
path is shorter than the governed cell's path.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .model import (
    Atom,
    Document,
    DomainError,
    Lish,
    Node,
    Path,
    PathError,
    fmt_path,
    marginality,
    node_at,
    zero_free_cells,
)

MOVE_PREV_SIBLING = "prev_sibling"
MOVE_NEXT_SIBLING = "next_sibling"
MOVE_DRILL_IN = "drill_in"
MOVE_DRILL_OUT = "drill_out"
MOVE_SLICE_PREV = "slice_prev"
MOVE_SLICE_NEXT = "slice_next"

MOVES = (
    MOVE_PREV_SIBLING,
    MOVE_NEXT_SIBLING,
    MOVE_DRILL_IN,
    MOVE_DRILL_OUT,
    MOVE_SLICE_PREV,
    MOVE_SLICE_NEXT,
)


@dataclass(frozen=True)
class Element:
    """A whole sub-tree, margins included."""

    path: Path


@dataclass(frozen=True)
class Slice:
    """The cells at one template position across all body elements of a lish."""

    lish: Path
    position: int


Selection = Union[Element, Slice]


def governed_set(doc: Document, path: Path) -> set[Path]:
    """Body cells governed by the marginal cell at ``path`` (never including
    the cell itself).  Non-marginal cells govern nothing."""
    node = node_at(doc.root, path)
    if isinstance(node, Lish):
        raise PathError(f"{fmt_path(path)} addresses a lish, not a cell", path)
    if marginality(path) == 0:
        return set()
    out: set[Path] = set()
    _fan_out(doc.root, path, 0, (), out)
    return out


def _fan_out(node: Node, pattern: Path, i: int, prefix: Path, out: set[Path]) -> None:
    if i == len(pattern):
        if isinstance(node, Atom):
            out.add(prefix)
        else:
            # An embedded range spawned under an atomic template: govern its
            # data cells, not its margins.
            out.update(zero_free_cells(node, prefix))
        return
    if isinstance(node, Atom):
        return  # this branch does not realise the pattern's shape
    want = pattern[i]
    if want == 0:
        indices = range(1, len(node))
    elif want < len(node):
        indices = (want,)
    else:
        return
    for j in indices:
        _fan_out(node[j], pattern, i + 1, prefix + (j,), out)


def governing_margins(doc: Document, path: Path) -> list[Path]:
    """All marginal cells whose governed set contains the body cell at
    ``path``, most specific first (ascending marginality, then longer
    paths, then by position)."""
    node = node_at(doc.root, path)
    if isinstance(node, Lish):
        raise DomainError(f"{fmt_path(path)} addresses a lish, not a cell")
    if marginality(path) > 0:
        raise DomainError(f"{fmt_path(path)} is itself marginal")
    return sorted(_covering_margins(doc, path), key=lambda m: (marginality(m), -len(m), m))


def _covering_margins(doc: Document, path: Path) -> set[Path]:
    # Zero out any non-empty subset of the still-nonzero components of each
    # prefix; keep the masks that address an actual cell.
    found: set[Path] = set()
    for plen in range(1, len(path) + 1):
        prefix = path[:plen]
        slots = [k for k in range(plen) if prefix[k] != 0]
        for mask in range(1, 1 << len(slots)):
            candidate = list(prefix)
            for bit, k in enumerate(slots):
                if mask >> bit & 1:
                    candidate[k] = 0
            m = tuple(candidate)
            try:
                target = node_at(doc.root, m)
            except PathError:
                continue
            if isinstance(target, Atom):
                found.add(m)
    return found


@dataclass(frozen=True)
class FormulaWarning:
    overridden_source: Path
    reason: str

    def to_json(self) -> dict:
        return {"overridden_source": list(self.overridden_source), "reason": self.reason}


@dataclass(frozen=True)
class FormulaResolution:
    """Outcome of innermost-wins resolution for one body cell.

    ``specificity`` is the marginality of the winning source (0 for the
    cell's own formula); warnings name every losing candidate.
    """

    formula: str | None
    source: Path | None
    specificity: int | None
    warnings: tuple[FormulaWarning, ...] = ()

    def to_json(self) -> dict:
        return {
            "formula": self.formula,
            "source": list(self.source) if self.source is not None else None,
            "specificity": self.specificity,
            "warnings": [w.to_json() for w in self.warnings],
        }


def effective_formula(doc: Document, path: Path) -> FormulaResolution:
    """Resolve the formula governing the body cell at ``path``.

    Candidates are the cell's own formula (specificity 0) and any formula
    on a governing margin (specificity = that margin's marginality).  The
    lowest specificity wins; rival candidates at the winning depth are
    broken deterministically by greatest source path, with a warning, as
    genuine rival-template composition is out of scope here.
    """
    node = node_at(doc.root, path)
    if isinstance(node, Lish):
        raise DomainError(f"{fmt_path(path)} addresses a lish, not a cell")
    if marginality(path) > 0:
        raise DomainError("formula resolution applies to body cells")
    candidates: list[tuple[int, Path, str]] = []
    if node.formula is not None:
        candidates.append((0, path, node.formula))
    for m in governing_margins(doc, path):
        cell = node_at(doc.root, m)
        assert isinstance(cell, Atom)
        if cell.formula is not None:
            candidates.append((marginality(m), m, cell.formula))
    if not candidates:
        return FormulaResolution(None, None, None)
    best = min(spec for spec, _, _ in candidates)
    winner = max((c for c in candidates if c[0] == best), key=lambda c: c[1])
    warnings = []
    for spec, src, _ in candidates:
        if src == winner[1]:
            continue
        if spec == best:
            reason = f"same specificity as the winner at {fmt_path(winner[1])}; picked by position"
        else:
            reason = f"overridden by more specific formula at {fmt_path(winner[1])}"
        warnings.append(FormulaWarning(src, reason))
    return FormulaResolution(winner[2], winner[1], winner[0], tuple(warnings))


def selection_cells(doc: Document, sel: Selection) -> list[Path]:
    """Resolve a selection to its cell paths in document order.

    Element selections cover every cell under the path, margins included
    (margins are excluded from arithmetic, so selecting them is harmless).
    Slice selections cover one template position across the body elements,
    descending into embedded ranges like governance does.
    """
    if isinstance(sel, Element):
        node = node_at(doc.root, sel.path)
        if isinstance(node, Atom):
            return [sel.path]
        return [p for p, _ in _iter_cells(node, sel.path)]
    lish = node_at(doc.root, sel.lish)
    if not isinstance(lish, Lish):
        raise PathError(f"{fmt_path(sel.lish)} addresses an atom, not a lish", sel.lish)
    template = lish.template
    if not isinstance(template, Lish):
        raise PathError(f"slices need a lish-shaped template at {fmt_path(sel.lish)}", sel.lish)
    if not 1 <= sel.position < len(template):
        raise PathError(
            f"slice position {sel.position} outside [1,{len(template)}) at {fmt_path(sel.lish)}",
            sel.lish,
        )
    out: list[Path] = []
    for i in range(1, len(lish)):
        el = lish[i]
        if not isinstance(el, Lish) or sel.position >= len(el):
            continue  # only reachable on invalid documents
        target = el[sel.position]
        p = sel.lish + (i, sel.position)
        if isinstance(target, Atom):
            out.append(p)
        else:
            out.extend(zero_free_cells(target, p))
    return out


def _iter_cells(node: Node, base: Path):
    if isinstance(node, Atom):
        yield base, node
        return
    for i, el in enumerate(node.elements):
        yield from _iter_cells(el, base + (i,))


def cursor_move(doc: Document, sel: Selection, move: str) -> Selection:
    """Apply one structured-cursor move; all moves clamp, none can fail.

    Sibling moves keep the selection's granularity (an element selection
    never collapses to a single cell); drill moves change it one level at
    a time; slice moves stay within the body range so the template is
    never swallowed.
    """
    if move not in MOVES:
        raise DomainError(f"unknown cursor move {move!r}")
    if isinstance(sel, Slice):
        return _move_slice(doc, sel, move)
    return _move_element(doc, sel, move)


def _move_slice(doc: Document, sel: Slice, move: str) -> Selection:
    if move == MOVE_DRILL_OUT:
        return Element(sel.lish)
    if move in (MOVE_SLICE_PREV, MOVE_SLICE_NEXT):
        lish = node_at(doc.root, sel.lish)
        assert isinstance(lish, Lish) and isinstance(lish.template, Lish)
        delta = -1 if move == MOVE_SLICE_PREV else 1
        position = _clamp(sel.position + delta, 1, len(lish.template) - 1)
        return Slice(sel.lish, position)
    return sel


def _move_element(doc: Document, sel: Element, move: str) -> Selection:
    path = sel.path
    if move == MOVE_DRILL_OUT:
        return Element(path[:-1]) if path else sel
    if move == MOVE_DRILL_IN:
        node = node_at(doc.root, path)
        if isinstance(node, Lish):
            return Element(path + (0,))
        return sel
    if not path:
        return sel
    parent = node_at(doc.root, path[:-1])
    assert isinstance(parent, Lish)
    last = path[-1]
    if move in (MOVE_PREV_SIBLING, MOVE_NEXT_SIBLING):
        delta = -1 if move == MOVE_PREV_SIBLING else 1
        return Element(path[:-1] + (_clamp(last + delta, 0, len(parent) - 1),))
    # slice_prev / slice_next on an element traverse the body elements of a
    # lish whose template is a lish, never stepping onto the template.
    if isinstance(parent.template, Lish) and last >= 1:
        delta = -1 if move == MOVE_SLICE_PREV else 1
        return Element(path[:-1] + (_clamp(last + delta, 1, len(parent) - 1),))
    return sel


def _clamp(value: int, lo: int, hi: int) -> int:
    return max(lo, min(hi, value))


def selection_to_json(sel: Selection) -> dict:
    if isinstance(sel, Element):
        return {"element": list(sel.path)}
    return {"slice": {"lish": list(sel.lish), "position": sel.position}}


def selection_from_json(obj: object) -> Selection:
    if isinstance(obj, dict) and "element" in obj:
        path = obj["element"]
        if isinstance(path, list) and all(isinstance(c, int) and c >= 0 for c in path):
            return Element(tuple(path))
    if isinstance(obj, dict) and "slice" in obj:
        body = obj["slice"]
        if (
            isinstance(body, dict)
            and isinstance(body.get("lish"), list)
            and all(isinstance(c, int) and c >= 0 for c in body["lish"])
            and isinstance(body.get("position"), int)
        ):
            return Slice(tuple(body["lish"]), body["position"])
    raise DomainError(f"not a selection: {obj!r}")
