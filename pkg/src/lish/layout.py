"""Projection of lish documents onto 2-D cell tracks.

The engine is a recursive box layout with no global grid.  A lish lays
its elements along its major axis ("rows" stacks them vertically,
"columns" side by side); nesting flips the axis at each level unless a
lish overrides its own orientation.

Alignment comes only from templates: when a lish's template is itself a
lish, the k-th position of every element (template included) is allocated
the same extent along the elements' major axis, sized to the largest
requirement over all elements.  An atom sitting in a widened position
spans the whole allocation, which is how a spawned embedded range in one
element grows that element without disturbing its siblings' tracks.
Sibling lishes under an atomic template get no coupling at all: each lays
out at its own natural size, so two unrelated tables never share column
widths.

The same recursion runs in two metrics: unit cells for ``compute_layout``
(integer track coordinates, spans, marginality depth) and character
widths for ``render_text`` (a monospace picture whose marginal cells are
wrapped in depth-repeated markers).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable

from .model import (
    Atom,
    Document,
    InvalidDocument,
    Lish,
    Node,
    ORIENT_COLUMNS,
    ORIENT_ROWS,
    Path,
    marginality,
    validate,
)


@dataclass(frozen=True)
class Placement:
    path: Path
    x: int
    y: int
    col_span: int
    row_span: int
    depth: int
    orientation_at: str

    def to_json(self) -> dict:
        return {
            "path": list(self.path),
            "x": self.x,
            "y": self.y,
            "cs": self.col_span,
            "rs": self.row_span,
            "depth": self.depth,
        }


@dataclass(frozen=True)
class LayoutOptions:
    root_orientation: str = ORIENT_ROWS
    gap: int = 1

    def __post_init__(self) -> None:
        if self.root_orientation not in (ORIENT_ROWS, ORIENT_COLUMNS):
            raise ValueError(f"bad orientation {self.root_orientation!r}")
        if self.gap < 0:
            raise ValueError("gap must be >= 0")


def _flip(orientation: str) -> str:
    return ORIENT_COLUMNS if orientation == ORIENT_ROWS else ORIENT_ROWS


@dataclass
class _Cell:
    path: Path
    x: int
    y: int
    w: int
    h: int
    orient: str


@dataclass
class _ElemInfo:
    start: int  # cell range within the box
    end: int
    offset: int  # along the containing lish's major axis
    extent: int
    is_atom: bool
    orient: str | None  # effective orientation when the element is a lish


@dataclass
class _Box:
    w: int
    h: int
    cells: list[_Cell] = field(default_factory=list)
    elem_info: list[_ElemInfo] | None = None


class _Engine:
    """Shared recursion for track layout and text rendering.

    ``cell_width`` gives an atom's extent along the x axis in the active
    metric (1 for tracks, rendered width for text); every atom is one
    unit tall in either metric.
    """

    def __init__(self, cell_width: Callable[[Path, Atom], int], gap: int):
        self.cell_width = cell_width
        self.gap = gap

    def layout(self, node: Node, path: Path, orientation: str, at_root: bool = False) -> _Box:
        if isinstance(node, Atom):
            w = self.cell_width(path, node)
            return _Box(w, 1, [_Cell(path, 0, 0, w, 1, orientation)])
        effective = node.orientation_override or orientation
        child_orientation = _flip(effective)
        # Atoms are placed along this lish's own axis; their orientation_at
        # is the lish's, while sub-lishes inherit the flipped default.
        boxes = [
            self.layout(el, path + (i,), child_orientation if isinstance(el, Lish) else effective)
            for i, el in enumerate(node.elements)
        ]
        if isinstance(node.template, Lish):
            self._align_positions(node, boxes, child_orientation)
        return self._stack(node, boxes, effective, at_root)

    def _stack(self, node: Lish, boxes: list[_Box], orientation: str, at_root: bool) -> _Box:
        major_is_y = orientation == ORIENT_ROWS
        offset = 0
        cross = 0
        cells: list[_Cell] = []
        infos: list[_ElemInfo] = []
        for i, (el, box) in enumerate(zip(node.elements, boxes)):
            if (
                at_root
                and self.gap
                and i > 0
                and isinstance(node.template, Atom)
                and isinstance(el, Lish)
                and isinstance(node.elements[i - 1], Lish)
            ):
                offset += self.gap
            start = len(cells)
            for c in box.cells:
                if major_is_y:
                    cells.append(_Cell(c.path, c.x, c.y + offset, c.w, c.h, c.orient))
                else:
                    cells.append(_Cell(c.path, c.x + offset, c.y, c.w, c.h, c.orient))
            thickness = box.h if major_is_y else box.w
            elem_orient = (el.orientation_override or _flip(orientation)) if isinstance(el, Lish) else None
            infos.append(
                _ElemInfo(start, len(cells), offset, thickness, isinstance(el, Atom), elem_orient)
            )
            offset += thickness
            cross = max(cross, box.w if major_is_y else box.h)
        w, h = (cross, offset) if major_is_y else (offset, cross)
        return _Box(w, h, cells, infos)

    def _align_positions(self, node: Lish, boxes: list[_Box], child_orientation: str) -> None:
        """Share position extents across the elements of a lish-templated lish.

        Elements whose own orientation was overridden away from the common
        axis cannot be position-aligned and keep their natural layout.
        """
        participants: list[_Box] = []
        n: int | None = None
        for el, box in zip(node.elements, boxes):
            if not isinstance(el, Lish) or box.elem_info is None:
                return  # invalid document shape; leave elements uncoupled
            if n is None:
                n = len(box.elem_info)
            elif len(box.elem_info) != n:
                return
            if (el.orientation_override or child_orientation) == child_orientation:
                participants.append(box)
        if n is None or not participants:
            return
        shared = [
            max(box.elem_info[k].extent for box in participants) for k in range(n)
        ]
        for box in participants:
            self._impose(box, shared, child_orientation)

    def _impose(self, box: _Box, shared: list[int], orientation: str) -> None:
        major_is_y = orientation == ORIENT_ROWS
        assert box.elem_info is not None
        offset = 0
        for k, info in enumerate(box.elem_info):
            delta = offset - info.offset
            if delta:
                for c in box.cells[info.start : info.end]:
                    if major_is_y:
                        c.y += delta
                    else:
                        c.x += delta
            if info.is_atom and shared[k] != info.extent:
                cell = box.cells[info.start]
                if major_is_y:
                    cell.h = shared[k]
                else:
                    cell.w = shared[k]
            info.offset = offset
            info.extent = shared[k]
            offset += shared[k]
        if major_is_y:
            box.h = offset
        else:
            box.w = offset


def compute_layout(doc: Document, opts: LayoutOptions | None = None) -> list[Placement]:
    """Place every cell of a valid document on integer tracks.

    Placements are pairwise disjoint, cover every cell exactly once, and
    keep templated positions aligned across sibling elements.
    """
    opts = opts or LayoutOptions()
    report = validate(doc.root)
    if not report.ok:
        raise InvalidDocument(report)
    engine = _Engine(lambda path, atom: 1, opts.gap)
    box = engine.layout(doc.root, (), opts.root_orientation, at_root=True)
    return [
        Placement(c.path, c.x, c.y, c.w, c.h, marginality(c.path), c.orient) for c in box.cells
    ]


def placements_to_json(placements: list[Placement]) -> list[dict]:
    return [p.to_json() for p in placements]


def _format_scalar(value: object) -> str:
    if isinstance(value, str):
        return value
    return json.dumps(value)


def _cell_text(path: Path, atom: Atom, marker: tuple[str, str], max_width: int | None) -> str:
    if atom.value is not None:
        content = _format_scalar(atom.value)
    elif atom.formula is not None:
        content = atom.formula
    else:
        content = "-"
    if max_width is not None and len(content) > max_width:
        content = content[: max(max_width - 1, 0)] + "…"
    depth = marginality(path)
    return marker[0] * depth + content + marker[1] * depth


def render_text(
    placements: list[Placement],
    doc: Document,
    opts: LayoutOptions | None = None,
    *,
    marker: tuple[str, str] = ("{", "}"),
    max_cell_width: int | None = None,
) -> str:
    """Monospace rendering of a laid-out document.

    Marginal cells are wrapped in the marker repeated once per level of
    marginality; empty cells render as ``-``.  Column character widths are
    computed with the same recursion as the track layout, so decoupled
    sibling ranges keep independent widths.  ``opts`` must match the
    options the placements were computed with.
    """
    opts = opts or LayoutOptions()
    known = {p.path for p in placements}

    def width(path: Path, atom: Atom) -> int:
        assert path in known, f"placement missing for {path}"
        return len(_cell_text(path, atom, marker, max_cell_width)) + 1

    engine = _Engine(width, opts.gap)
    box = engine.layout(doc.root, (), opts.root_orientation, at_root=True)
    canvas = [[" "] * box.w for _ in range(box.h)]
    for c in box.cells:
        atom = _atom_at(doc.root, c.path)
        text = _cell_text(c.path, atom, marker, max_cell_width).ljust(c.w - 1)
        canvas[c.y][c.x : c.x + len(text)] = text
    return "\n".join("".join(line).rstrip() for line in canvas)


def _atom_at(root: Node, path: Path) -> Atom:
    node = root
    for index in path:
        assert isinstance(node, Lish)
        node = node[index]
    assert isinstance(node, Atom)
    return node
