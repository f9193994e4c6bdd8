"""Structural editing commands.

Every command is a pure transform from one document to the next.  A
command either yields a document that validates or fails atomically with
the would-be validation report; nothing is ever half-applied.  Successful
application bumps the document version by exactly one.
"""

from __future__ import annotations

import csv
import io
import math
import re
from dataclasses import dataclass, replace
from typing import Union

from .model import (
    Atom,
    Document,
    Lish,
    LishError,
    MODE_RELAXED,
    MODE_STRICT,
    Node,
    Path,
    PathError,
    Scalar,
    ShapeError,
    ValidationReport,
    fmt_path,
    from_grid,
    marginality,
    node_at,
    node_from_json,
    node_to_json,
    validate_document,
)
from .governance import _covering_margins


class EditError(LishError):
    """A command was rejected; the document is unchanged.

    ``report`` carries the validation report when the rejection came from
    the template rule or the strict-mode policy check.
    """

    def __init__(self, message: str, report: ValidationReport | None = None):
        super().__init__(message)
        self.report = report


@dataclass(frozen=True)
class SetValue:
    path: Path
    value: Scalar


@dataclass(frozen=True)
class SetFormula:
    path: Path
    text: str | None


@dataclass(frozen=True)
class SetFormat:
    path: Path
    key: str
    value: str | None


@dataclass(frozen=True)
class InstantiateElement:
    lish_path: Path
    at_index: int


@dataclass(frozen=True)
class DeleteElement:
    path: Path


@dataclass(frozen=True)
class ExpandAtom:
    path: Path
    length: int


@dataclass(frozen=True)
class WrapColumns:
    """Group template positions [start..end] into a nested lish, in the
    template and every element alike."""

    lish_path: Path
    start: int
    end: int


@dataclass(frozen=True)
class WrapElements:
    """Group elements [start..end] into one nested lish whose template is
    either a shape clone of the outer template or a fresh empty cell."""

    lish_path: Path
    start: int
    end: int
    template_mode: str = "inherit"


@dataclass(frozen=True)
class EditTemplate:
    """Replace the template of the lish at ``path``; with ``propagate`` the
    body is grown to conform wherever the new template adds structure."""

    path: Path
    node: Node
    propagate: bool = False


@dataclass(frozen=True)
class SetMode:
    mode: str


EditCommand = Union[
    SetValue,
    SetFormula,
    SetFormat,
    InstantiateElement,
    DeleteElement,
    ExpandAtom,
    WrapColumns,
    WrapElements,
    EditTemplate,
    SetMode,
]


@dataclass(frozen=True)
class EditResult:
    doc: Document
    diagnostics: tuple[str, ...] = ()


def apply(doc: Document, cmd: EditCommand) -> EditResult:
    """Apply one command, returning the next document version.

    Raises EditError (or PathError for unaddressable paths) when the
    command is malformed, violates the mode policy, or would leave the
    document invalid.
    """
    new_root, new_mode, diagnostics = _dispatch(doc, cmd)
    candidate = replace(doc, root=new_root, mode=new_mode, version=doc.version + 1)
    report = validate_document(candidate)
    if not report.ok:
        raise EditError("edit would produce an invalid document", report=report)
    return EditResult(candidate, tuple(diagnostics))


def _dispatch(doc: Document, cmd: EditCommand) -> tuple[Node, str, list[str]]:
    diagnostics: list[str] = []
    mode = doc.mode
    if isinstance(cmd, SetValue):
        atom = _atom_at(doc, cmd.path)
        _check_scalar(cmd.value)
        root = _replace_at(doc.root, cmd.path, replace(atom, value=cmd.value))
    elif isinstance(cmd, SetFormula):
        root = _set_formula(doc, cmd, diagnostics)
    elif isinstance(cmd, SetFormat):
        atom = _atom_at(doc, cmd.path)
        fmt = dict(atom.format or {})
        if cmd.value is None:
            fmt.pop(cmd.key, None)
        else:
            fmt[cmd.key] = cmd.value
        root = _replace_at(doc.root, cmd.path, replace(atom, format=fmt or None))
    elif isinstance(cmd, InstantiateElement):
        lish = _lish_at(doc, cmd.lish_path)
        if not 1 <= cmd.at_index <= len(lish):
            raise EditError(f"insertion index {cmd.at_index} outside [1,{len(lish)}]")
        fresh = _shape_clone(lish.template)
        elements = lish.elements[: cmd.at_index] + (fresh,) + lish.elements[cmd.at_index :]
        root = _replace_at(doc.root, cmd.lish_path, replace(lish, elements=elements))
    elif isinstance(cmd, DeleteElement):
        if not cmd.path:
            raise EditError("cannot delete the document root")
        if cmd.path[-1] == 0:
            raise EditError("the template element cannot be deleted")
        parent = _lish_at(doc, cmd.path[:-1])
        index = cmd.path[-1]
        if index >= len(parent):
            raise PathError(f"index {index} out of range at {fmt_path(cmd.path)}", cmd.path)
        elements = parent.elements[:index] + parent.elements[index + 1 :]
        root = _replace_at(doc.root, cmd.path[:-1], replace(parent, elements=elements))
    elif isinstance(cmd, ExpandAtom):
        atom = _atom_at(doc, cmd.path)
        if marginality(cmd.path) > 0:
            raise EditError("only body cells can spawn an embedded range; edit the template instead")
        if cmd.length < 2:
            raise EditError("an embedded range needs a margin plus at least one cell")
        spawned = Lish((Atom(), atom) + tuple(Atom() for _ in range(cmd.length - 2)))
        root = _replace_at(doc.root, cmd.path, spawned)
    elif isinstance(cmd, WrapColumns):
        root = _wrap_columns(doc, cmd)
    elif isinstance(cmd, WrapElements):
        root = _wrap_elements(doc, cmd)
    elif isinstance(cmd, EditTemplate):
        lish = _lish_at(doc, cmd.path)
        body = lish.body
        if cmd.propagate:
            body = tuple(_grow(el, cmd.node) for el in body)
        root = _replace_at(doc.root, cmd.path, replace(lish, elements=(cmd.node,) + body))
    elif isinstance(cmd, SetMode):
        if cmd.mode not in (MODE_STRICT, MODE_RELAXED):
            raise EditError(f"unknown mode {cmd.mode!r}")
        root, mode = doc.root, cmd.mode
    else:
        raise EditError(f"unknown command {cmd!r}")
    return root, mode, diagnostics


def _set_formula(doc: Document, cmd: SetFormula, diagnostics: list[str]) -> Node:
    atom = _atom_at(doc, cmd.path)
    if cmd.text is not None:
        if not cmd.text:
            raise EditError("formula text must be non-empty; pass null to clear it")
        if marginality(cmd.path) == 0:
            if doc.mode == MODE_STRICT:
                raise EditError("strict mode: formulae may only be placed on marginal cells")
            for m in sorted(_covering_margins(doc, cmd.path)):
                margin = node_at(doc.root, m)
                if isinstance(margin, Atom) and margin.formula is not None:
                    diagnostics.append(f"overrides the formula on the margin at {fmt_path(m)}")
        else:
            for m in sorted(_covering_margins(doc, cmd.path)):
                margin = node_at(doc.root, m)
                if isinstance(margin, Atom) and margin.formula is not None:
                    diagnostics.append(f"overrides the broader formula at {fmt_path(m)}")
    return _replace_at(doc.root, cmd.path, replace(atom, formula=cmd.text))


def _wrap_columns(doc: Document, cmd: WrapColumns) -> Node:
    lish = _lish_at(doc, cmd.lish_path)
    template = lish.template
    if not isinstance(template, Lish):
        raise EditError("wrapping positions requires a lish-shaped template")
    if not 1 <= cmd.start <= cmd.end < len(template):
        raise EditError(
            f"positions [{cmd.start}..{cmd.end}] outside the template body [1,{len(template) - 1}]"
        )
    wrapped = []
    for el in lish.elements:
        if not isinstance(el, Lish) or len(el) != len(template):
            raise EditError("document does not conform to its template; repair it first")
        group = Lish((Atom(),) + el.elements[cmd.start : cmd.end + 1])
        wrapped.append(
            replace(el, elements=el.elements[: cmd.start] + (group,) + el.elements[cmd.end + 1 :])
        )
    return _replace_at(doc.root, cmd.lish_path, replace(lish, elements=tuple(wrapped)))


def _wrap_elements(doc: Document, cmd: WrapElements) -> Node:
    lish = _lish_at(doc, cmd.lish_path)
    if cmd.template_mode not in ("inherit", "null_atom"):
        raise EditError(f"unknown template mode {cmd.template_mode!r}")
    if not 1 <= cmd.start <= cmd.end < len(lish):
        raise EditError(f"elements [{cmd.start}..{cmd.end}] outside the body [1,{len(lish) - 1}]")
    inner_template = _shape_clone(lish.template) if cmd.template_mode == "inherit" else Atom()
    group = Lish((inner_template,) + lish.elements[cmd.start : cmd.end + 1])
    elements = lish.elements[: cmd.start] + (group,) + lish.elements[cmd.end + 1 :]
    return _replace_at(doc.root, cmd.lish_path, replace(lish, elements=elements))


def _grow(node: Node, template: Node) -> Node:
    """Grow a body node so the new template's added structure fits around it.

    Where the template turns an atom into a lish, the old cell keeps its
    content at position 1 behind a fresh margin.  Structure the template
    cannot reconcile (length changes) is left as-is for validation to
    reject.
    """
    if isinstance(template, Atom):
        return node
    if isinstance(node, Atom):
        if len(template) == 1:
            node = Lish((node,))
        else:
            node = Lish((Atom(), node) + tuple(Atom() for _ in range(len(template) - 2)))
    if len(node) != len(template):
        return node
    grown = tuple(_grow(node[j], template[j]) for j in range(len(template)))
    return replace(node, elements=grown)


def _shape_clone(node: Node) -> Node:
    """Clone structure only: every atom becomes an empty cell.

    Labels, formulae and formats stay on the template; copying them into
    new elements would be exactly the duplication templates exist to
    avoid.
    """
    if isinstance(node, Atom):
        return Atom()
    return Lish(tuple(_shape_clone(el) for el in node.elements), node.orientation_override)


def _atom_at(doc: Document, path: Path) -> Atom:
    node = node_at(doc.root, path)
    if not isinstance(node, Atom):
        raise PathError(f"{fmt_path(path)} addresses a lish, not a cell", path)
    return node


def _lish_at(doc: Document, path: Path) -> Lish:
    node = node_at(doc.root, path)
    if not isinstance(node, Lish):
        raise PathError(f"{fmt_path(path)} addresses a cell, not a lish", path)
    return node


def _replace_at(root: Node, path: Path, new_node: Node) -> Node:
    if not path:
        return new_node
    assert isinstance(root, Lish)
    index = path[0]
    elements = (
        root.elements[:index]
        + (_replace_at(root.elements[index], path[1:], new_node),)
        + root.elements[index + 1 :]
    )
    return replace(root, elements=elements)


def _check_scalar(value: Scalar) -> None:
    if value is None or isinstance(value, (bool, int, str)):
        return
    if isinstance(value, float):
        if not math.isfinite(value):
            raise EditError("cell values must be finite numbers")
        return
    raise EditError(f"not a cell value: {value!r}")


# --- command wire format ----------------------------------------------------

_PATH_FIELDS = {"path", "lish_path"}


def command_to_json(cmd: EditCommand) -> dict:
    if isinstance(cmd, SetValue):
        return {"cmd": "set_value", "path": list(cmd.path), "value": cmd.value}
    if isinstance(cmd, SetFormula):
        return {"cmd": "set_formula", "path": list(cmd.path), "text": cmd.text}
    if isinstance(cmd, SetFormat):
        return {"cmd": "set_format", "path": list(cmd.path), "key": cmd.key, "value": cmd.value}
    if isinstance(cmd, InstantiateElement):
        return {"cmd": "instantiate_element", "lish_path": list(cmd.lish_path), "at_index": cmd.at_index}
    if isinstance(cmd, DeleteElement):
        return {"cmd": "delete_element", "path": list(cmd.path)}
    if isinstance(cmd, ExpandAtom):
        return {"cmd": "expand_atom", "path": list(cmd.path), "length": cmd.length}
    if isinstance(cmd, WrapColumns):
        return {"cmd": "wrap_columns", "lish_path": list(cmd.lish_path), "from": cmd.start, "to": cmd.end}
    if isinstance(cmd, WrapElements):
        return {
            "cmd": "wrap_elements",
            "lish_path": list(cmd.lish_path),
            "from": cmd.start,
            "to": cmd.end,
            "template_mode": cmd.template_mode,
        }
    if isinstance(cmd, EditTemplate):
        return {
            "cmd": "edit_template",
            "path": list(cmd.path),
            "node": node_to_json(cmd.node),
            "propagate": cmd.propagate,
        }
    if isinstance(cmd, SetMode):
        return {"cmd": "set_mode", "mode": cmd.mode}
    raise EditError(f"unknown command {cmd!r}")


def command_from_json(obj: object) -> EditCommand:
    if not isinstance(obj, dict) or "cmd" not in obj:
        raise EditError(f"not a command object: {obj!r}")
    kind = obj["cmd"]
    try:
        if kind == "set_value":
            return SetValue(_path(obj, "path"), obj["value"])
        if kind == "set_formula":
            return SetFormula(_path(obj, "path"), obj["text"])
        if kind == "set_format":
            return SetFormat(_path(obj, "path"), obj["key"], obj["value"])
        if kind == "instantiate_element":
            return InstantiateElement(_path(obj, "lish_path"), int(obj["at_index"]))
        if kind == "delete_element":
            return DeleteElement(_path(obj, "path"))
        if kind == "expand_atom":
            return ExpandAtom(_path(obj, "path"), int(obj["length"]))
        if kind == "wrap_columns":
            return WrapColumns(_path(obj, "lish_path"), int(obj["from"]), int(obj["to"]))
        if kind == "wrap_elements":
            return WrapElements(
                _path(obj, "lish_path"),
                int(obj["from"]),
                int(obj["to"]),
                obj.get("template_mode", "inherit"),
            )
        if kind == "edit_template":
            return EditTemplate(
                _path(obj, "path"), node_from_json(obj["node"]), bool(obj.get("propagate", False))
            )
        if kind == "set_mode":
            return SetMode(obj["mode"])
    except KeyError as exc:
        raise EditError(f"command {kind!r} is missing field {exc}") from exc
    raise EditError(f"unknown command kind {kind!r}")


def _path(obj: dict, key: str) -> Path:
    value = obj[key]
    if not isinstance(value, list) or not all(isinstance(c, int) and c >= 0 for c in value):
        raise EditError(f"{key} must be a list of non-negative indices")
    return tuple(value)


# --- CSV ingestion ----------------------------------------------------------

_INT_RE = re.compile(r"[+-]?\d+$")
_FLOAT_RE = re.compile(r"[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")


def _infer_scalar(text: str) -> Scalar:
    """Deliberately minimal typing: ints, plain floats, true/false, empty ->
    null; anything ambiguous stays a string."""
    if text == "":
        return None
    if text == "true":
        return True
    if text == "false":
        return False
    if _INT_RE.fullmatch(text):
        return int(text)
    if _FLOAT_RE.fullmatch(text):
        return float(text)
    return text


def import_csv(data: bytes | str, *, delimiter: str = ",", quotechar: str = '"') -> Document:
    """Parse CSV into a grid-embedded document.

    Ragged rows are padded with nulls to the widest row.
    """
    if isinstance(data, bytes):
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ShapeError(f"CSV input is not valid UTF-8: {exc}") from exc
    else:
        text = data
    rows = [row for row in csv.reader(io.StringIO(text), delimiter=delimiter, quotechar=quotechar)]
    rows = [row for row in rows if row]
    if not rows:
        raise ShapeError("CSV input has no rows")
    width = max(len(row) for row in rows)
    matrix = [
        [_infer_scalar(cell) for cell in row] + [None] * (width - len(row)) for row in rows
    ]
    return Document(root=from_grid(matrix))
