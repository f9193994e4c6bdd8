"""Margin-templated nested-list documents.

The model: a document is a tree of atoms (cells) and lishes (non-empty
lists whose first element is a template governing the rest).  On top of
it sit a structural validator, governance queries (which body cells a
marginal cell controls, innermost-wins formula resolution), a track-based
2-D layout engine, structural edit commands, a CLI, and an HTTP document
service.
"""

from .edit import (
    DeleteElement,
    EditError,
    EditResult,
    EditTemplate,
    ExpandAtom,
    InstantiateElement,
    SetFormat,
    SetFormula,
    SetMode,
    SetValue,
    WrapColumns,
    WrapElements,
    apply,
    command_from_json,
    command_to_json,
    import_csv,
)
from .governance import (
    Element,
    FormulaResolution,
    Slice,
    cursor_move,
    effective_formula,
    governed_set,
    governing_margins,
    selection_cells,
)
from .layout import LayoutOptions, Placement, compute_layout, render_text
from .model import (
    Atom,
    Document,
    DomainError,
    InvalidDocument,
    Lish,
    LishError,
    PathError,
    SchemaError,
    ShapeError,
    ValidationReport,
    data_cells,
    from_grid,
    marginality,
    node_at,
    node_from_json,
    node_to_json,
    parse_json,
    serialize_json,
    serialize_node,
    validate,
    validate_document,
)

__all__ = [
    "Atom",
    "Document",
    "DomainError",
    "Element",
    "EditError",
    "EditResult",
    "FormulaResolution",
    "InvalidDocument",
    "LayoutOptions",
    "Lish",
    "LishError",
    "PathError",
    "Placement",
    "SchemaError",
    "ShapeError",
    "Slice",
    "ValidationReport",
    "apply",
    "command_from_json",
    "command_to_json",
    "compute_layout",
    "cursor_move",
    "data_cells",
    "effective_formula",
    "from_grid",
    "governed_set",
    "governing_margins",
    "import_csv",
    "marginality",
    "node_at",
    "node_from_json",
    "node_to_json",
    "parse_json",
    "render_text",
    "selection_cells",
    "serialize_json",
    "serialize_node",
    "validate",
    "validate_document",
    "DeleteElement",
    "EditTemplate",
    "ExpandAtom",
    "InstantiateElement",
    "SetFormat",
    "SetFormula",
    "SetMode",
    "SetValue",
    "WrapColumns",
    "WrapElements",
]
