import random

import pytest

from corpus import EAST_ROW, MAIN, PIVOT, build
from gen import gen_document
from oracles import governed_oracle, margins_oracle

from lish.edit import SetFormula, apply
from lish.governance import (
    Element,
    Slice,
    cursor_move,
    effective_formula,
    governed_set,
    governing_margins,
    selection_cells,
    selection_from_json,
    selection_to_json,
)
from lish.model import (
    Document,
    DomainError,
    PathError,
    from_grid,
    marginality,
    node_at,
)


def values(doc, paths):
    return sorted(node_at(doc.root, p).value for p in paths)


class TestGovernedSet:
    def test_band_quarter_crosses_cities_and_years(self, rainfall):
        got = governed_set(rainfall, (0, 2, 0))
        assert got == {(i, 2, j) for i in (1, 2, 3) for j in (1, 2)}
        assert values(rainfall, got) == [170, 180, 280, 290, 400, 430]

    def test_local_quarter_stays_in_its_block(self, rainfall):
        got = governed_set(rainfall, (2, 2, 0))
        assert got == {(2, 2, 1), (2, 2, 2)}
        assert values(rainfall, got) == [280, 290]

    def test_template_year_spans_the_object_family(self, workforce):
        got = governed_set(workforce, (0, 2, 2, 0, 2))
        assert got == {(i, 2, 2, r, 2) for i in (1, 2, 3) for r in (1, 2, 3)}
        assert values(workforce, got) == [1, 2, 2, 4, 4, 5, 6, 8, 14]

    def test_template_slot_descends_into_embedded_ranges(self, workforce):
        got = governed_set(workforce, (0, 2, 1, 1))
        lines = {
            (i, 2, 1, 1, k)
            for i, n in ((1, 3), (2, 4), (3, 3))
            for k in range(1, n + 1)
        }
        assert got == lines

    def test_spawned_margin_governs_only_its_range(self, workforce):
        assert governed_set(workforce, (1, 2, 1, 1, 0)) == {
            (1, 2, 1, 1, 1),
            (1, 2, 1, 1, 2),
            (1, 2, 1, 1, 3),
        }

    def test_non_marginal_cell_governs_nothing(self, rainfall):
        assert governed_set(rainfall, (1, 2, 1)) == set()

    def test_lish_target_rejected(self, rainfall):
        with pytest.raises(PathError):
            governed_set(rainfall, (0,))

    def test_invalid_path_rejected(self, rainfall):
        with pytest.raises(PathError):
            governed_set(rainfall, (9, 0))

    def test_never_includes_itself(self):
        rng = random.Random(3)
        for _ in range(50):
            doc = gen_document(rng, depth=3, fan=4)
            for p, _atom in list(_marginal_atoms(doc))[:10]:
                assert p not in governed_set(doc, p)

    def test_matches_oracle(self):
        rng = random.Random(7)
        for _ in range(150):
            doc = gen_document(rng, depth=4, fan=4)
            for p, _atom in _marginal_atoms(doc):
                assert governed_set(doc, p) == governed_oracle(doc, p), p


def _marginal_atoms(doc):
    from lish.model import iter_atoms

    for p, atom in iter_atoms(doc.root):
        if marginality(p) >= 1:
            yield p, atom


def _body_atoms(doc):
    from lish.model import iter_atoms

    for p, atom in iter_atoms(doc.root):
        if p and marginality(p) == 0:
            yield p, atom


class TestGoverningMargins:
    def test_grid_cell(self):
        doc = Document(root=from_grid([[1, 2], [3, 4]]))
        assert set(governing_margins(doc, (1, 1))) == {(0, 1), (1, 0), (0, 0)}

    def test_sorted_most_specific_first(self, rainfall):
        got = governing_margins(doc := rainfall, (2, 2, 1))
        assert got == sorted(got, key=lambda m: (marginality(m), -len(m), m))
        assert set(got) == margins_oracle(doc, (2, 2, 1))

    def test_margin_behind_expansion_is_found(self, workforce):
        # The template's single address slot governs each spawned line even
        # though its path is shorter than theirs.
        got = governing_margins(workforce, (2, 2, 1, 1, 4))
        assert (0, 2, 1, 1) in got
        assert (2, 2, 1, 1, 0) in got

    def test_marginal_target_rejected(self, rainfall):
        with pytest.raises(DomainError):
            governing_margins(rainfall, (0, 2, 0))

    def test_structural_even_without_content(self):
        doc = Document(root=from_grid([[None]]))
        assert governing_margins(doc, (1, 1)) == [(0, 1), (1, 0), (0, 0)]

    def test_duality_with_governed_set(self):
        rng = random.Random(13)
        for _ in range(100):
            doc = gen_document(rng, depth=4, fan=4)
            governed = {p: governed_set(doc, p) for p, _ in _marginal_atoms(doc)}
            for q, _atom in _body_atoms(doc):
                mine = set(governing_margins(doc, q))
                theirs = {p for p, cells in governed.items() if q in cells}
                assert mine == theirs, q


class TestEffectiveFormula:
    @pytest.fixture
    def prepared(self, population):
        doc = apply(population, SetFormula(PIVOT, "=pop/area")).doc
        doc = apply(doc, SetFormula((MAIN, 0, 4, 1), "=pop14/area")).doc
        doc = apply(doc, SetFormula((MAIN, 2, 4, 1), "=own")).doc
        return doc

    def test_pivot_alone_resolves_with_no_warning(self, prepared):
        res = effective_formula(prepared, (MAIN, 3, 4, 2))
        assert res.formula == "=pop/area"
        assert res.source == PIVOT and res.specificity == 2
        assert res.warnings == ()

    def test_column_overrides_pivot_with_warning(self, prepared):
        res = effective_formula(prepared, (MAIN, 3, 4, 1))
        assert res.formula == "=pop14/area" and res.specificity == 1
        assert [w.overridden_source for w in res.warnings] == [PIVOT]

    def test_own_formula_wins_with_warnings(self, prepared):
        res = effective_formula(prepared, (MAIN, 2, 4, 1))
        assert res.formula == "=own" and res.specificity == 0
        assert {w.overridden_source for w in res.warnings} == {(MAIN, 0, 4, 1), PIVOT}

    def test_no_candidates(self, population):
        res = effective_formula(population, (MAIN, 1, 1))
        assert res.formula is None and res.source is None and res.warnings == ()

    def test_equal_specificity_breaks_by_greatest_path(self, population):
        doc = apply(population, SetFormula((MAIN, 0, 4, 1), "=col")).doc
        doc = apply(doc, SetFormula((MAIN, 2, 4, 0), "=row")).doc
        res = effective_formula(doc, (MAIN, 2, 4, 1))
        assert res.formula == "=row" and res.source == (MAIN, 2, 4, 0)
        assert len(res.warnings) == 1
        assert "same specificity" in res.warnings[0].reason

    def test_winner_specificity_never_exceeds_losers(self):
        rng = random.Random(23)
        for _ in range(60):
            doc = gen_document(rng, depth=3, fan=4, allow_formula=True)
            for q, _atom in _body_atoms(doc):
                res = effective_formula(doc, q)
                if res.specificity is None:
                    continue
                for w in res.warnings:
                    loser = marginality(w.overridden_source)
                    assert res.specificity <= (loser or 0) or loser == res.specificity

    def test_marginal_target_rejected(self, rainfall):
        with pytest.raises(DomainError):
            effective_formula(rainfall, (0, 0, 0))


class TestSelectionCells:
    def test_element_covers_group_with_margin(self, population):
        got = selection_cells(population, Element((MAIN, EAST_ROW, 3)))
        assert got == [(MAIN, EAST_ROW, 3, 0), (MAIN, EAST_ROW, 3, 1), (MAIN, EAST_ROW, 3, 2)]

    def test_slice_is_a_column(self):
        doc = Document(root=from_grid([[1, 2], [3, 4]]))
        assert selection_cells(doc, Slice((), 2)) == [(1, 2), (2, 2)]

    def test_single_atom_element(self, rainfall):
        assert selection_cells(rainfall, Element((1, 2, 1))) == [(1, 2, 1)]

    def test_slice_descends_into_expansions(self):
        doc = Document(root=build([[None, None], [None, 5], [None, [None, 6, 7]]]))
        got = selection_cells(doc, Slice((), 1))
        assert got == [(1, 1), (2, 1, 1), (2, 1, 2)]

    def test_slice_equals_template_cell_governance(self, rainfall):
        # Selecting position 2 across the body gives the same cells the
        # template's position-2 margin governs.
        assert set(selection_cells(rainfall, Slice((), 2))) == governed_set(rainfall, (0, 2, 0))

    def test_slice_on_atomic_template_rejected(self):
        doc = Document(root=build([None, 1, 2]))
        with pytest.raises(PathError):
            selection_cells(doc, Slice((), 1))

    def test_slice_position_bounds(self, rainfall):
        with pytest.raises(PathError):
            selection_cells(rainfall, Slice((), 0))
        with pytest.raises(PathError):
            selection_cells(rainfall, Slice((), 5))


class TestCursor:
    def test_sibling_preserves_granularity(self, population):
        sel = cursor_move(population, Element((MAIN, EAST_ROW)), "prev_sibling")
        assert sel == Element((MAIN, EAST_ROW - 1))

    def test_sibling_clamps(self, rainfall):
        assert cursor_move(rainfall, Element((0,)), "prev_sibling") == Element((0,))
        assert cursor_move(rainfall, Element((3,)), "next_sibling") == Element((3,))

    def test_drill_out_at_root_is_fixed_point(self, rainfall):
        assert cursor_move(rainfall, Element(()), "drill_out") == Element(())

    def test_drill_in_on_atom_is_identity(self, rainfall):
        sel = Element((1, 2, 1))
        assert cursor_move(rainfall, sel, "drill_in") == sel

    def test_drill_in_enters_template(self, rainfall):
        assert cursor_move(rainfall, Element((1,)), "drill_in") == Element((1, 0))

    def test_slice_moves_clamp_to_body_positions(self, rainfall):
        sel = Slice((), 1)
        assert cursor_move(rainfall, sel, "slice_prev") == Slice((), 1)
        assert cursor_move(rainfall, Slice((), 4), "slice_next") == Slice((), 4)
        assert cursor_move(rainfall, Slice((), 2), "slice_next") == Slice((), 3)

    def test_slice_move_on_element_traverses_body(self, rainfall):
        moved = cursor_move(rainfall, Element((1,)), "slice_next")
        assert moved == Element((2,))
        # Never steps onto the template element.
        assert cursor_move(rainfall, Element((1,)), "slice_prev") == Element((1,))

    def test_prev_next_inverse_away_from_boundaries(self):
        rng = random.Random(31)
        for _ in range(50):
            doc = gen_document(rng, depth=3, fan=5)
            for p, _atom in list(_body_atoms(doc))[:5]:
                parent = node_at(doc.root, p[:-1])
                if not 1 <= p[-1] < len(parent) - 1:
                    continue
                sel = Element(p)
                there = cursor_move(doc, sel, "next_sibling")
                back = cursor_move(doc, there, "prev_sibling")
                assert back == sel

    def test_moves_always_valid(self):
        rng = random.Random(37)
        for _ in range(50):
            doc = gen_document(rng, depth=3, fan=4)
            sel = Element(())
            for _ in range(30):
                move = rng.choice(
                    ["prev_sibling", "next_sibling", "drill_in", "drill_out", "slice_prev", "slice_next"]
                )
                sel = cursor_move(doc, sel, move)
                if isinstance(sel, Element):
                    node_at(doc.root, sel.path)  # must not raise
                else:
                    selection_cells(doc, sel)


class TestSelectionJson:
    @pytest.mark.parametrize("sel", [Element((1, 2)), Element(()), Slice((0, 2), 3)])
    def test_round_trip(self, sel):
        assert selection_from_json(selection_to_json(sel)) == sel

    def test_rejects_junk(self):
        with pytest.raises(DomainError):
            selection_from_json({"slice": {"lish": [0], "position": "x"}})
