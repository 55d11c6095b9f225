"""Parsing, precedence, rendering, desugaring, indexing, symbol usage."""

import random

import pytest

from hstl.core import Direction, make_grid
from hstl.errors import ParseError, ValidationError
from hstl.formula import (
    AllDir,
    And,
    At,
    Bind,
    Eventually,
    Globally,
    Iff,
    Implies,
    Next,
    Nom,
    Not,
    Or,
    Prop,
    SomeDir,
    Spatial,
    Top,
    Until,
    WeakNext,
    desugar,
    index_nodes,
    is_core,
    parse,
    render,
    size,
    symbols,
)

F, B, L, R = Direction.FRONT, Direction.BACK, Direction.LEFT, Direction.RIGHT

PROPS = frozenset({"h", "q"})
NOMS = frozenset({"z", "z0", "z1", "SV", "POV"})


def p(text: str):
    return parse(text, PROPS, NOMS)


class TestParse:
    def test_sideways_commutation_string(self):
        got = p("G(Left(Right(z)) <-> Right(Left(z)))")
        want = Globally(
            Iff(
                Spatial(L, Spatial(R, Nom("z"))),
                Spatial(R, Spatial(L, Nom("z"))),
            )
        )
        assert got == want

    def test_constants(self):
        assert p("1") == Top()
        assert p("0") == Not(Top())

    def test_binder_introduces_nominal(self):
        got = p("G (@z1 ↓z2 ((! X 1) | X @z1 (z2 | Back z2)))")
        inner = Or(Not(Next(Top())), Next(At("z1", Or(Nom("z2"), Spatial(B, Nom("z2"))))))
        assert got == Globally(At("z1", Bind("z2", inner)))

    def test_ascii_binder_alias(self):
        assert p("down z2 z2") == p("↓z2 z2")

    def test_bounded_modalities(self):
        assert p("<Front:3> h") == SomeDir(F, 3, Prop("h"))
        assert p("[Left] h") == AllDir(L, None, Prop("h"))

    @pytest.mark.parametrize(
        "text,want",
        [
            ("h & q | z", "(h & q) | z"),
            ("h | q U z", "(h | q) U z"),
            ("h U q -> z", "(h U q) -> z"),
            ("h -> q -> z", "h -> (q -> z)"),
            ("h U q U z", "h U (q U z)"),
            ("h -> q <-> z", "(h -> q) <-> z"),
            ("@z0 z1 & h", "(@z0 z1) & h"),
            ("! X 1 | h", "(! X 1) | h"),
        ],
    )
    def test_precedence(self, text, want):
        assert p(text) == p(want)

    def test_prefix_chain(self):
        assert p("! X 1") == Not(Next(Top()))
        assert p("Front Back h") == Spatial(F, Spatial(B, Prop("h")))

    def test_errors(self):
        with pytest.raises(ParseError):
            p("unknown_name")
        with pytest.raises(ParseError):
            p("@h z")  # proposition after @
        with pytest.raises(ParseError) as info:
            p("(h &")
        assert info.value.position is not None
        with pytest.raises(ParseError):
            p("h h")  # trailing input
        with pytest.raises(ValidationError):
            parse("h", frozenset({"h"}), frozenset({"h"}))  # name clash
        with pytest.raises(ValidationError):
            parse("1", frozenset({"Front"}), frozenset())  # reserved keyword
        with pytest.raises(ValidationError):
            parse("1", frozenset(), frozenset({"_z"}))  # reserved prefix
        with pytest.raises(ParseError):
            p("z2")  # binder-only nominal used free


class TestRender:
    def test_examples(self):
        assert render(Top()) == "1"
        assert render(And(Prop("h"), Nom("z"))) == "(h & z)"

    def test_round_trip_random(self):
        rng = random.Random(2024)
        for _ in range(1000):
            f = _random_sugar_formula(rng, budget=rng.randint(1, 14))
            assert parse(render(f), PROPS, NOMS) == f


def _random_sugar_formula(rng, budget, scope=()):
    noms = sorted(NOMS) + list(scope)
    if budget <= 1:
        pick = rng.random()
        if pick < 0.3:
            return Top()
        if pick < 0.6:
            return Prop(rng.choice(sorted(PROPS)))
        return Nom(rng.choice(noms))
    unary = [Not, Next, WeakNext, Eventually, Globally]
    kind = rng.choice(["unary", "binary", "spatial", "at", "bind", "bounded", "leaf"])
    if kind == "leaf":
        return _random_sugar_formula(rng, 1, scope)
    if kind == "unary":
        return rng.choice(unary)(_random_sugar_formula(rng, budget - 1, scope))
    if kind == "spatial":
        d = rng.choice(list(Direction))
        return Spatial(d, _random_sugar_formula(rng, budget - 1, scope))
    if kind == "at":
        return At(rng.choice(noms), _random_sugar_formula(rng, budget - 1, scope))
    if kind == "bind":
        name = rng.choice(["v", "u"])
        return Bind(name, _random_sugar_formula(rng, budget - 1, scope + (name,)))
    if kind == "bounded":
        d = rng.choice(list(Direction))
        bound = rng.choice([None, 1, 2, 3])
        node = rng.choice([SomeDir, AllDir])
        return node(d, bound, _random_sugar_formula(rng, budget - 1, scope))
    split = rng.randint(1, budget - 2) if budget > 2 else 1
    left = _random_sugar_formula(rng, split, scope)
    right = _random_sugar_formula(rng, budget - 1 - split, scope)
    return rng.choice([And, Or, Implies, Iff, Until])(left, right)


class TestDesugar:
    def test_eventually(self):
        g = make_grid(2, 2)
        out = desugar(Eventually(Prop("h")), g)
        assert out == Until(Top(), Prop("h"))
        assert size(out) == 3

    def test_weak_next(self):
        g = make_grid(2, 2)
        out = desugar(WeakNext(Prop("h")), g)
        assert out == Not(And(Next(Top()), Not(Next(Prop("h")))))
        assert size(out) == 7

    def test_some_dir_expansion(self):
        g = make_grid(3, 3)
        out = desugar(SomeDir(F, 2, Prop("h")), g)
        fh = Spatial(F, Prop("h"))
        ffh = Spatial(F, fh)
        assert out == Not(And(Not(fh), Not(ffh)))
        assert size(out) == 9

    def test_all_dir_expansion_size(self):
        g = make_grid(3, 3)
        out = desugar(AllDir(F, 2, Prop("h")), g)
        assert size(out) == 17
        assert is_core(out)

    def test_default_bounds_from_grid(self):
        g = make_grid(3, 2)
        front = desugar(SomeDir(F, None, Prop("h")), g)
        left = desugar(SomeDir(L, None, Prop("h")), g)
        assert front == desugar(SomeDir(F, 3, Prop("h")), g)
        assert left == desugar(SomeDir(L, 2, Prop("h")), g)

    def test_zero_bound_rejected(self):
        with pytest.raises(ValidationError):
            desugar(SomeDir(F, 0, Prop("h")), make_grid(2, 2))

    def test_idempotent_and_core(self):
        g = make_grid(2, 3)
        rng = random.Random(5)
        for _ in range(200):
            f = _random_sugar_formula(rng, budget=rng.randint(1, 12))
            once = desugar(f, g)
            assert is_core(once)
            assert desugar(once, g) == once


class TestIndexNodes:
    def test_identical_twins_get_distinct_ids(self):
        table = index_nodes(And(Top(), Top()))
        assert len(table) == 3
        ids = sorted(table.entries)
        assert table.entries[ids[1]].formula == Top()
        assert table.entries[ids[2]].formula == Top()
        assert ids[1] != ids[2]

    def test_single_atom(self):
        assert len(index_nodes(Prop("h"))) == 1

    def test_count_matches_structural_size(self):
        rng = random.Random(9)
        g = make_grid(2, 2)
        for _ in range(100):
            f = desugar(_random_sugar_formula(rng, budget=rng.randint(1, 12)), g)
            assert len(index_nodes(f)) == size(f)

    def test_requires_core(self):
        with pytest.raises(ValidationError):
            index_nodes(Eventually(Top()))

    def test_parent_links_form_a_tree(self):
        f = desugar(parse("(h & q) U (h & q)", PROPS, NOMS), make_grid(2, 2))
        table = index_nodes(f)
        roots = [i for i, e in table.entries.items() if e.parent is None]
        assert roots == [0]
        for i, entry in table.entries.items():
            for child in entry.children:
                assert table.entries[child].parent == i


class TestSymbols:
    def test_at_start_constraint(self):
        usage = symbols(p("@z0 !(Back 1)"))
        assert usage.props == frozenset()
        assert usage.noms == frozenset({"z0"})
        assert usage.bound == frozenset()

    def test_follow_assumption(self):
        usage = symbols(p("G (@z1 ↓z2 ((! X 1) | X @z1 (z2 | Back z2)))"))
        assert usage.noms == frozenset({"z1"})
        assert usage.bound == frozenset({"z2"})

    def test_hazard_style_formula(self):
        text = (
            "@z0 (((Right z1) & <Front> (G h)) & "
            "((@z0 ↓z2 X @z0 ((Back z2) & (G ! h))) U "
            "(@z0 ↓z2 X @z0 ((Left z2) & <Front> z1 & [Front] (G ! h)))))"
        )
        usage = symbols(p(text))
        assert usage.props == frozenset({"h"})
        assert usage.noms == frozenset({"z0", "z1"})
        assert usage.bound == frozenset({"z2"})
