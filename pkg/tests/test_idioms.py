"""Assumption lowering, role validation, and lowering/semantics agreement."""

import itertools
import random

import pytest

from conftest import random_assumption_set, random_trace
from hstl.core import Direction, State, Trace, make_grid
from hstl.errors import ValidationError
from hstl.evaluator import evaluate
from hstl.formula import At, Bind, Globally, Nom, desugar, parse
from hstl.idioms import (
    FRESH_NOMINAL,
    AssumptionSet,
    FixedMotion,
    GlobalState,
    Initial,
    Raw,
    RelativeMotion,
    StaticCar,
    lower,
    validate,
)

F, B, L, R = Direction.FRONT, Direction.BACK, Direction.LEFT, Direction.RIGHT


class TestLowering:
    def test_static_car_shape(self):
        got = lower(StaticCar("z1"))
        want = At("z1", Bind(FRESH_NOMINAL, Globally(At("z1", Nom(FRESH_NOMINAL)))))
        assert got == want

    def test_relative_motion_shape(self):
        got = lower(RelativeMotion("z0", "z1", (F, F)))
        assert got == parse("G (@z0 Front Front z1)", frozenset(), frozenset({"z0", "z1"}))

    def test_fixed_motion_matches_conditional_movement_formula(self):
        # Stay-or-advance as a structured move set must agree with the
        # spelled-out next-step formula on every tiny model.
        g = make_grid(3, 1)
        noms = ("z0", "z1")
        lowered = desugar(lower(FixedMotion("z1", frozenset({(), (B,)}))), g)
        spelled = desugar(
            parse(
                "G (@z1 ↓z2 ((! X 1) | X @z1 (z2 | Back z2)))",
                frozenset(),
                frozenset(noms),
            ),
            g,
        )
        cells = list(g.positions())
        states = [
            State(g, {}, {"z0": a, "z1": b}) for a in cells for b in cells
        ]
        rng = random.Random(0)
        for length in (1, 2, 3):
            for _ in range(120):
                t = Trace([rng.choice(states) for _ in range(length)])
                for p in cells:
                    assert evaluate(g, t, p, lowered) == evaluate(g, t, p, spelled)

    def test_initial_and_raw_pass_through(self):
        f = parse("@z0 !(Back 1)", frozenset(), frozenset({"z0"}))
        assert lower(Initial(f)) == f
        assert lower(Raw(f)) == f

    def test_global_state_viewpoint_independent(self):
        rng = random.Random(8)
        g = make_grid(2, 2)
        for _ in range(60):
            aset = random_assumption_set(rng, g, ["q"], ["z0", "z1"])
            t = random_trace(rng, g, ["q"], ["z0", "z1"], 3)
            for a in aset.global_states:
                f = desugar(lower(a), g)
                answers = {evaluate(g, t, p, f) for p in g.positions()}
                assert len(answers) == 1


class TestConstructionChecks:
    def test_global_state_rejects_temporal(self):
        x_inside = parse("X z1", frozenset(), frozenset({"z1"}))
        with pytest.raises(ValidationError):
            GlobalState("z0", x_inside)
        g_inside = parse("G z1", frozenset(), frozenset({"z1"}))
        GlobalState("z0", g_inside)  # G alone is tolerated

    def test_initial_rejects_any_temporal(self):
        with pytest.raises(ValidationError):
            Initial(parse("G z1", frozenset(), frozenset({"z1"})))

    def test_fixed_motion_needs_moves(self):
        with pytest.raises(ValidationError):
            FixedMotion("z0", frozenset())

    def test_self_dependency_rejected(self):
        with pytest.raises(ValidationError):
            RelativeMotion("z0", "z0", (F,))


class TestValidate:
    def test_conflicting_roles(self):
        aset = AssumptionSet([StaticCar("z0"), FixedMotion("z0", frozenset({(F,)}))])
        with pytest.raises(ValidationError, match="conflicting"):
            validate(aset, {"z0"})

    def test_dependee_and_dependent(self):
        aset = AssumptionSet(
            [RelativeMotion("z0", "z1", (F,)), RelativeMotion("z1", "z2", (F,))]
        )
        with pytest.raises(ValidationError, match="dependee and dependent"):
            validate(aset, {"z0", "z1", "z2"})

    def test_dependent_in_two_assumptions(self):
        aset = AssumptionSet(
            [RelativeMotion("z0", "z1", (F,)), RelativeMotion("z2", "z1", (B,))]
        )
        with pytest.raises(ValidationError, match="more than one relative motion"):
            validate(aset, {"z0", "z1", "z2"})

    def test_empty_set_leaves_everything_free(self):
        roles = validate(AssumptionSet(), {"z0", "z1"})
        assert {v: r.kind for v, r in roles.items()} == {"z0": "free", "z1": "free"}

    def test_roles_assigned(self):
        aset = AssumptionSet(
            [
                StaticCar("z0"),
                FixedMotion("z1", frozenset({(B,)})),
                RelativeMotion("z2", "z3", (F,)),
            ]
        )
        roles = validate(aset, {"z0", "z1", "z2", "z3"})
        assert roles["z0"].kind == "static"
        assert roles["z1"].kind == "fixed"
        assert roles["z2"].kind == "dependee"
        assert roles["z3"].kind == "dependent"
        assert roles["z3"].dependee == "z2"

    def test_exact_duplicates_are_tolerated(self):
        aset = AssumptionSet([StaticCar("z0"), StaticCar("z0")])
        assert validate(aset, {"z0"})["z0"].kind == "static"

    def test_static_dependee_rejected(self):
        aset = AssumptionSet([StaticCar("z0"), RelativeMotion("z0", "z1", (F,))])
        with pytest.raises(ValidationError):
            validate(aset, {"z0", "z1"})

    def test_undeclared_nominal_reported(self):
        with pytest.raises(ValidationError, match="undeclared"):
            validate(AssumptionSet([StaticCar("ghost")]), {"z0"})

    def test_order_independent(self):
        rng = random.Random(13)
        g = make_grid(2, 2)
        for _ in range(40):
            aset = random_assumption_set(rng, g, ["q"], ["z0", "z1"])
            base = validate(aset, {"z0", "z1"})
            for perm in itertools.islice(itertools.permutations(aset.assumptions), 6):
                assert validate(AssumptionSet(perm), {"z0", "z1"}) == base
