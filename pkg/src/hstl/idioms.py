"""Structured motion-modeling assumptions and their formula lowerings.

Six assumption kinds are supported.  Four of them drive search-space
pruning in the checkers:

* global state — a per-state constraint, held at all times,
* static car — a nominal that never moves,
* relative motion — a nominal chained to another by a fixed move path,
* fixed motion — a nominal whose per-step moves come from a fixed set.

Two more route constraints that the pruning machinery cannot exploit:

* initial — a temporal-operator-free constraint on the first state,
* raw — an arbitrary formula conjoined into the checked specification
  and never used for pruning.

A fixed-motion move path is read from the nominal's *new* position back
to its old one, mirroring the lowered formula: ``()`` means "stay" and
``(Back,)`` means "the new cell's Back neighbor is the old cell", i.e.
the car advanced one row.

Internally generated nominals use the reserved ``_`` prefix, which the
parser bars from user names, so capture is impossible.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .core import Direction
from .errors import ValidationError
from .formula import (
    At,
    Bind,
    Eventually,
    Formula,
    Globally,
    Next,
    Nom,
    Or,
    Spatial,
    Until,
    WeakNext,
    children,
    symbols,
)

FRESH_NOMINAL = "_w"

MovePath = tuple[Direction, ...]


def _contains_temporal(f: Formula, allow_globally: bool) -> bool:
    if isinstance(f, (Next, Until, Eventually, WeakNext)):
        return True
    if isinstance(f, Globally) and not allow_globally:
        return True
    return any(_contains_temporal(c, allow_globally) for c in children(f))


def _check_path(path: Iterable[Direction], what: str) -> MovePath:
    path = tuple(path)
    for step in path:
        if not isinstance(step, Direction):
            raise ValidationError(f"{what}: move paths may contain only directions, got {step!r}")
    return path


@dataclass(frozen=True)
class GlobalState:
    """``viewpoint``'s constraint ``formula`` holds in every state.

    The constraint is evaluated from the viewpoint nominal's own cell,
    which makes its truth value independent of where evaluation starts.
    ``formula`` may use G but no other temporal operator.
    """

    viewpoint: str
    formula: Formula

    def __post_init__(self):
        if _contains_temporal(self.formula, allow_globally=True):
            raise ValidationError(
                f"global state assumption on {self.viewpoint!r}: "
                "only G is allowed among temporal operators"
            )


@dataclass(frozen=True)
class StaticCar:
    """``nominal`` occupies the same cell in every state."""

    nominal: str


@dataclass(frozen=True)
class RelativeMotion:
    """``dependent`` always sits at ``path`` applied to ``dependee``'s cell."""

    dependee: str
    dependent: str
    path: MovePath

    def __post_init__(self):
        object.__setattr__(self, "path", _check_path(self.path, "relative motion"))
        if self.dependee == self.dependent:
            raise ValidationError(f"nominal {self.dependee!r} cannot depend on itself")


@dataclass(frozen=True)
class FixedMotion:
    """Each step, ``nominal``'s new cell reaches its old cell by some path in ``moves``."""

    nominal: str
    moves: frozenset[MovePath]

    def __post_init__(self):
        moves = frozenset(_check_path(m, "fixed motion") for m in self.moves)
        if not moves:
            raise ValidationError(f"fixed motion for {self.nominal!r} needs at least one move")
        object.__setattr__(self, "moves", moves)

    def sorted_moves(self) -> tuple[MovePath, ...]:
        return tuple(sorted(self.moves, key=lambda m: (len(m), [d.value for d in m])))


@dataclass(frozen=True)
class Initial:
    """A temporal-operator-free constraint on the first state.

    Generation filters it at every start cell, so write it anchored at a
    nominal (``@v ...``) to make its truth start-cell-independent; an
    unanchored constraint prunes more aggressively than the final
    satisfaction check requires.
    """

    formula: Formula

    def __post_init__(self):
        if _contains_temporal(self.formula, allow_globally=False):
            raise ValidationError("initial assumptions must not contain temporal operators")


@dataclass(frozen=True)
class Raw:
    """Conjoined into the checked specification; never prunes generation."""

    formula: Formula


Assumption = GlobalState | StaticCar | RelativeMotion | FixedMotion | Initial | Raw


@dataclass(frozen=True)
class AssumptionSet:
    """Assumptions partitioned by kind, in declaration order within kinds."""

    assumptions: tuple[Assumption, ...]

    def __init__(self, assumptions: Iterable[Assumption] = ()):
        object.__setattr__(self, "assumptions", tuple(assumptions))

    def _of(self, kind) -> tuple:
        return tuple(a for a in self.assumptions if isinstance(a, kind))

    @property
    def global_states(self) -> tuple[GlobalState, ...]:
        return self._of(GlobalState)

    @property
    def static_cars(self) -> tuple[StaticCar, ...]:
        return self._of(StaticCar)

    @property
    def relative_motions(self) -> tuple[RelativeMotion, ...]:
        return self._of(RelativeMotion)

    @property
    def fixed_motions(self) -> tuple[FixedMotion, ...]:
        return self._of(FixedMotion)

    @property
    def initials(self) -> tuple[Initial, ...]:
        return self._of(Initial)

    @property
    def raws(self) -> tuple[Raw, ...]:
        return self._of(Raw)

    def pruning_assumptions(self) -> tuple[Assumption, ...]:
        """Everything except Raw, in the canonical lowering order."""
        return (
            self.initials
            + self.global_states
            + self.static_cars
            + self.fixed_motions
            + self.relative_motions
        )


# ---------------------------------------------------------------------------
# Lowering to formulas
# ---------------------------------------------------------------------------


def _spatial_chain(path: MovePath, inner: Formula) -> Formula:
    for d in reversed(path):
        inner = Spatial(d, inner)
    return inner


def lower(a: Assumption) -> Formula:
    """The formula an assumption denotes.  May contain sugar; desugar before eval."""
    if isinstance(a, GlobalState):
        return Globally(At(a.viewpoint, a.formula))
    if isinstance(a, StaticCar):
        v = a.nominal
        return At(v, Bind(FRESH_NOMINAL, Globally(At(v, Nom(FRESH_NOMINAL)))))
    if isinstance(a, RelativeMotion):
        return Globally(At(a.dependee, _spatial_chain(a.path, Nom(a.dependent))))
    if isinstance(a, FixedMotion):
        moves = a.sorted_moves()
        disjunction: Formula = _spatial_chain(moves[0], Nom(FRESH_NOMINAL))
        for m in moves[1:]:
            disjunction = Or(disjunction, _spatial_chain(m, Nom(FRESH_NOMINAL)))
        v = a.nominal
        return Globally(At(v, Bind(FRESH_NOMINAL, WeakNext(At(v, disjunction)))))
    if isinstance(a, (Initial, Raw)):
        return a.formula
    raise ValidationError(f"unknown assumption kind {type(a).__name__}")


# ---------------------------------------------------------------------------
# Role assignment (the checker preconditions)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Role:
    """Exactly one motion role per nominal.

    ``kind`` is one of static / fixed / dependee / dependent / free.
    """

    kind: str
    moves: frozenset[MovePath] | None = None
    dependee: str | None = None
    path: MovePath | None = None


FREE = Role("free")


def validate(aset: AssumptionSet, noms: Iterable[str]) -> dict[str, Role]:
    """Check the structural consistency the motion checker relies on.

    Rejects any nominal drawn into two motion roles, a nominal that is
    both a dependee and a dependent, and a dependent bound by more than
    one relative motion assumption.  Purely structural: semantically
    unsatisfiable combinations simply generate no traces.

    Deterministic and independent of assumption order: conflicts are
    detected pairwise regardless of which assumption came first.
    """
    noms = set(noms)
    problems: list[str] = []

    def check_declared(name: str, a: Assumption) -> None:
        if name not in noms:
            problems.append(f"{type(a).__name__} mentions undeclared nominal {name!r}")

    claims: dict[str, list[tuple[str, Assumption]]] = {}

    def claim(name: str, kind: str, a: Assumption) -> None:
        check_declared(name, a)
        entry = (kind, a)
        existing = claims.setdefault(name, [])
        if entry not in existing:  # exact duplicates are harmless
            existing.append(entry)

    for a in aset.static_cars:
        claim(a.nominal, "static", a)
    for a in aset.fixed_motions:
        claim(a.nominal, "fixed", a)
    for a in aset.relative_motions:
        claim(a.dependee, "dependee", a)
        claim(a.dependent, "dependent", a)
    for a in aset.global_states:
        check_declared(a.viewpoint, a)
    for a in aset.assumptions:
        if isinstance(a, (GlobalState, Initial, Raw)):
            for name in sorted(symbols(lower(a)).noms):
                if name not in noms and not name.startswith("_"):
                    problems.append(f"{type(a).__name__} formula mentions undeclared nominal {name!r}")

    roles: dict[str, Role] = {name: FREE for name in sorted(noms)}
    for name in sorted(claims):
        entries = claims[name]
        kinds = [k for k, _ in entries]
        distinct = sorted(set(kinds))
        if kinds.count("dependent") > 1:
            problems.append(f"nominal {name!r} appears as dependent in more than one relative motion assumption")
        if "dependee" in distinct and "dependent" in distinct:
            problems.append(f"nominal {name!r} is both a dependee and dependent")
        others = [k for k in distinct if k != "dependee"]
        if len(others) > 1 or kinds.count("static") > 1 or kinds.count("fixed") > 1:
            pairs = " and ".join(distinct) if len(distinct) > 1 else f"{distinct[0]} (twice)"
            problems.append(f"nominal {name!r} is assigned conflicting motion roles: {pairs}")
        if "dependee" in distinct and others:
            problems.append(f"nominal {name!r} is a dependee but also {others[0]}")
        if problems:
            continue
        kind = distinct[0]
        if kind == "static":
            roles[name] = Role("static")
        elif kind == "fixed":
            assumption = next(a for k, a in entries if k == "fixed")
            roles[name] = Role("fixed", moves=assumption.moves)
        elif kind == "dependee":
            roles[name] = Role("dependee")
        else:
            assumption = next(a for k, a in entries if k == "dependent")
            roles[name] = Role("dependent", dependee=assumption.dependee, path=assumption.path)

    if problems:
        raise ValidationError("inconsistent assumption set: " + "; ".join(sorted(set(problems))))
    return roles
