"""Exhaustive checking of the logic's validities and non-validities.

The validities cover four groups: orthogonal spatial moves commute,
unit-square loops return to the start, temporal operators commute with
(and until distributes over) each spatial move, and the hybrid laws for
``@`` and the binder.  Each law is a concrete formula over one
proposition ``q`` and two nominals ``a`` and ``b``; a law holds on a
model when it is true at every start cell.  The suite checks every
model within the given bounds: all grids up to max_rows x max_cols and
all traces up to max_len over the full state space.

The non-validities are refutable schemes — ``@`` is time-sensitive and
neither ``@`` nor the binder commutes with the future or spatial
modalities — and for each the suite searches the same model space for a
countermodel, stopping at the first hit.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .core import GridGraph, Position, State, Trace, make_grid
from .errors import ValidationError
from .evaluator import compile_formula
from .formula import desugar, parse

_PROPS = frozenset({"q"})
_NOMS = frozenset({"a", "b"})


def _law(name: str, text: str) -> tuple[str, str]:
    return (name, text)


def validity_laws() -> list[tuple[str, str]]:
    """Name/formula pairs that must hold on every model."""
    laws = [
        _law("commute_front_right", "Front Right q <-> Right Front q"),
        _law("commute_front_left", "Front Left q <-> Left Front q"),
        _law("commute_back_right", "Back Right q <-> Right Back q"),
        _law("commute_back_left", "Back Left q <-> Left Back q"),
        _law("loop_frbl", "Front Right Back Left q -> q"),
        _law("loop_rflb", "Right Front Left Back q -> q"),
        _law("loop_flbr", "Front Left Back Right q -> q"),
        _law("loop_brfl", "Back Right Front Left q -> q"),
    ]
    for d in ("Front", "Back", "Left", "Right"):
        laws.append(_law(f"next_commutes_{d.lower()}", f"X {d} q <-> {d} X q"))
        laws.append(_law(f"future_commutes_{d.lower()}", f"F {d} q <-> {d} F q"))
        laws.append(_law(f"always_commutes_{d.lower()}", f"G {d} q <-> {d} G q"))
        laws.append(
            _law(f"until_distributes_{d.lower()}", f"{d} (q U b) <-> (({d} q) U ({d} b))")
        )
    laws += [
        _law("bind_here", "↓a a"),
        _law("at_self", "@a a"),
        _law("at_symmetry", "@a b -> @b a"),
        _law("at_transfer", "(@a b & @a q) -> @b q"),
        _law("bind_at_intro", "↓a (q | a) <-> ↓a @a (q | a)"),
        _law("bind_commutes_next", "↓a X (q | a) <-> X ↓a (q | a)"),
        _law("bind_commutes_future", "↓a F (q | a) <-> F ↓a (q | a)"),
        _law("bind_commutes_always", "↓a G (q | a) <-> G ↓a (q | a)"),
        _law(
            "bind_distributes_until",
            "↓a ((q | a) U (b | a)) <-> ((↓a (q | a)) U (↓a (b | a)))",
        ),
    ]
    return laws


def non_validity_laws() -> list[tuple[str, str]]:
    """Refutable schemes; a countermodel must exist within small bounds."""
    return [
        _law("at_is_time_sensitive", "@a q -> X @a q"),
        _law("at_future_no_commute", "@a F q <-> F @a q"),
        _law("at_spatial_no_commute", "@a Front q <-> Front @a q"),
        _law("bind_spatial_no_commute", "↓a Front a <-> Front ↓a a"),
    ]


@dataclass(frozen=True)
class Countermodel:
    grid: GridGraph
    trace: Trace
    position: Position


@dataclass(frozen=True)
class LawOutcome:
    name: str
    holds: bool
    counterexample: Countermodel | None = None


@dataclass(frozen=True)
class SearchOutcome:
    name: str
    countermodel: Countermodel | None


@dataclass(frozen=True)
class ValidityReport:
    validities: tuple[LawOutcome, ...]
    non_validities: tuple[SearchOutcome, ...]

    @property
    def all_pass(self) -> bool:
        return all(v.holds for v in self.validities) and all(
            s.countermodel is not None for s in self.non_validities
        )

    def summary(self) -> str:
        lines = []
        for v in self.validities:
            lines.append(f"{'pass' if v.holds else 'FAIL'}  validity      {v.name}")
            if not v.holds:
                lines.append(f"      counterexample: {v.counterexample}")
        for s in self.non_validities:
            found = s.countermodel is not None
            lines.append(f"{'pass' if found else 'FAIL'}  non-validity  {s.name}")
            if found:
                c = s.countermodel
                lines.append(
                    f"      falsified on {c.grid.rows}x{c.grid.cols} at {c.position}: {c.trace}"
                )
        return "\n".join(lines)


def _decode_state(g: GridGraph, mask: int, na: int, nb: int) -> State:
    cells = list(g.positions())
    return State(
        g,
        {"q": frozenset(c for i, c in enumerate(cells) if mask >> i & 1)},
        {"a": cells[na], "b": cells[nb]},
    )


def _iter_models(g: GridGraph, max_len: int):
    """All encoded traces up to max_len over 1 proposition and 2 nominals."""
    n_pos = g.position_count
    states = [
        ((mask,), (na, nb))
        for mask in range(1 << n_pos)
        for na in range(n_pos)
        for nb in range(n_pos)
    ]
    for length in range(1, max_len + 1):
        for combo in itertools.product(states, repeat=length):
            yield combo


def _materialize(g: GridGraph, enc_trace) -> Trace:
    return Trace([_decode_state(g, masks[0], noms[0], noms[1]) for masks, noms in enc_trace])


def _grids(max_rows: int, max_cols: int):
    for rows in range(1, max_rows + 1):
        for cols in range(1, max_cols + 1):
            yield make_grid(rows, cols)


def validity_suite(max_rows: int, max_cols: int, max_len: int) -> ValidityReport:
    """Check every validity and search every non-validity within bounds."""
    if max_rows < 1 or max_cols < 1 or max_len < 1:
        raise ValidationError("validity suite bounds must all be >= 1")

    validity_state: dict[str, LawOutcome] = {
        name: LawOutcome(name, True) for name, _ in validity_laws()
    }
    searches: dict[str, Countermodel | None] = {name: None for name, _ in non_validity_laws()}

    for g in _grids(max_rows, max_cols):
        n_pos = g.position_count
        compiled_validities = [
            (name, compile_formula(desugar(parse(text, _PROPS, _NOMS), g), g, ("q",), ("a", "b")))
            for name, text in validity_laws()
        ]
        compiled_searches = [
            (name, compile_formula(desugar(parse(text, _PROPS, _NOMS), g), g, ("q",), ("a", "b")))
            for name, text in non_validity_laws()
        ]
        for enc_trace in _iter_models(g, max_len):
            states = list(enc_trace)
            for name, compiled in compiled_validities:
                if not validity_state[name].holds:
                    continue
                sat = compiled.sat_point_indices(states)
                if len(sat) != n_pos:
                    bad = next(p for p in range(n_pos) if p not in set(sat))
                    validity_state[name] = LawOutcome(
                        name,
                        False,
                        Countermodel(g, _materialize(g, enc_trace), g.position_at(bad)),
                    )
            for name, compiled in compiled_searches:
                if searches[name] is not None:
                    continue
                sat = compiled.sat_point_indices(states)
                if len(sat) != n_pos:
                    bad = next(p for p in range(n_pos) if p not in set(sat))
                    searches[name] = Countermodel(
                        g, _materialize(g, enc_trace), g.position_at(bad)
                    )

    return ValidityReport(
        validities=tuple(validity_state[name] for name, _ in validity_laws()),
        non_validities=tuple(
            SearchOutcome(name, searches[name]) for name, _ in non_validity_laws()
        ),
    )
