"""Satisfaction checking on finite traces.

Two routes are provided on purpose and kept independent:

* :func:`evaluate` — the production path.  Formulas are compiled to flat
  integer arrays, traces to bitmask/tuple form, and results are memoized
  on ``(timestep, occurrence id, viewpoint cell)``.  Distinct
  occurrences of identical subformulas use distinct memo keys.  The
  viewpoint cell must be part of the key: the target of an ``@`` jump is
  read at the current timestep, so a node below an ``@`` inside an
  until can be reached at one (timestep, occurrence) pair with several
  viewpoints.  The cell closes the key: every in-scope binder capture
  sits at a fixed spatial offset from the current cell of its reading
  occurrence, so (timestep, occurrence, cell) determines all inputs a
  node can observe, and the substituted traces created by binders need
  not be keyed.
* :func:`evaluate_naive` — a direct recursive transcription of the
  semantics built on the trace-surgery operations of :mod:`hstl.core`.
  No memo, no compilation; it exists as an oracle.

Moving off the grid makes a spatial modality false rather than raising.
A memo table is private to one evaluation call; concurrent evaluations
on shared immutable inputs are independent.  :func:`sat_points` runs all
start positions against one shared table, which the position-carrying
key makes sound.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

from .core import (
    DIRECTIONS,
    GridGraph,
    Position,
    State,
    Trace,
    neighbor,
    substitute,
    suffix,
)
from .errors import ValidationError
from .formula import (
    And,
    At,
    Bind,
    Formula,
    Next,
    Nom,
    Not,
    Prop,
    Spatial,
    Top,
    Until,
    index_nodes,
    is_core,
    symbols,
)

# Compiled node kinds.
_TOP, _PROP, _NOM, _NOT, _AND, _NEXT, _UNTIL, _SPATIAL, _AT, _BIND = range(10)

_DIR_INDEX = {d: i for i, d in enumerate(DIRECTIONS)}

#: Encoded state: (per-proposition position bitmasks, per-nominal cell indices).
EncodedState = tuple[tuple[int, ...], tuple[int, ...]]


@functools.lru_cache(maxsize=None)
def neighbor_tables(g: GridGraph) -> tuple[tuple[int, ...], ...]:
    """Per direction, the row-major successor index of each cell (-1 off-grid)."""
    tables = []
    for d in DIRECTIONS:
        row = []
        for p in g.positions():
            q = neighbor(g, p, d)
            row.append(-1 if q is None else g.index(q))
        tables.append(tuple(row))
    return tuple(tables)


@dataclass
class EvalStats:
    """Instrumentation filled in by :func:`evaluate` when supplied."""

    memo_entries: int = 0
    node_count: int = 0
    trace_length: int = 0


class CompiledFormula:
    """A core formula flattened for fast evaluation over one grid.

    ``nom_order`` lists the nominal slots of encoded states: the trace's
    declared nominals followed by binder-introduced ones (which start on
    a placeholder cell and are only ever read after being bound).

    The memo can hold at most trace-length * node-count * cell-count
    entries.  Unless a temporal operator sits below an ``@`` whose
    target moves between steps, each occurrence is only ever visited at
    one viewpoint per step, so at most trace-length * node-count entries
    are actually written.
    """

    __slots__ = ("grid", "prop_order", "nom_order", "n_nodes", "kinds", "args", "args2", "aux", "nbr")

    def __init__(self, f: Formula, g: GridGraph, prop_order: tuple[str, ...], nom_order: tuple[str, ...]):
        if not is_core(f):
            raise ValidationError("formula must be desugared before evaluation")
        prop_index = {name: i for i, name in enumerate(prop_order)}
        nom_index = {name: i for i, name in enumerate(nom_order)}
        table = index_nodes(f)
        n = len(table)
        kinds, args, args2, aux = [0] * n, [0] * n, [0] * n, [0] * n
        for nid, entry in table.entries.items():
            node = entry.formula
            kids = entry.children
            if isinstance(node, Top):
                kinds[nid] = _TOP
            elif isinstance(node, Prop):
                if node.name not in prop_index:
                    raise ValidationError(f"undeclared proposition {node.name!r}")
                kinds[nid], aux[nid] = _PROP, prop_index[node.name]
            elif isinstance(node, Nom):
                if node.name not in nom_index:
                    raise ValidationError(f"undeclared nominal {node.name!r}")
                kinds[nid], aux[nid] = _NOM, nom_index[node.name]
            elif isinstance(node, Not):
                kinds[nid], args[nid] = _NOT, kids[0]
            elif isinstance(node, And):
                kinds[nid], args[nid], args2[nid] = _AND, kids[0], kids[1]
            elif isinstance(node, Next):
                kinds[nid], args[nid] = _NEXT, kids[0]
            elif isinstance(node, Until):
                kinds[nid], args[nid], args2[nid] = _UNTIL, kids[0], kids[1]
            elif isinstance(node, Spatial):
                kinds[nid], args[nid], aux[nid] = _SPATIAL, kids[0], _DIR_INDEX[node.direction]
            elif isinstance(node, At):
                if node.nominal not in nom_index:
                    raise ValidationError(f"undeclared nominal {node.nominal!r}")
                kinds[nid], args[nid], aux[nid] = _AT, kids[0], nom_index[node.nominal]
            else:  # Bind
                kinds[nid], args[nid], aux[nid] = _BIND, kids[0], nom_index[node.nominal]
        self.grid = g
        self.prop_order = prop_order
        self.nom_order = nom_order
        self.n_nodes = n
        self.kinds = tuple(kinds)
        self.args = tuple(args)
        self.args2 = tuple(args2)
        self.aux = tuple(aux)
        self.nbr = neighbor_tables(g)

    def _make_evaluator(self, states: list[EncodedState], memo: list[bool | None]):
        """The memoized recursion; one memo serves any number of starts."""
        n_nodes = self.n_nodes
        n_pos = self.grid.position_count
        kinds, args, args2, aux, nbr = self.kinds, self.args, self.args2, self.aux, self.nbr
        last = len(states) - 1

        def ev(node: int, k: int, p: int, tr: list[EncodedState]) -> bool:
            key = (k * n_nodes + node) * n_pos + p
            hit = memo[key]
            if hit is not None:
                return hit
            kind = kinds[node]
            if kind == _TOP:
                res = True
            elif kind == _PROP:
                res = bool(tr[k][0][aux[node]] >> p & 1)
            elif kind == _NOM:
                res = tr[k][1][aux[node]] == p
            elif kind == _NOT:
                res = not ev(args[node], k, p, tr)
            elif kind == _AND:
                res = ev(args[node], k, p, tr) and ev(args2[node], k, p, tr)
            elif kind == _NEXT:
                res = k < last and ev(args[node], k + 1, p, tr)
            elif kind == _UNTIL:
                if ev(args2[node], k, p, tr):
                    res = True
                elif k < last:
                    res = ev(args[node], k, p, tr) and ev(node, k + 1, p, tr)
                else:
                    res = False
            elif kind == _SPATIAL:
                q = nbr[aux[node]][p]
                res = q >= 0 and ev(args[node], k, q, tr)
            elif kind == _AT:
                res = ev(args[node], k, tr[k][1][aux[node]], tr)
            else:  # _BIND
                ni = aux[node]
                tr2 = tr[:k] + [
                    (props, noms[:ni] + (p,) + noms[ni + 1 :]) for props, noms in tr[k:]
                ]
                res = ev(args[node], k, p, tr2)
            memo[key] = res
            return res

        return ev

    def _fresh_memo(self, states: list[EncodedState]) -> list[bool | None]:
        return [None] * (len(states) * self.n_nodes * self.grid.position_count)

    def evaluate(self, states: list[EncodedState], p: int, stats: EvalStats | None = None) -> bool:
        memo = self._fresh_memo(states)
        result = self._make_evaluator(states, memo)(0, 0, p, states)
        if stats is not None:
            stats.memo_entries = sum(1 for v in memo if v is not None)
            stats.node_count = self.n_nodes
            stats.trace_length = len(states)
        return result

    def sat_point_indices(self, states: list[EncodedState]) -> list[int]:
        """Start cells (row-major indices) at which the formula holds."""
        memo = self._fresh_memo(states)
        ev = self._make_evaluator(states, memo)
        return [p for p in range(self.grid.position_count) if ev(0, 0, p, states)]

    def holds_everywhere(self, states: list[EncodedState]) -> bool:
        """True iff the formula holds at every start cell; stops at the first miss."""
        memo = self._fresh_memo(states)
        ev = self._make_evaluator(states, memo)
        return all(ev(0, 0, p, states) for p in range(self.grid.position_count))


@functools.lru_cache(maxsize=4096)
def compile_formula(
    f: Formula, g: GridGraph, prop_order: tuple[str, ...], nom_order: tuple[str, ...]
) -> CompiledFormula:
    """Compile (cached); ``nom_order`` must include binder-introduced names."""
    return CompiledFormula(f, g, prop_order, nom_order)


def encode_state(s: State, g: GridGraph, prop_order: tuple[str, ...], n_extra: int = 0) -> EncodedState:
    """Pack a state into bitmask/index form, appending binder placeholders."""
    bits = []
    for name in prop_order:
        mask = 0
        for c in s.props[name]:
            mask |= 1 << g.index(c)
        bits.append(mask)
    noms = tuple(g.index(s.noms[name]) for name in sorted(s.noms)) + (0,) * n_extra
    return tuple(bits), noms


def _prepare(g: GridGraph, t: Trace, f: Formula) -> tuple[CompiledFormula, list[EncodedState]]:
    if t.grid != g:
        raise ValidationError(f"trace is over a {t.grid.rows}x{t.grid.cols} grid, not {g.rows}x{g.cols}")
    usage = symbols(f)
    declared_props = frozenset(t.prop_names)
    declared_noms = frozenset(t.nominal_names)
    missing = usage.props - declared_props
    if missing:
        raise ValidationError(f"formula uses undeclared propositions {sorted(missing)}")
    missing = usage.noms - declared_noms
    if missing:
        raise ValidationError(f"formula uses undeclared nominals {sorted(missing)}")
    extras = tuple(sorted(usage.bound - declared_noms))
    compiled = compile_formula(f, g, t.prop_names, t.nominal_names + extras)
    states = [encode_state(s, g, t.prop_names, len(extras)) for s in t.states]
    return compiled, states


def _check_point(g: GridGraph, p: Position) -> None:
    if not g.contains(p):
        raise ValidationError(f"start point {p} is outside the {g.rows}x{g.cols} grid")


def evaluate(g: GridGraph, t: Trace, p: Position, f: Formula, stats: EvalStats | None = None) -> bool:
    """Does the formula hold on trace ``t`` viewed from ``p``?

    ``f`` must be core-only (run :func:`hstl.formula.desugar` first).
    Undeclared symbols raise; they are never silently false.
    """
    _check_point(g, p)
    compiled, states = _prepare(g, t, f)
    return compiled.evaluate(states, g.index(p), stats)


def sat_points(g: GridGraph, t: Trace, f: Formula) -> frozenset[Position]:
    """Exactly the start positions at which :func:`evaluate` returns True."""
    compiled, states = _prepare(g, t, f)
    return frozenset(g.position_at(i) for i in compiled.sat_point_indices(states))


# ---------------------------------------------------------------------------
# Reference oracle
# ---------------------------------------------------------------------------


def evaluate_naive(g: GridGraph, t: Trace, p: Position, f: Formula) -> bool:
    """Direct recursive reading of the semantics; quadratic and proud of it."""
    _check_point(g, p)
    if t.grid != g:
        raise ValidationError("trace grid does not match the supplied grid")
    if not is_core(f):
        raise ValidationError("formula must be desugared before evaluation")
    usage = symbols(f)
    declared_props = frozenset(t.prop_names)
    declared_noms = frozenset(t.nominal_names)
    if usage.props - declared_props:
        raise ValidationError(f"formula uses undeclared propositions {sorted(usage.props - declared_props)}")
    if usage.noms - declared_noms:
        raise ValidationError(f"formula uses undeclared nominals {sorted(usage.noms - declared_noms)}")
    extras = sorted(usage.bound - declared_noms)
    if extras:
        placeholder = Position(1, 1)
        t = Trace([_state_with_extras(s, extras, placeholder) for s in t.states])
    return _naive(g, t, p, f)


def _state_with_extras(s: State, extras: list[str], placeholder: Position) -> State:
    noms = dict(s.noms)
    for name in extras:
        noms[name] = placeholder
    return State(s.grid, s.props, noms)


def _naive(g: GridGraph, t: Trace, p: Position, f: Formula) -> bool:
    if isinstance(f, Top):
        return True
    if isinstance(f, Prop):
        return p in t.states[0].props[f.name]
    if isinstance(f, Nom):
        return p == t.states[0].noms[f.name]
    if isinstance(f, Not):
        return not _naive(g, t, p, f.child)
    if isinstance(f, And):
        return _naive(g, t, p, f.left) and _naive(g, t, p, f.right)
    if isinstance(f, Next):
        return len(t) > 1 and _naive(g, suffix(t, 1), p, f.child)
    if isinstance(f, Until):
        for k in range(len(t)):
            if _naive(g, suffix(t, k), p, f.right) and all(
                _naive(g, suffix(t, l), p, f.left) for l in range(k)
            ):
                return True
        return False
    if isinstance(f, Spatial):
        q = neighbor(g, p, f.direction)
        return q is not None and _naive(g, t, q, f.child)
    if isinstance(f, At):
        return _naive(g, t, t.states[0].noms[f.nominal], f.child)
    if isinstance(f, Bind):
        return _naive(g, substitute(t, f.nominal, p, 0), p, f.child)
    raise ValidationError(f"unexpected node {type(f).__name__}")
