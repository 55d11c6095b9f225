"""Bounded trace generation and satisfaction search.

Three generators of increasing selectivity produce every trace of length
1..max_len compatible with their share of the assumptions:

* baseline    — the full product space, no assumptions consulted;
* optimized   — products over the states that pass the global-state
  assumptions per state (the first state additionally passes the
  initial assumptions);
* motion      — depth-first extension guided by the motion roles: a
  static nominal keeps its cell, a fixed-motion nominal moves to the
  cells from which some move path leads back to its previous cell, a
  dependee ranges over the cells keeping its dependents on-grid,
  dependents are placed by path completion, free nominals range over
  everything.  Candidate states are filtered by the global-state
  assumptions.  Every prefix is yielded before it is extended.

Raw assumptions never influence generation.  The motion generator
yields exactly the traces satisfying the non-raw assumptions (checked
at every start position), which the test suite verifies against the
baseline stream by brute force.

Enumeration order is fully deterministic and documented: proposition
assignments vary outermost (propositions in name order, each subset as
an ascending bitmask over row-major cells), nominal placements vary
innermost (nominals in name order, last nominal fastest, cells
row-major), and shorter traces come before longer ones.

Generators are lazy single-consumer streams; distinct runs may execute
on parallel workers, and all shared inputs are immutable.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Mapping, Sequence

from .core import GridGraph, Position, State, Trace, apply_path
from .errors import ValidationError
from .evaluator import EncodedState, compile_formula, encode_state
from .formula import Formula, Top, desugar, is_core, symbols
from .idioms import (
    Assumption,
    AssumptionSet,
    GlobalState,
    Initial,
    RelativeMotion,
    Role,
    lower,
    validate,
)

StopCheck = Callable[[], bool] | None

_TOP = Top()


class Algorithm(enum.Enum):
    BASELINE = "baseline"
    OPTIMIZED = "optimized"
    MOTION = "motion"


@dataclass(frozen=True)
class CheckerConfig:
    """Everything one checking run needs; build via :func:`make_config`."""

    grid: GridGraph
    props: tuple[str, ...]
    noms: tuple[str, ...]
    assumptions: AssumptionSet
    spec: Formula  # core constructors only
    max_len: int
    algorithm: Algorithm


def make_config(
    grid: GridGraph,
    props: Iterable[str],
    noms: Iterable[str],
    assumptions: AssumptionSet,
    spec: Formula,
    max_len: int,
    algorithm: Algorithm,
) -> CheckerConfig:
    """Validate and normalize a configuration; desugars the specification."""
    props = tuple(sorted(set(props)))
    noms = tuple(sorted(set(noms)))
    if max_len < 1:
        raise ValidationError(f"max trace length must be >= 1, got {max_len}")
    validate(assumptions, noms)
    core_spec = spec if is_core(spec) else desugar(spec, grid)
    usage = symbols(core_spec)
    if usage.props - set(props):
        raise ValidationError(
            f"specification uses undeclared propositions {sorted(usage.props - set(props))}"
        )
    if usage.noms - set(noms):
        raise ValidationError(
            f"specification uses undeclared nominals {sorted(usage.noms - set(noms))}"
        )
    return CheckerConfig(grid, props, noms, assumptions, core_spec, max_len, algorithm)


# ---------------------------------------------------------------------------
# Compiled run context
# ---------------------------------------------------------------------------


def _compile_assumption(
    a: Assumption, grid: GridGraph, props: tuple[str, ...], noms: tuple[str, ...]
):
    """Compile a lowered assumption; returns (compiled formula, binder-slot count)."""
    f = desugar(lower(a), grid)
    extras = tuple(sorted(symbols(f).bound - set(noms)))
    return compile_formula(f, grid, props, noms + extras), len(extras)


def _iter_prop_masks(
    grid: GridGraph, global_states: Sequence[GlobalState], props: Sequence[str]
) -> Iterator[tuple[int, ...]]:
    """Proposition assignments that can still pass the proposition-only global
    constraints.  An over-approximation: the per-state check downstream stays
    authoritative.  With no propositions, exactly the empty assignment."""
    props = tuple(sorted(props))
    prop_only = []
    for a in global_states:
        usage = symbols(a.formula)
        if usage.props and not usage.noms and not usage.bound:
            prop_only.append(compile_formula(desugar(a.formula, grid), grid, props, ()))
    n_pos = grid.position_count
    for masks in itertools.product(range(1 << n_pos), repeat=len(props)):
        state = [(masks, ())]
        if all(any(c.evaluate(state, p) for p in range(n_pos)) for c in prop_only):
            yield masks


def _fixed_successor_table(grid: GridGraph, moves) -> tuple[tuple[int, ...], ...]:
    """cell -> successor cells from which some move path reaches it.

    A move path points from the new cell back to the old one, so the
    successors of ``old`` are the cells reached by walking each path in
    reverse (which stays on-grid exactly when the forward walk does).
    """
    table = []
    for p in grid.positions():
        succ = set()
        for path in moves:
            inverse = tuple(d.opposite for d in reversed(path))
            q = apply_path(grid, p, inverse)
            if q is not None:
                succ.add(grid.index(q))
        table.append(tuple(sorted(succ)))
    return tuple(table)


class _Context:
    """Precomputed tables shared by the generators for one configuration."""

    def __init__(self, cfg: CheckerConfig):
        grid, props, noms = cfg.grid, cfg.props, cfg.noms
        self.cfg = cfg
        self.grid = grid
        self.P = grid.position_count
        self.props = props
        self.noms = noms
        self.nom_index = {n: i for i, n in enumerate(noms)}
        self.roles: dict[str, Role] = validate(cfg.assumptions, noms)

        aset = cfg.assumptions
        self.global_checks = [_compile_assumption(a, grid, props, noms) for a in aset.global_states]
        self.initial_checks = [_compile_assumption(a, grid, props, noms) for a in aset.initials]
        self.prop_masks = list(_iter_prop_masks(grid, aset.global_states, props))
        self.all_cells = tuple(range(self.P))

        # Motion machinery, keyed by nominal slot index.
        self.kind: list[str] = ["free"] * len(noms)
        self.fixed_succ: dict[int, tuple[tuple[int, ...], ...]] = {}
        self.dependee_cells: dict[int, tuple[int, ...]] = {}
        self.dependents: list[tuple[int, int, tuple[int, ...]]] = []  # (slot, dependee slot, path table)
        cells = list(grid.positions())
        for name, idx in self.nom_index.items():
            role = self.roles[name]
            self.kind[idx] = role.kind
            if role.kind == "fixed":
                self.fixed_succ[idx] = _fixed_successor_table(grid, role.moves)
            elif role.kind == "dependee":
                paths = [a.path for a in aset.relative_motions if a.dependee == name]
                self.dependee_cells[idx] = tuple(
                    grid.index(p)
                    for p in cells
                    if all(apply_path(grid, p, path) is not None for path in paths)
                )
            elif role.kind == "dependent":
                table = tuple(
                    -1 if (q := apply_path(grid, p, role.path)) is None else grid.index(q)
                    for p in cells
                )
                self.dependents.append((idx, self.nom_index[role.dependee], table))
        self.non_dependent = tuple(i for i in range(len(noms)) if self.kind[i] != "dependent")

        spec_extras = tuple(sorted(symbols(cfg.spec).bound - set(noms)))
        self.spec_compiled = compile_formula(cfg.spec, grid, props, noms + spec_extras)
        self.spec_extra = len(spec_extras)

        self._decoded: dict[EncodedState, State] = {}

    # -- state-level checks ---------------------------------------------------

    def _passes(self, enc: EncodedState, checks) -> bool:
        for compiled, n_extra in checks:
            states = [(enc[0], enc[1] + (0,) * n_extra)] if n_extra else [enc]
            if not compiled.holds_everywhere(states):
                return False
        return True

    def passes_global(self, enc: EncodedState) -> bool:
        return self._passes(enc, self.global_checks)

    def passes_initial(self, enc: EncodedState) -> bool:
        return self._passes(enc, self.initial_checks)

    # -- encoding / decoding ----------------------------------------------------

    def decode(self, enc: EncodedState) -> State:
        cached = self._decoded.get(enc)
        if cached is None:
            masks, nom_cells = enc
            props = {
                name: frozenset(
                    self.grid.position_at(i) for i in range(self.P) if masks[k] >> i & 1
                )
                for k, name in enumerate(self.props)
            }
            noms = {name: self.grid.position_at(nom_cells[k]) for k, name in enumerate(self.noms)}
            cached = State(self.grid, props, noms)
            self._decoded[enc] = cached
        return cached

    def decode_trace(self, enc_trace: Sequence[EncodedState]) -> Trace:
        return Trace([self.decode(s) for s in enc_trace])

    # -- state enumeration --------------------------------------------------------

    def iter_all_states(self) -> Iterator[EncodedState]:
        for masks in itertools.product(range(1 << self.P), repeat=len(self.props)):
            for nom_cells in itertools.product(range(self.P), repeat=len(self.noms)):
                yield (masks, nom_cells)

    def _complete(self, cells: list[int]) -> tuple[int, ...] | None:
        for dep, dependee, table in self.dependents:
            q = table[cells[dependee]]
            if q < 0:
                return None
            cells[dep] = q
        return tuple(cells)

    def iter_initial_states(self, stop: StopCheck = None) -> Iterator[EncodedState]:
        """First states: dependents completed, dependees kept feasible, the
        global and initial assumptions checked.  Static and fixed nominals
        are unconstrained in a length-1 trace."""
        choice_lists = [
            self.dependee_cells[idx] if self.kind[idx] == "dependee" else self.all_cells
            for idx in self.non_dependent
        ]
        n = len(self.noms)
        for masks in self.prop_masks:
            for placement in itertools.product(*choice_lists):
                if stop is not None and stop():
                    return
                cells = [-1] * n
                for idx, cell in zip(self.non_dependent, placement):
                    cells[idx] = cell
                nom_cells = self._complete(cells)
                if nom_cells is None:
                    continue
                enc = (masks, nom_cells)
                if self.passes_global(enc) and self.passes_initial(enc):
                    yield enc


# ---------------------------------------------------------------------------
# Public operations
# ---------------------------------------------------------------------------


def enumerate_states(g: GridGraph, props: Iterable[str], noms: Iterable[str]) -> Iterator[State]:
    """Every state, in the documented deterministic order."""
    cfg = make_config(g, props, noms, AssumptionSet(), _TOP, 1, Algorithm.BASELINE)
    ctx = _Context(cfg)
    for enc in ctx.iter_all_states():
        yield ctx.decode(enc)


def state_count(g: GridGraph, n_props: int, n_noms: int) -> int:
    """|states| = 2^(cells * props) * cells^noms."""
    return (1 << (g.position_count * n_props)) * g.position_count**n_noms


def baseline_trace_count(g: GridGraph, n_props: int, n_noms: int, max_len: int) -> int:
    """Closed form for the baseline stream: sum of S^k for k = 1..max_len."""
    s = state_count(g, n_props, n_noms)
    return sum(s**k for k in range(1, max_len + 1))


def generate_initial_states(
    g: GridGraph,
    assumptions: AssumptionSet,
    props: Iterable[str] = (),
    noms: Iterable[str] = (),
) -> Iterator[State]:
    """States satisfying the relative-motion and global assumptions (checked
    on the single-state trace at every position), then the initial ones."""
    cfg = make_config(g, props, noms, assumptions, _TOP, 1, Algorithm.MOTION)
    ctx = _Context(cfg)
    for enc in ctx.iter_initial_states():
        yield ctx.decode(enc)


def valid_dependee_positions(
    g: GridGraph, relatives: Iterable[RelativeMotion], v: str
) -> frozenset[Position]:
    """Cells for ``v`` that keep every nominal dependent on it on-grid."""
    paths = [a.path for a in relatives if a.dependee == v]
    return frozenset(
        p for p in g.positions() if all(apply_path(g, p, path) is not None for path in paths)
    )


def valid_prop_assignments(
    g: GridGraph, global_states: Iterable[GlobalState], props: Iterable[str]
) -> Iterator[dict[str, frozenset[Position]]]:
    """Proposition maps that can still pass the proposition-only global
    constraints; a cheap pre-filter, not the authoritative check."""
    props = tuple(sorted(props))
    for masks in _iter_prop_masks(g, tuple(global_states), props):
        yield {
            name: frozenset(g.position_at(i) for i in range(g.position_count) if masks[k] >> i & 1)
            for k, name in enumerate(props)
        }


def complete_state(
    g: GridGraph,
    relatives: Iterable[RelativeMotion],
    prop_map: Mapping[str, Iterable[Position]],
    partial_noms: Mapping[str, Position],
) -> State:
    """Extend an assignment of all non-dependent nominals with the dependents.

    The caller keeps dependees inside :func:`valid_dependee_positions`;
    a dependent falling off-grid here is therefore an internal error.
    """
    noms = dict(partial_noms)
    for a in relatives:
        if a.dependee not in noms:
            raise ValidationError(f"dependee {a.dependee!r} missing from the partial assignment")
        q = apply_path(g, noms[a.dependee], a.path)
        if q is None:
            raise RuntimeError(
                f"internal error: dependent {a.dependent!r} pushed off-grid from {noms[a.dependee]}"
            )
        noms[a.dependent] = q
    return State(g, prop_map, noms)


def check_global_assumptions(
    g: GridGraph, s: State, assumptions: Iterable[GlobalState | Initial]
) -> bool:
    """True iff every lowered assumption holds on the one-state trace [s]
    at every start position.  A sound per-state proxy for the trace-level
    constraint because these formulas are per-state by construction."""
    props = tuple(sorted(s.props))
    noms = tuple(sorted(s.noms))
    for a in assumptions:
        compiled, n_extra = _compile_assumption(a, g, props, noms)
        enc = encode_state(s, g, props, n_extra)
        for p in range(g.position_count):
            if not compiled.evaluate([enc], p):
                return False
    return True


# ---------------------------------------------------------------------------
# Trace generators
# ---------------------------------------------------------------------------


def _iter_product_traces(
    first: Sequence[EncodedState], rest: Sequence[EncodedState], max_len: int
) -> Iterator[tuple[EncodedState, ...]]:
    for k in range(1, max_len + 1):
        if k == 1:
            for s in first:
                yield (s,)
        else:
            for head in first:
                for tail in itertools.product(rest, repeat=k - 1):
                    yield (head,) + tail


def _iter_encoded_baseline(ctx: _Context, stop: StopCheck = None) -> Iterator[tuple[EncodedState, ...]]:
    states = list(ctx.iter_all_states())
    return _iter_product_traces(states, states, ctx.cfg.max_len)


def _iter_encoded_optimized(ctx: _Context, stop: StopCheck = None) -> Iterator[tuple[EncodedState, ...]]:
    step_states = []
    first_states = []
    for enc in ctx.iter_all_states():
        if stop is not None and stop():
            return
        if ctx.passes_global(enc):
            step_states.append(enc)
            if ctx.passes_initial(enc):
                first_states.append(enc)
    yield from _iter_product_traces(first_states, step_states, ctx.cfg.max_len)


def _iter_encoded_motion(ctx: _Context, stop: StopCheck = None) -> Iterator[tuple[EncodedState, ...]]:
    n = ctx.cfg.max_len
    prop_masks = ctx.prop_masks
    non_dependent = ctx.non_dependent
    kind = ctx.kind
    nn = len(ctx.noms)

    def extend(k: int, state: EncodedState, trace: list[EncodedState]) -> Iterator[tuple[EncodedState, ...]]:
        yield tuple(trace)
        if k == n:
            return
        choice_lists = []
        for idx in non_dependent:
            role = kind[idx]
            if role == "static":
                choice_lists.append((state[1][idx],))
            elif role == "fixed":
                succ = ctx.fixed_succ[idx][state[1][idx]]
                if not succ:
                    return  # this branch cannot be extended
                choice_lists.append(succ)
            elif role == "dependee":
                choice_lists.append(ctx.dependee_cells[idx])
            else:
                choice_lists.append(ctx.all_cells)
        for placement in itertools.product(*choice_lists):
            if stop is not None and stop():
                return
            cells = [-1] * nn
            for idx, cell in zip(non_dependent, placement):
                cells[idx] = cell
            nom_cells = ctx._complete(cells)
            if nom_cells is None:
                continue
            for masks in prop_masks:
                enc = (masks, nom_cells)
                if ctx.passes_global(enc):
                    trace.append(enc)
                    yield from extend(k + 1, enc, trace)
                    trace.pop()

    for init in ctx.iter_initial_states(stop):
        yield from extend(1, init, [init])


_ENCODED_GENERATORS = {
    Algorithm.BASELINE: _iter_encoded_baseline,
    Algorithm.OPTIMIZED: _iter_encoded_optimized,
    Algorithm.MOTION: _iter_encoded_motion,
}


def _materialize(ctx: _Context, encoded: Iterator[tuple[EncodedState, ...]]) -> Iterator[Trace]:
    for enc_trace in encoded:
        yield ctx.decode_trace(enc_trace)


def generate_traces_baseline(cfg: CheckerConfig) -> Iterator[Trace]:
    """All state sequences of length 1..max_len, shorter first."""
    ctx = _Context(cfg)
    return _materialize(ctx, _iter_encoded_baseline(ctx))


def generate_traces_optimized(cfg: CheckerConfig) -> Iterator[Trace]:
    """Baseline restricted to states passing the global (and, for the first
    state, initial) assumptions."""
    ctx = _Context(cfg)
    return _materialize(ctx, _iter_encoded_optimized(ctx))


def generate_traces_motion(cfg: CheckerConfig) -> Iterator[Trace]:
    """Depth-first extension guided by the motion assumptions; yields exactly
    the traces of length 1..max_len satisfying every non-raw assumption."""
    ctx = _Context(cfg)
    return _materialize(ctx, _iter_encoded_motion(ctx))


# ---------------------------------------------------------------------------
# Satisfaction search
# ---------------------------------------------------------------------------


class CheckResult:
    """Lazy stream of (trace, satisfying start cells) with live counters.

    ``traces_generated`` counts every candidate the generator yielded
    (prefixes included); ``traces_satisfying`` counts emissions.  Both
    are valid snapshots at any point during consumption and final once
    the stream is exhausted.  ``interrupted`` is set when a stop check
    cut the run short.
    """

    def __init__(self, cfg: CheckerConfig, stop: StopCheck = None):
        self.cfg = cfg
        self.traces_generated = 0
        self.traces_satisfying = 0
        self.interrupted = False
        self._ctx = _Context(cfg)
        self._stop = stop
        self._iter = self._run()

    def __iter__(self) -> Iterator[tuple[Trace, frozenset[Position]]]:
        return self._iter

    def _run(self):
        ctx = self._ctx
        raw_stop = self._stop
        if raw_stop is None:
            stop = None
        else:

            def stop() -> bool:  # records that the cut actually happened
                if raw_stop():
                    self.interrupted = True
                    return True
                return False

        compiled = ctx.spec_compiled
        zeros = (0,) * ctx.spec_extra
        generator = _ENCODED_GENERATORS[self.cfg.algorithm](ctx, stop)
        for enc_trace in generator:
            if stop is not None and stop():
                return
            self.traces_generated += 1
            if zeros:
                states = [(masks, noms + zeros) for masks, noms in enc_trace]
            else:
                states = list(enc_trace)
            sat = compiled.sat_point_indices(states)
            if sat:
                self.traces_satisfying += 1
                yield (
                    ctx.decode_trace(enc_trace),
                    frozenset(ctx.grid.position_at(i) for i in sat),
                )


def sat_traces(cfg: CheckerConfig, stop: StopCheck = None) -> CheckResult:
    """Run the configured generator and emit traces whose specification
    holds somewhere, paired with exactly those start positions."""
    return CheckResult(cfg, stop)


def trace_count_bound(cfg: CheckerConfig) -> int:
    """Upper bound on the motion generator's yield count.

    s * sum over k < max_len of (A * prod of per-nominal branching)^k,
    where s counts the admissible initial states, A the admissible
    per-step proposition assignments, and the branching factor is 1 for
    static or dependent nominals, |moves| for fixed motion, and the cell
    count otherwise.
    """
    ctx = _Context(cfg)
    s = sum(1 for _ in ctx.iter_initial_states())
    factor = len(ctx.prop_masks)
    for name in cfg.noms:
        role = ctx.roles[name]
        if role.kind in ("static", "dependent"):
            continue
        if role.kind == "fixed":
            factor *= len(role.moves)
        else:
            factor *= ctx.P
    return s * sum(factor**k for k in range(cfg.max_len))
