"""Randomized additive approximation for near-perfect phylogenies.

A pass repeatedly plucks leaves that are alone on one side of some
coordinate; when no leaf can be plucked it splits along a randomly drawn
coordinate (any active one in ``simple`` mode, a simple one in ``general``
mode) while enough candidates remain, and otherwise hands the partition to
the base case. The reductions are recorded and replayed in reverse to
rebuild a tree.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Literal, Optional

import numpy as np

from .basecase import base_case, hamming_mst, plain_base_case
from .bits import coord_bit
from .forest import ContractError, LabeledForest, StepKind, TraceStep
from .instance import Component, PartitionState, TerminalMatrix, pattern_of

Mode = Literal["simple", "general"]

__all__ = [
    "SolveReport", "SolverConfig", "TraceStep", "StepKind", "bound",
    "is_simple", "merge", "paste_a_leaf", "pluck_a_leaf", "simple_coordinates",
    "solve", "solve_with_q", "split",
]


@dataclass(frozen=True)
class SolverConfig:
    seed: int = 0
    restarts_per_q: int = 10
    q_override: Optional[int] = None
    mode: Mode = "general"

    def __post_init__(self):
        if self.restarts_per_q < 1:
            raise ValueError("restarts_per_q must be at least 1")
        if self.q_override is not None and self.q_override < 0:
            raise ValueError("q_override must be non-negative")
        if self.mode not in ("simple", "general"):
            raise ValueError(f"unknown mode {self.mode!r}")


@dataclass
class SolveReport:
    forest: LabeledForest
    cost: int
    q_used: int
    restarts_used: int
    bound: int
    met_bound: bool
    splits: int = 0
    plucks: int = 0
    timings: dict[str, float] = field(default_factory=dict)
    mst_cost: Optional[int] = None


def bound(d: int, q: int) -> int:
    return d + 40 * q * q + 2 * q


def pluck_a_leaf(p: PartitionState) -> Optional[tuple[int, int, PartitionState]]:
    """Pluck the first leaf found; ``None`` when every component is stuck."""
    for k, c in enumerate(p.components):
        hit = c.leaf_candidate
        if hit is None:
            continue
        col, row = hit
        i = int(c.coords[col])
        x = c.points[row]
        x_bar = x ^ coord_bit(c.d, i)
        coords = np.delete(c.coords, col)
        sub = np.delete(c.sub, col, axis=1)
        fixed = c.fixed | (x_bar & coord_bit(c.d, i))
        if x_bar in c.point_set:
            # x_bar agrees with x off column i, so no other column turns constant
            points = c.points[:row] + c.points[row + 1:]
            sub = np.delete(sub, row, axis=0)
        else:
            points = c.points[:row] + (x_bar,) + c.points[row + 1:]
        return x, i, p.replace(k, [Component(c.d, points, coords, sub, fixed)])
    return None


def paste_a_leaf(f: LabeledForest, step: TraceStep) -> LabeledForest:
    """Reattach a plucked leaf (in place)."""
    x_bar = step.partner(f.d)
    if x_bar not in f:
        raise ContractError(f"paste: {x_bar:b} is not in the forest")
    f.add_edge(step.x, x_bar, step.i)
    return f


def _split_choice(i: int, c: Component) -> Optional[int]:
    pat = pattern_of(i, c)
    col = c.column(i)
    matched: list[list[int]] = [[], []]
    for x, b in zip(c.points, col):
        if x & pat.mask == pat.bits:
            matched[b].append(x)
    for side in matched:
        if len(side) == 1:
            return side[0]
    return None


def split(i: int, p: PartitionState) -> Optional[tuple[int, int, PartitionState]]:
    """Cut the first component where ``i`` is active, if an endpoint is identifiable."""
    k = p.first_active(i)
    if k is None:
        raise ContractError(f"coordinate {i} is constant on every component")
    c = p.components[k]
    x = _split_choice(i, c)
    if x is None:
        return None
    bit = coord_bit(c.d, i)
    x_bar = x ^ bit
    col = c.column(i)
    sides: list[list[int]] = [[], []]
    for y, b in zip(c.points, col):
        sides[b].append(y)
    sides[0 if x_bar & bit == 0 else 1].append(x_bar)
    return x, x_bar, p.replace(k, [c.with_points(sides[0]), c.with_points(sides[1])])


def merge(f: LabeledForest, step: TraceStep) -> LabeledForest:
    """Join the two sides of a split by the ``x -- x_bar`` edge (in place)."""
    if step.x not in f or step.x_bar not in f:
        raise ContractError("merge: an endpoint of the split edge is missing")
    f.add_edge(step.x, step.x_bar, step.i)
    return f


_BLOCK_ELEMS = 1 << 22


def _simple_flags(c: Component) -> np.ndarray:
    """For every active coordinate of ``c``: does Split succeed on it?

    All patterns at once: ``X^T X`` gives per-side one-counts for every
    coordinate pair, and a second product counts pattern mismatches per
    point. Work is O(m a^2) for ``a`` active columns, done in column blocks.
    """
    cached = c.__dict__.get("_simple")
    if cached is not None:
        return cached
    m, a = c.sub.shape
    flags = np.zeros(a, dtype=bool)
    if m >= 2 and a:
        X = c.sub.astype(np.float32)
        s1 = X.sum(axis=0)
        step = max(1, min(a, _BLOCK_ELEMS // max(a, m)))
        for lo in range(0, a, step):
            hi = min(a, lo + step)
            XB = X[:, lo:hi]
            ones1 = XB.T @ X                    # ones of j among points with x_i = 1
            ones0 = s1[None, :] - ones1         # ones of j among points with x_i = 0
            n1 = s1[lo:hi, None]
            n0 = m - n1
            const1 = (ones1 == 0) | (ones1 == n1)
            const0 = (ones0 == 0) | (ones0 == n0)
            fixed = (const0 | const1) & ~(const0 & const1)
            want = np.where(const0, ones0 == n0, ones1 == n1)
            need_one = (fixed & want).astype(np.float32)
            need_zero = (fixed & ~want).astype(np.float32)
            mismatch = X @ (need_zero - need_one).T + need_one.sum(axis=1)[None, :]
            matched = mismatch == 0
            side1 = XB.astype(bool)
            cnt1 = (matched & side1).sum(axis=0)
            cnt0 = (matched & ~side1).sum(axis=0)
            flags[lo:hi] = (cnt1 == 1) | (cnt0 == 1)
    c.__dict__["_simple"] = flags
    return flags


def simple_coordinates(p: PartitionState) -> list[int]:
    """Coordinates on which :func:`split` would succeed, ascending."""
    seen: set[int] = set()
    out = []
    for c in p.components:
        flags = _simple_flags(c)
        for j, ok in zip(c.coords.tolist(), flags.tolist()):
            if j not in seen:
                seen.add(j)
                if ok:
                    out.append(j)
    return sorted(out)


def is_simple(i: int, p: PartitionState) -> bool:
    k = p.first_active(i)
    if k is None:
        return False
    return _split_choice(i, p.components[k]) is not None


@dataclass
class _Pass:
    state: PartitionState
    trace: list[TraceStep]
    splits: int = 0

    def exhaust_plucks(self) -> None:
        while True:
            hit = pluck_a_leaf(self.state)
            if hit is None:
                return
            x, i, self.state = hit
            self.trace.append(TraceStep(StepKind.PLUCK, x, i))

    def fork(self) -> "_Pass":
        return _Pass(self.state, list(self.trace), self.splits)


def _threshold(q: int, mode: Mode) -> int:
    return (40 if mode == "simple" else 8) * max(q, 1) ** 2


@dataclass
class _Outcome:
    """A finished pass before replay; its cost is known without rebuilding."""

    base: LabeledForest
    trace: list[TraceStep]
    splits: int
    q: int

    @property
    def cost(self) -> int:
        return self.base.cost + len(self.trace)

    @property
    def plucks(self) -> int:
        return sum(s.kind is StepKind.PLUCK for s in self.trace)

    def materialize(self) -> LabeledForest:
        forest = self.base.copy()
        for step in reversed(self.trace):
            if step.kind is StepKind.PLUCK:
                paste_a_leaf(forest, step)
            else:
                merge(forest, step)
        assert forest.cost == self.cost
        return forest


def _run(run: _Pass, q: int, rng: np.random.Generator, mode: Mode) -> Optional[_Outcome]:
    cap = 4 * max(q, 1)
    while True:
        run.exhaust_plucks()
        if mode == "simple":
            pool = run.state.active_coordinates()
        else:
            pool = simple_coordinates(run.state)
        if len(pool) < _threshold(q, mode):
            break
        if run.splits >= cap:
            return None
        i = pool[int(rng.integers(len(pool)))]
        hit = split(i, run.state)
        if hit is None:
            if mode == "general":
                raise ContractError(f"split failed on simple coordinate {i}")
            return None
        x, x_bar, run.state = hit
        run.trace.append(TraceStep(StepKind.SPLIT, x, i, x_bar))
        run.splits += 1
    base = base_case(run.state, q) if mode == "general" else plain_base_case(run.state)
    return _Outcome(base, run.trace, run.splits, q)


def _rng(seed: int, q: int, restart: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(q, restart)))


def _report(m: TerminalMatrix, forest: LabeledForest, q: int, restarts: int, splits: int, plucks: int) -> SolveReport:
    b = bound(m.d, q)
    return SolveReport(forest, forest.cost, q, restarts, b, forest.cost <= b, splits, plucks)


def _run_seeded(prefix: _Pass, q: int, seed: int, mode: Mode, restart: int) -> Optional[_Outcome]:
    return _run(prefix.fork(), q, _rng(seed, q, restart), mode)


def _initial_pass(m: TerminalMatrix) -> _Pass:
    run = _Pass(PartitionState.initial(m), [])
    run.exhaust_plucks()
    return run


def solve_with_q(
    m: TerminalMatrix, q: int, seed: int = 0, mode: Mode = "general", *, restart: int = 0
) -> Optional[SolveReport]:
    """One seeded pass with excess parameter ``q``; ``None`` if the pass fails."""
    if m.n == 1:
        return _report(m, LabeledForest(m.d, m.rows), q, 1, 0, 0)
    out = _run_seeded(_initial_pass(m), q, seed, mode, restart)
    if out is None:
        return None
    return _report(m, out.materialize(), q, 1, out.splits, out.plucks)


def _candidates(cap: int) -> list[int]:
    out, q = [0], 1
    while q < cap:
        out.append(q)
        q *= 2
    if cap > 0:
        out.append(cap)
    return out


def solve(m: TerminalMatrix, cfg: SolverConfig = SolverConfig()) -> SolveReport:
    """Best tree over seeded restarts, estimating ``q`` by doubling if not given.

    ``m`` must be normalized (distinct rows, no constant coordinate). The
    pluck prefix before the first random draw is shared by all restarts.
    """
    t0 = time.perf_counter()
    mst = hamming_mst(Component.from_points(m.rows, m.d)) if m.n > 1 else LabeledForest(m.d, m.rows)
    t_mst = time.perf_counter() - t0
    if m.n == 1:
        rep = _report(m, mst, cfg.q_override or 0, 0, 0, 0)
        rep.timings = {"mst": t_mst, "passes": 0.0}
        rep.mst_cost = 0
        return rep
    prefix = _initial_pass(m)

    if cfg.q_override is not None:
        schedule = [cfg.q_override]
    else:
        schedule = _candidates(max(0, mst.cost - m.d))
    used = 0
    best: Optional[_Outcome] = None
    chosen: Optional[_Outcome] = None
    for q in schedule:
        for r in range(cfg.restarts_per_q):
            used += 1
            out = _run_seeded(prefix, q, cfg.seed, cfg.mode, r)
            if out is None:
                continue
            if best is None or out.cost < best.cost:
                best = out
            ok = cfg.q_override is not None or out.cost <= bound(m.d, q)
            if ok and (chosen is None or out.cost < chosen.cost):
                chosen = out
        if chosen is not None:
            break
    t_passes = time.perf_counter() - t0 - t_mst
    if chosen is not None:
        rep = _report(m, chosen.materialize(), chosen.q, used, chosen.splits, chosen.plucks)
    elif best is not None and best.cost <= mst.cost:
        rep = _report(m, best.materialize(), schedule[-1], used, best.splits, best.plucks)
    else:
        rep = _report(m, mst, schedule[-1], used, 0, 0)
    rep.timings = {"mst": t_mst, "passes": t_passes, "replay": time.perf_counter() - t0 - t_mst - t_passes}
    rep.mst_cost = mst.cost
    return rep
