"""Run summaries and the planted-instance benchmark harness."""

from __future__ import annotations

import csv
import io
import json
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from typing import Iterable, Optional

from .generator import plant
from .instance import TerminalMatrix, normalize
from .oracle import OracleLimitError, exact_steiner, verify
from .solver import SolveReport, SolverConfig, solve


@dataclass
class RunSummary:
    """One solver run. Field names are the stable JSON and CSV keys."""

    instance: str
    d: int
    d_active: int
    n: int
    q_estimate: int
    q_planted: Optional[int]
    cost: int
    bound: int
    met_bound: bool
    mst_cost: int
    oracle_cost: Optional[int]
    splits: int
    plucks: int
    valid: bool
    seed: int
    restarts_used: int
    t_mst: float
    t_passes: float
    t_replay: float
    t_total: float

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=False)


def summarize(
    instance: str,
    m: TerminalMatrix,
    m_norm: TerminalMatrix,
    report: SolveReport,
    mst_cost: int,
    *,
    valid: bool,
    seed: int,
    total: float,
    q_planted: Optional[int] = None,
    oracle_cost: Optional[int] = None,
) -> RunSummary:
    t = report.timings
    return RunSummary(
        instance=instance, d=m.d, d_active=m_norm.d, n=m.n, q_estimate=report.q_used,
        q_planted=q_planted, cost=report.cost, bound=report.bound, met_bound=report.met_bound,
        mst_cost=mst_cost, oracle_cost=oracle_cost, splits=report.splits, plucks=report.plucks,
        valid=valid, seed=seed, restarts_used=report.restarts_used, t_mst=t.get("mst", 0.0),
        t_passes=t.get("passes", 0.0), t_replay=t.get("replay", 0.0), t_total=total,
    )


@dataclass(frozen=True)
class BenchConfig:
    d: int
    q: int
    n: int
    repetitions: int = 10     # restarts per candidate q
    use_planted_q: bool = False
    mode: str = "general"

    @property
    def name(self) -> str:
        return f"d{self.d}_q{self.q}_n{self.n}"


def load_suite(text: str) -> list[BenchConfig]:
    """A JSON list of ``{d, q, n, repetitions}`` objects (or ``{"configs": [...]}``)."""
    raw = json.loads(text) if text.strip() else []
    if isinstance(raw, dict):
        raw = raw.get("configs", [])
    known = {f.name for f in fields(BenchConfig)}
    out = []
    for k, item in enumerate(raw):
        extra = set(item) - known
        if extra:
            raise ValueError(f"suite entry {k}: unknown keys {sorted(extra)}")
        out.append(BenchConfig(**item))
    return out


def split_cap(q: int) -> int:
    return 4 * max(q, 1)


def run_one(cfg: BenchConfig, seed: int, with_oracle: bool = False) -> RunSummary:
    inst = plant(cfg.d, cfg.q, cfg.n, seed)
    m = inst.matrix
    m_norm, _ = normalize(m)
    solver_cfg = SolverConfig(
        seed=seed, restarts_per_q=cfg.repetitions, q_override=cfg.q if cfg.use_planted_q else None,
        mode=cfg.mode,
    )
    t0 = time.perf_counter()
    report = solve(m_norm, solver_cfg)
    total = time.perf_counter() - t0
    oracle_cost = None
    if with_oracle:
        try:
            oracle_cost = exact_steiner(m_norm).cost
        except OracleLimitError:
            pass
    valid = verify(report.forest, m_norm).valid
    summary = summarize(
        f"{cfg.name}_s{seed}", m, m_norm, report, report.mst_cost, valid=valid, seed=seed, total=total,
        q_planted=cfg.q, oracle_cost=oracle_cost,
    )
    if summary.met_bound and summary.splits > split_cap(summary.q_estimate):
        raise AssertionError(
            f"{summary.instance}: {summary.splits} splits exceed the cap {split_cap(summary.q_estimate)}"
        )
    return summary


def _task(args):
    return run_one(*args)


def run_suite(
    configs: Iterable[BenchConfig], seeds: int, *, workers: int = 1, with_oracle: bool = False
) -> list[tuple[BenchConfig, list[RunSummary]]]:
    configs = list(configs)
    tasks = [(cfg, s, with_oracle) for cfg in configs for s in range(seeds)]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_task, tasks))
    else:
        results = [_task(t) for t in tasks]
    out, k = [], 0
    for cfg in configs:
        out.append((cfg, results[k:k + seeds]))
        k += seeds
    return out


AGGREGATE_FIELDS = ["row_type", "config", "runs", "min_cost", "median_cost", "success_rate", "median_t_total"]
CSV_FIELDS = AGGREGATE_FIELDS + [f.name for f in fields(RunSummary)]


def aggregate(cfg: BenchConfig, runs: list[RunSummary]) -> dict:
    costs = [r.cost for r in runs]
    return {
        "row_type": "aggregate",
        "config": cfg.name,
        "runs": len(runs),
        "min_cost": min(costs) if costs else "",
        "median_cost": statistics.median(costs) if costs else "",
        "success_rate": sum(r.met_bound for r in runs) / len(runs) if runs else "",
        "median_t_total": statistics.median(r.t_total for r in runs) if runs else "",
    }


def write_csv(results: list[tuple[BenchConfig, list[RunSummary]]], stream: io.TextIOBase) -> None:
    w = csv.DictWriter(stream, fieldnames=CSV_FIELDS, lineterminator="\n")
    w.writeheader()
    for cfg, runs in results:
        for r in runs:
            w.writerow({"row_type": "run", "config": cfg.name, **asdict(r)})
        w.writerow(aggregate(cfg, runs))
