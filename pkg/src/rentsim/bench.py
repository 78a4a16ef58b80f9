"""Benchmark harness: strategy x parameter-grid matrices over seeded trials.

Within a grid cell every strategy runs on the same generated sequences
(trial i uses seed ``seed_base + i``), so strategy comparisons are paired.
Aggregation is a deterministic fold over trial index order, which makes
the output independent of execution order and parallelism degree.
"""

from __future__ import annotations

import csv
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from .bounds import ORACLE_DEFAULT_LIMIT, brute_force_opt
from .core import compute_stats
from .engine import simulate
from .generators import UniformParams, gen_uniform
from .strategies import parse_strategy

__all__ = ["ExperimentSpec", "AggregateRow", "BenchError", "run_experiment",
           "rows_to_csv", "summary_table"]

AGGREGATE_HEADER = [
    "strategy", "n", "e", "t", "mu", "trials",
    "mean_ratio", "std_ratio", "mean_cost", "mean_util",
]


class BenchError(Exception):
    """A cell of the experiment failed; the message names the cell and trial."""


@dataclass(frozen=True)
class ExperimentSpec:
    """One benchmark: strategies crossed with an (n, e, t, mu) grid.

    The performance measure per trial is cost / utilization, the
    utilization being the exact lower bound on any algorithm's cost.
    """

    strategies: tuple[str, ...]
    ns: tuple[int, ...]
    es: tuple[int, ...]
    ts: tuple[int, ...]
    mus: tuple[int, ...]
    trials: int
    seed_base: int
    oracle: bool = False
    oracle_limit: int = ORACLE_DEFAULT_LIMIT
    workers: int = 1

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        for name, grid in (("strategies", self.strategies), ("n", self.ns),
                           ("e", self.es), ("t", self.ts), ("mu", self.mus)):
            if not grid:
                raise ValueError(f"empty grid: {name}")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")


@dataclass(frozen=True)
class AggregateRow:
    """Mean performance of one strategy in one grid cell."""

    strategy: str
    n: int
    e: int
    t: int
    mu: int
    trials: int
    mean_ratio: Fraction
    std_ratio: float
    mean_cost: Fraction
    mean_util: Fraction


def _run_trial(args) -> list[tuple[str, int, Fraction]]:
    """One seeded sequence, all strategies on it; returns (name, cost, util) rows."""
    n, e, t, mu, seed, strategy_names, oracle, oracle_limit = args
    seq = gen_uniform(UniformParams(n=n, e=e, t=t, mu=mu, seed=seed))
    util = compute_stats(seq).util
    opt = brute_force_opt(seq, limit=oracle_limit) if oracle and n <= oracle_limit else None
    out = []
    for name in strategy_names:
        strategy = parse_strategy(name, e, mu=mu).build()
        result = simulate(strategy, seq, record_events=False)
        if Fraction(result.total_cost) < util:
            raise BenchError(
                f"cost {result.total_cost} below utilization {util} "
                f"(strategy {name}, seed {seed})"
            )
        if opt is not None and result.total_cost < opt:
            raise BenchError(
                f"cost {result.total_cost} below exact optimum {opt} "
                f"(strategy {name}, seed {seed})"
            )
        out.append((name, result.total_cost, util))
    return out


def run_experiment(spec: ExperimentSpec) -> list[AggregateRow]:
    """Run the full matrix and aggregate per (cell, strategy).

    Any single-run failure aborts the cell with a :class:`BenchError`
    naming the cell.  Rows come out in grid order, strategies in the
    order given, so the output is reproducible byte for byte.
    """
    rows: list[AggregateRow] = []
    for n in spec.ns:
        for e in spec.es:
            for t in spec.ts:
                for mu in spec.mus:
                    cell = f"n={n} e={e} t={t} mu={mu}"
                    tasks = [
                        (n, e, t, mu, spec.seed_base + i, spec.strategies,
                         spec.oracle, spec.oracle_limit)
                        for i in range(spec.trials)
                    ]
                    try:
                        if spec.workers > 1:
                            with ProcessPoolExecutor(max_workers=spec.workers) as pool:
                                per_trial = list(pool.map(_run_trial, tasks))
                        else:
                            per_trial = [_run_trial(task) for task in tasks]
                    except (BenchError, ValueError) as exc:
                        raise BenchError(f"cell {cell}: {exc}") from exc
                    rows.extend(_aggregate_cell(spec, n, e, t, mu, per_trial))
    return rows


def _aggregate_cell(spec, n, e, t, mu, per_trial) -> list[AggregateRow]:
    rows = []
    for idx, name in enumerate(spec.strategies):
        costs = [trial[idx][1] for trial in per_trial]
        utils = [trial[idx][2] for trial in per_trial]
        ratios = [Fraction(c) / u for c, u in zip(costs, utils)]
        rows.append(
            AggregateRow(
                strategy=name,
                n=n, e=e, t=t, mu=mu,
                trials=spec.trials,
                mean_ratio=sum(ratios, Fraction(0)) / spec.trials,
                std_ratio=(
                    statistics.stdev(float(r) for r in ratios)
                    if spec.trials >= 2 else 0.0
                ),
                mean_cost=Fraction(sum(costs), spec.trials),
                mean_util=sum(utils, Fraction(0)) / spec.trials,
            )
        )
    return rows


def rows_to_csv(rows: list[AggregateRow], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(AGGREGATE_HEADER)
        for r in rows:
            writer.writerow([
                r.strategy, r.n, r.e, r.t, r.mu, r.trials,
                f"{float(r.mean_ratio):.6f}",
                f"{r.std_ratio:.6f}",
                f"{float(r.mean_cost):.3f}",
                f"{float(r.mean_util):.3f}",
            ])


def summary_table(rows: list[AggregateRow]) -> str:
    """Aligned text table, one line per row; '*' marks the best of each cell."""
    cells: dict[tuple[int, int, int, int], Fraction] = {}
    for r in rows:
        key = (r.n, r.e, r.t, r.mu)
        if key not in cells or r.mean_ratio < cells[key]:
            cells[key] = r.mean_ratio
    header = f"{'strategy':<14} {'n':>7} {'e':>6} {'t':>7} {'mu':>4} {'mean_ratio':>11} {'std':>9}  best"
    lines = [header, "-" * len(header)]
    for r in rows:
        best = "*" if r.mean_ratio == cells[(r.n, r.e, r.t, r.mu)] else ""
        lines.append(
            f"{r.strategy:<14} {r.n:>7} {r.e:>6} {r.t:>7} {r.mu:>4} "
            f"{float(r.mean_ratio):>11.6f} {r.std_ratio:>9.6f}  {best}"
        )
    return "\n".join(lines)
