"""Lower bounds, a brute-force optimum for tiny instances, and bound checkers.

Each checker turns one theoretical guarantee into a machine-checkable
inequality over quantities measurable from a run: span, utilization,
total size, and the min/max job lengths.  All comparisons are exact
rational arithmetic; a failed check is a defect, not a warning.

The checkers deliberately assert the strongest inequality computable
without knowing the offline optimum.  Ratios against OPT are only
asserted where OPT itself is computable (the tiny-instance oracle).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .core import JobSequence, SequenceStats, compute_stats, union_measure
from .engine import RunResult

__all__ = [
    "BoundEntry",
    "BoundReport",
    "lower_bound",
    "brute_force_opt",
    "check_nf_bound",
    "check_mnf_bound",
    "check_mtf_bound",
    "check_universal_bounds",
    "build_report",
    "ORACLE_DEFAULT_LIMIT",
]

ORACLE_DEFAULT_LIMIT = 8


def _frac_json(value: Fraction | int):
    frac = Fraction(value)
    if frac.denominator == 1:
        return int(frac)
    return str(frac)


@dataclass(frozen=True, slots=True)
class BoundEntry:
    """One checked inequality between a formula value and a measured cost."""

    name: str
    formula_value: Fraction
    cost: Fraction
    satisfied: bool

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "formula_value": _frac_json(self.formula_value),
            "cost": _frac_json(self.cost),
            "satisfied": self.satisfied,
        }


@dataclass(frozen=True)
class BoundReport:
    """Lower bounds plus every per-theorem verdict gathered for one run."""

    lb_span: int
    lb_util: Fraction
    lb: Fraction
    opt_exact: Fraction | None = None
    entries: tuple[BoundEntry, ...] = ()

    @property
    def all_satisfied(self) -> bool:
        return all(entry.satisfied for entry in self.entries)

    def to_json(self) -> dict:
        return {
            "lb_span": self.lb_span,
            "lb_util": _frac_json(self.lb_util),
            "lb": _frac_json(self.lb),
            "opt_exact": None if self.opt_exact is None else _frac_json(self.opt_exact),
            "checks": [entry.to_json() for entry in self.entries],
        }


def lower_bound(seq: JobSequence) -> tuple[int, Fraction, Fraction]:
    """Span and utilization lower bounds; any algorithm's cost is >= both."""
    stats = compute_stats(seq)
    return stats.span, stats.util, max(Fraction(stats.span), stats.util)


def brute_force_opt(seq: JobSequence, limit: int = ORACLE_DEFAULT_LIMIT) -> int:
    """Exact optimal rental cost by exhausting set partitions of the jobs.

    A group of jobs is feasible if its resident size never exceeds the
    capacity; its cost is the measure of the union of its intervals (an
    emptied server is released, and re-renting costs the same as opening
    a fresh server).  The optimum is the cheapest feasible partition.

    Partition counts grow as Bell numbers, hence the instance size limit.
    """
    jobs = list(seq.jobs)
    n = len(jobs)
    if n == 0:
        raise ValueError("empty sequence")
    if n > limit:
        raise ValueError(f"instance too large for oracle: {n} jobs > limit {limit}")
    e = seq.capacity.e

    def feasible(group: list) -> bool:
        # load only rises at arrivals, so checking each arrival point suffices
        for j in group:
            load = sum(k.size for k in group if k.active_at(j.arrival))
            if load > e:
                return False
        return True

    best: int | None = None
    groups: list[list] = []

    def walk(i: int) -> None:
        nonlocal best
        if i == n:
            cost = sum(
                union_measure((j.arrival, j.departure) for j in group)
                for group in groups
            )
            if best is None or cost < best:
                best = cost
            return
        job = jobs[i]
        for group in groups:
            group.append(job)
            if feasible(group):
                walk(i + 1)
            group.pop()
        groups.append([job])
        walk(i + 1)
        groups.pop()

    walk(0)
    assert best is not None
    return best


def _require(result: RunResult, kind: str, checker: str) -> None:
    if result.strategy.split(":", 1)[0] != kind:
        raise ValueError(
            f"{checker} expects a result produced by {kind!r}, got {result.strategy!r}"
        )


def check_nf_bound(
    result: RunResult, stats: SequenceStats, k: Fraction | int | None = None
) -> list[BoundEntry]:
    """Next Fit guarantee: cost <= span + (critical bin cap) * max job length.

    The general cap on critical bins is twice the total size; when every
    size is at most E/k for some k >= 2 the cap tightens to
    total_size / (1 - 1/k).  The observed critical count is checked
    against the same caps.  The tighter branch is applied only when the
    size precondition actually holds for the sequence.
    """
    _require(result, "nf", "check_nf_bound")
    cost = Fraction(result.total_cost)
    mu_delta = stats.mu * stats.delta  # == max job length
    p = Fraction(result.critical_count)
    entries = [
        BoundEntry(
            name="nf_worst_case",
            formula_value=stats.span + 2 * stats.total_size * mu_delta,
            cost=cost,
            satisfied=cost <= stats.span + 2 * stats.total_size * mu_delta,
        ),
        BoundEntry(
            name="nf_critical_cap",
            formula_value=2 * stats.total_size,
            cost=p,
            satisfied=p <= 2 * stats.total_size,
        ),
    ]
    if k is not None:
        k = Fraction(k)
        e = result.trace.sequence.capacity.e
        max_size = max(job.size for job in result.trace.sequence.jobs)
        if k >= 2 and Fraction(max_size) * k <= e:
            cap = stats.total_size / (1 - 1 / k)
            entries.append(
                BoundEntry(
                    name=f"nf_worst_case_small_k={k}",
                    formula_value=stats.span + cap * mu_delta,
                    cost=cost,
                    satisfied=cost <= stats.span + cap * mu_delta,
                )
            )
            entries.append(
                BoundEntry(
                    name=f"nf_critical_cap_small_k={k}",
                    formula_value=cap,
                    cost=p,
                    satisfied=p <= cap,
                )
            )
    return entries


def check_mnf_bound(
    result: RunResult, stats: SequenceStats, k: Fraction | int
) -> BoundEntry:
    """Modified Next Fit guarantee: cost <= K * util * max{1, mu/(K-1)} + span."""
    _require(result, "mnf", "check_mnf_bound")
    k = Fraction(k)
    cost = Fraction(result.total_cost)
    factor = max(Fraction(1), stats.mu / (k - 1))
    bound = k * stats.util * factor + stats.span
    return BoundEntry(
        name=f"mnf_guarantee_k={k}",
        formula_value=bound,
        cost=cost,
        satisfied=cost <= bound,
    )


def _continuous_segments(seq: JobSequence) -> list[tuple[int, int]]:
    """Maximal intervals in which at least one job is active."""
    merged: list[tuple[int, int]] = []
    for start, end in sorted((j.arrival, j.departure) for j in seq.jobs):
        if merged and start <= merged[-1][1]:
            if end > merged[-1][1]:
                merged[-1] = (merged[-1][0], end)
        else:
            merged.append((start, end))
    return merged


def check_mtf_bound(result: RunResult, stats: SequenceStats) -> BoundEntry:
    """Move To Front guarantee, applied per continuous segment and summed.

    Per segment: cost <= 6(mu+1) * util + span + 3(mu+1) * delta, with mu
    and delta taken over the whole sequence (they bound every job length).
    Servers never outlive a segment, so segment costs are well-defined.
    """
    _require(result, "mtf", "check_mtf_bound")
    seq = result.trace.sequence
    e = seq.capacity.e
    mu1 = stats.mu + 1
    satisfied = True
    total_formula = Fraction(0)
    for start, end in _continuous_segments(seq):
        seg_jobs = [j for j in seq.jobs if start <= j.arrival < end]
        seg_util = Fraction(sum(j.size * j.length for j in seg_jobs), e)
        seg_span = end - start
        seg_cost = sum(
            srv.stretch for srv in result.trace.servers if start <= srv.opened_at < end
        )
        seg_bound = 6 * mu1 * seg_util + seg_span + 3 * mu1 * stats.delta
        total_formula += seg_bound
        if seg_cost > seg_bound:
            satisfied = False
    return BoundEntry(
        name="mtf_guarantee",
        formula_value=total_formula,
        cost=Fraction(result.total_cost),
        satisfied=satisfied,
    )


def check_universal_bounds(
    result: RunResult, stats: SequenceStats
) -> list[BoundEntry]:
    """Bounds every strategy must satisfy on every sequence.

    Lower: cost >= span and cost >= util.  Upper: cost <= total length;
    and with k = E / min size (so every size is >= E/k), cost <= k * util.
    """
    cost = Fraction(result.total_cost)
    seq = result.trace.sequence
    k = Fraction(seq.capacity.e, min(job.size for job in seq.jobs))
    return [
        BoundEntry("lb_span", Fraction(stats.span), cost, cost >= stats.span),
        BoundEntry("lb_util", stats.util, cost, cost >= stats.util),
        BoundEntry(
            "ub_total_length",
            Fraction(stats.total_length),
            cost,
            cost <= stats.total_length,
        ),
        BoundEntry(
            f"ub_sizes_geq_e_over_k_k={k}",
            k * stats.util,
            cost,
            cost <= k * stats.util,
        ),
    ]


def build_report(
    result: RunResult,
    *,
    with_oracle: bool = False,
    oracle_limit: int = ORACLE_DEFAULT_LIMIT,
    nf_k: Fraction | int | None = None,
) -> BoundReport:
    """Gather universal checks plus the checks specific to the run's strategy."""
    seq = result.trace.sequence
    stats = compute_stats(seq)
    lb_span, lb_util, lb = stats.span, stats.util, max(Fraction(stats.span), stats.util)
    entries = list(check_universal_bounds(result, stats))
    kind, _, param = result.strategy.partition(":")
    if kind == "nf":
        entries.extend(check_nf_bound(result, stats, nf_k))
    elif kind == "mnf":
        entries.append(check_mnf_bound(result, stats, Fraction(param)))
    elif kind == "mtf":
        entries.append(check_mtf_bound(result, stats))
    opt_exact: Fraction | None = None
    if with_oracle:
        opt_exact = Fraction(brute_force_opt(seq, limit=oracle_limit))
        entries.append(
            BoundEntry(
                "cost_geq_opt",
                opt_exact,
                Fraction(result.total_cost),
                Fraction(result.total_cost) >= opt_exact,
            )
        )
    return BoundReport(
        lb_span=lb_span,
        lb_util=lb_util,
        lb=lb,
        opt_exact=opt_exact,
        entries=tuple(entries),
    )
