"""Shared test utilities: random sequence strategies and replay oracles.

The replay oracles re-derive placement targets from first principles
(walking the event log and keeping independent occupancy state) so that
engine and strategy behaviour is checked against something other than
itself.
"""

from __future__ import annotations

from fractions import Fraction

import hypothesis.strategies as st

from rentsim import CapacityConfig, Job, JobSequence


@st.composite
def job_sequences(draw, max_jobs=10, max_e=12, max_time=15, max_length=6, min_jobs=1):
    e = draw(st.integers(1, max_e))
    n = draw(st.integers(min_jobs, max_jobs))
    jobs = []
    for i in range(n):
        size = draw(st.integers(1, e))
        arrival = draw(st.integers(0, max_time))
        length = draw(st.integers(1, max_length))
        jobs.append(Job(i + 1, size, arrival, arrival + length))
    return JobSequence(jobs, CapacityConfig(e))


def all_strategy_specs(mu: int) -> list[str]:
    """Every selection string, with the mu-dependent parameters filled in."""
    return ["nf", f"mnf:{mu + 1}", "ff", f"mff:{mu + 7}", "bf", "harmonic:10", "mtf"]


class ReplayState:
    """Independent occupancy bookkeeping driven by a trace's event log."""

    def __init__(self, seq):
        self.e = seq.capacity.e
        self.jobs = {j.id: j for j in seq.jobs}
        self.level: dict[int, int] = {}
        self.closed: set[int] = set()
        self.order: list[int] = []  # opening order of currently open servers

    def depart(self, ev):
        self.level[ev.server_id] -= self.jobs[ev.job_id].size

    def release(self, ev):
        del self.level[ev.server_id]
        self.closed.discard(ev.server_id)
        self.order.remove(ev.server_id)

    def close(self, ev):
        self.closed.add(ev.server_id)

    def place(self, ev):
        if ev.server_id not in self.level:
            self.level[ev.server_id] = 0
            self.order.append(ev.server_id)
        self.level[ev.server_id] += self.jobs[ev.job_id].size

    def open_candidates(self) -> list[int]:
        """Placeable servers (open, not closed) in opening order."""
        return [sid for sid in self.order if sid not in self.closed]

    def fits(self, sid: int, size: int) -> bool:
        return self.level[sid] + size <= self.e


class FirstFitOracle:
    def predict(self, state: ReplayState, job) -> int | None:
        for sid in state.open_candidates():
            if state.fits(sid, job.size):
                return sid
        return None


class NextFitOracle:
    def predict(self, state: ReplayState, job) -> int | None:
        candidates = state.open_candidates()
        assert len(candidates) <= 1, "next fit must keep a single placeable server"
        if candidates and state.fits(candidates[0], job.size):
            return candidates[0]
        return None


class BestFitOracle:
    def predict(self, state: ReplayState, job) -> int | None:
        best = None
        for sid in state.open_candidates():  # opening order settles level ties
            if state.fits(sid, job.size):
                if best is None or state.level[sid] > state.level[best]:
                    best = sid
        return best


class MoveToFrontOracle:
    """Keeps its own recency list; releases drop entries without reordering."""

    def __init__(self):
        self.order: list[int] = []

    def predict(self, state: ReplayState, job) -> int | None:
        self.order = [sid for sid in self.order if sid in state.level]
        for sid in self.order:
            if state.fits(sid, job.size):
                return sid
        return None

    def placed(self, state: ReplayState, ev) -> None:
        if ev.server_id in self.order:
            self.order.remove(ev.server_id)
        self.order.insert(0, ev.server_id)


def replay_check_placements(result, oracle) -> ReplayState:
    """Walk a run's events and assert every placement matches the oracle.

    The oracle's ``predict(state, job)`` returns the expected server id, or
    None for "open a new server"; ``placed(state, event)``, when present,
    lets it track the id the engine assigned to a new server.
    """
    seq = result.trace.sequence
    state = ReplayState(seq)
    for ev in result.trace.events:
        if ev.kind == "depart":
            state.depart(ev)
        elif ev.kind == "release":
            state.release(ev)
        elif ev.kind == "close":
            state.close(ev)
        elif ev.kind == "place":
            job = state.jobs[ev.job_id]
            expected = oracle.predict(state, job)
            actual = ev.server_id if ev.server_id in state.level else None
            assert actual == expected, (
                f"job {ev.job_id} at t={ev.t}: engine placed in {ev.server_id}, "
                f"oracle expected {expected if expected is not None else 'a new server'}"
            )
            state.place(ev)
            if hasattr(oracle, "placed"):
                oracle.placed(state, ev)
    return state


# collected by the acceptance tests; echoed in the terminal summary by conftest
ACCEPTANCE_VERDICTS: list[str] = []


def record_verdict(name: str, ok: bool, detail: str = "") -> str:
    line = f"criterion {name}: {'PASS' if ok else 'FAIL'}"
    if detail:
        line += f" -- {detail}"
    ACCEPTANCE_VERDICTS.append(line)
    print(f"[acceptance] {line}", flush=True)
    return line


def pointwise_span(jobs) -> int:
    """Span oracle: count integer steps covered by at least one job."""
    covered = set()
    for job in jobs:
        covered.update(range(job.arrival, job.departure))
    return len(covered)


def exact_ratio(cost, util) -> Fraction:
    return Fraction(cost) / Fraction(util)
