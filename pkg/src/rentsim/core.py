"""Domain types for the online server-renting simulator.

Jobs are sized, timed demands placed into servers of uniform capacity E.
A rented server accrues cost for the whole interval it is open, so the
objective is total rental time, not server count.

Conventions used throughout the package:

* all times are integer steps and job intervals are half-open
  ``[arrival, departure)``: a job departing at t frees capacity at t;
* sizes are integers in capacity units, ``1 <= size <= E``;
* ratio statistics (utilization, total size, max/min length ratio) are
  exact ``fractions.Fraction`` values, never floats, so that bound
  inequalities can be checked exactly.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

__all__ = [
    "Job",
    "CapacityConfig",
    "JobSequence",
    "SequenceStats",
    "ServerRecord",
    "Event",
    "PlacementTrace",
    "Violation",
    "compute_stats",
    "validate_trace",
    "union_measure",
    "read_sequence_csv",
    "write_sequence_csv",
]

CSV_HEADER = ["id", "size", "arrival", "departure"]

# depart/release happen strictly before arrive/place/close within a time step
_EVENT_PHASE = {"depart": 0, "release": 0, "arrive": 1, "place": 1, "close": 1}


@dataclass(frozen=True, slots=True)
class Job:
    """One demand: occupies ``size`` capacity units during [arrival, departure)."""

    id: int
    size: int
    arrival: int
    departure: int

    def __post_init__(self) -> None:
        if self.size < 1:
            raise ValueError(f"job {self.id}: size must be >= 1, got {self.size}")
        if self.arrival < 0:
            raise ValueError(f"job {self.id}: arrival must be >= 0, got {self.arrival}")
        if self.departure <= self.arrival:
            raise ValueError(
                f"job {self.id}: departure {self.departure} must exceed arrival {self.arrival}"
            )

    @property
    def length(self) -> int:
        return self.departure - self.arrival

    def active_at(self, t: int) -> bool:
        return self.arrival <= t < self.departure


@dataclass(frozen=True, slots=True)
class CapacityConfig:
    """Uniform server capacity in integer units."""

    e: int

    def __post_init__(self) -> None:
        if self.e < 1:
            raise ValueError(f"capacity must be >= 1, got {self.e}")


@dataclass(frozen=True)
class JobSequence:
    """Input sequence, stored sorted by (arrival, input position).

    The stable sort means jobs sharing an arrival step are served in the
    order they were supplied, which is what makes runs reproducible.
    """

    jobs: tuple[Job, ...]
    capacity: CapacityConfig

    def __init__(self, jobs: Iterable[Job], capacity: CapacityConfig):
        ordered = tuple(sorted(jobs, key=lambda j: j.arrival))
        seen: set[int] = set()
        for job in ordered:
            if job.id in seen:
                raise ValueError(f"duplicate job id {job.id}")
            seen.add(job.id)
            if job.size > capacity.e:
                raise ValueError(
                    f"job {job.id}: size {job.size} exceeds capacity {capacity.e}"
                )
        object.__setattr__(self, "jobs", ordered)
        object.__setattr__(self, "capacity", capacity)

    def __len__(self) -> int:
        return len(self.jobs)

    def __iter__(self):
        return iter(self.jobs)

    def job_by_id(self, job_id: int) -> Job:
        for job in self.jobs:
            if job.id == job_id:
                return job
        raise KeyError(job_id)


@dataclass(frozen=True, slots=True)
class SequenceStats:
    """Derived statistics of a sequence; the lower bounds and bound-formula inputs.

    span          measure of the union of all job intervals
    util          sum of size * length over capacity (exact rational)
    total_size    sum of sizes over capacity (exact rational)
    total_length  sum of job lengths
    delta         minimum job length
    mu            max length / min length (exact rational, >= 1)
    """

    span: int
    util: Fraction
    total_size: Fraction
    total_length: int
    delta: int
    mu: Fraction


def union_measure(intervals: Iterable[tuple[int, int]]) -> int:
    """Total length covered by a set of half-open integer intervals."""
    spans = sorted(intervals)
    total = 0
    cur_start: int | None = None
    cur_end = 0
    for start, end in spans:
        if cur_start is None or start > cur_end:
            if cur_start is not None:
                total += cur_end - cur_start
            cur_start, cur_end = start, end
        elif end > cur_end:
            cur_end = end
    if cur_start is not None:
        total += cur_end - cur_start
    return total


def compute_stats(seq: JobSequence) -> SequenceStats:
    """Compute span, utilization and the length statistics of a sequence."""
    if not seq.jobs:
        raise ValueError("empty sequence")
    e = seq.capacity.e
    lengths = [job.length for job in seq.jobs]
    delta = min(lengths)
    return SequenceStats(
        span=union_measure((job.arrival, job.departure) for job in seq.jobs),
        util=Fraction(sum(job.size * job.length for job in seq.jobs), e),
        total_size=Fraction(sum(job.size for job in seq.jobs), e),
        total_length=sum(lengths),
        delta=delta,
        mu=Fraction(max(lengths), delta),
    )


@dataclass(frozen=True, slots=True)
class ServerRecord:
    """One rented server: open interval, optional close mark, and its jobs.

    ``closed_at`` is set only by strategies that stop placing into a server
    (the Next Fit family); a closed server keeps accruing cost until
    released.  ``jobs`` lists job ids in placement order.
    """

    id: int
    opened_at: int
    released_at: int
    closed_at: int | None
    jobs: tuple[int, ...]

    @property
    def stretch(self) -> int:
        return self.released_at - self.opened_at

    @property
    def closed_period(self) -> int:
        """Length of the close-to-release period (0 when never closed)."""
        if self.closed_at is None:
            return 0
        return self.released_at - self.closed_at


@dataclass(frozen=True, slots=True)
class Event:
    """One simulation event; kind is arrive, place, close, depart or release."""

    t: int
    kind: str
    job_id: int | None = None
    server_id: int | None = None


@dataclass(frozen=True)
class PlacementTrace:
    """Full assignment history of a run; the unit of validation."""

    sequence: JobSequence
    assignments: Mapping[int, int]
    servers: tuple[ServerRecord, ...]
    events: tuple[Event, ...] = ()

    def server_by_id(self, server_id: int) -> ServerRecord:
        for srv in self.servers:
            if srv.id == server_id:
                return srv
        raise KeyError(server_id)

    def resident_jobs(self, server_id: int, t: int) -> frozenset[int]:
        """Job ids resident in a server at time t."""
        srv = self.server_by_id(server_id)
        return frozenset(
            jid for jid in srv.jobs if self.sequence.job_by_id(jid).active_at(t)
        )


@dataclass(frozen=True, slots=True)
class Violation:
    """One broken invariant, naming what failed, when, and which ids."""

    invariant: str
    time: int | None = None
    job_id: int | None = None
    server_id: int | None = None
    detail: str = ""

    def __str__(self) -> str:
        parts = [self.invariant]
        if self.time is not None:
            parts.append(f"t={self.time}")
        if self.job_id is not None:
            parts.append(f"job={self.job_id}")
        if self.server_id is not None:
            parts.append(f"server={self.server_id}")
        if self.detail:
            parts.append(self.detail)
        return " ".join(parts)


def validate_trace(trace: PlacementTrace) -> list[Violation]:
    """Check every trace invariant; violations are data, not errors.

    Returns an empty list iff the trace satisfies: unique assignment of
    every job, per-server capacity at all times, release at the last
    departure, stretch >= minimum job length, and a time-monotone event
    log with departures/releases ordered before arrivals within a step.
    """
    violations: list[Violation] = []
    seq = trace.sequence
    e = seq.capacity.e
    jobs_by_id = {job.id: job for job in seq.jobs}

    # assignment completeness and agreement with server job lists
    placed: dict[int, int] = {}
    for srv in trace.servers:
        for jid in srv.jobs:
            if jid in placed:
                violations.append(
                    Violation("job-in-multiple-servers", job_id=jid, server_id=srv.id)
                )
            placed[jid] = srv.id
            if jid not in jobs_by_id:
                violations.append(
                    Violation("unknown-job-in-server", job_id=jid, server_id=srv.id)
                )
    for job in seq.jobs:
        assigned = trace.assignments.get(job.id)
        if assigned is None:
            violations.append(Violation("job-not-assigned", job_id=job.id))
        elif placed.get(job.id) != assigned:
            violations.append(
                Violation("assignment-mismatch", job_id=job.id, server_id=assigned)
            )

    delta = min((job.length for job in seq.jobs), default=1)
    for srv in trace.servers:
        members = [jobs_by_id[jid] for jid in srv.jobs if jid in jobs_by_id]
        if not members:
            violations.append(Violation("empty-server", server_id=srv.id))
            continue
        # load only increases at arrivals, so checking there suffices;
        # report the first offending time per server
        for t in sorted({job.arrival for job in members}):
            load = sum(job.size for job in members if job.active_at(t))
            if load > e:
                violations.append(
                    Violation(
                        "capacity-exceeded",
                        time=t,
                        server_id=srv.id,
                        detail=f"load {load} > {e}",
                    )
                )
                break
        last_departure = max(job.departure for job in members)
        if srv.released_at != last_departure:
            violations.append(
                Violation(
                    "release-not-at-last-departure",
                    time=srv.released_at,
                    server_id=srv.id,
                    detail=f"last departure {last_departure}",
                )
            )
        if srv.stretch < delta:
            violations.append(
                Violation(
                    "stretch-below-minimum-length",
                    server_id=srv.id,
                    detail=f"stretch {srv.stretch} < {delta}",
                )
            )

    prev: tuple[int, int] | None = None
    for ev in trace.events:
        key = (ev.t, _EVENT_PHASE[ev.kind])
        if prev is not None and key < prev:
            violations.append(
                Violation("event-log-out-of-order", time=ev.t, detail=ev.kind)
            )
        prev = key
    return violations


def write_sequence_csv(seq: JobSequence, path) -> None:
    """Write the interchange CSV: a capacity comment line, header, one job per row."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(f"# capacity={seq.capacity.e}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for job in seq.jobs:
            writer.writerow([job.id, job.size, job.arrival, job.departure])


def read_sequence_csv(path) -> JobSequence:
    """Read the interchange CSV written by :func:`write_sequence_csv`."""
    capacity: int | None = None
    rows: list[Job] = []
    header_seen = False
    with open(path, "r", encoding="utf-8", newline="") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line.lstrip("#").strip()
                if body.startswith("capacity="):
                    capacity = int(body.split("=", 1)[1])
                continue
            fields = next(csv.reader([line]))
            if not header_seen:
                if fields != CSV_HEADER:
                    raise ValueError(f"bad header {fields!r}, expected {CSV_HEADER}")
                header_seen = True
                continue
            jid, size, arrival, departure = (int(v) for v in fields)
            rows.append(Job(jid, size, arrival, departure))
    if not header_seen:
        raise ValueError("missing header line")
    if capacity is None:
        raise ValueError("missing '# capacity=E' line")
    return JobSequence(rows, CapacityConfig(capacity))
