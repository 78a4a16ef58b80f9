"""Deterministic online simulation loop.

The engine owns all timing: it feeds arrivals to a strategy, applies the
returned placement, and processes departures and releases itself.  A
strategy only ever sees :class:`ArrivalView` values, which carry no
departure or length information, so the online restriction is impossible
to violate by construction.  Departures reach strategies only indirectly,
as level changes of (or the disappearance of) servers in later views.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Hashable, Protocol

from .core import (
    Event,
    Job,
    JobSequence,
    PlacementTrace,
    ServerRecord,
)

__all__ = [
    "ArrivalView",
    "ServerView",
    "Decision",
    "RunResult",
    "InfeasiblePlacementError",
    "PlacementStrategy",
    "simulate",
    "reset",
    "write_event_csv",
    "read_event_csv",
    "trace_from_events",
]

EVENT_HEADER = ["t", "kind", "job_id", "server_id"]


@dataclass(frozen=True, slots=True)
class ServerView:
    """What a strategy may know about one open server.

    ``tag`` is an opaque value owned by the strategy: it is set via
    :class:`Decision` and echoed back unchanged on every later view.
    Strategies use it for stream labels, size classes, or recency stamps.
    """

    id: int
    level: int
    tag: Hashable = None


@dataclass(frozen=True, slots=True)
class ArrivalView:
    """The arriving job and the current placeable servers, in opening order.

    Contains no departure or length information by construction.  Closed
    servers (Next Fit family) are excluded: they are never valid targets.
    """

    job_id: int
    size: int
    time: int
    servers: tuple[ServerView, ...]


@dataclass(frozen=True, slots=True)
class Decision:
    """Strategy output: place into an open server, or open a new one.

    ``place_in`` of ``None`` means open a new server.  ``close`` lists
    servers the strategy abandons (it will never place into them again);
    the engine records the close but keeps renting them until released.
    ``tag`` is stored on the receiving server and echoed in later views.
    """

    place_in: int | None = None
    close: tuple[int, ...] = ()
    tag: Hashable = None


class PlacementStrategy(Protocol):
    """Interface every placement strategy implements."""

    name: str

    def reset(self) -> None: ...

    def place(self, view: ArrivalView) -> Decision: ...


class InfeasiblePlacementError(Exception):
    """A strategy returned a decision the engine cannot apply."""

    def __init__(self, message: str, *, time: int, job_id: int, decision: Decision):
        super().__init__(f"infeasible placement: {message}")
        self.time = time
        self.job_id = job_id
        self.decision = decision


@dataclass(frozen=True)
class RunResult:
    """Outcome of one simulation run.

    ``per_server`` holds (server id, stretch, closed period) triples;
    ``critical_count`` is the number of servers closed before release.
    """

    strategy: str
    total_cost: int
    trace: PlacementTrace
    per_server: tuple[tuple[int, int, int], ...]
    servers_opened: int
    critical_count: int


class _LiveServer:
    __slots__ = ("id", "opened_at", "closed_at", "level", "resident", "jobs", "tag")

    def __init__(self, sid: int, opened_at: int):
        self.id = sid
        self.opened_at = opened_at
        self.closed_at: int | None = None
        self.level = 0
        self.resident: set[int] = set()
        self.jobs: list[int] = []
        self.tag: Hashable = None


def simulate(
    strategy: PlacementStrategy, seq: JobSequence, *, record_events: bool = True
) -> RunResult:
    """Run one strategy over one sequence and return cost, trace and per-server data.

    Event times are processed in increasing order; within a time step all
    departures (and the releases they trigger) happen before any arrival.
    A server whose last resident departs is released at that exact step and
    its id is never reused.  The run is deterministic: identical inputs
    produce identical traces.

    Raises :class:`InfeasiblePlacementError` if the strategy targets a
    missing, closed, or over-full server; the engine never repairs a
    decision silently.
    """
    e = seq.capacity.e
    position = {job.id: idx for idx, job in enumerate(seq.jobs)}
    arrivals_at: dict[int, list[Job]] = {}
    departures_at: dict[int, list[Job]] = {}
    for job in seq.jobs:
        arrivals_at.setdefault(job.arrival, []).append(job)
        departures_at.setdefault(job.departure, []).append(job)

    live: dict[int, _LiveServer] = {}  # insertion order == opening order
    finished: list[_LiveServer] = []
    released_at: dict[int, int] = {}
    assignments: dict[int, int] = {}
    events: list[Event] = []
    next_id = 1

    def emit(t: int, kind: str, job_id: int | None, server_id: int | None) -> None:
        if record_events:
            events.append(Event(t, kind, job_id, server_id))

    for t in sorted(set(arrivals_at) | set(departures_at)):
        for job in sorted(departures_at.get(t, ()), key=lambda j: position[j.id]):
            srv = live[assignments[job.id]]
            srv.resident.discard(job.id)
            srv.level -= job.size
            emit(t, "depart", job.id, srv.id)
        for sid in [sid for sid, srv in live.items() if not srv.resident]:
            released_at[sid] = t
            emit(t, "release", None, sid)
            finished.append(live.pop(sid))

        for job in arrivals_at.get(t, ()):
            emit(t, "arrive", job.id, None)
            view = ArrivalView(
                job_id=job.id,
                size=job.size,
                time=t,
                servers=tuple(
                    ServerView(s.id, s.level, s.tag)
                    for s in live.values()
                    if s.closed_at is None
                ),
            )
            decision = strategy.place(view)
            for cid in decision.close:
                target = live.get(cid)
                if target is None or target.closed_at is not None:
                    raise InfeasiblePlacementError(
                        f"close of unknown or already closed server {cid}",
                        time=t,
                        job_id=job.id,
                        decision=decision,
                    )
                target.closed_at = t
                emit(t, "close", None, cid)
            if decision.place_in is None:
                srv = _LiveServer(next_id, t)
                live[next_id] = srv
                next_id += 1
            else:
                srv = live.get(decision.place_in)  # type: ignore[assignment]
                if srv is None or srv.closed_at is not None:
                    raise InfeasiblePlacementError(
                        f"target server {decision.place_in} is not open for placement",
                        time=t,
                        job_id=job.id,
                        decision=decision,
                    )
                if srv.level + job.size > e:
                    raise InfeasiblePlacementError(
                        f"server {srv.id} at level {srv.level} cannot take size {job.size}",
                        time=t,
                        job_id=job.id,
                        decision=decision,
                    )
            srv.level += job.size
            srv.resident.add(job.id)
            srv.jobs.append(job.id)
            if decision.tag is not None:
                srv.tag = decision.tag
            assignments[job.id] = srv.id
            emit(t, "place", job.id, srv.id)

    assert not live, "all servers must be released once every job has departed"

    records = tuple(
        ServerRecord(
            id=srv.id,
            opened_at=srv.opened_at,
            released_at=released_at[srv.id],
            closed_at=srv.closed_at,
            jobs=tuple(srv.jobs),
        )
        for srv in sorted(finished, key=lambda s: s.id)
    )
    trace = PlacementTrace(
        sequence=seq,
        assignments=assignments,
        servers=records,
        events=tuple(events),
    )
    per_server = tuple((r.id, r.stretch, r.closed_period) for r in records)
    return RunResult(
        strategy=strategy.name,
        total_cost=sum(r.stretch for r in records),
        trace=trace,
        per_server=per_server,
        servers_opened=len(records),
        critical_count=sum(1 for r in records if r.closed_period > 0),
    )


def reset(strategy: PlacementStrategy) -> PlacementStrategy:
    """Return the strategy to its freshly constructed state."""
    strategy.reset()
    return strategy


def write_event_csv(events, path) -> None:
    """Emit the event log, one line per event, for debugging and trace diffing."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(EVENT_HEADER)
        for ev in events:
            writer.writerow(
                [
                    ev.t,
                    ev.kind,
                    "" if ev.job_id is None else ev.job_id,
                    "" if ev.server_id is None else ev.server_id,
                ]
            )


def read_event_csv(path) -> tuple[Event, ...]:
    events: list[Event] = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != EVENT_HEADER:
            raise ValueError(f"bad event header {header!r}, expected {EVENT_HEADER}")
        for row in reader:
            if not row:
                continue
            t, kind, job_id, server_id = row
            events.append(
                Event(
                    int(t),
                    kind,
                    int(job_id) if job_id else None,
                    int(server_id) if server_id else None,
                )
            )
    return tuple(events)


def trace_from_events(seq: JobSequence, events: tuple[Event, ...]) -> PlacementTrace:
    """Rebuild a trace from a sequence plus its event log (for replay validation)."""
    opened_at: dict[int, int] = {}
    closed_at: dict[int, int] = {}
    released: dict[int, int] = {}
    jobs: dict[int, list[int]] = {}
    assignments: dict[int, int] = {}
    for ev in events:
        if ev.kind == "place":
            if ev.server_id not in opened_at:
                opened_at[ev.server_id] = ev.t
                jobs[ev.server_id] = []
            jobs[ev.server_id].append(ev.job_id)
            assignments[ev.job_id] = ev.server_id
        elif ev.kind == "close":
            closed_at[ev.server_id] = ev.t
        elif ev.kind == "release":
            released[ev.server_id] = ev.t
    records = tuple(
        ServerRecord(
            id=sid,
            opened_at=opened_at[sid],
            released_at=released.get(sid, opened_at[sid]),
            closed_at=closed_at.get(sid),
            jobs=tuple(jobs[sid]),
        )
        for sid in sorted(opened_at)
    )
    return PlacementTrace(
        sequence=seq, assignments=assignments, servers=records, events=events
    )
