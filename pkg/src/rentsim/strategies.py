"""The seven placement strategies behind one interface.

Every strategy is a pure function of the :class:`ArrivalView` it receives:
whatever ordering or stream bookkeeping it needs lives in the per-server
tags that the engine stores and echoes back.  That keeps strategies
trivially resettable and makes it structurally impossible for them to
remember departure times.

Size thresholds (Modified Next Fit, Modified First Fit, Harmonic classes)
are compared on exact rationals; with integer sizes this reduces to
integer arithmetic, so no placement ever hinges on float rounding.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .engine import ArrivalView, Decision, ServerView

__all__ = [
    "StrategyConfig",
    "NextFit",
    "ModifiedNextFit",
    "FirstFit",
    "ModifiedFirstFit",
    "BestFit",
    "Harmonic",
    "MoveToFront",
    "parse_strategy",
    "build_strategy",
    "STRATEGY_KINDS",
]

STRATEGY_KINDS = ("nf", "mnf", "ff", "mff", "bf", "harmonic", "mtf")

# kinds whose K parameter is derived from mu when omitted (benchmark usage)
_MU_DEFAULT_OFFSET = {"mnf": 1, "mff": 7}


@dataclass(frozen=True)
class StrategyConfig:
    """Parsed strategy selection: kind, optional rational parameter K, capacity."""

    kind: str
    k: Fraction | None
    e: int

    def __post_init__(self) -> None:
        if self.kind not in STRATEGY_KINDS:
            raise ValueError(f"unknown strategy kind {self.kind!r}")
        if self.kind in ("mnf", "mff", "harmonic"):
            if self.k is None:
                raise ValueError(f"{self.kind} requires a parameter K")
            if self.kind == "mnf" and self.k < 2:
                raise ValueError(f"mnf requires K >= 2, got {self.k}")
            if self.kind == "mff" and self.k <= 0:
                raise ValueError(f"mff requires K > 0, got {self.k}")
            if self.kind == "harmonic" and (
                self.k.denominator != 1 or self.k < 1
            ):
                raise ValueError(f"harmonic requires integer K >= 1, got {self.k}")
        elif self.k is not None:
            raise ValueError(f"{self.kind} takes no parameter")

    def build(self):
        if self.kind == "nf":
            return NextFit(self.e)
        if self.kind == "mnf":
            return ModifiedNextFit(self.e, self.k)
        if self.kind == "ff":
            return FirstFit(self.e)
        if self.kind == "mff":
            return ModifiedFirstFit(self.e, self.k)
        if self.kind == "bf":
            return BestFit(self.e)
        if self.kind == "harmonic":
            return Harmonic(self.e, int(self.k))
        return MoveToFront(self.e)


def parse_strategy(text: str, e: int, mu: int | None = None) -> StrategyConfig:
    """Parse a selection string: nf, mnf:K, ff, mff:K, bf, harmonic:K, mtf.

    K is a positive rational like ``11`` or ``8.5``.  For ``mnf`` and
    ``mff`` a bare kind is allowed when ``mu`` is given: the benchmark
    convention fills in K = mu+1 and K = mu+7 respectively.
    """
    kind, sep, param = text.strip().partition(":")
    kind = kind.lower()
    if kind not in STRATEGY_KINDS:
        raise ValueError(f"unknown strategy {text!r}")
    k: Fraction | None = None
    if sep:
        try:
            k = Fraction(param)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"bad parameter in {text!r}: {exc}") from exc
    elif kind in _MU_DEFAULT_OFFSET:
        if mu is None:
            raise ValueError(f"{kind} requires a parameter, e.g. {kind}:3")
        k = Fraction(mu + _MU_DEFAULT_OFFSET[kind])
    return StrategyConfig(kind=kind, k=k, e=e)


def build_strategy(text: str, e: int, mu: int | None = None):
    return parse_strategy(text, e, mu).build()


class _Base:
    def __init__(self, e: int):
        if e < 1:
            raise ValueError(f"capacity must be >= 1, got {e}")
        self.e = e

    def reset(self) -> None:
        """No-op: these strategies keep no state outside the engine's tags."""


def _next_fit_stream(view: ArrivalView, e: int, tag) -> Decision:
    """Next Fit over the servers carrying ``tag``: at most one is ever open."""
    stream = [s for s in view.servers if s.tag == tag]
    assert len(stream) <= 1, f"next-fit stream {tag!r} has {len(stream)} open servers"
    if stream and stream[0].level + view.size <= e:
        return Decision(place_in=stream[0].id)
    return Decision(
        place_in=None,
        close=tuple(s.id for s in stream),
        tag=tag,
    )


class NextFit(_Base):
    """Keep a single open server; close it the moment an item does not fit."""

    name = "nf"

    def place(self, view: ArrivalView) -> Decision:
        return _next_fit_stream(view, self.e, None)


class ModifiedNextFit(_Base):
    """Next Fit run separately on small (< E/K) and large (>= E/K) items."""

    def __init__(self, e: int, k: Fraction):
        super().__init__(e)
        if k < 2:
            raise ValueError(f"mnf requires K >= 2, got {k}")
        self.k = Fraction(k)
        self.name = f"mnf:{self.k}"

    def place(self, view: ArrivalView) -> Decision:
        stream = "small" if view.size * self.k < self.e else "large"
        return _next_fit_stream(view, self.e, stream)


class FirstFit(_Base):
    """Place into the earliest-opened server with room; never close."""

    name = "ff"

    def place(self, view: ArrivalView) -> Decision:
        for srv in view.servers:
            if srv.level + view.size <= self.e:
                return Decision(place_in=srv.id)
        return Decision(place_in=None)


class ModifiedFirstFit(_Base):
    """First Fit run separately on small (< E/K) and large (>= E/K) items."""

    def __init__(self, e: int, k: Fraction):
        super().__init__(e)
        if k <= 0:
            raise ValueError(f"mff requires K > 0, got {k}")
        self.k = Fraction(k)
        self.name = f"mff:{self.k}"

    def place(self, view: ArrivalView) -> Decision:
        stream = "small" if view.size * self.k < self.e else "large"
        for srv in view.servers:
            if srv.tag == stream and srv.level + view.size <= self.e:
                return Decision(place_in=srv.id)
        return Decision(place_in=None, tag=stream)


class BestFit(_Base):
    """Place into the fullest server with room; ties go to the earlier-opened one."""

    name = "bf"

    def place(self, view: ArrivalView) -> Decision:
        # stable sort: view order is opening order, which settles level ties
        for srv in sorted(view.servers, key=lambda s: -s.level):
            if srv.level + view.size <= self.e:
                return Decision(place_in=srv.id)
        return Decision(place_in=None)

    def ordered_bins(self, view: ArrivalView) -> list[int]:
        return [s.id for s in sorted(view.servers, key=lambda s: -s.level)]


class Harmonic(_Base):
    """Next Fit per harmonic size class.

    Class i < K holds sizes in (E/(i+1), E/i]; class K holds sizes <= E/K.
    For integer sizes the class of s is min(K, floor(E/s)).
    """

    def __init__(self, e: int, k: int):
        super().__init__(e)
        if k < 1:
            raise ValueError(f"harmonic requires integer K >= 1, got {k}")
        self.k = int(k)
        self.name = f"harmonic:{self.k}"

    def size_class(self, size: int) -> int:
        return min(self.k, self.e // size)

    def place(self, view: ArrivalView) -> Decision:
        return _next_fit_stream(view, self.e, self.size_class(view.size))


class MoveToFront(_Base):
    """Scan the bin list front to back; the receiving bin moves to the front.

    The list order is the recency of receiving an item, kept as an integer
    tag that grows by one on every placement.  Departures never reorder
    the list; a fully departed server simply stops appearing in views.
    """

    name = "mtf"

    def place(self, view: ArrivalView) -> Decision:
        stamp = max((s.tag for s in view.servers), default=0) + 1
        for srv in self.ordered_views(view):
            if srv.level + view.size <= self.e:
                return Decision(place_in=srv.id, tag=stamp)
        return Decision(place_in=None, tag=stamp)

    @staticmethod
    def ordered_views(view: ArrivalView) -> list[ServerView]:
        return sorted(view.servers, key=lambda s: -s.tag)

    def ordered_bins(self, view: ArrivalView) -> list[int]:
        return [s.id for s in self.ordered_views(view)]
