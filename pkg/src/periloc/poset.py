"""Finite partially-ordered point systems: exact reach distances, window
maxima, the counting-formula density, and an exact sweep oracle."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import floor
from typing import Optional

from .density import LocationLaw, PiecewiseDensity, Rational, as_rat, make_step_density
from .paths import INFINITY, LocationResult

ORDER_KINDS = ("first_time", "last_time", "explicit")


@dataclass(frozen=True)
class PointSystem:
    """One period of a shift-equivariant point set with a period-consistent order.

    points: distinct rationals in [0, 1).
    order_kind: first_time (earlier dominates), last_time (later dominates),
    or explicit (injective ranks per point; periodic copies of the same point
    are mutually incomparable).
    """

    points: tuple[Fraction, ...]
    order_kind: str
    explicit_order: Optional[tuple[int, ...]] = None

    def __post_init__(self):
        pts = tuple(sorted(as_rat(p) for p in self.points))
        object.__setattr__(self, "points", pts)
        if any(not 0 <= p < 1 for p in pts):
            raise ValueError("points must lie in [0, 1)")
        if len(set(pts)) != len(pts):
            raise ValueError("points must be distinct")
        if self.order_kind not in ORDER_KINDS:
            raise ValueError(f"unknown order kind {self.order_kind!r}")
        if self.order_kind == "explicit":
            if self.explicit_order is None:
                raise ValueError("explicit order needs ranks")
            ranks = tuple(int(r) for r in self.explicit_order)
            if len(ranks) != len(pts) or len(set(ranks)) != len(ranks):
                raise ValueError("need one distinct rank per point")
            object.__setattr__(self, "explicit_order", ranks)
        elif self.explicit_order is not None:
            raise ValueError("ranks only make sense for explicit order")

    def rank(self, point: Fraction) -> int:
        return self.explicit_order[self.points.index(point)]

    def dominates_or_equal(self, r_base: Fraction, r_pos: Fraction, s_base: Fraction, s_pos: Fraction) -> bool:
        """r <= s in the order, for unrolled copies at positions r_pos, s_pos."""
        if r_pos == s_pos and r_base == s_base:
            return True
        if self.order_kind == "first_time":
            return s_pos <= r_pos
        if self.order_kind == "last_time":
            return r_pos <= s_pos
        if r_base == s_base:
            return False  # periodic copies are incomparable
        return self.rank(r_base) < self.rank(s_base)


@dataclass(frozen=True)
class Reach:
    """Largest distances one can extend from a point without meeting a
    strictly higher-ordered (or incomparable) point."""

    a: LocationResult  # leftward
    b: LocationResult  # rightward


def _unrolled(ps: PointSystem, lo: Fraction, hi: Fraction):
    """(base, position) for every periodic copy with lo <= position <= hi."""
    out = []
    for base in ps.points:
        k = floor(lo - base)
        pos = base + k
        while pos <= hi:
            if pos >= lo:
                out.append((base, pos))
            pos += 1
    out.sort(key=lambda bp: bp[1])
    return out


def reach(ps: PointSystem, s: Rational) -> Reach:
    """Scan unrolled neighbors within two periods on each side of s."""
    s = as_rat(s)
    if s not in ps.points:
        raise ValueError(f"{s} is not a point of the system")
    a: LocationResult = INFINITY
    b: LocationResult = INFINITY
    for base, pos in _unrolled(ps, s - 2, s + 2):
        if pos == s and base == s:
            continue
        if ps.dominates_or_equal(base, pos, s, s):
            continue  # r <= s: not a blocker
        if pos < s:
            a = min(a, s - pos)
        elif pos > s:
            b = min(b, pos - s)
        else:  # same position can only be the point itself
            raise AssertionError("distinct points cannot share a position")
    return Reach(a, b)


def poset_location(ps: PointSystem, a: Rational, b: Rational) -> LocationResult:
    """The unique maximal element of the system inside [a, b], or INFINITY.

    Raises on ties (the representation requires a unique maximum)."""
    a, b = as_rat(a), as_rat(b)
    if a >= b or b - a > 1:
        raise ValueError("need a < b with b - a <= 1")
    present = _unrolled(ps, a, b)
    if not present:
        return INFINITY
    maximal = [
        (rb, rp)
        for rb, rp in present
        if not any(
            (rb, rp) != (sb, sp) and ps.dominates_or_equal(rb, rp, sb, sp)
            for sb, sp in present
        )
    ]
    if len(maximal) != 1:
        raise ValueError(f"order admits {len(maximal)} maximal elements on [{a}, {b}]")
    return maximal[0][1]


# --- the counting-formula density and the exact sweep oracle ---


def _circle_union_measure(intervals: list[tuple[Fraction, Fraction]]) -> Fraction:
    """Measure of a union of arcs [lo, hi] (hi - lo <= 1) on the unit circle."""
    if not intervals:
        return Fraction(0)
    flat: list[tuple[Fraction, Fraction]] = []
    for lo, hi in intervals:
        if hi - lo >= 1:
            return Fraction(1)
        lo_m = lo % 1
        hi_m = lo_m + (hi - lo)
        if hi_m <= 1:
            flat.append((lo_m, hi_m))
        else:
            flat.append((lo_m, Fraction(1)))
            flat.append((Fraction(0), hi_m - 1))
    flat.sort()
    total = Fraction(0)
    cur_lo, cur_hi = flat[0]
    for lo, hi in flat[1:]:
        if lo > cur_hi:
            total += cur_hi - cur_lo
            cur_lo, cur_hi = lo, hi
        else:
            cur_hi = max(cur_hi, hi)
    total += cur_hi - cur_lo
    return total


def counting_density(ps: PointSystem, T: Rational) -> LocationLaw:
    """Law with density f(t) = #{s: a_s >= t and b_s >= T - t} (cadlag cells)
    and mass at infinity equal to the shift measure of empty windows."""
    T = as_rat(T)
    if not 0 < T <= 1:
        raise ValueError("need 0 < T <= 1")
    reaches = [reach(ps, s) for s in ps.points]
    cuts = {Fraction(0), T}
    for r in reaches:
        if r.a != INFINITY and 0 < r.a < T:
            cuts.add(Fraction(r.a))
        if r.b != INFINITY and 0 < T - r.b < T:
            cuts.add(T - Fraction(r.b))
    grid = sorted(cuts)
    values = []
    for lo, hi in zip(grid, grid[1:]):
        mid = (lo + hi) / 2
        values.append(
            Fraction(sum(1 for r in reaches if r.a >= mid and r.b >= T - mid))
        )
    atom_inf = 1 - _circle_union_measure([(s - T, s) for s in ps.points])
    return LocationLaw(T, make_step_density(grid, values), atomInf=atom_inf)


def sweep_oracle(ps: PointSystem, T: Rational) -> LocationLaw:
    """Exact law of poset_location over a uniform shift, by decomposing the
    shift range at the events where the window's point set changes.

    On each open event interval the winning copy is fixed, so the location
    runs affinely across a subinterval of (0, T), contributing one unit of
    density there; empty windows contribute mass at infinity.
    """
    T = as_rat(T)
    if not 0 < T <= 1:
        raise ValueError("need 0 < T <= 1")
    if not ps.points:
        return LocationLaw(T, make_step_density([0, T], [0]), atomInf=1)
    events = sorted({s % 1 for s in ps.points} | {(s - T) % 1 for s in ps.points})
    spans: list[tuple[Fraction, Fraction]] = []  # location intervals, unit weight
    atom_inf = Fraction(0)
    pairs = list(zip(events, events[1:])) + [(events[-1], events[0] + 1)]
    for e1, e2 in pairs:
        if e1 == e2:
            continue
        mid = (e1 + e2) / 2
        m = poset_location(ps, mid, mid + T)
        if m == INFINITY:
            atom_inf += e2 - e1
        else:
            # location = m - U for U in (e1, e2)
            spans.append((m - e2, m - e1))
    cuts = sorted({Fraction(0), T} | {lo for lo, _ in spans} | {hi for _, hi in spans})
    values = []
    for lo, hi in zip(cuts, cuts[1:]):
        mid = (lo + hi) / 2
        values.append(Fraction(sum(1 for s_lo, s_hi in spans if s_lo < mid < s_hi)))
    return LocationLaw(T, make_step_density(cuts, values), atomInf=atom_inf)
