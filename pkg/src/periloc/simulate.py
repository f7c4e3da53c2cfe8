"""Sweep and Monte Carlo estimation of location laws, plus law comparison.

The sweep evaluates a locator at shifts u_i and classifies each result as an
atom (0, T, infinity) or an interior sample. For the built-in locators the
evaluation is vectorized over numpy float arrays; the classification into
atoms is decided by the window logic (which endpoint or hit wins), not by
floating-point equality against 0 or T, so grid-aligned inputs classify
exactly. Arbitrary callables fall back to exact rational evaluation per
shift.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Union

import numpy as np

from .density import LocationLaw, Rational, as_rat, integral
from .paths import (
    INFINITY,
    PiecewiseLinearPath,
    composite_location,
    first_hit,
    last_hit,
    sup_location,
    truncated_sup_location,
)

_CODE_INTERIOR = 0
_CODE_ZERO = 1
_CODE_T = 2
_CODE_INF = 3


@dataclass(frozen=True)
class EmpiricalLaw:
    """Sampled law: atom counts at 0, T, infinity plus sorted interior samples."""

    T: float
    n: int
    count0: int
    countT: int
    countInf: int
    interior: np.ndarray  # sorted, in (0, T)

    def __post_init__(self):
        if self.count0 + self.countT + self.countInf + len(self.interior) != self.n:
            raise ValueError("counts do not add up to the sample size")

    @property
    def freq0(self) -> float:
        return self.count0 / self.n

    @property
    def freqT(self) -> float:
        return self.countT / self.n

    @property
    def freqInf(self) -> float:
        return self.countInf / self.n

    def ecdf(self, grid: np.ndarray) -> np.ndarray:
        """P(sample <= t) among finite samples, per grid point."""
        below = np.searchsorted(self.interior, grid, side="right")
        out = (self.count0 + below) / self.n
        out = np.where(grid >= self.T, out + self.countT / self.n, out)
        return out


@dataclass(frozen=True)
class ComparisonReport:
    ks: float
    atom_errors: dict
    tol_ks: float
    tol_atom: float

    @property
    def passed(self) -> bool:
        return self.ks <= self.tol_ks and all(
            e <= self.tol_atom for e in self.atom_errors.values()
        )


# --- node tables and vectorized locator cores ---


def _float_tables(g: PiecewiseLinearPath):
    """Two periods of node positions/values as float arrays covering [0, 2]."""
    t = np.array([float(x) for x, _ in g.nodes])
    y = np.array([float(v) for _, v in g.nodes])
    tt = np.concatenate([t[:-1], t[:-1] + 1.0, [2.0]])
    yy = np.concatenate([y[:-1], y[:-1], [y[0]]])
    return tt, yy


def _sweep_sup(g, u: np.ndarray, T: float, truncated: bool):
    tt, yy = _float_tables(g)
    n = len(u)
    best = np.full(n, -np.inf)
    bestpos = np.zeros(n)
    for j in range(len(tt)):
        # windows with tt[j] strictly interior: u in (tt[j] - T, tt[j])
        lo = np.searchsorted(u, tt[j] - T, side="right")
        hi = np.searchsorted(u, tt[j], side="left")
        if lo >= hi:
            continue
        seg_best = best[lo:hi]
        seg_pos = bestpos[lo:hi]
        upd = yy[j] > seg_best
        seg_best[upd] = yy[j]
        seg_pos[upd] = tt[j]
    g_left = np.interp(u, tt, yy)
    g_right = np.interp(u + T, tt, yy)
    codes = np.full(n, _CODE_INTERIOR, dtype=np.int8)
    values = bestpos - u
    left_wins = g_left >= np.maximum(best, g_right)
    right_wins = ~left_wins & (g_right > best)
    codes[left_wins] = _CODE_ZERO
    codes[right_wins] = _CODE_T
    if truncated:
        sup = np.maximum(best, np.maximum(g_left, g_right))
        codes[sup < 0.5] = _CODE_INF
    return codes, values


def _hit_intervals(g: PiecewiseLinearPath, level: Fraction):
    """Merged intervals {t in [0, 2]: g(t) == level} (points as zero-width)."""
    raw: list[tuple[Fraction, Fraction]] = []
    for k in (0, 1):
        for (t0, y0), (t1, y1) in zip(g.nodes, g.nodes[1:]):
            a, b = t0 + k, t1 + k
            if y0 == level and y1 == level:
                raw.append((a, b))
            elif y0 == level:
                raw.append((a, a))
            elif y1 == level:
                raw.append((b, b))
            elif (y0 - level) * (y1 - level) < 0:
                t = a + (level - y0) * (b - a) / (y1 - y0)
                raw.append((t, t))
    raw.sort()
    merged: list[list[Fraction]] = []
    for lo, hi in raw:
        if merged and lo <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    HL = np.array([float(lo) for lo, _ in merged])
    HH = np.array([float(hi) for _, hi in merged])
    return HL, HH


def _sweep_first_hit(g, u: np.ndarray, T: float, level: Fraction):
    HL, HH = _hit_intervals(g, level)
    n = len(u)
    codes = np.full(n, _CODE_INF, dtype=np.int8)
    values = np.zeros(n)
    if len(HL) == 0:
        return codes, values
    idx = np.searchsorted(HH, u, side="left")  # first interval ending at/after u
    valid = idx < len(HL)
    idx_c = np.minimum(idx, len(HL) - 1)
    inside = valid & (HL[idx_c] <= u)
    starts = HL[idx_c] - u
    reachable = valid & ~inside & (HL[idx_c] <= u + T)
    codes[inside] = _CODE_ZERO
    codes[reachable] = _CODE_INTERIOR
    values[reachable] = starts[reachable]
    return codes, values


def _sweep_last_hit(g, u: np.ndarray, T: float, level: Fraction):
    HL, HH = _hit_intervals(g, level)
    n = len(u)
    codes = np.full(n, _CODE_INF, dtype=np.int8)
    values = np.zeros(n)
    if len(HL) == 0:
        return codes, values
    ub = u + T
    idx = np.searchsorted(HL, ub, side="right") - 1  # last interval starting by u+T
    valid = idx >= 0
    idx_c = np.maximum(idx, 0)
    inside = valid & (HH[idx_c] >= ub)
    ends = HH[idx_c] - u
    reachable = valid & ~inside & (HH[idx_c] >= u)
    codes[inside] = _CODE_T
    codes[reachable] = _CODE_INTERIOR
    values[reachable] = ends[reachable]
    return codes, values


def _descriptor(locator) -> Optional[tuple]:
    if isinstance(locator, str):
        from .paths import locator_by_name

        locator = locator_by_name(locator)
    if locator is sup_location:
        return ("sup",)
    if locator is truncated_sup_location:
        return ("truncated-sup",)
    if locator is composite_location:
        return ("composite",)
    desc = getattr(locator, "_descriptor", None)
    if desc is not None:
        return desc
    return None


def _run_engine(g: PiecewiseLinearPath, desc: tuple, u: np.ndarray, T: float):
    if desc[0] == "composite":
        lo, hi = g.min_value(), g.max_value()
        if lo >= 0:
            desc = ("sup",)
        elif lo <= -1 <= hi:
            desc = ("first-hit", Fraction(-1))
        else:
            desc = ("last-hit", Fraction(-2))
    if desc[0] == "sup":
        return _sweep_sup(g, u, T, truncated=False)
    if desc[0] == "truncated-sup":
        return _sweep_sup(g, u, T, truncated=True)
    if desc[0] == "first-hit":
        return _sweep_first_hit(g, u, T, desc[1])
    if desc[0] == "last-hit":
        return _sweep_last_hit(g, u, T, desc[1])
    raise ValueError(f"no engine for {desc!r}")


def _collect(T_rat: Fraction, codes: np.ndarray, values: np.ndarray) -> EmpiricalLaw:
    interior = np.sort(values[codes == _CODE_INTERIOR])
    return EmpiricalLaw(
        T=float(T_rat),
        n=len(codes),
        count0=int(np.sum(codes == _CODE_ZERO)),
        countT=int(np.sum(codes == _CODE_T)),
        countInf=int(np.sum(codes == _CODE_INF)),
        interior=interior,
    )


def _generic_eval(g, locator: Callable, T: Fraction, shifts) -> EmpiricalLaw:
    codes = []
    values = []
    for u in shifts:
        out = locator(g, u, u + T)
        if out == INFINITY:
            codes.append(_CODE_INF)
            values.append(0.0)
            continue
        lam = out - u
        if lam == 0:
            codes.append(_CODE_ZERO)
            values.append(0.0)
        elif lam == T:
            codes.append(_CODE_T)
            values.append(0.0)
        else:
            codes.append(_CODE_INTERIOR)
            values.append(float(lam))
    return _collect(T, np.array(codes, dtype=np.int8), np.array(values))


def sweep_law(
    g: PiecewiseLinearPath,
    locator: Union[str, Callable],
    T: Rational,
    grid_n: int,
) -> EmpiricalLaw:
    """Law of locator(g(. + u), [0, T]) over the midpoint grid u = (i+1/2)/n.

    Deterministic and reproducible bit-exactly for a fixed (path, locator,
    grid) triple. Midpoints keep every shift away from the breakpoints of the
    shift-to-location map, so no sample sits on a classification boundary.
    """
    T_rat = as_rat(T)
    if grid_n < 1:
        raise ValueError("grid_n must be >= 1")
    desc = _descriptor(locator)
    if desc is None:
        shifts = [Fraction(2 * i + 1, 2 * grid_n) for i in range(grid_n)]
        return _generic_eval(g, locator, T_rat, shifts)
    u = (np.arange(grid_n) + 0.5) / grid_n
    codes, values = _run_engine(g, desc, u, float(T_rat))
    return _collect(T_rat, codes, values)


def mc_law(
    g: PiecewiseLinearPath,
    locator: Union[str, Callable],
    T: Rational,
    n: int,
    seed: int,
) -> EmpiricalLaw:
    """Monte Carlo law estimate with i.i.d. uniform shifts.

    The generator is numpy's counter-based Philox keyed by the 64-bit seed,
    so (seed, n) fully determine the output and parallel/serial evaluation
    orders agree.
    """
    T_rat = as_rat(T)
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.Generator(np.random.Philox(seed))
    u = np.sort(rng.random(n))
    desc = _descriptor(locator)
    if desc is None:
        shifts = [Fraction(x).limit_denominator(10**12) for x in u]
        return _generic_eval(g, locator, T_rat, shifts)
    codes, values = _run_engine(g, desc, u, float(T_rat))
    return _collect(T_rat, codes, values)


# --- comparison against a target law ---


def _interior_cdf_table(law: LocationLaw):
    """Float evaluator data for t -> integral of the density over (0, t]."""
    bp = [float(x) for x in law.density.breakpoints]
    cum = [0.0]
    acc = Fraction(0)
    for j in range(law.density.k):
        acc += integral(law.density, law.density.breakpoints[j], law.density.breakpoints[j + 1])
        cum.append(float(acc))
    return np.array(bp), np.array(cum), [(float(p), float(q)) for p, q in law.density.segments]


def interior_cdf(law: LocationLaw, x: np.ndarray) -> np.ndarray:
    """Integral of the density over (0, x], vectorized over float x."""
    bp, cum, segs = _interior_cdf_table(law)
    x = np.clip(x, bp[0], bp[-1])
    j = np.clip(np.searchsorted(bp, x, side="right") - 1, 0, len(segs) - 1)
    p = np.array([s[0] for s in segs])[j]
    q = np.array([s[1] for s in segs])[j]
    a = bp[j]
    return cum[j] + p * (x - a) + q * (x * x - a * a) / 2


def compare(
    target: LocationLaw,
    emp: EmpiricalLaw,
    tol_ks: float = 1e-3,
    tol_atom: float = 2e-5,
) -> ComparisonReport:
    """KS distance on the renormalized interior part plus per-atom errors."""
    if abs(float(target.T) - emp.T) > 1e-12:
        raise ValueError("laws have different T")
    atom_errors = {
        "zero": abs(emp.freq0 - float(target.atom0)),
        "T": abs(emp.freqT - float(target.atomT)),
        "inf": abs(emp.freqInf - float(target.atomInf)),
    }
    mass = float(target.interior_mass())
    m = len(emp.interior)
    if m == 0 or mass == 0.0:
        ks = 0.0 if (m == 0) == (mass == 0.0) else 1.0
    else:
        G = interior_cdf(target, emp.interior) / mass
        i = np.arange(1, m + 1)
        ks = float(np.max(np.maximum(i / m - G, G - (i - 1) / m)))
    return ComparisonReport(ks=ks, atom_errors=atom_errors, tol_ks=tol_ks, tol_atom=tol_atom)
