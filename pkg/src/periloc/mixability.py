"""Joint-mixability machinery for decreasing densities.

A decreasing density f on (0, T) with f(0+) <= N splits into N component
distributions F_i(x) = min{(i - f(x))_+, 1} for x > 0. If the components
admit a coupling whose row sums stay below 1, the density is a mixture of
integer-valued decreasing layer profiles and is therefore realizable as a
first-hitting-time law. This module builds the components exactly, checks
three sufficient conditions with rational arithmetic, and searches for
bounded-sum couplings by iterative counter-monotone rearrangement, with a
small exhaustive oracle for validation.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

import numpy as np

from .density import (
    PiecewiseDensity,
    Rational,
    as_rat,
    generalized_inverse,
    integral,
)


def _clipped_mass(f: PiecewiseDensity, c: Fraction) -> Fraction:
    """Integral of min((f - c)_+, 1) over (0, T), exact."""
    total = Fraction(0)
    for (a, b), (p, q) in zip(zip(f.breakpoints, f.breakpoints[1:]), f.segments):
        cuts = {a, b}
        if q != 0:
            for level in (c, c + 1):
                t = (level - p) / q
                if a < t < b:
                    cuts.add(t)
        pts = sorted(cuts)
        for lo, hi in zip(pts, pts[1:]):
            v_lo, v_hi = p + q * lo, p + q * hi
            mid = (v_lo + v_hi) / 2
            if mid <= c:
                continue
            if mid >= c + 1:
                total += hi - lo
            else:
                total += ((v_lo - c) + (v_hi - c)) / 2 * (hi - lo)
    return total


@dataclass(frozen=True)
class ComponentCDF:
    """F_i(x) = min{(i - f(x))_+, 1} for x > 0: one layer of the density."""

    f: PiecewiseDensity
    i: int
    lo: Fraction  # f^{-1}(i)
    hi: Fraction  # f^{-1}(i-1): support is within [lo, hi]
    mean: Fraction

    def cdf(self, x: Rational) -> Fraction:
        x = as_rat(x)
        if x <= 0:
            return Fraction(0)
        if x >= self.f.T:
            return Fraction(1)
        return min(max(self.i - self.f.value(x), Fraction(0)), Fraction(1))

    def quantile(self, p: Rational) -> Fraction:
        """Smallest x with F_i(x) >= p, 0 < p < 1."""
        p = as_rat(p)
        if not 0 < p < 1:
            raise ValueError("p must lie in (0, 1)")
        return generalized_inverse(self.f, self.i - p)


@dataclass(frozen=True)
class MixProblem:
    """Component distributions of a decreasing density, with sum budget 1."""

    T: Fraction
    f: PiecewiseDensity
    N: int
    components: tuple[ComponentCDF, ...]

    @property
    def means(self) -> tuple[Fraction, ...]:
        return tuple(c.mean for c in self.components)

    def slack(self, n: int) -> Fraction:
        """Quantile-discretization slack: (f^{-1}(0) - f^{-1}(N)) / n."""
        if self.N == 0:
            return Fraction(0)
        return (self.components[0].hi - self.components[-1].lo) / n

    def quantile_columns(self, n: int) -> list[list[Fraction]]:
        """Midpoint quantiles (2r-1)/(2n) of each component, ascending."""
        return [
            [c.quantile(Fraction(2 * r - 1, 2 * n)) for r in range(1, n + 1)]
            for c in self.components
        ]


@dataclass(frozen=True)
class Coupling:
    """n joint realizations (rows), each with probability 1/n."""

    n: int
    matrix: tuple[tuple[Fraction, ...], ...]
    max_row_sum: Fraction

    def __post_init__(self):
        if len(self.matrix) != self.n:
            raise ValueError("matrix must have n rows")
        worst = max((sum(row) for row in self.matrix), default=Fraction(0))
        if worst != self.max_row_sum:
            raise ValueError("max_row_sum does not match the matrix")


@dataclass(frozen=True)
class Certificate:
    kind: str  # convex_corollary | linear_corollary | gap_corollary | coupling
    evidence: Union[dict, Coupling]

    def __post_init__(self):
        kinds = ("convex_corollary", "linear_corollary", "gap_corollary", "coupling")
        if self.kind not in kinds:
            raise ValueError(f"unknown certificate kind {self.kind!r}")


def component_distributions(f: PiecewiseDensity, T: Rational) -> MixProblem:
    """Split a decreasing density into its N = ceil(f(0+)) layer components.

    The means satisfy sum mu_i = integral of f exactly; each component is
    supported in [f^{-1}(i), f^{-1}(i-1)].
    """
    T = as_rat(T)
    if T != f.T:
        raise ValueError("T must match the density domain")
    if not f.is_decreasing():
        raise ValueError("component split needs a decreasing density")
    N = math.ceil(f.value(0))
    comps = []
    for i in range(1, N + 1):
        comps.append(
            ComponentCDF(
                f=f,
                i=i,
                lo=generalized_inverse(f, Fraction(i)),
                hi=generalized_inverse(f, Fraction(i - 1)),
                mean=_clipped_mass(f, Fraction(i - 1)),
            )
        )
    problem = MixProblem(T=T, f=f, N=N, components=tuple(comps))
    assert sum(problem.means, Fraction(0)) == integral(f, 0, f.T)
    return problem


def _inverses(f: PiecewiseDensity, N: int) -> list[Fraction]:
    return [generalized_inverse(f, Fraction(i)) for i in range(N + 1)]


def certify_convex(f: PiecewiseDensity, T: Rational) -> Optional[Certificate]:
    """Convex decreasing density: certified when
    sum_{i=0..N} f^{-1}(i) <= 1 + f^{-1}(1)."""
    problem = component_distributions(f, T)
    if not f.is_convex():
        return None
    inv = _inverses(f, problem.N)
    lhs = sum(inv, Fraction(0))
    rhs = 1 + (inv[1] if problem.N >= 1 else Fraction(0))
    if lhs > rhs:
        return None
    return Certificate(
        kind="convex_corollary",
        evidence={"inverses": tuple(inv), "sum": lhs, "bound": rhs},
    )


def certify_linear(f: PiecewiseDensity, T: Rational) -> Optional[Certificate]:
    """Density linear on its essential support [0, b] with f(b-) = 0:
    certified unconditionally."""
    problem = component_distributions(f, T)
    b = generalized_inverse(f, Fraction(0))
    if b == 0:
        return None
    p0, q0 = f.segments[0]
    if q0 >= 0 or p0 + q0 * b != 0:
        return None
    for (a, _), (p, q) in zip(zip(f.breakpoints, f.breakpoints[1:]), f.segments):
        if a < b and (p, q) != (p0, q0):
            return None
    return Certificate(
        kind="linear_corollary",
        evidence={"slope": q0, "support_end": b, "mass": integral(f, 0, f.T), "N": problem.N},
    )


def certify_gap(f: PiecewiseDensity, T: Rational) -> Optional[Certificate]:
    """Certified when the largest component support width does not exceed
    1 - integral of f."""
    problem = component_distributions(f, T)
    inv = _inverses(f, problem.N)
    gap = max((inv[i - 1] - inv[i] for i in range(1, problem.N + 1)), default=Fraction(0))
    budget = 1 - integral(f, 0, f.T)
    if gap > budget:
        return None
    return Certificate(kind="gap_corollary", evidence={"gap": gap, "budget": budget})


# --- coupling search ---


def _assert_reconstruction(problem: MixProblem, coupling: Coupling) -> None:
    """E[f_X(y)] must reproduce the density up to N/n at every level."""
    if problem.N == 0 or coupling.n == 0:
        return
    values = sorted({x for row in coupling.matrix for x in row})
    probes = [v / 2 for v in values[:1]] + [
        (a + b) / 2 for a, b in zip(values, values[1:])
    ]
    tol = Fraction(problem.N, coupling.n)
    for y in probes:
        if not 0 < y < problem.T:
            continue
        recon = Fraction(
            sum(1 for row in coupling.matrix for x in row if y <= x), coupling.n
        )
        assert abs(recon - problem.f.value(y)) <= tol


def _counter_monotone(values: list[Fraction], keys: list[Fraction]) -> list[Fraction]:
    """Assign the largest values to the rows with the smallest keys."""
    order = sorted(range(len(keys)), key=lambda r: (keys[r], r))
    ranked = sorted(values, reverse=True)
    out: list[Optional[Fraction]] = [None] * len(keys)
    for rank, r in enumerate(order):
        out[r] = ranked[rank]
    return out  # type: ignore[return-value]


def _make_coupling(cols: list[list[Fraction]], n: int) -> Coupling:
    rows = tuple(tuple(col[r] for col in cols) for r in range(n))
    worst = max((sum(row) for row in rows), default=Fraction(0))
    return Coupling(n=n, matrix=rows, max_row_sum=worst)


def rearrangement_coupling(
    problem: MixProblem,
    n: int,
    max_iters: int = 100,
    restarts: int = 8,
    seed: int = 0,
) -> Coupling:
    """Best coupling found by iterated counter-monotone re-sorting.

    Each sweep re-sorts one column against the row sums of the others;
    sweeps repeat until stable. Further restarts shuffle the columns with a
    counter-based generator keyed by ``seed``, so results are reproducible.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    base = problem.quantile_columns(n)
    rng = np.random.Generator(np.random.Philox(seed))
    best: Optional[Coupling] = None
    for attempt in range(max(1, restarts)):
        cols = [list(c) for c in base]
        if attempt > 0:
            for col in cols:
                rng.shuffle(col)
        sums = [sum(col[r] for col in cols) for r in range(n)] if cols else []
        for _ in range(max_iters):
            changed = False
            for col in cols:
                keys = [sums[r] - col[r] for r in range(n)]
                new = _counter_monotone(col, keys)
                if new != col:
                    changed = True
                    for r in range(n):
                        sums[r] += new[r] - col[r]
                        col[r] = new[r]
            if not changed:
                break
        cand = _make_coupling(cols, n)
        if best is None or cand.max_row_sum < best.max_row_sum:
            best = cand
    assert best is not None
    _assert_reconstruction(problem, best)
    return best


def rearrangement_search(
    problem: MixProblem,
    n: int,
    max_iters: int = 100,
    restarts: int = 8,
    seed: int = 0,
) -> Optional[Coupling]:
    """Coupling certified against budget 1 + slack(n), or None.

    A None is never a refutation: the search only provides sufficient
    evidence.
    """
    coupling = rearrangement_coupling(problem, n, max_iters, restarts, seed)
    if coupling.max_row_sum <= 1 + problem.slack(n):
        return coupling
    return None


def optimal_coupling(problem: MixProblem, n: int, N_max: int = 3) -> Coupling:
    """Exact minimal max-row-sum coupling at the n-quantile level.

    Exhausts the second column's permutations; the remaining column is
    paired counter-monotonically, which is optimal for a fixed rest.
    """
    if problem.N > N_max:
        raise ValueError(f"oracle limited to N <= {N_max}")
    if n > 8:
        raise ValueError("oracle limited to n <= 8")
    cols = problem.quantile_columns(n)
    if problem.N == 0:
        return _make_coupling([], n)
    if problem.N == 1:
        coupling = _make_coupling(cols, n)
    elif problem.N == 2:
        second = _counter_monotone(cols[1], cols[0])
        coupling = _make_coupling([cols[0], second], n)
    else:
        best: Optional[Coupling] = None
        for perm in itertools.permutations(range(n)):
            second = [cols[1][perm[r]] for r in range(n)]
            keys = [cols[0][r] + second[r] for r in range(n)]
            third = _counter_monotone(cols[2], keys)
            cand = _make_coupling([cols[0], second, third], n)
            if best is None or cand.max_row_sum < best.max_row_sum:
                best = cand
        coupling = best
    _assert_reconstruction(problem, coupling)
    return coupling


def brute_force_mix(problem: MixProblem, n: int, N_max: int = 3) -> Optional[Coupling]:
    """Optimal coupling if its worst row stays within budget 1, else None."""
    coupling = optimal_coupling(problem, n, N_max)
    if coupling.max_row_sum <= 1:
        return coupling
    return None
