"""Membership checks for location laws: the variation constraint, the
extreme classes, and a desk-scale convex-hull certificate search."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import ceil, lcm
from typing import Optional, Union

from .density import (
    LocationLaw,
    PiecewiseDensity,
    Rational,
    as_rat,
    integral,
    make_step_density,
    mix_laws,
)

VERDICT_MEMBER = "member"
VERDICT_NON_MEMBER = "non-member"
VERDICT_UNKNOWN = "unknown"

_CLASS_ALIASES = {
    "ET": "ET", "E_T": "ET",
    "E1T": "E1T", "E1_T": "E1T",
    "EMT": "EMT", "EM_T": "EMT",
}


@dataclass(frozen=True)
class MembershipReport:
    verdict: str
    violated_conditions: tuple[str, ...] = ()
    witness: object = None

    def __post_init__(self):
        if self.verdict not in (VERDICT_MEMBER, VERDICT_NON_MEMBER, VERDICT_UNKNOWN):
            raise ValueError(f"unknown verdict {self.verdict!r}")
        if self.verdict == VERDICT_NON_MEMBER and self.witness is None:
            raise ValueError("non-member verdict requires a witness")
        if self.verdict == VERDICT_MEMBER and self.violated_conditions:
            raise ValueError("member verdict cannot carry violations")

    @property
    def is_member(self) -> bool:
        return self.verdict == VERDICT_MEMBER


@dataclass(frozen=True)
class HullCertificate:
    """Exact convex decomposition into extreme laws: weights > 0 summing to 1."""

    components: tuple[tuple[LocationLaw, Fraction], ...]

    def __post_init__(self):
        if not self.components:
            raise ValueError("certificate needs at least one component")
        if any(w <= 0 for _, w in self.components):
            raise ValueError("weights must be positive")
        if sum(w for _, w in self.components) != 1:
            raise ValueError("weights must sum to 1")

    def mixed(self) -> LocationLaw:
        laws = [law for law, _ in self.components]
        return mix_laws(laws, [w for _, w in self.components])


# --- variation constraint ---


def _tv_prefixes(f: PiecewiseDensity):
    """S[j]: slope variation of cells 1..j; J[j]: jumps at x_1..x_j."""
    S = [Fraction(0)]
    for (a, b), (_, q) in zip(zip(f.breakpoints, f.breakpoints[1:]), f.segments):
        S.append(S[-1] + abs(q) * (b - a))
    J = [Fraction(0)]
    for j in range(1, f.k):
        x = f.breakpoints[j]
        J.append(J[-1] + abs(f.value(x) - f.left_limit(x)))
    return S, J


def _tv_between_cells(f: PiecewiseDensity, i: int, j: int, S, J) -> Fraction:
    """TV over (x_{i-1}, x_j) open, 1 <= i <= j <= k: cells i..j plus interior jumps."""
    return (S[j] - S[i - 1]) + (J[j - 1] - J[i - 1])


def _witness_points(f: PiecewiseDensity, i: int, j: int, slack: Fraction):
    """Concrete interior (t1, t2) violating the constraint by at least slack/2.

    The violating pair found by the cell scan is a limit (t1 -> left end of
    cell i from the right, t2 -> right end of cell j from the left); moving
    inward changes the margin affinely, so a small enough step keeps it
    negative.
    """
    bp = f.breakpoints
    q1 = abs(f.segments[i - 1][1])
    q2 = abs(f.segments[j - 1][1])
    # margin grows at rate <= 2|q1| in t1 and 2|q2| in t2
    step1 = min((bp[i] - bp[i - 1]) / 2, slack / (8 * q1) if q1 else bp[i] - bp[i - 1])
    step2 = min((bp[j] - bp[j - 1]) / 2, slack / (8 * q2) if q2 else bp[j] - bp[j - 1])
    t1 = bp[i - 1] + step1
    t2 = bp[j] - step2
    if i == j and t1 >= t2:
        t1, t2 = bp[i - 1] + (bp[i] - bp[i - 1]) / 3, bp[j] - (bp[j] - bp[j - 1]) / 3
    return t1, t2


def check_tv(f: PiecewiseDensity) -> MembershipReport:
    """Does TV over (t1, t2) stay <= f(t1) + f(t2) for all 0 < t1 < t2 < T?

    Within a cell pair the margin f(t1) + f(t2) - TV(t1, t2) is affine in t1
    with slope q1 + |q1| >= 0 and affine in t2 with slope q2 - |q2| <= 0, so
    its infimum over all pairs is attained in the limit at cell left ends
    (cadlag values) and cell right ends (left limits). A running minimum over
    the left candidates makes the scan linear in the number of cells.
    """
    S, J = _tv_prefixes(f)
    bp = f.breakpoints
    best = None  # (f(x_{i-1}) + S[i-1] + J[i-1], i) running minimum
    for j in range(1, f.k + 1):
        p, q = f.segments[j - 1]
        left_val = p + q * bp[j - 1]
        cand = left_val + S[j - 1] + J[j - 1]
        if best is None or cand < best[0]:
            best = (cand, j)
        right_val = p + q * bp[j]  # f(x_j-)
        margin = best[0] + right_val - (S[j] + J[j - 1])
        if margin < 0:
            t1, t2 = _witness_points(f, best[1], j, -margin)
            return MembershipReport(
                VERDICT_NON_MEMBER, ("variation-bound",), (t1, t2)
            )
    return MembershipReport(VERDICT_MEMBER)


def check_tv_prime(f: PiecewiseDensity) -> MembershipReport:
    """Boundary form of the variation constraint: some sequence t_n down to 0
    with TV over (t_n, T - t_n) <= f(t_n) + f(T - t_n).

    For piecewise-affine f the margin is affine in t near 0 with slope
    (q_first + |q_first|) + (|q_last| - q_last) >= 0, so the condition holds
    iff it holds in the limit t -> 0+.
    """
    S, J = _tv_prefixes(f)
    tv_full = _tv_between_cells(f, 1, f.k, S, J)
    margin = f.value(0) + f.left_limit(f.T) - tv_full
    if margin < 0:
        # any small enough t violates; pick one inside the first/last cells
        t_max = min(f.breakpoints[1], f.T - f.breakpoints[-2], f.T / 2)
        q1 = abs(f.segments[0][1])
        qk = abs(f.segments[-1][1])
        rate = 2 * (q1 + qk)
        t = min(t_max / 2, (-margin) / (2 * rate) if rate else t_max / 2)
        return MembershipReport(
            VERDICT_NON_MEMBER, ("variation-bound-boundary",), (t, f.T - t)
        )
    return MembershipReport(VERDICT_MEMBER)


# --- extreme classes ---


def _has_truncation(law: LocationLaw) -> bool:
    """Is all mass confined to [0, t] or [t, T] for some interior t?"""
    if law.atomInf > 0:
        return False
    f, T = law.density, law.T
    if law.atomT == 0:
        # mass in [0, t]: f must vanish on some (t, T)
        p, q = f.segments[-1]
        if p + q * f.breakpoints[-2] == 0 and q == 0:
            return True
    if law.atom0 == 0:
        p, q = f.segments[0]
        if p == 0 and q == 0:
            return True
    return False


def _min_value(f: PiecewiseDensity) -> Fraction:
    return min(
        min(p + q * a, p + q * b)
        for (a, b), (p, q) in zip(zip(f.breakpoints, f.breakpoints[1:]), f.segments)
    )


def _minus_one(f: PiecewiseDensity) -> PiecewiseDensity:
    return PiecewiseDensity(f.breakpoints, tuple((p - 1, q) for p, q in f.segments))


def check_class(law: LocationLaw, cls: str) -> MembershipReport:
    """Membership in one of the extreme classes.

    ET: integer cadlag step density satisfying the variation constraint; if
    mass reaches [0, T] and is not confined to a one-sided subinterval, the
    density stays >= 1, and with mass at infinity the density minus 1 also
    satisfies the variation constraint.
    E1T: ET with no mass at infinity and density >= 1 (positive integers).
    EMT: ET with decreasing density and no atom at T.
    """
    try:
        cls = _CLASS_ALIASES[cls.upper().replace("-", "_")]
    except KeyError:
        raise ValueError(f"unknown class {cls!r}") from None
    f = law.density
    violated: list[str] = []
    witness = None

    if not f.is_integer_step():
        violated.append("integer-values")
        witness = witness or "density takes non-integer values"
    tv = check_tv(f)
    if not tv.is_member:
        violated.append("variation-bound")
        witness = witness or tv.witness

    mass_on_interval = 1 - law.atomInf
    needs_lower_bound = mass_on_interval > 0 and not _has_truncation(law)
    if needs_lower_bound and _min_value(f) < 1:
        violated.append("lower-bound")
        witness = witness or "density drops below 1 without truncation"
    if needs_lower_bound and law.atomInf > 0 and _min_value(f) >= 1:
        tv1 = check_tv(_minus_one(f))
        if not tv1.is_member:
            violated.append("variation-bound-minus-one")
            witness = witness or tv1.witness

    if cls in ("E1T",):
        if law.atomInf != 0:
            violated.append("infinity-mass")
            witness = witness or f"atomInf={law.atomInf} != 0"
        if _min_value(f) < 1:
            if "lower-bound" not in violated:
                violated.append("lower-bound")
            witness = witness or "density drops below 1"
    if cls == "EMT":
        if not f.is_decreasing():
            violated.append("not-decreasing")
            witness = witness or "density increases somewhere"
        if law.atomT != 0:
            violated.append("atom-at-T")
            witness = witness or f"atomT={law.atomT} != 0"

    if violated:
        return MembershipReport(VERDICT_NON_MEMBER, tuple(violated), witness)
    return MembershipReport(VERDICT_MEMBER)


# --- convex hull of the extreme set ---


def _candidate_atom_triples(leftover: Fraction, D: int):
    """All (a0, aT, aInf) on the lattice 1/D with sum == leftover."""
    m = leftover * D
    if m.denominator != 1 or m < 0:
        return
    m = int(m)
    for i in range(m + 1):
        for j in range(m - i + 1):
            yield Fraction(i, D), Fraction(j, D), Fraction(m - i - j, D)


def _forced_envelope_witness(law: LocationLaw) -> Optional[MembershipReport]:
    """Non-membership by the monotone-envelope argument.

    When the density vanishes on a boundary-touching subinterval and the
    matching atoms are zero, every extreme component of a hypothetical
    mixture must vanish there too; the variation constraint then forces each
    component to be monotone toward the vanishing side. At any cell with
    non-integer density value some component must reach the ceiling value on
    the whole stretch from the boundary, and if that forced component alone
    carries mass > 1 the mixture cannot exist.
    """
    f, T = law.density, law.T
    vals = [p for p, _ in f.segments]
    if not f.is_step():
        return None
    for side in ("right", "left"):
        if side == "right":
            if law.atomT != 0 or law.atomInf != 0 or vals[-1] != 0:
                continue
        else:
            if law.atom0 != 0 or law.atomInf != 0 or vals[0] != 0:
                continue
        for j, v in enumerate(vals):
            if v.denominator == 1:
                continue
            forced = Fraction(ceil(v))
            if side == "right":
                # component >= ceil(v) on (0, x_{j+1}]
                mass = forced * f.breakpoints[j + 1]
                seg = (0, f.breakpoints[j + 1])
            else:
                mass = forced * (T - f.breakpoints[j])
                seg = (f.breakpoints[j], T)
            if mass > 1:
                witness = {
                    "forced_value": forced,
                    "interval": seg,
                    "integral": mass,
                }
                return MembershipReport(
                    VERDICT_NON_MEMBER, ("forced-component-mass",), witness
                )
    return None


def _phase1_simplex(A: list[list[Fraction]], b: list[Fraction]):
    """Solve Ax = b, x >= 0 exactly; returns x or None. Bland's rule."""
    m, n = len(A), len(A[0]) if A else 0
    # make b nonnegative
    rows = [list(row) for row in A]
    rhs = list(b)
    for i in range(m):
        if rhs[i] < 0:
            rows[i] = [-v for v in rows[i]]
            rhs[i] = -rhs[i]
    # tableau with artificial variables; minimize their sum
    tab = [rows[i] + [Fraction(1) if k == i else Fraction(0) for k in range(m)] + [rhs[i]] for i in range(m)]
    basis = [n + i for i in range(m)]
    cost = [Fraction(0)] * (n + m + 1)
    for i in range(m):  # reduced costs for objective sum of artificials
        for k in range(n + m + 1):
            cost[k] -= tab[i][k]
    for k in range(n, n + m):
        cost[k] += 1
    while True:
        enter = next((k for k in range(n + m) if cost[k] < 0), None)
        if enter is None:
            break
        best = None
        for i in range(m):
            if tab[i][enter] > 0:
                ratio = tab[i][-1] / tab[i][enter]
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            return None  # unbounded: cannot happen for phase 1
        _, piv = best
        pv = tab[piv][enter]
        tab[piv] = [v / pv for v in tab[piv]]
        for i in range(m):
            if i != piv and tab[i][enter] != 0:
                factor = tab[i][enter]
                tab[i] = [v - factor * w for v, w in zip(tab[i], tab[piv])]
        if cost[enter] != 0:
            factor = cost[enter]
            cost = [v - factor * w for v, w in zip(cost, tab[piv])]
        basis[piv] = enter
    if -cost[-1] != 0:  # optimum of phase 1 (value stored negated in the corner)
        return None
    x = [Fraction(0)] * n
    for i, var in enumerate(basis):
        if var < n:
            x[var] = tab[i][-1]
        elif tab[i][-1] != 0:
            return None  # artificial stuck at positive value
    return x


def hull_membership_lp(
    law: LocationLaw,
    max_level: Optional[int] = None,
    cap: int = 200_000,
) -> Union[HullCertificate, MembershipReport]:
    """Search for an exact convex decomposition into extreme laws.

    Candidates are integer step densities on the input's breakpoints with
    values up to max_level (default: ceil(sup f) + 1) and atoms on the
    rational lattice generated by the input's atoms and cell masses, each
    filtered through check_class(ET). Feasibility of the exact equality LP
    yields a certificate; infeasibility yields non-member only when the
    forced-envelope argument applies, otherwise unknown.
    """
    f = law.density
    if not f.is_step():
        raise ValueError("hull test supports step densities only")
    direct = check_class(law, "ET")
    if direct.is_member:
        return HullCertificate(((law, Fraction(1)),))
    if max_level is None:
        max_level = ceil(f.sup()) + 1

    lens = [b - a for a, b in zip(f.breakpoints, f.breakpoints[1:])]
    D = lcm(
        law.atom0.denominator,
        law.atomT.denominator,
        law.atomInf.denominator,
        *[l.denominator for l in lens],
    )
    candidates: list[LocationLaw] = []
    overflow = False
    for values in product(range(max_level + 1), repeat=f.k):
        interior = sum(v * l for v, l in zip(values, lens))
        if interior > 1:
            continue
        for a0, aT, aInf in _candidate_atom_triples(1 - interior, D):
            if len(candidates) >= cap:
                overflow = True
                break
            cand = LocationLaw(
                law.T,
                make_step_density(f.breakpoints, [Fraction(v) for v in values]),
                a0,
                aT,
                aInf,
            )
            if check_class(cand, "ET").is_member:
                candidates.append(cand)
        if overflow:
            break
    if overflow:
        return MembershipReport(
            VERDICT_UNKNOWN,
            ("enumeration-capped",),
            f"candidate cap {cap} reached",
        )

    if candidates:
        # equality constraints: each cell value, each atom, total weight
        A: list[list[Fraction]] = []
        b: list[Fraction] = []
        for j in range(f.k):
            A.append([c.density.segments[j][0] for c in candidates])
            b.append(f.segments[j][0])
        for attr in ("atom0", "atomT", "atomInf"):
            A.append([getattr(c, attr) for c in candidates])
            b.append(getattr(law, attr))
        A.append([Fraction(1)] * len(candidates))
        b.append(Fraction(1))
        x = _phase1_simplex(A, b)
        if x is not None:
            components = tuple(
                (c, w) for c, w in zip(candidates, x) if w > 0
            )
            cert = HullCertificate(components)
            assert cert.mixed() == law or _laws_equal(cert.mixed(), law)
            return cert

    forced = _forced_envelope_witness(law)
    if forced is not None:
        return forced
    return MembershipReport(
        VERDICT_UNKNOWN,
        ("no-certificate-in-family",),
        "no decomposition over breakpoint-restricted extreme candidates",
    )


def _laws_equal(a: LocationLaw, b: LocationLaw) -> bool:
    if (a.T, a.atom0, a.atomT, a.atomInf) != (b.T, b.atom0, b.atomT, b.atomInf):
        return False
    grid = sorted(set(a.density.breakpoints) | set(b.density.breakpoints))
    for lo, hi in zip(grid, grid[1:]):
        mid = (lo + hi) / 2
        if a.density.value(mid) != b.density.value(mid):
            return False
        if a.density.value(lo) != b.density.value(lo) and lo > 0:
            return False
    return True
