"""Index iteration for symplectic path germs.

A germ is the data an index computation actually consumes: the initial
index i(1) of the path plus the block decomposition of its end matrix.
With S+ the splitting number at 1, C the sum of S- over the punctured
circle, and the sum running over the S- weighted angles t = theta/pi,
the m-th iterate index and the mean index are

    i(m)  = m*(i1 + S+ - C) + 2 * sum_t ceil(m*t/2) * S-(t) - (S+ + C)
    mean  = i1 + S+ - C + sum_t t * S-(t)

Every ceiling is certified, so i(m) is an exact integer even when the
angles are irrational.  The deviation of i(m) from m*mean is trapped in
[-(S+ + C), C - S+], attained at the left end and strict on the right
whenever C > 0; that bound is what turns the "for all m" conditions
below into finite checks.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Sequence, Tuple

from .exact import CertifiedReal, PrecisionInsufficient, ceil_int
from .normal_forms import (BasicBlock, N1, N2, R, big_C, mean_shift,
                           nullity_contribution, s_plus_at_one, total_dim,
                           weighted_angles)


class Unbounded(ValueError):
    """A horizon query was made for a germ whose index does not grow."""


@dataclass(frozen=True)
class IndexGerm:
    """Initial index plus end-matrix block decomposition of a path."""

    name: str
    i1: int
    blocks: Tuple[BasicBlock, ...]
    n: int = 3

    def __post_init__(self):
        if total_dim(self.blocks) != 2 * self.n - 2:
            raise ValueError(
                f"germ {self.name!r}: blocks span dimension "
                f"{total_dim(self.blocks)}, expected {2 * self.n - 2}")


@lru_cache(maxsize=None)
def _germ_data(germ: IndexGerm):
    s_plus = s_plus_at_one(germ.blocks)
    c = big_C(germ.blocks)
    angles = tuple(weighted_angles(germ.blocks))
    return s_plus, c, angles


def index_at(germ: IndexGerm, m: int) -> int:
    """Certified index of the m-th iterate."""
    if m < 1:
        raise ValueError("iterate must be positive")
    s_plus, c, angles = _germ_data(germ)
    total = m * (germ.i1 + s_plus - c) - (s_plus + c)
    for t, weight in angles:
        total += 2 * weight * ceil_int(t * Fraction(m, 2))
    return total


def nullity_at(germ: IndexGerm, m: int) -> int:
    """Certified nullity of the m-th iterate (spectral count)."""
    return sum(nullity_contribution(b, m) for b in germ.blocks)


def mean_index(germ: IndexGerm) -> CertifiedReal:
    """Average index growth per iterate.

    Exact whenever it mathematically is: block-internal conjugate angle
    pairs cancel before any interval arithmetic happens.
    """
    s_plus, c, _ = _germ_data(germ)
    total: CertifiedReal = CertifiedReal.rational(germ.i1 + s_plus - c)
    for b in germ.blocks:
        total = total + mean_shift(b)
    return total


def deviation_bounds(germ: IndexGerm) -> Tuple[int, int]:
    """(lower, upper) slack of i(m) around m*mean.

    i(m) - m*mean lies in [-lower, upper]; the upper end is strict
    whenever C > 0 and is attained exactly when C = 0.
    """
    s_plus, c, _ = _germ_data(germ)
    return s_plus + c, c - s_plus


def gamma_invariant(i1: int, i2: int) -> Fraction:
    """Parity invariant in {+-1/2, +-1} from the first two indices.

    Positive iff i1 is even; magnitude 1 iff i2 - i1 is even.
    """
    mag = Fraction(1) if (i2 - i1) % 2 == 0 else Fraction(1, 2)
    return mag if i1 % 2 == 0 else -mag


def is_bumpy(germ: IndexGerm) -> bool:
    """No iterate is degenerate: no shear block, all angles irrational."""
    for b in germ.blocks:
        if isinstance(b, N1):
            return False
        if isinstance(b, (R, N2)) and not b.t.irrational:
            return False
    return True


def _growth_horizon(germ: IndexGerm, target: int) -> int:
    """Smallest certified H with i(m) >= target for every m >= H."""
    s_plus, c, _ = _germ_data(germ)
    mean = mean_index(germ)
    if not mean.gt(0):
        raise Unbounded(f"germ {germ.name!r} has nonpositive mean index")
    # m*mean - (S+ + C) >= target suffices
    bound = (CertifiedReal.rational(target + s_plus + c)) / mean
    return max(1, ceil_int(bound))


@lru_cache(maxsize=None)
def germ_mbar(germ: IndexGerm) -> int:
    """Least m0 with i(m + m0) >= i(1) + 4 for every m >= 1.

    Finite by linear growth: beyond the certified horizon the deviation
    bound settles the condition, so only finitely many m are checked.
    """
    target = germ.i1 + 4
    horizon = _growth_horizon(germ, target)
    for m0 in range(1, horizon + 1):
        ok = all(index_at(germ, m + m0) >= target
                 for m in range(1, max(1, horizon - m0) + 1))
        if ok:
            return m0
    return horizon + 1


def mbar(germs: Sequence[IndexGerm]) -> int:
    """System-wide iteration horizon: the max of the per-germ values."""
    if not germs:
        raise ValueError("empty system")
    return max(germ_mbar(g) for g in germs)


@lru_cache(maxsize=None)
def bott_positive(germ: IndexGerm) -> bool:
    """Certified i(m) >= i(1) for all m >= 1 (finite check + growth bound).

    Requires certified positive mean growth; a germ whose index drifts
    down, or whose drift cannot be sign-certified, is reported False.
    """
    mean = mean_index(germ)
    try:
        if not mean.gt(0):
            return False
    except PrecisionInsufficient:
        return False
    horizon = _growth_horizon(germ, germ.i1)
    return all(index_at(germ, m) >= germ.i1 for m in range(1, horizon + 1))


class IndexProfile:
    """Memoized (index, nullity) table over a range of iterates.

    The inner loop avoids CertifiedReal objects: each weighted angle is
    reduced once to integer data, and the per-iterate ceiling becomes an
    integer division (pair of divisions for interval angles, certified
    to agree using the declared-irrational endpoint exclusion).
    """

    def __init__(self, germ: IndexGerm, m_max: int):
        if m_max < 1:
            raise ValueError("m_max must be positive")
        self.germ = germ
        self.m_max = m_max
        s_plus, c, angles = _germ_data(germ)
        self._slope = germ.i1 + s_plus - c
        self._shift = s_plus + c
        rational_terms: List[Tuple[int, int, int]] = []   # (weight, p, 2q)
        interval_terms: List[Tuple[int, int, int, int]] = []
        for t, w in angles:
            if t.exact:
                f = t.lo
                rational_terms.append((w, f.numerator, 2 * f.denominator))
            else:
                if not t.irrational:
                    raise ValueError("undeclared decimal angle in profile")
                lo, hi = t.lo, t.hi
                den = lo.denominator * hi.denominator
                interval_terms.append((w, lo.numerator * hi.denominator,
                                       hi.numerator * lo.denominator, 2 * den))
        self._rational_terms = rational_terms
        self._interval_terms = interval_terms
        self._table: Dict[int, Tuple[int, int]] = {}

    @staticmethod
    def _ceil_div(num: int, den: int) -> int:
        return -((-num) // den)

    def entry(self, m: int) -> Tuple[int, int]:
        if not 1 <= m <= self.m_max:
            raise ValueError(f"iterate {m} outside profile range")
        cached = self._table.get(m)
        if cached is not None:
            return cached
        total = m * self._slope - self._shift
        for w, p, q2 in self._rational_terms:
            total += 2 * w * self._ceil_div(m * p, q2)
        for w, plo, phi_, q2 in self._interval_terms:
            lo_c = self._ceil_div(m * plo, q2)
            hi_c = self._ceil_div(m * phi_, q2)
            if lo_c != hi_c:
                # endpoints may sit on the integer; irrationality excludes it
                if m * plo % q2 == 0:
                    lo_c += 1
                if lo_c != hi_c:
                    raise ArithmeticError(
                        f"interval angle too wide at iterate {m}")
            total += 2 * w * lo_c
        pair = (total, nullity_at(self.germ, m))
        self._table[m] = pair
        return pair

    def index(self, m: int) -> int:
        return self.entry(m)[0]

    def nullity(self, m: int) -> int:
        return self.entry(m)[1]

    def rows(self) -> List[Tuple[int, int, int]]:
        return [(m, *self.entry(m)) for m in range(1, self.m_max + 1)]
