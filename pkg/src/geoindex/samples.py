"""Ready-made germs and three-curve configurations.

The builders here produce germ data whose Diophantine structure keeps
jump searches at desk scale: rational vertex coordinates have moderate
denominators, irrational angles are rationals plus tiny independent
quadratic-surd offsets (so every fractional-part decision carries a
certified margin), and conjugate pairs are arranged so closeness of one
angle forces closeness of its partner.

``mod4_system`` is tuned so the impossibility pipeline passes every
intermediate stage and lands on the final arithmetic clash: the even
curves top out exactly at 2N, the signed iterate sum hits 2N - 2, and
only the scaled window is unsatisfiable.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Optional, Sequence, Tuple

from .exact import CertifiedReal, sqrt_interval
from .iteration import IndexGerm, mbar
from .normal_forms import D, N2, R
from .anosov import GeodesicSystem

_SURDS = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29)


def closing_iterate(base: Fraction) -> int:
    """First iterate m with m * base / 2 integral, for a rational base.

    An irrational angle perturbed off this base nearly closes up at that
    iterate; verification horizons must stay strictly below it, or the
    ceiling identities fail at every candidate N (tiny closeness of the
    certificate iterates cannot beat an even tinier closing gap).
    """
    half = base / 2
    return half.denominator


def _assert_horizon_safe(system: GeodesicSystem,
                         bases: Sequence[Fraction]) -> GeodesicSystem:
    horizon = mbar(system.germs)
    for base in bases:
        closing = closing_iterate(base)
        if closing <= horizon:
            raise ValueError(
                f"angle base {base} nearly closes at iterate {closing}, "
                f"inside the horizon {horizon}; pick a base with a larger "
                f"reduced denominator")
    return system


def tiny_irrational(k: int = 20, surd: int = 2, scale: int = 1,
                    digits: int = 80) -> CertifiedReal:
    """A certified positive irrational of size about scale * 10**-k."""
    return sqrt_interval(surd, digits) * Fraction(scale, 10 ** k)


def perturbed(base: Fraction, k: int = 20, surd: int = 2,
              scale: int = 1) -> CertifiedReal:
    """base + tiny positive surd offset, declared irrational."""
    return tiny_irrational(k, surd, scale) + base


def hyperbolic_germ(name: str, i1: int,
                    lams: Tuple[int, int] = (2, 3)) -> IndexGerm:
    return IndexGerm(name, i1, (D(CertifiedReal.rational(lams[0])),
                                D(CertifiedReal.rational(lams[1]))))


def elliptic_trivial_germ(name: str, i1: int,
                          angle: Optional[CertifiedReal] = None) -> IndexGerm:
    """One trivial 4x4 block: elliptic, bumpy, index m * i1."""
    t = angle if angle is not None else perturbed(Fraction(1, 2), surd=3)
    return IndexGerm(name, i1, (N2(t, nontrivial=False),))


def rotation_pair_germ(name: str, i1: int, half_sum: Fraction,
                       tau1: CertifiedReal,
                       tau2: CertifiedReal) -> IndexGerm:
    """Two rotation blocks at half_sum +- tiny, a near-conjugate pair."""
    return IndexGerm(name, i1, (R(tau1 + half_sum), R(-tau2 + half_sum)))


def rotation_hyperbolic_germ(name: str, i1: int,
                             t: CertifiedReal, lam: int = 2) -> IndexGerm:
    return IndexGerm(name, i1, (R(t), D(CertifiedReal.rational(lam))))


def nontrivial_pair_germ(name: str, i1: int, t: CertifiedReal) -> IndexGerm:
    return IndexGerm(name, i1, (N2(t, nontrivial=True),))


def mod4_system(P: int, Q: int, seed: int = 0) -> GeodesicSystem:
    """A three-curve configuration that survives to the final clash.

    P must be even, Q odd and coprime to P with Q > 3P/2 - 1 and small
    enough that the iteration horizon stays below P.  The first curve
    mixes a rotation with a hyperbolic block; its angle is tuned so the
    search lands on N = P with the signed sum at 2N - 2 and the odd top
    index at 2N + 1.
    """
    if P % 2 or P < 4:
        raise ValueError("P must be even and >= 4")
    if Q % 2 == 0 or gcd(P, Q) != 1 or 2 * Q <= 3 * P - 2:
        raise ValueError("Q must be odd, coprime to P, above 3P/2 - 1")
    if P >= 128:
        raise ValueError("P must stay below 128 so non-multiples of P are "
                         "certifiably rejected at the default tolerances")
    m1 = Q - P // 2 + 1
    s1, s2, s3 = (_SURDS[(seed + j) % len(_SURDS)] for j in range(3))
    kappa = tiny_irrational(25, s1)
    xi = CertifiedReal.rational(P) / (-kappa + m1)
    c1 = rotation_hyperbolic_germ("c1", 1, xi)
    c2 = elliptic_trivial_germ("c2", 2,
                               perturbed(Fraction(2, 5), surd=s2, k=9))
    half = Fraction(P, 2 * Q)
    c3 = rotation_pair_germ("c3", 2, half,
                            tiny_irrational(22, s2),
                            tiny_irrational(23, s3))
    system = GeodesicSystem.of(c1, c2, c3)
    return _assert_horizon_safe(system, [Fraction(P, m1), half, half])


def gamma_window_system(q1: int = 5, pair: Tuple[int, int] = (4, 11),
                        seed: int = 0) -> GeodesicSystem:
    """Mean indices tuned to the resonance sum, so the signed iterate
    sum lands one notch above the squeeze window."""
    s1, s2, s3, s4 = (_SURDS[(seed + j) % len(_SURDS)] for j in range(4))
    a, b = pair
    if not 0 < a < b:
        raise ValueError("pair must be a proper fraction a/b")
    c1 = nontrivial_pair_germ("c1", 1, perturbed(Fraction(1, q1), surd=s1))
    c2 = elliptic_trivial_germ("c2", 2,
                               perturbed(Fraction(3, 7), surd=s2, k=9))
    # two rotations with angle sum certified just below a rational 1
    c3 = IndexGerm("c3", 2, (R(perturbed(Fraction(a, b), k=20, surd=s3)),
                             R(-tiny_irrational(20, s4, scale=3)
                               + Fraction(b - a, b))))
    system = GeodesicSystem.of(c1, c2, c3)
    return _assert_horizon_safe(
        system, [Fraction(1, q1), Fraction(2 * q1 - 1, q1),
                 Fraction(a, b), Fraction(b - a, b)])


def forced_top_system(r: Fraction = Fraction(3, 7),
                      seed: int = 0) -> GeodesicSystem:
    """An even curve with odd circle count: its top index cannot be 2N."""
    s1, s2 = (_SURDS[(seed + j) % len(_SURDS)] for j in range(2))
    c1 = hyperbolic_germ("c1", 1)
    c2 = elliptic_trivial_germ("c2", 2,
                               perturbed(Fraction(5, 11), surd=s1, k=9))
    c3 = rotation_hyperbolic_germ("c3", 2, perturbed(r, surd=s2), lam=3)
    return _assert_horizon_safe(GeodesicSystem.of(c1, c2, c3), [r])


def mismatch_system(i2: int = 2, i3: int = 4, seed: int = 0) -> GeodesicSystem:
    """Mean indices miss the resonance sum badly: an early squeeze kill."""
    surd = _SURDS[seed % len(_SURDS)]
    return GeodesicSystem.of(hyperbolic_germ("c1", 1),
                             elliptic_trivial_germ(
                                 "c2", i2,
                                 perturbed(Fraction(3, 8), surd=surd, k=9)),
                             hyperbolic_germ("c3", i3, (3, 7)))


def two_odd_one_even_system(i_odd: int = 3, seed: int = 0) -> GeodesicSystem:
    """Parity pattern that dies on the degree-2N count."""
    surd = _SURDS[seed % len(_SURDS)]
    return GeodesicSystem.of(
        hyperbolic_germ("c1", 1),
        hyperbolic_germ("c2", i_odd, (2, 5)),
        elliptic_trivial_germ("c3", 2,
                              perturbed(Fraction(4, 9), surd=surd, k=9)))


def all_odd_system() -> GeodesicSystem:
    return GeodesicSystem.of(hyperbolic_germ("c1", 1),
                             hyperbolic_germ("c2", 3, (2, 5)),
                             hyperbolic_germ("c3", 5, (3, 7)))


def worked_example_B() -> IndexGerm:
    """The two-rotation regression germ with rational angles 1/3, 1/2."""
    return IndexGerm("B", 2, (R(CertifiedReal.rational(Fraction(1, 3))),
                              R(CertifiedReal.rational(Fraction(1, 2)))))


def worked_example_A() -> IndexGerm:
    return rotation_hyperbolic_germ(
        "A", 1, CertifiedReal.rational(Fraction(1, 2)))
