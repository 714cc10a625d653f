"""Deterministic randomized corpora shared by the test modules.

Germ generators keep every angle's rational base at a safe distance
from low closing iterates (see samples.closing_iterate), so that jump
searches stay at desk scale and identity verification is about the
mathematics rather than about adversarial Diophantine landmines.
"""

from __future__ import annotations

import random
from fractions import Fraction
from math import gcd
from typing import List, Sequence, Tuple

from geoindex.exact import CertifiedReal
from geoindex.iteration import IndexGerm, mean_index
from geoindex.normal_forms import B_NEGATIVE, B_POSITIVE, B_ZERO, D, N1, N2, R
from geoindex.samples import (forced_top_system, gamma_window_system,
                              mismatch_system, mod4_system, perturbed,
                              two_odd_one_even_system)
from geoindex.anosov import GeodesicSystem

_B_CLASSES = (B_POSITIVE, B_ZERO, B_NEGATIVE)


def _rational_angle(rng: random.Random) -> CertifiedReal:
    while True:
        q = rng.randint(2, 12)
        p = rng.randint(1, 2 * q - 1)
        t = Fraction(p, q)
        if 0 < t < 2 and t != 1:
            return CertifiedReal.rational(t)


def _irrational_angle(rng: random.Random) -> CertifiedReal:
    from geoindex.samples import closing_iterate
    while True:
        q = rng.choice((7, 9, 11, 13))
        p = rng.choice([k for k in range(1, q) if k % 2 == 1])
        base = Fraction(p, q) + (1 if rng.random() < 0.3 else 0)
        # iterates almost closing up inside the verification horizon
        # poison the ceiling identities at every N; keep them far out
        if closing_iterate(base) > 12:
            break
    surd = rng.choice((2, 3, 5, 7, 11, 13))
    return perturbed(base, k=rng.randint(18, 24), surd=surd)


def _angle(rng: random.Random) -> CertifiedReal:
    return (_irrational_angle(rng) if rng.random() < 0.5
            else _rational_angle(rng))


def _lam(rng: random.Random) -> CertifiedReal:
    return CertifiedReal.rational(
        rng.choice([Fraction(2), Fraction(3), Fraction(5, 2),
                    Fraction(-2), Fraction(1, 3), Fraction(-1, 2)]))


def _block2(rng: random.Random):
    kind = rng.randrange(3)
    if kind == 0:
        return R(_angle(rng))
    if kind == 1:
        return D(_lam(rng))
    return N1(rng.choice((1, -1)), rng.choice(_B_CLASSES))


def random_germ(rng: random.Random, name: str) -> IndexGerm:
    """A dimension-4 germ with mixed block content, i1 in [-5, 10]."""
    i1 = rng.randint(-5, 10)
    if rng.random() < 0.25:
        blocks: Tuple = (N2(_angle(rng), nontrivial=rng.random() < 0.5),)
    else:
        blocks = (_block2(rng), _block2(rng))
    return IndexGerm(name, i1, blocks)


def iteration_corpus(count: int = 200, seed: int = 2024) -> List[IndexGerm]:
    rng = random.Random(seed)
    return [random_germ(rng, f"g{k}") for k in range(count)]


# -- jump-search corpus ----------------------------------------------------

def _positive_jump_germ(rng: random.Random, name: str) -> IndexGerm:
    kind = rng.randrange(4)
    if kind == 0:
        i1 = rng.randint(1, 4)
        return IndexGerm(name, i1, (D(CertifiedReal.rational(2)),
                                    D(CertifiedReal.rational(rng.choice((3, 5))))))
    if kind == 1:
        return IndexGerm(name, rng.randint(1, 4),
                         (N2(_irrational_angle(rng), nontrivial=False),))
    if kind == 2:
        # rational rotation pair, exact arithmetic end to end
        t1, t2 = _rational_angle(rng), _rational_angle(rng)
        i1 = rng.randint(3, 6)
        return IndexGerm(name, i1, (R(t1), R(t2)))
    return IndexGerm(name, rng.randint(2, 5),
                     (R(_irrational_angle(rng)),
                      D(CertifiedReal.rational(2))))


def _negative_jump_germ(rng: random.Random, name: str) -> IndexGerm:
    kind = rng.randrange(3)
    if kind == 0:
        return IndexGerm(name, rng.randint(-3, -1),
                         (D(CertifiedReal.rational(2)),
                          D(CertifiedReal.rational(3))))
    if kind == 1:
        return IndexGerm(name, rng.randint(-4, -2),
                         (N2(_irrational_angle(rng), nontrivial=False),))
    # rotations cannot rescue a very negative initial index
    t1, t2 = _rational_angle(rng), _rational_angle(rng)
    return IndexGerm(name, rng.randint(-8, -6), (R(t1), R(t2)))


def _vertex_grid_estimate(germs: Sequence[IndexGerm]) -> int:
    """lcm of the N-grids on which the vertex coordinates can hit.

    Rational coordinates with denominator below 1/eps only qualify at
    exact multiples; interval coordinates hug a nearby rational whose
    denominator rules their grid.  Keeping this lcm at desk scale is
    what makes the randomized corpus searchable within the budget.
    """
    from geoindex.jump import build_problem
    prob = build_problem(germs, Fraction(1, 64), Fraction(1, 64), 1)
    grid = 1
    for v in prob.v:
        if v.exact:
            q = v.lo.denominator
        else:
            center = (v.lo + v.hi) / 2
            q = center.limit_denominator(10_000).denominator
        grid = grid * q // gcd(grid, q)
    return grid


def jump_corpus(count: int = 100, seed: int = 77
                ) -> List[Tuple[IndexGerm, ...]]:
    """Systems with q <= 4 and both mean-index signs present."""
    rng = random.Random(seed)
    systems: List[Tuple[IndexGerm, ...]] = []
    while len(systems) < count:
        q = rng.randint(2, 4)
        n_neg = rng.randint(1, q - 1)
        germs: List[IndexGerm] = []
        for j in range(q - n_neg):
            germs.append(_positive_jump_germ(rng, f"p{j}"))
        for j in range(n_neg):
            germs.append(_negative_jump_germ(rng, f"n{j}"))
        ok = True
        for g in germs:
            mean = mean_index(g)
            try:
                if mean.sign_vs(0) == 0:
                    ok = False
            except ArithmeticError:
                ok = False
        if ok and _vertex_grid_estimate(germs) <= 500_000:
            systems.append(tuple(germs))
    return systems


# -- impossibility-pipeline corpus ----------------------------------------

def _mod4_params() -> List[Tuple[int, int]]:
    params: List[Tuple[int, int]] = []
    for P in range(16, 62, 4):
        lo, hi = (3 * P) // 2, P * P // 7
        for Q in range(lo + 1, hi):
            if Q % 2 == 1 and gcd(P, Q) == 1:
                params.append((P, Q))
                break
    return params


def anosov_corpus(count: int = 50, seed: int = 5) -> List[GeodesicSystem]:
    rng = random.Random(seed)
    systems: List[GeodesicSystem] = []
    mod4_params = _mod4_params()
    k = 0
    while len(systems) < count and k < 10 * count:
        k += 1
        family = k % 4
        try:
            if family == 0:
                P, Q = mod4_params[k % len(mod4_params)]
                systems.append(mod4_system(P, Q, seed=rng.randrange(10)))
            elif family == 1:
                q1 = rng.choice((5, 6, 7, 9))
                pair = rng.choice(((4, 11), (3, 11), (5, 13), (4, 13)))
                systems.append(gamma_window_system(q1, pair,
                                                   seed=rng.randrange(10)))
            elif family == 2:
                r = rng.choice((Fraction(3, 7), Fraction(5, 9),
                                Fraction(4, 9), Fraction(5, 11),
                                Fraction(3, 11)))
                systems.append(forced_top_system(r, seed=rng.randrange(10)))
            else:
                i2 = rng.choice((2, 4))
                i3 = rng.choice((2, 4, 6))
                systems.append(mismatch_system(i2, i3,
                                               seed=rng.randrange(10)))
        except ValueError:
            continue
    if len(systems) < count:
        raise RuntimeError("could not assemble the pipeline corpus")
    return systems


def screen_corpus(count: int = 8, seed: int = 11) -> List[GeodesicSystem]:
    rng = random.Random(seed)
    out = []
    for k in range(count):
        out.append(two_odd_one_even_system(i_odd=rng.choice((1, 3, 5)),
                                           seed=rng.randrange(10)))
    return out
