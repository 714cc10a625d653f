"""Jump problems: construction, search, verification, scaling."""

from fractions import Fraction

import pytest

from geoindex.exact import CertifiedReal
from geoindex.iteration import IndexGerm, germ_mbar, index_at, mean_index
from geoindex.jump import (NotFound, ZeroMeanIndex, build_problem,
                           delta_invariance, scale, search, verify_jump,
                           verify_rounding)
from geoindex.normal_forms import D, N1, R
from geoindex.samples import worked_example_B

from .corpus import jump_corpus

CR = CertifiedReal
DELTA = Fraction(1, 100)

B = worked_example_B()
H = IndexGerm("H", 1, (D(CR.rational(2)), D(CR.rational(3))))
HN = IndexGerm("Hn", -1, (D(CR.rational(2)), D(CR.rational(3))))


def test_build_problem_hyperbolic():
    prob = build_problem([H], DELTA, DELTA, 1)
    assert prob.M == 1
    assert prob.curves[0].beta == 1
    assert prob.curves[0].alphas == ()
    assert [v.lo for v in prob.v] == [1]


def test_build_problem_worked_example():
    prob = build_problem([B], DELTA, DELTA, 1)
    c = prob.curves[0]
    assert c.beta == 0
    assert sorted(a.lo for a in c.alphas) == [Fraction(1, 3), Fraction(1, 2)]
    assert c.mean.lo == Fraction(5, 6)
    assert prob.M == 6
    assert [v.lo for v in prob.v] == [Fraction(1, 5), Fraction(2, 5),
                                      Fraction(3, 5)]


def test_build_problem_negative_mean():
    prob = build_problem([HN], DELTA, DELTA, 1)
    assert prob.curves[0].rho == -1
    assert prob.curves[0].mean.lo == -1


def test_build_problem_rejects_zero_mean():
    z = IndexGerm("z", 1, (R(CR.rational(Fraction(1, 2))),
                           R(CR.rational(Fraction(1, 2)))))
    assert mean_index(z).lo == 0
    with pytest.raises(ZeroMeanIndex):
        build_problem([z], DELTA, DELTA, 1)


def test_smallness_hypothesis_enforced():
    with pytest.raises(ValueError):
        build_problem([B], Fraction(1, 3), Fraction(1, 100), 1)


def test_default_epsilon_tie():
    # eps defaults to delta / (2 * max(M|mean|, 1)): strong enough that
    # vertex closeness carries the angle-closeness clause
    prob = build_problem([B], DELTA, None, 1)
    assert prob.epsilon == DELTA / (2 * 5)  # M|mean| = 6 * 5/6 = 5
    cert = search(prob, 1, 100, m_bar=6)
    assert cert.N == 5 and verify_rounding(prob, cert).ok


def test_search_worked_example():
    prob = build_problem([B], DELTA, DELTA, 1)
    cert = search(prob, 1, 100, m_bar=germ_mbar(B))
    assert (cert.N, cert.m, cert.Delta, cert.chi) == (5, (6,), (0,),
                                                      (0, 0, 0))
    assert verify_rounding(prob, cert).ok
    assert verify_jump(prob, cert, 6).ok


def test_hyperbolic_certificates_everywhere():
    prob = build_problem([H], DELTA, DELTA, 1)
    m_bar = germ_mbar(H)
    from geoindex.jump import _candidate
    for n in range(3, 40):
        cert = _candidate(prob, n, m_bar)
        assert cert is not None and cert.m == (n,) and cert.Delta == (0,)


def test_negative_mean_identities():
    prob = build_problem([HN], DELTA, DELTA, 1)
    cert = search(prob, 5, 50, m_bar=6)
    assert cert.m == (cert.N,)
    assert verify_jump(prob, cert, 6).ok
    assert index_at(HN, 2 * cert.N + 3) == -2 * cert.N + index_at(HN, 3)


def test_search_respects_m0():
    prob = build_problem([H], DELTA, DELTA, 7)
    cert = search(prob, 2, 100, m_bar=4)
    assert cert.N % 7 == 0


def test_search_not_found():
    prob = build_problem([B], DELTA, DELTA, 1)
    with pytest.raises(NotFound):
        search(prob, 1, 4, m_bar=6)


def test_search_determinism_and_monotonicity():
    prob = build_problem([B], DELTA, DELTA, 1)
    small = search(prob, 1, 30, m_bar=6)
    large = search(prob, 1, 3000, m_bar=6)
    assert small.N == large.N == 5


def test_search_worker_partition_agrees():
    prob = build_problem([B], DELTA, DELTA, 1)
    serial = search(prob, 1, 400, m_bar=6)
    parallel = search(prob, 1, 400, m_bar=6, workers=2)
    assert serial == parallel


def test_worked_example_identity_values():
    prob = build_problem([B], DELTA, DELTA, 1)
    cert = search(prob, 1, 100, m_bar=6)
    n, m1 = cert.N, cert.m[0]
    # rounding identity: 6*0 + ceil(2) + ceil(3) = 5
    assert m1 * 0 + 2 + 3 == n
    # shifted and reflected identities at m = 1
    assert index_at(B, 2 * m1 + 1) == 2 * n + index_at(B, 1) == 12
    assert index_at(B, 2 * m1 - 1) == 2 * n - index_at(B, 1) == 8
    assert index_at(B, 2 * m1) == 2 * n - (0 + 2 - 2 * cert.Delta[0]) == 8


def test_reflected_identity_uses_closed_iterates():
    # at m = 6 the first angle closes up: the reflected identity gains
    # a correction of one from the closed rational spectrum point
    prob = build_problem([B], DELTA, DELTA, 1)
    cert = search(prob, 1, 100, m_bar=6)
    n, m1 = cert.N, cert.m[0]
    assert index_at(B, 2 * m1 - 6) == 2 * n - index_at(B, 6) - 2


def test_scale_worked_example():
    prob = build_problem([B], DELTA, DELTA, 1)
    cert = search(prob, 1, 100, m_bar=6)
    sc = scale(prob, cert, 2, m_bar=6)
    assert sc.N_hat == 10 and sc.m_hat == (12,)
    assert sc.chi_hat == cert.chi and sc.Delta_hat == cert.Delta
    assert index_at(B, 24) == 2 * 2 * cert.N - (0 + 2 - 2 * sc.Delta_hat[0])
    assert all(ok for _, ok in sc.checks)


def test_scale_identity_trivial_at_one():
    prob = build_problem([B], DELTA, DELTA, 1)
    cert = search(prob, 1, 100, m_bar=6)
    sc = scale(prob, cert, 1, m_bar=6)
    assert sc.N_hat == cert.N and sc.m_hat == cert.m
    assert sc.chi_hat == cert.chi and sc.Delta_hat == cert.Delta


def test_scale_rejects_oversized_tolerance():
    prob = build_problem([B], Fraction(1, 5), Fraction(1, 100), 1)
    cert = search(prob, 1, 100, m_bar=6)
    with pytest.raises(ValueError):
        scale(prob, cert, 2, m_bar=6)


def test_delta_invariance():
    prob = build_problem([B], DELTA, DELTA, 1)
    cert = search(prob, 1, 100, m_bar=6)
    assert delta_invariance(prob, cert, Fraction(1, 100), Fraction(1, 1000))
    hp = build_problem([H], DELTA, DELTA, 1)
    hc = search(hp, 3, 50, m_bar=4)
    assert delta_invariance(hp, hc, Fraction(1, 10), Fraction(1, 64))
    with pytest.raises(ValueError):
        delta_invariance(prob, cert, Fraction(2, 5), Fraction(1, 64))


def test_vertex_closeness_of_certificates():
    from geoindex.exact import frac_part
    for germs in jump_corpus(10, seed=15):
        prob = build_problem(germs, Fraction(1, 64), Fraction(1, 64), 1)
        cert = search(prob, 1, 10_000_000, m_bar=6)
        for j, vj in enumerate(prob.v):
            f = frac_part(vj * cert.N)
            if cert.chi[j] == 0:
                assert f.lt(Fraction(1, 64))
            else:
                assert (CR.rational(1) - f).lt(Fraction(1, 64))


def test_certificate_soundness_on_corpus():
    for germs in jump_corpus(15, seed=16):
        prob = build_problem(germs, Fraction(1, 64), Fraction(1, 64), 1)
        cert = search(prob, 1, 10_000_000, m_bar=8)
        assert verify_rounding(prob, cert).ok
        assert verify_jump(prob, cert, 8).ok


def _brute_force_first_n(germs, delta, eps, n_max, m_bar):
    """Independent reimplementation of the scan for rational systems.

    Plain Fractions only: fractional parts, vertex sides, floors, the
    rounding identity, and the shifted identities via index_at.  Used to
    cross-check the production scanner on exact inputs.
    """
    from geoindex.normal_forms import big_C, s_plus_at_one, spectrum_rows
    data = []
    big_m = 1
    for g in germs:
        mean = mean_index(g).lo
        beta = g.i1 + s_plus_at_one(g.blocks) - big_C(g.blocks)
        alphas = []
        for row in spectrum_rows(g.blocks):
            if row.s_minus and row.t.lo != 0:
                alphas.extend([row.t.lo] * row.s_minus)
                big_m = big_m * row.t.lo.denominator // __import__(
                    "math").gcd(big_m, row.t.lo.denominator)
        data.append((g, mean, beta, alphas))
    for n in range(1, n_max + 1):
        ok = True
        ms, deltas = [], []
        for g, mean, beta, alphas in data:
            v = Fraction(1) / (big_m * abs(mean))
            f = (n * v) % 1
            if f < eps:
                chi = 0
            elif 1 - f < eps:
                chi = 1
            else:
                ok = False
                break
            m_i = ((n * v).__floor__() + chi) * big_m
            if m_i < 1 or 2 * m_i <= m_bar:
                ok = False
                break
            d_i = 0
            for a in alphas:
                w = (m_i * a) % 1
                av = (n * a / abs(mean)) % 1
                if not (av < eps or 1 - av < eps):
                    ok = False
                if w == 0:
                    continue
                if w < delta:
                    d_i += 1
                elif not (1 - w < delta):
                    ok = False
            if not ok:
                break
            rho = 1 if mean > 0 else -1
            lhs = m_i * beta + sum(-((-m_i * a.numerator)
                                     // a.denominator) for a in alphas)
            if lhs != rho * n + d_i:
                ok = False
                break
            ms.append(m_i)
            deltas.append(d_i)
        if not ok:
            continue
        good = True
        for (g, mean, beta, alphas), m_i in zip(data, ms):
            rho = 1 if mean > 0 else -1
            for m in range(1, m_bar + 1):
                if index_at(g, 2 * m_i + m) != 2 * rho * n + index_at(g, m):
                    good = False
        if good:
            return n, tuple(ms), tuple(deltas)
    return None


def test_search_agrees_with_brute_force_oracle():
    h2 = IndexGerm("h2", 3, (D(CR.rational(2)), D(CR.rational(5))))
    pair = IndexGerm("pair", 4, (R(CR.rational(Fraction(2, 3))),
                                 R(CR.rational(Fraction(3, 4)))))
    neg = IndexGerm("neg", -2, (D(CR.rational(3)), D(CR.rational(7))))
    for germs in ([B], [H], [h2, pair], [pair, neg], [B, h2, neg]):
        prob = build_problem(germs, Fraction(1, 64), Fraction(1, 64), 1)
        cert = search(prob, 1, 50_000, m_bar=6)
        brute = _brute_force_first_n(germs, Fraction(1, 64),
                                     Fraction(1, 64), 50_000, 6)
        assert brute is not None
        assert (cert.N, cert.m, cert.Delta) == brute


def test_jump_system_with_shear_block():
    shear = IndexGerm("s", 2, (N1(-1, "zero"), D(CR.rational(2))))
    assert mean_index(shear).lo == 2  # 2 + 0 - 1 + 1
    prob = build_problem([shear], Fraction(1, 64), Fraction(1, 64), 1)
    assert prob.M == 1  # the angle 1 is already integral
    cert = search(prob, 4, 200, m_bar=6)
    assert verify_rounding(prob, cert).ok
    assert verify_jump(prob, cert, 6).ok
    # the half-turn eigenvalue contributes ceil(m/2) to every iterate
    m1 = cert.m[0]
    assert index_at(shear, 2 * m1) == 2 * cert.N - (0 + 1 - 2 * cert.Delta[0])


def test_strict_verification_raises_with_triple():
    from geoindex.jump import IdentityViolation
    prob = build_problem([B], DELTA, DELTA, 1)
    cert = search(prob, 1, 100, m_bar=6)
    tampered = cert.__class__(
        N=cert.N, m=(cert.m[0] + 1,), chi=cert.chi, Delta=cert.Delta,
        rho=cert.rho, delta=cert.delta, epsilon=cert.epsilon, M=cert.M,
        M0=cert.M0, names=cert.names)
    with pytest.raises(IdentityViolation) as err:
        verify_jump(prob, tampered, 6, strict=True)
    assert err.value.triple[0] == "B"


def test_scale_mismatch_on_tampered_certificate():
    from geoindex.jump import ScaleMismatch
    prob = build_problem([B], DELTA, DELTA, 1)
    cert = search(prob, 1, 100, m_bar=6)
    tampered = cert.__class__(
        N=cert.N, m=(cert.m[0] + cert.M,), chi=cert.chi, Delta=cert.Delta,
        rho=cert.rho, delta=cert.delta, epsilon=cert.epsilon, M=cert.M,
        M0=cert.M0, names=cert.names)
    with pytest.raises(ScaleMismatch):
        scale(prob, tampered, 2, m_bar=6)


def test_scaled_fractional_parts_identity():
    # {p*N*v} = {p*{N*v}} on certificate data
    from geoindex.exact import frac_part
    prob = build_problem([B], DELTA, DELTA, 1)
    cert = search(prob, 1, 100, m_bar=6)
    for p in (2, 3, 4, 5):
        for vj in prob.v:
            lhs = frac_part(vj * (p * cert.N))
            rhs = frac_part(frac_part(vj * cert.N) * p)
            assert lhs.lo == rhs.lo
