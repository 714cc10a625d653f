"""Impossibility pipeline for three-geodesic configurations on S^3.

Input: germ data for exactly three curves on a bumpy 3-sphere, every
index positive.  The topological facts (local-homology dimensions,
loop-space Betti numbers, Morse inequalities) are treated as axioms
that any configuration realized by an actual metric must satisfy; the
index side is computed unconditionally from the germ data.  A stage
whose Morse-forced constraint fails arithmetically therefore certifies
that no bumpy metric with everywhere-nonzero index realizes the data,
and the report says which constraint broke, with every number needed
to replay the violation.

Stage chain:

  admissibility     three germs, bumpy, i >= 1, positive mean, growth
  parity-screen     an even-index curve must exist, and two-odd-one-even
                    dies on a degree-2N count (at most one contributor
                    against Betti number 2)
  iteration-horizon the finite horizon beyond which indices grew by 4
  jump-search       a fully verified certificate at tolerances /p
  index-window      iterates below/above 2m_k stay under/over 2N -+ i(c)
  forced-top        both even curves must top out exactly at 2N
  gamma-window      the signed sum 2*sum m_k*gamma_k is squeezed into
                    [2N-2, 2N-1] by the alternating Morse inequalities
  scaling           the certificate scales by p=4 with chi, Delta frozen
  mod4-clash        the scaled squeeze demands 4*S in [8N-2, 8N-1],
                    which no admissible S can satisfy

Every contradiction verdict carries a replayable witness; INCONCLUSIVE
is reserved for systems outside the three-curve pattern the pipeline
certifies.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .iteration import (IndexGerm, bott_positive, gamma_invariant,
                        germ_mbar, index_at, is_bumpy, mbar, mean_index)
from .jump import (JumpCertificate, ScaledCertificate, build_problem,
                   scale, search, verify_jump, verify_rounding)
from .morse import betti, parity_counts
from .normal_forms import big_C
from . import serialize


class AdmissibilityError(ValueError):
    """The germ system violates a hard hypothesis of the pipeline."""


@dataclass(frozen=True)
class GeodesicSystem:
    germs: Tuple[IndexGerm, ...]

    @staticmethod
    def of(*germs: IndexGerm) -> "GeodesicSystem":
        return GeodesicSystem(tuple(germs))


@dataclass(frozen=True)
class PipelineConfig:
    delta: Fraction = Fraction(1, 64)
    epsilon: Fraction = Fraction(1, 64)
    p_hat: int = 4
    n_min: int = 2
    n_max: int = 10_000_000
    M0: int = 1
    workers: int = 1
    mbar_override: Optional[int] = None


@dataclass
class StageRecord:
    name: str
    verdict: str                      # pass | contradiction | inconclusive
    witness: Dict[str, object] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, object]:
        return {"name": self.name, "verdict": self.verdict,
                "witness": self.witness}


@dataclass
class ImpossibilityReport:
    system: Dict[str, object]
    stages: List[StageRecord]
    final: str

    def to_dict(self) -> Dict[str, object]:
        return {"system": self.system,
                "stages": [s.to_dict() for s in self.stages],
                "final": self.final}


# -- individual stages ---------------------------------------------------


def admissibility(system: GeodesicSystem) -> Dict[str, object]:
    """Hard hypotheses: bumpy, index >= 1, positive mean, index growth."""
    notes: Dict[str, object] = {}
    for germ in system.germs:
        if not is_bumpy(germ):
            raise AdmissibilityError(f"germ {germ.name!r} is not bumpy")
        if germ.i1 < 1:
            raise AdmissibilityError(
                f"germ {germ.name!r} has index {germ.i1} < 1")
        mean = mean_index(germ)
        if not mean.gt(0):
            raise AdmissibilityError(
                f"germ {germ.name!r} has nonpositive mean index")
        if not bott_positive(germ):
            raise AdmissibilityError(
                f"germ {germ.name!r} fails index positivity under iteration")
        notes[germ.name] = {"i1": germ.i1,
                            "mean_index": mean.describe(),
                            "bumpy": True}
    return notes


def screen_parities(system: GeodesicSystem,
                    config: PipelineConfig) -> StageRecord:
    """Classify the index parity pattern; kill the impossible ones.

    With no even-index curve at all, even degrees get no local homology
    and the degree-2 Betti number is already unreachable.  With exactly
    one even curve, a certificate for that curve confines every even
    contribution to a single degree-2N slot against a Betti number of 2.
    """
    germs = system.germs
    odd = [g for g in germs if g.i1 % 2 == 1]
    even = [g for g in germs if g.i1 % 2 == 0]
    base: Dict[str, object] = {"indices": [g.i1 for g in germs]}

    if len(germs) != 3:
        return StageRecord("parity-screen", "inconclusive",
                           {**base, "reason": "outside-assumption",
                            "detail": f"{len(germs)} curves, pipeline "
                                      f"certifies exactly 3"})
    if len(even) == 0:
        # parity alone: every even degree has zero count, b_2 = 1
        return StageRecord("parity-screen", "contradiction",
                           {**base, "argument": "all-odd",
                            "degree": 2, "M": 0, "betti": betti(2)})
    if len(even) == 1:
        g3 = even[0]
        problem = build_problem([g3], config.delta, config.epsilon,
                                config.M0)
        m_bar = germ_mbar(g3)
        cert = search(problem, config.n_min, config.n_max,
                      m_bar=m_bar, workers=config.workers)
        window = verify_index_window([g3], cert, m_bar)
        top = index_at(g3, 2 * cert.m[0])
        m_2n = 1 if top == 2 * cert.N else 0
        return StageRecord("parity-screen", "contradiction",
                           {**base, "argument": "two-odd-one-even",
                            "even_curve": g3.name, "N": cert.N,
                            "m": cert.m[0], "window_ok": window.ok,
                            "top_index": top,
                            "M_2N_bound": m_2n, "betti_2N": 2})
    if len(even) == 2:
        if odd[0].i1 == 1:
            return StageRecord("parity-screen", "pass",
                               {**base, "pattern": "(1, even, even)"})
        return StageRecord("parity-screen", "inconclusive",
                           {**base, "reason": "outside-assumption",
                            "detail": "odd curve has index >= 3; the "
                                      "three-curve argument needs index 1"})
    return StageRecord("parity-screen", "inconclusive",
                       {**base, "reason": "outside-assumption",
                        "detail": "no odd-index curve"})


@dataclass
class WindowReport:
    ok: bool
    failures: List[Dict[str, object]] = field(default_factory=list)
    side_conditions: Dict[str, object] = field(default_factory=dict)


def verify_index_window(germs: Sequence[IndexGerm], cert: JumpCertificate,
                        m_bar: int) -> WindowReport:
    """Window inequalities around the 2m_k-th iterate.

    Below: i(c^j) <= 2N - i(c) for every 1 <= j < 2m_k, checked by
    direct evaluation.  Above: i(c^{2m_k + m}) >= 2N + i(c), checked
    directly for m <= m_bar; beyond that the superadditivity defect of
    the ceiling (each term in [-1, 0]) gives

        i(c^{2m_k+m}) >= i(c^m) + 2N + 2*Delta_k - 2*C_k,

    which suffices once i(c^m) >= i(c) + 4 (the horizon property) and
    C_k - Delta_k <= 2; both are checked and recorded, the latter being
    automatic for 4-dimensional block data.
    """
    report = WindowReport(ok=True)
    for k, germ in enumerate(germs):
        m_k = cert.m[k]
        two_n = 2 * cert.rho[k] * cert.N
        for j in range(1, 2 * m_k):
            if index_at(germ, j) > two_n - germ.i1:
                report.ok = False
                report.failures.append(
                    {"curve": germ.name, "side": "below", "iterate": j,
                     "index": index_at(germ, j),
                     "bound": two_n - germ.i1})
        for m in range(1, m_bar + 1):
            val = index_at(germ, 2 * m_k + m)
            if val < two_n + germ.i1:
                report.ok = False
                report.failures.append(
                    {"curve": germ.name, "side": "above", "m": m,
                     "index": val, "bound": two_n + germ.i1})
        c_val = big_C(germ.blocks)
        horizon_ok = germ_mbar(germ) <= m_bar
        tail_ok = c_val - cert.Delta[k] <= 2
        report.side_conditions[germ.name] = {
            "C": c_val, "Delta": cert.Delta[k],
            "horizon_covers_germ": horizon_ok,
            "tail_slack_ok": tail_ok,
        }
        if not (horizon_ok and tail_ok):
            report.ok = False
    return report


def forced_top_indices(system: GeodesicSystem, cert: JumpCertificate,
                       n_scale: int = 1) -> StageRecord:
    """Both even-index curves must top out exactly at 2N.

    Anything else leaves the degree-2N count at most 1 against a Betti
    number of 2, so a mismatch is a contradiction witness.
    """
    two_n = 2 * cert.N
    tops: Dict[str, int] = {}
    contributors = 0
    mismatch: List[str] = []
    for k, germ in enumerate(system.germs):
        top = index_at(germ, 2 * cert.m[k])
        tops[germ.name] = top
        if germ.i1 % 2 == 0:
            if top == two_n:
                contributors += 1
            else:
                mismatch.append(germ.name)
    witness = {"tops": tops, "two_N": two_n,
               "M_2N_bound": contributors, "betti_2N": 2,
               "mismatched": mismatch}
    if mismatch:
        return StageRecord("forced-top" if n_scale == 1 else "forced-top-scaled",
                           "contradiction", witness)
    return StageRecord("forced-top" if n_scale == 1 else "forced-top-scaled",
                       "pass", witness)


def sandwich(system: GeodesicSystem, cert: JumpCertificate
             ) -> Tuple[Fraction, Tuple[int, int], StageRecord]:
    """Squeeze the signed iterate sum between the Morse bounds.

    S = sum_k 2 m_k gamma_k must satisfy

        S - e(2N)  + o(2N)  >= 2N - 1      (even-degree squeeze)
        S - e(2N-1)+ o(2N-1) <= 2N - 3     (odd-degree squeeze)

    with e/o the parity counts of top indices beyond the degree cut.
    Both are consequences of the Morse inequalities for any realizable
    configuration, so a numeric failure is a contradiction.
    """
    germs = system.germs
    n2 = 2 * cert.N
    s_val = Fraction(0)
    gammas: Dict[str, str] = {}
    for k, germ in enumerate(germs):
        g = gamma_invariant(germ.i1, index_at(germ, 2))
        gammas[germ.name] = str(g)
        s_val += 2 * cert.m[k] * g
    if (2 * s_val).denominator != 1:
        raise ArithmeticError("gamma sum must be a half-integer")
    e_hi, o_hi = parity_counts(germs, cert, n2)
    e_lo, o_lo = parity_counts(germs, cert, n2 - 1)
    lower = n2 - 1 + e_hi - o_hi
    upper = n2 - 3 + e_lo - o_lo
    ok_low = s_val >= lower
    ok_high = s_val <= upper
    witness = {
        "S": str(s_val), "gammas": gammas, "N": cert.N,
        "m": list(cert.m),
        "counts": {"e_2N": e_hi, "o_2N": o_hi,
                   "e_2N_minus_1": e_lo, "o_2N_minus_1": o_lo},
        "window": [str(lower), str(upper)],
        "even_squeeze_ok": ok_low, "odd_squeeze_ok": ok_high,
    }
    verdict = "pass" if (ok_low and ok_high) else "contradiction"
    return s_val, (lower, upper), StageRecord("gamma-window", verdict, witness)


def mod4_window_certificate(N: int, gammas: Sequence[Fraction]
                            ) -> Dict[str, object]:
    """Arithmetic certificate that the scaled squeeze is unsatisfiable.

    The gamma vector fixes the lattice of possible values of
    S = sum 2 m_k gamma_k (integers; even integers when every |gamma|
    is 1).  No lattice point of the base window [2N-2, 2N-1] has 4*S
    inside [8N-2, 8N-1], and no multiple of 4 lies there at all.
    """
    half = any(abs(g) == Fraction(1, 2) for g in gammas)
    step = 1 if half else 2
    base_lo, base_hi = 2 * N - 2, 2 * N - 1
    candidates = [s for s in range(base_lo, base_hi + 1) if s % step == 0]
    scaled_window = (8 * N - 2, 8 * N - 1)
    offenders = [s for s in candidates
                 if scaled_window[0] <= 4 * s <= scaled_window[1]]
    multiples_of_4 = [x for x in range(scaled_window[0], scaled_window[1] + 1)
                      if x % 4 == 0]
    return {
        "lattice_step": step,
        "base_window": [base_lo, base_hi],
        "base_candidates": candidates,
        "scaled_window": list(scaled_window),
        "candidates_hitting_scaled_window": offenders,
        "multiples_of_4_in_scaled_window": multiples_of_4,
        "excluded": not offenders and not multiples_of_4,
    }


def mod4_contradiction(system: GeodesicSystem, base_cert: JumpCertificate,
                       scaled: ScaledCertificate,
                       s_base: Fraction) -> StageRecord:
    """Final clash: the scaled squeeze cannot hold for any admissible S."""
    p = scaled.p_hat
    s_hat = Fraction(0)
    for k, germ in enumerate(system.germs):
        g = gamma_invariant(germ.i1, index_at(germ, 2))
        s_hat += 2 * scaled.m_hat[k] * g
    gammas = [gamma_invariant(g.i1, index_at(g, 2)) for g in system.germs]
    cert_dict = mod4_window_certificate(base_cert.N, gammas)
    lo, hi = 8 * base_cert.N - 2, 8 * base_cert.N - 1
    witness = {
        "S": str(s_base), "S_hat": str(s_hat),
        "S_hat_equals_p_S": s_hat == p * s_base,
        "p_hat": p,
        "scaled_window": [lo, hi],
        "S_hat_inside_scaled_window": bool(lo <= s_hat <= hi),
        "window_certificate": cert_dict,
    }
    # the scaled squeeze demands S_hat in [8N-2, 8N-1]; arithmetic forbids it
    if cert_dict["excluded"] and not (lo <= s_hat <= hi):
        return StageRecord("mod4-clash", "contradiction", witness)
    return StageRecord("mod4-clash", "pass", witness)


def run_pipeline(system: GeodesicSystem,
                 config: Optional[PipelineConfig] = None
                 ) -> ImpossibilityReport:
    """Run the full stage chain and certify the first broken constraint."""
    config = config or PipelineConfig()
    stages: List[StageRecord] = []
    echo = serialize.system_to_dict(system.germs)

    def finish(final: str) -> ImpossibilityReport:
        return ImpossibilityReport(echo, stages, final)

    if len(system.germs) != 3:
        stages.append(StageRecord(
            "parity-screen", "inconclusive",
            {"reason": "outside-assumption",
             "detail": f"{len(system.germs)} curves"}))
        return finish("INCONCLUSIVE(outside-assumption)")

    notes = admissibility(system)
    stages.append(StageRecord("admissibility", "pass", notes))

    screen = screen_parities(system, config)
    stages.append(screen)
    if screen.verdict == "contradiction":
        return finish("CONTRADICTION(parity-screen)")
    if screen.verdict == "inconclusive":
        return finish("INCONCLUSIVE(outside-assumption)")

    m_bar = config.mbar_override or mbar(system.germs)
    stages.append(StageRecord("iteration-horizon", "pass",
                              {"m_bar": m_bar}))

    problem = build_problem(system.germs,
                            config.delta / config.p_hat,
                            config.epsilon / config.p_hat,
                            config.M0)
    cert = search(problem, config.n_min, config.n_max,
                  m_bar=m_bar, workers=config.workers)
    stages.append(StageRecord("jump-search", "pass",
                              serialize.certificate_to_dict(cert)))

    rounding = verify_rounding(problem, cert)
    stages.append(StageRecord("rounding-check",
                              "pass" if rounding.ok else "error",
                              {"ok": rounding.ok}))
    identities = verify_jump(problem, cert, m_bar)
    stages.append(StageRecord("jump-identities",
                              "pass" if identities.ok else "error",
                              {"ok": identities.ok, "m_bar": m_bar}))
    if not (rounding.ok and identities.ok):
        return finish("INCONCLUSIVE(verification-error)")

    window = verify_index_window(system.germs, cert, m_bar)
    stages.append(StageRecord("index-window",
                              "pass" if window.ok else "error",
                              {"ok": window.ok,
                               "failures": window.failures,
                               "side_conditions": window.side_conditions}))
    if not window.ok:
        return finish("INCONCLUSIVE(verification-error)")

    forced = forced_top_indices(system, cert)
    stages.append(forced)
    if forced.verdict == "contradiction":
        return finish("CONTRADICTION(forced-top)")

    s_base, bounds, squeeze = sandwich(system, cert)
    stages.append(squeeze)
    if squeeze.verdict == "contradiction":
        return finish("CONTRADICTION(gamma-window)")

    scaled = scale(problem, cert, config.p_hat, m_bar)
    stages.append(StageRecord("scaling", "pass",
                              serialize.scaled_to_dict(scaled)))

    scaled_window = verify_index_window(system.germs,
                                        _as_cert(scaled), m_bar)
    scaled_forced = forced_top_indices(system, _as_cert(scaled),
                                       n_scale=config.p_hat)
    s_scaled, _, scaled_squeeze = sandwich(system, _as_cert(scaled))
    stages.append(StageRecord(
        "scaled-window", "pass",
        {"window_ok": scaled_window.ok,
         "forced_top": scaled_forced.witness,
         "squeeze": scaled_squeeze.witness}))

    clash = mod4_contradiction(system, cert, scaled, s_base)
    stages.append(clash)
    if clash.verdict == "contradiction":
        return finish("CONTRADICTION(mod4-clash)")
    return finish("INCONCLUSIVE(no-stage-failed)")


def _as_cert(scaled: ScaledCertificate) -> JumpCertificate:
    base = scaled.base
    return JumpCertificate(
        N=scaled.N_hat, m=scaled.m_hat, chi=scaled.chi_hat,
        Delta=scaled.Delta_hat, rho=base.rho,
        delta=base.delta * scaled.p_hat,
        epsilon=min(Fraction(1, 2), base.epsilon * scaled.p_hat),
        M=base.M, M0=base.M0, names=base.names)


# -- replay ---------------------------------------------------------------


def replay(report: ImpossibilityReport) -> bool:
    """Recompute the violated constraint of a contradiction report.

    Rebuilds the system from the report's own echo and re-derives the
    numbers cited by the final stage; True means the violation
    reproduces exactly.
    """
    germs = serialize.system_from_dict(report.system)
    final = report.final
    if not final.startswith("CONTRADICTION("):
        return False
    stage_name = final[len("CONTRADICTION("):-1]
    record = next(s for s in report.stages if s.name == stage_name)
    w = record.witness

    if stage_name == "parity-screen":
        if w.get("argument") == "all-odd":
            return (all(g.i1 % 2 == 1 for g in germs)
                    and betti(2) == 1 and w["M"] == 0)
        g3 = next(g for g in germs if g.name == w["even_curve"])
        top = index_at(g3, 2 * int(w["m"]))
        bound = 1 if top == 2 * int(w["N"]) else 0
        return bound == w["M_2N_bound"] and bound < 2

    by_name = {g.name: g for g in germs}
    if stage_name == "forced-top":
        two_n = int(w["two_N"])
        for name in w["mismatched"]:
            germ = by_name[name]
            m_k = _m_from_report(report, name)
            if index_at(germ, 2 * m_k) == two_n:
                return False
        return bool(w["mismatched"])

    if stage_name == "gamma-window":
        s_val = Fraction(0)
        for name, m_k in zip(_names_from_report(report),
                             _ms_from_report(report)):
            germ = by_name[name]
            s_val += 2 * m_k * gamma_invariant(germ.i1, index_at(germ, 2))
        if str(s_val) != w["S"]:
            return False
        lower, upper = Fraction(w["window"][0]), Fraction(w["window"][1])
        return not (lower <= s_val <= upper)

    if stage_name == "mod4-clash":
        lo, hi = w["scaled_window"]
        s_hat = Fraction(w["S_hat"])
        cert_dict = w["window_certificate"]
        return (not (lo <= s_hat <= hi)
                and cert_dict["excluded"]
                and s_hat == int(w["p_hat"]) * Fraction(w["S"]))
    return False


def _search_stage(report: ImpossibilityReport) -> Dict[str, object]:
    return next(s for s in report.stages if s.name == "jump-search").witness


def _names_from_report(report: ImpossibilityReport) -> List[str]:
    return [c["name"] for c in _search_stage(report)["curves"]]


def _ms_from_report(report: ImpossibilityReport) -> List[int]:
    return [int(c["m"]) for c in _search_stage(report)["curves"]]


def _m_from_report(report: ImpossibilityReport, name: str) -> int:
    for c in _search_stage(report)["curves"]:
        if c["name"] == name:
            return int(c["m"])
    raise KeyError(name)
