"""Lossless dict/JSON forms for systems, certificates, and reports.

Rationals travel as "p/q" strings, decimal intervals as "digits~k" with
an irrationality flag, so every exact-arithmetic value survives a round
trip.  Emission is deterministic (sorted keys, no floats).
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Dict, Sequence, Tuple

from .exact import CertifiedReal, PrecisionBudget
from .iteration import IndexGerm
from .jump import JumpCertificate, ScaledCertificate
from .normal_forms import (BasicBlock, D, KIND_NONTRIVIAL, KIND_TRIVIAL,
                           N1, N2, R)


def fraction_to_str(f: Fraction) -> str:
    return str(f)


def fraction_from_str(s: str) -> Fraction:
    return Fraction(s)


def number_to_str(x: CertifiedReal) -> str:
    if x.exact:
        return str(x.lo)
    radius = (x.hi - x.lo) / 2
    if (x.literal is not None and radius.numerator == 1
            and _is_power_of_ten(radius.denominator)):
        k = len(str(radius.denominator)) - 1
        return f"{x.literal}~{k}"
    # synthesize: widen to a power-of-ten radius covering the interval
    k = 1
    while Fraction(1, 10 ** (k + 1)) >= 2 * radius and k < 390:
        k += 1
    scale = 10 ** k
    center = (x.lo + x.hi) / 2
    scaled = round(center * scale)
    digits = _scaled_to_decimal(scaled, k)
    return f"{digits}~{k}"


def _is_power_of_ten(n: int) -> bool:
    while n % 10 == 0:
        n //= 10
    return n == 1


def _scaled_to_decimal(scaled: int, k: int) -> str:
    sign = "-" if scaled < 0 else ""
    s = str(abs(scaled)).rjust(k + 1, "0")
    return f"{sign}{s[:-k]}.{s[-k:]}" if k else f"{sign}{s}"


def number_from_str(s: str, irrational: bool = False,
                    budget: PrecisionBudget | None = None) -> CertifiedReal:
    return CertifiedReal.parse(s, irrational=irrational, budget=budget)


def block_to_dict(block: BasicBlock) -> Dict[str, object]:
    if isinstance(block, N1):
        return {"type": "N1", "eigenvalue": block.eigenvalue,
                "b": block.b_class}
    if isinstance(block, D):
        return {"type": "D", "lambda": number_to_str(block.lam)}
    if isinstance(block, R):
        d: Dict[str, object] = {"type": "R",
                                "theta_over_pi": number_to_str(block.t)}
        if block.t.irrational:
            d["irrational"] = True
        return d
    if isinstance(block, N2):
        d = {"type": "N2", "theta_over_pi": number_to_str(block.t),
             "kind": KIND_NONTRIVIAL if block.nontrivial else KIND_TRIVIAL}
        if block.t.irrational:
            d["irrational"] = True
        return d
    raise TypeError(f"not a block: {block!r}")


_BLOCK_FIELDS = {
    "N1": {"type", "eigenvalue", "b"},
    "D": {"type", "lambda"},
    "R": {"type", "theta_over_pi", "irrational"},
    "N2": {"type", "theta_over_pi", "kind", "irrational"},
}


class SchemaError(ValueError):
    """A system or certificate document violates the expected schema."""


def block_from_dict(d: Dict[str, object],
                    budget: PrecisionBudget | None = None) -> BasicBlock:
    kind = d.get("type")
    if kind not in _BLOCK_FIELDS:
        raise SchemaError(f"unknown block type: {kind!r}")
    unknown = set(d) - _BLOCK_FIELDS[kind]
    if unknown:
        raise SchemaError(f"unknown fields on {kind} block: {sorted(unknown)}")
    if kind == "N1":
        return N1(int(d["eigenvalue"]), str(d["b"]))
    if kind == "D":
        return D(number_from_str(str(d["lambda"]), budget=budget))
    irr = bool(d.get("irrational", False))
    t = number_from_str(str(d["theta_over_pi"]), irrational=irr,
                        budget=budget)
    if kind == "R":
        return R(t)
    k = d.get("kind")
    if k not in (KIND_TRIVIAL, KIND_NONTRIVIAL):
        raise SchemaError(f"N2 kind must be trivial/nontrivial, got {k!r}")
    return N2(t, nontrivial=(k == KIND_NONTRIVIAL))


def germ_to_dict(germ: IndexGerm) -> Dict[str, object]:
    return {"name": germ.name, "initial_index": germ.i1,
            "blocks": [block_to_dict(b) for b in germ.blocks]}


def germ_from_dict(d: Dict[str, object], n: int = 3,
                   budget: PrecisionBudget | None = None) -> IndexGerm:
    unknown = set(d) - {"name", "initial_index", "blocks"}
    if unknown:
        raise SchemaError(f"unknown fields on curve: {sorted(unknown)}")
    for key in ("name", "initial_index", "blocks"):
        if key not in d:
            raise SchemaError(f"curve is missing {key!r}")
    blocks = tuple(block_from_dict(b, budget) for b in d["blocks"])  # type: ignore
    return IndexGerm(str(d["name"]), int(d["initial_index"]), blocks, n=n)


def system_to_dict(germs: Sequence[IndexGerm]) -> Dict[str, object]:
    n = germs[0].n if germs else 3
    return {"manifold": {"dim": n},
            "curves": [germ_to_dict(g) for g in germs]}


def system_from_dict(d: Dict[str, object]) -> Tuple[IndexGerm, ...]:
    unknown = set(d) - {"manifold", "curves", "precision"}
    if unknown:
        raise SchemaError(f"unknown top-level fields: {sorted(unknown)}")
    manifold = d.get("manifold", {"dim": 3})
    if set(manifold) - {"dim"}:
        raise SchemaError("manifold accepts only 'dim'")
    n = int(manifold.get("dim", 3))
    precision = d.get("precision", {})
    if set(precision) - {"max_digits", "refine_step"}:
        raise SchemaError("precision accepts only max_digits/refine_step")
    budget = None
    if precision:
        try:
            budget = PrecisionBudget(**{k: int(v)
                                        for k, v in precision.items()})
        except (TypeError, ValueError) as exc:
            raise SchemaError(f"bad precision settings: {exc}") from exc
    curves = d.get("curves")
    if not isinstance(curves, list) or not curves:
        raise SchemaError("system needs a non-empty 'curves' list")
    germs = tuple(germ_from_dict(c, n=n, budget=budget) for c in curves)
    names = [g.name for g in germs]
    if len(set(names)) != len(names):
        raise SchemaError(f"duplicate curve names: {names}")
    return germs


def certificate_to_dict(cert: JumpCertificate) -> Dict[str, object]:
    return {
        "N": cert.N, "M": cert.M, "M0": cert.M0,
        "delta": str(cert.delta), "epsilon": str(cert.epsilon),
        "chi": list(cert.chi),
        "curves": [{"name": name, "m": m, "Delta": d, "rho": r}
                   for name, m, d, r in
                   zip(cert.names, cert.m, cert.Delta, cert.rho)],
    }


def certificate_from_dict(d: Dict[str, object]) -> JumpCertificate:
    unknown = set(d) - {"N", "M", "M0", "delta", "epsilon", "chi", "curves"}
    if unknown:
        raise SchemaError(f"unknown certificate fields: {sorted(unknown)}")
    curves = d["curves"]
    return JumpCertificate(
        N=int(d["N"]),
        m=tuple(int(c["m"]) for c in curves),
        chi=tuple(int(x) for x in d["chi"]),
        Delta=tuple(int(c["Delta"]) for c in curves),
        rho=tuple(int(c["rho"]) for c in curves),
        delta=Fraction(str(d["delta"])),
        epsilon=Fraction(str(d["epsilon"])),
        M=int(d["M"]), M0=int(d["M0"]),
        names=tuple(str(c["name"]) for c in curves))


def scaled_to_dict(sc: ScaledCertificate) -> Dict[str, object]:
    return {
        "base": certificate_to_dict(sc.base),
        "p_hat": sc.p_hat, "N_hat": sc.N_hat,
        "m_hat": list(sc.m_hat), "chi_hat": list(sc.chi_hat),
        "Delta_hat": list(sc.Delta_hat),
        "checks": [{"name": n, "ok": ok} for n, ok in sc.checks],
    }


def dumps(obj: Dict[str, object]) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"
