"""Canonical JSON interchange for scalars, contexts, polynomials, matrices,
pairs, grids and divisors.

All numbers are exact: scalars are base-p digit vectors (integer arrays,
low digit first) with a denominator shift, rationals are "n/d" strings.
Dumps are canonical (sorted keys, tight separators, trailing newline) so
equal objects serialize byte-identically.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .coleman import Divisor
from .errors import IOFormatError
from .factor import EigenPair, SignedPair
from .padic import PadicScalar, make_context
from .poly import TruncPoly
from .twovar import TruncPoly2


def dumps(obj):
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def _frac_enc(x):
    if x is None:
        return None
    f = Fraction(x)
    return int(f) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def _frac_dec(x):
    if x is None:
        return None
    if isinstance(x, int):
        return Fraction(x)
    num, _, den = str(x).partition("/")
    return Fraction(int(num), int(den or 1))


def _digits(n, p, count):
    out = []
    for _ in range(count):
        n, d = divmod(n, p)
        out.append(d)
    return out


def scalar_to_json(x):
    count = x.cfg.work_digits + x.s
    v = x.val()
    return {
        "digits_a": _digits(x.a, x.cfg.p, count),
        "digits_b": _digits(x.b, x.cfg.p, count),
        "shift": x.s,
        "prec": "exact" if x.prec is None else _frac_enc(x.prec),
        "val": "zero" if v is None else _frac_enc(v),
    }


def scalar_from_json(cfg, obj):
    try:
        a = sum(d * cfg.p ** i for i, d in enumerate(obj["digits_a"]))
        b = sum(d * cfg.p ** i for i, d in enumerate(obj["digits_b"]))
        s = int(obj.get("shift", 0))
        prec = obj.get("prec", "exact")
    except (KeyError, TypeError) as exc:
        raise IOFormatError(f"malformed scalar payload: {exc}") from exc
    prec = None if prec == "exact" else _frac_dec(prec)
    return PadicScalar(cfg, a, b, s, prec)


def context_to_json(ctx):
    return {
        "p": ctx.p,
        "k": ctx.k,
        "ap": _frac_enc(_exact_int(ctx.a_p)),
        "eps": ctx.eps,
        "c": _frac_enc(_exact_int(ctx.c)),
        "u": ctx.u_int,
        "N": ctx.cfg.N,
    }


def _exact_int(x):
    """Recover the small rational behind an exactly-constructed scalar."""
    mod = x.cfg.p_pow(x.cfg.work_digits + x.s)
    a = x.a if x.a <= mod // 2 else x.a - mod
    return Fraction(a, x.cfg.p_pow(x.s))


def context_from_json(obj):
    try:
        return make_context(int(obj["p"]), int(obj["k"]), _frac_dec(obj["ap"]),
                            int(obj["eps"]), _frac_dec(obj["c"]),
                            int(obj["N"]), u=int(obj.get("u") or 0) or None)
    except KeyError as exc:
        raise IOFormatError(f"missing context field: {exc}") from exc


def poly_to_json(f):
    return {
        "coeffs": [scalar_to_json(c) for c in f.coeffs],
        "deg_cap": f.deg_cap,
    }


def poly_from_json(cfg, obj):
    try:
        coeffs = [scalar_from_json(cfg, c) for c in obj["coeffs"]]
        cap = obj.get("deg_cap")
    except (KeyError, TypeError) as exc:
        raise IOFormatError(f"malformed polynomial payload: {exc}") from exc
    return TruncPoly(cfg, coeffs, cap)


def mat2_to_json(m):
    return {
        "entries": [poly_to_json(e) for e in m.e],
        "level": m.level,
    }


def eigenpair_to_json(ep):
    return {"f_alpha": poly_to_json(ep.f_alpha),
            "f_beta": poly_to_json(ep.f_beta), "level": ep.level}


def eigenpair_from_json(cfg, obj):
    return EigenPair(poly_from_json(cfg, obj["f_alpha"]),
                     poly_from_json(cfg, obj["f_beta"]), int(obj["level"]))


def signedpair_to_json(sp):
    return {"sharp": poly_to_json(sp.sharp), "flat": poly_to_json(sp.flat),
            "s": sp.s, "level": sp.level}


def signedpair_from_json(cfg, obj):
    return SignedPair(poly_from_json(cfg, obj["sharp"]),
                      poly_from_json(cfg, obj["flat"]),
                      int(obj["s"]), int(obj["level"]))


def poly2_to_json(f):
    return {
        "grid": [[scalar_to_json(c) for c in row] for row in f.grid],
        "cap_x": f.cap_x,
        "cap_y": f.cap_y,
        "labels": list(f.labels),
    }


def poly2_from_json(cfg, obj):
    try:
        grid = [[scalar_from_json(cfg, c) for c in row] for row in obj["grid"]]
        return TruncPoly2(cfg, grid, int(obj["cap_x"]), int(obj["cap_y"]),
                          tuple(obj["labels"]))
    except (KeyError, TypeError) as exc:
        raise IOFormatError(f"malformed grid payload: {exc}") from exc


def smat_to_json(smat):
    return {"entries": [[poly2_to_json(smat[i][j]) for j in range(2)]
                        for i in range(2)]}


def smat_from_json(cfg, obj):
    rows = obj["entries"]
    return tuple(tuple(poly2_from_json(cfg, rows[i][j]) for j in range(2))
                 for i in range(2))


def divisor_to_json(d):
    return {"factors": [list(f) + [mult]
                        for f, mult in sorted(d.factors.items())]}


def divisor_from_json(obj):
    d = Divisor()
    for item in obj["factors"]:
        *f, mult = item
        d.factors[tuple(f)] += int(mult)
    d._normalize()
    return d
