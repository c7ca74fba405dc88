"""Truncated polynomial / power-series ring over L in X = gamma_0 - 1.

Holds the cyclotomic gadget polynomials (Phi_n, omega_n, their weight-h
twisted blocks, delta_h, truncated log), substitution, exact division
with precision-loss reporting, polynomial CRT, sup-norm estimation on the
discs |z| <= rho_t, and the Perrin-Riou style limit of compatible
polynomial sequences with growth-order estimation.

Coefficients are PadicScalar values (per-coefficient denominators and
precision labels); bulk arithmetic is delegated to the packed kernels in
``_kernels``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from . import _kernels as K
from .errors import (
    CapTooSmall,
    CongruenceFailure,
    ModuliNotCoprime,
    NormBlowup,
    NotDivisible,
)
from .padic import PadicScalar, teichmuller


class TruncPoly:
    """Polynomial (deg_cap None) or truncated series (deg_cap = M) over L.

    Trailing coefficients that are zero *at finite precision* are kept
    (they carry information); exactly-known zeros are trimmed.
    """

    __slots__ = ("cfg", "coeffs", "deg_cap", "_div_cache")

    def __init__(self, cfg, coeffs, deg_cap=None):
        if deg_cap is not None and len(coeffs) > deg_cap + 1:
            coeffs = coeffs[:deg_cap + 1]
        while coeffs and coeffs[-1].prec is None and coeffs[-1].is_zero():
            coeffs = coeffs[:-1]
        self.cfg = cfg
        self.coeffs = coeffs
        self.deg_cap = deg_cap
        self._div_cache = None  # memoized reversed-inverse series per modulus

    # -- constructors ---------------------------------------------------------

    @classmethod
    def from_list(cls, cfg, values, deg_cap=None, prec=None):
        coeffs = [v if isinstance(v, PadicScalar) else cfg.scalar(v, prec=prec)
                  for v in values]
        return cls(cfg, coeffs, deg_cap)

    @classmethod
    def zero(cls, cfg, deg_cap=None):
        return cls(cfg, [], deg_cap)

    @classmethod
    def one(cls, cfg, deg_cap=None):
        return cls(cfg, [cfg.one()], deg_cap)

    @classmethod
    def x(cls, cfg, deg_cap=None):
        return cls(cfg, [cfg.zero(), cfg.one()], deg_cap)

    # -- inspection -----------------------------------------------------------

    def __len__(self):
        return len(self.coeffs)

    def coeff(self, i):
        if i < len(self.coeffs):
            return self.coeffs[i]
        return self.cfg.zero()

    def degree(self):
        """Largest index with a certified-nonzero coefficient (None if all
        coefficients are indistinguishable from zero)."""
        for i in range(len(self.coeffs) - 1, -1, -1):
            if not self.coeffs[i].is_zero():
                return i
        return None

    def is_zero(self):
        return all(c.is_zero() for c in self.coeffs)

    def min_val(self):
        """Smallest coefficient valuation (None when all are zero)."""
        vals = [c.val() for c in self.coeffs]
        vals = [v for v in vals if v is not None]
        return min(vals) if vals else None

    def min_prec(self):
        precs = [c.prec for c in self.coeffs if c.prec is not None]
        return min(precs) if precs else None

    def max_den_exp(self):
        """Largest p-denominator exponent among the coefficients."""
        return max((c.s for c in self.coeffs), default=0)

    def den_exponent(self):
        """Denominator exponent in uniformizer units: the smallest s >= 0
        with v(pi^s * coeff) >= 0 for every coefficient."""
        mv = self.min_val()
        if mv is None or mv >= 0:
            return 0
        return math.ceil(-mv * self.cfg.e)

    def is_integral(self):
        return all(c.is_integral() for c in self.coeffs)

    def equals(self, other):
        if not isinstance(other, TruncPoly):
            return NotImplemented
        return (self - other).is_zero()

    __eq__ = equals
    __hash__ = None

    def __repr__(self):
        d = self.degree()
        cap = "" if self.deg_cap is None else f", cap={self.deg_cap}"
        return f"<TruncPoly deg={d}{cap} len={len(self.coeffs)}>"

    # -- packing for the kernels ------------------------------------------------

    def _packed(self):
        """-> (A, B|None, s, prec_label) with coefficient_i = (A_i + B_i a)/p^s
        canonical mod p^(W+s)."""
        cfg = self.cfg
        s = self.max_den_exp()
        A = []
        B = []
        has_b = False
        for c in self.coeffs:
            sh = cfg.p_pow(s - c.s)
            A.append(c.a * sh)
            if c.b:
                has_b = True
            B.append(c.b * sh)
        return A, (B if has_b else None), s, self.min_prec()

    @classmethod
    def _from_packed(cls, cfg, A, B, s, prec, deg_cap=None):
        if B is None:
            coeffs = [PadicScalar(cfg, a, 0, s, prec) for a in A]
        else:
            n = max(len(A), len(B))
            A = A + [0] * (n - len(A))
            B = B + [0] * (n - len(B))
            coeffs = [PadicScalar(cfg, a, b, s, prec)
                      for a, b in zip(A, B)]
        return cls(cfg, coeffs, deg_cap)

    # -- ring operations ----------------------------------------------------------

    def _cap_with(self, other):
        caps = [c for c in (self.deg_cap, other.deg_cap) if c is not None]
        return min(caps) if caps else None

    def __add__(self, other):
        if not isinstance(other, TruncPoly):
            return NotImplemented
        n = max(len(self.coeffs), len(other.coeffs))
        out = [self.coeff(i) + other.coeff(i) for i in range(n)]
        return TruncPoly(self.cfg, out, self._cap_with(other))

    def __sub__(self, other):
        if not isinstance(other, TruncPoly):
            return NotImplemented
        n = max(len(self.coeffs), len(other.coeffs))
        out = [self.coeff(i) - other.coeff(i) for i in range(n)]
        return TruncPoly(self.cfg, out, self._cap_with(other))

    def __neg__(self):
        return TruncPoly(self.cfg, [-c for c in self.coeffs], self.deg_cap)

    def scale(self, scalar):
        """Multiply by a scalar (PadicScalar, int or Fraction)."""
        s = scalar if isinstance(scalar, PadicScalar) else self.cfg.scalar(scalar)
        return TruncPoly(self.cfg, [c * s for c in self.coeffs], self.deg_cap)

    def __mul__(self, other):
        if isinstance(other, (PadicScalar, int, Fraction)):
            return self.scale(other)
        if not isinstance(other, TruncPoly):
            return NotImplemented
        cfg = self.cfg
        if not self.coeffs or not other.coeffs:
            return TruncPoly(cfg, [], self._cap_with(other))
        A1, B1, s1, p1 = self._packed()
        A2, B2, s2, p2 = other._packed()
        # packed values carry p^s1, p^s2: the convolution lands at p^(s1+s2)
        mod = cfg.p_pow(cfg.work_digits + s1 + s2)
        if B1 is None and B2 is None:
            CA, CB = K.poly_mul(A1, A2, mod), None
        else:
            tr, nm = cfg.ext
            CA, CB = K.poly_mul_ext(A1, B1, A2, B2, mod, tr, nm)
        prec = _combine_mul_labels(cfg, p1, p2, s1, s2)
        return TruncPoly._from_packed(cfg, CA, CB, s1 + s2, prec,
                                      self._cap_with(other))

    __rmul__ = scale

    def divmod(self, divisor):
        """Euclidean division by a base-field divisor; the leading
        coefficient must be certified nonzero.  Returns (q, r, loss) where
        loss is the precision cost in digits (0 for unit-leading integral
        divisors)."""
        return _divmod(self, divisor)

    def rem(self, divisor):
        return _divmod(self, divisor)[1]

    def quo(self, divisor):
        return _divmod(self, divisor)[0]

    def shift(self, k):
        """Multiply by X^k."""
        if k == 0 or not self.coeffs:
            return self
        zeros = [self.cfg.zero() for _ in range(k)]
        cap = None if self.deg_cap is None else self.deg_cap
        return TruncPoly(self.cfg, zeros + list(self.coeffs), cap)

    def truncate(self, cap):
        return TruncPoly(self.cfg, self.coeffs[:cap + 1], cap)

    def with_cap(self, cap):
        return TruncPoly(self.cfg, list(self.coeffs), cap)

    # -- evaluation ------------------------------------------------------------

    def eval(self, x):
        """Horner evaluation at a scalar."""
        acc = self.cfg.zero()
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc


def _combine_mul_labels(cfg, p1, p2, s1, s2):
    """Precision label of a product, using val >= -s as the coefficient
    valuation floor of each factor.  Exact stays exact only when the
    result is still certified through the full working window."""
    W = cfg.work_digits
    e1 = Fraction(W) if p1 is None else p1
    e2 = Fraction(W) if p2 is None else p2
    m = min(e1 - s2, e2 - s1)
    if p1 is None and p2 is None and m >= W:
        return None
    return m


def divmod_ints(A, D, mod, inv_lead, cache=None):
    """Euclidean division on packed vectors; `cache` (a dict owned by the
    divisor) memoizes the Newton inverse of the reversed divisor so that
    repeated reductions by a shared modulus cost two multiplies each."""
    dd = len(D) - 1
    A = _trim_ints(A)
    if len(A) <= dd:
        return [], A
    if (len(A) - dd) * (dd + 1) <= K._DIV_CUTOFF:
        return K.backend.divmod_unit(A, D, mod, inv_lead)
    nq = len(A) - dd
    inv = None
    if cache is not None:
        ser = cache.get(mod)
        if ser is not None and len(ser) >= nq:
            inv = ser[:nq]
    if inv is None:
        inv = K._series_inv(D[::-1], nq, mod, inv_lead)
        if cache is not None:
            old = cache.get(mod)
            if old is None or len(old) < len(inv):
                cache[mod] = inv
    q = K.poly_mul(A[::-1][:nq], inv, mod)[:nq][::-1]
    qd = K.poly_mul(q, D, mod)
    r = [(ai - qi) % mod for ai, qi in zip(A[:dd], qd[:dd])]
    return q, r


def _divisor_cache(d):
    if d._div_cache is None:
        d._div_cache = {}
    return d._div_cache


def _divmod(f, d, min_cap=None):
    cfg = f.cfg
    dl = d.degree()
    if dl is None:
        raise ZeroDivisionError("division by a polynomial that is zero at precision")
    lead = d.coeffs[dl]
    if any(c.b for c in d.coeffs) or d.max_den_exp() > 0 or lead.val() != 0:
        return _divmod_scalar(f, d)
    A, B, s, pf = f._packed()
    mod = cfg.p_pow(cfg.work_digits + s)
    # divisor is integral: its packed values sit at denominator exponent 0,
    # so dividend (at p^-s) divides to quotient/remainder at p^-s
    D = [c.a for c in d.coeffs[:dl + 1]]
    inv_lead = pow(D[-1], -1, mod)
    prec = _combine_mul_labels(cfg, pf, d.min_prec(), s, 0)
    cache = _divisor_cache(d)
    qA, rA = divmod_ints(A, D, mod, inv_lead, cache)
    qB = rB = None
    if B is not None:
        qB, rB = divmod_ints(B, D, mod, inv_lead, cache)
    q = TruncPoly._from_packed(cfg, qA, qB, s, prec)
    r = TruncPoly._from_packed(cfg, rA, rB, s, prec, deg_cap=f.deg_cap)
    return q, r, 0


def _divmod_scalar(f, d):
    """Schoolbook division at scalar level; handles extension-coefficient
    or non-unit-leading divisors, tracing losses through the scalar rules."""
    cfg = f.cfg
    dl = d.degree()
    lead = d.coeffs[dl]
    inv = lead.inverse()
    r = list(f.coeffs)
    q = [cfg.zero()] * max(0, len(r) - dl)
    pre_prec = f.min_prec()
    for i in range(len(r) - 1, dl - 1, -1):
        c = r[i]
        if c.is_zero():
            continue
        fac = c * inv
        q[i - dl] = fac
        for j in range(dl + 1):
            r[i - dl + j] = r[i - dl + j] - fac * d.coeffs[j]
    qq = TruncPoly(cfg, q)
    rr = TruncPoly(cfg, r[:dl], deg_cap=f.deg_cap)
    post = rr.min_prec()
    loss = 0
    if pre_prec is not None and post is not None and post < pre_prec:
        loss = pre_prec - post
    return qq, rr, loss


def _trim_ints(v):
    n = len(v)
    while n and v[n - 1] == 0:
        n -= 1
    return v[:n]


@dataclass
class DivisionReport:
    loss: Fraction
    residual_val: Fraction | None  # min residual valuation (None: residual zero)
    den_exponent: int


def exact_divide(f, g):
    """Divide f by g and certify exactness: every remainder coefficient
    must be zero at its tracked precision.  Returns (quotient, report);
    raises NotDivisible with the offending residual valuation otherwise.

    The kernel division is exact modulo the working window by
    construction (f = q*g + r bit-exactly), so certification reduces to
    the remainder test.
    """
    q, r, loss = _divmod(f, g)
    bad = [c.val() for c in r.coeffs if not c.is_zero()]
    if bad:
        raise NotDivisible(
            f"remainder has a coefficient of valuation {min(bad)} "
            f"(precision label {r.min_prec()})", residual_val=min(bad))
    residual = r.min_val()
    return q, DivisionReport(loss=loss, residual_val=residual,
                             den_exponent=q.den_exponent())


def divisible_by_block(f, ctx, m, h):
    """True iff f is exactly divisible by the block Phi_{m,h}."""
    try:
        exact_divide(f, gadget(ctx, "phi_block", n=m, m=h))
        return True
    except NotDivisible:
        return False


# ---------------------------------------------------------------------------
# gadget polynomials
# ---------------------------------------------------------------------------


def _binom_row(m, mod):
    """[C(m, 0), ..., C(m, m)] reduced mod `mod`."""
    row = [1 % mod]
    c = 1
    for i in range(m):
        c = c * (m - i) // (i + 1)
        row.append(c % mod)
    return row


def _u_pow(ctx, e, mod):
    """u^e mod `mod` for a (possibly negative) integer exponent."""
    u = ctx.u_int
    if e >= 0:
        return pow(u, e, mod)
    return pow(pow(u, -1, mod), -e, mod)


def _omega_twist(ctx, n, j):
    """omega_n(u^(-j)(1+X) - 1) = u^(-j p^n)(1+X)^(p^n) - 1, exact ints."""
    cfg = ctx.cfg
    mod = cfg.p_pow(cfg.work_digits)
    pn = cfg.p_pow(n)
    fac = _u_pow(ctx, -j * pn, mod)
    row = _binom_row(pn, mod)
    out = [c * fac % mod for c in row]
    out[0] = (out[0] - 1) % mod
    return out


def _phi_twist(ctx, n, j):
    """Phi_n(u^(-j)(1+X) - 1) = sum_{l<p} (u^(-j)(1+X))^(l p^(n-1))."""
    cfg = ctx.cfg
    p = cfg.p
    mod = cfg.p_pow(cfg.work_digits)
    step = cfg.p_pow(n - 1)
    deg = (p - 1) * step
    out = [0] * (deg + 1)
    for l in range(p):
        fac = _u_pow(ctx, -j * l * step, mod)
        row = _binom_row(l * step, mod)
        for i, c in enumerate(row):
            out[i] = (out[i] + c * fac) % mod
    return out


def _delta_twist(ctx, j):
    """u^(-j)(1+X) - 1 as an exact linear polynomial."""
    cfg = ctx.cfg
    mod = cfg.p_pow(cfg.work_digits)
    fac = _u_pow(ctx, -j, mod)
    return [(fac - 1) % mod, fac]


def _block(ctx, factors):
    cfg = ctx.cfg
    mod = cfg.p_pow(cfg.work_digits)
    acc = [1]
    for f in factors:
        acc = K.poly_mul(acc, f, mod)
    return acc


def gadget(ctx, kind, n=None, m=None, deg_cap=None):
    """Cyclotomic gadget polynomials.

    kind: "phi" (Phi_n in 1+X), "omega" (omega_n), "phi_block" (Phi_{n,m}),
    "omega_block" (omega_{n,m}), "delta" (delta_m), "log" (log_{p,m}
    truncated at deg_cap).  Exact kinds refuse silent truncation: if the
    natural degree exceeds a requested deg_cap, CapTooSmall is raised.
    """
    cfg = ctx.cfg
    key = (kind, n, m)
    if kind != "log" and key in ctx._gadget_cache:
        poly = ctx._gadget_cache[key]
        return _check_cap(poly, deg_cap)

    if kind == "phi":
        if n is None or n < 1:
            raise ValueError("phi requires n >= 1")
        ints = _phi_twist(ctx, n, 0)
    elif kind == "omega":
        if n is None or n < 0:
            raise ValueError("omega requires n >= 0")
        ints = _omega_twist(ctx, n, 0)
    elif kind == "phi_block":
        if n is None or n < 1 or m is None or m < 1:
            raise ValueError("phi_block requires n >= 1, m >= 1")
        ints = _block(ctx, [_phi_twist(ctx, n, j) for j in range(m)])
    elif kind == "omega_block":
        if n is None or n < 0 or m is None or m < 1:
            raise ValueError("omega_block requires n >= 0, m >= 1")
        ints = _block(ctx, [_omega_twist(ctx, n, j) for j in range(m)])
    elif kind == "delta":
        if m is None or m < 1:
            raise ValueError("delta requires m >= 1")
        ints = _block(ctx, [_delta_twist(ctx, j) for j in range(m)])
    elif kind == "log":
        if m is None or m < 1:
            raise ValueError("log requires m >= 1")
        if deg_cap is None:
            raise ValueError("log needs a truncation degree")
        return _log_gadget(ctx, m, deg_cap)
    else:
        raise ValueError(f"unknown gadget kind {kind!r}")

    poly = TruncPoly._from_packed(cfg, ints, None, 0, None)
    ctx._gadget_cache[key] = poly
    return _check_cap(poly, deg_cap)


def _check_cap(poly, deg_cap):
    if deg_cap is not None:
        d = poly.degree() or 0
        if d > deg_cap:
            raise CapTooSmall(f"exact gadget of degree {d} does not fit cap {deg_cap}")
        return poly.with_cap(deg_cap)
    return poly


def phi_prod(ctx, n, h):
    """prod_{m=1..n} Phi_{m,h} (= omega_{n,h}/delta_h), cached on the context."""
    key = ("phiprod", n, h)
    got = ctx._gadget_cache.get(key)
    if got is None:
        got = TruncPoly.one(ctx.cfg)
        for m in range(1, n + 1):
            got = got * gadget(ctx, "phi_block", n=m, m=h)
        ctx._gadget_cache[key] = got
    return got


def _log_gadget(ctx, m, cap):
    """log_{p,m}(1+X) = prod_{j<m} log_p(u^(-j)(1+X)) truncated at cap."""
    cfg = ctx.cfg
    base = TruncPoly(cfg, [cfg.zero()] + [
        cfg.scalar(Fraction((-1) ** (i + 1), i)) for i in range(1, cap + 1)
    ], deg_cap=cap)
    acc = TruncPoly.one(cfg, deg_cap=cap)
    for j in range(m):
        acc = acc * twist_subst(base, -j, ctx)
    return acc


# ---------------------------------------------------------------------------
# substitution and evaluation at the standard points
# ---------------------------------------------------------------------------


def twist_subst(f, j, ctx):
    """F(u^j (1+X) - 1), exact on polynomials of degree <= deg_cap."""
    cfg = f.cfg
    if not f.coeffs:
        return f
    A, B, s, prec = f._packed()
    mod = cfg.p_pow(cfg.work_digits + s)
    uj = _u_pow(ctx, j, mod)
    s0, s1 = (uj - 1) % mod, uj
    outA = K.poly_subst_linear(A, s0, s1, mod)
    outB = K.poly_subst_linear(B, s0, s1, mod) if B is not None else None
    return TruncPoly._from_packed(cfg, outA, outB, s, prec, f.deg_cap)


def eval_at_uj(f, j, ctx):
    """F(u^j - 1) with a tail-precision adjustment for capped series."""
    x = ctx.u ** j - ctx.cfg.one()
    out = f.eval(x)
    vx = x.val()
    if f.deg_cap is not None and vx is not None:
        # unknown tail coefficients contribute O(p^((M+1)*v(x) - s))
        tail = (f.deg_cap + 1) * vx - f.max_den_exp()
        if out.prec is None or tail < out.prec:
            out = PadicScalar(out.cfg, out.a, out.b, out.s, Fraction(tail))
    return out


# ---------------------------------------------------------------------------
# norms and growth
# ---------------------------------------------------------------------------


def rho_exponent(cfg, t):
    """rho_t = p^(-1/(p^(t-1)(p-1))) expressed as the exponent Fraction."""
    return Fraction(1, cfg.p_pow(t - 1) * (cfg.p - 1))


def sup_norm_at(f, t):
    """Bounds for ||F||_{rho_t}, returned as base-p exponents (lo, hi):
    the norm lies in [p^lo, p^hi].  Exact (lo == hi) for polynomials; for
    capped series the tail is bounded using the denominator exponent."""
    cfg = f.cfg
    rho = rho_exponent(cfg, t)
    lo = None
    hi = None
    for i, c in enumerate(f.coeffs):
        v = c.val()
        if v is not None:
            e = -v - i * rho
            lo = e if lo is None else max(lo, e)
            hi = e if hi is None else max(hi, e)
        else:
            e = -c.prec_eff - i * rho
            hi = e if hi is None else max(hi, e)
    if f.deg_cap is not None:
        e_tail = f.max_den_exp() - (f.deg_cap + 1) * rho
        hi = e_tail if hi is None else max(hi, e_tail)
    if lo is None:
        lo = -Fraction(cfg.work_digits)
    if hi is None:
        hi = lo
    return lo, hi


def gauss_norm_exp(f):
    """Exponent of the Gauss norm ||F|| = max_i |c_i| (None if f = 0)."""
    mv = f.min_val()
    return None if mv is None else -mv


@dataclass
class GrowthEstimate:
    """Witness table for membership in the O(log^r) class.

    `witness` rows are (level n, exponent of p^(-rn) * Gauss norm);
    `rho_table` rows are (t, exponent of p^(-tr) * sup norm on the disc
    |z| <= rho_t) for the final truncation.  The estimate is consistent
    with O(log_p^r) when the scaled exponents do not grow at the deep end
    of the table; only trends are checkable at finite depth."""

    order: Fraction
    witness: list = field(default_factory=list)
    rho_table: list = field(default_factory=list)
    verdict: str = "consistent"

    @property
    def bound_exp(self):
        """Exponent of the uniform constant C over the witnessed range."""
        return max((e for _, e in self.witness), default=None)

    def check(self):
        if len(self.witness) >= 3:
            top = self.witness[-1][1]
            prev = max(e for _, e in self.witness[:-1])
            self.verdict = "consistent" if top <= prev else "inconsistent"
        return self.verdict


def pr_limit(provider, ctx, h, r, n_max, n_min=1):
    """Limit of a compatible polynomial sequence P_n (P_{n+1} = P_n mod
    omega_{n,h}) with sup ||p^(rn) P_n|| finite: returns the deepest
    truncation together with a GrowthEstimate at order r.

    At finite depth only trends are checkable: the estimate records the
    scaled norm table and a trend verdict, never the limit condition.
    """
    r = Fraction(r)
    prev = None
    est = GrowthEstimate(order=r)
    for n in range(n_min, n_max + 1):
        cur = provider(n)
        if prev is not None:
            try:
                exact_divide(cur - prev, gadget(ctx, "omega_block", n=n - 1, m=h))
            except NotDivisible as exc:
                raise CongruenceFailure(n) from exc
        g = gauss_norm_exp(cur)
        if g is not None:
            est.witness.append((n, g - r * n))
        prev = cur
    if est.check() == "inconsistent":
        raise NormBlowup(
            f"scaled norm grows at the deep end: {est.witness}")
    # rho_t-norm table of the final truncation, scaled by p^(-tr)
    for t in range(1, n_max + 1):
        _, hi = sup_norm_at(prev, t)
        est.rho_table.append((t, hi - r * t))
    return prev, est


# ---------------------------------------------------------------------------
# polynomial CRT
# ---------------------------------------------------------------------------


def poly_invmod(a, modulus):
    """Inverse of a modulo a coprime polynomial, by the extended Euclidean
    algorithm at scalar level.  Raises ModuliNotCoprime when the gcd fails
    to be a certified unit at working precision."""
    cfg = a.cfg
    r0, r1 = modulus, a.rem(modulus)
    t0, t1 = TruncPoly.zero(cfg), TruncPoly.one(cfg)
    while True:
        d1 = r1.degree()
        if d1 is None:
            raise ModuliNotCoprime("gcd vanishes at working precision")
        if d1 == 0:
            const = r1.coeffs[0]
            inv = const.inverse()
            return t1.scale(inv).rem(modulus)
        q, r, _ = _divmod(r0, r1)
        r0, r1 = r1, r
        t0, t1 = t1, t0 - q * t1


def poly_crt(residues_and_moduli):
    """Unique polynomial congruent to r_i mod m_i for pairwise coprime
    moduli, of degree < sum deg(m_i); returns (P, den_exponent)."""
    items = list(residues_and_moduli)
    acc, modulus = items[0]
    acc = acc.rem(modulus)
    for r, m in items[1:]:
        inv = poly_invmod(modulus, m)
        t = ((r - acc) * inv).rem(m)
        acc = acc + modulus * t
        modulus = modulus * m
    return acc, acc.den_exponent()


def crt_assemble(ctx, blocks, n, h):
    """Assemble P of degree < h*p^n from its twisted blocks: P is
    congruent to Q_j(u^(-j)(1+X)-1) mod omega_n(u^(-j)(1+X)-1) for
    j = 0..h-1.  Returns (P, den_exponent)."""
    cfg = ctx.cfg
    if len(blocks) != h:
        raise ValueError(f"expected {h} blocks, got {len(blocks)}")
    pn = cfg.p_pow(n)
    pairs = []
    for j, q in enumerate(blocks):
        if (q.degree() or 0) >= pn:
            raise ValueError(f"block {j} has degree >= p^n")
        resid = twist_subst(q, -j, ctx)
        modulus = TruncPoly._from_packed(cfg, _omega_twist(ctx, n, j), None, 0, None)
        pairs.append((resid, modulus))
    return poly_crt(pairs)


def crt_extract(ctx, f, n, j):
    """Inverse of assembly: the block Q_j(Z) = F(u^j(1+Z)-1) mod omega_n(Z)."""
    return twist_subst(f, j, ctx).rem(gadget(ctx, "omega", n=n))


# ---------------------------------------------------------------------------
# isotypic decomposition of the Delta-group ring
# ---------------------------------------------------------------------------


def _primitive_root(p):
    for g in range(2, p):
        seen = set()
        x = 1
        for _ in range(p - 1):
            x = x * g % p
            seen.add(x)
        if len(seen) == p - 1:
            return g
    raise ValueError(f"no primitive root mod {p}")


class GroupRingElem:
    """Element of the Delta-group ring over the series ring, stored
    isotypically: component i belongs to the character omega^i."""

    def __init__(self, cfg, components):
        if len(components) != cfg.p - 1:
            raise ValueError(f"need exactly {cfg.p - 1} components")
        self.cfg = cfg
        self.components = dict(components)

    @classmethod
    def decompose(cls, cfg, group_map):
        """From a map residue r (1..p-1) -> TruncPoly to isotypic parts:
        component_i = (1/(p-1)) * sum_r omega(r)^(-i) * F_r."""
        p = cfg.p
        inv_order = cfg.scalar(Fraction(1, p - 1))
        teich = {r: teichmuller(cfg, r) for r in range(1, p)}
        comps = {}
        for i in range(p - 1):
            acc = TruncPoly.zero(cfg)
            for r in range(1, p):
                acc = acc + group_map[r].scale(teich[r] ** (-i))
            comps[i] = acc.scale(inv_order)
        return cls(cfg, comps)

    def reassemble(self):
        """Back to the map r -> F_r; inverse of decompose."""
        p = self.cfg.p
        teich = {r: teichmuller(self.cfg, r) for r in range(1, p)}
        out = {}
        for r in range(1, p):
            acc = TruncPoly.zero(self.cfg)
            for i in range(p - 1):
                acc = acc + self.components[i].scale(teich[r] ** i)
            out[r] = acc
        return out
