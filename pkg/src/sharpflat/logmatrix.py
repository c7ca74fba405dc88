"""Frobenius matrix, diagonalizing matrix Q, the finite-level matrices C_n
and logarithm-matrix approximants, with executable checks of their
structure (degree bounds, second-row divisibility, determinant, level
compatibility, row growth).

The concrete representative C_n = prod_{i=1..n} [[a_p, 1], [-eps*Phi_{i,k-1}, 0]]
realizes every property used downstream: degrees < (k-1)p^n, second row
divisible by Phi_{n,k-1}, det C_n = eps^n * prod Phi_{m,k-1} exactly, the
compatibility A^(n-m) C_n = c^(n-m) C_m mod omega_{m,k-1}, and the row
growth bounds.  The infinite-type matrix itself is never materialized;
only congruence-class representatives at each level.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    DeterminantMismatch,
    GrowthViolation,
    NotDivisible,
    PrecisionExhausted,
    SingularQ,
)
from .poly import (GrowthEstimate, TruncPoly, exact_divide, gadget,
                   gauss_norm_exp, phi_prod)


class Mat2:
    """2x2 matrix with scalar or polynomial entries (anything supporting
    ring operations against each other)."""

    __slots__ = ("e", "level")

    def __init__(self, e11, e12, e21, e22, level=None):
        self.e = (e11, e12, e21, e22)
        self.level = level

    def __getitem__(self, ij):
        i, j = ij
        return self.e[2 * i + j]

    def __matmul__(self, other):
        a, b, c, d = self.e
        x, y, z, w = other.e
        return Mat2(a * x + b * z, a * y + b * w,
                    c * x + d * z, c * y + d * w)

    def __add__(self, other):
        return Mat2(*(u + v for u, v in zip(self.e, other.e)))

    def __sub__(self, other):
        return Mat2(*(u - v for u, v in zip(self.e, other.e)))

    def scale(self, k):
        return Mat2(*(k * x for x in self.e))

    def scale_rows(self, k1, k2):
        a, b, c, d = self.e
        return Mat2(k1 * a, k1 * b, k2 * c, k2 * d)

    def det(self):
        a, b, c, d = self.e
        return a * d - b * c

    def adj(self):
        a, b, c, d = self.e
        return Mat2(d, -b, -c, a)

    def map(self, fn):
        return Mat2(*(fn(x) for x in self.e), level=self.level)

    def apply(self, v):
        """Matrix times a length-2 vector."""
        a, b, c, d = self.e
        return (a * v[0] + b * v[1], c * v[0] + d * v[1])

    def __repr__(self):
        return f"Mat2({self.e[0]!r}, {self.e[1]!r}; {self.e[2]!r}, {self.e[3]!r})"


def _const(cfg, scalar):
    return TruncPoly(cfg, [scalar if not isinstance(scalar, int)
                           else cfg.scalar(scalar)])


def build_Aphi(ctx):
    """Matrix of Frobenius on the chosen rank-2 lattice:
    c * [[0, -1/(eps p^(k-1))], [1, a_p/(eps p^(k-1))]]."""
    cfg = ctx.cfg
    qinv = cfg.scalar(ctx.q_int).inverse()
    return Mat2(cfg.zero(), -ctx.c * qinv,
                ctx.c, ctx.c * ctx.a_p * qinv)


def build_Q(ctx):
    """The diagonalizer Q = [[alpha, -beta], [-eps p^(k-1), eps p^(k-1)]]
    and its inverse; returns (Q, Qinv, v(det Q)).

    Q^(-1) A_phi Q = diag(c/alpha, c/beta); the inversion costs
    v(det Q) = (k-1) + v(alpha - beta) digits, which is logged by the
    caller via the returned valuation.
    """
    cfg = ctx.cfg
    q = cfg.scalar(ctx.q_int)
    diff = ctx.alpha - ctx.beta
    if diff.is_zero():
        raise SingularQ("alpha - beta vanishes at working precision")
    Q = Mat2(ctx.alpha, -ctx.beta, -q, q)
    det = Q.det()
    dinv = det.inverse()
    Qinv = Mat2(q * dinv, ctx.beta * dinv, q * dinv, ctx.alpha * dinv)
    return Q, Qinv, det.val()


def build_Cn(ctx, n):
    """C_n as the product of the elementary factors
    [[a_p, 1], [-eps * Phi_{i,k-1}, 0]], i = 1..n; C_0 = identity.
    Entries are exact with degrees < (k-1) p^n."""
    if n < 0:
        raise ValueError("n must be >= 0")
    cache = ctx._cn_cache
    if n in cache:
        return cache[n]
    cfg = ctx.cfg
    if n == 0:
        c = Mat2(TruncPoly.one(cfg), TruncPoly.zero(cfg),
                 TruncPoly.zero(cfg), TruncPoly.one(cfg), level=0)
        cache[0] = c
        return c
    prev = build_Cn(ctx, n - 1)
    phi = gadget(ctx, "phi_block", n=n, m=ctx.k - 1)
    d = Mat2(_const(cfg, ctx.a_p), TruncPoly.one(cfg),
             phi.scale(-ctx.eps), TruncPoly.zero(cfg))
    # the new factor multiplies on the LEFT: the second row of D_n @ C_{n-1}
    # is -eps*Phi_{n,k-1} times the first row of C_{n-1}, which is what
    # makes the second row of C_n divisible by Phi_{n,k-1}
    cur = d @ prev
    cur.level = n
    cache[n] = cur
    return cur


def elementary_factor(ctx, i):
    """The i-th elementary factor D_i of the C_n product."""
    cfg = ctx.cfg
    return Mat2(_const(cfg, ctx.a_p), TruncPoly.one(cfg),
                gadget(ctx, "phi_block", n=i, m=ctx.k - 1).scale(-ctx.eps),
                TruncPoly.zero(cfg))


@dataclass
class MlogLedger:
    level: int
    row_den_exponents: tuple
    v_detQ: Fraction


def mlog_approx(ctx, n):
    """Level-n representative of Q^(-1) A_phi^(n+1) C_n mod omega_{n,k-1},
    computed as diag((c/alpha)^(n+1), (c/beta)^(n+1)) * Q^(-1) * C_n.

    Returns (matrix, ledger); the ledger records the denominator exponent
    of each row ((n+1) ord(lambda) + v(det Q) worst case)."""
    cached = ctx._mlog_cache.get(n)
    if cached is not None:
        return cached
    cfg = ctx.cfg
    _, qinv, vdet = build_Q(ctx)
    lam1 = (ctx.c / ctx.alpha) ** (n + 1)
    lam2 = (ctx.c / ctx.beta) ** (n + 1)
    budget = (n + 1) * max(ctx.ord_alpha, ctx.ord_beta) + vdet
    if budget >= cfg.guard - 4:
        raise PrecisionExhausted(
            f"denominator budget {budget} exceeds the guard window {cfg.guard}")
    cn = build_Cn(ctx, n)
    m = qinv @ cn
    m = m.scale_rows(lam1, lam2)
    omega = gadget(ctx, "omega_block", n=n, m=ctx.k - 1)
    m = m.map(lambda f: f.rem(omega))
    m.level = n
    row1 = max(m.e[0].den_exponent(), m.e[1].den_exponent())
    row2 = max(m.e[2].den_exponent(), m.e[3].den_exponent())
    out = (m, MlogLedger(level=n, row_den_exponents=(row1, row2), v_detQ=vdet))
    ctx._mlog_cache[n] = out
    return out


def compat_residual(ctx, n, m):
    """Minimum residual valuation of A_phi^(n-m) C_n - c^(n-m) C_m mod
    omega_{m,k-1} (None when the residual vanishes identically at working
    precision).  The paper's display carries no c-power; the explicit
    representative satisfies it with the scalar c^(n-m), which coincide
    for c = 1."""
    if not 0 <= m < n:
        raise ValueError("need 0 <= m < n")
    a = build_Aphi(ctx)
    acc = a
    for _ in range(n - m - 1):
        acc = acc @ a
    lhs = acc @ build_Cn(ctx, n)
    rhs = build_Cn(ctx, m).map(lambda f: f.scale(ctx.c ** (n - m)))
    omega = gadget(ctx, "omega_block", n=m, m=ctx.k - 1)
    vals = []
    for x, y in zip(lhs.e, rhs.e):
        r = (x - y).rem(omega)
        mv = r.min_val()
        if mv is not None:
            vals.append(mv)
    return min(vals) if vals else None


@dataclass
class DetReport:
    level: int
    quotient_const: object
    ok: bool


def verify_det(ctx, n):
    """det C_n divided exactly by prod_{m<=n} Phi_{m,k-1} must be the unit
    constant eps^n (an exact integer identity for this representative)."""
    cn = build_Cn(ctx, n)
    det = cn.det()
    expected = phi_prod(ctx, n, ctx.k - 1)
    try:
        q, _ = exact_divide(det, expected)
    except NotDivisible as exc:
        raise DeterminantMismatch(f"det C_{n} is not divisible by the "
                                  f"Phi-block product: {exc}") from exc
    deg = q.degree()
    const = q.coeff(0)
    ok = (deg in (0, None)) and const == ctx.cfg.scalar(ctx.eps ** n) \
        and const.is_unit()
    if not ok:
        raise DeterminantMismatch(
            f"det C_{n} / prod Phi is not the unit eps^{n} (degree {deg})")
    return DetReport(level=n, quotient_const=const, ok=True)


def verify_growth(ctx, n_max, swapped=False):
    """Row-wise growth check of the logarithm-matrix approximants.

    Row i of Q^(-1) M_log is approximated at level n by the polynomials
    P_{i,n} = (c/lambda_i)^(n+1) * row_i(Q^(-1) C_n), lambda_1 = alpha,
    lambda_2 = beta; membership in the O(log^{r_i}) class with
    r_1 = ord(alpha), r_2 = ord(beta) requires sup_n ||p^(n r_i) P_{i,n}||
    to stay bounded by a single constant.  The witness tables record the
    scaled exponents; the deep end exceeding all earlier levels raises
    GrowthViolation.

    swapped=True exchanges the scaling eigenvalues while keeping each
    row's claimed order: when ord(alpha) != ord(beta) the row-1 table then
    grows like p^(n(ord(beta)-ord(alpha))), the negative control."""
    if n_max < 2:
        raise ValueError("need n_max >= 2")
    _, qinv, _ = build_Q(ctx)
    r1, r2 = ctx.ord_alpha, ctx.ord_beta
    lam_row1 = ctx.beta if swapped else ctx.alpha
    lam_row2 = ctx.alpha if swapped else ctx.beta
    est1 = GrowthEstimate(order=r1)
    est2 = GrowthEstimate(order=r2)
    floor = -Fraction(ctx.cfg.work_digits)
    for n in range(1, n_max + 1):
        qc = qinv @ build_Cn(ctx, n)
        for est, lam, r, i0 in ((est1, lam_row1, r1, 0), (est2, lam_row2, r2, 2)):
            scale = (ctx.c / lam) ** (n + 1)
            exps = [gauss_norm_exp(qc.e[i0 + j].scale(scale)) for j in (0, 1)]
            exps = [e for e in exps if e is not None]
            scaled = (max(exps) if exps else floor) - n * r
            est.witness.append((n, scaled))
    for row, est in ((1, est1), (2, est2)):
        if est.check() == "inconsistent":
            raise GrowthViolation(row, n_max)
    return est1, est2
