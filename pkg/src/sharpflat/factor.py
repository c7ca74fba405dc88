"""Signed (sharp/flat) factorization of compatible eigenvalue-pair series.

Forward direction: synthesize (F_alpha, F_beta) from a signed pair through
the level-n logarithm-matrix approximant.  Backward direction: adjugate
division.  Writing V = adj(C_n) Q (F_alpha, F_beta)^T, compatibility makes
V exactly divisible by prod_{m<=n} Phi_{m,k-1}, and

    (F_sharp, F_flat)^T = eps^(-n) * V / prod_{m<=n} Phi_{m,k-1}

reduced mod omega_{n,k-1} recovers the signed class: indeed
adj(C_n) Q * (Q^(-1) C_n x) = det(C_n) x = eps^n prod Phi * x, and the
ambiguity of the division lies in ker h_n.  Inverse-limit patching checks
that deeper levels reduce to shallower ones and that the measured
denominator exponent stays level-independent.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import (
    DenominatorGrowth,
    IncompatibleInput,
    InconsistentLevels,
    NotDivisible,
    PrecisionExhausted,
)
from .logmatrix import build_Cn, build_Q, mlog_approx
from .poly import TruncPoly, exact_divide, gadget, phi_prod


@dataclass
class SignedPair:
    """Bounded signed components with their denominator exponent (in
    uniformizer units) and the level they were produced at."""

    sharp: TruncPoly
    flat: TruncPoly
    s: int = 0
    level: int = 0

    def as_vec(self):
        return (self.sharp, self.flat)


@dataclass
class EigenPair:
    """Finite-level data of a pair (F_alpha, F_beta): entries reduced mod
    omega_{n,k-1} at the declared level."""

    f_alpha: TruncPoly
    f_beta: TruncPoly
    level: int

    def as_vec(self):
        return (self.f_alpha, self.f_beta)


def _reduce_pair(vec, ctx, n):
    omega = gadget(ctx, "omega_block", n=n, m=ctx.k - 1)
    return tuple(f.rem(omega) for f in vec)


def synth_pair(sp, ctx, n):
    """(F_alpha, F_beta)^T = mlog_approx(n) * (F_sharp, F_flat)^T reduced
    mod omega_{n,k-1}."""
    if sp.level > n:
        raise ValueError(f"signed pair at level {sp.level} > synthesis level {n}")
    m, _ = mlog_approx(ctx, n)
    va, vb = _reduce_pair(m.apply(sp.as_vec()), ctx, n)
    return EigenPair(f_alpha=va, f_beta=vb, level=n)


@dataclass
class CompatibilityWitness:
    block: int          # first failing Phi-block level m
    entry: int          # offending vector entry (0 or 1)
    residual_val: Fraction | None


def _adjq_vec(ep, ctx, n):
    """adj(C_n) * Q * (P_alpha, P_beta)^T where P_lambda is the
    (lambda/c)^(n+1)-rescaling of F_lambda (undoing the diagonal factor of
    the synthesis matrix: the provider contract supplies F_lambda with
    F_lambda = lambda^-(n+1) P_{lambda,n} mod omega_{n,k-1}).

    This integral-friendly form has the same Phi-block divisibility as
    adj(Q^(-1)C_n) * vec, the two differing by the scalar det Q; the
    rescaling factors are integral, so no precision is spent here."""
    la = (ctx.alpha / ctx.c) ** (n + 1)
    lb = (ctx.beta / ctx.c) ** (n + 1)
    vec = (ep.f_alpha.scale(la), ep.f_beta.scale(lb))
    Q, _, _ = build_Q(ctx)
    w = Q.apply(vec)
    adj = build_Cn(ctx, n).adj()
    return adj.apply(w)


def check_compatibility(ep, ctx, n):
    """Tests divisibility of adj(Q^(-1)C_n)*(F_alpha, F_beta)^T by
    Phi_{m,k-1} for every 1 <= m <= n.  Returns (ok, witness): the witness
    is the first failing (m, entry, residual valuation), or None."""
    v = _adjq_vec(ep, ctx, n)
    for m in range(1, n + 1):
        phi = gadget(ctx, "phi_block", n=m, m=ctx.k - 1)
        for i, entry in enumerate(v):
            try:
                exact_divide(entry, phi)
            except NotDivisible as exc:
                return False, CompatibilityWitness(
                    block=m, entry=i, residual_val=exc.residual_val)
    return True, None


def factor_block(ep, ctx, n, check=True):
    """Factor a compatible eigenpair into its signed components at level n.

    The deliverable is the class mod ker h_n; the representative is the
    minimal-degree one from the adjugate division (reduced mod
    omega_{n,k-1}).  Raises IncompatibleInput when the compatibility
    criterion fails, PrecisionExhausted when the division consumed the
    guard budget."""
    if check:
        ok, wit = check_compatibility(ep, ctx, n)
        if not ok:
            raise IncompatibleInput(wit)
    v = _adjq_vec(ep, ctx, n)
    prod = phi_prod(ctx, n, ctx.k - 1)
    out = []
    eps_scale = ctx.cfg.scalar(Fraction(1, ctx.eps ** n))
    for entry in v:
        try:
            q, _ = exact_divide(entry, prod)
        except NotDivisible as exc:
            raise IncompatibleInput(
                CompatibilityWitness(block=n, entry=len(out),
                                     residual_val=exc.residual_val)) from exc
        out.append(q.scale(eps_scale))
    sharp, flat = _reduce_pair(out, ctx, n)
    mp = min(p for p in (sharp.min_prec(), flat.min_prec(), Fraction(ctx.cfg.work_digits))
             if p is not None)
    if mp <= 0:
        raise PrecisionExhausted("signed components lost all certified digits")
    s = max(sharp.den_exponent(), flat.den_exponent())
    return SignedPair(sharp=sharp, flat=flat, s=s, level=n)


def roundtrip_residual(sp_a, sp_b, ctx, n):
    """Certify two signed pairs as the same class mod ker h_n: synthesize
    their difference and return the minimum residual valuation mod
    omega_{n,k-1} (None when it vanishes at working precision)."""
    diff = SignedPair(sharp=sp_a.sharp - sp_b.sharp, flat=sp_a.flat - sp_b.flat,
                      s=0, level=min(sp_a.level, sp_b.level))
    back = synth_pair(diff, ctx, n)
    vals = [f.min_val() for f in back.as_vec()]
    vals = [v for v in vals if v is not None]
    return min(vals) if vals else None


def default_guard(ctx, n):
    """Provable-zero guard for level-n round trips:
    (n+1)(k-1) + 2 v(alpha-beta) + v(det Q)."""
    vdiff = (ctx.alpha - ctx.beta).val()
    vdet = ctx.cfg.scalar(ctx.q_int).val() + vdiff
    return (n + 1) * (ctx.k - 1) + 2 * vdiff + vdet


@dataclass
class LevelCertificate:
    level: int
    s: int
    consistent_with_previous: bool
    residual_val: Fraction | None


@dataclass
class LimitResult:
    pair: SignedPair
    certificates: list = field(default_factory=list)

    @property
    def s(self):
        return self.pair.s


def factor_limit(provider, ctx, n_max, n_min=1):
    """Factor per-level eigenpairs from `provider(n)` for n_min <= n <= n_max
    and patch: each level's signed class must reduce to the previous one
    (checked by synthesizing the difference), and the measured denominator
    exponent must not grow with the level.

    Returns the deepest signed pair plus one certificate per level.
    Raises InconsistentLevels(n) or DenominatorGrowth."""
    result = None
    prev = None
    certs = []
    thresh = ctx.cfg.N - default_guard(ctx, n_max)
    for n in range(n_min, n_max + 1):
        ep = provider(n)
        if ep.level != n:
            raise ValueError(f"provider returned level {ep.level} at {n}")
        try:
            sp = factor_block(ep, ctx, n)
        except IncompatibleInput as exc:
            raise InconsistentLevels(
                n, f"level {n} block fails compatibility: {exc.witness}") from exc
        consistent = True
        rv = None
        if prev is not None:
            rv = roundtrip_residual(prev, sp, ctx, n - 1)
            consistent = rv is None or rv >= thresh
            if not consistent:
                raise InconsistentLevels(n, f"level {n} does not reduce to "
                                            f"level {n - 1}: residual {rv}")
            if sp.s > max(c.s for c in certs):
                raise DenominatorGrowth(
                    f"denominator exponent grew from "
                    f"{max(c.s for c in certs)} to {sp.s} at level {n}")
        certs.append(LevelCertificate(level=n, s=sp.s,
                                      consistent_with_previous=consistent,
                                      residual_val=rv))
        prev = sp
        result = sp
    return LimitResult(pair=result, certificates=certs)


def measure_denominator(history):
    """Max denominator exponent over a run of factorizations: accepts an
    iterable of SignedPair / LimitResult / plain ints."""
    s = 0
    for item in history:
        if isinstance(item, LimitResult):
            s = max(s, item.pair.s)
        elif isinstance(item, SignedPair):
            s = max(s, item.s)
        else:
            s = max(s, int(item))
    return s
