"""Image lattices and error divisors of the signed and eigenvalue-indexed
pair maps.

The signed map's image at an isotypic class is cut out by point conditions
F_2(u^j - 1) = C_j * F_1(u^j - 1) at the k-1 critical twists, where C_j is
an explicit Euler-type ratio when the shifted class is trivial and 0
otherwise.  The eigenvalue-indexed variant replaces the zero by powers
beta^n/alpha^n and adds wild-character conditions, which are implemented
as Phi-block divisibility statements (never as root-of-unity evaluations:
that avoids ramified cyclotomic extensions and is exactly equivalent).

Divisors are formal multisets of linear factors Lin(j) = u^(-j)(1+X) - 1,
blocks Phi_{m,h}, the formal LogBlock(h), and units; they carry no
p-power content by contract (every statement here is up to a power of the
uniformizer).
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

from .errors import DegenerateFactor
from .poly import TruncPoly, divisible_by_block, eval_at_uj, gadget, poly_crt


class Divisor:
    """Formal multiset of factors: ("lin", j), ("phi", m, h), ("log", h)."""

    def __init__(self, factors=None):
        self.factors = Counter()
        if factors:
            for f in factors:
                self.factors[f] += 1
        self._normalize()

    def _normalize(self):
        self.factors = Counter({f: m for f, m in self.factors.items() if m > 0})

    @classmethod
    def unit(cls):
        return cls()

    @classmethod
    def lin(cls, j):
        return cls([("lin", j)])

    @classmethod
    def phi_block(cls, m, h):
        return cls([("phi", m, h)])

    @classmethod
    def log_block(cls, h):
        return cls([("log", h)])

    @classmethod
    def delta(cls, h):
        """delta_h as a divisor: the product of Lin(0..h-1)."""
        return cls([("lin", j) for j in range(h)])

    def is_unit(self):
        return not self.factors

    def __mul__(self, other):
        d = Divisor()
        d.factors = self.factors + other.factors
        return d

    def __truediv__(self, other):
        d = Divisor()
        d.factors = self.factors.copy()
        d.factors.subtract(other.factors)
        if any(m < 0 for m in d.factors.values()):
            raise ValueError(f"{other} does not divide {self}")
        d._normalize()
        return d

    def __eq__(self, other):
        return isinstance(other, Divisor) and self.factors == other.factors

    __hash__ = None

    def degree(self, p):
        """Total degree of the materialized product (None if a formal
        log factor is present)."""
        total = 0
        for f, mult in self.factors.items():
            if f[0] == "lin":
                total += mult
            elif f[0] == "phi":
                _, m, h = f
                total += mult * h * (p ** m - p ** (m - 1))
            else:
                return None
        return total

    def to_poly(self, ctx):
        """Materialize as a TruncPoly (log factors are formal: ValueError)."""
        acc = TruncPoly.one(ctx.cfg)
        for f, mult in sorted(self.factors.items()):
            if f[0] == "lin":
                base = _lin_poly(ctx, f[1])
            elif f[0] == "phi":
                base = gadget(ctx, "phi_block", n=f[1], m=f[2])
            else:
                raise ValueError("formal log factor cannot be materialized")
            for _ in range(mult):
                acc = acc * base
        return acc

    def __repr__(self):
        if self.is_unit():
            return "Divisor(unit)"
        parts = [f"{f}^{m}" if m > 1 else f"{f}" for f, m in sorted(self.factors.items())]
        return f"Divisor({' * '.join(parts)})"


def _lin_poly(ctx, j):
    from .poly import _delta_twist  # linear factor builder
    ints = _delta_twist(ctx, j)
    return TruncPoly._from_packed(ctx.cfg, ints, None, 0, None)


# ---------------------------------------------------------------------------
# the interpolation ratios
# ---------------------------------------------------------------------------


def coleman_ratio(ctx, j, eta_trivial, alt_normalization=False):
    """Ratio C_j tying the flat value to the sharp value at the j-th
    critical twist: c(1-p) / (p^(k-j-1) - a_p c + eps^(-1) p^(j+1) c^2)
    when the indexing class is trivial, None (the zero flag) otherwise.

    The denominator cannot vanish (Ramanujan-Petersson bound keeps
    |a_p| < 2 p^((k-1)/2) while the other terms have smaller valuation
    spread).  alt_normalization exposes the other display's exponents
    (k-j-2 / j with numerator c(p-1)p^(k-2)); no equivalence between the
    two is assumed.
    """
    if not 0 <= j <= ctx.k - 2:
        raise ValueError(f"need 0 <= j <= k-2, got {j}")
    if not eta_trivial:
        return None
    cfg = ctx.cfg
    p, c = cfg.p, ctx.c
    eps_inv = Fraction(1, ctx.eps)
    if alt_normalization:
        num = c * (p - 1) * cfg.p_pow(ctx.k - 2)
        den = cfg.scalar(p ** (ctx.k - j - 2)) - ctx.a_p * c \
            + c * c * cfg.scalar(eps_inv * p ** j)
    else:
        num = c * (1 - p)
        den = cfg.scalar(p ** (ctx.k - j - 1)) - ctx.a_p * c \
            + c * c * cfg.scalar(eps_inv * p ** (j + 1))
    if den.is_zero():
        raise DegenerateFactor("interpolation denominator vanishes at precision")
    return num / den


def pr_ratio(ctx, j, cond_exp, eta_trivial):
    """Ratio for the eigenvalue-indexed pair at the j-th twist: an Euler
    factor ratio when the class is trivial, (beta/alpha)^n for a class of
    conductor p^n otherwise."""
    if not 0 <= j <= ctx.k - 2:
        raise ValueError(f"need 0 <= j <= k-2, got {j}")
    if not eta_trivial:
        if cond_exp < 1:
            raise ValueError("nontrivial class needs conductor exponent >= 1")
        return (ctx.beta / ctx.alpha) ** cond_exp
    cfg = ctx.cfg
    pj = cfg.scalar(cfg.p_pow(j))
    pj1 = cfg.scalar(cfg.p_pow(j + 1))
    one = cfg.one()
    factors = [
        one - ctx.alpha / (pj * ctx.c),
        one - pj1 * ctx.c / ctx.beta,
        one - ctx.beta / (pj * ctx.c),
        one - pj1 * ctx.c / ctx.alpha,
    ]
    if any(f.is_zero() for f in factors):
        raise DegenerateFactor("an Euler factor vanishes at working precision")
    return (factors[0] * factors[1]) / (factors[2] * factors[3])


@dataclass
class RatioTable:
    """Point-condition ratios per critical twist for one isotypic class.

    eta_class: j0 with eta = omega^j0 (0 <= j0 <= k-2) or None when the
    class is not among the critical ones.  entries[j] is the ratio used at
    the point u^j - 1 (None = the value must vanish, signed variant only).
    """

    mode: str                   # "coleman" | "perrin_riou"
    eta_class: object
    entries: dict

    @classmethod
    def build(cls, ctx, eta_class, mode="coleman", alt_normalization=False):
        if eta_class is not None and not 0 <= eta_class <= ctx.k - 2:
            raise ValueError("eta_class must be in 0..k-2 or None")
        entries = {}
        for j in range(ctx.k - 1):
            trivial = eta_class == j
            if mode == "coleman":
                entries[j] = coleman_ratio(ctx, j, trivial, alt_normalization)
            elif mode == "perrin_riou":
                entries[j] = pr_ratio(ctx, j, 1, trivial)
            else:
                raise ValueError(f"unknown mode {mode!r}")
        return cls(mode=mode, eta_class=eta_class, entries=entries)


# ---------------------------------------------------------------------------
# xi factors and error divisors
# ---------------------------------------------------------------------------


def xi_factor(ctx, eta_class, bullet):
    """The divisor xi_{eta,bullet} of delta_{k-1} bounding the image of a
    signed component map.  Sharp is always the unit; flat is delta_{k-1}
    with the factor Lin(j0) removed when eta = omega^(j0) for a critical
    j0, the full delta_{k-1} otherwise."""
    if bullet not in ("sharp", "flat"):
        raise ValueError("bullet must be 'sharp' or 'flat'")
    if bullet == "sharp":
        return Divisor.unit()
    d = Divisor.delta(ctx.k - 1)
    if eta_class is not None:
        if not 0 <= eta_class <= ctx.k - 2:
            raise ValueError("eta_class must be in 0..k-2 or None")
        d = d / Divisor.lin(eta_class)
    return d


def error_charideal(ctx, eta_class, variant="coleman"):
    """Characteristic-ideal divisor of the cokernel error term, up to a
    power of the uniformizer: delta_{k-1}/xi_{eta,flat} for the signed
    variant (Lin(j0) or the unit), the formal log block for the
    eigenvalue-indexed variant."""
    if variant == "perrin_riou":
        return Divisor.log_block(ctx.k - 1)
    if variant != "coleman":
        raise ValueError(f"unknown variant {variant!r}")
    if eta_class is None:
        return Divisor.unit()
    if not 0 <= eta_class <= ctx.k - 2:
        raise ValueError("eta_class must be in 0..k-2 or None")
    return Divisor.lin(eta_class)


# ---------------------------------------------------------------------------
# membership
# ---------------------------------------------------------------------------


@dataclass
class MembershipWitness:
    kind: str           # "point" | "block"
    index: int          # j for points, m for blocks
    residual_val: Fraction | None


def image_membership(f1, f2, eta_class, ctx, mode="coleman", depth=1):
    """Test the image-lattice conditions for the pair (F1, F2).

    coleman mode: F2(u^j - 1) = C_j * F1(u^j - 1) for the k-1 critical
    points.  perrin_riou mode: F1(u^j - 1) = C_j * F2(u^j - 1) plus, for
    every conductor p^(m+1) up to m = depth, divisibility of
    alpha^(m+1) F1 - beta^(m+1) F2 by Phi_{m,k-1}.

    Returns (ok, witness or None)."""
    table = RatioTable.build(ctx, eta_class, mode)
    for j in range(ctx.k - 1):
        v1 = eval_at_uj(f1, j, ctx)
        v2 = eval_at_uj(f2, j, ctx)
        r = table.entries[j]
        if mode == "coleman":
            resid = v2 if r is None else v2 - r * v1
        else:
            resid = v1 - r * v2
        if not resid.is_zero():
            return False, MembershipWitness("point", j, resid.val())
    if mode == "perrin_riou":
        for m in range(1, depth + 1):
            am = ctx.alpha ** (m + 1)
            bm = ctx.beta ** (m + 1)
            g = f1.scale(am) - f2.scale(bm)
            if not divisible_by_block(g, ctx, m, ctx.k - 1):
                return False, MembershipWitness("block", m, g.min_val())
    return True, None


def make_member_pair(ctx, eta_class, f_base, mode="coleman", depth=1,
                     slack=None):
    """Construct a pair satisfying the image-lattice conditions.

    coleman: F1 = f_base, F2 = interpolant through the required values
    plus delta_{k-1} * slack.  perrin_riou: F2 = f_base and F1 solves the
    point and block congruences by polynomial CRT; the result is scaled by
    a power of p to clear denominators (the conditions are homogeneous).
    Returns (F1, F2)."""
    cfg = ctx.cfg
    table = RatioTable.build(ctx, eta_class, mode)
    pairs = []
    if mode == "coleman":
        for j in range(ctx.k - 1):
            r = table.entries[j]
            target = cfg.zero() if r is None else r * eval_at_uj(f_base, j, ctx)
            pairs.append((TruncPoly(cfg, [target]), _lin_poly(ctx, j)))
        f2, _ = poly_crt(pairs)
        if slack is not None:
            f2 = f2 + gadget(ctx, "delta", m=ctx.k - 1) * slack
        return f_base, f2
    for j in range(ctx.k - 1):
        r = table.entries[j]
        target = r * eval_at_uj(f_base, j, ctx)
        pairs.append((TruncPoly(cfg, [target]), _lin_poly(ctx, j)))
    for m in range(1, depth + 1):
        ratio = (ctx.beta / ctx.alpha) ** (m + 1)
        phi = gadget(ctx, "phi_block", n=m, m=ctx.k - 1)
        pairs.append((f_base.scale(ratio).rem(phi), phi))
    f1, _ = poly_crt(pairs)
    if slack is not None:
        blocks = TruncPoly.one(cfg)
        for m in range(1, depth + 1):
            blocks = blocks * gadget(ctx, "phi_block", n=m, m=ctx.k - 1)
        f1 = f1 + gadget(ctx, "delta", m=ctx.k - 1) * blocks * slack
    # clear p-denominators: membership conditions are Lambda-linear
    s = max(f1.max_den_exp(), f_base.max_den_exp())
    if s:
        scale = cfg.scalar(cfg.p_pow(s))
        return f1.scale(scale), f_base.scale(scale)
    return f1, f_base
