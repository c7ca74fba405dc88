"""Two-variable truncated series over Gamma = Z_p^2 (X at the first prime,
Y at its conjugate), the half-weight twist, the doubly-signed
factorization identity, cyclotomic/anticyclotomic coordinates, and the
derived extraction along the anticyclotomic line.

Grids are dense and X-major: grid[i][j] is the coefficient of X^i Y^j.
Variable labels ("p", "pc") or ("cyc", "ac") guard against mixing
coordinate systems; substitutions relabel explicitly.
"""

from __future__ import annotations

from fractions import Fraction

from . import _kernels as K
from .errors import NonvanishingOnAcLine, WrongLabel
from .logmatrix import mlog_approx
from .padic import PadicScalar, log_of_u
from .poly import (TruncPoly, _combine_mul_labels, _divisor_cache, _u_pow,
                   divmod_ints, gadget, twist_subst)

LABELS_PRIMES = ("p", "pc")
LABELS_CYC_AC = ("cyc", "ac")


class TruncPoly2:
    """Dense two-variable truncated polynomial with labeled variables."""

    __slots__ = ("cfg", "grid", "cap_x", "cap_y", "labels")

    def __init__(self, cfg, grid, cap_x, cap_y, labels=LABELS_PRIMES):
        grid = [row[:cap_y + 1] for row in grid[:cap_x + 1]]
        width = max((len(r) for r in grid), default=0)
        z = cfg.zero()
        self.cfg = cfg
        self.grid = [list(r) + [z] * (width - len(r)) for r in grid]
        self.cap_x = cap_x
        self.cap_y = cap_y
        self.labels = tuple(labels)

    # -- constructors ---------------------------------------------------------

    @classmethod
    def zero(cls, cfg, cap_x, cap_y, labels=LABELS_PRIMES):
        return cls(cfg, [], cap_x, cap_y, labels)

    @classmethod
    def from_entries(cls, cfg, entries, cap_x, cap_y, labels=LABELS_PRIMES):
        """entries: mapping (i, j) -> scalar-like."""
        nx = min(cap_x, max((i for i, _ in entries), default=0))
        ny = min(cap_y, max((j for _, j in entries), default=0))
        z = cfg.zero()
        grid = [[z] * (ny + 1) for _ in range(nx + 1)]
        for (i, j), v in entries.items():
            if i <= cap_x and j <= cap_y:
                grid[i][j] = v if isinstance(v, PadicScalar) else cfg.scalar(v)
        return cls(cfg, grid, cap_x, cap_y, labels)

    @classmethod
    def from_poly_x(cls, f, cap_x, cap_y, labels=LABELS_PRIMES):
        grid = [[c] for c in f.coeffs]
        return cls(f.cfg, grid, cap_x, cap_y, labels)

    @classmethod
    def from_poly_y(cls, f, cap_x, cap_y, labels=LABELS_PRIMES):
        return cls(f.cfg, [list(f.coeffs)], cap_x, cap_y, labels)

    # -- inspection -------------------------------------------------------------

    def coeff(self, i, j):
        if i < len(self.grid) and j < len(self.grid[i]):
            return self.grid[i][j]
        return self.cfg.zero()

    def is_zero(self):
        return all(c.is_zero() for row in self.grid for c in row)

    def max_den_exp(self):
        return max((c.s for row in self.grid for c in row), default=0)

    def min_prec(self):
        precs = [c.prec for row in self.grid for c in row if c.prec is not None]
        return min(precs) if precs else None

    def min_val(self):
        vals = [c.val() for row in self.grid for c in row]
        vals = [v for v in vals if v is not None]
        return min(vals) if vals else None

    def _require(self, labels):
        if self.labels != tuple(labels):
            raise WrongLabel(f"expected variables {labels}, got {self.labels}")

    def __repr__(self):
        return (f"<TruncPoly2 {self.labels} caps=({self.cap_x},{self.cap_y}) "
                f"size={len(self.grid)}x{len(self.grid[0]) if self.grid else 0}>")

    # -- linear structure ---------------------------------------------------------

    def _check_compat(self, other):
        if self.labels != other.labels:
            raise WrongLabel(f"cannot combine {self.labels} with {other.labels}")
        return min(self.cap_x, other.cap_x), min(self.cap_y, other.cap_y)

    def __add__(self, other):
        cx, cy = self._check_compat(other)
        nx = max(len(self.grid), len(other.grid))
        ny = max(len(self.grid[0]) if self.grid else 0,
                 len(other.grid[0]) if other.grid else 0)
        grid = [[self.coeff(i, j) + other.coeff(i, j) for j in range(ny)]
                for i in range(nx)]
        return TruncPoly2(self.cfg, grid, cx, cy, self.labels)

    def __sub__(self, other):
        return self + other.scale(-1)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, scalar):
        s = scalar if isinstance(scalar, PadicScalar) else self.cfg.scalar(scalar)
        grid = [[c * s for c in row] for row in self.grid]
        return TruncPoly2(self.cfg, grid, self.cap_x, self.cap_y, self.labels)

    def __eq__(self, other):
        return isinstance(other, TruncPoly2) and (self - other).is_zero()

    __hash__ = None

    # -- packed row operations ------------------------------------------------------

    def _packed_rows(self):
        cfg = self.cfg
        s = self.max_den_exp()
        rowsA, rowsB = [], []
        has_b = False
        for row in self.grid:
            ra, rb = [], []
            for c in row:
                sh = cfg.p_pow(s - c.s)
                ra.append(c.a * sh)
                rb.append(c.b * sh)
                if c.b:
                    has_b = True
            rowsA.append(ra)
            rowsB.append(rb)
        return rowsA, (rowsB if has_b else None), s, self.min_prec()

    @classmethod
    def _from_packed_rows(cls, cfg, rowsA, rowsB, s, prec, cap_x, cap_y, labels):
        grid = []
        for i, ra in enumerate(rowsA):
            rb = rowsB[i] if rowsB is not None else None
            row = []
            for j, a in enumerate(ra):
                b = rb[j] if rb is not None and j < len(rb) else 0
                row.append(PadicScalar(cfg, a, b, s, prec))
            grid.append(row)
        return cls(cfg, grid, cap_x, cap_y, labels)

    def transpose(self):
        nx = len(self.grid)
        ny = len(self.grid[0]) if self.grid else 0
        grid = [[self.grid[i][j] for i in range(nx)] for j in range(ny)]
        out = TruncPoly2(self.cfg, grid, self.cap_y, self.cap_x,
                         (self.labels[1], self.labels[0]))
        return out

    def mul_poly(self, g, axis):
        """Multiply by a one-variable polynomial acting on the named axis
        ("x" or "y"), truncated at the caps."""
        if axis == "x":
            return self.transpose().mul_poly(g, "y").transpose()
        cfg = self.cfg
        if not g.coeffs:
            return TruncPoly2.zero(cfg, self.cap_x, self.cap_y, self.labels)
        rowsA, rowsB, s, prec = self._packed_rows()
        gA, gB, sg, pg = g._packed()
        mod = cfg.p_pow(cfg.work_digits + s + sg)
        out_prec = _combine_mul_labels(cfg, prec, pg, s, sg)
        outA, outB = [], []
        ext = cfg.ext
        for i, ra in enumerate(rowsA):
            rb = rowsB[i] if rowsB is not None else None
            if rb is None and gB is None:
                ca, cb = K.poly_mul(ra, gA, mod), None
            else:
                ca, cb = K.poly_mul_ext(ra, rb, gA, gB, mod, ext[0], ext[1])
            outA.append(ca[:self.cap_y + 1])
            outB.append(cb[:self.cap_y + 1] if cb is not None else None)
        has_b = any(b is not None for b in outB)
        if has_b:
            outB = [(b if b is not None else [0] * len(a))
                    for a, b in zip(outA, outB)]
        else:
            outB = None
        return TruncPoly2._from_packed_rows(cfg, outA, outB, s + sg, out_prec,
                                            self.cap_x, self.cap_y, self.labels)

    def rem_poly(self, d, axis):
        """Reduce modulo a one-variable integral unit-leading divisor along
        the named axis."""
        if axis == "x":
            return self.transpose().rem_poly(d, "y").transpose()
        cfg = self.cfg
        rowsA, rowsB, s, prec = self._packed_rows()
        mod = cfg.p_pow(cfg.work_digits + s)
        dl = d.degree()
        D = [c.a for c in d.coeffs[:dl + 1]]
        inv_lead = pow(D[-1], -1, mod)
        out_prec = _combine_mul_labels(cfg, prec, d.min_prec(), s, 0)
        cache = _divisor_cache(d)
        outA, outB = [], []
        for i, ra in enumerate(rowsA):
            rb = rowsB[i] if rowsB is not None else None
            _, r = divmod_ints(ra, D, mod, inv_lead, cache)
            outA.append(r)
            if rb is not None:
                _, r2 = divmod_ints(rb, D, mod, inv_lead, cache)
                outB.append(r2)
            else:
                outB.append(None)
        has_b = any(b is not None for b in outB)
        if has_b:
            outB = [(b if b is not None else [0] * len(a))
                    for a, b in zip(outA, outB)]
        else:
            outB = None
        return TruncPoly2._from_packed_rows(cfg, outA, outB, s, out_prec,
                                            self.cap_x, self.cap_y, self.labels)

    def mul_grid(self, other):
        """Full two-variable product, truncated at the common caps."""
        cx, cy = self._check_compat(other)
        cfg = self.cfg
        acc = TruncPoly2.zero(cfg, cx, cy, self.labels)
        for i2, row in enumerate(other.grid):
            if i2 > cx:
                break
            fy = TruncPoly(cfg, row, deg_cap=cy)
            part = self.mul_poly(fy, "y") if not fy.is_zero() else None
            if part is None:
                continue
            shifted = _shift_x(part, i2)
            acc = acc + shifted
        return acc

    def subst_linear(self, s0, s1, axis):
        """Variable substitution V -> s0 + s1*V on the named axis, with
        integer (base-field) substitution scalars."""
        if axis == "x":
            return self.transpose().subst_linear(s0, s1, "y").transpose()
        cfg = self.cfg
        rowsA, rowsB, s, prec = self._packed_rows()
        mod = cfg.p_pow(cfg.work_digits + s)
        outA = [K.poly_subst_linear(r, s0 % mod, s1 % mod, mod) for r in rowsA]
        outB = None
        if rowsB is not None:
            outB = [K.poly_subst_linear(r, s0 % mod, s1 % mod, mod) for r in rowsB]
        return TruncPoly2._from_packed_rows(cfg, outA, outB, s, prec,
                                            self.cap_x, self.cap_y, self.labels)

    def slice_x0(self):
        """Coefficient of X^0 as a polynomial in the Y-variable."""
        row = self.grid[0] if self.grid else []
        return TruncPoly(self.cfg, list(row), deg_cap=self.cap_y)

    def slice_y0(self):
        """Coefficient of Y^0 as a polynomial in the X-variable."""
        col = [row[0] for row in self.grid if row]
        return TruncPoly(self.cfg, col, deg_cap=self.cap_x)

    def coeff_x(self, i):
        """Coefficient of X^i as a polynomial in the Y-variable."""
        if i < len(self.grid):
            return TruncPoly(self.cfg, list(self.grid[i]), deg_cap=self.cap_y)
        return TruncPoly.zero(self.cfg, deg_cap=self.cap_y)

    def relabel(self, labels):
        return TruncPoly2(self.cfg, self.grid, self.cap_x, self.cap_y, labels)


def _shift_x(f2, k):
    if k == 0:
        return f2
    z_row = [f2.cfg.zero()] * (len(f2.grid[0]) if f2.grid else 1)
    grid = [list(z_row) for _ in range(k)] + [list(r) for r in f2.grid]
    return TruncPoly2(f2.cfg, grid, f2.cap_x, f2.cap_y, f2.labels)


# ---------------------------------------------------------------------------
# twisting
# ---------------------------------------------------------------------------


def twist_halfweight(f, ctx, variable="x", inverse=False):
    """Half-weight twist: substitution V -> u^(k/2-1)(1+V) - 1 in the named
    variable (identity for k = 2).  Works on TruncPoly (variable ignored)
    and TruncPoly2."""
    t = ctx.k // 2 - 1
    if inverse:
        t = -t
    if isinstance(f, TruncPoly):
        return twist_subst(f, t, ctx)
    cfg = f.cfg
    mod = cfg.p_pow(cfg.work_digits + f.max_den_exp())
    ut = _u_pow(ctx, t, mod)
    return f.subst_linear(ut - 1, ut, "x" if variable == "x" else "y")


def twisted_mlog(ctx, n):
    """The half-weight-twisted level-n approximant and the matching
    twisted congruence block: (Tw(M), Tw(omega_{n,k-1})); cached per level."""
    cached = ctx._tw_cache.get(n)
    if cached is not None:
        return cached
    m, _ = mlog_approx(ctx, n)
    t = ctx.k // 2 - 1
    mt = m.map(lambda f: twist_subst(f, t, ctx))
    omega_t = twist_subst(gadget(ctx, "omega_block", n=n, m=ctx.k - 1), t, ctx)
    ctx._tw_cache[n] = (mt, omega_t)
    return mt, omega_t


# ---------------------------------------------------------------------------
# the doubly-signed identity
# ---------------------------------------------------------------------------


def doubly_signed_synthesize(smat, ctx, n):
    """Forward map of the doubly-signed factorization: from the 2x2 signed
    matrix S (TruncPoly2 entries, labels ("p","pc")) to the analytic
    matrix

        L = Tw(M)(Y) * S * (Tw(M)(X))^T,

    reduced mod the twisted blocks Tw(omega_{n,k-1}) in each variable.
    Entry (i, j) couples row i of the Y-side factor with row j of the
    X-side factor.  Returns a 2x2 tuple-of-tuples of TruncPoly2."""
    for row in smat:
        for entry in row:
            entry._require(LABELS_PRIMES)
    mt, omega_t = twisted_mlog(ctx, n)
    # T1[i][b] = sum_a Tw(M)[i][a](Y) * S[a][b], reduced along Y
    t1 = [[None, None], [None, None]]
    for i in range(2):
        for b in range(2):
            acc = smat[0][b].mul_poly(mt[i, 0], "y") + \
                smat[1][b].mul_poly(mt[i, 1], "y")
            t1[i][b] = acc.rem_poly(omega_t, "y")
    out = [[None, None], [None, None]]
    for i in range(2):
        for j in range(2):
            acc = t1[i][0].mul_poly(mt[j, 0], "x") + \
                t1[i][1].mul_poly(mt[j, 1], "x")
            out[i][j] = acc.rem_poly(omega_t, "x")
    return (tuple(out[0]), tuple(out[1]))


def verify_doubly_signed(analytic, smat, ctx, n):
    """Recompute the forward map and compare all four entries modulo the
    twisted blocks; returns (ok, first failing (i, j) or None)."""
    recomputed = doubly_signed_synthesize(smat, ctx, n)
    _, omega_t = twisted_mlog(ctx, n)
    for i in range(2):
        for j in range(2):
            diff = analytic[i][j] - recomputed[i][j]
            diff = diff.rem_poly(omega_t, "y").rem_poly(omega_t, "x")
            if not diff.is_zero():
                return False, (i, j)
    return True, None


def one_var_slice(analytic, smat, ctx, n):
    """The Y-degree-0 slice of the doubly-signed identity: for each row i,
    the slice of L[i][.] must be the one-variable twisted synthesis of the
    pair col_b = sum_a Tw(M)[i][a](0) * S[a][b](X, 0).

    Returns (ok, first failing (i, j) or None)."""
    mt, omega_t = twisted_mlog(ctx, n)
    const = [[mt[i, a].coeff(0) for a in range(2)] for i in range(2)]
    for i in range(2):
        col = [None, None]
        for b in range(2):
            col[b] = smat[0][b].slice_y0().scale(const[i][0]) + \
                smat[1][b].slice_y0().scale(const[i][1])
        for j in range(2):
            expect = (mt[j, 0] * col[0] + mt[j, 1] * col[1]).rem(omega_t)
            got = analytic[i][j].slice_y0().rem(omega_t)
            if not (expect - got).is_zero():
                return False, (i, j)
    return True, None


# ---------------------------------------------------------------------------
# cyclotomic / anticyclotomic coordinates
# ---------------------------------------------------------------------------


def to_cyc_ac(f):
    """Coordinate change from the prime-indexed variables to the
    cyclotomic/anticyclotomic ones: X = (1+S)(1+T) - 1 and
    Y = (1+S)(1+T)^(-1) - 1 (p odd splits Gamma as the product).  Exact
    through total degree min(cap_x, cap_y)."""
    f._require(LABELS_PRIMES)
    cfg = f.cfg
    cx, cy = f.cap_x, f.cap_y
    one = TruncPoly2.from_entries(cfg, {(0, 0): 1}, cx, cy, LABELS_CYC_AC)
    # A = (1+S)(1+T) - 1, B = (1+S)(1+T)^(-1) - 1
    a = TruncPoly2.from_entries(cfg, {(1, 0): 1, (0, 1): 1, (1, 1): 1},
                                cx, cy, LABELS_CYC_AC)
    geom = {(0, j): (-1) ** j for j in range(cy + 1)}
    geom.update({(1, j): (-1) ** j for j in range(cy + 1)})
    b = TruncPoly2.from_entries(cfg, geom, cx, cy, LABELS_CYC_AC)
    b = b - one
    # Horner over X, inner Horner over Y
    acc = TruncPoly2.zero(cfg, cx, cy, LABELS_CYC_AC)
    for i in range(len(f.grid) - 1, -1, -1):
        inner = TruncPoly2.zero(cfg, cx, cy, LABELS_CYC_AC)
        row = f.grid[i]
        for j in range(len(row) - 1, -1, -1):
            inner = inner.mul_grid(b)
            inner = inner + TruncPoly2.from_entries(cfg, {(0, 0): row[j]},
                                                    cx, cy, LABELS_CYC_AC)
        acc = acc.mul_grid(a) + inner
    return acc


def restrict_cyc(f):
    """Restriction to the cyclotomic line: kills the ac-variable (T = 0)."""
    f._require(LABELS_CYC_AC)
    return f.slice_y0()


def restrict_ac(f):
    """Restriction to the anticyclotomic line: kills the cyc-variable (S = 0)."""
    f._require(LABELS_CYC_AC)
    return f.slice_x0()


def derived_on_ac(f, ctx):
    """Derived extraction: for F vanishing on the anticyclotomic line,
    log_p(u) times the coefficient of S^1 as a series in T, so that
    F = (S / log_p u) * derived + O(S^2)."""
    f._require(LABELS_CYC_AC)
    if not restrict_ac(f).is_zero():
        raise NonvanishingOnAcLine(
            "derived extraction requires vanishing on the anticyclotomic line")
    lu = log_of_u(ctx.u)
    return f.coeff_x(1).scale(lu)
