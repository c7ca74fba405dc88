"""Exact arithmetic in Q_p and in the quadratic extension generated by a
root of a Hecke polynomial X^2 - a_p*X + eps*p^(k-1), with explicit
precision labels.

Representation
--------------
A scalar is (a + b*alpha) / p^s where a, b are canonical residues modulo
p^(W+s) and W is the working digit count of the field configuration
(W = N + guard).  Reduction mod p^W is a ring homomorphism on p-integral
rationals, so identities between exactly-known quantities hold bit-exactly
in this representation.  The precision *label* (`prec`) is a Fraction, or
None for "exact" (known through the full working window); arithmetic
propagates labels by the usual ultrametric rules:

* val(x*y) = val(x) + val(y) exactly,
* prec(x + y) = min(prec(x), prec(y)),
* prec(x*y) = min(prec(x) + val(y), prec(y) + val(x)),
* division by a scalar of valuation v costs exactly v digits.

Elements indistinguishable from zero at their precision carry an explicit
zero flag (`is_zero()`); their valuation reads as None, never +infinity,
so downstream divisibility tests can distinguish proven-zero from unknown.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import (
    ConfigError,
    NotPrincipalUnit,
    OrdinaryInput,
    PrecisionTooLow,
    RepeatedRoot,
    ZeroResidue,
)

#: extra base-p digits carried above the user precision N; absorbs every
#: denominator/loss budget that occurs in the factorization pipeline
GUARD_DIGITS = 40


def _is_prime(n):
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def vp(n, p):
    """p-adic valuation of a nonzero integer or Fraction; None for 0."""
    if isinstance(n, Fraction):
        if n == 0:
            return None
        return vp(n.numerator, p) - vp(n.denominator, p)
    if n == 0:
        return None
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


class FieldConfig:
    """p, precision budget and (optional) quadratic extension data.

    ext is None for L = Q_p, else the pair (tr, nm) of the monic minimal
    polynomial X^2 - tr*X + nm of the generator alpha; e is the
    ramification index (1 or 2).  Valuations are Fractions with
    denominator dividing e.
    """

    def __init__(self, p, N, ext=None, e=1, guard=GUARD_DIGITS):
        if not _is_prime(p) or p == 2:
            raise ConfigError(f"p must be an odd prime, got {p}")
        if N < 1:
            raise ConfigError(f"precision N must be positive, got {N}")
        if e not in (1, 2):
            raise ConfigError(f"ramification index must be 1 or 2, got {e}")
        self.p = p
        self.N = N
        self.guard = guard
        self.work_digits = N + guard
        self.ext = None if ext is None else (int(ext[0]), int(ext[1]))
        self.e = e
        self._ppow = {}

    def p_pow(self, n):
        pw = self._ppow.get(n)
        if pw is None:
            pw = self._ppow[n] = self.p ** n
        return pw

    @property
    def has_ext(self):
        return self.ext is not None

    def __eq__(self, other):
        return (isinstance(other, FieldConfig)
                and (self.p, self.N, self.ext, self.e, self.guard)
                == (other.p, other.N, other.ext, other.e, other.guard))

    def __repr__(self):
        tail = "" if self.ext is None else f", ext=X^2-{self.ext[0]}X+{self.ext[1]}, e={self.e}"
        return f"FieldConfig(p={self.p}, N={self.N}{tail})"

    # -- scalar constructors -------------------------------------------------

    def scalar(self, value, prec=None, b=0):
        """Embed a p-integral rational (or an (a, b) pair over the basis
        {1, alpha}) into the field at the given precision label."""
        a = value
        s = 0
        if isinstance(a, PadicScalar):
            return a
        if isinstance(b, Fraction) or isinstance(a, Fraction):
            a = Fraction(a)
            b = Fraction(b)
            den = (a.denominator * b.denominator
                   // _gcd(a.denominator, b.denominator))
            s = vp(den, self.p) if den % self.p == 0 else 0
            den_unit = den // self.p_pow(s)
            mod = self.p_pow(self.work_digits + s)
            inv = pow(den_unit, -1, mod)
            a = int(a * den) * inv
            b = int(b * den) * inv
        return PadicScalar(self, a, b, s, prec)

    def zero(self, prec=None):
        return PadicScalar(self, 0, 0, 0, prec)

    def one(self):
        return PadicScalar(self, 1, 0, 0, None)

    def alpha(self):
        """The extension generator as a scalar (requires has_ext)."""
        if not self.has_ext:
            raise ConfigError("field has no quadratic extension part")
        return PadicScalar(self, 0, 1, 0, None)


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


class PadicScalar:
    """Immutable element of L = Q_p or Q_p(alpha) with a precision label."""

    __slots__ = ("cfg", "a", "b", "s", "prec", "_val")

    def __init__(self, cfg, a, b=0, s=0, prec=None):
        p = cfg.p
        if s > 0:
            # strip common p-powers so the denominator exponent is minimal
            t = 0
            while t < s and a % p == 0 and b % p == 0:
                a //= p
                b //= p
                t += 1
            s -= t
        mod = cfg.p_pow(cfg.work_digits + s)
        self.cfg = cfg
        self.a = a % mod
        self.b = b % mod
        self.s = s
        self.prec = prec
        self._val = False  # not yet computed
        if self.b and not cfg.has_ext:
            raise ConfigError("nonzero alpha-coordinate in a trivial extension")

    # -- bookkeeping ---------------------------------------------------------

    @property
    def prec_eff(self):
        """Effective absolute precision as a Fraction (W for exact scalars)."""
        return Fraction(self.cfg.work_digits) if self.prec is None else self.prec

    def _num_val(self):
        """Valuation of the numerator a + b*alpha, or None if the stored
        residues are both zero (value indistinguishable from 0)."""
        cfg = self.cfg
        if self.b == 0:
            return None if self.a == 0 else Fraction(vp(self.a, cfg.p))
        if not cfg.has_ext:
            raise ConfigError("nonzero alpha-coordinate in a trivial extension")
        tr, nm = cfg.ext
        window = cfg.work_digits + self.s
        norm = (self.a * self.a + self.a * self.b * tr
                + self.b * self.b * nm) % cfg.p_pow(window)
        if norm == 0:
            # cannot certify the valuation inside the working window
            return None
        return Fraction(vp(norm, cfg.p), 2)

    def val(self):
        """Valuation as a Fraction, or None when zero at precision."""
        if self._val is False:
            nv = self._num_val()
            v = None if nv is None else nv - self.s
            if v is not None and v >= self.prec_eff:
                v = None
            self._val = v
        return self._val

    def val_floor(self):
        """Lower bound usable in precision rules: val, or prec when zero."""
        v = self.val()
        return self.prec_eff if v is None else v

    def is_zero(self):
        return self.val() is None

    def is_exact(self):
        return self.prec is None

    def is_unit(self):
        v = self.val()
        return v == 0

    def is_integral(self):
        """Checkable predicate: valuation >= 0 (zero counts as integral)."""
        v = self.val()
        return v is None or v >= 0

    # -- ring operations -----------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, PadicScalar):
            if other.cfg is not self.cfg and other.cfg != self.cfg:
                raise ConfigError("mixing scalars from different field configurations")
            return other
        if isinstance(other, (int, Fraction)):
            return self.cfg.scalar(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        cfg = self.cfg
        s = max(self.s, o.s)
        sh1 = cfg.p_pow(s - self.s)
        sh2 = cfg.p_pow(s - o.s)
        prec = _min_prec(self.prec, o.prec)
        return PadicScalar(cfg, self.a * sh1 + o.a * sh2,
                           self.b * sh1 + o.b * sh2, s, prec)

    __radd__ = __add__

    def __neg__(self):
        return PadicScalar(self.cfg, -self.a, -self.b, self.s, self.prec)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        cfg = self.cfg
        if self.b == 0 and o.b == 0:
            a = self.a * o.a
            b = 0
        elif self.b == 0:
            a, b = self.a * o.a, self.a * o.b
        elif o.b == 0:
            a, b = self.a * o.a, self.b * o.a
        else:
            tr, nm = cfg.ext
            bb = self.b * o.b
            a = self.a * o.a - nm * bb
            b = self.a * o.b + self.b * o.a + tr * bb
        prec = _mul_prec(self, o)
        return PadicScalar(cfg, a, b, self.s + o.s, prec)

    __rmul__ = __mul__

    def conj(self):
        """Galois conjugate a + b*(tr - alpha); identity on the prime field."""
        if self.b == 0:
            return self
        tr, _ = self.cfg.ext
        return PadicScalar(self.cfg, self.a + self.b * tr, -self.b,
                           self.s, self.prec)

    def inverse(self):
        """Multiplicative inverse.  Inverting a non-unit of valuation v
        costs 2v digits off the effective precision (the label stays
        "exact" only for exactly-known units, where no digits are lost)."""
        cfg = self.cfg
        v = self.val()
        if v is None:
            raise ZeroDivisionError("inverse of a scalar that is zero at precision")
        if self.prec is None and v == 0:
            prec = None
        else:
            prec = self.prec_eff - 2 * v
        if self.b == 0:
            w = vp(self.a, cfg.p)
            mod = cfg.p_pow(cfg.work_digits + self.s + 2 * w)
            unit = (self.a // cfg.p_pow(w)) % mod
            inv_unit = pow(unit, -1, mod)
            # 1/((p^w * unit)/p^s) = p^s * unit^(-1) / p^w
            return PadicScalar(cfg, cfg.p_pow(self.s) * inv_unit, 0, w, prec)
        conj = self.conj()
        ninv = (self * conj).inverse()  # norm lands in the prime field
        res = conj * ninv
        res.prec = prec
        res._val = False
        return res

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result = self.cfg.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self - o).is_zero()

    __hash__ = None

    # -- presentation ----------------------------------------------------------

    def digits(self, coord="a", count=None):
        """Base-p digit vector of a numerator coordinate (low digit first)."""
        n = self.a if coord == "a" else self.b
        count = self.cfg.work_digits + self.s if count is None else count
        p = self.cfg.p
        out = []
        for _ in range(count):
            n, d = divmod(n, p)
            out.append(d)
        return out

    def __repr__(self):
        v = self.val()
        vtxt = "zero" if v is None else str(v)
        ptxt = "exact" if self.prec is None else str(self.prec)
        return f"<padic val={vtxt} prec={ptxt} s={self.s}>"


def _min_prec(p1, p2):
    if p1 is None:
        return p2
    if p2 is None:
        return p1
    return min(p1, p2)


def _mul_prec(x, y):
    cands = []
    if x.prec is not None:
        cands.append(x.prec + y.val_floor())
    if y.prec is not None:
        cands.append(y.prec + x.val_floor())
    return min(cands) if cands else None


# ---------------------------------------------------------------------------
# context construction
# ---------------------------------------------------------------------------


class HeckeData:
    """Arithmetic context: p, weight k, a_p, nebentype value eps at p, the
    unramified constant c, the topological generator u, and the two roots
    alpha, beta of X^2 - a_p X + eps p^(k-1) with their valuations."""

    def __init__(self, cfg, k, a_p, eps, c, u, alpha, beta, u_int=None):
        self.cfg = cfg
        self.p = cfg.p
        self.k = k
        self.a_p = a_p
        self.eps = eps
        self.c = c
        self.u = u
        self.u_int = u_int if u_int is not None else cfg.p + 1
        self.alpha = alpha
        self.beta = beta
        self.ord_alpha = alpha.val()
        self.ord_beta = beta.val()
        self.q_int = eps * cfg.p_pow(k - 1)  # eps * p^(k-1) as an integer
        self._cn_cache = {}
        self._gadget_cache = {}
        self._mlog_cache = {}
        self._tw_cache = {}

    def __repr__(self):
        return (f"HeckeData(p={self.p}, k={self.k}, ord(alpha)={self.ord_alpha}, "
                f"ord(beta)={self.ord_beta}, e={self.cfg.e})")


def _hensel_sqrt(d0, p, digits):
    """Square root of the unit residue d0 mod p^digits; the lift whose
    residue mod p lies in [1, (p-1)/2] is chosen for determinism."""
    r = None
    target = d0 % p
    for x in range(1, p):
        if x * x % p == target:
            r = min(x, p - x)
            break
    if r is None:
        return None
    k = 1
    while k < digits:
        k = min(2 * k, digits)
        mod = p ** k
        r = (r + d0 * pow(r, -1, mod)) * pow(2, -1, mod) % mod
    return r


def make_context(p, k, a_p, eps_p=1, c=1, N=40, u=None, guard=GUARD_DIGITS):
    """Build the field configuration and Hecke context for (p, k, a_p).

    Requires p an odd prime > k, k even, 0 < ord_p(a_p) (non-ordinary),
    eps_p and c units, and N >= k.  The quadratic extension is built only
    when the Hecke polynomial is irreducible over Q_p; split polynomials
    yield alpha, beta in Q_p ordered by ord(alpha) <= ord(beta).
    """
    if k < 2 or k % 2:
        raise ConfigError(f"weight must be even and >= 2, got {k}")
    if not _is_prime(p) or p == 2:
        raise ConfigError(f"p must be an odd prime, got {p}")
    if p <= k:
        raise ConfigError(f"need p > k, got p={p}, k={k}")
    if N < k:
        raise PrecisionTooLow(f"need N >= k, got N={N}, k={k}")
    a_p = Fraction(a_p)
    if a_p.denominator % p == 0:
        raise ConfigError("a_p must be p-integral")
    if a_p != 0 and vp(a_p, p) == 0:
        raise OrdinaryInput(f"a_p={a_p} is a p-adic unit; non-ordinary input required")
    for name, val in (("eps_p", Fraction(eps_p)), ("c", Fraction(c))):
        if val == 0 or vp(val, p) != 0:
            raise ConfigError(f"{name} must be a p-adic unit, got {val}")
    eps_p = int(eps_p)
    if u is None:
        u = 1 + p
    u = int(u)
    if vp(Fraction(u) - 1, p) != 1:
        raise ConfigError(f"u={u} is not a topological generator of 1+pZ_p")

    disc = a_p * a_p - 4 * eps_p * p ** (k - 1)
    if disc == 0:
        raise RepeatedRoot("alpha = beta: hypothesis (H.Reg.) fails")
    v_d = vp(disc, p)
    work = N + guard

    if v_d % 2:  # ramified quadratic extension
        cfg = FieldConfig(p, N, ext=(int(a_p), eps_p * p ** (k - 1)), e=2, guard=guard)
        alpha = cfg.alpha()
        beta = cfg.scalar(a_p) - alpha
    else:
        d0 = disc / p ** v_d
        d0_mod = Fraction(d0)
        num = d0_mod.numerator * pow(d0_mod.denominator, -1, p ** (work + 2))
        if pow(num % p, (p - 1) // 2, p) == 1:  # split over Q_p
            cfg = FieldConfig(p, N, ext=None, e=1, guard=guard)
            r = _hensel_sqrt(num % p ** (work + 2), p, work + 2)
            root = cfg.scalar(Fraction(r * p ** (v_d // 2)))
            half = cfg.scalar(Fraction(1, 2))
            alpha = (cfg.scalar(a_p) + root) * half
            beta = (cfg.scalar(a_p) - root) * half
            if alpha.val() > beta.val():
                alpha, beta = beta, alpha
        else:  # inert: unramified quadratic extension
            cfg = FieldConfig(p, N, ext=(int(a_p), eps_p * p ** (k - 1)), e=1, guard=guard)
            alpha = cfg.alpha()
            beta = cfg.scalar(a_p) - alpha

    ctx = HeckeData(cfg, k, cfg.scalar(a_p), eps_p, cfg.scalar(Fraction(c)),
                    cfg.scalar(u), alpha, beta, u_int=u)
    return cfg, ctx


# ---------------------------------------------------------------------------
# unit-group utilities
# ---------------------------------------------------------------------------


def teichmuller(cfg, r):
    """Teichmueller representative: the (p-1)-st root of unity congruent
    to r mod p, to the full working precision."""
    p = cfg.p
    r = r % p
    if r == 0:
        raise ZeroResidue("no Teichmueller representative for residue 0")
    mod = cfg.p_pow(cfg.work_digits)
    x = r
    for _ in range(cfg.work_digits + 2):
        nxt = pow(x, p, mod)
        if nxt == x:
            break
        x = nxt
    return PadicScalar(cfg, x, 0, 0, None)


def log_of_u(u):
    """p-adic logarithm of a principal unit u (u = 1 mod p).

    For u = 1 + p and p >= 5 the result has valuation exactly 1; the
    series is evaluated until terms fall below the working window.
    """
    cfg = u.cfg
    t = u - cfg.one()
    if t.is_zero():
        return cfg.zero()
    tv = t.val()
    if tv is None or tv < 1 or t.b != 0:
        raise NotPrincipalUnit("log requires u = 1 mod p in Z_p")
    # term i: (-1)^(i+1) t^i / i with val >= i*tv - v_p(i)
    acc = cfg.zero()
    power = t
    i = 1
    limit = cfg.work_digits + 2
    while i * tv - (0 if i % cfg.p else vp(i, cfg.p)) <= limit:
        term = power / i
        acc = acc + (term if i % 2 else -term)
        power = power * t
        i += 1
    return acc
