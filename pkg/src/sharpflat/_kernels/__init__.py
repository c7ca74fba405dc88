"""Dense polynomial kernels over Z/p^W.

A small compiled core (Cython) accelerates the schoolbook-sized loops;
a pure-Python backend with the identical contract is selected at import
when the extension is unavailable or ``SHARPFLAT_PURE=1`` is set.  Large
products go through Kronecker substitution (coefficients packed into one
big integer, multiplied with CPython's native Karatsuba) in both cases,
and large divisions through Newton inversion of the reversed divisor, so
the two backends differ only in constant factors, never in results.

Coefficient vectors are lists of ints canonical in [0, mod).  Quadratic
extension arithmetic rides on pairs of vectors (A, B) representing
A + B*alpha with alpha^2 = tr*alpha - nm; B may be None meaning zero.
"""

import os

if os.environ.get("SHARPFLAT_PURE"):
    from . import pure as backend
else:
    try:
        from . import _ckernels as backend
    except ImportError:
        from . import pure as backend

BACKEND = backend.NAME

#: below this work estimate (len(a)*len(b)) schoolbook beats packing
_MUL_CUTOFF = 4096
#: below this work estimate ((len(a)-len(d))*len(d)) the division loop wins
_DIV_CUTOFF = 4096


def poly_mul(a, b, mod):
    la, lb = len(a), len(b)
    if la == 0 or lb == 0:
        return []
    if la * lb <= _MUL_CUTOFF:
        return backend.mul_schoolbook(a, b, mod)
    return _kron_mul(a, b, mod)


def _kron_mul(a, b, mod):
    """Multiply by packing into big integers (exact; slots sized from the
    actual coefficient magnitudes so intermediate sums cannot overflow)."""
    la, lb = len(a), len(b)
    bits = (max(a).bit_length() + max(b).bit_length()
            + min(la, lb).bit_length() + 1)
    nb = (bits + 7) // 8
    abuf = bytearray(nb * la)
    for i, c in enumerate(a):
        if c:
            abuf[i * nb:(i + 1) * nb] = c.to_bytes(nb, "little")
    bbuf = bytearray(nb * lb)
    for i, c in enumerate(b):
        if c:
            bbuf[i * nb:(i + 1) * nb] = c.to_bytes(nb, "little")
    prod = int.from_bytes(bytes(abuf), "little") * int.from_bytes(bytes(bbuf), "little")
    n_out = la + lb - 1
    pbuf = prod.to_bytes(nb * (n_out + 1), "little")
    return [int.from_bytes(pbuf[k * nb:(k + 1) * nb], "little") % mod
            for k in range(n_out)]


def poly_subst_linear(c, s0, s1, mod):
    return backend.subst_linear(c, s0, s1, mod)


def _series_inv(d, n, mod, inv_lead):
    """First n coefficients of 1/d as a power series (d[0] a unit with
    the given inverse), by Newton doubling on poly_mul."""
    x = [inv_lead % mod]
    k = 1
    while k < n:
        k = min(2 * k, n)
        dx = poly_mul(d[:k], x, mod)[:k]
        # x <- x*(2 - d*x) mod X^k
        two_minus = [(-c) % mod for c in dx]
        two_minus[0] = (2 - dx[0]) % mod
        x = poly_mul(x, two_minus, mod)[:k]
    return x


def poly_divmod(a, d, mod, inv_lead):
    """Euclidean division a = q*d + r, deg r < deg d; the leading
    coefficient of d must be invertible with the given inverse."""
    dd = len(d) - 1
    if dd < 0:
        raise ZeroDivisionError("division by the zero polynomial")
    if len(a) <= dd:
        return [], list(a)
    if (len(a) - dd) * (dd + 1) <= _DIV_CUTOFF:
        return backend.divmod_unit(a, d, mod, inv_lead)
    nq = len(a) - dd  # number of quotient coefficients
    ra = a[::-1]
    rd = d[::-1]
    inv = _series_inv(rd, nq, mod, inv_lead)
    q = poly_mul(ra[:nq], inv, mod)[:nq][::-1]
    qd = poly_mul(q, d, mod)
    r = [(ai - qi) % mod for ai, qi in zip(a[:dd], qd[:dd])]
    return q, r


# -- quadratic-extension variants -------------------------------------------


def _vadd(x, y, mod):
    if x is None:
        return None if y is None else list(y)
    if y is None:
        return list(x)
    if len(x) < len(y):
        x, y = y, x
    out = list(x)
    for i, c in enumerate(y):
        out[i] = (out[i] + c) % mod
    return out


def _vsub(x, y, mod):
    if y is None:
        return None if x is None else list(x)
    out = list(x) + [0] * (len(y) - len(x)) if x is not None else [0] * len(y)
    for i, c in enumerate(y):
        out[i] = (out[i] - c) % mod
    return out


def _vscale(x, k, mod):
    if x is None or k == 0:
        return None
    return [c * k % mod for c in x]


def poly_mul_ext(aA, aB, bA, bB, mod, tr, nm):
    """(aA + aB*alpha) * (bA + bB*alpha) with alpha^2 = tr*alpha - nm."""
    p1 = poly_mul(aA, bA, mod)
    if aB is None and bB is None:
        return p1, None
    if aB is None:
        return p1, poly_mul(aA, bB, mod)
    if bB is None:
        return p1, poly_mul(aB, bA, mod)
    p2 = poly_mul(aB, bB, mod)
    sa = _vadd(aA, aB, mod)
    sb = _vadd(bA, bB, mod)
    cross = _vsub(_vsub(poly_mul(sa, sb, mod), p1, mod), p2, mod)
    cA = _vsub(p1, _vscale(p2, nm % mod, mod), mod)
    cB = _vadd(cross, _vscale(p2, tr % mod, mod), mod)
    return cA, cB


def poly_divmod_ext(aA, aB, d, mod, inv_lead):
    """Division of an extension-coefficient polynomial by a divisor with
    base-field coefficients: the coordinates divide independently."""
    qA, rA = poly_divmod(aA, d, mod, inv_lead)
    if aB is None:
        return qA, None, rA, None
    qB, rB = poly_divmod(aB, d, mod, inv_lead)
    return qA, qB, rA, rB
