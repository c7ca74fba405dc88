# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled kernel backend: same contract as ``pure.py``.

Coefficients are arbitrary-size Python ints (residues mod p^W easily
exceed machine words), so the win here is removing interpreter dispatch
from the O(n^2) loops, not native-word arithmetic.
"""

NAME = "cython"


def mul_schoolbook(list a, list b, mod):
    cdef Py_ssize_t la = len(a), lb = len(b)
    cdef Py_ssize_t i, j
    if la == 0 or lb == 0:
        return []
    cdef list out = [0] * (la + lb - 1)
    cdef object ai, bj, acc
    for i in range(la):
        ai = a[i]
        if ai:
            for j in range(lb):
                bj = b[j]
                if bj:
                    acc = out[i + j]
                    out[i + j] = acc + ai * bj
    for i in range(la + lb - 1):
        out[i] = out[i] % mod
    return out


def divmod_unit(list a, list d, mod, inv_lead):
    cdef Py_ssize_t dd = len(d) - 1
    cdef Py_ssize_t i, j, base
    cdef list r = [c % mod for c in a]
    cdef list q
    cdef object c, f, dj
    if dd == 0:
        return [c * inv_lead % mod for c in r], []
    if len(r) <= dd:
        return [], r
    q = [0] * (len(r) - dd)
    for i in range(len(r) - 1, dd - 1, -1):
        c = r[i]
        if c:
            f = c * inv_lead % mod
            q[i - dd] = f
            if f:
                base = i - dd
                for j in range(dd):
                    dj = d[j]
                    if dj:
                        r[base + j] = (r[base + j] - f * dj) % mod
            r[i] = 0
    return q, r[:dd]


def subst_linear(list c, s0, s1, mod):
    cdef Py_ssize_t n = len(c), i, step
    cdef list out, new
    cdef object v, coeff
    if n == 0:
        return []
    out = [0]
    for step in range(n - 1, -1, -1):
        coeff = c[step]
        new = [coeff % mod] + [0] * len(out)
        for i in range(len(out)):
            v = out[i]
            if v:
                new[i] = (new[i] + v * s0) % mod
                new[i + 1] = (new[i + 1] + v * s1) % mod
        out = new
    return out[:n]
