"""Pure-Python kernel backend.

Same contract as the compiled backend in ``_ckernels.pyx``: dense
coefficient vectors are plain lists of canonical residues in [0, mod),
mod a positive integer (a power of p in practice).
"""

NAME = "pure"


def mul_schoolbook(a, b, mod):
    """Dense schoolbook product; result has length len(a)+len(b)-1."""
    la, lb = len(a), len(b)
    if la == 0 or lb == 0:
        return []
    out = [0] * (la + lb - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                if bj:
                    out[i + j] += ai * bj
    return [c % mod for c in out]


def divmod_unit(a, d, mod, inv_lead):
    """Euclidean division by d whose leading coefficient has the given
    inverse mod `mod`; returns (quotient, remainder of length < len(d))."""
    dd = len(d) - 1
    r = [c % mod for c in a]
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


def subst_linear(c, s0, s1, mod):
    """Horner evaluation of the composition F(s0 + s1*X)."""
    if not c:
        return []
    out = [0]
    for coeff in reversed(c):
        new = [coeff % mod] + [0] * len(out)
        for i, v in enumerate(out):
            if v:
                new[i] = (new[i] + v * s0) % mod
                new[i + 1] = (new[i + 1] + v * s1) % mod
        out = new
    return out[:len(c)]
