"""Independent oracle for mixed-characteristic Witt arithmetic.

Coordinates are lifted from F_{p^m} = F_p[x]/(m(x)) to the torsion-free ring
R = Z[x]/(m~(x)), where m~ is the monic integer lift of the modulus.  If w is
the computed sum (resp. product) of u and v, then correctness of all
coordinates below level h is equivalent to the ghost congruences

    W_r(lift w) == W_r(lift u) + W_r(lift v)   (mod p^{r+1})   for r < h

(and with * on the right for products): the r-th coordinates enter the ghost
polynomial with multiplier p^r, and lifts of equal residues differ by p*R, so
the congruence at level r pins coordinate r exactly, by induction on r.
"""


def _lift_modulus(ctx):
    return [int(c) for c in ctx.modulus]


def lift_element(a):
    return [int(c) for c in a.coeffs]


def _poly_mul_mod(a, b, mod, p_bound=None):
    m = len(mod) - 1
    out = [0] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        if ca:
            for j, cb in enumerate(b):
                out[i + j] += ca * cb
    # reduce by the monic modulus
    for d in range(len(out) - 1, m - 1, -1):
        c = out[d]
        if c:
            out[d] = 0
            for j in range(m):
                out[d - m + j] -= c * mod[j]
    out = out[:m] + [0] * (m - len(out))
    return out[:m]


def _poly_pow_mod(a, e, mod):
    m = len(mod) - 1
    out = [1] + [0] * (m - 1)
    base = list(a) + [0] * (m - len(a))
    while e:
        if e & 1:
            out = _poly_mul_mod(out, base, mod)
        if e > 1:
            base = _poly_mul_mod(base, base, mod)
        e >>= 1
    return out


def ghost_component(coords, r, p, q, mod):
    """W_r = sum_{i<=r} p^i z_i^{q^{r-i}} computed in Z[x]/(mod)."""
    m = len(mod) - 1
    acc = [0] * m
    for i in range(r + 1):
        term = _poly_pow_mod(coords[i], q ** (r - i), mod)
        for j in range(m):
            acc[j] += p**i * term[j]
    return acc


def ghost_agrees(u, v, w, op):
    """Check the ghost congruences for w = u op v, op in {'+', '*'}."""
    params = u.params
    p, q, h = params.p, params.q, params.h
    mod = _lift_modulus(u.ctx)
    lu = [lift_element(c) for c in u.coords]
    lv = [lift_element(c) for c in v.coords]
    lw = [lift_element(c) for c in w.coords]
    m = len(mod) - 1
    for r in range(h):
        gw = ghost_component(lw, r, p, q, mod)
        gu = ghost_component(lu, r, p, q, mod)
        gv = ghost_component(lv, r, p, q, mod)
        if op == "+":
            rhs = [a + b for a, b in zip(gu, gv)]
        else:
            rhs = _poly_mul_mod(gu, gv, mod)
            rhs = list(rhs) + [0] * (m - len(rhs))
        pr = p ** (r + 1)
        if any((a - b) % pr for a, b in zip(gw, rhs)):
            return False
    return True
