"""The tau-twisted ring over truncated Witt vectors and its unit groups.

An element is a tuple (A_0, ..., A_{n-1}) standing for A_0 + A_1*tau + ... +
A_{n-1}*tau^{n-1}, subject to tau*a = a^q*tau and tau^n = pi^k.  A_0 lives in
W_h and the higher slots in W_{h-k} (empty when h <= k).  The unipotent unit
group U consists of elements with leading coordinate of A_0 equal to 1; H is
the subgroup with all higher slots zero.  The module also provides the n-by-n
matrix realization of the ring and exact determinants valued in W_h.
"""

from __future__ import annotations

import itertools

from .witt import (
    EQUAL,
    MIXED,
    WittParams,
    WittVector,
    frobenius_w,
    mult_by_pi,
    witt_add,
    witt_mul,
    witt_inv,
    witt_neg,
    witt_one,
    witt_zero,
)

CASE1 = "Case1"
CASE2 = "Case2"

SUBGROUP_IDS = ("U", "H", "Hprime", "Hplus", "H0prime", "H0plus", "Z")

CENTER_GUARD = 1 << 20


class RingParams:
    __slots__ = ("p", "f", "n", "h", "k", "q", "regime", "hk", "D_deg",
                 "case_tag", "S_flat", "witt_params")

    def __init__(self, p, f, n, h, k, regime=EQUAL):
        assert n >= 2 and h >= 1 and k >= 1
        self.p = p
        self.f = f
        self.n = n
        self.h = h
        self.k = k
        self.q = p**f
        self.regime = regime
        self.hk = max(h - k, 0)
        self.D_deg = (n - 1) * self.hk
        self.case_tag = CASE1 if self.D_deg % 2 == 0 else CASE2
        flat = {j * n for j in range(1, h)}
        flat |= {i + j * n for i in range(1, n) for j in range(self.hk)}
        self.S_flat = tuple(sorted(flat))
        assert len(self.S_flat) == (h - 1) + self.D_deg
        self.witt_params = WittParams(regime, p, f, h)

    def slot_len(self, i):
        return self.h if i == 0 else self.hk

    def key(self):
        return (self.regime, self.p, self.f, self.n, self.h, self.k)

    def __eq__(self, other):
        return isinstance(other, RingParams) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return (f"RingParams(p={self.p}, f={self.f}, n={self.n}, "
                f"h={self.h}, k={self.k}, {self.regime})")


def _trunc(w, keep):
    if keep >= w.params.h:
        return w
    z = w.ctx.zero
    return WittVector(w.params, w.ctx, w.coords[:keep] + (z,) * (w.params.h - keep))


class DlElement:
    __slots__ = ("params", "ctx", "slots")

    def __init__(self, params, ctx, slots):
        self.params = params
        self.ctx = ctx
        self.slots = tuple(slots)
        assert len(self.slots) == params.n

    def flat(self, s):
        """Coordinate at flat index s = i + j*n (slot i, Witt layer j)."""
        return self.slots[s % self.params.n].coords[s // self.params.n]

    def in_U(self):
        return self.slots[0].coords[0] == self.ctx.one

    def key(self):
        return tuple(c.code for s in self.slots for c in s.coords)

    def __mul__(self, other):
        return ring_mul(self, other)

    def __add__(self, other):
        return ring_add(self, other)

    def __eq__(self, other):
        return (
            isinstance(other, DlElement)
            and self.params == other.params
            and self.slots == other.slots
        )

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return "Dl" + repr([tuple(c.coeffs for c in s.coords) for s in self.slots])


def dl_zero(params, ctx):
    z = witt_zero(params.witt_params, ctx)
    return DlElement(params, ctx, (z,) * params.n)


def dl_one(params, ctx):
    z = witt_zero(params.witt_params, ctx)
    return DlElement(params, ctx, (witt_one(params.witt_params, ctx),) + (z,) * (params.n - 1))


def dl_from_flat(params, ctx, values):
    """The unit-group element with the given flat coordinates (rest zero)."""
    coords = [[ctx.zero] * params.h for _ in range(params.n)]
    coords[0][0] = ctx.one
    for s, a in values.items():
        i, j = s % params.n, s // params.n
        assert s in params.S_flat
        coords[i][j] = a
    return DlElement(params, ctx, (WittVector(params.witt_params, ctx, c) for c in coords))


def tau_element(params, ctx):
    assert params.hk >= 1, "tau is zero when h <= k"
    z = witt_zero(params.witt_params, ctx)
    t = _trunc(witt_one(params.witt_params, ctx), params.hk)
    return DlElement(params, ctx, (z, t) + (z,) * (params.n - 2))


def pi_pow_one(params, ctx, e):
    """The element pi^e (in the A_0 slot)."""
    w = witt_one(params.witt_params, ctx)
    for _ in range(e):
        w = mult_by_pi(w)
    z = witt_zero(params.witt_params, ctx)
    return DlElement(params, ctx, (w,) + (z,) * (params.n - 1))


def _check(x, y):
    assert x.params == y.params, "ring params mismatch"
    assert x.ctx is y.ctx


def ring_add(x, y):
    _check(x, y)
    pr = x.params
    return DlElement(pr, x.ctx, (
        _trunc(witt_add(a, b), pr.slot_len(i))
        for i, (a, b) in enumerate(zip(x.slots, y.slots))
    ))


def ring_neg(x):
    pr = x.params
    return DlElement(pr, x.ctx, (
        _trunc(witt_neg(s), pr.slot_len(i)) for i, s in enumerate(x.slots)
    ))


def ring_mul(x, y):
    _check(x, y)
    pr = x.params
    n = pr.n
    out = [witt_zero(pr.witt_params, x.ctx)] * n
    for i in range(n):
        a = x.slots[i]
        if a.is_zero():
            continue
        for j in range(n):
            b = y.slots[j]
            if b.is_zero():
                continue
            t = witt_mul(a, frobenius_w(b, i))
            if i + j >= n:
                for _ in range(pr.k):
                    t = mult_by_pi(t)
            l = (i + j) % n
            out[l] = witt_add(out[l], t)
    return DlElement(pr, x.ctx, (_trunc(w, pr.slot_len(l)) for l, w in enumerate(out)))


def unit_inverse(x):
    if not x.in_U():
        raise ZeroDivisionError("element is not in the unipotent unit group")
    pr = x.params
    one = dl_one(pr, x.ctx)
    v = one
    # residual 1 - x*v squares each round; the augmentation part is nilpotent
    # of class <= n*h, so log-many rounds always suffice
    for _ in range((pr.n * pr.h).bit_length() + 1):
        r = ring_add(one, ring_neg(ring_mul(x, v)))
        if all(s.is_zero() for s in r.slots):
            break
        v = ring_add(v, ring_mul(v, r))
    assert ring_mul(x, v) == one
    # over F_{q^n} the product is associative and the inverse is two-sided;
    # over larger coefficient fields only the right inverse is guaranteed
    d = x.ctx.f * pr.n
    if x.ctx.m % d == 0 and coords_in_subfield(x, pr.n):
        assert ring_mul(v, x) == one
    return v


def galois_on_group(g, j):
    """Coordinatewise q^j-power; an automorphism of the unit group."""
    return DlElement(g.params, g.ctx, (frobenius_w(s, j) for s in g.slots))


def coords_in_subfield(x, m):
    """True when every flat coordinate lies in F_{q^m}."""
    ctx = x.ctx
    d = ctx.f * m
    return all(ctx.in_subfield(x.flat(s), d) for s in x.params.S_flat)


# ---------------------------------------------------------------------------
# subgroups

def _tau_tag(sid, params, s):
    # constraint on a flat coordinate with n not dividing s
    if sid == "U":
        return "free"
    if sid == "H":
        return "zero"
    half2 = params.n * params.hk  # compare 2*s against n*(h-k)
    if sid in ("Hprime", "H0prime"):
        return "zero" if 2 * s <= half2 else "free"
    if sid in ("Hplus", "H0plus"):
        if 2 * s < half2:
            return "zero"
        if 2 * s == half2:
            return "half"
        return "free"
    raise ValueError(f"unknown subgroup id {sid!r}")


class Subgroup:
    """A distinguished subgroup of U(F_{q^m}), with membership test,
    enumerator, and exact order."""

    __slots__ = ("sid", "params", "ctx", "m", "_tau", "_a0", "_zset", "order")

    def __init__(self, sid, params, ctx, m):
        assert sid in SUBGROUP_IDS
        assert ctx.m % (ctx.f * m) == 0, "ambient field too small"
        self.sid = sid
        self.params = params
        self.ctx = ctx
        self.m = m
        qm = params.q**m
        if sid == "Z":
            self._zset = center(params, ctx, m)
            self._tau = None
            self._a0 = None
            self.order = len(self._zset)
            return
        self._tau = [(s, _tau_tag(sid, params, s))
                     for s in params.S_flat if s % params.n]
        self._a0 = "center" if sid in ("H0prime", "H0plus") else "free"
        if self._a0 == "center":
            self._zset = center(params, ctx, m)
            order = len(self._zset)
        else:
            self._zset = None
            order = qm ** (params.h - 1)
        for _, tag in self._tau:
            if tag == "free":
                order *= qm
            elif tag == "half":
                order *= params.q ** (params.n // 2)
        self.order = order

    def _a0_key(self, x):
        return tuple(c.code for c in x.slots[0].coords)

    def contains(self, x):
        if not x.in_U() or not coords_in_subfield(x, self.m):
            return False
        pr, ctx = self.params, self.ctx
        if self.sid == "Z":
            return x in self._zset
        if self._a0 == "center":
            if self._a0_key(x) not in {self._a0_key(z) for z in self._zset}:
                return False
        for s, tag in self._tau:
            a = x.flat(s)
            if tag == "zero":
                if a:
                    return False
            elif tag == "half":
                if not ctx.in_subfield(a, ctx.f * (pr.n // 2)):
                    return False
        return True

    def elements(self):
        pr, ctx = self.params, self.ctx
        if self.sid == "Z":
            yield from self._zset
            return
        dmax = ctx.f * self.m
        free = ctx.subfield_elements(dmax)
        domains = []
        for s, tag in self._tau:
            if tag == "free":
                domains.append([(s, a) for a in free])
            elif tag == "half":
                d = ctx.f * (pr.n // 2)
                assert self.m % (pr.n // 2) == 0, "F_{q^{n/2}} not inside F_{q^m}"
                domains.append([(s, a) for a in ctx.subfield_elements(d)])
            else:
                domains.append([(s, ctx.zero)])
        if self._a0 == "center":
            a0_choices = [tuple((j * pr.n, z.slots[0].coords[j])
                                for j in range(1, pr.h)) for z in self._zset]
        else:
            a0_choices = [tuple((j * pr.n, a) for j, a in enumerate(vec, start=1))
                          for vec in itertools.product(free, repeat=pr.h - 1)]
        for a0 in a0_choices:
            for tau_vals in itertools.product(*domains):
                yield dl_from_flat(pr, ctx, dict(a0 + tau_vals))


def subgroup(sid, params, ctx, m):
    return Subgroup(sid, params, ctx, m)


_center_cache = {}


def center(params, ctx, m):
    """Z(U(F_{q^m})) by exact commutation, verified to lie inside H."""
    key = (params.key(), ctx.m, ctx.f, m)
    if key in _center_cache:
        return _center_cache[key]
    full = subgroup("U", params, ctx, m)
    if full.order > CENTER_GUARD:
        raise ValueError(f"group order {full.order} exceeds center guard {CENTER_GUARD}")
    els = list(full.elements())
    # single-coordinate elements generate; centralizing them is necessary,
    # and the survivors are then checked against the whole group
    qm_field = ctx.subfield_elements(ctx.f * m)
    gens = [dl_from_flat(params, ctx, {s: a}) for s in params.S_flat for a in qm_field if a]
    cand = [x for x in els if all(ring_mul(x, g) == ring_mul(g, x) for g in gens)]
    zs = [x for x in cand if all(ring_mul(x, u) == ring_mul(u, x) for u in els)]
    for z in zs:
        assert all(s.is_zero() for s in z.slots[1:]), "central element outside H"
    _center_cache[key] = zs
    return zs


# ---------------------------------------------------------------------------
# matrix realization

class MatHK:
    """n x n matrix over W_h; strictly upper entries are W_{h-k} classes and
    strictly lower entries carry their pi^k factor already multiplied in."""

    __slots__ = ("params", "ctx", "rows")

    def __init__(self, params, ctx, rows):
        self.params = params
        self.ctx = ctx
        self.rows = tuple(tuple(r) for r in rows)

    def __mul__(self, other):
        assert self.params == other.params and self.ctx is other.ctx
        pr = self.params
        n = pr.n
        out = []
        for i in range(n):
            row = []
            for j in range(n):
                acc = witt_zero(pr.witt_params, self.ctx)
                for l in range(n):
                    a, b = self.rows[i][l], other.rows[l][j]
                    if not (a.is_zero() or b.is_zero()):
                        acc = witt_add(acc, witt_mul(a, b))
                if i < j:
                    acc = _trunc(acc, pr.hk)
                row.append(acc)
            out.append(row)
        return MatHK(pr, self.ctx, out)

    def __eq__(self, other):
        return (
            isinstance(other, MatHK)
            and self.params == other.params
            and self.rows == other.rows
        )

    def key(self):
        return ("mat",) + tuple(c.code for r in self.rows for w in r for c in w.coords)

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return "Mat" + repr([[tuple(c.coeffs for c in w.coords) for w in r] for r in self.rows])


def iota(x):
    """The circulant-with-twist matrix of x; row i applies phi^i and the
    strictly lower entries pick up pi^k."""
    pr, ctx = x.params, x.ctx
    n = pr.n
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            a = frobenius_w(x.slots[(j - i) % n], i)
            if j < i:
                for _ in range(pr.k):
                    a = mult_by_pi(a)
            row.append(a)
        rows.append(row)
    return MatHK(pr, ctx, rows)


def mat_identity(params, ctx):
    z = witt_zero(params.witt_params, ctx)
    one = witt_one(params.witt_params, ctx)
    return MatHK(params, ctx, [
        [one if i == j else z for j in range(params.n)] for i in range(params.n)
    ])


def det_mat(M):
    """Leibniz determinant, valued in W_h."""
    pr, ctx = M.params, M.ctx
    n = pr.n
    acc = witt_zero(pr.witt_params, ctx)
    for perm in itertools.permutations(range(n)):
        term = witt_one(pr.witt_params, ctx)
        for i in range(n):
            e = M.rows[i][perm[i]]
            if e.is_zero():
                term = None
                break
            term = witt_mul(term, e)
        if term is None:
            continue
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        acc = witt_add(acc, witt_neg(term) if inv % 2 else term)
    return acc


def _minor_det(M, del_row, del_col):
    pr, ctx = M.params, M.ctx
    rows = [r for r in range(pr.n) if r != del_row]
    cols = [c for c in range(pr.n) if c != del_col]
    acc = witt_zero(pr.witt_params, ctx)
    for perm in itertools.permutations(range(len(cols))):
        term = witt_one(pr.witt_params, ctx)
        for r, t in zip(rows, perm):
            e = M.rows[r][cols[t]]
            if e.is_zero():
                term = None
                break
            term = witt_mul(term, e)
        if term is None:
            continue
        inv = sum(1 for i in range(len(perm)) for j in range(i + 1, len(perm))
                  if perm[i] > perm[j])
        acc = witt_add(acc, witt_neg(term) if inv % 2 else term)
    return acc


def mat_inverse(M):
    """Two-sided inverse of a matrix with unit determinant, by adjugate.

    Matrices whose strictly lower entries are divisible by pi^k form a subring
    closed under inversion, so the result is again a valid MatHK."""
    pr, ctx = M.params, M.ctx
    n = pr.n
    di = witt_inv(det_mat(M))
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            w = witt_mul(di, _minor_det(M, j, i))
            if (i + j) % 2:
                w = witt_neg(w)
            if i < j:
                w = _trunc(w, pr.hk)
            row.append(w)
        rows.append(row)
    out = MatHK(pr, ctx, rows)
    ident = mat_identity(pr, ctx)
    assert M * out == ident and out * M == ident
    return out
