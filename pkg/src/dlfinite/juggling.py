"""Juggling-sequence combinatorics and the defining polynomials of X_h.

A juggling sequence of period n is a tuple (j_1, ..., j_n) of nonnegative
integers with i + j_i pairwise distinct mod n; it determines a permutation
sigma with j_i = sigma(i) - i mod n.  Summing signed monomials over the
admissible sequences produces the polynomials g_{mn} whose simultaneous
vanishing cuts out X_h inside U (equal characteristic).  An independent
symbolic-determinant construction of the same polynomials is provided as an
oracle.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

from .dlring import RingParams, dl_from_flat, ring_mul, subgroup
from .scalars import field_make
from .witt import EQUAL


class JugglingSequence:
    __slots__ = ("n", "entries")

    def __init__(self, entries):
        entries = tuple(int(e) for e in entries)
        assert all(e >= 0 for e in entries)
        n = len(entries)
        landing = [(i + e) % n for i, e in enumerate(entries)]
        if len(set(landing)) != n:
            raise ValueError(f"not a juggling sequence: {entries}")
        self.n = n
        self.entries = entries

    def sigma(self):
        """The permutation i -> i + j_i mod n (zero-based)."""
        return tuple((i + e) % self.n for i, e in enumerate(self.entries))

    def __eq__(self, other):
        return isinstance(other, JugglingSequence) and self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    def __repr__(self):
        return f"Jugg{self.entries}"


def perm_sign(sigma):
    inv = sum(1 for i in range(len(sigma)) for j in range(i + 1, len(sigma))
              if sigma[i] > sigma[j])
    return -1 if inv % 2 else 1


def jugg_stats(j):
    """(sigma, sign, anti-exceedance count, ball count) of a valid sequence."""
    sigma = j.sigma()
    f = sum(1 for i, s in enumerate(sigma) if i > s)
    return sigma, perm_sign(sigma), f, Fraction(sum(j.entries), j.n)


def cyclic_shift(j):
    return JugglingSequence(j.entries[1:] + j.entries[:1])


def shape_tag(j):
    """Canonical representative of the sequence up to cyclic shifts."""
    rots = [j.entries[i:] + j.entries[:i] for i in range(j.n)]
    return min(rots)


def minimal_sequence(sigma):
    """The entrywise-smallest juggling sequence with the given permutation."""
    n = len(sigma)
    return JugglingSequence(tuple((sigma[i] - i) % n for i in range(n)))


def enumerate_jugg(params, m):
    """Valid sequences with entries in S_flat + {0} and |j| = (m - (k-1) f_j) n."""
    assert 1 <= m <= params.h - 1
    pool = (0,) + params.S_flat
    out = []
    for entries in itertools.product(pool, repeat=params.n):
        if sum(entries) > m * params.n:
            continue
        try:
            j = JugglingSequence(entries)
        except ValueError:
            continue
        _, _, f, _ = jugg_stats(j)
        if sum(entries) == (m - (params.k - 1) * f) * params.n:
            out.append(j)
    return out


# ---------------------------------------------------------------------------
# exact multivariate polynomials over F_p

class SymPoly:
    """Polynomial over F_p in the variables x_s, s a flat coordinate index.

    Terms map a sorted ((s, exponent), ...) monomial to a nonzero coefficient
    in 0 < c < p; the representation is canonical.
    """

    __slots__ = ("p", "terms")

    def __init__(self, p, terms=None):
        self.p = p
        self.terms = dict(terms or {})

    @staticmethod
    def const(p, c):
        c %= p
        return SymPoly(p, {(): c} if c else {})

    @staticmethod
    def var(p, s, e=1):
        return SymPoly(p, {((s, e),): 1})

    def is_zero(self):
        return not self.terms

    def _with(self, terms):
        return SymPoly(self.p, terms)

    def __add__(self, other):
        assert self.p == other.p
        out = dict(self.terms)
        for mono, c in other.terms.items():
            c2 = (out.get(mono, 0) + c) % self.p
            if c2:
                out[mono] = c2
            else:
                out.pop(mono, None)
        return self._with(out)

    def __neg__(self):
        return self._with({m: self.p - c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        assert self.p == other.p
        out = {}
        for m1, c1 in self.terms.items():
            d1 = dict(m1)
            for m2, c2 in other.terms.items():
                d = dict(d1)
                for s, e in m2:
                    d[s] = d.get(s, 0) + e
                mono = tuple(sorted(d.items()))
                c = (out.get(mono, 0) + c1 * c2) % self.p
                if c:
                    out[mono] = c
                else:
                    out.pop(mono, None)
        return self._with(out)

    def qpow(self, q, e=1):
        """self**(q**e); exact because q is a power of the characteristic."""
        mult = q**e
        return self._with({
            tuple((s, x * mult) for s, x in mono): c for mono, c in self.terms.items()
        })

    def evaluate(self, values, ctx):
        acc = ctx.zero
        for mono, c in self.terms.items():
            t = ctx.from_int(c)
            for s, e in mono:
                t = t * values[s] ** e
            acc = acc + t
        return acc

    def __eq__(self, other):
        return isinstance(other, SymPoly) and self.p == other.p and self.terms == other.terms

    def __hash__(self):
        return hash((self.p, tuple(sorted(self.terms.items()))))

    def text(self):
        """Canonical text: lexicographic on exponents, highest variable first,
        largest exponents first (so e.g. `x2^4 + x2 + x1^6 + x1^3`)."""
        if not self.terms:
            return "0"
        allvars = sorted({s for mono in self.terms for s, _ in mono}, reverse=True)
        def key(item):
            d = dict(item[0])
            return tuple(-d.get(s, 0) for s in allvars)
        parts = []
        for mono, c in sorted(self.terms.items(), key=key):
            # balanced coefficient: p - 1 prints as -1 etc.
            neg = c > self.p // 2 and self.p > 2
            mag = self.p - c if neg else c
            body = "*".join(f"x{s}" if e == 1 else f"x{s}^{e}" for s, e in mono)
            if not body:
                piece = str(mag)
            elif mag == 1:
                piece = body
            else:
                piece = f"{mag}*{body}"
            parts.append(("- " if neg else "+ ") + piece)
        head = parts[0][2:] if parts[0].startswith("+ ") else "-" + parts[0][2:]
        return " ".join([head] + parts[1:])

    def __repr__(self):
        return f"SymPoly({self.text()})"


# ---------------------------------------------------------------------------
# the polynomials g_{mn}

def build_gr(params, m):
    """g_{mn} as a signed sum over juggling sequences (equal characteristic)."""
    if params.regime != EQUAL:
        raise ValueError("g_r is symbolic only in equal characteristic; "
                         "use the pointwise determinant in mixed characteristic")
    p, q, n = params.p, params.q, params.n
    one = SymPoly.const(p, 1)
    acc = SymPoly(p)
    for j in enumerate_jugg(params, m):
        _, sign, _, _ = jugg_stats(j)
        term = SymPoly.const(p, sign)
        for i, s in enumerate(j.entries[:-1], start=1):
            factor = one if s == 0 else SymPoly.var(p, s).qpow(q, i)
            term = term * factor
        last = j.entries[-1]
        tail = (one.qpow(q, n) - one) if last == 0 else \
            SymPoly.var(p, last).qpow(q, n) - SymPoly.var(p, last)
        acc = acc + term * tail
    return acc


# ---------------------------------------------------------------------------
# symbolic-determinant oracle

def _pp_mul(a, b, h):
    out = [None] * h
    for i, pa in enumerate(a):
        if pa.is_zero():
            continue
        for j, pb in enumerate(b):
            if i + j >= h:
                break
            t = pa * pb
            out[i + j] = t if out[i + j] is None else out[i + j] + t
    p = a[0].p
    return [SymPoly(p) if c is None else c for c in out]


def _pp_frob(a, q, e):
    return [c.qpow(q, e) for c in a]


def _generic_matrix(params):
    """iota of the generic unit, entries as pi-adic lists of SymPoly."""
    p, q, n, h, k, hk = params.p, params.q, params.n, params.h, params.k, params.hk
    zero = SymPoly(p)
    slots = []
    for i in range(n):
        L = h if i == 0 else hk
        coords = [SymPoly.var(p, i + jj * n) for jj in range(L)]
        if i == 0:
            coords[0] = SymPoly.const(p, 1)
        slots.append(coords + [zero] * (h - L))
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            a = _pp_frob(slots[(j - i) % n], q, i)
            if j < i:
                a = [zero] * k + a[: h - k]  # multiply by pi^k
            row.append(a)
        rows.append(row)
    return rows


def det_c_coeff(params, m):
    """The pi^m coefficient c_m of det(iota(generic unit))."""
    assert params.regime == EQUAL
    n, h, p = params.n, params.h, params.p
    if n > 3 or h > 4:
        raise ValueError(f"symbolic determinant guard: n={n} > 3 or h={h} > 4")
    rows = _generic_matrix(params)
    det = [SymPoly(p) for _ in range(h)]
    for perm in itertools.permutations(range(n)):
        term = [SymPoly.const(p, 1)] + [SymPoly(p)] * (h - 1)
        for i in range(n):
            term = _pp_mul(term, rows[i][perm[i]], h)
        if perm_sign(perm) < 0:
            term = [-c for c in term]
        det = [d + t for d, t in zip(det, term)]
    assert det[0] == SymPoly.const(p, 1)
    return det[m]


def symbolic_det_c(params, m):
    """c_m^q - c_m: the defining polynomial of X_h from the determinant side."""
    c = det_c_coeff(params, m)
    return c.qpow(params.q, 1) - c


# ---------------------------------------------------------------------------
# descent invariance

def hprime_flat_indices(params):
    """I: the flat coordinates free in H'; J: those pinned to zero (the
    coordinates of the section U/H' -> U)."""
    half2 = params.n * params.hk
    I, J = [], []
    for s in params.S_flat:
        if s % params.n and 2 * s <= half2:
            J.append(s)
        else:
            I.append(s)
    return I, J


def section_element(params, ctx, values):
    """s(x) = 1 + sum over J of V^j(x_s) tau^i for s = i + j*n."""
    _, J = hprime_flat_indices(params)
    assert set(values) == set(J)
    return dl_from_flat(params, ctx, values)


def descent_invariance_check(params, trials=100, seed=0, delta_all=True):
    """g_r(s(x) y) = g_r(s(x) y delta) for rational delta in H'.

    Randomized over y in H' and x over F_{q^{2n}}; witnesses any failure.
    """
    assert params.regime == EQUAL
    n = params.n
    ctx = field_make(params.p, params.f * 2 * n, params.f)
    rng = random.Random(seed)
    I, J = hprime_flat_indices(params)
    gs = [build_gr(params, m) for m in range(1, params.h)]
    Hp = subgroup("Hprime", params, ctx, n)
    deltas = list(Hp.elements())
    big = list(ctx.elements())
    failures = []
    total = 0
    for _ in range(trials):
        x = section_element(params, ctx, {s: rng.choice(big) for s in J})
        y = dl_from_flat(params, ctx, {s: rng.choice(big) for s in I})
        base = ring_mul(x, y)
        vals0 = {s: base.flat(s) for s in params.S_flat}
        picks = deltas if delta_all else rng.sample(deltas, min(4, len(deltas)))
        for d in picks:
            moved = ring_mul(x, ring_mul(y, d))
            vals1 = {s: moved.flat(s) for s in params.S_flat}
            total += 1
            for r, g in enumerate(gs, start=1):
                a = g.evaluate(vals0, ctx)
                b = g.evaluate(vals1, ctx)
                if a != b:
                    failures.append({"r": r * n, "x": vals0, "delta": d})
    return {"trials": trials, "comparisons": total, "failures": failures,
            "ok": not failures}
