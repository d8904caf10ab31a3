"""Truncated Witt vectors of length h over finite fields, both regimes.

EqualChar: W_h(A) = A[pi]/pi^h with coefficientwise addition and truncated
series multiplication.  MixedChar: q-typical Witt vectors for an unramified
base (pi = p), with arithmetic given by the universal polynomials S_r, M_r
reduced mod p.  The universal polynomials themselves are built exactly over
the integers (ghost identities checkable symbolically) and cached per
(p, f, r_max).
"""

from __future__ import annotations

from functools import lru_cache

from . import _univpoly
from ._univpoly import SlotOverflow, WPoly

EQUAL = "equal"
MIXED = "mixed"


class WittParams:
    __slots__ = ("regime", "p", "f", "h", "q")

    def __init__(self, regime, p, f, h):
        assert regime in (EQUAL, MIXED)
        assert h >= 0
        self.regime = regime
        self.p = p
        self.f = f
        self.h = h
        self.q = p**f

    def resized(self, h):
        return WittParams(self.regime, self.p, self.f, h)

    def __eq__(self, other):
        return (
            isinstance(other, WittParams)
            and (self.regime, self.p, self.f, self.h)
            == (other.regime, other.p, other.f, other.h)
        )

    def __hash__(self):
        return hash((self.regime, self.p, self.f, self.h))

    def __repr__(self):
        return f"WittParams({self.regime}, p={self.p}, f={self.f}, h={self.h})"


class WittVector:
    __slots__ = ("params", "ctx", "coords")

    def __init__(self, params, ctx, coords):
        self.params = params
        self.ctx = ctx
        self.coords = tuple(coords)
        assert len(self.coords) == params.h

    def __add__(self, other):
        return witt_add(self, other)

    def __mul__(self, other):
        return witt_mul(self, other)

    def __neg__(self):
        return witt_neg(self)

    def __sub__(self, other):
        return self + (-other)

    def __eq__(self, other):
        return (
            isinstance(other, WittVector)
            and self.params == other.params
            and self.coords == other.coords
        )

    def __hash__(self):
        return hash(tuple(c.code for c in self.coords))

    def is_zero(self):
        return all(c.is_zero() for c in self.coords)

    def __repr__(self):
        return f"W{tuple(c.coeffs for c in self.coords)}"


def witt_zero(params, ctx):
    return WittVector(params, ctx, (ctx.zero,) * params.h)


def witt_one(params, ctx):
    if params.h == 0:
        return witt_zero(params, ctx)
    return WittVector(params, ctx, (ctx.one,) + (ctx.zero,) * (params.h - 1))


def teichmuller(a, params):
    ctx = a.ctx
    if params.h == 0:
        return witt_zero(params, ctx)
    return WittVector(params, ctx, (a,) + (ctx.zero,) * (params.h - 1))


# ---------------------------------------------------------------------------
# universal polynomials

class UniversalPolys:
    """Exact S_0..S_r, M_0..M_r for q = p^f, plus their mod-p evaluators."""

    def __init__(self, r_max, p, f):
        self.r_max = r_max
        self.p = p
        self.f = f
        self.q = p**f
        self._ctx_s, self.S = self._build("S", 768 if self.q > 4 else 192)
        self._ctx_m, self.M = self._build("M", 256 if self.q > 4 else 192)
        self._modp = {}

    def _build(self, kind, B):
        while True:
            try:
                return _univpoly.compute_family(kind, self.r_max, self.p, self.q, B)
            except SlotOverflow:
                B *= 2

    def modp_terms(self, kind, r):
        key = (kind, r)
        if key not in self._modp:
            P = (self.S if kind == "S" else self.M)[r]
            self._modp[key] = [
                (c % self.p, xe, ye)
                for c, xe, ye in P.decoded_terms()
                if c % self.p
            ]
        return self._modp[key]

    def verify_ghost(self):
        ok, witness = _univpoly.verify_family("S", self._ctx_s, self.S, self.p, self.q)
        if not ok:
            return ok, witness
        return _univpoly.verify_family("M", self._ctx_m, self.M, self.p, self.q)

    def text(self, kind, r):
        """Canonical text of S_r or M_r: degree-lex sorted integer monomials."""
        P = (self.S if kind == "S" else self.M)[r]
        terms = []
        for c, xe, ye in P.decoded_terms():
            names = [(f"X{i}", e) for i, e in enumerate(xe) if e]
            names += [(f"Y{i}", e) for i, e in enumerate(ye) if e]
            deg = sum(e for _, e in names)
            terms.append((-deg, tuple(names), c))
        terms.sort()
        parts = []
        for _, names, c in terms:
            body = "*".join(n if e == 1 else f"{n}^{e}" for n, e in names)
            mag = abs(c)
            if not body:
                piece = str(mag)
            elif mag == 1:
                piece = body
            else:
                piece = f"{mag}*{body}"
            parts.append(("- " if c < 0 else "+ ") + piece)
        if not parts:
            return "0"
        head = parts[0][2:] if parts[0].startswith("+ ") else "-" + parts[0][2:]
        return " ".join([head] + parts[1:])


@lru_cache(maxsize=None)
def universal_polys(r_max, p, f=1):
    assert r_max >= 0
    return UniversalPolys(r_max, p, f)


# ---------------------------------------------------------------------------
# arithmetic

def _check(u, v):
    assert u.params == v.params, "Witt params mismatch"
    assert u.ctx is v.ctx


def witt_add(u, v):
    _check(u, v)
    params = u.params
    if params.regime == EQUAL:
        return WittVector(params, u.ctx, (a + b for a, b in zip(u.coords, v.coords)))
    return _mixed_eval(u, v, "S")


def witt_mul(u, v):
    _check(u, v)
    params = u.params
    if params.regime == EQUAL:
        h = params.h
        out = [u.ctx.zero] * h
        for i, a in enumerate(u.coords):
            if a:
                for j in range(h - i):
                    b = v.coords[j]
                    if b:
                        out[i + j] = out[i + j] + a * b
        return WittVector(params, u.ctx, out)
    return _mixed_eval(u, v, "M")


def _mixed_eval(u, v, kind):
    params = u.params
    ctx = u.ctx
    if params.h == 0:
        return u
    up = universal_polys(params.h - 1, params.p, params.f)
    x = u.coords
    y = v.coords
    out = []
    for r in range(params.h):
        acc = ctx.zero
        for c, xe, ye in up.modp_terms(kind, r):
            t = _eval_monomial(ctx, c, xe, ye, x, y, r)
            if t is not None:
                acc = acc + t
        out.append(acc)
    return WittVector(params, ctx, out)


def _eval_monomial(ctx, c, xe, ye, x, y, r):
    t = ctx.from_int(c)
    for i in range(r + 1):
        if xe[i]:
            if not x[i]:
                return None
            t = t * x[i] ** xe[i]
        if ye[i]:
            if not y[i]:
                return None
            t = t * y[i] ** ye[i]
    return t


def witt_neg(u):
    # coordinatewise negation is correct in equal characteristic, and in mixed
    # characteristic for odd p (there -u = [-1]*u acts as -1 on every
    # coordinate).  For p = 2 that shortcut fails ([-1] = [1]), so use
    # -u = (p^h - 1)*u, valid because p^h annihilates W_h.
    if u.params.regime == EQUAL or u.params.p != 2:
        return WittVector(u.params, u.ctx, (-c for c in u.coords))
    n = u.params.p ** u.params.h - 1
    acc = witt_zero(u.params, u.ctx)
    base = u
    while n:
        if n & 1:
            acc = witt_add(acc, base)
        n >>= 1
        if n:
            base = witt_add(base, base)
    return acc


# ---------------------------------------------------------------------------
# structure maps

def verschiebung(u):
    if u.params.h == 0:
        return u
    return WittVector(u.params, u.ctx, (u.ctx.zero,) + u.coords[:-1])


def frobenius_w(u, j=1):
    """Coordinatewise q^j-power; a ring endomorphism over perfect fields."""
    from .scalars import frobenius

    return WittVector(u.params, u.ctx, (frobenius(c, u.ctx, j) for c in u.coords))


def mult_by_pi(u):
    if u.params.regime == EQUAL:
        return verschiebung(u)
    return verschiebung(frobenius_w(u, 1))


def top_layer(a, params):
    """The 1-unit with coordinates (1, 0, ..., 0, a); additive in a."""
    assert params.h >= 1
    ctx = a.ctx
    v = teichmuller(a, params)
    for _ in range(params.h - 1):
        v = verschiebung(v)
    return witt_add(witt_one(params, ctx), v)


def witt_inv(u):
    """Inverse of a unit (u_0 != 0), by Newton iteration along the filtration."""
    if u.params.h == 0:
        return u
    if not u.coords[0]:
        raise ZeroDivisionError("Witt vector is not a unit")
    params, ctx = u.params, u.ctx
    one = witt_one(params, ctx)
    v = teichmuller(u.coords[0].inv(), params)
    steps = max(1, params.h.bit_length() + 1)
    for _ in range(steps):
        r = one - witt_mul(u, v)
        if r.is_zero():
            break
        v = v + witt_mul(v, r)
    assert witt_mul(u, v) == one
    return v
