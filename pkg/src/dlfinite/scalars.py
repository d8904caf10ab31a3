"""Exact scalar arithmetic.

Two kinds of scalars back everything else:

* finite fields F_{p^m} with a deterministic modulus and generator, fast
  arithmetic through Zech logarithm tables, and Frobenius/subfield structure;
* cyclotomic numbers (elements of Q(zeta_M) in the power basis) used as exact
  character values.

A single ambient field hosts every extension needed by a computation; subfields
are carved out by the predicate a^{p^d} = a, so no embedding bookkeeping exists.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from functools import lru_cache


# ---------------------------------------------------------------------------
# dense polynomial helpers over F_p (coefficient lists, constant term first)

def _pnorm(a, p):
    a = [c % p for c in a]
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _pnorm(out, p)


def _pmod(a, f, p):
    # f monic
    a = list(a)
    df = len(f) - 1
    for i in range(len(a) - 1, df - 1, -1):
        c = a[i] % p
        if c:
            for j in range(df + 1):
                a[i - df + j] = (a[i - df + j] - c * f[j]) % p
    return _pnorm(a[:df], p)


def _pmulmod(a, b, f, p):
    return _pmod(_pmul(a, b, p), f, p)


def _ppowmod(a, e, f, p):
    r = [1]
    a = _pmod(a, f, p)
    while e:
        if e & 1:
            r = _pmulmod(r, a, f, p)
        a = _pmulmod(a, a, f, p)
        e >>= 1
    return r


def _pgcd(a, b, p):
    a, b = _pnorm(a, p), _pnorm(b, p)
    while b:
        inv = pow(b[-1], -1, p)
        bm = [(c * inv) % p for c in b]
        a, b = b, _pmod(a, bm, p)
    return a


def _prime_factors(n):
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def _is_irreducible(f, p):
    # Rabin's test; f monic of degree m >= 1
    m = len(f) - 1
    x = [0, 1]
    if _ppowmod(x, p**m, f, p) != _pmod(x, f, p):
        return False
    for ell in _prime_factors(m):
        g = _ppowmod(x, p ** (m // ell), f, p)
        d = [(a - b) % p for a, b in itertools.zip_longest(g, x, fillvalue=0)]
        if len(_pgcd(d, f, p)) > 1:
            return False
    return True


def _is_prime(n):
    if n < 2:
        return False
    for d in _prime_factors(n):
        if d != n:
            return False
    return True


# ---------------------------------------------------------------------------
# finite fields

class FieldCtx:
    """The field F_{p^m}, with q = p^f marking the base field of interest.

    Elements are stored by discrete-log code relative to the canonical
    generator (code -1 is zero); addition goes through the Zech table.
    """

    def __init__(self, p, m, f=1):
        if not _is_prime(p):
            raise ValueError(f"p = {p} is not prime")
        if m < 1:
            raise ValueError(f"m = {m} must be >= 1")
        self.p = p
        self.f = f
        self.q = p**f
        self.m = m
        self.size = p**m
        self.modulus = self._find_modulus()
        self._build_tables()
        self.zero = FqElem(self, -1)
        self.one = FqElem(self, 0)
        self.gen = FqElem(self, 1) if self.size > 2 else self.one

    def _find_modulus(self):
        p, m = self.p, self.m
        if m == 1:
            return (0, 1)
        for tail in itertools.product(range(p), repeat=m):
            f = list(tail) + [1]
            if _is_irreducible(f, p):
                return tuple(f)
        raise AssertionError("no irreducible polynomial found")

    def _build_tables(self):
        p, m, s = self.p, self.m, self.size
        mod = list(self.modulus)
        # canonical generator: first primitive element in coefficient-lex order
        gen = None
        factors = _prime_factors(s - 1)
        for vec in itertools.product(range(p), repeat=m):
            a = _pnorm(list(vec), p)
            if not a:
                continue
            if all(_ppowmod(a, (s - 1) // ell, mod, p) != [1] for ell in factors) or s == 2:
                gen = a
                break
        assert gen is not None
        pow_table = []
        cur = [1]
        for _ in range(s - 1):
            vec = tuple(cur + [0] * (m - len(cur)))
            pow_table.append(vec)
            cur = _pmulmod(cur, gen, mod, p)
        log_table = {vec: i for i, vec in enumerate(pow_table)}
        assert len(log_table) == s - 1, "generator is not primitive"
        zech = []
        for i in range(s - 1):
            c = list(pow_table[i])
            c[0] = (c[0] + 1) % p
            zech.append(log_table.get(tuple(c), -1))
        self._pow = pow_table
        self._log = log_table
        self._zech = zech

    # -- element construction

    def elem(self, coeffs):
        """Element from a length-m coefficient vector over F_p (constant first)."""
        vec = tuple(c % self.p for c in coeffs)
        assert len(vec) == self.m
        if all(c == 0 for c in vec):
            return self.zero
        return FqElem(self, self._log[vec])

    def from_int(self, c):
        vec = [c % self.p] + [0] * (self.m - 1)
        return self.elem(vec)

    def from_code(self, code):
        return self.zero if code < 0 else FqElem(self, code % (self.size - 1))

    def elements(self):
        yield self.zero
        for i in range(self.size - 1):
            yield FqElem(self, i)

    def subfield_elements(self, d):
        """All a with a^{p^d} = a; requires d | m."""
        assert self.m % d == 0
        step = (self.size - 1) // (self.p**d - 1)
        out = [self.zero]
        out.extend(FqElem(self, i * step) for i in range(self.p**d - 1))
        return out

    def in_subfield(self, a, d):
        assert self.m % d == 0
        return a.code < 0 or (a.code * (self.p**d - 1)) % (self.size - 1) == 0

    def __repr__(self):
        return f"FieldCtx(p={self.p}, m={self.m}, f={self.f})"


class FqElem:
    __slots__ = ("ctx", "code")

    def __init__(self, ctx, code):
        self.ctx = ctx
        self.code = code

    @property
    def coeffs(self):
        if self.code < 0:
            return (0,) * self.ctx.m
        return self.ctx._pow[self.code]

    def is_zero(self):
        return self.code < 0

    def __bool__(self):
        return self.code >= 0

    def __add__(self, other):
        ctx = self.ctx
        i, j = self.code, other.code
        if i < 0:
            return other
        if j < 0:
            return self
        s1 = ctx.size - 1
        z = ctx._zech[(j - i) % s1]
        if z < 0:
            return ctx.zero
        return FqElem(ctx, (i + z) % s1)

    def __neg__(self):
        ctx = self.ctx
        if self.code < 0 or ctx.p == 2:
            return self
        return FqElem(ctx, (self.code + (ctx.size - 1) // 2) % (ctx.size - 1))

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        ctx = self.ctx
        if self.code < 0 or other.code < 0:
            return ctx.zero
        return FqElem(ctx, (self.code + other.code) % (ctx.size - 1))

    def inv(self):
        if self.code < 0:
            raise ZeroDivisionError("inversion of zero field element")
        ctx = self.ctx
        return FqElem(ctx, (-self.code) % (ctx.size - 1))

    def __pow__(self, e):
        ctx = self.ctx
        if self.code < 0:
            if e == 0:
                return ctx.one
            if e < 0:
                raise ZeroDivisionError("negative power of zero")
            return ctx.zero
        return FqElem(ctx, (self.code * e) % (ctx.size - 1))

    def __eq__(self, other):
        return isinstance(other, FqElem) and self.ctx is other.ctx and self.code == other.code

    def __hash__(self):
        return hash((id(self.ctx), self.code))

    def __repr__(self):
        return f"Fq{self.coeffs}"


@lru_cache(maxsize=None)
def field_make(p, m, f=1):
    return FieldCtx(p, m, f)


def frobenius(a, ctx, j=1):
    """a^{q^j}; j may be negative (q is invertible modulo the group order)."""
    if a.code < 0:
        return a
    s1 = ctx.size - 1
    e = pow(ctx.q, j, s1) if j >= 0 else pow(pow(ctx.q, -1, s1), -j, s1)
    return FqElem(ctx, (a.code * e) % s1)


def galois_data(a, ctx, n):
    """Orbit of a under x -> x^q within F_{q^n}, and stabilizer triviality."""
    if not ctx.in_subfield(a, ctx.f * n):
        raise ValueError("element outside F_{q^n}")
    orbit = [a]
    b = frobenius(a, ctx, 1)
    while b != a:
        orbit.append(b)
        b = frobenius(b, ctx, 1)
    return orbit, len(orbit) == n


# ---------------------------------------------------------------------------
# cyclotomic numbers

def _cyclotomic_poly(M):
    """Coefficients of Phi_M, constant first, by exact division of x^M - 1."""
    num = [0] * M + [1]
    num[0] = -1
    for d in range(1, M):
        if M % d == 0:
            phi_d = _cyclotomic_poly(d)
            num = _zdiv_exact(num, phi_d)
    return num


def _zdiv_exact(a, b):
    # exact division of integer polynomials, b monic up to sign handled by b[-1] in {1,-1}
    a = list(a)
    out = [0] * (len(a) - len(b) + 1)
    lead = b[-1]
    for i in range(len(out) - 1, -1, -1):
        c = a[i + len(b) - 1]
        assert c % lead == 0
        c //= lead
        out[i] = c
        if c:
            for j, bj in enumerate(b):
                a[i + j] -= c * bj
    assert all(c == 0 for c in a[: len(b) - 1])
    return out


class CycCtx:
    """The cyclotomic field Q(zeta_M) in the power basis 1, z, ..., z^{phi-1}."""

    def __init__(self, M):
        assert M >= 1
        self.M = M
        phi_poly = _cyclotomic_poly(M)
        self.deg = len(phi_poly) - 1
        # red[t] = coordinates of x^t mod Phi_M, enough for products and twists
        limit = max(M, 2 * self.deg - 1)
        red = []
        cur = [0] * self.deg
        if self.deg > 0:
            cur = [1] + [0] * (self.deg - 1)
        red.append(tuple(cur))
        for t in range(1, limit):
            nxt = [0] + list(red[-1][:-1]) if self.deg > 1 else [0]
            top = red[-1][-1] if self.deg >= 1 else 0
            if self.deg == 1:
                nxt = [0]
                top = red[-1][0]
            if top:
                for j in range(self.deg):
                    nxt[j] -= top * phi_poly[j]
            red.append(tuple(nxt))
        self._red = red
        self.zero = CycNumber(self, (Fraction(0),) * self.deg)
        self.one = self.from_rational(1)

    def from_rational(self, r):
        v = [Fraction(0)] * self.deg
        r = Fraction(r)
        for j, c in enumerate(self._red[0]):
            v[j] += r * c
        return CycNumber(self, tuple(v))

    def zeta_pow(self, e):
        e %= self.M
        return CycNumber(self, tuple(Fraction(c) for c in self._red[e]))

    def __repr__(self):
        return f"CycCtx(M={self.M})"


@lru_cache(maxsize=None)
def cyc_context(M):
    return CycCtx(M)


def zeta(M, e=1):
    return cyc_context(M).zeta_pow(e)


def cyc_rational(M, r):
    return cyc_context(M).from_rational(r)


class CycNumber:
    __slots__ = ("ctx", "coeffs")

    def __init__(self, ctx, coeffs):
        self.ctx = ctx
        self.coeffs = coeffs

    def _coerce(self, other):
        if isinstance(other, CycNumber):
            if other.ctx is self.ctx:
                return other
            raise ValueError("cyclotomic orders differ; lift explicitly via lift_to")
        return self.ctx.from_rational(other)

    def lift_to(self, M):
        """Image in Q(zeta_M) for self.ctx.M | M."""
        assert M % self.ctx.M == 0
        k = M // self.ctx.M
        tgt = cyc_context(M)
        out = tgt.zero
        for e, c in enumerate(self.coeffs):
            if c:
                out = out + CycNumber(tgt, tuple(c * x for x in tgt.zeta_pow(e * k).coeffs))
        return out

    def __add__(self, other):
        other = self._coerce(other)
        return CycNumber(self.ctx, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return CycNumber(self.ctx, tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return CycNumber(self.ctx, tuple(a * other for a in self.coeffs))
        other = self._coerce(other)
        d = self.ctx.deg
        conv = [Fraction(0)] * (2 * d - 1 if d else 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    if b:
                        conv[i + j] += a * b
        out = [Fraction(0)] * d
        red = self.ctx._red
        for t, c in enumerate(conv):
            if c:
                for j, r in enumerate(red[t]):
                    if r:
                        out[j] += c * r
        return CycNumber(self.ctx, tuple(out))

    __rmul__ = __mul__

    def __truediv__(self, other):
        assert isinstance(other, (int, Fraction))
        return CycNumber(self.ctx, tuple(a / Fraction(other) for a in self.coeffs))

    def __pow__(self, e):
        assert e >= 0
        acc = self.ctx.one
        base = self
        while e:
            if e & 1:
                acc = acc * base
            base = base * base
            e >>= 1
        return acc

    def galois_twist(self, j):
        M = self.ctx.M
        from math import gcd
        if gcd(j, M) != 1:
            raise ValueError(f"twist exponent {j} not coprime to {M}")
        out = [Fraction(0)] * self.ctx.deg
        red = self.ctx._red
        for e, c in enumerate(self.coeffs):
            if c:
                for t, r in enumerate(red[(e * j) % M]):
                    if r:
                        out[t] += c * r
        return CycNumber(self.ctx, tuple(out))

    def conjugate(self):
        return self.galois_twist(self.ctx.M - 1) if self.ctx.M > 1 else self

    def is_zero(self):
        return all(c == 0 for c in self.coeffs)

    def is_rational(self):
        return all(c == 0 for c in self.coeffs[1:]) if self.ctx.deg > 1 else True

    def rational_value(self):
        assert self.is_rational()
        return self.coeffs[0] if self.ctx.deg else Fraction(0)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ctx.from_rational(other)
        return (
            isinstance(other, CycNumber)
            and self.ctx is other.ctx
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.ctx.M, self.coeffs))

    def __repr__(self):
        return f"Cyc(M={self.ctx.M}, {[str(c) for c in self.coeffs]})"
