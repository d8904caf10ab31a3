"""Exact integer polynomial engine for Witt universal polynomials.

Every polynomial appearing in the S_r/M_r recursion is isobaric: assigning
weight q^i to X_i and Y_i, all terms of S_r share total weight q^r (and those
of M_r weight 2*q^r).  This module exploits that: a polynomial is a map

    outer monomial in X_1.., Y_1..  ->  inner homogeneous part in (X_0, Y_0)

and the inner part, homogeneous of the degree forced by the weight, is stored
as one big integer (coefficient of X_0^a Y_0^{d-a} in bit-slot a, balanced
base-2^B digits).  Inner multiplication is then a single integer multiply,
which is where almost all of the expansion time goes.

Soundness of the packing: every WPoly carries hbound, an upper bound on its
total l1 coefficient norm, maintained through all operations (l1 is
submultiplicative, so products stay tight).  Any operation whose bound
approaches the slot width raises SlotOverflow and the caller retries with a
wider slot, so packed digits can never silently collide.
"""

from __future__ import annotations

from math import factorial

try:
    from gmpy2 import mpz
except ImportError:  # pragma: no cover
    def mpz(x):
        return x


class SlotOverflow(Exception):
    """Coefficient norm bound got too close to the slot width."""


class PolyCtx:
    def __init__(self, p, q, rmax, B):
        assert B % 8 == 0
        self.p = p
        self.q = q
        self.rmax = rmax
        self.B = B
        self.limit = 1 << (B - 2)
        # outer key layout: exponents of X_1..X_rmax then Y_1..Y_rmax
        self.outer_w = tuple(q**i for i in range(1, rmax + 1)) * 2
        self.zero_key = (0,) * (2 * rmax)

    def outer_weight(self, key):
        return sum(e * w for e, w in zip(key, self.outer_w) if e)


def _balanced_digits(n, B):
    """Balanced base-2^B digits of n, little-endian, trailing zeros trimmed."""
    n = int(n)
    if n == 0:
        return []
    neg = n < 0
    a = -n if neg else n
    nb = B // 8
    raw = a.to_bytes((a.bit_length() + 7) // 8 + nb, "little")
    digits = []
    carry = 0
    half = 1 << (B - 1)
    full = 1 << B
    for off in range(0, len(raw), nb):
        d = int.from_bytes(raw[off : off + nb], "little") + carry
        if d >= half:
            d -= full
            carry = 1
        else:
            carry = 0
        digits.append(d)
    assert carry == 0
    if neg:
        digits = [-d for d in digits]
    while digits and digits[-1] == 0:
        digits.pop()
    return digits


def _pack_digits(digits, B):
    """Inverse of _balanced_digits, linear time via byte assembly."""
    nb = B // 8
    pos = bytearray(nb * len(digits))
    neg = bytearray(nb * len(digits))
    any_neg = False
    for i, d in enumerate(digits):
        if d > 0:
            pos[i * nb : i * nb + (d.bit_length() + 7) // 8] = d.to_bytes(
                (d.bit_length() + 7) // 8, "little"
            )
        elif d < 0:
            any_neg = True
            d = -d
            neg[i * nb : i * nb + (d.bit_length() + 7) // 8] = d.to_bytes(
                (d.bit_length() + 7) // 8, "little"
            )
    packed = mpz(int.from_bytes(bytes(pos), "little"))
    if any_neg:
        packed -= mpz(int.from_bytes(bytes(neg), "little"))
    return packed


class WPoly:
    __slots__ = ("ctx", "weight", "terms", "hbound")

    def __init__(self, ctx, weight, terms, hbound):
        self.ctx = ctx
        self.weight = weight
        self.terms = terms
        self.hbound = hbound
        if hbound >= ctx.limit:
            raise SlotOverflow(hbound.bit_length())

    # -- constructors

    @staticmethod
    def mono(ctx, coeff, xe, ye):
        """coeff * prod X_i^xe[i] * prod Y_i^ye[i]; xe, ye length rmax+1."""
        key = tuple(xe[1:]) + tuple(ye[1:])
        weight = sum(e * ctx.q**i for i, e in enumerate(xe)) + sum(
            e * ctx.q**i for i, e in enumerate(ye)
        )
        if coeff == 0:
            return WPoly(ctx, weight, {}, 1)
        packed = mpz(coeff) << (ctx.B * xe[0])
        return WPoly(ctx, weight, {key: packed}, abs(coeff))

    @staticmethod
    def zero(ctx, weight):
        return WPoly(ctx, weight, {}, 1)

    @staticmethod
    def one(ctx):
        return WPoly.mono(ctx, 1, (0,) * (ctx.rmax + 1), (0,) * (ctx.rmax + 1))

    # -- ring operations

    def __add__(self, other):
        assert self.ctx is other.ctx and self.weight == other.weight
        terms = dict(self.terms)
        for k, v in other.terms.items():
            s = terms.get(k, 0) + v
            if s:
                terms[k] = s
            else:
                terms.pop(k, None)
        return WPoly(self.ctx, self.weight, terms, self.hbound + other.hbound)

    def acc_scaled(self, other, c):
        """In-place self += c*other (construction-time accumulation)."""
        assert self.ctx is other.ctx and self.weight == other.weight
        if c == 0:
            return self
        cz = mpz(c)
        terms = self.terms
        for k, v in other.terms.items():
            s = terms.get(k, 0) + v * cz
            if s:
                terms[k] = s
            else:
                terms.pop(k, None)
        return WPoly(self.ctx, self.weight, terms, self.hbound + other.hbound * abs(c))

    def __sub__(self, other):
        return self + other.scaled(-1)

    def scaled(self, c):
        if c == 0:
            return WPoly.zero(self.ctx, self.weight)
        cz = mpz(c)
        return WPoly(
            self.ctx,
            self.weight,
            {k: v * cz for k, v in self.terms.items()},
            self.hbound * abs(c),
        )

    def __mul__(self, other):
        assert self.ctx is other.ctx
        a, b = self.terms, other.terms
        if len(a) > len(b):
            a, b = b, a
        out = {}
        get = out.get
        for k1, v1 in a.items():
            for k2, v2 in b.items():
                k = tuple(map(int.__add__, k1, k2))
                prod = v1 * v2
                s = get(k)
                out[k] = prod if s is None else s + prod
        out = {k: v for k, v in out.items() if v}
        return WPoly(
            self.ctx, self.weight + other.weight, out, self.hbound * other.hbound
        )

    def pow_seq(self, e):
        """e-th power by repeated multiplication."""
        assert e >= 0
        out = WPoly.one(self.ctx)
        for _ in range(e):
            out = out * self
        return out

    def pow_binary(self, e):
        assert e >= 0
        out = WPoly.one(self.ctx)
        base = self
        while e:
            if e & 1:
                out = out * base
            if e > 1:
                base = base * base
            e >>= 1
        return out

    def pow_blocks(self, e, split_vars):
        """e-th power via multinomial expansion over <= 4 term blocks.

        Blocks group terms by which of the outer variables in split_vars
        (key positions) they touch; block powers are built by repeated
        multiplication, which stays cheap because each block is structured.
        """
        assert e >= 0
        blocks = {}
        for k, v in self.terms.items():
            sig = tuple(k[i] > 0 for i in split_vars)
            blocks.setdefault(sig, {})[k] = v
        # per-block exact l1 norms keep power bounds tight; inheriting the
        # parent bound would inflate by (#blocks)^e under the multinomial
        parts = [
            WPoly(self.ctx, self.weight, t, _l1_of_terms(t, self.ctx.B))
            for t in blocks.values()
        ]
        if len(parts) <= 1:
            return self.pow_seq(e)
        pows = []
        for part in parts:
            cur = [WPoly.one(self.ctx)]
            for _ in range(e):
                cur.append(cur[-1] * part)
            pows.append(cur)
        total = WPoly.zero(self.ctx, self.weight * e)
        fe = factorial(e)
        for comp in _compositions(e, len(parts)):
            c = fe
            for a in comp:
                c //= factorial(a)
            term = pows[0][comp[0]]
            for i in range(1, len(parts)):
                if comp[i]:
                    term = term * pows[i][comp[i]]
            total = total.acc_scaled(term, c)
        return total

    def div_exact(self, n):
        """Divide every coefficient by n, asserting slotwise divisibility."""
        B = self.ctx.B
        out = {}
        l1 = 1
        for k, v in self.terms.items():
            digits = _balanced_digits(v, B)
            for d in digits:
                assert d % n == 0, "non-exact division in Witt recursion"
            quot = [d // n for d in digits]
            packed = _pack_digits(quot, B)
            if packed:
                out[k] = packed
                for d in quot:
                    l1 += d if d > 0 else -d
        # the decode pass gives the exact l1 norm for free; carrying it keeps
        # later power bounds tight
        return WPoly(self.ctx, self.weight, out, l1)

    # -- inspection

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        return (
            isinstance(other, WPoly)
            and self.ctx is other.ctx
            and self.weight == other.weight
            and self.terms == other.terms
        )

    def __hash__(self):  # pragma: no cover
        return hash((self.weight, tuple(sorted(self.terms.items()))))

    def decoded_terms(self):
        """Yield (coeff, xe, ye) with xe/ye exponent tuples of length rmax+1."""
        ctx = self.ctx
        rm = ctx.rmax
        out = []
        for k in sorted(self.terms):
            d = self.weight - ctx.outer_weight(k)
            assert d >= 0
            for a, c in enumerate(_balanced_digits(self.terms[k], ctx.B)):
                if c:
                    assert a <= d
                    out.append((c, (a,) + k[:rm], (d - a,) + k[rm:]))
        return out


def _l1_of_terms(terms, B):
    total = 1
    for v in terms.values():
        for d in _balanced_digits(v, B):
            total += d if d > 0 else -d
    return total


def _compositions(e, parts):
    if parts == 1:
        yield (e,)
        return
    for head in range(e + 1):
        for rest in _compositions(e - head, parts - 1):
            yield (head,) + rest


# ---------------------------------------------------------------------------
# the S_r / M_r recursion

def _xvar(ctx, i):
    xe = [0] * (ctx.rmax + 1)
    xe[i] = 1
    return WPoly.mono(ctx, 1, tuple(xe), (0,) * (ctx.rmax + 1))


def _yvar(ctx, i):
    ye = [0] * (ctx.rmax + 1)
    ye[i] = 1
    return WPoly.mono(ctx, 1, (0,) * (ctx.rmax + 1), tuple(ye))


def _witt_poly(ctx, r, var):
    """W_r = sum p^i Z_i^{q^{r-i}} for Z = X or Y."""
    mk = _xvar if var == "x" else _yvar
    total = WPoly.zero(ctx, ctx.q**r)
    for i in range(r + 1):
        total = total.acc_scaled(mk(ctx, i).pow_binary(ctx.q ** (r - i)), ctx.p**i)
    return total


def _rhs(ctx, r, kind):
    wx = _witt_poly(ctx, r, "x")
    wy = _witt_poly(ctx, r, "y")
    return wx + wy if kind == "S" else wx * wy


def _power(polys, i, e, ctx, symmetric):
    if i == 0 or e == 1:
        return polys[i].pow_binary(e)
    if symmetric:
        split = (i - 1, ctx.rmax + i - 1)  # positions of X_i and Y_i
    else:
        split = (i - 1,)  # X_i only: a different expansion route
    return polys[i].pow_blocks(e, split)


def compute_family(kind, r_max, p, q, B):
    """S_0..S_r or M_0..M_r as exact WPoly; raises SlotOverflow if B is tight."""
    ctx = PolyCtx(p, q, r_max, B)
    if kind == "S":
        polys = [_xvar(ctx, 0) + _yvar(ctx, 0)]
    else:
        polys = [_xvar(ctx, 0) * _yvar(ctx, 0)]
    for r in range(1, r_max + 1):
        num = _rhs(ctx, r, kind)
        for i in range(r):
            num = num.acc_scaled(_power(polys, i, q ** (r - i), ctx, True), -(p**i))
        polys.append(num.div_exact(p**r))
    return ctx, polys


def verify_family(kind, ctx, polys, p, q):
    """Recheck the ghost identity W_r(P) = rhs symbolically for every r.

    Powers are recomposed through an asymmetric block split (or plain repeated
    multiplication), independently of the symmetric path used to build polys.
    """
    for r in range(len(polys)):
        acc = WPoly.zero(ctx, (1 if kind == "S" else 2) * q**r)
        for i in range(r + 1):
            e = q ** (r - i)
            pw = polys[i].pow_seq(e) if i == 0 else _power(polys, i, e, ctx, False)
            acc = acc.acc_scaled(pw, p**i)
        acc = acc.acc_scaled(_rhs(ctx, r, kind), -1)
        if not acc.is_zero():
            return False, (kind, r)
    return True, None
