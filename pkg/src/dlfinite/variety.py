"""The varieties X_h at finite level: membership, enumeration, actions.

X_h consists of the unipotent units whose matrix determinant is fixed by the
q-Frobenius.  Three commuting actions are provided: left multiplication by
H(F_{q^n}) through the diagonal matrix embedding, right multiplication by
U(F_{q^n}), and conjugation by the Teichmueller lift of a fixed generator
zeta of F_{q^n}^x.  The Lang map and its torsor structure, the zeta-fixed
locus, and an exact Lefschetz-type character identity round out the module.
"""

from __future__ import annotations

import itertools

from .dlring import (
    DlElement,
    MatHK,
    _trunc,
    det_mat,
    dl_one,
    galois_on_group,
    iota,
    mat_inverse,
    ring_mul,
    subgroup,
    unit_inverse,
)
from .witt import frobenius_w, teichmuller, witt_mul

ENUM_GUARD = 1 << 24


class XhPoint:
    __slots__ = ("element", "ext_degree")

    def __init__(self, element, ext_degree):
        self.element = element
        self.ext_degree = ext_degree

    def __eq__(self, other):
        return isinstance(other, XhPoint) and self.element == other.element

    def __hash__(self):
        return hash(self.element)

    def __repr__(self):
        return f"XhPoint({self.element!r}, m={self.ext_degree})"


class ActionTriple:
    """(z, h, g) acting by x -> zeta^z (h * x . g) zeta^{-z}."""

    __slots__ = ("z", "h_elt", "g_elt")

    def __init__(self, z, h_elt, g_elt):
        self.z = z
        self.h_elt = h_elt
        self.g_elt = g_elt


def is_member(x):
    """True iff det(iota(x)) is fixed by the q-Frobenius."""
    assert x.in_U()
    d = det_mat(iota(x))
    return frobenius_w(d, 1) == d


def enumerate_xh(params, ctx, m):
    total = (params.q**m) ** len(params.S_flat)
    if total > ENUM_GUARD:
        raise ValueError(f"enumeration size {total} exceeds guard {ENUM_GUARD}")
    U = subgroup("U", params, ctx, m)
    return [XhPoint(x, m) for x in U.elements() if is_member(x)]


def zeta_scalar(params, ctx):
    """The deterministic generator of F_{q^n}^x inside the ambient field."""
    d = ctx.f * params.n
    assert ctx.m % d == 0
    step = (ctx.size - 1) // (params.p**d - 1)
    return ctx.from_code(step)


def scalar_elem(params, ctx, a):
    """The ring element with A_0 the Teichmueller lift of a."""
    z = teichmuller(ctx.zero, params.witt_params)
    return DlElement(params, ctx, (teichmuller(a, params.witt_params),)
                     + (z,) * (params.n - 1))


def conj_by_zeta(x, params, ctx, z=1):
    zs = zeta_scalar(params, ctx)
    left = scalar_elem(params, ctx, zs**z)
    right = scalar_elem(params, ctx, zs ** (-z) if z else ctx.one)
    return ring_mul(ring_mul(left, x), right)


def left_act(h_elt, x):
    """h * x via diag(A_0, phi A_0, ..., phi^{n-1} A_0) . iota(x); asserts the
    product is again in the image of iota."""
    pr, ctx = x.params, x.ctx
    assert all(s.is_zero() for s in h_elt.slots[1:]), "left action needs h in H"
    A0 = h_elt.slots[0]
    n = pr.n
    mx = iota(x)
    rows = []
    for i in range(n):
        s = frobenius_w(A0, i)
        row = []
        for j, e in enumerate(mx.rows[i]):
            w = witt_mul(s, e)
            if i < j:
                w = _trunc(w, pr.hk)
            row.append(w)
        rows.append(row)
    scaled = MatHK(pr, ctx, rows)
    y = DlElement(pr, ctx, (_trunc(w, pr.slot_len(j))
                            for j, w in enumerate(scaled.rows[0])))
    assert iota(y) == scaled, "left action left the image of iota"
    return y


def act(triple, point):
    pr, ctx = point.element.params, point.element.ctx
    from .dlring import coords_in_subfield

    assert coords_in_subfield(triple.h_elt, pr.n)
    assert coords_in_subfield(triple.g_elt, pr.n)
    y = ring_mul(left_act(triple.h_elt, point.element), triple.g_elt)
    y = conj_by_zeta(y, pr, ctx, triple.z)
    return XhPoint(y, point.ext_degree)


def lang(g):
    """L(g) = iota(phi^n g) . iota(g)^{-1}, valued in the matrix ring.

    For g with F_{q^n}-rational coordinates this is iota(phi^n(g) g^{-1});
    over larger coefficient fields the value need not lie in the image of
    iota, so the raw matrix is returned.  Fibers over a common value are
    exact right torsors under U(F_{q^n})."""
    return iota(galois_on_group(g, g.params.n)) * mat_inverse(iota(g))


def lang_fiber_table(params, ctx, m):
    """L-value key -> list of elements of U(F_{q^m}), for fiber inspection."""
    table = {}
    for g in subgroup("U", params, ctx, m).elements():
        table.setdefault(lang(g).key(), []).append(g)
    return table


def fixed_points_zeta(params, ctx, m):
    """Points of X_h(F_{q^m}) fixed by zeta-conjugation; asserted to be
    exactly the H-locus."""
    pts = enumerate_xh(params, ctx, m)
    fixed = []
    for pt in pts:
        if conj_by_zeta(pt.element, params, ctx, 1) == pt.element:
            fixed.append(pt)
    for pt in fixed:
        assert all(s.is_zero() for s in pt.element.slots[1:])
    h_locus = [pt for pt in pts if all(s.is_zero() for s in pt.element.slots[1:])]
    assert {pt.element.key() for pt in fixed} == {pt.element.key() for pt in h_locus}
    return fixed


def lefschetz_identity_check(params, ctx, chi, g_elt):
    """Sum over h of chi(h)^{-1} #Fix(x -> h * x . g) on the zeta-fixed locus
    equals chi(g) |H(F_{q^n})| -- exactly, in the cyclotomic field."""
    n = params.n
    H = list(subgroup("H", params, ctx, n).elements())
    fixed = fixed_points_zeta(params, ctx, n)
    total = None
    for h in H:
        cnt = 0
        for pt in fixed:
            img = ring_mul(left_act(h, pt.element), g_elt)
            if img == pt.element:
                cnt += 1
        if cnt:
            contrib = chi(unit_inverse(h)) * cnt
            total = contrib if total is None else total + contrib
    expect = chi(g_elt) * len(H)
    return total == expect
