import random

import pytest
from hypothesis import given, settings, strategies as st

from dlfinite import _univpoly
from dlfinite.scalars import field_make, frobenius
from dlfinite.witt import (
    EQUAL,
    MIXED,
    UniversalPolys,
    WittParams,
    WittVector,
    frobenius_w,
    mult_by_pi,
    teichmuller,
    top_layer,
    universal_polys,
    verschiebung,
    witt_add,
    witt_inv,
    witt_mul,
    witt_neg,
    witt_one,
    witt_zero,
)
from witt_oracle import ghost_agrees

SMALL = [(2, 1, 2), (3, 1, 2), (2, 1, 3), (2, 2, 2)]  # (p, f, h)


def rand_vec(params, ctx, rng):
    els = list(ctx.elements())
    return WittVector(params, ctx, (rng.choice(els) for _ in range(params.h)))


def naive_equal_mul(u, v):
    # truncated series convolution, written independently of witt_mul
    h = u.params.h
    out = [u.ctx.zero] * h
    for k in range(h):
        for i in range(k + 1):
            out[k] = out[k] + u.coords[i] * v.coords[k - i]
    return WittVector(u.params, u.ctx, out)


class TestRingAxioms:
    @pytest.mark.parametrize("regime", [EQUAL, MIXED])
    @pytest.mark.parametrize("p,f,h", SMALL)
    def test_axioms_random(self, regime, p, f, h):
        params = WittParams(regime, p, f, h)
        ctx = field_make(p, 2 * f, f=f)
        rng = random.Random(42)
        one = witt_one(params, ctx)
        zero = witt_zero(params, ctx)
        for _ in range(60):
            a, b, c = (rand_vec(params, ctx, rng) for _ in range(3))
            assert (a + b) + c == a + (b + c)
            assert (a * b) * c == a * (b * c)
            assert a * (b + c) == a * b + a * c
            assert a + b == b + a and a * b == b * a
            assert a + zero == a and a * one == a
            assert a + witt_neg(a) == zero

    @pytest.mark.parametrize("regime", [EQUAL, MIXED])
    def test_neutral_elements(self, regime):
        params = WittParams(regime, 2, 1, 3)
        ctx = field_make(2, 2)
        assert witt_one(params, ctx).coords[0] == ctx.one
        assert witt_zero(params, ctx).is_zero()


class TestEqualChar:
    def test_mul_is_series_convolution(self):
        params = WittParams(EQUAL, 2, 1, 3)
        ctx = field_make(2, 2)
        rng = random.Random(5)
        for _ in range(100):
            u, v = rand_vec(params, ctx, rng), rand_vec(params, ctx, rng)
            assert u * v == naive_equal_mul(u, v)

    def test_h2_product_formula(self):
        params = WittParams(EQUAL, 3, 1, 2)
        ctx = field_make(3, 2)
        rng = random.Random(6)
        for _ in range(50):
            u, v = rand_vec(params, ctx, rng), rand_vec(params, ctx, rng)
            w = u * v
            assert w.coords[0] == u.coords[0] * v.coords[0]
            assert w.coords[1] == u.coords[0] * v.coords[1] + u.coords[1] * v.coords[0]

    def test_add_coefficientwise(self):
        params = WittParams(EQUAL, 2, 1, 3)
        ctx = field_make(2, 1)
        rng = random.Random(7)
        for _ in range(20):
            u, v = rand_vec(params, ctx, rng), rand_vec(params, ctx, rng)
            w = u + v
            assert all(w.coords[i] == u.coords[i] + v.coords[i] for i in range(3))


class TestMixedChar:
    def test_two_plus_two(self):
        # 1 + 1 = 2 has 2-typical coordinates (0, 1)
        params = WittParams(MIXED, 2, 1, 2)
        ctx = field_make(2, 1)
        one = witt_one(params, ctx)
        s = one + one
        assert s.coords == (ctx.zero, ctx.one)

    @pytest.mark.parametrize("p,f,h", SMALL)
    def test_ghost_oracle_random(self, p, f, h):
        params = WittParams(MIXED, p, f, h)
        ctx = field_make(p, 2 * f, f=f)
        rng = random.Random(11)
        for _ in range(60):
            u, v = rand_vec(params, ctx, rng), rand_vec(params, ctx, rng)
            assert ghost_agrees(u, v, u + v, "+")
            assert ghost_agrees(u, v, u * v, "*")

    def test_p_torsion_of_one(self):
        # summing 1 with itself p^h times reaches 0
        for p, f, h in SMALL:
            params = WittParams(MIXED, p, f, h)
            ctx = field_make(p, f, f=f)
            acc = witt_zero(params, ctx)
            one = witt_one(params, ctx)
            for _ in range(p**h):
                acc = acc + one
            assert acc.is_zero()


class TestStructureMaps:
    @pytest.mark.parametrize("regime", [EQUAL, MIXED])
    def test_teichmuller_multiplicative(self, regime):
        params = WittParams(regime, 3, 1, 3)
        ctx = field_make(3, 2)
        for a in ctx.elements():
            for b in list(ctx.elements())[:4]:
                lhs = witt_mul(teichmuller(a, params), teichmuller(b, params))
                assert lhs == teichmuller(a * b, params)

    @pytest.mark.parametrize("regime", [EQUAL, MIXED])
    def test_verschiebung_additive(self, regime):
        params = WittParams(regime, 2, 1, 3)
        ctx = field_make(2, 2)
        rng = random.Random(13)
        for _ in range(40):
            u, v = rand_vec(params, ctx, rng), rand_vec(params, ctx, rng)
            assert verschiebung(u + v) == verschiebung(u) + verschiebung(v)

    @pytest.mark.parametrize("regime", [EQUAL, MIXED])
    def test_frobenius_is_ring_hom(self, regime):
        params = WittParams(regime, 2, 2, 2)
        ctx = field_make(2, 4, f=2)
        rng = random.Random(17)
        for _ in range(40):
            u, v = rand_vec(params, ctx, rng), rand_vec(params, ctx, rng)
            assert frobenius_w(u + v) == frobenius_w(u) + frobenius_w(v)
            assert frobenius_w(u * v) == frobenius_w(u) * frobenius_w(v)

    def test_mult_by_pi_equal_is_series_shift(self):
        params = WittParams(EQUAL, 2, 1, 3)
        ctx = field_make(2, 2)
        rng = random.Random(19)
        pi = WittVector(params, ctx, (ctx.zero, ctx.one, ctx.zero))
        for _ in range(30):
            u = rand_vec(params, ctx, rng)
            assert mult_by_pi(u) == witt_mul(pi, u)

    def test_mult_by_pi_mixed_is_mult_by_p(self):
        params = WittParams(MIXED, 3, 1, 2)
        ctx = field_make(3, 2)
        rng = random.Random(23)
        for _ in range(30):
            u = rand_vec(params, ctx, rng)
            acc = witt_zero(params, ctx)
            for _ in range(3):
                acc = acc + u
            assert mult_by_pi(u) == acc

    @pytest.mark.parametrize("regime", [EQUAL, MIXED])
    def test_top_layer_turns_addition_into_multiplication(self, regime):
        params = WittParams(regime, 2, 1, 3)
        ctx = field_make(2, 2)
        for a in ctx.elements():
            for b in ctx.elements():
                lhs = witt_mul(top_layer(a, params), top_layer(b, params))
                assert lhs == top_layer(a + b, params)

    @pytest.mark.parametrize("regime", [EQUAL, MIXED])
    def test_unit_inverse(self, regime):
        params = WittParams(regime, 2, 1, 3)
        ctx = field_make(2, 2)
        rng = random.Random(29)
        one = witt_one(params, ctx)
        for _ in range(40):
            u = rand_vec(params, ctx, rng)
            if u.coords[0].is_zero():
                with pytest.raises(ZeroDivisionError):
                    witt_inv(u)
            else:
                assert witt_mul(u, witt_inv(u)) == one


class TestUniversalPolys:
    def test_level_zero(self):
        up = universal_polys(0, 2)
        assert up.text("S", 0) == "X0 + Y0"
        assert up.text("M", 0) == "X0*Y0"

    def test_s1_closed_form_p2(self):
        # S_1 = X_1 + Y_1 + (X_0^2 + Y_0^2 - (X_0+Y_0)^2)/2
        assert universal_polys(1, 2).text("S", 1) == "-X0*Y0 + X1 + Y1"

    def test_s1_closed_form_p3(self):
        up = universal_polys(1, 3)
        assert up.text("S", 1) == "-X0*Y0^2 - X0^2*Y0 + X1 + Y1"

    def test_m1_q2(self):
        assert universal_polys(1, 2).text("M", 1) == "X0^2*Y1 + X1*Y0^2 + 2*X1*Y1"

    @pytest.mark.parametrize("p,f", [(2, 1), (3, 1), (2, 2)])
    def test_ghost_identities(self, p, f):
        up = universal_polys(3, p, f)
        ok, witness = up.verify_ghost()
        assert ok, witness

    def test_integrality_assertion_trips_on_bad_division(self):
        ctx = _univpoly.PolyCtx(2, 2, 1, 64)
        x0 = _univpoly._xvar(ctx, 0)
        with pytest.raises(AssertionError):
            x0.div_exact(3)


# ---------------------------------------------------------------------------
# packed-polynomial engine vs a naive exponent-dict model


def naive_mul(a, b):
    out = {}
    for (xe1, ye1), c1 in a.items():
        for (xe2, ye2), c2 in b.items():
            k = (
                tuple(i + j for i, j in zip(xe1, xe2)),
                tuple(i + j for i, j in zip(ye1, ye2)),
            )
            out[k] = out.get(k, 0) + c1 * c2
    return {k: v for k, v in out.items() if v}


def naive_pow(a, e):
    out = None
    for _ in range(e):
        out = dict(a) if out is None else naive_mul(out, a)
    return out if out is not None else {}


def to_naive(P):
    return {(xe, ye): c for c, xe, ye in P.decoded_terms()}


def monomials_of_weight(w, q, rmax):
    """All (xe, ye) exponent tuples with sum e_i * q^i = w (x and y pooled)."""
    weights = [q**i for i in range(rmax + 1)] * 2
    out = []

    def rec(pos, rem, acc):
        if pos == len(weights):
            if rem == 0:
                out.append(tuple(acc))
            return
        wt = weights[pos]
        for e in range(rem // wt + 1):
            rec(pos + 1, rem - e * wt, acc + [e])

    rec(0, w, [])
    return [(t[: rmax + 1], t[rmax + 1 :]) for t in out]


@st.composite
def packed_poly(draw, q, rmax=2):
    w = draw(st.integers(min_value=1, max_value=min(3 * q, 8)))
    monos = monomials_of_weight(w, q, rmax)
    chosen = draw(
        st.lists(st.sampled_from(monos), min_size=1, max_size=4, unique=True)
    )
    coeffs = draw(
        st.lists(
            st.integers(min_value=-9, max_value=9).filter(bool),
            min_size=len(chosen),
            max_size=len(chosen),
        )
    )
    return w, list(zip(chosen, coeffs))


class TestPackedEngine:
    @settings(max_examples=60, deadline=None)
    @given(data=st.data(), q=st.sampled_from([2, 3]))
    def test_mul_matches_naive(self, data, q):
        ctx = _univpoly.PolyCtx(q, q, 2, 64)
        polys = []
        models = []
        for _ in range(2):
            w, terms = data.draw(packed_poly(q))
            P = _univpoly.WPoly.zero(ctx, w)
            model = {}
            for (xe, ye), c in terms:
                P = P + _univpoly.WPoly.mono(ctx, c, xe, ye)
                model[(xe, ye)] = model.get((xe, ye), 0) + c
            polys.append(P)
            models.append({k: v for k, v in model.items() if v})
        assert to_naive(polys[0] * polys[1]) == naive_mul(*models)
        s = polys[0].scaled(-3)
        assert to_naive(s) == {k: -3 * v for k, v in models[0].items()}

    @settings(max_examples=40, deadline=None)
    @given(data=st.data(), e=st.integers(min_value=1, max_value=4))
    def test_power_routes_agree(self, data, e):
        q = 2
        ctx = _univpoly.PolyCtx(q, q, 2, 128)
        w, terms = data.draw(packed_poly(q))
        P = _univpoly.WPoly.zero(ctx, w)
        model = {}
        for (xe, ye), c in terms:
            P = P + _univpoly.WPoly.mono(ctx, c, xe, ye)
            model[(xe, ye)] = model.get((xe, ye), 0) + c
        model = {k: v for k, v in model.items() if v}
        expect = naive_pow(model, e)
        assert to_naive(P.pow_seq(e)) == expect
        assert to_naive(P.pow_binary(e)) == expect
        assert to_naive(P.pow_blocks(e, (0, 2))) == expect

    @settings(max_examples=40, deadline=None)
    @given(data=st.data(), n=st.integers(min_value=2, max_value=9))
    def test_div_exact_inverts_scaling(self, data, n):
        q = 3
        ctx = _univpoly.PolyCtx(q, q, 2, 64)
        w, terms = data.draw(packed_poly(q))
        P = _univpoly.WPoly.zero(ctx, w)
        for (xe, ye), c in terms:
            P = P + _univpoly.WPoly.mono(ctx, c, xe, ye)
        assert to_naive(P.scaled(n).div_exact(n)) == to_naive(P)

    def test_slot_overflow_detected(self):
        ctx = _univpoly.PolyCtx(2, 2, 1, 16)
        x0 = _univpoly._xvar(ctx, 0)
        y0 = _univpoly._yvar(ctx, 0)
        with pytest.raises(_univpoly.SlotOverflow):
            (x0 + y0).pow_binary(40)

    def test_balanced_digits_roundtrip(self):
        rng = random.Random(31)
        for _ in range(200):
            n = rng.randrange(-(2**200), 2**200)
            d = _univpoly._balanced_digits(n, 32)
            assert _univpoly._pack_digits(d, 32) == n
            assert all(-(2**31) <= x < 2**31 for x in d)
