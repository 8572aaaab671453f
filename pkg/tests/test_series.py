"""Tests for two-variable Laurent series arithmetic and precision tracking."""

import random

import pytest

from k2local.errors import PrecisionTooLow, ZeroDivisor, ZeroElement
from k2local.ff import make_field
from k2local.series import (Laurent2, bar_valuation, invert, laurent_domain,
                            lift_padic, outer_valuation, recompose,
                            reduce_mod_p, unit_decompose)

F2 = make_field(2, 1)
F3 = make_field(3, 1)
F4 = make_field(2, 2)
F9 = make_field(3, 2)


def poly(dom, d):
    return Laurent2.from_dict(dom, d)


def rand_series(dom, rng, nterms=6, lo_j=-3, hi_j=4, lo_i=-3, hi_i=4,
                t_prec=None, u_prec=None):
    d = {}
    for _ in range(nterms):
        j = rng.randrange(lo_j, hi_j)
        i = rng.randrange(lo_i, hi_i)
        d[(j, i)] = rng.randrange(dom.q)
    return Laurent2.from_dict(dom, d, t_prec, u_prec)


class TestArithmetic:
    def test_add_example(self):
        t = poly(F2, {(1, 0): 1})
        two_t = t + t
        assert two_t.is_zero()  # characteristic 2
        t3 = poly(F3, {(1, 0): 1})
        assert (t3 + t3) == poly(F3, {(1, 0): 2})

    def test_mul_example(self):
        uinv = poly(F3, {(0, -1): 1})
        u = poly(F3, {(0, 1): 1})
        assert (uinv * u) == Laurent2.one(F3)

    def test_difference_of_squares(self):
        one = Laurent2.one(F3)
        ut = poly(F3, {(1, 1): 1})
        prod = (one + ut) * (one - ut)
        assert prod == poly(F3, {(0, 0): 1, (2, 2): -1 % 3})

    def test_ring_axioms_random(self):
        rng = random.Random(7)
        for dom in (F2, F4, F9):
            for _ in range(30):
                a = rand_series(dom, rng)
                b = rand_series(dom, rng)
                c = rand_series(dom, rng)
                assert a + b == b + a
                assert a * b == b * a
                assert (a + b) * c == a * c + b * c
                assert (a * b) * c == a * (b * c)
                assert a - a == Laurent2.zero(dom)

    def test_exact_inputs_stay_exact(self):
        rng = random.Random(11)
        for _ in range(40):
            a = rand_series(F9, rng)
            b = rand_series(F9, rng)
            for r in (a + b, a * b, a - b, a ** 3):
                assert r.t_prec == float("inf") and not r.u_prec

    def test_precision_propagation_mul(self):
        # (u^-2 + O_t(3)) * (t^2): t_prec shifts by the t-valuation
        a = Laurent2.from_dict(F3, {(0, -2): 1}, t_prec=3)
        b = poly(F3, {(2, 0): 1})
        r = a * b
        assert r.t_prec == 5
        assert r.coeff(-2, 2) == F3.one

    def test_row_precision_propagation(self):
        # a known only to u^5 in row 0; multiplying by u^-2 lowers the bound
        a = Laurent2.from_dict(F3, {(0, 0): 1}, u_prec={0: 5})
        b = poly(F3, {(0, -2): 1})
        r = a * b
        assert r.uprec(0) == 3
        assert r.coeff(-2, 0) == F3.one
        with pytest.raises(PrecisionTooLow):
            r.coeff(3, 0)

    def test_coeff_outside_region(self):
        a = Laurent2.from_dict(F2, {(0, 0): 1}, t_prec=4)
        assert a.coeff(0, 3) == F2.zero
        with pytest.raises(PrecisionTooLow):
            a.coeff(0, 4)


class TestValuations:
    def test_examples(self):
        f = poly(F3, {(-1, 2): 1, (0, 0): 1, (2, -5): 2})
        assert outer_valuation(f) == -1
        assert bar_valuation(f) == 2

    def test_zero_raises(self):
        with pytest.raises(ZeroElement):
            outer_valuation(Laurent2.zero(F2))

    def test_hidden_row_raises(self):
        f = Laurent2.from_dict(F3, {(1, 0): 1}, u_prec={0: 2})
        with pytest.raises(PrecisionTooLow):
            outer_valuation(f)

    def test_valuation_additive(self):
        rng = random.Random(3)
        for _ in range(40):
            a = rand_series(F4, rng)
            b = rand_series(F4, rng)
            if not a.terms or not b.terms:
                continue
            p = a * b
            assert outer_valuation(p) == outer_valuation(a) + outer_valuation(b)
            assert bar_valuation(p) == bar_valuation(a) + bar_valuation(b)


class TestInvert:
    def test_monomial(self):
        f = poly(F3, {(2, -1): 2})
        g = invert(f)
        assert f * g == Laurent2.one(F3)

    def test_principal_unit(self):
        one = Laurent2.one(F3)
        ut = poly(F3, {(1, 1): 1})
        g = invert(one + ut)
        # geometric series 1 - ut + u^2 t^2 - ... out to working precision
        prod = (one + ut) * g
        assert prod.coeff(0, 0) == F3.one
        for j in range(1, int(prod.t_prec)):
            for i in prod.terms.get(j, {}):
                assert prod.terms[j][i] == F3.zero or False

    def test_invert_random(self):
        rng = random.Random(19)
        for dom in (F2, F4, F9):
            for _ in range(25):
                f = rand_series(dom, rng, t_prec=6)
                if not f.terms:
                    continue
                try:
                    g = invert(f)
                except PrecisionTooLow:
                    continue
                prod = f * g
                assert prod.same_known_terms(Laurent2.one(dom))

    def test_zero_raises(self):
        with pytest.raises(ZeroDivisor):
            invert(Laurent2.zero(F2))


class TestUnitDecomposition:
    def test_example(self):
        z = F4.gen
        f = Laurent2.from_dict(F4, {}, None, None) + \
            Laurent2.monomial(F4, z, 2, -1) + Laurent2.monomial(F4, F4.one, 3, 0)
        dec = unit_decompose(f)
        assert dec.t_exp == -1 and dec.u_exp == 2
        assert dec.zeta_exp == 1  # the generator of F4 is primitive
        assert dec.principal.coeff(0, 0) == F4.one
        assert recompose(dec, F4) == f

    def test_roundtrip_random(self):
        rng = random.Random(23)
        for dom in (F3, F4, F9):
            for _ in range(30):
                f = rand_series(dom, rng)
                if not f.terms:
                    continue
                dec = unit_decompose(f)
                assert recompose(dec, dom) == f
                assert dec.principal.coeff(0, 0) == dom.one


class TestPadicLift:
    def test_example(self):
        # Teichmüller lift of 2u in F_3 coefficients to W_2: 8u mod 9
        f = poly(F3, {(0, 1): 2})
        g = lift_padic(f, 2)
        c = g.terms[0][1]
        assert c.padic_coeffs[0].value == 8

    def test_roundtrip(self):
        rng = random.Random(31)
        for dom in (F3, F4):
            for _ in range(20):
                f = rand_series(dom, rng)
                g = lift_padic(f, 3)
                assert reduce_mod_p(g, dom) == f

    def test_lift_multiplicative(self):
        rng = random.Random(37)
        for _ in range(15):
            a = rand_series(F4, rng, nterms=3)
            b = rand_series(F4, rng, nterms=3)
            lhs = lift_padic(a, 2) * lift_padic(b, 2)
            rhs = lift_padic(a * b, 2)
            assert reduce_mod_p(lhs, F4) == reduce_mod_p(rhs, F4)


class TestWittOverLaurent:
    def test_witt_components(self):
        from k2local.witt import WittVec, witt_add
        dom = laurent_domain(F3)
        u = Laurent2.from_dict(F3, {(0, 1): 1})
        a = WittVec(dom, (u, dom.zero))
        b = WittVec(dom, (u, dom.one))
        s = witt_add(a, b)
        assert s.components[0] == u.int_scale(2)
