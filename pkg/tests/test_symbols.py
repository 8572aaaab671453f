"""Tests for K₂ symbols: tame symbol, boundary, Witt pairing, decomposition."""

import random

import pytest

from k2local.errors import ZeroArgument
from k2local.ff import make_field, primitive_element, trace_abs
from k2local.series import Laurent2, invert, laurent_domain
from k2local.symbols import (K2Elem, TameValue, boundary, k2_decompose,
                             k2_equiv, symbol, tame_symbol_det,
                             tame_symbol_signed, unramified_exponent,
                             verify_appendix_identity, witt_pair_local)
from k2local.witt import WittVec

F2 = make_field(2, 1)
F3 = make_field(3, 1)
F4 = make_field(2, 2)
F5 = make_field(5, 1)
F9 = make_field(3, 2)


def mono(dom, c, i=0, j=0):
    if isinstance(c, int):
        c = dom.from_int(c)
    return Laurent2.monomial(dom, c, i, j)


def U(dom):
    return mono(dom, 1, 1, 0)


def T(dom):
    return mono(dom, 1, 0, 1)


def rand_unit(dom, rng, allow_shift=True):
    d = {(0, 0): dom.elem_by_index(1 + rng.randrange(dom.q - 1))}
    for _ in range(4):
        key = (rng.randrange(0, 3), rng.randrange(-2, 4))
        if key != (0, 0):
            d[key] = dom.elem_by_index(rng.randrange(dom.q))
    f = Laurent2.from_dict(dom, d)
    if allow_shift:
        f = f.monomial_mul(dom.one, rng.randrange(-2, 3), rng.randrange(-2, 3))
    return f


class TestTameSymbol:
    def test_zeta_u_t(self):
        for dom in (F4, F9, F5):
            z = mono(dom, primitive_element(dom))
            got = tame_symbol_signed(z, U(dom), T(dom))
            assert got.value == primitive_element(dom)
            assert tame_symbol_det(z, U(dom), T(dom)).value == got.value

    def test_principal_units(self):
        one = Laurent2.one(F9)
        eps = one + mono(F9, 1, 1, 1)
        assert tame_symbol_signed(eps, eps, one + mono(F9, 2, 0, 1)).value == F9.one

    def test_steinberg(self):
        rng = random.Random(41)
        for dom in (F3, F4, F9):
            for _ in range(20):
                f = rand_unit(dom, rng)
                g = Laurent2.one(dom) - f
                h = rand_unit(dom, rng)
                if not g.terms:
                    continue
                assert tame_symbol_det(f, g, h).value == dom.one
                assert tame_symbol_signed(f, g, h).value == dom.one

    def test_uu_zeta_even(self):
        got = tame_symbol_det(U(F2), U(F2), mono(F2, 1))
        assert got.value == F2.one

    def test_agreement_random(self):
        rng = random.Random(43)
        for dom in (F2, F3, F4, F5, F9):
            for _ in range(60):
                f = rand_unit(dom, rng)
                g = rand_unit(dom, rng)
                h = rand_unit(dom, rng)
                assert tame_symbol_det(f, g, h).value == \
                    tame_symbol_signed(f, g, h).value

    def test_multiplicative(self):
        rng = random.Random(47)
        for _ in range(25):
            f1 = rand_unit(F9, rng)
            f2 = rand_unit(F9, rng)
            g = rand_unit(F9, rng)
            h = rand_unit(F9, rng)
            assert tame_symbol_det(f1 * f2, g, h).value == \
                tame_symbol_det(f1, g, h).value * tame_symbol_det(f2, g, h).value

    def test_zero_raises(self):
        with pytest.raises(ZeroArgument):
            tame_symbol_det(Laurent2.zero(F2), U(F2), T(F2))


class TestBoundary:
    def test_u_t(self):
        b = boundary(symbol(U(F3), T(F3)))
        assert b == mono(F3, 1, 1, 0)
        assert unramified_exponent(symbol(U(F3), T(F3))) == 1

    def test_t_t(self):
        b = boundary(symbol(T(F3), T(F3)))
        assert b == mono(F3, -1 % 3)

    def test_units_trivial(self):
        rng = random.Random(53)
        for _ in range(20):
            a = rand_unit(F4, rng, allow_shift=False)
            b = rand_unit(F4, rng, allow_shift=False)
            val = boundary(symbol(a, b))
            assert val.same_known_terms(Laurent2.one(F4))

    def test_unramified_examples(self):
        z = mono(F4, primitive_element(F4))
        assert unramified_exponent(symbol(z, T(F4))) == 0
        eps = Laurent2.one(F4) + mono(F4, 1, 1, 0)
        assert unramified_exponent(symbol(eps, T(F4))) == 0


class TestWittPairing:
    def test_steinberg_zero(self):
        rng = random.Random(59)
        dom = laurent_domain(F3)
        for _ in range(10):
            f = rand_unit(F3, rng)
            g = Laurent2.one(F3) - f
            if not g.terms:
                continue
            e = symbol(f, g)
            h = WittVec(dom, (mono(F3, rng.randrange(1, 3), -1, -1), dom.zero))
            w = witt_pair_local(e, h, 2)
            assert not any(w.components)

    def test_ut_constant(self):
        for dom in (F2, F4, F9, F5):
            ld = laurent_domain(dom)
            e = symbol(U(dom), T(dom))
            for c in dom.elements():
                g = WittVec(ld, (Laurent2.monomial(dom, c),))
                w = witt_pair_local(e, g, 1)
                assert w.components[0] == make_field(dom.p, 1).from_int(trace_abs(c))

    def test_closed_form_i1(self):
        # ({1+a·u·t, t}, c·u⁻¹t⁻¹) at m=1 → Tr(c·a)
        for dom in (F3, F4):
            ld = laurent_domain(dom)
            for a in dom.elements():
                if not a:
                    continue
                e = symbol(Laurent2.one(dom) + mono(dom, a, 1, 1), T(dom))
                for c in dom.elements():
                    g = WittVec(ld, (Laurent2.monomial(dom, c, -1, -1),))
                    w = witt_pair_local(e, g, 1)
                    assert w.components[0] == \
                        make_field(dom.p, 1).from_int(trace_abs(a * c))

    def test_bilinear_in_e(self):
        rng = random.Random(61)
        ld = laurent_domain(F4)
        for _ in range(8):
            f1 = rand_unit(F4, rng)
            f2 = rand_unit(F4, rng)
            g = rand_unit(F4, rng)
            h = WittVec(ld, (mono(F4, 1 + rng.randrange(3), -1, -1),
                             mono(F4, rng.randrange(4), -1, 0)))
            from k2local.witt import witt_add
            lhs = witt_pair_local(K2Elem(F4, [(f1, g, 1), (f2, g, 1)]), h, 2)
            rhs = witt_pair_local(symbol(f1 * f2, g), h, 2)
            assert lhs == rhs

    def test_additive_in_g(self):
        from k2local.witt import witt_add
        rng = random.Random(67)
        ld = laurent_domain(F3)
        for _ in range(8):
            e = symbol(rand_unit(F3, rng), rand_unit(F3, rng))
            g1 = WittVec(ld, (mono(F3, 1 + rng.randrange(2), -1, -1),
                              mono(F3, rng.randrange(3), 0, -1)))
            g2 = WittVec(ld, (mono(F3, 1 + rng.randrange(2), -2, 0),
                              mono(F3, rng.randrange(3), -1, 0)))
            lhs = witt_pair_local(e, witt_add(g1, g2), 2)
            rhs = witt_add(witt_pair_local(e, g1, 2), witt_pair_local(e, g2, 2))
            assert lhs == rhs

    def test_integral_pairs_zero(self):
        rng = random.Random(71)
        ld = laurent_domain(F4)
        for _ in range(10):
            f = rand_unit(F4, rng, allow_shift=False)
            g = rand_unit(F4, rng, allow_shift=False)
            h = WittVec(ld, (mono(F4, rng.randrange(4), rng.randrange(3),
                                  rng.randrange(3)), ld.zero))
            w = witt_pair_local(symbol(f, g), h, 2)
            assert not any(w.components)


class TestEquivAndIdentities:
    def test_reflexive(self):
        e = symbol(Laurent2.one(F3) + mono(F3, 1, 1, 1), T(F3))
        assert k2_equiv(e, e, 3)

    def test_appendix2_example(self):
        one = Laurent2.one(F2)
        a = symbol(one + mono(F2, 1, 1, 1), U(F2))   # 1−ut = 1+ut in char 2
        b = symbol(one + mono(F2, 1, 1, 1), T(F2))
        assert k2_equiv(a, b, 2)

    def test_nontrivial_detected(self):
        one = Laurent2.one(F2)
        a = symbol(one + mono(F2, 1, 1, 1), T(F2))
        assert not k2_equiv(a, K2Elem(F2, []), 2)

    def test_identity1(self):
        for dom, k in ((F2, 1), (F3, 1), (F3, 2)):
            assert verify_appendix_identity(
                1, {"delta": U(dom) + Laurent2.one(dom), "k": k}, k + 1)

    def test_identity2(self):
        for dom in (F2, F3):
            for (i, j) in ((1, 1), (1, 2), (2, 1)):
                if i % dom.p == 0:
                    continue
                assert verify_appendix_identity(
                    2, {"i": i, "j": j, "v": dom.one}, j + 1)

    def test_identity3(self):
        for dom in (F2, F3):
            assert verify_appendix_identity(
                3, {"f": dom.one, "g": dom.one, "i": 1, "j": 1, "l": 1}, 2)


class TestDecompose:
    def test_ut(self):
        basis = k2_decompose(symbol(U(F3), T(F3)), 3)
        assert basis.ut_exp == 1
        assert not basis.e1_terms and not basis.e2_terms
        assert basis.zeta_u_exp == 0 and basis.zeta_t_exp == 0

    def test_appendix2_shape(self):
        one = Laurent2.one(F2)
        basis = k2_decompose(symbol(one + mono(F2, 1, 1, 1), U(F2)), 2)
        assert basis.e1_terms.get((1, 1)) == F2.one
        assert basis.ut_exp == 0

    def test_recompose_equiv(self):
        rng = random.Random(73)
        for dom in (F2, F3):
            one = Laurent2.one(dom)
            for _ in range(6):
                i, j = rng.randrange(0, 3), rng.randrange(0, 3)
                if i == 0 and j == 0:
                    j = 1
                f = one + mono(dom, 1 + rng.randrange(dom.q - 1), i, j)
                slot = U(dom) if rng.randrange(2) else T(dom)
                e = symbol(f, slot)
                level = 2
                basis = k2_decompose(e, level)
                assert k2_equiv(e, basis.recompose(), level)

    def test_json_roundtrip(self):
        basis = k2_decompose(symbol(U(F4), T(F4)), 2)
        d = basis.to_json()
        assert d["ut_exp"] == 1 and d["level"] == 2
