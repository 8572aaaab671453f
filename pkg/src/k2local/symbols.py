"""Milnor K₂ symbols over a two-dimensional local field F_q((u))((t)).

Provides the higher tame symbol (two independent formulas), the boundary map
to the first residue field, the local Witt pairing against Witt vectors over
the field, decomposition of symbols into the topological basis, a
level-bounded pairing-separation equality test, and verifiers for the three
unit-group identities used throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from .errors import (CoefficientOutsidePrecision, LevelExceedsPrecision,
                     ZeroArgument, ZeroElement)
from .ff import FqElem, galois_ring, make_field, primitive_element
from .forms import dlog, residue, wedge
from .series import (DEFAULT_T_PREC, DEFAULT_U_PREC, Laurent2, bar_valuation,
                     invert, laurent_domain, lift_padic, outer_valuation,
                     unit_decompose)
from .witt import GhostVec, WittVec, unghost, witt_trace_to_prime

INF = math.inf


# --------------------------------------------------------------------------
# K2 elements
# --------------------------------------------------------------------------

class K2Elem:
    """A formal product Π {f, g}^e of Steinberg symbols over one field."""

    __slots__ = ("field", "factors")

    def __init__(self, field, factors):
        clean = []
        for f, g, e in factors:
            if f.dom is not field or g.dom is not field:
                raise ZeroArgument("symbol factor over the wrong field")
            if not f.terms or not g.terms:
                raise ZeroArgument("symbol entries must be nonzero")
            if e:
                clean.append((f, g, int(e)))
        self.field = field
        self.factors = tuple(clean)

    def __mul__(self, other):
        return K2Elem(self.field, self.factors + other.factors)

    def inv(self):
        return K2Elem(self.field, tuple((f, g, -e) for f, g, e in self.factors))

    def serialize(self):
        if not self.factors:
            return "1"
        bits = []
        for f, g, e in self.factors:
            s = "{%s; %s}" % (f.serialize(), g.serialize())
            if e != 1:
                s += f"^{e}"
            bits.append(s)
        return " * ".join(bits)

    def __repr__(self):
        return f"K2Elem({self.serialize()})"


def symbol(f, g, e=1):
    return K2Elem(f.dom, [(f, g, e)])


# --------------------------------------------------------------------------
# higher tame symbol
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class TameValue:
    value: FqElem

    def __post_init__(self):
        if not self.value:
            raise ZeroElement("tame symbol value must be nonzero")


def _vals(f):
    vt = outer_valuation(f)
    vu = bar_valuation(f)
    return vt, vu


def tame_symbol_det(f1, f2, f3):
    """Determinant form: residue of f1^{b1} f2^{b2} f3^{b3} (−1)^b.

    The valuation matrix has rows (v_t, v̄_u); b_j is (−1)^{j−1} times the
    2×2 minor omitting column j, and the sign exponent b sums
    v_s(f_i) v_s(f_j) times the complementary entry over s and i<j.
    """
    fs = (f1, f2, f3)
    for f in fs:
        if not f.terms:
            raise ZeroArgument("tame symbol of zero")
    vt = [_vals(f)[0] for f in fs]
    vu = [_vals(f)[1] for f in fs]
    b = [vu[1] * vt[2] - vu[2] * vt[1],
         -(vu[0] * vt[2] - vu[2] * vt[0]),
         vu[0] * vt[1] - vu[1] * vt[0]]
    sign = 0
    for (i, j, k) in ((0, 1, 2), (0, 2, 1), (1, 2, 0)):
        sign += vt[i] * vt[j] * vu[k] + vu[i] * vu[j] * vt[k]
    field = f1.dom
    value = field.one if sign % 2 == 0 else field.from_int(-1)
    for idx, f in enumerate(fs):
        j0 = vt[idx]
        i0 = vu[idx]
        value = value * (f.terms[j0][i0] ** b[idx])
    return TameValue(value)


def tame_symbol_signed(f, g, h):
    """Monomial form: (−1)^α times the residue of the displayed monomial.

    Computed by genuine series arithmetic (powers and inverses), so it is an
    independent cross-check of the determinant form.
    """
    for x in (f, g, h):
        if not x.terms:
            raise ZeroArgument("tame symbol of zero")
    vtf, vuf = _vals(f)
    vtg, vug = _vals(g)
    vth, vuh = _vals(h)
    ef = vug * vth - vuh * vtg
    eg = -(vuf * vth - vuh * vtf)
    eh = vuf * vtg - vug * vtf
    alpha = (vtf * vtg * vuh + vtf * vth * vug + vtg * vth * vuf
             + vtf * vug * vuh + vtg * vuf * vuh + vth * vuf * vug)
    prod = (f ** ef) * (g ** eg) * (h ** eh)
    value = prod.coeff(0, 0)
    if alpha % 2:
        value = -value
    return TameValue(value)


# --------------------------------------------------------------------------
# boundary map and unramified exponent
# --------------------------------------------------------------------------

def boundary(e):
    """Boundary of a K₂ element in the first residue field k((u)).

    Returned as a Laurent2 supported in t-degree zero.
    """
    field = e.field
    out = Laurent2.one(field)
    for f, g, exp in e.factors:
        vf = outer_valuation(f)
        vg = outer_valuation(g)
        val = (f ** vg) * (g ** (-vf))
        if (vf * vg) % 2:
            val = -val
        out = out * (val ** exp)
    row = out.terms.get(0, {})
    up = {0: out.uprec(0)} if out.uprec(0) != INF else {}
    return Laurent2(field, {0: dict(row)} if row else {}, None, up)


def unramified_exponent(e):
    """u-valuation of the boundary."""
    b = boundary(e)
    return bar_valuation(b)


# --------------------------------------------------------------------------
# local Witt pairing
# --------------------------------------------------------------------------

class WittPairer:
    """Precomputes the two-form of a K₂ element for repeated pairings.

    s = m + 2 guard digits; exposure bounds say how far into negative u/t
    exponents the Witt-vector arguments may reach.
    """

    def __init__(self, e, m, exposure_u=4, exposure_t=4):
        self.field = e.field
        self.m = m
        self.s = m + 2
        self.ring = galois_ring(self.field, self.s)
        p = self.field.p
        pu = max(DEFAULT_U_PREC, exposure_u * p ** (m - 1) + 4)
        pt = max(DEFAULT_T_PREC, exposure_t * p ** (m - 1) + 4)
        eta = None
        for f, g, exp in e.factors:
            fh = lift_padic(f, self.s)
            gh = lift_padic(g, self.s)
            w = wedge(dlog(fh, invert(fh, pt, pu)),
                      dlog(gh, invert(gh, pt, pu)))
            w = w.int_scale(exp)
            eta = w if eta is None else eta + w
        if eta is None:
            from .forms import TwoForm
            eta = TwoForm(Laurent2.zero(self.ring))
        self.eta = eta

    def pair(self, g, m=None):
        """Pair against a Witt vector over Laurent2; returns W_m over F_p."""
        return witt_trace_to_prime(self.pair_untraced(g, m))

    def pair_untraced(self, g, m=None):
        """The pairing value over the coefficient field, before the trace."""
        m = self.m if m is None else m
        if m > self.m:
            raise ZeroArgument("pairer built for a shorter length")
        p = self.field.p
        comps = [lift_padic(c, self.s) for c in g.components[:m]]
        residues = []
        for k in range(m):
            ghost_k = Laurent2.zero(self.ring)
            for r in range(k + 1):
                term = (comps[r] ** (p ** (k - r))).int_scale(p ** r)
                ghost_k = ghost_k + term
            prod = ghost_k * self.eta.a
            try:
                residues.append(prod.coeff(-1, -1))
            except Exception as exc:
                raise CoefficientOutsidePrecision(
                    "pairing residue outside working precision") from exc
        w = unghost(GhostVec(self.ring, tuple(residues)))
        comps_k = tuple(self.ring.reduce_mod_p(c) for c in w.components)
        return WittVec(self.field, comps_k)


def _exposure(g):
    eu = et = 0
    for c in g.components:
        for j, row in c.terms.items():
            et = max(et, -j)
            for i in row:
                eu = max(eu, -i)
    return eu, et


def witt_pair_local(e, g, m, traced=True):
    """Artin–Schreier–Witt pairing of a K₂ element with a Witt vector.

    g is a WittVec whose components are Laurent2 over the same field;
    returns a length-m Witt vector over the prime field, or over the
    coefficient field itself when traced=False.
    """
    eu, et = _exposure(g)
    pairer = WittPairer(e, m, exposure_u=eu + 1, exposure_t=et + 1)
    if traced:
        return pairer.pair(g, m)
    return pairer.pair_untraced(g, m)


# --------------------------------------------------------------------------
# K2 basis and decomposition
# --------------------------------------------------------------------------

class K2Basis:
    """Exponents of a K₂ element on the topological basis at a given level.

    e1_terms hold {1 + a u^i t^j, t}-type entries, e2_terms hold
    {1 + a u^i t^j, u}-type entries.  Index rules: e1 entries require p∤i or
    (p|i and p|j); e2 entries require p|i.  Entries with i+j ≤ level are the
    basis proper; index pairs with p|i, p|j and (i+j)/p ≤ level are also
    kept, since the length-2 pairing family still separates them.
    """

    def __init__(self, field, level):
        self.field = field
        self.level = level
        self.ut_exp = 0
        self.zeta_u_exp = 0
        self.zeta_t_exp = 0
        self.e1_terms = {}
        self.e2_terms = {}

    def finalize(self):
        self.zeta_u_exp %= self.field.q - 1
        self.zeta_t_exp %= self.field.q - 1
        return self

    def to_json(self):
        def table(t):
            return [{"i": i, "j": j, "a": list(c.coeffs)}
                    for (i, j), c in sorted(t.items())]
        return {
            "ut_exp": self.ut_exp,
            "zeta_u_exp": self.zeta_u_exp,
            "zeta_t_exp": self.zeta_t_exp,
            "e1_terms": table(self.e1_terms),
            "e2_terms": table(self.e2_terms),
            "level": self.level,
        }

    def recompose(self):
        """A K2Elem with the stated basis exponents."""
        field = self.field
        u = Laurent2.monomial(field, field.one, 1, 0)
        t = Laurent2.monomial(field, field.one, 0, 1)
        z = Laurent2.monomial(field, primitive_element(field))
        factors = []
        if self.ut_exp:
            factors.append((u, t, self.ut_exp))
        if self.zeta_u_exp:
            factors.append((z, u, self.zeta_u_exp))
        if self.zeta_t_exp:
            factors.append((z, t, self.zeta_t_exp))
        one = Laurent2.one(field)
        for (i, j), c in sorted(self.e1_terms.items()):
            factors.append((one + Laurent2.monomial(field, c, i, j), t, 1))
        for (i, j), c in sorted(self.e2_terms.items()):
            factors.append((one + Laurent2.monomial(field, c, i, j), u, 1))
        return K2Elem(field, factors)


class _Decomposer:
    """Worklist reduction of a K₂ element onto the topological basis.

    Works modulo symbols invisible to the level-N pairing family: constant
    second slots, {ζ, ε} pieces, factors supported beyond the visibility
    horizon H = p·N, and elementary units with negative u-exponent.
    """

    BUDGET = 200000

    def __init__(self, field, level):
        self.field = field
        self.N = level
        p = field.p
        self.p = p
        self.H = p * level
        self.Hu = p * level + 8
        self.K = 1
        while p ** self.K <= self.H:
            self.K += 1
        self.pK = p ** self.K
        self.basis = K2Basis(field, level)
        self.work = []
        self.budget = self.BUDGET

    # -- series plumbing ---------------------------------------------------

    def box(self, f):
        rows = {}
        for j, row in f.terms.items():
            if 0 <= j <= self.H:
                r = {i: c for i, c in row.items() if i <= self.Hu}
                if r:
                    rows[j] = r
        return Laurent2(self.field, rows)

    def power(self, f, e):
        result = Laurent2.one(self.field)
        base = self.box(f)
        e = e % self.pK
        while e:
            if e & 1:
                result = self.box(result * base)
            base = self.box(base * base)
            e >>= 1
        return result

    def inv_unit(self, f):
        return self.box(invert(f, t_prec=self.H + 1, u_prec=self.Hu + 1))

    def spend(self):
        self.budget -= 1
        if self.budget < 0:
            raise LevelExceedsPrecision(
                "decomposition did not settle within the step budget")

    # -- visibility and storage --------------------------------------------

    def visible(self, i, j):
        if i < 0 or j < 0 or i > self.H or j > self.H:
            return False
        if i + j <= self.N:
            return True
        return i % self.p == 0 and j % self.p == 0 and (i + j) // self.p <= self.N

    def store_single(self, c, i, j, slot):
        """Store one copy of {1 + c u^i t^j, slot}, emitting the exact
        corrector unit when the index is already occupied."""
        table = self.basis.e1_terms if slot == "t" else self.basis.e2_terms
        old = table.get((i, j))
        if old is None:
            table[(i, j)] = c
            return
        new = old + c
        # (1+old·X)(1+c·X) = (1+new·X) · (1 + old·c·X²·(1+new·X)^{-1})
        one = Laurent2.one(self.field)
        x2 = Laurent2.monomial(self.field, old * c, 2 * i, 2 * j)
        if new:
            table[(i, j)] = new
            corr = one + self.box(x2 * self.inv_unit(
                one + Laurent2.monomial(self.field, new, i, j)))
        else:
            del table[(i, j)]
            corr = one + x2
        if (corr - one).terms:
            self.work.append(("EU", corr, slot, 1))

    def elementary(self, c, i, j, slot, exp):
        """Route {1 + c u^i t^j, slot}^exp to storage, conversion, or drop."""
        exp %= self.pK
        if not exp or not c:
            return
        p = self.p
        if j == 0 and slot == "u":
            return  # du-only wedge du: identically trivial
        if i == 0 and slot == "t":
            return  # dt-only wedge dt: identically trivial
        if not self.visible(i, j):
            return
        if slot == "t" and i % p == 0 and j % p != 0 and i > 0:
            # i·{x,u} + j·{x,t} ≡ 0: convert t-slot to u-slot
            a = (-i) * pow(j, -1, self.pK) % self.pK
            self.elementary(c, i, j, "u", exp * a)
            return
        if slot == "u" and i % p != 0:
            b = (-j) * pow(i, -1, self.pK) % self.pK
            self.elementary(c, i, j, "t", exp * b)
            return
        # expand the exponent base p: (1+X)^{p^r} = 1 + X^{p^r}
        r = 0
        while exp:
            digit = exp % p
            ii, jj = i * p ** r, j * p ** r
            if digit and self.visible(ii, jj):
                cc = c ** (p ** r)
                for _ in range(digit):
                    self.store_single(cc, ii, jj, slot)
            exp //= p
            r += 1

    # -- worklist items ------------------------------------------------------

    def push_unit_pair(self, eps, other, exp):
        """Split {eps, other} by unit-decomposing the second slot."""
        dec = unit_decompose(other)
        if dec.u_exp:
            self.work.append(("EU", eps, "u", exp * dec.u_exp))
        if dec.t_exp:
            self.work.append(("EU", eps, "t", exp * dec.t_exp))
        principal = self.box(dec.principal)
        if (principal - Laurent2.one(self.field)).terms:
            self.work.append(("EE", eps, principal, exp))

    def process_eu(self, eps, slot, exp):
        exp %= self.pK
        if not exp:
            return
        eps = self.power(eps, exp)
        one = Laurent2.one(self.field)
        while True:
            self.spend()
            rem = eps - one
            if not rem.terms:
                return
            j = min(rem.terms)
            i = min(rem.terms[j])
            c = rem.terms[j][i]
            self.elementary(c, i, j, slot, 1)
            factor = one + Laurent2.monomial(self.field, c, i, j)
            eps = self.box(eps * self.inv_unit(factor))

    def process_ee(self, eps, delta, exp):
        exp %= self.pK
        if not exp:
            return
        self.spend()
        one = Laurent2.one(self.field)
        eps = self.power(eps, exp)
        a = eps - one
        if not a.terms:
            return
        d = delta - one
        if not d.terms:
            return
        if min(a.terms) + min(d.terms) > self.H:
            return  # wedge lives beyond the t-visibility horizon
        # {1+A, δ} = −{1+A″, −A} − {1+A″, δ} with A″ = A(δ−1)(1+A)^{-1}
        a2 = self.box(a * d * self.inv_unit(eps))
        eps2 = one + a2
        if a2.terms:
            self.work.append(("EE", eps2, delta, -1))
            self.push_unit_pair(eps2, -a, -1)

    # -- driver ----------------------------------------------------------------

    def run(self, e):
        one = Laurent2.one(self.field)
        for f, g, exp in e.factors:
            df = unit_decompose(f)
            dg = unit_decompose(g)
            i, j = df.u_exp, df.t_exp
            k, l = dg.u_exp, dg.t_exp
            af, bg = df.zeta_exp, dg.zeta_exp
            half = (self.field.q - 1) // 2 if self.field.q % 2 else 0
            self.basis.ut_exp += exp * (i * l - j * k)
            self.basis.zeta_u_exp += exp * (af * k - i * bg + half * i * k)
            self.basis.zeta_t_exp += exp * (af * l - j * bg + half * j * l)
            ef = self.box(df.principal)
            eg = self.box(dg.principal)
            if (ef - one).terms:
                if k:
                    self.work.append(("EU", ef, "u", exp * k))
                if l:
                    self.work.append(("EU", ef, "t", exp * l))
            if (eg - one).terms:
                if i:
                    self.work.append(("EU", eg, "u", -exp * i))
                if j:
                    self.work.append(("EU", eg, "t", -exp * j))
            if (ef - one).terms and (eg - one).terms:
                self.work.append(("EE", ef, eg, exp))
        while self.work:
            item = self.work.pop()
            if item[0] == "EU":
                self.process_eu(*item[1:])
            else:
                self.process_ee(*item[1:])
        return self.basis.finalize()


def k2_decompose(e, level):
    """Decompose onto the topological basis at the given level.

    The result is pairing-equivalent to the input at that level; verify with
    k2_equiv.  Elements whose basis content cannot settle within the working
    region raise LevelExceedsPrecision.
    """
    return _Decomposer(e.field, level).run(e)


# --------------------------------------------------------------------------
# level-bounded equality test
# --------------------------------------------------------------------------

def _test_vectors(field, level):
    """(c, i, j, m) sweep: i+j ≤ N, j·p^{m−1} ≤ N−1, c an F_p-basis."""
    p = field.p
    cs = [field.gen ** r if r else field.one for r in range(field.n)]
    out = []
    for m in (1, 2):
        for j in range(level + 1):
            if j * p ** (m - 1) > level - 1:
                continue
            for i in range(level + 1 - j):
                for c in cs:
                    out.append((c, i, j, m))
    return out


def k2_equiv(a, b, level):
    """True iff a and b pair identically against the level-bounded family
    of Witt test vectors (lengths ≤ 2) and have equal boundary data."""
    field = a.field
    if field is not b.field:
        return False
    ba = boundary(a)
    bb = boundary(b)
    if not (ba * invert(bb)).same_known_terms(Laurent2.one(field)):
        return False
    d = a * b.inv()
    if not d.factors:
        return True
    dom = laurent_domain(field)
    pairer = WittPairer(d, 2, exposure_u=level + 1, exposure_t=level + 1)
    for c, i, j, m in _test_vectors(field, level):
        comps = [Laurent2.monomial(field, c, -i, -j)] + \
                [dom.zero] * (m - 1)
        g = WittVec(dom, tuple(comps))
        w = pairer.pair(g, m)
        if any(w.components):
            return False
    return True


# --------------------------------------------------------------------------
# identity verifiers
# --------------------------------------------------------------------------

def verify_appendix_identity(which, params, level):
    """Check one of the three unit-symbol identities at its natural level.

    1: {1+δ^p t^k, t} ≡ {1+δ^p t^k, δ}^p             (level k+1)
    2: {1−iv t^j u^i, u} ≡ {1+jv u^i t^j, t}          (level j+1)
    3: {1+f u^i t^l, 1+g u^j} ≡
       {1+f u^i · jg u^j (1+g u^j)^{-1} · t^l, u}     (level l+1)
    """
    if which == 1:
        delta, k = params["delta"], params["k"]
        field = delta.dom
        p = field.p
        one = Laurent2.one(field)
        t = Laurent2.monomial(field, field.one, 0, 1)
        base = one + (delta ** p) * (t ** k)
        lhs = symbol(base, t)
        rhs = symbol(base, delta, p)
        return k2_equiv(lhs, rhs, level)
    if which == 2:
        field = params["v"].field
        i, j, v = params["i"], params["j"], params["v"]
        one = Laurent2.one(field)
        u = Laurent2.monomial(field, field.one, 1, 0)
        t = Laurent2.monomial(field, field.one, 0, 1)
        lhs = symbol(one - Laurent2.monomial(field, field.from_int(i) * v, i, j), u)
        rhs = symbol(one + Laurent2.monomial(field, field.from_int(j) * v, i, j), t)
        return k2_equiv(lhs, rhs, level)
    if which == 3:
        field = params["f"].field
        f, g = params["f"], params["g"]
        i, j, l = params["i"], params["j"], params["l"]
        one = Laurent2.one(field)
        u = Laurent2.monomial(field, field.one, 1, 0)
        gu = Laurent2.monomial(field, g, j, 0)
        lhs = symbol(one + Laurent2.monomial(field, f, i, l), one + gu)
        inner = Laurent2.monomial(field, f, i, l) * \
            gu.int_scale(j) * invert(one + gu)
        rhs = symbol(one + inner, u)
        return k2_equiv(lhs, rhs, level)
    raise ZeroArgument(f"unknown identity {which}")
