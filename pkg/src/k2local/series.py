"""Precision-tracked Laurent series in two variables: elements of k((u))((t)).

A Laurent2 value stores a finite coefficient table together with a guaranteed
region of knowledge: terms with t-exponent >= t_prec are unknown, and within
each row j, terms with u-exponent >= u_prec(j) are unknown.  Rows without a
finite u_prec entry are completely known, and t_prec=None means every row is
known.  Every operation computes the guaranteed region of its output; callers
that need a coefficient outside it fail loudly.

The same machinery runs over F_q coefficients (Laurent2 proper) and over
Galois-ring coefficients W_s(F_q) (the characteristic-zero lift used by the
Witt pairing); the coefficient domain is pluggable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from .errors import (FieldMismatch, PrecisionTooLow, ZeroDivisor, ZeroElement)
from .ff import FieldSpec, GaloisRing, galois_ring, primitive_element

INF = math.inf

#: default working precision for operations that must truncate exact data
DEFAULT_T_PREC = 12
DEFAULT_U_PREC = 12


class Laurent2:
    """Two-variable Laurent series over a coefficient domain.

    terms: {j: {i: coeff}} with all coefficients nonzero and inside the
    guaranteed region; t_prec: int or None; u_prec: {j: int} for the rows
    with only finitely many known u-digits.
    """

    __slots__ = ("dom", "terms", "t_prec", "u_prec")

    def __init__(self, dom, terms, t_prec=None, u_prec=None):
        self.dom = dom
        tp = INF if t_prec is None else t_prec
        up = dict(u_prec) if u_prec else {}
        up = {j: b for j, b in up.items() if j < tp and b != INF}
        clean = {}
        for j, row in terms.items():
            if j >= tp:
                continue
            bound = up.get(j, INF)
            r = {i: c for i, c in row.items() if c and i < bound}
            if r:
                clean[j] = r
        self.terms = clean
        self.t_prec = tp
        self.u_prec = up

    # -- region helpers ----------------------------------------------------

    def uprec(self, j):
        return self.u_prec.get(j, INF)

    def tlb(self):
        """Lower bound for the t-valuation of any nonzero content."""
        cands = list(self.terms) + list(self.u_prec)
        if cands:
            return min(cands)
        return self.t_prec  # possibly INF: certainly zero

    def row_lb(self, j):
        """Lower bound for u-exponents of nonzero content in row j.

        Returns None when the row is certainly zero.
        """
        row = self.terms.get(j)
        if row:
            return min(row)
        b = self.u_prec.get(j)
        return b  # None: exact empty row

    def possible_rows(self):
        return sorted(set(self.terms) | set(self.u_prec))

    def is_zero(self):
        """Certainly zero everywhere (exactly the zero element)."""
        return not self.terms and not self.u_prec and self.t_prec == INF

    def has_no_known_terms(self):
        return not self.terms

    # -- construction helpers ----------------------------------------------

    @staticmethod
    def zero(dom):
        return Laurent2(dom, {})

    @staticmethod
    def monomial(dom, c, i=0, j=0, t_prec=None, u_prec=None):
        return Laurent2(dom, {j: {i: c}} if c else {}, t_prec, u_prec)

    @staticmethod
    def one(dom):
        return Laurent2.monomial(dom, dom.one)

    @staticmethod
    def from_dict(dom, d, t_prec=None, u_prec=None):
        """d maps (j, i) -> coefficient (or int, coerced via from_int)."""
        rows = {}
        for (j, i), c in d.items():
            if isinstance(c, int):
                c = dom.from_int(c)
            if c:
                rows.setdefault(j, {})[i] = c
        return Laurent2(dom, rows, t_prec, u_prec)

    # -- arithmetic ----------------------------------------------------------

    def _check(self, other):
        if self.dom is not other.dom:
            raise FieldMismatch("operands over different coefficient domains")

    def __add__(self, other):
        self._check(other)
        tp = min(self.t_prec, other.t_prec)
        rows = {}
        for src in (self.terms, other.terms):
            for j, row in src.items():
                dst = rows.setdefault(j, {})
                for i, c in row.items():
                    if i in dst:
                        s = dst[i] + c
                        if s:
                            dst[i] = s
                        else:
                            del dst[i]
                    else:
                        dst[i] = c
        up = {}
        for j in set(self.u_prec) | set(other.u_prec):
            b = min(self.uprec(j), other.uprec(j))
            if b != INF:
                up[j] = b
        return Laurent2(self.dom, rows, None if tp == INF else tp, up)

    def __neg__(self):
        rows = {j: {i: -c for i, c in row.items()}
                for j, row in self.terms.items()}
        return Laurent2(self.dom, rows,
                        None if self.t_prec == INF else self.t_prec,
                        self.u_prec)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        self._check(other)
        ftlb, gtlb = self.tlb(), other.tlb()
        tp = min(self.t_prec + gtlb, other.t_prec + ftlb)
        if math.isnan(tp):  # inf + -inf cannot occur: tlb >= min exponent
            tp = INF  # pragma: no cover
        rows = {}
        for j1, row1 in self.terms.items():
            for j2, row2 in other.terms.items():
                j = j1 + j2
                if j >= tp:
                    continue
                dst = rows.setdefault(j, {})
                for i1, c1 in row1.items():
                    for i2, c2 in row2.items():
                        i = i1 + i2
                        c = c1 * c2
                        if i in dst:
                            s = dst[i] + c
                            if s:
                                dst[i] = s
                            else:
                                del dst[i]
                        elif c:
                            dst[i] = c
        up = {}
        if self.u_prec or other.u_prec:
            frows = [(j, self.row_lb(j), self.uprec(j))
                     for j in self.possible_rows()]
            grows = [(j, other.row_lb(j), other.uprec(j))
                     for j in other.possible_rows()]
            for j1, lb1, up1 in frows:
                if lb1 is None:
                    continue
                for j2, lb2, up2 in grows:
                    if lb2 is None:
                        continue
                    j = j1 + j2
                    if j >= tp:
                        continue
                    b = min(up1 + lb2, up2 + lb1)
                    if b != INF and b < up.get(j, INF):
                        up[j] = b
        return Laurent2(self.dom, rows, None if tp == INF else tp, up)

    def monomial_mul(self, c, i_shift=0, j_shift=0):
        """Multiply by the exact monomial c·u^{i_shift}·t^{j_shift}."""
        if not c:
            return Laurent2.zero(self.dom)
        rows = {j + j_shift: {i + i_shift: c * v for i, v in row.items()}
                for j, row in self.terms.items()}
        tp = self.t_prec + j_shift
        up = {j + j_shift: b + i_shift for j, b in self.u_prec.items()}
        return Laurent2(self.dom, rows, None if tp == INF else tp, up)

    def int_scale(self, k):
        c = self.dom.from_int(k)
        if not c:
            return Laurent2.zero(self.dom)
        return self.monomial_mul(c)

    def cap_infinite(self, t_hi=DEFAULT_T_PREC, u_hi=DEFAULT_U_PREC):
        """Impose a finite working box on any infinite precision directions."""
        tp = self.t_prec if self.t_prec != INF else t_hi
        up = dict(self.u_prec)
        lo = self.tlb()
        if lo != INF:
            for j in range(int(lo), int(tp)):
                if self.uprec(j) == INF:
                    up[j] = u_hi
        return Laurent2(self.dom, self.terms, tp, up)

    def truncate(self, t_prec=None, u_prec=None):
        """Intersect the region with the given uniform bounds."""
        tp = min(self.t_prec, INF if t_prec is None else t_prec)
        up = dict(self.u_prec)
        if u_prec is not None:
            lo = self.tlb()
            if lo != INF and tp != INF:
                for j in range(int(lo), int(tp)):
                    up[j] = min(self.uprec(j), u_prec)
        return Laurent2(self.dom, self.terms,
                        None if tp == INF else tp, up)

    def __pow__(self, e):
        if e < 0:
            return invert(self) ** (-e)
        result = Laurent2.one(self.dom)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    # -- comparisons ---------------------------------------------------------

    def __eq__(self, other):
        return (isinstance(other, Laurent2) and self.dom is other.dom
                and self.terms == other.terms and self.t_prec == other.t_prec
                and self.u_prec == other.u_prec)

    def __hash__(self):
        return hash((id(self.dom), self.t_prec,
                     tuple(sorted((j, tuple(sorted(r.items(), key=lambda x: x[0])))
                                  for j, r in self.terms.items())),
                     tuple(sorted(self.u_prec.items()))))

    def same_known_terms(self, other):
        """Equal coefficient tables on the intersection of known regions."""
        tp = min(self.t_prec, other.t_prec)
        for j in set(self.terms) | set(other.terms):
            if j >= tp:
                continue
            bound = min(self.uprec(j), other.uprec(j))
            r1 = self.terms.get(j, {})
            r2 = other.terms.get(j, {})
            for i in set(r1) | set(r2):
                if i >= bound:
                    continue
                if r1.get(i, self.dom.zero) != r2.get(i, self.dom.zero):
                    return False
        return True

    # -- coefficient access ----------------------------------------------------

    def coeff(self, i, j):
        """Coefficient of u^i t^j; raises if outside the known region."""
        if j >= self.t_prec or i >= self.uprec(j):
            raise PrecisionTooLow(f"coefficient ({j},{i}) outside precision")
        return self.terms.get(j, {}).get(i, self.dom.zero)

    def leading(self):
        """(j, i, c) of the (t,u)-lexicographically least known term.

        Requires certainty: no possibly-hidden content lex-below it.
        """
        if not self.terms:
            raise ZeroDivisor("no nonzero coefficient at this precision")
        j0 = min(self.terms)
        hidden = [j for j in self.u_prec if j < j0]
        if hidden:
            raise PrecisionTooLow(
                f"row {min(hidden)} has unknown content below leading row {j0}")
        i0 = min(self.terms[j0])
        return j0, i0, self.terms[j0][i0]

    def serialize(self):
        bits = []
        for j in sorted(self.terms):
            for i in sorted(self.terms[j]):
                c = self.terms[j][i]
                cs = ",".join(str(x) for x in c.coeffs)
                term = f"[{cs}]"
                if i:
                    term += f"*u^{i}"
                if j:
                    term += f"*t^{j}"
                bits.append(term)
        s = " + ".join(bits) if bits else "0"
        if self.t_prec != INF:
            s += f" + O_t({int(self.t_prec)})"
        if self.u_prec:
            lows = min(self.u_prec.values())
            s += f" + O_u({int(lows)})"
        return s

    def __repr__(self):
        return f"Laurent2({self.serialize()})"


# --------------------------------------------------------------------------
# valuations, inversion, unit decomposition
# --------------------------------------------------------------------------

def outer_valuation(f):
    """v_t(f): least t-exponent with a nonzero coefficient row."""
    if not f.terms:
        raise ZeroElement("outer_valuation of (apparent) zero")
    j0 = min(f.terms)
    if any(j < j0 for j in f.u_prec):
        raise PrecisionTooLow("t-valuation not determined at this precision")
    return j0


def bar_valuation(f):
    """u-valuation of the leading-in-t coefficient series."""
    j0 = outer_valuation(f)
    return min(f.terms[j0])


def invert(f, t_prec=None, u_prec=None):
    """Multiplicative inverse at the propagated (possibly capped) precision."""
    j0, i0, c = f.leading()
    cinv = c.inv() if hasattr(c, "inv") else c ** -1
    fhat = f.monomial_mul(cinv, -i0, -j0)
    one = Laurent2.one(f.dom)
    eps = fhat - one
    if eps.has_no_known_terms() and not eps.u_prec and eps.t_prec == INF:
        return Laurent2.monomial(f.dom, cinv, -i0, -j0,
                                 None if f.t_prec == INF else
                                 int(f.t_prec) - 2 * j0, None)
    eps = eps.cap_infinite(t_prec or DEFAULT_T_PREC, u_prec or DEFAULT_U_PREC)
    # fixed working box: powers of eps gain precision as they gain valuation,
    # so without a hard cutoff the geometric loop would never terminate
    t_box = int(eps.t_prec)
    u_box = max([u_prec or DEFAULT_U_PREC]
                + [int(b) for b in eps.u_prec.values()])
    acc = one + (eps - eps)  # adopt eps's precision box
    pw = one
    while True:
        pw = (pw * (-eps)).truncate(t_box, u_box)
        if pw.has_no_known_terms():
            break
        acc = acc + pw
    # The remaining powers of eps contribute no known terms, but their
    # unknown regions still constrain the result.  Close the first empty
    # power's region under multiplication by eps (each eps term shifts a row
    # j1 bound by (j2, row_lb(j2))) and intersect.
    if pw.u_prec or pw.t_prec != INF:
        tail_t = min(pw.t_prec, t_box)
        dist = {j: b for j, b in pw.u_prec.items() if j < tail_t}
        edges = [(j2, eps.row_lb(j2)) for j2 in eps.possible_rows()
                 if eps.row_lb(j2) is not None]
        for _ in range(int(tail_t) - min(dist, default=int(tail_t)) + 1):
            changed = False
            for j, b in list(dist.items()):
                for dj, w in edges:
                    jj = j + dj
                    if jj >= tail_t:
                        continue
                    if b + w < dist.get(jj, INF):
                        dist[jj] = b + w
                        changed = True
            if not changed:
                break
        tail = Laurent2(f.dom, {}, int(tail_t), dist)
        acc = acc + tail
    return acc.monomial_mul(cinv, -i0, -j0)


@dataclass(frozen=True)
class UnitDecomposition:
    zeta_exp: int
    u_exp: int
    t_exp: int
    principal: Laurent2


@lru_cache(maxsize=None)
def _dlog_table(field):
    z = primitive_element(field)
    table = {}
    x = field.one
    for e in range(field.q - 1):
        table[x.coeffs] = e
        x = x * z
    return table


def unit_decompose(f):
    """f = ζ^a · u^i · t^j · ε with ε a principal unit."""
    j0 = outer_valuation(f)
    i0 = min(f.terms[j0])
    c = f.terms[j0][i0]
    a = _dlog_table(f.dom)[c.coeffs]
    principal = f.monomial_mul(c.inv(), -i0, -j0)
    return UnitDecomposition(a, i0, j0, principal)


def recompose(dec, dom):
    z = primitive_element(dom)
    lead = (z ** dec.zeta_exp)
    return dec.principal.monomial_mul(lead, dec.u_exp, dec.t_exp)


# --------------------------------------------------------------------------
# characteristic-zero lifts
# --------------------------------------------------------------------------

def lift_padic(f, s):
    """Coefficientwise Teichmüller lift into W_s(F_q)-coefficient series."""
    ring = galois_ring(f.dom, s)
    rows = {j: {i: ring.teichmuller(c) for i, c in row.items()}
            for j, row in f.terms.items()}
    return Laurent2(ring, rows,
                    None if f.t_prec == INF else int(f.t_prec), f.u_prec)


def reduce_mod_p(f, field):
    """Reduce a Galois-ring-coefficient series back to F_q coefficients."""
    ring = f.dom
    rows = {j: {i: ring.reduce_mod_p(c) for i, c in row.items()}
            for j, row in f.terms.items()}
    return Laurent2(field, rows,
                    None if f.t_prec == INF else int(f.t_prec), f.u_prec)


# --------------------------------------------------------------------------
# ring adapter so Laurent2 values can be Witt-vector components
# --------------------------------------------------------------------------

class LaurentDomain:
    """Presents Laurent2-over-dom as a coefficient ring for WittVec."""

    def __init__(self, dom):
        self.dom = dom
        self.p = dom.p
        self.char_p = isinstance(dom, FieldSpec) or \
            (isinstance(dom, GaloisRing) and dom.s == 1)
        self.zero = Laurent2.zero(dom)
        self.one = Laurent2.one(dom)

    def from_int(self, k):
        return Laurent2.monomial(self.dom, self.dom.from_int(k))


@lru_cache(maxsize=None)
def laurent_domain(dom):
    return LaurentDomain(dom)
