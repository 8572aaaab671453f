"""Differential forms over two-variable Laurent series.

One-forms a du + b dt and two-forms a du∧dt with the orientation du∧dt
positive (u the inner variable, t the outer).  The residue of a two-form is
the coefficient of u^{-1}t^{-1} in its du∧dt expression; no trace to the
prime field is applied here — callers that need a trace apply it themselves.
"""

from __future__ import annotations

from .errors import CoefficientOutsidePrecision, FieldMismatch
from .series import Laurent2


def d_du(f):
    """Partial derivative of a Laurent2 with respect to u."""
    rows = {}
    for j, row in f.terms.items():
        dst = {}
        for i, c in row.items():
            cc = f.dom.from_int(i) * c
            if cc:
                dst[i - 1] = cc
        if dst:
            rows[j] = dst
    up = {j: b - 1 for j, b in f.u_prec.items()}
    return Laurent2(f.dom, rows,
                    None if f.t_prec == float("inf") else int(f.t_prec), up)


def d_dt(f):
    """Partial derivative of a Laurent2 with respect to t."""
    rows = {}
    for j, row in f.terms.items():
        dst = {}
        for i, c in row.items():
            cc = f.dom.from_int(j) * c
            if cc:
                dst[i] = cc
        if dst:
            rows[j - 1] = dst
    tp = f.t_prec - 1
    up = {j - 1: b for j, b in f.u_prec.items()}
    return Laurent2(f.dom, rows, None if tp == float("inf") else int(tp), up)


class OneForm:
    """a du + b dt with Laurent2 coefficients."""

    __slots__ = ("a", "b")

    def __init__(self, a, b):
        if a.dom is not b.dom:
            raise FieldMismatch("one-form components over different domains")
        self.a = a
        self.b = b

    @property
    def dom(self):
        return self.a.dom

    def __add__(self, other):
        return OneForm(self.a + other.a, self.b + other.b)

    def __neg__(self):
        return OneForm(-self.a, -self.b)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, f):
        return OneForm(f * self.a, f * self.b)

    def __eq__(self, other):
        return (isinstance(other, OneForm)
                and self.a == other.a and self.b == other.b)

    def __repr__(self):
        return f"({self.a.serialize()}) du + ({self.b.serialize()}) dt"


class TwoForm:
    """a du∧dt with a a Laurent2."""

    __slots__ = ("a",)

    def __init__(self, a):
        self.a = a

    @property
    def dom(self):
        return self.a.dom

    def __add__(self, other):
        return TwoForm(self.a + other.a)

    def __neg__(self):
        return TwoForm(-self.a)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, f):
        return TwoForm(f * self.a)

    def int_scale(self, k):
        return TwoForm(self.a.int_scale(k))

    def __eq__(self, other):
        return isinstance(other, TwoForm) and self.a == other.a

    def __repr__(self):
        return f"({self.a.serialize()}) du^dt"

    def serialize(self):
        return f"({self.a.serialize()}) du^dt"


def differential(f):
    """Exterior derivative df of a Laurent2, as a one-form."""
    return OneForm(d_du(f), d_dt(f))


def dlog(f, finv=None):
    """The logarithmic differential df/f as a one-form.

    finv may be supplied when the caller already holds 1/f.
    """
    if finv is None:
        from .series import invert
        finv = invert(f)
    return OneForm(d_du(f) * finv, d_dt(f) * finv)


def wedge(w1, w2):
    """Wedge of two one-forms in the du∧dt orientation."""
    return TwoForm(w1.a * w2.b - w1.b * w2.a)


def residue(form):
    """Coefficient of u^{-1}t^{-1} du∧dt, in the coefficient domain."""
    try:
        return form.a.coeff(-1, -1)
    except Exception as exc:
        raise CoefficientOutsidePrecision(
            "residue coefficient not determined at this precision") from exc
