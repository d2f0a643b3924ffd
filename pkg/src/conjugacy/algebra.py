"""Exact polynomial and rational-function arithmetic over the rationals.

Coefficients are :class:`fractions.Fraction` throughout, so every operation
here is exact. Polynomials store coefficients in ascending degree order.
Rational functions are kept canonical: numerator and denominator coprime,
denominator monic.

Example:
    >>> x = RationalFn.x()
    >>> t2 = 1 - 2 * x * x
    >>> t2.derivative()
    RationalFn(-4*x)
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence, Union

Number = Union[int, Fraction, float, str]


def to_fraction(value: Number) -> Fraction:
    """Convert ints, floats, decimal strings and ``"p/q"`` strings exactly."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not coefficients")
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, float):
        if value != value or value in (float("inf"), float("-inf")):
            raise ValueError(f"non-finite coefficient {value!r}")
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot convert {type(value).__name__} to Fraction")


def _trim(coeffs: Iterable[Fraction]) -> tuple:
    c = list(coeffs)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


class Poly:
    """Univariate polynomial with exact rational coefficients (ascending)."""

    __slots__ = ("coeffs", "_floats")

    def __init__(self, coeffs: Iterable[Number] = ()):
        self.coeffs: tuple = _trim(to_fraction(c) for c in coeffs)
        self._floats = None

    @classmethod
    def _raw(cls, coeffs: Iterable[Fraction]) -> "Poly":
        p = cls.__new__(cls)
        p.coeffs = _trim(coeffs)
        p._floats = None
        return p

    @classmethod
    def x(cls) -> "Poly":
        return cls._raw((Fraction(0), Fraction(1)))

    @classmethod
    def const(cls, c: Number) -> "Poly":
        return cls._raw((to_fraction(c),))

    # -- basic queries -----------------------------------------------------

    @property
    def degree(self) -> int:
        """Degree; the zero polynomial has degree -1."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lead(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def __getitem__(self, k: int) -> Fraction:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else Fraction(0)

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == _trim((Fraction(other),))
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"Poly({self})"

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if k == 0:
                terms.append(str(c))
            else:
                mono = "x" if k == 1 else f"x^{k}"
                if c == 1:
                    terms.append(mono)
                elif c == -1:
                    terms.append("-" + mono)
                else:
                    terms.append(f"{c}*{mono}")
        return " + ".join(terms).replace("+ -", "- ")

    # -- arithmetic --------------------------------------------------------

    @staticmethod
    def _coerce(other) -> "Poly":
        if isinstance(other, Poly):
            return other
        return Poly.const(other)

    def __add__(self, other) -> "Poly":
        if isinstance(other, RationalFn):
            return NotImplemented
        other = self._coerce(other)
        a, b = self.coeffs, other.coeffs
        n = max(len(a), len(b))
        zero = Fraction(0)
        return Poly._raw(
            (a[i] if i < len(a) else zero) + (b[i] if i < len(b) else zero)
            for i in range(n)
        )

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly._raw(-c for c in self.coeffs)

    def __sub__(self, other) -> "Poly":
        if isinstance(other, RationalFn):
            return NotImplemented
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "Poly":
        return self._coerce(other) - self

    def __mul__(self, other) -> "Poly":
        if isinstance(other, RationalFn):
            return NotImplemented
        other = self._coerce(other)
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Poly._raw(())
        out = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai == 0:
                continue
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
        return Poly._raw(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Poly":
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = Poly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __divmod__(self, other) -> tuple:
        other = self._coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = other.degree
        lead = other.lead
        if len(rem) - 1 < dq:
            return Poly._raw(()), self
        quot = [Fraction(0)] * (len(rem) - dq)
        for k in range(len(rem) - 1 - dq, -1, -1):
            c = rem[k + dq] / lead
            quot[k] = c
            if c:
                for j, oj in enumerate(other.coeffs):
                    rem[k + j] -= c * oj
        return Poly._raw(quot), Poly._raw(rem[:dq])

    def __floordiv__(self, other) -> "Poly":
        return divmod(self, other)[0]

    def __mod__(self, other) -> "Poly":
        return divmod(self, other)[1]

    def monic(self) -> "Poly":
        if self.is_zero():
            return self
        lead = self.lead
        return Poly._raw(c / lead for c in self.coeffs)

    def derivative(self) -> "Poly":
        return Poly._raw(k * c for k, c in enumerate(self.coeffs) if k > 0)

    def compose(self, inner: "Poly") -> "Poly":
        """Return ``self(inner(x))`` by Horner's scheme."""
        result = Poly._raw(())
        for c in reversed(self.coeffs):
            result = result * inner + c
        return result

    # -- evaluation ----------------------------------------------------------

    def exact(self, x: Number) -> Fraction:
        x = to_fraction(x)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    @property
    def float_coeffs(self) -> tuple:
        if self._floats is None:
            self._floats = tuple(float(c) for c in self.coeffs)
        return self._floats

    def __call__(self, x):
        """Floating-point evaluation (works elementwise on numpy arrays)."""
        acc = 0.0
        for c in reversed(self.float_coeffs):
            acc = acc * x + c
        return acc


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd by the Euclidean algorithm; gcd(0, 0) = 0."""
    while not b.is_zero():
        a, b = b, a % b
        # keep the remainder sequence normalized to slow coefficient growth
        b = b.monic()
    return a.monic()


class RationalFn:
    """Canonical quotient of exact polynomials.

    The denominator is monic and coprime to the numerator. The zero function
    is ``0/1``.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        num = num if isinstance(num, Poly) else Poly(num if _is_seq(num) else [num])
        if den is None:
            den = Poly.const(1)
        elif not isinstance(den, Poly):
            den = Poly(den if _is_seq(den) else [den])
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        self.num, self.den = _canonical(num, den)

    @classmethod
    def _raw(cls, num: Poly, den: Poly) -> "RationalFn":
        r = cls.__new__(cls)
        r.num, r.den = num, den
        return r

    @classmethod
    def x(cls) -> "RationalFn":
        return cls._raw(Poly.x(), Poly.const(1))

    @classmethod
    def const(cls, c: Number) -> "RationalFn":
        return cls._raw(Poly.const(c), Poly.const(1))

    @classmethod
    def coerce(cls, value) -> "RationalFn":
        if isinstance(value, RationalFn):
            return value
        if isinstance(value, Poly):
            return cls._raw(value, Poly.const(1))
        return cls.const(value)

    def canonicalize(self) -> "RationalFn":
        return RationalFn(self.num, self.den)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_poly(self) -> bool:
        return self.den.degree == 0

    def __eq__(self, other) -> bool:
        if not isinstance(other, (RationalFn, Poly, int, Fraction)):
            return NotImplemented
        other = RationalFn.coerce(other)
        return self.num == other.num and self.den == other.den

    def __hash__(self) -> int:
        return hash((self.num, self.den))

    def __repr__(self) -> str:
        return f"RationalFn({self})"

    def __str__(self) -> str:
        if self.is_poly():
            return str(self.num)
        return f"({self.num}) / ({self.den})"

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other) -> "RationalFn":
        o = RationalFn.coerce(other)
        if self.den == o.den:
            return RationalFn(self.num + o.num, self.den)
        return RationalFn(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self) -> "RationalFn":
        return RationalFn._raw(-self.num, self.den)

    def __sub__(self, other) -> "RationalFn":
        return self + (-RationalFn.coerce(other))

    def __rsub__(self, other) -> "RationalFn":
        return RationalFn.coerce(other) - self

    def __mul__(self, other) -> "RationalFn":
        o = RationalFn.coerce(other)
        return RationalFn(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "RationalFn":
        o = RationalFn.coerce(other)
        if o.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        return RationalFn(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other) -> "RationalFn":
        return RationalFn.coerce(other) / self

    def __pow__(self, n: int) -> "RationalFn":
        if n < 0:
            return RationalFn.const(1) / (self ** (-n))
        return RationalFn._raw(self.num**n, self.den**n)

    def derivative(self) -> "RationalFn":
        n, d = self.num, self.den
        return RationalFn(n.derivative() * d - n * d.derivative(), d * d)

    def compose(self, inner) -> "RationalFn":
        """Return ``self(inner(x))`` exactly.

        With ``inner = p/q`` and ``m = max(deg num, deg den)`` the result is
        ``sum(num_i p^i q^(m-i)) / sum(den_i p^i q^(m-i))``.
        """
        inner = RationalFn.coerce(inner)
        p, q = inner.num, inner.den
        m = max(self.num.degree, self.den.degree, 0)
        ppow = [Poly.const(1)]
        qpow = [Poly.const(1)]
        for _ in range(m):
            ppow.append(ppow[-1] * p)
            qpow.append(qpow[-1] * q)

        def homog(poly: Poly) -> Poly:
            acc = Poly._raw(())
            for i, c in enumerate(poly.coeffs):
                if c:
                    acc = acc + (ppow[i] * qpow[m - i]) * c
            return acc

        den = homog(self.den)
        if den.is_zero():
            raise ZeroDivisionError("composition lands on a pole identically")
        return RationalFn(homog(self.num), den)

    # -- evaluation ------------------------------------------------------------

    def exact(self, x: Number) -> Fraction:
        d = self.den.exact(x)
        if d == 0:
            raise ZeroDivisionError(f"pole at x = {x}")
        return self.num.exact(x) / d

    def __call__(self, x):
        return self.num(x) / self.den(x)


def _is_seq(v) -> bool:
    return isinstance(v, (list, tuple)) or (hasattr(v, "__len__") and not isinstance(v, str))


def _canonical(num: Poly, den: Poly) -> tuple:
    if num.is_zero():
        return Poly._raw(()), Poly.const(1)
    g = poly_gcd(num, den)
    if g.degree > 0:
        num = num // g
        den = den // g
    lead = den.lead
    if lead != 1:
        num = Poly._raw(c / lead for c in num.coeffs)
        den = Poly._raw(c / lead for c in den.coeffs)
    return num, den


def rf_arith(lhs, rhs, op: str) -> RationalFn:
    """Combine two rational functions with ``op`` in {add, sub, mul, div}."""
    lhs, rhs = RationalFn.coerce(lhs), RationalFn.coerce(rhs)
    if op == "add":
        return lhs + rhs
    if op == "sub":
        return lhs - rhs
    if op == "mul":
        return lhs * rhs
    if op == "div":
        return lhs / rhs
    raise ValueError(f"unknown operation {op!r}")


def rf_compose(outer, inner) -> RationalFn:
    return RationalFn.coerce(outer).compose(inner)


def rf_derivative(f) -> RationalFn:
    return RationalFn.coerce(f).derivative()


def functional_defect(F, H, G) -> RationalFn:
    """``H(F(x)) - G(F'(x)) H(x)`` as a canonical rational function."""
    F, H = RationalFn.coerce(F), RationalFn.coerce(H)
    G = RationalFn.coerce(G if isinstance(G, Poly) else Poly(G))
    return H.compose(F) - G.compose(F.derivative()) * H


def verify_functional_identity(F, H, G) -> bool:
    """Decide exactly whether ``H(F(x)) = G(F'(x)) H(x)`` identically."""
    return functional_defect(F, H, G).is_zero()


QUARTER_SQUARE = Poly([0, 0, Fraction(1, 4)])


# -- the exactly solvable families and their paired functions ---------------

def elliptic_pair(a: Number, b: Number) -> tuple:
    """Tangent-doubling map on ``y^2 = x^3 + a x + b`` and ``H = x^3 + a x + b``."""
    a, b = to_fraction(a), to_fraction(b)
    num = Poly([a * a, -8 * b, -2 * a, 0, 1])
    den = Poly([4 * b, 4 * a, 0, 4])
    return RationalFn(num, den), RationalFn(Poly([b, a, 0, 1]))


def chebyshev_pair() -> tuple:
    return RationalFn(Poly([1, 0, -2])), RationalFn(Poly([1, 0, -1]))


def logistic_pair() -> tuple:
    return RationalFn(Poly([0, 4, -4])), RationalFn(Poly([0, 1, -1]))


def katsura_fukuda_pair(l: Number) -> tuple:
    """``F_l = 4x(1-x)(1-lx)/(1-lx^2)^2`` and ``H_l = x(1-x)(1-lx)``."""
    l = to_fraction(l)
    h = Poly([0, 1, -1]) * Poly([1, -l])
    den = Poly([1, 0, -l]) ** 2
    return RationalFn(h * 4, den), RationalFn(h)


FAMILY_PARAMS = {
    "elliptic": ("a", "b"),
    "chebyshev": (),
    "logistic": (),
    "katsura-fukuda": ("l",),
}


def lemma_pair(family: str, params: Sequence[Number] = ()) -> tuple:
    """Return ``(F, H)`` for one of the families in :data:`FAMILY_PARAMS`."""
    if family not in FAMILY_PARAMS:
        raise ValueError(f"unknown family {family!r}")
    expected = FAMILY_PARAMS[family]
    if len(params) != len(expected):
        raise ValueError(f"{family} takes parameters {expected}, got {tuple(params)}")
    if family == "elliptic":
        return elliptic_pair(*params)
    if family == "chebyshev":
        return chebyshev_pair()
    if family == "logistic":
        return logistic_pair()
    l = to_fraction(params[0])
    if not 0 <= l < 1:
        raise ValueError(f"katsura-fukuda requires 0 <= l < 1, got {l}")
    return katsura_fukuda_pair(l)


@dataclass(frozen=True)
class IdentityItem:
    params: tuple
    passed: bool
    defect: str = "0"
    error: str | None = None


@dataclass(frozen=True)
class IdentityReport:
    family: str
    items: tuple

    @property
    def passed(self) -> bool:
        return bool(self.items) and all(item.passed for item in self.items)

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "pass": self.passed,
            "items": [
                {
                    "params": [str(p) for p in item.params],
                    "pass": item.passed,
                    "defect": item.defect,
                    **({"error": item.error} if item.error else {}),
                }
                for item in self.items
            ],
        }


DEFAULT_SAMPLES = {
    "elliptic": tuple((a, b) for a in (-2, -1, 1, 2, 3) for b in (-2, -1, 1, 2, 3)),
    "chebyshev": ((),),
    "logistic": ((),),
    "katsura-fukuda": tuple(
        (Fraction(s),) for s in ("0", "1/4", "1/2", "3/4", "9/10")
    ),
}


def verify_lemma_suite(family: str, param_samples: Sequence[Sequence[Number]] | None = None) -> IdentityReport:
    """Check ``H(F) = F'^2 H / 4`` exactly at each parameter sample.

    Inadmissible samples are recorded as failed items rather than raised.
    """
    if family not in FAMILY_PARAMS:
        raise ValueError(f"unknown family {family!r}")
    if param_samples is None:
        param_samples = DEFAULT_SAMPLES[family]
    items = []
    for sample in param_samples:
        sample = tuple(sample)
        try:
            F, H = lemma_pair(family, sample)
        except (ValueError, ZeroDivisionError) as exc:
            items.append(IdentityItem(sample, False, "", str(exc)))
            continue
        defect = functional_defect(F, H, QUARTER_SQUARE)
        exact_params = tuple(to_fraction(p) for p in sample)
        items.append(IdentityItem(exact_params, defect.is_zero(), str(defect)))
    return IdentityReport(family, tuple(items))


def squarefree(p: Poly) -> Poly:
    """Monic squarefree part ``p / gcd(p, p')``."""
    if p.degree <= 0:
        return p.monic()
    return (p // poly_gcd(p, p.derivative())).monic()


def real_roots(p: Poly) -> list:
    """Sorted real roots of ``p`` as floats, each polished by Newton steps.

    Multiple roots are reported once (the squarefree part is used).
    """
    import numpy as np

    q = squarefree(p)
    if q.degree <= 0:
        return []
    fc = q.float_coeffs
    raw = np.roots(fc[::-1])
    dq = q.derivative()
    roots = []
    for z in raw:
        if abs(z.imag) > 1e-7 * max(1.0, abs(z)):
            continue
        x = float(z.real)
        for _ in range(8):
            d = dq(x)
            if d == 0:
                break
            step = q(x) / d
            x -= step
            if abs(step) <= 1e-16 * max(1.0, abs(x)):
                break
        roots.append(x)
    roots.sort()
    merged = []
    for r in roots:
        if not merged or abs(r - merged[-1]) > 1e-12 * max(1.0, abs(r)):
            merged.append(r)
    return merged
