"""Interval maps, the built-in catalog, and Möbius changes of variable.

Every map is backed by an exact :class:`~conjugacy.algebra.RationalFn`, so
derivatives up to order three are obtained by exact differentiation and then
evaluated in floating point.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable, Mapping

import numpy as np

from .algebra import (
    Number,
    Poly,
    RationalFn,
    chebyshev_pair,
    elliptic_pair,
    katsura_fukuda_pair,
    logistic_pair,
    real_roots,
    to_fraction,
)

INF = math.inf


class MapError(ValueError):
    """Base class for invalid map construction or evaluation."""


class PoleError(MapError, ArithmeticError):
    pass


class DomainError(MapError):
    pass


class UnknownFamilyError(MapError):
    pass


class ParameterError(MapError):
    pass


@dataclass(frozen=True)
class Interval:
    """Real interval; unbounded ends are ``math.inf`` and always open."""

    lo: float
    hi: float
    lo_closed: bool = True
    hi_closed: bool = True

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        if math.isnan(lo) or math.isnan(hi) or not lo < hi:
            raise ValueError(f"interval needs lo < hi, got [{self.lo}, {self.hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        if math.isinf(lo):
            object.__setattr__(self, "lo_closed", False)
        if math.isinf(hi):
            object.__setattr__(self, "hi_closed", False)

    @classmethod
    def open(cls, lo: float, hi: float) -> "Interval":
        return cls(lo, hi, False, False)

    @classmethod
    def real_line(cls) -> "Interval":
        return cls(-INF, INF, False, False)

    def __contains__(self, x: float) -> bool:
        if x < self.lo or x > self.hi:
            return False
        if x == self.lo and not self.lo_closed:
            return False
        if x == self.hi and not self.hi_closed:
            return False
        return True

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.lo) and math.isfinite(self.hi)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def interior_contains(self, x: float) -> bool:
        return self.lo < x < self.hi

    def intersect(self, other: "Interval") -> "Interval":
        lo, lc = (self.lo, self.lo_closed) if self.lo > other.lo else (other.lo, other.lo_closed)
        if self.lo == other.lo:
            lc = self.lo_closed and other.lo_closed
        hi, hc = (self.hi, self.hi_closed) if self.hi < other.hi else (other.hi, other.hi_closed)
        if self.hi == other.hi:
            hc = self.hi_closed and other.hi_closed
        return Interval(lo, hi, lc, hc)

    def to_list(self) -> list:
        return [_fmt_end(self.lo), _fmt_end(self.hi)]

    def __str__(self) -> str:
        return f"{'[' if self.lo_closed else '('}{self.lo}, {self.hi}{']' if self.hi_closed else ')'}"


def _fmt_end(v: float):
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return v


def _horner(coeffs: tuple) -> Callable[[float], float]:
    rev = tuple(reversed(coeffs))
    if not rev:
        return lambda x: 0.0

    def f(x):
        acc = 0.0
        for c in rev:
            acc = acc * x + c
        return acc

    return f


def _ratio_fn(rf: RationalFn) -> Callable[[float], float]:
    num = _horner(rf.num.float_coeffs)
    if rf.den.degree == 0:
        scale = 1.0 / float(rf.den.coeffs[0])
        return lambda x: num(x) * scale
    den = _horner(rf.den.float_coeffs)
    return lambda x: num(x) / den(x)


class SmoothMap1D:
    """A rational interval map with exact derivatives.

    ``params`` records the family parameters the map was built from and
    ``paired_h``, when set, is the function ``H`` with
    ``H(f(x)) = f'(x)^2 H(x) / 4``.
    """

    __slots__ = ("expr", "domain", "params", "name", "paired_h", "poles", "_derivs", "_fns")

    def __init__(
        self,
        expr: RationalFn,
        domain: Interval | None = None,
        params: Mapping | None = None,
        name: str = "rational",
        paired_h: RationalFn | None = None,
    ):
        self.expr = RationalFn.coerce(expr)
        self.domain = domain or Interval.real_line()
        self.params = dict(params or {})
        self.name = name
        self.paired_h = paired_h
        self.poles = tuple(
            r for r in real_roots(self.expr.den) if self.domain.lo <= r <= self.domain.hi
        )
        self._derivs = [self.expr]
        self._fns = [_ratio_fn(self.expr)]

    @classmethod
    def from_coeffs(cls, num, den=(1,), domain: Interval | None = None, **kw) -> "SmoothMap1D":
        return cls(RationalFn(Poly(num), Poly(den)), domain, **kw)

    def __repr__(self) -> str:
        p = ", ".join(f"{k}={v}" for k, v in self.params.items())
        return f"SmoothMap1D({self.name}{'; ' + p if p else ''}: {self.expr} on {self.domain})"

    def derivative_expr(self, order: int) -> RationalFn:
        while len(self._derivs) <= order:
            self._derivs.append(self._derivs[-1].derivative())
            self._fns.append(_ratio_fn(self._derivs[-1]))
        return self._derivs[order]

    def _fn(self, order: int) -> Callable[[float], float]:
        if order >= len(self._fns):
            self.derivative_expr(order)
        return self._fns[order]

    def _check(self, x: float) -> None:
        for p in self.poles:
            if abs(x - p) <= 4e-16 * max(1.0, abs(p)):
                raise PoleError(f"{self.name}: pole at x = {p!r}")
        if x not in self.domain:
            raise DomainError(f"{self.name}: x = {x!r} outside {self.domain}")

    def eval(self, x: float) -> float:
        self._check(x)
        return self._fns[0](x)

    __call__ = eval

    def deriv(self, x: float, order: int = 1) -> float:
        if not isinstance(order, int) or not 0 <= order <= 3:
            raise ValueError(f"derivative order must be in 0..3, got {order!r}")
        self._check(x)
        return self._fn(order)(x)

    def eval_array(self, xs) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        return self.expr.num(xs) / self.expr.den(xs)

    def deriv_array(self, xs, order: int = 1) -> np.ndarray:
        rf = self.derivative_expr(order)
        xs = np.asarray(xs, dtype=float)
        return rf.num(xs) / rf.den(xs)

    # -- exact transformations ---------------------------------------------

    def with_domain(self, domain: Interval) -> "SmoothMap1D":
        return SmoothMap1D(self.expr, domain, self.params, self.name, self.paired_h)

    def reflect(self) -> "SmoothMap1D":
        """The map ``x -> -f(-x)`` (conjugacy by negation)."""
        neg = RationalFn(Poly([0, -1]))
        expr = -(self.expr.compose(neg))
        d = self.domain
        dom = Interval(-d.hi, -d.lo, d.hi_closed, d.lo_closed)
        h = self.paired_h.compose(neg) if self.paired_h is not None else None
        return SmoothMap1D(expr, dom, self.params, self.name + "~reflected", h)

    def iterate(self, n: int) -> "SmoothMap1D":
        """Exact ``n``-fold composition."""
        expr = RationalFn.x()
        for _ in range(n):
            expr = self.expr.compose(expr)
        return SmoothMap1D(expr, self.domain, self.params, f"{self.name}^{n}")

    def shifted(self, center: float) -> RationalFn:
        """Exact local form ``u -> f(center + u) - center``."""
        c = to_fraction(center)
        return self.expr.compose(RationalFn(Poly([c, 1]))) - c


class PiecewiseMap1D:
    """Continuous map built from two branches meeting at the kink ``x = 0``."""

    __slots__ = ("left", "right", "domain", "params", "name")

    def __init__(self, left: SmoothMap1D, right: SmoothMap1D, domain: Interval | None = None,
                 params: Mapping | None = None, name: str = "piecewise"):
        domain = domain or Interval.real_line()
        if not domain.lo < 0 < domain.hi:
            raise DomainError(f"piecewise domain {domain} must contain the kink 0 in its interior")
        if left.expr.exact(0) != right.expr.exact(0):
            raise MapError(
                f"branches disagree at the kink: {left.expr.exact(0)} != {right.expr.exact(0)}"
            )
        self.left = left.with_domain(Interval(max(domain.lo, -INF), 0.0, domain.lo_closed, True))
        self.right = right.with_domain(Interval(0.0, domain.hi, True, domain.hi_closed))
        self.domain = domain
        self.params = dict(params or {})
        self.name = name

    @classmethod
    def from_exprs(cls, left, right, domain: Interval | None = None, kink: Number = 0, **kw) -> "PiecewiseMap1D":
        """Build from two rational branches; a kink at ``c`` is moved to 0."""
        left, right = RationalFn.coerce(left), RationalFn.coerce(right)
        c = to_fraction(kink)
        if c:
            shift = RationalFn(Poly([c, 1]))
            left = left.compose(shift) - c
            right = right.compose(shift) - c
            if domain is not None:
                domain = Interval(domain.lo - float(c), domain.hi - float(c), domain.lo_closed, domain.hi_closed)
        return cls(SmoothMap1D(left), SmoothMap1D(right), domain, **kw)

    def __repr__(self) -> str:
        return f"PiecewiseMap1D({self.name}: L={self.left.expr}, R={self.right.expr} on {self.domain})"

    def branch(self, x: float) -> SmoothMap1D:
        return self.left if x <= 0 else self.right

    def eval(self, x: float) -> float:
        if x not in self.domain:
            raise DomainError(f"{self.name}: x = {x!r} outside {self.domain}")
        return (self.left if x <= 0 else self.right)._fns[0](x)

    __call__ = eval

    def deriv(self, x: float, order: int = 1, side: str | None = None) -> float:
        """One-sided derivative; at the kink ``side`` ('left'/'right') is required."""
        if x == 0 and side is None:
            raise ValueError("derivative at the kink needs side='left' or side='right'")
        if side is None:
            side = "left" if x < 0 else "right"
        branch = self.left if side == "left" else self.right
        if not isinstance(order, int) or not 0 <= order <= 3:
            raise ValueError(f"derivative order must be in 0..3, got {order!r}")
        return branch._fn(order)(x)

    def eval_array(self, xs) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        return np.where(xs <= 0, self.left.eval_array(xs), self.right.eval_array(xs))

    def deriv_array(self, xs, order: int = 1) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        return np.where(xs <= 0, self.left.deriv_array(xs, order), self.right.deriv_array(xs, order))


def eval_map(f, x: float) -> float:
    return f.eval(x)


def deriv(f, x: float, order: int = 1) -> float:
    return f.deriv(x, order)


# -- Möbius transformations ------------------------------------------------------

@dataclass(frozen=True)
class Mobius:
    """``x -> (alpha x + beta) / (gamma x + delta)`` with exact coefficients."""

    alpha: Fraction
    beta: Fraction
    gamma: Fraction
    delta: Fraction

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma", "delta"):
            object.__setattr__(self, name, to_fraction(getattr(self, name)))
        if self.alpha * self.delta - self.beta * self.gamma == 0:
            raise MapError("singular Möbius transformation (zero determinant)")

    @classmethod
    def identity(cls) -> "Mobius":
        return cls(1, 0, 0, 1)

    @property
    def det(self) -> Fraction:
        return self.alpha * self.delta - self.beta * self.gamma

    def inverse(self) -> "Mobius":
        return Mobius(self.delta, -self.beta, -self.gamma, self.alpha)

    def as_rational(self) -> RationalFn:
        return RationalFn(Poly([self.beta, self.alpha]), Poly([self.delta, self.gamma]))

    @property
    def pole(self) -> float | None:
        return None if self.gamma == 0 else float(-self.delta / self.gamma)

    def __call__(self, x: float) -> float:
        a, b, c, d = (float(v) for v in (self.alpha, self.beta, self.gamma, self.delta))
        if math.isinf(x):
            return INF * math.copysign(1.0, a * x) if c == 0 else a / c
        den = c * x + d
        if den == 0:
            # orientation of the blow-up follows the sign of the numerator
            return math.copysign(INF, a * x + b)
        return (a * x + b) / den


def mobius_conjugate(f: SmoothMap1D, m: Mobius, domain: Interval | None = None) -> SmoothMap1D:
    """Return ``m^-1 o f o m`` on the preimage of ``f.domain`` under ``m``.

    A paired ``H`` is transported as a quadratic differential,
    ``H~ = (H o m) / (m')^2``, which preserves ``H(f) = f'^2 H / 4``.
    """
    if not isinstance(f, SmoothMap1D):
        raise TypeError("mobius_conjugate expects a SmoothMap1D")
    inv = m.inverse()
    mr = m.as_rational()
    expr = inv.as_rational().compose(f.expr.compose(mr))
    if domain is None:
        d = f.domain
        a, b = inv(d.lo), inv(d.hi)
        if a < b:
            domain = Interval(a, b, d.lo_closed, d.hi_closed)
        else:
            domain = Interval(b, a, d.hi_closed, d.lo_closed)
    pole = m.pole
    if pole is not None and domain.lo < pole < domain.hi:
        raise DomainError(f"Möbius pole {pole} lies inside the target domain {domain}")
    h = None
    if f.paired_h is not None:
        h = f.paired_h.compose(mr) / (mr.derivative() ** 2)
    return SmoothMap1D(expr, domain, f.params, f.name + "~mobius", h)


# -- catalog -------------------------------------------------------------------

def elliptic_asymptote(a: Number, b: Number) -> float:
    """Largest real root of ``x^3 + a x + b``, the elliptic map's asymptote."""
    roots = real_roots(Poly([to_fraction(b), to_fraction(a), 0, 1]))
    return roots[-1]


def elliptic_compactifier(a: Number, b: Number, scale: Number = 1) -> Mobius:
    """Möbius map ``x -> r + scale (1+x)/(1-x)`` sending -1 to r and 1 to infinity."""
    r = to_fraction(elliptic_asymptote(a, b))
    k = to_fraction(scale)
    if k <= 0:
        raise ParameterError("compactifier scale must be positive")
    return Mobius(k - r, r + k, -1, 1)


def _need(params: Mapping, names, optional: Mapping | None = None) -> dict:
    optional = dict(optional or {})
    unknown = set(params) - set(names) - set(optional)
    if unknown:
        raise ParameterError(f"unknown parameters {sorted(unknown)}; expected {list(names) + list(optional)}")
    out = {}
    for n in names:
        if n not in params:
            raise ParameterError(f"missing parameter {n!r}")
        out[n] = to_fraction(params[n])
    for n, default in optional.items():
        out[n] = to_fraction(params.get(n, default))
    return out


def _make_chebyshev(p):
    _need(p, ())
    F, H = chebyshev_pair()
    return SmoothMap1D(F, Interval(-1, 1), {}, "chebyshev", H)


def _make_logistic(p):
    _need(p, ())
    F, H = logistic_pair()
    return SmoothMap1D(F, Interval(0, 1), {}, "logistic", H)


def _make_kf(p):
    q = _need(p, ("l",))
    if not 0 <= q["l"] < 1:
        raise ParameterError(f"katsura-fukuda requires 0 <= l < 1, got {q['l']}")
    F, H = katsura_fukuda_pair(q["l"])
    return SmoothMap1D(F, Interval(0, 1), q, "katsura-fukuda", H)


def _make_elliptic(p):
    q = _need(p, ("a", "b"))
    F, H = elliptic_pair(q["a"], q["b"])
    r = elliptic_asymptote(q["a"], q["b"])
    return SmoothMap1D(F, Interval(r, INF, False, False), q, "elliptic", H)


def _make_elliptic_compact(p):
    q = _need(p, ("a", "b"), {"scale": 1})
    base = _make_elliptic({"a": q["a"], "b": q["b"]})
    m = elliptic_compactifier(q["a"], q["b"], q["scale"])
    g = mobius_conjugate(base, m, Interval(-1, 1))
    return SmoothMap1D(g.expr, g.domain, q, "elliptic-compact", g.paired_h)


def _make_linear(p):
    q = _need(p, ("lambda",))
    return SmoothMap1D(RationalFn(Poly([0, q["lambda"]])), None, q, "linear")


def _make_saddle_node(p):
    q = _need(p, ("nu",), {"a": 0})
    return SmoothMap1D(RationalFn(Poly([q["nu"], 1, -1, q["a"]])), None, q, "saddle-node")


def _make_pitchfork(p):
    q = _need(p, ("nu",), {"a": 0, "b": 0})
    nu = q["nu"]
    return SmoothMap1D(RationalFn(Poly([0, 1 + nu, q["b"] * nu, -1, 0, q["a"]])), None, q, "pitchfork")


def _make_skew_tent(p):
    q = _need(p, ("nu", "s_L", "s_R"))
    return PiecewiseMap1D(
        SmoothMap1D(RationalFn(Poly([q["nu"], q["s_L"]]))),
        SmoothMap1D(RationalFn(Poly([q["nu"], q["s_R"]]))),
        None, q, "skew-tent",
    )


def _make_skew_tent_quad(p):
    q = _need(p, ("nu", "s_L", "s_R"), {"t": 0})
    return PiecewiseMap1D(
        SmoothMap1D(RationalFn(Poly([q["nu"], q["s_L"], q["t"]]))),
        SmoothMap1D(RationalFn(Poly([q["nu"], q["s_R"]]))),
        None, q, "skew-tent-quad",
    )


CATALOG = {
    "chebyshev": (_make_chebyshev, "1 - 2x^2 on [-1, 1]"),
    "logistic": (_make_logistic, "4x(1 - x) on [0, 1]"),
    "katsura-fukuda": (_make_kf, "4x(1-x)(1-lx)/(1-lx^2)^2 on [0, 1], 0 <= l < 1"),
    "elliptic": (_make_elliptic, "(x^4 - 2ax^2 - 8bx + a^2)/(4(x^3 + ax + b)) on (r, inf)"),
    "elliptic-compact": (_make_elliptic_compact, "elliptic map moved to [-1, 1] by x -> r + scale(1+x)/(1-x)"),
    "linear": (_make_linear, "lambda x"),
    "saddle-node": (_make_saddle_node, "y + nu - y^2 + a y^3"),
    "pitchfork": (_make_pitchfork, "y + nu y + b nu y^2 - y^3 + a y^5"),
    "skew-tent": (_make_skew_tent, "nu + s_L y (y <= 0), nu + s_R y (y >= 0)"),
    "skew-tent-quad": (_make_skew_tent_quad, "nu + s_L y + t y^2 (y <= 0), nu + s_R y (y >= 0)"),
}


def catalog_make(name: str, params: Mapping | None = None):
    """Build a catalog family member; parameter values may be ``"p/q"`` strings."""
    try:
        make = CATALOG[name][0]
    except KeyError:
        raise UnknownFamilyError(f"unknown family {name!r}; known: {sorted(CATALOG)}") from None
    return make(dict(params or {}))


# -- JSON map specs ------------------------------------------------------------------

def _parse_end(v) -> float:
    if v is None:
        raise ParameterError("domain ends must be numbers or 'inf'/'-inf'")
    if isinstance(v, str) and v.strip().lower() in ("inf", "+inf", "-inf"):
        return INF if not v.strip().startswith("-") else -INF
    return float(to_fraction(v))


def parse_domain(spec) -> Interval | None:
    if spec is None:
        return None
    if isinstance(spec, Mapping):
        return Interval(_parse_end(spec["lo"]), _parse_end(spec["hi"]),
                        bool(spec.get("lo_closed", True)), bool(spec.get("hi_closed", True)))
    lo, hi = spec
    return Interval(_parse_end(lo), _parse_end(hi))


def map_from_spec(spec) -> SmoothMap1D | PiecewiseMap1D:
    """Build a map from the JSON map-spec format (dict, JSON text or path)."""
    if isinstance(spec, (str, Path)):
        text = str(spec)
        if not text.lstrip().startswith("{"):
            text = Path(text).read_text(encoding="utf-8")
        spec = json.loads(text)
    if not isinstance(spec, Mapping):
        raise ParameterError("map spec must be a JSON object")
    domain = parse_domain(spec.get("domain"))
    if "family" in spec:
        f = catalog_make(spec["family"], spec.get("params", {}))
        return f if domain is None else _restrict(f, domain)
    if "rational" in spec:
        r = spec["rational"]
        return SmoothMap1D.from_coeffs(r["num"], r.get("den", [1]), domain)
    if "piecewise" in spec:
        pw = spec["piecewise"]
        left = map_from_spec(pw["left"])
        right = map_from_spec(pw["right"])
        if not isinstance(left, SmoothMap1D) or not isinstance(right, SmoothMap1D):
            raise ParameterError("piecewise branches must be smooth maps")
        return PiecewiseMap1D.from_exprs(left.expr, right.expr, domain, pw.get("kink", 0))
    raise ParameterError("map spec needs one of 'family', 'rational', 'piecewise'")


def _restrict(f, domain: Interval):
    if isinstance(f, SmoothMap1D):
        return f.with_domain(domain)
    return PiecewiseMap1D(f.left, f.right, domain, f.params, f.name)
