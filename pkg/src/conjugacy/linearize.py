"""Numerical conjugating functions.

A :class:`LinearizationChart` is a Koenigs coordinate ``phi`` with
``phi(f(x)) = lam * phi(x)``, normalized so ``phi(x*) = 0`` and
``phi'(x*) = 1``. Near ``x*`` it is a truncated Koenigs series; elsewhere
it is pulled back along the orbit (forward orbit for attracting points,
inverse branch for repelling ones). Two charts with equal multipliers give
a conjugacy ``h = phi_g^-1(c * phi_f)``, stored as a :class:`ConjugacyTable`.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np
from scipy.interpolate import PchipInterpolator

from .algebra import RationalFn, real_roots
from .maps import INF, Interval, MapError, PiecewiseMap1D, SmoothMap1D, _ratio_fn
from .orbits import find_fixed_points

SERIES_ORDER = 16
ENTRY_CAP = 100_000
BOUNDARY_EXCLUSION = 1e-12


class LinearizationError(RuntimeError):
    pass


class NonHyperbolicError(LinearizationError, ValueError):
    pass


class SuperattractingError(LinearizationError, ValueError):
    pass


class BasinError(LinearizationError, ValueError):
    pass


class MultiplierMismatchError(LinearizationError, ValueError):
    pass


class GridTooCoarseError(LinearizationError, ValueError):
    pass


# -- small numerical helpers -------------------------------------------------------------

def _solve_monotone(fdf: Callable, target: float, a: float, b: float, x0: float | None = None,
                    maxit: int = 200) -> float:
    """Solve F(x) = target for monotone F on [a, b]; ``fdf`` returns (F, F')."""
    fa = fdf(a)[0] - target
    if fa == 0:
        return a
    fb = fdf(b)[0] - target
    if fb == 0:
        return b
    if fa * fb > 0:
        raise LinearizationError(f"target {target!r} not bracketed by [{a!r}, {b!r}]")
    neg, pos = (a, b) if fa < 0 else (b, a)
    x = x0 if x0 is not None and min(a, b) < x0 < max(a, b) else 0.5 * (a + b)
    for _ in range(maxit):
        fx, dx = fdf(x)
        fx -= target
        if fx == 0:
            return x
        if fx < 0:
            neg = x
        else:
            pos = x
        lo, hi = min(neg, pos), max(neg, pos)
        nx = x - fx / dx if dx else math.nan
        if not lo < nx < hi:
            nx = 0.5 * (lo + hi)
        if abs(nx - x) <= 2e-16 * max(abs(nx), 1e-300) or hi - lo <= 2e-16 * max(abs(lo), abs(hi), 1e-300):
            return nx
        x = nx
    return x


def _taylor(rf: RationalFn, n: int) -> list:
    """First ``n + 1`` Taylor coefficients at 0 of an exact rational function."""
    num = [rf.num[k] for k in range(n + 1)]
    den = [rf.den[k] for k in range(n + 1)]
    if den[0] == 0:
        raise MapError("pole at the expansion point")
    out = []
    for k in range(n + 1):
        s = num[k] - sum(den[j] * out[k - j] for j in range(1, k + 1))
        out.append(s / den[0])
    return [float(c) for c in out]


def _koenigs_series(g: list, lam: float, n: int) -> list:
    """Coefficients of phi with phi(g(u)) = lam phi(u), phi(u) = u + O(u^2)."""
    base = np.array([0.0] + g[1:n + 1])
    pows = [None, base.copy()]
    for _ in range(2, n + 1):
        pows.append(np.convolve(pows[-1], base)[: n + 1])
    phi = [0.0, 1.0]
    for k in range(2, n + 1):
        s = sum(phi[j] * pows[j][k] for j in range(1, k))
        phi.append(-s / (lam**k - lam))
    return phi


def _series_radius(coeffs: list) -> float:
    r = INF
    for k in range(2, len(coeffs)):
        c = abs(coeffs[k])
        if c > 0:
            r = min(r, c ** (-1.0 / (k - 1)))
    return r


def _horner_d(coeffs: tuple, u: float) -> tuple:
    v, d = 0.0, 0.0
    for c in reversed(coeffs):
        d = d * u + v
        v = v * u + c
    return v, d


# -- charts ---------------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class LinearizationChart:
    """Koenigs coordinate of a hyperbolic fixed point.

    ``domain`` is where the chart may be evaluated: a local neighbourhood
    for charts made by :func:`koenigs`, the whole (open) basin after
    :func:`extend_basin`.
    """

    x_star: float
    lam: float
    core_radius: float
    direction: str
    domain: Interval
    map: SmoothMap1D = field(repr=False)
    tol: float = field(default=1e-14, repr=False)
    extended: bool = False
    _series: tuple = field(default=(), repr=False)
    _offset: float = field(default=0.0, repr=False)
    _g: Callable = field(default=None, repr=False)
    _dg: Callable = field(default=None, repr=False)

    # phi(x) together with phi'(x) and the number of pull-back steps used
    def evaluate(self, x: float) -> tuple:
        if not self.domain.lo <= x <= self.domain.hi:
            raise BasinError(f"x = {x!r} outside chart domain {self.domain}")
        if self.extended:
            scale = max(1.0, abs(x))
            if (math.isfinite(self.domain.lo) and x - self.domain.lo <= BOUNDARY_EXCLUSION * scale) or (
                math.isfinite(self.domain.hi) and self.domain.hi - x <= BOUNDARY_EXCLUSION * scale
            ):
                raise BasinError(f"x = {x!r} is within {BOUNDARY_EXCLUSION} of the basin boundary")
        if self.direction == "attracting":
            return self._eval_forward(x - self.x_star)
        return self._eval_backward(x - self.x_star)

    def _core(self, u: float) -> tuple:
        return _horner_d(self._series, u - self._offset)

    def _eval_forward(self, u: float) -> tuple:
        g, dg, lam, r = self._g, self._dg, self.lam, self.core_radius
        n, deriv = 0, 1.0
        while abs(u - self._offset) > r:
            deriv *= dg(u)
            u = g(u)
            n += 1
            if n > ENTRY_CAP:
                raise BasinError("entry-time cap exceeded; point is not in the basin")
        scale = lam**n
        v, d = self._core(u)
        est, est_d = v / scale, d * deriv / scale
        for _ in range(ENTRY_CAP):
            deriv *= dg(u)
            u = g(u)
            n += 1
            scale *= lam
            v, d = self._core(u)
            new, new_d = v / scale, d * deriv / scale
            if abs(new - est) <= self.tol * (1.0 + abs(new)):
                return new, new_d, n
            est, est_d = new, new_d
        raise LinearizationError("Koenigs estimates did not converge")

    def _inverse_step(self, w: float) -> float:
        lo, hi = self.domain.lo - self.x_star, self.domain.hi - self.x_star
        g, dg = self._g, self._dg
        guess = w / self.lam
        return _solve_monotone(lambda v: (g(v), dg(v)), w, lo, hi, guess)

    def _eval_backward(self, u: float) -> tuple:
        lam, r = self.lam, self.core_radius
        n, deriv = 0, 1.0
        while abs(u - self._offset) > r:
            u = self._inverse_step(u)
            deriv /= self._dg(u)
            n += 1
            if n > ENTRY_CAP:
                raise BasinError("entry-time cap exceeded; point is not in the basin")
        scale = lam**n
        v, d = self._core(u)
        est = v * scale
        for _ in range(ENTRY_CAP):
            u = self._inverse_step(u)
            deriv /= self._dg(u)
            n += 1
            scale *= lam
            v, d = self._core(u)
            new, new_d = v * scale, d * deriv * scale
            if abs(new - est) <= self.tol * (1.0 + abs(new)):
                return new, new_d, n
            est = new
        raise LinearizationError("Koenigs estimates did not converge")

    def __call__(self, x: float) -> float:
        return self.evaluate(x)[0]

    phi = __call__

    def phi_deriv(self, x: float) -> float:
        return self.evaluate(x)[1]

    def inverse(self, z: float, guess: float | None = None, bracket: tuple | None = None) -> float:
        """Solve ``phi(y) = z`` on the chart domain by safeguarded Newton."""
        if z == 0.0:
            return self.x_star
        if bracket is None:
            bracket = self._bracket(z)
        return _solve_monotone(lambda y: self.evaluate(y)[:2], z, bracket[0], bracket[1], guess)

    def _usable(self) -> tuple:
        lo, hi = self.domain.lo, self.domain.hi
        pad = 2 * BOUNDARY_EXCLUSION
        if math.isfinite(lo):
            lo = lo + pad * max(1.0, abs(lo))
        if math.isfinite(hi):
            hi = hi - pad * max(1.0, abs(hi))
        return lo, hi

    def _bracket(self, z: float) -> tuple:
        lo, hi = self._usable()
        xs = self.x_star
        toward = hi if z > 0 else lo
        # a start just past x* keeps tiny targets bracketed despite phi(x*) ~ 1e-18
        back = xs - math.copysign(1e-6 * self.core_radius, z)
        if not math.isfinite(toward):
            step = max(1.0, abs(xs))
            for _ in range(200):
                cand = xs + math.copysign(step, z)
                if abs(self(cand)) >= abs(z):
                    return (back, cand) if z > 0 else (cand, back)
                step *= 2
            raise LinearizationError(f"no bracket for phi^-1({z!r})")
        prev = back
        for k in range(1, 60):
            cand = toward + (xs - toward) * 0.5**k
            if abs(self(cand)) >= abs(z):
                return (prev, cand) if z > 0 else (cand, prev)
            prev = cand
        if abs(self(toward)) >= abs(z):
            return (prev, toward) if z > 0 else (toward, prev)
        raise BasinError(f"phi^-1({z!r}) lies outside the chart domain {self.domain}")

    def sample_points(self, n: int = 200, collar: float = 1e-3) -> np.ndarray:
        """``n`` points of the domain whose image under the map stays in the domain."""
        lo, hi = self.domain.lo, self.domain.hi
        if not math.isfinite(lo):
            lo = self.x_star - 10 * max(1.0, abs(self.x_star))
        if not math.isfinite(hi):
            hi = self.x_star + 10 * max(1.0, abs(self.x_star))
        w = (hi - lo) * collar
        out = []
        for x in np.linspace(lo + w, hi - w, 4 * n):
            y = self._g(x - self.x_star) + self.x_star
            if lo + w <= y <= hi - w:
                out.append(float(x))
        idx = np.linspace(0, len(out) - 1, min(n, len(out))).round().astype(int)
        return np.array(out)[idx]

    def schroder_residuals(self, xs) -> np.ndarray:
        """``|phi(f(x)) - lam phi(x)| / (1 + |phi(x)|)`` at each point."""
        out = []
        for x in xs:
            p = self(x)
            fx = self._g(x - self.x_star) + self.x_star
            out.append(abs(self(fx) - self.lam * p) / (1.0 + abs(p)))
        return np.array(out)


def _local_radius(g, dg, lam: float, cap_lo: float, cap_hi: float, steps: int = 400) -> float:
    """Largest symmetric radius on which g is monotone and uniformly (anti)contracting."""
    c = 0.5 * (1.0 + abs(lam))
    attracting = abs(lam) < 1
    cap = min(cap_lo, cap_hi)
    good = cap
    for k in range(1, steps + 1):
        rho = cap * k / steps
        ok = True
        for u in (rho, -rho):
            gu, du = g(u), dg(u)
            if not (math.isfinite(gu) and math.isfinite(du)) or du * lam <= 0:
                ok = False
            elif attracting and abs(gu) > c * abs(u):
                ok = False
            elif not attracting and abs(gu) < c * abs(u):
                ok = False
        if not ok:
            good = cap * (k - 1) / steps
            break
    if good <= 0:
        raise LinearizationError("could not find a neighbourhood on which the map is locally monotone")
    return good


def koenigs(f: SmoothMap1D, x_star: float, tol: float = 1e-14, max_radius: float = 1.0) -> LinearizationChart:
    """Local Koenigs chart at a hyperbolic fixed point of ``f``."""
    if not isinstance(f, SmoothMap1D):
        raise TypeError("koenigs needs a SmoothMap1D (use a branch of a piecewise map)")
    if abs(f.eval(x_star) - x_star) > 1e-12 * max(1.0, abs(x_star)):
        raise LinearizationError(f"x = {x_star!r} is not a fixed point (f(x) = {f.eval(x_star)!r})")
    lam = f.deriv(x_star, 1)
    if abs(lam) < 1e-9:
        raise SuperattractingError(f"superattracting fixed point (multiplier {lam!r})")
    if abs(abs(lam) - 1.0) < 1e-9:
        raise NonHyperbolicError(f"nonhyperbolic fixed point (multiplier {lam!r})")
    local = f.shifted(x_star)
    g = _ratio_fn(local)
    dg = _ratio_fn(local.derivative())

    cap_lo = min(max_radius, x_star - f.domain.lo)
    cap_hi = min(max_radius, f.domain.hi - x_star)
    for p in f.poles:
        if p < x_star:
            cap_lo = min(cap_lo, 0.5 * (x_star - p))
        elif p > x_star:
            cap_hi = min(cap_hi, 0.5 * (p - x_star))
    for crit in real_roots(local.derivative().num):
        if crit < 0:
            cap_lo = min(cap_lo, -crit)
        elif crit > 0:
            cap_hi = min(cap_hi, crit)
    rho = _local_radius(g, dg, lam, cap_lo, cap_hi)

    taylor = _taylor(local, SERIES_ORDER)
    series = _koenigs_series(taylor, lam, SERIES_ORDER)
    radius = float(min(rho, 0.1 * _series_radius(series), 0.1 * _series_radius(taylor)))

    offset = 0.0
    for _ in range(5):
        d = dg(offset) - 1.0
        step = (g(offset) - offset) / d
        offset -= step
        if abs(step) < 1e-300:
            break

    coeffs = tuple(series)
    for _ in range(40):
        probe = radius if abs(lam) < 1 else radius / abs(lam)
        bad = False
        for u in (probe, -probe):
            lhs = _horner_d(coeffs, g(u) - offset)[0]
            rhs = lam * _horner_d(coeffs, u - offset)[0]
            if abs(lhs - rhs) > 1e-14 * abs(rhs):
                bad = True
        if not bad:
            break
        radius *= 0.5

    domain = Interval(x_star - rho, x_star + rho).intersect(f.domain)
    return LinearizationChart(
        x_star=x_star, lam=lam, core_radius=radius,
        direction="attracting" if abs(lam) < 1 else "repelling",
        domain=domain, map=f, tol=tol, extended=False,
        _series=coeffs, _offset=offset, _g=g, _dg=dg,
    )


def _interior_fixed_points(F: SmoothMap1D, basin: Interval, x_star: float, grid_n: int = 512) -> list:
    lo, hi = basin.lo, basin.hi
    pad = 1e-9 * max(1.0, abs(lo) if math.isfinite(lo) else 1.0)
    lo = lo + pad if math.isfinite(lo) else x_star - 10 * max(1.0, abs(x_star))
    hi = hi - pad if math.isfinite(hi) else x_star + 10 * max(1.0, abs(x_star))
    fps = find_fixed_points(F, Interval(lo, hi), grid_n)
    return [p.x_star for p in fps if abs(p.x_star - x_star) > 1e-9 * max(1.0, abs(x_star))]


def extend_basin(chart: LinearizationChart, basin: Interval, f: SmoothMap1D | None = None) -> LinearizationChart:
    """Extend a local chart to an open basin of attraction or repulsion."""
    f = f or chart.map
    if not basin.interior_contains(chart.x_star):
        raise BasinError(f"fixed point {chart.x_star} is not inside the basin {basin}")
    F = f if chart.lam > 0 else f.iterate(2).with_domain(f.domain)
    extra = _interior_fixed_points(F, basin, chart.x_star)
    if extra:
        raise BasinError(f"basin {basin} contains other fixed points {extra}")
    probe_lo = basin.lo if math.isfinite(basin.lo) else chart.x_star - 10 * max(1.0, abs(chart.x_star))
    probe_hi = basin.hi if math.isfinite(basin.hi) else chart.x_star + 10 * max(1.0, abs(chart.x_star))
    xs = np.linspace(probe_lo, probe_hi, 1001)[1:-1]
    ds = f.deriv_array(xs, 1)
    if not (np.all(ds > 0) or np.all(ds < 0)):
        raise BasinError(f"map is not strictly monotone on the basin {basin}")
    return LinearizationChart(
        x_star=chart.x_star, lam=chart.lam, core_radius=chart.core_radius,
        direction=chart.direction, domain=Interval.open(basin.lo, basin.hi), map=f,
        tol=chart.tol, extended=True, _series=chart._series, _offset=chart._offset,
        _g=chart._g, _dg=chart._dg,
    )


def auto_basin(f: SmoothMap1D, x_star: float, window: float = 10.0) -> Interval:
    """Maximal interval around ``x_star`` free of critical points, poles and other fixed points.

    For a negative multiplier, fixed points of ``f o f`` bound the interval and
    it is then shrunk until it is forward invariant.
    """
    w = window * max(1.0, abs(x_star))
    lo = max(f.domain.lo, x_star - w)
    hi = min(f.domain.hi, x_star + w)

    def cut(points):
        nonlocal lo, hi
        for p in points:
            if abs(p - x_star) <= 1e-9 * max(1.0, abs(x_star)):
                continue
            if lo < p < x_star:
                lo = p
            elif x_star < p < hi:
                hi = p

    cut(f.poles)
    cut(real_roots(f.derivative_expr(1).num))
    lam = f.deriv(x_star, 1)
    F = f.expr if lam > 0 else f.expr.compose(f.expr)
    cut(real_roots((F - RationalFn.x()).num))
    if lam < 0:
        fd = lambda y: (f.eval(y), f.deriv(y, 1))
        for _ in range(100):
            changed = False
            if f.eval(lo) > hi:
                lo = _solve_monotone(fd, hi, lo, x_star)
                changed = True
            if f.eval(hi) < lo:
                hi = _solve_monotone(fd, lo, x_star, hi)
                changed = True
            if not changed:
                break
    return Interval.open(lo, hi)


def linearize_on_basin(f: SmoothMap1D, x_star: float, basin: Interval | None = None,
                       tol: float = 1e-14) -> LinearizationChart:
    chart = koenigs(f, x_star, tol)
    return extend_basin(chart, basin or auto_basin(f, x_star), f)


# -- conjugacy tables -------------------------------------------------------------------------

@dataclass(frozen=True)
class SmoothnessReport:
    left_deriv: float
    right_deriv: float
    match_error: float
    second_deriv_jump: float
    location: float
    residual_sup: float = math.nan

    def to_dict(self) -> dict:
        return {
            "location": self.location,
            "left_deriv": self.left_deriv,
            "right_deriv": self.right_deriv,
            "match_error": self.match_error,
            "second_deriv_jump": self.second_deriv_jump,
            "residual_sup": self.residual_sup,
        }


@dataclass(frozen=True, eq=False)
class ConjugacyTable:
    """Samples of a monotone conjugating function ``h`` with ``h o f = g o h``.

    ``h`` holds the exact evaluator when the table was built in this
    session; tables read back from disk fall back to monotone cubic
    interpolation of the samples.
    """

    xs: np.ndarray
    hs: np.ndarray
    junctions: tuple
    residual_sup: float
    pairing: dict
    h: Callable | None = field(default=None, repr=False)
    smoothness: tuple = ()

    def evaluator(self) -> Callable[[float], float]:
        if self.h is not None:
            return self.h
        interp = PchipInterpolator(self.xs, self.hs, extrapolate=False)
        return lambda x: float(interp(x))

    def is_monotone(self) -> bool:
        d = np.diff(self.hs)
        return bool(np.all(d > 0) or np.all(d < 0))

    def with_smoothness(self, *reports: SmoothnessReport) -> "ConjugacyTable":
        return ConjugacyTable(self.xs, self.hs, self.junctions, self.residual_sup, self.pairing,
                              self.h, tuple(self.smoothness) + reports)

    def csv_rows(self) -> list:
        jset = set(self.junctions)
        rows = [["x", "h", "junction"]]
        for i, (x, y) in enumerate(zip(self.xs, self.hs)):
            rows.append([float(x), float(y), int(i in jset)])
        return rows

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        for row in self.csv_rows():
            w.writerow([repr(v) if isinstance(v, float) else v for v in row])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "pairing": self.pairing,
            "residual_sup": float(self.residual_sup),
            "junctions": [int(j) for j in self.junctions],
            "smoothness": [s.to_dict() for s in self.smoothness],
            "xs": [float(x) for x in self.xs],
            "hs": [float(y) for y in self.hs],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_csv(cls, text: str, pairing: dict | None = None) -> "ConjugacyTable":
        rows = list(csv.reader(io.StringIO(text)))
        body = rows[1:]
        xs = np.array([float(r[0]) for r in body])
        hs = np.array([float(r[1]) for r in body])
        junctions = tuple(i for i, r in enumerate(body) if r[2] == "1")
        return cls(xs, hs, junctions, math.nan, pairing or {})


def table_residual(xs, h: Callable, f, g, domain: tuple | None = None) -> float:
    """``max |h(f(x_i)) - g(h(x_i))|`` over interior grid points with f(x_i) in range."""
    lo, hi = domain if domain is not None else (xs[0], xs[-1])
    worst = 0.0
    for x in xs[1:-1]:
        fx = f.eval(float(x))
        if not lo <= fx <= hi:
            continue
        worst = max(worst, abs(h(fx) - g.eval(h(float(x)))))
    return worst


def _grid(lo: float, hi: float, n: int, extra=(), refine=(), refine_step: float | None = None,
          refine_points: int = 12) -> np.ndarray:
    pts = list(np.linspace(lo, hi, n))
    pts.extend(p for p in extra if lo <= p <= hi)
    step = refine_step if refine_step is not None else (hi - lo) * 1e-4
    for a in refine:
        pts.append(a)
        for k in range(1, refine_points + 1):
            pts.extend((a - k * step, a + k * step))
    arr = np.unique(np.array([p for p in pts if lo <= p <= hi], dtype=float))
    return arr


def build_conjugacy(f: SmoothMap1D, g: SmoothMap1D, pairing: dict, grid_n: int = 401, *,
                    basin_f: Interval | None = None, basin_g: Interval | None = None,
                    span: tuple | None = None, collar: float = 1e-3, refine=(),
                    refine_step: float | None = None, tol: float = 1e-14) -> ConjugacyTable:
    """Conjugacy from ``f`` to ``g`` on the basin of a paired fixed point.

    ``pairing`` holds ``"fixed": (x_star, y_star)`` and optionally
    ``"marked": (x0, y0)``. Without a marked pair ``h = phi_g^-1 o phi_f``;
    with one, ``phi_f`` is rescaled by ``c = phi_g(y0) / phi_f(x0)`` so that
    ``h(x0) = y0``.
    """
    x_star, y_star = (float(v) for v in pairing["fixed"])
    lf, lg = f.deriv(x_star, 1), g.deriv(y_star, 1)
    if abs(lf - lg) > 1e-8:
        raise MultiplierMismatchError(
            f"multipliers differ: f'({x_star}) = {lf!r}, g'({y_star}) = {lg!r}; no differentiable conjugacy"
        )
    chart_f = linearize_on_basin(f, x_star, basin_f, tol)
    chart_g = linearize_on_basin(g, y_star, basin_g, tol)
    c = 1.0
    marked = pairing.get("marked")
    extra = [x_star]
    if marked is not None:
        x0, y0 = (float(v) for v in marked)
        for chart, p, name in ((chart_f, x0, "x0"), (chart_g, y0, "y0")):
            if not chart.domain.interior_contains(p):
                raise BasinError(f"marked point {name} = {p!r} outside basin {chart.domain}")
        pf = chart_f(x0)
        if pf == 0:
            raise BasinError("marked point coincides with the fixed point")
        c = chart_g(y0) / pf
        extra.append(x0)

    if span is None:
        lo, hi = chart_f.domain.lo, chart_f.domain.hi
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise BasinError("unbounded basin: pass an explicit span")
        span = (lo + collar, hi - collar)
    lo, hi = float(span[0]), float(span[1])
    xs = _grid(lo, hi, grid_n, extra, refine, refine_step)

    def h(x: float, guess: float | None = None) -> float:
        return chart_g.inverse(c * chart_f(x), guess)

    hs = np.empty(len(xs))
    steps = []
    for i, x in enumerate(xs):
        val, _, n = chart_f.evaluate(float(x))
        steps.append(n)
        hs[i] = chart_g.inverse(c * val)
    junctions = tuple(i for i in range(1, len(xs)) if steps[i] != steps[i - 1])
    hfun = lambda x: h(float(x))
    residual = float(table_residual(xs, hfun, f, g, (lo, hi)))
    pairing_out = {"fixed": [x_star, y_star], "scale": c}
    if marked is not None:
        pairing_out["marked"] = [float(v) for v in marked]
    return ConjugacyTable(xs, hs, junctions, residual, pairing_out, hfun)


def slope_ratio(f) -> float:
    """Ratio of left to right one-sided slopes at the kink."""
    if isinstance(f, SmoothMap1D):
        f = PiecewiseMap1D(f, f)
    dl = f.deriv(0.0, 1, side="left")
    dr = f.deriv(0.0, 1, side="right")
    if dl == 0 or dr == 0:
        raise ValueError("a one-sided derivative at the kink vanishes")
    return dl / dr


def _nearest_fixed_point(branch: SmoothMap1D, side: str, radius: float = 10.0) -> float:
    roots = real_roots((branch.expr - RationalFn.x()).num)
    cand = [r for r in roots if (r < 0 if side == "left" else r > 0) and abs(r) <= radius]
    if not cand:
        raise BasinError(f"no fixed point of the {side} branch")
    return max(cand) if side == "left" else min(cand)


def extend_across_kink(h_right: ConjugacyTable, f: PiecewiseMap1D, g: PiecewiseMap1D,
                       grid_n: int = 201, *, left_span: tuple | None = None, collar: float = 1e-3,
                       refine_step: float | None = None) -> ConjugacyTable:
    """Extend a conjugacy with ``h(0) = 0`` to ``x < 0`` by ``h = g_L^-1 o h o f_L``."""
    xs_r, hs_r = h_right.xs, h_right.hs
    if xs_r[0] != 0.0 or abs(hs_r[0]) > 1e-9:
        raise BasinError("right table must start at x = 0 with h(0) = 0")
    hr = h_right.evaluator()
    right_hi = float(xs_r[-1])
    x_left = _nearest_fixed_point(f.left, "left")
    y_left = _nearest_fixed_point(g.left, "left")
    fl, gl, dgl = f.left._fns[0], g.left._fns[0], g.left._fn(1)
    g0 = gl(0.0)

    def ginv(w: float) -> float:
        if not y_left <= w <= g0:
            raise BasinError(f"g_L cannot be inverted at {w!r} on [{y_left}, 0]")
        return _solve_monotone(lambda y: (gl(y), dgl(y)), w, y_left, 0.0)

    def h(x: float) -> float:
        x = float(x)
        if x >= 0:
            return hr(x)
        z, k = x, 0
        while z < 0:
            z = fl(z)
            k += 1
            if k > ENTRY_CAP:
                raise BasinError(f"x = {x!r} never reaches the kink")
        if z > right_hi:
            raise BasinError(f"f_L image {z!r} beyond the right table")
        y = hr(z)
        for _ in range(k):
            y = ginv(y)
        return y

    if left_span is None:
        # relative collar: x_left shrinks with mu
        left_span = (x_left * (1.0 - collar), 0.0)
    lo = float(left_span[0])
    if lo <= x_left:
        raise BasinError(f"left span starts beyond the repelling fixed point {x_left}")
    xs_l = _grid(lo, 0.0, grid_n, refine=(0.0,), refine_step=refine_step)
    xs_l = xs_l[xs_l < 0]
    hs_l = np.array([h(x) for x in xs_l])
    xs = np.concatenate([xs_l, xs_r])
    hs = np.concatenate([hs_l, hs_r])
    j0 = len(xs_l)
    junctions = tuple(sorted({j0} | {j + j0 for j in h_right.junctions}))
    residual = float(table_residual(xs, h, f, g, (lo, right_hi)))
    pairing = dict(h_right.pairing)
    pairing["kink"] = [0.0, 0.0]
    return ConjugacyTable(xs, hs, junctions, residual, pairing, h)


def build_kink_conjugacy(f: PiecewiseMap1D, g: PiecewiseMap1D, grid_n: int = 201, *,
                         right_span: float | None = None, collar: float = 1e-3,
                         refine_step: float | None = None) -> ConjugacyTable:
    """Conjugacy across the kink between two maps with attracting right fixed points.

    The right-branch tables use the marked pair ``h(0) = 0`` so the forward
    orbits of the two kinks correspond.
    """
    xr = _nearest_fixed_point(f.right, "right")
    yr = _nearest_fixed_point(g.right, "right")
    fr = SmoothMap1D(f.right.expr, name="f_R")
    gr = SmoothMap1D(g.right.expr, name="g_R")
    hi = right_span if right_span is not None else 2.0 * xr
    basin_f = _branch_basin(fr, xr)
    basin_g = _branch_basin(gr, yr)
    step = refine_step if refine_step is not None else hi * 1e-4
    right = build_conjugacy(fr, gr, {"fixed": (xr, yr), "marked": (0.0, 0.0)}, grid_n,
                            basin_f=basin_f, basin_g=basin_g, span=(0.0, hi), refine=(0.0,),
                            refine_step=step)
    return extend_across_kink(right, f, g, grid_n, collar=collar, refine_step=step)


def _branch_basin(branch: SmoothMap1D, x_star: float) -> Interval:
    # right branches extend smoothly past the kink; the basin may include it
    return auto_basin(branch, x_star)


def _one_sided(xs: np.ndarray, hs: np.ndarray, loc: float) -> tuple:
    t = xs - loc
    s = np.max(np.abs(t))
    coef = np.polyfit(t / s, hs, 3)
    return coef[-2] / s, 2.0 * coef[-3] / s**2


def smoothness_report(table: ConjugacyTable, f=None, g=None, location: float = 0.0,
                      min_side: int = 8) -> SmoothnessReport:
    """Compare one-sided derivatives of ``h`` at ``location`` (4-point stencils)."""
    xs, hs = table.xs, table.hs
    left = np.nonzero(xs <= location)[0]
    right = np.nonzero(xs >= location)[0]
    if len(left) < min_side or len(right) < min_side:
        raise GridTooCoarseError(f"need {min_side} grid points on each side of {location}")
    li, ri = left[-4:], right[:4]
    dl, d2l = _one_sided(xs[li], hs[li], location)
    dr, d2r = _one_sided(xs[ri], hs[ri], location)
    match = abs(dl - dr) / max(1.0, abs(dr))
    resid = math.nan
    if f is not None and g is not None:
        resid = float(table_residual(xs, table.evaluator(), f, g))
    return SmoothnessReport(float(dl), float(dr), float(match), float(d2r - d2l), float(location), resid)
