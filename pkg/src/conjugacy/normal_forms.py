"""Fitting extended normal forms by matching fixed-point multipliers.

Three unfoldings are supported:

* saddle-node, ``g(y) = y + nu - y^2 + a y^3``;
* pitchfork, ``g(y) = y + nu y + b nu y^2 - y^3 + a y^5``;
* border collision, ``g(y) = nu + s_L y + t y^2`` for ``y <= 0`` and
  ``nu + s_R y`` for ``y >= 0``.

A one-parameter family is a :class:`MapFamily`, a callable ``mu -> map``.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable, NamedTuple

import numpy as np

from .algebra import Poly, RationalFn, real_roots, to_fraction
from .maps import PiecewiseMap1D, SmoothMap1D, catalog_make

MU_STEP = 1e-6
FIT_TOL = 1e-10
MAX_NEWTON = 100


class FitError(RuntimeError):
    pass


class AssumptionError(ValueError):
    """A nondegeneracy assumption of the unfolding fails; ``assumption`` names it."""

    def __init__(self, assumption: str, detail: str = ""):
        self.assumption = assumption
        super().__init__(f"assumption failed: {assumption}" + (f" ({detail})" if detail else ""))


class MissingFixedPointError(FitError, ValueError):
    pass


class NewtonDivergenceError(FitError):
    pass


# -- families ---------------------------------------------------------------------------------

def _poly_in_x(rows, mu: Fraction) -> Poly:
    # rows[i] lists the mu-polynomial coefficients of x^i
    return Poly([sum(to_fraction(c) * mu**j for j, c in enumerate(row)) for row in rows])


class MapFamily:
    """A one-parameter family of maps, ``family(mu)``."""

    def __init__(self, make: Callable, kind: str = "smooth", description: dict | None = None):
        self._make = make
        self.kind = kind
        self.description = description or {}

    def __call__(self, mu) -> SmoothMap1D | PiecewiseMap1D:
        return self._make(mu)

    def __repr__(self) -> str:
        return f"MapFamily({self.description})"

    @classmethod
    def from_catalog(cls, name: str, params: dict | None = None, vary: str = "nu") -> "MapFamily":
        params = dict(params or {})
        probe = catalog_make(name, {**params, vary: 0})
        kind = "piecewise" if isinstance(probe, PiecewiseMap1D) else "smooth"
        return cls(lambda mu: catalog_make(name, {**params, vary: to_fraction(mu)}), kind,
                   {"family": name, "params": {k: str(v) for k, v in params.items()}, "vary": vary})

    @classmethod
    def from_poly(cls, rows) -> "MapFamily":
        """``rows[i][j]`` is the coefficient of ``x^i mu^j``."""
        rows = [list(r) for r in rows]
        make = lambda mu: SmoothMap1D(RationalFn(_poly_in_x(rows, to_fraction(mu))), name="poly-family")
        return cls(make, "smooth", {"poly": [[str(c) for c in r] for r in rows]})

    @classmethod
    def piecewise(cls, left_rows, right_rows) -> "MapFamily":
        left_rows = [list(r) for r in left_rows]
        right_rows = [list(r) for r in right_rows]

        def make(mu):
            m = to_fraction(mu)
            return PiecewiseMap1D.from_exprs(RationalFn(_poly_in_x(left_rows, m)),
                                             RationalFn(_poly_in_x(right_rows, m)),
                                             name="piecewise-family")

        return cls(make, "piecewise", {"piecewise": {"left": [[str(c) for c in r] for r in left_rows],
                                                     "right": [[str(c) for c in r] for r in right_rows]}})


def _rows(rows, what: str) -> list:
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise ValueError(f"{what} must be a list of coefficient rows (rows[i][j] multiplies x^i mu^j)")
    for r in rows:
        for c in r:
            to_fraction(c)
    return rows


def family_from_spec(spec) -> MapFamily:
    """Build a family from a dict, JSON text or path.

    Accepted forms: ``{"family": name, "params": {...}, "vary": "nu"}``,
    ``{"poly": rows}`` and ``{"piecewise": {"left": rows, "right": rows}}``.
    """
    if isinstance(spec, (str, Path)):
        text = str(spec)
        if not text.lstrip().startswith("{"):
            text = Path(text).read_text()
        spec = json.loads(text)
    if not isinstance(spec, dict):
        raise ValueError("family spec must be a JSON object")
    if "family" in spec:
        return MapFamily.from_catalog(spec["family"], spec.get("params", {}), spec.get("vary", "nu"))
    if "poly" in spec:
        return MapFamily.from_poly(_rows(spec["poly"], "poly"))
    if "piecewise" in spec:
        pw = spec["piecewise"]
        return MapFamily.piecewise(_rows(pw["left"], "piecewise.left"), _rows(pw["right"], "piecewise.right"))
    raise ValueError("family spec needs one of 'family', 'poly' or 'piecewise'")


def _d_mu(fam: MapFamily, x: float, h: float = MU_STEP, side: str | None = None) -> float:
    if side is None:
        return (fam(h).eval(x) - fam(-h).eval(x)) / (2 * h)
    return (fam(h).deriv(x, 0, side=side) - fam(-h).deriv(x, 0, side=side)) / (2 * h)


def _dx_mu(fam: MapFamily, x: float, h: float = MU_STEP) -> float:
    return (fam(h).deriv(x, 1) - fam(-h).deriv(x, 1)) / (2 * h)


def _nearest_roots(expr: RationalFn, radius: float) -> list:
    return [r for r in real_roots((expr - RationalFn.x()).num) if abs(r) <= radius]


def _polish_fixed(f: SmoothMap1D, x: float) -> float:
    for _ in range(8):
        d = f.deriv(x, 1) - 1.0
        if d == 0:
            break
        step = (f.eval(x) - x) / d
        x -= step
        if abs(step) <= 1e-17 * max(1.0, abs(x)):
            break
    return x


# -- saddle-node ------------------------------------------------------------------------------

class Normalization(NamedTuple):
    flip_x: bool
    flip_mu: bool

    def describe(self) -> str:
        parts = [s for s, on in (("x -> -x", self.flip_x), ("mu -> -mu", self.flip_mu)) if on]
        return ", ".join(parts) if parts else "none"


def _normalized(fam: MapFamily, norm: Normalization) -> MapFamily:
    sign = -1 if norm.flip_mu else 1

    def make(mu):
        f = fam(sign * to_fraction(mu))
        return f.reflect() if norm.flip_x else f

    return MapFamily(make, fam.kind, {**fam.description, "normalization": norm.describe()})


@dataclass(frozen=True)
class SNDerivatives:
    f: float
    f_x: float
    f_mu: float
    f_xx: float
    f_xxx: float


def sn_derivatives(fam: MapFamily) -> SNDerivatives:
    f0 = fam(0)
    return SNDerivatives(f0.eval(0.0), f0.deriv(0.0, 1), _d_mu(fam, 0.0), f0.deriv(0.0, 2), f0.deriv(0.0, 3))


def sn_normalize(fam: MapFamily) -> tuple:
    """Check the saddle-node assumptions, flipping x and/or mu signs if needed."""
    d = sn_derivatives(fam)
    if abs(d.f) > 1e-10:
        raise AssumptionError("f(0,0) = 0", f"f(0,0) = {d.f!r}")
    if abs(d.f_x - 1.0) > 1e-8:
        raise AssumptionError("df/dx(0,0) = 1", f"df/dx(0,0) = {d.f_x!r}")
    if abs(d.f_xx) < 1e-10:
        raise AssumptionError("d2f/dx2(0,0) < 0", "second derivative vanishes")
    if abs(d.f_mu) < 1e-10:
        raise AssumptionError("df/dmu(0,0) > 0", "parameter derivative vanishes")
    flip_x = d.f_xx > 0
    f_mu = -d.f_mu if flip_x else d.f_mu
    norm = Normalization(flip_x, f_mu < 0)
    if norm == (False, False):
        return fam, norm, d
    nfam = _normalized(fam, norm)
    return nfam, norm, sn_derivatives(nfam)


def sn_g0(fam: MapFamily) -> float:
    """Limit value ``2 f_xxx / (3 f_xx^2)`` of the cubic coefficient."""
    _, _, d = sn_normalize(fam)
    return 2.0 * d.f_xxx / (3.0 * d.f_xx**2)


class SNMultipliers(NamedTuple):
    lam_plus: float
    lam_minus: float
    x_plus: float
    x_minus: float
    series_plus: float
    series_minus: float
    normalization: str


def sn_multipliers(fam: MapFamily, mu: float) -> SNMultipliers:
    """Exact numeric multipliers of the two fixed points born at the fold.

    ``lam_plus`` (> 1) belongs to the left, repelling point ``x_plus``;
    ``lam_minus`` (< 1) to the right, attracting point ``x_minus``. The
    ``series_*`` fields carry the leading-order predictions.
    """
    nfam, norm, d = sn_normalize(fam)
    if mu <= 0:
        raise MissingFixedPointError(f"mu = {mu!r}: no pair of fixed points for mu <= 0")
    f = nfam(mu)
    spread = math.sqrt(-2.0 * d.f_mu * mu / d.f_xx)
    radius = min(0.5, 6.0 * spread + 1e-12)
    roots = sorted(_nearest_roots(f.expr, radius), key=abs)
    left = [r for r in roots if r < 0]
    right = [r for r in roots if r > 0]
    if not left or not right:
        raise MissingFixedPointError(f"mu = {mu!r}: expected fixed points on both sides of 0, found {roots}")
    xp, xm = _polish_fixed(f, left[0]), _polish_fixed(f, right[0])
    lp, lm = f.deriv(xp, 1), f.deriv(xm, 1)
    root = math.sqrt(-2.0 * d.f_mu * d.f_xx * mu)
    shift = -(2.0 * d.f_mu * d.f_xxx / (3.0 * d.f_xx)) * mu
    return SNMultipliers(lp, lm, xp, xm, 1.0 + root + shift, 1.0 - root + shift, norm.describe())


def sn_form_fixed_points(nu: float, a: float) -> tuple:
    """Fixed points (left, right) of ``y + nu - y^2 + a y^3`` nearest 0."""
    out = []
    for y in (-math.sqrt(nu), math.sqrt(nu)):
        for _ in range(60):
            p = nu - y * y + a * y**3
            dp = -2 * y + 3 * a * y * y
            step = p / dp
            y -= step
            if abs(step) <= 1e-17 * abs(y):
                break
        out.append(y)
    return tuple(out)


def _sn_sigma(nu: float, a: float) -> tuple:
    """Multipliers of the extended form and their (nu, a) Jacobian."""
    vals, jac = [], []
    for y in sn_form_fixed_points(nu, a):
        gy = -2 * y + 3 * a * y * y
        dy_nu, dy_a = -1.0 / gy, -(y**3) / gy
        s_y = -2 + 6 * a * y
        vals.append(1 - 2 * y + 3 * a * y * y)
        jac.append([s_y * dy_nu, 3 * y * y + s_y * dy_a])
    return np.array(vals), np.array(jac)


@dataclass(frozen=True)
class SNFit:
    mu: float
    nu: float
    a: float
    multiplier_residual: float
    lam_plus: float = math.nan
    lam_minus: float = math.nan
    iterations: int = 0
    normalization: str = "none"

    def csv_row(self) -> list:
        return [self.mu, self.nu, self.a, self.nu / self.mu, self.multiplier_residual]

    CSV_HEADER = ("mu", "nu", "a", "nu_over_mu", "multiplier_residual")

    def normal_form(self) -> SmoothMap1D:
        return catalog_make("saddle-node", {"nu": self.nu, "a": self.a})


def _damped_newton(resid: Callable, x0: np.ndarray, admissible: Callable, tol: float, scale) -> tuple:
    x = np.array(x0, dtype=float)
    r, J = resid(x)
    for it in range(1, MAX_NEWTON + 1):
        if np.max(np.abs(r)) < tol * 1e-3:
            return x, r, it
        step = np.linalg.solve(J, -r)
        lam = 1.0
        while lam > 1e-8:
            cand = x + lam * step
            if admissible(cand):
                try:
                    rc, Jc = resid(cand)
                except (ArithmeticError, ValueError):
                    rc = None
                if rc is not None and np.all(np.isfinite(rc)) and np.max(np.abs(rc)) < max(np.max(np.abs(r)), 1e-300) * (1 - 1e-4 * lam) + 1e-18:
                    break
            lam *= 0.5
        else:
            if np.max(np.abs(r)) < tol:
                return x, r, it
            raise NewtonDivergenceError("damped Newton stalled")
        if np.all(np.abs(cand - x) <= 1e-16 * np.maximum(np.abs(x), scale)):
            return cand, rc, it
        x, r, J = cand, rc, Jc
    if np.max(np.abs(r)) < tol:
        return x, r, MAX_NEWTON
    raise NewtonDivergenceError(f"Newton did not converge in {MAX_NEWTON} iterations")


def sn_fit(fam: MapFamily, mu: float, tol: float = FIT_TOL) -> SNFit:
    """Match the two fixed-point multipliers of ``fam(mu)`` with the extended saddle-node form."""
    m = sn_multipliers(fam, mu)
    target = np.array([m.lam_plus, m.lam_minus])
    nu0 = ((m.lam_plus - m.lam_minus) / 4.0) ** 2
    a0 = sn_g0(fam)

    def resid(p):
        vals, jac = _sn_sigma(p[0], p[1])
        return vals - target, jac

    def ok(p):
        nu, a = p
        return nu > 0 and 1 - 3 * a * math.sqrt(nu) > 0.5

    (nu, a), r, it = _damped_newton(resid, [nu0, a0], ok, tol, np.array([nu0, 1.0]))
    res = float(np.max(np.abs(r)))
    if res >= tol:
        raise NewtonDivergenceError(f"multiplier residual {res!r} above {tol!r}")
    return SNFit(float(mu), float(nu), float(a), res, m.lam_plus, m.lam_minus, it, m.normalization)


# -- pitchfork --------------------------------------------------------------------------------

@dataclass(frozen=True)
class PFFit:
    mu: float
    nu: float
    a: float
    b: float
    residual: float
    residuals: tuple = ()
    multipliers: tuple = ()
    normalization: str = "none"

    CSV_HEADER = ("mu", "nu", "a", "b", "residual")

    def csv_row(self) -> list:
        return [self.mu, self.nu, self.a, self.b, self.residual]

    def normal_form(self) -> SmoothMap1D:
        return catalog_make("pitchfork", {"nu": self.nu, "a": self.a, "b": self.b})


def pf_normalize(fam: MapFamily) -> tuple:
    f0 = fam(0)
    if abs(f0.eval(0.0)) > 1e-10:
        raise AssumptionError("f(0,0) = 0", f"f(0,0) = {f0.eval(0.0)!r}")
    if abs(f0.deriv(0.0, 1) - 1.0) > 1e-8:
        raise AssumptionError("df/dx(0,0) = 1")
    f3 = f0.deriv(0.0, 3)
    if f3 >= -1e-10:
        raise AssumptionError("d3f/dx3(0,0) < 0", f"d3f/dx3(0,0) = {f3!r}")
    fxm = _dx_mu(fam, 0.0)
    if abs(fxm) < 1e-10:
        raise AssumptionError("d2f/dxdmu(0,0) != 0")
    norm = Normalization(False, fxm < 0)
    nfam = _normalized(fam, norm) if norm.flip_mu else fam
    return nfam, norm, abs(fxm), f3


def pf_multipliers(fam: MapFamily, mu: float) -> tuple:
    """Fixed points (left, centre, right) near 0 and their multipliers."""
    nfam, norm, fxm, f3 = pf_normalize(fam)
    if mu <= 0:
        raise MissingFixedPointError(f"mu = {mu!r}: three fixed points need mu > 0")
    f = nfam(mu)
    spread = math.sqrt(6.0 * fxm * mu / -f3)
    roots = sorted(_nearest_roots(f.expr, min(0.5, 4.0 * spread + 1e-12)), key=abs)[:3]
    if len(roots) != 3:
        raise MissingFixedPointError(f"mu = {mu!r}: expected three fixed points near 0, found {len(roots)}")
    pts = sorted(_polish_fixed(f, r) for r in roots)
    return tuple(pts), tuple(f.deriv(x, 1) for x in pts), norm


def _pf_sigma(nu: float, a: float, b: float) -> tuple:
    vals, jac = [], []
    outer = []
    for y in (-math.sqrt(nu), math.sqrt(nu)):
        for _ in range(60):
            p = nu + b * nu * y - y * y + a * y**4
            dp = b * nu - 2 * y + 4 * a * y**3
            step = p / dp
            y -= step
            if abs(step) <= 1e-17 * abs(y):
                break
        outer.append(y)
    for y in (outer[0], None, outer[1]):
        if y is None:
            vals.append(1 + nu)
            jac.append([1.0, 0.0, 0.0])
            continue
        py = b * nu - 2 * y + 4 * a * y**3
        dy = (-(1 + b * y) / py, -(y**4) / py, -nu * y / py)
        s_y = 2 * b * nu - 6 * y + 20 * a * y**3
        vals.append(1 + nu + 2 * b * nu * y - 3 * y * y + 5 * a * y**4)
        jac.append([1 + 2 * b * y + s_y * dy[0], 5 * y**4 + s_y * dy[1], 2 * nu * y + s_y * dy[2]])
    return np.array(vals), np.array(jac)


def pf_fit(fam: MapFamily, mu: float, tol: float = FIT_TOL) -> PFFit:
    """Match the three fixed-point multipliers with the extended pitchfork form."""
    _, lams, norm = pf_multipliers(fam, mu)
    target = np.array(lams)

    def resid(p):
        vals, jac = _pf_sigma(*p)
        return vals - target, jac

    ok = lambda p: p[0] > 0
    nu0 = lams[1] - 1.0
    if nu0 <= 0:
        raise MissingFixedPointError("centre fixed point is not repelling")
    p, r, _ = _damped_newton(resid, [nu0, 0.0, 0.0], ok, tol, np.array([nu0, 1.0, 1.0]))
    rs = tuple(float(v) for v in np.abs(r))
    if max(rs) >= tol:
        raise NewtonDivergenceError(f"multiplier residual {max(rs)!r} above {tol!r}")
    return PFFit(float(mu), float(p[0]), float(p[1]), float(p[2]), max(rs), rs, tuple(lams), norm.describe())


# -- border collision -------------------------------------------------------------------------

@dataclass(frozen=True)
class BCDerivatives:
    a_L: float
    a_R: float
    beta: float
    fL_xx: float
    fR_xx: float


def bc_check(fam: MapFamily) -> BCDerivatives:
    f0 = fam(0)
    if not isinstance(f0, PiecewiseMap1D):
        raise AssumptionError("piecewise-smooth family", "family does not produce piecewise maps")
    if f0.left.expr.exact(0) != 0 or f0.right.expr.exact(0) != 0:
        raise AssumptionError("f_L(0,0) = f_R(0,0) = 0")
    a_l = f0.deriv(0.0, 1, side="left")
    a_r = f0.deriv(0.0, 1, side="right")
    beta = _d_mu(fam, 0.0, side="right")
    if not a_l > 1:
        raise AssumptionError("a_L > 1", f"a_L = {a_l!r}")
    if not 0 < a_r < 1:
        raise AssumptionError("0 < a_R < 1", f"a_R = {a_r!r}")
    if not beta > 0:
        raise AssumptionError("beta > 0", f"beta = {beta!r}")
    return BCDerivatives(a_l, a_r, beta, f0.deriv(0.0, 2, side="left"), f0.deriv(0.0, 2, side="right"))


def bc_g0(fam: MapFamily) -> float:
    """Limit value of the quadratic coefficient ``t``."""
    d = bc_check(fam)
    return 0.5 * d.beta * (d.fL_xx - d.a_L * (1 - d.a_L) / (d.a_R * (1 - d.a_R)) * d.fR_xx)


class BCMultipliers(NamedTuple):
    lam_L: float
    lam_R: float
    S: float
    x_L: float
    x_R: float


def bc_multipliers(fam: MapFamily, mu: float, radius: float = 1.0) -> BCMultipliers:
    """Multipliers of the fixed points on each side of the kink and the slope ratio."""
    bc_check(fam)
    f = fam(mu)
    left = sorted((r for r in _nearest_roots(f.left.expr, radius) if r < 0), reverse=True)
    right = sorted(r for r in _nearest_roots(f.right.expr, radius) if r > 0)
    if not left or not right:
        raise MissingFixedPointError(f"mu = {mu!r}: need fixed points on both sides of the kink")
    xl = _polish_fixed(f.left, left[0])
    xr = _polish_fixed(f.right, right[0])
    s = f.deriv(0.0, 1, side="left") / f.deriv(0.0, 1, side="right")
    return BCMultipliers(f.left.deriv(xl, 1), f.right.deriv(xr, 1), s, xl, xr)


def bc_left_fixed_point(nu: float, s_l: float, t: float) -> float:
    disc = (s_l - 1) ** 2 - 4 * t * nu
    if disc < 0:
        raise MissingFixedPointError("left branch of the normal form has no fixed point")
    return -2 * nu / ((s_l - 1) + math.sqrt(disc))


@dataclass(frozen=True)
class BCFit:
    mu: float
    s_L: float
    s_R: float
    t: float
    residuals: tuple
    nu: float = math.nan

    CSV_HEADER = ("mu", "nu", "s_L", "s_R", "t", "residual_L", "residual_R", "residual_S")

    def csv_row(self) -> list:
        return [self.mu, self.nu, self.s_L, self.s_R, self.t, *self.residuals]

    def normal_form(self) -> PiecewiseMap1D:
        return catalog_make("skew-tent-quad", {"nu": self.nu, "s_L": self.s_L, "s_R": self.s_R, "t": self.t})


def bc_fit(fam: MapFamily, mu: float, tol: float = FIT_TOL) -> BCFit:
    """Match both multipliers and the slope ratio with the skew tent plus quadratic."""
    m = bc_multipliers(fam, mu)
    nu, s_r = float(mu), m.lam_R
    s_l = m.S * s_r
    if not s_l > 1:
        raise AssumptionError("s_L > 1", f"s_L = {s_l!r} at mu = {mu!r}")
    if not 0 < s_r < 1:
        raise AssumptionError("0 < s_R < 1", f"s_R = {s_r!r} at mu = {mu!r}")

    def sigma(t):
        y = bc_left_fixed_point(nu, s_l, t)
        sig = s_l + 2 * t * y
        # dy/dt from t y^2 + (s_L - 1) y + nu = 0
        dy = -y * y / (2 * t * y + s_l - 1)
        return sig, 2 * y + 2 * t * dy

    t = (m.lam_L - s_l) * (1 - s_l) / (2 * nu)
    for _ in range(MAX_NEWTON):
        try:
            sig, dsig = sigma(t)
        except MissingFixedPointError:
            t *= 0.5
            continue
        r = sig - m.lam_L
        step = r / dsig
        t_new = t - step
        if abs(step) <= 1e-16 * max(1.0, abs(t)):
            t = t_new
            break
        t = t_new
    else:
        raise NewtonDivergenceError("t solve did not converge")
    sig, _ = sigma(t)
    res = (abs(sig - m.lam_L), abs(s_r - m.lam_R), abs(s_l / s_r - m.S))
    if max(res) >= tol:
        raise NewtonDivergenceError(f"residual {max(res)!r} above {tol!r}")
    return BCFit(float(mu), float(s_l), float(s_r), float(t), tuple(float(v) for v in res), nu)


# -- sweeps -----------------------------------------------------------------------------------

FITTERS = {"sn": sn_fit, "pf": pf_fit, "bc": bc_fit}
HEADERS = {"sn": SNFit.CSV_HEADER, "pf": PFFit.CSV_HEADER, "bc": BCFit.CSV_HEADER}


@dataclass(frozen=True)
class SweepResult:
    kind: str
    fits: tuple
    failures: tuple
    delta: float

    def csv_rows(self) -> list:
        return [list(HEADERS[self.kind])] + [fit.csv_row() for fit in self.fits]

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "delta_estimate": self.delta,
            "fits": [asdict(fit) for fit in self.fits],
            "failures": [{"mu": mu, "error": msg} for mu, msg in self.failures],
        }


def fit_sweep(kind: str, fam: MapFamily, mus) -> SweepResult:
    """Fit at each ``mu`` (sorted ascending); ``delta`` is the largest mu below the first failure."""
    fitter = FITTERS[kind]
    fits, failures = [], []
    delta = 0.0
    failed = False
    for mu in sorted(float(m) for m in mus):
        try:
            fits.append(fitter(fam, mu))
            if not failed:
                delta = mu
        except (FitError, AssumptionError, ArithmeticError, ValueError) as exc:
            failures.append((mu, str(exc)))
            failed = True
    return SweepResult(kind, tuple(fits), tuple(failures), delta)


def extrapolate_to_zero(mus, values, basis: str = "sqrt") -> float:
    """Value at mu = 0 of the interpolant ``c0 + c1 s + c2 s^2 + ...``.

    ``s = sqrt(mu)`` for ``basis="sqrt"``, ``s = mu`` for ``basis="linear"``.
    """
    mus = np.asarray(mus, dtype=float)
    s = np.sqrt(mus) if basis == "sqrt" else mus
    coef = np.polyfit(s, np.asarray(values, dtype=float), len(mus) - 1)
    return float(coef[-1])
