"""Fixed points, periodic orbits, multipliers and invariant densities."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq
from scipy.special import ellipkinc

from .algebra import RationalFn
from .maps import Interval, PiecewiseMap1D, SmoothMap1D

ATTRACTING = "attracting"
REPELLING = "repelling"
NONHYPERBOLIC = "nonhyperbolic"


class OrbitError(RuntimeError):
    pass


class NotAnOrbitError(ValueError):
    pass


class BranchInversionError(OrbitError):
    pass


class OrbitEscapeError(OrbitError):
    def __init__(self, index: int, value: float):
        super().__init__(f"orbit left the domain at iterate {index} (x = {value!r})")
        self.index = index
        self.value = value


def classify(multiplier: float) -> str:
    if abs(abs(multiplier) - 1.0) < 1e-9:
        return NONHYPERBOLIC
    return ATTRACTING if abs(multiplier) < 1.0 else REPELLING


@dataclass(frozen=True)
class FixedPointInfo:
    x_star: float
    multiplier: float
    stability: str


@dataclass(frozen=True)
class PeriodicOrbit:
    points: tuple
    period: int
    multiplier: float
    itinerary: str


@dataclass(frozen=True)
class DensityHistogram:
    bin_edges: np.ndarray
    masses: np.ndarray
    sample_count: int
    seed: int

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.bin_edges[1:] + self.bin_edges[:-1])


def _d1(f, x: float) -> float:
    if isinstance(f, PiecewiseMap1D):
        return f.deriv(x, 1, side="left" if x <= 0 else "right")
    return f.deriv(x, 1)


def _newton_polish(f, x: float, lo: float, hi: float, tol: float = 1e-13) -> float:
    """Newton on f(x) - x, kept inside [lo, hi]."""
    for _ in range(30):
        d = _d1(f, x) - 1.0
        if d == 0:
            break
        step = (f.eval(x) - x) / d
        nx = x - step
        if not lo <= nx <= hi:
            break
        x = nx
        if abs(step) <= tol * max(1.0, abs(x)):
            break
    return x


def _segments(f, interval: Interval) -> list:
    """Split the interval at poles so each piece is pole-free."""
    lo, hi = interval.lo, interval.hi
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise ValueError("find_fixed_points needs a bounded search interval")
    poles = getattr(f, "poles", ()) if isinstance(f, SmoothMap1D) else ()
    cuts = [p for p in poles if lo <= p <= hi]
    if not cuts:
        return [(lo, hi)]
    pieces, a = [], lo
    for p in cuts:
        eps = 1e-9 * max(1.0, abs(p))
        if p - eps > a:
            pieces.append((a, p - eps))
        a = p + eps
    if a < hi:
        pieces.append((a, hi))
    if not pieces:
        raise OrbitError("pole subdivision left no pole-free segment")
    return pieces


def find_fixed_points(f, interval: Interval, grid_n: int = 256) -> list:
    """Fixed points in ``interval`` from sign changes of f(x) - x on a grid.

    Each bracket is refined by Brent's method and polished by Newton's method.
    Tangential (even-order) fixed points that do not change sign can be missed.
    """
    if grid_n < 2:
        raise ValueError("grid_n must be at least 2")
    found = []
    for a, b in _segments(f, interval):
        xs = np.linspace(a, b, grid_n)
        gs = np.array([f.eval(x) - x for x in xs])
        for i, x in enumerate(xs):
            if gs[i] == 0.0:
                found.append(float(x))
        for i in range(len(xs) - 1):
            if gs[i] * gs[i + 1] < 0:
                r = brentq(lambda x: f.eval(x) - x, xs[i], xs[i + 1], xtol=1e-15, rtol=1e-15, maxiter=200)
                found.append(_newton_polish(f, r, xs[i], xs[i + 1]))
    found.sort()
    merged = []
    for x in found:
        if not merged or abs(x - merged[-1]) > 1e-9:
            merged.append(x)
    out = []
    for x in merged:
        lam = _d1(f, x)
        out.append(FixedPointInfo(x, lam, classify(lam)))
    return out


def multiplier(f, points, tol: float = 1e-8) -> float:
    """Product of first derivatives along an orbit, after checking it is one."""
    pts = [float(p) for p in points]
    if not pts:
        raise NotAnOrbitError("empty orbit")
    p = len(pts)
    for i, x in enumerate(pts):
        nxt = pts[(i + 1) % p]
        if abs(f.eval(x) - nxt) > tol * max(1.0, abs(nxt)):
            raise NotAnOrbitError(f"f(points[{i}]) = {f.eval(x)!r} != points[{(i + 1) % p}] = {nxt!r}")
    lam = 1.0
    for x in pts:
        lam *= _d1(f, x)
    return lam


# -- periodic orbits of full-shift unimodal maps -----------------------------------------

def lyndon_words(n: int, alphabet: str = "LR") -> list:
    """Aperiodic necklace representatives of length ``n`` (Duval's algorithm)."""
    k = len(alphabet)
    out = []
    w = [-1]
    while w:
        w[-1] += 1
        m = len(w)
        if m == n:
            out.append("".join(alphabet[i] for i in w))
        while len(w) < n:
            w.append(w[len(w) - m])
        while w and w[-1] == k - 1:
            w.pop()
    return out


@dataclass
class UnimodalStructure:
    lo: float
    hi: float
    critical: float
    is_max: bool
    inverse: dict = field(default_factory=dict)


def unimodal_structure(f: SmoothMap1D, check_tol: float = 1e-8) -> UnimodalStructure:
    """Locate the turning point and check both branches cover the interval."""
    d = f.domain
    if not d.bounded:
        raise BranchInversionError("unimodal analysis needs a bounded domain")
    lo, hi = d.lo, d.hi
    xs = np.linspace(lo, hi, 2001)
    ds = f.deriv_array(xs, 1)
    flips = [i for i in range(len(xs) - 1) if ds[i] * ds[i + 1] < 0 or ds[i + 1] == 0 and 0 < i + 1 < len(xs) - 1]
    if len(flips) != 1:
        raise BranchInversionError(f"map is not unimodal on {d}: {len(flips)} turning points")
    i = flips[0]
    if ds[i + 1] == 0:
        c = float(xs[i + 1])
    else:
        c = brentq(lambda x: f.deriv(x, 1), xs[i], xs[i + 1], xtol=1e-15, rtol=1e-15)
    fc = f.eval(c)
    is_max = ds[0] > 0
    top, bottom = (hi, lo) if is_max else (lo, hi)
    if abs(fc - top) > check_tol:
        raise BranchInversionError(f"critical value {fc!r} does not reach {top!r}")
    for end in (lo, hi):
        if abs(f.eval(end) - bottom) > check_tol:
            raise BranchInversionError(f"f({end!r}) = {f.eval(end)!r} is not the endpoint {bottom!r}")
    return UnimodalStructure(lo, hi, c, is_max)


def _inverse_branch(f: SmoothMap1D, s: UnimodalStructure, symbol: str, y: float) -> float:
    a, b = (s.lo, s.critical) if symbol == "L" else (s.critical, s.hi)
    ga, gb = f.eval(a) - y, f.eval(b) - y
    if ga == 0:
        return a
    if gb == 0:
        return b
    if ga * gb > 0:
        # y sits a rounding error beyond the critical value or an endpoint value
        if min(abs(ga), abs(gb)) < 1e-8:
            return a if abs(ga) < abs(gb) else b
        raise BranchInversionError(f"no preimage of {y!r} on branch {symbol}")
    return brentq(lambda x: f.eval(x) - y, a, b, xtol=1e-16, rtol=1e-15, maxiter=200)


def _itinerary_orbit(f: SmoothMap1D, s: UnimodalStructure, word: str, tol: float, max_cycles: int) -> tuple:
    p = len(word)
    x = 0.5 * (s.lo + s.hi)
    for _ in range(max_cycles):
        y = x
        for sym in reversed(word):
            y = _inverse_branch(f, s, sym, y)
        if abs(y - x) < tol:
            x = y
            break
        x = y
    else:
        raise OrbitError(f"pull-back for itinerary {word} did not converge")
    x = _polish_periodic(f, x, p, s)
    pts = [x]
    y = x
    for sym in reversed(word[1:]):
        y = _inverse_branch(f, s, sym, y)
        pts.append(y)
    # pts = [x0, x_{p-1}, ..., x_1]
    return (pts[0],) + tuple(reversed(pts[1:]))


def _polish_periodic(f: SmoothMap1D, x: float, p: int, s: UnimodalStructure) -> float:
    for _ in range(4):
        y, dy = x, 1.0
        for _ in range(p):
            dy *= f.deriv(y, 1)
            y = f.eval(y)
        if dy == 1.0:
            break
        step = (y - x) / (dy - 1.0)
        nx = min(max(x - step, s.lo), s.hi)
        if abs(nx - x) > 1e-10:
            break  # Newton left the pull-back basin; keep the pull-back value
        x = nx
        if abs(step) < 1e-16:
            break
    return x


def find_periodic_orbits_unimodal(f: SmoothMap1D, p_max: int = 10, tol: float = 1e-13,
                                  max_cycles: int = 10_000) -> list:
    """All periodic orbits of prime period ``<= p_max`` of a full-shift unimodal map.

    One orbit per cyclic class of itineraries over {L, R}, located by
    pull-back through inverse branches. Results are ordered by period then
    itinerary.
    """
    s = unimodal_structure(f)
    orbits = []
    for p in range(1, p_max + 1):
        for word in lyndon_words(p):
            pts = _itinerary_orbit(f, s, word, tol, max_cycles)
            lam = 1.0
            for x in pts:
                lam *= f.deriv(x, 1)
            orbits.append(PeriodicOrbit(pts, p, lam, word))
    return orbits


def orbit_counts(orbits) -> dict:
    counts = {}
    for o in orbits:
        counts[o.period] = counts.get(o.period, 0) + 1
    return counts


# -- multiplier law ----------------------------------------------------------------------

@dataclass(frozen=True)
class LawRow:
    orbit: PeriodicOrbit
    abs_multiplier: float
    expected: float
    relative_error: float
    exempt: bool


@dataclass(frozen=True)
class LawReport:
    rows: tuple
    tol: float

    @property
    def passed(self) -> bool:
        return all(r.exempt or r.relative_error < self.tol for r in self.rows)

    @property
    def exempt_rows(self) -> tuple:
        return tuple(r for r in self.rows if r.exempt)

    def csv_rows(self) -> list:
        header = ["itinerary", "period", "points", "multiplier", "exempt", "relative_error"]
        out = [header]
        for r in self.rows:
            out.append([
                r.orbit.itinerary,
                r.orbit.period,
                ";".join(repr(x) for x in r.orbit.points),
                r.orbit.multiplier,
                int(r.exempt),
                r.relative_error,
            ])
        return out


def verify_multiplier_law(f: SmoothMap1D, H=None, p_max: int = 8, tol: float = 1e-8,
                          exempt_tol: float = 1e-10) -> LawReport:
    """Check ``|multiplier| = 2^p`` on every orbit avoiding the zeros of ``H``.

    Orbits through a point with ``|H(x)| < exempt_tol`` are flagged exempt and
    reported with their actual multiplier.
    """
    if H is None:
        H = f.paired_h
    if H is None:
        raise ValueError("no paired H function given or attached to the map")
    H = RationalFn.coerce(H)
    rows = []
    for orb in find_periodic_orbits_unimodal(f, p_max):
        expected = 2.0 ** orb.period
        a = abs(orb.multiplier)
        exempt = any(abs(H(x)) < exempt_tol for x in orb.points)
        rows.append(LawRow(orb, a, expected, abs(a - expected) / expected, exempt))
    return LawReport(tuple(rows), tol)


# -- invariant densities -------------------------------------------------------------------

def agm(a: float, b: float, tol: float = 1e-16) -> float:
    for _ in range(64):
        an, bn = 0.5 * (a + b), math.sqrt(a * b)
        if abs(an - bn) <= tol * an:
            return an
        a, b = an, bn
    return 0.5 * (a + b)


def elliptic_k(m: float) -> float:
    """Complete elliptic integral of the first kind, parameter ``m`` (``k^2``)."""
    if not m < 1:
        raise ValueError("K(m) diverges for m >= 1")
    return math.pi / (2.0 * agm(1.0, math.sqrt(1.0 - m)))


def kf_density(l: float, x):
    """Invariant density ``1 / (2 K(l) sqrt(x (1-x) (1-l x)))`` on (0, 1)."""
    x = np.asarray(x, dtype=float)
    return 1.0 / (2.0 * elliptic_k(l) * np.sqrt(x * (1 - x) * (1 - l * x)))


def kf_cdf(l: float, x):
    """Closed-form measure of [0, x]: ``F(arcsin sqrt x | l) / K(l)``."""
    x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
    return ellipkinc(np.arcsin(np.sqrt(x)), l) / elliptic_k(l)


def kf_bin_masses(l: float, edges) -> np.ndarray:
    return np.diff(kf_cdf(l, edges))


def empirical_density(f, x0: float, n: int, bins: int = 50, burn_in: int = 1000, seed: int = 0,
                      clip_tol: float = 1e-12) -> DensityHistogram:
    """Histogram of ``n`` iterates after ``burn_in`` steps over ``f.domain``.

    The seed nudges ``x0`` by a tiny deterministic offset to avoid landing on an
    exceptional orbit. Iterates overshooting the domain by less than
    ``clip_tol`` are clamped; larger excursions raise :class:`OrbitEscapeError`.
    """
    d = f.domain
    if not d.bounded:
        raise ValueError("empirical_density needs a bounded domain")
    if n < bins * 100:
        raise ValueError("need n >= 100 * bins samples")
    lo, hi = d.lo, d.hi
    rng = np.random.default_rng(seed)
    x = float(x0) + float(rng.uniform(-1e-10, 1e-10)) * (hi - lo)
    if not lo < x < hi:
        raise ValueError("x0 must be interior to the domain")
    step = getattr(f, "_fns", None)
    step = step[0] if step else f
    samples = np.empty(n)
    total = burn_in + n
    for k in range(total):
        x = step(x)
        if not lo <= x <= hi:
            if lo - clip_tol <= x <= hi + clip_tol:
                x = min(max(x, lo), hi)
            else:
                raise OrbitEscapeError(k + 1, x)
        if k >= burn_in:
            samples[k - burn_in] = x
    edges = np.linspace(lo, hi, bins + 1)
    counts, _ = np.histogram(samples, bins=edges)
    return DensityHistogram(edges, counts / counts.sum(), n, seed)
