import math

import numpy as np
import pytest
from scipy.optimize import brentq
from scipy.special import ellipk

from conjugacy.algebra import Poly, RationalFn
from conjugacy.maps import Interval, SmoothMap1D, catalog_make
from conjugacy.orbits import (
    ATTRACTING,
    NONHYPERBOLIC,
    REPELLING,
    NotAnOrbitError,
    OrbitError,
    OrbitEscapeError,
    agm,
    classify,
    elliptic_k,
    empirical_density,
    find_fixed_points,
    find_periodic_orbits_unimodal,
    kf_bin_masses,
    kf_cdf,
    lyndon_words,
    multiplier,
    orbit_counts,
    verify_multiplier_law,
)

T2 = catalog_make("chebyshev")


def test_classify():
    assert classify(0.5) == ATTRACTING
    assert classify(-2.0) == REPELLING
    assert classify(-1.0 + 1e-12) == NONHYPERBOLIC


def test_fixed_points_saddle_node_form():
    f = catalog_make("saddle-node", {"nu": "1/100"})
    fps = find_fixed_points(f, Interval(-1, 1), 64)
    assert len(fps) == 2
    (a, b) = fps
    assert a.x_star == pytest.approx(-0.1, abs=1e-13) and a.multiplier == pytest.approx(1.2, abs=1e-12)
    assert b.x_star == pytest.approx(0.1, abs=1e-13) and b.multiplier == pytest.approx(0.8, abs=1e-12)
    assert a.stability == REPELLING and b.stability == ATTRACTING
    for p in fps:
        assert abs(f.eval(p.x_star) - p.x_star) < 1e-12 * max(1, abs(p.x_star))


def test_fixed_points_skip_poles():
    # 1/x has fixed points +-1 and a pole at 0
    f = SmoothMap1D(RationalFn(Poly([1]), Poly([0, 1])))
    fps = find_fixed_points(f, Interval(-3, 3), 60)
    assert [round(p.x_star, 12) for p in fps] == [-1.0, 1.0]


def test_period_two_multiplier():
    pts = [(1 + math.sqrt(5)) / 4, (1 - math.sqrt(5)) / 4]
    assert multiplier(T2, pts) == pytest.approx(-4.0, rel=1e-12)
    assert multiplier(T2, pts[::-1]) == pytest.approx(multiplier(T2, pts), rel=1e-12)


def test_logistic_fixed_point_multiplier():
    assert multiplier(catalog_make("logistic"), [0.75]) == -2.0


def test_not_an_orbit():
    with pytest.raises(NotAnOrbitError):
        multiplier(T2, [0.1, 0.2])


def test_lyndon_word_counts():
    assert [len(lyndon_words(n)) for n in range(1, 9)] == [2, 1, 2, 3, 6, 9, 18, 30]


def test_t2_low_periods():
    orbits = find_periodic_orbits_unimodal(T2, 2)
    fixed = sorted(o.points[0] for o in orbits if o.period == 1)
    assert fixed == pytest.approx([-1.0, 0.5], abs=1e-13)
    (two,) = [o for o in orbits if o.period == 2]
    assert abs(two.multiplier) == pytest.approx(4.0, rel=1e-12)


def test_t2_orbit_counts():
    counts = orbit_counts(find_periodic_orbits_unimodal(T2, 5))
    assert [counts[p] for p in range(1, 6)] == [2, 1, 2, 3, 6]


def test_kf_orbit_counts_match_t2():
    kf = catalog_make("katsura-fukuda", {"l": "1/2"})
    assert orbit_counts(find_periodic_orbits_unimodal(kf, 3)) == orbit_counts(find_periodic_orbits_unimodal(T2, 3))


def _brute_force_periodic_points(f, p, n=400_001):
    # sign changes of f^p(x) - x on a fine grid, refined by brentq
    xs = np.linspace(-1, 1, n)
    ys = xs.copy()
    for _ in range(p):
        ys = f.eval_array(ys)
    d = ys - xs

    def g(x):
        y = x
        for _ in range(p):
            y = f.eval(y)
        return y - x

    roots = []
    for i in np.nonzero(d == 0)[0]:
        roots.append(xs[i])
    for i in np.nonzero(np.sign(d[:-1]) * np.sign(d[1:]) < 0)[0]:
        roots.append(brentq(g, xs[i], xs[i + 1], xtol=1e-15))
    return np.array(sorted(roots))


def _minimal_period(f, x, p, tol=1e-8):
    y = x
    for d in range(1, p + 1):
        y = f.eval(y)
        if p % d == 0 and abs(y - x) < tol:
            return d
    return p


@pytest.mark.parametrize("p", range(1, 7))
def test_pullback_matches_brute_force_roots(p):
    orbits = find_periodic_orbits_unimodal(T2, p)
    symbolic = np.array(sorted(x for o in orbits if p % o.period == 0 for x in o.points))
    brute = _brute_force_periodic_points(T2, p)
    assert len(brute) == 2**p == len(symbolic)
    assert np.max(np.abs(symbolic - brute)) < 1e-8
    counts = orbit_counts(orbits)
    brute_counts = {}
    for x in brute:
        d = _minimal_period(T2, x, p)
        brute_counts[d] = brute_counts.get(d, 0) + 1
    for d, c in brute_counts.items():
        assert counts[d] * d == c


@pytest.mark.parametrize("name,params", [("chebyshev", {}), ("logistic", {}), ("katsura-fukuda", {"l": "1/4"})])
def test_periodic_orbit_invariants(name, params):
    f = catalog_make(name, params)
    for o in find_periodic_orbits_unimodal(f, 6):
        p = o.period
        assert len(o.points) == p == len(o.itinerary)
        for i, x in enumerate(o.points):
            assert abs(f.eval(x) - o.points[(i + 1) % p]) < 1e-10
        prod = math.prod(f.deriv(x, 1) for x in o.points)
        assert abs(prod - o.multiplier) <= 1e-10 * abs(prod)
        assert _minimal_period(f, o.points[0], p) == p
        rotated = o.points[1:] + o.points[:1]
        assert abs(multiplier(f, rotated) - o.multiplier) <= 1e-12 * abs(o.multiplier)


def test_non_unimodal_map_rejected():
    f = SmoothMap1D.from_coeffs([0, 0.5], domain=Interval(-1, 1))
    with pytest.raises((OrbitError, ValueError)):
        find_periodic_orbits_unimodal(f, 3)


def test_multiplier_law_t2():
    rep = verify_multiplier_law(T2, p_max=8)
    assert rep.passed
    (ex,) = rep.exempt_rows
    assert ex.orbit.points == (-1.0,) and ex.orbit.multiplier == 4.0
    assert len(rep.rows) == sum([2, 1, 2, 3, 6, 9, 18, 30])


def test_multiplier_law_kf_half():
    rep = verify_multiplier_law(catalog_make("katsura-fukuda", {"l": "1/2"}), p_max=8)
    assert rep.passed
    (ex,) = rep.exempt_rows
    assert ex.orbit.points[0] == 0.0 and ex.orbit.multiplier == pytest.approx(4.0, abs=1e-12)


def test_multiplier_law_elliptic_compact():
    rep = verify_multiplier_law(catalog_make("elliptic-compact", {"a": 1, "b": 1}), p_max=6)
    assert rep.passed
    assert all(r.orbit.period == 1 for r in rep.exempt_rows)


def test_multiplier_law_invariant_under_affine_rescaling():
    # x -> (1 - x) / 2 carries T2 to the logistic map; multipliers correspond orbit by orbit
    lg = catalog_make("logistic")
    a = sorted(round(r.abs_multiplier, 6) for r in verify_multiplier_law(T2, p_max=6).rows)
    b = sorted(round(r.abs_multiplier, 6) for r in verify_multiplier_law(lg, p_max=6).rows)
    assert a == b
    assert verify_multiplier_law(lg, p_max=6).passed


def test_multiplier_law_report_csv():
    rows = verify_multiplier_law(T2, p_max=2).csv_rows()
    assert rows[0] == ["itinerary", "period", "points", "multiplier", "exempt", "relative_error"]
    assert len(rows) == 4


def test_multiplier_law_detects_violation():
    # with H = 1 nothing is exempt, so the endpoint fixed point (multiplier 4) violates the law
    rep = verify_multiplier_law(T2, H=RationalFn.const(1), p_max=3)
    assert not rep.passed
    (bad,) = [r for r in rep.rows if r.relative_error > 1e-8]
    assert bad.orbit.points == (-1.0,)


def test_agm_and_k():
    assert agm(1.0, 1.0) == 1.0
    assert abs(elliptic_k(0.0) - math.pi / 2) < 1e-12
    for m in (0.25, 0.5, 0.9):
        assert elliptic_k(m) == pytest.approx(float(ellipk(m)), rel=1e-14)


def test_kf_cdf_normalized():
    for l in (0.0, 0.5, 0.9):
        assert kf_cdf(l, 0.0) == 0.0
        assert kf_cdf(l, 1.0) == pytest.approx(1.0, abs=1e-14)
    edges = np.linspace(0, 1, 11)
    assert kf_bin_masses(0.5, edges).sum() == pytest.approx(1.0, abs=1e-14)
    # logistic density 1/(pi sqrt(x(1-x))) has CDF (2/pi) arcsin(sqrt(x))
    assert kf_cdf(0.0, 0.3) == pytest.approx(2 / math.pi * math.asin(math.sqrt(0.3)), abs=1e-15)


class _UniformDouble:
    domain = Interval(0, 1)

    def __init__(self):
        self.rng = np.random.default_rng(7)

    def __call__(self, x):
        return float(self.rng.random())


def test_uniform_test_double_density():
    hist = empirical_density(_UniformDouble(), 0.5, 200_000, bins=20, burn_in=0)
    assert hist.masses.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.max(np.abs(hist.masses - 1 / 20)) < 3e-3


def test_density_logistic_small_sample():
    lg = catalog_make("logistic")
    hist = empirical_density(lg, 0.3, 100_000, bins=20)
    assert abs(hist.masses.sum() - 1.0) < 1e-12
    assert np.max(np.abs(hist.masses - kf_bin_masses(0.0, hist.bin_edges))) < 1e-2


def test_density_is_deterministic():
    kf = catalog_make("katsura-fukuda", {"l": "1/2"})
    a = empirical_density(kf, 0.3, 5000, bins=50, seed=3)
    b = empirical_density(kf, 0.3, 5000, bins=50, seed=3)
    assert np.array_equal(a.masses, b.masses)


def test_density_errors():
    with pytest.raises(ValueError):
        empirical_density(T2, 0.3, 100, bins=50)
    escape = SmoothMap1D.from_coeffs([0, 3], domain=Interval(0, 1))
    with pytest.raises(OrbitEscapeError) as info:
        empirical_density(escape, 0.3, 5000, bins=50)
    assert info.value.index >= 1
