import math

import numpy as np
import pytest

from conjugacy.linearize import (
    BasinError,
    ConjugacyTable,
    GridTooCoarseError,
    LinearizationError,
    MultiplierMismatchError,
    NonHyperbolicError,
    SuperattractingError,
    auto_basin,
    build_conjugacy,
    build_kink_conjugacy,
    extend_across_kink,
    extend_basin,
    koenigs,
    linearize_on_basin,
    slope_ratio,
    smoothness_report,
    table_residual,
)
from conjugacy.maps import Interval, PiecewiseMap1D, SmoothMap1D, catalog_make

F_ATTR = SmoothMap1D.from_coeffs([0, 0.5, 1])      # x/2 + x^2
F_REP = SmoothMap1D.from_coeffs([0, 2, 1])         # 2x + x^2
F_NEG = SmoothMap1D.from_coeffs([0, -0.5, 1])      # -x/2 + x^2
F_ODD = SmoothMap1D.from_coeffs([0, 0.5, 0, 0.5], domain=Interval(-1, 1))  # fixes -1, 0, 1


def _residual(chart, xs):
    return float(np.max(chart.schroder_residuals(xs)))


def test_koenigs_attracting_local():
    c = koenigs(F_ATTR, 0.0)
    assert c.direction == "attracting" and c.lam == 0.5
    assert _residual(c, np.linspace(-0.2, 0.2, 81)) < 1e-10


def test_koenigs_repelling_local():
    c = koenigs(F_REP, 0.0)
    assert c.direction == "repelling" and c.lam == 2.0
    assert _residual(c, c.sample_points(200)) < 1e-10


@pytest.mark.parametrize("f", [F_ATTR, F_REP, F_NEG])
def test_normalization(f):
    c = koenigs(f, 0.0)
    h = 1e-6
    assert abs(c(0.0)) < 1e-15
    assert abs((c(h) - c(-h)) / (2 * h) - 1.0) < 1e-6
    assert c.phi_deriv(0.0) == pytest.approx(1.0, abs=1e-12)


def test_linear_map_chart_is_identity():
    f = catalog_make("linear", {"lambda": "3/10"})
    c = extend_basin(koenigs(f, 0.0), Interval.open(-1, 1), f)
    xs = np.linspace(-0.99, 0.99, 51)
    assert max(abs(c(x) - x) for x in xs) < 1e-12


def test_koenigs_errors():
    with pytest.raises(NonHyperbolicError):
        koenigs(SmoothMap1D.from_coeffs([0, 1, 1]), 0.0)
    with pytest.raises(SuperattractingError):
        koenigs(SmoothMap1D.from_coeffs([0, 0, 1]), 0.0)
    with pytest.raises(LinearizationError):
        koenigs(F_ATTR, 0.1)


def test_extension_between_repelling_neighbours():
    c = linearize_on_basin(F_ODD, 0.0, Interval.open(-1, 1))
    xs = np.linspace(-0.99, 0.99, 199)
    phis = np.array([c(x) for x in xs])
    assert np.all(np.diff(phis) > 0)
    inner = xs[np.abs(F_ODD.eval_array(xs)) < 0.99]
    assert _residual(c, inner) < 1e-9


def test_extension_agrees_with_core_chart():
    local = koenigs(F_ATTR, 0.0)
    ext = extend_basin(local, auto_basin(F_ATTR, 0.0), F_ATTR)
    assert ext.domain.lo == -0.25 and ext.domain.hi == 0.5
    xs = np.linspace(-local.core_radius, local.core_radius, 21)
    assert max(abs(ext(x) - local(x)) for x in xs) < 1e-12
    assert _residual(ext, ext.sample_points(200)) < 1e-10


def test_extension_rejects_extra_fixed_points():
    with pytest.raises(BasinError):
        extend_basin(koenigs(F_ATTR, 0.0), Interval.open(-0.2, 0.7), F_ATTR)


def test_extension_rejects_boundary_points():
    c = extend_basin(koenigs(F_ODD, 0.0), Interval.open(-1, 1), F_ODD)
    with pytest.raises(BasinError):
        c(1 - 1e-13)
    with pytest.raises(BasinError):
        c(1.5)


def test_repelling_extension():
    c = linearize_on_basin(F_REP, 0.0)
    assert c.domain.lo == -1.0
    assert _residual(c, c.sample_points(200)) < 1e-10


def test_negative_multiplier_extension():
    c = linearize_on_basin(F_NEG, 0.0)
    xs = c.sample_points(200)
    assert _residual(c, xs) < 1e-10
    phis = np.array([c(x) for x in xs])
    assert np.all(np.diff(phis) > 0)


def test_identity_conjugacy():
    t = build_conjugacy(F_ATTR, F_ATTR, {"fixed": (0.0, 0.0)}, 201)
    assert t.residual_sup < 1e-11
    assert np.max(np.abs(t.hs - t.xs)) < 1e-12
    rep = smoothness_report(t, F_ATTR, F_ATTR, 0.0)
    assert rep.left_deriv == pytest.approx(1.0, abs=1e-9) and rep.right_deriv == pytest.approx(1.0, abs=1e-9)
    assert rep.match_error < 1e-9


def test_conjugacy_to_own_linearization():
    g = SmoothMap1D.from_coeffs([0, 0.5])
    t = build_conjugacy(F_ATTR, g, {"fixed": (0.0, 0.0)}, 101, basin_g=Interval.open(-10, 10), span=(-0.2, 0.2))
    assert t.residual_sup < 1e-10
    chart = linearize_on_basin(F_ATTR, 0.0)
    assert max(abs(h - chart(x)) for x, h in zip(t.xs, t.hs)) < 1e-12


def test_multiplier_mismatch_refused():
    g = SmoothMap1D.from_coeffs([0, 0.6, 1])
    with pytest.raises(MultiplierMismatchError):
        build_conjugacy(F_ATTR, g, {"fixed": (0.0, 0.0)}, 51)


G_ATTR = SmoothMap1D.from_coeffs([0, 0.5, -1])  # y/2 - y^2, basin (-1/2, 1/4)


def test_marked_pairing_and_coherence():
    t_fg = build_conjugacy(F_ATTR, G_ATTR, {"fixed": (0.0, 0.0), "marked": (0.3, -0.3)}, 121, span=(-0.2, 0.4))
    h_fg = t_fg.evaluator()
    assert h_fg(0.3) == pytest.approx(-0.3, abs=1e-13)
    assert t_fg.residual_sup < 1e-10 and t_fg.is_monotone()
    assert np.all(np.diff(t_fg.hs) < 0)
    t_gf = build_conjugacy(G_ATTR, F_ATTR, {"fixed": (0.0, 0.0), "marked": (-0.3, 0.3)}, 21, span=(-0.4, 0.2))
    h_gf = t_gf.evaluator()
    back = [h_gf(h_fg(x)) for x in t_fg.xs[1:-1]]
    assert np.max(np.abs(np.array(back) - t_fg.xs[1:-1])) < 1e-7


def test_marked_point_outside_basin():
    with pytest.raises(BasinError):
        build_conjugacy(F_ATTR, G_ATTR, {"fixed": (0.0, 0.0), "marked": (0.7, 0.1)}, 21)


def test_table_invariants_and_serialization():
    t = build_conjugacy(F_ATTR, G_ATTR, {"fixed": (0.0, 0.0)}, 101, span=(-0.2, 0.06))
    assert t.is_monotone()
    assert abs(table_residual(t.xs, t.evaluator(), F_ATTR, G_ATTR) - t.residual_sup) <= 1e-12
    # transport: the fixed point 0 maps to a fixed point with the same multiplier
    y = t.evaluator()(0.0)
    assert abs(G_ATTR.eval(y) - y) < 1e-8
    assert abs(F_ATTR.deriv(0.0, 1) - G_ATTR.deriv(y, 1)) < 1e-6
    csv_text = t.to_csv()
    assert csv_text.splitlines()[0] == "x,h,junction"
    back = ConjugacyTable.from_csv(csv_text)
    assert np.array_equal(back.xs, t.xs) and np.array_equal(back.hs, t.hs)
    assert back.junctions == t.junctions
    mid = 0.5 * (t.xs[40] + t.xs[41])
    assert back.evaluator()(mid) == pytest.approx(t.evaluator()(mid), abs=1e-6)
    import json

    d = json.loads(t.to_json())
    assert set(d) >= {"pairing", "residual_sup", "junctions", "smoothness", "xs", "hs"}


def test_junction_is_smooth():
    t = build_conjugacy(F_ATTR, G_ATTR, {"fixed": (0.0, 0.0)}, 401, span=(-0.2, 0.06))
    j = t.junctions[len(t.junctions) // 2]
    rep = smoothness_report(t, F_ATTR, G_ATTR, float(t.xs[j]))
    assert rep.match_error < 1e-6


def test_smoothness_grid_too_coarse():
    t = build_conjugacy(F_ATTR, F_ATTR, {"fixed": (0.0, 0.0)}, 11)
    with pytest.raises(GridTooCoarseError):
        smoothness_report(t, F_ATTR, F_ATTR, float(t.xs[3]))


def test_slope_ratio_examples():
    assert slope_ratio(catalog_make("skew-tent", {"nu": 1, "s_L": 2, "s_R": "1/2"})) == 4.0
    assert slope_ratio(F_ATTR) == 1.0
    for t in (0, 3, -7):
        g = catalog_make("skew-tent-quad", {"nu": "1/10", "s_L": 3, "s_R": "1/4", "t": t})
        assert slope_ratio(g) == 12.0
    flat = PiecewiseMap1D(SmoothMap1D.from_coeffs([0, 0, 1]), SmoothMap1D.from_coeffs([0, 2]))
    with pytest.raises(ValueError):
        slope_ratio(flat)


def _pw(mu, left, right):
    return PiecewiseMap1D(SmoothMap1D.from_coeffs([mu, *left]), SmoothMap1D.from_coeffs([mu, *right]))


def test_kink_identity_extension():
    f = _pw(0.01, [2, 1], [0.5])
    t = build_kink_conjugacy(f, f, 101)
    assert np.max(np.abs(t.hs - t.xs)) < 1e-12
    assert t.residual_sup < 1e-11


def test_kink_equal_slope_ratios_smooth():
    f = _pw(0.01, [2, 1], [0.5])
    g = catalog_make("skew-tent-quad", {"nu": "1/100", "s_L": 2, "s_R": "1/2", "t": "1/3"})
    t = build_kink_conjugacy(f, g, 201)
    assert t.residual_sup < 1e-8 and t.is_monotone()
    rep = smoothness_report(t, f, g, 0.0)
    assert rep.match_error < 1e-6


def test_kink_mismatched_slope_ratio():
    # slope ratios 2 and 3 with identical right branches: h'(0-) / h'(0+) = 2/3
    f = _pw(0.01, [1.2], [0.6])
    g = _pw(0.01, [1.8], [0.6])
    assert slope_ratio(f) == pytest.approx(2.0) and slope_ratio(g) == pytest.approx(3.0)
    t = build_kink_conjugacy(f, g, 201)
    rep = smoothness_report(t, f, g, 0.0)
    assert rep.right_deriv == pytest.approx(1.0, abs=1e-9)
    assert rep.left_deriv == pytest.approx(2.0 / 3.0, rel=1e-6)
    expected = abs(rep.right_deriv - 2.0 / 3.0 * rep.right_deriv) / max(1.0, abs(rep.right_deriv))
    assert rep.match_error == pytest.approx(expected, rel=1e-5)
    assert rep.match_error > 0.1


def test_extend_across_kink_needs_marked_start():
    f = _pw(0.01, [2, 1], [0.5])
    right = build_conjugacy(SmoothMap1D(f.right.expr), SmoothMap1D(f.right.expr), {"fixed": (0.02, 0.02)}, 21,
                            span=(0.001, 0.04))
    with pytest.raises(BasinError):
        extend_across_kink(right, f, f)
