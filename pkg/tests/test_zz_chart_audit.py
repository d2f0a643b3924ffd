"""Audit of every linearization chart built earlier in the session.

Named so it is collected last; the charts are recorded by conftest.
"""

import numpy as np
import pytest

from conftest import CHARTS

SCHRODER_TOL = 1e-10


@pytest.mark.criterion_8
def test_every_chart_satisfies_schroder_equation():
    assert CHARTS, "no charts were recorded"
    worst = 0.0
    for chart in CHARTS:
        xs = chart.sample_points(200)
        assert len(xs) > 0
        res = chart.schroder_residuals(xs)
        worst = max(worst, float(np.max(res)))
        assert np.all(res < SCHRODER_TOL), (chart.x_star, chart.lam, chart.domain, float(np.max(res)))
    print(f"audited {len(CHARTS)} charts, worst relative Schroder residual {worst:.3e}")
