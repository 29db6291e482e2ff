from dataclasses import replace
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from powerlaw_droplet.scaling import (
    PAPER_TABLE,
    ConstantsRow,
    angle_prefactor,
    asymptotic_front_height,
    build_constants_table,
    constants_from_critical,
    dissipation_integral,
    similarity_exponent,
    spreading_prefactor,
)
from powerlaw_droplet.shooting import find_critical_kappa, solve_drop
from powerlaw_droplet.similarity import IntegratorOptions, zero_angle_coefficient, zero_angle_exponent

from _shared import critical

OPTS = IntegratorOptions()


def test_beta_exact_and_decreasing():
    assert similarity_exponent(1.0) == 0.1
    assert similarity_exponent(2.0) == 1.0 / 17.0
    lams = np.linspace(0.2, 10.0, 50)
    assert np.all(np.diff([similarity_exponent(x) for x in lams]) < 0.0)


@given(lam=st.floats(1.01, 10.0), eta_f=st.floats(0.3, 3.0), shape=st.floats(0.1, 5.0))
def test_spreading_prefactor_homogeneity(lam, eta_f, shape):
    # S is linear in eta_f and scales as I**(-(2 lam+1)/(7 lam+3))
    s = spreading_prefactor(lam, eta_f, shape)
    assert spreading_prefactor(lam, 2 * eta_f, shape) == pytest.approx(2 * s, rel=1e-12)
    ratio = spreading_prefactor(lam, eta_f, 2 * shape) / s
    assert ratio == pytest.approx(2.0 ** (-(2 * lam + 1) / (7 * lam + 3)), rel=1e-12)


def test_prefactor_errors():
    with pytest.raises(ValueError):
        spreading_prefactor(2.0, -1.0, 1.0)
    with pytest.raises(ValueError):
        angle_prefactor(2.0, 0.3, 2.0)


def test_published_inputs_reproduce_published_s():
    for lam, (_, eta_f, shape, s, _) in PAPER_TABLE.items():
        assert spreading_prefactor(lam, eta_f, shape) == pytest.approx(s, rel=1e-4)


def test_angle_prefactor_from_slope():
    # slope at the inflection point of the lam=2 drop is -1.33947
    q = angle_prefactor(2.0, -1.33947, 2.08030)
    assert q == pytest.approx(0.951946, rel=1e-5)


def test_asymptotic_front_height():
    assert asymptotic_front_height(2.0, 1.19915, 1.19915 - 0.01) == pytest.approx(7.988e-3, rel=1e-3)
    h = asymptotic_front_height(2.0, 1.2, np.array([1.0, 1.2, 1.5]))
    assert h[0] > 0 and h[1] == 0 and h[2] == 0
    with pytest.raises(ValueError):
        asymptotic_front_height(1.0, 1.2, 1.0)


def test_constants_invariant_under_step_refinement():
    c1 = constants_from_critical(critical(2.0))
    c2 = constants_from_critical(find_critical_kappa(2.0, opts=replace(OPTS, step_fraction=5e-5)))
    assert c2.s_lambda == pytest.approx(c1.s_lambda, rel=1e-6)
    assert c2.q_lambda == pytest.approx(c1.q_lambda, rel=1e-6)


@pytest.mark.parametrize("lam", [2.0, 3.0, 5.0])
def test_front_log_log_slope(lam):
    p = critical(lam).profile
    x = p.eta_f - p.eta
    m = (x > 0) & (x <= 10 * x[-1])
    slope, _ = np.polyfit(np.log(x[m]), np.log(p.h[m]), 1)
    assert slope == pytest.approx(zero_angle_exponent(lam), rel=0.02)


def test_dissipation_converges():
    vals = []
    for h_stop in (1e-6, 1e-7, 1e-8):
        opts = replace(OPTS, h_stop=h_stop)
        vals.append(dissipation_integral(find_critical_kappa(2.5, opts=opts).profile))
    assert abs(vals[1] / vals[0] - 1) < 1e-2
    assert abs(vals[2] / vals[1] - 1) < 1e-3


def test_dissipation_finite_angle_newtonian_diverges():
    p = solve_drop(1.0, 20.0)
    assert math.isinf(dissipation_integral(p))
    with pytest.raises(ValueError):
        dissipation_integral(solve_drop(2.5, 2.0))


def test_table_order_and_errors(monkeypatch):
    monkeypatch.setenv("POWERLAW_DROPLET_THREADS", "2")
    rows = build_constants_table([3.0, 0.5, 2.0], tolerance=1e-6)
    assert [r.lam for r in rows] == [3.0, 0.5, 2.0]
    assert rows[0].ok and rows[2].ok
    assert not rows[1].ok and "shear-thinning" in rows[1].error
    serial = build_constants_table([3.0, 0.5, 2.0], tolerance=1e-6, n_jobs=1)
    assert [r.as_dict() for r in serial] == [r.as_dict() for r in rows]


def test_constants_row_dict():
    row = ConstantsRow(lam=2.0, error="boom")
    assert not row.ok
    assert row.as_dict()["error"] == "boom"
