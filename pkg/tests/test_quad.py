"""Adaptive quadrature: exactness, refinement behaviour, tail bounds."""

import math

import numpy as np
import pytest

from mollab.quad import DepthExceeded, QuadConfig, integrate, tail_bound


def test_exponential_integral_default_config():
    res = integrate(lambda t: np.exp(-t), 0.0, 1.0)
    assert abs(res.value - (1.0 - math.exp(-1.0))) <= 1e-12
    assert res.error_estimate >= 0.0
    assert res.panels_used >= 1


def test_polynomials_exact_on_single_panel():
    # One embedded-rule panel integrates low-degree polynomials exactly.
    cfg = QuadConfig(initial_panels=1)
    coeffs = [0.7, -1.3, 0.25, 2.0, -0.5, 1.1]  # degree 5
    lo, hi = -1.0, 2.0
    exact = sum(
        c * (hi ** (k + 1) - lo ** (k + 1)) / (k + 1)
        for k, c in enumerate(coeffs)
    )
    res = integrate(
        lambda t: sum(c * t**k for k, c in enumerate(coeffs)), lo, hi, cfg
    )
    assert abs(res.value - exact) <= 1e-14 * max(1.0, abs(exact))
    assert res.panels_used == 1


@pytest.mark.parametrize(
    "f,lo,hi,exact",
    [
        (lambda t: np.exp(-t), 0.0, 3.0, 1.0 - math.exp(-3.0)),
        (lambda t: 1.0 / (1.0 + t * t), 0.0, 1.0, math.pi / 4.0),
        (lambda t: np.cos(5.0 * t), 0.0, 2.0, math.sin(10.0) / 5.0),
    ],
)
def test_tightening_tolerance_does_not_worsen_error(f, lo, hi, exact):
    loose = integrate(f, lo, hi, QuadConfig(abs_tol=1e-4, rel_tol=1e-4))
    tight = integrate(f, lo, hi, QuadConfig(abs_tol=1e-12, rel_tol=1e-12))
    err_loose = abs(loose.value - exact)
    err_tight = abs(tight.value - exact)
    assert err_tight <= err_loose + 1e-15
    assert err_tight <= 1e-12
    assert tight.panels_used >= loose.panels_used


def test_interval_additivity():
    f = lambda t: np.exp(-t) * np.sin(3.0 * t)
    whole = integrate(f, 0.0, 2.0)
    left = integrate(f, 0.0, 0.7)
    right = integrate(f, 0.7, 2.0)
    budget = whole.error_estimate + left.error_estimate + right.error_estimate
    assert abs(whole.value - (left.value + right.value)) <= budget + 1e-12


def test_error_estimate_bounds_true_error():
    res = integrate(lambda t: np.exp(-t), 0.0, 1.0, QuadConfig(abs_tol=1e-9, rel_tol=1e-9))
    assert abs(res.value - (1.0 - math.exp(-1.0))) <= max(res.error_estimate, 1e-13)


def test_depth_exceeded_carries_best_estimate():
    # A power-law kink cannot meet 1e-15 within three bisection levels.
    cfg = QuadConfig(abs_tol=1e-15, rel_tol=1e-15, max_depth=3, initial_panels=1)
    third = 1.0 / 3.0
    exact = (third**1.2 + (1.0 - third) ** 1.2) / 1.2
    with pytest.raises(DepthExceeded) as exc:
        integrate(lambda t: np.abs(t - third) ** 0.2, 0.0, 1.0, cfg)
    best = exc.value.result
    assert abs(best.value - exact) <= 1e-2
    assert best.error_estimate > 0.0


def test_input_validation():
    with pytest.raises(ValueError):
        integrate(np.exp, 1.0, 1.0)
    with pytest.raises(ValueError):
        QuadConfig(abs_tol=0.0)
    with pytest.raises(ValueError):
        QuadConfig(max_depth=0)
    with pytest.raises(ValueError):
        QuadConfig(initial_panels=0)


def test_tail_bound_reference_values():
    assert tail_bound(1.0, 1.0, 0.0) == pytest.approx(1.0, rel=1e-15)
    assert tail_bound(0.381966, 1.3, 60.0) == pytest.approx(3.76e-10, rel=1e-2)
    assert tail_bound(2.0, 5.0, 10.0) == pytest.approx(5.15e-9, rel=1e-2)


def test_tail_bound_certifies_truncation():
    # |int_U^inf e^{-t} dt| is exactly the bound with amplitude 1.
    U = 4.0
    tail = math.exp(-U)
    assert tail <= tail_bound(1.0, 1.0, U) * (1.0 + 1e-12)
    with pytest.raises(ValueError):
        tail_bound(0.0, 1.0, 5.0)
    with pytest.raises(ValueError):
        tail_bound(-1.0, 1.0, 5.0)
