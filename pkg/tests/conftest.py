"""Shared fixtures: canonical modes and closed-form solution profiles."""

import numpy as np
import pytest

from mollab.oracle import SolutionProfile
from mollab.varsol import (
    SPECIAL_THETA_R,
    ModeParams,
    make_mode_general,
    make_mode_special,
    s_profile,
)


def special_mode_for_R(R: float) -> ModeParams:
    """Equal-weight mode with the requested interval radius."""
    return make_mode_special(SPECIAL_THETA_R / R)


@pytest.fixture(scope="session")
def mode_r2() -> ModeParams:
    return special_mode_for_R(2.0)


@pytest.fixture(scope="session")
def mode_r5() -> ModeParams:
    return special_mode_for_R(5.0)


@pytest.fixture(scope="session")
def mode_general() -> ModeParams:
    # beta != 1 exercises the inhomogeneous boundary and the cross terms.
    return make_mode_general(0.5, 2.0, 1.3, B=1.0 / 3.0, C=1.0)


def closed_profile(mode: ModeParams, n: int, with_derivs: bool = True) -> SolutionProfile:
    """Sample the closed-form minimizer on a uniform (n+1)-node grid."""
    grid = np.linspace(0.0, mode.R, n + 1)
    values, derivs = s_profile(grid, mode)
    return SolutionProfile(
        grid=grid, values=values, derivs=derivs if with_derivs else None
    )


@pytest.fixture(scope="session")
def rng() -> np.random.Generator:
    return np.random.default_rng(20260814)
