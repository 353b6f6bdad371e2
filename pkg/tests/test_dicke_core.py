"""Tests for the superradiant rate-equation core."""

import math

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from dicke_moments.dicke_core import (
    PopulationVector,
    dicke_populations,
    evolve,
    evolve_trajectory,
    intensity,
    intensity_from_decomposition,
    rate_coefficients,
    rate_matrix,
)
from dicke_moments.reconstruct import Decomposition


def test_rate_coefficients_values():
    h = rate_coefficients(3)
    np.testing.assert_array_equal(h, [0.0, 3.0, 4.0, 3.0])
    assert rate_coefficients(5)[5] == 5.0
    assert rate_coefficients(3)[0] == 0.0


def test_rate_coefficients_rejects_bad_size():
    with pytest.raises(ValueError, match="invalid system size"):
        rate_coefficients(0)


def test_rate_matrix_small_cases():
    M1 = rate_matrix(1).entries
    np.testing.assert_array_equal(M1, [[0.0, 1.0], [0.0, -1.0]])
    M2 = rate_matrix(2).entries
    np.testing.assert_allclose(M2.sum(axis=0), 0.0, atol=0.0)
    assert rate_matrix(3).entries[1, 2] == 4.0


def test_evolve_ground_state_absorbing():
    p0 = dicke_populations(5, 0)
    p1 = evolve(p0, 3.7)
    np.testing.assert_allclose(p1.p, p0.p, atol=1e-14)


def test_evolve_zero_time_is_identity():
    p0 = dicke_populations(4, 2)
    assert evolve(p0, 0.0) is p0


def test_evolve_single_emitter_analytic():
    # one excited emitter decays as p_1(t) = e^{-t}
    p0 = dicke_populations(1, 1)
    p1 = evolve(p0, 1.0)
    np.testing.assert_allclose(p1.p, [1 - math.exp(-1), math.exp(-1)], atol=1e-12)


def test_evolve_rejects_negative_time():
    with pytest.raises(ValueError, match="negative time"):
        evolve(dicke_populations(2, 1), -0.5)


def test_evolve_conserves_probability():
    rng = np.random.default_rng(7)
    for N in (2, 9, 30):
        p0 = PopulationVector.from_array(rng.dirichlet(np.ones(N + 1)))
        for t in (0.1, 1.0, 10.0):
            p = evolve(p0, t)
            assert abs(p.p.sum() - 1.0) <= 1e-9


def test_evolve_matches_ode_oracle():
    # independent adaptive integration of the same rate equations
    rng = np.random.default_rng(11)
    for N in (1, 3, 8):
        M = rate_matrix(N).entries
        p0 = rng.dirichlet(np.ones(N + 1))
        sol = solve_ivp(
            lambda t, p: M @ p, (0.0, 2.0), p0, rtol=1e-11, atol=1e-12,
            dense_output=True,
        )
        for t in (0.5, 1.0, 2.0):
            ours = evolve(PopulationVector.from_array(p0), t)
            assert np.max(np.abs(ours.p - sol.sol(t))) <= 1e-8


def test_trajectory_single_time():
    p0 = dicke_populations(3, 2)
    traj = evolve_trajectory(p0, [0.0])
    assert len(traj.states) == 1
    np.testing.assert_array_equal(traj.states[0].p, p0.p)


def test_trajectory_matches_evolve():
    p0 = dicke_populations(1, 1)
    traj = evolve_trajectory(p0, [0.0, 1.0])
    np.testing.assert_allclose(traj.states[1].p, evolve(p0, 1.0).p, atol=1e-12)


def test_trajectory_conserves_probability():
    p0 = dicke_populations(6, 6)
    traj = evolve_trajectory(p0, np.linspace(0.0, 5.0, 40))
    for state in traj.states:
        assert abs(state.p.sum() - 1.0) <= 1e-9


def test_trajectory_rejects_bad_grid():
    p0 = dicke_populations(2, 1)
    with pytest.raises(ValueError):
        evolve_trajectory(p0, [1.0, 0.5])
    with pytest.raises(ValueError):
        evolve_trajectory(p0, [-1.0, 0.5])


def test_intensity_values():
    assert intensity(dicke_populations(5, 5)) == 5.0
    assert intensity(dicke_populations(5, 0)) == 0.0
    assert intensity(dicke_populations(4, 2)) == 6.0


def test_intensity_peak_scales_quadratically():
    for N in (4, 8, 16):
        traj = evolve_trajectory(
            dicke_populations(N, N), np.linspace(0.0, 10.0, 400)
        )
        peak = max(intensity(s) for s in traj.states)
        assert peak >= N**2 / 8


def test_intensity_from_decomposition_values():
    assert intensity_from_decomposition(5, Decomposition(5, ((1.0, 1.0),))) == 5.0
    assert intensity_from_decomposition(5, Decomposition(5, ((1.0, 0.0),))) == 0.0
    d = Decomposition(7, ((1.0, 0.5),))
    assert intensity_from_decomposition(7, d) == pytest.approx(14.0)


def test_intensity_from_decomposition_consistency():
    # closed form agrees with sum h_k p_k on the induced populations
    d = Decomposition(9, ((0.3, 0.1), (0.5, 0.6), (0.2, 0.95)))
    direct = intensity(d.populations())
    assert abs(direct - intensity_from_decomposition(9, d)) <= 1e-8


def test_population_vector_validation():
    with pytest.raises(ValueError):
        PopulationVector.from_array([0.5, 0.6])
    with pytest.raises(ValueError):
        PopulationVector.from_array([1.1, -0.1])
    # round-off negatives clamp and renormalize
    p = PopulationVector.from_array([1.0 + 1e-13, -1e-13])
    assert p.p[1] == 0.0


def test_dicke_populations_range():
    with pytest.raises(ValueError):
        dicke_populations(3, 4)
