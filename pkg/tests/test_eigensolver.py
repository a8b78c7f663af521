import math

import numpy as np
import pytest
from scipy.integrate import trapezoid

from tools.reference import exact_oscillator_energy
from twocenter.errors import ConfigurationError, NoRootInBracket
from twocenter.models import PhysicalConfig, QuantumNumbers, SolverSettings
from twocenter.services.eigensolver import (
    angular_lambda,
    angular_separation,
    energy_curve,
    energy_seed,
    radial_mismatch,
    solve_state,
)
from twocenter.services.ode_engine import count_nodes
from twocenter.services.params import scale_parameters


@pytest.mark.parametrize(
    "n,q,m,E",
    [(0, 0, 0, 5.0), (0, 1, 0, 7.0), (0, 0, 1, 7.0), (1, 0, 0, 9.0)],
)
def test_oscillator_levels(oscillator, solver_settings, n, q, m, E):
    sol = solve_state(QuantumNumbers(n=n, q=q, m=m), oscillator, solver_settings)
    assert sol.E == pytest.approx(E, rel=1e-8)
    assert sol.nodes_radial == n
    assert sol.nodes_angular == q


def test_oscillator_ground_separation_constant(oscillator, ground, solver_settings):
    sol = solve_state(ground, oscillator, solver_settings)
    assert sol.h_lambda == pytest.approx(-oscillator.omega * oscillator.R ** 2, rel=1e-7)
    h = scale_parameters(oscillator, sol.E).h
    assert sol.lambda_ == pytest.approx(sol.h_lambda / h, rel=1e-12)


def test_angular_separation_at_exact_energy(oscillator, ground, solver_settings):
    angular = angular_separation(5.0, ground, oscillator, solver_settings)
    assert angular.h_lambda == pytest.approx(-4.0, rel=1e-8)
    assert angular.nodes == 0
    assert angular.residual < 1e-9


def test_angular_separation_grows_with_node_count(oscillator, solver_settings):
    values = [
        angular_separation(6.0, QuantumNumbers(n=0, q=q, m=0), oscillator, solver_settings).h_lambda
        for q in range(4)
    ]
    assert all(b > a for a, b in zip(values, values[1:]))


def test_angular_separation_below_the_floor(oscillator, ground, solver_settings):
    angular = angular_separation(oscillator.floor - 1.0, ground, oscillator, solver_settings)
    assert math.isfinite(angular.h_lambda)
    assert angular.nodes == 0


def test_radial_mismatch_changes_sign_at_eigenvalue(oscillator, ground, solver_settings):
    def value(E):
        lam = angular_lambda(E, ground, oscillator, solver_settings)
        return radial_mismatch(E, lam, ground, oscillator, solver_settings).value

    assert abs(value(5.0)) < 1e-6
    assert value(4.9) < 0.0 < value(5.1)


def test_wavefunctions_are_normalized(oscillator, solver_settings):
    qn = QuantumNumbers(n=1, q=2, m=0)
    sol = solve_state(qn, oscillator, solver_settings)
    assert trapezoid(sol.u ** 2, sol.xi) == pytest.approx(1.0, rel=1e-10)
    assert trapezoid(sol.v ** 2, sol.eta) == pytest.approx(1.0, rel=1e-10)
    assert count_nodes(sol.v) == 2
    assert count_nodes(sol.u) == 1
    assert np.allclose(sol.v, sol.v[::-1], atol=1e-8)


def test_residuals_are_reported(oscillator, ground, solver_settings):
    sol = solve_state(ground, oscillator, solver_settings)
    assert set(sol.residuals) == {"angular_phase", "radial_phase", "wronskian", "energy"}
    assert sol.residuals["radial_phase"] < 1e-6
    assert 1.0 < sol.xi_match < sol.xi_max


def test_energy_seed_without_charge_is_exact(oscillator, ground):
    assert energy_seed(ground, oscillator) == pytest.approx(5.0, rel=1e-15)


def test_no_root_in_a_distant_bracket(oscillator, ground):
    st = SolverSettings(max_outer_iters=1)
    with pytest.raises(NoRootInBracket):
        solve_state(ground, oscillator, st, e_bracket=(100.0, 101.0))


def test_shooting_needs_confinement(ground):
    with pytest.raises(ConfigurationError):
        solve_state(ground, PhysicalConfig.coulomb(Z=1.0, R=2.0))


def test_energy_curve_without_charge(ground, solver_settings):
    config = PhysicalConfig(Z=0.0, omega=1.0, R=1.0)
    curve = energy_curve(ground, config, [1.0, 1.5, 2.0, 3.0], solver_settings)
    assert [R for R, _, _ in curve] == [1.0, 1.5, 2.0, 3.0]
    for R, sol, message in curve:
        assert message == ""
        assert sol.E == pytest.approx(exact_oscillator_energy(ground, 1.0, R), rel=1e-8)


def test_energy_curve_rejects_unsorted_grid(oscillator, ground):
    with pytest.raises(ConfigurationError):
        energy_curve(ground, oscillator, [2.0, 1.0])


@pytest.mark.parametrize("offset", [1e-6, 1e-7])
def test_endpoint_offset_does_not_move_the_energy(oscillator, ground, solver_settings, offset):
    base = solve_state(ground, oscillator, solver_settings).E
    moved = solve_state(ground, oscillator, SolverSettings(endpoint_offset=offset)).E
    assert abs(moved - base) < 10.0 * solver_settings.match_tol


def test_doubling_the_tail_start_does_not_move_the_energy(oscillator, ground, solver_settings):
    base = solve_state(ground, oscillator, solver_settings)
    # at E = 5 the default depth of 40 puts xi_max^2 at 41.5; 164.5 makes it 166
    deep = solve_state(ground, oscillator, SolverSettings(tail_depth=164.5))
    assert deep.xi_max == pytest.approx(2.0 * base.xi_max, rel=1e-3)
    assert deep.E == pytest.approx(base.E, rel=1e-10)


def _oscillator_states(max_N):
    return [
        QuantumNumbers(n=n, q=q, m=m)
        for n in range(max_N // 2 + 1)
        for q in range(max_N + 1)
        for m in range(max_N + 1)
        if 2 * n + q + m <= max_N
    ]


def test_oscillator_states_up_to_three_quanta():
    states = _oscillator_states(3)
    assert len(states) == 13
    assert {qn.N for qn in states} == {0, 1, 2, 3}


@pytest.mark.slow
@pytest.mark.parametrize("R", [1.0, 2.0, 5.0, 10.0])
def test_oscillator_family(R, solver_settings):
    config = PhysicalConfig(Z=0.0, omega=1.0, R=R)
    for qn in _oscillator_states(3):
        sol = solve_state(qn, config, solver_settings)
        assert sol.E == pytest.approx(exact_oscillator_energy(qn, 1.0, R), rel=1e-8)
        assert (sol.nodes_radial, sol.nodes_angular) == (qn.n, qn.q)


@pytest.mark.slow
@pytest.mark.parametrize("R", [5.0, 10.0, 20.0])
@pytest.mark.parametrize("q", [0, 1])
def test_matching_point_does_not_move_the_energy(confined_ion, solver_settings, R, q):
    config = confined_ion.at(R)
    qn = QuantumNumbers(n=0, q=q, m=0)
    base = solve_state(qn, config, solver_settings).E
    for scale in (0.8, 1.2):
        moved = solve_state(qn, config, SolverSettings(match_scale=scale)).E
        assert abs(moved - base) < 10.0 * solver_settings.match_tol


@pytest.mark.slow
@pytest.mark.parametrize("R", [5.0, 10.0, 20.0])
@pytest.mark.parametrize("q", [0, 1])
def test_integration_tolerance_does_not_move_the_energy(confined_ion, solver_settings, R, q):
    config = confined_ion.at(R)
    qn = QuantumNumbers(n=0, q=q, m=0)
    base = solve_state(qn, config, solver_settings).E
    tight = solve_state(qn, config, SolverSettings(rel_tol=0.1 * solver_settings.rel_tol)).E
    assert abs(tight - base) < 10.0 * solver_settings.match_tol


@pytest.mark.slow
def test_levels_are_ordered_with_charge(confined_ion, solver_settings):
    block = np.array([
        [solve_state(QuantumNumbers(n=n, q=q, m=0), confined_ion, solver_settings).E for q in range(3)]
        for n in range(3)
    ])
    assert np.all(np.diff(block, axis=0) > 0.0)
    assert np.all(np.diff(block, axis=1) > 0.0)
    assert block[0, 0] < confined_ion.floor + 3.0 * confined_ion.omega


@pytest.mark.slow
def test_bound_state_below_the_floor(ground, solver_settings):
    config = PhysicalConfig(Z=2.0, omega=0.25, R=1.0)
    sol = solve_state(ground, config, solver_settings)
    assert sol.E < config.floor
    assert sol.lambda_ is None
    assert math.isfinite(sol.h_lambda)
