import itertools
import math

import numpy as np
import pytest
from scipy.stats import qmc

from twocenter.errors import NonPositiveShiftedEnergy, SingularPoint, UnrealizableGeometry
from twocenter.models import PhysicalConfig, QuantumNumbers, SpheroidalPoint
from twocenter.services.params import (
    cartesian_potential,
    potential_terms,
    potential_value,
    printed_potential_terms,
    scale_parameters,
    to_spheroidal,
)


def test_scale_parameters_p_and_h():
    config = PhysicalConfig(Z=1.0, omega=0.3, R=4.0)
    sp = scale_parameters(config, config.floor + 2.0)
    assert sp.p == pytest.approx(4.0, rel=1e-14)
    assert sp.h == pytest.approx(8.0, rel=1e-14)


def test_scale_parameters_gamma():
    config = PhysicalConfig(Z=1.0, omega=2.0, R=1.0)
    assert scale_parameters(config, config.floor + 1.0).gamma == pytest.approx(0.5, rel=1e-14)


def test_scale_parameters_alpha_vanishes_without_charge():
    config = PhysicalConfig(Z=0.0, omega=1.0, R=3.0)
    assert scale_parameters(config, config.floor + 0.7).alpha == 0.0


def test_confinement_coefficients():
    config = PhysicalConfig(Z=1.0, omega=0.8, R=3.5)
    sp = scale_parameters(config, config.floor + 1.3)
    assert sp.h ** 4 * sp.gamma == pytest.approx(2.0 * sp.gamma_prime, rel=1e-13)
    assert sp.h ** 4 * sp.gamma_ode == pytest.approx(sp.gamma_prime, rel=1e-13)


@pytest.mark.parametrize("shift", [0.0, -1e-3, -5.0])
def test_scale_parameters_rejects_energy_at_or_below_floor(shift):
    config = PhysicalConfig(Z=1.0, omega=0.25, R=5.0)
    with pytest.raises(NonPositiveShiftedEnergy):
        scale_parameters(config, config.floor + shift)


@pytest.mark.parametrize(
    "r1,r2,R,xi,eta",
    [
        (2.0, 2.0, 2.0, 2.0, 0.0),
        (2.0, 0.0, 2.0, 1.0, 1.0),
        (3.0, 1.0, 2.0, 2.0, 1.0),
    ],
)
def test_to_spheroidal_examples(r1, r2, R, xi, eta):
    pt = to_spheroidal(r1, r2, R)
    assert pt.xi == pytest.approx(xi, abs=1e-15)
    assert pt.eta == pytest.approx(eta, abs=1e-15)


def test_to_spheroidal_round_trip():
    R = 3.0
    sample = qmc.scale(qmc.Halton(d=2, seed=7).random(10_000), [1.001, -0.9], [50.0, 0.9])
    for xi, eta in sample:
        r1, r2 = 0.5 * R * (xi + eta), 0.5 * R * (xi - eta)
        pt = to_spheroidal(r1, r2, R)
        assert pt.r1(R) == pytest.approx(r1, rel=1e-12)
        assert pt.r2(R) == pytest.approx(r2, rel=1e-12)


def test_quantum_number_derived_values():
    for n, q, m in itertools.product(range(11), repeat=3):
        qn = QuantumNumbers(n=n, q=q, m=m)
        assert qn.k == q + (m + 1) / 2
        assert qn.s == pytest.approx(4 * n + math.sqrt(m * m + 3) + 2, rel=1e-15)
        assert qn.tau == (1 - m * m) / 4
        assert qn.N == 2 * n + q + m


@pytest.mark.parametrize("r1,r2,R", [(1.0, 1.0, 3.0), (5.0, 1.0, 2.0), (-1.0, 1.0, 1.0)])
def test_to_spheroidal_rejects_impossible_triangles(r1, r2, R):
    with pytest.raises(UnrealizableGeometry):
        to_spheroidal(r1, r2, R)


def test_potential_without_charge_is_pure_oscillator():
    config = PhysicalConfig(Z=0.0, omega=0.9, R=2.5)
    pt = SpheroidalPoint(xi=1.7, eta=-0.3)
    r1, r2 = pt.r1(config.R), pt.r2(config.R)
    assert potential_value(pt, config) == pytest.approx(0.81 * (r1 ** 2 + r2 ** 2), rel=1e-13)


def test_potential_midplane_coulomb():
    config = PhysicalConfig.coulomb(Z=1.0, R=1.0)
    assert potential_value(SpheroidalPoint(xi=2.0, eta=0.0), config) == pytest.approx(-2.0, rel=1e-14)


def test_spheroidal_potential_matches_cartesian_form():
    config = PhysicalConfig(Z=1.3, omega=0.7, R=2.3)
    rng = np.random.default_rng(11)
    for _ in range(500):
        pt = SpheroidalPoint(xi=1.0 + rng.uniform(1e-3, 6.0), eta=rng.uniform(-0.999, 0.999))
        expected = cartesian_potential(pt.r1(config.R), pt.r2(config.R), config)
        assert potential_value(pt, config) == pytest.approx(expected, rel=1e-11, abs=1e-11)


def test_printed_terms_do_not_reproduce_the_potential():
    config = PhysicalConfig(Z=1.0, omega=0.7, R=2.0)
    pt = SpheroidalPoint(xi=1.5, eta=0.4)
    a, b = printed_potential_terms(pt, config)
    printed = -(2.0 / config.R ** 2) * (a + b) / (pt.xi ** 2 - pt.eta ** 2) + config.floor
    expected = cartesian_potential(pt.r1(config.R), pt.r2(config.R), config)
    assert not math.isclose(printed, expected, rel_tol=1e-6)
    assert potential_terms(pt, config) != (a, b)


def test_potential_on_a_center_is_singular():
    config = PhysicalConfig(Z=1.0, omega=0.5, R=2.0)
    with pytest.raises(SingularPoint):
        potential_value(SpheroidalPoint(xi=1.0, eta=1.0), config)


def test_cartesian_potential_on_a_center_is_singular():
    with pytest.raises(SingularPoint):
        cartesian_potential(0.0, 2.0, PhysicalConfig(Z=1.0, omega=0.5, R=2.0))
