import numpy as np
import pytest

from twocentre.model import (MassModel, CartesianState, ChartBox,
                             derive_reduced_masses, validate_state,
                             DomainError, SingularityError)


def test_reduced_masses_limit_case():
    mm = derive_reduced_masses(1.0, 0.0, 0.0)
    assert mm.m == 1.0 and mm.M == 1.0
    assert mm.m_prime == 1.0 and mm.M_prime == 1.0


def test_reduced_masses_direct_substitution():
    mm = derive_reduced_masses(1.0, 1e-3, 1e-4)
    assert mm.m_prime == pytest.approx(1.0 / 1.001, rel=0, abs=1e-16)
    assert mm.M_prime == pytest.approx(1.001, rel=0, abs=1e-16)
    assert mm.m == pytest.approx(1.0 / (1.0 + 1e-7), rel=0, abs=1e-16)
    assert mm.M == pytest.approx(1.0 + 1e-7, rel=0, abs=1e-16)


def test_reduced_mass_identities_random():
    rng = np.random.default_rng(11)
    for _ in range(100):
        m0 = rng.uniform(0.1, 10.0)
        mm = derive_reduced_masses(m0, rng.uniform(0, 0.5), rng.uniform(0, 0.5))
        assert mm.m * mm.M == pytest.approx(m0 ** 2, rel=1e-15)
        assert mm.m_prime * mm.M_prime == pytest.approx(m0 ** 2, rel=1e-15)


def test_bad_masses_rejected():
    with pytest.raises(DomainError):
        derive_reduced_masses(0.0, 0.1, 0.1)
    with pytest.raises(DomainError):
        derive_reduced_masses(1.0, -0.1, 0.1)


def test_validate_state_exclusions():
    good = CartesianState.planar([0, 1], [1, 0], [2, 0], [0.5, 0.5])
    validate_state(good)
    with pytest.raises(SingularityError, match="x = x'"):
        validate_state(CartesianState.planar([0, 1], [1, 0], [0.5, 0.5], [0.5, 0.5]))
    with pytest.raises(SingularityError, match="x = 0"):
        validate_state(CartesianState.planar([0, 1], [1, 0], [2, 0], [0, 0]))
    with pytest.raises(SingularityError, match="x' = 0"):
        validate_state(CartesianState.planar([0, 1], [1, 0], [0, 0], [1, 0]))


def test_validate_state_tolerance_configurable():
    s = CartesianState.planar([0, 1], [1, 0], [2, 0], [2 - 1e-8, 0])
    validate_state(s)  # default floor 1e-12
    with pytest.raises(SingularityError):
        validate_state(s, min_separation=1e-6)


def test_planar_state_rejects_third_component():
    with pytest.raises(DomainError):
        CartesianState.planar([0, 1, 0.1], [1, 0], [2, 0], [0.5, 0.5])


def test_chartbox_width_validation():
    with pytest.raises(DomainError):
        ChartBox(r=-0.1)
    ch = ChartBox(I_center=(1.0,), I_width=(0.1,), x_width=0.2, xi=0.05)
    assert ch.x_sup == pytest.approx(0.25)
    sh = ch.shrunk(0.01, 0.01, 0.01, 0.01, 0.01)
    assert sh.r == pytest.approx(ch.r - 0.01)
