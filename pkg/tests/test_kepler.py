import numpy as np
import pytest

from twocentre.model import derive_reduced_masses, DomainError, HyperbolicError
from twocentre.kepler import (solve_kepler, anomalies_from_mean,
                              elements_from_cartesian, state_from_elements)

MASSES = derive_reduced_masses(1.0, 1e-3, 1e-4)


def bisect_kepler(e, ell, tol=1e-15):
    """Independent bracketing oracle on [ell - e, ell + e]."""
    lo, hi = ell - e, ell + e
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid - e * np.sin(mid) - ell > 0:
            hi = mid
        else:
            lo = mid
        if hi - lo < tol:
            break
    return 0.5 * (lo + hi)


def test_solve_kepler_circular():
    assert solve_kepler(0.0, 1.2345) == 1.2345


def test_solve_kepler_symmetry_at_pi():
    assert solve_kepler(0.3, np.pi) == pytest.approx(np.pi, abs=1e-13)


def test_solve_kepler_against_bisection_oracle():
    xi = solve_kepler(0.5, 1.0)
    assert abs(xi - 0.5 * np.sin(xi) - 1.0) < 1e-13
    assert xi == pytest.approx(bisect_kepler(0.5, 1.0), abs=1e-12)


def test_solve_kepler_grid_residuals():
    es = np.linspace(0.0, 0.99, 34)
    ells = np.linspace(-np.pi, 3 * np.pi, 30)
    worst = max(abs(solve_kepler(e, l) - e * np.sin(solve_kepler(e, l)) - l)
                for e in es for l in ells)
    assert worst < 1e-13


def test_solve_kepler_domain():
    with pytest.raises(DomainError):
        solve_kepler(1.0, 0.3)


def test_anomalies_circular():
    el = anomalies_from_mean(1.0, 1.0, 0.7, MASSES)
    assert el.e == 0.0
    assert el.nu == pytest.approx(0.7) and el.xi == pytest.approx(0.7)
    assert el.varrho == pytest.approx(1.0)


def test_anomalies_perihelion_value():
    # e = sqrt(1 - 0.64) = 0.6 and varrho(xi=0) = 1 - e
    el = anomalies_from_mean(1.0, 0.8, 0.0, MASSES)
    assert el.e == pytest.approx(0.6, abs=1e-15)
    assert el.xi == 0.0 and el.nu == 0.0
    assert el.varrho == pytest.approx(0.4, abs=1e-15)


def test_anomalies_identity_cross_check():
    rng = np.random.default_rng(3)
    for _ in range(100):
        L = rng.uniform(0.5, 2.0)
        G = rng.uniform(0.1, 1.0) * L
        el = anomalies_from_mean(L, G, rng.uniform(0, 2 * np.pi), MASSES)
        lhs = (1.0 - el.e ** 2) / (1.0 + el.e * np.cos(el.nu))
        assert lhs == pytest.approx(1.0 - el.e * np.cos(el.xi), abs=1e-12)


def test_anomalies_domain():
    with pytest.raises(DomainError):
        anomalies_from_mean(1.0, 1.1, 0.0, MASSES)


def test_elements_roundtrip():
    rng = np.random.default_rng(4)
    for _ in range(60):
        L = rng.uniform(0.5, 1.5)
        G = rng.uniform(0.2, 0.999) * L
        ell = rng.uniform(0, 2 * np.pi)
        g = rng.uniform(0, 2 * np.pi)
        el = anomalies_from_mean(L, G, ell, MASSES)
        el.g_peri = g
        y, x = state_from_elements(el, MASSES)
        el2, P, Mhat = elements_from_cartesian(y, x, MASSES)
        assert el2.Lambda == pytest.approx(L, abs=1e-10)
        assert el2.G == pytest.approx(G, abs=1e-10)
        assert np.mod(el2.g_peri - g + np.pi, 2 * np.pi) - np.pi == pytest.approx(0.0, abs=1e-9)
        assert np.mod(el2.ell - el.ell + np.pi, 2 * np.pi) - np.pi == pytest.approx(0.0, abs=1e-9)


def test_radial_identity_along_ellipse():
    el0 = anomalies_from_mean(1.0, 0.7, 0.0, MASSES)
    for xi in np.linspace(0, 2 * np.pi, 100):
        el = anomalies_from_mean(1.0, 0.7, xi - el0.e * np.sin(xi), MASSES)
        el.g_peri = 1.1
        _, x = state_from_elements(el, MASSES)
        assert np.linalg.norm(x) == pytest.approx(el.a * el.varrho, abs=1e-12)


def test_circular_state_elements():
    # circular orbit: |y|^2 = m^2 M / |x| with y perpendicular to x
    m, M = MASSES.m, MASSES.M
    a = 0.8
    x = np.array([a, 0.0, 0.0])
    y = m * np.sqrt(M / a) * np.array([0.0, 1.0, 0.0])
    el, P, _ = elements_from_cartesian(y, x, MASSES, circular_safe=True)
    assert el.e < 1e-12
    assert el.a == pytest.approx(a, abs=1e-12)
    assert el.circular_degenerate


def test_hyperbolic_rejected():
    with pytest.raises(HyperbolicError):
        elements_from_cartesian([3.0, 0.0, 0.0], [1.0, 0.0, 0.0], MASSES)


def test_perihelion_geometry():
    el = anomalies_from_mean(1.0, 0.8, 0.0, MASSES)
    el.g_peri = np.pi / 2
    _, x = state_from_elements(el, MASSES)
    # xi = 0, g = pi/2: x is along the first axis with length a(1 - e)
    assert x[1] == pytest.approx(0.0, abs=1e-15)
    assert np.linalg.norm(x) == pytest.approx(el.a * (1 - el.e), abs=1e-13)
