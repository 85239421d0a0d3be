import numpy as np
import pytest

from twocentre.model import derive_reduced_masses, CartesianState, SingularityError
from twocentre.coords import (PlanarKCoordinates, KCoordinates,
                              planar_k_to_cartesian, k_to_cartesian,
                              elliptic_from_state)
from twocentre.integrals import (kepler_energy, two_centre_energy,
                                 euler_integral_cartesian, euler_integral_k,
                                 euler_integral_planar_k, euler_decomposition,
                                 full_hamiltonian, truncated_hamiltonian,
                                 planar_hamiltonian_k, two_centre_energy_k,
                                 elliptic_euler_integral, elliptic_F_terms,
                                 elliptic_hamiltonian,
                                 euler_integral_two_fixed_centres,
                                 two_fixed_centres_hamiltonian, integral_values,
                                 planar_e0)

MASSES = derive_reduced_masses(1.0, 1e-3, 1e-4)
RNG = np.random.default_rng(23)


def random_planar_k(rng, **kw):
    pk = PlanarKCoordinates(
        C=2.0 + rng.uniform(0, 1), G=0.4 + rng.uniform(0, 0.5), Lambda=1.0,
        R_prime=rng.uniform(-0.3, 0.3), zeta=rng.uniform(0, 2 * np.pi),
        g_node=rng.uniform(0, 2 * np.pi), g_peri=rng.uniform(0, 2 * np.pi),
        ell=rng.uniform(0, 2 * np.pi), r_prime=0.8 + rng.uniform(0, 1.0),
        sigma=1)
    pk.__dict__.update(kw)
    return pk


def test_kepler_energy_values():
    m, M = MASSES.m, MASSES.M
    a = 0.8
    x = [a, 0.0, 0.0]
    y = m * np.sqrt(M / a) * np.array([0.0, 1.0, 0.0])
    assert kepler_energy(y, x, MASSES) == pytest.approx(-m * M / (2 * a), rel=1e-14)
    assert kepler_energy([0, 0, 0], x, MASSES) == pytest.approx(-m * M / a, rel=1e-14)
    # in elements: J0 = -m^3 M^2 / (2 Lambda^2)
    pk = random_planar_k(RNG)
    s = planar_k_to_cartesian(pk, MASSES)
    assert kepler_energy(s.y, s.x, MASSES) == pytest.approx(
        -(m ** 3) * M ** 2 / (2 * pk.Lambda ** 2), abs=1e-12)


def test_two_centre_energy_mu_zero_and_bound():
    m0 = derive_reduced_masses(1.0, 0.0, 0.0)
    y, x, xp = [0.1, 0.4, 0], [1.0, 0.2, 0], [3.0, 0, 0]
    assert two_centre_energy(y, x, xp, m0) == kepler_energy(y, x, m0)
    far = two_centre_energy(y, x, [1e8, 0, 0], MASSES)
    assert abs(far - kepler_energy(y, x, MASSES)) < 1e-7


def test_euler_integral_mu_zero_reduction():
    m0 = derive_reduced_masses(1.0, 0.0, 0.0)
    y, x, xp = np.array([0.1, 0.4, 0.0]), np.array([1.0, 0.2, 0.0]), np.array([3.0, 0.1, 0.0])
    Mv = np.cross(x, y)
    Lv = np.cross(y, Mv) - m0.m ** 2 * m0.M * x / np.linalg.norm(x)
    expect = np.dot(Mv, Mv) - np.dot(xp, Lv)
    assert euler_integral_cartesian(y, x, xp, m0) == pytest.approx(expect, rel=1e-14)


def test_euler_integral_perpendicular_case():
    # planar, gbar = pi/2 at mu = 0: E0 = G^2
    m0 = derive_reduced_masses(1.0, 0.0, 0.0)
    assert euler_integral_k(1.0, 0.8, 0.0, 1.3, 0.7, np.pi / 2, m0) == \
        pytest.approx(0.64, abs=1e-14)
    assert planar_e0(1.0, 0.8, np.pi / 2, 1.3, m0) == pytest.approx(0.64, abs=1e-14)


def test_chart_consistency_planar():
    worst = 0.0
    for _ in range(100):
        pk = random_planar_k(RNG)
        s = planar_k_to_cartesian(pk, MASSES)
        Ec = euler_integral_cartesian(s.y, s.x, s.x_prime, MASSES)
        Ek = euler_integral_planar_k(pk, MASSES)
        Jc = two_centre_energy(s.y, s.x, s.x_prime, MASSES)
        Jk = two_centre_energy_k(pk.Lambda, pk.G, 0.0, pk.r_prime, pk.ell,
                                 pk.g_peri, MASSES)
        Hc = full_hamiltonian(s, MASSES)
        Hk = planar_hamiltonian_k(pk, MASSES)
        worst = max(worst, abs(Ec - Ek), abs(Jc - Jk), abs(Hc - Hk))
    assert worst < 1e-10


def test_chart_consistency_spatial():
    worst = 0.0
    for _ in range(100):
        C = 2.0 + RNG.uniform(0, 1)
        G = 0.5 + RNG.uniform(0, 0.4)
        k = KCoordinates(Z=RNG.uniform(-0.9, 0.9) * C, C=C,
                         Theta=RNG.uniform(-0.4, 0.4), G=G, Lambda=1.0,
                         R_prime=RNG.uniform(-0.3, 0.3),
                         zeta=RNG.uniform(0, 2 * np.pi),
                         g_node=RNG.uniform(0, 2 * np.pi),
                         theta_angle=RNG.uniform(0, 2 * np.pi),
                         g_peri=RNG.uniform(0, 2 * np.pi),
                         ell=RNG.uniform(0, 2 * np.pi),
                         r_prime=0.8 + RNG.uniform(0, 1.0))
        s = k_to_cartesian(k, MASSES)
        Ec = euler_integral_cartesian(s.y, s.x, s.x_prime, MASSES)
        Ek = euler_integral_k(k.Lambda, k.G, k.Theta, k.r_prime, k.ell,
                              k.g_peri, MASSES)
        worst = max(worst, abs(Ec - Ek))
    assert worst < 1e-10


def test_planar_vs_spatial_k_formula_on_grid():
    # Theta = 0 in the spatial chart formula reproduces the planar display
    for L in (0.8, 1.0, 1.2):
        for G_f in (0.4, 0.7, 0.95):
            for g in np.linspace(0, 2 * np.pi, 7):
                E_sp = euler_integral_k(L, G_f * L, 0.0, 1.1, 0.9, g, MASSES)
                pk = random_planar_k(RNG, Lambda=L, G=G_f * L, g_peri=g,
                                     ell=0.9, r_prime=1.1)
                assert euler_integral_planar_k(pk, MASSES) == pytest.approx(E_sp, abs=1e-14)


def test_full_hamiltonian_groups():
    s = planar_k_to_cartesian(random_planar_k(RNG), MASSES)
    eps0 = derive_reduced_masses(1.0, 1e-3, 0.0)
    assert full_hamiltonian(s, eps0) == pytest.approx(
        -eps0.m_prime * eps0.M_prime / np.linalg.norm(s.x_prime), rel=1e-14)
    # H - H0 equals the eps^2 group exactly
    diff = full_hamiltonian(s, MASSES) - truncated_hamiltonian(s, MASSES)
    expect = MASSES.eps ** 2 * (np.dot(s.y_prime, s.y_prime) / (2 * MASSES.m_prime)
                                + MASSES.mu / MASSES.m0 * np.dot(s.y_prime, s.y))
    assert diff == pytest.approx(expect, rel=1e-12)


def test_euler_decomposition():
    worst = 0.0
    for _ in range(100):
        pk = random_planar_k(RNG)
        s = planar_k_to_cartesian(pk, MASSES)
        E0, E1, E2 = euler_decomposition(s.y, s.x, s.x_prime, MASSES)
        # E1 bound (Cauchy-Schwarz)
        assert abs(E1) <= MASSES.m ** 2 * MASSES.M * np.linalg.norm(s.x_prime) * (1 + 1e-12)
        # reconstruction against the two-fixed-centre chain
        mhat = MASSES.m
        v0 = s.x_prime / 2.0
        v = s.x - v0
        u = s.y / mhat
        Ebar = euler_integral_two_fixed_centres(u, v, v0, MASSES.M,
                                                MASSES.mu * MASSES.M)
        worst = max(worst, abs(mhat * Ebar - (E0 + MASSES.mu * E1 + E2)))
        # renamed convention
        E = euler_integral_cartesian(s.y, s.x, s.x_prime, MASSES)
        assert E == pytest.approx(E0 + MASSES.mu * E1, rel=1e-12)
    assert worst < 1e-10


def test_elliptic_euler_integral_zero_momenta():
    from twocentre.coords import EllipticCoordinates
    ec = EllipticCoordinates(lam=1.6, beta=0.3, omega=0.0, r0=1.0)
    m = 0.7
    h = -0.2
    val = elliptic_euler_integral(ec, m, m, h)
    assert val == pytest.approx(2 * m * ec.lam + ec.r0 ** 2 *
                                (ec.lam ** 2 + ec.beta ** 2) * h, rel=1e-14)


def test_elliptic_chart_oracle():
    # (Es) equals (G1) through the chart; offset measured and ~0, stable
    offs = []
    for _ in range(100):
        v0 = RNG.normal(size=3)
        v = RNG.normal(size=3) * 1.5
        u = RNG.normal(size=3) * 0.8
        mp_, mm_ = 1.0, 0.31
        try:
            ec = elliptic_from_state(u, v, v0)
        except Exception:
            continue
        h = two_fixed_centres_hamiltonian(u, v, v0, mp_, mm_)
        assert elliptic_hamiltonian(ec, mp_, mm_) == pytest.approx(h, abs=1e-12)
        Fl, Fb = elliptic_F_terms(ec, mp_, mm_, h)
        assert abs(Fl + Fb) < 1e-11                     # on-shell separation
        offs.append(elliptic_euler_integral(ec, mp_, mm_, h)
                    - euler_integral_two_fixed_centres(u, v, v0, mp_, mm_))
    offs = np.array(offs)
    assert np.abs(offs).max() < 1e-9                    # offset is zero
    assert np.ptp(offs) < 1e-10                         # and stable across states


def test_integral_values_bundle():
    pk = random_planar_k(RNG)
    s = planar_k_to_cartesian(pk, MASSES)
    iv = integral_values(s, MASSES)
    assert iv.E == pytest.approx(iv.E0 + MASSES.mu * iv.E1, rel=1e-12)
    assert iv.J == pytest.approx(iv.J0 - MASSES.mu * MASSES.m * MASSES.M
                                 / np.linalg.norm(s.x - s.x_prime), rel=1e-12)


def test_singularities():
    with pytest.raises(SingularityError):
        kepler_energy([0, 0, 0], [0, 0, 0], MASSES)
    with pytest.raises(SingularityError):
        two_centre_energy([0, 1, 0], [1, 0, 0], [1, 0, 0], MASSES)
