import numpy as np
import pytest

from twocentre.model import derive_reduced_masses, DomainError, SingularityError
from twocentre.coords import (rot1, rot3, KCoordinates, PlanarKCoordinates,
                              k_to_cartesian, planar_k_to_cartesian,
                              planar_perihelion_direction, planar_delaunay,
                              elliptic_from_positions, elliptic_from_state,
                              delaunay_v0, elliptic_momenta_from_delaunay,
                              elliptic_momenta_to_R_Msq)

MASSES = derive_reduced_masses(1.0, 1e-3, 1e-4)
RNG = np.random.default_rng(17)


def random_planar_k(rng, sigma=1):
    return PlanarKCoordinates(
        C=2.0 + rng.uniform(0, 1), G=0.4 + rng.uniform(0, 0.5), Lambda=1.0,
        R_prime=rng.uniform(-0.3, 0.3), zeta=rng.uniform(0, 2 * np.pi),
        g_node=rng.uniform(0, 2 * np.pi), g_peri=rng.uniform(0, 2 * np.pi),
        ell=rng.uniform(0, 2 * np.pi), r_prime=0.8 + rng.uniform(0, 1.0),
        sigma=sigma)


def random_spatial_k(rng):
    C = 2.0 + rng.uniform(0, 1)
    G = 0.5 + rng.uniform(0, 0.4)
    return KCoordinates(
        Z=rng.uniform(-0.9, 0.9) * C, C=C, Theta=rng.uniform(-0.4, 0.4), G=G,
        Lambda=1.0, R_prime=rng.uniform(-0.3, 0.3),
        zeta=rng.uniform(0, 2 * np.pi), g_node=rng.uniform(0, 2 * np.pi),
        theta_angle=rng.uniform(0, 2 * np.pi), g_peri=rng.uniform(0, 2 * np.pi),
        ell=rng.uniform(0, 2 * np.pi), r_prime=0.8 + rng.uniform(0, 1.0))


# ---------------- rotations ----------------

def test_rot3_identity():
    assert np.allclose(rot3(0.0), np.eye(3))


def test_rot1_quarter_turn():
    assert np.allclose(rot1(np.pi / 2) @ [0, 1, 0], [0, 0, 1], atol=1e-15)


def test_rotations_orthogonal():
    for a in RNG.uniform(0, 2 * np.pi, 20):
        for R in (rot1(a), rot3(a)):
            assert np.allclose(R.T @ R, np.eye(3), atol=1e-15)
            assert np.linalg.det(R) == pytest.approx(1.0, abs=1e-14)


# ---------------- K charts ----------------

def test_k_momentum_reconstruction():
    for _ in range(50):
        k = random_spatial_k(RNG)
        s = k_to_cartesian(k, MASSES)
        Mv = np.cross(s.x, s.y)
        Cv = Mv + np.cross(s.x_prime, s.y_prime)
        assert np.linalg.norm(Mv) == pytest.approx(k.G, abs=1e-10)
        assert np.linalg.norm(Cv) == pytest.approx(k.C, abs=1e-10)
        assert np.linalg.norm(s.x_prime) == pytest.approx(k.r_prime, abs=1e-14)


def test_k_domain_errors():
    k = random_spatial_k(RNG)
    k.Theta = 2.0 * k.G
    with pytest.raises(DomainError):
        k_to_cartesian(k, MASSES)


def test_k_planar_specialization_matches_planar_map():
    for sigma, theta in ((1, np.pi), (-1, 0.0)):
        for _ in range(20):
            pk = random_planar_k(RNG, sigma=sigma)
            k = KCoordinates(Z=pk.C, C=pk.C, Theta=0.0, G=pk.G, Lambda=pk.Lambda,
                             R_prime=pk.R_prime, zeta=pk.zeta, g_node=pk.g_node,
                             theta_angle=theta, g_peri=pk.g_peri, ell=pk.ell,
                             r_prime=pk.r_prime)
            s_full = k_to_cartesian(k, MASSES)
            s_pl = planar_k_to_cartesian(pk, MASSES)
            for attr in ("x", "y", "x_prime", "y_prime"):
                assert np.allclose(getattr(s_full, attr), getattr(s_pl, attr),
                                   atol=1e-12), attr


def test_planar_perihelion_convex_angle():
    # x' and the perihelion direction P form the convex angle |pi - gbar|
    for _ in range(100):
        pk = random_planar_k(RNG)
        pk.g_peri = RNG.uniform(0.05, np.pi - 0.05)
        s = planar_k_to_cartesian(pk, MASSES)
        P = planar_perihelion_direction(pk)
        cosang = np.dot(-s.x_prime / pk.r_prime, -P)
        ang = np.arccos(np.clip(np.dot(s.x_prime, P)
                                / pk.r_prime, -1, 1))
        assert ang == pytest.approx(abs(np.pi - pk.g_peri), abs=1e-10)


def test_planar_perihelion_at_ell_zero():
    pk = random_planar_k(RNG)
    pk.ell = 0.0
    s = planar_k_to_cartesian(pk, MASSES)
    P = planar_perihelion_direction(pk)
    assert np.allclose(s.x / np.linalg.norm(s.x), P, atol=1e-12)


def test_sigma_changes_only_y_prime_term():
    pk = random_planar_k(RNG, sigma=1)
    pk2 = random_planar_k(RNG, sigma=1)
    pk2.__dict__.update(pk.__dict__)
    pk2.sigma = -1
    s1 = planar_k_to_cartesian(pk, MASSES)
    s2 = planar_k_to_cartesian(pk2, MASSES)
    diff = s1.y_prime - s2.y_prime
    u_i = (rot3(pk.zeta) @ rot3(pk.g_node))[:, 0]
    assert np.allclose(diff, -(2.0 * pk.G / pk.r_prime) * u_i, atol=1e-12)


# ---------------- symplecticity oracles ----------------

def fd_jacobian(fun, z0, h=1e-6):
    z0 = np.asarray(z0, dtype=float)
    cols = []
    for i in range(len(z0)):
        zp, zm = z0.copy(), z0.copy()
        zp[i] += h
        zm[i] -= h
        cols.append((np.asarray(fun(zp)) - np.asarray(fun(zm))) / (2 * h))
    return np.array(cols).T


def omega_matrix(npairs):
    O = np.zeros((2 * npairs, 2 * npairs))
    O[:npairs, npairs:] = np.eye(npairs)
    O[npairs:, :npairs] = -np.eye(npairs)
    return O


def test_planar_delaunay_symplectic():
    Om = omega_matrix(2)
    worst = 0.0
    for _ in range(50):
        L = RNG.uniform(0.7, 1.5)
        G = RNG.uniform(0.3, 0.95) * L
        ell = RNG.uniform(0.3, 5.9)
        g = RNG.uniform(0, 2 * np.pi)

        def chart(z):
            R, Phi, r, phi = planar_delaunay(z[0], z[1], z[2], z[3], MASSES)
            return [R, Phi, r, phi]

        J = fd_jacobian(chart, [L, G, ell, g])
        worst = max(worst, np.abs(J.T @ Om @ J - Om).max())
    assert worst < 1e-6


def test_planar_delaunay_values():
    # circular: R = 0, r = a, phi = ell + g - pi/2
    L, g = 1.0, 0.3
    R, Phi, r, phi = planar_delaunay(L, L, 0.7, g, MASSES)
    a = L * L / (MASSES.m ** 2 * MASSES.M)
    assert R == pytest.approx(0.0, abs=1e-15)
    assert r == pytest.approx(a, abs=1e-14)
    assert phi == pytest.approx(0.7 + g - np.pi / 2, abs=1e-12)
    # aphelion: xi = pi -> R = 0, r = a(1 + e)
    el = 0.8
    L, G = 1.0, 0.8
    e = 0.6
    R, _, r, _ = planar_delaunay(L, G, np.pi, 0.0, MASSES)
    assert R == pytest.approx(0.0, abs=1e-13)
    assert r == pytest.approx(a * 1.6, abs=1e-12)


def test_planar_k_symplectic():
    Om = omega_matrix(4)
    worst = 0.0
    for _ in range(50):
        pk = random_planar_k(RNG)

        def chart(z):
            q = PlanarKCoordinates(C=z[0], G=z[1], Lambda=z[2], R_prime=z[3],
                                   zeta=0.0, g_node=z[4], g_peri=z[5],
                                   ell=z[6], r_prime=z[7], sigma=1)
            s = planar_k_to_cartesian(q, MASSES)
            return [s.y_prime[0], s.y_prime[1], s.y[0], s.y[1],
                    s.x_prime[0], s.x_prime[1], s.x[0], s.x[1]]

        z0 = [pk.C, pk.G, pk.Lambda, pk.R_prime, pk.g_node, pk.g_peri,
              pk.ell, pk.r_prime]
        J = fd_jacobian(chart, z0)
        worst = max(worst, np.abs(J.T @ Om @ J - Om).max())
    assert worst < 1e-6


def test_spatial_k_symplectic():
    Om = omega_matrix(6)
    worst = 0.0
    for _ in range(12):
        k = random_spatial_k(RNG)

        def chart(z):
            q = KCoordinates(Z=z[0], C=z[1], Theta=z[2], G=z[3], Lambda=z[4],
                             R_prime=z[5], zeta=z[6], g_node=z[7],
                             theta_angle=z[8], g_peri=z[9], ell=z[10],
                             r_prime=z[11])
            s = k_to_cartesian(q, MASSES)
            return list(np.concatenate([s.y_prime, s.y, s.x_prime, s.x]))

        z0 = [k.Z, k.C, k.Theta, k.G, k.Lambda, k.R_prime, k.zeta, k.g_node,
              k.theta_angle, k.g_peri, k.ell, k.r_prime]
        J = fd_jacobian(chart, z0)
        # 12 -> 12 map: canonical pairs (Z,zeta),(C,g),(Theta,theta),(G,gbar),
        # (Lambda,ell),(R',r') against ((y',y),(x',x))
        worst = max(worst, np.abs(J.T @ omega_matrix(6) @ J - Om).max())
    assert worst < 1e-5


# ---------------- elliptic / Delaunay-v0 ----------------

def test_elliptic_positions_basics():
    v0 = np.array([0.0, 0.0, 0.5])
    ec = elliptic_from_positions([0.3, 0.2, 0.0], v0)
    assert ec.beta == pytest.approx(0.0, abs=1e-15)       # midplane
    ec2 = elliptic_from_positions([0.0, 0.0, 1.0], v0)    # collinear v = 2 v0
    assert ec2.lam == pytest.approx(2.0, abs=1e-14)
    assert ec2.beta == pytest.approx(1.0, abs=1e-14)


def test_elliptic_radius_identity():
    for _ in range(100):
        v0 = RNG.normal(size=3)
        v = RNG.normal(size=3) * 1.4
        if min(np.linalg.norm(v - v0), np.linalg.norm(v + v0)) < 1e-3:
            continue
        ec = elliptic_from_positions(v, v0)
        r0 = np.linalg.norm(v0)
        lhs = ec.lam ** 2 + ec.beta ** 2 - 1.0
        assert lhs == pytest.approx(np.dot(v, v) / r0 ** 2, rel=1e-10)


def test_elliptic_singularity():
    v0 = np.array([0.0, 0.0, 0.5])
    with pytest.raises(SingularityError):
        elliptic_from_positions(v0, v0)


def test_delaunay_v0_radius_and_planar_theta():
    v0 = np.array([0.0, 0.0, 1.2])
    for _ in range(20):
        v = RNG.normal(size=3)
        u = RNG.normal(size=3)
        dv = delaunay_v0(u, v, v0)
        assert dv.r == pytest.approx(np.linalg.norm(v), rel=1e-14)
    # near-planar motion orthogonal to v0: |Theta| -> M as the tilt vanishes
    tilt = 1e-5
    v = np.array([1.0, 0.3, 0.0])
    u = np.array([-0.2, 0.8, tilt])
    dv = delaunay_v0(u, v, v0)
    assert abs(dv.Theta) == pytest.approx(dv.M_norm, rel=1e-9)
    # exactly aligned momenta degenerate the node: typed error
    with pytest.raises(DomainError):
        delaunay_v0(np.array([-0.2, 0.8, 0.0]), v, v0)


def test_delaunay_v0_one_form():
    # Theta dtheta + M dm + R dr reproduces u . dv along random curves
    v0 = np.array([0.2, -0.4, 1.0])
    for _ in range(25):
        A, B = RNG.normal(size=3), RNG.normal(size=3) * 0.3
        Au, Bu = RNG.normal(size=3), RNG.normal(size=3) * 0.3

        def curve(s):
            return Au + Bu * np.sin(s), A + B * s  # (u(s), v(s))

        s0, h = 0.4, 1e-6
        u, v = curve(s0)
        dvp = delaunay_v0(*curve(s0 + h), v0)
        dvm = delaunay_v0(*curve(s0 - h), v0)
        lhs = (np.dot(u, (curve(s0 + h)[1] - curve(s0 - h)[1]) / (2 * h)))
        rhs = (dvp.Theta - dvm.Theta) * 0.0  # Theta is momentum, not angle
        dv = delaunay_v0(u, v, v0)
        ang = lambda a, b: np.mod(a - b + np.pi, 2 * np.pi) - np.pi
        rhs = (dv.Theta * ang(dvp.theta_angle, dvm.theta_angle)
               + dv.M_norm * ang(dvp.m_angle, dvm.m_angle)
               + dv.R * (dvp.r - dvm.r)) / (2 * h)
        assert rhs == pytest.approx(lhs, rel=2e-6, abs=2e-6)


def test_elliptic_momenta_roundtrip():
    # forward generating-function momenta against the (R, M^2) inversion
    for _ in range(60):
        v0 = RNG.normal(size=3)
        r0 = np.linalg.norm(v0)
        v = RNG.normal(size=3) * 1.5
        u = RNG.normal(size=3)
        try:
            dv = delaunay_v0(u, v, v0)
            ec = elliptic_from_positions(v, v0)
            pl, pb = elliptic_momenta_from_delaunay(dv.R, dv.M_norm, dv.Theta,
                                                    ec.lam, ec.beta, r0=r0)
        except DomainError:
            continue
        R2, Msq2 = elliptic_momenta_to_R_Msq(pl, pb, dv.Theta, ec.lam, ec.beta,
                                             r0=r0)
        assert R2 == pytest.approx(dv.R, abs=1e-10)
        assert Msq2 == pytest.approx(dv.M_norm ** 2, abs=1e-10)


def test_elliptic_momenta_theta_only():
    lam, beta, Theta = 1.7, 0.4, 0.9
    R, Msq = elliptic_momenta_to_R_Msq(0.0, 0.0, Theta, lam, beta)
    assert R == 0.0
    expect = Theta ** 2 * (lam ** 2 + beta ** 2 - 1) / ((1 - beta ** 2) * (lam ** 2 - 1))
    assert Msq == pytest.approx(expect, rel=1e-14)


def test_elliptic_momenta_zero():
    R, Msq = elliptic_momenta_to_R_Msq(0.0, 0.0, 0.0, 1.5, 0.3)
    assert R == 0.0 and Msq == 0.0


def test_elliptic_degenerate_rejected():
    with pytest.raises(SingularityError):
        elliptic_momenta_to_R_Msq(0.1, 0.1, 0.0, 1.0, 0.3)
