"""Canonical coordinate systems: K-chart, planar Delaunay, elliptic, Delaunay-v0."""

from dataclasses import dataclass

import numpy as np

from .model import CartesianState, DomainError, SingularityError
from .kepler import anomalies_from_mean, state_from_elements

NODE_FLOOR = 1e-8

E1 = np.array([1.0, 0.0, 0.0])
E2 = np.array([0.0, 1.0, 0.0])
E3 = np.array([0.0, 0.0, 1.0])


def rot1(alpha):
    """Rotation by alpha about the first axis."""
    c, s = np.cos(alpha), np.sin(alpha)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def rot3(alpha):
    """Rotation by alpha about the third axis."""
    c, s = np.cos(alpha), np.sin(alpha)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def _acos_clipped(u, what):
    if abs(u) > 1.0 + 1e-12:
        raise DomainError(f"inclination cosine {what} = {u} outside [-1, 1]")
    return float(np.arccos(np.clip(u, -1.0, 1.0)))


@dataclass
class KCoordinates:
    """The 12 canonical variables (Z, C, Theta, G, Lambda, R', zeta, g, theta, gbar, ell, r').

    Conjugate pairs: (Z, zeta), (C, g_node), (Theta, theta_angle),
    (G, g_peri), (Lambda, ell), (R_prime, r_prime).
    """

    Z: float
    C: float
    Theta: float
    G: float
    Lambda: float
    R_prime: float
    zeta: float
    g_node: float
    theta_angle: float
    g_peri: float
    ell: float
    r_prime: float

    def validate(self):
        if self.C <= 0 or self.G <= 0:
            raise DomainError("need C > 0 and G > 0")
        if abs(self.Theta) > min(self.C, self.G) or abs(self.Z) > self.C:
            raise DomainError("inclination cosines outside [-1, 1]")
        if self.r_prime <= 0:
            raise DomainError("need r' > 0")
        if not 0 < self.G <= self.Lambda:
            raise DomainError("need 0 < G <= Lambda")


@dataclass
class PlanarKCoordinates:
    """Planar K-chart; sigma = +1 embeds (Theta, theta) = (0, pi), -1 -> (0, 0).

    sigma only changes the (C - sigma G)/r' term of y' (and the in-plane
    component flips that keep the total angular momentum equal to C );
    sigma = +1 covers the prograde-outer configurations.
    """

    C: float
    G: float
    Lambda: float
    R_prime: float
    zeta: float
    g_node: float
    g_peri: float
    ell: float
    r_prime: float
    sigma: int = 1

    def validate(self):
        if self.C <= 0 or self.G <= 0 or self.r_prime <= 0:
            raise DomainError("need C, G, r' > 0")
        if not 0 < self.G <= self.Lambda:
            raise DomainError("need 0 < G <= Lambda")
        if self.sigma not in (+1, -1):
            raise DomainError("sigma must be +1 or -1")


def k_to_cartesian(k, masses):
    """Analytic K -> (y', y, x', x) map via the nested-frame rotations."""
    k.validate()
    i = _acos_clipped(k.Z / k.C, "Z/C")
    i1 = _acos_clipped(k.Theta / k.C, "Theta/C")
    i2 = _acos_clipped(k.Theta / k.G, "Theta/G")
    R01 = rot3(k.zeta) @ rot1(i)
    R02 = R01 @ rot3(k.g_node) @ rot1(i1)
    R03 = R02 @ rot3(k.theta_angle) @ rot1(i2)

    el = anomalies_from_mean(k.Lambda, k.G, k.ell, masses)
    el.g_peri = k.g_peri
    ybar, xbar = state_from_elements(el, masses)
    x = R03 @ xbar
    y = R03 @ ybar
    x_prime = k.r_prime * (R02 @ E3)
    C_vec = k.C * (R01 @ E3)
    M_vec = k.G * (R03 @ E3)
    M_prime = C_vec - M_vec
    y_prime = (k.R_prime / k.r_prime) * x_prime + np.cross(M_prime, x_prime) / k.r_prime ** 2
    return CartesianState(y_prime=y_prime, y=y, x_prime=x_prime, x=x)


def planar_k_to_cartesian(pk, masses):
    """Planar K -> Cartesian; the (Theta, theta) = (0, k*pi) section of the K map."""
    pk.validate()
    el = anomalies_from_mean(pk.Lambda, pk.G, pk.ell, masses)
    el.g_peri = pk.g_peri
    ybar, xbar = state_from_elements(el, masses)
    u = rot3(pk.zeta) @ rot3(pk.g_node)
    # R1(pi/2) R3(theta) R1(pi/2) equals diag(-1,-1,1) for theta=pi and
    # diag(1,-1,-1) for theta=0: flip the in-plane ellipse components.
    if pk.sigma == +1:
        flip = np.array([-1.0, -1.0, 1.0])
    else:
        flip = np.array([1.0, -1.0, -1.0])
    x = u @ (flip * xbar)
    y = u @ (flip * ybar)
    x_prime = -pk.r_prime * (u @ E2)
    y_prime = -pk.R_prime * (u @ E2) + ((pk.C - pk.sigma * pk.G) / pk.r_prime) * (u @ E1)
    return CartesianState(y_prime=y_prime, y=y, x_prime=x_prime, x=x, dim=2)


def planar_perihelion_direction(pk):
    """Unit perihelion vector R3(zeta) R3(g) (-sin gbar, cos gbar, 0)."""
    u = rot3(pk.zeta) @ rot3(pk.g_node)
    return u @ np.array([-np.sin(pk.g_peri), np.cos(pk.g_peri), 0.0])


def planar_delaunay(Lambda, G, ell, g_peri, masses):
    """(Lambda, G, ell, gbar) -> (R, Phi, r, phi), the planar Delaunay map."""
    el = anomalies_from_mean(Lambda, G, ell, masses)
    m, M = masses.m, masses.M
    R = (m * m * M / Lambda) * el.e * np.sin(el.xi) / (1.0 - el.e * np.cos(el.xi))
    Phi = G
    r = el.a * (1.0 - el.e * np.cos(el.xi))
    phi = el.nu + g_peri - 0.5 * np.pi
    return float(R), float(Phi), float(r), float(phi)


@dataclass
class EllipticCoordinates:
    """Prolate elliptic coordinates about foci at +-v0 (r0 = |v0|)."""

    lam: float
    beta: float
    omega: float
    r0: float
    p_lam: float = 0.0
    p_beta: float = 0.0
    p_omega: float = 0.0

    def validate(self):
        if self.lam < 1.0 - 1e-12 or abs(self.beta) > 1.0 + 1e-12:
            raise DomainError("need lam >= 1 and |beta| <= 1")


def _frame_from_axis(v0):
    """Deterministic orthonormal frame (i, j, k) with k along v0."""
    k = v0 / np.linalg.norm(v0)
    trial = E1 if abs(k[0]) < 0.9 else E2
    i = trial - np.dot(trial, k) * k
    i = i / np.linalg.norm(i)
    j = np.cross(k, i)
    return i, j, k


def elliptic_from_positions(v, v0):
    """Position-only elliptic coordinates (lam, beta, omega) of v."""
    v = np.asarray(v, dtype=float)
    v0 = np.asarray(v0, dtype=float)
    r0 = np.linalg.norm(v0)
    if r0 == 0.0:
        raise DomainError("v0 must be nonzero")
    rp = np.linalg.norm(v + v0)
    rm = np.linalg.norm(v - v0)
    if rp < 1e-300 or rm < 1e-300:
        raise SingularityError("v = -v0 or v = +v0: focus singularity")
    lam = 0.5 * (rp + rm) / r0
    beta = 0.5 * (rp - rm) / r0
    i, j, k = _frame_from_axis(v0)
    v1, v2 = np.dot(v, i), np.dot(v, j)
    omega = float(np.arctan2(v1, -v2))
    return EllipticCoordinates(lam=float(lam), beta=float(beta), omega=omega, r0=float(r0))


@dataclass
class DelaunayV0:
    """Delaunay chart relative to the fixed axis v0: (Theta, Mnorm, R, theta, m, r)."""

    Theta: float
    M_norm: float
    R: float
    theta_angle: float
    m_angle: float
    r: float


def _oriented_angle(n1, n2, b):
    bb = b / np.linalg.norm(b)
    return float(np.arctan2(np.dot(np.cross(n1, n2), bb), np.dot(n1, n2)))


def delaunay_v0(u, v, v0):
    """Homogeneous-canonical chart (Theta dtheta + M dm + R dr = u . dv)."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    v0 = np.asarray(v0, dtype=float)
    Mvec = np.cross(v, u)
    Mn = np.linalg.norm(Mvec)
    if Mn < NODE_FLOOR:
        raise DomainError("angular momentum v x u vanishes: chart degenerate")
    n0 = np.cross(v0, Mvec)
    if np.linalg.norm(n0) < NODE_FLOOR * Mn * np.linalg.norm(v0):
        raise DomainError("node v0 x M vanishes: chart degenerate")
    r = np.linalg.norm(v)
    iref, _, _ = _frame_from_axis(v0)
    Theta = np.dot(Mvec, v0) / np.linalg.norm(v0)
    R = np.dot(u, v) / r
    theta_angle = _oriented_angle(iref, n0, v0)
    m_angle = _oriented_angle(n0, v, Mvec)
    return DelaunayV0(Theta=float(Theta), M_norm=float(Mn), R=float(R),
                      theta_angle=theta_angle, m_angle=m_angle, r=float(r))


def elliptic_from_state(u, v, v0):
    """Full elliptic chart (lam, beta, omega, p_lam, p_beta, p_omega) of (u, v).

    Momenta via the point transformation p_q = u . dv/dq, which fixes the
    sign branch left open by the generating-function display.
    """
    u = np.asarray(u, dtype=float)
    ec = elliptic_from_positions(v, v0)
    i, j, k = _frame_from_axis(np.asarray(v0, dtype=float))
    lam, beta, om, r0 = ec.lam, ec.beta, ec.omega, ec.r0
    if lam <= 1.0 or abs(beta) >= 1.0:
        raise SingularityError("elliptic chart degenerate for momenta")
    what = np.sin(om) * i - np.cos(om) * j
    wperp = np.cos(om) * i + np.sin(om) * j
    W = r0 * np.sqrt((lam * lam - 1.0) * (1.0 - beta * beta))
    dv_dlam = r0 * lam * np.sqrt((1.0 - beta * beta) / (lam * lam - 1.0)) * what + r0 * beta * k
    dv_dbeta = -r0 * beta * np.sqrt((lam * lam - 1.0) / (1.0 - beta * beta)) * what + r0 * lam * k
    dv_dom = W * wperp
    ec.p_lam = float(np.dot(u, dv_dlam))
    ec.p_beta = float(np.dot(u, dv_dbeta))
    ec.p_omega = float(np.dot(u, dv_dom))
    return ec


def elliptic_momenta_from_delaunay(R, M_norm, Theta, lam, beta, r0=1.0):
    """Forward momenta (p_lam, p_beta) generated by the r(lam, beta), m(lam, beta) map."""
    L = lam * lam + beta * beta - 1.0
    if L <= 0.0:
        raise DomainError("need lam^2 + beta^2 > 1")
    disc = (1.0 - beta * beta) * (lam * lam - 1.0) * M_norm ** 2 - L * Theta ** 2
    if disc < 0.0:
        if disc > -1e-12 * max(1.0, M_norm ** 2):
            disc = 0.0
        else:
            raise DomainError("momenta square root negative: |Theta| too large")
    root = np.sqrt(disc)
    p_lam = r0 * lam * R / np.sqrt(L) - beta * root / (L * (lam * lam - 1.0))
    p_beta = r0 * beta * R / np.sqrt(L) + lam * root / (L * (1.0 - beta * beta))
    return float(p_lam), float(p_beta)


def elliptic_momenta_to_R_Msq(p_lam, p_beta, Theta, lam, beta, r0=None):
    """Invert the elliptic momenta for (R, M^2).

    R carries the 1/r0 scale of the generating identity R = u.v/|v| with
    r = r0*sqrt(lam^2+beta^2-1); pass r0 = 1 (default) for the unscaled
    display form.
    """
    if lam <= 1.0 or abs(beta) >= 1.0:
        raise SingularityError("lam = 1 or |beta| = 1: coordinate degeneracy")
    if r0 is None:
        r0 = 1.0
    L = lam * lam + beta * beta - 1.0
    if L <= 0.0:
        raise DomainError("need lam^2 + beta^2 > 1")
    R = (lam * (lam * lam - 1.0) * p_lam + beta * (1.0 - beta * beta) * p_beta) / (
        r0 * (lam * lam - beta * beta) * np.sqrt(L)
    )
    Msq = ((lam * p_beta - beta * p_lam) ** 2 * (lam * lam - 1.0) * (1.0 - beta * beta)
           / (lam * lam - beta * beta) ** 2
           + L * Theta ** 2 / ((1.0 - beta * beta) * (lam * lam - 1.0)))
    return float(R), float(Msq)
