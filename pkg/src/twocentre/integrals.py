"""Hamiltonians and first integrals in every chart, with decompositions."""

from dataclasses import dataclass

import numpy as np

from .model import DomainError, SingularityError
from .kepler import anomalies_from_mean


@dataclass
class IntegralValues:
    """Snapshot of the energies/integrals along a state."""

    J0: float
    J: float
    E: float
    E0: float
    E1: float
    E2: float
    H: float
    H0: float


def kepler_energy(y, x, masses):
    """J0 = |y|^2/(2m) - mM/|x|."""
    y = np.asarray(y, dtype=float)
    x = np.asarray(x, dtype=float)
    r = np.linalg.norm(x)
    if r == 0.0:
        raise SingularityError("x = 0 in kepler_energy")
    return float(np.dot(y, y) / (2.0 * masses.m) - masses.m * masses.M / r)


def two_centre_energy(y, x, x_prime, masses):
    """J = J0 - mu*mM/|x - x'| (second centre fixed at x')."""
    y = np.asarray(y, dtype=float)
    x = np.asarray(x, dtype=float)
    x_prime = np.asarray(x_prime, dtype=float)
    d = np.linalg.norm(x - x_prime)
    if d == 0.0:
        raise SingularityError("x = x' in two_centre_energy")
    return kepler_energy(y, x, masses) - masses.mu * masses.m * masses.M / d


def angular_momentum_and_eccentricity(y, x, masses):
    """M = x cross y and the (scaled) eccentricity vector L = y cross M - m^2 M x/|x|."""
    y = np.asarray(y, dtype=float)
    x = np.asarray(x, dtype=float)
    r = np.linalg.norm(x)
    if r == 0.0:
        raise SingularityError("x = 0")
    Mvec = np.cross(x, y)
    Lvec = np.cross(y, Mvec) - masses.m ** 2 * masses.M * x / r
    return Mvec, Lvec


def euler_integral_cartesian(y, x, x_prime, masses):
    """E = |M|^2 - x'.L + mu m^2 M (x'-x).x'/|x'-x| (renamed convention)."""
    x_prime = np.asarray(x_prime, dtype=float)
    x = np.asarray(x, dtype=float)
    Mvec, Lvec = angular_momentum_and_eccentricity(y, x, masses)
    d = np.linalg.norm(x_prime - x)
    if d == 0.0:
        raise SingularityError("x = x' in euler_integral_cartesian")
    mu_term = masses.mu * masses.m ** 2 * masses.M * np.dot(x_prime - x, x_prime) / d
    return float(np.dot(Mvec, Mvec) - np.dot(x_prime, Lvec) + mu_term)


def euler_decomposition(y, x, x_prime, masses):
    """(E0, E1, E2) with E0 = |M|^2 - x'.L, E1 the mu-weighted focal term,
    E2 = m |x'|^2 J / 2 (itself an integral of J, dropped in the renamed E)."""
    x_prime = np.asarray(x_prime, dtype=float)
    x = np.asarray(x, dtype=float)
    Mvec, Lvec = angular_momentum_and_eccentricity(y, x, masses)
    d = np.linalg.norm(x_prime - x)
    if d == 0.0:
        raise SingularityError("x = x'")
    E0 = float(np.dot(Mvec, Mvec) - np.dot(x_prime, Lvec))
    E1 = float(masses.m ** 2 * masses.M * np.dot(x_prime - x, x_prime) / d)
    E2 = float(masses.m * np.dot(x_prime, x_prime) / 2.0
               * two_centre_energy(y, x, x_prime, masses))
    return E0, E1, E2


def _k_distance_terms(Lambda, G, Theta, r_prime, ell, g_peri, masses):
    el = anomalies_from_mean(Lambda, G, ell, masses)
    sin_i2 = np.sqrt(max(0.0, 1.0 - (Theta / G) ** 2))
    avr = el.a * el.varrho
    cosgn = np.cos(g_peri + el.nu)
    dist_sq = r_prime ** 2 + 2.0 * r_prime * avr * sin_i2 * cosgn + avr ** 2
    if dist_sq <= 0.0:
        raise SingularityError("x = x' on the K chart")
    return el, sin_i2, avr, cosgn, np.sqrt(dist_sq)


def two_centre_energy_k(Lambda, G, Theta, r_prime, ell, g_peri, masses):
    """Closed-form J(Lambda, G, Theta, r', ell, gbar) on the K chart."""
    m, M, mu = masses.m, masses.M, masses.mu
    _, _, _, _, dist = _k_distance_terms(Lambda, G, Theta, r_prime, ell, g_peri, masses)
    return float(-(m ** 3) * M ** 2 / (2.0 * Lambda ** 2) - mu * m * M / dist)


def euler_integral_k(Lambda, G, Theta, r_prime, ell, g_peri, masses):
    """Closed-form E(Lambda, G, Theta, r', ell, gbar) on the K chart.

    With Theta = 0 this is the planar display used throughout the phase
    portrait (E0 = G^2 + m^2 M r' e cos gbar plus the mu-weighted term).
    """
    m, M, mu = masses.m, masses.M, masses.mu
    el, sin_i2, avr, cosgn, dist = _k_distance_terms(
        Lambda, G, Theta, r_prime, ell, g_peri, masses)
    e = el.e
    value = (G ** 2
             + m ** 2 * M * r_prime * sin_i2 * e * np.cos(g_peri)
             + mu * m ** 2 * M * r_prime * (r_prime + avr * sin_i2 * cosgn) / dist)
    return float(value)


def euler_integral_planar_k(pk, masses):
    return euler_integral_k(pk.Lambda, pk.G, 0.0, pk.r_prime, pk.ell, pk.g_peri, masses)


def planar_e0(Lambda, G, g_peri, r_prime, masses):
    """Unperturbed planar Euler integral E0 = G^2 + m^2 M r' e cos(gbar)."""
    if not 0 < G <= Lambda:
        raise DomainError("need 0 < G <= Lambda")
    m, M = masses.m, masses.M
    e = np.sqrt(max(0.0, 1.0 - (G / Lambda) ** 2))
    return float(G ** 2 + m ** 2 * M * r_prime * e * np.cos(g_peri))


def full_hamiltonian(s, masses):
    """Rescaled three-body Hamiltonian H (the epsilon-graded three-group form)."""
    m, M, mp, Mp = masses.m, masses.M, masses.m_prime, masses.M_prime
    mu, eps, m0 = masses.mu, masses.eps, masses.m0
    r = np.linalg.norm(s.x)
    rp = np.linalg.norm(s.x_prime)
    d = np.linalg.norm(s.x - s.x_prime)
    if rp == 0.0 or (eps > 0 and (r == 0.0 or d == 0.0)):
        raise SingularityError("excluded configuration in full_hamiltonian")
    H = -mp * Mp / rp
    if eps > 0:
        H += eps * (np.dot(s.y, s.y) / (2.0 * m) - m * M / r - mu * m * M / d)
        H += eps ** 2 * (np.dot(s.y_prime, s.y_prime) / (2.0 * mp)
                         + (mu / m0) * np.dot(s.y_prime, s.y))
    return float(H)


def truncated_hamiltonian(s, masses):
    """H0: the three-body Hamiltonian with the eps^2 group removed."""
    m, M, mp, Mp = masses.m, masses.M, masses.m_prime, masses.M_prime
    mu, eps = masses.mu, masses.eps
    r = np.linalg.norm(s.x)
    rp = np.linalg.norm(s.x_prime)
    d = np.linalg.norm(s.x - s.x_prime)
    if rp == 0.0 or (eps > 0 and (r == 0.0 or d == 0.0)):
        raise SingularityError("excluded configuration in truncated_hamiltonian")
    H0 = -mp * Mp / rp
    if eps > 0:
        H0 += eps * (np.dot(s.y, s.y) / (2.0 * m) - m * M / r - mu * m * M / d)
    return float(H0)


def planar_hamiltonian_k(pk, masses):
    """H on the planar K chart (third display of the K-chart Hamiltonians).

    Requires the impulse components of the instantaneous ellipse, produced
    with the same sign flips as the planar K -> Cartesian map.
    """
    from .kepler import state_from_elements
    m, M, mp, Mp = masses.m, masses.M, masses.m_prime, masses.M_prime
    mu, eps, m0 = masses.mu, masses.eps, masses.m0
    el = anomalies_from_mean(pk.Lambda, pk.G, pk.ell, masses)
    el.g_peri = pk.g_peri
    ybar, _ = state_from_elements(el, masses)
    if pk.sigma == +1:
        y1, y2 = -ybar[0], -ybar[1]
    else:
        y1, y2 = ybar[0], -ybar[1]
    avr = el.a * el.varrho
    dist = np.sqrt(pk.r_prime ** 2 + 2.0 * pk.r_prime * avr * np.cos(pk.g_peri + el.nu)
                   + avr ** 2)
    H = -mp * Mp / pk.r_prime
    H += eps * (-(m ** 3) * M ** 2 / (2.0 * pk.Lambda ** 2) - mu * m * M / dist)
    H += eps ** 2 * (pk.R_prime ** 2 / (2.0 * mp)
                     + (pk.C - pk.sigma * pk.G) ** 2 / (2.0 * mp * pk.r_prime ** 2)
                     + (mu / m0) * (-pk.R_prime * y2
                                    + (pk.C - pk.sigma * pk.G) / pk.r_prime * y1))
    return float(H)


def elliptic_F_terms(ec, m_plus, m_minus, h):
    """Separated radial/angular parts (F_lam, F_beta) of the Hamilton-Jacobi split.

    The mass terms carry the r0 factor required for general centre
    half-distance; the r0 = 1 normalization recovers the display forms
    (see README on the r0 scaling of the separation constants).
    """
    lam, beta, r0 = ec.lam, ec.beta, ec.r0
    if lam <= 1.0 or abs(beta) >= 1.0:
        raise SingularityError("elliptic chart degenerate (lam = 1 or |beta| = 1)")
    F_lam = (ec.p_lam ** 2 * (lam * lam - 1.0)
             + ec.p_omega ** 2 / (lam * lam - 1.0)
             - 2.0 * r0 * (m_plus + m_minus) * lam
             - 2.0 * r0 * r0 * lam * lam * h)
    F_beta = (ec.p_beta ** 2 * (1.0 - beta * beta)
              + ec.p_omega ** 2 / (1.0 - beta * beta)
              + 2.0 * r0 * (m_plus - m_minus) * beta
              + 2.0 * r0 * r0 * beta * beta * h)
    return float(F_lam), float(F_beta)


def elliptic_euler_integral(ec, m_plus, m_minus, h):
    """Ebar = (F_beta - F_lam)/2, the separation constant at energy h."""
    F_lam, F_beta = elliptic_F_terms(ec, m_plus, m_minus, h)
    return 0.5 * (F_beta - F_lam)


def elliptic_hamiltonian(ec, m_plus, m_minus):
    """Two-centre Hamiltonian (unit moving mass, centres +-v0) in elliptic chart."""
    lam, beta, r0 = ec.lam, ec.beta, ec.r0
    if lam <= 1.0 or abs(beta) >= 1.0:
        raise SingularityError("elliptic chart degenerate")
    pref = 1.0 / (lam * lam - beta * beta)
    val = pref * (ec.p_lam ** 2 * (lam * lam - 1.0) / (2.0 * r0 ** 2)
                  + ec.p_beta ** 2 * (1.0 - beta * beta) / (2.0 * r0 ** 2)
                  + ec.p_omega ** 2 / (2.0 * r0 ** 2)
                  * (1.0 / (1.0 - beta * beta) + 1.0 / (lam * lam - 1.0))
                  - (m_plus + m_minus) * lam / r0
                  + (m_plus - m_minus) * beta / r0)
    return float(val)


def euler_integral_two_fixed_centres(u, v, v0, m_plus, m_minus):
    """Ebar in Cartesian form: |v x u|^2 + (v0 . u)^2 + 2 v.v0 (m+/r+ - m-/r-)."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    v0 = np.asarray(v0, dtype=float)
    rp = np.linalg.norm(v + v0)
    rm = np.linalg.norm(v - v0)
    if rp == 0.0 or rm == 0.0:
        raise SingularityError("v at a centre")
    cr = np.cross(v, u)
    return float(np.dot(cr, cr) + np.dot(v0, u) ** 2
                 + 2.0 * np.dot(v, v0) * (m_plus / rp - m_minus / rm))


def two_fixed_centres_hamiltonian(u, v, v0, m_plus, m_minus):
    """Unit-mass two-fixed-centre Hamiltonian |u|^2/2 - m+/|v+v0| - m-/|v-v0|."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    v0 = np.asarray(v0, dtype=float)
    rp = np.linalg.norm(v + v0)
    rm = np.linalg.norm(v - v0)
    if rp == 0.0 or rm == 0.0:
        raise SingularityError("v at a centre")
    return float(0.5 * np.dot(u, u) - m_plus / rp - m_minus / rm)


def integral_values(s, masses):
    """All integrals of a Cartesian state, bundled."""
    E0, E1, E2 = euler_decomposition(s.y, s.x, s.x_prime, masses)
    return IntegralValues(
        J0=kepler_energy(s.y, s.x, masses),
        J=two_centre_energy(s.y, s.x, s.x_prime, masses),
        E=E0 + masses.mu * E1,
        E0=E0,
        E1=E1,
        E2=E2,
        H=full_hamiltonian(s, masses),
        H0=truncated_hamiltonian(s, masses),
    )
