"""Arnold actions and angles of the unperturbed portrait, In/Ext continuous."""

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .model import DomainError
from .portrait import (check_delta, e_hat_max, g_hat_pm, g_hat_bounds, g_plus,
                       classify)

QUAD_ABS_TOL = 1e-10
SEPARATRIX_GUARD = 1e-13


def L0_of_J(J, masses):
    """Inner action Lambda of the Kepler energy level J < 0."""
    if J >= 0.0:
        raise DomainError(f"need J < 0, got {J}")
    m, M = masses.m, masses.M
    return float(np.sqrt(-(m ** 3) * M ** 2 / (2.0 * J)))


def delta_of(J, r_prime, masses):
    """delta = r'/a = -2 r' J/(m M)."""
    return float(-2.0 * r_prime * J / (masses.m * masses.M))


def e_hat_of(J, E, masses):
    return float(E / L0_of_J(J, masses) ** 2)


def leaf_bounds(J, r_prime, masses):
    """Closed leaf [E_min, E_max] of admissible Euler-integral values."""
    m, M = masses.m, masses.M
    E_min = -(m ** 2) * M * r_prime
    E_max = -(m ** 3) * M ** 2 / (2.0 * J) * (1.0 + r_prime ** 2 * J ** 2 / (m * M) ** 2)
    return float(E_min), float(E_max)


def _branch_integral(E_hat, delta):
    """I = int_{Gmin}^{Gmax} arccos((Ehat - G^2)/(delta sqrt(1-G^2))) dG.

    The substitution G = Gmin + (Gmax - Gmin) sin^2(theta) removes the
    square-root folds at both endpoints.
    """
    G_min, G_max = g_hat_bounds(E_hat, delta)
    span = G_max - G_min
    if span <= 0.0:
        return 0.0

    def integrand(theta):
        st = np.sin(theta)
        G = G_min + span * st * st
        return g_plus(G, E_hat, delta) * span * np.sin(2.0 * theta)

    val, err = quad(integrand, 0.0, 0.5 * np.pi, epsabs=QUAD_ABS_TOL,
                    epsrel=1e-12, limit=200)
    return float(val)


def g0_hat_scaled(E_hat, delta):
    """Scaled continuity-preserving action G0hat(Ehat; delta) in [0, 1].

    In-branch (Ehat < 1):  Ghat_max - I/pi   (area of {E0hat < Ehat}).
    Ext-branch (Ehat > 1): 1 - I/pi          (complement w.r.t. the strip).
    The two agree at Ehat = 1 where Ghat_max = 1, which is the point of the
    In/Ext redefinition.  Equals the normalized area of the sub-level set
    {E0hat < Ehat} in the (g, Ghat) half-cylinder in every regime.
    """
    check_delta(delta)
    top = e_hat_max(delta)
    if E_hat < -delta - 1e-12 or E_hat > top + 1e-12:
        raise DomainError(f"E_hat={E_hat} outside the leaf [{-delta}, {top}]")
    E_hat = min(max(E_hat, -delta), top)
    if E_hat == -delta:
        return 0.0
    if E_hat == top:
        return 1.0
    I = _branch_integral(E_hat, delta)
    _, G_max = g_hat_bounds(E_hat, delta)
    head = G_max if E_hat <= 1.0 else 1.0
    return float(head - I / np.pi)


@dataclass
class ActionPair:
    L0: float
    G0_action: float
    region: int


def region_of(J, E, r_prime, masses, boundary_tol=0.0):
    """Region tag j in {1, 2, 3} of the leaf; separatrices get tag 0.

    Returns (j, dist_sigma0, dist_sigma1): distances of E to the two
    separatrix values (in unscaled E units).
    """
    delta = delta_of(J, r_prime, masses)
    check_delta(delta)
    E_hat = e_hat_of(J, E, masses)
    L0sq = L0_of_J(J, masses) ** 2
    d0 = abs(E_hat - delta) * L0sq
    d1 = abs(E_hat - 1.0) * L0sq
    lo, hi = min(delta, 1.0), max(delta, 1.0)
    if E_hat < -delta or E_hat > e_hat_max(delta):
        raise DomainError("(J, E) outside the leaf")
    if d0 <= boundary_tol * L0sq or d1 <= boundary_tol * L0sq \
            or E_hat == delta or E_hat == 1.0:
        return 0, d0, d1
    if E_hat < lo:
        return 1, d0, d1
    if E_hat < hi:
        return 2, d0, d1
    return 3, d0, d1


def G0_action(J, E, r_prime, masses):
    """Modified Arnold action, returned unscaled as Lambda * G0hat."""
    L0 = L0_of_J(J, masses)
    delta = delta_of(J, r_prime, masses)
    E_hat = e_hat_of(J, E, masses)
    g0 = g0_hat_scaled(E_hat, delta)
    region, _, _ = region_of(J, E, r_prime, masses)
    return ActionPair(L0=L0, G0_action=float(L0 * g0), region=region)


def dg0_dEhat(E_hat, delta):
    """d G0hat / d Ehat = (1/pi) int dG / sqrt((G^2-Gm^2)(Gp^2-G^2)).

    Substituting G^2 = w with w = w_lo + (w_hi - w_lo) sin^2(theta) removes
    the square-root singularities at both ends; diverges on the separatrices.
    """
    check_delta(delta)
    gm2, gp2 = g_hat_pm(E_hat, delta)
    G_min, G_max = g_hat_bounds(E_hat, delta)
    if abs(E_hat - delta) < SEPARATRIX_GUARD or abs(E_hat + delta) < SEPARATRIX_GUARD \
            or abs(E_hat - e_hat_max(delta)) < SEPARATRIX_GUARD:
        raise DomainError("action derivative diverges on a separatrix/extreme")
    w_lo, w_hi = G_min ** 2, G_max ** 2

    def integrand(theta):
        st2 = np.sin(theta) ** 2
        w = w_lo + (w_hi - w_lo) * st2
        num = (w_hi - w_lo) * np.sin(2.0 * theta)
        rad = (w - gm2) * (gp2 - w)
        if rad <= 0.0:
            return 0.0
        return num / (2.0 * np.sqrt(w) * np.sqrt(rad))

    val, err = quad(integrand, 0.0, 0.5 * np.pi, epsabs=1e-12, epsrel=1e-11,
                    limit=400)
    return float(val / np.pi)


def dG0_dE(J, E, r_prime, masses):
    """Unscaled action derivative dG0/dE = dG0hat/dEhat / Lambda."""
    L0 = L0_of_J(J, masses)
    delta = delta_of(J, r_prime, masses)
    return dg0_dEhat(E / L0 ** 2, delta) / L0


def _time_integral(w_from, w_to, gm2, gp2):
    """int dG / sqrt((G^2 - gm2)(gp2 - G^2)) over G in [sqrt(w_from), sqrt(w_to)]."""
    if w_to <= w_from:
        return 0.0

    def integrand(theta):
        st2 = np.sin(theta) ** 2
        w = w_from + (w_to - w_from) * st2
        num = (w_to - w_from) * np.sin(2.0 * theta)
        rad = (w - gm2) * (gp2 - w)
        if rad <= 0.0:
            return 0.0
        return num / (2.0 * np.sqrt(w) * np.sqrt(rad))

    val, _ = quad(integrand, 0.0, 0.5 * np.pi, epsabs=1e-12, epsrel=1e-11,
                  limit=400)
    return float(val)


def arnold_angle(Lambda, G, g_peri, r_prime, masses):
    """Arnold angle gamma0hat in [0, 2pi) as 2 pi t/T along the level loop.

    The reference point (angle 0) is the Ghat_max point of the loop: the
    g = pi crossing for levels below the Ehat = 1 separatrix, the g = 0
    one above it.  t is the flow time from the reference; along the branch
    parameterized by Ghat the speed is sqrt((G^2 - Gm^2)(Gp^2 - G^2)), so
    times reduce to the same endpoint-regularized quadrature as the action
    derivative.
    """
    from .integrals import planar_e0

    m, M = masses.m, masses.M
    J = -(m ** 3) * M ** 2 / (2.0 * Lambda ** 2)
    E = planar_e0(Lambda, G, g_peri, r_prime, masses)
    delta = delta_of(J, r_prime, masses)
    E_hat = e_hat_of(J, E, masses)
    region, d0, d1 = region_of(J, E, r_prime, masses)
    if region == 0:
        raise DomainError("Arnold angle diverges on a separatrix")
    gm2, gp2 = g_hat_pm(E_hat, delta)
    G_min, G_max = g_hat_bounds(E_hat, delta)
    w_lo, w_hi = G_min ** 2, G_max ** 2
    Gh = G / Lambda
    w = Gh * Gh
    if not (w_lo - 1e-12 <= w <= w_hi + 1e-12):
        raise DomainError("point not on the level curve")
    w = min(max(w, w_lo), w_hi)
    g = np.mod(g_peri, 2.0 * np.pi)

    half = _time_integral(w_lo, w_hi, gm2, gp2)        # time along one branch
    crossing = G_min == 0.0                            # loop continues to Ghat < 0
    T = 4.0 * half if crossing else 2.0 * half
    t_up = _time_integral(w, w_hi, gm2, gp2)           # time from (g, G) to the top
    # the flow ascends in Ghat for 0 < g < pi and leaves the top toward g > pi
    t = t_up if g > np.pi else T - t_up
    return float(np.mod(2.0 * np.pi * t / T, 2.0 * np.pi))
