"""Instantaneous-ellipse elements, anomalies and the Kepler equation."""

from dataclasses import dataclass

import numpy as np

from .model import DomainError, HyperbolicError, ConvergenceError

CIRCULAR_ECC_FLOOR = 1e-8


def solve_kepler(e, ell, tol=1e-13, max_iter=64):
    """Solve xi - e*sin(xi) = ell for the eccentric anomaly xi.

    Newton iteration from xi0 = ell + e*sin(ell), falling back to bisection
    on [ell - e, ell + e] whenever a step leaves the bracket.  The result
    stays on the same branch as ell (no modular reduction of the input).
    """
    if not 0.0 <= e < 1.0:
        raise DomainError(f"eccentricity must be in [0, 1), got {e}")
    if e == 0.0:
        return float(ell)
    lo, hi = ell - e, ell + e
    xi = ell + e * np.sin(ell)
    for _ in range(max_iter):
        f = xi - e * np.sin(xi) - ell
        if abs(f) < tol:
            return float(xi)
        if f > 0.0:
            hi = xi
        else:
            lo = xi
        step = f / (1.0 - e * np.cos(xi))
        xi_new = xi - step
        if not lo <= xi_new <= hi:
            xi_new = 0.5 * (lo + hi)
        xi = xi_new
    f = xi - e * np.sin(xi) - ell
    if abs(f) < tol:
        return float(xi)
    raise ConvergenceError(f"Kepler solver stalled at residual {f:.3e}")


@dataclass
class OrbitalElements:
    """Bound-ellipse elements plus the three anomalies.

    varrho is the radius ratio r/a = 1 - e*cos(xi).  g_peri is the in-plane
    perihelion angle used by the analytic state formulas; when e is below
    CIRCULAR_ECC_FLOOR it is set to 0 by convention and circular_degenerate
    is flagged.
    """

    a: float
    e: float
    Lambda: float
    G: float
    ell: float
    xi: float
    nu: float
    varrho: float
    g_peri: float = 0.0
    circular_degenerate: bool = False


def true_anomaly(e, xi, G_over_Lambda=None):
    """nu = arg(cos(xi) - e, sqrt(1 - e^2) sin(xi)); two-argument form."""
    s = np.sqrt(1.0 - e * e) if G_over_Lambda is None else G_over_Lambda
    return float(np.arctan2(s * np.sin(xi), np.cos(xi) - e))


def anomalies_from_mean(Lambda, G, ell, masses, tol=1e-13):
    """Elements and anomalies from the action pair (Lambda, G) and mean anomaly."""
    if not 0.0 < G <= Lambda:
        raise DomainError(f"need 0 < G <= Lambda, got G={G}, Lambda={Lambda}")
    m, M = masses.m, masses.M
    e = np.sqrt(max(0.0, 1.0 - (G / Lambda) ** 2))
    a = Lambda * Lambda / (m * m * M)
    xi = solve_kepler(e, ell, tol=tol)
    nu = true_anomaly(e, xi, G / Lambda)
    varrho = 1.0 - e * np.cos(xi)
    return OrbitalElements(
        a=a, e=float(e), Lambda=float(Lambda), G=float(G), ell=float(ell),
        xi=xi, nu=nu, varrho=float(varrho),
    )


def state_from_elements(el, masses, frame=None):
    """Planar (y, x) on the instantaneous ellipse, rotated by `frame` last.

    x = (Lambda^2/(m^2 M)) R3(g - pi/2) (cos xi - e, (G/Lambda) sin xi, 0)
    y = (m^2 M/Lambda)  R3(g - pi/2) (-sin xi, (G/Lambda) cos xi, 0) / (1 - e cos xi)

    The 1/(1 - e cos xi) factor in y is required for consistency with
    Hamilton's equations of the Kepler Hamiltonian (see README: the source
    display omits it, while its own planar Delaunay map includes it).
    """
    from .coords import rot3

    m, M = masses.m, masses.M
    L, G, e, xi, g = el.Lambda, el.G, el.e, el.xi, el.g_peri
    R = rot3(g - 0.5 * np.pi) if frame is None else frame @ rot3(g - 0.5 * np.pi)
    varrho = 1.0 - e * np.cos(xi)
    x = (L * L / (m * m * M)) * (R @ np.array([np.cos(xi) - e, (G / L) * np.sin(xi), 0.0]))
    y = (m * m * M / L) * (R @ np.array([-np.sin(xi), (G / L) * np.cos(xi), 0.0])) / varrho
    return y, x


def elements_from_cartesian(y, x, masses, circular_safe=False):
    """Invert a bound (y, x) into elements; also return perihelion direction.

    Returns (elements, P, M_hat): P the perihelion unit vector from the
    eccentricity vector L/(m^2 M e), M_hat the angular-momentum direction.
    Raises HyperbolicError when the Kepler energy is >= 0 and DomainError
    on circular degeneracy unless circular_safe is set.
    """
    y = np.asarray(y, dtype=float)
    x = np.asarray(x, dtype=float)
    m, M = masses.m, masses.M
    r = np.linalg.norm(x)
    if r == 0.0:
        raise DomainError("x = 0 has no instantaneous ellipse")
    J0 = np.dot(y, y) / (2.0 * m) - m * M / r
    if J0 >= 0.0:
        raise HyperbolicError(f"Kepler energy {J0:.6e} >= 0")
    a = -m * M / (2.0 * J0)
    Lambda = m * np.sqrt(M * a)
    Mvec = np.cross(x, y)
    G = np.linalg.norm(Mvec)
    Lvec = np.cross(y, Mvec) - m * m * M * x / r
    e = np.linalg.norm(Lvec) / (m * m * M)
    n_mean = np.sqrt(M / a ** 3)
    e_cos = 1.0 - r / a
    e_sin = np.dot(x, y) / (m * a * a * n_mean)
    if e < CIRCULAR_ECC_FLOOR:
        if not circular_safe:
            raise DomainError("circular orbit: perihelion direction undefined "
                              "(pass circular_safe=True)")
        P = np.array([1.0, 0.0, 0.0])
        xi = np.arctan2(e_sin, e_cos) if e > 0 else 0.0
        g = 0.0
        flagged = True
    else:
        P = Lvec / (m * m * M * e)
        xi = np.arctan2(e_sin / e, e_cos / e)
        # x(xi=0) is along P with P = (sin g, -cos g, 0) in the orbit frame
        g = float(np.arctan2(P[0], -P[1]))
        flagged = False
    ell = xi - e * np.sin(xi)
    nu = true_anomaly(e, xi)
    el = OrbitalElements(
        a=float(a), e=float(e), Lambda=float(Lambda), G=float(G), ell=float(ell),
        xi=float(xi), nu=float(nu), varrho=float(1.0 - e * np.cos(xi)),
        g_peri=g, circular_degenerate=flagged,
    )
    Mhat = Mvec / G if G > 0 else np.array([0.0, 0.0, 1.0])
    return el, P, Mhat
