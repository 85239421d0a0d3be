"""Phase portrait of the scaled unperturbed Euler integral in the (g, Ghat) plane.

All level-set machinery works with the scaled variables
Ehat = E/Lambda^2, Ghat = G/Lambda, delta = r'/a, where the level function is

    E0hat(Ghat, g) = Ghat^2 + delta*sqrt(1 - Ghat^2)*cos(g).
"""

from dataclasses import dataclass, field

import numpy as np

from .model import DomainError, ConvergenceError
from .kepler import anomalies_from_mean

REGIMES = ("libration-pi", "separatrix-0", "rotation", "curve-E=1",
           "libration-0", "maximum-point")


def e0_hat(G_hat, g, delta):
    """Scaled unperturbed Euler integral on the (g, Ghat) cylinder."""
    return G_hat ** 2 + delta * np.sqrt(1.0 - np.asarray(G_hat) ** 2) * np.cos(g)


def e_hat_max(delta):
    return 1.0 + delta ** 2 / 4.0


def check_delta(delta):
    if not 0.0 < delta < 2.0:
        raise DomainError(f"delta must be in (0, 2), got {delta}")


@dataclass
class CriticalPoint:
    g: float
    G_hat: float
    value: float
    kind: str


def critical_points(delta):
    """Minimum, saddle and maximum of the scaled portrait."""
    check_delta(delta)
    return [
        CriticalPoint(g=np.pi, G_hat=0.0, value=-delta, kind="minimum"),
        CriticalPoint(g=0.0, G_hat=0.0, value=delta, kind="saddle"),
        CriticalPoint(g=0.0, G_hat=float(np.sqrt(1.0 - delta ** 2 / 4.0)),
                      value=e_hat_max(delta), kind="maximum"),
    ]


def g_hat_pm(E_hat, delta):
    """Squared turning values Ghat_-^2, Ghat_+^2 (the lower may be negative)."""
    check_delta(delta)
    disc = 1.0 + delta ** 2 / 4.0 - E_hat
    if disc < 0.0:
        if disc > -1e-14:
            disc = 0.0
        else:
            raise DomainError(f"E_hat={E_hat} above the maximum {e_hat_max(delta)}")
    root = delta * np.sqrt(disc)
    return E_hat - delta ** 2 / 2.0 - root, E_hat - delta ** 2 / 2.0 + root


def g_hat_bounds(E_hat, delta):
    """(Ghat_min, Ghat_max) of the level set; empty level raises."""
    if E_hat < -delta - 1e-14:
        raise DomainError(f"E_hat={E_hat} below the minimum {-delta}")
    gm2, gp2 = g_hat_pm(E_hat, delta)
    G_max = np.sqrt(min(max(gp2, 0.0), 1.0))
    if E_hat <= delta:
        G_min = 0.0
    else:
        G_min = np.sqrt(max(gm2, 0.0))
    return float(G_min), float(G_max)


def g_plus(G_hat, E_hat, delta):
    """Upper branch g_+ = arccos((Ehat - Ghat^2)/(delta sqrt(1 - Ghat^2)))."""
    G_hat = np.asarray(G_hat, dtype=float)
    denom = delta * np.sqrt(np.maximum(0.0, 1.0 - G_hat ** 2))
    with np.errstate(divide="ignore", invalid="ignore"):
        u = np.where(denom > 0.0, (E_hat - G_hat ** 2) / np.where(denom > 0, denom, 1.0), 1.0)
    return np.arccos(np.clip(u, -1.0, 1.0))


def dg_dG(G_hat, E_hat, delta):
    """Derivative of g_+ along the curve (blows up at the turning points)."""
    gm2, gp2 = g_hat_pm(E_hat, delta)
    w = G_hat ** 2
    rad = (w - gm2) * (gp2 - w)
    return G_hat / np.sqrt(np.maximum(rad, 0.0)) * (2.0 - E_hat - w) / (1.0 - w)


@dataclass
class PortraitClassification:
    regime: str
    delta: float
    E_hat: float
    critical: list = field(default_factory=list)
    g_range: tuple = ()
    elongation: float = 0.0


def classify(E_hat, delta):
    """Exact case tag of the level set, switching at {-delta, delta, 1, 1+delta^2/4}."""
    check_delta(delta)
    top = e_hat_max(delta)
    if E_hat < -delta or E_hat > top:
        raise DomainError(f"E_hat={E_hat} outside [{-delta}, {top}]")
    crit = critical_points(delta)
    if E_hat == top:
        return PortraitClassification("maximum-point", delta, E_hat, crit)
    if E_hat == delta and delta != 1.0:
        return PortraitClassification("separatrix-0", delta, E_hat, crit)
    if E_hat == 1.0:
        # for delta = 1 the two separatrices coincide; the saddle tag wins
        tag = "separatrix-0" if delta == 1.0 else "curve-E=1"
        return PortraitClassification(tag, delta, E_hat, crit)
    if E_hat < min(delta, 1.0):
        w = float(np.arccos(np.clip(E_hat / delta, -1.0, 1.0)))
        return PortraitClassification("libration-pi", delta, E_hat, crit,
                                      g_range=(w, 2.0 * np.pi - w), elongation=w)
    if E_hat > 1.0:
        w = (2.0 / delta) * np.sqrt(E_hat - 1.0)
        return PortraitClassification("libration-0", delta, E_hat, crit,
                                      g_range=(-w, w), elongation=w)
    return PortraitClassification("rotation", delta, E_hat, crit,
                                  g_range=(0.0, 2.0 * np.pi))


def _clustered_grid(lo, hi, n):
    """Grid on [lo, hi] with square-root clustering at both endpoints."""
    u = np.linspace(0.0, 1.0, n)
    return lo + (hi - lo) * np.sin(0.5 * np.pi * u) ** 2


@dataclass
class LevelCurve:
    """Sampled level set in the (g, Ghat) plane with labeled branches."""

    E_hat: float
    delta: float
    points: np.ndarray          # closed polygon, columns (g, Ghat)
    closure: str                # 'loop', 'rotation', 'separatrix', 'branches', 'point'
    branches: dict = field(default_factory=dict)

    def residuals(self):
        g, G = self.points[:, 0], self.points[:, 1]
        return np.abs(e0_hat(G, g, self.delta) - self.E_hat)


def sample_level_curve(E_hat, delta, n_samples=256):
    """Sample the level set, gluing the arccos branches into closed curves."""
    check_delta(delta)
    top = e_hat_max(delta)
    if E_hat < -delta - 1e-14 or E_hat > top + 1e-14:
        raise DomainError("empty level set")
    if abs(E_hat - (-delta)) < 1e-14:
        pt = np.array([[np.pi, 0.0]])
        return LevelCurve(E_hat, delta, pt, "point", {"minimum": pt})
    if abs(E_hat - top) < 1e-14:
        gh = np.sqrt(1.0 - delta ** 2 / 4.0)
        pt = np.array([[0.0, gh]])
        return LevelCurve(E_hat, delta, pt, "point", {"maximum": pt})

    if E_hat == 1.0:
        # two analytic branches: Ghat = 1 (all g) and Ghat = sqrt(1 - delta^2 cos^2 g)
        # (restricted to |cos g| <= 1/delta when delta > 1); they meet at (pi/2, 1)
        g1 = np.linspace(0.0, 2.0 * np.pi, n_samples)
        b1 = np.column_stack([g1, np.ones_like(g1)])
        if delta <= 1.0:
            g2 = np.linspace(0.0, 2.0 * np.pi, n_samples)
        else:
            gc = np.arccos(1.0 / delta)
            g2 = np.linspace(gc, 2.0 * np.pi - gc, n_samples)
        G2 = np.sqrt(np.maximum(0.0, 1.0 - delta ** 2 * np.cos(g2) ** 2))
        b2 = np.column_stack([g2, G2])
        pts = np.vstack([b1, b2])
        return LevelCurve(E_hat, delta, pts, "branches",
                          {"G=1": b1, "G=sqrt(1-d^2cos^2 g)": b2})

    G_min, G_max = g_hat_bounds(E_hat, delta)
    Ggrid = _clustered_grid(G_min, G_max, n_samples)
    gup = g_plus(Ggrid, E_hat, delta)
    up = np.column_stack([gup, Ggrid])                    # branch g_+
    down = np.column_stack([2.0 * np.pi - gup[::-1], Ggrid[::-1]])   # branch g_-
    branches = {"g+": up, "g-": down}
    regime = classify(E_hat, delta).regime

    if regime == "rotation":
        pts = np.vstack([up, down])
        closure = "rotation"
    elif regime in ("libration-pi", "separatrix-0"):
        # crosses Ghat = 0 around g = pi: up, down, then the negative mirror
        neg_down = np.column_stack([2.0 * np.pi - gup, -Ggrid])
        neg_up = np.column_stack([gup[::-1], -Ggrid[::-1]])
        pts = np.vstack([up, down, neg_down, neg_up])
        closure = "separatrix" if regime == "separatrix-0" else "loop"
    elif regime == "libration-0" and G_min == 0.0:
        # crosses Ghat = 0 around g = 0 (delta > 1, 1 < E_hat < delta)
        left = np.column_stack([-gup[::-1], Ggrid[::-1]])
        neg_left = np.column_stack([-gup, -Ggrid])
        neg_right = np.column_stack([gup[::-1], -Ggrid[::-1]])
        pts = np.vstack([up, left, neg_left, neg_right])
        closure = "loop"
    else:
        # libration-0 loop with G_min > 0 around the maximum point
        left = np.column_stack([-gup[::-1], Ggrid[::-1]])
        pts = np.vstack([up, left])
        closure = "loop"
    return LevelCurve(E_hat, delta, pts, closure, branches)


def in_area_quadrature(E_hat, delta):
    """In[] via the branch quadrature; see actions.in_ext_quadrature."""
    from .actions import g0_hat_scaled
    return g0_hat_scaled(E_hat, delta)


def _mu_system_c2(L, G, g, J_t, E_t, r_prime, masses):
    m, M, mu = masses.m, masses.M, masses.mu
    e = np.sqrt(max(0.0, 1.0 - (G / L) ** 2))
    a = L * L / (m * m * M)
    q = a * (1.0 - e)
    dist = np.sqrt(r_prime ** 2 + 2.0 * r_prime * q * np.cos(g) + q * q)
    J = -(m ** 3) * M ** 2 / (2.0 * L * L) - mu * m * M / dist
    E = (G * G + m * m * M * r_prime * e * np.cos(g)
         + mu * m * m * M * r_prime * (r_prime + q * np.cos(g)) / dist)
    return J - J_t, E - E_t


def _mu_system_c1(L, G, ell, sigma, J_t, E_t, r_prime, masses):
    m, M, mu = masses.m, masses.M, masses.mu
    el = anomalies_from_mean(L, G, ell, masses)
    avr = el.a * el.varrho
    dist_sq = r_prime ** 2 - 2.0 * sigma * r_prime * avr * np.cos(el.nu) + avr ** 2
    dist = np.sqrt(dist_sq)
    J = -(m ** 3) * M ** 2 / (2.0 * L * L) - mu * m * M / dist
    E = (G * G - sigma * m * m * M * r_prime * el.e
         + mu * m * m * M * r_prime * (r_prime - sigma * avr * np.cos(el.nu)) / dist)
    return J - J_t, E - E_t


def _newton2(fun, z0, tol=1e-13, max_iter=40):
    z = np.array(z0, dtype=float)
    for _ in range(max_iter):
        f = np.array(fun(z))
        if np.max(np.abs(f)) < tol:
            return z
        h = 1e-7
        Jm = np.empty((2, 2))
        for j in range(2):
            zp, zm = z.copy(), z.copy()
            zp[j] += h
            zm[j] -= h
            Jm[:, j] = (np.array(fun(zp)) - np.array(fun(zm))) / (2.0 * h)
        try:
            step = np.linalg.solve(Jm, f)
        except np.linalg.LinAlgError:
            raise ConvergenceError("singular Jacobian in level-curve continuation")
        z = z - step
    f = np.array(fun(z))
    if np.max(np.abs(f)) < 1e-10:
        return z
    raise ConvergenceError(f"continuation Newton stalled at residual {np.max(np.abs(f)):.2e}")


@dataclass
class MuLevelCurve:
    """Projected level curve of the perturbed integral pair (J, E)."""

    kind: str                   # 'C1' (Lambda, ell plane) or 'C2' (g, G plane)
    params: np.ndarray          # the curve parameter (ell or g)
    Lambda: np.ndarray
    G: np.ndarray
    residuals: np.ndarray       # max |(J, E) residual| per point
    sigma: int


def mu_level_curves(J_target, E_target, r_prime, mu, sigma, masses,
                    n_samples=64, mu_floor=1e-5):
    """Continue the two projected level curves from mu = 0 by Newton in (Lambda, G).

    Steps mu up by factors of two from mu_floor, seeding each solve from the
    previous level.  masses.mu is overridden by the requested mu.
    """
    from .model import MassModel
    from .actions import L0_of_J

    if sigma not in (+1, -1):
        raise DomainError("sigma must be +1 or -1")
    L0 = L0_of_J(J_target, masses)
    delta = -2.0 * r_prime * J_target / (masses.m * masses.M)
    E_hat = E_target / L0 ** 2
    check_delta(delta)

    # mu ladder: geometric from <= mu_floor up to mu
    if mu <= 0.0:
        ladder = [0.0]
    else:
        k = max(0, int(np.ceil(np.log2(mu / mu_floor))))
        ladder = [mu * 2.0 ** (-j) for j in range(k, -1, -1)]

    # --- curve C2: parameter g, solve (Lambda, G)
    curve0 = sample_level_curve(E_hat, delta, n_samples=n_samples)
    # restrict to the g+ branch at positive Ghat, avoid turning points
    br = curve0.branches.get("g+")
    if br is None:
        raise DomainError("level set too degenerate for continuation")
    inner = br[2:-2]
    g_par = inner[:, 0]
    G_seed = inner[:, 1] * L0
    L_sol = np.full_like(g_par, L0)
    G_sol = G_seed.copy()
    for mu_j in ladder:
        mm = MassModel(m0=masses.m0, mu=mu_j, eps=masses.eps)
        for i, g in enumerate(g_par):
            fun = lambda z, g=g, mm=mm: _mu_system_c2(z[0], z[1], g, J_target,
                                                      E_target, r_prime, mm)
            L_sol[i], G_sol[i] = _newton2(fun, (L_sol[i], G_sol[i]))
    mm = MassModel(m0=masses.m0, mu=mu, eps=masses.eps)
    res2 = np.array([np.max(np.abs(_mu_system_c2(L_sol[i], G_sol[i], g_par[i],
                                                 J_target, E_target, r_prime, mm)))
                     for i in range(len(g_par))])
    c2 = MuLevelCurve("C2", g_par.copy(), L_sol.copy(), G_sol.copy(), res2, sigma)

    # --- curve C1: parameter ell, solve (Lambda, G) with g frozen at the sigma node
    ell_par = np.linspace(0.0, 2.0 * np.pi, n_samples, endpoint=False)
    cosg = -float(sigma)
    # seed G from the level equation at cos g = -sigma (the (GG) display)
    disc = delta ** 2 / 4.0 + 1.0 - E_hat
    if disc < 0.0:
        raise DomainError("no C1 seed: E_hat above the maximum")
    w = E_hat - delta ** 2 / 2.0 * cosg ** 2 - delta * cosg * np.sqrt(disc)
    if w <= 0.0:
        raise DomainError("no C1 seed: vanishing G on the node line")
    G1_seed = np.sqrt(w) * L0
    L1 = np.full_like(ell_par, L0)
    G1 = np.full_like(ell_par, G1_seed)
    for mu_j in ladder:
        mm = MassModel(m0=masses.m0, mu=mu_j, eps=masses.eps)
        for i, ell in enumerate(ell_par):
            fun = lambda z, ell=ell, mm=mm: _mu_system_c1(z[0], z[1], ell, sigma,
                                                          J_target, E_target,
                                                          r_prime, mm)
            L1[i], G1[i] = _newton2(fun, (L1[i], G1[i]))
    res1 = np.array([np.max(np.abs(_mu_system_c1(L1[i], G1[i], ell_par[i], sigma,
                                                 J_target, E_target, r_prime, mm)))
                     for i in range(len(ell_par))])
    c1 = MuLevelCurve("C1", ell_par, L1, G1, res1, sigma)
    return c1, c2


def hausdorff_distance(P, Q):
    """Symmetric Hausdorff distance between two planar point sets."""
    P = np.asarray(P, dtype=float)
    Q = np.asarray(Q, dtype=float)
    d2 = ((P[:, None, :] - Q[None, :, :]) ** 2).sum(axis=2)
    return float(max(np.sqrt(d2.min(axis=1)).max(), np.sqrt(d2.min(axis=0)).max()))
