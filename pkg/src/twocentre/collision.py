"""Focal-equation collision test and the Euler-integral exclusion predicate."""

from dataclasses import dataclass

import numpy as np

from .model import CartesianState, DomainError
from .integrals import euler_integral_cartesian, euler_integral_planar_k

DEFAULT_SAFETY = 2.0


@dataclass
class CollisionVerdict:
    margin: float
    threshold: float
    excluded: bool
    focal_residual: float
    E: float


def focal_radius(Lambda, G, g_peri, masses):
    """Radius r' at which the instantaneous ellipse meets the outer body.

    The focal equation r' = p/(1 + e cos(pi - gbar)) with conic parameter
    p = G^2/(m^2 M); no intersection when the denominator is <= 0.
    """
    if not 0 < G <= Lambda:
        raise DomainError("need 0 < G <= Lambda")
    m, M = masses.m, masses.M
    e = np.sqrt(max(0.0, 1.0 - (G / Lambda) ** 2))
    p = G * G / (m * m * M)
    denom = 1.0 - e * np.cos(g_peri)
    if denom <= 0.0:
        raise DomainError("ellipse does not intersect the r' circle direction "
                          f"(denominator {denom:.3e} <= 0)")
    return float(p / denom), float(p)


def _euler_and_geometry(state_or_pk, masses):
    if isinstance(state_or_pk, CartesianState):
        E = euler_integral_cartesian(state_or_pk.y, state_or_pk.x,
                                     state_or_pk.x_prime, masses)
        r_prime = float(np.linalg.norm(state_or_pk.x_prime))
        from .kepler import elements_from_cartesian
        el, _, _ = elements_from_cartesian(state_or_pk.y, state_or_pk.x, masses,
                                           circular_safe=True)
        Lambda, G, g = el.Lambda, el.G, el.g_peri
    else:
        pk = state_or_pk
        E = euler_integral_planar_k(pk, masses)
        r_prime, Lambda, G, g = pk.r_prime, pk.Lambda, pk.G, pk.g_peri
    return E, r_prime, Lambda, G, g


def exclusion_verdict(state_or_pk, masses, safety=DEFAULT_SAFETY):
    """Corollary-style exclusion: margin |E - m^2 M r'| vs mu m^2 M r'."""
    if safety < 1.0:
        raise DomainError("safety factor must be >= 1")
    E, r_prime, Lambda, G, g = _euler_and_geometry(state_or_pk, masses)
    m2M = masses.m ** 2 * masses.M
    margin = abs(E - m2M * r_prime)
    threshold = masses.mu * m2M * r_prime
    try:
        rc, _ = focal_radius(Lambda, G, g, masses)
        focal_residual = abs(r_prime - rc)
    except DomainError:
        focal_residual = float("inf")
    return CollisionVerdict(margin=float(margin), threshold=float(threshold),
                            excluded=bool(margin > safety * threshold),
                            focal_residual=float(focal_residual), E=float(E))


@dataclass
class ExclusionSweep:
    verdicts: list
    entered_band: bool
    min_focal_residual: float
    min_separation: float
    min_margin: float
    max_margin_decay: float


def sweep_exclusion(traj, masses, safety=DEFAULT_SAFETY):
    """Per-sample verdicts along a trajectory plus cross-validation extrema."""
    if not traj.samples:
        raise DomainError("empty trajectory")
    verdicts = []
    for s in traj.samples:
        verdicts.append(exclusion_verdict(s.state, masses, safety=safety))
    margins = np.array([v.margin for v in verdicts])
    return ExclusionSweep(
        verdicts=verdicts,
        entered_band=bool(any(not v.excluded for v in verdicts)),
        min_focal_residual=float(min(v.focal_residual for v in verdicts)),
        min_separation=float(min(s.min_separation for s in traj.samples)),
        min_margin=float(margins.min()),
        max_margin_decay=float(margins[0] - margins.min()),
    )


def write_verdict_csv(path, traj, masses, safety=DEFAULT_SAFETY):
    """CSV sink: (t, E, margin, threshold, excluded, min_separation)."""
    with open(path, "w") as fh:
        fh.write("t,E,margin,threshold,excluded,min_separation\n")
        for s in traj.samples:
            v = exclusion_verdict(s.state, masses, safety=safety)
            fh.write("%.17g,%.17g,%.17g,%.17g,%d,%.17g\n"
                     % (s.t, v.E, v.margin, v.threshold, int(v.excluded),
                        s.min_separation))
