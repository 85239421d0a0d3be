"""Masses, phase-space states, chart descriptors and shared validation."""

from dataclasses import dataclass, field

import numpy as np


class DomainError(ValueError):
    """Input outside the mathematical domain of an operation."""


class SingularityError(DomainError):
    """State on (or too close to) an excluded collision set."""


class HyperbolicError(DomainError):
    """Kepler energy is non-negative: no bound instantaneous ellipse."""


class ConvergenceError(RuntimeError):
    """An iterative solver failed to reach its tolerance."""


class HypothesisViolation(RuntimeError):
    """A numerically checked smallness hypothesis failed.

    Carries the name of the violated inequality and its measured margin.
    """

    def __init__(self, name, measured, bound):
        self.name = name
        self.measured = measured
        self.bound = bound
        super().__init__(f"{name}: measured {measured:.6e} violates bound {bound:.6e}")


@dataclass(frozen=True)
class MassModel:
    """Bare masses (m0, mu, eps) and the derived reduced-mass combinations.

    The two minor masses are m' = mu*m0 and m = eps*mu*m0.  All formulas in
    this package are written in the rescaled units where the gravitational
    constant is absorbed; the defaults take m0 = 1.
    """

    m0: float = 1.0
    mu: float = 0.0
    eps: float = 0.0

    def __post_init__(self):
        if self.m0 <= 0.0:
            raise DomainError(f"m0 must be > 0, got {self.m0}")
        if self.mu < 0.0 or self.eps < 0.0:
            raise DomainError("mass ratios mu, eps must be >= 0")

    # reduced masses; recomputed on access so they can never go stale
    @property
    def m(self):
        """Reduced mass of the inner pair: m0/(1 + eps*mu)."""
        return self.m0 / (1.0 + self.eps * self.mu)

    @property
    def M(self):
        """Gravity parameter of the inner pair: m0*(1 + eps*mu)."""
        return self.m0 * (1.0 + self.eps * self.mu)

    @property
    def m_prime(self):
        """Reduced mass of the outer pair: m0/(1 + mu)."""
        return self.m0 / (1.0 + self.mu)

    @property
    def M_prime(self):
        """Gravity parameter of the outer pair: m0*(1 + mu)."""
        return self.m0 * (1.0 + self.mu)

    @property
    def mass_inner(self):
        return self.eps * self.mu * self.m0

    @property
    def mass_outer(self):
        return self.mu * self.m0


def derive_reduced_masses(m0, mu, eps):
    """Build a MassModel; the reduced products m*M and m'*M' equal m0**2."""
    return MassModel(m0=float(m0), mu=float(mu), eps=float(eps))


def _as_vec3(v, name):
    a = np.asarray(v, dtype=float)
    if a.shape == (2,):
        a = np.array([a[0], a[1], 0.0])
    if a.shape != (3,):
        raise DomainError(f"{name} must be a 2- or 3-vector, got shape {a.shape}")
    return a


@dataclass
class CartesianState:
    """Heliocentric phase point (y', y, x', x) in rescaled units.

    Planar states carry a zero third component and dim == 2.
    """

    y_prime: np.ndarray
    y: np.ndarray
    x_prime: np.ndarray
    x: np.ndarray
    dim: int = 3

    def __post_init__(self):
        self.y_prime = _as_vec3(self.y_prime, "y_prime")
        self.y = _as_vec3(self.y, "y")
        self.x_prime = _as_vec3(self.x_prime, "x_prime")
        self.x = _as_vec3(self.x, "x")
        if self.dim not in (2, 3):
            raise DomainError("dim must be 2 or 3")

    @classmethod
    def planar(cls, y_prime, y, x_prime, x):
        s = cls(y_prime=y_prime, y=y, x_prime=x_prime, x=x, dim=2)
        for v in (s.y_prime, s.y, s.x_prime, s.x):
            if v[2] != 0.0:
                raise DomainError("planar state must have zero third components")
        return s

    def copy(self):
        return CartesianState(
            self.y_prime.copy(), self.y.copy(), self.x_prime.copy(), self.x.copy(), self.dim
        )

    def flat(self):
        return np.concatenate([self.y_prime, self.y, self.x_prime, self.x])


def validate_state(s, min_separation=1e-12):
    """Raise SingularityError unless the collision exclusions hold.

    The excluded set is {x = 0, x' = 0, x = x'}, checked against the
    configurable minimum separation (the source has no numerical floor).
    """
    if np.linalg.norm(s.x) < min_separation:
        raise SingularityError("x = 0: inner body at the primary")
    if np.linalg.norm(s.x_prime) < min_separation:
        raise SingularityError("x' = 0: outer body at the primary")
    if np.linalg.norm(s.x - s.x_prime) < min_separation:
        raise SingularityError("x = x': minor-body collision")


@dataclass(frozen=True)
class ChartBox:
    """Real box plus analyticity widths for truncated-series norms.

    Centers/half-widths describe the real chart in (I, y, x); the widths
    (r, rho, xi, s, delta) are the complex extensions in y, I, x, the
    angles, and the (p, q) ball respectively.
    """

    I_center: tuple = ()
    I_width: tuple = ()
    y_center: float = 0.0
    y_width: float = 0.0
    x_width: float = 0.0
    r: float = 0.1
    rho: float = 0.1
    xi: float = 0.1
    s: float = 0.5
    delta: float = 0.1

    def __post_init__(self):
        for name in ("r", "rho", "xi", "s", "delta"):
            if getattr(self, name) <= 0.0:
                raise DomainError(f"chart width {name} must be > 0")
        if len(self.I_center) != len(self.I_width):
            raise DomainError("I_center and I_width must have equal length")
        if any(w < 0 for w in self.I_width) or self.y_width < 0 or self.x_width < 0:
            raise DomainError("box half-widths must be >= 0")

    @property
    def x_sup(self):
        """sup |x| over the complexified x-domain."""
        return self.x_width + self.xi

    def shrunk(self, dr, drho, dxi, ds, ddelta):
        """New chart with analyticity widths reduced by the given amounts."""
        return ChartBox(
            I_center=self.I_center,
            I_width=self.I_width,
            y_center=self.y_center,
            y_width=self.y_width,
            x_width=self.x_width,
            r=self.r - dr,
            rho=self.rho - drho,
            xi=self.xi - dxi,
            s=self.s - ds,
            delta=self.delta - ddelta,
        )
