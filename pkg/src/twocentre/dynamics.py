"""Numerical flows of the two-centre and three-body Hamiltonians."""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .model import CartesianState, DomainError, validate_state
from .integrals import integral_values, IntegralValues

CSV_COLUMNS = ("t", "yp1", "yp2", "y1", "y2", "xp1", "xp2", "x1", "x2",
               "J0", "J", "E", "H", "min_separation")


@dataclass
class IntegratorConfig:
    """Adaptive RK8(7) (dop853) or fixed-step Strang splitting."""

    method: str = "dop853"
    rtol: float = 1e-12
    atol: float = 1e-12
    t_final: float = 10.0
    n_samples: int = 1000
    min_separation: float = 1e-6
    fixed_step: float = 1e-3

    def __post_init__(self):
        if self.rtol <= 0 or self.atol <= 0:
            raise DomainError("tolerances must be > 0")
        if self.method not in ("dop853", "splitting"):
            raise DomainError(f"unknown integrator method {self.method!r}")


@dataclass
class TrajectorySample:
    t: float
    state: CartesianState
    integrals: IntegralValues
    min_separation: float


@dataclass
class Trajectory:
    samples: list
    truncated: bool = False
    truncation_reason: str = ""

    @property
    def times(self):
        return np.array([s.t for s in self.samples])

    def series(self, name):
        return np.array([getattr(s.integrals, name) for s in self.samples])


def two_centre_rhs(masses, x_prime):
    """Hamilton equations of J with the second centre frozen at x_prime."""
    m, M, mu = masses.m, masses.M, masses.mu
    mM = m * M
    mumM = mu * mM
    xp1, xp2 = float(x_prime[0]), float(x_prime[1])

    def rhs(t, s):
        y1, y2, x1, x2 = s
        r3 = (x1 * x1 + x2 * x2) ** 1.5
        d1, d2 = x1 - xp1, x2 - xp2
        d3 = (d1 * d1 + d2 * d2) ** 1.5
        return [
            -mM * x1 / r3 - mumM * d1 / d3,
            -mM * x2 / r3 - mumM * d2 / d3,
            y1 / m,
            y2 / m,
        ]

    return rhs


def three_body_rhs(masses, drop_eps2_group=False):
    """Hamilton equations of the rescaled planar three-body Hamiltonian.

    State layout: (yp1, yp2, y1, y2, xp1, xp2, x1, x2).  With
    drop_eps2_group the eps^2 terms are removed from the equations of
    (y, x, x'), leaving x' frozen and y' driven by quadrature only.
    """
    m, M, mp, Mp = masses.m, masses.M, masses.m_prime, masses.M_prime
    mu, eps, m0 = masses.mu, masses.eps, masses.m0
    emM = eps * m * M
    emumM = eps * mu * m * M
    mpMp = mp * Mp
    e2 = 0.0 if drop_eps2_group else eps * eps

    def rhs(t, s):
        yp1, yp2, y1, y2, xp1, xp2, x1, x2 = s
        r3 = (x1 * x1 + x2 * x2) ** 1.5
        rp3 = (xp1 * xp1 + xp2 * xp2) ** 1.5
        d1, d2 = x1 - xp1, x2 - xp2
        d3 = (d1 * d1 + d2 * d2) ** 1.5
        # dx/dt = dH/dy ; dy/dt = -dH/dx
        dyp1 = -mpMp * xp1 / rp3 + emumM * d1 / d3
        dyp2 = -mpMp * xp2 / rp3 + emumM * d2 / d3
        dy1 = -emM * x1 / r3 - emumM * d1 / d3
        dy2 = -emM * x2 / r3 - emumM * d2 / d3
        dxp1 = e2 * (yp1 / mp + mu * y1 / m0)
        dxp2 = e2 * (yp2 / mp + mu * y2 / m0)
        dx1 = eps * y1 / m + e2 * mu * yp1 / m0
        dx2 = eps * y2 / m + e2 * mu * yp2 / m0
        return [dyp1, dyp2, dy1, dy2, dxp1, dxp2, dx1, dx2]

    return rhs


def check_gradients(rhs, s0, h=1e-6, hamiltonian=None):
    """Relative mismatch between rhs and central differences of `hamiltonian`.

    Used as the analytic-gradient self-check at t = 0; returns the worst
    relative error over the symplectic pairing of the flattened state.
    """
    if hamiltonian is None:
        return 0.0
    s0 = np.asarray(s0, dtype=float)
    npair = len(s0) // 2
    grad = np.zeros_like(s0)
    for i in range(len(s0)):
        sp, sm = s0.copy(), s0.copy()
        sp[i] += h
        sm[i] -= h
        grad[i] = (hamiltonian(sp) - hamiltonian(sm)) / (2.0 * h)
    f = np.asarray(rhs(0.0, s0))
    # momenta first: dy/dt = -dH/dx, dx/dt = +dH/dy
    expected = np.concatenate([-grad[npair:], grad[:npair]])
    scale = np.max(np.abs(f)) + np.max(np.abs(expected)) + 1e-30
    return float(np.max(np.abs(f - expected)) / scale)


def _strang_kick_drift(masses, x_prime, step):
    """One fixed Strang step of the two-centre splitting T(y) + V(x)."""
    m, M, mu = masses.m, masses.M, masses.mu
    mM, mumM = m * M, mu * m * M
    xp1, xp2 = float(x_prime[0]), float(x_prime[1])

    def accel(x1, x2):
        r3 = (x1 * x1 + x2 * x2) ** 1.5
        d1, d2 = x1 - xp1, x2 - xp2
        d3 = (d1 * d1 + d2 * d2) ** 1.5
        return (-mM * x1 / r3 - mumM * d1 / d3,
                -mM * x2 / r3 - mumM * d2 / d3)

    def step_fn(s):
        y1, y2, x1, x2 = s
        x1 += 0.5 * step * y1 / m
        x2 += 0.5 * step * y2 / m
        a1, a2 = accel(x1, x2)
        y1 += step * a1
        y2 += step * a2
        x1 += 0.5 * step * y1 / m
        x2 += 0.5 * step * y2 / m
        return [y1, y2, x1, x2]

    return step_fn


def _collect(masses, ts, states8, truncated, reason):
    samples = []
    for t, row in zip(ts, states8):
        st = CartesianState.planar(
            y_prime=[row[0], row[1]], y=[row[2], row[3]],
            x_prime=[row[4], row[5]], x=[row[6], row[7]])
        sep = float(np.linalg.norm(st.x - st.x_prime))
        samples.append(TrajectorySample(
            t=float(t), state=st, integrals=integral_values(st, masses),
            min_separation=sep))
    return Trajectory(samples=samples, truncated=truncated, truncation_reason=reason)


def flow_two_centre(s0, masses, cfg, gradient_check=True):
    """Flow of the two-centre Hamiltonian J; x' and y' are carried frozen."""
    validate_state(s0)
    rhs = two_centre_rhs(masses, s0.x_prime)
    z0 = [s0.y[0], s0.y[1], s0.x[0], s0.x[1]]
    if gradient_check:
        from .integrals import two_centre_energy

        def ham(z):
            return two_centre_energy([z[0], z[1], 0], [z[2], z[3], 0],
                                     s0.x_prime, masses)
        rel = check_gradients(rhs, z0, hamiltonian=ham)
        if rel > 1e-6:
            raise DomainError(f"two-centre gradient self-check failed: {rel:.2e}")

    floor = cfg.min_separation * np.linalg.norm(s0.x_prime)

    def close_approach(t, z):
        return math.hypot(z[2] - s0.x_prime[0], z[3] - s0.x_prime[1]) - floor
    close_approach.terminal = True
    close_approach.direction = -1

    t_eval = np.linspace(0.0, cfg.t_final, cfg.n_samples + 1)
    if cfg.method == "splitting":
        step_fn = _strang_kick_drift(masses, s0.x_prime, cfg.fixed_step)
        ts, rows, z = [0.0], [list(z0)], list(z0)
        n_steps = int(round(cfg.t_final / cfg.fixed_step))
        stride = max(1, n_steps // max(1, cfg.n_samples))
        truncated = False
        for i in range(1, n_steps + 1):
            z = step_fn(z)
            if math.hypot(z[2] - s0.x_prime[0], z[3] - s0.x_prime[1]) < floor:
                truncated = True
                break
            if i % stride == 0 or i == n_steps:
                ts.append(i * cfg.fixed_step)
                rows.append(list(z))
        sol_t, sol_rows = np.array(ts), rows
        reason = "close approach below separation floor" if truncated else ""
    else:
        sol = solve_ivp(rhs, (0.0, cfg.t_final), z0, method="DOP853",
                        rtol=cfg.rtol, atol=cfg.atol, t_eval=t_eval,
                        events=close_approach, dense_output=False)
        truncated = sol.status == 1
        reason = "close approach below separation floor" if truncated else ""
        sol_t, sol_rows = sol.t, sol.y.T
    states8 = [[s0.y_prime[0], s0.y_prime[1], r[0], r[1],
                s0.x_prime[0], s0.x_prime[1], r[2], r[3]] for r in sol_rows]
    return _collect(masses, sol_t, states8, truncated, reason)


def flow_three_body(s0, masses, cfg, drop_eps2_group=False, gradient_check=True):
    """Flow of the full rescaled three-body Hamiltonian H."""
    validate_state(s0)
    rhs = three_body_rhs(masses, drop_eps2_group=drop_eps2_group)
    z0 = list(s0.y_prime[:2]) + list(s0.y[:2]) + list(s0.x_prime[:2]) + list(s0.x[:2])
    if gradient_check and not drop_eps2_group:
        from .integrals import full_hamiltonian

        def ham(z):
            st = CartesianState.planar([z[0], z[1]], [z[2], z[3]],
                                       [z[4], z[5]], [z[6], z[7]])
            return full_hamiltonian(st, masses)
        rel = check_gradients(rhs, z0, hamiltonian=ham)
        if rel > 1e-6:
            raise DomainError(f"three-body gradient self-check failed: {rel:.2e}")

    floor = cfg.min_separation * np.linalg.norm(s0.x_prime)

    def close_approach(t, z):
        return math.hypot(z[6] - z[4], z[7] - z[5]) - floor
    close_approach.terminal = True
    close_approach.direction = -1

    t_eval = np.linspace(0.0, cfg.t_final, cfg.n_samples + 1)
    sol = solve_ivp(rhs, (0.0, cfg.t_final), z0, method="DOP853",
                    rtol=cfg.rtol, atol=cfg.atol, t_eval=t_eval,
                    events=close_approach)
    truncated = sol.status == 1
    reason = "close approach below separation floor" if truncated else ""
    return _collect(masses, sol.t, sol.y.T, truncated, reason)


@dataclass
class DriftReport:
    max_drift: float
    normalized_max_drift: float
    t: np.ndarray = field(repr=False)
    drift: np.ndarray = field(repr=False)

    def drift_at(self, t):
        return float(np.interp(t, self.t, self.drift))


def euler_drift_report(traj, masses=None):
    """Sup over samples of |E(t) - E(0)|, absolute and normalized by m^2 M r'."""
    if not traj.samples:
        raise DomainError("empty trajectory")
    E = traj.series("E")
    drift = np.abs(E - E[0])
    s0 = traj.samples[0]
    if masses is None:
        norm = 1.0
    else:
        norm = masses.m ** 2 * masses.M * np.linalg.norm(s0.state.x_prime)
    return DriftReport(max_drift=float(drift.max()),
                       normalized_max_drift=float(drift.max() / norm),
                       t=traj.times, drift=drift)


def outer_period(masses, r_prime):
    """Period of the circular outer orbit of radius r' under H."""
    return 2.0 * np.pi * np.sqrt(r_prime ** 3 / masses.M_prime) / masses.eps


def inner_period_two_centre(masses, a):
    """Kepler period of the inner ellipse under the J-flow (mu = 0 part)."""
    return 2.0 * np.pi * np.sqrt(a ** 3 / masses.M)


def inner_period_three_body(masses, a):
    """Kepler period of the inner ellipse under the eps-scaled H-flow."""
    return inner_period_two_centre(masses, a) / masses.eps


def circular_three_body_state(masses, a, r_prime, inner_phase=0.0,
                              outer_phase=0.0, inner_ecc=0.0, outer_ecc=0.0):
    """Planar state with inner/outer bodies on (near-)circular orbits.

    Velocities follow the leading Kepler balance of each group of H;
    eccentricities perturb the tangential speeds at perihelion.
    """
    m, M, mp, Mp, eps = masses.m, masses.M, masses.m_prime, masses.M_prime, masses.eps
    ci, si = np.cos(inner_phase), np.sin(inner_phase)
    co, so = np.cos(outer_phase), np.sin(outer_phase)
    x = np.array([a * ci, a * si, 0.0])
    v_in = np.sqrt(M / a) * np.sqrt(1.0 + inner_ecc)
    y = m * v_in * np.array([-si, ci, 0.0])
    x_prime = np.array([r_prime * co, r_prime * so, 0.0])
    v_out = np.sqrt(Mp / r_prime) * np.sqrt(1.0 + outer_ecc)
    y_prime = (mp / eps) * v_out * np.array([-so, co, 0.0])
    return CartesianState.planar(y_prime[:2], y[:2], x_prime[:2], x[:2])


def write_trajectory_csv(path, traj):
    """CSV sink with the documented column order."""
    with open(path, "w") as fh:
        fh.write(",".join(CSV_COLUMNS) + "\n")
        for s in traj.samples:
            st = s.state
            row = [s.t, st.y_prime[0], st.y_prime[1], st.y[0], st.y[1],
                   st.x_prime[0], st.x_prime[1], st.x[0], st.x[1],
                   s.integrals.J0, s.integrals.J, s.integrals.E, s.integrals.H,
                   s.min_separation]
            fh.write(",".join("%.17g" % v for v in row) + "\n")
