"""Small-divisor-free homological solver, Lie queues, iterative steps, budgets."""

import math
from dataclasses import dataclass, field

import numpy as np

from .model import DomainError, HypothesisViolation
from .series import TaylorFourierSeries, FrequencyData, poisson_bracket


def default_cbar(n, m):
    """Queue-convergence constant; overridable configuration parameter."""
    return 2.0 ** (n + 2 * m + 1)


def default_ctilde(n, m):
    return 162.0 * default_cbar(n, m)


def default_cn(n, m):
    return 81.0 * default_ctilde(n, m)


def apply_diagonal(phi, freq):
    """D_omega phi = omega_y d_x phi + lambda_khj phi (termwise)."""
    out = phi.derivative("x") * freq.omega_y
    extra = TaylorFourierSeries(phi.n, phi.m, phi.chart, freq)
    for key, c in phi.terms.items():
        k, h, j = key[0], key[1], key[2]
        lam = freq.lam(k, h, j)
        if lam != 0.0:
            extra.terms[key] = extra.terms.get(key, 0.0) + lam * c
    return out + extra


def _poly_antiderivative_coeffs(b, beta):
    """Coefficients Q_i of int tau^b e^(beta tau) dtau = e^(beta tau) sum Q_i tau^i."""
    return [(-1.0) ** (b - i) * math.factorial(b) / math.factorial(i)
            * beta ** (-(b + 1 - i)) for i in range(b + 1)]


def homological_solve(f_tilde, freq, tail_tol=1e-18, deg_cap=64):
    """Solve omega_y d_x phi + lambda phi = f_tilde with phi(x=0) = 0.

    Small divisors never appear: per term the substitution
    phi = exp(gamma x) u(x) reduces the integral formula to the recursion
    (i+1) u_{i+1} = (c/omega_y) delta_{i,b} - beta u_i,  beta = gamma +
    lambda/omega_y, which is evaluated exactly and truncated once the tail
    is below tail_tol relative (the cancellation-free form of the closed
    antiderivative; see README).  When |beta| X >= 1 the explicit
    exponential antiderivative is used instead and the representation is
    exact.  The truncation remainder norm is reported in discarded_mass.
    """
    if len(f_tilde.average_part().terms) != 0:
        raise DomainError("homological input must be zero-average")
    wy = freq.omega_y
    chart = f_tilde.chart
    X = chart.x_sup
    phi = TaylorFourierSeries(f_tilde.n, f_tilde.m, chart, freq)
    tail_mass = 0.0
    for key, c in f_tilde.terms.items():
        k, h, j, aI, ay, b, dJ, dI = key
        lam = freq.lam(k, h, j)
        gamma = freq.exponent_value(dJ, dI)
        beta = gamma + lam / wy
        dJ_lam = tuple(hi - ji for hi, ji in zip(h, j))
        dI_lam = tuple(k)
        lattice_zero = (dJ_lam == dJ) and (dI_lam == tuple(dI))
        if lattice_zero or beta == 0.0:
            # resonant exponential: the integral grows one polynomial degree
            phi.add_term(c / (wy * (b + 1)), k, h, j, aI, ay, b + 1, dJ, dI)
            continue
        if abs(beta) * X >= 1.0:
            # exponential antiderivative, free of cancellation at this size
            Q = _poly_antiderivative_coeffs(b, beta)
            for i, qi in enumerate(Q):
                phi.add_term(c / wy * qi, k, h, j, aI, ay, i, dJ, dI)
            phi.add_term(-c / wy * Q[0], k, h, j, aI, ay, 0, dJ_lam, dI_lam)
            continue
        # stable power-series branch: u' + beta u = (c/wy) x^b, u(0) = 0
        base = abs(c / wy) * X ** (b + 1) / (b + 1)
        u_cur = 0.0 + 0.0j
        D = 0
        for i in range(deg_cap):
            u_cur = ((c / wy if i == b else 0.0) - beta * u_cur) / (i + 1.0)
            D = i + 1
            if u_cur != 0.0:
                phi.add_term(u_cur, k, h, j, aI, ay, D, dJ, dI)
            if D > b and abs(u_cur) * X ** D < tail_tol * max(base, 1e-300):
                break
        # truncation violates the x^D coefficient equation by beta u_D;
        # the residual is omega_y beta u_D x^D e^{gamma x}: report its mass
        tail_term = TaylorFourierSeries(f_tilde.n, f_tilde.m, chart, freq)
        tail_term.add_term(wy * beta * u_cur, k, h, j, aI, ay, D, dJ, dI)
        tail_mass += tail_term.norm()
    phi.discarded_mass += tail_mass
    return phi


def homological_residual(phi, f_tilde, freq):
    """Norm of omega_y d_x phi + lambda phi - f_tilde (zero on the ring)."""
    return (apply_diagonal(phi, freq) - f_tilde).norm()


def lie_derivative(phi, g):
    return poisson_bracket(phi, g)


def lie_queue(phi, g, h_index=0, tol=1e-16, j_max=40, k_max=None, deg_max=None):
    """Queue Phi_h g = sum_{j >= h} L_phi^j g / j! with a geometric-tail certificate.

    Terms are summed until their norm falls below tol * ||g||; raises when
    the term ratios fail to contract by j_max.
    """
    gnorm = g.norm()
    if gnorm == 0.0:
        return g.copy(), {"converged": True, "terms": 0, "tail_bound": 0.0}
    out = TaylorFourierSeries(g.n, g.m, g.chart, g.freq or phi.freq)
    Lj = g.copy()
    jfact = 1.0
    ratios = []
    prev_term_norm = None
    for j in range(0, j_max + 1):
        if j > 0:
            Lj = poisson_bracket(phi, Lj)
            if k_max is not None or deg_max is not None:
                out.discarded_mass += Lj.truncate(k_max=k_max, deg_max=deg_max)
            jfact *= j
        term_norm = Lj.norm() / jfact
        if prev_term_norm is not None and prev_term_norm > 0:
            ratios.append(term_norm / prev_term_norm)
        prev_term_norm = term_norm
        if j >= h_index:
            out = out + Lj * (1.0 / jfact)
        if j >= h_index and term_norm < tol * gnorm:
            tail = term_norm * (1.0 if not ratios else
                                min(0.999, max(ratios[-1], 0.0)) /
                                max(1e-30, 1.0 - min(0.999, ratios[-1])))
            return out, {"converged": True, "terms": j + 1, "tail_bound": tail}
    if ratios and ratios[-1] < 0.9:
        tail = prev_term_norm * ratios[-1] / (1.0 - ratios[-1])
        return out, {"converged": True, "terms": j_max + 1, "tail_bound": tail}
    raise HypothesisViolation("lie_queue geometric contraction",
                              ratios[-1] if ratios else float("inf"), 1.0)


@dataclass
class StepCertificate:
    """Measured inequalities and norms of one iterative step."""

    checks: dict = field(default_factory=dict)
    norms: dict = field(default_factory=dict)
    widths_before: tuple = ()
    widths_after: tuple = ()
    discarded_mass: float = 0.0

    def ok(self):
        return all(v["satisfied"] for v in self.checks.values())

    def margin(self, name):
        return self.checks[name]["margin"]


def _check(cert, name, measured, bound, strict=True):
    sat = measured < bound if strict else measured <= bound
    cert.checks[name] = {"measured": float(measured), "bound": float(bound),
                         "margin": float(bound / measured) if measured > 0 else float("inf"),
                         "satisfied": bool(sat)}
    if not sat:
        raise HypothesisViolation(name, measured, bound)


def iterative_step(h0, g, f, freq, shrink=None, ctilde=None,
                   k_max=None, deg_max=12, queue_tol=1e-16):
    """One normal-form step: solve, flow by the time-one map, re-collect.

    Returns (g_plus, f_plus, phi, certificate) on the shrunk chart, where
    g_plus = g + average(f) and f_plus is the transformed remainder
    f_tilde + {phi, h0} + Phi_2(h0) + Phi_1(g) + Phi_1(f).
    """
    chart = f.chart
    n, m = f.n, f.m
    if ctilde is None:
        ctilde = default_ctilde(n, m)
    if shrink is None:
        shrink = (chart.r / 6.0, chart.rho / 6.0, chart.xi / 6.0,
                  chart.s / 9.0, chart.delta / 9.0)
    rp, rhop, xip, sp, deltap = shrink
    cert = StepCertificate(widths_before=(chart.r, chart.rho, chart.xi,
                                          chart.s, chart.delta))
    X = chart.x_sup
    wy = abs(freq.omega_y)
    ratio_I = max([abs(w) for w in freq.omega_I], default=0.0) / wy
    ratio_J = max([abs(w) for w in freq.omega_J], default=0.0) / wy

    _check(cert, "ineq1: 2r' < r", 2 * rp, chart.r)
    _check(cert, "ineq1: 2rho' < rho", 2 * rhop, chart.rho)
    _check(cert, "ineq1: 2xi' < xi", 2 * xip, chart.xi)
    _check(cert, "ineq2: 3s' < s", 3 * sp, chart.s)
    _check(cert, "ineq2: 3delta' < delta", 3 * deltap, chart.delta)
    _check(cert, "ineq2: X|omega_I/omega_y| < s'", X * ratio_I, sp)
    _check(cert, "ineq2: X|omega_J/omega_y| < delta'/delta",
           X * ratio_J, deltap / chart.delta)

    f_bar = f.average_part()
    f_tilde = f.offaverage_part()
    d = min(rhop * sp, rp * xip, deltap ** 2)
    smallness = ctilde * (X / d) * (f_tilde.norm() / wy)
    _check(cert, "smallness: ctilde X/d ||f~/omega_y|| < 1", smallness, 1.0)

    phi = homological_solve(f_tilde, freq)
    cert.norms["f"] = f.norm()
    cert.norms["f_tilde"] = f_tilde.norm()
    cert.norms["phi"] = phi.norm()
    cert.norms["homological_residual"] = homological_residual(phi, f_tilde, freq)

    residual_h0 = poisson_bracket(phi, h0) + f_tilde      # freezing error R(phi)
    q2_h0, c2 = lie_queue(phi, h0, h_index=2, tol=queue_tol,
                          k_max=k_max, deg_max=deg_max)
    q1_g, c1g = lie_queue(phi, g, h_index=1, tol=queue_tol,
                          k_max=k_max, deg_max=deg_max)
    q1_f, c1f = lie_queue(phi, f, h_index=1, tol=queue_tol,
                          k_max=k_max, deg_max=deg_max)
    f_plus = residual_h0 + q2_h0 + q1_g + q1_f
    discarded = f_plus.truncate(k_max=k_max, deg_max=deg_max)
    f_plus.prune(1e-18 * max(1.0, f_plus.norm()))
    cert.discarded_mass = discarded + q2_h0.discarded_mass \
        + q1_g.discarded_mass + q1_f.discarded_mass

    new_chart = chart.shrunk(2 * rp, 2 * rhop, 2 * xip, 3 * sp, 3 * deltap)
    g_plus = g + f_bar
    for s in (g_plus, f_plus, phi):
        s.chart = new_chart
    cert.widths_after = (new_chart.r, new_chart.rho, new_chart.xi,
                         new_chart.s, new_chart.delta)
    cert.norms["f_plus"] = f_plus.norm()
    cert.norms["f_plus_tilde"] = f_plus.offaverage_part().norm()
    cert.norms["queue_tails"] = c2["tail_bound"] + c1g["tail_bound"] + c1f["tail_bound"]
    return g_plus, f_plus, phi, cert


def normal_form_N(h0, f, freq, chart, N, cn=None, k_max=None, deg_max=12):
    """N iterative steps with the width schedule of the iteration proof.

    Returns (g_N, f_N, certificates); on hypothesis failure at step j the
    partial result with j - 1 certified steps is returned and the failure
    is recorded in the last certificate.
    """
    n, m = f.n, f.m
    if cn is None:
        cn = default_cn(n, m)
    g = TaylorFourierSeries.zero(n, m, chart, freq)
    certs = []
    # numerically checked engine assumptions (the N-step variants)
    X = chart.x_sup
    wy = abs(freq.omega_y)
    ratio_I = max([abs(w) for w in freq.omega_I], default=0.0) / wy
    ratio_J = max([abs(w) for w in freq.omega_J], default=0.0) / wy
    d = min(chart.rho * chart.s, chart.r * chart.xi, chart.delta ** 2)
    assumptions = {
        "4 N X |omega_I/omega_y| < s": 4 * N * X * ratio_I < chart.s,
        "4 N X |omega_J/omega_y| < 1": 4 * N * X * ratio_J < 1.0,
        "c_nm N X/d ||f0/omega_y|| < 1": cn * N * (X / d) * f.norm() / wy < 1.0,
    }
    current_f = f
    current_h0 = h0
    for j in range(N):
        if j == 0:
            shrink = (chart.r / 6.0, chart.rho / 6.0, chart.xi / 6.0,
                      chart.s / 9.0, chart.delta / 9.0)
        else:
            shrink = (chart.r / (6.0 * N), chart.rho / (6.0 * N),
                      chart.xi / (6.0 * N), chart.s / (9.0 * N),
                      chart.delta / (9.0 * N))
        try:
            g, current_f, phi, cert = iterative_step(
                current_h0, g, current_f, freq, shrink=shrink,
                k_max=k_max, deg_max=deg_max)
        except HypothesisViolation as exc:
            cert = StepCertificate()
            cert.checks["failure"] = {"measured": exc.measured,
                                      "bound": exc.bound, "margin": 0.0,
                                      "satisfied": False}
            certs.append(cert)
            return g, current_f, {"steps": certs, "assumptions": assumptions,
                                  "certified_steps": j, "failed": exc.name}
        current_h0 = current_h0.copy()
        current_h0.chart = current_f.chart
        certs.append(cert)
    return g, current_f, {"steps": certs, "assumptions": assumptions,
                          "certified_steps": N, "failed": None}


@dataclass
class StabilityBudget:
    """Constant table of the stability-time theorem."""

    a: float
    M0: float
    M1: float
    M: float
    M0p: float
    E: float
    rho: float
    s: float
    delta: float
    Delta: float
    eps0: float
    p_star: float
    c: float
    epsilon: float
    epsilon_prime: float
    N: int
    T1: float
    T_exp: float
    T0: float
    t0_companion: float
    verdicts: dict

    def summary_lines(self):
        out = ["stability budget:"]
        for name in ("a", "M0", "M1", "M", "M0p", "E", "rho", "s", "delta",
                     "Delta", "eps0", "p_star", "c", "epsilon",
                     "epsilon_prime"):
            out.append(f"  {name} = {getattr(self, name):.6e}")
        out.append(f"  N = {self.N}")
        for name in ("T1", "T_exp", "T0", "t0_companion"):
            out.append(f"  {name} = {getattr(self, name):.6e}")
        for k, v in self.verdicts.items():
            out.append(f"  verdict[{k}] = {v}")
        return out


def stability_budget(a, M0, M1, M, M0p, E, rho, s, delta, Delta, eps0,
                     p_star=None, c_n=None, n=2):
    """Numeric constant table of the confinement theorem.

    Computes c = 4 rho s/delta, the smallness epsilon/epsilon', N = [1/eps],
    the certified time T1 (and the exponential horizon T1 2^N), the a-priori
    time T0, and boolean verdicts of every checked inequality.
    """
    for name, v in dict(a=a, M0=M0, M1=M1, M=M, M0p=M0p, E=E, rho=rho,
                        s=s, delta=delta, Delta=Delta, eps0=eps0).items():
        if v < 0 or (name in ("a", "rho", "s", "delta", "Delta", "eps0") and v == 0):
            raise DomainError(f"budget input {name} must be positive")
    c = 4.0 * rho * s / delta
    if p_star is None:
        theta0 = np.arctan(c / (2.0 * Delta))
        p_star = np.floor(2.0 * np.pi / theta0) + 1.0
    if c_n is None:
        c_n = default_cn(n, 1)
    branches = {
        "16 rho s M0 Delta/(a delta^3)": 16.0 * rho * s * M0 * Delta / (a * delta ** 3),
        "2 E Delta/(a rho s delta)": 2.0 * E * Delta / (a * rho * s * delta),
        "2 rho M1/(p* a delta^2)": 2.0 * rho * M1 / (p_star * a * delta ** 2),
    }
    epsilon = 32.0 * p_star * max(branches.values())
    epsilon_prime = (4.0 * M / (a * delta ** 2)
                     + 2.0 * M0p * Delta ** 2 / (a * delta ** 2)) * epsilon * rho \
        + 8.0 * E / (a * delta ** 2)
    N = int(np.floor(1.0 / epsilon)) if epsilon > 0 else 0
    T1 = (s * eps0 / 2.0) \
        * min(rho, 1.0 / (4.0 * M / (a * delta ** 2)
                          + 2.0 * M0p * Delta ** 2 / (a * delta ** 2))) \
        / (M0 * c ** 2 / 2.0 + E)
    T_exp = T1 * 2.0 ** min(N, 1023)
    T0 = s * min(rho * eps0 / E,
                 (eps0 / (8.0 * E)) / (M / (a * delta ** 2)
                                       + M0p * Delta ** 2 / (2.0 * a * delta ** 2)),
                 a / (2.0 * E * M0p)) if E > 0 and M0p > 0 else float("inf")
    t0_companion = a * s / (2.0 * E * M0p) if E > 0 and M0p > 0 else float("inf")
    verdicts = {
        "assump3: 2 M0' eps0 rho/a <= 1": 2.0 * M0p * eps0 * rho / a <= 1.0,
        "simplify: 4 rho s/(delta (Delta+delta)) <= 1":
            4.0 * rho * s / (delta * (Delta + delta)) <= 1.0,
        "simplify: c_n rho s/(2 p* Delta delta) <= 1":
            c_n * rho * s / (2.0 * p_star * Delta * delta) <= 1.0,
        "eps: epsilon <= eps0/2": epsilon <= eps0 / 2.0,
        "eps: epsilon' <= eps0/2": epsilon_prime <= eps0 / 2.0,
        "apriori: 16 E/(a delta^2) <= eps0": 16.0 * E / (a * delta ** 2) <= eps0,
    }
    return StabilityBudget(a=a, M0=M0, M1=M1, M=M, M0p=M0p, E=E, rho=rho, s=s,
                           delta=delta, Delta=Delta, eps0=eps0, p_star=p_star,
                           c=c, epsilon=epsilon, epsilon_prime=epsilon_prime,
                           N=N, T1=T1, T_exp=T_exp, T0=T0,
                           t0_companion=t0_companion, verdicts=verdicts)


@dataclass
class Theorem5Budget:
    E: float
    a: float
    M0: float
    M1: float
    M: float
    M0p: float
    delta: float
    Delta: float
    rho: float
    s: float
    epsilon_balance: float
    budget: StabilityBudget

    def summary_lines(self):
        out = ["three-body budget inputs:"]
        for name in ("E", "a", "M0", "M1", "M", "M0p", "delta", "Delta",
                     "rho", "s", "epsilon_balance"):
            out.append(f"  {name} = {getattr(self, name):.6e}")
        out.extend(self.budget.summary_lines())
        return out


def theorem5_budget(eps, mu, eta, kappa, rho_minus, rho_plus, eps0,
                    alpha=1.0 / 3.0, s=0.5, p_star=None):
    """Evaluate the three-body constant table and feed the budget calculator.

    E = max(eps*eta, eps*kappa, eps*mu, eps^2, eta^3)/rho_-^2 and the
    homothetic-rescaling constants; delta, Delta split the annulus width
    eta/(2 sqrt(eps)) s0 with alpha + beta = 1.
    """
    if min(eps, eta, rho_minus, rho_plus, eps0) <= 0 or mu < 0 or kappa < 0:
        raise DomainError("theorem5_budget inputs must be positive")
    if not 0.0 < alpha < 0.5:
        raise DomainError("need 0 < alpha < beta with alpha + beta = 1")
    beta = 1.0 - alpha
    E = max(eps * eta, eps * kappa, eps * mu, eps ** 2, eta ** 3) / rho_minus ** 2
    a = eps / rho_plus ** 3
    M0 = eps / rho_minus ** 3
    M1 = eps * (rho_minus + eta ** 2) / rho_minus ** 4
    M = eps / rho_minus ** 3
    M0p = eps ** 2 / rho_minus ** 4
    s0 = min(rho_minus ** 1.5 / rho_plus, rho_minus ** 2 / rho_plus ** 1.5)
    width = eta / (2.0 * np.sqrt(eps)) * s0
    delta, Delta = alpha * width, beta * width
    # c = 4 rho s/delta must reproduce sqrt(rho_+) sqrt(eps)/eta
    c_target = np.sqrt(rho_plus) * np.sqrt(eps) / eta
    rho = c_target * delta / (4.0 * s)
    budget = stability_budget(a, M0, M1, M, M0p, E, rho, s, delta, Delta,
                              eps0, p_star=p_star)
    epsilon_balance = max(eps / eta ** 2, eta ** 3 / eps, eta, kappa, mu, eps)
    return Theorem5Budget(E=E, a=a, M0=M0, M1=M1, M=M, M0p=M0p, delta=delta,
                          Delta=Delta, rho=rho, s=s,
                          epsilon_balance=epsilon_balance, budget=budget)
