"""Truncated Taylor-Fourier series with weighted analyticity norms.

A term is

    c * (I - I0)^aI * (y - y0)^ay * x^b * exp(cexp * x) * e^(i k.phi) * p^h q^j

with integer multi-indices.  The exponential exponent cexp is kept exactly
as an integer lattice point: cexp = -(dJ.omega_J + i dI.omega_I)/omega_y,
which is the closure of the homological solution formula; series built from
polynomial data have dJ = dI = 0 and need no frequency data.  Coefficients
are complex; real series satisfy the conjugate symmetry c(-k, dI -> -dI) =
conj(c(k, dI)).
"""

from dataclasses import dataclass, field

import numpy as np

from .model import ChartBox, DomainError


@dataclass(frozen=True)
class FrequencyData:
    """Chart-frozen frequencies (omega_y, omega_I, omega_J)."""

    omega_y: float
    omega_I: tuple = ()
    omega_J: tuple = ()

    def __post_init__(self):
        if self.omega_y == 0.0:
            raise DomainError("omega_y must be nonzero on the chart")

    def lam(self, k, h, j):
        """Diagonal eigenvalue (h - j).omega_J + i k.omega_I."""
        re = sum((hi - ji) * w for hi, ji, w in zip(h, j, self.omega_J))
        im = sum(ki * w for ki, w in zip(k, self.omega_I))
        return complex(re, im)

    def exponent_value(self, dJ, dI):
        """cexp = -(dJ.omega_J + i dI.omega_I)/omega_y for a lattice point."""
        re = sum(d * w for d, w in zip(dJ, self.omega_J))
        im = sum(d * w for d, w in zip(dI, self.omega_I))
        return -complex(re, im) / self.omega_y


# term key layout: (k, h, j, aI, ay, b, dJ, dI); all entries int tuples/ints
def _zkey(n, m):
    return ((0,) * n, (0,) * m, (0,) * m, (0,) * n, 0, 0, (0,) * m, (0,) * n)


class TaylorFourierSeries:
    """Finite sum of Taylor-Fourier terms over a chart."""

    def __init__(self, n, m, chart, freq=None):
        self.n = int(n)
        self.m = int(m)
        self.chart = chart
        self.freq = freq
        self.terms = {}
        self.discarded_mass = 0.0

    # --- construction -------------------------------------------------
    def copy(self):
        new = TaylorFourierSeries(self.n, self.m, self.chart, self.freq)
        new.terms = dict(self.terms)
        new.discarded_mass = self.discarded_mass
        return new

    @classmethod
    def zero(cls, n, m, chart, freq=None):
        return cls(n, m, chart, freq)

    @classmethod
    def constant(cls, value, n, m, chart, freq=None):
        s = cls(n, m, chart, freq)
        if value != 0.0:
            s.terms[_zkey(n, m)] = complex(value)
        return s

    def add_term(self, coeff, k=None, h=None, j=None, aI=None, ay=0, b=0,
                 dJ=None, dI=None):
        k = tuple(k) if k is not None else (0,) * self.n
        h = tuple(h) if h is not None else (0,) * self.m
        j = tuple(j) if j is not None else (0,) * self.m
        aI = tuple(aI) if aI is not None else (0,) * self.n
        dJ = tuple(dJ) if dJ is not None else (0,) * self.m
        dI = tuple(dI) if dI is not None else (0,) * self.n
        key = (k, h, j, aI, int(ay), int(b), dJ, dI)
        val = self.terms.get(key, 0.0) + complex(coeff)
        if val == 0.0:
            self.terms.pop(key, None)
        else:
            self.terms[key] = val
        return self

    def _require_compatible(self, other):
        if (self.n, self.m) != (other.n, other.m):
            raise DomainError("series dimensions differ")
        if self.chart is not other.chart and self.chart != other.chart:
            raise DomainError("series charts differ")
        if self.freq is not None and other.freq is not None \
                and self.freq != other.freq:
            raise DomainError("series frequency data differ")

    def _merged_freq(self, other):
        return self.freq if self.freq is not None else other.freq

    # --- ring operations ----------------------------------------------
    def __add__(self, other):
        if np.isscalar(other):
            other = TaylorFourierSeries.constant(other, self.n, self.m,
                                                 self.chart, self.freq)
        self._require_compatible(other)
        out = TaylorFourierSeries(self.n, self.m, self.chart,
                                  self._merged_freq(other))
        out.terms = dict(self.terms)
        for key, c in other.terms.items():
            v = out.terms.get(key, 0.0) + c
            if v == 0.0:
                out.terms.pop(key, None)
            else:
                out.terms[key] = v
        return out

    __radd__ = __add__

    def __neg__(self):
        out = self.copy()
        out.terms = {k: -c for k, c in out.terms.items()}
        return out

    def __sub__(self, other):
        if np.isscalar(other):
            other = TaylorFourierSeries.constant(other, self.n, self.m,
                                                 self.chart, self.freq)
        return self + (-other)

    def __mul__(self, other):
        if np.isscalar(other):
            out = self.copy()
            if other == 0:
                out.terms = {}
            else:
                out.terms = {k: c * other for k, c in out.terms.items()}
            return out
        self._require_compatible(other)
        out = TaylorFourierSeries(self.n, self.m, self.chart,
                                  self._merged_freq(other))
        acc = out.terms
        for (k1, h1, j1, a1, ay1, b1, dJ1, dI1), c1 in self.terms.items():
            for (k2, h2, j2, a2, ay2, b2, dJ2, dI2), c2 in other.terms.items():
                key = (tuple(x + y for x, y in zip(k1, k2)),
                       tuple(x + y for x, y in zip(h1, h2)),
                       tuple(x + y for x, y in zip(j1, j2)),
                       tuple(x + y for x, y in zip(a1, a2)),
                       ay1 + ay2, b1 + b2,
                       tuple(x + y for x, y in zip(dJ1, dJ2)),
                       tuple(x + y for x, y in zip(dI1, dI2)))
                v = acc.get(key, 0.0) + c1 * c2
                if v == 0.0:
                    acc.pop(key, None)
                else:
                    acc[key] = v
        return out

    __rmul__ = __mul__

    # --- structure ------------------------------------------------------
    def prune(self, floor=1e-16):
        """Drop terms whose norm contribution is below `floor`; report mass."""
        dropped = 0.0
        keep = {}
        for key, c in self.terms.items():
            w = self._term_weight(key) * abs(c)
            if w < floor:
                dropped += w
            else:
                keep[key] = c
        self.terms = keep
        self.discarded_mass += dropped
        return dropped

    def truncate(self, k_max=None, deg_max=None):
        """Drop high Fourier modes / polynomial degrees; report dropped mass."""
        dropped = 0.0
        keep = {}
        for key, c in self.terms.items():
            k, h, j, aI, ay, b, dJ, dI = key
            deg = sum(aI) + ay + b + sum(h) + sum(j)
            if (k_max is not None and sum(abs(x) for x in k) > k_max) or \
               (deg_max is not None and deg > deg_max):
                dropped += self._term_weight(key) * abs(c)
            else:
                keep[key] = c
        self.terms = keep
        self.discarded_mass += dropped
        return dropped

    def average_part(self):
        """Terms with (k, h - j) == 0: the normal class."""
        out = TaylorFourierSeries(self.n, self.m, self.chart, self.freq)
        out.terms = {key: c for key, c in self.terms.items()
                     if not any(key[0]) and key[1] == key[2]}
        return out

    def offaverage_part(self):
        out = TaylorFourierSeries(self.n, self.m, self.chart, self.freq)
        out.terms = {key: c for key, c in self.terms.items()
                     if any(key[0]) or key[1] != key[2]}
        return out

    # --- calculus -------------------------------------------------------
    def derivative(self, var, index=0):
        """Partial derivative; var in {'I','phi','y','x','p','q'}."""
        out = TaylorFourierSeries(self.n, self.m, self.chart, self.freq)
        for key, c in self.terms.items():
            k, h, j, aI, ay, b, dJ, dI = key
            if var == "phi":
                if k[index]:
                    out.add_term(1j * k[index] * c, k, h, j, aI, ay, b, dJ, dI)
            elif var == "I":
                if aI[index]:
                    a2 = list(aI)
                    a2[index] -= 1
                    out.add_term(aI[index] * c, k, h, j, a2, ay, b, dJ, dI)
            elif var == "y":
                if ay:
                    out.add_term(ay * c, k, h, j, aI, ay - 1, b, dJ, dI)
            elif var == "x":
                if b:
                    out.add_term(b * c, k, h, j, aI, ay, b - 1, dJ, dI)
                if (any(dJ) or any(dI)) and self.freq is not None:
                    out.add_term(self.freq.exponent_value(dJ, dI) * c,
                                 k, h, j, aI, ay, b, dJ, dI)
            elif var == "p":
                if h[index]:
                    h2 = list(h)
                    h2[index] -= 1
                    out.add_term(h[index] * c, k, h2, j, aI, ay, b, dJ, dI)
            elif var == "q":
                if j[index]:
                    j2 = list(j)
                    j2[index] -= 1
                    out.add_term(c * j[index], k, h, j2, aI, ay, b, dJ, dI)
            else:
                raise DomainError(f"unknown variable {var!r}")
        return out

    # --- norm -----------------------------------------------------------
    def _term_weight(self, key):
        """Majorant of the basis element over the complexified chart."""
        k, h, j, aI, ay, b, dJ, dI = key
        ch = self.chart
        w = 1.0
        for a, wI, rho in zip(aI, ch.I_width, (ch.rho,) * len(aI)):
            if a:
                w *= (wI + rho) ** a
        if ay:
            w *= (ch.y_width + ch.r) ** ay
        X = ch.x_sup
        if b:
            w *= X ** b
        if any(dJ) or any(dI):
            if self.freq is None:
                raise DomainError("exponential term without frequency data")
            w *= np.exp(abs(self.freq.exponent_value(dJ, dI)) * X)
        w *= np.exp(ch.s * sum(abs(x) for x in k))
        w *= ch.delta ** (sum(h) + sum(j))
        return w

    def norm(self):
        """Sum of coefficient majorants: the weighted analyticity norm."""
        return float(sum(self._term_weight(key) * abs(c)
                         for key, c in self.terms.items()))

    # --- evaluation -----------------------------------------------------
    def evaluate(self, I=(), phi=(), y=0.0, x=0.0, p=(), q=()):
        ch = self.chart
        tot = 0.0 + 0.0j
        dI_ = [Ii - c for Ii, c in zip(I, ch.I_center)]
        dy = y - ch.y_center
        for (k, h, j, aI, ay, b, dJ, dIv), c in self.terms.items():
            val = c
            for ki, ph in zip(k, phi):
                if ki:
                    val *= np.exp(1j * ki * ph)
            for a, dd in zip(aI, dI_):
                if a:
                    val *= dd ** a
            if ay:
                val *= dy ** ay
            if b:
                val *= x ** b
            if any(dJ) or any(dIv):
                val *= np.exp(self.freq.exponent_value(dJ, dIv) * x)
            for hi, pi in zip(h, p):
                if hi:
                    val *= pi ** hi
            for ji, qi in zip(j, q):
                if ji:
                    val *= qi ** ji
            tot += val
        return tot

    def is_real_symmetric(self, tol=1e-12):
        """Real series satisfy c(-k, -dI) = conj(c(k, dI))."""
        for (k, h, j, aI, ay, b, dJ, dI), c in self.terms.items():
            mirror = (tuple(-x for x in k), h, j, aI, ay, b, dJ,
                      tuple(-x for x in dI))
            cm = self.terms.get(mirror, 0.0)
            if abs(cm - np.conj(c)) > tol * max(1.0, abs(c)):
                return False
        return True

    def __len__(self):
        return len(self.terms)

    # --- serialization ----------------------------------------------------
    def to_lines(self):
        """Line-per-term text format, deterministic ordering."""
        lines = [f"# taylor-fourier n={self.n} m={self.m}"]
        for key in sorted(self.terms):
            k, h, j, aI, ay, b, dJ, dI = key
            c = self.terms[key]
            lines.append(
                "k=%s | h=%s | j=%s | aI=%s ay=%d b=%d | dJ=%s dI=%s | c=%.17g%+.17gj"
                % (",".join(map(str, k)), ",".join(map(str, h)),
                   ",".join(map(str, j)), ",".join(map(str, aI)), ay, b,
                   ",".join(map(str, dJ)), ",".join(map(str, dI)),
                   c.real, c.imag))
        return lines

    @classmethod
    def from_lines(cls, lines, chart, freq=None):
        head = lines[0].split()
        n = int(head[2].split("=")[1])
        m = int(head[3].split("=")[1])
        s = cls(n, m, chart, freq)

        def ints(txt):
            txt = txt.strip()
            return tuple(int(t) for t in txt.split(",") if t != "")

        for line in lines[1:]:
            if not line.strip():
                continue
            parts = [p.strip() for p in line.split("|")]
            k = ints(parts[0].split("=")[1])
            h = ints(parts[1].split("=")[1])
            j = ints(parts[2].split("=")[1])
            sub = dict(tok.split("=") for tok in parts[3].split())
            aI = ints(sub["aI"])
            ay, b = int(sub["ay"]), int(sub["b"])
            sub2 = dict(tok.split("=") for tok in parts[4].split())
            dJ, dI = ints(sub2["dJ"]), ints(sub2["dI"])
            c = complex(parts[5].split("=")[1])
            s.add_term(c, k, h, j, aI, ay, b, dJ, dI)
        return s


def poisson_bracket(f, g):
    """{f, g} = sum over pairs (I, phi), (y, x), (p, q) of
    d_p f d_q g - d_q f d_p g with the momentum first: {I, phi} = +1.

    Exact on the truncated ring (no re-truncation here; callers truncate
    and collect the discarded-mass report).
    """
    f._require_compatible(g)
    out = TaylorFourierSeries(f.n, f.m, f.chart, f._merged_freq(g))
    for i in range(f.n):
        out = out + f.derivative("I", i) * g.derivative("phi", i) \
                  - f.derivative("phi", i) * g.derivative("I", i)
    out = out + f.derivative("y") * g.derivative("x") \
              - f.derivative("x") * g.derivative("y")
    for i in range(f.m):
        out = out + f.derivative("p", i) * g.derivative("q", i) \
                  - f.derivative("q", i) * g.derivative("p", i)
    return out
