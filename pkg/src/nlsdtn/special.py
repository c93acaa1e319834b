"""Special functions used throughout the package.

Fresnel integrals, the Abel transform ``A f(t) = int_0^t f(s)/sqrt(t-s) ds``
and its inverse, the sine-data Abel function ``h = A(cos)`` together with
``H_c = I(h cos)`` and ``H_s = I(h sin)``, and the large-t Abel expansion
driven by an :class:`AsymptoticDescriptor`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Union

import numpy as np
from scipy import interpolate, special

SQRT_2PI = np.sqrt(2.0 * np.pi)
SQRT_PI_2 = np.sqrt(np.pi / 2.0)

# Gauss-Legendre rule used for every smooth panel in this module.
_GL_X, _GL_W = np.polynomial.legendre.leggauss(20)


class DomainError(ValueError):
    """Raised when a function is evaluated outside its domain."""


# ---------------------------------------------------------------------------
# Fresnel integrals


def fresnel_c(z):
    """C(z) = int_0^z cos(pi s^2 / 2) ds, odd in z."""
    z = np.asarray(z, dtype=float)
    return special.fresnel(z)[1]


def fresnel_s(z):
    """S(z) = int_0^z sin(pi s^2 / 2) ds, odd in z."""
    z = np.asarray(z, dtype=float)
    return special.fresnel(z)[0]


def _cs_of_t(t, n=1):
    """Fresnel pair at the argument sqrt(2 n t / pi) that appears in h."""
    s, c = special.fresnel(np.sqrt(2.0 * n * np.asarray(t, dtype=float) / np.pi))
    return c, s


# ---------------------------------------------------------------------------
# Sampled functions


class SampledFunction:
    """Piecewise-polynomial interpolant through complex samples.

    Evaluation outside ``[nodes[0], nodes[-1]]`` raises :class:`DomainError`.
    """

    def __init__(self, nodes, values, interpolation_order: int = 3):
        nodes = np.asarray(nodes, dtype=float)
        values = np.asarray(values, dtype=complex)
        if nodes.ndim != 1 or values.shape != nodes.shape:
            raise ValueError("nodes and values must be 1-d arrays of equal length")
        if np.any(np.diff(nodes) <= 0):
            raise ValueError("nodes must be strictly increasing")
        k = int(interpolation_order)
        if k < 1:
            raise ValueError("interpolation_order must be a positive integer")
        k = min(k, len(nodes) - 1)
        self.nodes = nodes
        self.values = values
        self.interpolation_order = k
        self._spline = interpolate.make_interp_spline(nodes, values, k=k)

    @property
    def lo(self) -> float:
        return float(self.nodes[0])

    @property
    def hi(self) -> float:
        return float(self.nodes[-1])

    def _check(self, x):
        x = np.asarray(x, dtype=float)
        tol = 1e-12 * max(1.0, abs(self.lo), abs(self.hi))
        if np.any(x < self.lo - tol) or np.any(x > self.hi + tol):
            raise DomainError(
                f"evaluation outside sampled range [{self.lo}, {self.hi}]"
            )
        return np.clip(x, self.lo, self.hi)

    def __call__(self, x):
        return self._spline(self._check(x))

    def derivative(self, x):
        return self._spline.derivative()(self._check(x))


FunctionLike = Union[SampledFunction, Callable]


def _eval(f: FunctionLike, x):
    out = f(x)
    return np.broadcast_to(np.asarray(out), np.shape(x))


# ---------------------------------------------------------------------------
# Abel transform


def _breaks(a, b, width=1.0):
    n = max(1, int(np.ceil((b - a) / width)))
    return np.linspace(a, b, n + 1)


def _abel_nodes(t: float):
    """Quadrature nodes/weights for int_0^t g(s) ds / sqrt(t - s).

    The lower half uses s = v^2 (tames sqrt-type behaviour at s = 0), the
    upper half s = t - u^2 (removes the kernel singularity). Panels are
    at most one unit wide in s so oscillatory integrands stay resolved.
    """
    m = 0.5 * t
    xs, ws = [], []
    sb = _breaks(0.0, m)
    vb = np.sqrt(sb)
    for a, b in zip(vb[:-1], vb[1:]):
        v = 0.5 * (b - a) * _GL_X + 0.5 * (a + b)
        w = 0.5 * (b - a) * _GL_W
        s = v * v
        xs.append(s)
        ws.append(w * 2.0 * v / np.sqrt(t - s))
    sb = _breaks(m, t)
    ub = np.sqrt(t - sb)[::-1]
    for a, b in zip(ub[:-1], ub[1:]):
        u = 0.5 * (b - a) * _GL_X + 0.5 * (a + b)
        w = 0.5 * (b - a) * _GL_W
        xs.append(t - u * u)
        ws.append(2.0 * w)
    return np.concatenate(xs), np.concatenate(ws)


def abel(f: FunctionLike, t):
    """Abel transform ``int_0^t f(s) / sqrt(t - s) ds``.

    ``f`` is a vectorised callable or a :class:`SampledFunction` covering
    ``[0, t]``. ``t`` may be a scalar or an array.
    """
    ts = np.asarray(t, dtype=float)
    if np.any(ts < 0):
        raise DomainError("Abel transform needs t >= 0")
    vals = []
    for tv in ts.ravel():
        if tv == 0.0:
            vals.append(0.0)
            continue
        x, w = _abel_nodes(float(tv))
        vals.append(np.dot(w, _eval(f, x)))
    out = np.array(vals).reshape(ts.shape)
    return out if out.ndim else out[()]


def inverse_abel(F: SampledFunction, t: float, s, tol: float = 1e-8):
    """Inverse Abel transform in the second variable on ``[-t, s]``.

    Returns ``(1/pi) int_{-t}^s F'(tau) / sqrt(s - tau) dtau`` with ``F'``
    the derivative of the sampled interpolant. Valid only when
    ``F(-t) = 0``; otherwise the boundary term is missing and a
    :class:`DomainError` is raised.
    """
    f0 = F(-t)
    if abs(f0) > tol * max(1.0, np.max(np.abs(F.values))):
        raise DomainError(f"inverse Abel needs F(-t) = 0, got {f0!r}")
    ss = np.atleast_1d(np.asarray(s, dtype=float))
    if np.any(ss < -t - 1e-12) or np.any(ss > t + 1e-12):
        raise DomainError("s outside [-t, t]")
    knots = F.nodes
    gx, gw = np.polynomial.legendre.leggauss(max(4, F.interpolation_order + 2))
    out = np.zeros(ss.shape, dtype=complex)
    for i, sv in enumerate(ss):
        # tau = s - u^2; u-breakpoints at the spline knots so that the
        # integrand is polynomial on each panel.
        kt = knots[(knots > -t) & (knots < sv)]
        ub = np.sqrt(np.concatenate(([0.0], sv - kt[::-1], [sv + t])))
        ub = np.unique(ub)
        acc = 0.0 + 0.0j
        for a, b in zip(ub[:-1], ub[1:]):
            u = 0.5 * (b - a) * gx + 0.5 * (a + b)
            acc += np.dot(0.5 * (b - a) * gw, F.derivative(sv - u * u))
        out[i] = 2.0 * acc / np.pi
    return out if np.ndim(s) else out[0]


# ---------------------------------------------------------------------------
# h, H_c, H_s


def h_exact(t):
    """h(t) = A(cos)(t) via its Fresnel closed form."""
    t = np.asarray(t, dtype=float)
    c, s = _cs_of_t(t)
    return SQRT_2PI * (c * np.cos(t) + s * np.sin(t))


def hc_exact(t):
    """H_c(t) = int_0^t h(s) cos(s) ds, closed form."""
    t = np.asarray(t, dtype=float)
    c, s = _cs_of_t(t)
    return 0.25 * (
        SQRT_2PI * c * (2 * t + np.sin(2 * t))
        - SQRT_2PI * s * np.cos(2 * t)
        - 2 * np.sqrt(t) * np.sin(t)
    )


def hs_exact(t):
    """H_s(t) = int_0^t h(s) sin(s) ds, closed form."""
    t = np.asarray(t, dtype=float)
    c, s = _cs_of_t(t)
    return 0.25 * (
        2 * np.sqrt(t) * np.cos(t)
        - SQRT_2PI * (c * np.cos(2 * t) + s * (np.sin(2 * t) - 2 * t))
    )


# non-oscillatory tail of h: (coefficient, power of 1/t)
H_TAIL = ((Fraction(-1, 2), 1.5), (Fraction(15, 8), 3.5), (Fraction(-945, 32), 5.5))


def h_asym(t, terms: int = 4):
    """Large-t expansion of h with up to four terms."""
    t = np.asarray(t, dtype=float)
    out = SQRT_PI_2 * (np.sin(t) + np.cos(t))
    for c, p in H_TAIL[: terms - 1]:
        out = out + float(c) * t**-p
    return out


def hc_asym(t):
    t = np.asarray(t, dtype=float)
    return (
        0.5 * SQRT_PI_2 * t
        + 0.25 * SQRT_PI_2 * (np.sin(2 * t) - np.cos(2 * t))
        - np.sin(t) / (2 * t**1.5)
        + 3 * np.cos(t) / (4 * t**2.5)
        + 15 * np.sin(t) / (4 * t**3.5)
    )


def hs_asym(t):
    t = np.asarray(t, dtype=float)
    return (
        0.5 * SQRT_PI_2 * t
        - 0.25 * SQRT_PI_2 * (np.sin(2 * t) + np.cos(2 * t))
        + np.cos(t) / (2 * t**1.5)
        + 3 * np.sin(t) / (4 * t**2.5)
        - 15 * np.cos(t) / (4 * t**3.5)
    )


def hyp1f2(a, b1, b2, x, rtol=1e-15, max_terms=2000):
    """Generalised hypergeometric 1F2(a; b1, b2; x) by its power series.

    Summation stops once a term falls below ``rtol`` times the running sum.
    Intended for moderate |x| only (cancellation grows with |x|).
    """
    total = 1.0
    term = 1.0
    for k in range(max_terms):
        term *= (a + k) / ((b1 + k) * (b2 + k) * (k + 1)) * x
        total += term
        if abs(term) < rtol * abs(total) and k > 2:
            return total
    raise RuntimeError("1F2 series did not converge")


def h_hypergeometric(t: float) -> float:
    """h(t) = 2 sqrt(t) 1F2(1; 3/4, 5/4; -t^2/4)."""
    return 2.0 * np.sqrt(t) * hyp1f2(1.0, 0.75, 1.25, -0.25 * t * t)


# ---------------------------------------------------------------------------
# Large-t Abel expansion


@dataclass
class AsymptoticDescriptor:
    """Coefficients of the large-t form

    f_a(t) = sum_j t^{j/2} (f_j + sum_n c_jn cos nt + s_jn sin nt)
             + t^{-1/2} (fhat + sum_n chat_n cos nt + shat_n sin nt)

    with j = 0..4 and n = 1..N. Column 0 of ``osc_cos``/``osc_sin`` is
    unused so that column n holds harmonic n.
    """

    n_harmonics: int
    power: np.ndarray = None
    osc_cos: np.ndarray = None
    osc_sin: np.ndarray = None
    inv_sqrt: complex = 0.0
    inv_sqrt_cos: np.ndarray = None
    inv_sqrt_sin: np.ndarray = None

    def __post_init__(self):
        n = int(self.n_harmonics)
        if n < 1:
            raise ValueError("need at least one harmonic")
        self.n_harmonics = n

        def arr(x, shape):
            if x is None:
                return np.zeros(shape, dtype=complex)
            x = np.asarray(x, dtype=complex)
            if x.shape != shape:
                raise ValueError(f"coefficient block has shape {x.shape}, expected {shape}")
            return x

        self.power = arr(self.power, (5,))
        self.osc_cos = arr(self.osc_cos, (5, n + 1))
        self.osc_sin = arr(self.osc_sin, (5, n + 1))
        self.inv_sqrt_cos = arr(self.inv_sqrt_cos, (n + 1,))
        self.inv_sqrt_sin = arr(self.inv_sqrt_sin, (n + 1,))
        self.inv_sqrt = complex(self.inv_sqrt)

    def evaluate(self, t):
        """The function f_a itself (used by tests to build Abel oracles)."""
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape, dtype=complex)
        n = np.arange(1, self.n_harmonics + 1)
        for j in range(5):
            osc = self.power[j] + np.tensordot(
                np.cos(np.multiply.outer(t, n)), self.osc_cos[j, 1:], axes=1
            ) + np.tensordot(np.sin(np.multiply.outer(t, n)), self.osc_sin[j, 1:], axes=1)
            out += t ** (j / 2) * osc
        hat = self.inv_sqrt + np.tensordot(
            np.cos(np.multiply.outer(t, n)), self.inv_sqrt_cos[1:], axes=1
        ) + np.tensordot(np.sin(np.multiply.outer(t, n)), self.inv_sqrt_sin[1:], axes=1)
        return out + hat / np.sqrt(t)


def abel_asymptotics(d: AsymptoticDescriptor, t):
    """Large-t expansion of A f for f described by ``d``.

    The O(t^{-1/16}) remainder is dropped, as are the oscillatory
    ``t^{-1/2}`` contributions which only enter at that order.
    """
    t = np.asarray(t, dtype=float)
    out = np.zeros(t.shape, dtype=complex)
    for j in range(5):
        if d.power[j] != 0:
            ratio = special.gamma(j / 2 + 1) / special.gamma((j + 3) / 2)
            out += np.sqrt(np.pi) * d.power[j] * t ** ((j + 1) / 2) * ratio
    out += d.inv_sqrt * np.pi
    for j in range(5):
        for n in range(1, d.n_harmonics + 1):
            cjn, sjn = d.osc_cos[j, n], d.osc_sin[j, n]
            snt, cnt = np.sin(n * t), np.cos(n * t)
            if cjn != 0:
                a = -3 * (j - 2) * j
                out += (
                    SQRT_PI_2 * cjn / (32 * n**2.5) * t ** (j / 2 - 2)
                    * ((a - 8 * j * n * t + 32 * n * n * t * t) * snt
                       + (a + 8 * j * n * t + 32 * n * n * t * t) * cnt)
                )
            if sjn != 0:
                out += (
                    SQRT_PI_2 * sjn / (4 * n**1.5) * t ** (j / 2 - 1)
                    * ((j + 4 * n * t) * snt + (j - 4 * n * t) * cnt)
                )
    return out if out.ndim else out[()]
