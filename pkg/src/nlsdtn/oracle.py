"""Slow, independent reference values.

Everything here is plain adaptive quadrature of the defining integrals,
written without reusing the fast operators of the package, so it can be used
to check them.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.polynomial import legendre as L
from scipy import integrate

from .special import h_exact

_SQRT_GL_X, _SQRT_GL_W = L.leggauss(48)


class QuadratureError(RuntimeError):
    """The requested tolerance was not reached within the subdivision budget."""


@dataclass(frozen=True)
class QuadratureSpec:
    absolute_tol: float = 1e-11
    relative_tol: float = 1e-11
    max_subdivisions: int = 200
    singularity_handling: str = "substitution"

    def __post_init__(self):
        if self.absolute_tol <= 0 or self.relative_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be positive")
        if self.singularity_handling not in ("substitution", "jacobi-weights"):
            raise ValueError("singularity_handling is 'substitution' or 'jacobi-weights'")


def _quad_real(f, a, b, spec: QuadratureSpec, strict: bool, **extra):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        out = integrate.quad(f, a, b, epsabs=spec.absolute_tol, epsrel=spec.relative_tol,
                             limit=spec.max_subdivisions, full_output=1, **extra)
    val, err = out[0], out[1]
    if strict and len(out) > 3:
        raise QuadratureError(f"quadrature on [{a}, {b}] stopped at error {err:.3g}: {out[3]}")
    return val, err


def adaptive_integrate(f: Callable, a: float, b: float,
                       spec: QuadratureSpec = QuadratureSpec(), complex_valued: bool = False,
                       strict: bool = True):
    """``(int_a^b f, error estimate)`` by adaptive Gauss-Kronrod.

    Complex integrands are split into real and imaginary parts. With
    ``strict`` a :class:`QuadratureError` is raised when the tolerance is
    not reached.
    """
    if b < a:
        raise ValueError("need a <= b")
    if complex_valued:
        re, e1 = _quad_real(lambda x: np.real(f(x)), a, b, spec, strict)
        im, e2 = _quad_real(lambda x: np.imag(f(x)), a, b, spec, strict)
        return re + 1j * im, float(np.hypot(e1, e2))
    return _quad_real(f, a, b, spec, strict)


def abel_reference(f: Callable, t: float, spec: QuadratureSpec = QuadratureSpec(),
                   panel: float = 2.0):
    """``int_0^t f(s)/sqrt(t - s) ds`` panel by panel.

    The last panel carries the singularity: with ``'jacobi-weights'`` it uses
    the algebraic weight of QUADPACK, with ``'substitution'`` the variable
    ``s = t - u^2``.
    """
    if t <= 0:
        return 0.0
    edges = np.append(np.arange(0.0, t - 0.5 * panel, panel), t)
    edges = edges if edges.size > 1 else np.array([0.0, t])
    total = 0.0
    for a, b in zip(edges[:-2], edges[1:-1]):
        total += _quad_real(lambda s: f(s) / np.sqrt(t - s), a, b, spec, True)[0]
    a = edges[-2]
    if spec.singularity_handling == "jacobi-weights":
        total += _quad_real(f, a, t, spec, True, weight="alg", wvar=(0.0, -0.5))[0]
    else:
        total += 2.0 * _quad_real(lambda u: f(t - u * u), 0.0, np.sqrt(t - a), spec, True)[0]
    return total


_FUNCS = {"s": np.sin, "c": np.cos, "h": h_exact}


def triple_singular(name: str, t: float,
                    spec: QuadratureSpec = QuadratureSpec(absolute_tol=1e-10, relative_tol=1e-10)):
    """``int X(t') int Y(t'') int Z(t''') (t - t' + t'' - t''')^{-3/2}`` for ``name = 'XYZ'``.

    With ``u = t - t' = r^2 w`` and ``v = t'' - t''' = r^2 (1 - w)`` the corner
    singularity disappears; the innermost ``t''`` integral is done by a fixed
    Gauss rule after ``t'' = a + sigma^2`` (which also absorbs the sqrt
    endpoint of ``h``).
    """
    if len(name) != 3 or any(ch not in _FUNCS for ch in name):
        raise ValueError("name must be three letters from 's', 'c', 'h'")
    if t > 12.0:
        raise ValueError("reference triple integrals are only supported for t <= 12")
    if t <= 0:
        return 0.0
    X, Y, Z = (_FUNCS[ch] for ch in name)
    root_t = np.sqrt(t)

    def inner(rho, w):
        r = rho * rho
        a = r * (1 - w)
        b = t - r * w
        if b <= a:
            return 0.0
        smax = np.sqrt(b - a)
        sig = 0.5 * smax * (_SQRT_GL_X + 1)
        tpp = a + sig * sig
        vals = Y(tpp) * Z(tpp - a) * 2 * sig
        return X(t - r * w) * 0.5 * smax * (_SQRT_GL_W @ vals)

    def over_w(rho):
        return adaptive_integrate(lambda w: inner(rho, w), 0.0, 1.0, spec)[0]

    # dr r^{-3/2} * r (Jacobian of (u, v) -> (r, w)) = r^{-1/2} dr = 2 d rho
    return 2.0 * adaptive_integrate(over_w, 0.0, root_t, spec)[0]


def lag_integral_reference(t: float, phi: Callable, h: Callable = h_exact,
                           spec: QuadratureSpec = QuadratureSpec(absolute_tol=1e-10,
                                                                 relative_tol=1e-10)):
    """``2 int_0^t h(t') int_0^t' phi(x)/sqrt(t - t' + x) dx dt'`` by nested quadrature."""
    def outer(tp):
        d = t - tp
        # x = s^2 near the origin keeps the integrand smooth for small d
        g = lambda s: 2 * s * phi(s * s) / np.sqrt(d + s * s)
        return h(tp) * adaptive_integrate(g, 0.0, np.sqrt(tp), spec)[0]
    return 2.0 * adaptive_integrate(outer, 0.0, t, spec)[0]
