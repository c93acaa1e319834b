"""Small-amplitude expansion of the DtN map.

:func:`expand` runs the order-by-order recursion on a :class:`TriangularGrid`
with exactly the operators used by :func:`nlsdtn.glm.solve_dtn`, so its
order-n output is the n-th Taylor coefficient of the discrete nonlinear
solver. The sine-data third-order coefficient is assembled independently in
:mod:`nlsdtn.sine3` from Abel-transform identities.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, List, Sequence

import numpy as np

from .glm import (E_MINUS, E_PLUS, TriangularGrid, field_inverse_abel,
                  sqrt_trapezoid_error, start_coefficient, start_slope)
from .special import SQRT_2PI, FunctionLike, SampledFunction, abel


def _mul(a: List, b: List, n: int):
    """Order-``n`` coefficient of a product of two series (index = order)."""
    return sum(a[k] * b[n - k] for k in range(1, n))


def _mul3(a: List, b: List, c: List, n: int):
    out = 0
    for k in range(1, n - 1):
        for m in range(1, n - k):
            out = out + a[k] * b[m] * c[n - k - m]
    return out


@dataclass
class PerturbationSeries:
    """Per-order kernels and Neumann coefficients; index 0 is unused (zero)."""

    grid: TriangularGrid
    M1: List[np.ndarray]
    M2: List[np.ndarray]
    g1: List[np.ndarray]
    max_order: int

    def g1_order(self, n: int) -> SampledFunction:
        return SampledFunction(self.grid.t, self.g1[n])

    def g1_sum(self, epsilon: float, upto: int | None = None) -> np.ndarray:
        upto = self.max_order if upto is None else upto
        return sum(epsilon**n * self.g1[n] for n in range(1, upto + 1))


def _march_minus(f: np.ndarray, diag: np.ndarray, dt: float) -> np.ndarray:
    """``M[i,j] = diag[j] + trapezoid of f[j..i, j]`` (column ``j`` is a characteristic)."""
    N = f.shape[0] - 1
    lower = np.tril(np.ones((N + 1, N + 1), dtype=bool))
    fm = np.where(lower, f, 0.0)
    c = np.cumsum(fm, axis=0)
    idx = np.arange(N + 1)
    # sum_{k=j}^{i} f[k,j] minus half of the endpoints
    before = np.where(idx[None, :] > 0, c[np.clip(idx - 1, 0, None), idx][None, :], 0.0)
    before = np.where(idx[None, :] == 0, 0.0, before)
    s = c - before
    trap = dt * (s - 0.5 * fm - 0.5 * np.diagonal(fm)[None, :])
    M = diag[None, :] + trap
    return np.where(lower, M, 0.0)


def _march_plus(f: np.ndarray, dt: float, coef=None) -> np.ndarray:
    """``M[i,j] = trapezoid of f along (i-j, 0) .. (i, j)``; zero on ``j = 0``.

    ``coef[k] * sqrt_trapezoid_error(j)`` is added at step ``j`` of the
    characteristic that leaves the anti-diagonal on row ``k``.
    """
    N = f.shape[0] - 1
    M = np.zeros_like(f)
    err = sqrt_trapezoid_error(N)
    for k in range(N + 1):
        i = np.arange(k, N + 1)
        j = i - k
        vals = f[i, j]
        c = np.cumsum(vals)
        M[i, j] = dt * (c - 0.5 * vals - 0.5 * vals[0])
        if coef is not None:
            M[i, j] += coef[k] * err[: i.size]
    return M


def expand(g0_orders: Sequence[Callable], n_max: int, grid: TriangularGrid,
           lam: int = 1, correct: bool = True) -> PerturbationSeries:
    """Order-by-order solution for ``g0 = sum_k eps^k g0_orders[k-1]``.

    Each order's right-hand side only involves lower orders, so every order
    is a pair of explicit characteristic integrations over the full triangle.
    ``correct`` switches the same endpoint corrections as ``solve_dtn``.
    """
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    N, dt = grid.N, grid.dt
    h = 2.0 * dt
    t = grid.t
    zero2 = np.zeros((N + 1, N + 1), dtype=complex)
    zero1 = np.zeros(N + 1, dtype=complex)
    g0 = [zero1] + [np.asarray(f(t), dtype=complex) + 0j * t for f in g0_orders]
    g0 = (g0 + [zero1] * (n_max + 1))[: n_max + 1]
    for k, gk in enumerate(g0[1:], start=1):
        if abs(gk[0]) > 1e-10:
            raise ValueError(f"order-{k} datum does not vanish at t = 0")
    g0b = [np.conj(x) for x in g0]
    G = [x[:, None] for x in g0]
    Gb = [x[:, None] for x in g0b]

    M1, M2, P1, P2 = [zero2], [zero2], [zero2], [zero2]
    g1, g1b = [zero1], [zero1]
    M2d = [zero1]  # M2(t, t) per order
    slope = [zero1]  # dM1/ds on the anti-diagonal per order
    for n in range(1, n_max + 1):
        g1col = [x[:, None] for x in g1]
        g1bcol = [x[:, None] for x in g1b]
        f1 = (-1j * lam * _mul3(G, Gb, M1, n)
              - SQRT_2PI * E_PLUS * _mul(G, P2, n)
              + 1j * _mul(g1col, M2, n))
        f2 = lam * (1j * _mul3(Gb, G, M2, n)
                    - SQRT_2PI * E_PLUS * _mul(Gb, P1, n)
                    - 1j * _mul(g1bcol, M1, n))
        f1 = f1 if np.ndim(f1) else zero2
        f2 = f2 if np.ndim(f2) else zero2
        m1 = _march_minus(np.asarray(f1) + 0 * zero2, g0[n], dt)
        coef = None
        if correct:
            # order-n part of conj(g0) * slope
            amp = np.asarray(_mul(g0b, slope, n)) + zero1
            coef = start_coefficient(lam, amp, 1.0, dt)
        m2 = _march_plus(np.asarray(f2) + 0 * zero2, dt, coef)
        p1 = field_inverse_abel(m1, grid, correct)
        p2 = field_inverse_abel(m2, grid, correct)
        slope.append(np.array([start_slope(m1[k, : k + 1], h) for k in range(N + 1)]))
        M1.append(m1)
        M2.append(m2)
        P1.append(p1)
        P2.append(p2)
        M2d.append(np.diagonal(m2).copy())
        gn = _mul(g0, M2d, n) - SQRT_2PI * E_MINUS * np.diagonal(p1)
        gn = np.asarray(gn) + zero1
        g1.append(gn)
        g1b.append(np.conj(gn))
    return PerturbationSeries(grid, M1, M2, g1, n_max)


def g11_general(g0dot: FunctionLike, t):
    """First-order Neumann coefficient ``-(e^{-i pi/4}/sqrt(pi)) A(dg0/dt)(t)``."""
    return -E_MINUS / np.sqrt(np.pi) * abel(g0dot, t)
