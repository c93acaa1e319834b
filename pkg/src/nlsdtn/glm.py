"""Dirichlet-to-Neumann map for NLS on the half-line via GLM kernels.

The kernels ``M1, M2`` live on the triangle ``0 <= t <= T, -t <= s <= t``.
The grid uses ``t_i = i*dt`` and ``s_j = -t_i + 2*j*dt`` so that both
characteristic families ``t + s = const`` (index ``j`` fixed) and
``t - s = const`` (``(i, j) -> (i-1, j-1)``) pass through nodes.

Everything is marched row by row in ``t``. Each row is solved by Picard
iteration; the only nonlocal operator inside a row is the inverse Abel
transform in ``s``, discretised by :func:`row_inverse_abel`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .special import SampledFunction, SQRT_2PI

E_PLUS = np.exp(0.25j * np.pi)
E_MINUS = np.exp(-0.25j * np.pi)
SQRT_PI_2 = np.sqrt(np.pi / 2.0)


class SolverError(RuntimeError):
    """Raised when the marching scheme cannot accept a step."""

    def __init__(self, message: str, step: Optional[int] = None):
        super().__init__(message if step is None else f"step {step}: {message}")
        self.step = step


# ---------------------------------------------------------------------------
# boundary data


def _fd4(f: Callable, t, h: float = 1e-3):
    t = np.asarray(t, dtype=float)
    return (f(t - 2 * h) - 8 * f(t - h) + 8 * f(t + h) - f(t + 2 * h)) / (12 * h)


@dataclass
class BoundaryData:
    """Dirichlet datum ``g0(t)`` together with the NLS sign ``lam``.

    Build with :meth:`sine`, :meth:`series` or :meth:`table`.
    """

    kind: str
    func: Callable
    lam: int = 1
    T: float = np.inf
    deriv: Optional[Callable] = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.lam not in (1, -1):
            raise ValueError("lam must be +1 or -1")
        g00 = complex(np.asarray(self.func(np.array([0.0])))[0])
        if abs(g00) > 1e-10:
            raise ValueError(f"g0(0) = {g00} is incompatible with zero initial data")

    @classmethod
    def sine(cls, amplitude: float = 1.0, frequency: float = 1.0, phase: float = 0.0,
             lam: int = 1, T: float = np.inf):
        a, w, p = amplitude, frequency, phase
        return cls(
            "sine",
            lambda t: a * np.sin(w * np.asarray(t, dtype=float) + p) + 0j,
            lam, T,
            deriv=lambda t: a * w * np.cos(w * np.asarray(t, dtype=float) + p) + 0j,
            params={"amplitude": a, "frequency": w, "phase": p},
        )

    @classmethod
    def series(cls, orders: Sequence[Callable], epsilon: float, lam: int = 1,
               T: float = np.inf):
        """``g0 = sum_k epsilon**(k+1) * orders[k](t)``."""
        orders = list(orders)

        def g(t):
            t = np.asarray(t, dtype=float)
            return sum(epsilon ** (k + 1) * np.asarray(f(t), dtype=complex)
                       for k, f in enumerate(orders)) + 0j * t

        return cls("series", g, lam, T, params={"epsilon": epsilon, "orders": orders})

    @classmethod
    def table(cls, data: SampledFunction, lam: int = 1):
        return cls("table", data, lam, data.hi, deriv=data.derivative,
                   params={"lo": data.lo, "hi": data.hi})

    def __call__(self, t):
        return np.asarray(self.func(np.asarray(t, dtype=float)), dtype=complex)

    def derivative(self, t):
        """``dg0/dt``; 4th-order central differences when no closed form is known."""
        if self.deriv is not None:
            return np.asarray(self.deriv(np.asarray(t, dtype=float)), dtype=complex)
        if self.kind == "table":
            raise AssertionError("table data always has a derivative")
        return _fd4(self, t)

    def scaled(self, factor: complex) -> "BoundaryData":
        """Same datum multiplied by a constant (used for the phase symmetry)."""
        f, d = self.func, self.deriv
        return BoundaryData(
            self.kind + "-scaled",
            lambda t: factor * np.asarray(f(t), dtype=complex),
            self.lam, self.T,
            deriv=None if d is None else (lambda t: factor * np.asarray(d(t), dtype=complex)),
            params=dict(self.params, factor=factor),
        )


# ---------------------------------------------------------------------------
# grid and fields


@dataclass(frozen=True)
class TriangularGrid:
    T: float
    N: int

    def __post_init__(self):
        if self.T <= 0:
            raise ValueError("T must be positive")
        if self.N < 1:
            raise ValueError("N must be at least 1")

    @property
    def dt(self) -> float:
        return self.T / self.N

    @property
    def t(self) -> np.ndarray:
        return np.arange(self.N + 1) * self.dt

    def s_row(self, i: int) -> np.ndarray:
        return -i * self.dt + 2.0 * np.arange(i + 1) * self.dt

    def nodes(self):
        """Iterate over ``(i, j, t_i, s_j)``."""
        dt = self.dt
        for i in range(self.N + 1):
            for j in range(i + 1):
                yield i, j, i * dt, (2 * j - i) * dt


def _triangle(N: int) -> np.ndarray:
    return np.zeros((N + 1, N + 1), dtype=complex)


@dataclass
class KernelField:
    """Kernel samples; row ``i`` holds ``s_0..s_i`` in columns ``0..i``."""

    grid: TriangularGrid
    M1: np.ndarray
    M2: np.ndarray
    L1: Optional[np.ndarray] = None
    L2: Optional[np.ndarray] = None

    def row(self, name: str, i: int) -> np.ndarray:
        return getattr(self, name)[i, : i + 1]

    def diagonal(self, name: str) -> np.ndarray:
        return np.diagonal(getattr(self, name)).copy()

    def antidiagonal(self, name: str) -> np.ndarray:
        return getattr(self, name)[:, 0].copy()


# ---------------------------------------------------------------------------
# discrete operators


def _abel_weights(n: int):
    m = np.arange(n + 1, dtype=float)
    a = 2.0 * (np.sqrt(m + 1) - np.sqrt(m))
    b = (2.0 / 3.0) * ((m + 1) ** 1.5 - m**1.5)
    p = b - m * a
    q = (m + 1) * a - b
    w = q.copy()
    w[1:] += p[:-1]
    return w, q


_WEIGHT_CACHE: dict = {}


def _weights(n: int):
    size = 1
    while size < n + 1:
        size *= 2
    if size not in _WEIGHT_CACHE:
        _WEIGHT_CACHE[size] = _abel_weights(size)
    w, q = _WEIGHT_CACHE[size]
    return w[: n + 1], q[: n + 1]


def row_derivative(F: np.ndarray, h: float) -> np.ndarray:
    """Second-order finite-difference derivative of equispaced samples."""
    n = F.shape[0] - 1
    if n == 0:
        return np.zeros_like(F)
    if n == 1:
        d = (F[1] - F[0]) / h
        return np.array([d, d])
    D = np.empty_like(F)
    D[1:-1] = (F[2:] - F[:-2]) / (2 * h)
    D[0] = (-3 * F[0] + 4 * F[1] - F[2]) / (2 * h)
    D[-1] = (3 * F[-1] - 4 * F[-2] + F[-3]) / (2 * h)
    return D


# F_k = a k + b k^{3/2} + c k^2 fitted through k = 1, 2, 3
_FIT = np.linalg.inv(np.array([[k, k**1.5, k * k] for k in (1.0, 2.0, 3.0)]))
_X32_CACHE: dict = {}
# F_k = a sqrt(k) + b k + c k^{3/2} through k = 1, 2, 3
_SQRT_FIT = np.linalg.inv(np.array([[k**0.5, k, k**1.5] for k in (1.0, 2.0, 3.0)]))
ZETA_M12 = -0.2078862249773545  # zeta(-1/2)


def _x32_error(n: int) -> np.ndarray:
    """Discrete-minus-exact inverse Abel of ``k^{3/2}`` on a unit-spaced row of length n+1."""
    size = 4
    while size < n + 1:
        size *= 2
    if size not in _X32_CACHE:
        k = np.arange(size + 2, dtype=float)
        F = k**1.5
        D = np.empty(size + 1)
        D[1:] = (F[2:] - F[:-2]) / 2.0
        D[0] = (-3 * F[0] + 4 * F[1] - F[2]) / 2.0
        w, q = _abel_weights(size)
        P = (np.convolve(D, w)[: size + 1] - q * D[0]) / np.pi
        _X32_CACHE[size] = P - 0.75 * k[: size + 1]
    E = _X32_CACHE[size][: n + 1].copy()
    # the last node uses a one-sided derivative
    one = (3 * n**1.5 - 4 * (n - 1) ** 1.5 + (n - 2) ** 1.5) / 2.0
    cen = ((n + 1) ** 1.5 - (n - 1) ** 1.5) / 2.0
    E[n] += (one - cen) * (2.0 / 3.0) / np.pi  # q_0 = 2/3
    return E


def row_start_coefficients(F: np.ndarray):
    """``(a, b)`` in ``F_k ~ a k + b k^{3/2} + c k^2`` near the first node (unit spacing)."""
    a, b, _ = _FIT @ F[1:4]
    return a, b


def start_slope(F: np.ndarray, h: float) -> complex:
    """``dF/dx`` at the first node of an equispaced row that vanishes there."""
    n = F.shape[0] - 1
    if n >= 3:
        return row_start_coefficients(F)[0] / h
    if n >= 1:
        return row_derivative(F, h)[0]
    return 0.0


# f2 ~ SQRT_FACTOR * conj(g0) * dM1/ds * sqrt(tau - tau0) at the start of a plus characteristic
SQRT_FACTOR = -SQRT_2PI * E_PLUS * 2.0 * np.sqrt(2.0) / np.pi

_SQRT_TRAP_CACHE: dict = {}


def sqrt_trapezoid_error(n: int) -> np.ndarray:
    """Trapezoid-minus-exact integral of ``sqrt(x)`` over ``[0, j]``, ``j = 0..n``, unit steps.

    Tends to ``zeta(-1/2)`` like ``1/(24 sqrt(j))``. Subtracting the whole
    sequence (not only its limit) keeps the first few nodes of each plus
    characteristic accurate, which the start of every inverse-Abel row needs.
    """
    size = 4
    while size < n + 1:
        size *= 2
    if size not in _SQRT_TRAP_CACHE:
        j = np.arange(size + 1, dtype=float)
        r = np.sqrt(j)
        _SQRT_TRAP_CACHE[size] = (np.cumsum(r) - 0.5 * r) - (2.0 / 3.0) * j**1.5
    return _SQRT_TRAP_CACHE[size][: n + 1]


def start_coefficient(lam: int, g0bar, slope, dt: float):
    """Multiplier of :func:`sqrt_trapezoid_error` for a plus characteristic.

    The integrand starts as ``alpha sqrt(tau - tau0)`` with
    ``alpha = lam * SQRT_FACTOR * conj(g0) * dM1/ds``; the correction to add
    after ``j`` steps is ``-alpha dt^{3/2} e_j``.
    """
    return -lam * SQRT_FACTOR * g0bar * slope * dt**1.5


def row_inverse_abel(F: np.ndarray, h: float, correct: bool = True) -> np.ndarray:
    """``(1/pi) int_{x_0}^{x_j} F'(y) / sqrt(x_j - y) dy`` on an equispaced row.

    ``F'`` is replaced by its finite-difference samples, interpolated
    linearly and integrated exactly against the kernel, which is exact for
    quadratics. Assumes ``F`` vanishes at the first node (no boundary term).
    With ``correct`` the ``x^{3/2}`` component near the first node (present in
    the GLM kernels next to the anti-diagonal) is fitted and its known
    discretisation error removed, restoring second order.
    """
    n = F.shape[0] - 1
    if n == 0:
        return np.zeros_like(F)
    D = row_derivative(F, h)
    w, q = _weights(n)
    out = np.convolve(D, w)[: n + 1]
    # the first node only carries the far half of its cell
    out -= q[: n + 1] * D[0]
    out[0] = 0.0
    out *= np.sqrt(h) / np.pi
    if correct and n >= 3:
        _, b = row_start_coefficients(F)
        out -= b * _x32_error(n) / np.sqrt(h)
    return out


def characteristic_minus(diag: Callable, rhs: Callable, t: float, s: float,
                         steps: Optional[int] = None, dt: Optional[float] = None):
    """``F(t,s) = F(x,x) + int_x^t f(tau, t+s-tau) dtau`` with ``x = (t+s)/2``.

    Trapezoid rule along the characteristic; pass ``dt`` to use the grid
    spacing (the characteristic then has ``(t-x)/dt`` cells).
    """
    if not -t - 1e-14 <= s <= t + 1e-14:
        raise ValueError("point outside the triangle -t <= s <= t")
    x = 0.5 * (t + s)
    tau = _trap_nodes(x, t, steps, dt)
    vals = np.asarray(rhs(tau, t + s - tau), dtype=complex) + 0j * tau
    return complex(diag(x)) + _trap(vals, tau)


def characteristic_plus(antidiag: Callable, rhs: Callable, t: float, s: float,
                        steps: Optional[int] = None, dt: Optional[float] = None):
    """``F(t,s) = F(y,-y) + int_y^t f(tau, tau+s-t) dtau`` with ``y = (t-s)/2``."""
    if not -t - 1e-14 <= s <= t + 1e-14:
        raise ValueError("point outside the triangle -t <= s <= t")
    y = 0.5 * (t - s)
    tau = _trap_nodes(y, t, steps, dt)
    vals = np.asarray(rhs(tau, tau + s - t), dtype=complex) + 0j * tau
    return complex(antidiag(y)) + _trap(vals, tau)


def _trap_nodes(a, b, steps, dt):
    if steps is None:
        steps = max(1, int(round((b - a) / dt))) if dt else 256
    return np.linspace(a, b, steps + 1)


def _trap(vals, tau):
    if tau.size < 2:
        return 0.0
    return complex(np.sum(0.5 * (vals[1:] + vals[:-1]) * np.diff(tau)))


# ---------------------------------------------------------------------------
# nonlinear DtN system


@dataclass
class DtnResult:
    field: KernelField
    g1: SampledFunction
    g1_values: np.ndarray
    picard_iterations: np.ndarray
    antidiagonal_drift: float

    def __iter__(self):
        # allows ``field, g1 = solve_dtn(...)``
        yield self.field
        yield self.g1


def solve_dtn(g0: BoundaryData, grid: TriangularGrid, picard_tol: float = 1e-12,
              max_iter: int = 50, drift_tol: Optional[float] = None,
              correct: bool = True) -> DtnResult:
    """March the quadratically nonlinear system for ``M1, M2`` and return ``g1``.

    With ``correct`` (default) two endpoint corrections remove the
    error terms caused by square-root behaviour next to the anti-diagonal:
    one inside :func:`row_inverse_abel`, and the exact trapezoid error of
    ``sqrt`` (:func:`sqrt_trapezoid_error`) along each plus characteristic,
    where the ``M2`` integrand grows like ``sqrt(tau - tau0)``.
    """
    N, dt = grid.N, grid.dt
    h = 2.0 * dt
    lam = g0.lam
    t = grid.t
    G = g0(t)
    Gb = np.conj(G)
    M1, M2 = _triangle(N), _triangle(N)
    P1, P2 = _triangle(N), _triangle(N)  # inverse Abel of each row
    F1, F2 = _triangle(N), _triangle(N)
    g1 = np.zeros(N + 1, dtype=complex)
    iters = np.zeros(N + 1, dtype=int)
    M1[0, 0] = G[0]
    if drift_tol is None:
        drift_tol = max(1e-8, 100.0 * dt**2)

    coef = np.zeros(N + 1, dtype=complex)  # start correction per plus characteristic
    step_err = np.diff(sqrt_trapezoid_error(N))
    start_corr = np.zeros(N, dtype=complex)
    for i in range(1, N + 1):
        gi, gbi = G[i], Gb[i]
        if correct:
            k = i - 1  # plus characteristic entering column 1 starts on row k
            coef[k] = start_coefficient(lam, Gb[k], start_slope(M1[k, : k + 1], h), dt)
            # node j of this row sits j steps along the characteristic from row i - j
            start_corr = coef[:i][::-1] * step_err[:i]
        m1p, m2p = M1[i - 1, :i], M2[i - 1, :i]
        f1p, f2p = F1[i - 1, :i], F2[i - 1, :i]
        m1 = np.empty(i + 1, dtype=complex)
        m2 = np.empty(i + 1, dtype=complex)
        m1[:i] = m1p + dt * f1p
        m1[i] = gi
        m2[0] = 0.0
        m2[1:] = m2p + dt * f2p + start_corr
        for it in range(1, max_iter + 1):
            p1 = row_inverse_abel(m1, h, correct)
            p2 = row_inverse_abel(m2, h, correct)
            g1i = gi * m2[i] - SQRT_2PI * E_MINUS * p1[i]
            f1 = -gi * (1j * lam * gbi * m1 + SQRT_2PI * E_PLUS * p2) + 1j * g1i * m2
            f2 = lam * (gbi * (1j * gi * m2 - SQRT_2PI * E_PLUS * p1)
                        - 1j * np.conj(g1i) * m1)
            n1 = m1p + 0.5 * dt * (f1p + f1[:i])
            n2 = m2p + 0.5 * dt * (f2p + f2[1:]) + start_corr
            diff = max(np.max(np.abs(n1 - m1[:i])), np.max(np.abs(n2 - m2[1:])))
            m1[:i] = n1
            m2[1:] = n2
            scale = max(np.max(np.abs(m1)), np.max(np.abs(m2)))
            if not np.isfinite(diff):
                raise SolverError("Picard iteration diverged", step=i)
            if diff <= picard_tol * scale:
                break
        else:
            raise SolverError(
                f"Picard iteration did not converge in {max_iter} iterations "
                f"(last update {diff:.3e}); reduce the step", step=i)
        # final consistent evaluation of the right-hand sides for this row
        p1 = row_inverse_abel(m1, h, correct)
        p2 = row_inverse_abel(m2, h, correct)
        g1i = gi * m2[i] - SQRT_2PI * E_MINUS * p1[i]
        F1[i, : i + 1] = -gi * (1j * lam * gbi * m1 + SQRT_2PI * E_PLUS * p2) + 1j * g1i * m2
        F2[i, : i + 1] = lam * (gbi * (1j * gi * m2 - SQRT_2PI * E_PLUS * p1)
                                - 1j * np.conj(g1i) * m1)
        M1[i, : i + 1], M2[i, : i + 1] = m1, m2
        P1[i, : i + 1], P2[i, : i + 1] = p1, p2
        g1[i] = g1i
        iters[i] = it
        drift = max(abs(m1[0]), abs(m2[0]))
        if drift > drift_tol:
            raise SolverError(f"anti-diagonal drift {drift:.3e} exceeds {drift_tol:.1e}", step=i)

    field_ = KernelField(grid, M1, M2)
    drift = float(max(np.max(np.abs(M1[:, 0])), np.max(np.abs(M2[:, 0]))))
    return DtnResult(field_, SampledFunction(t, g1), g1, iters, drift)


def field_inverse_abel(F: np.ndarray, grid: TriangularGrid, correct: bool = True) -> np.ndarray:
    out = _triangle(grid.N)
    for i in range(1, grid.N + 1):
        out[i, : i + 1] = row_inverse_abel(F[i, : i + 1], 2.0 * grid.dt, correct)
    return out


# ---------------------------------------------------------------------------
# forward Goursat problem and the global relation


def solve_goursat(g0: BoundaryData, g1: Callable, grid: TriangularGrid,
                  picard_tol: float = 1e-12, max_iter: int = 50,
                  correct: bool = True) -> KernelField:
    """Linear Goursat system for ``L1, M1, L2, M2`` given both boundary values.

    With ``correct`` the square-root start of ``L1`` next to the anti-diagonal
    is fitted row by row and its trapezoid error removed from the plus
    characteristics, as in :func:`solve_dtn`.
    """
    N, dt = grid.N, grid.dt
    lam = g0.lam
    t = grid.t
    G = g0(t)
    Gd = g0.derivative(t)
    G1 = np.asarray(g1(t), dtype=complex)
    alpha = 0.5 * lam * (G * np.conj(G1) - np.conj(G) * G1)
    beta = 0.5 * (1j * Gd - lam * np.abs(G) ** 2 * G)

    X = np.zeros((4, N + 1, N + 1), dtype=complex)  # L1, M1, L2, M2
    Fh = np.zeros_like(X)

    def rhs(i, x):
        l1, m1, l2, m2 = x
        return np.array([
            1j * G1[i] * l2 + alpha[i] * m1 + beta[i] * m2,
            2 * G[i] * l2 + 1j * G1[i] * m2,
            -1j * lam * np.conj(G1[i]) * l1 - alpha[i] * m2 + lam * np.conj(beta[i]) * m1,
            2 * lam * np.conj(G[i]) * l1 - 1j * lam * np.conj(G1[i]) * m1,
        ])

    X[0, 0, 0] = 0.5j * G1[0]
    X[1, 0, 0] = G[0]
    Fh[:, 0, :1] = rhs(0, X[:, 0, :1])
    # L1 grows like a sqrt(j) off the anti-diagonal and drives both plus equations;
    # coef[:, k] removes the trapezoid error of that start on the characteristic from row k
    coef = np.zeros((2, N + 1), dtype=complex)
    step_err = np.diff(sqrt_trapezoid_error(N))
    for i in range(1, N + 1):
        prev, fprev = X[:, i - 1, :i], Fh[:, i - 1, :i]
        k = i - 1
        if correct and k >= 3:
            a = (_SQRT_FIT @ X[0, k, 1:4])[0]
            coef[:, k] = -dt * a * np.array([-1j * lam * np.conj(G1[k]), 2 * lam * np.conj(G[k])])
        start_corr = coef[:, :i][:, ::-1] * step_err[:i]
        x = np.zeros((4, i + 1), dtype=complex)
        x[:2, :i] = prev[:2] + dt * fprev[:2]
        x[2:, 1:] = prev[2:] + dt * fprev[2:] + start_corr
        x[0, i], x[1, i] = 0.5j * G1[i], G[i]
        for it in range(max_iter):
            f = rhs(i, x)
            new_minus = prev[:2] + 0.5 * dt * (fprev[:2] + f[:2, :i])
            new_plus = prev[2:] + 0.5 * dt * (fprev[2:] + f[2:, 1:]) + start_corr
            diff = max(np.max(np.abs(new_minus - x[:2, :i])), np.max(np.abs(new_plus - x[2:, 1:])))
            x[:2, :i] = new_minus
            x[2:, 1:] = new_plus
            if diff <= picard_tol * max(1.0, np.max(np.abs(x))):
                break
        else:
            raise SolverError("Goursat Picard iteration did not converge", step=i)
        X[:, i, : i + 1] = x
        Fh[:, i, : i + 1] = rhs(i, x)
    return KernelField(grid, X[1], X[3], X[0], X[2])


def global_relation_residual(field_: KernelField, g0: BoundaryData):
    """Max-norm residuals ``(r1, r2, r3)`` of the zero-initial-data relations."""
    if field_.L1 is None or field_.L2 is None:
        raise ValueError("the field has no L-kernels; use solve_goursat")
    grid = field_.grid
    G = g0(grid.t)[:, None]
    P1 = field_inverse_abel(field_.M1, grid)
    P2 = field_inverse_abel(field_.M2, grid)
    R1 = field_.L1 - 0.5j * G * field_.M2 + SQRT_PI_2 * E_PLUS * P1
    R2 = field_.L2 + 0.5j * g0.lam * np.conj(G) * field_.M1 + SQRT_PI_2 * E_PLUS * P2
    mask = np.tril(np.ones((grid.N + 1, grid.N + 1), dtype=bool))
    r1 = float(np.max(np.abs(R1[mask])))
    r2 = float(np.max(np.abs(R2[mask])))
    r3 = float(np.max(np.abs(field_.M1[:, 0])) + np.max(np.abs(field_.L1[:, 0])))
    return r1, r2, r3


def alternative_system_residual(field_: KernelField, g0: BoundaryData):
    """Residuals of the second-order alternative system on interior nodes.

    With ``P_j = d/ds int M_j / sqrt(s - tau)``; characteristic derivatives
    are central differences along the grid diagonals.
    """
    grid = field_.grid
    N, dt = grid.N, grid.dt
    lam = g0.lam
    M1, M2 = field_.M1, field_.M2
    P1 = np.pi * field_inverse_abel(M1, grid)
    P2 = np.pi * field_inverse_abel(M2, grid)
    G = g0(grid.t)
    c = SQRT_PI_2 * E_PLUS
    d = np.sqrt(2.0 / np.pi) * E_PLUS
    r1 = r2 = 0.0
    for i in range(2, N):
        j = np.arange(1, i)
        dm = lambda X: (X[i + 1, j] - X[i - 1, j]) / (2 * dt)          # d_t - d_s
        dp = lambda X: (X[i + 1, j + 1] - X[i - 1, j - 1]) / (2 * dt)  # d_t + d_s
        ds = lambda X: (X[i, j + 1] - X[i, j - 1]) / (4 * dt)
        m1, m2, p1, p2 = M1[i, j], M2[i, j], P1[i, j], P2[i, j]
        g, gb = G[i], np.conj(G[i])
        mix = 1j * lam * abs(g) ** 2 * (m2 * p1 - m1 * p2)
        e1 = (m2 * dm(P1) - dm(M1) * p2 + c * g * ds(M2 * M2) + mix - d * g * p2**2)
        e2 = (m1 * dp(P2) - dp(M2) * p1 + lam * c * gb * ds(M1 * M1) + mix
              - lam * d * gb * p1**2)
        r1 = max(r1, float(np.max(np.abs(e1))))
        r2 = max(r2, float(np.max(np.abs(e2))))
    return r1, r2
