"""Third-order Neumann coefficient for sine data, ``g0 = eps sin t``.

``lam * g13 = T1 + ... + T7``. T1, T3 and T4 have Fresnel closed forms; the
remaining terms are built from ``h``, ``H_c``, ``H_s`` and nested Abel (``A``)
and cumulative (``I``) transforms evaluated on a :class:`PanelGrid`.

One ingredient does not reduce to ``A`` and ``I``::

    G(t) = 2 int_0^t h(t') int_0^t' phi(x) / sqrt(t - t' + x) dx dt',
    phi = cos H_c + sin H_s,

and is computed on a uniform grid by summing over the lag ``t - t'``
(:func:`lag_integral`).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import special
from scipy.interpolate import make_interp_spline

from .panels import PanelGrid
from .special import SQRT_2PI, _cs_of_t, h_exact, hc_exact, hs_exact

C_CONST = 0.5 * np.sqrt(np.pi) * np.exp(-0.25j * np.pi)
SQRT3 = np.sqrt(3.0)

# composite 4th-order rule: first cell (9, 19, -5, 1)/24, interior (-1, 13, 13, -1)/24
_FIRST = np.array([9.0, 19.0, -5.0, 1.0]) / 24.0
_MID = np.array([-1.0, 13.0, 13.0, -1.0]) / 24.0


def _cells(f):
    """Per-cell integrals (unit spacing) of samples ``f`` with the 4th-order rule."""
    M = f.shape[0] - 1
    if M < 3:
        return 0.5 * (f[:-1] + f[1:])
    c = np.empty(M, dtype=f.dtype)
    c[0] = _FIRST @ f[:4]
    c[1:M - 1] = (_MID[0] * f[:M - 2] + _MID[1] * f[1:M - 1]
                  + _MID[2] * f[2:M] + _MID[3] * f[3:M + 1])
    c[M - 1] = _FIRST[::-1] @ f[M - 3:]
    return c


def cumulative4(f, dx: float):
    """``int_0^{x_m} f`` on a uniform grid, 4th order, starting at zero."""
    f = np.asarray(f)
    out = np.zeros(f.shape, dtype=np.result_type(f, float))
    if f.shape[0] > 1:
        out[1:] = dx * np.cumsum(_cells(f))
    return out


def composite_weights(n: int) -> np.ndarray:
    """Node weights (unit spacing) of the rule behind :func:`cumulative4` on ``n`` cells."""
    if n == 0:
        return np.zeros(1)
    w = np.zeros(n + 1)
    if n == 1:
        return w + 0.5
    if n == 2:
        return np.array([1.0, 4.0, 1.0]) / 3.0
    w[:4] += _FIRST
    for j in range(1, n - 1):
        w[j - 1:j + 3] += _MID
    w[n - 3:] += _FIRST[::-1]
    return w


_END = composite_weights(20)[:4] - 1.0

# Rule error per dx^3 on x^2 log x at a left end: -zeta'(-2) plus the
# end-weight changes relative to the trapezoid rule.
_X2LOG_END = (special.zeta(3) / (4 * np.pi**2)
              + sum(_END[j] * j * j * np.log(j) for j in (2, 3)))


def _x32_kernel(d: float, y):
    """``(4/3) int_0^y x^{3/2} (d + x)^{-1/2} dx`` in closed form."""
    y = np.asarray(y, dtype=float)
    if d == 0.0:
        return (2.0 / 3.0) * y * y
    u = y / d
    F = (0.5 * u**1.5 * np.sqrt(u + 1) - 0.75 * np.sqrt(u) * np.sqrt(u + 1)
         + 0.75 * np.arcsinh(np.sqrt(u)))
    return (4.0 / 3.0) * d * d * F


def lag_integral(h, phi, dx: float) -> np.ndarray:
    """``2 int_0^t h(t') int_0^t' phi(x)/sqrt(t - t' + x) dx dt'`` on ``t_n = n dx``.

    ``phi`` must behave like ``(4/3) x^{3/2}`` at the origin; that part is
    integrated exactly so the discrete rule only sees a smooth remainder.
    Cost is O(N^2) vector work.
    """
    h = np.asarray(h, dtype=float)
    phi = np.asarray(phi, dtype=float)
    N = h.size - 1
    x = dx * np.arange(N + 1)
    phir = phi - (4.0 / 3.0) * x**1.5
    G = np.zeros(N + 1)
    small = min(N, 7)
    Ksmall = np.zeros((small + 1, small + 1))
    for k in range(N + 1):
        M = N - k
        d = k * dx
        xm = x[:M + 1]
        if k == 0:
            f = np.zeros(M + 1)
            f[1:] = phir[1:M + 1] / np.sqrt(xm[1:])
        else:
            f = phir[:M + 1] / np.sqrt(d + xm)
        K = cumulative4(f, dx) + _x32_kernel(d, xm)
        if k <= small:
            Ksmall[k, :min(small, M) + 1] = K[:small + 1]
        w = np.ones(M + 1)
        nend = min(4, M + 1)
        w[:nend] += _END[:nend]
        if k < 4:
            w += _END[k]
        G[k:] += 2.0 * dx * w * h[:M + 1] * K
    # near t = 0 the end corrections overlap: redo those with exact weights
    for n in range(small + 1):
        W = composite_weights(n)
        G[n] = 2.0 * dx * sum(W[m] * h[m] * Ksmall[n - m, m] for m in range(n + 1))
    # K(d, y) contains -(1/2) d^2 log d from the x^{3/2} start of phi; the
    # lag rule sees it at d = 0 with a dx^3 error
    G[1:] += _X2LOG_END * dx**3 * h[1:]
    return G


def lag_integral_richardson(T: float, dx: float):
    """G for sine data on ``[0, T]``: steps ``dx`` and ``dx/2`` combined to cancel ``dx^4``.

    Returns ``(u, G)`` on the coarse grid.
    """
    n = int(np.ceil(T / dx))
    u = np.linspace(0.0, T, n + 1)
    uf = np.linspace(0.0, T, 2 * n + 1)
    coarse = lag_integral(h_exact(u), phi_exact(u), u[1] - u[0])
    fine = lag_integral(h_exact(uf), phi_exact(uf), uf[1] - uf[0])[::2]
    return u, (16.0 * fine - coarse) / 15.0


def phi_exact(t):
    t = np.asarray(t, dtype=float)
    return np.cos(t) * hc_exact(t) + np.sin(t) * hs_exact(t)


# ---------------------------------------------------------------------------
# closed-form pieces


def i_ssc(t):
    """Closed form of the sin-sin-cos triple Abel integral."""
    t = np.asarray(t, dtype=float)
    C1, S1 = _cs_of_t(t)
    C3, S3 = _cs_of_t(t, 3)
    st, ct = np.sin(t), np.cos(t)
    return 0.125 * (
        np.sqrt(6 * np.pi) * (S3 * np.cos(3 * t) - C3 * np.sin(3 * t))
        + SQRT_2PI * C1 * (3 * st + np.sin(3 * t) - 2 * t * ct)
        + 2 * st * (SQRT_2PI * S1 * (t + np.sin(2 * t)) + 2 * np.sqrt(t) * ct)
    )


def t1_term(t):
    t = np.asarray(t, dtype=float)
    C1, S1 = _cs_of_t(t)
    C3, S3 = _cs_of_t(t, 3)
    br = (-9 * C1 * np.sin(t) + SQRT3 * C3 * np.sin(3 * t)
          + 9 * S1 * np.cos(t) - SQRT3 * S3 * np.cos(3 * t))
    return 1j * C_CONST / (3 * SQRT_2PI) * br


def t3_term(t):
    t = np.asarray(t, dtype=float)
    return -np.sqrt(2 / np.pi) * hs_exact(t) * np.sin(t)


def t4_term(t):
    return -C_CONST / (np.pi * 1j) * i_ssc(t)


# ---------------------------------------------------------------------------
# the grid pipeline


@dataclass
class SineThirdOrder:
    """Node values of every ingredient of ``g13`` on a panel grid over ``[0, T]``.

    Attribute names follow the transforms they hold, e.g. ``A_hHs = A(h H_s)``
    and ``I_hHcc = I(h H_c cos)``.
    """

    grid: PanelGrid
    values: dict
    lag_dx: float

    def __getitem__(self, key):
        return self.values[key]

    def at(self, key: str, t):
        """Interpolate a stored node quantity to points ``t``."""
        return self.grid.interpolate(self.values[key], t)


def _build(T: float, lag_dx: float, order: int) -> SineThirdOrder:
    grid = PanelGrid(T, order=order)
    x = grid.nodes
    c, s = np.cos(x), np.sin(x)
    h, Hc, Hs = h_exact(x), hc_exact(x), hs_exact(x)
    Q = x / 2 - np.sin(2 * x) / 4

    A1 = grid.abel(np.stack([c * Q, Hc * c, Hs * s, Hc * s, Hs * c, h * Hs,
                             Hc**2 * c, Hs**2 * c, Hc * Hs * s], axis=1))
    (A_cQ, A_Hcc, A_Hss, A_Hcs, A_Hsc, A_hHs,
     A_Hc2c, A_Hs2c, A_HcHss) = A1.T
    I1 = grid.cumulative(np.stack([h * Hc * c, h * Hs * c, h * Hs * s, h * Hc * s,
                                   h * A_Hcc, h * A_Hsc, h * A_Hss, h * A_Hcs], axis=1))
    I_hHcc, I_hHsc, I_hHss, I_hHcs, J1, J2, J3, J4 = I1.T
    B = grid.abel(np.stack([c * I_hHcc, s * I_hHsc, c * I_hHss, s * I_hHcs], axis=1))
    B1, B2, B3, B4 = B.T

    G = make_interp_spline(*lag_integral_richardson(T, lag_dx), k=7)(x)

    C1, S1 = _cs_of_t(x)
    shh = (2 * A_hHs + 2 * c * J1 + 2 * s * J2 + 2 * c * J3 - 2 * s * J4
           - 2 * B1 - 2 * B2 - 2 * B3 + 2 * B4
           - 2 * Hc * A_Hcc - 2 * Hc * A_Hss + 2 * A_Hc2c
           - 2 * Hs * A_Hsc + 2 * Hs * A_Hcs + 2 * A_Hs2c)
    hsh = (4 * A_hHs - 2 * np.pi * Hs * s - 3 * A_Hc2c - 6 * A_HcHss + 3 * A_Hs2c
           + 2 * B1 + 2 * B2 - 2 * B3 + 2 * B4
           + 2 * Hc * A_Hcc + 2 * Hc * A_Hss + 2 * Hs * A_Hcs - 2 * Hs * A_Hsc)
    hhs = (2 * A_hHs + 2 * A_Hc2c + 2 * A_Hs2c - 2 * B1 - 2 * B2 - 2 * B3 + 2 * B4
           + 2 * SQRT_2PI * C1 * (-c * I_hHcc + s * I_hHsc - c * I_hHss - s * I_hHcs)
           + 2 * SQRT_2PI * S1 * (-c * I_hHsc - s * I_hHcc + c * I_hHcs - s * I_hHss)
           + G)

    cc = C_CONST
    T2 = -(2 * cc / (np.pi * 1j)) * (Q * h - A_cQ)
    T5 = cc / np.pi**2 * shh
    T6 = cc * 1j / np.pi**2 * hsh
    T7 = cc / np.pi**2 * hhs

    values = dict(
        h=h, Hc=Hc, Hs=Hs, G=G,
        A_Hcc=A_Hcc, A_Hss=A_Hss, A_Hcs=A_Hcs, A_Hsc=A_Hsc, A_hHs=A_hHs,
        A_Hc2c=A_Hc2c, A_Hs2c=A_Hs2c, A_HcHss=A_HcHss,
        I_hHcc=I_hHcc, I_hHsc=I_hHsc, I_hHss=I_hHss, I_hHcs=I_hHcs,
        J_Hcc=J1, J_Hsc=J2, J_Hss=J3, J_Hcs=J4,
        I_shh=shh, I_hsh=hsh, I_hhs=hhs,
        T2=T2, T5=T5, T6=T6, T7=T7,
    )
    return SineThirdOrder(grid, values, lag_dx)


@lru_cache(maxsize=4)
def _cached(T: float, lag_dx: float, order: int) -> SineThirdOrder:
    return _build(T, lag_dx, order)


def pipeline(t_max: float, lag_dx: float = 0.05, order: int = 20) -> SineThirdOrder:
    """Shared grid pipeline covering ``[0, t_max]`` (rounded up to a multiple of 8)."""
    T = 8.0 * max(1, int(np.ceil(float(t_max) / 8.0 - 1e-12)))
    return _cached(T, float(lag_dx), int(order))


def t_terms(t, lag_dx: float = 0.05) -> dict:
    """The seven contributions ``T1..T7`` at ``t`` (complex arrays)."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be non-negative")
    p = pipeline(float(np.max(t)) if t.size else 1.0, lag_dx)
    return dict(
        T1=t1_term(t), T2=p.at("T2", t), T3=t3_term(t) + 0j, T4=t4_term(t),
        T5=p.at("T5", t), T6=p.at("T6", t), T7=p.at("T7", t),
    )


def g13_sine(t, lam: int = 1, lag_dx: float = 0.05):
    """Third-order Neumann coefficient for ``g0 = eps sin t``."""
    if lam not in (1, -1):
        raise ValueError("lam must be +1 or -1")
    terms = t_terms(t, lag_dx)
    return lam * sum(terms.values())


def reduced_integral(name: str, t, lag_dx: float = 0.05):
    """``I_ssc``, ``I_shh``, ``I_hsh`` or ``I_hhs`` from the reduced forms."""
    t = np.asarray(t, dtype=float)
    if name == "ssc":
        return i_ssc(t)
    if name not in ("shh", "hsh", "hhs"):
        raise ValueError(f"unknown triple integral {name!r}")
    return pipeline(float(np.max(t)), lag_dx).at("I_" + name, t)
