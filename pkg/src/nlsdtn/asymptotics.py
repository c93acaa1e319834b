"""Large-t behaviour of the Neumann coefficients for sine data.

Contents:

* shift checks: both sides of the exact 2pi-shift identities of the three
  integral operators of the kernel system, by direct quadrature;
* :func:`periodicity_defect`: decay rate of ``g(t + t_p) - g(t)`` and its
  classification into the three linear-limit rate classes;
* symbolic expansion tables for the Abel and cumulative transforms that enter
  ``g13`` and for the seven terms ``T1..T7``;
* :func:`extract_constants`: numerical values of the twelve additive
  constants ``k1..k12`` and the resulting ``c1, c2, c3``;
* :func:`g11_asym`, :func:`g13_asym`.

Expansions are kept as sympy expressions in ``t`` and ``k1..k12``.
:func:`harmonic_table` turns one into rows ``(power of t, harmonic, cos|sin,
coefficient)``, which is what the secular-cancellation check works on.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Dict, Sequence

import numpy as np
import sympy as sp
from scipy import integrate, stats

from .panels import PanelGrid
from .special import h_exact, hc_exact, hs_exact

E_MINUS = np.exp(-0.25j * np.pi)
TWO_PI = 2.0 * np.pi

# ---------------------------------------------------------------------------
# shift identities

_QUAD = dict(epsabs=1e-12, epsrel=1e-12, limit=400)


def _cquad(f, a, b, **kw):
    opts = dict(_QUAD, **kw)
    re = integrate.quad(lambda x: np.real(f(x)), a, b, **opts)[0]
    im = integrate.quad(lambda x: np.imag(f(x)), a, b, **opts)[0]
    return re + 1j * im


def _shifted(M: Callable) -> Callable:
    return lambda t, s: M(t + TWO_PI, s + TWO_PI)


def apply_I1(M: Callable, g: Callable, t: float, x: float):
    """``(I1 M)(t, x) = int_{x/2}^t g(tau) M(tau, x - tau) dtau``."""
    return _cquad(lambda tau: g(tau) * M(tau, x - tau), 0.5 * x, t)


def apply_I2(M: Callable, g: Callable, t: float, d: float):
    """``(I2 M)(t, d) = int_{d/2}^t g(tau) M(tau, tau - d) dtau``."""
    return _cquad(lambda tau: g(tau) * M(tau, tau - d), 0.5 * d, t)


def apply_I3(M_s: Callable, t: float, s: float):
    """``(I3 M)(t, s) = int_{-t}^s M_s(t, tau) / sqrt(s - tau) dtau``; ``M_s = dM/ds``."""
    if s <= -t:
        return 0.0
    f = lambda tau: M_s(t, tau)
    # long oscillatory ranges need more subdivisions than the default budget
    w = dict(weight="alg", wvar=(0.0, -0.5), limit=max(400, int(8 * (s + t))))
    return _cquad(f, -t, s, **w)


def shift_check_I1(M: Callable, g: Callable, t: float, s: float, hat: bool = True):
    """``(I1 M)(t + 2pi, t + s + 4pi)`` and ``(I1 M^)(t, t + s)``.

    ``M^(t, s) = M(t + 2pi, s + 2pi)``. With ``hat=False`` the right side uses
    ``M`` itself, which only agrees when ``M`` is 2pi-periodic in both
    arguments (a negative control).
    """
    lhs = apply_I1(M, g, t + TWO_PI, t + s + 2 * TWO_PI)
    rhs = apply_I1(_shifted(M) if hat else M, g, t, t + s)
    return lhs, rhs


def shift_check_I2(M: Callable, g: Callable, t: float, s: float):
    """``(I2 M)(t + 2pi, t - s)``, ``(I2 M^)(t, t - s)`` and the correction integral."""
    d = t - s
    lhs = apply_I2(M, g, t + TWO_PI, d)
    rhs = apply_I2(_shifted(M), g, t, d)
    corr = _cquad(lambda u: g(0.5 * d + u) * M(0.5 * d + u + TWO_PI, -0.5 * d + u + TWO_PI),
                  -TWO_PI, 0.0)
    return lhs, rhs, corr


def shift_check_I3(M_s: Callable, t: float, s: float):
    """``(I3 M)(t + 2pi, s + 2pi)``, ``(I3 M^)(t, s)`` and the correction integral.

    ``M_s`` is the derivative of ``M`` in its second argument.
    """
    lhs = apply_I3(M_s, t + TWO_PI, s + TWO_PI)
    rhs = apply_I3(_shifted(M_s), t, s)
    corr = _cquad(lambda u: M_s(t + TWO_PI, -t + u + TWO_PI) / np.sqrt(s + t - u),
                  -2 * TWO_PI, 0.0)
    return lhs, rhs, corr


# ---------------------------------------------------------------------------
# periodicity defect


@dataclass
class PeriodicityReport:
    t_samples: np.ndarray
    defect: np.ndarray
    period: float
    exponent: float = float("nan")
    exponent_ci: float = float("nan")
    amplitude: float = float("nan")
    log_corrected: bool = False
    residual: float = float("nan")
    classification: str = "unclassified"
    message: str = ""

    def to_json(self) -> dict:
        return dict(
            period=self.period, exponent=self.exponent, exponent_ci=self.exponent_ci,
            amplitude=self.amplitude, log_corrected=self.log_corrected,
            residual=self.residual, classification=self.classification,
            message=self.message, n_samples=int(self.t_samples.size),
        )

    def csv_rows(self):
        for t, d in zip(self.t_samples, self.defect):
            d = complex(d)
            yield (float(t), d.real, d.imag, abs(d))


def _envelope(t, d, period):
    """Window maxima of ``|d|`` over consecutive windows of one period."""
    a = np.abs(d)
    edges = np.arange(t[0], t[-1] + 1e-12, period)
    tc, env = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        sel = (t >= lo) & (t < hi)
        if np.any(sel):
            k = np.argmax(a[sel])
            tc.append(t[sel][k])
            env.append(a[sel][k])
    return np.array(tc), np.array(env)


def periodicity_defect(g: Callable, t_p: float, t_grid, rounding_factor: float = 1e3,
                       residual_tol: float = 0.1, band: float = 0.15) -> PeriodicityReport:
    """Measure and classify the decay of ``g(t + t_p) - g(t)`` on ``t_grid``.

    The decay rate is a least-squares fit of ``log |defect|`` against
    ``log t``, once as a pure power and once with a ``log t`` factor; the fit
    with a clearly smaller residual is kept. Oscillating defects are fitted through
    their per-period maxima when the grid resolves a period.

    Classes: ``"periodic"``, ``"t^-nu, nu<1/2"``, ``"t^-1/2 log t"``,
    ``"t^-1/2"``, ``"faster than t^-1/2"``, or ``"unclassified"``.
    """
    t = np.sort(np.asarray(t_grid, dtype=float))
    d = np.asarray(g(t + t_p)) - np.asarray(g(t))
    rep = PeriodicityReport(t, d, float(t_p))
    # rounding of t + t_p alone produces defects of order eps * t * |g'|
    scale = max(1.0, float(np.max(np.abs(g(t)))))
    if np.max(np.abs(d)) <= rounding_factor * np.finfo(float).eps * (t[-1] + t_p) * scale:
        rep.classification = "periodic"
        rep.exponent = float("inf")
        return rep
    per_window = t.size * t_p / (t[-1] - t[0])
    if per_window >= 8:
        tf, af = _envelope(t, d, t_p)
    else:
        tf, af = t, np.abs(d)
    keep = af > 0
    tf, af = tf[keep], af[keep]
    if tf.size < 4:
        rep.message = "too few non-zero samples to fit"
        return rep
    x, y = np.log(tf), np.log(af)
    fits = []
    for corrected in (False, True):
        yy = y - np.log(x) if corrected else y
        r = stats.linregress(x, yy)
        res = float(np.sqrt(np.mean((yy - r.intercept - r.slope * x) ** 2)))
        fits.append((res, corrected, r))
    # the log factor has to earn its keep: it is chosen only when it halves
    # the residual, otherwise t^-nu with nu near 1/2 would absorb it
    res, corrected, r = fits[1] if fits[1][0] < 0.5 * fits[0][0] else fits[0]
    p = -float(r.slope)
    rep.exponent, rep.exponent_ci = p, 1.96 * float(r.stderr)
    rep.amplitude, rep.log_corrected, rep.residual = float(np.exp(r.intercept)), corrected, res
    if p <= 0.02:
        rep.message = "defect does not decay"
        return rep
    if res > residual_tol:
        rep.message = f"fit residual {res:.3g} above {residual_tol}"
        return rep
    if corrected and abs(p - 0.5) <= band:
        rep.classification = "t^-1/2 log t"
    elif p < 0.5 - band:
        rep.classification = "t^-nu, nu<1/2"
    elif abs(p - 0.5) <= band:
        rep.classification = "t^-1/2"
    else:
        rep.classification = "faster than t^-1/2"
    return rep


# ---------------------------------------------------------------------------
# symbolic expansion tables

t_sym = sp.Symbol("t", positive=True)
K_SYM = sp.symbols("k1:13", real=True)
_S3 = sp.sqrt(3)
_PI = sp.pi


def _trig():
    t = t_sym
    return t, sp.sin(t), sp.cos(t), sp.sin(2 * t), sp.cos(2 * t), sp.sin(3 * t), sp.cos(3 * t)


def _abel_trig_tables():
    t, s, c, s2, c2, s3, c3 = _trig()
    rt = sp.sqrt(_PI) / (6 * sp.sqrt(t))
    q = _PI / (8 * _S3)
    return {
        "A_Hcc": _PI * t / 4 * (s + c) - _PI * s / 8 - q * c3 - rt,
        "A_Hss": _PI * t / 4 * (s - c) + _PI * s / 8 + q * c3 + rt,
        "A_Hcs": _PI * t / 4 * (s - c) + _PI * s / 4 + _PI * c / 8 - q * s3 - rt,
        "A_Hsc": _PI * t / 4 * (s + c) - _PI * s / 4 + _PI * c / 8 - q * s3 - rt,
    }


def _cumulative_tables():
    t, s, c, s2, c2, s3, c3 = _trig()
    k = K_SYM
    s4, c4 = sp.sin(4 * t), sp.cos(4 * t)
    a = _PI ** sp.Rational(3, 2) / sp.sqrt(2)
    r3 = 32 * _S3
    r4 = 64 * _S3
    J = {
        "J_Hcc": a * (t**2 / 8 - t / 16 - t * c2 / 8 - s2 / r3 + 3 * s2 / 32 - s4 / r4
                      - c2 / r3 + c2 / 32 + c4 / r4) + k[0],
        "J_Hsc": a * (t**2 / 8 - t / 16 - t * c2 / 8 - s2 / r3 + 5 * s2 / 32 + s4 / r4
                      + c2 / r3 + c2 / 32 + c4 / r4) + k[1],
        "J_Hss": a * (t / 16 - t * s2 / 8 + s2 / r3 - s2 / 32 + s4 / r4
                      + c2 / r3 - 3 * c2 / 32 - c4 / r4) + k[2],
        "J_Hcs": a * (3 * t / 16 - t * s2 / 8 - s2 / r3 - s2 / 32 + s4 / r4
                      + c2 / r3 - 5 * c2 / 32 + c4 / r4) + k[3],
    }
    w = sp.sqrt(_PI / 2) / (4 * sp.sqrt(t))
    I = {
        "I_hHcc": _PI * t**2 / 16 + _PI * t * (s2 - c2) / 16 - _PI * s4 / 64 - w * s + k[4],
        "I_hHsc": (_PI * t**2 / 16 - _PI * t / 16 + _PI * t * (s2 - c2) / 16 + _PI * c2 / 16
                   + _PI * c4 / 64 - w * s + k[5]),
        "I_hHss": _PI * t**2 / 16 - _PI * t * (s2 + c2) / 16 + _PI * s4 / 64 + w * c + k[6],
        "I_hHcs": (_PI * t**2 / 16 + _PI * t / 16 - _PI * t * (s2 + c2) / 16 - _PI * c2 / 16
                   + _PI * c4 / 64 + w * c + k[7]),
    }
    b = sp.sqrt(_PI / 32)
    rt = sp.sqrt(t)
    L = {
        "I1": b * (t ** sp.Rational(3, 2) * s - rt * s / 2 - rt * s3 / 6 + 3 * rt * c / 2) + k[8],
        "I2": b * (-rt * s - rt * c / 2 - rt * c3 / 6) + k[9],
        "I3": b * (-rt * s / 2 + rt * s3 / 6 - rt * c) + k[10],
        "I4": b * (-t ** sp.Rational(3, 2) * c + 3 * rt * s / 2 - rt * c / 2 + rt * c3 / 6) + k[11],
    }
    return J, I, L


def _t_term_tables():
    t, s, c, s2, c2, s3, c3 = _trig()
    k1, k2, k3, k4, k5, k6, k7, k8, k9, k10, k11, k12 = K_SYM
    i = sp.I
    third = c3 - s3
    pre = (1 - i) / (64 * _PI)
    q = 32 * sp.sqrt(2 / _PI)
    return {
        "T1": (1 + i) / 24 * (9 * (c - s) - _S3 * third),
        "T2": (1 + i) / 48 * (6 * s + (_S3 - 3) * s3 - 12 * c - (_S3 - 3) * c3),
        "T3": -(s / 4) * (2 * t - s2 - c2),
        "T4": pre * (4 * i * _PI * t * (s - c)
                     + 2 * i * _PI * (3 * s + c + (_S3 - 1) * third)),
        "T5": pre * (-4 * _PI * t * (c - 3 * s)
                     + q * ((k1 + k3) * c + (k2 - k4) * s)
                     + s * (_PI - 32 * (k5 + k6 + k7 - k8))
                     + c * (_PI - 32 * (k5 - k6 + k7 + k8))
                     + 2 * (_S3 - 1) * _PI * third),
        "T6": pre * (4 * i * _PI * t * (3 * s + c)
                     + 4 * i * s * (8 * k5 + 8 * k6 - 8 * k7 + 8 * k8 - 2 * _PI)
                     + 4 * i * c * (8 * k5 - 8 * (k6 + k7 + k8))
                     + 2 * i * (_S3 - 1) * _PI * third),
        "T7": pre * (4 * _PI * t * (s + c)
                     + s * (32 * k10 + 32 * k12 - 64 * k5 - 64 * k7 - _PI)
                     + c * (32 * k11 - 64 * k5 - 64 * k7 + 32 * k9 - _PI)
                     + 2 * (_S3 - 1) * _PI * third),
    }


def _c_tables():
    k1, k2, k3, k4, k5, k6, k7, k8, k9, k10, k11, k12 = K_SYM
    i = sp.I
    pre = (1 - i) / (2 * _PI)
    r = sp.sqrt(2 / _PI)
    c1 = pre * (r * (k1 + k3) - (3 - i) * k5 + (1 - i) * k6 - (3 + i) * k7 - (1 + i) * k8
                + k9 + k11 + (sp.Rational(1, 8) + sp.Rational(7, 16) * i) * _PI)
    c2 = pre * (r * (k2 - k4) - (3 - i) * k5 - (1 - i) * k6 - (3 + i) * k7 + (1 + i) * k8
                + k10 + k12 - (sp.Rational(1, 8) + sp.Rational(11, 16) * i) * _PI)
    c3 = (1 - _S3) * (_S3 + i) / 16
    return c1, c2, c3


ABEL_TRIG = _abel_trig_tables()
J_TABLES, IH_TABLES, I_TABLES = _cumulative_tables()
T_TABLES = _t_term_tables()
C1_SYM, C2_SYM, C3_SYM = _c_tables()
C3 = complex(C3_SYM)

# which constant belongs to which cumulative expansion
CONSTANT_OF = {
    "J_Hcc": 1, "J_Hsc": 2, "J_Hss": 3, "J_Hcs": 4,
    "I_hHcc": 5, "I_hHsc": 6, "I_hHss": 7, "I_hHcs": 8,
    "I1": 9, "I2": 10, "I3": 11, "I4": 12,
}
CUMULATIVE_NAMES = tuple(list(J_TABLES) + list(IH_TABLES))


def harmonic_table(expr) -> Dict[tuple, sp.Expr]:
    """Rows ``(power, n, 'cos'|'sin') -> coefficient`` of ``sum c t^p trig(n t)``.

    Trigonometric products are expanded through ``exp(i t)`` and collected,
    so the table of a given function is unique.
    """
    t, z = t_sym, sp.Symbol("z")
    e = sp.expand(sp.sympify(expr).rewrite(sp.exp))
    e = sp.expand(e.subs(sp.exp(sp.I * t), z))
    rows: Dict[tuple, sp.Expr] = {}
    for term in sp.Add.make_args(e):
        coef, n = term.as_coeff_exponent(z)
        coef, p = coef.as_coeff_exponent(t)
        rows[(p, int(n))] = rows.get((p, int(n)), 0) + coef
    table: Dict[tuple, sp.Expr] = {}
    for p, n in {(p, abs(n)) for p, n in rows}:
        a, b = rows.get((p, n), 0), rows.get((p, -n), 0)
        # a z^n + b z^-n = (a + b) cos(n t) + i (a - b) sin(n t)
        cc = sp.nsimplify(sp.simplify(a if n == 0 else a + b))
        ss = 0 if n == 0 else sp.simplify(sp.I * (a - b))
        if sp.simplify(cc) != 0:
            table[(p, n, "cos")] = sp.simplify(cc)
        if ss != 0:
            table[(p, n, "sin")] = ss
    return table


def secular_coefficients(names: Sequence[str] = ("T3", "T4", "T5", "T6", "T7")) -> Dict[tuple, sp.Expr]:
    """Coefficients of ``t^p trig(n t)`` with ``p > 0`` in the sum of the named T tables."""
    total: Dict[tuple, sp.Expr] = {}
    for nm in names:
        for key, cf in harmonic_table(T_TABLES[nm]).items():
            if key[0] > 0:
                total[key] = total.get(key, 0) + cf
    return {key: sp.simplify(v) for key, v in total.items()}


@lru_cache(maxsize=None)
def _numeric(expr_key: str):
    expr = _lookup(expr_key)
    return sp.lambdify((t_sym,) + tuple(K_SYM), expr, "numpy")


def _lookup(name: str):
    for tab in (ABEL_TRIG, J_TABLES, IH_TABLES, I_TABLES, T_TABLES):
        if name in tab:
            return tab[name]
    if name == "c1":
        return C1_SYM
    if name == "c2":
        return C2_SYM
    raise KeyError(f"no expansion named {name!r}")


def evaluate_expansion(name: str, t, k: Sequence[float] | None = None):
    """Numerical value of a stored expansion; ``k`` defaults to all zeros."""
    t = np.asarray(t, dtype=float)
    kk = np.zeros(12) if k is None else np.asarray(k, dtype=float)
    out = _numeric(name)(t, *kk)
    return np.broadcast_to(out, t.shape) + 0.0 * t


def abel_htrig_asym(name: str, t):
    """Expansion of ``A(H_c cos)``, ``A(H_s sin)``, ``A(H_c sin)``, ``A(H_s cos)``.

    ``name`` is one of ``A_Hcc, A_Hss, A_Hcs, A_Hsc`` (``A_Hcs = A(H_c sin)``).
    """
    if name not in ABEL_TRIG:
        raise KeyError(f"unknown Abel expansion {name!r}")
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise ValueError("t must be positive")
    return evaluate_expansion(name, t)


# ---------------------------------------------------------------------------
# constants


class UncalibratedError(RuntimeError):
    """Raised when an expansion needs constants that were not extracted."""


@dataclass
class ConstantsTable:
    k: np.ndarray
    k_err: np.ndarray
    k_imag: np.ndarray = field(default_factory=lambda: np.zeros(12))
    calibration: dict = field(default_factory=dict)

    @property
    def c1(self) -> complex:
        return complex(evaluate_expansion("c1", 1.0, self.k))

    @property
    def c2(self) -> complex:
        return complex(evaluate_expansion("c2", 1.0, self.k))

    @property
    def c3(self) -> complex:
        return C3

    def to_json(self) -> dict:
        out = {}
        for j in range(12):
            out[f"k{j + 1}"] = {"value": float(self.k[j]), "error": float(self.k_err[j]),
                                "imag": float(self.k_imag[j])}
        for nm, c in (("c1", self.c1), ("c2", self.c2), ("c3", self.c3)):
            out[nm] = {"re": c.real, "im": c.imag}
        out["calibration"] = self.calibration
        return out

    @classmethod
    def from_json(cls, data: dict) -> "ConstantsTable":
        k = np.array([data[f"k{j}"]["value"] for j in range(1, 13)])
        e = np.array([data[f"k{j}"]["error"] for j in range(1, 13)])
        im = np.array([data[f"k{j}"].get("imag", 0.0) for j in range(1, 13)])
        return cls(k, e, im, dict(data.get("calibration", {})))

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)


def _require(k: ConstantsTable | None):
    if k is None:
        raise UncalibratedError("this expansion needs a ConstantsTable; run extract_constants()")
    return k


def cumulative_asym(name: str, t, k: ConstantsTable | None):
    """Expansion of ``I[h A(H trig)]`` (``J_*``) or ``I(h H trig)`` (``I_hH*``) with its constant."""
    if name not in CUMULATIVE_NAMES:
        raise KeyError(f"unknown cumulative expansion {name!r}")
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise ValueError("t must be positive")
    return evaluate_expansion(name, t, _require(k).k)


def i1234_asym(name: str, t, k: ConstantsTable | None):
    if name not in I_TABLES:
        raise KeyError(f"unknown expansion {name!r}")
    return evaluate_expansion(name, np.asarray(t, dtype=float), _require(k).k)


def t_term_asym(name: str, t, k: ConstantsTable | None = None):
    """Large-t form of ``T1..T7``; ``T5..T7`` need the constants."""
    if name in ("T5", "T6", "T7"):
        return evaluate_expansion(name, t, _require(k).k)
    return evaluate_expansion(name, t)


def g11_asym(t):
    """Leading periodic part of ``g11`` for ``g01 = sin t``."""
    t = np.asarray(t, dtype=float)
    return -E_MINUS / np.sqrt(2.0) * (np.cos(t) + np.sin(t))


def g11_sine(t):
    """Exact ``g11 = -e^{-i pi/4} h / sqrt(pi)`` for ``g01 = sin t``."""
    return -E_MINUS / np.sqrt(np.pi) * h_exact(t)


def g13_asym(t, k: ConstantsTable | None):
    """``c1 cos t + c2 sin t + c3 (cos 3t - sin 3t)``."""
    k = _require(k)
    t = np.asarray(t, dtype=float)
    return k.c1 * np.cos(t) + k.c2 * np.sin(t) + C3 * (np.cos(3 * t) - np.sin(3 * t))


# -- numerical extraction ----------------------------------------------------


def cumulative_data(T: float, order: int = 20) -> tuple:
    """Node values of the twelve cumulative transforms on a panel grid over ``[0, T]``."""
    grid = PanelGrid(T, order=order)
    x = grid.nodes
    c, s = np.cos(x), np.sin(x)
    h, Hc, Hs = h_exact(x), hc_exact(x), hs_exact(x)
    A = grid.abel(np.stack([Hc * c, Hs * c, Hs * s, Hc * s], axis=1))
    A_Hcc, A_Hsc, A_Hss, A_Hcs = A.T
    inner = grid.cumulative(np.stack([
        Hc * c * c + (Hs + Hc) * c * s + Hs * s * s,
        Hc * c * c + (Hs - Hc) * c * s - Hs * s * s,
        -Hc * c * c + (Hc - Hs) * c * s + Hs * s * s,
    ], axis=1))
    P, Q, R = inner.T
    rx = np.sqrt(x)
    data = grid.cumulative(np.stack([
        h * A_Hcc, h * A_Hsc, h * A_Hss, h * A_Hcs,
        h * Hc * c, h * Hs * c, h * Hs * s, h * Hc * s,
        c * P / rx, c * Q / rx, s * R / rx, s * P / rx,
    ], axis=1))
    names = list(CONSTANT_OF)
    return grid, {nm: data[:, j] for j, nm in enumerate(names)}


def window_average(f: Callable, t, width: float = TWO_PI, nodes: int = 64):
    """``(1/width) int_{t - width/2}^{t + width/2} f`` by Gauss-Legendre."""
    gx, gw = np.polynomial.legendre.leggauss(nodes)
    t = np.asarray(t, dtype=float)
    pts = t[..., None] + 0.5 * width * gx
    return 0.5 * (f(pts) @ gw)


def limit_constant(f: Callable, t_lo: float, t_hi: float, samples: int = 48,
                   terms: int = 3):
    """Extrapolate ``lim f(t)`` for ``f = const + oscillation + decaying tail``.

    ``f`` is averaged over 2pi windows, which removes period-2pi
    oscillations up to terms one power of ``t`` smaller. The averages are
    fitted by ``sum_m a_m t^{-m/2}``, ``m < terms``. The error estimate is the
    largest change of the constant when one term is dropped or added, or
    when only the upper half of the range is used.
    """
    t = np.linspace(t_lo + np.pi, t_hi - np.pi, samples)
    avg = window_average(f, t)
    u = t ** -0.5

    def fit(sel, n):
        V = u[sel, None] ** np.arange(n)
        return np.linalg.lstsq(V, avg[sel], rcond=None)[0][0]

    everything = np.ones_like(t, dtype=bool)
    upper = t >= 0.5 * (t[0] + t[-1])
    est = fit(everything, terms)
    alts = [fit(everything, terms - 1), fit(everything, terms + 1), fit(upper, terms)]
    err = max(abs(a - est) for a in alts)
    return est, err


def extract_constants(t_max: float = 800.0, t_min: float | None = None, order: int = 20,
                      samples: int = 48, terms: int = 3,
                      max_error: float = 1e-2) -> ConstantsTable:
    """Numerical values of ``k1..k12``.

    Each cumulative transform is computed on a panel grid, its stored
    expansion (with zero constant) is subtracted and the limit of the
    difference is extrapolated by :func:`limit_constant` on
    ``[t_min, t_max]`` (``t_min`` defaults to ``t_max / 4``).
    """
    if t_max < 100:
        raise ValueError("t_max must be at least 100")
    t_min = 0.25 * t_max if t_min is None else float(t_min)
    grid, data = cumulative_data(t_max, order)
    k = np.zeros(12)
    err = np.zeros(12)
    imag = np.zeros(12)
    for nm, j in CONSTANT_OF.items():
        vals = data[nm]
        diff = lambda x, vals=vals, nm=nm: (grid.interpolate(vals, x)
                                            - evaluate_expansion(nm, x))
        est, e = limit_constant(diff, t_min, t_max, samples, terms)
        k[j - 1] = float(np.real(est))
        imag[j - 1] = float(np.imag(est))
        err[j - 1] = float(e)
    calib = dict(t_min=t_min, t_max=float(t_max), panel_order=int(order), samples=int(samples),
                 tail_terms_in_inverse_sqrt_t=int(terms), window=TWO_PI)
    table = ConstantsTable(k, err, imag, calib)
    worst = int(np.argmax(err))
    if err[worst] > max_error:
        raise RuntimeError(f"extrapolation of k{worst + 1} did not converge "
                           f"(error estimate {err[worst]:.3g})")
    return table
