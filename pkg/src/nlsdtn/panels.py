"""Composite Gauss-Legendre panel grid with Abel and cumulative operators.

The grid covers ``[0, T]`` with geometrically graded panels near ``t = 0``
(so sqrt-type behaviour there is resolved) and unit panels beyond. Function
samples live on the Gauss nodes; :meth:`PanelGrid.abel` and
:meth:`PanelGrid.cumulative` map node samples to node samples with
spectral accuracy, which is what the nested transforms in the third-order
sine-data formula need at large t.
"""

from __future__ import annotations

import numpy as np
from numpy.polynomial import legendre as L
from scipy import sparse


def _lagrange_matrix(nodes, x):
    """Barycentric interpolation matrix from ``nodes`` to points ``x``."""
    nodes = np.asarray(nodes, dtype=float)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    diff = nodes[:, None] - nodes[None, :]
    np.fill_diagonal(diff, 1.0)
    bw = 1.0 / np.prod(diff, axis=1)
    d = x[:, None] - nodes[None, :]
    exact = d == 0.0
    d[exact] = 1.0
    m = bw[None, :] / d
    m /= m.sum(axis=1, keepdims=True)
    rows = np.any(exact, axis=1)
    if np.any(rows):
        m[rows] = exact[rows].astype(float)
    return m


class PanelGrid:
    """Gauss nodes on panels ``[b_k, b_{k+1}]`` covering ``[0, T]``."""

    def __init__(self, T: float, order: int = 20, width: float = 1.0, grading: int = 40):
        if T <= 0:
            raise ValueError("T must be positive")
        self.T = float(T)
        self.order = int(order)
        first = min(width, self.T)
        graded = [first * 0.5**k for k in range(grading, 0, -1)]
        rest = np.arange(first, self.T, width)
        breaks = np.concatenate(([0.0], graded, rest, [self.T]))
        breaks = np.unique(breaks)
        if breaks[-1] - breaks[-2] < 1e-9 * width:
            breaks = np.delete(breaks, -2)
        self.breaks = breaks
        self.n_panels = len(breaks) - 1

        gx, gw = L.leggauss(self.order)
        self._gx, self._gw = gx, gw
        a, b = breaks[:-1], breaks[1:]
        half = 0.5 * (b - a)
        self.nodes = (half[:, None] * gx[None, :] + 0.5 * (a + b)[:, None]).ravel()
        self.weights = (half[:, None] * gw[None, :]).ravel()
        self.panel_of = np.repeat(np.arange(self.n_panels), self.order)
        self.size = self.nodes.size

        # cumulative integral inside a reference panel: S[i, j] = int_{-1}^{x_i} l_j
        V = L.legvander(gx, self.order - 1)
        coef = np.linalg.inv(V)
        S = np.empty((self.order, self.order))
        for j in range(self.order):
            S[:, j] = L.legval(gx, L.legint(coef[:, j], lbnd=-1))
        self._S = S
        self._near = None

    # -- pointwise helpers ------------------------------------------------

    def panel_index(self, t):
        t = np.asarray(t, dtype=float)
        idx = np.searchsorted(self.breaks, t, side="right") - 1
        return np.clip(idx, 0, self.n_panels - 1)

    def interpolate(self, values, t):
        """Evaluate the panel-wise polynomial interpolant at points ``t``."""
        values = np.asarray(values)
        t = np.asarray(t, dtype=float)
        flat = t.ravel()
        if np.any(flat < -1e-12) or np.any(flat > self.T * (1 + 1e-12)):
            raise ValueError("interpolation point outside the grid")
        out = np.empty(flat.shape + values.shape[1:], dtype=values.dtype)
        pidx = self.panel_index(flat)
        for p in np.unique(pidx):
            sel = pidx == p
            sl = slice(p * self.order, (p + 1) * self.order)
            M = _lagrange_matrix(self.nodes[sl], flat[sel])
            out[sel] = M @ values[sl]
        return out.reshape(t.shape + values.shape[1:])

    # -- operators --------------------------------------------------------

    def cumulative(self, values):
        """``int_0^{x_i} f`` at every node (batched over trailing axes)."""
        values = np.asarray(values)
        shp = values.shape
        v = values.reshape(self.n_panels, self.order, -1)
        half = 0.5 * np.diff(self.breaks)
        inside = np.einsum("ij,pjk->pik", self._S, v) * half[:, None, None]
        totals = np.einsum("j,pjk->pk", self._gw, v) * half[:, None]
        offset = np.concatenate((np.zeros((1, v.shape[2]), dtype=totals.dtype),
                                 np.cumsum(totals, axis=0)[:-1]))
        return (inside + offset[:, None, :]).reshape(shp)

    def integral(self, values):
        return np.tensordot(self.weights, np.asarray(values), axes=(0, 0))

    def _near_operator(self):
        """Sparse part of the Abel operator: panels close to the target."""
        if self._near is not None:
            return self._near
        n_u = self.order + 4
        ux, uw = L.leggauss(n_u)
        rows, cols, vals = [], [], []
        x = self.nodes
        for p in range(self.n_panels):
            a, b = self.breaks[p], self.breaks[p + 1]
            w = b - a
            sl = np.arange(p * self.order, (p + 1) * self.order)
            # targets inside panel p (partial) or within one panel width after it
            tgt = np.nonzero((x > a) & (x - b < w))[0]
            if tgt.size == 0:
                continue
            xt = x[tgt]
            upper = np.sqrt(xt - a)
            lower = np.sqrt(np.clip(xt - b, 0.0, None))
            mid, hw = 0.5 * (upper + lower), 0.5 * (upper - lower)
            u = mid[:, None] + hw[:, None] * ux[None, :]
            s = xt[:, None] - u * u
            M = _lagrange_matrix(self.nodes[sl], s.ravel()).reshape(len(tgt), n_u, self.order)
            blk = 2.0 * np.einsum("tu,tuj->tj", hw[:, None] * uw[None, :], M)
            rows.append(np.repeat(tgt, self.order))
            cols.append(np.tile(sl, len(tgt)))
            vals.append(blk.ravel())
        self._near = sparse.csr_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
            shape=(self.size, self.size),
        )
        return self._near

    def abel(self, values, chunk: int = 1024):
        """``A f(x_i) = int_0^{x_i} f(s) / sqrt(x_i - s) ds`` at all nodes."""
        values = np.asarray(values)
        shp = values.shape
        v = values.reshape(self.size, -1)
        out = np.asarray(self._near_operator() @ v, dtype=np.result_type(v, float))
        x = self.nodes
        pb = self.breaks[self.panel_of + 1]
        pw = np.diff(self.breaks)[self.panel_of]
        for start in range(0, self.size, chunk):
            stop = min(self.size, start + chunk)
            xt = x[start:stop, None]
            # far panels: whole panel ends at least one width before target
            far = (xt - pb[None, :]) >= pw[None, :]
            d = np.where(far, xt - x[None, :], 1.0)
            K = np.where(far, self.weights[None, :] / np.sqrt(d), 0.0)
            out[start:stop] += K @ v
        return out.reshape(shp)
