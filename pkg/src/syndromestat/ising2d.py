"""Anisotropic square-lattice Ising reference results.

The n=2 model of the 1D repetition code is an L x (T+1) anisotropic Ising
lattice with spatial coupling K_s = -log(1-2p) (doubled bond of the
single-flavor model) and temporal coupling K_t = -log(1-2q).  Two
independent routes to its critical line:

* the closed-form self-duality condition sinh(2 K_s) sinh(2 K_t) = 1;
* strip transfer matrices: the correlation-length ratio xi_W / W crossing
  between two strip widths locates the critical point without using the
  closed form.

Both are used to pin the expected Binder-crossing location before any
Monte Carlo runs.
"""

from __future__ import annotations

import math

import numpy as _np


def spatial_coupling(p: float) -> float:
    """Doubled (n=2) spatial coupling of the 1D repetition-code model."""
    return -math.log1p(-2.0 * p)


def temporal_coupling(q: float) -> float:
    return -math.log1p(-2.0 * q)


def critical_p_closed_form(q: float) -> float:
    """Solve sinh(2 K_s) sinh(2 K_t) = 1 for p at fixed q."""
    kt = temporal_coupling(q)
    target = 1.0 / math.sinh(2.0 * kt)
    ks = 0.5 * math.asinh(target)
    return 0.5 * (1.0 - math.exp(-ks))


def strip_transfer_matrix(width: int, ks: float, kt: float) -> _np.ndarray:
    """Symmetrized row-to-row transfer matrix of a periodic strip.

    Rows are rings of `width` spins with intra-row coupling ks; kt couples
    consecutive rows.  T = V^(1/2) H V^(1/2) with H the inter-row factor and
    V the intra-row factor, so eigenvalues are real.
    """
    size = 1 << width
    states = _np.arange(size, dtype=_np.uint64)
    # intra-row energy: -ks * sum_i s_i s_{i+1} (periodic)
    intra = _np.zeros(size)
    for i in range(width):
        j = (i + 1) % width
        si = 1.0 - 2.0 * ((states >> _np.uint64(i)) & 1).astype(_np.float64)
        sj = 1.0 - 2.0 * ((states >> _np.uint64(j)) & 1).astype(_np.float64)
        intra += si * sj
    v_half = _np.exp(0.5 * ks * intra)
    # inter-row: prod_i exp(kt * s_i s'_i) depends on popcount of XOR
    diff = _np.bitwise_xor.outer(states, states)
    flips = _np.bitwise_count(diff).astype(_np.float64)
    h = _np.exp(kt * (width - 2.0 * flips))
    return v_half[:, None] * h * v_half[None, :]


def _fwht(a: _np.ndarray) -> _np.ndarray:
    h = 1
    n = len(a)
    while h < n:
        a = a.reshape(-1, 2, h)
        top = a[:, 0, :].copy()
        a[:, 0, :] = top + a[:, 1, :]
        a[:, 1, :] = top - a[:, 1, :]
        a = a.reshape(n)
        h *= 2
    return a


def strip_xi(width: int, ks: float, kt: float) -> float:
    """Correlation length along the strip from the two largest eigenvalues.

    The symmetrized transfer matrix is applied as an operator: the inter-row
    factor depends only on the XOR of the two row states, so its action is a
    dyadic convolution (two Walsh-Hadamard transforms), giving O(2^W * W)
    per matrix-vector product instead of O(4^W) storage.
    """
    from scipy.sparse.linalg import LinearOperator, eigsh

    size = 1 << width
    states = _np.arange(size, dtype=_np.uint64)
    intra = _np.zeros(size)
    for i in range(width):
        j = (i + 1) % width
        si = 1.0 - 2.0 * ((states >> _np.uint64(i)) & 1).astype(_np.float64)
        sj = 1.0 - 2.0 * ((states >> _np.uint64(j)) & 1).astype(_np.float64)
        intra += si * sj
    v_half = _np.exp(0.5 * ks * (intra - intra.max()))
    flips = _np.bitwise_count(states).astype(_np.float64)
    kernel = _np.exp(kt * (width - 2.0 * flips) - kt * width)
    kernel_hat = _fwht(kernel.copy())

    def matvec(v):
        w = _fwht(v_half * _np.asarray(v, dtype=_np.float64))
        return v_half * _fwht(kernel_hat * w) / size

    op = LinearOperator((size, size), matvec=matvec, dtype=_np.float64)
    ev = eigsh(op, k=2, which="LA", return_eigenvectors=False, tol=1e-13)
    lam0, lam1 = max(ev), min(ev)
    return 1.0 / math.log(lam0 / lam1)


def critical_p_transfer_matrix(q: float, widths=(6, 8), lo: float = 0.2,
                               hi: float = 0.45, tol: float = 1e-10) -> float:
    """Critical p from the xi/W crossing of two strip widths (bisection)."""
    kt = temporal_coupling(q)
    w1, w2 = widths

    def gap(p):
        ks = spatial_coupling(p)
        return strip_xi(w1, ks, kt) / w1 - strip_xi(w2, ks, kt) / w2

    glo, ghi = gap(lo), gap(hi)
    if glo * ghi > 0:
        raise ValueError("bracket does not contain a crossing")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if gap(mid) * glo <= 0:
            hi = mid
        else:
            lo = mid
            glo = gap(lo)
    return 0.5 * (lo + hi)
