"""Hot iteration kernel with optional numba acceleration.

The relaxed fixed-point loop for an affine map x -> G x + g dominates
the runtime of long runs, so it gets a compiled kernel. Set the
environment variable ``ARTIFACT_DISABLE_NUMBA=1`` before import to force
the pure numpy fallback (same code, no @njit). ``HAS_NUMBA`` records
which path is active.
"""

from __future__ import annotations

import os

import numpy as np

_DISABLED = os.environ.get("ARTIFACT_DISABLE_NUMBA", "").strip() not in ("", "0")

if _DISABLED:
    HAS_NUMBA = False
else:
    try:
        from numba import njit

        HAS_NUMBA = True
    except ImportError:
        HAS_NUMBA = False


def _iterate_affine_impl(G, g, x0, lam, max_iters, eps, stride, snaps, residuals):
    """Relaxed iteration x_{k+1} = (1 - lam) x_k + lam (G x_k + g).

    Residuals ||x_k - (G x_k + g)|| are written into ``residuals`` for
    k = 0 .. k_end. Every ``stride``-th iterate (if stride > 0) is
    copied into ``snaps``. Returns (x_final, k_end, converged, n_snaps).
    """
    x = x0.copy()
    n_rec = 0
    k_end = max_iters
    converged = False
    for k in range(max_iters + 1):
        t = G @ x + g
        r = np.linalg.norm(x - t)
        residuals[k] = r
        if stride > 0 and k % stride == 0:
            snaps[n_rec, :] = x
            n_rec += 1
        if r <= eps:
            k_end = k
            converged = True
            break
        if k == max_iters:
            break
        x = (1.0 - lam) * x + lam * t
    return x, k_end, converged, n_rec


iterate_affine_numpy = _iterate_affine_impl

if HAS_NUMBA:
    iterate_affine_fast = njit(cache=True)(_iterate_affine_impl)
else:
    iterate_affine_fast = _iterate_affine_impl


def run_affine(G, g, x0, lam, max_iters, eps, stride=0, fast=True):
    """Driver allocating the output buffers and dispatching to a kernel.

    Parameters
    ----------
    G, g : ndarray
        Affine map x -> G x + g.
    x0 : ndarray
        Start point.
    lam : float
        Constant relaxation parameter.
    max_iters : int
        Iteration budget (the map is applied at most max_iters + 1 times).
    eps : float
        Stop once ||x_k - (G x_k + g)|| <= eps.
    stride : int
        If positive, record x_k for k = 0, stride, 2*stride, ...
    fast : bool
        Use the compiled kernel when available; False forces numpy.

    Returns
    -------
    x : ndarray
        Final iterate x_{k_end}.
    residuals : ndarray
        Residual history, length k_end + 1.
    converged : bool
    snaps : ndarray, shape (n_rec, dim)
        Recorded iterates (empty when stride == 0).
    snap_iters : ndarray
        Iteration indices of the recorded iterates.
    """
    G = np.ascontiguousarray(G, dtype=np.float64)
    g = np.ascontiguousarray(g, dtype=np.float64)
    x0 = np.ascontiguousarray(x0, dtype=np.float64)
    residuals = np.empty(max_iters + 1, dtype=np.float64)
    if stride > 0:
        snaps = np.empty((max_iters // stride + 1, x0.size), dtype=np.float64)
    else:
        snaps = np.empty((1, x0.size), dtype=np.float64)
    kernel = iterate_affine_fast if fast else iterate_affine_numpy
    x, k_end, converged, n_rec = kernel(
        G, g, x0, float(lam), int(max_iters), float(eps), int(stride),
        snaps, residuals,
    )
    snap_iters = np.arange(n_rec, dtype=np.int64) * max(stride, 1)
    return x, residuals[: k_end + 1], bool(converged), snaps[:n_rec], snap_iters
