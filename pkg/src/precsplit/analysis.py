"""Closed-form analysis tools.

Two groups of results live here. First, the fully explicit two-lines
model problem (projections onto two lines through the origin in R^2,
run through the saddle splitting with step sizes sigma = 1/tau): its
iteration matrix, spectral radius, operator norm, and norm bounds all
have closed forms, which makes it the standard validation target for
the numeric path. Second, factorization routes that produce a factor C
with C C^T = M for the saddle preconditioner

    M = [[ (1/sigma) I, -L^T ], [ -L, (1/tau) I ]],

either by (pivoted) Cholesky or through the principal square root of M
in symmetric and polar-decomposition form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .linalg import _as_matrix

_COND_TOL = 1e-12


@dataclass
class TwoLinesReport:
    """Closed-form versus numeric spectral data for the two-lines map."""

    theta: float
    tau: float
    T_matrix: np.ndarray
    rho_closed: float
    rho_numeric: float
    norm_closed: float
    norm_numeric: float
    lower_bound: float
    upper_bound: float


@dataclass
class FactorizationResult:
    """A factor C with C C^T = M plus bookkeeping.

    ``route`` is one of "cholesky", "sqrt_sym", "sqrt_polar",
    "scalar_2x2". ``reconstruction_error`` is the spectral norm of
    C C^T - M.
    """

    C: np.ndarray
    reconstruction_error: float
    route: str


def two_lines_T(theta, tau):
    """Iteration matrix for projections onto two lines in R^2.

    The first line is the horizontal axis, the second is rotated by
    ``theta``; the saddle splitting with L = I and step sizes
    sigma = 1/tau, tau couples them. The resulting map on R^4 = R^2 x
    R^2 is linear with matrix

        [ 1        0         -1/tau     0      ]
        [ 0        0          0         0      ]
        [ t s^2    t c s     -s^2      -c s    ]
        [-t c s   -t c^2      c s       c^2    ]

    where c = cos(theta), s = sin(theta), t = tau.
    """
    tau = float(tau)
    if not (tau > 0):
        raise ValueError(f"tau must be positive, got {tau}")
    c = np.cos(theta)
    s = np.sin(theta)
    return np.array([
        [1.0, 0.0, -1.0 / tau, 0.0],
        [0.0, 0.0, 0.0, 0.0],
        [tau * s * s, tau * c * s, -s * s, -c * s],
        [-tau * c * s, -tau * c * c, c * s, c * c],
    ])


def two_lines_norm(theta, tau):
    """Closed-form operator norm of :func:`two_lines_T`."""
    tau = float(tau)
    if not (tau > 0):
        raise ValueError(f"tau must be positive, got {tau}")
    t2 = tau * tau
    root = np.sqrt(1.0 + t2 * t2 - 2.0 * t2 * np.cos(2.0 * theta))
    inner = (1.0 + t2 * t2 + (1.0 + t2) * root) / (2.0 * t2)
    return float(np.sqrt(1.0 + inner))


def two_lines_report(theta, tau):
    """Closed-form and numeric spectral data for the two-lines map.

    The spectral radius is |cos(theta)| for every tau; the operator
    norm has the closed form of :func:`two_lines_norm` and satisfies

        sqrt(1 + max(tau^2, 1/tau^2)) <= ||T|| <= tau + 1/tau,

    with the lower bound attained at theta = 0, tau = 1 and the upper
    bound at theta = pi/2.
    """
    T = two_lines_T(theta, tau)
    lower = float(np.sqrt(1.0 + max(tau * tau, 1.0 / (tau * tau))))
    upper = float(tau + 1.0 / tau)
    return TwoLinesReport(
        theta=float(theta),
        tau=float(tau),
        T_matrix=T,
        rho_closed=float(abs(np.cos(theta))),
        rho_numeric=linalg.spectral_radius(T),
        norm_closed=two_lines_norm(theta, tau),
        norm_numeric=linalg.operator_norm(T),
        lower_bound=lower,
        upper_bound=upper,
    )


def metric_matrix(L, sigma, tau):
    """Saddle preconditioner M for the coupling L and step sizes."""
    L = _as_matrix(L, "L")
    if not (sigma > 0 and tau > 0):
        raise ValueError(f"step sizes must be positive, got {sigma}, {tau}")
    m, n = L.shape
    M = np.zeros((n + m, n + m))
    M[:n, :n] = np.eye(n) / sigma
    M[:n, n:] = -L.T
    M[n:, :n] = -L
    M[n:, n:] = np.eye(m) / tau
    return M


def _check_step_condition(L, sigma, tau):
    norm_L = linalg.operator_norm(L)
    if sigma * tau * norm_L**2 > 1.0 + _COND_TOL:
        raise ValueError(
            f"step sizes violate sigma*tau*||L||^2 <= 1: "
            f"{sigma * tau * norm_L**2:.6g}"
        )
    return norm_L


def factor_cholesky(L, sigma, tau):
    """Cholesky-based factor of the saddle preconditioner.

    Writes M = C C^T with

        C = [ (1/sqrt(sigma)) I,     0          ]
            [ -sqrt(sigma) L,        (1/sqrt(tau)) Z ]

    where Z Z^T = I - sigma*tau * L L^T comes from a (pivoted) Cholesky
    factorization. Zero columns of Z (rank deficiency, e.g. when
    sigma*tau*||L||^2 = 1) are dropped, so C can have fewer than n + m
    columns; in the extreme case sigma*tau * L L^T = I the Z block
    disappears entirely.
    """
    L = _as_matrix(L, "L")
    if not (sigma > 0 and tau > 0):
        raise ValueError(f"step sizes must be positive, got {sigma}, {tau}")
    _check_step_condition(L, sigma, tau)
    m, n = L.shape
    Z = linalg.cholesky(np.eye(m) - sigma * tau * (L @ L.T))
    keep = np.linalg.norm(Z, axis=0) > 0.0
    Z = Z[:, keep]
    C = np.zeros((n + m, n + Z.shape[1]))
    C[:n, :n] = np.eye(n) / np.sqrt(sigma)
    C[n:, :n] = -np.sqrt(sigma) * L
    C[n:, n:] = Z / np.sqrt(tau)
    M = metric_matrix(L, sigma, tau)
    err = linalg.operator_norm(C @ C.T - M)
    return FactorizationResult(C=C, reconstruction_error=err, route="cholesky")


def factor_scalar(lam):
    """Factor for the 2x2 family M = [[1, -lam], [-lam, 1]], |lam| <= 1.

    For |lam| < 1 the factor is the principal square root

        S = 1/2 [[a + b, a - b], [a - b, a + b]],
        a = sqrt(1 - lam), b = sqrt(1 + lam).

    At |lam| = 1 the metric has rank one and the factor collapses to
    the single column (1, -lam)^T.
    """
    lam = float(lam)
    if abs(lam) > 1.0 + _COND_TOL:
        raise ValueError(f"|lam| must be at most 1, got {lam}")
    M = np.array([[1.0, -lam], [-lam, 1.0]])
    if abs(lam) >= 1.0:
        C = np.array([[1.0], [-np.sign(lam)]])
    else:
        a = np.sqrt(1.0 - lam)
        b = np.sqrt(1.0 + lam)
        C = 0.5 * np.array([[a + b, a - b], [a - b, a + b]])
    err = linalg.operator_norm(C @ C.T - M)
    return FactorizationResult(C=C, reconstruction_error=err,
                               route="scalar_2x2")


def sqrt_M_sym(L):
    """Principal square root of M for symmetric PSD L with ||L|| <= 1.

    With sigma = tau = 1 and L symmetric positive semidefinite,

        sqrt(M) = 1/2 [[ A + B, A - B ], [ A - B, A + B ]],
        A = sqrt(I - L),  B = sqrt(I + L).
    """
    L = _as_matrix(L, "L")
    if L.shape[0] != L.shape[1]:
        raise ValueError(f"L must be square, got shape {L.shape}")
    if L.size and np.max(np.abs(L - L.T)) > 1e-10:
        raise ValueError("L must be symmetric for the symmetric route")
    ev = np.linalg.eigvalsh((L + L.T) / 2.0)
    if ev.size and (ev[0] < -1e-10 or ev[-1] > 1.0 + _COND_TOL):
        raise ValueError(
            f"L must be PSD with ||L|| <= 1, got eigenvalues in "
            f"[{ev[0]:.6g}, {ev[-1]:.6g}]"
        )
    n = L.shape[0]
    eye = np.eye(n)
    A = linalg.principal_sqrt(_clip_psd(eye - L))
    B = linalg.principal_sqrt(eye + L)
    S = np.zeros((2 * n, 2 * n))
    S[:n, :n] = S[n:, n:] = 0.5 * (A + B)
    S[:n, n:] = S[n:, :n] = 0.5 * (A - B)
    return S


def _clip_psd(A):
    """Push tiny negative eigenvalues (roundoff) of a symmetric matrix
    to zero."""
    w, Q = np.linalg.eigh((A + A.T) / 2.0)
    if w.size == 0 or w[0] >= 0.0:
        return A
    return (Q * np.clip(w, 0.0, None)) @ Q.T


def sqrt_M_polar(L, sigma=1.0):
    """Principal square root of M via the polar decomposition of L.

    Works for rectangular L with sigma ||L|| <= 1 and tau = sigma.
    Writing L = U S with S = sqrt(L^T L), T = sqrt(L L^T), and U the
    polar partial isometry L pinv(S),

        sqrt(M) = 1/2 [[ sa(S) + sb(S),  U^T (sa(T) - sb(T)) ],
                       [ U (sa(S) - sb(S)),  sa(T) + sb(T)   ]]

    with sa(X) = sqrt((1/sigma) I - X) and sb(X) = sqrt((1/sigma) I + X).
    """
    L = _as_matrix(L, "L")
    if not (sigma > 0):
        raise ValueError(f"sigma must be positive, got {sigma}")
    norm_L = linalg.operator_norm(L)
    if sigma * norm_L > 1.0 + _COND_TOL:
        raise ValueError(
            f"sigma * ||L|| must be at most 1, got {sigma * norm_L:.6g}"
        )
    m, n = L.shape
    S = linalg.principal_sqrt(L.T @ L)
    T = linalg.principal_sqrt(L @ L.T)
    U = L @ linalg.pseudo_inverse(S)
    eye_n = np.eye(n) / sigma
    eye_m = np.eye(m) / sigma
    sa_S = linalg.principal_sqrt(_clip_psd(eye_n - S))
    sb_S = linalg.principal_sqrt(eye_n + S)
    sa_T = linalg.principal_sqrt(_clip_psd(eye_m - T))
    sb_T = linalg.principal_sqrt(eye_m + T)
    R = np.zeros((n + m, n + m))
    R[:n, :n] = 0.5 * (sa_S + sb_S)
    R[:n, n:] = 0.5 * (U.T @ (sa_T - sb_T))
    R[n:, :n] = 0.5 * (U @ (sa_S - sb_S))
    R[n:, n:] = 0.5 * (sa_T + sb_T)
    return R


def factor_sqrt(L, sigma=1.0, route="sqrt_polar"):
    """Square-root factor of M as a :class:`FactorizationResult`.

    ``route`` is "sqrt_sym" (requires symmetric PSD L, sigma = 1) or
    "sqrt_polar" (rectangular L, tau = sigma).
    """
    if route == "sqrt_sym":
        if sigma != 1.0:
            raise ValueError("the symmetric route is defined for sigma = 1")
        C = sqrt_M_sym(L)
        M = metric_matrix(L, 1.0, 1.0)
    elif route == "sqrt_polar":
        C = sqrt_M_polar(L, sigma)
        M = metric_matrix(L, sigma, sigma)
    else:
        raise ValueError(f"unknown square-root route {route!r}")
    err = linalg.operator_norm(C @ C.T - M)
    return FactorizationResult(C=C, reconstruction_error=err, route=route)


def _sym_fun(A, fn):
    """Apply a scalar function to a symmetric matrix by
    eigendecomposition."""
    w, Q = np.linalg.eigh((A + A.T) / 2.0)
    return (Q * fn(w)) @ Q.T


def trig_form_check(L, tol=1e-9):
    """Distance between the half-angle trigonometric form of sqrt(M)
    and the polar route, for ||L|| <= 1 and sigma = tau = 1.

    With A = arcsin(sqrt(L^T L)) and B = arcsin(sqrt(L L^T)),

        sqrt(M) = [[ cos(A/2),      -U^T sin(B/2) ],
                   [ -U sin(A/2),    cos(B/2)     ]].

    Returns the spectral norm of the difference against
    :func:`sqrt_M_polar`; it should not exceed ``tol`` (the caller
    asserts, this function only reports).

    Raises
    ------
    ValueError
        If an eigenvalue of sqrt(L^T L) or sqrt(L L^T) falls outside
        [-1e-12, 1 + 1e-12], so that arcsin would leave its domain.
    """
    L = _as_matrix(L, "L")
    m, n = L.shape
    S = linalg.principal_sqrt(L.T @ L)
    T = linalg.principal_sqrt(L @ L.T)
    U = L @ linalg.pseudo_inverse(S)
    for name, X in (("sqrt(L^T L)", S), ("sqrt(L L^T)", T)):
        w = np.linalg.eigvalsh((X + X.T) / 2.0)
        if w.size and (w[0] < -1e-12 or w[-1] > 1.0 + 1e-12):
            raise ValueError(
                f"eigenvalue of {name} outside [0, 1]: "
                f"[{w[0]:.6g}, {w[-1]:.6g}]; arcsin is undefined"
            )

    def half_cos(w):
        return np.cos(np.arcsin(np.clip(w, 0.0, 1.0)) / 2.0)

    def half_sin(w):
        return np.sin(np.arcsin(np.clip(w, 0.0, 1.0)) / 2.0)

    W = np.zeros((n + m, n + m))
    W[:n, :n] = _sym_fun(S, half_cos)
    W[:n, n:] = -U.T @ _sym_fun(T, half_sin)
    W[n:, :n] = -U @ _sym_fun(S, half_sin)
    W[n:, n:] = _sym_fun(T, half_cos)
    diff = linalg.operator_norm(W - sqrt_M_polar(L, 1.0))
    return float(diff)
