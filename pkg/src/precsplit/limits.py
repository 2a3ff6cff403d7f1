"""Fixed-point sets and closed-form limit prediction.

For subspace problem data every fixed-point set is itself a subspace
(or an affine set for affine constraints), and the strong limit of the
full iteration from u_0 is the M-projection of u_0 onto Fix T. These
routines construct the fixed sets, predict the limits

    w* = P_{Fix T~}(C^T u_0),   u* = (M + A)^{-1} C w*,

and evaluate the method-specific closed forms for the limits so that
the generic prediction can be cross-checked against them.

M-projections need care: M = C C^T is only positive semidefinite on H,
so the projection onto a set S minimizes the seminorm ||C^T (h - s)||
and is single valued exactly when S meets each fiber s + ker C^T in
one point. :func:`pi_S_M` returns the full solution set as an anchor
plus a direction subspace; a nontrivial direction means the projection
is multi-valued.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import analysis
from .errors import InfeasibleError
from .linalg import (
    Subspace,
    _as_matrix,
    _as_vector,
    nullspace,
    orthonormal_basis,
    preimage,
)


@dataclass
class FixSets:
    """Fixed-point subspaces of T (in H) and T~ (in the reduced space)."""

    fix_T: Subspace
    fix_Ttilde: Subspace


@dataclass
class LimitPrediction:
    """Predicted strong limits of the reduced and full iterations."""

    w_star: np.ndarray
    u_star: np.ndarray


@dataclass
class AffineSet:
    """Affine set anchor + direction, with the anchor orthogonal to the
    direction subspace so that representations are canonical."""

    anchor: np.ndarray
    direction: Subspace

    @property
    def is_singleton(self):
        return self.direction.dim == 0

    def project(self, v):
        """Orthogonal projection of v onto the affine set."""
        v = _as_vector(v, self.anchor.shape[0], "v")
        return self.anchor + self.direction.project(v - self.anchor)

    def contains(self, v, tol=1e-8):
        v = _as_vector(v, self.anchor.shape[0], "v")
        resid = np.linalg.norm(v - self.project(v))
        return resid <= tol * max(1.0, float(np.linalg.norm(v)))


def predict_limits(inst, fix_sets, u0):
    """Generic limit prediction from the fixed sets.

    w* is the orthogonal projection of w_0 = C^T u_0 onto Fix T~ and
    u* = (M + A)^{-1} C w*. In finite dimension these are the strong
    limits of the reduced iterate w_k and of T u_k.
    """
    u0 = _as_vector(u0, inst.dim_H, "u0")
    w_star = fix_sets.fix_Ttilde.project(inst.C.T @ u0)
    u_star = inst.resolvent_MA(inst.C @ w_star)
    return LimitPrediction(w_star=w_star, u_star=np.asarray(u_star, float))


def m_projection_oracle(inst, fix_T, u0):
    """M-projection of u0 onto a subspace by direct least squares.

    Minimizes ||C^T u0 - C^T B alpha|| over coordinates alpha in the
    basis B of the subspace; when the reduced system is singular the
    minimum-norm alpha is taken (SVD least squares), which picks the
    canonical representative orthogonal to fix_T intersect ker C^T.
    """
    u0 = _as_vector(u0, inst.dim_H, "u0")
    B = fix_T.basis
    alpha, *_ = np.linalg.lstsq(inst.C.T @ B, inst.C.T @ u0, rcond=None)
    return B @ alpha


def pi_S_M(inst, S1, S2, h):
    """Set-valued M-projection onto S = S1 x S2, for a two-block
    instance.

    Returns an :class:`AffineSet`: the projections are exactly
    anchor + direction, where direction = S intersect ker C^T. The
    projection is single valued (direction trivial) precisely when S
    meets the fibers of C^T in single points.
    """
    S = S1.product(S2)
    if S.ambient_dim != inst.dim_H:
        raise ValueError(
            f"S1 x S2 lives in R^{S.ambient_dim}, instance has "
            f"dim_H={inst.dim_H}"
        )
    h = _as_vector(h, inst.dim_H, "h")
    CtB = inst.C.T @ S.basis
    image = orthonormal_basis(CtB)
    target = image.project(inst.C.T @ h)
    alpha, *_ = np.linalg.lstsq(CtB, target, rcond=None)
    anchor = S.basis @ alpha
    direction = S.intersect(nullspace(inst.C.T))
    anchor = anchor - direction.project(anchor)
    return AffineSet(anchor=anchor, direction=direction)


def dr_fix_and_limits(U1, U2, u0):
    """Fixed sets and limits for Douglas-Rachford on two subspaces.

    Fix T = (U1 n U2) x (U1' n U2') (primes denoting orthogonal
    complements), Fix T~ = (U1 n U2) + (U1' n U2'), and from
    u0 = (x0, y0):

        w* = P_{U1 n U2}(x0 - y0) + P_{U1' n U2'}(x0 - y0),
        u* = ( P_{U1 n U2}(x0 - y0), P_{U1' n U2'}(y0 - x0) ).
    """
    d = U1.ambient_dim
    if U2.ambient_dim != d:
        raise ValueError("U1 and U2 must share an ambient space")
    u0 = _as_vector(u0, 2 * d, "u0")
    Z = U1.intersect(U2)
    Zp = U1.complement().intersect(U2.complement())
    fix = FixSets(fix_T=Z.product(Zp), fix_Ttilde=Z.sum(Zp))
    x0, y0 = u0[:d], u0[d:]
    w0 = x0 - y0
    w_star = Z.project(w0) + Zp.project(w0)
    u_star = np.concatenate([Z.project(w0), Zp.project(-w0)])
    return fix, LimitPrediction(w_star=w_star, u_star=u_star)


def cp_fix_and_limits(U, V, L, sigma, tau, u0):
    """Fixed sets and limits for the primal-dual splitting on subspaces.

    With A1 = N_U, A2 = N_V and coupling L,

        Fix T = (U n L^{-1}(V)) x (V' n L^{-T}(U')),

    and from u0 = (x0, y0),

        x* = P_{U n L^{-1}(V)}(x0 - sigma L^T y0),
        y* = P_{V' n L^{-T}(U')}(y0 - tau L x0).

    Fix T~ = C^T(Fix T) depends on the factor C; the Cholesky route of
    :func:`precsplit.analysis.factor_cholesky` is used, matching
    :func:`precsplit.methods.build_cp`.
    """
    L = _as_matrix(L, "L")
    n = U.ambient_dim
    m = V.ambient_dim
    if L.shape != (m, n):
        raise ValueError(f"L has shape {L.shape}, expected ({m}, {n})")
    u0 = _as_vector(u0, n + m, "u0")
    fixX = U.intersect(preimage(L, V))
    fixY = V.complement().intersect(preimage(L.T, U.complement()))
    fix_T = fixX.product(fixY)
    C = analysis.factor_cholesky(L, sigma, tau).C
    fix_Ttilde = orthonormal_basis(C.T @ fix_T.basis)
    x0, y0 = u0[:n], u0[n:]
    x_star = fixX.project(x0 - sigma * (L.T @ y0))
    y_star = fixY.project(y0 - tau * (L @ x0))
    u_star = np.concatenate([x_star, y_star])
    return (
        FixSets(fix_T=fix_T, fix_Ttilde=fix_Ttilde),
        LimitPrediction(w_star=C.T @ u_star, u_star=u_star),
    )


def cp_affine_limits(U, b, L, sigma, tau, u0, feas_tol=1e-8):
    """Limits for the primal-dual splitting with an affine data
    constraint.

    A1 = N_U and A2 is the normal cone of the single point b, so the
    primal fixed set is the affine set { x in U : L x = b }. From
    u0 = (x0, y0),

        x* = P_{U n L^{-1}(b)}(x0 - sigma L^T y0),
        y* = P_{L^{-T}(U')}(y0 - tau L x0).

    Raises
    ------
    InfeasibleError
        If no x in U satisfies L x = b within ``feas_tol`` (relative to
        max(1, ||b||)); the message reports the least-squares residual.
    """
    L = _as_matrix(L, "L")
    n = U.ambient_dim
    b = _as_vector(b, L.shape[0], "b")
    m = b.shape[0]
    u0 = _as_vector(u0, n + m, "u0")
    LB = L @ U.basis
    alpha, *_ = np.linalg.lstsq(LB, b, rcond=None)
    resid = float(np.linalg.norm(LB @ alpha - b))
    if resid > feas_tol * max(1.0, float(np.linalg.norm(b))):
        raise InfeasibleError(
            f"no point of the subspace maps to b: least-squares residual "
            f"{resid:.3e}"
        )
    direction = U.intersect(nullspace(L))
    anchor = U.basis @ alpha
    anchor = anchor - direction.project(anchor)
    primal_set = AffineSet(anchor=anchor, direction=direction)
    dual_space = preimage(L.T, U.complement())
    x0, y0 = u0[:n], u0[n:]
    x_star = primal_set.project(x0 - sigma * (L.T @ y0))
    y_star = dual_space.project(y0 - tau * (L @ x0))
    u_star = np.concatenate([x_star, y_star])
    C = analysis.factor_cholesky(L, sigma, tau).C
    return LimitPrediction(w_star=C.T @ u_star, u_star=u_star)


def ryu_fix_and_projection(U1, U2, U3, u):
    """Fixed sets and the M-projection of u for Ryu's splitting on
    three subspaces of X = R^d.

    Fix T~ = (Z x {0}) + E with Z = U1 n U2 n U3 and

        E = (U1' x U2') n ( {(x, -x)} + ({0} x U3') ),

    Fix T = {(z, z, z, 2z, 0) : z in Z} + ({0}^3 x E). The M-projection
    of u is ( p/2, p/2, p/2, w*_1, w*_2 ) where p = P_Z(w_1),
    w = C^T u, and w* = (P_Z w_1, 0) + P_E w. It equals the strong
    limit of T u_k for the run started at u.
    """
    d = U1.ambient_dim
    if U2.ambient_dim != d or U3.ambient_dim != d:
        raise ValueError("U1, U2, U3 must share an ambient space")
    u = _as_vector(u, 5 * d, "u")
    eye = np.eye(d)
    Z = U1.intersect(U2).intersect(U3)
    anti_diag = Subspace(np.vstack([eye, -eye]) / np.sqrt(2.0))
    E = (
        U1.complement().product(U2.complement())
        .intersect(anti_diag.sum(
            Subspace.trivial(d).product(U3.complement())
        ))
    )
    fix_Ttilde = Z.product(Subspace.trivial(d)).sum(E)

    Zb = Z.basis
    s_cols = np.vstack([Zb, Zb, Zb, 2.0 * Zb, np.zeros_like(Zb)])
    s_cols = s_cols / np.sqrt(7.0)
    E_in_H = np.zeros((5 * d, E.dim))
    E_in_H[3 * d:, :] = E.basis
    fix_T = Subspace(s_cols, ambient_dim=5 * d).sum(
        Subspace(E_in_H, ambient_dim=5 * d)
    )

    w1 = u[0:d] - u[2 * d:3 * d] + u[3 * d:4 * d]
    w2 = u[d:2 * d] - u[2 * d:3 * d] + u[4 * d:5 * d]
    w = np.concatenate([w1, w2])
    p = Z.project(w1)
    w_star = np.concatenate([p, np.zeros(d)]) + E.project(w)
    proj = np.concatenate([p / 2.0, p / 2.0, p / 2.0, w_star])
    return FixSets(fix_T=fix_T, fix_Ttilde=fix_Ttilde), proj


def mt_fix_and_projection(subspaces, u):
    """Fixed sets and the M-projection of u for the ring splitting on
    n >= 3 subspaces of X = R^d.

    Fix T~ = {(z, ..., z) : z in Z} + E with Z the intersection of all
    subspaces and E the set of prefix-sum vectors
    (y_1, y_1 + y_2, ..., y_1 + ... + y_{n-1}) with y_i in U_i' whose
    last block lies in U_n'. The M-projection of u is
    ( p/2 (n times), w* ) with p = P_Z(mean of the blocks of C^T u)
    and w* = (p, ..., p) + P_E(C^T u); it is the strong limit of
    T u_k started at u.
    """
    subspaces = list(subspaces)
    n = len(subspaces)
    if n < 3:
        raise ValueError(f"need at least 3 subspaces, got {n}")
    d = subspaces[0].ambient_dim
    for S in subspaces[1:]:
        if S.ambient_dim != d:
            raise ValueError("all subspaces must share an ambient space")
    u = _as_vector(u, (2 * n - 1) * d, "u")

    Z = subspaces[0]
    for S in subspaces[1:]:
        Z = Z.intersect(S)

    cols = []
    for i in range(n - 1):
        comp = subspaces[i].complement().basis
        for j in range(comp.shape[1]):
            vec = np.zeros((n - 1) * d)
            for blk in range(i, n - 1):
                vec[blk * d:(blk + 1) * d] = comp[:, j]
            cols.append(vec)
    if cols:
        prefix = orthonormal_basis(np.column_stack(cols))
    else:
        prefix = Subspace.trivial((n - 1) * d)
    tail = Subspace.full((n - 2) * d).product(subspaces[-1].complement())
    E = prefix.intersect(tail)

    Zb = Z.basis
    diag_cols = np.vstack([Zb] * (n - 1)) / np.sqrt(n - 1.0)
    fix_Ttilde = Subspace(diag_cols, ambient_dim=(n - 1) * d).sum(E)

    fixT_cols = np.vstack([Zb] * n + [2.0 * Zb] * (n - 1))
    fixT_cols = fixT_cols / np.sqrt(n + 4.0 * (n - 1))
    E_in_H = np.zeros(((2 * n - 1) * d, E.dim))
    E_in_H[n * d:, :] = E.basis
    fix_T = Subspace(fixT_cols, ambient_dim=(2 * n - 1) * d).sum(
        Subspace(E_in_H)
    )

    xs = [u[i * d:(i + 1) * d] for i in range(n)]
    vs = [u[(n + i) * d:(n + i + 1) * d] for i in range(n - 1)]
    w_blocks = [xs[i] - xs[i + 1] + vs[i] for i in range(n - 1)]
    w = np.concatenate(w_blocks)
    wbar = np.mean(w_blocks, axis=0)
    p = Z.project(wbar)
    w_star = np.tile(p, n - 1) + E.project(w)
    proj = np.concatenate([p / 2.0] * n + [w_star])
    return FixSets(fix_T=fix_T, fix_Ttilde=fix_Ttilde), proj
