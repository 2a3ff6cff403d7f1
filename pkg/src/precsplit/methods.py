"""Builders for the four supported splitting methods.

Each builder wires a factor C and a closed-form resolvent composition
for (M + A)^{-1} into a :class:`~precsplit.core.PPPInstance`:

* ``build_dr``: Douglas-Rachford for two operators on X, with
  H = X^2 and a one-dimensional-per-coordinate reduced space
  (dim_D = dim X).
* ``build_cp``: the Chambolle-Pock primal-dual splitting for two
  operators coupled by a linear map L, with step sizes sigma, tau
  subject to sigma * tau * ||L||^2 <= 1. The factor comes from the
  Cholesky route, so dim_D shrinks when I - sigma*tau*L*L^T is rank
  deficient.
* ``build_ryu``: Ryu's three-operator splitting, H = X^5, D = X^2.
* ``build_mt``: the Malitsky-Tam ring splitting for n >= 3 operators,
  H = X^{2n-1}, D = X^{n-1}.

The per-application resolvent budget is one evaluation per operator
block: 2 for DR and CP, 3 for Ryu, n for MT. Resolvents of inverses
are never formed directly; they go through the identity
J_{tau A^{-1}}(x) = x - tau J_{A/tau}(x/tau).

Reduced-space traces of CP runs depend on the factorization: any C
with C C^T = M induces the same full iteration u_k and the same
limits, but the reduced coordinates w_k = C^T u_k (and dim_D itself,
through rank trimming) change with the chosen factor. Full-space
traces and predicted limits are factor independent.
"""

from __future__ import annotations

import numpy as np

from . import analysis
from .core import PPPInstance
from .linalg import _as_matrix
from .operators import ResolventOp


def _check_ops(ops, expected=None):
    dims = set()
    for i, op in enumerate(ops):
        if not isinstance(op, ResolventOp):
            raise TypeError(
                f"operator {i + 1} must be a ResolventOp, got "
                f"{type(op).__name__}"
            )
        dims.add(op.dim)
    if len(dims) != 1:
        raise ValueError(f"operators live in different dimensions: {dims}")
    d = dims.pop()
    if d == 0:
        raise ValueError("operators must act on a space of positive dimension")
    if expected is not None and d != expected:
        raise ValueError(f"operators have dimension {d}, expected {expected}")
    return d


def build_dr(A1, A2):
    """Douglas-Rachford instance for two operators on X = R^d.

    H = X x X with C = [I; -I], so M has the block form
    [[I, -I], [-I, I]] and the reduced variable is w = x - y.
    One application of T evaluates J_{A1} once and J_{A2} once.
    """
    d = _check_ops([A1, A2])
    eye = np.eye(d)
    C = np.vstack([eye, -eye])

    def resolvent_MA(x):
        a = A1.resolvent(x[:d])
        v = x[d:] + 2.0 * a
        return np.concatenate([a, v - A2.resolvent(v)])

    return PPPInstance(C, resolvent_MA, label="dr",
                       meta={"method": "dr", "d": d})


def build_cp(A1, A2, L, sigma, tau):
    """Chambolle-Pock instance for operators A1 on R^n, A2 on R^m.

    The preconditioner is

        M = [[ (1/sigma) I, -L^T ], [ -L, (1/tau) I ]],

    positive semidefinite exactly when sigma * tau * ||L||^2 <= 1
    (validated). C comes from the Cholesky factorization route with
    zero columns trimmed, so dim_D = n + rank(I - sigma*tau*L*L^T).

    One application of T evaluates J_{sigma A1} once and J_{A2/tau}
    once (the latter realizes J_{tau A2^{-1}} through the inverse
    resolvent identity).
    """
    L = _as_matrix(L, "L")
    n = _check_ops([A1])
    m = _check_ops([A2])
    if L.shape != (m, n):
        raise ValueError(
            f"L has shape {L.shape}, expected ({m}, {n}) to couple the "
            "two operators"
        )
    fact = analysis.factor_cholesky(L, sigma, tau)
    A1s = A1.scale(sigma)
    A2s = A2.scale(1.0 / tau)

    def resolvent_MA(xy):
        x = xy[:n]
        y = xy[n:]
        a = A1s.resolvent(sigma * x)
        v = tau * (2.0 * (L @ a) + y)
        return np.concatenate([a, v - tau * A2s.resolvent(v / tau)])

    meta = {
        "method": "cp", "n": n, "m": m,
        "sigma": float(sigma), "tau": float(tau),
        "rank_Z": fact.C.shape[1] - n,
    }
    return PPPInstance(fact.C, resolvent_MA, label="cp", meta=meta)


def build_ryu(A1, A2, A3):
    """Ryu's three-operator splitting on X = R^d, H = X^5, D = X^2.

    The reduced coordinates of u are w = (u1 - u3 + u4, u2 - u3 + u5).
    One application of T evaluates each of the three resolvents once;
    the last two output blocks are affine updates without resolvents.
    """
    d = _check_ops([A1, A2, A3])
    eye = np.eye(d)
    C = np.zeros((5 * d, 2 * d))
    C[0:d, 0:d] = eye
    C[d:2 * d, d:2 * d] = eye
    C[2 * d:3 * d, 0:d] = -eye
    C[2 * d:3 * d, d:2 * d] = -eye
    C[3 * d:4 * d, 0:d] = eye
    C[4 * d:5 * d, d:2 * d] = eye

    def resolvent_MA(x):
        y1 = A1.resolvent(x[0:d] / 2.0)
        y2 = A2.resolvent(x[d:2 * d] / 2.0 + y1)
        y3 = A3.resolvent(x[2 * d:3 * d] / 2.0 + y1 + y2)
        y4 = x[3 * d:4 * d] - 2.0 * y1 + 2.0 * y3
        y5 = x[4 * d:5 * d] - 2.0 * y2 + 2.0 * y3
        return np.concatenate([y1, y2, y3, y4, y5])

    return PPPInstance(C, resolvent_MA, label="ryu",
                       meta={"method": "ryu", "d": d})


def build_mt(ops):
    """Malitsky-Tam ring splitting for n >= 3 operators on X = R^d.

    H = X^{2n-1} (n primal blocks plus n-1 auxiliary blocks) and
    D = X^{n-1}. The reduced coordinates are
    w_i = x_i - x_{i+1} + v_i. One application of T evaluates each of
    the n resolvents once, in a forward sweep that closes the ring
    through the last operator.
    """
    ops = list(ops)
    n = len(ops)
    if n < 3:
        raise ValueError(
            f"the ring splitting needs at least 3 operators, got {n}"
        )
    d = _check_ops(ops)
    eye = np.eye(d)
    dim_H = (2 * n - 1) * d
    dim_D = (n - 1) * d
    C = np.zeros((dim_H, dim_D))
    for i in range(n - 1):
        C[i * d:(i + 1) * d, i * d:(i + 1) * d] = eye
        C[(i + 1) * d:(i + 2) * d, i * d:(i + 1) * d] = -eye
    C[n * d:, :] = np.eye(dim_D)

    def resolvent_MA(x):
        xs = [x[i * d:(i + 1) * d] for i in range(n)]
        vs = [x[(n + i) * d:(n + i + 1) * d] for i in range(n - 1)]
        ys = [ops[0].resolvent(xs[0] / 2.0)]
        for i in range(1, n - 1):
            ys.append(ops[i].resolvent(xs[i] / 2.0 + ys[i - 1]))
        ys.append(ops[n - 1].resolvent(xs[n - 1] / 2.0 + ys[0] + ys[n - 2]))
        ws = [vs[i] - 2.0 * ys[i] + 2.0 * ys[i + 1] for i in range(n - 1)]
        return np.concatenate(ys + ws)

    return PPPInstance(C, resolvent_MA, label="mt",
                       meta={"method": "mt", "d": d, "n": n})
