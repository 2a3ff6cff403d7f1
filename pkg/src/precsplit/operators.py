"""Maximally monotone operators represented by their resolvents.

Each operator A on R^d is exposed through the single-valued map
J_A = (I + A)^{-1}. The stock kinds below are the ones needed by the
splitting methods in this package: the zero operator, normal cones of
subspaces, affine sets, and single points, and monotone linear maps.
Positive scalings are closed within the family, so every resolvent that
the methods need (including resolvents of scaled inverses) reduces to
these.

All resolvents are firmly nonexpansive, and for every stock kind they
are affine maps; :meth:`ResolventOp.affine_parts` exposes the (W, c)
pair with J_A(x) = W x + c, which the iteration engine uses to build
fast closed-form update matrices.
"""

from __future__ import annotations

from contextlib import contextmanager

import numpy as np

from .linalg import Subspace, _as_matrix, _as_vector


class _CallCounter:
    """Mutable cell collecting resolvent evaluation counts."""

    __slots__ = ("count",)

    def __init__(self):
        self.count = 0


_ACTIVE_COUNTERS: list[_CallCounter] = []


@contextmanager
def count_resolvent_calls():
    """Context manager counting resolvent evaluations in its block.

    Yields a counter whose ``count`` attribute holds the number of
    :meth:`ResolventOp.resolvent` calls made while the block was
    active. Used to pin down the per-iteration resolvent budget of the
    splitting methods.
    """
    counter = _CallCounter()
    _ACTIVE_COUNTERS.append(counter)
    try:
        yield counter
    finally:
        _ACTIVE_COUNTERS.remove(counter)


class ResolventOp:
    """Base class: a maximally monotone operator seen through J_A."""

    def __init__(self, dim):
        if dim < 0:
            raise ValueError(f"dim must be nonnegative, got {dim}")
        self.dim = int(dim)

    def resolvent(self, x):
        """Evaluate J_A(x) = (I + A)^{-1} x."""
        x = _as_vector(x, self.dim, "x")
        for counter in _ACTIVE_COUNTERS:
            counter.count += 1
        return self._resolvent(x)

    def reflected_resolvent(self, x):
        """Evaluate R_A(x) = 2 J_A(x) - x."""
        x = _as_vector(x, self.dim, "x")
        return 2.0 * self.resolvent(x) - x

    def scale(self, gamma):
        """Operator gamma * A as a ResolventOp, for gamma > 0."""
        raise NotImplementedError

    def affine_parts(self):
        """Pair (W, c) with J_A(x) = W x + c."""
        raise NotImplementedError

    def _resolvent(self, x):
        raise NotImplementedError

    @staticmethod
    def _check_gamma(gamma):
        if not (gamma > 0):
            raise ValueError(f"scaling factor must be positive, got {gamma}")
        return float(gamma)


class ZeroOp(ResolventOp):
    """The zero operator; its resolvent is the identity."""

    def _resolvent(self, x):
        return x.copy()

    def scale(self, gamma):
        self._check_gamma(gamma)
        return self

    def affine_parts(self):
        return np.eye(self.dim), np.zeros(self.dim)

    def __repr__(self):
        return f"ZeroOp(dim={self.dim})"


class NormalConeSubspace(ResolventOp):
    """Normal cone of a linear subspace; resolvent is the projection."""

    def __init__(self, subspace):
        if not isinstance(subspace, Subspace):
            raise TypeError(
                f"expected a Subspace, got {type(subspace).__name__}"
            )
        super().__init__(subspace.ambient_dim)
        self.subspace = subspace

    def _resolvent(self, x):
        return self.subspace.project(x)

    def scale(self, gamma):
        # gamma * N_S = N_S for any gamma > 0.
        self._check_gamma(gamma)
        return self

    def affine_parts(self):
        return self.subspace.projector(), np.zeros(self.dim)

    def __repr__(self):
        return f"NormalConeSubspace({self.subspace!r})"


class NormalConeAffine(ResolventOp):
    """Normal cone of the affine set anchor + S for a subspace S.

    The resolvent is the projection onto the affine set,
    ``anchor + P_S(x - anchor)``.
    """

    def __init__(self, subspace, anchor):
        if not isinstance(subspace, Subspace):
            raise TypeError(
                f"expected a Subspace, got {type(subspace).__name__}"
            )
        super().__init__(subspace.ambient_dim)
        self.subspace = subspace
        self.anchor = _as_vector(anchor, subspace.ambient_dim, "anchor")

    def _resolvent(self, x):
        return self.anchor + self.subspace.project(x - self.anchor)

    def scale(self, gamma):
        self._check_gamma(gamma)
        return self

    def affine_parts(self):
        P = self.subspace.projector()
        return P, self.anchor - P @ self.anchor

    def __repr__(self):
        return (
            f"NormalConeAffine({self.subspace!r}, "
            f"anchor_norm={np.linalg.norm(self.anchor):.3g})"
        )


class NormalConePoint(ResolventOp):
    """Normal cone of the singleton {b}; the resolvent is constant b."""

    def __init__(self, b):
        b = _as_vector(b, name="b")
        super().__init__(b.shape[0])
        self.point = b

    def _resolvent(self, x):
        return self.point.copy()

    def scale(self, gamma):
        self._check_gamma(gamma)
        return self

    def affine_parts(self):
        return np.zeros((self.dim, self.dim)), self.point.copy()

    def __repr__(self):
        return f"NormalConePoint(dim={self.dim})"


class LinearMonotone(ResolventOp):
    """A monotone linear operator x -> B x.

    Parameters
    ----------
    B : array_like, shape (d, d)
        Matrix with ``B + B.T`` positive semidefinite (validated with
        eigenvalue tolerance -1e-10 at construction). Skew parts are
        allowed, so rotations by less than a quarter turn qualify.

    Notes
    -----
    ``I + B`` has smallest singular value at least 1 for monotone B, so
    the resolvent solve is well conditioned and its inverse is cached.
    """

    def __init__(self, B):
        B = _as_matrix(B, "B")
        if B.shape[0] != B.shape[1]:
            raise ValueError(f"B must be square, got shape {B.shape}")
        super().__init__(B.shape[0])
        sym_eigs = np.linalg.eigvalsh(B + B.T)
        if sym_eigs.size and sym_eigs[0] < -1e-10:
            raise ValueError(
                f"B is not monotone: min eig of B + B^T is {sym_eigs[0]:.3e}"
            )
        self.B = B
        self._W = np.linalg.inv(np.eye(self.dim) + B)

    def _resolvent(self, x):
        return self._W @ x

    def scale(self, gamma):
        gamma = self._check_gamma(gamma)
        return LinearMonotone(gamma * self.B)

    def affine_parts(self):
        return self._W.copy(), np.zeros(self.dim)

    def __repr__(self):
        return f"LinearMonotone(dim={self.dim})"


def scaled(gamma, op):
    """Operator gamma * A for gamma > 0, as a ResolventOp."""
    if not isinstance(op, ResolventOp):
        raise TypeError(f"expected a ResolventOp, got {type(op).__name__}")
    return op.scale(gamma)


def inverse_resolvent(op, tau, x):
    """Evaluate J_{tau * A^{-1}}(x) without forming the inverse operator.

    Uses the identity J_{tau A^{-1}}(x) = x - tau * J_{A / tau}(x / tau),
    valid for any maximally monotone A and tau > 0.

    Parameters
    ----------
    op : ResolventOp
        The operator A whose inverse is being resolved.
    tau : float
        Positive scaling of the inverse.
    x : array_like
        Evaluation point.
    """
    if not (tau > 0):
        raise ValueError(f"tau must be positive, got {tau}")
    x = _as_vector(x, op.dim, "x")
    return x - tau * op.scale(1.0 / tau).resolvent(x / tau)
