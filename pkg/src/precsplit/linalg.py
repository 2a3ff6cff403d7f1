"""Dense linear algebra helpers: subspaces, projectors, and matrix factor
routines used throughout the package.

Everything here works on plain float64 numpy arrays at desk scale (dense,
dimensions in the hundreds at most). Subspaces are value objects carrying
an orthonormal basis; all set operations (sum, intersection, complement,
product, preimage) reduce to rank-revealing SVDs.
"""

from __future__ import annotations

import numpy as np

from .errors import NumericalError

# Relative rank cutoff: singular values below RANK_TOL times the largest
# one are treated as zero.
RANK_TOL = 1e-10

_ORTHO_TOL = 1e-12


def _as_matrix(a, name="matrix"):
    A = np.asarray(a, dtype=float)
    if A.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got ndim={A.ndim}")
    if not np.all(np.isfinite(A)):
        raise ValueError(f"{name} contains non-finite entries")
    return A


def _as_vector(v, dim=None, name="vector"):
    x = np.asarray(v, dtype=float)
    if x.ndim != 1:
        raise ValueError(f"{name} must be 1-dimensional, got ndim={x.ndim}")
    if dim is not None and x.shape[0] != dim:
        raise ValueError(f"{name} has length {x.shape[0]}, expected {dim}")
    if not np.all(np.isfinite(x)):
        raise ValueError(f"{name} contains non-finite entries")
    return x


class Subspace:
    """A linear subspace of R^d stored as an orthonormal basis.

    Parameters
    ----------
    basis : array_like, shape (d, r)
        Matrix whose columns form an orthonormal basis of the subspace.
        A matrix with zero columns represents the trivial subspace {0}.
    ambient_dim : int, optional
        Ambient dimension d. Redundant (it is read off the basis shape)
        but validated against ``basis.shape[0]`` when given.

    Notes
    -----
    Orthonormality is validated at construction (``basis.T @ basis`` must
    equal the identity entrywise within 1e-12). Use
    :func:`orthonormal_basis` to build a Subspace from an arbitrary
    spanning set.
    """

    __slots__ = ("basis", "ambient_dim")

    def __init__(self, basis, ambient_dim=None):
        B = np.asarray(basis, dtype=float)
        if B.ndim == 1:
            B = B[:, None]
        if B.ndim != 2:
            raise ValueError(f"basis must be 2-dimensional, got ndim={B.ndim}")
        if not np.all(np.isfinite(B)):
            raise ValueError("basis contains non-finite entries")
        if ambient_dim is not None and ambient_dim != B.shape[0]:
            raise ValueError(
                f"ambient_dim={ambient_dim} does not match basis with "
                f"{B.shape[0]} rows"
            )
        if B.shape[1] > B.shape[0]:
            raise ValueError(
                f"basis has {B.shape[1]} columns in ambient dimension "
                f"{B.shape[0]}"
            )
        if B.shape[1] > 0:
            gram = B.T @ B
            err = np.max(np.abs(gram - np.eye(B.shape[1])))
            if err > _ORTHO_TOL:
                raise ValueError(
                    f"basis columns are not orthonormal (defect {err:.3e}); "
                    "use orthonormal_basis() to orthonormalize a spanning set"
                )
        self.basis = B
        self.ambient_dim = B.shape[0]

    @classmethod
    def trivial(cls, ambient_dim):
        """The zero subspace of R^d."""
        return cls(np.zeros((ambient_dim, 0)))

    @classmethod
    def full(cls, ambient_dim):
        """All of R^d."""
        return cls(np.eye(ambient_dim))

    @property
    def dim(self):
        """Dimension of the subspace (number of basis columns)."""
        return self.basis.shape[1]

    def projector(self):
        """Orthogonal projector onto the subspace as a (d, d) matrix."""
        return self.basis @ self.basis.T

    def project(self, v):
        """Orthogonal projection of a vector onto the subspace."""
        x = _as_vector(v, self.ambient_dim)
        return self.basis @ (self.basis.T @ x)

    def complement(self):
        """Orthogonal complement."""
        if self.dim == 0:
            return Subspace.full(self.ambient_dim)
        U, _, _ = np.linalg.svd(self.basis, full_matrices=True)
        return Subspace(U[:, self.dim:])

    def sum(self, other):
        """Subspace sum self + other (span of the union)."""
        self._check_same_ambient(other)
        return orthonormal_basis(np.hstack([self.basis, other.basis]))

    def intersect(self, other):
        """Intersection, computed as the complement of the sum of the
        complements."""
        self._check_same_ambient(other)
        return self.complement().sum(other.complement()).complement()

    def product(self, other):
        """Cartesian product, embedded block-diagonally in R^(d1+d2)."""
        d1, r1 = self.basis.shape
        d2, r2 = other.basis.shape
        B = np.zeros((d1 + d2, r1 + r2))
        B[:d1, :r1] = self.basis
        B[d1:, r1:] = other.basis
        return Subspace(B)

    def contains(self, v, tol=1e-8):
        """Whether a vector lies in the subspace within tolerance.

        The test is relative: the residual ``v - P v`` must have norm at
        most ``tol * max(1, ||v||)``.
        """
        x = _as_vector(v, self.ambient_dim)
        resid = np.linalg.norm(x - self.project(x))
        return resid <= tol * max(1.0, np.linalg.norm(x))

    def _check_same_ambient(self, other):
        if not isinstance(other, Subspace):
            raise TypeError(f"expected a Subspace, got {type(other).__name__}")
        if other.ambient_dim != self.ambient_dim:
            raise ValueError(
                f"ambient dimensions differ: {self.ambient_dim} vs "
                f"{other.ambient_dim}"
            )

    def __repr__(self):
        return f"Subspace(ambient_dim={self.ambient_dim}, dim={self.dim})"


def orthonormal_basis(columns, tol=RANK_TOL):
    """Orthonormalize a spanning set into a :class:`Subspace`.

    Parameters
    ----------
    columns : array_like, shape (d, k)
        Spanning vectors as columns. Rank deficiency is allowed.
    tol : float
        Relative rank cutoff: singular values below ``tol`` times the
        largest singular value are dropped.

    Returns
    -------
    Subspace
        Span of the columns. An empty or all-zero input gives the
        trivial subspace.
    """
    A = np.asarray(columns, dtype=float)
    if A.ndim == 1:
        A = A[:, None]
    A = _as_matrix(A, "columns")
    if A.shape[1] == 0:
        return Subspace.trivial(A.shape[0])
    U, s, _ = np.linalg.svd(A, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return Subspace.trivial(A.shape[0])
    rank = int(np.sum(s > tol * s[0]))
    return Subspace(U[:, :rank], ambient_dim=A.shape[0])


def nullspace(A, tol=RANK_TOL):
    """Orthonormal basis of the kernel of a matrix, as a Subspace of the
    domain."""
    A = _as_matrix(A)
    m, n = A.shape
    if n == 0:
        return Subspace.trivial(0)
    if m == 0:
        return Subspace.full(n)
    _, s, Vh = np.linalg.svd(A, full_matrices=True)
    if s.size == 0 or s[0] == 0.0:
        rank = 0
    else:
        rank = int(np.sum(s > tol * s[0]))
    return Subspace(Vh[rank:].T, ambient_dim=n)


def preimage(L, V, tol=RANK_TOL):
    """Preimage L^{-1}(V) = { x : L x in V } of a subspace under a linear
    map.

    Parameters
    ----------
    L : array_like, shape (m, n)
        The linear map.
    V : Subspace
        Subspace of the codomain R^m.

    Returns
    -------
    Subspace
        Subspace of the domain R^n, computed as the kernel of
        ``(I - P_V) @ L``.
    """
    L = _as_matrix(L, "L")
    if not isinstance(V, Subspace):
        raise TypeError(f"V must be a Subspace, got {type(V).__name__}")
    if L.shape[0] != V.ambient_dim:
        raise ValueError(
            f"codomain mismatch: L has {L.shape[0]} rows, V lives in "
            f"R^{V.ambient_dim}"
        )
    P_perp = np.eye(V.ambient_dim) - V.projector()
    return nullspace(P_perp @ L, tol=tol)


def principal_sqrt(A, sym_tol=1e-10, psd_tol=1e-10):
    """Principal square root of a symmetric positive semidefinite matrix.

    Computed from the symmetric eigendecomposition. Eigenvalues in
    ``[-psd_tol, 0]`` are clamped to zero; anything more negative raises.

    Raises
    ------
    ValueError
        If ``A`` is not square, not symmetric within ``sym_tol``
        (max absolute entry of ``A - A.T``), or has an eigenvalue below
        ``-psd_tol``.
    """
    A = _as_matrix(A, "A")
    n, m = A.shape
    if n != m:
        raise ValueError(f"A must be square, got shape {A.shape}")
    if n > 0:
        asym = np.max(np.abs(A - A.T))
        if asym > sym_tol:
            raise ValueError(f"A is not symmetric (defect {asym:.3e})")
    w, Q = np.linalg.eigh((A + A.T) / 2.0)
    if w.size and w[0] < -psd_tol:
        raise ValueError(
            f"A is not positive semidefinite (min eigenvalue {w[0]:.3e})"
        )
    w = np.clip(w, 0.0, None)
    return (Q * np.sqrt(w)) @ Q.T


def spectral_radius(A):
    """Largest eigenvalue magnitude of a square matrix."""
    A = _as_matrix(A, "A")
    if A.shape[0] != A.shape[1]:
        raise ValueError(f"A must be square, got shape {A.shape}")
    if A.shape[0] == 0:
        return 0.0
    try:
        ev = np.linalg.eigvals(A)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigenvalue iteration failed: {exc}") from exc
    return float(np.max(np.abs(ev)))


def operator_norm(A):
    """Largest singular value (spectral norm)."""
    A = _as_matrix(A, "A")
    if A.size == 0:
        return 0.0
    try:
        s = np.linalg.svd(A, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"SVD failed: {exc}") from exc
    return float(s[0])


def pseudo_inverse(A, tol=RANK_TOL):
    """Moore-Penrose pseudoinverse with a relative singular value cutoff."""
    A = _as_matrix(A, "A")
    return np.linalg.pinv(A, rcond=tol)


def cholesky(A, tol=1e-12, psd_tol=1e-10):
    """Cholesky-type factor G with ``G @ G.T == A`` for symmetric PSD A.

    Positive definite input goes through the standard Cholesky routine
    and G is lower triangular. Semidefinite input falls back to an
    outer-product factorization with diagonal pivoting; G is then lower
    triangular up to a row permutation and its trailing ``n - rank(A)``
    columns are exactly zero.

    Parameters
    ----------
    A : array_like, shape (n, n)
        Symmetric positive semidefinite matrix.
    tol : float
        Pivot cutoff relative to the largest initial diagonal entry;
        pivots at or below it end the factorization.
    psd_tol : float
        How negative a pivot may be (relative to the scale of A) before
        the matrix is rejected as indefinite.

    Raises
    ------
    ValueError
        If A is not symmetric within 1e-10 or a pivot falls below
        ``-psd_tol`` times the scale of A.
    """
    A = _as_matrix(A, "A")
    n, m = A.shape
    if n != m:
        raise ValueError(f"A must be square, got shape {A.shape}")
    if n == 0:
        return np.zeros((0, 0))
    asym = np.max(np.abs(A - A.T))
    if asym > 1e-10:
        raise ValueError(f"A is not symmetric (defect {asym:.3e})")

    Asym = (A + A.T) / 2.0
    try:
        return np.linalg.cholesky(Asym)
    except np.linalg.LinAlgError:
        pass

    # Pivoted outer-product factorization for the semidefinite case.
    Aw = Asym.copy()
    L = np.zeros((n, n))
    perm = np.arange(n)
    scale = max(float(np.max(np.diag(Aw))), 0.0)
    stop = tol * max(scale, 1e-300)
    neg = -psd_tol * max(scale, 1.0)
    for j in range(n):
        d = np.diag(Aw)[j:]
        p = j + int(np.argmax(d))
        pivot = Aw[p, p]
        if pivot <= stop:
            if np.min(d) < neg:
                raise ValueError(
                    f"A is not positive semidefinite "
                    f"(pivot {np.min(d):.3e})"
                )
            break
        if p != j:
            Aw[[j, p], :] = Aw[[p, j], :]
            Aw[:, [j, p]] = Aw[:, [p, j]]
            L[[j, p], :j] = L[[p, j], :j]
            perm[[j, p]] = perm[[p, j]]
        root = np.sqrt(pivot)
        L[j, j] = root
        if j + 1 < n:
            col = Aw[j + 1:, j] / root
            L[j + 1:, j] = col
            Aw[j + 1:, j + 1:] -= np.outer(col, col)
    G = np.zeros((n, n))
    G[perm, :] = L
    return G
