"""Degenerate preconditioned proximal point engine.

A problem instance bundles a factor C of the preconditioner M = C C^T
with the resolvent of M + A, where A is the (set-valued, maximally
monotone) operator encoding the inclusion to be solved. Two intertwined
iterations are available:

* the full iteration on u in R^{dim_H}, driven by
  T u = (M + A)^{-1} M u, and
* the reduced iteration on w in R^{dim_D}, driven by
  T~ w = C^T (M + A)^{-1} C w.

Both are relaxed fixed-point loops x_{k+1} = (1 - lam_k) x_k +
lam_k T x_k. Running them in lockstep from u_0 and w_0 = C^T u_0 keeps
w_k = C^T u_k for all k, which is the basis of the intertwining
diagnostics. In finite dimension both iterations converge strongly and
the reduced limit is the orthogonal projection of w_0 onto Fix T~.

The resolvent of M + A is supplied as a callable composed from
closed-form resolvent evaluations (see :mod:`precsplit.methods`); no
dense solve against an assembled M + A ever happens here. When that
callable is affine (true for every stock operator kind) the engine
detects it by probing and runs long loops through a compiled kernel.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _accel
from .linalg import RANK_TOL, _as_matrix, _as_vector

DEFAULT_MAX_ITERS = 100_000
DEFAULT_EPS = 1e-10

_UNSET = object()


class LambdaSchedule:
    """Relaxation parameters lambda_k for the averaged fixed-point step.

    Either a constant value in the open interval (0, 2), or an explicit
    finite list with every entry in [0, 2]. An explicit list caps the
    number of relaxation steps a run can take.
    """

    def __init__(self, constant=1.0):
        constant = float(constant)
        if not (0.0 < constant < 2.0):
            raise ValueError(
                f"constant relaxation must lie in (0, 2), got {constant}"
            )
        self._constant = constant
        self._values = None

    @classmethod
    def from_list(cls, values):
        """Explicit schedule; every entry must lie in [0, 2]."""
        vals = np.asarray(values, dtype=float)
        if vals.ndim != 1 or vals.size == 0:
            raise ValueError("schedule list must be a nonempty 1-D sequence")
        if not np.all(np.isfinite(vals)):
            raise ValueError("schedule list contains non-finite entries")
        if np.any(vals < 0.0) or np.any(vals > 2.0):
            bad = vals[(vals < 0.0) | (vals > 2.0)][0]
            raise ValueError(f"schedule entries must lie in [0, 2], got {bad}")
        sched = cls.__new__(cls)
        sched._constant = None
        sched._values = vals
        return sched

    @property
    def is_constant(self):
        return self._values is None

    @property
    def constant_value(self):
        return self._constant

    @property
    def length(self):
        """Number of steps an explicit schedule supports, else None."""
        return None if self._values is None else int(self._values.size)

    def value(self, k):
        """Relaxation parameter for step k -> k+1."""
        if self._values is None:
            return self._constant
        if not 0 <= k < self._values.size:
            raise ValueError(
                f"schedule of length {self._values.size} has no entry {k}"
            )
        return float(self._values[k])

    def __repr__(self):
        if self._values is None:
            return f"LambdaSchedule(constant={self._constant})"
        return f"LambdaSchedule.from_list(<{self._values.size} values>)"


def _coerce_schedule(schedule):
    if schedule is None:
        return LambdaSchedule(1.0)
    if isinstance(schedule, LambdaSchedule):
        return schedule
    if np.isscalar(schedule):
        return LambdaSchedule(schedule)
    return LambdaSchedule.from_list(schedule)


@dataclass
class IterationTrace:
    """Record of one fixed-point run.

    Attributes
    ----------
    kind : str
        "ppp" for the full iteration, "rppp" for the reduced one.
    iterations : int
        Index k_end of the final iterate.
    status : str
        "converged" if the residual stop fired, else "max_iters".
    residuals : ndarray
        ||x_k - T x_k|| for k = 0 .. k_end.
    final : ndarray
        The final iterate x_{k_end}.
    points : ndarray or None
        Recorded iterates, one per row, when a recording stride was
        requested (always includes the final iterate).
    point_iters : ndarray or None
        Iteration indices of the recorded iterates.
    """

    kind: str
    iterations: int
    status: str
    residuals: np.ndarray
    final: np.ndarray
    points: np.ndarray | None = None
    point_iters: np.ndarray | None = None


class PPPInstance:
    """Problem instance: factor C and the resolvent of M + A.

    Parameters
    ----------
    C : array_like, shape (dim_H, dim_D)
        Factor of the preconditioner, M = C C^T. Must have full column
        rank so that the reduced space is not degenerate.
    resolvent_MA : callable
        Map x -> (M + A)^{-1} x on R^{dim_H}, composed from closed-form
        resolvent evaluations.
    label : str
        Free-form tag ("dr", "cp", ...) used in reports.
    meta : dict, optional
        Builder parameters worth carrying around (dims, step sizes).
    """

    def __init__(self, C, resolvent_MA, label="", meta=None):
        C = _as_matrix(C, "C")
        if C.shape[1] == 0 or C.shape[0] < C.shape[1]:
            raise ValueError(
                f"C must be a tall matrix with at least one column, got "
                f"shape {C.shape}"
            )
        s = np.linalg.svd(C, compute_uv=False)
        if s[-1] <= RANK_TOL * s[0]:
            raise ValueError(
                "C is column rank deficient (singular value ratio "
                f"{s[-1] / s[0]:.3e}); the reduced space would be degenerate"
            )
        if not callable(resolvent_MA):
            raise TypeError("resolvent_MA must be callable")
        self.C = C
        self.resolvent_MA = resolvent_MA
        self.label = label
        self.meta = dict(meta) if meta else {}
        self._affine = _UNSET

    @property
    def dim_H(self):
        return self.C.shape[0]

    @property
    def dim_D(self):
        return self.C.shape[1]

    def M(self):
        """Dense preconditioner M = C C^T."""
        return self.C @ self.C.T

    def apply_T(self, u):
        """One application of T = (M + A)^{-1} M."""
        u = _as_vector(u, self.dim_H, "u")
        return self.resolvent_MA(self.C @ (self.C.T @ u))

    def apply_Ttilde(self, w):
        """One application of T~ = C^T (M + A)^{-1} C."""
        w = _as_vector(w, self.dim_D, "w")
        return self.C.T @ self.resolvent_MA(self.C @ w)

    def seminorm_M(self, x):
        """Seminorm ||x||_M = sqrt(x^T M x) = ||C^T x||."""
        x = _as_vector(x, self.dim_H, "x")
        return float(np.linalg.norm(self.C.T @ x))

    def resolvent_affine_parts(self):
        """Closed-form (W, c) with resolvent_MA(x) = W x + c, or None.

        Determined once by probing: c = F(0) and the columns of W from
        unit vectors, then verified at a few pseudo-random points. A
        non-affine resolvent yields None and long runs fall back to the
        generic loop.
        """
        if self._affine is not _UNSET:
            return self._affine
        n = self.dim_H
        F = self.resolvent_MA
        c = np.asarray(F(np.zeros(n)), dtype=float)
        W = np.empty((n, n))
        eye = np.eye(n)
        for i in range(n):
            W[:, i] = F(eye[:, i]) - c
        rng = np.random.default_rng(0x5EED)
        ok = True
        for _ in range(3):
            x = rng.standard_normal(n)
            fx = F(x)
            if np.linalg.norm(fx - (W @ x + c)) > 1e-8 * max(
                1.0, float(np.linalg.norm(fx))
            ):
                ok = False
                break
        self._affine = (W, c) if ok else None
        return self._affine

    def __repr__(self):
        tag = f", label={self.label!r}" if self.label else ""
        return f"PPPInstance(dim_H={self.dim_H}, dim_D={self.dim_D}{tag})"


def _generic_loop(apply_map, x0, schedule, max_iters, eps, stride):
    x = np.array(x0, dtype=float, copy=True)
    residuals = []
    snaps = []
    snap_iters = []
    eff_max = max_iters
    if schedule.length is not None:
        eff_max = min(max_iters, schedule.length)
    converged = False
    k_end = 0
    for k in range(eff_max + 1):
        t = apply_map(x)
        r = float(np.linalg.norm(x - t))
        residuals.append(r)
        if stride > 0 and k % stride == 0:
            snaps.append(x.copy())
            snap_iters.append(k)
        k_end = k
        if r <= eps:
            converged = True
            break
        if k == eff_max:
            break
        lam = schedule.value(k)
        x = (1.0 - lam) * x + lam * t
    return x, np.asarray(residuals), converged, snaps, snap_iters, k_end


def _run(inst, x0, schedule, max_iters, eps, stride, kind, prefer_kernel):
    schedule = _coerce_schedule(schedule)
    if max_iters < 0:
        raise ValueError(f"max_iters must be nonnegative, got {max_iters}")
    if eps < 0:
        raise ValueError(f"eps must be nonnegative, got {eps}")

    affine = None
    if prefer_kernel and schedule.is_constant:
        parts = inst.resolvent_affine_parts()
        if parts is not None:
            W, c = parts
            if kind == "ppp":
                affine = (W @ inst.M(), c)
            else:
                affine = (inst.C.T @ W @ inst.C, inst.C.T @ c)

    if affine is not None:
        G, g = affine
        x, residuals, converged, snaps, snap_iters = _accel.run_affine(
            G, g, x0, schedule.constant_value, max_iters, eps, stride
        )
        snaps = list(snaps)
        snap_iters = list(snap_iters)
        k_end = residuals.size - 1
    else:
        apply_map = inst.apply_T if kind == "ppp" else inst.apply_Ttilde
        x, residuals, converged, snaps, snap_iters, k_end = _generic_loop(
            apply_map, x0, schedule, max_iters, eps, stride
        )

    points = point_iters = None
    if stride > 0:
        if not snap_iters or snap_iters[-1] != k_end:
            snaps.append(np.array(x, dtype=float, copy=True))
            snap_iters.append(k_end)
        points = np.vstack(snaps)
        point_iters = np.asarray(snap_iters, dtype=np.int64)

    return IterationTrace(
        kind=kind,
        iterations=k_end,
        status="converged" if converged else "max_iters",
        residuals=residuals,
        final=np.asarray(x, dtype=float),
        points=points,
        point_iters=point_iters,
    )


def run_ppp(inst, u0, schedule=None, max_iters=DEFAULT_MAX_ITERS,
            eps=DEFAULT_EPS, stride=0, prefer_kernel=True):
    """Run the full iteration u_{k+1} = (1 - lam_k) u_k + lam_k T u_k.

    Parameters
    ----------
    inst : PPPInstance
    u0 : array_like, shape (dim_H,)
        Start point.
    schedule : LambdaSchedule, float, sequence, or None
        Relaxation parameters; None means constant 1.
    max_iters : int
        Iteration budget.
    eps : float
        Stop once ||u_k - T u_k|| <= eps.
    stride : int
        If positive, record every stride-th iterate (plus the final one)
        in the trace.
    prefer_kernel : bool
        Allow the compiled affine kernel when the instance supports it
        and the schedule is constant.

    Returns
    -------
    IterationTrace
    """
    u0 = _as_vector(u0, inst.dim_H, "u0")
    return _run(inst, u0, schedule, max_iters, eps, stride, "ppp",
                prefer_kernel)


def run_rppp(inst, w0, schedule=None, max_iters=DEFAULT_MAX_ITERS,
             eps=DEFAULT_EPS, stride=0, prefer_kernel=True):
    """Run the reduced iteration on w in R^{dim_D}.

    Same contract as :func:`run_ppp` but driven by T~. Start it from
    w0 = C^T u0 to stay intertwined with the full iteration.
    """
    w0 = _as_vector(w0, inst.dim_D, "w0")
    return _run(inst, w0, schedule, max_iters, eps, stride, "rppp",
                prefer_kernel)


def check_intertwining(inst, u0, schedule=None, n_iters=200):
    """Max intertwining violation over a lockstep run of both iterations.

    Runs u_k (full) and w_k (reduced, from w_0 = C^T u_0) side by side
    for n_iters steps and returns

        max_k max( ||w_k - C^T u_k||, ||T u_k - (M+A)^{-1} C w_k|| ).

    Both quantities are identically zero in exact arithmetic.
    """
    schedule = _coerce_schedule(schedule)
    u = _as_vector(u0, inst.dim_H, "u0").copy()
    w = inst.C.T @ u
    viol = 0.0
    for k in range(n_iters + 1):
        Tu = inst.apply_T(u)
        FCw = inst.resolvent_MA(inst.C @ w)
        viol = max(viol, float(np.linalg.norm(w - inst.C.T @ u)))
        viol = max(viol, float(np.linalg.norm(Tu - FCw)))
        if k == n_iters:
            break
        lam = schedule.value(k)
        u = (1.0 - lam) * u + lam * Tu
        w = (1.0 - lam) * w + lam * (inst.C.T @ FCw)
    return viol


@dataclass
class LockstepTrace:
    """Row-per-stride record of a lockstep full + reduced run.

    Error columns are filled when reference limits are supplied,
    otherwise they hold NaN.
    """

    ks: np.ndarray
    residuals: np.ndarray
    w_err: np.ndarray
    u_err: np.ndarray
    intertwine: np.ndarray
    iterations: int
    status: str
    u_final: np.ndarray
    w_final: np.ndarray
    Tu_final: np.ndarray
    max_intertwine: float


def run_lockstep(inst, u0, schedule=None, max_iters=DEFAULT_MAX_ITERS,
                 eps=DEFAULT_EPS, stride=1, w_star=None, u_star=None):
    """Run both iterations in lockstep, recording per-stride diagnostics.

    Records, every ``stride`` iterations and at the final one, the
    residual ||u_k - T u_k||, the distances ||w_k - w*|| and
    ||T u_k - u*|| (NaN without references), and the intertwining
    violation at k. Stops on the residual criterion or the budget.
    """
    schedule = _coerce_schedule(schedule)
    if stride <= 0:
        raise ValueError(f"stride must be positive, got {stride}")
    u = _as_vector(u0, inst.dim_H, "u0").copy()
    w = inst.C.T @ u
    eff_max = max_iters
    if schedule.length is not None:
        eff_max = min(max_iters, schedule.length)

    ks, residuals, w_errs, u_errs, twines = [], [], [], [], []
    max_twine = 0.0
    converged = False
    k_end = 0
    Tu = None
    for k in range(eff_max + 1):
        Tu = inst.apply_T(u)
        FCw = inst.resolvent_MA(inst.C @ w)
        r = float(np.linalg.norm(u - Tu))
        twine = max(
            float(np.linalg.norm(w - inst.C.T @ u)),
            float(np.linalg.norm(Tu - FCw)),
        )
        max_twine = max(max_twine, twine)
        k_end = k
        last = (r <= eps) or (k == eff_max)
        if k % stride == 0 or last:
            ks.append(k)
            residuals.append(r)
            w_errs.append(
                float(np.linalg.norm(w - w_star)) if w_star is not None
                else np.nan
            )
            u_errs.append(
                float(np.linalg.norm(Tu - u_star)) if u_star is not None
                else np.nan
            )
            twines.append(twine)
        if r <= eps:
            converged = True
            break
        if k == eff_max:
            break
        lam = schedule.value(k)
        u = (1.0 - lam) * u + lam * Tu
        w = (1.0 - lam) * w + lam * (inst.C.T @ FCw)

    return LockstepTrace(
        ks=np.asarray(ks, dtype=np.int64),
        residuals=np.asarray(residuals),
        w_err=np.asarray(w_errs),
        u_err=np.asarray(u_errs),
        intertwine=np.asarray(twines),
        iterations=k_end,
        status="converged" if converged else "max_iters",
        u_final=u,
        w_final=w,
        Tu_final=Tu,
        max_intertwine=max_twine,
    )


def linear_matrix(apply_fn, dim):
    """Assemble the matrix of a linear map by applying it to unit vectors."""
    eye = np.eye(dim)
    cols = [np.asarray(apply_fn(eye[:, i]), dtype=float) for i in range(dim)]
    return np.column_stack(cols)
