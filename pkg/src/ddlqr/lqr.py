"""Model-based and data-driven LQR machinery.

Sign convention throughout the package: the control is ``u = K x`` and the
closed loop is ``A + B K``, so the certainty-equivalence gain carries an
explicit minus sign. The stability test matrix of the gain-scaling
certificate is quadratic in ``K`` and unaffected by this choice.
"""

from dataclasses import dataclass

import numpy as np

from .datastore import CovParam, DataSet, build_D
from .errors import DimensionError, InfeasibleError, RankDeficientError, UnstableError
from .kernels import (
    min_eigenvalue_symmetric,
    numerical_rank,
    pseudoinverse,
    solve_discrete_lyapunov,
    solve_modified_dare,
    spectral_radius,
    symmetrize,
)

FEASIBILITY_TOL = 1e-8


@dataclass(frozen=True)
class CostWeights:
    """Symmetric positive definite state and input weights."""

    q: np.ndarray  # n x n
    r: np.ndarray  # m x m

    def __post_init__(self):
        for name in ("q", "r"):
            w = np.asarray(getattr(self, name), dtype=float)
            object.__setattr__(self, name, w)
            if w.ndim != 2 or w.shape[0] != w.shape[1]:
                raise DimensionError(f"{name} must be square, got shape {w.shape}")
            if min_eigenvalue_symmetric(w) <= 0.0:
                raise DimensionError(f"{name} must be positive definite")


@dataclass(frozen=True)
class PolicyState:
    """Current gain with its latest data-parametrization snapshot.

    ``v`` satisfies ``Xbar0 @ v = I`` and ``Ubar0 @ v = k_gain`` for the
    covariance parametrization it was built against. ``sigma_v``, ``p_v``
    and ``cost`` are the Lyapunov solutions and cost from the most recent
    gradient evaluation; they are ``None`` for a freshly initialized policy
    that has not been re-parametrized yet.
    """

    k_gain: np.ndarray
    v: np.ndarray | None = None
    sigma_v: np.ndarray | None = None
    p_v: np.ndarray | None = None
    cost: float | None = None


def closed_loop_cost(a, b, k, w: CostWeights) -> float:
    """LQR cost ``tr((Q + K.T R K) Sigma_K)`` of the loop ``A + B K``.

    ``Sigma_K`` solves ``S = I + (A+BK) S (A+BK).T``; raises UnstableError
    when the closed loop is not Schur stable.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    k = np.asarray(k, dtype=float)
    a_cl = a + b @ k
    sigma = solve_discrete_lyapunov(a_cl, np.eye(a.shape[0]))
    return float(np.trace((w.q + k.T @ w.r @ k) @ sigma))


def ls_identify(ds: DataSet) -> tuple[np.ndarray, np.ndarray]:
    """Least-squares system matrices ``[B A] = X1 pinv([U0; X0])``.

    Returns ``(a_hat, b_hat)``; raises RankDeficientError when the stacked
    data matrix does not have full row rank n+m.
    """
    d = build_D(ds)
    if numerical_rank(d) < ds.n + ds.m:
        raise RankDeficientError(
            f"data matrix rank {numerical_rank(d)} < n+m = {ds.n + ds.m}"
        )
    theta = ds.x1 @ pseudoinverse(d)
    b_hat = theta[:, : ds.m]
    a_hat = theta[:, ds.m :]
    return a_hat, b_hat


def ce_lqr_gain(a_hat, b_hat, w: CostWeights) -> np.ndarray:
    """Certainty-equivalence LQR gain ``K = -(R + B'HB)^-1 B'HA``, ``u = Kx``."""
    a_hat = np.asarray(a_hat, dtype=float)
    b_hat = np.asarray(b_hat, dtype=float)
    h = solve_modified_dare(a_hat, b_hat, w.q, w.r, 1.0)
    bh = b_hat.T @ h
    k = -np.linalg.solve(w.r + bh @ b_hat, bh @ a_hat)
    if spectral_radius(a_hat + b_hat @ k) >= 1.0:
        raise UnstableError("certainty-equivalence gain failed to stabilize")
    return k


def cost_V(v, cp: CovParam, w: CostWeights) -> tuple[float, np.ndarray, np.ndarray]:
    """Data-parametrized LQR cost with its two Lyapunov solutions.

    For a feasible ``v`` (``Xbar0 @ v = I`` to 1e-8) returns
    ``(cost, sigma_v, p_v)`` where ``sigma_v`` solves
    ``S = I + (Xbar1 v) S (Xbar1 v).T``, ``p_v`` solves the dual equation
    ``P = Q + v' Ubar0' R Ubar0 v + (Xbar1 v)' P (Xbar1 v)`` and
    ``cost = tr((Q + v' Ubar0' R Ubar0 v) sigma_v)`` (= ``tr(p_v)``).

    Raises:
        InfeasibleError: Constraint residual above tolerance.
        UnstableError: ``Xbar1 v`` not Schur stable.
    """
    v = np.asarray(v, dtype=float)
    n = cp.n
    if v.shape != (n + cp.m, n):
        raise DimensionError(f"v must be {(n + cp.m, n)}, got {v.shape}")
    residual = float(np.linalg.norm(cp.xbar0 @ v - np.eye(n), 2))
    if residual > FEASIBILITY_TOL:
        raise InfeasibleError(f"constraint residual {residual:.3g} > {FEASIBILITY_TOL}")
    a_v = cp.xbar1 @ v
    sigma_v = solve_discrete_lyapunov(a_v, np.eye(n))
    ku = cp.ubar0 @ v
    weight = symmetrize(w.q + ku.T @ w.r @ ku)
    p_v = solve_discrete_lyapunov(a_v.T, weight)
    cost = float(np.trace(weight @ sigma_v))
    return cost, sigma_v, p_v


def deepo_gradient(v, cp: CovParam, w: CostWeights, sigma_v=None, p_v=None) -> np.ndarray:
    """Data-driven cost gradient ``2 (Ubar0' R Ubar0 + Xbar1' P Xbar1) V Sigma``.

    ``sigma_v``/``p_v`` may be passed in from a preceding :func:`cost_V`
    call to avoid re-solving the Lyapunov equations.
    """
    v = np.asarray(v, dtype=float)
    if sigma_v is None or p_v is None:
        _, sigma_v, p_v = cost_V(v, cp, w)
    core = cp.ubar0.T @ w.r @ cp.ubar0 + cp.xbar1.T @ p_v @ cp.xbar1
    return 2.0 * core @ v @ sigma_v


def project_gradient(g, xbar0) -> np.ndarray:
    """Project onto the kernel of ``Xbar0``: ``(I - pinv(Xbar0) Xbar0) g``.

    This is the unique orthogonal projector keeping ``Xbar0 @ V = I``
    invariant under a gradient step.
    """
    g = np.asarray(g, dtype=float)
    xbar0 = np.asarray(xbar0, dtype=float)
    return g - pseudoinverse(xbar0) @ (xbar0 @ g)
