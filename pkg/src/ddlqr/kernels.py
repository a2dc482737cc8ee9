"""Dense small-matrix primitives with explicit accuracy contracts.

Everything here is sized for feedback-design problems (state dimension up
to a few tens), so direct methods are preferred over structure-exploiting
iterations throughout.
"""

import numpy as np

from .errors import (
    DimensionError,
    NoConvergenceError,
    NotSymmetricError,
    UnstableError,
)

# Spectral radii closer to 1 than this margin are rejected: the discrete
# Lyapunov fixed point is ill-conditioned near the stability boundary.
STABILITY_MARGIN = 1e-9

DARE_RESIDUAL_TOL = 1e-9
DARE_MAX_ITER = 100_000

# A singular value counts toward rank when above rel_tol * sigma_max,
# with an absolute floor for all-tiny matrices.
RANK_REL_TOL = 1e-8
RANK_ABS_FLOOR = 1e-12


def _as_matrix(m, name: str) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.ndim != 2:
        raise DimensionError(f"{name} must be a 2-D array, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise DimensionError(f"{name} contains non-finite entries")
    return m


def _as_square(m, name: str) -> np.ndarray:
    m = _as_matrix(m, name)
    if m.shape[0] != m.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {m.shape}")
    return m


def symmetrize(m: np.ndarray) -> np.ndarray:
    """Average a matrix with its transpose to suppress rounding drift."""
    return 0.5 * (m + m.T)


def spectral_radius(m) -> float:
    """Largest eigenvalue magnitude of a square matrix."""
    m = _as_square(m, "m")
    return float(np.max(np.abs(np.linalg.eigvals(m))))


def solve_discrete_lyapunov(a_cl, w) -> np.ndarray:
    """Solve the discrete Lyapunov equation ``S = w + a_cl @ S @ a_cl.T``.

    Uses the Kronecker vectorization ``(I - a_cl (x) a_cl) vec(S) = vec(w)``
    and solves the resulting linear system directly, which is exact up to
    rounding for the small dimensions targeted here.

    Args:
        a_cl: Square closed-loop matrix, spectral radius strictly below 1.
        w: Symmetric positive semidefinite forcing term, same shape.

    Returns:
        The symmetric PSD solution ``S``, with equation residual below
        ``1e-10 * max(1, ||S||)``.

    Raises:
        UnstableError: If the spectral radius of ``a_cl`` is at least
            ``1 - 1e-9``.
        DimensionError: On shape mismatch.
    """
    a_cl = _as_square(a_cl, "a_cl")
    w = _as_square(w, "w")
    if a_cl.shape != w.shape:
        raise DimensionError(
            f"a_cl and w must share shape, got {a_cl.shape} and {w.shape}"
        )
    if spectral_radius(a_cl) >= 1.0 - STABILITY_MARGIN:
        raise UnstableError(
            f"spectral radius {spectral_radius(a_cl):.6g} is not below 1"
        )
    n = a_cl.shape[0]
    lhs = np.eye(n * n) - np.kron(a_cl, a_cl)
    sigma = np.linalg.solve(lhs, symmetrize(w).reshape(-1))
    return symmetrize(sigma.reshape(n, n))


def solve_modified_dare(a, b, q, r, beta: float) -> np.ndarray:
    """Solve ``a.T H a - beta^2 H - a.T H b (r + b.T H b)^-1 b.T H a + q = 0``.

    Dividing the equation by ``beta**2`` shows that ``H`` is the standard
    Riccati solution for the scaled data ``(a/beta, b/beta, q/beta^2,
    r/beta^2)``; the solver runs the fixed-point Riccati recursion on that
    scaled pair until the residual of the original equation falls below
    ``1e-9 * max(1, ||H||)``. ``beta = 1`` recovers the plain DARE.

    Args:
        a: n x n state matrix; ``(a, b)`` must be stabilizable for the
            beta-scaled pair.
        b: n x m input matrix.
        q: n x n symmetric positive definite state weight.
        r: m x m symmetric positive definite input weight.
        beta: Decay rate in (0, 1].

    Raises:
        NoConvergenceError: If the recursion does not meet tolerance within
            100000 iterations (e.g. the scaled pair is not stabilizable).
        DimensionError: On shape mismatch or beta outside (0, 1].
    """
    a = _as_square(a, "a")
    b = _as_matrix(b, "b")
    q = _as_square(q, "q")
    r = _as_square(r, "r")
    n = a.shape[0]
    m = b.shape[1]
    if b.shape[0] != n or q.shape[0] != n or r.shape[0] != m:
        raise DimensionError(
            f"inconsistent shapes a={a.shape} b={b.shape} q={q.shape} r={r.shape}"
        )
    if not (0.0 < beta <= 1.0):
        raise DimensionError(f"beta must lie in (0, 1], got {beta}")

    a_s = a / beta
    b_s = b / beta
    q_s = q / beta**2
    r_s = r / beta**2

    h = q_s.copy()
    for _ in range(DARE_MAX_ITER):
        bh = b_s.T @ h
        gain_term = a_s.T @ bh.T @ np.linalg.solve(r_s + bh @ b_s, bh @ a_s)
        h_next = symmetrize(q_s + a_s.T @ h @ a_s - gain_term)
        if not np.all(np.isfinite(h_next)):
            raise NoConvergenceError("Riccati recursion diverged")
        h = h_next
        res = _modified_dare_residual(a, b, q, r, beta, h)
        if res <= DARE_RESIDUAL_TOL * max(1.0, float(np.linalg.norm(h, 2))):
            return h
    raise NoConvergenceError(
        f"Riccati recursion did not converge in {DARE_MAX_ITER} iterations"
    )


def _modified_dare_residual(a, b, q, r, beta, h) -> float:
    bh = b.T @ h
    mid = a.T @ bh.T @ np.linalg.solve(r + bh @ b, bh @ a)
    res = a.T @ h @ a - beta**2 * h - mid + q
    return float(np.linalg.norm(res, 2))


def pseudoinverse(m) -> np.ndarray:
    """Moore-Penrose pseudoinverse, defined for all finite matrices."""
    return np.linalg.pinv(_as_matrix(m, "m"))


def min_singular_value(m) -> float:
    """Smallest singular value of a matrix."""
    m = _as_matrix(m, "m")
    return float(np.linalg.svd(m, compute_uv=False)[-1])


def min_eigenvalue_symmetric(m) -> float:
    """Smallest eigenvalue of a symmetric matrix.

    Raises:
        NotSymmetricError: If ``m`` deviates from its transpose beyond
            ``1e-12`` relative to its magnitude (floor 1).
    """
    m = _as_square(m, "m")
    scale = max(1.0, float(np.max(np.abs(m))))
    if float(np.max(np.abs(m - m.T))) > 1e-12 * scale:
        raise NotSymmetricError("matrix is not symmetric to 1e-12")
    return float(np.linalg.eigvalsh(symmetrize(m))[0])


def numerical_rank(m) -> int:
    """Rank by counting singular values above ``max(1e-8*sigma_max, 1e-12)``."""
    m = _as_matrix(m, "m")
    s = np.linalg.svd(m, compute_uv=False)
    if s.size == 0:
        return 0
    return int(np.sum(s > max(RANK_REL_TOL * float(s[0]), RANK_ABS_FLOOR)))
