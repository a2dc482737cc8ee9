"""Growing input/state datasets and their sample-covariance parametrization.

The dataset keeps the raw triplet (U0, X0, X1) of inputs, states and
successor states; the covariance parametrization is the fixed-size summary
``Phi = D D.T / t`` with ``D = [U0; X0]`` (inputs stacked above states) and
``Xbar1 = X1 D.T / t``. Both are maintained incrementally so a policy update
costs the same regardless of how many samples have been collected.
"""

import csv
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError
from .kernels import numerical_rank, symmetrize


@dataclass(frozen=True)
class DataSet:
    """Input/state/successor triplet with one column per sample."""

    u0: np.ndarray  # m x t inputs
    x0: np.ndarray  # n x t states
    x1: np.ndarray  # n x t successor states

    def __post_init__(self):
        for name in ("u0", "x0", "x1"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.ndim != 2:
                raise DimensionError(f"{name} must be 2-D, got shape {arr.shape}")
            if not np.all(np.isfinite(arr)):
                raise DimensionError(f"{name} contains non-finite entries")
            object.__setattr__(self, name, arr)
        if not (self.u0.shape[1] == self.x0.shape[1] == self.x1.shape[1]):
            raise DimensionError("u0, x0 and x1 must share the sample count")
        if self.x0.shape[0] != self.x1.shape[0]:
            raise DimensionError("x0 and x1 must share the state dimension")

    @property
    def m(self) -> int:
        return self.u0.shape[0]

    @property
    def n(self) -> int:
        return self.x0.shape[0]

    @property
    def t(self) -> int:
        return self.u0.shape[1]


@dataclass(frozen=True)
class CovParam:
    """Sample covariance ``Phi`` and successor cross-covariance ``Xbar1``.

    The top ``m`` rows of ``Phi`` are ``Ubar0 = U0 D.T / t`` and the bottom
    ``n`` rows are ``Xbar0 = X0 D.T / t``; row order therefore matters and
    matches ``build_D``.
    """

    phi: np.ndarray  # (n+m) x (n+m), symmetric PSD
    xbar1: np.ndarray  # n x (n+m)
    t: int

    @property
    def n(self) -> int:
        return self.xbar1.shape[0]

    @property
    def m(self) -> int:
        return self.phi.shape[0] - self.n

    @property
    def ubar0(self) -> np.ndarray:
        return self.phi[: self.m]

    @property
    def xbar0(self) -> np.ndarray:
        return self.phi[self.m :]


def build_hankel(u, order: int) -> np.ndarray:
    """Block-Hankel matrix of depth ``order`` from an m x t signal.

    Block row ``i`` holds the samples ``u_i, ..., u_{i+t-order}``, so the
    result has shape ``(m*order) x (t-order+1)``.
    """
    u = np.atleast_2d(np.asarray(u, dtype=float))
    m, t = u.shape
    if order < 1:
        raise DimensionError(f"order must be >= 1, got {order}")
    if t < order:
        raise DimensionError(f"need at least order={order} samples, got {t}")
    cols = t - order + 1
    h = np.empty((m * order, cols))
    for i in range(order):
        h[i * m : (i + 1) * m] = u[:, i : i + cols]
    return h


def is_persistently_exciting(u, order: int) -> bool:
    """Whether the block-Hankel matrix of depth ``order`` has full row rank."""
    u = np.atleast_2d(np.asarray(u, dtype=float))
    h = build_hankel(u, order)
    return numerical_rank(h) == u.shape[0] * order


def build_D(ds: DataSet) -> np.ndarray:
    """Stack inputs above states: ``D = [U0; X0]`` of shape (n+m) x t."""
    return np.vstack([ds.u0, ds.x0])


def covariance_param(ds: DataSet) -> CovParam:
    """Batch-compute ``Phi = D D.T / t`` and ``Xbar1 = X1 D.T / t``."""
    if ds.t < 1:
        raise DimensionError("dataset must contain at least one sample")
    d = build_D(ds)
    phi = symmetrize(d @ d.T / ds.t)
    xbar1 = ds.x1 @ d.T / ds.t
    return CovParam(phi=phi, xbar1=xbar1, t=ds.t)


def append_sample(cp: CovParam, ds: DataSet, x, u, x_next) -> tuple[CovParam, DataSet]:
    """Grow the dataset by one sample and rank-one-update the covariance.

    Returns fresh ``(CovParam, DataSet)`` values; the update satisfies
    ``Phi' = (t*Phi + d d.T) / (t+1)`` with ``d = [u; x]`` and matches a
    batch recomputation of the grown dataset to rounding.
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    u = np.asarray(u, dtype=float).reshape(-1)
    x_next = np.asarray(x_next, dtype=float).reshape(-1)
    if x.shape[0] != ds.n or x_next.shape[0] != ds.n or u.shape[0] != ds.m:
        raise DimensionError(
            f"sample dims (x={x.shape[0]}, u={u.shape[0]}, x_next={x_next.shape[0]}) "
            f"do not match dataset (n={ds.n}, m={ds.m})"
        )
    d = np.concatenate([u, x])
    t = cp.t
    phi = symmetrize((t * cp.phi + np.outer(d, d)) / (t + 1))
    xbar1 = (t * cp.xbar1 + np.outer(x_next, d)) / (t + 1)
    grown = DataSet(
        u0=np.column_stack([ds.u0, u]),
        x0=np.column_stack([ds.x0, x]),
        x1=np.column_stack([ds.x1, x_next]),
    )
    return CovParam(phi=phi, xbar1=xbar1, t=t + 1), grown


def write_dataset_csv(ds: DataSet, path) -> None:
    """Write a dataset as CSV: ``k, u1..um, x1..xn, x1next..xnnext``."""
    header = (
        ["k"]
        + [f"u{i+1}" for i in range(ds.m)]
        + [f"x{i+1}" for i in range(ds.n)]
        + [f"x{i+1}next" for i in range(ds.n)]
    )
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for k in range(ds.t):
            row = [str(k)]
            row += [f"{v:.17g}" for v in ds.u0[:, k]]
            row += [f"{v:.17g}" for v in ds.x0[:, k]]
            row += [f"{v:.17g}" for v in ds.x1[:, k]]
            writer.writerow(row)


def read_dataset_csv(path) -> DataSet:
    """Read a dataset CSV written by :func:`write_dataset_csv`.

    Sample rows may be arbitrary (non-consecutive ``k`` values are accepted);
    dimensions are inferred from the header.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise DimensionError(f"{path}: empty file, header required")
        m = sum(1 for c in header if c.startswith("u"))
        n = sum(1 for c in header if c.startswith("x") and not c.endswith("next"))
        if header[0] != "k" or m < 1 or n < 1 or len(header) != 1 + m + 2 * n:
            raise DimensionError(f"{path}: malformed header {header}")
        u_rows, x_rows, x1_rows = [], [], []
        for row in reader:
            if not row:
                continue
            vals = [float(v) for v in row[1:]]
            u_rows.append(vals[:m])
            x_rows.append(vals[m : m + n])
            x1_rows.append(vals[m + n :])
    if not u_rows:
        raise DimensionError(f"{path}: no sample rows")
    return DataSet(
        u0=np.array(u_rows).T, x0=np.array(x_rows).T, x1=np.array(x1_rows).T
    )
