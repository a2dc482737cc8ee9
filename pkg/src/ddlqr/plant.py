"""Plant simulation, seeded substreams and per-run trace records.

Every run derives its randomness from one integer seed through named
substreams so components can be reproduced independently:

===================  ==========================================
spawn key            used for
===================  ==========================================
``(0, attempt)``     offline data generation (inputs + noise)
``(1,)``             online process noise
``(2,)``             probing noise
``(3,)``             gain-scaling draws
``(4,)``             state disturbance vector
===================  ==========================================

Streams are ``numpy.random.Generator`` (PCG64) seeded with
``SeedSequence(seed, spawn_key=key)``, which is stable across platforms,
so traces are portable for a fixed seed.
"""

from dataclasses import dataclass, field

import numpy as np

from .datastore import CovParam, DataSet
from .errors import DimensionError

STREAM_OFFLINE = 0
STREAM_PROCESS = 1
STREAM_PROBING = 2
STREAM_VDRAW = 3
STREAM_DISTURB = 4


def rng_stream(seed: int, *key: int) -> np.random.Generator:
    """Generator for the named substream of ``seed``."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=tuple(key)))


@dataclass(frozen=True)
class PlantModel:
    """Ground-truth discrete-time plant ``x+ = A x + B u + w``.

    ``sigma_w`` is the standard deviation of the isotropic Gaussian process
    noise. Lives on the simulator side only; the algorithms never see (A, B).
    """

    a: np.ndarray
    b: np.ndarray
    sigma_w: float = 0.0

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        b = np.asarray(self.b, dtype=float)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DimensionError(f"A must be square, got shape {a.shape}")
        if b.ndim != 2 or b.shape[0] != a.shape[0]:
            raise DimensionError(f"B must be {a.shape[0]} x m, got shape {b.shape}")
        if not np.isfinite(self.sigma_w) or self.sigma_w < 0.0:
            raise DimensionError(f"sigma_w must be finite and >= 0, got {self.sigma_w}")

    @property
    def n(self) -> int:
        return self.a.shape[0]

    @property
    def m(self) -> int:
        return self.b.shape[1]


def plant_step(plant: PlantModel, x, u, rng: np.random.Generator) -> np.ndarray:
    """One noisy plant transition ``A x + B u + sigma_w * N(0, I)``."""
    x = np.asarray(x, dtype=float).reshape(-1)
    u = np.asarray(u, dtype=float).reshape(-1)
    if x.shape[0] != plant.n or u.shape[0] != plant.m:
        raise DimensionError(
            f"state/input dims ({x.shape[0]}, {u.shape[0]}) do not match plant "
            f"({plant.n}, {plant.m})"
        )
    return plant.a @ x + plant.b @ u + plant.sigma_w * rng.standard_normal(plant.n)


@dataclass(frozen=True)
class StateDisturbance:
    """Additive state kick: entries uniform on [-magnitude, magnitude]."""

    time: int
    magnitude: float


@dataclass(frozen=True)
class TraceRecord:
    """One trace row: the state seen at step k and what was applied there."""

    k: int
    x: np.ndarray
    u: np.ndarray
    gain: np.ndarray
    sigma_min_phi: float
    cost: float
    branch: str
    v: float
    dk_norm: float | None = None
    cert_available: bool = False


@dataclass
class TraceLog:
    """Per-step records of one run plus the grown dataset for follow-up use."""

    n: int
    m: int
    label: str = ""
    records: list[TraceRecord] = field(default_factory=list)
    final_dataset: DataSet | None = None
    final_cov: CovParam | None = None
    final_gain: np.ndarray | None = None

    def __len__(self) -> int:
        return len(self.records)

    def states(self) -> np.ndarray:
        """(len, n) array of states, row per record."""
        return np.array([r.x for r in self.records])

    def inputs(self) -> np.ndarray:
        return np.array([r.u for r in self.records])

    def minsvd(self) -> np.ndarray:
        return np.array([r.sigma_min_phi for r in self.records])

    def costs(self) -> np.ndarray:
        return np.array([r.cost for r in self.records])
