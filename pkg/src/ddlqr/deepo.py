"""Baseline adaptive policy-optimization loop with additive probing noise.

One iteration applies ``u = K x + e``, appends the observed transition to
the dataset, re-parametrizes the current gain against the updated data
covariance (``V = Phi^-1 [K; I]``), takes one projected gradient step and
reads the next gain off as ``K' = Ubar0 V'``. Setting the probing standard
deviation to zero gives the ablation whose data covariance drifts toward
singularity once the gain converges.
"""

from dataclasses import dataclass

import numpy as np

from .datastore import CovParam, DataSet, append_sample, covariance_param
from .errors import DimensionError, PhiSingularError
from .kernels import min_singular_value, pseudoinverse
from .lqr import CostWeights, PolicyState, cost_V, deepo_gradient, project_gradient
from .plant import (
    STREAM_DISTURB,
    STREAM_PROBING,
    STREAM_PROCESS,
    PlantModel,
    StateDisturbance,
    TraceLog,
    TraceRecord,
    plant_step,
    rng_stream,
)

PHI_SINGULAR_TOL = 1e-10


@dataclass(frozen=True)
class DeepoConfig:
    """Loop parameters: learning rate, probing noise level, horizon, seed."""

    eta: float
    sigma_e: float = 0.0
    horizon: int = 100
    seed: int = 0

    def __post_init__(self):
        if not self.eta > 0.0:
            raise DimensionError(f"eta must be > 0, got {self.eta}")
        if self.sigma_e < 0.0:
            raise DimensionError(f"sigma_e must be >= 0, got {self.sigma_e}")
        if self.horizon < 0:
            raise DimensionError(f"horizon must be >= 0, got {self.horizon}")


def gain_update(k_gain: np.ndarray, cp: CovParam, w: CostWeights, eta: float) -> PolicyState:
    """Re-parametrize ``k_gain`` in ``cp`` and take one projected gradient step.

    Solves ``Phi V = [K; I]`` (as a linear system, no explicit inverse),
    cancels constraint drift with one re-projection, evaluates the cost and
    gradient there, and returns the stepped policy with
    ``K' = Ubar0 (V - eta * proj(grad))``.

    Raises:
        PhiSingularError: ``sigma_min(Phi) < 1e-10``; the documented failure
            mode of probing-free operation.
    """
    n, m = cp.n, cp.m
    if min_singular_value(cp.phi) < PHI_SINGULAR_TOL:
        raise PhiSingularError(
            f"sigma_min(Phi) = {min_singular_value(cp.phi):.3g} below "
            f"{PHI_SINGULAR_TOL}; data covariance lost rank"
        )
    target = np.vstack([k_gain, np.eye(n)])
    v = np.linalg.solve(cp.phi, target)
    # one re-projection per iteration cancels solver drift on Xbar0 V = I
    v = v - pseudoinverse(cp.xbar0) @ (cp.xbar0 @ v - np.eye(n))
    cost, sigma_v, p_v = cost_V(v, cp, w)
    grad = deepo_gradient(v, cp, w, sigma_v=sigma_v, p_v=p_v)
    v_next = v - eta * project_gradient(grad, cp.xbar0)
    return PolicyState(
        k_gain=cp.ubar0 @ v_next, v=v_next, sigma_v=sigma_v, p_v=p_v, cost=cost
    )


def deepo_step(
    policy: PolicyState,
    cp: CovParam,
    ds: DataSet,
    x: np.ndarray,
    w: CostWeights,
    cfg: DeepoConfig,
    rng: np.random.Generator,
):
    """One loop iteration, split at the plant boundary.

    Returns ``(u, complete)`` where ``u = K x + e`` is the control to apply
    and ``complete(x_next)`` appends the observed transition and performs
    the gain update, returning ``(next_policy, next_cov, next_dataset)``.
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    e = cfg.sigma_e * rng.standard_normal(cp.m)
    u = policy.k_gain @ x + e

    def complete(x_next) -> tuple[PolicyState, CovParam, DataSet]:
        cp2, ds2 = append_sample(cp, ds, x, u, x_next)
        return gain_update(policy.k_gain, cp2, w, cfg.eta), cp2, ds2

    return u, complete


def run_deepo(
    plant: PlantModel,
    ds0: DataSet,
    k0: np.ndarray,
    w: CostWeights,
    cfg: DeepoConfig,
    disturbance: StateDisturbance | None = None,
    label: str = "deepo",
) -> TraceLog:
    """Run the loop for ``cfg.horizon`` steps from ``x = 0``.

    The trace holds one record per step plus a terminal record (zero input)
    for the final state; identical seeds give bit-identical traces.
    """
    k_gain = np.asarray(k0, dtype=float)
    if k_gain.shape != (plant.m, plant.n):
        raise DimensionError(
            f"k0 must be {(plant.m, plant.n)}, got {k_gain.shape}"
        )
    process = rng_stream(cfg.seed, STREAM_PROCESS)
    probing = rng_stream(cfg.seed, STREAM_PROBING)
    disturb = rng_stream(cfg.seed, STREAM_DISTURB)

    policy = PolicyState(k_gain=k_gain)
    cp = covariance_param(ds0)
    ds = ds0
    x = np.zeros(plant.n)
    branch = "probe" if cfg.sigma_e > 0.0 else "plain"
    trace = TraceLog(n=plant.n, m=plant.m, label=label)
    prev_gain = policy.k_gain

    for k in range(cfg.horizon):
        if disturbance is not None and k == disturbance.time:
            x = x + disturb.uniform(
                -disturbance.magnitude, disturbance.magnitude, plant.n
            )
        sigma_min_phi = min_singular_value(cp.phi)
        u, complete = deepo_step(policy, cp, ds, x, w, cfg, probing)
        x_next = plant_step(plant, x, u, process)
        trace.records.append(
            TraceRecord(
                k=k,
                x=x,
                u=u,
                gain=policy.k_gain,
                sigma_min_phi=sigma_min_phi,
                cost=float(x @ w.q @ x + u @ w.r @ u),
                branch=branch,
                v=1.0,
                dk_norm=float(np.linalg.norm(policy.k_gain - prev_gain, 2)),
            )
        )
        prev_gain = policy.k_gain
        policy, cp, ds = complete(x_next)
        x = x_next

    trace.records.append(
        TraceRecord(
            k=cfg.horizon,
            x=x,
            u=np.zeros(plant.m),
            gain=policy.k_gain,
            sigma_min_phi=min_singular_value(cp.phi),
            cost=float(x @ w.q @ x),
            branch="end",
            v=1.0,
            dk_norm=float(np.linalg.norm(policy.k_gain - prev_gain, 2)),
        )
    )
    trace.final_dataset = ds
    trace.final_cov = cp
    trace.final_gain = policy.k_gain
    return trace
