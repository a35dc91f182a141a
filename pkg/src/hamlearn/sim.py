"""Trajectory integration and training-data generation.

Integration wraps scipy's DOP853 (adaptive embedded Runge-Kutta of order
8) with tight default tolerances and dense interpolation onto a uniform
time grid.  Datasets pair states with state derivatives: trajectories of
the true system are sampled on the grid, the derivative y = f(x) is
evaluated at the clean states, and Gaussian measurement noise is added to
both afterwards.  Each trajectory draws its noise from an RNG stream
keyed by (seed, trajectory index), so regeneration is bit-exact and
independent of evaluation order.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, replace

import numpy as np
from scipy.integrate import solve_ivp

from .errors import InputError, IntegrationError

__all__ = [
    "TrajectorySpec",
    "Trajectory",
    "Dataset",
    "DatasetMeta",
    "integrate",
    "sample_ics",
    "generate_dataset",
    "point_dataset",
    "dataset_digest",
]

DEFAULT_REL_TOL = 1e-10
DEFAULT_ABS_TOL = 1e-12
_MAX_TOL = 1e-2

NOISE_MODES = ("post", "pre")


@dataclass(frozen=True)
class TrajectorySpec:
    """Initial condition, time span, and integration accuracy."""

    x0: np.ndarray
    t_end: float
    n_steps: int
    rel_tol: float = DEFAULT_REL_TOL
    abs_tol: float = DEFAULT_ABS_TOL

    def __post_init__(self):
        x0 = np.atleast_1d(np.asarray(self.x0, dtype=float))
        if x0.ndim != 1 or not np.all(np.isfinite(x0)):
            raise InputError(f"x0 must be a finite vector, got {self.x0!r}")
        object.__setattr__(self, "x0", x0)
        if not np.isfinite(self.t_end) or self.t_end <= 0:
            raise InputError(f"t_end must be positive, got {self.t_end}")
        if int(self.n_steps) < 2:
            raise InputError(f"n_steps must be at least 2, got {self.n_steps}")
        for name in ("rel_tol", "abs_tol"):
            tol = getattr(self, name)
            if not (0.0 < tol <= _MAX_TOL):
                raise InputError(f"{name} must lie in (0, {_MAX_TOL}], got {tol}")

    @property
    def times(self):
        return np.linspace(0.0, self.t_end, int(self.n_steps))


@dataclass(frozen=True)
class Trajectory:
    """States on a uniform time grid.  Iterates as (t, state) pairs."""

    t: np.ndarray  # (T,)
    x: np.ndarray  # (T, n)

    def __iter__(self):
        return iter(zip(self.t, self.x))

    def __len__(self):
        return self.t.shape[0]


def integrate(f, spec):
    """Integrate xdot = f(x) over [0, t_end], sampled at n_steps times.

    Parameters
    ----------
    f : callable
        Vector field, called as f(x) with a single state.
    spec : TrajectorySpec

    Raises
    ------
    IntegrationError
        On step-size underflow or non-finite states, reporting how far
        the integration reached.
    """
    sol = solve_ivp(
        lambda t, y: f(y),
        (0.0, spec.t_end),
        spec.x0,
        method="DOP853",
        t_eval=spec.times,
        rtol=spec.rel_tol,
        atol=spec.abs_tol,
    )
    if not sol.success:
        reached = sol.t[-1] if sol.t.size else 0.0
        raise IntegrationError(
            f"integration failed at t={reached:.6g} of {spec.t_end:.6g}: {sol.message}"
        )
    states = sol.y.T
    if not np.all(np.isfinite(states)):
        raise IntegrationError(f"integration produced non-finite states by t={spec.t_end:.6g}")
    return Trajectory(t=sol.t, x=states)


def sample_ics(lower, upper, count, seed):
    """Sample initial conditions uniformly from a box."""
    lower = np.atleast_1d(np.asarray(lower, dtype=float))
    upper = np.atleast_1d(np.asarray(upper, dtype=float))
    if lower.shape != upper.shape or lower.ndim != 1:
        raise InputError(f"box bounds must be vectors of equal length, got {lower} and {upper}")
    if not np.all(lower < upper):
        raise InputError(f"degenerate box: need lower < upper everywhere, got {lower}, {upper}")
    if int(count) < 1:
        raise InputError(f"count must be positive, got {count}")
    rng = np.random.default_rng(seed)
    return rng.uniform(lower, upper, size=(int(count), lower.size))


@dataclass(frozen=True)
class DatasetMeta:
    """Provenance of a dataset: recipe, noise level, and seed."""

    system: str
    params: dict
    kind: str  # "trajectories" or "points"
    sigma_n: float
    seed: int
    noise_mode: str
    t_end: float
    n_steps: int


@dataclass(frozen=True)
class Dataset:
    """Paired (state, state-derivative) samples with trajectory labels."""

    x: np.ndarray  # (N, n)
    y: np.ndarray  # (N, n)
    t: np.ndarray  # (N,)
    traj_ids: np.ndarray  # (N,) int
    meta: DatasetMeta

    def __post_init__(self):
        for arr in (self.x, self.y, self.t, self.traj_ids):
            arr.setflags(write=False)

    @property
    def n_samples(self):
        return self.x.shape[0]

    @property
    def dim(self):
        return self.x.shape[1]

    def select(self, indices):
        """Subset of samples (used by cross validation)."""
        idx = np.asarray(indices)
        return Dataset(
            x=self.x[idx].copy(),
            y=self.y[idx].copy(),
            t=self.t[idx].copy(),
            traj_ids=self.traj_ids[idx].copy(),
            meta=self.meta,
        )


def _params_dict(params):
    if params is None:
        return {}
    fields = getattr(params, "__dataclass_fields__", None)
    if fields is None:
        return dict(params)
    return {name: getattr(params, name) for name in fields}


def generate_dataset(
    system,
    ics,
    t_end,
    n_steps,
    sigma_n,
    seed,
    noise_mode="post",
    rel_tol=DEFAULT_REL_TOL,
    abs_tol=DEFAULT_ABS_TOL,
):
    """Simulate the system from each IC and sample noisy (x, y) pairs.

    With the default ``noise_mode="post"`` the derivative is evaluated at
    the clean trajectory state and N(0, sigma_n^2) noise is then added to
    states and derivatives independently; ``"pre"`` instead evaluates the
    derivative at the already-noisy state (for sensitivity studies).

    Parameters
    ----------
    system : systems.System
        Carries the vector field and its parameters.
    ics : ndarray, shape (M, n)
    t_end, n_steps : time grid per trajectory
    sigma_n : float
        Noise standard deviation, >= 0.
    seed : int
        Master seed; trajectory i uses the stream (seed, i).
    """
    if noise_mode not in NOISE_MODES:
        raise InputError(f"noise_mode must be one of {NOISE_MODES}, got {noise_mode!r}")
    if sigma_n < 0:
        raise InputError(f"sigma_n must be non-negative, got {sigma_n}")
    ics = np.atleast_2d(np.asarray(ics, dtype=float))
    xs, ys, ts, ids = [], [], [], []
    for i, ic in enumerate(ics):
        spec = TrajectorySpec(ic, t_end, n_steps, rel_tol=rel_tol, abs_tol=abs_tol)
        traj = integrate(system.dynamics, spec)
        rng = np.random.default_rng([int(seed), i])
        x_noise = rng.normal(0.0, sigma_n, size=traj.x.shape) if sigma_n else 0.0
        y_noise = rng.normal(0.0, sigma_n, size=traj.x.shape) if sigma_n else 0.0
        x_noisy = traj.x + x_noise
        if noise_mode == "post":
            y_noisy = system.dynamics(traj.x) + y_noise
        else:
            y_noisy = system.dynamics(x_noisy) + y_noise
        xs.append(x_noisy)
        ys.append(y_noisy)
        ts.append(traj.t)
        ids.append(np.full(len(traj), i, dtype=np.int64))
    meta = DatasetMeta(
        system=system.name,
        params=_params_dict(system.params),
        kind="trajectories",
        sigma_n=float(sigma_n),
        seed=int(seed),
        noise_mode=noise_mode,
        t_end=float(t_end),
        n_steps=int(n_steps),
    )
    return Dataset(
        x=np.concatenate(xs),
        y=np.concatenate(ys),
        t=np.concatenate(ts),
        traj_ids=np.concatenate(ids),
        meta=meta,
    )


def point_dataset(system, lower, upper, count, sigma_n, seed, noise_mode="post"):
    """Sample states uniformly from a box instead of along trajectories.

    Each point counts as its own length-1 trajectory (t = 0).
    """
    if noise_mode not in NOISE_MODES:
        raise InputError(f"noise_mode must be one of {NOISE_MODES}, got {noise_mode!r}")
    if sigma_n < 0:
        raise InputError(f"sigma_n must be non-negative, got {sigma_n}")
    x_clean = sample_ics(lower, upper, count, seed)
    rng = np.random.default_rng([int(seed), 1])
    x_noise = rng.normal(0.0, sigma_n, size=x_clean.shape) if sigma_n else 0.0
    y_noise = rng.normal(0.0, sigma_n, size=x_clean.shape) if sigma_n else 0.0
    x = x_clean + x_noise
    if noise_mode == "post":
        y = system.dynamics(x_clean) + y_noise
    else:
        y = system.dynamics(x) + y_noise
    meta = DatasetMeta(
        system=system.name,
        params=_params_dict(system.params),
        kind="points",
        sigma_n=float(sigma_n),
        seed=int(seed),
        noise_mode=noise_mode,
        t_end=0.0,
        n_steps=1,
    )
    return Dataset(
        x=x,
        y=np.asarray(y, dtype=float),
        t=np.zeros(x.shape[0]),
        traj_ids=np.arange(x.shape[0], dtype=np.int64),
        meta=meta,
    )


def dataset_digest(dataset):
    """Stable hex digest of a dataset's contents and provenance."""
    h = hashlib.sha256()
    for arr in (dataset.x, dataset.y, dataset.t, dataset.traj_ids):
        h.update(np.ascontiguousarray(arr).tobytes())
    meta = dataset.meta
    h.update(
        json.dumps(
            {
                "system": meta.system,
                "params": meta.params,
                "kind": meta.kind,
                "sigma_n": meta.sigma_n,
                "seed": meta.seed,
                "noise_mode": meta.noise_mode,
                "t_end": meta.t_end,
                "n_steps": meta.n_steps,
            },
            sort_keys=True,
        ).encode()
    )
    return h.hexdigest()[:16]
