"""Benchmark Hamiltonian systems: pendulum, cart-pole, two-link robot.

Each system provides its vector field f(x) = J grad H(x) and Hamiltonian
H(x) = 1/2 p^T M(q)^{-1} p + U(q) in canonical coordinates x = (q, p).
All three fields are odd: f(-x) = -f(x), because M is even and U is even
in q.  Angles are never wrapped inside the dynamics; trajectories live on
R^n so that states remain comparable with regression outputs (wrapping is
an explicit post-processing step, see ``wrap_angles``).

The module also carries the data-generation constants of the reference
experiments: training initial conditions or sampling boxes, time spans,
and the evaluation box used for symmetry-error estimates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import InputError

__all__ = [
    "SYSTEM_NAMES",
    "PendulumParams",
    "CartPoleParams",
    "TwoLinkParams",
    "System",
    "get_system",
    "pendulum_dynamics",
    "pendulum_hamiltonian",
    "cartpole_mass_matrix",
    "cartpole_dynamics",
    "cartpole_hamiltonian",
    "twolink_mass_matrix",
    "twolink_dynamics",
    "twolink_hamiltonian",
    "wrap_angles",
]

SYSTEM_NAMES = ("pendulum", "cartpole", "twolink")


# ------------------------------------------------------------- pendulum


@dataclass(frozen=True)
class PendulumParams:
    m: float = 1.0
    l: float = 1.0
    g: float = 9.81


def pendulum_dynamics(x, params=PendulumParams()):
    """qdot = p / (m l^2), pdot = -m g l sin(q)."""
    x = np.asarray(x, dtype=float)
    q, p = x[..., 0], x[..., 1]
    return np.stack(
        [p / (params.m * params.l**2), -params.m * params.g * params.l * np.sin(q)], axis=-1
    )


def pendulum_hamiltonian(x, params=PendulumParams()):
    """H = p^2 / (2 m l^2) + m g l (1 - cos q)."""
    x = np.asarray(x, dtype=float)
    q, p = x[..., 0], x[..., 1]
    return p**2 / (2.0 * params.m * params.l**2) + params.m * params.g * params.l * (
        1.0 - np.cos(q)
    )


# ------------------------------------------------------------- cart-pole


@dataclass(frozen=True)
class CartPoleParams:
    m_c: float = 0.8
    m_p: float = 0.5
    l: float = 1.0
    g: float = 9.81


def cartpole_mass_matrix(q, params=CartPoleParams()):
    """M(q) for cart position and pole angle, shape (..., 2, 2)."""
    q = np.asarray(q, dtype=float)
    theta = q[..., 1]
    off = params.m_p * params.l * np.cos(theta)
    m11 = np.broadcast_to(params.m_c + params.m_p, theta.shape)
    m22 = np.broadcast_to(params.m_p * params.l**2, theta.shape)
    return np.stack(
        [np.stack([m11, off], axis=-1), np.stack([off, m22], axis=-1)], axis=-2
    )


def _solve_2x2(m, p):
    """(..., 2, 2) symmetric PD solve against (..., 2) via the adjugate."""
    a, b, c = m[..., 0, 0], m[..., 0, 1], m[..., 1, 1]
    det = a * c - b * b
    v1 = (c * p[..., 0] - b * p[..., 1]) / det
    v2 = (-b * p[..., 0] + a * p[..., 1]) / det
    return np.stack([v1, v2], axis=-1)


def cartpole_dynamics(x, params=CartPoleParams()):
    """Cart-pole field: qdot = M^{-1} p, pdot_k = 1/2 v^T dM/dq_k v - dU/dq_k."""
    x = np.asarray(x, dtype=float)
    q, p = x[..., :2], x[..., 2:]
    theta = q[..., 1]
    v = _solve_2x2(cartpole_mass_matrix(q, params), p)
    sin_t = np.sin(theta)
    ml = params.m_p * params.l
    # dM/dtheta has zero diagonal and -m_p l sin(theta) off-diagonal.
    pdot2 = -ml * sin_t * v[..., 0] * v[..., 1] + params.m_p * params.g * params.l * sin_t
    return np.stack([v[..., 0], v[..., 1], np.zeros_like(pdot2), pdot2], axis=-1)


def cartpole_hamiltonian(x, params=CartPoleParams()):
    x = np.asarray(x, dtype=float)
    q, p = x[..., :2], x[..., 2:]
    v = _solve_2x2(cartpole_mass_matrix(q, params), p)
    kinetic = 0.5 * np.einsum("...i,...i->...", p, v)
    return kinetic + params.m_p * params.g * params.l * np.cos(q[..., 1])


# ------------------------------------------------------------- two-link


@dataclass(frozen=True)
class TwoLinkParams:
    m1: float = 1.0
    m2: float = 1.0
    L1: float = 1.0
    L2: float = 2.0
    l1: float = 0.5
    l2: float = 1.0
    g: float = 9.81

    @property
    def I1(self):
        """Slender-rod inertia about the first link's center of mass."""
        return self.m1 * self.L1**2 / 12.0

    @property
    def I2(self):
        return self.m2 * self.L2**2 / 12.0


def twolink_mass_matrix(q, params=TwoLinkParams()):
    """M(q) for the two joint angles, shape (..., 2, 2)."""
    q = np.asarray(q, dtype=float)
    c2 = np.cos(q[..., 1])
    coupling = params.m2 * params.l2 * params.L1
    base = params.m2 * params.l2**2 + params.I2
    m11 = (
        params.m1 * params.l1**2
        + params.m2 * params.L1**2
        + base
        + params.I1
        + 2.0 * coupling * c2
    )
    m12 = base + coupling * c2
    m22 = np.broadcast_to(base, c2.shape)
    return np.stack(
        [np.stack([m11, m12], axis=-1), np.stack([m12, m22], axis=-1)], axis=-2
    )


def _twolink_du(q, params):
    s1 = np.sin(q[..., 0])
    s12 = np.sin(q[..., 0] + q[..., 1])
    du1 = params.g * ((params.m1 * params.l1 + params.m2 * params.L1) * s1 + params.m2 * params.l2 * s12)
    du2 = params.g * params.m2 * params.l2 * s12
    return du1, du2


def twolink_dynamics(x, params=TwoLinkParams()):
    x = np.asarray(x, dtype=float)
    q, p = x[..., :2], x[..., 2:]
    v = _solve_2x2(twolink_mass_matrix(q, params), p)
    s2 = np.sin(q[..., 1])
    coupling = params.m2 * params.l2 * params.L1
    du1, du2 = _twolink_du(q, params)
    # dM/dtheta2 = -coupling * s2 * [[2, 1], [1, 0]]
    pdot1 = -du1
    pdot2 = -coupling * s2 * (v[..., 0] ** 2 + v[..., 0] * v[..., 1]) - du2
    return np.stack([v[..., 0], v[..., 1], pdot1, pdot2], axis=-1)


def twolink_hamiltonian(x, params=TwoLinkParams()):
    x = np.asarray(x, dtype=float)
    q, p = x[..., :2], x[..., 2:]
    v = _solve_2x2(twolink_mass_matrix(q, params), p)
    kinetic = 0.5 * np.einsum("...i,...i->...", p, v)
    potential = params.g * (
        -(params.m1 * params.l1 + params.m2 * params.L1) * np.cos(q[..., 0])
        - params.m2 * params.l2 * np.cos(q[..., 0] + q[..., 1])
    )
    return kinetic + potential


# ------------------------------------------------------------- registry


@dataclass(frozen=True)
class System:
    """A benchmark system plus its reference experiment constants."""

    name: str
    dim: int
    params: object
    angle_indices: tuple
    train_ics: np.ndarray | None  # fixed training ICs, or None if sampled
    ic_box: tuple | None  # (lower, upper) for sampled ICs
    eval_box: tuple  # (lower, upper) for symmetry-error sampling
    test_ic: np.ndarray | None  # fixed test IC, or None if sampled
    train_t_end: float
    train_steps: int
    test_t_end: float
    test_steps: int
    _dynamics: callable = field(repr=False)
    _hamiltonian: callable = field(repr=False)

    def dynamics(self, x):
        """Vector field f(x); x may be (n,) or batched (..., n)."""
        return self._dynamics(x, self.params)

    def hamiltonian(self, x):
        """Total energy H(x); x may be (n,) or batched (..., n)."""
        return self._hamiltonian(x, self.params)


_PI = math.pi

_PENDULUM_TRAIN_ICS = np.array([[2 * _PI / 5, 0.0], [4 * _PI / 5, 0.0], [19 * _PI / 20, -4.0]])
_PENDULUM_TEST_IC = np.array([_PI / 2, 0.0])
_PENDULUM_EVAL_BOX = (np.array([-_PI, -8.0]), np.array([_PI, 8.0]))
_CARTPOLE_BOX = (np.array([-2.0, -_PI, -2.0, -2.0]), np.array([2.0, _PI, 2.0, 2.0]))
_TWOLINK_BOX = (np.array([-_PI, -_PI, -2.0, -2.0]), np.array([_PI, _PI, 2.0, 2.0]))

_REGISTRY = {
    "pendulum": dict(
        dim=2,
        params_cls=PendulumParams,
        angle_indices=(0,),
        train_ics=_PENDULUM_TRAIN_ICS,
        ic_box=None,
        eval_box=_PENDULUM_EVAL_BOX,
        test_ic=_PENDULUM_TEST_IC,
        train_t_end=0.7,
        train_steps=8,
        test_t_end=2.0,
        test_steps=21,
        dynamics=pendulum_dynamics,
        hamiltonian=pendulum_hamiltonian,
    ),
    "cartpole": dict(
        dim=4,
        params_cls=CartPoleParams,
        angle_indices=(1,),
        train_ics=None,
        ic_box=_CARTPOLE_BOX,
        eval_box=_CARTPOLE_BOX,
        test_ic=None,
        train_t_end=2.0,
        train_steps=30,
        test_t_end=2.0,
        test_steps=30,
        dynamics=cartpole_dynamics,
        hamiltonian=cartpole_hamiltonian,
    ),
    "twolink": dict(
        dim=4,
        params_cls=TwoLinkParams,
        angle_indices=(0, 1),
        train_ics=None,
        ic_box=_TWOLINK_BOX,
        eval_box=_TWOLINK_BOX,
        test_ic=None,
        train_t_end=2.0,
        train_steps=30,
        test_t_end=2.0,
        test_steps=30,
        dynamics=twolink_dynamics,
        hamiltonian=twolink_hamiltonian,
    ),
}


def get_system(name, params=None):
    """Look up a benchmark system, optionally overriding parameters.

    Parameters
    ----------
    name : str
        One of ``pendulum``, ``cartpole``, ``twolink``.
    params : dict, optional
        Field overrides for the system's parameter dataclass.
    """
    try:
        entry = _REGISTRY[name]
    except KeyError:
        raise InputError(f"unknown system {name!r}; expected one of {SYSTEM_NAMES}") from None
    defaults = entry["params_cls"]()
    if params:
        unknown = set(params) - {f for f in defaults.__dataclass_fields__}
        if unknown:
            raise InputError(f"unknown {name} parameters: {sorted(unknown)}")
        defaults = replace(defaults, **{k: float(v) for k, v in params.items()})
    return System(
        name=name,
        dim=entry["dim"],
        params=defaults,
        angle_indices=entry["angle_indices"],
        train_ics=entry["train_ics"],
        ic_box=entry["ic_box"],
        eval_box=entry["eval_box"],
        test_ic=entry["test_ic"],
        train_t_end=entry["train_t_end"],
        train_steps=entry["train_steps"],
        test_t_end=entry["test_t_end"],
        test_steps=entry["test_steps"],
        _dynamics=entry["dynamics"],
        _hamiltonian=entry["hamiltonian"],
    )


def wrap_angles(system, x):
    """Map the system's angle coordinates into (-pi, pi].

    Post-processing only: simulation and regression always work on the
    unwrapped states.
    """
    x = np.array(x, dtype=float, copy=True)
    for idx in system.angle_indices:
        x[..., idx] = _PI - np.mod(_PI - x[..., idx], 2.0 * _PI)
    return x
