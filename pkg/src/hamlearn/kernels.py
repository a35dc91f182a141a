"""Operator-valued kernels and exact kernel ridge regression.

Three shift-invariant matrix-valued kernel families on R^n are provided,
each written K(x, z) = G(x - z) for an even matrix-valued signature G:

* ``gaussian_separable``   G(u) = k(u) I_n with the scalar Gaussian
  k(u) = exp(-||u||^2 / (2 sigma^2)).  No structural constraint.
* ``curl_free``            G(u) = -grad grad^T k(u)
                                 = k(u)/sigma^2 (I_n - u u^T / sigma^2).
  Every field in the induced space is a gradient field.
* ``symplectic``           G(u) = J G_c(u) J^T = G_c(J u) where G_c is the
  curl-free signature and J the canonical symplectic matrix.  Every field
  in the induced space is Hamiltonian: f = J grad H.

A parity transform encodes reflection symmetry on top of any family:

* ``odd``   K_o(x, z) = (K(x, z) - K(-x, z)) / 2, reproducing odd fields,
* ``even``  K_e(x, z) = (K(x, z) + K(-x, z)) / 2, reproducing even fields.

Regression solves the regularized least squares problem over N samples
(x_i, y_i) with y_i in R^n.  The representer theorem gives
f(x) = sum_i K(x, x_i) a_i where the stacked coefficients solve

    (K_tilde + N lambda I) a_tilde = y_tilde

with K_tilde the N n x N n block Gram matrix.  For the symplectic family
the learned Hamiltonian itself is recovered in closed form.

Example
-------
>>> spec = KernelSpec("symplectic", sigma=2.0, parity="odd")
>>> model = exact_fit(dataset, spec, lam=1e-6)
>>> f_hat = exact_predict(model, x)
>>> H_hat = exact_hamiltonian(model, x)
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from ._linalg import solve_spd
from .errors import InputError

__all__ = [
    "FAMILIES",
    "PARITIES",
    "KernelSpec",
    "ExactModel",
    "symplectic_matrix",
    "gaussian_scalar",
    "eval_kernel",
    "gram",
    "exact_fit",
    "exact_predict",
    "exact_hamiltonian",
]

FAMILIES = ("gaussian_separable", "curl_free", "symplectic")
PARITIES = ("none", "odd", "even")


def symplectic_matrix(n):
    """Canonical symplectic matrix J = [[0, I], [-I, 0]] of size n x n."""
    if n % 2 != 0 or n < 2:
        raise InputError(f"symplectic matrix needs even dimension, got n={n}")
    m = n // 2
    j = np.zeros((n, n))
    j[:m, m:] = np.eye(m)
    j[m:, :m] = -np.eye(m)
    return j


@dataclass(frozen=True)
class KernelSpec:
    """Kernel family, bandwidth, and parity transform.

    Attributes
    ----------
    family : str
        One of ``gaussian_separable``, ``curl_free``, ``symplectic``.
    sigma : float
        Gaussian bandwidth, strictly positive.
    parity : str
        ``none`` (default), ``odd``, or ``even``.
    """

    family: str
    sigma: float
    parity: str = "none"

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InputError(f"unknown kernel family {self.family!r}; expected one of {FAMILIES}")
        if self.parity not in PARITIES:
            raise InputError(f"unknown parity {self.parity!r}; expected one of {PARITIES}")
        if not np.isfinite(self.sigma) or self.sigma <= 0:
            raise InputError(f"sigma must be positive and finite, got {self.sigma}")

    def with_sigma(self, sigma):
        """Same family and parity at a different bandwidth."""
        return replace(self, sigma=float(sigma))


def gaussian_scalar(x, z, sigma):
    """Scalar Gaussian kernel exp(-||x - z||^2 / (2 sigma^2)).

    ``x`` and ``z`` broadcast against each other over leading axes; the
    last axis is the state dimension.
    """
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    diff = x - z
    sq = np.einsum("...i,...i->...", diff, diff)
    return np.exp(-sq / (2.0 * float(sigma) ** 2))


def _radial_signature(v, sigma):
    """Core matrix factor k(v)/sigma^2 (I - v v^T / sigma^2) for stacked v."""
    s2 = float(sigma) ** 2
    sq = np.einsum("...i,...i->...", v, v)
    scale = np.exp(-sq / (2.0 * s2)) / s2
    n = v.shape[-1]
    outer = v[..., :, None] * v[..., None, :]
    return scale[..., None, None] * (np.eye(n) - outer / s2)


def _signature(family, u, sigma):
    """Even signature G(u) of a family, for stacked displacements u (..., n)."""
    if family == "gaussian_separable":
        s2 = float(sigma) ** 2
        sq = np.einsum("...i,...i->...", u, u)
        k = np.exp(-sq / (2.0 * s2))
        return k[..., None, None] * np.eye(u.shape[-1])
    if family == "curl_free":
        return _radial_signature(u, sigma)
    if family == "symplectic":
        j = symplectic_matrix(u.shape[-1])
        return _radial_signature(u @ j.T, sigma)
    raise InputError(f"unknown kernel family {family!r}")


def _check_states(x, z):
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    if x.shape[-1] != z.shape[-1]:
        raise InputError(f"state dimensions differ: {x.shape[-1]} vs {z.shape[-1]}")
    return x, z


def eval_kernel(spec, x, z):
    """Evaluate the n x n kernel block K(x, z).

    Parameters
    ----------
    spec : KernelSpec
    x, z : ndarray, shape (n,)

    Returns
    -------
    ndarray, shape (n, n)
    """
    x, z = _check_states(x, z)
    base = _signature(spec.family, x - z, spec.sigma)
    if spec.parity == "none":
        return base
    # K(-x, z) = G(-x - z) = G(x + z) since G is even.
    mirror = _signature(spec.family, x + z, spec.sigma)
    if spec.parity == "odd":
        return 0.5 * (base - mirror)
    return 0.5 * (base + mirror)


def gram(spec, points):
    """Assemble the N n x N n block Gram matrix over N points.

    Block (i, j) of size n x n equals ``eval_kernel(spec, x_i, x_j)``.
    """
    points = np.asarray(points, dtype=float)
    if points.ndim != 2:
        raise InputError(f"points must be a 2-D array, got shape {points.shape}")
    n_pts, dim = points.shape
    diff = points[:, None, :] - points[None, :, :]
    blocks = _signature(spec.family, diff, spec.sigma)
    if spec.parity != "none":
        total = points[:, None, :] + points[None, :, :]
        mirror = _signature(spec.family, total, spec.sigma)
        blocks = 0.5 * (blocks - mirror) if spec.parity == "odd" else 0.5 * (blocks + mirror)
    return blocks.transpose(0, 2, 1, 3).reshape(n_pts * dim, n_pts * dim)


@dataclass(frozen=True)
class ExactModel:
    """Kernel regression model: training points and per-point coefficients.

    The field is f(x) = sum_i K(x, points[i]) coef[i].
    """

    spec: KernelSpec
    points: np.ndarray  # (N, n)
    coef: np.ndarray  # (N, n)

    def __post_init__(self):
        self.points.setflags(write=False)
        self.coef.setflags(write=False)


def exact_fit(dataset, spec, lam):
    """Fit the kernel ridge model on a dataset.

    Solves (K_tilde + N lambda I) a_tilde = y_tilde via Cholesky and
    returns the model holding per-point coefficient vectors a_i.

    Parameters
    ----------
    dataset : object with ``x`` (N, n) states and ``y`` (N, n) derivatives.
    spec : KernelSpec
    lam : float
        Ridge weight, strictly positive.
    """
    if not np.isfinite(lam) or lam <= 0:
        raise InputError(f"lambda must be positive and finite, got {lam}")
    x = np.asarray(dataset.x, dtype=float)
    y = np.asarray(dataset.y, dtype=float)
    if x.ndim != 2 or x.shape != y.shape:
        raise InputError(f"dataset arrays must share shape (N, n), got {x.shape} and {y.shape}")
    n_samples, dim = x.shape
    if spec.family == "symplectic" and dim % 2 != 0:
        raise InputError(f"symplectic kernel needs even state dimension, got n={dim}")
    k_tilde = gram(spec, x)
    k_tilde[np.diag_indices_from(k_tilde)] += n_samples * float(lam)
    a_tilde = solve_spd(k_tilde, y.reshape(-1))
    return ExactModel(spec=spec, points=x.copy(), coef=a_tilde.reshape(n_samples, dim))


def _cross_blocks(spec, x, points):
    """Kernel blocks K(x_m, p_i) for a batch of query states, (M, N, n, n)."""
    diff = x[:, None, :] - points[None, :, :]
    blocks = _signature(spec.family, diff, spec.sigma)
    if spec.parity != "none":
        total = x[:, None, :] + points[None, :, :]
        mirror = _signature(spec.family, total, spec.sigma)
        blocks = 0.5 * (blocks - mirror) if spec.parity == "odd" else 0.5 * (blocks + mirror)
    return blocks


def exact_predict(model, x):
    """Evaluate the learned field f(x) = sum_i K(x, x_i) a_i.

    ``x`` may be a single state (n,) or a batch (M, n); the result has
    the same leading shape.
    """
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    pts = np.atleast_2d(x)
    if pts.shape[1] != model.points.shape[1]:
        raise InputError(
            f"state dimension {pts.shape[1]} does not match model dimension {model.points.shape[1]}"
        )
    blocks = _cross_blocks(model.spec, pts, model.points)
    out = np.einsum("mnij,nj->mi", blocks, model.coef)
    return out[0] if single else out


def exact_hamiltonian(model, x):
    """Closed-form learned Hamiltonian of a symplectic-family model.

    With c_i = J^T a_i the fitted field satisfies f = J grad H for

        H(x) = sum_i k(x, x_i) (x - x_i)^T c_i / sigma^2

    and the odd parity variant antisymmetrizes the kernel, giving

        H(x) = sum_i [k(x, x_i) (x - x_i)^T - k(-x, x_i) (x + x_i)^T] c_i
               / (2 sigma^2),

    which is an even function.  Only defined up to an additive constant.
    """
    if model.spec.family != "symplectic" or model.spec.parity == "even":
        raise InputError(
            "learned Hamiltonian is only available for symplectic-family "
            f"models with parity 'none' or 'odd'; got family={model.spec.family!r}, "
            f"parity={model.spec.parity!r}"
        )
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    pts = np.atleast_2d(x)
    dim = model.points.shape[1]
    if pts.shape[1] != dim:
        raise InputError(f"state dimension {pts.shape[1]} does not match model dimension {dim}")
    j = symplectic_matrix(dim)
    c = model.coef @ j  # rows c_i = J^T a_i
    s2 = model.spec.sigma ** 2
    diff = pts[:, None, :] - model.points[None, :, :]
    k_diff = np.exp(-np.einsum("mni,mni->mn", diff, diff) / (2.0 * s2))
    h = np.einsum("mn,mni,ni->m", k_diff, diff, c) / s2
    if model.spec.parity == "odd":
        total = pts[:, None, :] + model.points[None, :, :]
        k_tot = np.exp(-np.einsum("mni,mni->mn", total, total) / (2.0 * s2))
        h = 0.5 * (h - np.einsum("mn,mni,ni->m", k_tot, total, c) / s2)
    return h[0] if single else h
