"""Random Fourier feature maps and feature-space ridge regression.

Each shift-invariant kernel family has a matrix-valued feature map built
from frequencies w_j ~ N(0, sigma^-2 I_n).  A map Psi: R^n -> R^{D x n}
approximates its kernel through K(x, z) ~= Psi(x)^T Psi(z); general maps
stack cosine and sine rows

    Psi(x) = 1/sqrt(d) [cos(w_j^T x) B(w_j)^T ; sin(w_j^T x) B(w_j)^T]

with B = I_n (separable), B = w (curl-free), or B = J w (symplectic).
Parity-restricted maps keep only the sine rows (odd) or cosine rows
(even), which makes every predicted field exactly odd or even.

Feature dimension D by family, with d frequency samples:

    gaussian_separable 2 d n      curl_free / symplectic   2 d
    odd/even_separable d n        odd/even_symplectic      d

Regression solves the normal equations

    (sum_i Psi(x_i) Psi(x_i)^T + N lambda I_D) alpha = sum_i Psi(x_i) y_i

and predicts f(x) = Psi(x)^T alpha.  For the symplectic maps the learned
Hamiltonian is available in closed form with f = J grad H.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._linalg import solve_spd
from .errors import InputError
from .kernels import KernelSpec, symplectic_matrix

__all__ = [
    "FEATURE_FAMILIES",
    "FeatureMap",
    "RffModel",
    "draw_frequencies",
    "make_map",
    "feature_family",
    "to_kernel_spec",
    "default_num_features",
    "eval_features",
    "rff_fit",
    "rff_predict",
    "rff_hamiltonian",
]

FEATURE_FAMILIES = (
    "gaussian_separable",
    "curl_free",
    "symplectic",
    "odd_symplectic",
    "even_symplectic",
    "odd_separable",
    "even_separable",
)

# (kernel family, parity) pairs realized by each feature family.
_FEATURE_TO_KERNEL = {
    "gaussian_separable": ("gaussian_separable", "none"),
    "curl_free": ("curl_free", "none"),
    "symplectic": ("symplectic", "none"),
    "odd_symplectic": ("symplectic", "odd"),
    "even_symplectic": ("symplectic", "even"),
    "odd_separable": ("gaussian_separable", "odd"),
    "even_separable": ("gaussian_separable", "even"),
}
_KERNEL_TO_FEATURE = {v: k for k, v in _FEATURE_TO_KERNEL.items()}

_SYMPLECTIC_FAMILIES = ("symplectic", "odd_symplectic", "even_symplectic")

# Frequency counts matching the reference experiments: equal coefficient
# budgets for the structured maps, half for the plain Gaussian map.
_DEFAULT_D_PER_DIM = {
    "gaussian_separable": 25,
    "curl_free": 100,
    "symplectic": 100,
    "odd_symplectic": 200,
    "even_symplectic": 200,
    "odd_separable": 50,
    "even_separable": 50,
}


def draw_frequencies(sigma, d, n, seed):
    """Draw d frequency vectors from N(0, sigma^-2 I_n), reproducibly.

    The standard normal block depends only on (seed, d, n), so sweeping
    sigma rescales a fixed draw; regenerating with the same arguments is
    bit-exact.
    """
    if not np.isfinite(sigma) or sigma <= 0:
        raise InputError(f"sigma must be positive and finite, got {sigma}")
    if d < 1:
        raise InputError(f"need at least one frequency, got d={d}")
    rng = np.random.default_rng(seed)
    return rng.standard_normal((int(d), int(n))) / float(sigma)


@dataclass(frozen=True)
class FeatureMap:
    """A realized feature map: family, bandwidth, and frequency matrix."""

    family: str
    sigma: float
    frequencies: np.ndarray  # (d, n)
    seed: int

    def __post_init__(self):
        if self.family not in FEATURE_FAMILIES:
            raise InputError(
                f"unknown feature family {self.family!r}; expected one of {FEATURE_FAMILIES}"
            )
        if not np.isfinite(self.sigma) or self.sigma <= 0:
            raise InputError(f"sigma must be positive and finite, got {self.sigma}")
        freq = np.asarray(self.frequencies, dtype=float)
        if freq.ndim != 2 or freq.shape[0] < 1:
            raise InputError(f"frequencies must be a (d, n) array, got shape {freq.shape}")
        if self.family in _SYMPLECTIC_FAMILIES and freq.shape[1] % 2 != 0:
            raise InputError(
                f"{self.family} features need even state dimension, got n={freq.shape[1]}"
            )
        object.__setattr__(self, "frequencies", freq)
        freq.setflags(write=False)

    @property
    def d(self):
        return self.frequencies.shape[0]

    @property
    def n(self):
        return self.frequencies.shape[1]

    @property
    def dim(self):
        """Feature dimension D."""
        d, n = self.frequencies.shape
        if self.family == "gaussian_separable":
            return 2 * d * n
        if self.family in ("curl_free", "symplectic"):
            return 2 * d
        if self.family in ("odd_separable", "even_separable"):
            return d * n
        return d  # odd/even symplectic

    def with_sigma(self, sigma):
        """Redraw the map at a new bandwidth from the stored seed."""
        return make_map(self.family, sigma, self.d, self.n, self.seed)


def make_map(family, sigma, d, n, seed):
    """Draw a FeatureMap with d frequencies on R^n."""
    return FeatureMap(
        family=family,
        sigma=float(sigma),
        frequencies=draw_frequencies(sigma, d, n, seed),
        seed=int(seed),
    )


def feature_family(kernel_family, parity="none"):
    """Feature family realizing a (kernel family, parity) combination."""
    try:
        return _KERNEL_TO_FEATURE[(kernel_family, parity)]
    except KeyError:
        raise InputError(
            f"no feature map for kernel family {kernel_family!r} with parity {parity!r}"
        ) from None


def to_kernel_spec(fmap):
    """Exact kernel approximated by a feature map."""
    family, parity = _FEATURE_TO_KERNEL[fmap.family]
    return KernelSpec(family=family, sigma=fmap.sigma, parity=parity)


def default_num_features(family, n):
    """Frequency count d used by the reference experiments at dimension n."""
    if family not in FEATURE_FAMILIES:
        raise InputError(f"unknown feature family {family!r}")
    return _DEFAULT_D_PER_DIM[family] * int(n)


def _trig_rows(fmap, x):
    """Stacked feature tensor (M, D, n) at states x (M, n)."""
    w = fmap.frequencies
    d, n = w.shape
    angles = x @ w.T  # (M, d)
    scale = 1.0 / np.sqrt(d)
    if fmap.family in ("gaussian_separable", "odd_separable", "even_separable"):
        eye = np.eye(n)
        if fmap.family == "gaussian_separable":
            trig = np.concatenate([np.cos(angles), np.sin(angles)], axis=1)
        elif fmap.family == "odd_separable":
            trig = np.sin(angles)
        else:
            trig = np.cos(angles)
        rows = trig[:, :, None, None] * eye[None, None, :, :]
        return scale * rows.reshape(x.shape[0], -1, n)
    if fmap.family == "curl_free":
        b = w
    else:
        b = w @ symplectic_matrix(n).T  # rows (J w_j)^T
    if fmap.family in ("curl_free", "symplectic"):
        rows = np.concatenate(
            [np.cos(angles)[:, :, None] * b[None], np.sin(angles)[:, :, None] * b[None]], axis=1
        )
    elif fmap.family == "odd_symplectic":
        rows = np.sin(angles)[:, :, None] * b[None]
    else:  # even_symplectic
        rows = np.cos(angles)[:, :, None] * b[None]
    return scale * rows


def _check_dim(fmap, x):
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != fmap.n:
        raise InputError(f"state dimension {x.shape[-1]} does not match map dimension {fmap.n}")
    return x


def eval_features(fmap, x):
    """Feature matrix Psi(x): (D, n) for a single state, (M, D, n) batched."""
    x = _check_dim(fmap, x)
    single = x.ndim == 1
    rows = _trig_rows(fmap, np.atleast_2d(x))
    return rows[0] if single else rows


@dataclass(frozen=True)
class RffModel:
    """Feature-space ridge model: f(x) = Psi(x)^T alpha."""

    fmap: FeatureMap
    alpha: np.ndarray  # (D,)
    lam: float
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        alpha = np.asarray(self.alpha, dtype=float)
        if alpha.shape != (self.fmap.dim,):
            raise InputError(
                f"alpha must have shape ({self.fmap.dim},) for this map, got {alpha.shape}"
            )
        object.__setattr__(self, "alpha", alpha)
        alpha.setflags(write=False)


def rff_fit(dataset, fmap, lam, meta=None):
    """Solve the feature-space normal equations on a dataset.

    Accumulates A = sum_i Psi(x_i) Psi(x_i)^T and b = sum_i Psi(x_i) y_i
    over fixed-order sample blocks, adds N lambda to the diagonal, and
    solves by Cholesky.
    """
    if not np.isfinite(lam) or lam <= 0:
        raise InputError(f"lambda must be positive and finite, got {lam}")
    x = np.asarray(dataset.x, dtype=float)
    y = np.asarray(dataset.y, dtype=float)
    if x.ndim != 2 or x.shape != y.shape:
        raise InputError(f"dataset arrays must share shape (N, n), got {x.shape} and {y.shape}")
    _check_dim(fmap, x)
    n_samples, n = x.shape
    dim = fmap.dim
    normal = np.zeros((dim, dim))
    rhs = np.zeros(dim)
    # Block size keeps the stacked tensor near 32 MB regardless of D.
    chunk = max(16, int(4_000_000 / (dim * n)))
    for start in range(0, n_samples, chunk):
        stop = min(start + chunk, n_samples)
        stacked = _trig_rows(fmap, x[start:stop]).transpose(1, 0, 2).reshape(dim, -1)
        normal += stacked @ stacked.T
        rhs += stacked @ y[start:stop].reshape(-1)
    normal[np.diag_indices_from(normal)] += n_samples * float(lam)
    alpha = solve_spd(normal, rhs)
    info = {"n_samples": n_samples}
    if meta:
        info.update(meta)
    return RffModel(fmap=fmap, alpha=alpha, lam=float(lam), meta=info)


def rff_predict(model, x):
    """Evaluate f(x) = Psi(x)^T alpha at one state (n,) or a batch (M, n)."""
    fmap = model.fmap
    x = _check_dim(fmap, x)
    single = x.ndim == 1
    pts = np.atleast_2d(x)
    w = fmap.frequencies
    d, n = w.shape
    angles = pts @ w.T
    scale = 1.0 / np.sqrt(d)
    alpha = model.alpha
    if fmap.family == "gaussian_separable":
        trig = np.concatenate([np.cos(angles), np.sin(angles)], axis=1)
        out = scale * trig @ alpha.reshape(2 * d, n)
    elif fmap.family == "odd_separable":
        out = scale * np.sin(angles) @ alpha.reshape(d, n)
    elif fmap.family == "even_separable":
        out = scale * np.cos(angles) @ alpha.reshape(d, n)
    else:
        b = w if fmap.family == "curl_free" else w @ symplectic_matrix(n).T
        if fmap.family in ("curl_free", "symplectic"):
            weights = np.cos(angles) * alpha[None, :d] + np.sin(angles) * alpha[None, d:]
        elif fmap.family == "odd_symplectic":
            weights = np.sin(angles) * alpha[None, :]
        else:  # even_symplectic
            weights = np.cos(angles) * alpha[None, :]
        out = scale * weights @ b
    return out[0] if single else out


def rff_hamiltonian(model, x):
    """Learned Hamiltonian of a symplectic feature model, f = J grad H.

    For the odd symplectic map H(x) = -1/sqrt(d) sum_j cos(w_j^T x) alpha_j;
    for the full symplectic map the cosine rows pair with +sin and the sine
    rows with -cos.  The sign convention makes J grad H reproduce the
    predicted field exactly (not its negative).  Defined up to a constant.
    """
    fmap = model.fmap
    if fmap.family not in ("odd_symplectic", "symplectic"):
        raise InputError(
            "learned Hamiltonian is only available for 'symplectic' and "
            f"'odd_symplectic' feature maps; got {fmap.family!r}"
        )
    x = _check_dim(fmap, x)
    single = x.ndim == 1
    pts = np.atleast_2d(x)
    d = fmap.d
    angles = pts @ fmap.frequencies.T
    scale = 1.0 / np.sqrt(d)
    if fmap.family == "odd_symplectic":
        h = -scale * (np.cos(angles) @ model.alpha)
    else:
        h = scale * (np.sin(angles) @ model.alpha[:d] - np.cos(angles) @ model.alpha[d:])
    return h[0] if single else h
