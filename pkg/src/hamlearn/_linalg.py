"""Dense symmetric positive definite solves used by both regression paths.

Both the kernel ridge system and the feature-space normal equations are
SPD by construction, so Cholesky is the solver of choice.  Two guards
keep the contracts honest at extreme regularization values:

* if the factorization fails, a single jitter of 1e-10 * trace/dim is
  added to the diagonal and the factorization retried once;
* after the triangular solves, up to two steps of fixed-precision
  iterative refinement run whenever the relative residual is above the
  requested threshold (plain Cholesky can sit near eps * cond(A), which
  is not enough at lambda ~ 1e-8).
"""

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from .errors import NumericalError

__all__ = ["solve_spd"]

_JITTER_SCALE = 1e-10
_MAX_REFINE = 2


def solve_spd(mat, rhs, rel_residual=1e-10):
    """Solve mat @ x = rhs for SPD ``mat`` to a relative residual target.

    Parameters
    ----------
    mat : ndarray, shape (m, m)
        Symmetric positive (semi)definite matrix.  Modified copies are
        used internally; the argument itself is left untouched.
    rhs : ndarray, shape (m,) or (m, k)
    rel_residual : float
        Target for ||mat @ x - rhs|| / ||rhs||.  Refinement stops early
        once the target is met; a final miss is not an error (the caller
        asserts the post condition it needs), but non-finite values are.

    Returns
    -------
    x : ndarray, same trailing shape as rhs.
    """
    mat = np.asarray(mat, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise NumericalError(f"expected a square matrix, got shape {mat.shape}")

    try:
        factor = cho_factor(mat, lower=True, check_finite=False)
        work = mat
    except LinAlgError:
        # One-shot jitter, scaled to the matrix: raise the diagonal and retry.
        jitter = _JITTER_SCALE * np.trace(mat) / mat.shape[0]
        work = mat + jitter * np.eye(mat.shape[0])
        try:
            factor = cho_factor(work, lower=True, check_finite=False)
        except LinAlgError as exc:
            raise NumericalError(
                "Cholesky factorization failed even after adding "
                f"jitter {jitter:.3e}; matrix is not positive definite"
            ) from exc

    x = cho_solve(factor, rhs, check_finite=False)
    rhs_norm = np.linalg.norm(rhs)
    if rhs_norm == 0.0:
        return np.zeros_like(rhs)
    for _ in range(_MAX_REFINE):
        residual = rhs - work @ x
        if np.linalg.norm(residual) <= rel_residual * rhs_norm:
            break
        x = x + cho_solve(factor, residual, check_finite=False)
    if not np.all(np.isfinite(x)):
        raise NumericalError("SPD solve produced non-finite values")
    return x
