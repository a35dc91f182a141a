"""Kernel identities checked against closed forms and finite-difference oracles."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hamlearn._linalg import solve_spd
from hamlearn.errors import InputError, NumericalError
from hamlearn.kernels import (
    FAMILIES,
    PARITIES,
    KernelSpec,
    eval_kernel,
    exact_fit,
    exact_hamiltonian,
    exact_predict,
    gaussian_scalar,
    gram,
    symplectic_matrix,
)


class ArrayData:
    """Minimal (x, y) container standing in for sim.Dataset."""

    def __init__(self, x, y):
        self.x = np.asarray(x, dtype=float)
        self.y = np.asarray(y, dtype=float)


# ---------------------------------------------------------------- oracles


def fd_gradient(f, x, h=1e-6):
    """Central-difference gradient of a scalar function."""
    x = np.asarray(x, dtype=float)
    grad = np.zeros_like(x)
    for i in range(x.size):
        step = np.zeros_like(x)
        step[i] = h
        grad[i] = (f(x + step) - f(x - step)) / (2.0 * h)
    return grad


def fd_hessian(f, x, h=1e-4):
    """Central-difference Hessian of a scalar function."""
    x = np.asarray(x, dtype=float)
    n = x.size
    hess = np.zeros((n, n))
    for i in range(n):
        ei = np.zeros(n)
        ei[i] = h
        for k in range(n):
            ek = np.zeros(n)
            ek[k] = h
            hess[i, k] = (
                f(x + ei + ek) - f(x + ei - ek) - f(x - ei + ek) + f(x - ei - ek)
            ) / (4.0 * h * h)
    return hess


def pendulum_field(x):
    """Odd Hamiltonian reference field used to build small fit problems."""
    x = np.atleast_2d(x)
    return np.stack([x[:, 1], -9.81 * np.sin(x[:, 0])], axis=1)


def make_dataset(n_samples=30, seed=0, noise=0.0):
    rng = np.random.default_rng(seed)
    x = rng.uniform([-3.0, -4.0], [3.0, 4.0], size=(n_samples, 2))
    y = pendulum_field(x)
    if noise:
        y = y + noise * rng.standard_normal(y.shape)
    return ArrayData(x, y)


@st.composite
def state_pairs(draw):
    n = draw(st.sampled_from([2, 4]))
    vals = draw(
        st.lists(
            st.floats(-3.0, 3.0, allow_nan=False, allow_infinity=False),
            min_size=2 * n,
            max_size=2 * n,
        )
    )
    arr = np.asarray(vals)
    return arr[:n], arr[n:]


ALL_SPECS = [(fam, par) for fam in FAMILIES for par in PARITIES]


# ---------------------------------------------------------- closed forms


def test_gaussian_scalar_at_unit_distance():
    # ||x - z|| = sigma gives exp(-1/2) for any sigma
    for sigma in (0.5, 1.0, 3.0):
        x = np.array([1.0 + sigma, 2.0])
        z = np.array([1.0, 2.0])
        assert gaussian_scalar(x, z, sigma) == pytest.approx(np.exp(-0.5), rel=1e-15)


def test_gaussian_scalar_broadcasts():
    x = np.zeros((5, 2))
    z = np.ones(2)
    vals = gaussian_scalar(x, z, 1.0)
    assert vals.shape == (5,)
    assert np.allclose(vals, np.exp(-1.0))


def test_curl_free_diagonal_at_x_equals_z():
    spec = KernelSpec("curl_free", sigma=2.0)
    x = np.array([0.7, -1.3])
    assert np.allclose(eval_kernel(spec, x, x), np.eye(2) / 4.0, atol=1e-15)


def test_symplectic_identity_at_x_equals_z():
    # J (I/sigma^2) J^T = I at sigma = 1
    spec = KernelSpec("symplectic", sigma=1.0)
    x = np.array([1.1, 0.4])
    assert np.allclose(eval_kernel(spec, x, x), np.eye(2), atol=1e-15)


def test_curl_free_is_negative_hessian_of_gaussian():
    sigma = 1.3
    x = np.array([0.4, -0.9])
    z = np.array([-0.2, 0.5])
    block = eval_kernel(KernelSpec("curl_free", sigma=sigma), x, z)
    oracle = -fd_hessian(lambda u: gaussian_scalar(u, np.zeros(2), sigma), x - z)
    assert np.allclose(block, oracle, atol=1e-6)


def test_symplectic_equals_conjugated_curl_free_exactly():
    j = symplectic_matrix(4)
    rng = np.random.default_rng(3)
    for parity in PARITIES:
        for _ in range(5):
            x, z = rng.uniform(-2, 2, size=(2, 4))
            ks = eval_kernel(KernelSpec("symplectic", 1.7, parity), x, z)
            kc = eval_kernel(KernelSpec("curl_free", 1.7, parity), x, z)
            assert np.array_equal(ks, j @ kc @ j.T)


# ------------------------------------------------------------ invariants


@pytest.mark.parametrize("family,parity", ALL_SPECS)
@settings(max_examples=40, deadline=None)
@given(pair=state_pairs())
def test_kernel_symmetry(family, parity, pair):
    x, z = pair
    spec = KernelSpec(family, sigma=1.4, parity=parity)
    left = eval_kernel(spec, x, z)
    right = eval_kernel(spec, z, x).T
    assert np.allclose(left, right, atol=1e-12)


@pytest.mark.parametrize("family", FAMILIES)
@settings(max_examples=40, deadline=None)
@given(pair=state_pairs())
def test_parity_reflection_identities(family, pair):
    x, z = pair
    odd = KernelSpec(family, sigma=1.1, parity="odd")
    even = KernelSpec(family, sigma=1.1, parity="even")
    assert np.allclose(eval_kernel(odd, -x, z), -eval_kernel(odd, x, z), atol=1e-12)
    assert np.allclose(eval_kernel(even, -x, z), eval_kernel(even, x, z), atol=1e-12)


@pytest.mark.parametrize("family", FAMILIES)
@settings(max_examples=40, deadline=None)
@given(pair=state_pairs())
def test_parity_parts_sum_to_full_kernel(family, pair):
    x, z = pair
    full = eval_kernel(KernelSpec(family, 1.6), x, z)
    odd = eval_kernel(KernelSpec(family, 1.6, "odd"), x, z)
    even = eval_kernel(KernelSpec(family, 1.6, "even"), x, z)
    assert np.allclose(odd + even, full, atol=1e-14)


@pytest.mark.parametrize("family,parity", ALL_SPECS)
@pytest.mark.parametrize("seed", [0, 1, 2])
def test_gram_positive_semidefinite(family, parity, seed):
    rng = np.random.default_rng(seed)
    n = 4 if seed % 2 else 2
    pts = rng.uniform(-2, 2, size=(rng.integers(2, 9), n))
    spec = KernelSpec(family, sigma=float(rng.uniform(0.5, 3.0)), parity=parity)
    eigs = np.linalg.eigvalsh(gram(spec, pts))
    assert eigs.min() >= -1e-8


@pytest.mark.parametrize("family,parity", ALL_SPECS)
def test_gram_blocks_match_eval_kernel(family, parity):
    rng = np.random.default_rng(7)
    pts = rng.uniform(-2, 2, size=(3, 2))
    spec = KernelSpec(family, sigma=1.2, parity=parity)
    big = gram(spec, pts)
    assert big.shape == (6, 6)
    for i in range(3):
        for k in range(3):
            block = big[2 * i : 2 * i + 2, 2 * k : 2 * k + 2]
            assert np.allclose(block, eval_kernel(spec, pts[i], pts[k]), atol=1e-15)


def test_gram_odd_kernel_on_mirrored_pair():
    x = np.array([0.9, -0.4])
    pts = np.stack([x, -x])
    spec = KernelSpec("symplectic", sigma=1.0, parity="odd")
    big = gram(spec, pts)
    b11 = big[:2, :2]
    assert np.allclose(big[2:, :2], -b11, atol=1e-15)
    assert np.allclose(big[:2, 2:], -b11, atol=1e-15)


# -------------------------------------------------------------- regression


def test_exact_fit_single_sample_closed_form():
    # K(x, x) = I for gaussian_separable, so (1 + lambda) a = y
    x = np.array([[0.3, -1.0]])
    y = np.array([[2.0, -4.0]])
    lam = 0.25
    model = exact_fit(ArrayData(x, y), KernelSpec("gaussian_separable", 1.0), lam)
    assert np.allclose(model.coef, y / (1.0 + lam), atol=1e-14)


@pytest.mark.parametrize("lam", [1e-6, 1e-8])
def test_exact_fit_residual_within_contract(lam):
    data = make_dataset(n_samples=30, seed=1, noise=0.01)
    spec = KernelSpec("symplectic", sigma=1.5, parity="odd")
    model = exact_fit(data, spec, lam)
    k_tilde = gram(spec, data.x)
    k_tilde[np.diag_indices_from(k_tilde)] += data.x.shape[0] * lam
    y_tilde = data.y.reshape(-1)
    residual = np.linalg.norm(k_tilde @ model.coef.reshape(-1) - y_tilde)
    assert residual <= 1e-10 * np.linalg.norm(y_tilde)


def test_exact_fit_minimizes_ridge_objective():
    data = make_dataset(n_samples=20, seed=2, noise=0.05)
    spec = KernelSpec("curl_free", sigma=1.2)
    lam = 1e-4
    model = exact_fit(data, spec, lam)
    k_tilde = gram(spec, data.x)
    y_tilde = data.y.reshape(-1)
    a_tilde = model.coef.reshape(-1)

    def objective(a):
        fit = k_tilde @ a
        return np.sum((fit - y_tilde) ** 2) / data.x.shape[0] + lam * a @ k_tilde @ a

    base = objective(a_tilde)
    rng = np.random.default_rng(11)
    for _ in range(5):
        delta = rng.standard_normal(a_tilde.size)
        delta *= 1e-3 / np.linalg.norm(delta)
        assert objective(a_tilde + delta) > base


def test_exact_predict_zero_coefficients_gives_zero_field():
    data = make_dataset(n_samples=5, seed=3)
    spec = KernelSpec("gaussian_separable", 1.0)
    model = exact_fit(data, spec, 1e-4)
    from hamlearn.kernels import ExactModel

    zero = ExactModel(spec=spec, points=data.x.copy(), coef=np.zeros_like(data.x))
    assert np.array_equal(exact_predict(zero, np.array([0.5, 0.5])), np.zeros(2))


def test_exact_predict_batch_matches_single():
    data = make_dataset(n_samples=12, seed=4)
    model = exact_fit(data, KernelSpec("symplectic", 1.5, "odd"), 1e-6)
    rng = np.random.default_rng(5)
    queries = rng.uniform(-2, 2, size=(6, 2))
    batch = exact_predict(model, queries)
    for i, q in enumerate(queries):
        assert np.allclose(batch[i], exact_predict(model, q), atol=1e-15)


@pytest.mark.parametrize("parity", ["none", "odd"])
def test_exact_hamiltonian_generates_the_field(parity):
    data = make_dataset(n_samples=25, seed=6, noise=0.01)
    model = exact_fit(data, KernelSpec("symplectic", 1.5, parity), 1e-6)
    j = symplectic_matrix(2)
    rng = np.random.default_rng(8)
    for _ in range(20):
        x = rng.uniform(-2.5, 2.5, size=2)
        lhs = j @ fd_gradient(lambda u: exact_hamiltonian(model, u), x)
        rhs = exact_predict(model, x)
        assert np.allclose(lhs, rhs, atol=1e-6)


def test_exact_hamiltonian_odd_model_is_even_function():
    data = make_dataset(n_samples=20, seed=9, noise=0.01)
    model = exact_fit(data, KernelSpec("symplectic", 1.3, "odd"), 1e-5)
    rng = np.random.default_rng(10)
    pts = rng.uniform(-2, 2, size=(15, 2))
    assert np.allclose(exact_hamiltonian(model, pts), exact_hamiltonian(model, -pts), atol=1e-12)


def test_exact_hamiltonian_batch_matches_single():
    data = make_dataset(n_samples=10, seed=12)
    model = exact_fit(data, KernelSpec("symplectic", 1.4, "odd"), 1e-6)
    queries = np.random.default_rng(13).uniform(-2, 2, size=(4, 2))
    batch = exact_hamiltonian(model, queries)
    for i, q in enumerate(queries):
        assert batch[i] == pytest.approx(exact_hamiltonian(model, q), abs=1e-14)


# ------------------------------------------------------------------ errors


def test_kernel_spec_validation():
    with pytest.raises(InputError):
        KernelSpec("gaussian", 1.0)
    with pytest.raises(InputError):
        KernelSpec("symplectic", -2.0)
    with pytest.raises(InputError):
        KernelSpec("symplectic", 1.0, parity="mirror")


def test_dimension_mismatch_raises():
    spec = KernelSpec("gaussian_separable", 1.0)
    with pytest.raises(InputError):
        eval_kernel(spec, np.zeros(2), np.zeros(4))


def test_symplectic_needs_even_dimension():
    with pytest.raises(InputError):
        symplectic_matrix(3)
    data = ArrayData(np.zeros((2, 3)), np.ones((2, 3)))
    with pytest.raises(InputError):
        exact_fit(data, KernelSpec("symplectic", 1.0), 1e-4)


def test_hamiltonian_unsupported_for_unstructured_models():
    data = make_dataset(n_samples=5, seed=14)
    for spec in (KernelSpec("gaussian_separable", 1.0), KernelSpec("curl_free", 1.0)):
        model = exact_fit(data, spec, 1e-4)
        with pytest.raises(InputError):
            exact_hamiltonian(model, np.zeros(2))
    even = exact_fit(data, KernelSpec("symplectic", 1.0, "even"), 1e-4)
    with pytest.raises(InputError):
        exact_hamiltonian(even, np.zeros(2))


def test_nonpositive_lambda_raises():
    data = make_dataset(n_samples=4, seed=15)
    with pytest.raises(InputError):
        exact_fit(data, KernelSpec("gaussian_separable", 1.0), 0.0)


# -------------------------------------------------------------- SPD solver


def test_solve_spd_applies_jitter_to_singular_matrix():
    mat = np.diag([1.0, 1.0, 0.0])
    rhs = np.array([1.0, 2.0, 0.0])
    x = solve_spd(mat, rhs)
    assert np.all(np.isfinite(x))
    assert np.allclose(mat @ x, rhs, atol=1e-6)


def test_solve_spd_rejects_indefinite_matrix():
    mat = np.diag([1.0, -1.0, 1.0])
    with pytest.raises(NumericalError):
        solve_spd(mat, np.ones(3))


def test_solve_spd_zero_rhs():
    assert np.array_equal(solve_spd(np.eye(3), np.zeros(3)), np.zeros(3))
