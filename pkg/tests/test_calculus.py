import numpy as np
import pytest
from hypothesis import given, strategies as st

from strainspace.calculus import (
    antisym_to_vector,
    asym_grad,
    curl,
    div,
    div2,
    div_matrix,
    grad,
    heat,
    hessian,
    inv_lap,
    laplacian,
    outer,
    project_df,
    scalar_times_identity,
    sym_grad,
    vector_to_antisym,
)
from strainspace.errors import UsageError
from strainspace.spectral import PHYSICAL, ScalarField, make_grid, random_field

seeds = st.integers(0, 2**31 - 1)


@given(seeds)
def test_div_curl_is_zero(seed):
    g = make_grid(3, 16)
    a = random_field(g, "vector", 1.0, seed)
    c = curl(a)
    assert div(c).norm() <= 1e-12 * c.norm() * 2 * np.pi * g.n


@given(seeds)
def test_curl_grad_is_zero(seed):
    g = make_grid(3, 16)
    f = random_field(g, "scalar", 1.0, seed)
    assert curl(grad(f)).norm() <= 1e-12 * grad(f).norm() * 2 * np.pi * g.n


def test_hessian_is_grad_grad(g3):
    f = random_field(g3, "scalar", 1.0, 3)
    H = hessian(f).full()
    gf = grad(f)
    for j in range(3):
        assert np.allclose(H[:, j], grad(ScalarField(g3, gf.rep, gf.data[j : j + 1])).data, atol=1e-10)


def test_sym_and_asym_gradients_add_to_gradient(g3):
    u = random_field(g3, "vector", 1.0, 4).spectral()
    G = np.stack([grad(ScalarField(g3, u.rep, u.data[j : j + 1])).data for j in range(3)], axis=1)
    assert np.allclose(sym_grad(u).full() + asym_grad(u).full(), G)


def test_matrix_divergence_of_identity_times_scalar(g3):
    f = random_field(g3, "scalar", 1.0, 5)
    assert (div_matrix(scalar_times_identity(f)) - grad(f)).norm() < 1e-12 * grad(f).norm()


def test_div2_of_hessian_is_bilaplacian(g3):
    f = random_field(g3, "scalar", 1.0, 6)
    assert (div2(hessian(f)) - laplacian(laplacian(f))).norm() < 1e-12 * laplacian(laplacian(f)).norm()


@given(seeds)
def test_leray_projection(seed):
    g = make_grid(3, 16)
    u = random_field(g, "vector", 1.0, seed)
    p = project_df(u)
    assert (project_df(p) - p).norm() < 1e-14 * u.norm()
    assert div(p).norm() < 1e-12 * u.norm() * 2 * np.pi * g.n
    assert abs((u.spectral() - p).inner(p)) < 1e-12 * u.norm_sq()


def test_heat_decays_single_mode(g3):
    data = np.sin(2 * np.pi * g3.coords(1)) * np.ones(g3.shape)
    f = ScalarField(g3, PHYSICAL, data[None].astype(complex))
    out = heat(f, 0.01, 2.0).physical()
    assert np.allclose(out.data, f.data * np.exp(-2.0 * 4 * np.pi**2 * 0.01))


def test_vector_antisym_correspondence(g3, rng):
    w = random_field(g3, "vector", 1.0, 7)
    A = vector_to_antisym(w)
    assert np.array_equal(antisym_to_vector(A).data, w.data)
    v = rng.standard_normal(3)
    full = A.full()[:, :, 1, 2, 3].real
    ww = w.data[:, 1, 2, 3].real
    assert np.allclose(full @ v, np.cross(v, ww))


def test_outer_is_pointwise(g3):
    u = random_field(g3, "vector", 1.0, 8)
    M = outer(u).full()
    assert np.allclose(M[0, 1], u.data[0] * u.data[1])
    assert outer(u).rep == PHYSICAL


def test_inverse_laplacian_inverts_laplacian(g3):
    f = random_field(g3, "scalar", 1.0, 9).spectral()
    data = f.data.copy()
    data[:, g3.null_mask] = 0
    f = f.with_data(data)
    assert (inv_lap(laplacian(f) * -1.0) - f).norm() < 1e-12 * f.norm()


def test_curl_needs_three_dimensions():
    g = make_grid(2, 8)
    with pytest.raises(UsageError):
        curl(random_field(g, "vector", 1.0, 0))
