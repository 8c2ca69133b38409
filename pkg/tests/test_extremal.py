import numpy as np
import pytest
from hypothesis import given, strategies as st

from strainspace import extremal as ex
from strainspace.calculus import sym_grad, inv_lap
from strainspace.decomp import project_st
from strainspace.errors import ConfigurationError, PreconditionError, ResolutionError
from strainspace.identities import check_strain_characterization
from strainspace.spectral import PHYSICAL, SPECTRAL, ScalarField, VectorField, make_grid, random_field

seeds = st.integers(0, 2**31 - 1)
E3 = np.array([0.0, 0.0, 1.0])


@pytest.fixture(scope="module")
def g32():
    return make_grid(3, 32)


def positive_amplitude(grid, seed):
    lam = np.abs(random_field(grid, "scalar", 1.0, seed).data[0].real)
    return ScalarField(grid, PHYSICAL, lam[None].astype(complex))


def random_directions(grid, seed):
    v = np.random.default_rng(seed).standard_normal((3, *grid.shape))
    return VectorField(grid, PHYSICAL, (v / np.linalg.norm(v, axis=0)).astype(complex))


def test_assemble_constant(g3):
    lam = ScalarField(g3, PHYSICAL, np.full((1, *g3.shape), np.sqrt(6), dtype=complex))
    M = ex.assemble_maxmid(ex.MaxMidField(lam, ex.constant_direction(g3, E3))).full()
    assert np.allclose(M[:, :, 2, 3, 4], np.diag([1.0, 1.0, -2.0]), atol=1e-14)


def test_assemble_zero(g3):
    mm = ex.MaxMidField(ScalarField.zeros(g3), ex.constant_direction(g3, E3))
    assert ex.assemble_maxmid(mm).norm() == 0.0


@given(seeds)
def test_assembled_field_structure(seed):
    g = make_grid(3, 8)
    mm = ex.MaxMidField(positive_amplitude(g, seed), random_directions(g, seed))
    M = ex.assemble_maxmid(mm)
    assert abs(M.norm() - mm.lam.norm()) < 1e-10 * mm.lam.norm()
    assert M.trace().norm() < 1e-12 * M.norm()
    ef = ex.eigen_decompose_field(M)
    lam = mm.lam.data[0].real / np.sqrt(6)
    assert np.allclose(ef.values, np.stack([-2 * lam, lam, lam]), atol=1e-12)


def test_invalid_maxmid_rejected(g3):
    lam = ScalarField(g3, PHYSICAL, -np.ones((1, *g3.shape), dtype=complex))
    with pytest.raises(PreconditionError):
        ex.assemble_maxmid(ex.MaxMidField(lam, ex.constant_direction(g3, E3)))
    v = VectorField(g3, PHYSICAL, 2 * np.ones((3, *g3.shape), dtype=complex))
    with pytest.raises(PreconditionError):
        ex.assemble_maxmid(ex.MaxMidField(positive_amplitude(g3, 0), v))


@given(seeds)
def test_eigen_reconstruction(seed):
    S = random_field(make_grid(3, 8), "symmatrix", 1.0, seed)
    ef = ex.eigen_decompose_field(S)
    assert np.all(np.diff(ef.values, axis=0) >= 0)
    full = S.physical().full().real
    assert np.abs(ef.reconstruct() - full).max() < 1e-10 * np.abs(full).max()


def test_eigen_simple_cases(g3):
    from strainspace.spectral import SymMatrixField

    full = np.broadcast_to(np.diag([1.0, -2.0, 1.0])[:, :, None, None, None], (3, 3, *g3.shape))
    ef = ex.eigen_decompose_field(SymMatrixField.from_full(g3, PHYSICAL, full.astype(complex)))
    assert np.allclose(ef.values[:, 0, 0, 0], [-2, 1, 1])
    frame = ef.vectors[0, 0, 0]
    assert np.allclose(frame.T @ frame, np.eye(3))
    ez = ex.eigen_decompose_field(SymMatrixField.zeros(g3))
    assert np.all(ez.values == 0)
    assert np.allclose(ez.vectors[1, 2, 3].T @ ez.vectors[1, 2, 3], np.eye(3))


def test_eigenvalues_rotate_with_field(g3):
    from strainspace.identities import rotate_field

    S = random_field(g3, "symmatrix", 1.0, 3)
    Q = np.array([[0, 0, 1], [1, 0, 0], [0, 1, 0]])
    a = ex.eigen_decompose_field(S).values
    b = ex.eigen_decompose_field(rotate_field(S, Q)).values
    i = np.array([1, 4, 6])
    j = Q @ i % g3.n
    assert np.allclose(b[:, i[0], i[1], i[2]], a[:, j[0], j[1], j[2]], atol=1e-12)


@given(seeds, st.sampled_from([8, 16]))
def test_fixed_direction_upper_bound(seed, n):
    g = make_grid(3, n)
    v = np.random.default_rng(seed).standard_normal(3)
    assert ex.fixed_direction_value(random_field(g, "scalar", 0.0, seed), v) <= 0.75 + 1e-10


def test_fixed_direction_mode_values(g3):
    per_mode = ex.fixed_direction_mode_value(g3, E3)
    assert per_mode.max() <= 0.75 + 1e-15
    assert per_mode[0, 0, 0] == 0.0


def test_fixed_direction_rejects_zero(g3):
    with pytest.raises(PreconditionError):
        ex.fixed_direction_value(ScalarField.zeros(g3), E3)


@pytest.mark.parametrize("eps", [0.05, 0.1, 0.2])
def test_shell_near_maximizer(g32, eps):
    mm = ex.near_maximizer(g32, eps, "shell")
    value = ex.maxmid_objective(mm)
    assert value > 0.75 * (1 - eps) ** 2
    assert value <= 0.75 + 1e-10
    lam_hat = mm.lam.spectral().data[0]
    c2 = np.stack(g32.xi_hat)[2] ** 2
    support = np.abs(lam_hat) > 1e-12 * np.abs(lam_hat).max()
    assert np.all(np.abs(c2[support] - 0.5) < eps / 2)


def test_wide_shell_still_bounded(g3):
    assert ex.maxmid_objective(ex.near_maximizer(g3, 0.99, "shell")) <= 0.75 + 1e-10


def test_shell_on_other_axis(g32):
    assert ex.maxmid_objective(ex.near_maximizer(g32, 0.1, "shell", v_axis=[1, 0, 0])) > 0.6075


def test_empty_shell_names_resolution():
    with pytest.raises(ResolutionError) as err:
        ex.near_maximizer(make_grid(3, 8), 0.001, "shell", v_axis=[1, 2, 3])
    assert err.value.min_n is None or err.value.min_n > 8


def test_gaussian_near_maximizer_is_positive(g32):
    mm = ex.near_maximizer(g32, kind="gaussian", n_param=64.0)
    lam = mm.lam.data[0].real
    assert lam.min() > 0
    assert abs(mm.lam.norm() - 1.0) < 1e-12
    assert ex.maxmid_objective(mm) <= 0.75 + 1e-10


def test_gaussian_frame_is_orthonormal():
    F = ex.gaussian_family_frame([0.0, 1.0, 1.0])
    assert np.allclose(F.T @ F, np.eye(3))


def test_near_maximizer_rejects_bad_eps(g3):
    with pytest.raises(ConfigurationError):
        ex.near_maximizer(g3, 1.5)
    with pytest.raises(ConfigurationError):
        ex.near_maximizer(g3, kind="other")


@given(seeds)
def test_diag_bound(seed):
    g = make_grid(3, 16)
    S = project_st(random_field(g, "symmatrix", 1.0, seed))
    v = np.random.default_rng(seed).standard_normal(3)
    assert ex.diag_component_bound_check(S, v) <= 0.5 + 1e-10


def test_diag_bound_family(g32):
    S = ex.strain_near_maximizer(g32, 0.1, E3)
    assert max(check_strain_characterization(S)) < 1e-10
    assert ex.diag_component_bound_check(S, E3) >= 0.5 * 0.9**2


def test_diag_bound_single_transverse_mode(g3):
    data = np.zeros((3, *g3.shape), dtype=complex)
    data[2, 1, 0, 0] = 1j
    data[2, -1, 0, 0] = -1j
    u = VectorField(g3, SPECTRAL, data)
    S = sym_grad(inv_lap(u, 0.5))
    assert ex.diag_component_bound_check(S, [1, 0, 0]) < 1e-30


def test_diag_bound_rejects_non_strain(g3):
    with pytest.raises(PreconditionError):
        ex.diag_component_bound_check(random_field(g3, "symmatrix", 1.0, 0), E3)


@given(seeds)
def test_rank_one_matches_objective(seed):
    g = make_grid(3, 8)
    mm = ex.MaxMidField(positive_amplitude(g, seed), random_directions(g, seed))
    w = ex.rank_one_from_maxmid(mm)
    assert abs(ex.rank_one_value(w) - ex.maxmid_objective(mm)) < 1e-10


def test_rank_one_constant_is_zero(g3):
    w = VectorField(g3, PHYSICAL, np.ones((3, *g3.shape), dtype=complex))
    assert ex.rank_one_value(w) < 1e-30


@given(seeds)
def test_rank_one_range(seed):
    w = random_field(make_grid(3, 8), "vector", 1.0, seed)
    assert -1e-10 <= ex.rank_one_value(w) <= 1 + 1e-10


def test_ascent_is_monotone_and_fixed_direction_bounded(g3):
    est = ex.estimate_supremum(g3, restarts=2, max_iters=60, constraint="fixed", seed=1)
    for tr in est.traces:
        assert np.all(np.diff(tr.objective) >= 0)
    assert est.value <= 0.75 + 1e-10
    assert not est.empirical


def test_free_ascent_exceeds_fixed(g3):
    est = ex.estimate_supremum(g3, restarts=2, max_iters=60, constraint="free", seed=2)
    for tr in est.traces:
        assert np.all(np.diff(tr.objective) >= 0)
    assert 0.75 < est.value <= 1.0
    assert est.empirical
    best = est.best
    assert abs(ex.maxmid_objective(best) - est.value) < 1e-9
    data = est.to_dict()
    assert data["restarts"] == 2 and len(data["per_restart_traces"]) == 2


def test_plane_ascent_is_flagged(g3):
    est = ex.estimate_supremum(g3, restarts=1, max_iters=40, constraint="plane", seed=3)
    assert est.notes
    assert np.allclose(est.best.v.data[0], 0.0)


def test_estimate_rejects_bad_arguments(g3):
    with pytest.raises(ConfigurationError):
        ex.estimate_supremum(g3, constraint="nowhere")
    with pytest.raises(ConfigurationError):
        ex.estimate_supremum(g3, restarts=0)


def test_eigen_gap(g3):
    S = project_st(random_field(g3, "symmatrix", 1.0, 4))
    res = ex.eigen_gap_check(S, 0.9)
    assert isinstance(res.holds, bool)
    assert res.lhs_plain >= res.lhs - 1e-12
    if res.holds:
        assert res.holds_plain
    zero = ex.eigen_gap_check(S * 0.0, 0.5)
    assert (zero.lhs, zero.rhs, zero.holds) == (0.0, 0.0, True)
    with pytest.raises(ConfigurationError):
        ex.eigen_gap_check(S, 1.0)
    with pytest.raises(PreconditionError):
        ex.eigen_gap_check(random_field(g3, "symmatrix", 1.0, 0), 0.5)


@given(seeds)
def test_eigenvalues_match_lapack(seed):
    S = random_field(make_grid(3, 8), "symmatrix", 1.0, seed)
    full = np.moveaxis(S.physical().full().real, (0, 1), (-2, -1))
    ref = np.moveaxis(np.linalg.eigvalsh(full), -1, 0)
    assert np.abs(ex.eigen_decompose_field(S).values - ref).max() < 1e-12 * np.abs(ref).max()
