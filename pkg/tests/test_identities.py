import numpy as np
import pytest
from hypothesis import given, strategies as st

from strainspace import identities as ids
from strainspace.calculus import hessian, inv_lap, project_df
from strainspace.decomp import project_divfree, project_hess, project_st
from strainspace.errors import PreconditionError, UnsupportedRotationError, UsageError
from strainspace.ns import taylor_green
from strainspace.spectral import SymMatrixField, VectorField, make_grid, random_field

seeds = st.integers(0, 2**31 - 1)


@given(seeds)
def test_projected_fields_satisfy_strain_characterization(seed):
    g = make_grid(3, 16)
    S = project_st(random_field(g, "symmatrix", 1.0, seed))
    tr, con = ids.check_strain_characterization(S)
    assert tr < 1e-10 and con < 1e-10


@given(seeds)
def test_hessians_fail_strain_characterization(seed):
    g = make_grid(3, 16)
    H = ids.hessian_potential(random_field(g, "scalar", 1.0, seed))
    assert ids.check_strain_characterization(H)[1] >= 0.5


def test_zero_field_characterization(g3):
    assert ids.check_strain_characterization(SymMatrixField.zeros(g3)) == (0.0, 0.0)


def test_characterization_needs_three_dimensions(g2):
    with pytest.raises(UsageError):
        ids.check_strain_characterization(random_field(g2, "symmatrix", 1.0, 0))


@pytest.mark.parametrize("n", [16, 32])
def test_taylor_green_isometry(n):
    u = taylor_green(make_grid(3, n))
    S = ids.strain_from_velocity(u)
    assert abs(S.norm_sq() / u.norm_sq() - 0.5) < 1e-10
    r1, r2 = ids.isometry_ratios(u)
    assert abs(r1 - 0.5) < 1e-10 and abs(r2 - 0.5) < 1e-10
    assert max(ids.check_strain_characterization(S)) < 1e-10


@given(seeds)
def test_random_isometry(seed):
    u = ids.random_divfree(make_grid(3, 16), 1.0, seed)
    r1, r2 = ids.isometry_ratios(u)
    assert abs(r1 - 0.5) < 1e-10 and abs(r2 - 0.5) < 1e-10


def test_strain_from_zero_velocity(g3):
    assert ids.strain_from_velocity(VectorField.zeros(g3)).norm() == 0.0


def test_strain_from_velocity_rejects_compressible(g3):
    u = random_field(g3, "vector", 1.0, 1)
    with pytest.raises(PreconditionError) as err:
        ids.strain_from_velocity(u)
    assert err.value.residual > 1e-3


def test_strain_from_velocity_rejects_mean(g3):
    u = project_df(random_field(g3, "vector", 1.0, 1))
    data = u.data.copy()
    data[:, 0, 0, 0] = 1.0
    with pytest.raises(PreconditionError):
        ids.strain_from_velocity(u.with_data(data))


@given(seeds)
def test_projection_norm_via_curl(seed):
    M = random_field(make_grid(3, 16), "symmatrix", 1.0, seed)
    pn = project_st(M).norm_sq()
    assert abs(ids.projection_norm_via_curl(M) - pn) < 1e-10 * pn


def test_projection_norm_vanishes_off_strain(g3):
    M = random_field(g3, "symmatrix", 1.0, 2)
    assert ids.projection_norm_via_curl(project_hess(M)) < 1e-20 * M.norm_sq()
    assert ids.projection_norm_via_curl(project_divfree(M)) < 1e-20 * M.norm_sq()


@given(st.sampled_from([2, 3, 4]), seeds)
def test_divergence_commutes_with_projection(d, seed):
    M = random_field(make_grid(d, 8), "symmatrix", 1.0, seed)
    assert ids.div_commutation_residual(M) < 1e-10


def test_commutation_on_special_fields(g3):
    M = random_field(g3, "symmatrix", 1.0, 3)
    assert ids.div_commutation_residual(project_divfree(M)) < 1e-12
    assert ids.div_commutation_residual(hessian(inv_lap(random_field(g3, "scalar", 1.0, 4), 1.0))) < 1e-12


def test_cubic_group():
    rots = ids.cubic_rotations()
    assert len(rots) == 24
    assert len({r.tobytes() for r in rots}) == 24
    for Q in rots:
        assert np.array_equal(Q.T @ Q, np.eye(3, dtype=int))


def test_rotation_identity_and_norm(g3):
    S = project_st(random_field(g3, "symmatrix", 1.0, 5))
    assert np.array_equal(ids.rotate_field(S, np.eye(3)).data, S.data)
    for Q in ids.cubic_rotations():
        R = ids.rotate_field(S, Q)
        assert abs(R.norm() - S.norm()) < 1e-14 * S.norm()


def test_rotation_matches_pointwise_definition(g3):
    S = random_field(g3, "symmatrix", 1.0, 6)
    Q = np.array([[0, -1, 0], [1, 0, 0], [0, 0, 1]])
    R = ids.rotate_field(S, Q).full()
    F = S.full()
    i = np.array([3, 5, 7])
    j = Q @ i % g3.n
    assert np.allclose(R[:, :, i[0], i[1], i[2]], Q.T @ F[:, :, j[0], j[1], j[2]] @ Q)


def test_rotation_commutes_with_projection():
    g = make_grid(3, 16)
    M = random_field(g, "symmatrix", 1.0, 7)
    P = project_st(M)
    for Q in ids.cubic_rotations():
        lhs = project_st(ids.rotate_field(M, Q))
        rhs = ids.rotate_field(P, Q)
        assert (lhs - rhs).norm() < 1e-10 * M.norm()
        assert max(ids.check_strain_characterization(rhs)) < 1e-10


def test_rotation_rejects_non_grid_rotations(g3):
    S = random_field(g3, "symmatrix", 1.0, 0)
    c, s = np.cos(0.3), np.sin(0.3)
    with pytest.raises(UnsupportedRotationError):
        ids.rotate_field(S, np.array([[c, -s, 0], [s, c, 0], [0, 0, 1]]))
    with pytest.raises(UnsupportedRotationError):
        ids.rotate_field(S, np.diag([-1, 1, 1]))


def test_det_bound_examples():
    eq = np.diag([-2.0, 1.0, 1.0]) / np.sqrt(6)
    assert -4 * np.linalg.det(eq) == pytest.approx(2 / 9 * np.sqrt(6), rel=1e-14)
    r = ids.det_bound_pointwise(eq[None])
    assert r.equality_sites == 1 and r.equality_has_double_eigenvalue
    r = ids.det_bound_pointwise(np.diag([-1.0, 0.0, 1.0])[None])
    assert r.violations == 0 and r.equality_sites == 0


def test_det_bound_random(rng):
    r = ids.det_bound_pointwise(ids.random_trace_free(200_000, rng))
    assert r.violations == 0 and r.max_violation <= 0


def test_det_bound_equality_on_constructed_matrices(rng):
    r = ids.det_bound_pointwise(ids.max_mid_matrices(2000, rng))
    assert r.equality_sites == 2000
    assert r.max_pair_gap < 1e-6


def test_det_bound_on_field(g3):
    r = ids.det_bound_check(project_st(random_field(g3, "symmatrix", 1.0, 8)))
    assert r.violations == 0


def test_det_bound_rejects_trace(g3):
    with pytest.raises(PreconditionError):
        ids.det_bound_check(random_field(g3, "symmatrix", 1.0, 9))
