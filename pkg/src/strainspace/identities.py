"""Measured residuals of the structural identities of the strain space.

Functions here return numbers; judging them against tolerances is left to
callers (tests and the ``verify`` command).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .calculus import curl, div, div_matrix, hessian, inv_lap, project_df, sym_grad
from .decomp import project_st
from .errors import PreconditionError, UnsupportedRotationError, UsageError
from .spectral import Field, SymMatrixField, VectorField, random_field, sym_pairs

DET_CONST = 2.0 / 9.0 * np.sqrt(6.0)


def _ratio(num: float, den: float) -> float:
    return float(num / den) if den > 0 else 0.0


def _need_d3(field: Field, what: str):
    if field.grid.d != 3:
        raise UsageError(f"{what} is only defined for d = 3")


def strain_constraint(S: SymMatrixField) -> SymMatrixField:
    """``S + 2 sym_grad div (-Delta)^-1 S``; vanishes exactly on the strain space."""
    return S.spectral() + 2.0 * sym_grad(div_matrix(inv_lap(S, 1.0)))


def check_strain_characterization(S: SymMatrixField) -> tuple[float, float]:
    """Relative residuals ``(|tr S| / |S|, |S + 2 sym_grad div (-Delta)^-1 S| / |S|)``.

    Both vanish exactly when ``S`` is the symmetric gradient of a
    divergence-free field normalised by ``(-Delta)^(-1/2)``.
    """
    _need_d3(S, "the strain characterization")
    S = S.spectral()
    nrm = S.norm()
    if nrm == 0:
        return 0.0, 0.0
    return _ratio(S.trace().norm(), nrm), _ratio(strain_constraint(S).norm(), nrm)


def divergence_residual(u: VectorField) -> float:
    """``|div (-Delta)^(-1/2) u| / |u|``, a scale-free divergence measure."""
    return _ratio(div(inv_lap(u, 0.5)).norm(), u.norm())


def mean_residual(u: Field) -> float:
    """Relative size of the content on zero-frequency modes."""
    s = u.spectral()
    return _ratio(np.sqrt(np.sum(np.abs(s.data[:, s.grid.null_mask]) ** 2)), s.norm())


def _require_divfree(u: VectorField, tol: float):
    r = divergence_residual(u)
    if r > tol:
        raise PreconditionError(f"velocity is not divergence-free (residual {r:.3e})", residual=r)
    m = mean_residual(u)
    if m > tol:
        raise PreconditionError(f"velocity has a nonzero mean (relative size {m:.3e})", residual=m)


def strain_from_velocity(u: VectorField, tol: float = 1e-10) -> SymMatrixField:
    """``sym_grad (-Delta)^(-1/2) u`` for divergence-free, mean-zero ``u``."""
    _require_divfree(u, tol)
    return sym_grad(inv_lap(u, 0.5)).to_rep(u.rep)


def isometry_ratios(u: VectorField) -> tuple[float, float]:
    """``|sym_grad (-Delta)^(-1/2) u|^2 / |u|^2`` and ``|curl (-Delta)^(-1/2) u|^2 / (2 |u|^2)``.

    Both equal one half for divergence-free, mean-zero ``u``.
    """
    _need_d3(u, "the curl isometry")
    nsq = u.norm_sq()
    if nsq == 0:
        return 0.0, 0.0
    h = inv_lap(u, 0.5)
    return sym_grad(h).norm_sq() / nsq, 0.5 * curl(h).norm_sq() / nsq


def projection_norm_via_curl(M: SymMatrixField) -> float:
    """``2 |curl div (-Delta)^-1 M|^2``, which equals ``|P_st M|^2``."""
    _need_d3(M, "projection_norm_via_curl")
    return 2.0 * curl(div_matrix(inv_lap(M, 1.0))).norm_sq()


def div_commutation_residual(M: SymMatrixField) -> float:
    """``|div P_st M - P_df div M| / |M|``."""
    lhs = div_matrix(project_st(M))
    rhs = project_df(div_matrix(M))
    return _ratio((lhs - rhs).norm(), M.norm())


def random_divfree(grid, decay: float = 1.0, seed: int | None = None, rep: str = "physical") -> VectorField:
    """Seeded real, divergence-free, mean-zero velocity field."""
    u = project_df(random_field(grid, "vector", decay, seed))
    data = u.data.copy()
    data[:, grid.null_mask] = 0.0
    return u.with_data(data).to_rep(rep)


def hessian_potential(f) -> SymMatrixField:
    """``Hess (-Delta)^-1 f``."""
    return hessian(inv_lap(f, 1.0))


# ------------------------------------------------------------ rotations


def cubic_rotations() -> list[np.ndarray]:
    """The 24 signed permutation matrices with determinant +1."""
    out = []
    for perm in itertools.permutations(range(3)):
        for signs in itertools.product((1, -1), repeat=3):
            Q = np.zeros((3, 3), dtype=int)
            for r, (c, s) in enumerate(zip(perm, signs)):
                Q[r, c] = s
            if round(np.linalg.det(Q)) == 1:
                out.append(Q)
    return out


def _check_cubic(Q: np.ndarray) -> np.ndarray:
    Q = np.asarray(Q)
    if Q.shape != (3, 3):
        raise UnsupportedRotationError("rotation must be a 3x3 matrix")
    Qi = np.rint(Q).astype(int)
    ok = (
        np.allclose(Q, Qi, atol=1e-12)
        and np.all(np.abs(Qi).sum(axis=0) == 1)
        and np.all(np.abs(Qi).sum(axis=1) == 1)
        and round(np.linalg.det(Qi)) == 1
    )
    if not ok:
        raise UnsupportedRotationError("only the 24 rotations of the cube preserve the grid")
    return Qi


def rotate_field(S: SymMatrixField, Q: np.ndarray) -> SymMatrixField:
    """``S^Q(x) = Q^T S(Q x) Q`` by exact sample permutation and conjugation.

    The same index map ``i -> Q i (mod n)`` applies to point samples and to
    mode coefficients, so either representation is rotated exactly.
    """
    _need_d3(S, "rotate_field")
    Q = _check_cubic(Q)
    g = S.grid
    ind = np.indices(g.shape)
    src = tuple(np.mod(sum(Q[a, b] * ind[b] for b in range(3)), g.n) for a in range(3))
    full = S.full()[(slice(None), slice(None)) + src]
    rot = np.einsum("ca,cd...,db->ab...", Q.astype(float), full, Q.astype(float))
    comps = [rot[i, j] for i, j in sym_pairs(3)]
    return SymMatrixField(g, S.rep, np.stack(comps))


# ------------------------------------------------------------ determinant bound


@dataclass(frozen=True)
class DetBoundReport:
    """Outcome of the pointwise bound ``-4 det M <= (2/9) sqrt(6) |M|^3``.

    ``max_violation`` is ``max(-4 det - c |M|^3) / max |M|^3`` (non-positive when the
    bound holds).  Equality sites are points with relative gap below
    ``eq_tol``; ``max_pair_gap`` is the largest ``(lam3 - lam2)/|M|`` among them.
    """

    max_violation: float
    violations: int
    equality_sites: int
    max_pair_gap: float
    pair_gap_tol: float

    @property
    def equality_has_double_eigenvalue(self) -> bool:
        return self.equality_sites == 0 or self.max_pair_gap <= self.pair_gap_tol


def det_bound_pointwise(mats: np.ndarray, viol_tol: float = 1e-10, eq_tol: float = 1e-8, pair_tol: float = 1e-6):
    """Evaluate the determinant bound on an array of real trace-free ``(..., 3, 3)`` matrices."""
    mats = np.asarray(mats, dtype=float).reshape(-1, 3, 3)
    tr = np.trace(mats, axis1=1, axis2=2)
    fro = np.sqrt(np.einsum("kij,kij->k", mats, mats))
    scale = max(fro.max(initial=0.0), 1.0)
    if np.abs(tr).max(initial=0.0) > 1e-10 * scale:
        raise PreconditionError("determinant bound needs trace-free matrices", residual=float(np.abs(tr).max()))
    cube = fro**3
    gap = DET_CONST * cube + 4.0 * np.linalg.det(mats)
    ref = max(cube.max(initial=0.0), np.finfo(float).tiny)
    rel = np.divide(gap, cube, out=np.full_like(gap, np.inf), where=cube > 0)
    sites = rel < eq_tol
    pair = 0.0
    if sites.any():
        lam = np.linalg.eigvalsh(mats[sites])
        pair = float(((lam[:, 2] - lam[:, 1]) / fro[sites]).max())
    return DetBoundReport(
        max_violation=float((-gap).max(initial=-np.inf) / ref),
        violations=int(np.count_nonzero(-gap > viol_tol * ref)),
        equality_sites=int(sites.sum()),
        max_pair_gap=pair,
        pair_gap_tol=pair_tol,
    )


def det_bound_check(M: SymMatrixField, **tols) -> DetBoundReport:
    """Determinant bound at every grid point of a real trace-free field."""
    _need_d3(M, "the determinant bound")
    full = M.physical().full().real
    mats = np.moveaxis(full.reshape(3, 3, -1), -1, 0)
    return det_bound_pointwise(mats, **tols)


def random_trace_free(count: int, rng: np.random.Generator) -> np.ndarray:
    """``count`` Gaussian symmetric trace-free 3x3 matrices."""
    A = rng.standard_normal((count, 3, 3))
    S = 0.5 * (A + A.transpose(0, 2, 1))
    tr = np.trace(S, axis1=1, axis2=2) / 3.0
    S -= tr[:, None, None] * np.eye(3)
    return S


def max_mid_matrices(count: int, rng: np.random.Generator) -> np.ndarray:
    """Randomly oriented trace-free matrices with ``lam2 = lam3 > 0``."""
    a = rng.uniform(0.1, 2.0, count)
    Q, _ = np.linalg.qr(rng.standard_normal((count, 3, 3)))
    lam = np.stack([-2 * a, a, a], axis=1)
    return np.einsum("kij,kj,klj->kil", Q, lam, Q)


__all__ = [
    "DET_CONST",
    "DetBoundReport",
    "check_strain_characterization",
    "cubic_rotations",
    "det_bound_check",
    "det_bound_pointwise",
    "div_commutation_residual",
    "divergence_residual",
    "hessian_potential",
    "isometry_ratios",
    "max_mid_matrices",
    "mean_residual",
    "projection_norm_via_curl",
    "random_divfree",
    "random_trace_free",
    "rotate_field",
    "strain_constraint",
    "strain_from_velocity",
]
