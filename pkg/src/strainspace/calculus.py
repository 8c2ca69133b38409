"""Spectral vector calculus on periodic fields.

Every operator accepts either representation and returns a spectral field.
The velocity gradient convention is ``(grad u)_ij = d_i u_j`` and the
divergence of a matrix is ``(div M)_j = sum_i d_i M_ij``.
"""

from __future__ import annotations

import numpy as np

from .errors import UsageError
from .spectral import (
    SPECTRAL,
    AntiSymMatrixField,
    Field,
    Grid,
    ScalarField,
    SymMatrixField,
    VectorField,
    antisym_pairs,
    inverse_laplacian_symbol,
    sym_index,
    sym_pairs,
)

TWO_PI = 2.0 * np.pi


def _ik(grid: Grid, axis: int) -> np.ndarray:
    return 1j * TWO_PI * grid.xi(axis)


def apply_symbol(field: Field, symbol: np.ndarray) -> Field:
    """Multiply every component by a scalar Fourier multiplier."""
    f = field.spectral()
    return f.with_data(f.data * symbol)


def inv_lap(field: Field, order: float = 1.0) -> Field:
    """``(-Delta)^(-order)`` with null modes sent to zero, any representation."""
    return apply_symbol(field, inverse_laplacian_symbol(field.grid, order))


def laplacian(field: Field) -> Field:
    return apply_symbol(field, -field.grid.laplacian_symbol())


def heat(field: Field, t: float, nu: float = 1.0) -> Field:
    """Heat semigroup ``exp(nu t Delta)``."""
    return apply_symbol(field, np.exp(-nu * t * field.grid.laplacian_symbol()))


def grad(f: ScalarField) -> VectorField:
    f = f.spectral()
    g = f.grid
    return VectorField(g, SPECTRAL, np.stack([_ik(g, a) * f.data[0] for a in range(g.d)]))


def div(u: VectorField) -> ScalarField:
    u = u.spectral()
    g = u.grid
    out = sum(_ik(g, a) * u.data[a] for a in range(g.d))
    return ScalarField(g, SPECTRAL, out[None])


def div_matrix(M: SymMatrixField | AntiSymMatrixField) -> VectorField:
    """Column divergence ``(div M)_j = sum_i d_i M_ij``."""
    M = M.spectral()
    g = M.grid
    if isinstance(M, SymMatrixField):
        idx = sym_index(g.d)
        comps = [sum(_ik(g, i) * M.data[idx[i, j]] for i in range(g.d)) for j in range(g.d)]
    elif isinstance(M, AntiSymMatrixField):
        full = M.full()
        comps = [sum(_ik(g, i) * full[i, j] for i in range(g.d)) for j in range(g.d)]
    else:
        raise UsageError("div_matrix needs a matrix field")
    return VectorField(g, SPECTRAL, np.stack(comps))


def div2(M: SymMatrixField) -> ScalarField:
    """``sum_ij d_i d_j M_ij``."""
    return div(div_matrix(M))


def curl(u: VectorField) -> VectorField:
    u = u.spectral()
    g = u.grid
    if g.d != 3:
        raise UsageError("curl of a vector field is defined for d = 3 only")
    D = [_ik(g, a) for a in range(3)]
    c = u.data
    return VectorField(
        g,
        SPECTRAL,
        np.stack([D[1] * c[2] - D[2] * c[1], D[2] * c[0] - D[0] * c[2], D[0] * c[1] - D[1] * c[0]]),
    )


def sym_grad(u: VectorField) -> SymMatrixField:
    """``(d_i u_j + d_j u_i) / 2``."""
    u = u.spectral()
    g = u.grid
    comps = [0.5 * (_ik(g, i) * u.data[j] + _ik(g, j) * u.data[i]) for i, j in sym_pairs(g.d)]
    return SymMatrixField(g, SPECTRAL, np.stack(comps))


def asym_grad(u: VectorField) -> AntiSymMatrixField:
    """``(d_i u_j - d_j u_i) / 2``."""
    u = u.spectral()
    g = u.grid
    comps = [0.5 * (_ik(g, i) * u.data[j] - _ik(g, j) * u.data[i]) for i, j in antisym_pairs(g.d)]
    return AntiSymMatrixField(g, SPECTRAL, np.stack(comps))


def hessian(f: ScalarField) -> SymMatrixField:
    f = f.spectral()
    g = f.grid
    comps = [_ik(g, i) * _ik(g, j) * f.data[0] for i, j in sym_pairs(g.d)]
    return SymMatrixField(g, SPECTRAL, np.stack(comps))


def scalar_times_identity(f: ScalarField) -> SymMatrixField:
    """The matrix field ``f I``, in the representation of ``f``."""
    g = f.grid
    data = np.zeros((SymMatrixField.ncomp(g.d), *g.shape), dtype=np.complex128)
    idx = sym_index(g.d)
    for i in range(g.d):
        data[idx[i, i]] = f.data[0]
    return SymMatrixField(g, f.rep, data)


def outer(u: VectorField, v: VectorField | None = None) -> SymMatrixField:
    """Pointwise symmetrised outer product ``(u v^T + v u^T)/2`` (``u u^T`` if ``v`` is None)."""
    u = u.physical()
    v = u if v is None else v.physical()
    comps = [0.5 * (u.data[i] * v.data[j] + v.data[i] * u.data[j]) for i, j in sym_pairs(u.grid.d)]
    return SymMatrixField(u.grid, u.rep, np.stack(comps))


def project_df(u: VectorField) -> VectorField:
    """Leray projection onto divergence-free fields; null modes are kept."""
    u = u.spectral()
    xh = u.grid.xi_hat
    dot = sum(xh[a] * u.data[a] for a in range(u.grid.d))
    return u.with_data(np.stack([u.data[a] - xh[a] * dot for a in range(u.grid.d)]))


def antisym_to_vector(A: AntiSymMatrixField) -> VectorField:
    """Three-dimensional correspondence ``A v = v x w``; ``w = (A_23, A_31, A_12)``."""
    if A.grid.d != 3:
        raise UsageError("the vector correspondence of anti-symmetric matrices needs d = 3")
    full = A.full()
    return VectorField(A.grid, A.rep, np.stack([full[1, 2], full[2, 0], full[0, 1]]))


def vector_to_antisym(w: VectorField) -> AntiSymMatrixField:
    """Inverse of :func:`antisym_to_vector`."""
    if w.grid.d != 3:
        raise UsageError("the vector correspondence of anti-symmetric matrices needs d = 3")
    # storage order (0,1), (0,2), (1,2)
    return AntiSymMatrixField(w.grid, w.rep, np.stack([w.data[2], -w.data[1], w.data[0]]))
