"""Orthogonal decomposition of matrix-valued fields into Fourier-multiplier subspaces.

A symmetric field splits into four mutually orthogonal parts:

* ``st``: symmetric gradients of divergence-free fields (strain space),
* ``hess``: Hessians ``Hess (-Delta)^-1 f``,
* ``id_tilde``: ``f I + Hess (-Delta)^-1 f`` (identity made orthogonal to Hessians),
* ``trdivfree``: trace-free and divergence-free fields.

Per mode, with ``x`` the unit frequency, ``w = M x`` and ``w_perp = w - (x.w) x``:

* ``st = x w_perp^T + w_perp x^T``
* ``hess = (x^T M x) x x^T``
* ``id_tilde = (tr M - x^T M x) / (d-1) * (I - x x^T)``
* ``trdivfree`` is the remainder.

The constant (mean) matrix is divergence-free: its trace part goes to
``id_tilde`` and its trace-free part to ``trdivfree``.

The closed forms are cross-checked against :func:`brute_force_project`,
which builds an explicit orthonormal frame per mode and projects onto the
span of orthonormal basis matrices.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import NamedTuple

import numpy as np

from . import _kernels as K
from .calculus import project_df
from .errors import UsageError
from .spectral import (
    SPECTRAL,
    AntiSymMatrixField,
    Grid,
    SymMatrixField,
    VectorField,
    antisym_pairs,
)

SUBSPACES = ("st", "hess", "id_tilde", "trdivfree")
_SUB_INDEX = {name: i for i, name in enumerate(SUBSPACES)}


def _flat(M: SymMatrixField) -> np.ndarray:
    return np.ascontiguousarray(M.data.reshape(M.data.shape[0], -1))


def _require_sym(M):
    if not isinstance(M, SymMatrixField):
        raise UsageError(f"expected a SymMatrixField, got {type(M).__name__}")


def _parts_spectral(M: SymMatrixField, accumulate: bool = False):
    """Closed-form parts of a spectral field as an array ``(4, nc, *shape)``.

    With ``accumulate`` also returns ``(gram, norm_sq, completeness_sq)``.
    """
    g = M.grid
    nc = M.data.shape[0]
    out = np.empty((4, nc, g.size), dtype=np.complex128)
    sums = K.sym_parts(_flat(M), g.xi_hat_flat, g.null_flat, out, SymMatrixField.weights(g.d), accumulate)
    out = out.reshape((4, nc, *g.shape))
    return (out, sums) if accumulate else out


def _as_field(M: SymMatrixField, data: np.ndarray) -> SymMatrixField:
    return SymMatrixField(M.grid, SPECTRAL, data).to_rep(M.rep)


def _project(M: SymMatrixField, which: str) -> SymMatrixField:
    _require_sym(M)
    S = M.spectral()
    return _as_field(M, _parts_spectral(S)[_SUB_INDEX[which]])


def project_st(M: SymMatrixField) -> SymMatrixField:
    """Projection onto the strain space; returned in the input's representation."""
    return _project(M, "st")


def project_hess(M: SymMatrixField) -> SymMatrixField:
    """Projection onto Hessians of ``(-Delta)^-1`` potentials."""
    return _project(M, "hess")


def project_id_tilde(M: SymMatrixField) -> SymMatrixField:
    """Projection onto the adjusted-identity space."""
    return _project(M, "id_tilde")


def project_trdivfree(M: SymMatrixField) -> SymMatrixField:
    """Trace-free, divergence-free remainder."""
    return _project(M, "trdivfree")


def project_divfree(M: SymMatrixField) -> SymMatrixField:
    """Divergence-free part: ``id_tilde + trdivfree``."""
    _require_sym(M)
    p = _parts_spectral(M.spectral())
    return _as_field(M, p[2] + p[3])


@dataclass(frozen=True, eq=False)
class DecompositionResult:
    """Four orthogonal parts of a symmetric field with their Gram matrix."""

    st: SymMatrixField
    hess: SymMatrixField
    id_tilde: SymMatrixField
    trdivfree: SymMatrixField
    gram: np.ndarray = dc_field(repr=False)
    reconstruction_error: float = 0.0
    input_norm_sq: float = 0.0

    @property
    def parts(self) -> tuple[SymMatrixField, ...]:
        return (self.st, self.hess, self.id_tilde, self.trdivfree)

    @property
    def divfree(self) -> SymMatrixField:
        return self.id_tilde + self.trdivfree

    def diagnostics(self) -> dict:
        """Plain-data summary: Gram matrix, part norms and relative residuals."""
        nsq = self.input_norm_sq
        off = self.gram - np.diag(np.diag(self.gram))
        return {
            "gram": self.gram.tolist(),
            "norms": {
                "input": float(np.sqrt(nsq)),
                **{name: float(np.sqrt(max(self.gram[i, i], 0.0))) for i, name in enumerate(SUBSPACES)},
            },
            "residuals": {
                "completeness": self.reconstruction_error,
                "orthogonality": float(np.abs(off).max() / nsq) if nsq > 0 else 0.0,
                "pythagoras": float(abs(nsq - np.trace(self.gram)) / nsq) if nsq > 0 else 0.0,
            },
        }


def decompose_sym(M: SymMatrixField) -> DecompositionResult:
    """Split ``M`` into strain, Hessian, adjusted-identity and tr&divfree parts."""
    _require_sym(M)
    parts, (gram, nsq, comp) = _parts_spectral(M.spectral(), accumulate=True)
    rel = float(np.sqrt(comp / nsq)) if nsq > 0 else float(np.sqrt(comp))
    fields = [_as_field(M, parts[i]) for i in range(4)]
    return DecompositionResult(*fields, gram=gram, reconstruction_error=rel, input_norm_sq=float(nsq))


def decomposition_residuals(M: SymMatrixField, result: DecompositionResult | None = None, oracle: bool = True) -> dict:
    """Relative residuals of every structural property of a decomposition of ``M``.

    Keys: ``completeness``, ``orthogonality`` (largest off-diagonal Gram entry
    over ``|M|^2``), ``pythagoras``, ``idempotence`` and ``annihilation``
    (largest ``|P_b P_a M - delta_ab P_a M| / |M|``) and, if requested,
    ``oracle`` (largest distance to the brute-force projection over ``|M|``).
    """
    _require_sym(M)
    if result is None:
        result = decompose_sym(M)
    g = M.grid
    S = M.spectral()
    parts = np.stack([p.spectral().data.reshape(S.data.shape[0], -1) for p in result.parts])
    wts = SymMatrixField.weights(g.d)
    out = dict(result.diagnostics()["residuals"])
    nsq = result.input_norm_sq or 1.0
    compose = np.sqrt(K.compose_sums(parts, g.xi_hat_flat, g.null_flat, wts) / nsq)
    out["idempotence"] = float(np.diag(compose).max())
    out["annihilation"] = float(compose[~np.eye(4, dtype=bool)].max())
    if oracle:
        orc = K.oracle_sums(_flat(S), parts, g.xi_hat_flat, g.null_flat, wts)
        out["oracle"] = float(np.sqrt(orc.max() / nsq))
    return out


def distinct_directions(grid: Grid) -> tuple[np.ndarray, np.ndarray]:
    """Bitwise-distinct unit frequencies of ``grid`` up to sign, as ``(xh (d, m), null (m,))``.

    Both the closed-form and the brute-force projections depend on a mode only
    through its unit frequency and are unchanged, bit for bit, when it flips
    sign; checking each distinct direction once therefore covers every mode.
    """
    xh = grid.xi_hat_flat.T
    first = np.argmax(xh != 0, axis=1)
    sign = np.sign(xh[np.arange(xh.shape[0]), first])
    sign[sign == 0] = 1.0
    canon = np.ascontiguousarray(xh * sign[:, None])
    keys = canon.view(np.dtype((np.void, canon.dtype.itemsize * grid.d))).ravel()
    _, keep = np.unique(keys, return_index=True)
    u = np.ascontiguousarray(canon[np.sort(keep)].T)
    return u, np.ascontiguousarray(~u.any(axis=0))


def operator_residuals(grid: Grid, compose: bool = True) -> dict:
    """Exhaustive per-mode check of the closed-form projections on ``grid``.

    At every distinct mode direction the closed forms are applied to an
    orthonormal basis of symmetric matrices built from the brute-force span
    tables.  The results bound the corresponding relative residual of *every*
    field on the grid:

    * ``oracle``: largest ``|P_a - O_a|`` over modes and subspaces,
    * ``idempotence`` / ``annihilation``: largest ``|P_a P_a - P_a|`` / ``|P_b P_a|``,
    * ``completeness``: largest ``|sum_a P_a - I|``,
    * ``basis_orthonormality``: largest deviation of the span tables from orthonormal,
    * ``dims``: span dimension per subspace at nonzero frequency.

    Operator norms are bounded by Frobenius norms in orthonormal coordinates.
    """
    xh, null = distinct_directions(grid)
    oracle, comp, complete, basis, dims = K.operator_sums(
        xh, null, SymMatrixField.weights(grid.d), True, compose
    )
    out = {
        "directions": int(xh.shape[1]),
        "oracle": float(oracle.max()),
        "oracle_per_subspace": dict(zip(SUBSPACES, map(float, oracle))),
        "completeness": float(complete),
        "basis_orthonormality": float(basis),
        "dims": dict(zip(SUBSPACES, map(int, dims))),
    }
    if compose:
        out["idempotence"] = float(np.diag(comp).max())
        out["annihilation"] = float(comp[~np.eye(4, dtype=bool)].max())
    return out


# ------------------------------------------------------------ oracle


@dataclass(frozen=True, eq=False)
class ModeBasis:
    """Orthonormal frame at one frequency and the orthonormal span matrices per subspace."""

    xi_hat: np.ndarray
    complement: np.ndarray
    span_tables: dict

    def dimensions(self) -> dict:
        return {k: len(v) for k, v in self.span_tables.items()}


def mode_basis(xi: np.ndarray) -> ModeBasis:
    """Frame and span tables at a single nonzero frequency vector."""
    xi = np.asarray(xi, dtype=float)
    d = xi.shape[0]
    nrm = np.linalg.norm(xi)
    if nrm == 0:
        raise UsageError("the zero frequency has no frame")
    x = xi / nrm
    frame = np.empty((d, d))
    nc = d * (d + 1) // 2
    tables = np.zeros((4, nc, d, d))
    counts = np.zeros(4, dtype=np.int64)
    K.frame_at(x, d, frame)
    K.span_tables_at(frame, d, tables, counts)
    spans = {name: [tables[i, b].copy() for b in range(counts[i])] for i, name in enumerate(SUBSPACES)}
    return ModeBasis(xi_hat=x, complement=frame[1:].copy(), span_tables=spans)


def brute_force_parts(M: SymMatrixField) -> tuple[SymMatrixField, ...]:
    """All four span projections computed with explicit per-mode bases."""
    _require_sym(M)
    S = M.spectral()
    g = M.grid
    out = np.empty((4, S.data.shape[0], g.size), dtype=np.complex128)
    K.oracle_parts(_flat(S), g.xi_hat_flat, g.null_flat, out)
    out = out.reshape((4, S.data.shape[0], *g.shape))
    return tuple(_as_field(M, out[i]) for i in range(4))


def brute_force_project(M: SymMatrixField, subspace: str) -> SymMatrixField:
    """Project onto one subspace by inner products with explicit span matrices."""
    if subspace not in _SUB_INDEX:
        raise UsageError(f"unknown subspace {subspace!r}; expected one of {SUBSPACES}")
    return brute_force_parts(M)[_SUB_INDEX[subspace]]


# ------------------------------------------------------------ anti-symmetric and vector fields


def decompose_antisym(A: AntiSymMatrixField) -> tuple[AntiSymMatrixField, AntiSymMatrixField]:
    """Split an anti-symmetric field into vorticity-type and divergence-free parts.

    Per mode, with ``r = -A x`` the vorticity part is ``x r^T - r x^T``; the
    divergence-free remainder satisfies ``A x = 0``.  Constants are
    divergence-free.
    """
    if not isinstance(A, AntiSymMatrixField):
        raise UsageError("decompose_antisym needs an AntiSymMatrixField")
    S = A.spectral()
    g = A.grid
    full = S.full()
    xh = g.xi_hat
    r = [-sum(full[i, j] * xh[j] for j in range(g.d)) for i in range(g.d)]
    vort = np.stack([xh[i] * r[j] - r[i] * xh[j] for i, j in antisym_pairs(g.d)])
    V = AntiSymMatrixField(g, SPECTRAL, vort)
    D = AntiSymMatrixField(g, SPECTRAL, S.data - vort)
    return V.to_rep(A.rep), D.to_rep(A.rep)


def helmholtz_vector(u: VectorField) -> tuple[VectorField, VectorField]:
    """Split ``u`` into divergence-free and gradient parts (constants count as divergence-free)."""
    if not isinstance(u, VectorField):
        raise UsageError("helmholtz_vector needs a VectorField")
    df = project_df(u)
    gr = u.spectral() - df
    return df.to_rep(u.rep), gr.to_rep(u.rep)


class GeneralDecomposition(NamedTuple):
    st: SymMatrixField
    hess: SymMatrixField
    divfree_sym: SymMatrixField
    vort: AntiSymMatrixField
    divfree_antisym: AntiSymMatrixField


def split_general(grid: Grid, rep: str, full: np.ndarray) -> tuple[SymMatrixField, AntiSymMatrixField]:
    """Symmetric and anti-symmetric parts of a general ``(d, d, *shape)`` matrix array."""
    return SymMatrixField.from_full(grid, rep, full), AntiSymMatrixField.from_full(grid, rep, full)


def decompose_general(grid: Grid, rep: str, full: np.ndarray) -> GeneralDecomposition:
    """Five-part orthogonal split of a general matrix field."""
    sym, asym = split_general(grid, rep, full)
    res = decompose_sym(sym)
    vort, dfa = decompose_antisym(asym)
    return GeneralDecomposition(res.st, res.hess, res.divfree, vort, dfa)
