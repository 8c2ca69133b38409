"""Eigenvalue geometry of strain fields and extremal max-mid constructions.

A max-mid field is ``lam / sqrt(6) (I - 3 v v^T)`` with ``lam >= 0`` and ``|v| = 1``:
trace-free, eigenvalues ``(-2, 1, 1) lam / sqrt(6)`` and pointwise norm ``lam``.
The central quantity is

    J(lam, v) = |P_st(lam / sqrt(6) (I - 3 v v^T))|^2 / |lam|^2,

which never exceeds 3/4 for constant ``v`` and whose supremum over varying
``v`` is an open question; :func:`estimate_supremum` explores it numerically.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from . import _kernels as K
from .decomp import project_st
from .errors import ConfigurationError, PreconditionError, ResolutionError, UsageError
from .identities import check_strain_characterization
from .spectral import (
    PHYSICAL,
    SPECTRAL,
    Grid,
    ScalarField,
    SymMatrixField,
    VectorField,
    make_grid,
    negate_modes,
    random_field,
    sym_index,
    sym_pairs,
)

SQRT6 = np.sqrt(6.0)
_E3 = np.array([0.0, 0.0, 1.0])


# ------------------------------------------------------------ max-mid fields


@dataclass(frozen=True, eq=False)
class MaxMidField:
    """Amplitude ``lam`` and unit direction field ``v`` of a max-mid matrix field.

    ``signed`` marks amplitudes allowed to change sign (used by spectrally
    supported shell families, whose zero mean forces negative values).
    """

    lam: ScalarField
    v: VectorField
    signed: bool = False

    def __post_init__(self):
        if self.lam.grid != self.v.grid:
            raise UsageError("amplitude and direction live on different grids")
        if self.lam.grid.d != 3:
            raise UsageError("max-mid fields are defined for d = 3")

    @property
    def grid(self) -> Grid:
        return self.lam.grid

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Real physical arrays ``(lam, v)`` with shapes ``(*shape)`` and ``(3, *shape)``."""
        return self.lam.physical().data[0].real, self.v.physical().data.real

    def validate(self, tol: float = 1e-10):
        lam, v = self.arrays()
        scale = max(np.abs(lam).max(initial=0.0), 1.0)
        if not self.signed and lam.min(initial=0.0) < -1e-12 * scale:
            raise PreconditionError("amplitude must be non-negative", residual=float(-lam.min()))
        active = np.abs(lam) > 1e-12 * scale
        dev = np.abs(np.sqrt(np.sum(v**2, axis=0)) - 1.0)[active]
        if dev.size and dev.max() > tol:
            raise PreconditionError("direction field is not of unit length", residual=float(dev.max()))


def maxmid_components(lam: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Upper-triangular components of ``lam / sqrt(6) (I - 3 v v^T)``."""
    comps = []
    for i, j in sym_pairs(3):
        c = -3.0 * v[i] * v[j]
        if i == j:
            c = c + 1.0
        comps.append(lam * c / SQRT6)
    return np.stack(comps)


def assemble_maxmid(mm: MaxMidField) -> SymMatrixField:
    """The matrix field ``lam / sqrt(6) (I - 3 v v^T)`` in physical representation."""
    mm.validate()
    lam, v = mm.arrays()
    return SymMatrixField(mm.grid, PHYSICAL, maxmid_components(lam, v).astype(np.complex128))


def maxmid_objective(mm: MaxMidField) -> float:
    """``|P_st(assembled)|^2 / |lam|^2``."""
    nsq = mm.lam.norm_sq()
    if nsq == 0:
        raise PreconditionError("objective undefined for zero amplitude")
    return project_st(assemble_maxmid(mm)).norm_sq() / nsq


def constant_direction(grid: Grid, v) -> VectorField:
    v = _unit(v)
    data = np.broadcast_to(v.reshape(3, *([1] * grid.d)), (3, *grid.shape)).astype(np.complex128)
    return VectorField(grid, PHYSICAL, data)


def _unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=float).reshape(-1)
    if v.shape != (3,) or not np.isfinite(v).all() or np.linalg.norm(v) == 0:
        raise UsageError("direction must be a nonzero 3-vector")
    return v / np.linalg.norm(v)


# ------------------------------------------------------------ eigen decomposition


@dataclass(frozen=True, eq=False)
class EigenField:
    """Pointwise ascending eigenvalues ``values[k]`` and eigenvectors ``vectors[..., :, k]``."""

    grid: Grid
    values: np.ndarray
    vectors: np.ndarray

    def lam(self, k: int) -> ScalarField:
        return ScalarField(self.grid, PHYSICAL, self.values[k][None].astype(np.complex128))

    @property
    def lam1(self) -> ScalarField:
        return self.lam(0)

    @property
    def lam2(self) -> ScalarField:
        return self.lam(1)

    @property
    def lam3(self) -> ScalarField:
        return self.lam(2)

    def reconstruct(self) -> np.ndarray:
        """Full matrices ``sum_k lam_k v_k v_k^T`` with shape ``(d, d, *shape)``."""
        vals = np.moveaxis(self.values, 0, -1)
        full = np.einsum("...ik,...k,...jk->...ij", self.vectors, vals, self.vectors)
        return np.moveaxis(full, (-2, -1), (0, 1))


def _fix_signs(vecs: np.ndarray) -> np.ndarray:
    """Make the largest-magnitude component of every column positive (lowest index on ties)."""
    idx = np.argmax(np.abs(vecs), axis=-2)
    lead = np.take_along_axis(vecs, idx[..., None, :], axis=-2)
    return vecs * np.where(lead < 0, -1.0, 1.0)


def _degenerate_frame(vecs: np.ndarray, cols: list[int]) -> np.ndarray:
    """Deterministic orthonormal basis of the span of ``vecs[:, cols]`` via Gram-Schmidt of axes."""
    d = vecs.shape[0]
    P = vecs[:, cols] @ vecs[:, cols].T
    basis = []
    for _ in cols:
        best, best_norm = None, -1.0
        for a in range(d):
            r = P[:, a].copy()
            for b in basis:
                r -= (b @ r) * b
            nr = np.linalg.norm(r)
            if nr > best_norm + 1e-12:
                best, best_norm = r, nr
        basis.append(best / best_norm)
    out = vecs.copy()
    for c, b in zip(cols, basis):
        out[:, c] = b
    return out


def eigen_decompose_field(S: SymMatrixField, degenerate_tol: float = 1e-12) -> EigenField:
    """Pointwise symmetric eigendecomposition with a reproducible frame convention.

    Eigenvalues ascend.  Each eigenvector has its largest-magnitude component
    positive.  Eigenvalues closer than ``degenerate_tol`` (relative to the
    pointwise norm) share a frame obtained by Gram-Schmidt of the standard axes
    projected onto their eigenspace.
    """
    g = S.grid
    full = S.physical().full().real
    d = g.d
    mats = np.moveaxis(full.reshape(d, d, -1), -1, 0)
    vals, vecs = np.linalg.eigh(mats)
    scale = np.maximum(np.sqrt(np.einsum("kij,kij->k", mats, mats)), np.finfo(float).tiny)
    close = np.diff(vals, axis=1) < degenerate_tol * scale[:, None]
    for p in np.flatnonzero(close.any(axis=1)):
        groups, cur = [], [0]
        for k in range(1, d):
            if close[p, k - 1]:
                cur.append(k)
            else:
                groups.append(cur)
                cur = [k]
        groups.append(cur)
        for grp in groups:
            if len(grp) > 1:
                vecs[p] = _degenerate_frame(vecs[p], grp)
    vecs = _fix_signs(vecs)
    return EigenField(g, vals.T.reshape(d, *g.shape), vecs.reshape(*g.shape, d, d))


# ------------------------------------------------------------ fixed-direction bounds


def fixed_direction_value(lam: ScalarField, v) -> float:
    """``|P_st(lam / sqrt(6) (I - 3 v v^T))|^2 / |lam|^2`` for a constant unit vector ``v``."""
    if lam.grid.d != 3:
        raise UsageError("fixed_direction_value needs d = 3")
    g = lam.grid
    lr = lam.physical().as_real()
    nsq = lr.norm_sq()
    if nsq == 0:
        raise PreconditionError("objective undefined for zero amplitude")
    mm = MaxMidField(lr, constant_direction(g, v), signed=True)
    return project_st(assemble_maxmid(mm)).norm_sq() / nsq


def fixed_direction_mode_value(grid: Grid, v) -> np.ndarray:
    """Per-mode value ``3 c^2 (1 - c^2)`` with ``c = v . xi_hat``; zero on null modes."""
    v = _unit(v)
    c = sum(v[a] * grid.xi_hat[a] for a in range(3))
    return np.where(grid.null_mask, 0.0, 3.0 * c**2 * (1.0 - c**2))


def diag_component_bound_check(S: SymMatrixField, v, strain_tol: float = 1e-8) -> float:
    """``|v^T S v|^2 / |S|^2`` for a strain field ``S`` and constant unit ``v``; at most 1/2."""
    v = _unit(v)
    nrm = S.norm()
    if nrm == 0:
        return 0.0
    tr_res, con_res = check_strain_characterization(S)
    if max(tr_res, con_res) > strain_tol:
        raise PreconditionError("input is not a strain field", residual=max(tr_res, con_res))
    full = S.physical().full()
    vsv = np.einsum("i,ij...,j->...", v, full, v)
    return float(np.mean(np.abs(vsv) ** 2)) / nrm**2


def _hermitian_amplitudes(grid: Grid, support: np.ndarray, seed, random_phase: bool) -> np.ndarray:
    """Hermitian-symmetric spectrum with unit-order amplitudes on ``support``."""
    if random_phase:
        rng = np.random.default_rng(seed)
        a = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
    else:
        a = np.ones(grid.shape, dtype=np.complex128)
    a = np.where(support, a, 0.0)
    return 0.5 * (a + np.conj(negate_modes(a, tuple(range(grid.d)))))


def _shell_support(grid: Grid, eps: float, v: np.ndarray) -> np.ndarray:
    c = sum(v[a] * grid.xi_hat[a] for a in range(3))
    c2 = np.broadcast_to(c**2, grid.shape)
    keep = (np.abs(c2 - 0.5) < eps / 2) & ~grid.null_mask & ~grid.nyquist_mask
    return keep


def _min_shell_n(grid: Grid, eps: float, v: np.ndarray) -> int | None:
    for n in range(grid.n + 2, 514, 2):
        if _shell_support(make_grid(3, n, grid.L), eps, v).any():
            return n
    return None


def strain_near_maximizer(grid: Grid, eps: float, v=_E3, seed: int | None = 0) -> SymMatrixField:
    """Strain field whose ``v v^T`` component nearly saturates the one-half bound.

    Spectrum on ``{|(v . xi_hat)^2 - 1/2| < eps/2}`` with velocity amplitude
    ``v - c xi_hat``, so that every mode reaches ``2 c^2 (1 - c^2) >= (1 - eps^2) / 2``.
    """
    if not 0 < eps < 1:
        raise ConfigurationError("eps must lie in (0, 1)")
    v = _unit(v)
    support = _shell_support(grid, eps, v)
    if not support.any():
        raise ResolutionError("shell has no modes at this resolution", min_n=_min_shell_n(grid, eps, v))
    a = _hermitian_amplitudes(grid, support, seed, True)
    xh = grid.xi_hat
    c = sum(v[k] * xh[k] for k in range(3))
    u_hat = np.stack([a * (v[k] - c * xh[k]) for k in range(3)])
    # sym_grad (-Delta)^(-1/2) u per mode is i (x u^T + u x^T) / 2
    comps = [0.5j * (xh[i] * u_hat[j] + xh[j] * u_hat[i]) for i, j in sym_pairs(3)]
    S = SymMatrixField(grid, SPECTRAL, np.stack(comps))
    return S.physical().as_real()


# ------------------------------------------------------------ near maximizers


def _axis_rotation(v: np.ndarray) -> np.ndarray:
    """Rotation ``R`` with ``R e3 = v``; signed permutations for coordinate axes."""
    ax = np.flatnonzero(np.abs(v) > 1 - 1e-15)
    if ax.size == 1:
        a = int(ax[0])
        s = np.sign(v[a])
        perm = {2: (0, 1, 2), 0: (1, 2, 0), 1: (2, 0, 1)}[a]
        R = np.zeros((3, 3))
        for col, row in enumerate(perm):
            R[row, col] = 1.0
        return R @ np.diag([s, 1.0, s])
    k = np.cross(_E3, v)
    s, c = np.linalg.norm(k), v[2]
    k = k / s
    Kx = np.array([[0, -k[2], k[1]], [k[2], 0, -k[0]], [-k[1], k[0], 0]])
    return np.eye(3) + s * Kx + (1 - c) * Kx @ Kx


def gaussian_family_frame(v=_E3) -> np.ndarray:
    """Columns ``(v1, v2, v3)``: two narrow spectral axes and the concentration axis at 45 degrees to ``v``."""
    base = np.array([[1.0, 0.0, 0.0], [0.0, -1.0, 1.0], [0.0, 1.0, 1.0]]).T
    base[:, 1:] /= np.sqrt(2.0)
    return _axis_rotation(_unit(v)) @ base


def gaussian_amplitude(grid: Grid, n_param: float, v=_E3, tail: float = 40.0) -> np.ndarray:
    """Periodised physical Gaussian whose transform is ``exp(-n (v1.xi)^2 - n (v2.xi)^2 - (v3.xi)^2 / n)``.

    The physical profile is ``exp(-pi^2 (n (v3.x)^2 + ((v1.x)^2 + (v2.x)^2) / n))``;
    it is summed over every periodic image within ``tail`` e-folds, so the
    samples are strictly positive wherever they do not underflow.
    """
    F = gaussian_family_frame(v)
    narrow, wide = np.pi**2 * n_param, np.pi**2 / n_param
    A = narrow * np.outer(F[:, 2], F[:, 2]) + wide * (np.outer(F[:, 0], F[:, 0]) + np.outer(F[:, 1], F[:, 1]))
    L = grid.L
    x = [grid.coords(a) for a in range(3)]
    half = np.full(3, L / 2)
    radius = np.sqrt(3.0) * L / 2
    slab = np.abs(F[:, 2]) @ half
    # an image is skipped when q > tail on the whole cell, using q >= wide |y|^2 and q >= narrow (v3.y)^2
    J = int(np.ceil((np.sqrt(tail / wide) + radius) / L)) + 1
    rng_j = np.arange(-J, J + 1)
    out = np.zeros(grid.shape)
    for j in np.array(np.meshgrid(rng_j, rng_j, rng_j, indexing="ij")).reshape(3, -1).T:
        y0 = half + j * L
        if wide * max(np.linalg.norm(y0) - radius, 0.0) ** 2 > tail:
            continue
        if narrow * max(abs(F[:, 2] @ y0) - slab, 0.0) ** 2 > tail:
            continue
        y = [x[a] + j[a] * L for a in range(3)]
        q = sum(A[a, b] * y[a] * y[b] for a in range(3) for b in range(3))
        out += np.exp(-q)
    return out


def near_maximizer(
    grid: Grid,
    eps: float = 0.1,
    kind: str = "shell",
    v_axis=_E3,
    seed: int | None = 0,
    n_param: float = 64.0,
    random_phase: bool = True,
) -> MaxMidField:
    """Amplitude families for a fixed direction ``v_axis`` whose value approaches 3/4.

    ``shell``: spectrum on ``{|(v . xi_hat)^2 - 1/2| < eps/2}``; the amplitude
    has zero mean and is therefore signed.
    ``gaussian``: periodised anisotropic Gaussian with concentration ``n_param``;
    strictly positive.
    Both are normalised to ``|lam| = 1``.
    """
    if grid.d != 3:
        raise UsageError("near maximizers are constructed for d = 3")
    v = _unit(v_axis)
    if kind == "shell":
        if not 0 < eps < 1:
            raise ConfigurationError("eps must lie in (0, 1)")
        support = _shell_support(grid, eps, v)
        if not support.any():
            raise ResolutionError("shell has no modes at this resolution", min_n=_min_shell_n(grid, eps, v))
        lam_hat = _hermitian_amplitudes(grid, support, seed, random_phase)
        lam = ScalarField(grid, SPECTRAL, lam_hat[None]).physical().as_real()
        signed = True
    elif kind == "gaussian":
        if n_param <= 0:
            raise ConfigurationError("n_param must be positive")
        lam = ScalarField(grid, PHYSICAL, gaussian_amplitude(grid, n_param, v)[None].astype(np.complex128))
        signed = False
    else:
        raise ConfigurationError(f"unknown near-maximizer kind {kind!r}")
    lam = lam * (1.0 / lam.norm())
    return MaxMidField(lam, constant_direction(grid, v), signed=signed)


# ------------------------------------------------------------ supremum estimation


class _StProjector:
    """Strain projection of real physical component arrays through real FFTs."""

    def __init__(self, grid: Grid):
        n, L = grid.n, grid.L
        k_full = np.fft.fftfreq(n, 1.0 / n)
        k_half = np.fft.rfftfreq(n, 1.0 / n)
        axes = []
        for a, k in enumerate((k_full, k_full, k_half)):
            f = (k / L).copy()
            f[np.abs(k) == n // 2] = 0.0
            shp = [1, 1, 1]
            shp[a] = f.size
            axes.append(f.reshape(shp))
        sq = axes[0] ** 2 + axes[1] ** 2 + axes[2] ** 2
        inv = np.where(sq > 0, 1.0 / np.sqrt(np.where(sq > 0, sq, 1.0)), 0.0)
        self.x = [ax * inv for ax in axes]
        self.idx = sym_index(3)
        self.weights = SymMatrixField.weights(3)

    def __call__(self, comps: np.ndarray) -> np.ndarray:
        Mh = np.fft.rfftn(comps, axes=(1, 2, 3), norm="forward")
        x, idx = self.x, self.idx
        w = [sum(Mh[idx[i, j]] * x[j] for j in range(3)) for i in range(3)]
        q = sum(x[i] * w[i] for i in range(3))
        wp = [w[i] - q * x[i] for i in range(3)]
        out = np.stack([x[i] * wp[j] + wp[i] * x[j] for i, j in sym_pairs(3)])
        return np.fft.irfftn(out, s=comps.shape[1:], axes=(1, 2, 3), norm="forward")

    def norm_sq(self, comps: np.ndarray) -> float:
        return float(self.weights @ np.sum(comps.reshape(comps.shape[0], -1) ** 2, axis=1)) / comps[0].size


def _quad_form(comps: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Pointwise ``v^T G v`` from upper-triangular components."""
    out = np.zeros(comps.shape[1:])
    for c, (i, j) in enumerate(sym_pairs(3)):
        out += (1.0 if i == j else 2.0) * comps[c] * v[i] * v[j]
    return out


def _min_eigvec(G: np.ndarray, constraint: str) -> np.ndarray:
    """Pointwise unit minimiser of ``v^T G v`` for component arrays ``G`` of shape ``(6, *shape)``."""
    flat = np.ascontiguousarray(G.reshape(6, -1))
    out = np.empty((3, flat.shape[1]))
    if constraint == "plane":
        K.min_eigvec_plane(flat, out)
    else:
        K.min_eigvec3(flat, out)
    return out.reshape(3, *G.shape[1:])


@dataclass
class AscentTrace:
    """Per-iteration record of one restart."""

    objective: list[float] = dc_field(default_factory=list)
    step_size: list[float] = dc_field(default_factory=list)
    converged: bool = False
    reason: str = ""

    def rows(self):
        return [(i, o, s) for i, (o, s) in enumerate(zip(self.objective, self.step_size))]


@dataclass(eq=False)
class SupremumEstimate:
    """Best objective over restarts, with traces and the maximizing fields."""

    value: float
    traces: list[AscentTrace]
    best: MaxMidField
    constraint: str
    grid_meta: dict
    empirical: bool = True
    notes: list[str] = dc_field(default_factory=list)

    @property
    def iterates(self) -> list[float]:
        return max(self.traces, key=lambda t: t.objective[-1]).objective

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "constraint": self.constraint,
            "empirical_estimate": self.empirical,
            "restarts": len(self.traces),
            "per_restart_final": [t.objective[-1] for t in self.traces],
            "per_restart_traces": [
                {"objective": t.objective, "step_size": t.step_size, "converged": t.converged, "reason": t.reason}
                for t in self.traces
            ],
            "grid": self.grid_meta,
            "notes": self.notes,
        }


CONSTRAINTS = ("free", "fixed", "plane")


def _initial_state(grid: Grid, rng: np.random.Generator, constraint: str, v_fixed: np.ndarray):
    seed = int(rng.integers(2**31))
    lam = np.abs(random_field(grid, "scalar", 1.0, seed).data[0].real)
    if constraint == "fixed":
        v = np.broadcast_to(v_fixed.reshape(3, 1, 1, 1), (3, *grid.shape)).copy()
    else:
        v = random_field(grid, "vector", 1.0, seed + 1).data.real
        if constraint == "plane":
            v[0] = 0.0
        v /= np.maximum(np.sqrt(np.sum(v**2, axis=0)), 1e-300)
    lam /= np.sqrt(np.mean(lam**2))
    return lam, v


def ascend(
    proj: _StProjector,
    lam: np.ndarray,
    v: np.ndarray,
    constraint: str = "free",
    max_iters: int = 500,
    accept_tol: float = 1e-12,
    rel_tol: float = 1e-9,
):
    """Alternating monotone ascent from ``(lam, v)``; returns ``(lam, v, trace)``.

    Both half-steps maximise the linear minorant ``<P_st(A_old), A>`` of the
    convex objective ``|P_st A|^2``: the direction step takes the pointwise
    minimum eigenvector of ``G = P_st(A)`` and the amplitude step takes
    ``h_+ / |h_+|`` with ``h = -3 v^T G v / sqrt(6)``.
    """
    trace = AscentTrace()
    A = maxmid_components(lam, v)
    G = proj(A)
    J = proj.norm_sq(G)
    trace.objective.append(J)
    trace.step_size.append(0.0)
    for _ in range(max_iters):
        v_new = v
        if constraint != "fixed":
            v_new = _min_eigvec(G, constraint)
            G = proj(maxmid_components(lam, v_new))
        h = -3.0 / SQRT6 * _quad_form(G, v_new)
        hp = np.maximum(h, 0.0)
        nh = np.sqrt(np.mean(hp**2))
        if nh == 0:
            trace.reason = "amplitude collapsed to zero"
            break
        lam_new = hp / nh
        G_new = proj(maxmid_components(lam_new, v_new))  # objective and next minorant
        J_new = proj.norm_sq(G_new)
        if J_new < J + accept_tol:
            trace.converged = True
            trace.reason = "increase below acceptance threshold"
            break
        A_new = maxmid_components(lam_new, v_new)
        step = np.sqrt(proj.norm_sq(A_new - A))
        rel = (J_new - J) / max(J, np.finfo(float).tiny)
        lam, v, J, G, A = lam_new, v_new, J_new, G_new, A_new
        trace.objective.append(J)
        trace.step_size.append(float(step))
        if rel < rel_tol:
            trace.converged = True
            trace.reason = "relative change below tolerance"
            break
    else:
        trace.reason = "iteration limit"
    return lam, v, trace


def estimate_supremum(
    grid: Grid,
    restarts: int = 20,
    max_iters: int = 500,
    constraint: str = "free",
    v_fixed=_E3,
    seed: int = 0,
    accept_tol: float = 1e-12,
    rel_tol: float = 1e-9,
    init: list[tuple[np.ndarray, np.ndarray]] | None = None,
) -> SupremumEstimate:
    """Estimate the supremum of ``J(lam, v)`` over ``lam >= 0`` and unit ``v``.

    ``constraint`` is ``free`` (any unit field), ``fixed`` (``v = v_fixed``
    everywhere) or ``plane`` (``v`` confined to the x2-x3 plane).  Extra
    starting points may be passed through ``init``.  The returned value is an
    empirical lower estimate at this resolution.
    """
    if grid.d != 3:
        raise UsageError("supremum estimation needs d = 3")
    if constraint not in CONSTRAINTS:
        raise ConfigurationError(f"constraint must be one of {CONSTRAINTS}")
    if restarts < 1 or max_iters < 1:
        raise ConfigurationError("restarts and max_iters must be positive")
    v_fixed = _unit(v_fixed)
    proj = _StProjector(grid)
    rng = np.random.default_rng(seed)
    starts = [_initial_state(grid, rng, constraint, v_fixed) for _ in range(restarts)]
    starts += list(init or [])
    best = None
    traces = []
    for lam0, v0 in starts:
        lam, v, tr = ascend(proj, lam0, v0, constraint, max_iters, accept_tol, rel_tol)
        traces.append(tr)
        if best is None or tr.objective[-1] > best[0]:
            best = (tr.objective[-1], lam, v)
    value, lam, v = best
    mm = MaxMidField(
        ScalarField(grid, PHYSICAL, lam[None].astype(np.complex128)),
        VectorField(grid, PHYSICAL, v.astype(np.complex128)),
    )
    notes = []
    if constraint == "plane":
        notes.append(
            "directions confined to a plane: the value stays below one, so no max-mid field "
            "in the strain space was found" if value < 1 - 1e-6 else "value reached one within 1e-6"
        )
    return SupremumEstimate(
        value=float(value),
        traces=traces,
        best=mm,
        constraint=constraint,
        grid_meta={"d": grid.d, "n": grid.n, "L": grid.L},
        empirical=constraint != "fixed",
        notes=notes,
    )


# ------------------------------------------------------------ rank one and eigen gap


def rank_one_value(w: VectorField) -> float:
    """``(3/2) |P_st(w w^T)|^2 / |w|_{L^4}^4`` for a real vector field ``w``."""
    if w.grid.d != 3:
        raise UsageError("rank_one_value needs d = 3")
    wr = w.physical().data.real
    l4 = float(np.mean(np.sum(wr**2, axis=0) ** 2))
    if l4 == 0:
        raise PreconditionError("rank_one_value undefined for a zero field")
    comps = np.stack([wr[i] * wr[j] for i, j in sym_pairs(3)])
    P = project_st(SymMatrixField(w.grid, PHYSICAL, comps.astype(np.complex128)))
    return 1.5 * P.norm_sq() / l4


def rank_one_from_maxmid(mm: MaxMidField) -> VectorField:
    """``w = sqrt(lam) v``."""
    lam, v = mm.arrays()
    return VectorField(mm.grid, PHYSICAL, (np.sqrt(np.maximum(lam, 0.0)) * v).astype(np.complex128))


@dataclass(frozen=True)
class EigenGapResult:
    lhs: float
    rhs: float
    holds: bool
    lhs_plain: float
    holds_plain: bool


def eigen_gap_check(S: SymMatrixField, r: float, strain_tol: float = 1e-8, slack: float = 1e-10) -> EigenGapResult:
    """``|lam3 - max(lam2, 0)| >= (1 - r) / sqrt(2) |S|`` and its ``lam3 - lam2`` variant."""
    if not 0 <= r < 1:
        raise ConfigurationError("r must lie in [0, 1)")
    nrm = S.norm()
    if nrm == 0:
        return EigenGapResult(0.0, 0.0, True, 0.0, True)
    tr_res, con_res = check_strain_characterization(S)
    if max(tr_res, con_res) > strain_tol:
        raise PreconditionError("input is not a strain field", residual=max(tr_res, con_res))
    vals = eigen_decompose_field(S).values
    lhs = float(np.sqrt(np.mean((vals[2] - np.maximum(vals[1], 0.0)) ** 2)))
    plain = float(np.sqrt(np.mean((vals[2] - vals[1]) ** 2)))
    rhs = float((1.0 - r) / np.sqrt(2.0) * nrm)
    return EigenGapResult(lhs, rhs, bool(lhs >= rhs - slack), plain, bool(plain >= rhs - slack))


__all__ = [
    "AscentTrace",
    "CONSTRAINTS",
    "EigenField",
    "EigenGapResult",
    "MaxMidField",
    "SupremumEstimate",
    "ascend",
    "assemble_maxmid",
    "constant_direction",
    "diag_component_bound_check",
    "eigen_decompose_field",
    "eigen_gap_check",
    "estimate_supremum",
    "fixed_direction_mode_value",
    "fixed_direction_value",
    "gaussian_amplitude",
    "gaussian_family_frame",
    "maxmid_components",
    "maxmid_objective",
    "near_maximizer",
    "rank_one_from_maxmid",
    "rank_one_value",
    "strain_near_maximizer",
]
