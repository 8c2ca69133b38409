"""Periodic grids, sampled fields, discrete Fourier transforms and multipliers.

Conventions
-----------
* The box is ``[0, L)^d`` sampled at ``x = i L / n``.
* Mode indices run over ``{-n/2+1, ..., n/2}`` and the frequency of mode ``k``
  is ``xi = k / L``.  Derivatives multiply by ``2 pi i xi``.
* The forward transform is normalised so that a constant ``c`` has mode-0
  coefficient ``c``.  Parseval then reads
  ``mean_x |f(x)|^2 == sum_k |f_hat(k)|^2``.
* Every multiplier uses the *effective* frequency, in which the component
  along an axis is zeroed on that axis's Nyquist plane.  Odd-order
  derivatives therefore vanish there, real fields stay real, and all
  direction-dependent projections see one consistent frequency vector.
  Modes whose effective frequency is zero ("null modes": the zero mode and
  pure-Nyquist corners) are treated like the zero mode.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from functools import cached_property
from typing import ClassVar

import numpy as np

from ._kernels import hermitian_noise
from .errors import ConfigurationError, UsageError

PHYSICAL = "physical"
SPECTRAL = "spectral"
_REPS = (PHYSICAL, SPECTRAL)


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid on ``[0, L)^d`` with ``n`` samples per axis."""

    d: int = 3
    n: int = 32
    L: float = 1.0

    def __post_init__(self):
        if self.d not in (2, 3, 4):
            raise ConfigurationError(f"unsupported dimension d={self.d}; expected 2, 3 or 4")
        if int(self.n) != self.n or self.n % 2 or not 8 <= self.n <= 512:
            raise ConfigurationError(f"n must be an even integer in [8, 512], got {self.n}")
        if not (np.isfinite(self.L) and self.L > 0):
            raise ConfigurationError(f"box length must be positive, got {self.L}")

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n,) * self.d

    @property
    def size(self) -> int:
        return self.n**self.d

    @property
    def dx(self) -> float:
        return self.L / self.n

    @cached_property
    def modes(self) -> np.ndarray:
        """Integer mode indices in transform order, Nyquist stored as ``+n/2``."""
        k = np.fft.fftfreq(self.n, d=1.0 / self.n).astype(np.int64)
        k[self.n // 2] = self.n // 2
        return k

    @cached_property
    def freqs(self) -> np.ndarray:
        """Per-axis frequencies ``k / L`` in transform order."""
        return self.modes / self.L

    @cached_property
    def freqs_eff(self) -> np.ndarray:
        """Per-axis frequencies with the Nyquist entry set to zero."""
        xi = self.freqs.copy()
        xi[self.n // 2] = 0.0
        return xi

    def _bcast(self, vec: np.ndarray, axis: int) -> np.ndarray:
        shape = [1] * self.d
        shape[axis] = self.n
        return vec.reshape(shape)

    def xi(self, axis: int) -> np.ndarray:
        """Effective frequency along ``axis``, shaped for broadcasting."""
        if not 0 <= axis < self.d:
            raise UsageError(f"axis {axis} out of range for d={self.d}")
        return self._bcast(self.freqs_eff, axis)

    @cached_property
    def xi_sq(self) -> np.ndarray:
        """``|xi_eff|^2`` on the full mode array."""
        out = np.zeros(self.shape)
        for a in range(self.d):
            out = out + self.xi(a) ** 2
        return out

    @cached_property
    def null_mask(self) -> np.ndarray:
        """Modes whose effective frequency vanishes."""
        return self.xi_sq == 0.0

    @cached_property
    def nyquist_mask(self) -> np.ndarray:
        """Modes lying on at least one Nyquist plane."""
        m = np.zeros(self.shape, dtype=bool)
        for a in range(self.d):
            m = m | self._bcast(self.modes == self.n // 2, a)
        return m

    @cached_property
    def xi_hat(self) -> tuple[np.ndarray, ...]:
        """Unit effective frequency per component (zero on null modes)."""
        with np.errstate(invalid="ignore", divide="ignore"):
            inv = np.where(self.null_mask, 0.0, 1.0 / np.sqrt(self.xi_sq))
        return tuple(np.broadcast_to(self.xi(a), self.shape) * inv for a in range(self.d))

    @cached_property
    def xi_hat_flat(self) -> np.ndarray:
        """``xi_hat`` stacked and flattened to shape ``(d, N)``."""
        return np.ascontiguousarray(np.stack(self.xi_hat).reshape(self.d, -1))

    @cached_property
    def null_flat(self) -> np.ndarray:
        return np.ascontiguousarray(self.null_mask.reshape(-1))

    @cached_property
    def mode_radius(self) -> np.ndarray:
        """Euclidean norm of the integer mode index ``|k|``."""
        out = np.zeros(self.shape)
        for a in range(self.d):
            out = out + self._bcast(self.modes.astype(float), a) ** 2
        return np.sqrt(out)

    def coords(self, axis: int) -> np.ndarray:
        """Physical coordinate along ``axis``, shaped for broadcasting."""
        return self._bcast(np.arange(self.n) * self.dx, axis)

    def laplacian_symbol(self) -> np.ndarray:
        """Multiplier of ``-Delta``: ``4 pi^2 |xi|^2``."""
        return 4.0 * np.pi**2 * self.xi_sq


def make_grid(d: int = 3, n: int = 32, L: float = 1.0) -> Grid:
    """Validate and build a :class:`Grid`."""
    return Grid(int(d), int(n), float(L))


# ---------------------------------------------------------------- components


def sym_pairs(d: int) -> list[tuple[int, int]]:
    """Upper-triangular ``(i, j)`` pairs in row-major storage order."""
    return [(i, j) for i in range(d) for j in range(i, d)]


def antisym_pairs(d: int) -> list[tuple[int, int]]:
    """Strictly upper-triangular ``(i, j)`` pairs in row-major storage order."""
    return [(i, j) for i in range(d) for j in range(i + 1, d)]


def sym_index(d: int) -> np.ndarray:
    """``idx[i, j]`` gives the storage slot of entry ``(i, j)`` of a symmetric matrix."""
    idx = np.empty((d, d), dtype=int)
    for s, (i, j) in enumerate(sym_pairs(d)):
        idx[i, j] = idx[j, i] = s
    return idx


@dataclass(frozen=True, eq=False)
class Field:
    """Sampled field on a grid.

    ``data`` has shape ``(ncomp, *grid.shape)`` and is complex.  In the
    physical representation it holds point samples, in the spectral
    representation mode coefficients in transform order.
    """

    grid: Grid
    rep: str
    data: np.ndarray = dc_field(repr=False)

    kind: ClassVar[str] = "field"

    def __post_init__(self):
        if self.rep not in _REPS:
            raise UsageError(f"unknown representation {self.rep!r}")
        data = np.asarray(self.data)
        if data.dtype != np.complex128:
            data = data.astype(np.complex128)
        expected = (self.ncomp(self.grid.d), *self.grid.shape)
        if data.shape != expected:
            raise UsageError(f"{type(self).__name__} data shape {data.shape} != {expected}")
        object.__setattr__(self, "data", data)

    @staticmethod
    def ncomp(d: int) -> int:
        raise NotImplementedError

    @classmethod
    def weights(cls, d: int) -> np.ndarray:
        """Per-component weights of the Frobenius inner product."""
        return np.ones(cls.ncomp(d))

    # construction helpers
    @classmethod
    def zeros(cls, grid: Grid, rep: str = PHYSICAL):
        return cls(grid, rep, np.zeros((cls.ncomp(grid.d), *grid.shape), dtype=np.complex128))

    def with_data(self, data: np.ndarray, rep: str | None = None):
        return type(self)(self.grid, self.rep if rep is None else rep, data)

    # representations
    def spectral(self):
        return self if self.rep == SPECTRAL else transform(self, "forward")

    def physical(self):
        return self if self.rep == PHYSICAL else transform(self, "inverse")

    def to_rep(self, rep: str):
        return self.spectral() if rep == SPECTRAL else self.physical()

    # norms
    def norm_sq(self) -> float:
        """Squared L2 norm (mean over points, or sum over modes)."""
        w = self.weights(self.grid.d)
        total = sum(wc * np.vdot(c, c).real for wc, c in zip(w, self.data))
        return total / self.grid.size if self.rep == PHYSICAL else total

    def norm(self) -> float:
        return float(np.sqrt(self.norm_sq()))

    def inner(self, other: "Field") -> float:
        """Real L2 inner product with a field of the same kind and representation."""
        self._check_compatible(other)
        w = self.weights(self.grid.d)
        total = sum(wc * np.vdot(a, b).real for wc, a, b in zip(w, self.data, other.data))
        return total / self.grid.size if self.rep == PHYSICAL else total

    def _check_compatible(self, other):
        if type(other) is not type(self) or other.grid != self.grid or other.rep != self.rep:
            raise UsageError("fields differ in kind, grid or representation")

    # arithmetic
    def __add__(self, other):
        self._check_compatible(other)
        return self.with_data(self.data + other.data)

    def __sub__(self, other):
        self._check_compatible(other)
        return self.with_data(self.data - other.data)

    def __neg__(self):
        return self.with_data(-self.data)

    def __mul__(self, scalar):
        return self.with_data(self.data * scalar)

    __rmul__ = __mul__

    def real_part(self):
        """Physical samples as a real array (imaginary parts dropped)."""
        return self.physical().data.real

    def as_real(self):
        """Physical field with imaginary parts removed."""
        p = self.physical()
        return p.with_data(p.data.real.astype(np.complex128))


@dataclass(frozen=True, eq=False)
class ScalarField(Field):
    kind: ClassVar[str] = "scalar"

    @staticmethod
    def ncomp(d):
        return 1


@dataclass(frozen=True, eq=False)
class VectorField(Field):
    kind: ClassVar[str] = "vector"

    @staticmethod
    def ncomp(d):
        return d


@dataclass(frozen=True, eq=False)
class SymMatrixField(Field):
    """Symmetric matrix field stored as upper-triangular row-major components."""

    kind: ClassVar[str] = "symmatrix"

    @staticmethod
    def ncomp(d):
        return d * (d + 1) // 2

    @classmethod
    def weights(cls, d):
        return np.array([1.0 if i == j else 2.0 for i, j in sym_pairs(d)])

    def entry(self, i: int, j: int) -> np.ndarray:
        return self.data[sym_index(self.grid.d)[i, j]]

    def full(self) -> np.ndarray:
        """Full ``(d, d, *shape)`` array; symmetric by construction."""
        idx = sym_index(self.grid.d)
        return self.data[idx]

    @classmethod
    def from_full(cls, grid: Grid, rep: str, full: np.ndarray):
        """Build from a full matrix array, symmetrising off-diagonal pairs."""
        comps = [full[i, i] if i == j else 0.5 * (full[i, j] + full[j, i]) for i, j in sym_pairs(grid.d)]
        return cls(grid, rep, np.stack(comps))

    def trace(self) -> ScalarField:
        idx = sym_index(self.grid.d)
        tr = sum(self.data[idx[i, i]] for i in range(self.grid.d))
        return ScalarField(self.grid, self.rep, tr[None])


@dataclass(frozen=True, eq=False)
class AntiSymMatrixField(Field):
    """Anti-symmetric matrix field stored as strictly upper-triangular components."""

    kind: ClassVar[str] = "antisymmatrix"

    @staticmethod
    def ncomp(d):
        return d * (d - 1) // 2

    @classmethod
    def weights(cls, d):
        return np.full(cls.ncomp(d), 2.0)

    def full(self) -> np.ndarray:
        d = self.grid.d
        out = np.zeros((d, d, *self.grid.shape), dtype=np.complex128)
        for s, (i, j) in enumerate(antisym_pairs(d)):
            out[i, j] = self.data[s]
            out[j, i] = -self.data[s]
        return out

    @classmethod
    def from_full(cls, grid: Grid, rep: str, full: np.ndarray):
        comps = [0.5 * (full[i, j] - full[j, i]) for i, j in antisym_pairs(grid.d)]
        return cls(grid, rep, np.stack(comps))


FIELD_KINDS = {c.kind: c for c in (ScalarField, VectorField, SymMatrixField, AntiSymMatrixField)}


# ---------------------------------------------------------------- transforms


def _axes(grid: Grid) -> tuple[int, ...]:
    return tuple(range(1, grid.d + 1))


def transform(field: Field, direction: str) -> Field:
    """Forward (physical -> spectral) or inverse (spectral -> physical) transform."""
    if direction == "forward":
        if field.rep != PHYSICAL:
            raise UsageError("forward transform needs a physical-representation field")
        data = np.fft.fftn(field.data, axes=_axes(field.grid), norm="forward")
        return field.with_data(data, SPECTRAL)
    if direction == "inverse":
        if field.rep != SPECTRAL:
            raise UsageError("inverse transform needs a spectral-representation field")
        data = np.fft.ifftn(field.data, axes=_axes(field.grid), norm="forward")
        return field.with_data(data, PHYSICAL)
    raise UsageError(f"direction must be 'forward' or 'inverse', got {direction!r}")


def _require_spectral(field: Field):
    if field.rep != SPECTRAL:
        raise UsageError("operation needs a spectral-representation field")


def derivative(field: Field, axis: int) -> Field:
    """Partial derivative along ``axis``; multiplier ``2 pi i xi_axis``."""
    _require_spectral(field)
    if not 0 <= axis < field.grid.d:
        raise UsageError(f"axis {axis} out of range for d={field.grid.d}")
    return field.with_data(field.data * (2j * np.pi * field.grid.xi(axis)))


def inverse_laplacian_symbol(grid: Grid, order: float) -> np.ndarray:
    """Multiplier of ``(-Delta)^(-order)`` with null modes sent to zero."""
    lap = grid.laplacian_symbol()
    with np.errstate(divide="ignore"):
        out = np.where(grid.null_mask, 0.0, lap ** (-float(order)))
    return out


def inverse_laplacian(field: Field, order: float = 1.0) -> Field:
    """Apply ``(-Delta)^(-order)`` for order in {1/2, 1, 3/2} (any positive order works)."""
    _require_spectral(field)
    if not order > 0:
        raise UsageError(f"order must be positive, got {order}")
    return field.with_data(field.data * inverse_laplacian_symbol(field.grid, order))


def negate_modes(arr: np.ndarray, axes: tuple[int, ...]) -> np.ndarray:
    """Return ``a[-k]`` for an array indexed by modes in transform order."""
    out = arr
    for ax in axes:
        out = np.roll(np.flip(out, axis=ax), 1, axis=ax)
    return out


def random_field(
    grid: Grid,
    kind: str = "symmatrix",
    spectrum_decay: float = 0.0,
    seed: int | None = None,
    rep: str = PHYSICAL,
) -> Field:
    """Seeded real random field with mode amplitudes proportional to ``(1+|k|)^-decay``.

    Coefficients are complex Gaussians paired with their conjugates at ``-k`` so
    the physical field is real; Nyquist planes are left empty.
    """
    if kind not in FIELD_KINDS:
        raise UsageError(f"unknown field kind {kind!r}")
    if spectrum_decay < 0:
        raise UsageError("spectrum_decay must be non-negative")
    cls = FIELD_KINDS[kind]
    rng = np.random.default_rng(seed)
    data = np.zeros((cls.ncomp(grid.d), grid.size), dtype=np.complex128)
    hermitian_noise(rng, grid.n, grid.d, float(spectrum_decay), data)
    out = cls(grid, SPECTRAL, data.reshape((-1, *grid.shape)))
    return out.to_rep(rep)
