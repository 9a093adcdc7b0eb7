"""Composite states and density operators on named subsystems.

Amplitudes are stored as flat 1-D arrays, row-major over the declared
subsystem order: basis index ``(i_0, ..., i_{k-1})`` lives at flat offset
``i_0 * d_1 * ... * d_{k-1} + ... + i_{k-1}``. All conversion between the
flat layout and the per-axis view goes through :meth:`CompositeState.axis_view`
and :meth:`DensityOperator.axis_view`, so index arithmetic is defined in
exactly one place.

All state and operator objects are immutable; operations return new objects.
"""

from __future__ import annotations

import math
import string
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import (
    DimensionMismatch,
    InvalidSpec,
    NameCollision,
    UnknownSubsystem,
    ZeroNorm,
)
from .tolerances import (
    EIGENVALUE_FLOOR,
    HERMITICITY_ATOL,
    NORM_ATOL,
    TRACE_ATOL,
    ZERO_NORM,
)

__all__ = [
    "SubsystemSpec",
    "CompositeState",
    "DensityOperator",
    "tensor",
    "partial_trace",
    "project",
    "inner_product",
    "normalize",
    "purity",
    "fix_global_phase",
]


def _frozen_complex(values, expected_size: int | None = None) -> np.ndarray:
    """Return a read-only complex128 copy of ``values``."""
    arr = np.array(values, dtype=np.complex128)
    if expected_size is not None and arr.size != expected_size:
        raise DimensionMismatch(
            f"expected {expected_size} amplitudes, got {arr.size}"
        )
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class SubsystemSpec:
    """A named tensor factor with a fixed dimension."""

    name: str
    dimension: int

    def __post_init__(self) -> None:
        if not self.name:
            raise InvalidSpec("subsystem name must be non-empty")
        if self.dimension < 1:
            raise DimensionMismatch(
                f"subsystem {self.name!r} has dimension {self.dimension}; need >= 1"
            )


def _check_unique_names(subsystems: tuple[SubsystemSpec, ...]) -> None:
    names = [s.name for s in subsystems]
    if len(set(names)) != len(names):
        raise NameCollision(f"duplicate subsystem names in {names}")


@dataclass(frozen=True)
class CompositeState:
    """A pure state on an ordered tuple of named subsystems.

    Attributes:
        subsystems: Ordered tensor factors.
        amplitudes: Flat complex amplitudes, row-major over ``subsystems``.
        normalized: If True, the norm is guaranteed to be 1 within
            ``NORM_ATOL`` (checked at construction).
    """

    subsystems: tuple[SubsystemSpec, ...]
    amplitudes: np.ndarray
    normalized: bool = False

    def __post_init__(self) -> None:
        subsystems = tuple(self.subsystems)
        object.__setattr__(self, "subsystems", subsystems)
        _check_unique_names(subsystems)
        dim = math.prod(s.dimension for s in subsystems)
        amplitudes = _frozen_complex(np.ravel(self.amplitudes), dim)
        object.__setattr__(self, "amplitudes", amplitudes)
        if self.normalized and abs(self.norm() - 1.0) > NORM_ATOL:
            raise InvalidSpec(
                f"state flagged normalized has norm {self.norm()!r}"
            )

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(s.dimension for s in self.subsystems)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.subsystems)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def index_of(self, name: str) -> int:
        for i, s in enumerate(self.subsystems):
            if s.name == name:
                return i
        raise UnknownSubsystem(
            f"no subsystem {name!r}; have {list(self.names)}"
        )

    def axis_view(self) -> np.ndarray:
        """Amplitudes reshaped to one axis per subsystem (read-only view)."""
        return self.amplitudes.reshape(self.dims)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def to_density(self) -> DensityOperator:
        """Outer product |psi><psi| as a density operator.

        Raises:
            InvalidSpec: If the state is not unit-norm (the result would not
                have unit trace).
        """
        if abs(self.norm() - 1.0) > NORM_ATOL:
            raise InvalidSpec(
                f"cannot build a density operator from a state of norm {self.norm()!r}"
            )
        mat = np.outer(self.amplitudes, np.conj(self.amplitudes))
        return DensityOperator(self.subsystems, mat)


@dataclass(frozen=True)
class DensityOperator:
    """A density operator on an ordered tuple of named subsystems.

    Construction checks Hermiticity, unit trace and positivity (smallest
    eigenvalue above ``EIGENVALUE_FLOOR``).
    """

    subsystems: tuple[SubsystemSpec, ...]
    matrix: np.ndarray

    def __post_init__(self) -> None:
        subsystems = tuple(self.subsystems)
        object.__setattr__(self, "subsystems", subsystems)
        _check_unique_names(subsystems)
        dim = math.prod(s.dimension for s in subsystems)
        mat = np.array(self.matrix, dtype=np.complex128)
        if mat.shape != (dim, dim):
            raise DimensionMismatch(
                f"expected a {dim}x{dim} matrix, got shape {mat.shape}"
            )
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)
        herm_defect = float(np.max(np.abs(mat - mat.conj().T))) if dim else 0.0
        if herm_defect > HERMITICITY_ATOL:
            raise InvalidSpec(f"matrix is not Hermitian (defect {herm_defect:g})")
        trace = complex(np.trace(mat))
        if abs(trace - 1.0) > TRACE_ATOL:
            raise InvalidSpec(f"trace is {trace!r}, expected 1")
        smallest = float(np.min(np.linalg.eigvalsh(mat)))
        if smallest < EIGENVALUE_FLOOR:
            raise InvalidSpec(f"smallest eigenvalue {smallest:g} is negative")

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(s.dimension for s in self.subsystems)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.subsystems)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def axis_view(self) -> np.ndarray:
        """Matrix reshaped to (row axes..., column axes...), one per subsystem."""
        return self.matrix.reshape(self.dims + self.dims)


def tensor(a: CompositeState, b: CompositeState) -> CompositeState:
    """Tensor product of two composite states.

    The result carries ``a``'s subsystems followed by ``b``'s; amplitudes
    follow the row-major layout, so ``tensor(a, b).amplitudes == np.kron(...)``.

    Raises:
        NameCollision: If the operands share a subsystem name.
    """
    overlap = set(a.names) & set(b.names)
    if overlap:
        raise NameCollision(f"subsystem names {sorted(overlap)} appear on both sides")
    return CompositeState(
        a.subsystems + b.subsystems,
        np.kron(a.amplitudes, b.amplitudes),
        normalized=a.normalized and b.normalized,
    )


def partial_trace(rho: DensityOperator, keep: Iterable[str]) -> DensityOperator:
    """Trace out every subsystem not named in ``keep``.

    Args:
        rho: Density operator on two or more subsystems (one is fine too).
        keep: Names of the subsystems to retain. The result keeps them in
            their original declaration order, regardless of iteration order.

    Returns:
        Density operator on the kept subsystems.

    Raises:
        UnknownSubsystem: If a name in ``keep`` is not present.
        InvalidSpec: If ``keep`` is empty.
    """
    keep_set = set(keep)
    if not keep_set:
        raise InvalidSpec("must keep at least one subsystem")
    names = rho.names
    for name in keep_set:
        if name not in names:
            raise UnknownSubsystem(f"no subsystem {name!r}; have {list(names)}")
    n = len(rho.subsystems)
    letters = string.ascii_letters
    if 2 * n > len(letters):
        raise DimensionMismatch(f"too many subsystems ({n}) for partial_trace")
    row = list(letters[:n])
    col = list(letters[n : 2 * n])
    kept_axes = [i for i, s in enumerate(rho.subsystems) if s.name in keep_set]
    for i in range(n):
        if i not in kept_axes:
            col[i] = row[i]  # repeated index: summed by einsum
    out = "".join(row[i] for i in kept_axes) + "".join(col[i] for i in kept_axes)
    subscript = "".join(row) + "".join(col) + "->" + out
    reduced = np.einsum(subscript, rho.axis_view())
    kept_subsystems = tuple(rho.subsystems[i] for i in kept_axes)
    d = math.prod(s.dimension for s in kept_subsystems)
    return DensityOperator(kept_subsystems, reduced.reshape(d, d))


def project(psi: CompositeState, subsystem: str, ket) -> CompositeState:
    """Contract one subsystem of ``psi`` against ``<ket|``.

    Returns the (generally unnormalized) state on the remaining subsystems;
    its squared norm is the probability of finding ``ket`` there.

    Raises:
        UnknownSubsystem: If ``subsystem`` is not present.
        DimensionMismatch: If ``ket`` has the wrong length.
    """
    axis = psi.index_of(subsystem)
    vec = np.asarray(ket, dtype=np.complex128).ravel()
    if vec.size != psi.subsystems[axis].dimension:
        raise DimensionMismatch(
            f"ket of length {vec.size} against subsystem {subsystem!r} of "
            f"dimension {psi.subsystems[axis].dimension}"
        )
    remaining = np.tensordot(np.conj(vec), psi.axis_view(), axes=([0], [axis]))
    kept = psi.subsystems[:axis] + psi.subsystems[axis + 1 :]
    return CompositeState(kept, remaining.ravel(), normalized=False)


def inner_product(a: CompositeState, b: CompositeState) -> complex:
    """<a|b> for two states on the same ordered subsystems."""
    if a.subsystems != b.subsystems:
        raise DimensionMismatch(
            f"subsystems differ: {list(a.names)} vs {list(b.names)}"
        )
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def normalize(psi: CompositeState) -> tuple[CompositeState, float]:
    """Rescale to unit norm.

    Returns:
        ``(unit_state, original_norm)``.

    Raises:
        ZeroNorm: If the norm is numerically zero.
    """
    n = psi.norm()
    if n <= ZERO_NORM:
        raise ZeroNorm(f"cannot normalize a state of norm {n:g}")
    return (
        CompositeState(psi.subsystems, psi.amplitudes / n, normalized=True),
        n,
    )


def purity(rho: DensityOperator) -> float:
    """Tr(rho^2); equals 1 exactly for pure states."""
    return float(np.real(np.einsum("ij,ji->", rho.matrix, rho.matrix)))


def fix_global_phase(psi: CompositeState) -> CompositeState:
    """Rotate a global phase so the largest-magnitude amplitude is real positive.

    Ties break toward the lowest flat index. A zero state is returned as-is.
    """
    k = int(np.argmax(np.abs(psi.amplitudes)))
    pivot = psi.amplitudes[k]
    if abs(pivot) <= ZERO_NORM:
        return psi
    phase = np.conj(pivot) / abs(pivot)
    return CompositeState(
        psi.subsystems, psi.amplitudes * phase, normalized=psi.normalized
    )
