"""Discretized momentum-space wavepackets for the macroscopic beam splitters.

A beam splitter's momentum coordinate is modeled by a Gaussian wavefunction
sampled on a uniform grid. Reflection recoil acts as a momentum translation,
implemented spectrally (a phase ramp in the conjugate domain) so it is
exactly unitary and composes exactly. The central quantity is the recoil
overlap between a packet and its shifted copy: for a macroscopic body
(momentum width sigma much larger than the recoil) that overlap is ~1 and
the recoil carries away no which-way information.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GridMismatch, GridTooNarrow, InvalidSpec, ShiftTooLarge
from .tolerances import GRID_SIGMA_SPAN, PACKET_NORM_ATOL

__all__ = [
    "MomentumGrid",
    "Wavepacket",
    "gaussian",
    "default_grid",
    "shift",
    "overlap",
    "mean_momentum",
]


@dataclass(frozen=True)
class MomentumGrid:
    """Uniform momentum grid: points p_min + i*spacing for i in [0, n_points)."""

    p_min: float
    p_max: float
    n_points: int

    def __post_init__(self) -> None:
        if not self.p_min < self.p_max:
            raise InvalidSpec(
                f"need p_min < p_max, got [{self.p_min}, {self.p_max}]"
            )
        if self.n_points < 8:
            raise InvalidSpec(f"n_points must be >= 8, got {self.n_points}")

    @property
    def spacing(self) -> float:
        return (self.p_max - self.p_min) / self.n_points

    @property
    def span(self) -> float:
        return self.p_max - self.p_min

    def points(self) -> np.ndarray:
        return self.p_min + self.spacing * np.arange(self.n_points)


@dataclass(frozen=True)
class Wavepacket:
    """Samples psi(p_i) on a grid, discretely normalized: sum |psi|^2 dp = 1."""

    grid: MomentumGrid
    samples: np.ndarray
    p0: float
    sigma: float

    def __post_init__(self) -> None:
        samples = np.array(self.samples, dtype=np.complex128).ravel()
        if samples.size != self.grid.n_points:
            raise InvalidSpec(
                f"{samples.size} samples on a {self.grid.n_points}-point grid"
            )
        if self.sigma <= 0:
            raise InvalidSpec(f"sigma must be positive, got {self.sigma}")
        total = float(np.sum(np.abs(samples) ** 2)) * self.grid.spacing
        if abs(total - 1.0) > PACKET_NORM_ATOL:
            raise InvalidSpec(f"discrete norm^2 is {total!r}, expected 1")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)

    def norm(self) -> float:
        """Discrete L2 norm: sqrt(sum |psi|^2 * spacing)."""
        return float(
            np.sqrt(np.sum(np.abs(self.samples) ** 2) * self.grid.spacing)
        )


def gaussian(grid: MomentumGrid, p0: float, sigma: float) -> Wavepacket:
    """Discretely normalized Gaussian: psi(p) ~ exp(-(p-p0)^2 / (4 sigma^2)).

    |psi|^2 then has mean p0 and standard deviation sigma.

    Raises:
        GridTooNarrow: If the grid does not span [p0 - 8 sigma, p0 + 8 sigma];
            tighter grids would truncate tails enough to corrupt overlaps.
    """
    if sigma <= 0:
        raise InvalidSpec(f"sigma must be positive, got {sigma}")
    if grid.p_min > p0 - GRID_SIGMA_SPAN * sigma or grid.p_max < p0 + GRID_SIGMA_SPAN * sigma:
        raise GridTooNarrow(
            f"grid [{grid.p_min}, {grid.p_max}] must span "
            f"[{p0 - GRID_SIGMA_SPAN * sigma}, {p0 + GRID_SIGMA_SPAN * sigma}] "
            f"(p0 = {p0}, sigma = {sigma})"
        )
    p = grid.points()
    raw = np.exp(-((p - p0) ** 2) / (4.0 * sigma**2)).astype(np.complex128)
    raw /= np.sqrt(np.sum(np.abs(raw) ** 2) * grid.spacing)
    return Wavepacket(grid=grid, samples=raw, p0=p0, sigma=sigma)


def default_grid(p0: float = 0.0, sigma: float = 1.0, n_points: int = 1024) -> MomentumGrid:
    """The standard grid: +/- 10 sigma around p0 (truncation error < 1e-20)."""
    return MomentumGrid(p0 - 10.0 * sigma, p0 + 10.0 * sigma, n_points)


def shift(psi: Wavepacket, dp: float) -> Wavepacket:
    """Translate: returns psi(p - dp), i.e. the packet center moves by +dp.

    Implemented as a phase ramp on the DFT of the samples, which is exactly
    unitary and satisfies shift(shift(psi, a), b) == shift(psi, a + b) to
    rounding error. The grid is periodic, so translations are circular;
    packets built by :func:`gaussian` have edge amplitudes small enough that
    wrap-around is harmless for |dp| within the guard.

    Raises:
        ShiftTooLarge: If |dp| >= span/4.
    """
    if abs(dp) >= psi.grid.span / 4.0:
        raise ShiftTooLarge(
            f"|dp| = {abs(dp)} exceeds a quarter of the grid span {psi.grid.span}"
        )
    n = psi.grid.n_points
    ramp = np.exp(-2j * np.pi * np.fft.fftfreq(n) * (dp / psi.grid.spacing))
    shifted = np.fft.ifft(np.fft.fft(psi.samples) * ramp)
    return Wavepacket(
        grid=psi.grid, samples=shifted, p0=psi.p0 + dp, sigma=psi.sigma
    )


def overlap(a: Wavepacket, b: Wavepacket) -> complex:
    """Discrete inner product <a|b> = sum conj(a) * b * spacing.

    Raises:
        GridMismatch: If the packets live on different grids.
    """
    if a.grid != b.grid:
        raise GridMismatch(f"grids differ: {a.grid} vs {b.grid}")
    return complex(np.vdot(a.samples, b.samples) * a.grid.spacing)


def mean_momentum(psi: Wavepacket) -> float:
    """<p> = sum p |psi(p)|^2 * spacing."""
    p = psi.grid.points()
    return float(np.real(np.sum(p * np.abs(psi.samples) ** 2) * psi.grid.spacing))
