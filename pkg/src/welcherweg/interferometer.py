"""Mach-Zehnder pipeline with beam-splitter recoil and a which-way ancilla.

The single-photon sector is a 2-dimensional path space carried through three
stages: an input beam splitter (whose reflections translate the attached
momentum wavepacket by the recoil), a relative phase on one arm, and an
optional output beam splitter. An optional which-way detector in one arm
flips a 2-dimensional pointer ancilla from "unfired" to a "fired" state whose
overlap with "unfired" is ``gamma`` (gamma=0: perfectly distinguishing
detector; gamma=1: no detector).

The full composite space (path x BS1-grid x BS2-grid x ancilla) is too large
to store densely at default resolution, and never needs to be: every stage
maps a path basis state to at most two branches, each a *product* of a path
state, per-splitter translated wavepackets, and a pointer state. ``evolve``
therefore returns an :class:`EvolvedState` holding those branches; overlaps
between branches are evaluated lazily, and :meth:`EvolvedState.to_state`
materializes the dense composite state when it is small enough.
``evolve_dense`` rebuilds the same evolution with dense operators on the
flattened composite space and serves as an independent cross-check.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import InvalidSpec, ShiftTooLarge
from .tensor import CompositeState, SubsystemSpec, tensor
from .tolerances import (
    DEGENERACY_FLOOR,
    DENSE_ENTRY_CAP,
    PROBABILITY_ATOL,
    UNITARITY_ATOL,
)
from .wavepacket import (
    MomentumGrid,
    Wavepacket,
    default_grid,
    gaussian,
    mean_momentum,
    overlap,
    shift,
)

__all__ = [
    "PacketSpec",
    "BeamSplitterSpec",
    "WhichWayDetectorSpec",
    "InterferometerConfig",
    "OutputProbabilities",
    "PathCoefficients",
    "BeamSplitterMomentum",
    "MomentumTransferReport",
    "EvolvedState",
    "evolve",
    "evolve_dense",
    "output_probabilities",
    "path_coefficients",
    "visibility",
    "momentum_transfer_report",
]

REFLECTED = "reflected"
TRANSMITTED = "transmitted"


@dataclass(frozen=True)
class PacketSpec:
    """Gaussian wavepacket parameters for one beam splitter."""

    p0: float = 0.0
    sigma: float = 1.0
    grid: MomentumGrid | None = None

    def resolved_grid(self) -> MomentumGrid:
        return self.grid if self.grid is not None else default_grid(self.p0, self.sigma)

    def build(self) -> Wavepacket:
        return gaussian(self.resolved_grid(), self.p0, self.sigma)


@dataclass(frozen=True)
class BeamSplitterSpec:
    """Transmission/reflection amplitudes, recoil, and the attached packet.

    ``recoil`` is the momentum magnitude exchanged with the splitter on each
    reflection, in the same (absolute) units as the packet parameters.
    """

    t: complex
    r: complex
    recoil: float = 0.0
    packet: PacketSpec = field(default_factory=PacketSpec)

    def __post_init__(self) -> None:
        object.__setattr__(self, "t", complex(self.t))
        object.__setattr__(self, "r", complex(self.r))
        defect = abs(abs(self.t) ** 2 + abs(self.r) ** 2 - 1.0)
        if defect > UNITARITY_ATOL:
            raise InvalidSpec(
                f"|t|^2 + |r|^2 = {abs(self.t) ** 2 + abs(self.r) ** 2!r}; "
                "beam splitter must be unitary"
            )
        if not math.isfinite(self.recoil):
            raise InvalidSpec(f"recoil must be finite, got {self.recoil}")


@dataclass(frozen=True)
class WhichWayDetectorSpec:
    """A detector in one arm, named relative to the input beam.

    ``gamma`` is the overlap between the detector's "unfired" and "fired"
    pointer states: 0 marks the path perfectly, 1 marks nothing.
    """

    arm: str
    gamma: float

    def __post_init__(self) -> None:
        if self.arm not in (REFLECTED, TRANSMITTED):
            raise InvalidSpec(
                f"arm must be {REFLECTED!r} or {TRANSMITTED!r}, got {self.arm!r}"
            )
        if not 0.0 <= self.gamma <= 1.0:
            raise InvalidSpec(f"gamma must lie in [0, 1], got {self.gamma}")


@dataclass(frozen=True)
class InterferometerConfig:
    """One complete interferometer setup.

    ``bs_out=None`` removes the output splitter entirely (the arms become the
    output ports). ``phase`` is the relative phase, in radians, applied to
    the arm that transmission from port 1 feeds.
    """

    bs_in: BeamSplitterSpec
    bs_out: BeamSplitterSpec | None = None
    phase: float = 0.0
    ww: WhichWayDetectorSpec | None = None
    input_port: int = 1

    def __post_init__(self) -> None:
        if self.input_port not in (1, 2):
            raise InvalidSpec(f"input_port must be 1 or 2, got {self.input_port}")
        if not math.isfinite(self.phase):
            raise InvalidSpec(f"phase must be finite, got {self.phase}")


@dataclass(frozen=True)
class OutputProbabilities:
    """Detection probabilities at the two output ports."""

    p3: float
    p4: float

    def __post_init__(self) -> None:
        for name, p in (("p3", self.p3), ("p4", self.p4)):
            if not -PROBABILITY_ATOL <= p <= 1.0 + PROBABILITY_ATOL:
                raise InvalidSpec(f"{name} = {p!r} is not a probability")
        if abs(self.p3 + self.p4 - 1.0) > PROBABILITY_ATOL:
            raise InvalidSpec(
                f"p3 + p4 = {self.p3 + self.p4!r}, expected 1"
            )
        object.__setattr__(self, "p3", min(max(self.p3, 0.0), 1.0))
        object.__setattr__(self, "p4", min(max(self.p4, 0.0), 1.0))


@dataclass(frozen=True)
class PathCoefficients:
    """Scalar reduction of the composed port amplitudes.

    ``c1``/``c2`` replace every translation operator by its overlap on the
    corresponding packet and the which-way branch weight by gamma. Squaring
    them discards the population that sits in orthogonal pointer/packet
    branches, so ``|c1|^2 + |c2|^2 <= 1`` with equality only when nothing
    marks the path. ``p3``/``p4`` are the port probabilities with the
    expectation values inserted term-by-term (diagonal branch norms kept at
    1), which is what the full evolution must reproduce.
    """

    c1: complex
    c2: complex
    p3: float
    p4: float

    def __post_init__(self) -> None:
        weight = abs(self.c1) ** 2 + abs(self.c2) ** 2
        if weight > 1.0 + PROBABILITY_ATOL:
            raise InvalidSpec(
                f"|c1|^2 + |c2|^2 = {weight!r} exceeds 1; scalar reduction "
                "can only lose weight"
            )


@dataclass(frozen=True)
class BeamSplitterMomentum:
    """Momentum bookkeeping for one splitter after evolution.

    ``mean_shift`` is the change of the packet's momentum expectation from
    its initial center; the per-port values condition on the detected output
    port (None when that port has numerically zero probability).
    """

    label: str
    recoil: float
    overlap_magnitude: float
    mean_shift: float
    mean_shift_port3: float | None
    mean_shift_port4: float | None


@dataclass(frozen=True)
class MomentumTransferReport:
    """Per-splitter momentum transfer summary."""

    entries: tuple[BeamSplitterMomentum, ...]


# --------------------------------------------------------------------------
# Branch bookkeeping
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class _Branch:
    """One product term: amplitude x path basis x packet shifts x pointer."""

    amplitude: complex
    track: int        # port index before BS_in / arm index inside / output port index
    shift_in: float   # translation applied to the input splitter's packet
    shift_out: float  # translation applied to the output splitter's packet
    fired: bool       # whether the which-way pointer fired on this branch


def _monitored_arm(config: InterferometerConfig) -> int | None:
    """Internal arm index watched by the detector, or None."""
    if config.ww is None:
        return None
    if config.input_port == 1:
        return 1 if config.ww.arm == REFLECTED else 0
    return 0 if config.ww.arm == REFLECTED else 1


def _final_branches(config: InterferometerConfig) -> tuple[_Branch, ...]:
    """Carry the input port through all stages; drop exactly-zero branches.

    Reflection bookkeeping: at the input splitter, reflection of port-1 light
    translates that splitter's packet by -recoil and reflection of port-2
    light by +recoil; at the output splitter the signs are reversed
    (arm-1 reflection: +recoil, arm-2 reflection: -recoil).
    """
    b1 = config.bs_in
    if config.input_port == 1:
        arms = [
            _Branch(b1.t.conjugate(), 0, 0.0, 0.0, False),
            _Branch(-b1.r, 1, -b1.recoil, 0.0, False),
        ]
    else:
        arms = [
            _Branch(b1.r.conjugate(), 0, +b1.recoil, 0.0, False),
            _Branch(b1.t, 1, 0.0, 0.0, False),
        ]

    monitored = _monitored_arm(config)
    if monitored is not None:
        arms = [replace(b, fired=(b.track == monitored)) for b in arms]

    ph = cmath.exp(1j * config.phase)
    arms = [
        replace(b, amplitude=b.amplitude * ph) if b.track == 0 else b
        for b in arms
    ]

    if config.bs_out is None:
        ports = arms
    else:
        b2 = config.bs_out
        ports = []
        for b in arms:
            if b.track == 0:
                ports.append(replace(b, amplitude=b.amplitude * b2.t.conjugate(), track=0))
                ports.append(
                    replace(b, amplitude=b.amplitude * -b2.r, track=1, shift_out=+b2.recoil)
                )
            else:
                ports.append(
                    replace(b, amplitude=b.amplitude * b2.r.conjugate(), track=0, shift_out=-b2.recoil)
                )
                ports.append(replace(b, amplitude=b.amplitude * b2.t, track=1))
    return tuple(b for b in ports if b.amplitude != 0)


class EvolvedState:
    """The post-interferometer composite state in factorized branch form.

    Each branch is a product of a path basis state, translated copies of the
    splitter packets, and a pointer state; probabilities and reduced momenta
    are quadratic forms over the branches with lazily evaluated overlaps.
    """

    def __init__(self, config: InterferometerConfig):
        self.config = config
        self.branches = _final_branches(config)
        self.packet_in = config.bs_in.packet.build()
        self.packet_out = (
            config.bs_out.packet.build() if config.bs_out is not None else None
        )
        self.gamma = config.ww.gamma if config.ww is not None else 1.0
        w = math.sqrt(max(1.0 - self.gamma**2, 0.0))
        self._pointer = {
            False: np.array([1.0, 0.0], dtype=np.complex128),
            True: np.array([self.gamma, w], dtype=np.complex128),
        }
        self._shifted_in = self._materialize(self.packet_in, "shift_in")
        self._shifted_out = (
            self._materialize(self.packet_out, "shift_out")
            if self.packet_out is not None
            else None
        )

    def _materialize(self, packet: Wavepacket, attr: str) -> dict[float, Wavepacket]:
        out: dict[float, Wavepacket] = {}
        for b in self.branches:
            dp = getattr(b, attr)
            if dp not in out:
                out[dp] = packet if dp == 0.0 else shift(packet, dp)
        return out

    def _pair_factors(self, a: _Branch, b: _Branch) -> tuple[complex, complex, complex, complex]:
        """Per-factor inner products between two branches: (amplitudes, bs_in, bs_out, pointer)."""
        amps = a.amplitude.conjugate() * b.amplitude
        o_in = overlap(self._shifted_in[a.shift_in], self._shifted_in[b.shift_in])
        o_out = (
            overlap(self._shifted_out[a.shift_out], self._shifted_out[b.shift_out])
            if self._shifted_out is not None
            else 1.0 + 0.0j
        )
        w = complex(np.vdot(self._pointer[a.fired], self._pointer[b.fired]))
        return amps, o_in, o_out, w

    def _pair_overlap(self, a: _Branch, b: _Branch) -> complex:
        """<branch a|branch b> over the non-path factors, times amplitudes."""
        amps, o_in, o_out, w = self._pair_factors(a, b)
        return amps * o_in * o_out * w

    def _port_weight(self, port: int) -> float:
        total = 0.0 + 0.0j
        group = [b for b in self.branches if b.track == port]
        for a in group:
            for b in group:
                total += self._pair_overlap(a, b)
        return float(total.real)

    def norm(self) -> float:
        return math.sqrt(max(self._port_weight(0) + self._port_weight(1), 0.0))

    def probabilities(self) -> OutputProbabilities:
        return OutputProbabilities(self._port_weight(0), self._port_weight(1))

    @property
    def subsystems(self) -> tuple[SubsystemSpec, ...]:
        specs = [
            SubsystemSpec("path", 2),
            SubsystemSpec("bs_in", self.packet_in.grid.n_points),
        ]
        if self.packet_out is not None:
            specs.append(SubsystemSpec("bs_out", self.packet_out.grid.n_points))
        specs.append(SubsystemSpec("ww", 2))
        return tuple(specs)

    def to_state(self, max_entries: int = DENSE_ENTRY_CAP) -> CompositeState:
        """Materialize the dense composite state (small grids only).

        Subsystems are (path, bs_in[, bs_out], ww); packet factors carry
        amplitudes ``psi * sqrt(spacing)`` so the flat norm matches the
        packets' discrete norm.

        Raises:
            InvalidSpec: If the composite dimension exceeds ``max_entries``.
        """
        dim = math.prod(s.dimension for s in self.subsystems)
        if dim > max_entries:
            raise InvalidSpec(
                f"composite dimension {dim} exceeds the cap {max_entries}; "
                "use probabilities() or a coarser grid"
            )
        total: np.ndarray | None = None
        for b in self.branches:
            factors = [_basis_state("path", 2, b.track), _packet_state("bs_in", self._shifted_in[b.shift_in])]
            if self._shifted_out is not None:
                factors.append(_packet_state("bs_out", self._shifted_out[b.shift_out]))
            factors.append(
                CompositeState((SubsystemSpec("ww", 2),), self._pointer[b.fired])
            )
            product = factors[0]
            for f in factors[1:]:
                product = tensor(product, f)
            contribution = b.amplitude * product.amplitudes
            total = contribution if total is None else total + contribution
        if total is None:
            total = np.zeros(dim, dtype=np.complex128)
        return CompositeState(self.subsystems, total, normalized=True)

    def _momentum_matrix_element(
        self, shifted: dict[float, Wavepacket], a: float, b: float
    ) -> complex:
        pa, pb = shifted[a], shifted[b]
        p = pa.grid.points()
        return complex(np.vdot(pa.samples, p * pb.samples) * pa.grid.spacing)

    def mean_momentum_shift(self, which: str, port: int | None = None) -> float | None:
        """<p> change of one splitter's reduced packet, optionally per port.

        Args:
            which: "bs_in" or "bs_out".
            port: None for the unconditioned mean, 0 for port 3, 1 for port 4.

        Returns:
            ``<p> - p0``, or None when conditioning on a zero-probability port.
        """
        if which == "bs_in":
            shifted, attr, packet = self._shifted_in, "shift_in", self.packet_in
        elif which == "bs_out":
            if self.packet_out is None:
                raise InvalidSpec("no output splitter in this configuration")
            shifted, attr, packet = self._shifted_out, "shift_out", self.packet_out
        else:
            raise InvalidSpec(f"which must be 'bs_in' or 'bs_out', got {which!r}")
        group = [
            b for b in self.branches if port is None or b.track == port
        ]
        den = 0.0 + 0.0j
        for a in group:
            for b in group:
                if a.track == b.track:
                    den += self._pair_overlap(a, b)
        if den.real < DEGENERACY_FLOOR:
            return None
        offsets = {getattr(b, attr) for b in group}
        if len(offsets) == 1:
            # every surviving branch translates this packet by the same
            # amount, so the reduced state is exactly the translated packet
            return offsets.pop()
        num = 0.0 + 0.0j
        for a in group:
            for b in group:
                if a.track != b.track:
                    continue
                amps, o_in, o_out, w = self._pair_factors(a, b)
                pmat = self._momentum_matrix_element(
                    shifted, getattr(a, attr), getattr(b, attr)
                )
                # this splitter's overlap factor is replaced by its <p> element
                other = o_out if which == "bs_in" else o_in
                num += amps * other * w * pmat
        return float(num.real / den.real) - mean_momentum(packet)


def evolve(config: InterferometerConfig) -> EvolvedState:
    """Run the full pipeline; see :class:`EvolvedState` for access paths."""
    return EvolvedState(config)


def output_probabilities(config: InterferometerConfig) -> OutputProbabilities:
    """Port probabilities from the full composite evolution."""
    return evolve(config).probabilities()


def path_coefficients(config: InterferometerConfig) -> PathCoefficients:
    """Scalar reduction of the composed amplitudes.

    Each translation operator becomes the overlap between the packet and its
    translated copy; each fired pointer contributes gamma to cross terms.
    ``p3``/``p4`` evaluate the squared moduli term-by-term with those
    expectation values inserted, keeping diagonal branch norms at 1.
    """
    branches = _final_branches(config)
    packet_in = config.bs_in.packet.build()
    packet_out = config.bs_out.packet.build() if config.bs_out is not None else None
    gamma = config.ww.gamma if config.ww is not None else 1.0

    cache: dict[tuple[str, float], complex] = {}

    def omega(packet: Wavepacket | None, label: str, dp: float) -> complex:
        if packet is None or dp == 0.0:
            return 1.0 + 0.0j
        key = (label, dp)
        if key not in cache:
            cache[key] = overlap(packet, shift(packet, dp))
        return cache[key]

    half = cmath.exp(-0.5j * config.phase)
    coeffs = [0.0 + 0.0j, 0.0 + 0.0j]
    probs = [0.0, 0.0]
    for a in branches:
        coeffs[a.track] += (
            a.amplitude
            * half
            * omega(packet_in, "in", a.shift_in)
            * omega(packet_out, "out", a.shift_out)
            * (gamma if a.fired else 1.0)
        )
        for b in branches:
            if a.track != b.track:
                continue
            term = (
                a.amplitude.conjugate()
                * b.amplitude
                * omega(packet_in, "in", b.shift_in - a.shift_in)
                * omega(packet_out, "out", b.shift_out - a.shift_out)
                * (1.0 if a.fired == b.fired else gamma)
            )
            probs[a.track] += term.real
    return PathCoefficients(c1=coeffs[0], c2=coeffs[1], p3=probs[0], p4=probs[1])


def visibility(config: InterferometerConfig, n_phase: int = 100) -> float:
    """Fringe visibility of p3 over a uniform phase sweep on [0, 2pi).

    Raises:
        InvalidSpec: If ``n_phase`` < 8.
    """
    if n_phase < 8:
        raise InvalidSpec(f"n_phase must be >= 8, got {n_phase}")
    values = []
    for k in range(n_phase):
        phi = 2.0 * math.pi * k / n_phase
        values.append(output_probabilities(replace(config, phase=phi)).p3)
    top, bottom = max(values), min(values)
    if top + bottom < 1e-12:
        return 0.0
    return (top - bottom) / (top + bottom)


def momentum_transfer_report(config: InterferometerConfig) -> MomentumTransferReport:
    """Momentum bookkeeping for every splitter in the configuration."""
    state = evolve(config)
    entries = []
    splitters = [("bs_in", config.bs_in, state.packet_in)]
    if config.bs_out is not None:
        splitters.append(("bs_out", config.bs_out, state.packet_out))
    for label, spec, packet in splitters:
        if spec.recoil == 0.0:
            magnitude = 1.0
        else:
            magnitude = abs(overlap(packet, shift(packet, spec.recoil)))
        unconditioned = state.mean_momentum_shift(label)
        entries.append(
            BeamSplitterMomentum(
                label=label,
                recoil=spec.recoil,
                overlap_magnitude=magnitude,
                mean_shift=0.0 if unconditioned is None else unconditioned,
                mean_shift_port3=state.mean_momentum_shift(label, port=0),
                mean_shift_port4=state.mean_momentum_shift(label, port=1),
            )
        )
    return MomentumTransferReport(entries=tuple(entries))


# --------------------------------------------------------------------------
# Dense reference evolution
# --------------------------------------------------------------------------


def _basis_state(name: str, dim: int, index: int) -> CompositeState:
    amps = np.zeros(dim, dtype=np.complex128)
    amps[index] = 1.0
    return CompositeState((SubsystemSpec(name, dim),), amps, normalized=True)


def _packet_state(name: str, packet: Wavepacket) -> CompositeState:
    scaled = packet.samples * math.sqrt(packet.grid.spacing)
    return CompositeState((SubsystemSpec(name, packet.grid.n_points),), scaled)


def _shift_matrix(grid: MomentumGrid, dp: float) -> np.ndarray:
    """Dense matrix realization of the spectral translation by ``dp``."""
    if abs(dp) >= grid.span / 4.0:
        raise ShiftTooLarge(
            f"|dp| = {abs(dp)} exceeds a quarter of the grid span {grid.span}"
        )
    n = grid.n_points
    ramp = np.exp(-2j * np.pi * np.fft.fftfreq(n) * (dp / grid.spacing))
    return np.fft.ifft(np.fft.fft(np.eye(n), axis=0) * ramp[:, None], axis=0)


def _apply_axis(matrix: np.ndarray, arr: np.ndarray, axis: int) -> np.ndarray:
    moved = np.tensordot(matrix, arr, axes=([1], [axis]))
    return np.moveaxis(moved, 0, axis)


def evolve_dense(
    config: InterferometerConfig, max_entries: int = DENSE_ENTRY_CAP
) -> CompositeState:
    """Independent dense-operator evolution for cross-checking.

    Builds the initial product state through the tensor layer and applies
    each stage as explicit matrices on the composite array. Intended for
    small grids; guarded by ``max_entries``.
    """
    packet_in = config.bs_in.packet.build()
    packet_out = config.bs_out.packet.build() if config.bs_out is not None else None
    n_in = packet_in.grid.n_points
    dim = 2 * n_in * (packet_out.grid.n_points if packet_out is not None else 1) * 2
    if dim > max_entries:
        raise InvalidSpec(
            f"composite dimension {dim} exceeds the cap {max_entries}"
        )

    state = tensor(
        _basis_state("path", 2, config.input_port - 1),
        _packet_state("bs_in", packet_in),
    )
    if packet_out is not None:
        state = tensor(state, _packet_state("bs_out", packet_out))
    state = tensor(state, _basis_state("ww", 2, 0))

    arr = state.axis_view().copy()
    # axis layout of arr[track]: bs_in=0, (bs_out=1,) ww=last
    ww_axis = 1 if packet_out is None else 2

    def shifted(sub: np.ndarray, grid: MomentumGrid, dp: float, axis: int) -> np.ndarray:
        if dp == 0.0:
            return sub
        return _apply_axis(_shift_matrix(grid, dp), sub, axis)

    b1 = config.bs_in
    g1 = packet_in.grid
    new0 = b1.t.conjugate() * arr[0] + b1.r.conjugate() * shifted(arr[1], g1, +b1.recoil, 0)
    new1 = -b1.r * shifted(arr[0], g1, -b1.recoil, 0) + b1.t * arr[1]
    arr = np.stack([new0, new1], axis=0)

    monitored = _monitored_arm(config)
    if monitored is not None:
        gamma = config.ww.gamma
        w = math.sqrt(max(1.0 - gamma**2, 0.0))
        pointer_map = np.array([[gamma, -w], [w, gamma]], dtype=np.complex128)
        arr[monitored] = _apply_axis(pointer_map, arr[monitored], ww_axis)

    arr[0] = arr[0] * cmath.exp(1j * config.phase)

    if config.bs_out is not None:
        b2 = config.bs_out
        g2 = packet_out.grid
        out0 = b2.t.conjugate() * arr[0] + b2.r.conjugate() * shifted(arr[1], g2, -b2.recoil, 1)
        out1 = -b2.r * shifted(arr[0], g2, +b2.recoil, 1) + b2.t * arr[1]
        arr = np.stack([out0, out1], axis=0)

    return CompositeState(state.subsystems, arr.ravel(), normalized=True)
