"""Entangled system-apparatus states and their two reduction modes.

A measurement couples each system state ``xi_j`` to an apparatus pointer
state ``eta_j``. Ignoring the outcome reduces the pure entangled state to a
statistical mixture over the branches (partial trace); selecting an outcome
projects onto one pointer state and renormalizes. Repeated sampling of
outcomes reproduces the branch weights ``|a_j|^2`` as counts.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateOutcome, InvalidSpec
from .tensor import (
    CompositeState,
    DensityOperator,
    SubsystemSpec,
    fix_global_phase,
    normalize,
    partial_trace,
    project,
)
from .tolerances import DEGENERACY_FLOOR, UNITARITY_ATOL

__all__ = [
    "EntanglementSpec",
    "CollapseOutcome",
    "SampleCounts",
    "entangle",
    "reduce_statistical",
    "reduce_postselect",
    "stern_gerlach",
    "sample_outcomes",
]

SYSTEM = "system"
APPARATUS = "apparatus"


def _orthonormality_defect(states: np.ndarray) -> float:
    gram = states @ states.conj().T
    return float(np.max(np.abs(gram - np.eye(states.shape[0]))))


@dataclass(frozen=True)
class EntanglementSpec:
    """Declarative data for one branch decomposition.

    Attributes:
        amplitudes: Branch amplitudes ``a_j`` (normalized, length J >= 1).
        system_states: Rows are the orthonormal ``xi_j`` (shape J x d_sys).
        apparatus_states: Rows are the orthonormal pointer states ``eta_j``
            (shape J x d_app).
        eigenvalues: Real measured value attached to each branch.
    """

    amplitudes: np.ndarray
    system_states: np.ndarray
    apparatus_states: np.ndarray
    eigenvalues: np.ndarray

    def __post_init__(self) -> None:
        a = np.array(self.amplitudes, dtype=np.complex128).ravel()
        xi = np.atleast_2d(np.array(self.system_states, dtype=np.complex128))
        eta = np.atleast_2d(np.array(self.apparatus_states, dtype=np.complex128))
        eps = np.array(self.eigenvalues, dtype=np.float64).ravel()
        j = a.size
        if j < 1:
            raise InvalidSpec("need at least one branch")
        if xi.shape[0] != j or eta.shape[0] != j or eps.size != j:
            raise InvalidSpec(
                f"inconsistent branch counts: {j} amplitudes, "
                f"{xi.shape[0]} system states, {eta.shape[0]} apparatus states, "
                f"{eps.size} eigenvalues"
            )
        norm_defect = abs(float(np.sum(np.abs(a) ** 2)) - 1.0)
        if norm_defect > UNITARITY_ATOL:
            raise InvalidSpec(f"amplitudes are not normalized (defect {norm_defect:g})")
        for label, states in ((SYSTEM, xi), (APPARATUS, eta)):
            if states.shape[1] < j:
                raise InvalidSpec(
                    f"{label} dimension {states.shape[1]} cannot hold {j} "
                    "orthonormal states"
                )
            defect = _orthonormality_defect(states)
            if defect > UNITARITY_ATOL:
                raise InvalidSpec(
                    f"{label} states are not orthonormal (defect {defect:g})"
                )
        for name, arr in (
            ("amplitudes", a),
            ("system_states", xi),
            ("apparatus_states", eta),
            ("eigenvalues", eps),
        ):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def branch_count(self) -> int:
        return self.amplitudes.size

    def branch_probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


@dataclass(frozen=True)
class CollapseOutcome:
    """Result of post-selecting one branch."""

    outcome: int
    probability: float
    eigenvalue: float
    post_state: CompositeState


@dataclass(frozen=True)
class SampleCounts:
    """Outcome counts from repeated identically prepared measurements."""

    counts: tuple[int, ...]
    shots: int
    seed: int

    def __post_init__(self) -> None:
        if sum(self.counts) != self.shots:
            raise InvalidSpec(
                f"counts {self.counts} do not sum to shots {self.shots}"
            )

    def frequencies(self) -> np.ndarray:
        return np.array(self.counts, dtype=np.float64) / self.shots


def entangle(spec: EntanglementSpec) -> CompositeState:
    """Build ``sum_j a_j |xi_j>|eta_j>`` on subsystems (system, apparatus)."""
    amps = np.einsum(
        "j,js,ja->sa", spec.amplitudes, spec.system_states, spec.apparatus_states
    )
    subsystems = (
        SubsystemSpec(SYSTEM, spec.system_states.shape[1]),
        SubsystemSpec(APPARATUS, spec.apparatus_states.shape[1]),
    )
    return CompositeState(subsystems, amps.ravel(), normalized=True)


def reduce_statistical(
    psi: CompositeState, apparatus: str = APPARATUS
) -> DensityOperator:
    """Trace the apparatus out of |psi><psi|.

    For an entangled state this yields the statistical mixture
    ``sum_j |a_j|^2 |xi_j><xi_j|`` on the remaining subsystems: the
    interference between branches is gone, the weights survive.
    """
    keep = [name for name in psi.names if name != apparatus]
    if len(keep) == len(psi.names):
        # index_of raises the canonical UnknownSubsystem message
        psi.index_of(apparatus)
    return partial_trace(psi.to_density(), keep)


def reduce_postselect(
    psi: CompositeState,
    spec: EntanglementSpec,
    outcome: int,
    apparatus: str = APPARATUS,
) -> CollapseOutcome:
    """Project onto one apparatus pointer state and renormalize.

    Args:
        psi: Entangled composite state containing an ``apparatus`` subsystem.
        spec: Supplies the pointer basis and eigenvalues (they are not
            recoverable from the state alone).
        outcome: Branch index into ``spec``.

    Returns:
        The selected outcome with its probability and the renormalized
        post-measurement state (global phase fixed so the largest amplitude
        is real positive).

    Raises:
        DegenerateOutcome: If the branch probability is numerically zero.
    """
    if not 0 <= outcome < spec.branch_count:
        raise InvalidSpec(
            f"outcome {outcome} out of range for {spec.branch_count} branches"
        )
    residual = project(psi, apparatus, spec.apparatus_states[outcome])
    probability = residual.norm() ** 2
    if probability < DEGENERACY_FLOOR:
        raise DegenerateOutcome(
            f"branch {outcome} has probability {probability:g}"
        )
    post_state, _ = normalize(residual)
    return CollapseOutcome(
        outcome=outcome,
        probability=float(probability),
        eigenvalue=float(spec.eigenvalues[outcome]),
        post_state=fix_global_phase(post_state),
    )


def stern_gerlach(a1: complex, a2: complex) -> EntanglementSpec:
    """Spin-1/2 split into two beam directions.

    The spin-up component (eigenvalue +1/2) couples to the upward beam
    pointer, spin-down (-1/2) to the downward one.
    """
    return EntanglementSpec(
        amplitudes=np.array([a1, a2]),
        system_states=np.eye(2),
        apparatus_states=np.eye(2),
        eigenvalues=np.array([0.5, -0.5]),
    )


def sample_outcomes(
    psi: CompositeState,
    spec: EntanglementSpec,
    shots: int,
    seed: int,
    apparatus: str = APPARATUS,
) -> SampleCounts:
    """Draw ``shots`` i.i.d. outcomes from the branch distribution.

    Probabilities are computed from the state by projecting each pointer
    state (so they equal ``|a_j|^2`` when ``psi`` came from ``entangle``).
    The same seed always reproduces the same counts.
    """
    if shots < 1:
        raise InvalidSpec(f"shots must be positive, got {shots}")
    probs = np.array(
        [
            project(psi, apparatus, spec.apparatus_states[j]).norm() ** 2
            for j in range(spec.branch_count)
        ]
    )
    total = float(probs.sum())
    if abs(total - 1.0) > 1e-8:
        raise InvalidSpec(
            f"branch probabilities sum to {total!r}; state and spec disagree"
        )
    probs = np.clip(probs, 0.0, None) / np.clip(probs, 0.0, None).sum()
    rng = np.random.default_rng(seed)
    draws = rng.choice(spec.branch_count, size=shots, p=probs)
    counts = np.bincount(draws, minlength=spec.branch_count)
    return SampleCounts(counts=tuple(int(c) for c in counts), shots=shots, seed=seed)
