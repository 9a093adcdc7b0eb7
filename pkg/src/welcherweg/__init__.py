"""Deterministic simulation of projective measurement and a recoil-carrying
Mach-Zehnder interferometer.

The package is organized bottom-up:

- :mod:`welcherweg.tensor` — composite states, density operators, partial
  trace, projection.
- :mod:`welcherweg.collapse` — system-apparatus entanglement, statistical
  and postselected reduction, seeded outcome sampling.
- :mod:`welcherweg.wavepacket` — Gaussian momentum-space packets on uniform
  grids, spectral translation, overlaps.
- :mod:`welcherweg.interferometer` — the two-beam-splitter interferometer
  with quantized splitter recoil and an optional which-way detector.
- :mod:`welcherweg.scenario` / :mod:`welcherweg.cli` — TOML scenario files,
  sweeps, CSV/JSON result tables, and the ``welcherweg`` command.
"""

__version__ = "0.1.0"

from .errors import (
    DegenerateOutcome,
    DimensionMismatch,
    GridMismatch,
    GridTooNarrow,
    InvalidSpec,
    IoError,
    NameCollision,
    ParseError,
    ShiftTooLarge,
    UnknownSubsystem,
    WelcherwegError,
    ZeroNorm,
)
from .tensor import (
    CompositeState,
    DensityOperator,
    SubsystemSpec,
    fix_global_phase,
    inner_product,
    normalize,
    partial_trace,
    project,
    purity,
    tensor,
)
from .collapse import (
    APPARATUS,
    SYSTEM,
    CollapseOutcome,
    EntanglementSpec,
    SampleCounts,
    entangle,
    reduce_postselect,
    reduce_statistical,
    sample_outcomes,
    stern_gerlach,
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
from .interferometer import (
    REFLECTED,
    TRANSMITTED,
    BeamSplitterMomentum,
    BeamSplitterSpec,
    EvolvedState,
    InterferometerConfig,
    MomentumTransferReport,
    OutputProbabilities,
    PacketSpec,
    PathCoefficients,
    WhichWayDetectorSpec,
    evolve,
    evolve_dense,
    momentum_transfer_report,
    output_probabilities,
    path_coefficients,
    visibility,
)
from .scenario import (
    ResultTable,
    apply_overrides,
    load_scenario,
    render_csv,
    render_json,
    run_scenario,
    validate_scenario,
)

__all__ = [
    "__version__",
    # errors
    "WelcherwegError",
    "NameCollision",
    "UnknownSubsystem",
    "DimensionMismatch",
    "ZeroNorm",
    "InvalidSpec",
    "DegenerateOutcome",
    "GridTooNarrow",
    "ShiftTooLarge",
    "GridMismatch",
    "ParseError",
    "IoError",
    # tensor
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
    # collapse
    "SYSTEM",
    "APPARATUS",
    "EntanglementSpec",
    "CollapseOutcome",
    "SampleCounts",
    "entangle",
    "reduce_statistical",
    "reduce_postselect",
    "stern_gerlach",
    "sample_outcomes",
    # wavepacket
    "MomentumGrid",
    "Wavepacket",
    "gaussian",
    "default_grid",
    "shift",
    "overlap",
    "mean_momentum",
    # interferometer
    "REFLECTED",
    "TRANSMITTED",
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
    # scenarios
    "ResultTable",
    "load_scenario",
    "apply_overrides",
    "validate_scenario",
    "run_scenario",
    "render_csv",
    "render_json",
]
