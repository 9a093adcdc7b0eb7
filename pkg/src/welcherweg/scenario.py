"""Scenario files: parsing, validation, execution, and result tables.

A scenario is one TOML file describing either an interferometer run
(``kind = "mz"``, with optional parameter sweeps over phase / recoil /
gamma) or a spin-measurement sampling demo (``kind = "stern_gerlach"``).
Momenta are given in units of each splitter's sigma by default
(``momentum_units = "sigma"``); set ``momentum_units = "absolute"`` to pass
them through verbatim. Angles are radians everywhere.
"""

from __future__ import annotations

import copy
import itertools
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from . import __version__
from .collapse import entangle, sample_outcomes, stern_gerlach
from .errors import IoError, ParseError, WelcherwegError
from .interferometer import (
    BeamSplitterSpec,
    InterferometerConfig,
    PacketSpec,
    WhichWayDetectorSpec,
    output_probabilities,
    visibility,
)
from .wavepacket import MomentumGrid

__all__ = [
    "ResultTable",
    "load_scenario",
    "apply_overrides",
    "validate_scenario",
    "run_scenario",
    "render_csv",
    "render_json",
]

KINDS = ("mz", "stern_gerlach")
FORMATS = ("csv", "json")
MOMENTUM_UNITS = ("sigma", "absolute")
MZ_SWEEP_PARAMETERS = ("phase", "recoil", "gamma")

_TOP_KEYS = {
    "mz": {"kind", "output", "format", "momentum_units", "n_phase", "interferometer", "sweep"},
    "stern_gerlach": {"kind", "output", "format", "a1", "a2", "shots", "seed", "sweep"},
}
_INTERFEROMETER_KEYS = {"phase", "input_port", "bs_in", "bs_out", "ww"}
_BS_KEYS = {"t", "r", "recoil", "p0", "sigma", "grid_span", "grid_points"}
_WW_KEYS = {"arm", "gamma"}
_SWEEP_KEYS = {"parameter", "start", "stop", "steps"}


@dataclass(frozen=True)
class ResultTable:
    """Tabular results plus run metadata (scenario echo, tool version, seed)."""

    columns: tuple[str, ...]
    rows: tuple[tuple[float, ...], ...]
    metadata: dict

    def __post_init__(self) -> None:
        for i, row in enumerate(self.rows):
            if len(row) != len(self.columns):
                raise WelcherwegError(
                    f"row {i} has {len(row)} values for {len(self.columns)} columns"
                )


# --------------------------------------------------------------------------
# Loading and overrides
# --------------------------------------------------------------------------


def load_scenario(path: str | Path) -> dict:
    """Read and parse one scenario file.

    Raises:
        IoError: If the file cannot be read.
        ParseError: If it is not valid TOML.
    """
    try:
        text = Path(path).read_bytes()
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    try:
        return tomllib.loads(text.decode("utf-8"))
    except (tomllib.TOMLDecodeError, UnicodeDecodeError) as exc:
        raise ParseError(f"{path}: {exc}") from exc


_SHORTHANDS = {
    "phase": (("interferometer", "phase"),),
    "gamma": (("interferometer", "ww", "gamma"),),
    "recoil": (
        ("interferometer", "bs_in", "recoil"),
        ("interferometer", "bs_out", "recoil"),
    ),
}


def _parse_override_value(text: str):
    text = text.strip()
    if text.startswith("[") and text.endswith("]"):
        parts = [p.strip() for p in text[1:-1].split(",") if p.strip()]
        if len(parts) != 2:
            raise ParseError(f"a complex value needs two components, got {text!r}")
        try:
            return [float(parts[0]), float(parts[1])]
        except ValueError as exc:
            raise ParseError(f"bad complex value {text!r}") from exc
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        pass
    return text


def apply_overrides(raw: dict, assignments: list[str]) -> dict:
    """Apply ``key=value`` strings onto a parsed scenario; the last one wins.

    Keys are dotted paths into the document; the shorthands ``phase``,
    ``gamma`` and ``recoil`` expand to their canonical locations (``recoil``
    sets both splitters when both are present).

    Raises:
        ParseError: On malformed assignments or paths through missing tables.
    """
    result = copy.deepcopy(raw)
    for assignment in assignments:
        if "=" not in assignment:
            raise ParseError(f"override {assignment!r} is not of the form key=value")
        key, _, value_text = assignment.partition("=")
        key = key.strip()
        value = _parse_override_value(value_text)
        paths = _SHORTHANDS.get(key, (tuple(key.split(".")),))
        applied = False
        for path in paths:
            node = result
            for part in path[:-1]:
                if not isinstance(node, dict) or part not in node:
                    node = None
                    break
                node = node[part]
            if isinstance(node, dict):
                node[path[-1]] = value
                applied = True
        if not applied:
            raise ParseError(
                f"override {key!r} does not resolve to a location in this scenario"
            )
    return result


# --------------------------------------------------------------------------
# Schema and domain validation
# --------------------------------------------------------------------------


def _is_number(value) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _is_complexish(value) -> bool:
    if _is_number(value):
        return True
    return (
        isinstance(value, list)
        and len(value) == 2
        and all(_is_number(v) for v in value)
    )


def _as_complex(value) -> complex:
    if _is_number(value):
        return complex(value)
    if _is_complexish(value):
        return complex(value[0], value[1])
    raise ParseError(f"expected a number or [re, im] pair, got {value!r}")


def _schema_diagnostics(raw: dict) -> list[str]:
    diags: list[str] = []
    kind = raw.get("kind")
    if kind not in KINDS:
        diags.append(f"kind must be one of {list(KINDS)}, got {kind!r}")
        return diags

    for key in raw:
        if key not in _TOP_KEYS[kind]:
            diags.append(f"unknown top-level key {key!r}")
    fmt = raw.get("format", "csv")
    if fmt not in FORMATS:
        diags.append(f"format must be one of {list(FORMATS)}, got {fmt!r}")

    sweeps = raw.get("sweep", [])
    if not isinstance(sweeps, list) or not all(isinstance(s, dict) for s in sweeps):
        diags.append("sweep must be an array of tables ([[sweep]])")
        sweeps = []

    if kind == "stern_gerlach":
        for key in ("a1", "a2"):
            if key not in raw:
                diags.append(f"missing key {key!r}")
            elif not _is_complexish(raw[key]):
                diags.append(f"{key} must be a number or [re, im] pair")
        shots = raw.get("shots", 100000)
        if not isinstance(shots, int) or isinstance(shots, bool) or shots < 1:
            diags.append(f"shots must be a positive integer, got {shots!r}")
        seed = raw.get("seed", 0)
        if not isinstance(seed, int) or isinstance(seed, bool):
            diags.append(f"seed must be an integer, got {seed!r}")
        if sweeps:
            diags.append("sweeps are not supported for stern_gerlach scenarios")
        return diags

    # kind == "mz"
    units = raw.get("momentum_units", "sigma")
    if units not in MOMENTUM_UNITS:
        diags.append(
            f"momentum_units must be one of {list(MOMENTUM_UNITS)}, got {units!r}"
        )
    n_phase = raw.get("n_phase", 100)
    if not isinstance(n_phase, int) or isinstance(n_phase, bool) or n_phase < 8:
        diags.append(f"n_phase must be an integer >= 8, got {n_phase!r}")

    mz = raw.get("interferometer")
    if not isinstance(mz, dict):
        diags.append("missing [interferometer] table")
        mz = {}
    for key in mz:
        if key not in _INTERFEROMETER_KEYS:
            diags.append(f"interferometer: unknown key {key!r}")
    if "phase" in mz and not _is_number(mz["phase"]):
        diags.append("interferometer.phase must be a number (radians)")
    if "input_port" in mz and mz["input_port"] not in (1, 2):
        diags.append(f"interferometer.input_port must be 1 or 2, got {mz['input_port']!r}")

    def check_bs(name: str, required: bool) -> None:
        bs = mz.get(name)
        if bs is None:
            if required:
                diags.append(f"missing [interferometer.{name}] table")
            return
        if not isinstance(bs, dict):
            diags.append(f"interferometer.{name} must be a table")
            return
        for key in bs:
            if key not in _BS_KEYS:
                diags.append(f"interferometer.{name}: unknown key {key!r}")
        for key in ("t", "r"):
            if key not in bs:
                diags.append(f"interferometer.{name}: missing key {key!r}")
            elif not _is_complexish(bs[key]):
                diags.append(
                    f"interferometer.{name}.{key} must be a number or [re, im] pair"
                )
        for key in ("recoil", "p0", "sigma", "grid_span"):
            if key in bs and not _is_number(bs[key]):
                diags.append(f"interferometer.{name}.{key} must be a number")
        if "grid_points" in bs and (
            not isinstance(bs["grid_points"], int) or bs["grid_points"] < 8
        ):
            diags.append(
                f"interferometer.{name}.grid_points must be an integer >= 8"
            )

    check_bs("bs_in", required=True)
    check_bs("bs_out", required=False)

    ww = mz.get("ww")
    if ww is not None:
        if not isinstance(ww, dict):
            diags.append("interferometer.ww must be a table")
            ww = {}
        for key in ww:
            if key not in _WW_KEYS:
                diags.append(f"interferometer.ww: unknown key {key!r}")

    for i, sweep in enumerate(sweeps):
        loc = f"sweep[{i}]"
        for key in sweep:
            if key not in _SWEEP_KEYS:
                diags.append(f"{loc}: unknown key {key!r}")
        parameter = sweep.get("parameter")
        if parameter not in MZ_SWEEP_PARAMETERS:
            diags.append(
                f"{loc}: unknown parameter {parameter!r} "
                f"(expected one of {list(MZ_SWEEP_PARAMETERS)})"
            )
        elif parameter == "gamma" and not isinstance(mz.get("ww"), dict):
            diags.append(f"{loc}: sweeping gamma requires an [interferometer.ww] table")
        for key in ("start", "stop"):
            if not _is_number(sweep.get(key)):
                diags.append(f"{loc}: {key} must be a number")
        steps = sweep.get("steps")
        if not isinstance(steps, int) or isinstance(steps, bool) or steps < 2:
            diags.append(f"{loc}: steps must be an integer >= 2, got {steps!r}")
    return diags


def _domain_diagnostics(raw: dict) -> list[str]:
    diags: list[str] = []
    kind = raw.get("kind")
    if kind == "stern_gerlach":
        try:
            stern_gerlach(_as_complex(raw["a1"]), _as_complex(raw["a2"]))
        except WelcherwegError as exc:
            diags.append(f"amplitudes: {exc}")
        return diags

    mz = raw["interferometer"]
    units = raw.get("momentum_units", "sigma")
    pieces_ok = True
    for name in ("bs_in", "bs_out"):
        if name in mz:
            try:
                _build_bs(mz[name], None, units)
            except WelcherwegError as exc:
                diags.append(f"interferometer.{name}: {exc}")
                pieces_ok = False
    if "ww" in mz:
        try:
            _build_ww(mz["ww"], None)
        except WelcherwegError as exc:
            diags.append(f"interferometer.ww: {exc}")
            pieces_ok = False
    if pieces_ok:
        try:
            _build_config(raw, {})
        except WelcherwegError as exc:
            diags.append(str(exc))
    for i, sweep in enumerate(raw.get("sweep", [])):
        if sweep.get("parameter") == "gamma":
            for key in ("start", "stop"):
                value = sweep.get(key)
                if _is_number(value) and not 0.0 <= value <= 1.0:
                    diags.append(
                        f"sweep[{i}]: gamma endpoint {value} outside [0, 1]"
                    )
    return diags


def validate_scenario(raw: dict) -> list[str]:
    """All schema and domain diagnostics; an empty list means runnable."""
    diags = _schema_diagnostics(raw)
    if any(d.startswith("kind") for d in diags) or (
        raw.get("kind") == "mz" and not isinstance(raw.get("interferometer"), dict)
    ):
        return diags
    if diags:
        # structural problems may make domain checks misleading; still try
        # the pieces that exist
        try:
            return diags + _domain_diagnostics(raw)
        except (WelcherwegError, KeyError, TypeError):
            return diags
    return diags + _domain_diagnostics(raw)


# --------------------------------------------------------------------------
# Building domain objects
# --------------------------------------------------------------------------


def _build_bs(bs: dict, recoil_knob: float | None, units: str) -> BeamSplitterSpec:
    t = _as_complex(bs["t"])
    r = _as_complex(bs["r"])
    sigma = float(bs.get("sigma", 1.0))
    p0 = float(bs.get("p0", 0.0))
    scale = sigma if units == "sigma" else 1.0
    recoil_raw = recoil_knob if recoil_knob is not None else bs.get("recoil", 0.0)
    recoil = float(recoil_raw) * scale
    half_span = float(bs.get("grid_span", 10.0)) * scale
    n_points = int(bs.get("grid_points", 1024))
    grid = MomentumGrid(p0 - half_span, p0 + half_span, n_points)
    packet = PacketSpec(p0=p0, sigma=sigma, grid=grid)
    return BeamSplitterSpec(t=t, r=r, recoil=recoil, packet=packet)


def _build_ww(ww: dict, gamma_knob: float | None) -> WhichWayDetectorSpec:
    gamma = gamma_knob if gamma_knob is not None else ww.get("gamma", 0.0)
    return WhichWayDetectorSpec(arm=ww.get("arm", "reflected"), gamma=float(gamma))


def _build_config(raw: dict, knobs: dict[str, float]) -> InterferometerConfig:
    mz = raw["interferometer"]
    units = raw.get("momentum_units", "sigma")
    recoil_knob = knobs.get("recoil")
    bs_in = _build_bs(mz["bs_in"], recoil_knob, units)
    bs_out = _build_bs(mz["bs_out"], recoil_knob, units) if "bs_out" in mz else None
    ww = _build_ww(mz["ww"], knobs.get("gamma")) if "ww" in mz else None
    phase = knobs.get("phase", mz.get("phase", 0.0))
    return InterferometerConfig(
        bs_in=bs_in,
        bs_out=bs_out,
        phase=float(phase),
        ww=ww,
        input_port=int(mz.get("input_port", 1)),
    )


# --------------------------------------------------------------------------
# Execution
# --------------------------------------------------------------------------


def _base_metadata(raw: dict, seed) -> dict:
    return {"scenario": raw, "version": __version__, "seed": seed}


def _run_mz(raw: dict) -> ResultTable:
    sweeps = raw.get("sweep", [])
    n_phase = int(raw.get("n_phase", 100))
    metadata = _base_metadata(raw, None)
    if not sweeps:
        config = _build_config(raw, {})
        probs = output_probabilities(config)
        vis = visibility(config, n_phase)
        return ResultTable(
            columns=("p3", "p4", "visibility"),
            rows=((probs.p3, probs.p4, vis),),
            metadata=metadata,
        )

    parameters = [s["parameter"] for s in sweeps]
    axes = [
        np.linspace(float(s["start"]), float(s["stop"]), int(s["steps"]))
        for s in sweeps
    ]
    phase_swept = "phase" in parameters
    columns = tuple(parameters) + (("p3", "p4") if phase_swept else ("p3", "p4", "visibility"))
    rows = []
    for combo in itertools.product(*axes):
        knobs = {name: float(value) for name, value in zip(parameters, combo)}
        config = _build_config(raw, knobs)
        probs = output_probabilities(config)
        row = [float(v) for v in combo] + [probs.p3, probs.p4]
        if not phase_swept:
            row.append(visibility(config, n_phase))
        rows.append(tuple(row))
    if phase_swept:
        p3_values = [row[len(parameters)] for row in rows]
        top, bottom = max(p3_values), min(p3_values)
        metadata["visibility"] = (
            0.0 if top + bottom < 1e-12 else (top - bottom) / (top + bottom)
        )
    return ResultTable(columns=columns, rows=tuple(rows), metadata=metadata)


def _run_stern_gerlach(raw: dict, seed_override: int | None) -> ResultTable:
    spec = stern_gerlach(_as_complex(raw["a1"]), _as_complex(raw["a2"]))
    shots = int(raw.get("shots", 100000))
    seed = seed_override if seed_override is not None else int(raw.get("seed", 0))
    psi = entangle(spec)
    counts = sample_outcomes(psi, spec, shots=shots, seed=seed)
    rows = tuple(
        (
            float(j),
            float(spec.eigenvalues[j]),
            float(counts.counts[j]),
            counts.counts[j] / shots,
        )
        for j in range(spec.branch_count)
    )
    return ResultTable(
        columns=("outcome", "eigenvalue", "count", "frequency"),
        rows=rows,
        metadata=_base_metadata(raw, seed),
    )


def run_scenario(raw: dict, seed_override: int | None = None) -> ResultTable:
    """Execute a parsed scenario.

    Raises:
        ParseError: If schema checks fail.
        WelcherwegError subclasses: For domain violations during the run.
    """
    schema = _schema_diagnostics(raw)
    if schema:
        raise ParseError("; ".join(schema))
    if raw["kind"] == "mz":
        return _run_mz(raw)
    return _run_stern_gerlach(raw, seed_override)


# --------------------------------------------------------------------------
# Rendering
# --------------------------------------------------------------------------


def render_csv(table: ResultTable) -> str:
    """Comma-separated rows, header first, \\n line endings, repr floats."""
    lines = [",".join(table.columns)]
    for row in table.rows:
        lines.append(",".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"


def render_json(table: ResultTable) -> str:
    payload = {
        "metadata": table.metadata,
        "columns": list(table.columns),
        "rows": [list(map(float, row)) for row in table.rows],
    }
    return json.dumps(payload, indent=2) + "\n"
