"""Serialization of run artifacts to CSV / JSON and loading of scenario files.

All CSV files are comma separated with a header row and LF line endings.
Floats are written with ``repr`` so that a run can be re-read bit for bit.
``trajectory.csv`` starts with a ``# scenario <hash>`` comment line.
"""

import csv
import json
import logging
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from pydantic import ValidationError

from ..diagnostics.checks import VerificationReport
from ..diagnostics.energy import EnergyRecord
from ..errors import ConfigError, RunDirectoryError
from ..evolution.integrator import Trajectory
from ..recovery.fields import RecoveryFields
from ..spectral.fluid import FluidEigenBasis
from ..spectral.solid import SolidEigenBasis
from ...models import Scenario

logger = logging.getLogger(__name__)

SCENARIO_FILE = "scenario.json"
TRAJECTORY_FILE = "trajectory.csv"
ENERGY_FILE = "energy.csv"
RECOVERY_FILE = "recovery.csv"
REPORT_FILE = "report.json"
PLOTDATA_FILE = "plotdata.csv"
METADATA_FILE = "metadata.json"
EIGENPAIRS_FILE = "eigenpairs.csv"

EIGENPAIR_COLUMNS = ("basis", "index", "eigenvalue", "residual", "normalization_error", "orthogonality_error")
ENERGY_COLUMNS = ("t", "kinetic", "excess", "elastic", "total", "dissipation", "dissipation_trapezoid", "drift", "initial")
RECOVERY_COLUMNS = (
    "t",
    "multiplier_norm",
    "pressure_norm",
    "pressure_mean",
    "split_residual",
    "divfree_residual",
    "dual_residual",
    "continuity",
    "inf_sup",
)
PLOT_SERIES = {
    ENERGY_FILE: ("kinetic", "excess", "elastic", "total", "dissipation", "drift"),
    RECOVERY_FILE: ("multiplier_norm", "pressure_norm", "split_residual", "divfree_residual"),
}


def _fmt(value: float) -> str:
    return repr(float(value))


def write_table(path: Path, header: Sequence[str], rows: Iterable[Sequence], comment: str | None = None) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        if comment is not None:
            handle.write(f"# {comment}\n")
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([value if isinstance(value, str) else _fmt(value) for value in row])


def _write_json(path: Path, payload: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        json.dump(payload, handle, indent=2, sort_keys=True)
        handle.write("\n")


def write_scenario(directory: Path, scenario: Scenario) -> Path:
    path = directory / SCENARIO_FILE
    _write_json(path, scenario.canonical())
    return path


def write_trajectory(directory: Path, trajectory: Trajectory, scenario_hash: str) -> Path:
    m = trajectory.frames[0].state.m
    header = ["t", *(f"alpha_{j}" for j in range(1, m + 1)), *(f"beta_{j}" for j in range(1, m + 1))]
    rows = ([frame.t, *frame.state.alpha, *frame.state.beta] for frame in trajectory.frames)
    path = directory / TRAJECTORY_FILE
    write_table(path, header, rows, comment=f"scenario {scenario_hash}")
    return path


def write_energy(directory: Path, records: Sequence[EnergyRecord]) -> Path:
    path = directory / ENERGY_FILE
    write_table(path, ENERGY_COLUMNS, ([getattr(r, name) for name in ENERGY_COLUMNS] for r in records))
    return path


def write_recovery(directory: Path, recoveries: Sequence[RecoveryFields]) -> Path:
    path = directory / RECOVERY_FILE
    rows = (
        [r.time, *(getattr(r, name) for name in RECOVERY_COLUMNS[1:])]
        for r in recoveries
    )
    write_table(path, RECOVERY_COLUMNS, rows)
    return path


def write_report(directory: Path, report: VerificationReport) -> Path:
    path = directory / REPORT_FILE
    _write_json(path, report.to_payload())
    return path


def _pair_rows(kind: str, eigenvalues: np.ndarray, residuals: np.ndarray, gram: np.ndarray) -> list[list]:
    """One row per eigenpair with its residual and the normalization / orthogonality defects of its Gram row."""
    rows = []
    for j, value in enumerate(eigenvalues):
        off = np.delete(gram[j], j)
        rows.append([kind, str(j + 1), value, residuals[j], abs(gram[j, j] - 1.0), float(np.abs(off).max(initial=0.0))])
    return rows


def write_eigenpairs(directory: Path, fluid: FluidEigenBasis, solid: SolidEigenBasis) -> Path:
    """Fluid pairs are checked in L2(Omega), solid pairs in the c-form."""
    rows = _pair_rows("fluid", fluid.eigenvalues, fluid.residuals(), fluid.gram())
    rows += _pair_rows("solid", solid.eigenvalues, solid.residuals(), solid.c_gram())
    path = directory / EIGENPAIRS_FILE
    write_table(path, EIGENPAIR_COLUMNS, rows)
    return path


def write_metadata(directory: Path, started: datetime, finished: datetime) -> Path:
    """Wall-clock timestamps live here only, so every other artifact is reproducible."""
    path = directory / METADATA_FILE
    _write_json(path, {"started": started.isoformat(), "finished": finished.isoformat()})
    return path


def utc_now() -> datetime:
    return datetime.now(timezone.utc)


def read_table(path: Path) -> tuple[list[str], np.ndarray, list[str]]:
    """Read a numeric CSV artifact.

    Returns:
        (header, rows as a float array, comment lines without the leading ``#``).

    Raises:
        RunDirectoryError: the file is missing, empty or holds a non-numeric cell.
    """
    if not path.is_file():
        raise RunDirectoryError(f"{path}: missing artifact")
    comments: list[str] = []
    with open(path, newline="", encoding="utf-8") as handle:
        lines = []
        for line in handle:
            if line.startswith("#"):
                comments.append(line[1:].strip())
            else:
                lines.append(line)
    reader = csv.reader(lines)
    try:
        header = next(reader)
    except StopIteration:
        raise RunDirectoryError(f"{path}: empty file") from None
    rows = []
    for number, row in enumerate(reader, start=2 + len(comments)):
        if len(row) != len(header):
            raise RunDirectoryError(f"{path}:{number}: expected {len(header)} columns, found {len(row)}")
        try:
            rows.append([float(cell) for cell in row])
        except ValueError as exc:
            raise RunDirectoryError(f"{path}:{number}: {exc}") from exc
    return header, np.array(rows, dtype=float).reshape(len(rows), len(header)), comments


def read_trajectory(directory: Path) -> tuple[str | None, np.ndarray, np.ndarray, np.ndarray]:
    """Return (scenario hash, times, alphas, betas) from ``trajectory.csv``."""
    header, rows, comments = read_table(directory / TRAJECTORY_FILE)
    m = (len(header) - 1) // 2
    if len(header) != 2 * m + 1 or header[0] != "t":
        raise RunDirectoryError(f"{directory / TRAJECTORY_FILE}: unexpected header {header}")
    recorded = next((c.split()[1] for c in comments if c.startswith("scenario ") and len(c.split()) == 2), None)
    return recorded, rows[:, 0], rows[:, 1 : m + 1], rows[:, m + 1 :]


def read_columns(path: Path) -> dict[str, np.ndarray]:
    header, rows, _ = read_table(path)
    return {name: rows[:, k] for k, name in enumerate(header)}


def read_report(directory: Path) -> dict:
    path = directory / REPORT_FILE
    if not path.is_file():
        raise RunDirectoryError(f"{path}: missing artifact")
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise RunDirectoryError(f"{path}:{exc.lineno}: {exc.msg}") from exc


def plot_rows(directory: Path) -> list[tuple[str, float, float]]:
    """Long-format (series, t, value) rows of energy components, residuals and recovered norms."""
    rows: list[tuple[str, float, float]] = []
    for filename, series in PLOT_SERIES.items():
        path = directory / filename
        if filename == RECOVERY_FILE and not path.is_file():
            continue
        columns = read_columns(path)
        for name in series:
            rows.extend((name, float(t), float(v)) for t, v in zip(columns["t"], columns[name]))
    return rows


def write_plotdata(directory: Path, rows: Sequence[tuple[str, float, float]] | None = None) -> Path:
    rows = plot_rows(directory) if rows is None else rows
    path = directory / PLOTDATA_FILE
    write_table(path, ("series", "t", "value"), ([name, t, value] for name, t, value in rows))
    return path


def _line_of(text: str, loc: Sequence) -> int:
    """Best-effort line of the deepest key of ``loc`` found in order in ``text``."""
    position = 0
    for key in loc:
        if not isinstance(key, str):
            continue
        found = text.find(f'"{key}"', position)
        if found >= 0:
            position = found
    return text.count("\n", 0, position) + 1


def load_scenario(path: Path | str) -> Scenario:
    """Parse and validate a scenario JSON file.

    Raises:
        ConfigError: the file is missing, is not valid JSON or fails the schema;
            the message is anchored to a line of the file.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(path, 1, f"cannot read scenario: {exc.strerror or exc}") from exc
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(path, exc.lineno, f"malformed JSON: {exc.msg}") from exc
    try:
        scenario = Scenario.model_validate(payload)
    except ValidationError as exc:
        first = exc.errors()[0]
        where = ".".join(str(part) for part in first["loc"]) or "scenario"
        raise ConfigError(path, _line_of(text, first["loc"]), f"{where}: {first['msg']}") from exc
    logger.info("Loaded scenario %s (%s) from %s", scenario.name, scenario.hash, path)
    return scenario
