"""Run artifact serialization."""

from .serialization import (
    EIGENPAIR_COLUMNS,
    EIGENPAIRS_FILE,
    ENERGY_FILE,
    ENERGY_COLUMNS,
    METADATA_FILE,
    PLOTDATA_FILE,
    RECOVERY_COLUMNS,
    RECOVERY_FILE,
    REPORT_FILE,
    SCENARIO_FILE,
    TRAJECTORY_FILE,
    load_scenario,
    plot_rows,
    read_columns,
    read_report,
    read_table,
    read_trajectory,
    utc_now,
    write_eigenpairs,
    write_energy,
    write_metadata,
    write_plotdata,
    write_recovery,
    write_report,
    write_scenario,
    write_table,
    write_trajectory,
)

__all__ = [
    "EIGENPAIR_COLUMNS",
    "EIGENPAIRS_FILE",
    "ENERGY_FILE",
    "ENERGY_COLUMNS",
    "METADATA_FILE",
    "PLOTDATA_FILE",
    "RECOVERY_COLUMNS",
    "RECOVERY_FILE",
    "REPORT_FILE",
    "SCENARIO_FILE",
    "TRAJECTORY_FILE",
    "load_scenario",
    "plot_rows",
    "read_columns",
    "read_report",
    "read_table",
    "read_trajectory",
    "utc_now",
    "write_eigenpairs",
    "write_energy",
    "write_metadata",
    "write_plotdata",
    "write_recovery",
    "write_report",
    "write_scenario",
    "write_table",
    "write_trajectory",
]
