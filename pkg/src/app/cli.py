"""Command-line front end: run, verify, converge and plotdata.

Exit codes: 0 all checks passed, 1 usage / configuration / run-directory
error, 2 a verification check failed (the first failing check is named).

Usage:
    python -m src.app.cli run scenarios/identity.json
    python -m src.app.cli verify runs/identity-<hash>
    python -m src.app.cli converge scenarios/identity.json --m-list 4,8,16 --dt-list 2e-3,1e-3,5e-4
    python -m src.app.cli plotdata runs/identity-<hash>
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Sequence

from .core import io
from .core.config import Settings, get_settings
from .core.diagnostics.checks import VerificationReport
from .core.errors import DLMError
from .core.utils import configure_logging
from .services.run_service import convergence_study, default_output_dir, dt_study, run_scenario
from .services.verification_service import verify_run_dir, write_plotdata

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CHECK_FAILED = 2

TOLERANCE_FLAGS = (
    "energy_tol",
    "constraint_tol",
    "kinematic_tol",
    "replay_tol",
    "energy_consistency_tol",
    "split_tol",
    "pressure_tol",
    "tail_gap_tol",
)


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _float_list(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _settings(args: argparse.Namespace) -> Settings:
    overrides = {name: getattr(args, name) for name in TOLERANCE_FLAGS if getattr(args, name, None) is not None}
    base = get_settings()
    return base.model_copy(update=overrides) if overrides else base


def _finish(report: VerificationReport, where: Path | None = None) -> int:
    for check in report.checks:
        threshold = "-" if check.threshold is None else f"{check.threshold:.1e}"
        print(f"{'PASS' if check.passed else 'FAIL'}  {check.name:<28} {check.measured: .3e}  (threshold {threshold})")
    if where is not None:
        print(f"artifacts: {where}")
    failure = report.first_failure
    if failure is not None:
        print(f"verification failed: {failure.name}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    return EXIT_OK


def cmd_run(args: argparse.Namespace) -> int:
    scenario = io.load_scenario(args.config)
    settings = _settings(args)
    directory = Path(args.output_dir) if args.output_dir else default_output_dir(scenario)
    state = run_scenario(scenario, settings=settings, output_dir=directory, recover=not args.no_recover)
    return _finish(state["report"], directory)


def cmd_verify(args: argparse.Namespace) -> int:
    directory = Path(args.run_dir)
    report = verify_run_dir(directory, settings=_settings(args))
    if args.write_report:
        io.write_report(directory, report)
    return _finish(report)


def cmd_converge(args: argparse.Namespace) -> int:
    if not args.m_list and not args.dt_list:
        print("nothing to do: give --m-list and/or --dt-list", file=sys.stderr)
        return EXIT_ERROR
    scenario = io.load_scenario(args.config)
    settings = _settings(args)
    directory = Path(args.output_dir) if args.output_dir else default_output_dir(scenario) / "converge"
    directory.mkdir(parents=True, exist_ok=True)

    if args.m_list:
        rows = convergence_study(scenario, args.m_list, settings=settings)
        io.write_table(
            directory / "cauchy.csv",
            ("m_coarse", "m_fine", "fluid_difference", "elastic_difference"),
            ([str(r.m_coarse), str(r.m_fine), r.fluid_difference, r.elastic_difference] for r in rows),
        )
        for r in rows:
            print(f"m {r.m_coarse:>4} -> {r.m_fine:<4} fluid {r.fluid_difference:.3e}  elastic {r.elastic_difference:.3e}")
    if args.dt_list:
        rows = dt_study(scenario, args.dt_list, settings=settings)
        io.write_table(
            directory / "self_convergence.csv",
            ("dt_coarse", "dt_fine", "difference", "ratio"),
            ([r.dt_coarse, r.dt_fine, r.difference, "" if r.ratio is None else r.ratio] for r in rows),
        )
        for r in rows:
            ratio = "-" if r.ratio is None else f"{r.ratio:.3f}"
            print(f"dt {r.dt_coarse:.3e} -> {r.dt_fine:.3e}  difference {r.difference:.3e}  ratio {ratio}")
    print(f"tables: {directory}")
    return EXIT_OK


def cmd_plotdata(args: argparse.Namespace) -> int:
    path = write_plotdata(Path(args.run_dir))
    print(path)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dlm-galerkin", description="Spectral Galerkin solver for fictitious-domain fluid-structure interaction.")
    parser.add_argument("--log-level", default=None, help="Override DLM_LOG_LEVEL")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def tolerance_flags(p: argparse.ArgumentParser) -> None:
        for name in TOLERANCE_FLAGS:
            p.add_argument(f"--{name.replace('_', '-')}", dest=name, type=float, default=None)

    run = sub.add_parser("run", help="Run a scenario and write its artifacts")
    run.add_argument("config", help="Scenario JSON file")
    run.add_argument("--output-dir", default=None, help="Run directory (default: scenario output_dir or runs/<name>-<hash>)")
    run.add_argument("--no-recover", action="store_true", help="Skip multiplier and pressure recovery")
    tolerance_flags(run)
    run.set_defaults(handler=cmd_run)

    verify = sub.add_parser("verify", help="Re-run the diagnostics on a stored run directory")
    verify.add_argument("run_dir")
    verify.add_argument("--write-report", action="store_true", help="Overwrite report.json with the new report")
    tolerance_flags(verify)
    verify.set_defaults(handler=cmd_verify)

    converge = sub.add_parser("converge", help="Galerkin-dimension and time-step convergence tables")
    converge.add_argument("config")
    converge.add_argument("--m-list", type=_int_list, default=None, help="e.g. 4,8,16")
    converge.add_argument("--dt-list", type=_float_list, default=None, help="e.g. 2e-3,1e-3,5e-4")
    converge.add_argument("--output-dir", default=None)
    converge.set_defaults(handler=cmd_converge)

    plot = sub.add_parser("plotdata", help="Emit long-format plot series for a run directory")
    plot.add_argument("run_dir")
    plot.set_defaults(handler=cmd_plotdata)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.log_level or get_settings().log_level)
    try:
        return args.handler(args)
    except (DLMError, ValueError) as exc:
        logger.debug("command %s failed", args.command, exc_info=True)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    raise SystemExit(main())
