"""
Command-line front-end.

    electrovac verify --config mp_single.json [--seed N] [--points N]
                      [--out report.json] [--csv points.csv]
                      [--tolerance CHANNEL=VALUE ...]
    electrovac reduce --config ...
    electrovac separability --config ...
    electrovac bounds --config ...

Exit codes: 0 pass, 1 verdict fail or run error, 2 usage or configuration
error. Machine output goes to the report file (or stdout); errors are
printed to stderr as {"error": ..., "message": ...}.
"""

import argparse
import json
import sys
from typing import Optional, Sequence

from electrovac.shared.config import load_run_config, parse_run_config
from electrovac.shared.utils import ConfigError, logger
from electrovac.supervisor import run_supervisor


COMMANDS = ("verify", "reduce", "separability", "bounds")


class JsonArgumentParser(argparse.ArgumentParser):
    """ArgumentParser reporting usage errors as JSON on stderr (exit 2)."""

    def error(self, message):
        _emit_error({"error": "UsageError", "message": message})
        raise SystemExit(2)


def _emit_error(payload: dict):
    sys.stderr.write(json.dumps(payload) + "\n")


def parse_tolerances(items: Sequence[str]) -> dict[str, float]:
    """
    Parse repeated CHANNEL=VALUE overrides.

    Raises:
        ConfigError: Malformed entry or non-numeric value.
    """
    tolerances = {}
    for item in items:
        name, sep, value = item.partition("=")
        if not sep or not name:
            raise ConfigError(f"tolerance override must look like CHANNEL=VALUE, got {item!r}")
        try:
            tolerances[name.strip()] = float(value)
        except ValueError as e:
            raise ConfigError(f"tolerance for {name} is not a number: {value!r}") from e
    return tolerances


def apply_overrides(
    config,
    seed: Optional[int] = None,
    points: Optional[int] = None,
    out: Optional[str] = None,
    csv: Optional[str] = None,
    tolerances: Optional[dict[str, float]] = None,
):
    """
    Return the configuration with command-line overrides applied and re-validated.

    Raises:
        ConfigError: An override is invalid for this command.
    """
    data = config.model_dump(mode="json")
    if seed is not None:
        data["seed"] = seed
    if points is not None:
        data["points"] = points
    if out is not None:
        data["output"]["report"] = out
    if csv is not None:
        data["output"]["csv"] = csv
    if tolerances:
        if "tolerances" not in data:
            raise ConfigError(f"'{config.command}' does not take tolerance overrides")
        data["tolerances"] = {**data["tolerances"], **tolerances}
    return parse_run_config(data, config.command)


def run_command(
    command: str,
    config_path: str,
    seed: Optional[int] = None,
    points: Optional[int] = None,
    out: Optional[str] = None,
    csv: Optional[str] = None,
    tolerances: Sequence[str] = (),
) -> int:
    """
    Load a configuration, run it through the supervisor and emit the result.

    Args:
        command: One of verify, reduce, separability, bounds.
        config_path: Path of the JSON run configuration.
        seed: Seed override.
        points: Point-count override.
        out: Report path override; without a report path JSON goes to stdout.
        csv: CSV path override.
        tolerances: CHANNEL=VALUE overrides.

    Returns:
        Process exit code.
    """
    try:
        config = load_run_config(config_path, command)
        config = apply_overrides(config, seed, points, out, csv, parse_tolerances(tolerances))
    except ConfigError as e:
        logger.error(str(e))
        _emit_error(e.to_dict())
        return 2

    state = run_supervisor(command, config)
    exit_code = int(state.get("exit_code", 1))
    if state.get("error"):
        _emit_error(state["error"])
    result = state.get("result")
    if result is not None and not config.output.report:
        sys.stdout.write(json.dumps(result, indent=2) + "\n")
    for line in state.get("messages", []):
        logger.debug(line)
    return exit_code


def cmd_verify(config_path: str, **overrides) -> int:
    return run_command("verify", config_path, **overrides)


def cmd_reduce(config_path: str, **overrides) -> int:
    return run_command("reduce", config_path, **overrides)


def cmd_separability(config_path: str, **overrides) -> int:
    return run_command("separability", config_path, **overrides)


def cmd_bounds(config_path: str, **overrides) -> int:
    return run_command("bounds", config_path, **overrides)


def build_parser() -> JsonArgumentParser:
    parser = JsonArgumentParser(
        prog="electrovac",
        description="Verification lab for conformally flat electrostatic systems.",
    )
    commands = parser.add_subparsers(dest="command", required=True)
    helps = {
        "verify": "certify every residual channel of a solution family",
        "reduce": "reduce to ODEs along an invariant and verify the lifted fields",
        "separability": "check that an invariant has constant level ratio on its level sets",
        "bounds": "certified bounds of the dilation lapse and metric",
    }
    for name in COMMANDS:
        sub = commands.add_parser(name, help=helps[name])
        sub.add_argument("--config", required=True, help="JSON run configuration")
        sub.add_argument("--seed", type=int, default=None, help="override the sampling seed")
        sub.add_argument("--points", type=int, default=None, help="override the number of points")
        sub.add_argument("--out", default=None, help="report JSON path (stdout when absent)")
        sub.add_argument("--csv", default=None, help="per-point or profile CSV path")
        sub.add_argument(
            "--tolerance",
            action="append",
            default=[],
            metavar="CHANNEL=VALUE",
            help="override one channel tolerance (repeatable)",
        )
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    return run_command(
        args.command,
        args.config,
        seed=args.seed,
        points=args.points,
        out=args.out,
        csv=args.csv,
        tolerances=args.tolerance,
    )


if __name__ == "__main__":
    sys.exit(main())
