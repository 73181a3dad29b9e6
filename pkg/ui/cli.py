"""
Command Line Interface
Parses flags and --config files into a RunConfig, runs the command,
writes the report and records the run.

Exit codes: 0 success, 2 invalid input or configuration, 3 any other
numeric or budget failure.
"""
import argparse
import json
import logging
import sys
import time
from dataclasses import dataclass
from datetime import datetime, timezone

from config import DEFAULT_ALPHA, DEFAULT_C_Q, DEFAULT_SEED, IHT_ITERS, RUNS_DB, TOOL_NAME, TOOL_VERSION
from core.errors import InvalidInputError, LabError
from database.run_registry import finish_run, start_run
from reports.writer import REPORT_FORMATS, envelope, write_report
from sampling.parallel import resolve_threads
from services.experiments import COMMANDS, run_command

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_FAILURE = 3


def int_list(text):
    return [int(v) for v in str(text).split(",") if v.strip()]


def float_list(text):
    return [float(v) for v in str(text).split(",") if v.strip()]


def n_or_list(text):
    values = int_list(text)
    if not values:
        raise ValueError("expected at least one integer")
    return values if len(values) > 1 else values[0]


# flag -> (type, default, help); every command lists the flags it accepts
OPTIONS = {
    "p": (str, None, "source exponent (e.g. 1, 1/2, inf)"),
    "q": (str, None, "target exponent"),
    "N": (n_or_list, None, "matrix size N (volume accepts a list such as 2,3,4)"),
    "n": (int, None, "entropy index n"),
    "k": (int, 1, "subspace dimension"),
    "levels": (int_list, None, "dyadic levels, comma separated"),
    "samples": (int, 100_000, "Monte Carlo samples or proposals"),
    "delta_grid": (float_list, None, "radii, comma separated"),
    "m_grid": (int_list, None, "measurement counts, comma separated"),
    "trials": (int, 20, "instances per measurement count"),
    "rank": (int, 4, "rank of the recovery map"),
    "iters": (int, IHT_ITERS, "IHT iterations"),
    "step": (str, "auto", "IHT step size or 'auto'"),
    "basis_override": (bool, False, "use standard basis sensors at m = N^2"),
    "alpha": (float, DEFAULT_ALPHA, "decay of the level radii"),
    "c_q": (float, DEFAULT_C_Q, "radius constant"),
    "stiefel_mode": (str, "lattice", "Stiefel component nets: lattice, direct or composite"),
    "net": (str, "product-net.json", "product net manifest path"),
    "audit_samples": (int, 100, "quantizer audit samples"),
    "modes": (str, "spectral,low_rank", "ball sampling modes for audits"),
    "packing_k": (int, 1, "subspace dimension of the Grassmann packing"),
}

COMMAND_OPTIONS = {
    "rate": ["p", "q", "N", "n"],
    "volume": ["p", "N", "samples"],
    "grassmann": ["N", "k", "q", "delta_grid", "samples"],
    "net-build": ["N", "p", "q", "levels", "alpha", "c_q", "stiefel_mode", "net"],
    "net-audit": ["net", "audit_samples", "modes"],
    "sandwich": ["p", "q", "N", "levels", "alpha", "c_q", "packing_k", "samples", "audit_samples"],
    "recovery": ["N", "p", "q", "m_grid", "trials", "rank", "iters", "step", "basis_override"],
}

REQUIRED = {
    "rate": ["p", "q", "N", "n"],
    "volume": ["p", "N"],
    "grassmann": ["N", "q", "delta_grid"],
    "net-build": ["N", "p", "q", "levels"],
    "net-audit": [],
    "sandwich": ["p", "q", "N", "levels"],
    "recovery": ["N", "p", "q", "m_grid"],
}

GLOBAL_KEYS = ("seed", "threads", "out", "format")
GLOBAL_TYPES = {"seed": int, "threads": int, "out": str, "format": str}
LIST_KINDS = (int_list, float_list, n_or_list)


@dataclass
class RunConfig:
    command: str
    params: dict
    seed: int = DEFAULT_SEED
    output_path: str = None
    format: str = "json"
    threads: int = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise InvalidInputError(f"unknown command {self.command!r}", commands=sorted(COMMANDS))
        if not 0 <= int(self.seed) < 2**64:
            raise InvalidInputError("seed must be an unsigned 64-bit integer", seed=self.seed)
        if self.format not in REPORT_FORMATS:
            raise InvalidInputError(f"unknown format {self.format!r}", formats=list(REPORT_FORMATS))
        self.seed = int(self.seed)
        if self.output_path is None:
            self.output_path = f"{self.command}.{self.format}"

    def echo(self):
        return {"command": self.command, "params": self.params, "seed": self.seed, "format": self.format}


def _flag(name):
    return "--" + name.replace("_", "-")


def build_parser():
    parser = argparse.ArgumentParser(prog=TOOL_NAME, description="Entropy numbers of Schatten class embeddings")
    parser.add_argument("--version", action="version", version=f"{TOOL_NAME} {TOOL_VERSION}")
    parser.add_argument("--log-level", default="WARNING", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    sub = parser.add_subparsers(dest="command", required=True)
    for command, names in COMMAND_OPTIONS.items():
        cmd = sub.add_parser(command)
        cmd.add_argument("--seed", type=int, default=None, help=f"master seed (default {DEFAULT_SEED})")
        cmd.add_argument("--threads", type=int, default=None, help="worker threads (default: all cores)")
        cmd.add_argument("--config", default=None, help="JSON file of flag values")
        cmd.add_argument("--out", default=None, help="report path")
        cmd.add_argument("--format", choices=REPORT_FORMATS, default=None)
        cmd.add_argument("--registry", default=RUNS_DB, help="sqlite run registry")
        cmd.add_argument("--no-registry", action="store_true", help="do not record the run")
        for name in names:
            kind, _, help_text = OPTIONS[name]
            if kind is bool:
                cmd.add_argument(_flag(name), action="store_true", default=None, help=help_text)
            else:
                cmd.add_argument(_flag(name), type=kind, default=None, help=help_text)
    return parser


def _coerce(name, value):
    """Values from a JSON config go through the flag's parser; list flags also take a scalar."""
    kind = GLOBAL_TYPES.get(name) or OPTIONS[name][0]
    if value is None:
        return None
    try:
        if kind is bool:
            if not isinstance(value, bool):
                raise TypeError("expected true or false")
            return value
        if isinstance(value, list):
            if kind not in LIST_KINDS:
                raise TypeError("expected a single value")
            return kind(",".join(str(v) for v in value))
        if isinstance(value, dict):
            raise TypeError("expected a number or text")
        return kind(str(value)) if kind in LIST_KINDS else kind(value)
    except (TypeError, ValueError) as e:
        raise InvalidInputError(f"bad config value for {name}: {value!r} ({e})", key=name) from e


def load_config_file(path, command):
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise InvalidInputError(f"cannot read config file {path}: {e}") from e
    if not isinstance(data, dict):
        raise InvalidInputError("config file must hold a JSON object")
    allowed = set(COMMAND_OPTIONS[command]) | set(GLOBAL_KEYS)
    values = {}
    for key, value in data.items():
        name = key.lstrip("-").replace("-", "_")
        if name not in allowed:
            raise InvalidInputError(f"unknown config key {key!r} for {command}", allowed=sorted(allowed))
        values[name] = _coerce(name, value)
    return values


def resolve_config(args):
    """Defaults, then the --config file, then explicit flags."""
    command = args.command
    values = {name: OPTIONS[name][1] for name in COMMAND_OPTIONS[command]}
    values.update(seed=DEFAULT_SEED, threads=None, out=None, format="json")
    if args.config:
        values.update(load_config_file(args.config, command))
    for name in list(COMMAND_OPTIONS[command]) + list(GLOBAL_KEYS):
        flag_value = getattr(args, name, None)
        if flag_value is not None:
            values[name] = flag_value
    missing = [_flag(name) for name in REQUIRED[command] if values.get(name) is None]
    if missing:
        raise InvalidInputError(f"{command} needs {', '.join(missing)}")
    params = {name: values[name] for name in COMMAND_OPTIONS[command]}
    return RunConfig(
        command=command,
        params=params,
        seed=values["seed"],
        output_path=values["out"],
        format=values["format"],
        threads=resolve_threads(values["threads"]),
    )


def execute(args, stdout=None):
    """Run a parsed command line; returns the exit code."""
    stdout = stdout or sys.stdout
    try:
        run_config = resolve_config(args)
    except (LabError, ValueError, TypeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID

    registry = None if args.no_registry else args.registry
    run_id = None
    if registry:
        run_id = start_run(registry, run_config.command, run_config.seed, run_config.echo(), run_config.output_path)

    started_at = datetime.now(timezone.utc).isoformat(timespec="seconds")
    t0 = time.perf_counter()
    try:
        result = run_command(run_config.command, run_config.params, run_config.seed, run_config.threads)
    except LabError as e:
        logger.error("%s failed: %s", run_config.command, e)
        code = EXIT_INVALID if isinstance(e, InvalidInputError) else EXIT_FAILURE
        error = e.to_dict()
    except Exception as e:
        logger.exception("%s crashed", run_config.command)
        code = EXIT_FAILURE
        error = {"kind": "internal", "message": str(e), "details": {"type": type(e).__name__}}
    else:
        error = None
    if error is not None:
        report = envelope(
            run_config.command, run_config.echo(), run_config.seed, "failed", error=error,
            started_at=started_at, elapsed=time.perf_counter() - t0,
        )
        write_report(run_config.output_path, report, run_config.format)
        if run_id is not None:
            finish_run(registry, run_id, "failed")
        print(f"{run_config.command}: failed ({error['kind']}): {error['message']}", file=stdout)
        return code

    report = envelope(
        run_config.command, run_config.echo(), run_config.seed, "ok", payload=result.payload,
        started_at=started_at, elapsed=time.perf_counter() - t0,
    )
    write_report(run_config.output_path, report, run_config.format, table=result.table)
    if run_id is not None:
        finish_run(registry, run_id, "ok")
    print(f"{run_config.command}: {result.summary}", file=stdout)
    return EXIT_OK


def main(argv=None):
    """Parse ``argv`` and run; logging is left to the caller."""
    args = build_parser().parse_args(argv)
    return execute(args)
