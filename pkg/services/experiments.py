"""
Experiment Runners
One runner per command. Each takes the resolved parameters, the run's
StreamKey and a thread count, and returns a CommandResult whose payload
goes into the JSON report and whose table is the CSV projection.
"""
import logging
from dataclasses import dataclass, field
from typing import Optional

from core.errors import InvalidInputError
from core.exponents import exponent, rate_gap
from core.schatten import BallSpec, RateQuery, theory_rate
from entropy.sandwich import sandwich_report
from nets.product import audit_quantizer, est_up10_identity, schatten_net_build
from nets.serialize import read_product_net, write_product_net
from recovery.experiment import em_experiment
from sampling.random_matrices import sample_ball_points
from sampling.streams import StreamKey
from volumes.balls import schatten_ball_volume_mc, volume_scaling_fit
from volumes.grassmann import fit_measure_exponent, grassmann_ball_measure_mc

logger = logging.getLogger(__name__)


@dataclass
class CommandResult:
    payload: dict
    table: Optional[tuple] = None
    summary: str = ""
    files: list = field(default_factory=list)


def _rate_branch(p, q, n, big_n):
    if q.value <= p.value or n > big_n**2:
        return "tail"
    return "plateau" if n <= big_n else "middle"


def run_rate(params, stream, threads=None):
    p, q = exponent(params["p"]), exponent(params["q"])
    big_n, n = int(params["N"]), int(params["n"])
    rate = theory_rate(RateQuery(p, q, n, big_n))
    payload = {"rate": rate, "p": p, "q": q, "N": big_n, "n": n, "branch": _rate_branch(p, q, n, big_n)}
    table = (["p", "q", "N", "n", "rate"], [[str(p), str(q), big_n, n, rate]])
    return CommandResult(payload, table, f"rate e_{n}(S_{p}^{big_n} -> S_{q}^{big_n}) ~ {rate!r}")


def run_volume(params, stream, threads=None):
    p = exponent(params["p"])
    n_dims = params["N"] if isinstance(params["N"], list) else [int(params["N"])]
    samples = int(params["samples"])
    payload = {"p": p, "expected_slope": -(0.5 + p.inv)}
    if len(n_dims) >= 3:
        slope, intercept, estimates = volume_scaling_fit(p, n_dims, samples, stream, threads=threads)
        payload.update(slope=slope, intercept=intercept)
        n_dims = sorted(set(n_dims))
    else:
        estimates = [
            schatten_ball_volume_mc(BallSpec(n, p), samples, stream.child("volume", n), threads=threads)
            for n in n_dims
        ]
    rows = [{"n_dim": n, **est.to_json()} for n, est in zip(n_dims, estimates)]
    payload["rows"] = rows
    table = (["n_dim", "vol_root", "std_error"], [[r["n_dim"], r["value"], r["std_error"]] for r in rows])
    summary = ", ".join(f"N={r['n_dim']}: {r['value']:.6g}" for r in rows)
    if "slope" in payload:
        summary += f"; slope {payload['slope']:.4f} (expected {payload['expected_slope']:.4f})"
    return CommandResult(payload, table, f"vol(B_{p}^N)^(1/N^2): {summary}")


def run_grassmann(params, stream, threads=None):
    big_n, k, q = int(params["N"]), int(params["k"]), exponent(params["q"])
    points = grassmann_ball_measure_mc(
        big_n, k, q, params["delta_grid"], int(params["samples"]), stream, threads=threads
    )
    payload = {"N": big_n, "k": k, "q": q, "rows": [pt.to_json() for pt in points], "expected_exponent": k * (big_n - k)}
    summary = f"Grassmann ball measures G_{{{big_n},{k}}} at {len(points)} radii"
    if sum(pt.hits > 0 for pt in points) >= 2:
        payload["fitted_exponent"] = fit_measure_exponent(points)
        summary += f"; fitted exponent {payload['fitted_exponent']:.3f} (k(N-k) = {k * (big_n - k)})"
    table = (["delta", "probability", "std_error"], [[pt.delta, pt.probability, pt.std_error] for pt in points])
    return CommandResult(payload, table, summary)


def run_net_build(params, stream, threads=None):
    levels = params["levels"]
    if isinstance(levels, list):
        if len(levels) != 1:
            raise InvalidInputError("net-build takes a single level", levels=levels)
        levels = levels[0]
    net = schatten_net_build(
        int(params["N"]), params["p"], params["q"], int(levels),
        alpha=float(params["alpha"]), c_q=float(params["c_q"]), stream=stream,
        stiefel_mode=params["stiefel_mode"],
    )
    files = write_product_net(net, params["net"], seed=stream.master_seed)
    summary = net.summary()
    summary["est_up10_identity"] = est_up10_identity(net.levels)
    payload = {"net": summary, "net_files": [str(f) for f in files]}
    table = (
        ["level", "radius", "scale", "log2_cardinality"],
        [[j, r, s, c] for j, (r, s, c) in enumerate(
            zip(summary["level_radii"], summary["level_scales"], summary["level_log2_cardinality"]), start=1
        )],
    )
    line = f"product net: error budget {net.error_budget:.6g}, log2|net| {net.log2_cardinality:.2f} -> {files[0]}"
    return CommandResult(payload, table, line, files=files)


def run_net_audit(params, stream, threads=None):
    net, build_seed = read_product_net(params["net"])
    p, n_dim = net.params["p"], net.params["n_dim"]
    spec = BallSpec(n_dim, p)
    modes = params["modes"] if isinstance(params["modes"], list) else str(params["modes"]).split(",")
    count = int(params["audit_samples"])
    samples = []
    for mode in modes:
        samples += sample_ball_points(spec, mode, stream.child("audit"), count)
    audit = audit_quantizer(net, samples)
    payload = {"net_file": str(params["net"]), "build_seed": build_seed, "modes": modes, "audit": audit}
    table = (list(audit), [list(audit.values())])
    line = (f"quantizer audit: {audit['violations']} of {audit['samples']} over budget, "
            f"worst {audit['worst_error']:.6g} <= {audit['error_budget']:.6g}")
    return CommandResult(payload, table, line)


def run_sandwich(params, stream, threads=None):
    report = sandwich_report(
        params["p"], params["q"], int(params["N"]), params["levels"], stream,
        alpha=float(params["alpha"]), c_q=float(params["c_q"]), packing_k=int(params["packing_k"]),
        volume_samples=int(params["samples"]), audit_samples=int(params["audit_samples"]), threads=threads,
    )
    data = report.to_json()
    p, q = exponent(params["p"]), exponent(params["q"])
    data["expected_middle_slope"] = -rate_gap(p, q)
    line = f"sandwich S_{p} -> S_{q}, N={report.n_dim}: {len(report.rows)} rows"
    if data["middle_slope"] is not None:
        line += f", middle slope {data['middle_slope']:.3f}"
    return CommandResult(data, report.csv_rows(), line)


def run_recovery(params, stream, threads=None):
    step = params["step"]
    step = step if step == "auto" else float(step)
    report = em_experiment(
        int(params["N"]), params["m_grid"], params["p"], params["q"], int(params["trials"]), stream,
        rank=int(params["rank"]), iters=int(params["iters"]), step=step,
        basis_override=bool(params["basis_override"]), threads=threads,
    )
    data = report.to_json()
    margin = data["consistency_margin"]
    line = f"recovery N={report.n_dim}: "
    line += "no Gaussian rows" if margin is None else f"consistency margin {margin:.3g} (need >= 0.1)"
    if data["exact_recovery_error"] is not None:
        line += f"; basis sensors error {data['exact_recovery_error']:.3g}"
    return CommandResult(data, report.csv_rows(), line)


COMMANDS = {
    "rate": run_rate,
    "volume": run_volume,
    "grassmann": run_grassmann,
    "net-build": run_net_build,
    "net-audit": run_net_audit,
    "sandwich": run_sandwich,
    "recovery": run_recovery,
}


def run_command(command, params, seed, threads=None):
    """Dispatch ``command`` with all randomness drawn from ``seed``."""
    if command not in COMMANDS:
        raise InvalidInputError(f"unknown command {command!r}", commands=sorted(COMMANDS))
    stream = StreamKey(master_seed=seed).child(command)
    logger.debug("running %s with %s", command, params)
    return COMMANDS[command](params, stream, threads)
