"""
Net Files
Versioned JSON for every net type. A ProductNet is stored as a manifest
that references one file per level.
"""
import json
import logging
import math
from pathlib import Path

import numpy as np

from core.errors import InvalidInputError
from core.exponents import exponent
from nets.base import ZeroNet
from nets.greedy import NetExplicit
from nets.grids import GridNet
from nets.low_rank import LowRankBallSpec, LowRankNet
from nets.metrics import MetricSpec
from nets.product import ProductNet, error_budget
from nets.stiefel import CompositeStiefelNet, LatticeStiefelNet

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1


def net_to_json(net):
    data = net.to_json()
    data["version"] = FORMAT_VERSION
    return data


def net_from_json(data):
    """Rebuild a net from ``net_to_json`` output; explicit nets re-check their separation."""
    version = data.get("version", FORMAT_VERSION)
    if version != FORMAT_VERSION:
        raise InvalidInputError(f"unsupported net file version {version}", version=version)
    kind = data.get("type")

    if kind == "net":
        shape = tuple(data["shape"])
        points = np.asarray(data["points"], dtype=float).reshape((-1,) + shape)
        return NetExplicit(points, data["radius"], MetricSpec.from_json(data["metric"]), data["saturated"])
    if kind == "zero_net":
        return ZeroNet(data["shape"], data["radius"], MetricSpec.from_json(data["metric"]))
    if kind == "lq_grid":
        return GridNet(data["k"], exponent(data["q"]), data["eps"])
    if kind == "stiefel_lattice":
        return LatticeStiefelNet(data["n_dim"], data["k"], data["eps"])
    if kind == "stiefel_composite":
        return CompositeStiefelNet(data["bases"], data["rotations"], data["eps"], data["saturated"])
    if kind == "low_rank_net":
        spec = LowRankBallSpec(data["n_dim"], data["k"], exponent(data["q"]))
        frames = net_from_json(dict(data["frame_net"], version=version))
        sigmas = net_from_json(dict(data["sigma_net"], version=version))
        return LowRankNet(spec, data["eps"], frames, sigmas)
    raise InvalidInputError(f"unknown net type {kind!r}")


def write_json(path, data):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def write_product_net(net, manifest_path, seed=None):
    """
    Write a manifest and one file per level next to it.

    Returns:
        list of written paths, manifest first
    """
    manifest_path = Path(manifest_path)
    stem = manifest_path.stem
    written = []
    level_files = []
    for j, level_net in enumerate(net.level_nets, start=1):
        level_path = manifest_path.with_name(f"{stem}.level{j}.json")
        written.append(write_json(level_path, net_to_json(level_net)))
        level_files.append(level_path.name)

    manifest = {
        "type": "product_net",
        "version": FORMAT_VERSION,
        "seed": seed,
        "level_files": level_files,
        **net.summary(),
    }
    write_json(manifest_path, manifest)
    logger.info("wrote product net manifest %s with %d level files", manifest_path, len(level_files))
    return [manifest_path] + written


def read_product_net(manifest_path):
    """Load a ProductNet written by ``write_product_net``."""
    manifest_path = Path(manifest_path)
    try:
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise InvalidInputError(f"cannot read net manifest {manifest_path}: {e}") from e
    if manifest.get("type") != "product_net":
        raise InvalidInputError("file is not a product net manifest", path=str(manifest_path))

    params = dict(manifest["params"])
    params["p"], params["q"] = exponent(params["p"]), exponent(params["q"])
    level_nets = []
    for name in manifest["level_files"]:
        data = json.loads((manifest_path.parent / name).read_text(encoding="utf-8"))
        level_nets.append(net_from_json(data))

    budget = error_budget(params["levels"], params["p"], params["q"], params["alpha"], params["c_q"])
    if not math.isclose(budget, manifest["error_budget"], rel_tol=1e-12):
        raise InvalidInputError(
            "manifest error budget does not match its parameters",
            stored=manifest["error_budget"], recomputed=budget,
        )
    return ProductNet(
        level_nets=level_nets,
        level_scales=list(manifest["level_scales"]),
        level_radii=list(manifest["level_radii"]),
        params=params,
        error_budget=budget,
        log2_cardinality=math.fsum(net.log2_cardinality for net in level_nets),
    ), manifest.get("seed")
