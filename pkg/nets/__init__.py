"""Covering nets and packings: greedy, Stiefel, grid, low-rank and dyadic product nets."""
from nets.base import Net, ZeroNet
from nets.greedy import NetExplicit, audit_covering, greedy_separated_set, sequence_sampler
from nets.grids import GridNet, lq_ball_net
from nets.low_rank import LowRankBallSpec, LowRankNet, cardinality_exponent_ratio, low_rank_ball_net
from nets.metrics import OPERATOR, MetricSpec, schatten_metric
from nets.product import (
    DyadicDecomposition,
    ProductNet,
    audit_quantizer,
    cardinality_budget_bits,
    dyadic_decompose,
    error_budget,
    est_up10_identity,
    gamma_inflation,
    quantize,
    schatten_net_build,
)
from nets.serialize import net_from_json, net_to_json, read_product_net, write_product_net
from nets.stiefel import STIEFEL_MODES, CompositeStiefelNet, LatticeStiefelNet, polar_factor, stiefel_net
