import json
import math

import numpy as np
import pytest
import scipy.stats
from numpy.testing import assert_allclose

from core.errors import InvalidInputError
from core.exponents import rate_gap
from core.schatten import BallSpec, numerical_rank, schatten_norm
from nets.base import ZeroNet
from nets.low_rank import LowRankNet
from nets.product import (
    audit_quantizer,
    block_bounds,
    cardinality_budget_bits,
    dyadic_decompose,
    error_budget,
    est_up10_identity,
    gamma_inflation,
    quantize,
    schatten_net_build,
)
from nets.serialize import net_from_json, net_to_json, read_product_net, write_product_net
from sampling.random_matrices import sample_ball_points


class TestDyadicDecompose:
    def test_scaled_identity(self):
        a = np.eye(4) / 4
        parts = dyadic_decompose(a, 2, 1, 2)
        assert [numerical_rank(x) for x in parts.pieces] == [1, 2]
        assert numerical_rank(parts.remainder) == 1
        assert schatten_norm(parts.pieces[1], 2) == pytest.approx(math.sqrt(2) / 4)
        assert schatten_norm(parts.pieces[1], 2) <= 2 ** (0.5 - 1)
        assert schatten_norm(parts.remainder, 2) == pytest.approx(0.25)
        assert schatten_norm(parts.remainder, 2) <= 2 ** (2 * (0.5 - 1))
        assert_allclose(parts.total(), a, atol=1e-12)

    @pytest.mark.parametrize("p,q", [("1/2", 1), (1, 2), (1, "inf"), (2, 3)])
    def test_block_bounds_hold(self, stream, p, q):
        spec = BallSpec(16, p)
        levels = 4
        gap = rate_gap(p, q)
        for mode in ("spectral", "low_rank"):
            for a in sample_ball_points(spec, mode, stream.child(str(p), str(q)), 25):
                parts = dyadic_decompose(a, levels, p, q)
                for j, piece in enumerate(parts.pieces, start=1):
                    assert numerical_rank(piece) <= 2 ** (j - 1)
                    assert schatten_norm(piece, q) <= 2.0 ** (-(j - 1) * gap) + 1e-8
                assert schatten_norm(parts.remainder, q) <= 2.0 ** (-levels * gap) + 1e-8
                assert_allclose(parts.total(), a, atol=1e-10)

    def test_too_many_levels(self):
        with pytest.raises(InvalidInputError):
            dyadic_decompose(np.eye(4) / 4, 3, 1, 2)

    def test_outside_the_ball(self):
        with pytest.raises(InvalidInputError):
            dyadic_decompose(np.eye(2), 1, 1, 2)

    def test_block_bounds(self):
        assert block_bounds(1) == (0, 1)
        assert block_bounds(3) == (3, 7)


class TestErrorBudget:
    def test_two_levels(self):
        assert error_budget(2, 1, 2) == pytest.approx(1.56066, abs=1e-5)

    def test_no_levels(self):
        assert error_budget(0, 1, 2) == pytest.approx(1.0)

    def test_operator_target(self):
        budgets = [error_budget(level, 1, "inf") for level in (1, 2, 3)]
        assert_allclose(budgets, [1.5, 1.0, 0.5625])

    @pytest.mark.parametrize("levels", range(0, 21))
    def test_summation_identity(self, levels):
        assert est_up10_identity(levels)

    def test_gamma(self):
        assert gamma_inflation(1, 2) == 4
        assert gamma_inflation(1, 2, alpha=0.25) == 3
        # 1 + 2(10/3 + 2/3) lands on an integer
        assert gamma_inflation("3/10", "inf", alpha=2 / 3) == 9

    def test_cardinality_budget(self):
        assert cardinality_budget_bits(2, 8, 1, 2) == pytest.approx(2 * 1.5 * 32)


class TestProductNet:
    @pytest.fixture
    def net(self, stream):
        return schatten_net_build(4, 1, 2, 2, stream=stream.child("net"))

    def test_structure(self, net):
        assert isinstance(net.level_nets[0], LowRankNet)
        assert isinstance(net.level_nets[1], ZeroNet)
        assert net.entropy_index == 16
        assert net.error_budget == pytest.approx(1.56066, abs=1e-5)
        assert net.certified_index >= 1
        assert net.summary()["params"]["p"] == "1.0"

    def test_zero_matrix(self, net):
        rep, err = quantize(net, np.zeros((4, 4)))
        assert err == 0.0
        assert not rep.any()

    def test_rank_one(self, net):
        a = np.zeros((4, 4))
        a[0, 0] = 1.0
        parts = dyadic_decompose(a, 2, 1, 2)
        assert not parts.pieces[1].any() and not parts.remainder.any()
        _, err = quantize(net, a)
        assert err <= net.error_budget

    def test_audit_on_eight_by_eight(self, stream):
        net = schatten_net_build(8, 1, 2, 2, stream=stream.child("net8"))
        spec = BallSpec(8, 1)
        samples = []
        for mode in ("spectral", "low_rank"):
            samples += sample_ball_points(spec, mode, stream.child("audit"), 60)
        audit = audit_quantizer(net, samples)
        assert audit["samples"] == 120
        assert audit["violations"] == 0
        assert audit["worst_error"] <= net.error_budget

    def test_needs_p_at_most_q(self):
        with pytest.raises(InvalidInputError):
            schatten_net_build(4, 2, 1, 1)

    def test_level_range(self):
        with pytest.raises(InvalidInputError):
            schatten_net_build(4, 1, 2, 3)

    @pytest.mark.parametrize("alpha,c_q", [(0.0, 1.0), (1.0, 0.5)])
    def test_parameters(self, alpha, c_q):
        with pytest.raises(InvalidInputError):
            schatten_net_build(4, 1, 2, 1, alpha=alpha, c_q=c_q)

    def test_failing_level_is_named(self):
        with pytest.raises(InvalidInputError) as info:
            schatten_net_build(4, 1, 2, 2, stream=None, stiefel_mode="direct")
        assert info.value.details["level"] == 1


class TestNetFiles:
    def test_product_net_round_trip(self, stream, tmp_path):
        net = schatten_net_build(4, 1, 2, 2, stream=stream)
        paths = write_product_net(net, tmp_path / "net.json", seed=5)
        assert paths[0].name == "net.json"
        assert [p.name for p in paths[1:]] == ["net.level1.json", "net.level2.json"]

        loaded, seed = read_product_net(tmp_path / "net.json")
        assert seed == 5
        assert loaded.error_budget == net.error_budget
        assert loaded.log2_cardinality == pytest.approx(net.log2_cardinality)
        a = sample_ball_points(BallSpec(4, 1), "spectral", stream.child("draws"), 3)
        for x in a:
            assert quantize(loaded, x)[1] == pytest.approx(quantize(net, x)[1])

    def test_tampered_budget(self, stream, tmp_path):
        net = schatten_net_build(4, 1, 2, 1, stream=stream)
        write_product_net(net, tmp_path / "net.json")
        manifest = json.loads((tmp_path / "net.json").read_text())
        manifest["error_budget"] = 0.1
        (tmp_path / "net.json").write_text(json.dumps(manifest))
        with pytest.raises(InvalidInputError):
            read_product_net(tmp_path / "net.json")

    def test_not_a_manifest(self, tmp_path):
        path = tmp_path / "other.json"
        path.write_text(json.dumps({"type": "net"}))
        with pytest.raises(InvalidInputError):
            read_product_net(path)

    def test_unknown_version(self):
        with pytest.raises(InvalidInputError):
            net_from_json({"type": "lq_grid", "version": 99})

    def test_low_rank_net_json(self, stream):
        net = schatten_net_build(4, 1, 2, 2, stream=stream).level_nets[0]
        again = net_from_json(net_to_json(net))
        assert again.log2_cardinality == pytest.approx(net.log2_cardinality)


AUDIT_GRID = [
    (p, q, n_dim, levels)
    for p, q in [(1, 2), (1, "inf")]
    for n_dim in (4, 8)
    for levels in (1, 2, 3)
    if 2**levels <= n_dim
]


@pytest.mark.slow
@pytest.mark.parametrize("p,q,n_dim,levels", AUDIT_GRID)
def test_quantizer_audit_grid(stream, p, q, n_dim, levels):
    net = schatten_net_build(n_dim, p, q, levels, stream=stream.child("net", n_dim, levels))
    spec = BallSpec(n_dim, p)
    samples = []
    for mode in ("spectral", "low_rank"):
        samples += sample_ball_points(spec, mode, stream.child("audit", n_dim, levels), 500)
    audit = audit_quantizer(net, samples)
    assert audit["samples"] == 1000
    assert audit["violations"] == 0


@pytest.mark.parametrize("p,q", [(1, 2), (1, "inf")])
def test_cardinality_grows_with_n(p, q):
    configs = [(n_dim, levels) for _, qq, n_dim, levels in AUDIT_GRID if qq == q]
    sizes, bits = [], []
    for n_dim, levels in configs:
        net = schatten_net_build(n_dim, p, q, levels)
        n = 2**levels * n_dim
        assert math.isfinite(net.log2_cardinality) and net.log2_cardinality >= 0
        # linear in n up to the log factor of the lattice Stiefel nets
        assert net.log2_cardinality <= cardinality_budget_bits(levels, n_dim, p, q) * math.log2(n)
        sizes.append(n)
        bits.append(net.log2_cardinality)
    slope = scipy.stats.linregress(sizes, bits).slope
    assert math.isfinite(slope) and slope > 0
    assert all(est_up10_identity(levels) for _, levels in configs)
