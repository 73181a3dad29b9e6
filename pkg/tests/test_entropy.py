import math

import numpy as np
import pytest

from core.errors import InvalidInputError, NumericFailureError
from core.schatten import RateQuery, theory_rate
from entropy.bounds import (
    EntropyBound,
    certified_index,
    index_for_cardinality,
    lattice_cells,
    lattice_upper,
    lower_from_packing,
    lower_from_volume,
    oracle_dim1,
    trivial_upper,
    upper_from_log2,
    upper_from_net,
    volume_ratio_bound,
)
from entropy.packing import grassmann_packing, grassmann_packing_lower, line_packing_bruteforce, packing_separation
from entropy.sandwich import SandwichRow, _tighten, sandwich_report, volume_ratio_root


class TestOracle:
    def test_values(self):
        assert oracle_dim1(1) == 1.0
        assert oracle_dim1(4) == 0.125

    def test_invalid(self):
        with pytest.raises(InvalidInputError):
            oracle_dim1(0)


class TestUpperBounds:
    def test_eight_points(self):
        bound = upper_from_net(8, 0.2)
        assert bound.entropy_index == 4
        assert bound.upper == 0.2

    @pytest.mark.parametrize("m,n", [(1, 1), (2, 2), (3, 3), (4, 3), (5, 4), (8, 4), (9, 5)])
    def test_index_for_cardinality(self, m, n):
        assert index_for_cardinality(m) == n
        assert certified_index(math.log2(m)) == n

    def test_from_log2(self):
        assert upper_from_log2(3.0, 0.5).entropy_index == 4

    @pytest.mark.parametrize("n", range(1, 9))
    def test_lattice_is_exact_in_dimension_one(self, n):
        assert lattice_upper(1, 1, n, 1).upper == pytest.approx(oracle_dim1(n))

    def test_lattice_cells(self):
        assert lattice_cells(5, 2) == 2
        assert lattice_cells(17, 2) == 16

    def test_lattice_falls_back_to_the_zero_net(self):
        bound = lattice_upper(2, 1, 2, 3)
        assert bound.method_upper == "zero-net"
        assert bound.upper == trivial_upper(2, 1, 2, 3).upper

    def test_lattice_needs_q_at_most_p(self):
        with pytest.raises(InvalidInputError):
            lattice_upper(1, 2, 8, 2)


class TestLowerBounds:
    @pytest.mark.parametrize("n", range(1, 8))
    def test_volume_in_dimension_one(self, n):
        assert lower_from_volume(1, 1, n, 1, 1.0).lower == pytest.approx(2.0 ** (1 - n))

    def test_volume_diagonal_rate(self):
        assert lower_from_volume(2, 2, 9, 3, 1.0).lower == pytest.approx(2.0 ** (-8 / 9))

    def test_five_point_packing(self):
        bound = lower_from_packing(5, 0.4, 1)
        assert (bound.entropy_index, bound.lower) == (3, pytest.approx(0.2))

    def test_two_point_packing(self):
        bound = lower_from_packing(2, 2.0, "inf")
        assert (bound.entropy_index, bound.lower) == (1, pytest.approx(1.0))

    def test_quasi_norm_packing(self):
        assert lower_from_packing(5, 0.4, "1/2").lower == pytest.approx(0.1)

    def test_packing_needs_two_points(self):
        with pytest.raises(InvalidInputError):
            lower_from_packing(1, 0.4, 1)

    def test_volume_ratio_inclusion(self):
        assert volume_ratio_bound(1, 2, 4) == pytest.approx(0.5)
        assert volume_ratio_bound(2, 1, 4) == 1.0

    def test_bound_order(self):
        with pytest.raises(InvalidInputError):
            EntropyBound(entropy_index=2, lower=0.5, upper=0.4)


class TestPackings:
    def test_three_lines(self):
        angles, sep = line_packing_bruteforce(3, 1.0)
        assert angles == pytest.approx([0.0, 60.0, 120.0])
        assert sep == pytest.approx(math.sin(math.radians(60)))
        bound = lower_from_packing(3, sep, "inf")
        assert bound.entropy_index == 2
        assert bound.lower == pytest.approx(0.433, abs=1e-3)

    def test_greedy_lines_are_separated(self, stream):
        packing = grassmann_packing(2, 1, "inf", "inf", stream, c=0.5)
        pts = packing.points
        for i in range(len(pts)):
            for j in range(i):
                assert np.linalg.norm(pts[i] - pts[j], 2) > packing.radius

    def test_separation(self):
        assert packing_separation(4, 1, 2) == pytest.approx(0.25 * 4**-0.5)

    @pytest.mark.slow
    def test_eight_dimensional_planes(self, stream):
        bound, size = grassmann_packing_lower(8, 2, 1, 2, stream)
        assert size >= 2
        rate = theory_rate(RateQuery(1, 2, bound.entropy_index, 8))
        assert rate / 50 <= bound.lower <= 50 * rate

    def test_k_range(self, stream):
        with pytest.raises(InvalidInputError):
            grassmann_packing(4, 3, 1, 2, stream)


class TestTighten:
    def test_monotone_rows(self):
        rows = [
            SandwichRow(4, 1, 0.1, 0.9, 0.5, "a", "a"),
            SandwichRow(2, 0, 0.05, 0.5, 1.0, "b", "b"),
            SandwichRow(8, 2, 0.3, 0.7, 0.3, "c", "c"),
        ]
        _tighten(rows)
        assert [r.entropy_index for r in rows] == [2, 4, 8]
        assert [r.upper for r in rows] == [0.5, 0.5, 0.5]
        assert [r.lower for r in rows] == [0.3, 0.3, 0.3]
        assert rows[1].method_upper == "b"

    def test_ratio(self):
        assert SandwichRow(2, 0, 0.25, 0.5, 1.0, "a", "b").ratio == 2.0
        assert SandwichRow(2, 0, 0.0, 0.5, 1.0, "a", "b").ratio is None


class TestSandwich:
    def test_diagonal(self, stream):
        report = sandwich_report(2, 2, 2, [0, 1], stream, volume_samples=1000, audit_samples=5)
        assert [r.entropy_index for r in report.rows] == [2, 4]
        for row in report.rows:
            assert row.lower <= row.upper + 1e-12
            assert row.theory == pytest.approx(2.0 ** (-row.entropy_index / 4))
        assert report.provenance["volume_method"] == "volume-exact"
        assert "greedy_nets" in report.provenance
        header, table = report.csv_rows()
        assert header == ["n", "lower", "upper", "theory", "ratio"]
        assert len(table) == 2

    def test_product_net_rows(self, stream):
        report = sandwich_report(1, 2, 4, [1, 2], stream, volume_samples=20_000, audit_samples=10)
        rows = report.rows
        assert [r.method_upper for r in rows] == ["product-net", "product-net"]
        assert all(r.certified_n is not None for r in rows)
        assert all(r.lower <= r.upper for r in rows)
        data = report.to_json()
        assert data["p"] == "1.0" and data["q"] == "2.0"

    def test_factorization_reference(self, stream):
        report = sandwich_report("inf", 1, 3, [0, 1], stream, volume_samples=100_000)
        for row in report.rows:
            assert row.extras["factorization_upper"] >= row.upper

    def test_volume_ratio_is_never_below_inclusion(self, stream):
        ratio, method = volume_ratio_root(1, 2, 2, stream, n_samples=20_000)
        assert ratio >= volume_ratio_bound(1, 2, 2)
        assert method in ("volume-mc", "volume-inclusion")
        assert volume_ratio_root(1, 2, 8, stream) == (volume_ratio_bound(1, 2, 8), "volume-inclusion")

    def test_same_seed_same_report(self, stream):
        a = sandwich_report(1, 2, 4, [1, 2], stream, volume_samples=5000, audit_samples=4).csv_rows()
        b = sandwich_report(1, 2, 4, [1, 2], stream, volume_samples=5000, audit_samples=4).csv_rows()
        assert a == b

    @pytest.mark.slow
    @pytest.mark.parametrize("p,q,expected", [(1, 2, -0.5), (1, "inf", -1.0), (2, "inf", -0.5)])
    def test_middle_slope(self, stream, p, q, expected):
        report = sandwich_report(p, q, 8, [1, 2, 3], stream, audit_samples=20)
        slope = report.middle_slope()
        assert slope is not None
        assert slope < 0
        assert abs(slope - expected) <= 0.35


def test_quantizer_violation_is_reported():
    err = NumericFailureError("quantizer exceeded its error budget", level=1, violations=2)
    assert err.to_dict()["details"]["violations"] == 2
