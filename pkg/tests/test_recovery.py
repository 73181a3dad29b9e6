import numpy as np
import pytest

from core.errors import DivergedError, InvalidInputError
from core.schatten import schatten_norm
from recovery.experiment import adversarial_instance, em_experiment, theory_lower
from recovery.iht import hard_threshold, iht_recover, iht_with_backtracking
from recovery.maps import InformationMap, basis_information_map, make_information_map


class TestInformationMap:
    def test_adjoint_identity(self, stream):
        info = make_information_map(4, 7, stream.child("map"))
        rng = stream.child("x").generator()
        x = rng.standard_normal((4, 4))
        y = rng.standard_normal(7)
        assert np.dot(info.apply(x), y) == pytest.approx(np.sum(x * info.adjoint(y)))

    def test_basis_map_is_invertible(self):
        info = basis_information_map(3)
        assert info.m == 9
        assert info.condition_number() == pytest.approx(1.0)

    def test_shapes(self, stream):
        info = make_information_map(3, 5, stream)
        with pytest.raises(InvalidInputError):
            info.apply(np.zeros((2, 2)))
        with pytest.raises(InvalidInputError):
            info.adjoint(np.zeros(4))

    def test_invalid_sensors(self):
        with pytest.raises(InvalidInputError):
            InformationMap(np.zeros((2, 3, 4)))


class TestIht:
    def test_hard_threshold(self):
        x, u, v = hard_threshold(np.diag([3.0, 2.0, 1.0]), 2)
        np.testing.assert_allclose(x, np.diag([3.0, 2.0, 0.0]), atol=1e-12)
        assert u.shape == (3, 2) and v.shape == (3, 2)

    def test_basis_sensors_recover_exactly(self, stream):
        x = stream.generator().standard_normal((4, 4))
        info = basis_information_map(4)
        x_hat = iht_recover(info.apply(x), info, rank=4)
        assert schatten_norm(x - x_hat, 2) <= 1e-8

    def test_zero_measurements(self, stream):
        info = make_information_map(4, 6, stream)
        assert not iht_recover(np.zeros(6), info, rank=1).any()

    @pytest.mark.slow
    def test_rank_one_recovery(self, stream):
        successes = 0
        for t in range(50):
            key = stream.child("trial", t)
            info = make_information_map(16, 96, key.child("map"))
            rng = key.child("x").generator()
            x = np.outer(rng.standard_normal(16), rng.standard_normal(16))
            x /= schatten_norm(x, 1)
            x_hat = iht_with_backtracking(info.apply(x), info, rank=1, iters=300, step="auto")
            successes += schatten_norm(x - x_hat, 2) / schatten_norm(x, 2) < 1e-3
        assert successes >= 45

    def test_divergence_carries_the_trace(self, stream):
        info = make_information_map(4, 8, stream)
        x = stream.child("x").generator().standard_normal((4, 4))
        with pytest.raises(DivergedError) as info_err:
            iht_recover(info.apply(x), info, rank=4, step=50.0)
        assert len(info_err.value.details["trace"]) > 10

    def test_backtracking_recovers_from_a_large_step(self, stream):
        info = basis_information_map(3)
        x = stream.generator().standard_normal((3, 3))
        x_hat = iht_with_backtracking(info.apply(x), info, rank=3, step=3.0)
        assert schatten_norm(x - x_hat, 2) <= 1e-8

    @pytest.mark.parametrize("kwargs", [{"rank": 0}, {"rank": 1, "iters": 0}, {"rank": 1, "step": -1.0}])
    def test_invalid_arguments(self, stream, kwargs):
        info = make_information_map(3, 4, stream)
        with pytest.raises(InvalidInputError):
            iht_recover(np.ones(4), info, **kwargs)


class TestExperiment:
    def test_theory_lower(self):
        assert theory_lower(16, 64, 1, 2) == pytest.approx(0.5)
        assert theory_lower(16, 8, 1, 2) == 1.0

    def test_instances_are_normalized(self, stream):
        for index in range(8):
            x = adversarial_instance(6, "1/2", stream.child("inst", index), index)
            assert schatten_norm(x, "1/2") == pytest.approx(1.0)

    def test_flat_instance(self, stream):
        x = adversarial_instance(4, 1, stream, 3)
        np.testing.assert_allclose(np.linalg.svd(x, compute_uv=False), [0.25] * 4)

    def test_basis_override_recovers_exactly(self, stream):
        report = em_experiment(4, [16], 1, 2, 4, stream, basis_override=True)
        assert report.worst_errors[0] <= 1e-8
        assert report.theory_lower[0] == pytest.approx(0.5)

    def test_consistent_with_the_lower_bound(self, stream):
        report = em_experiment(4, [2, 4, 8, 12], 1, 2, 8, stream)
        assert report.consistency_margin() >= 0.1
        data = report.to_json()
        assert [row["m"] for row in data["rows"]] == [2, 4, 8, 12]
        header, rows = report.csv_rows()
        assert header == ["m", "worst_error", "theory_lower"]
        assert len(rows) == 4

    def test_override_row_stays_out_of_the_margin(self, stream):
        plain = em_experiment(4, [2, 4, 8, 12], 1, 2, 8, stream)
        report = em_experiment(4, [2, 4, 8, 12, 16], 1, 2, 8, stream, basis_override=True)
        assert report.worst_errors[:4] == plain.worst_errors
        assert report.exact_recovery_error() <= 1e-8
        assert report.consistency_margin() == plain.consistency_margin()
        assert report.consistency_margin() >= 0.1
        assert report.spearman() == plain.spearman()
        data = report.to_json()
        assert data["exact_recovery_error"] <= 1e-8
        assert plain.to_json()["exact_recovery_error"] is None

    def test_override_alone_has_no_margin(self, stream):
        report = em_experiment(4, [16], 1, 2, 2, stream, basis_override=True)
        assert report.consistency_margin() is None
        assert report.spearman() is None

    def test_threads_do_not_change_results(self, stream):
        a = em_experiment(4, [4, 8], 1, 2, 4, stream, threads=1)
        b = em_experiment(4, [4, 8], 1, 2, 4, stream, threads=3)
        assert a.worst_errors == b.worst_errors

    def test_needs_p_at_most_q(self, stream):
        with pytest.raises(InvalidInputError):
            em_experiment(4, [4], 2, 1, 2, stream)

    def test_m_range(self, stream):
        with pytest.raises(InvalidInputError):
            em_experiment(4, [17], 1, 2, 2, stream)


def test_error_falls_with_more_measurements(stream):
    report = em_experiment(4, [2, 4, 8, 12, 16], 1, 2, 4, stream)
    assert report.spearman() <= 0


@pytest.mark.slow
def test_consistency_at_sixteen(stream):
    report = em_experiment(16, [16, 32, 64, 128, 256], 1, 2, 4, stream)
    assert report.theory_lower == pytest.approx([1.0, 0.5**0.5, 0.5, 0.5**1.5, 0.25])
    assert report.consistency_margin() >= 0.1
    assert report.theory_lower[2] == 0.5
    exact = em_experiment(16, [256], 1, 2, 2, stream, basis_override=True)
    assert exact.exact_recovery_error() <= 1e-8
