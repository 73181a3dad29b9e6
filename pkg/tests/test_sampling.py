import numpy as np
import pytest
import scipy.stats
from numpy.testing import assert_allclose

from core.errors import BudgetExhaustedError, InvalidInputError
from core.schatten import BallSpec, schatten_norm
from sampling.parallel import parallel_map, resolve_threads
from sampling.random_matrices import (
    acceptance_rate,
    gaussian_matrix,
    haar_grassmann,
    haar_orthogonal,
    haar_stiefel,
    haar_stiefel_batch,
    rejection_batch,
    sample_schatten_ball,
)
from sampling.streams import StreamKey, label_hash, split


class TestStreams:
    def test_same_key_same_matrix(self, stream):
        key = stream.child("gauss")
        assert np.array_equal(gaussian_matrix(2, 2, key), gaussian_matrix(2, 2, key))

    def test_distinct_keys_differ(self, stream):
        a = gaussian_matrix(1, 1, stream.child("a"))
        b = gaussian_matrix(1, 1, stream.child("b"))
        assert a[0, 0] != b[0, 0]

    def test_entry_mean(self, stream):
        g = gaussian_matrix(64, 64, stream.child("mean"))
        assert abs(g.mean()) < 0.05

    def test_label_hash_is_stable(self):
        assert label_hash("volume", 3) == label_hash("volume", 3)
        assert label_hash("volume", 3) != label_hash("volume", 4)

    def test_split(self, stream):
        keys = split(stream, 3)
        assert len({k.stream_index for k in keys}) == 3

    def test_seed_range(self):
        with pytest.raises(InvalidInputError):
            StreamKey(master_seed=-1)
        with pytest.raises(InvalidInputError):
            StreamKey(master_seed=2**64)

    def test_dimensions(self, stream):
        with pytest.raises(InvalidInputError):
            gaussian_matrix(0, 2, stream)


class TestHaar:
    def test_one_by_one_is_a_sign(self, stream):
        u = haar_stiefel(1, 1, stream.child("s")).u
        assert abs(u[0, 0]) == pytest.approx(1.0)

    def test_orthonormal_columns(self, stream):
        point = haar_stiefel(8, 3, stream.child("s"))
        assert_allclose(point.u.T @ point.u, np.eye(3), atol=1e-12)
        assert point.is_valid()
        assert point.manifold_dim == 3 * (8 - 2)

    def test_orthogonal_group(self, stream):
        u = haar_stiefel(4, 4, stream.child("o")).u
        assert abs(np.linalg.det(u)) == pytest.approx(1.0, abs=1e-10)

    def test_k_above_n(self, stream):
        with pytest.raises(InvalidInputError):
            haar_stiefel(2, 3, stream)

    def test_rank_one_projection(self, stream):
        g = haar_grassmann(2, 1, stream.child("g"))
        assert_allclose(np.sort(np.linalg.eigvalsh(g.projection)), [0.0, 1.0], atol=1e-12)
        assert g.is_valid()

    def test_full_space(self, stream):
        g = haar_grassmann(3, 3, stream.child("g"))
        assert_allclose(g.projection, np.eye(3), atol=1e-12)

    @pytest.mark.parametrize("entry", [(0, 0), (2, 1), (3, 0)])
    def test_left_invariance(self, stream, entry):
        frames = haar_stiefel_batch(4, 2, 10_000, stream.child("frames").generator())
        others = haar_stiefel_batch(4, 2, 10_000, stream.child("others").generator())
        rotated = haar_orthogonal(4, stream.child("q")) @ frames
        i, j = entry
        marginal = scipy.stats.beta(1.5, 1.5, loc=-1.0, scale=2.0)
        assert scipy.stats.ks_1samp(rotated[:, i, j], marginal.cdf).statistic < 0.02
        assert scipy.stats.ks_2samp(rotated[:, i, j], others[:, i, j]).pvalue > 1e-3

    def test_sine_law_for_lines_in_the_plane(self, stream):
        # ||P_E - P_F||_op = sin(theta) with theta uniform
        ref = np.diag([1.0, 0.0])
        dists = np.array([
            np.linalg.norm(haar_grassmann(2, 1, stream.child("line", i)).projection - ref, 2)
            for i in range(4000)
        ])
        grid = np.linspace(0.05, 0.95, 19)
        empirical = np.array([(dists <= x).mean() for x in grid])
        assert np.max(np.abs(empirical - 2 / np.pi * np.arcsin(grid))) < 0.03


class TestBallSampling:
    def test_interval(self, stream):
        accepted, _ = rejection_batch(BallSpec(1, 1), 100_000, stream.child("interval").generator())
        assert len(accepted) == 100_000
        assert abs(accepted.mean()) < 0.01
        assert np.max(np.abs(accepted)) <= 1.0

    def test_frobenius_ball_accepts_everything(self, stream):
        accepted, proposals = acceptance_rate(BallSpec(3, 2), 5000, stream)
        assert accepted == proposals

    def test_operator_ball_rate_agrees_across_seeds(self):
        spec = BallSpec(2, "inf")
        n = 40_000
        rates = [acceptance_rate(spec, n, StreamKey(seed))[0] / n for seed in (1, 2)]
        se = np.sqrt(sum(r * (1 - r) / n for r in rates))
        assert abs(rates[0] - rates[1]) <= 3 * se

    def test_rate_does_not_depend_on_threads(self, stream):
        spec = BallSpec(2, 1)
        assert acceptance_rate(spec, 10_000, stream, threads=1) == acceptance_rate(spec, 10_000, stream, threads=3)

    @pytest.mark.parametrize("mode", ["spectral", "low_rank", "rejection"])
    def test_points_lie_in_the_ball(self, stream, mode):
        spec = BallSpec(3, 1)
        for i in range(20):
            x = sample_schatten_ball(spec, mode, stream.child(mode, i))
            assert schatten_norm(x, 1) <= 1.0 + 1e-10

    def test_unknown_mode(self, stream):
        with pytest.raises(InvalidInputError):
            sample_schatten_ball(BallSpec(2, 1), "uniform", stream)

    def test_rejection_size_cap(self, stream):
        with pytest.raises(InvalidInputError):
            sample_schatten_ball(BallSpec(7, 1), "rejection", stream)

    def test_budget_exhausted(self, stream):
        with pytest.raises(BudgetExhaustedError) as info:
            sample_schatten_ball(BallSpec(6, "1/2"), "rejection", stream, budget=10)
        assert info.value.details["proposals"] == 10


class TestParallel:
    def test_order_is_kept(self):
        assert parallel_map(lambda x: x * x, range(10), threads=4) == [x * x for x in range(10)]

    def test_env_threads(self, monkeypatch):
        monkeypatch.setenv("SCHATTEN_LAB_THREADS", "3")
        assert resolve_threads(None) == 3
        assert resolve_threads(2) == 2

    @pytest.mark.parametrize("bad", [0, -2])
    def test_invalid_threads(self, bad):
        with pytest.raises(InvalidInputError):
            resolve_threads(bad)

    def test_invalid_env(self, monkeypatch):
        monkeypatch.setenv("SCHATTEN_LAB_THREADS", "many")
        with pytest.raises(InvalidInputError):
            resolve_threads(None)
