"""Seeded random generation: streams, Gaussian and Haar matrices, ball points."""
from sampling.parallel import parallel_map, resolve_threads
from sampling.random_matrices import (
    SAMPLING_MODES,
    GrassmannPoint,
    StiefelPoint,
    acceptance_rate,
    frobenius_ball_batch,
    gaussian_matrix,
    haar_grassmann,
    haar_orthogonal,
    haar_stiefel,
    haar_stiefel_batch,
    rejection_batch,
    sample_ball_points,
    sample_schatten_ball,
    stiefel_dimension,
)
from sampling.streams import StreamKey, label_hash, split, stream_for
