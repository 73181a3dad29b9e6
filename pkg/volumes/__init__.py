"""Schatten-ball volumes and Grassmann-ball measures."""
from volumes.balls import (
    VolumeEstimate,
    euclidean_ball_volume,
    log_euclidean_ball_volume,
    schatten_ball_volume_mc,
    volume_scaling_fit,
)
from volumes.grassmann import (
    MeasurePoint,
    fit_measure_exponent,
    grassmann_ball_measure_mc,
    grassmann_diameter_bounds,
    principal_sines,
    projection_distances,
)
