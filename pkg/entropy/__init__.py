"""Entropy number bounds: coverings, packings, volume comparison and sandwich reports."""
from entropy.bounds import (
    EntropyBound,
    certified_index,
    index_for_cardinality,
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
from entropy.sandwich import SandwichReport, SandwichRow, greedy_upper_ladder, sandwich_report, volume_ratio_root
