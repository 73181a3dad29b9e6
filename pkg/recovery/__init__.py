"""Low-rank recovery harness: information maps, IHT and the E_m experiment."""
from recovery.experiment import RecoveryReport, adversarial_instance, em_experiment, theory_lower
from recovery.iht import hard_threshold, iht_recover, iht_with_backtracking
from recovery.maps import InformationMap, basis_information_map, make_information_map
