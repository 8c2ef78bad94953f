"""Probe transmission, multi-window transparency and group delay of a
microwave cavity coupled to two magnon modes, one of which also couples to a
phonon mode."""
from .analysis import (DelayCurve, SpectralFeatures, Sweep, classify, delay_sweep,
                       fano_asymmetry, find_extrema)
from .oracle import cross_validate, sideband_matrix_solve, time_domain_response
from .params import (ConfigError, ProbeGrid, SystemParams, baseline_params, dump_config,
                     load_config, params_from_dict, validate)
from .response import (Spectrum, cavity_sideband, group_delay, output_field, phase,
                       spectrum, transmission)
from .steady_state import SteadyState, solve_steady_state

__all__ = [
    "DelayCurve", "SpectralFeatures", "Sweep", "classify", "delay_sweep", "fano_asymmetry",
    "find_extrema", "cross_validate", "sideband_matrix_solve", "time_domain_response",
    "ConfigError", "ProbeGrid", "SystemParams", "baseline_params", "dump_config",
    "load_config", "params_from_dict", "validate", "Spectrum", "cavity_sideband",
    "group_delay", "output_field", "phase", "spectrum", "transmission", "SteadyState",
    "solve_steady_state",
]
