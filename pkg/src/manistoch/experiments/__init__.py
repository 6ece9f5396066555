from .config import DEFAULTS, ExperimentConfig, default_config
from .report import ExperimentReport, atomic_write, merge_reports, write_report
from .quasi import exp_quasi_invariance, exp_quasi_invariance_identity_control
from .density import exp_density_moments
from .stability import exp_stability
from .mollconv import exp_mollified_flow_convergence, exp_mollifier_norm_convergence
from .wz import exp_wong_zakai
from .distest import exp_distance_estimates
from .push import exp_pushforward_constant
from .runners import (exp_flow_demo, exp_geometry_cert, exp_geometry_oracles,
                      exp_maximal)

__all__ = [
    "DEFAULTS", "ExperimentConfig", "default_config",
    "ExperimentReport", "atomic_write", "merge_reports", "write_report",
    "exp_quasi_invariance", "exp_quasi_invariance_identity_control",
    "exp_density_moments", "exp_stability",
    "exp_mollified_flow_convergence", "exp_mollifier_norm_convergence",
    "exp_wong_zakai", "exp_distance_estimates", "exp_pushforward_constant",
    "exp_flow_demo", "exp_geometry_cert", "exp_geometry_oracles", "exp_maximal",
]
