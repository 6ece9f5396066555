from .base import (AnalyticField, ChartComponentField, SumField, VectorField,
                   difference)
from .mollify import MollifiedField, mollify
from .norms import (SobolevNormReport, difference_norm_1p, field_bound_estimates,
                    l1_norm, sobolev_norms)
from .zoo import (NoiseBundle, constant_field, grad_height_field,
                  killing_field, make_drift, make_noise, rough_sphere_drift,
                  rough_torus_drift, torus_sine_drift, zero_field)

__all__ = [
    "AnalyticField", "ChartComponentField", "SumField", "VectorField", "difference",
    "MollifiedField", "mollify",
    "SobolevNormReport", "difference_norm_1p", "field_bound_estimates",
    "l1_norm", "sobolev_norms",
    "NoiseBundle", "constant_field", "grad_height_field", "killing_field", "make_drift",
    "make_noise", "rough_sphere_drift", "rough_torus_drift",
    "torus_sine_drift", "zero_field",
]
