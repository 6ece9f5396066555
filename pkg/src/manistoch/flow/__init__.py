from .driver import BrownianDriver, brownian_values, increments_batch, make_driver
from .integrator import (BatchFlow, FlowState, PathRecord, simulate_backward,
                         simulate_flow, simulate_pair, step_stratonovich,
                         wong_zakai_flow)

__all__ = [
    "BrownianDriver", "brownian_values", "increments_batch", "make_driver",
    "BatchFlow", "FlowState", "PathRecord", "simulate_backward",
    "simulate_flow", "simulate_pair", "step_stratonovich", "wong_zakai_flow",
]
