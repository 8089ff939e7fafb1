"""Perturbed Max-Weight control for stochastic processing networks."""

from __future__ import annotations

__version__ = "0.1.0"

from .config import ParseError, dump_config, load_config
from .model import (
    ActionVec,
    NetworkSpec,
    NetworkState,
    SpecError,
    derive_constants,
    evaluate_action,
    validate_spec,
)
from .policy import PolicyParams, custom_params, fusion_params, pmw_params
from .scenarios import UnknownScenario, builtin_scenario
from .sim import SimConfig, SimMetrics, UnderflowViolation, run
from .sweep import SweepResult, sweep
from .weights import compute_weights, verify_weight_condition

__all__ = [
    "ActionVec", "NetworkSpec", "NetworkState", "ParseError", "PolicyParams", "SimConfig",
    "SimMetrics", "SpecError", "SweepResult", "UnderflowViolation", "UnknownScenario",
    "builtin_scenario", "compute_weights", "custom_params", "derive_constants", "dump_config",
    "evaluate_action", "fusion_params", "load_config", "pmw_params", "run", "sweep",
    "validate_spec", "verify_weight_condition",
]
