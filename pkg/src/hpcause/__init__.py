"""Actual causality (modified Halpern-Pearl) over binary structural causal models.

Checking a candidate cause and inferring one from scratch are both reduced
to SAT, weighted MaxSAT or 0-1 integer programming, all solved by engines
in this package.
"""
from .causality import (
    CausalAnswer,
    CausalQuery,
    Strategy,
    check_ac1,
    check_ac2,
    check_ac3_allsat,
    check_ac3_optimized,
    check_cause,
    compute_responsibility,
    infer_why,
    validate_witness,
)
from .expr import parse_expr
from .model import CausalModel, evaluate, evaluate_with_intervention, load_model, parse_model
from .oracle import Witness

__version__ = "0.1.0"


def rock_throwing() -> CausalModel:
    """The classic rock-throwing model shipped with the package."""
    from importlib.resources import files

    return parse_model(files(__package__).joinpath("data/rock_throwing.json").read_text(encoding="utf-8"))


__all__ = [
    "CausalModel", "CausalQuery", "CausalAnswer", "Strategy", "Witness", "parse_model", "load_model",
    "parse_expr", "evaluate", "evaluate_with_intervention", "check_ac1", "check_ac2", "check_ac3_allsat",
    "check_ac3_optimized", "check_cause", "infer_why", "compute_responsibility", "validate_witness",
    "rock_throwing",
]
