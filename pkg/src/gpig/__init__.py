"""Exact, non-iterative solver for generalized Pig dice games."""

from .model import Action, GameSpec, State, GAME_OVER, make_spec, preset, load_spec, validate
from .numeric import FLOAT, RATIONAL
from .plinear import OpCounter, PLFunction
from .solver import (
    HAVE_FASTCORE,
    Policy,
    ValueTable,
    hitting_prob,
    solve,
    solve_pair,
    solve_solitaire,
    value_at,
)

__version__ = "0.1.0"

__all__ = [
    "Action",
    "GameSpec",
    "State",
    "GAME_OVER",
    "FLOAT",
    "RATIONAL",
    "OpCounter",
    "PLFunction",
    "Policy",
    "ValueTable",
    "HAVE_FASTCORE",
    "make_spec",
    "preset",
    "load_spec",
    "validate",
    "hitting_prob",
    "solve",
    "solve_pair",
    "solve_solitaire",
    "value_at",
    "__version__",
]
