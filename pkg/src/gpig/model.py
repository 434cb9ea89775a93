"""Game definition: instances, states, actions, transitions and local
Bellman operators.

A game instance is a "special die" with faces 0..n carrying probabilities
p0..pn, and a target score N.  Rolling a 0 forfeits the turn score; holding
banks it; first player to reach the target wins.
"""

import json
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

from . import numeric
from .errors import (
    DegenerateP0,
    IllegalAction,
    NegativeProbability,
    NonUnitMass,
    OutOfRange,
    ValidationError,
    ZeroTarget,
)


class Action(Enum):
    ROLL = "Roll"
    HOLD = "Hold"

    def __str__(self):
        return self.value


class State(NamedTuple):
    """(a, b, tau, j): points each player still needs, current turn score,
    and the player to move."""

    a: int
    b: int
    tau: int
    j: int


class _GameOver:
    __slots__ = ()

    def __repr__(self):
        return "GameOver"


GAME_OVER = _GameOver()


@dataclass(frozen=True)
class GameSpec:
    """A game instance bound to a numeric mode.

    ``probs`` holds n+1 mode-typed numbers (exact rationals or floats).
    """

    n: int
    probs: tuple
    target: int
    mode: str = numeric.FLOAT

    @property
    def p0(self):
        return self.probs[0]

    def nonzero_faces(self):
        """(face, probability) pairs for faces >= 1 with positive mass."""
        return [(i, p) for i, p in enumerate(self.probs) if i >= 1 and p > 0]


def make_spec(probs, target, mode=numeric.FLOAT, n=None):
    """Build a GameSpec, coercing probabilities into the numeric mode.

    Probability entries may be numbers or exact fraction strings like '1/6'.
    """
    numeric.check_mode(mode)
    coerced = tuple(numeric.coerce(p, mode) for p in probs)
    if n is None:
        n = len(coerced) - 1
    elif n != len(coerced) - 1:
        raise ValidationError(f"n={n} inconsistent with {len(coerced)} probabilities")
    return GameSpec(n=n, probs=coerced, target=int(target), mode=mode)


PRESETS = {
    "pig": {"probs": ["1/6", "0", "1/6", "1/6", "1/6", "1/6", "1/6"], "target": 100},
    "piglet": {"probs": ["1/2", "1/2"], "target": 10},
}


def preset(name, mode=numeric.FLOAT, target=None):
    try:
        entry = PRESETS[name]
    except KeyError:
        raise ValidationError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    return make_spec(entry["probs"], target if target is not None else entry["target"], mode)


def load_spec(path, mode=numeric.FLOAT, target=None):
    """Read a spec file: JSON {"n": int, "probs": [...], "target": int}.

    Decimal literals are kept as strings during parsing so that rational
    mode reads them exactly.
    """
    with open(path) as fh:
        data = json.load(fh, parse_float=str)
    if not isinstance(data, dict) or "probs" not in data or "target" not in data:
        raise ValidationError("spec file must be an object with 'probs' and 'target'")
    return make_spec(
        data["probs"],
        target if target is not None else data["target"],
        mode,
        n=data.get("n"),
    )


def validate(spec):
    """Check all GameSpec invariants; raises a ValidationError subclass.

    p0 in {0, 1} is reported as DegenerateP0: p0=1 means the roller can
    never score and the game cycles forever; p0=0 makes every roller a
    sure winner and is handled analytically by the solver, outside the
    main algorithm.
    """
    if spec.target < 1:
        raise ZeroTarget(f"target must be >= 1, got {spec.target}")
    if spec.n < 1:
        raise ValidationError(f"need at least faces 0 and 1, got n={spec.n}")
    for i, p in enumerate(spec.probs):
        if p < 0:
            raise NegativeProbability(f"p{i} = {p} < 0")
    mass = sum(spec.probs)
    if spec.mode == numeric.RATIONAL:
        if mass != 1:
            raise NonUnitMass(f"probabilities sum to {mass}, not 1")
    elif abs(mass - 1.0) > numeric.FLOAT_TOL:
        raise NonUnitMass(f"probabilities sum to {mass!r}, not 1")
    if spec.p0 == 0:
        raise DegenerateP0("p0 = 0: the roller wins with probability one")
    if spec.p0 == 1:
        raise DegenerateP0("p0 = 1: the roller can never score")


def legal_actions(spec, s):
    """Actions available to the mover at a non-terminal state."""
    need = s.a if s.j == 1 else s.b
    if s.tau == 0:
        return (Action.ROLL,)
    if s.tau >= need:
        return (Action.HOLD,)
    return (Action.ROLL, Action.HOLD)


def transitions(spec, s, act=None):
    """Successor distribution: list of (state, probability, payoff).

    Payoff is credited to player one only.  GAME_OVER self-loops.
    """
    if s is GAME_OVER:
        return [(GAME_OVER, 1, 0)]
    a, b, tau, j = s
    need = a if j == 1 else b
    cap = need + spec.n - 1
    if not (1 <= a <= spec.target and 1 <= b <= spec.target) or not (0 <= tau <= cap):
        raise OutOfRange(f"state {s} outside the valid state space")
    if tau >= need:
        if act is not None and act is not Action.HOLD:
            raise IllegalAction(f"only Hold is legal at {s}")
        return [(GAME_OVER, 1, 1 if j == 1 else 0)]
    if act not in legal_actions(spec, s):
        raise IllegalAction(f"{act} is not legal at {s}")
    if act is Action.HOLD:
        if j == 1:
            return [(State(a - tau, b, 0, 2), 1, 0)]
        return [(State(a, b - tau, 0, 1), 1, 0)]
    # roll
    out = []
    if spec.p0 > 0:
        out.append((State(a, b, 0, 2 if j == 1 else 1), spec.p0, 0))
    for i, p in spec.nonzero_faces():
        out.append((State(a, b, tau + i, j), p, 0))
    return out


def v_roll(spec, continuation, opp_start_value, tau=0):
    """One-roll Bellman operator for the mover.

    ``continuation`` maps turn scores tau+1..tau+n to values, with the
    caller applying the convention value=1 once the target is met.
    ``opp_start_value`` is the opponent's fresh-turn value v(b, a).
    """
    total = spec.p0 * (1 - opp_start_value)
    for i, p in spec.nonzero_faces():
        total += p * continuation(tau + i)
    return total
