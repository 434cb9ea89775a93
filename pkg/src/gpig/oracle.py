"""Independent validators for the backward solver.

Three routes that share no machinery with the main algorithm: brute
value iteration over the full state space, the coin game's explicit
max-form systems in exact arithmetic, and a seeded match simulator.
"""

import random
from dataclasses import dataclass
from fractions import Fraction

from . import numeric
from .errors import NoConvergence, UndefinedPolicyState, ValidationError
from .model import Action, validate
from .solver import ValueTable


@dataclass(frozen=True)
class IterationConfig:
    tolerance: float = 1e-12
    max_sweeps: int = 100000

    def __post_init__(self):
        if self.tolerance <= 0:
            raise ValidationError("tolerance must be positive")
        if self.max_sweeps < 1:
            raise ValidationError("max_sweeps must be >= 1")


def value_iteration(spec, cfg=IterationConfig()):
    """Fixed-point iteration of the one-step optimality operator over all
    states, Gauss-Seidel style: (a, b) ascending, tau descending.

    Converges because the game ends with probability one.  Intended for
    small targets; the sweep order only affects speed, not the limit.
    """
    validate(spec)
    N = spec.target
    p0 = float(spec.p0)
    faces = [(i, float(p)) for i, p in spec.nonzero_faces()]
    # v[a][b][tau] for tau in 0..a-1 (tau >= a is identically 1)
    v = [None] + [
        [None] + [[0.0] * a for _ in range(N)] for a in range(1, N + 1)
    ]
    for sweep in range(cfg.max_sweeps):
        delta = 0.0
        for a in range(1, N + 1):
            va = v[a]
            for b in range(1, N + 1):
                vab = va[b]
                opp = 1.0 - v[b][a][0]
                for tau in range(a - 1, -1, -1):
                    roll = p0 * opp
                    for i, p in faces:
                        roll += p * (vab[tau + i] if tau + i < a else 1.0)
                    if tau > 0:
                        hold = 1.0 - v[b][a - tau][0]
                        if hold > roll:
                            roll = hold
                    d = roll - vab[tau]
                    if d < 0:
                        d = -d
                    if d > delta:
                        delta = d
                    vab[tau] = roll
        if delta < cfg.tolerance:
            table = ValueTable(N, spec.mode)
            for a in range(1, N + 1):
                for b in range(1, N + 1):
                    table.set(a, b, v[a][b][0])
            return table
    raise NoConvergence(f"no convergence after {cfg.max_sweeps} sweeps")


def _coin_side(aa, consts):
    """Affine pieces (alpha, beta) of the coin game's max-form equation:
    value = max over hold times tau of alpha - beta * other."""
    out = []
    for tau in range(1, aa + 1):
        pw = Fraction(1, 2**tau)
        xbar = Fraction(1) if tau == aa else consts[aa - tau - 1]
        beta = 1 - pw
        alpha = beta + pw * xbar
        out.append((alpha, beta))
    return out


def _coin_eval(pieces, other):
    return max(alpha - beta * other for alpha, beta in pieces)


def piglet_closed_form(N):
    """Exact coin-game values via the explicit 2x2 max-form systems.

    For each pair the two equations are maxima of affine functions of the
    other unknown; every candidate pair of active pieces yields a linear
    system whose solution is kept iff it is consistent with both maxima.
    Pure stdlib Fractions, independent of the solver machinery.
    """
    if N < 1:
        raise ValidationError("target must be >= 1")
    table = ValueTable(N, numeric.RATIONAL)
    for b in range(1, N + 1):
        for a in range(1, b + 1):
            consts_a = [1 - table.get(b, i) for i in range(1, a)]
            consts_b = [1 - table.get(a, i) for i in range(1, b)]
            pa = _coin_side(a, consts_a)
            pb = _coin_side(b, consts_b)
            sol = None
            for alpha, beta in pa:
                for gamma, delta in pb:
                    den = 1 - beta * delta
                    x = (alpha - beta * gamma) / den
                    y = gamma - delta * x
                    if x == _coin_eval(pa, y) and y == _coin_eval(pb, x):
                        sol = (x, y)
                        break
                if sol:
                    break
            if sol is None:
                raise NoConvergence(f"no consistent pieces for pair ({a}, {b})")
            table.set(a, b, sol[0])
            table.set(b, a, sol[1])
    return table


GENERATOR_NAME = "random.Random (Mersenne Twister)"


def _compile_policy(policy, N):
    """Dense lookup: acts[a][b][tau-1] == 1 means roll (0 < tau < a)."""
    acts = [None] * (N + 1)
    for a in range(1, N + 1):
        acts[a] = [None] * (N + 1)
        for b in range(1, N + 1):
            row = bytearray(max(a - 1, 0))
            for tau in range(1, a):
                act = policy.action(a, b, tau)
                if act is Action.ROLL:
                    row[tau - 1] = 1
                elif act is not Action.HOLD:
                    raise UndefinedPolicyState(
                        f"policy gave {act!r} at (a={a}, b={b}, tau={tau})"
                    )
            acts[a][b] = bytes(row)
    return acts


def simulate_match(spec, policy1, policy2, games, seed, workers=1):
    """Play seeded matches from the fresh-start state; returns (wins1, games).

    Each worker w plays its share with an independent substream seeded by
    (seed, w); results merge by summation, so the outcome is reproducible
    for a fixed (seed, workers) pair.
    """
    validate(spec)
    if games < 1:
        raise ValidationError("need at least one game")
    N = spec.target
    compiled = (_compile_policy(policy1, N), _compile_policy(policy2, N))
    cum = []
    acc = 0.0
    for p in spec.probs:
        acc += float(p)
        cum.append(acc)
    cum[-1] = 1.0
    n = spec.n

    per = [games // workers] * workers
    for w in range(games % workers):
        per[w] += 1

    wins1 = 0
    for w in range(workers):
        rng = random.Random(f"{seed}:{w}")
        rnd = rng.random
        for _ in range(per[w]):
            need = [None, N, N]
            mover = 1
            while True:
                my = need[mover]
                other = need[3 - mover]
                acts = compiled[mover - 1][my][other]
                tau = 0
                banked = False
                while True:
                    # roll is forced at tau = 0, win at tau >= my
                    if tau and not acts[tau - 1]:
                        banked = True
                        break
                    u = rnd()
                    face = 0
                    while cum[face] <= u:
                        face += 1
                    if face == 0:
                        break
                    tau += face
                    if tau >= my:
                        break
                if tau >= my:
                    if mover == 1:
                        wins1 += 1
                    break
                if banked:
                    need[mover] = my - tau
                mover = 3 - mover
    return wins1, games


def simulation_report(spec, expected_value, policy1, policy2, games, seed, workers=1):
    """JSON-ready report of an optimal-vs-optimal (or any) match run."""
    wins1, total = simulate_match(spec, policy1, policy2, games, seed, workers)
    freq = wins1 / total
    p = float(expected_value)
    sigma = (p * (1.0 - p) / total) ** 0.5
    return {
        "games": total,
        "wins1": wins1,
        "frequency": freq,
        "expected_value": p,
        "sigma": sigma,
        "seed": seed,
        "workers": workers,
        "generator": GENERATOR_NAME,
    }
