"""Backward-induction solver.

Sub-games are solved in the order b = 1..N, a = 1..b.  For each pair the
mover's turn values are expressed as piecewise-linear convex functions of
the single unknown opponent value, the resulting 2x2 nonlinear system is
solved exactly, and the turn-level values and actions follow by scalar
back-substitution.

In float mode a compiled core (Cython) is used when available; the generic
implementation below doubles as the rational-mode engine and the
pure-Python fallback.  Both kernels perform bit-identical work and report
identical operation counts.
"""

from dataclasses import dataclass

from . import numeric, plinear
from .errors import DegenerateP0, MissingPrefix, NoConvergence, OutOfRange
from .model import Action, validate
from .plinear import OpCounter

try:
    from . import _fastcore

    HAVE_FASTCORE = True
except ImportError:  # pragma: no cover - build environment dependent
    _fastcore = None
    HAVE_FASTCORE = False

KERNELS = ("auto", "pure", "fast")


def active_kernel(mode, kernel="auto"):
    """Resolve the kernel actually used for a solve."""
    if kernel not in KERNELS:
        raise ValueError(f"unknown kernel {kernel!r}")
    if mode == numeric.RATIONAL:
        return "pure"
    if kernel == "fast" and not HAVE_FASTCORE:
        raise RuntimeError("compiled core requested but not built")
    if kernel == "auto":
        return "fast" if HAVE_FASTCORE else "pure"
    return kernel


class ValueTable:
    """Start-of-turn win probabilities v(a, b) for 1 <= a, b <= N.

    Entry (a, b): the mover needs a points, the opponent needs b.  Entries
    do not depend on the target used to compute them.  Turn-level values
    are recomputed on demand (see ``value_at``) rather than stored.
    """

    __slots__ = ("target", "mode", "_v")

    def __init__(self, target, mode):
        self.target = target
        self.mode = mode
        self._v = [[None] * (target + 1) for _ in range(target + 1)]

    def get(self, a, b):
        if not (1 <= a <= self.target and 1 <= b <= self.target):
            raise OutOfRange(f"(a={a}, b={b}) outside 1..{self.target}")
        v = self._v[a][b]
        if v is None:
            raise MissingPrefix(f"v({a}, {b}) has not been solved yet")
        return v

    def has(self, a, b):
        return 1 <= a <= self.target and 1 <= b <= self.target and self._v[a][b] is not None

    def set(self, a, b, value):
        self._v[a][b] = value

    def rows(self):
        for a in range(1, self.target + 1):
            for b in range(1, self.target + 1):
                yield a, b, self.get(a, b)

    def write_csv(self, path):
        with open(path, "w") as fh:
            fh.write("a,b,value\n")
            for a, b, v in self.rows():
                fh.write(f"{a},{b},{numeric.format_value(v, self.mode)}\n")


class Policy:
    """Optimal action map: (a, b, tau) -> Roll/Hold for 0 < tau < a.

    Rolling is forced at tau = 0 and holding at tau >= a; within the open
    range actions are stored per pair as a compact byte string (1 = Roll).
    Exact ties go to Hold.
    """

    __slots__ = ("target", "_acts")

    def __init__(self, target):
        self.target = target
        self._acts = {}

    def set_row(self, a, b, acts):
        self._acts[(a, b)] = bytes(acts)

    def action(self, a, b, tau):
        if not (1 <= a <= self.target and 1 <= b <= self.target):
            raise OutOfRange(f"(a={a}, b={b}) outside 1..{self.target}")
        if tau >= a:
            return Action.HOLD
        if tau == 0:
            return Action.ROLL
        row = self._acts.get((a, b))
        if row is None:
            raise OutOfRange(f"no policy row for (a={a}, b={b})")
        return Action.ROLL if row[tau - 1] else Action.HOLD

    def rows(self):
        for (a, b), row in sorted(self._acts.items()):
            for tau in range(1, a):
                yield a, b, tau, Action.ROLL if row[tau - 1] else Action.HOLD

    def write_csv(self, path):
        with open(path, "w") as fh:
            fh.write("a,b,tau,action\n")
            for a, b, tau, act in self.rows():
                fh.write(f"{a},{b},{tau},{act}\n")


def hitting_prob(spec, a):
    """P(the within-turn score chain busts before reaching level a).

    Recursion H(z) = p0 + sum_i p_i H(z - i) with H(z) = 0 for z <= 0.
    """
    if a < 1:
        raise OutOfRange(f"level must be >= 1, got {a}")
    H = [0] * (a + 1)
    for z in range(1, a + 1):
        h = spec.p0
        for i, p in spec.nonzero_faces():
            if z - i >= 1:
                h = h + p * H[z - i]
        H[z] = h
    return H[a]


def _build_side(spec, aa, consts, counter=None, keep_all=False):
    """Construct f_{.,.,i} for i = 1..aa via the Bellman recursion.

    consts[i-1] holds the banked-turn value 1 - v(opp, i) for i < aa.
    Returns the top-level function (i = aa) and, optionally, all of them.
    """
    window = [plinear.constant_one()] * spec.n  # f_{i-1}, ..., f_{i-n}
    faces = spec.nonzero_faces()
    all_f = [] if keep_all else None
    f = window[0]
    for i in range(1, aa + 1):
        terms = [(p, window[j - 1]) for j, p in faces]
        g = plinear.affine_combine(terms, spec.p0, counter)
        f = plinear.max_with_constant(g, consts[i - 1], counter) if i < aa else g
        if keep_all:
            all_f.append(f)
        window = [f] + window[: spec.n - 1]
    return f, all_f


def _threshold_lines(spec, aa, consts, counter=None):
    """Candidate stopping lines L_t(y) = A_t - B_t * y for t = 1..aa.

    L_t is the mover's turn value under the rule "roll until the turn
    score reaches t, then hold" (an immediate win at or above aa).  B_t is
    the bust probability of that rule and the constant term collects the
    first-passage mass over the landing window, so each line follows from
    the previous one by an O(n) shift of mass out of level t.  The true
    turn-value function is the upper envelope of these lines.
    """
    faces = spec.nonzero_faces()
    p0 = spec.p0
    pi = [0] * (aa + spec.n + 1)  # first-passage mass at each landing level
    for i, p in faces:
        pi[i] = p
    beta = p0
    lines = []
    for t in range(1, aa + 1):
        K = 0
        for z in range(t, t + spec.n):
            if pi[z]:
                K = K + pi[z] * (consts[aa - z - 1] if z < aa else 1)
        lines.append((beta + K, beta))
        if counter is not None:
            counter.merges += spec.n
        m = pi[t]
        if m:
            beta = beta + m * p0
            for i, p in faces:
                pi[t + i] = pi[t + i] + m * p
    return lines


def _build_side_envelope(spec, aa, consts, counter=None):
    """Top-level turn-value function via the stopping-line envelope.

    Linear-time in aa up to the final hull scan, and exact whenever some
    threshold rule is optimal at every opponent value; callers certify the
    solved pair and rebuild with ``_build_side`` otherwise.
    """
    lines = _threshold_lines(spec, aa, consts, counter)
    lines.reverse()  # slope-ascending order for the hull scan
    return plinear.upper_envelope(lines, counter)


def _backsub(spec, aa, y, consts):
    """Turn-level values and actions once the opposite start value y is
    known.  Returns (values indexed by tau = 0..aa-1, action bytes for
    tau = 1..aa-1)."""
    faces = spec.nonzero_faces()
    zero_bonus = spec.p0 * (1 - y)
    w = [None] * (aa + 1)  # w[k] = value at tau = aa - k
    vals = [None] * aa
    acts = bytearray(max(aa - 1, 0))
    for k in range(1, aa + 1):
        roll = zero_bonus
        for j, p in faces:
            roll = roll + (p if k - j <= 0 else p * w[k - j])
        if k < aa:
            c = consts[k - 1]
            if roll > c:
                w[k] = roll
                acts[aa - k - 1] = 1
            else:
                w[k] = c
            vals[aa - k] = w[k]
        else:
            w[k] = roll
            vals[0] = roll
    return vals, bytes(acts)


def _consistent(lhs, rhs, mode):
    if mode == numeric.RATIONAL:
        return lhs == rhs
    return abs(lhs - rhs) <= 1e-12


def solve_pair(spec, a, b, known, counter=None, keep_functions=False, construction="recursion"):
    """Solve one sub-game pair given all smaller sub-games.

    ``known`` must already contain v(b, 1..a-1) and v(a, 1..b-1).  Returns
    a dict with the two start values, turn-level values, action rows and
    (optionally, recursion construction only) all intermediate functions.
    "recursion" follows the Bellman steps one turn-score level at a time;
    "envelope" takes the hull of the threshold stopping lines, certifies
    the result against the one-step recursion, and falls back to the
    step-by-step build for the rare dice where a non-threshold rule wins.
    """
    consts_a = [1 - known.get(b, i) for i in range(1, a)]
    consts_b = [1 - known.get(a, i) for i in range(1, b)]
    if construction == "envelope":
        f_ab = _build_side_envelope(spec, a, consts_a, counter)
        f_ba = _build_side_envelope(spec, b, consts_b, counter)
        all_a = all_b = None
        x, y = plinear.solve_system(f_ab, f_ba, counter)
        vals_ab, acts_ab = _backsub(spec, a, y, consts_a)
        vals_ba, acts_ba = _backsub(spec, b, x, consts_b)
        # the stopping lines cover every threshold rule, but for some dice
        # the optimal within-turn rule is not a threshold; certify the
        # candidate against the true one-step recursion and rebuild the
        # pair step by step when it fails
        if _consistent(vals_ab[0], x, spec.mode) and _consistent(vals_ba[0], y, spec.mode):
            construction = None
        else:
            construction = "recursion"
    if construction == "recursion":
        f_ab, all_a = _build_side(spec, a, consts_a, counter, keep_functions)
        f_ba, all_b = _build_side(spec, b, consts_b, counter, keep_functions)
        x, y = plinear.solve_system(f_ab, f_ba, counter)
        vals_ab, acts_ab = _backsub(spec, a, y, consts_a)
        vals_ba, acts_ba = _backsub(spec, b, x, consts_b)
    elif construction is not None:
        raise ValueError(f"unknown construction {construction!r}")
    return {
        "x": x,
        "y": y,
        "vals_ab": vals_ab,
        "vals_ba": vals_ba,
        "acts_ab": acts_ab,
        "acts_ba": acts_ba,
        "f_ab": f_ab,
        "f_ba": f_ba,
        "all_ab": all_a,
        "all_ba": all_b,
    }


def _solve_degenerate_sure_win(spec):
    """p0 = 0 with positive upward mass: the roller accumulates without
    risk, so every start value is 1 and the optimal action is to roll."""
    N = spec.target
    one = numeric.coerce(1, spec.mode)
    table = ValueTable(N, spec.mode)
    policy = Policy(N)
    for a in range(1, N + 1):
        for b in range(1, N + 1):
            table.set(a, b, one)
            policy.set_row(a, b, bytes([1] * (a - 1)))
    return table, policy


def solve(spec, counter=None, kernel="auto", pair_hook=None, construction="envelope"):
    """Value table and optimal policy for the whole game.

    Deterministic: identical inputs give bit-identical outputs.  The
    optional ``pair_hook(a, b, f_ab, f_ba, x, y)`` observes every solved
    pair (used by curve export and the property suites).
    """
    if spec.p0 == 0 and spec.nonzero_faces():
        return _solve_degenerate_sure_win(spec)
    validate(spec)
    which = active_kernel(spec.mode, kernel)
    if which == "fast":
        if construction != "envelope":
            which = "pure"  # the compiled core only implements the envelope
        else:
            return _solve_fast(spec, counter, pair_hook)
    N = spec.target
    table = ValueTable(N, spec.mode)
    policy = Policy(N)
    for b in range(1, N + 1):
        for a in range(1, b + 1):
            res = solve_pair(spec, a, b, table, counter, construction=construction)
            table.set(a, b, res["x"])
            table.set(b, a, res["y"])
            policy.set_row(a, b, res["acts_ab"])
            policy.set_row(b, a, res["acts_ba"])
            if pair_hook is not None:
                pair_hook(a, b, res["f_ab"], res["f_ba"], res["x"], res["y"])
    return table, policy


def _solve_fast(spec, counter=None, pair_hook=None):
    import numpy as np

    N = spec.target
    probs = np.array([float(p) for p in spec.probs], dtype=np.float64)
    table = ValueTable(N, spec.mode)
    policy = Policy(N)
    raw = np.zeros((N + 1, N + 1), dtype=np.float64)
    for b in range(1, N + 1):
        for a in range(1, b + 1):
            consts_a = 1.0 - raw[b, 1:a]
            consts_b = 1.0 - raw[a, 1:b]
            (x, y, ok, acts_ab, acts_ba, fabx, fabv, fbax, fbav, merges, scans, evals) = (
                _fastcore.solve_pair(probs, a, b, consts_a, consts_b)
            )
            if counter is not None:
                counter.merges += merges
                counter.scans += scans
                counter.evals += evals
            if ok:
                f_ab = f_ba = None
                if pair_hook is not None:
                    f_ab = plinear.PLFunction(fabx.tolist(), fabv.tolist())
                    f_ba = plinear.PLFunction(fbax.tolist(), fbav.tolist())
            else:
                # certification failed: redo this pair step by step
                res = solve_pair(spec, a, b, table, counter, construction="recursion")
                x, y = res["x"], res["y"]
                acts_ab, acts_ba = res["acts_ab"], res["acts_ba"]
                f_ab, f_ba = res["f_ab"], res["f_ba"]
            raw[a, b] = x
            raw[b, a] = y
            table.set(a, b, x)
            table.set(b, a, y)
            policy.set_row(a, b, acts_ab)
            policy.set_row(b, a, acts_ba)
            if pair_hook is not None:
                pair_hook(a, b, f_ab, f_ba, x, y)
    return table, policy


def value_at(spec, table, state):
    """v(a, b, tau) recomputed from the solved start values.

    Accepts (a, b, tau) tuples or model.State; player-two states use the
    symmetry v(a, b, tau, 2) = 1 - v(b, a, tau, 1).
    """
    a, b, tau = state[0], state[1], state[2]
    j = state[3] if len(state) > 3 else 1
    if j == 2:
        return 1 - value_at(spec, table, (b, a, tau, 1))
    if not (1 <= a <= table.target and 1 <= b <= table.target):
        raise OutOfRange(f"(a={a}, b={b}) outside the solved table")
    if tau < 0 or tau > a + spec.n - 1:
        raise OutOfRange(f"turn score {tau} outside 0..{a + spec.n - 1}")
    if tau >= a:
        return numeric.coerce(1, spec.mode)
    y = table.get(b, a)
    consts = [1 - table.get(b, i) for i in range(1, a)]
    vals, _ = _backsub(spec, a, y, consts)
    return vals[tau]


@dataclass(frozen=True)
class SolitairePlan:
    """Single-turn expected-score maximizer: roll below the threshold,
    hold at or above it."""

    actions: dict  # tau -> Action, for 1 <= tau <= cap (Hold beyond)
    expected_score: object
    cap: int

    @property
    def threshold(self):
        """Smallest tau from which holding is optimal for good."""
        t = self.cap + 1
        for tau in range(self.cap, 0, -1):
            if self.actions[tau] is Action.HOLD:
                t = tau
            else:
                break
        return t

    def action(self, tau):
        if tau < 1:
            raise OutOfRange("hold is not available at tau = 0")
        return self.actions.get(tau, Action.HOLD)


def _solitaire_value(spec, cap):
    faces = spec.nonzero_faces()
    h = [None] * (cap + spec.n + 1)
    acts = {}
    for tau in range(cap + spec.n, cap - 1, -1):
        h[tau] = tau  # banked for sure: above cap rolling is dominated
        if tau <= cap:
            acts[tau] = Action.HOLD
    for tau in range(cap - 1, -1, -1):
        roll = 0
        for i, p in faces:
            roll = roll + p * h[tau + i]
        if tau == 0:
            h[0] = roll
        elif roll > tau:
            h[tau] = roll
            acts[tau] = Action.ROLL
        else:
            h[tau] = tau
            acts[tau] = Action.HOLD
    return h[0], acts


def solve_solitaire(spec, max_doublings=20):
    """Optimal single-turn play: action map and maximal expected score.

    Holding is certainly optimal once tau outweighs any roll's upside, so
    values above a finite cap are exactly tau; the cap is doubled until
    the root value stops moving (exact in rational mode).
    """
    validate(spec)
    # tau >= (1 - p0) * n / p0 makes rolling dominated; start above it
    cap = spec.n + 1
    bound = (1 - spec.p0) * spec.n / spec.p0
    while cap < bound:
        cap *= 2
    value, acts = _solitaire_value(spec, cap)
    for _ in range(max_doublings):
        cap *= 2
        value2, acts2 = _solitaire_value(spec, cap)
        if spec.mode == numeric.RATIONAL:
            stable = value2 == value
        else:
            stable = abs(value2 - value) <= 1e-12
        if stable:
            return SolitairePlan(actions=acts2, expected_score=value2, cap=cap)
        value, acts = value2, acts2
    raise NoConvergence("solitaire cap heuristic did not stabilize")
