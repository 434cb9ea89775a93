"""Piecewise-linear convex non-increasing functions on [0, 1].

These are the carriers of the per-sub-game value recursion: each one maps a
candidate opponent value y to the mover's value at some turn score.  The
algebra needed is tiny: weighted affine combination, max with a constant,
and the exact solution of the coupled pair x = f(y), y = g(x).

Functions are represented by their breakpoint abscissae (0 = x0 < ... = 1)
and ordinates.  Collinear points are coalesced on construction, so the
interior point count is exactly the number of non-differentiability points.
All operations work unchanged over exact rationals and doubles.
"""

from bisect import bisect_right

from .errors import NoCrossing, OutOfDomain, WeightMassError
from .numeric import FLOAT_TOL, is_exact

#: when True, every constructed function is checked for convexity,
#: monotonicity and continuity (cheap, O(breakpoints)).
CHECK_INVARIANTS = True

#: slack allowed in float-mode invariant checks (accumulated rounding)
_CHECK_SLACK = 1e-9


class OpCounter:
    """Deterministic tally of elementary segment operations.

    merges: breakpoints visited while merging grids, scans: breakpoints
    visited while locating crossings, evals: pointwise evaluations.  The
    total is the unit in which the solver's step bound is measured.
    """

    __slots__ = ("merges", "scans", "evals")

    def __init__(self):
        self.merges = 0
        self.scans = 0
        self.evals = 0

    def total(self):
        return self.merges + self.scans + self.evals

    def as_dict(self):
        return {
            "merges": self.merges,
            "scans": self.scans,
            "evals": self.evals,
            "total": self.total(),
        }


class PLFunction:
    __slots__ = ("xs", "vs", "exact")

    def __init__(self, xs, vs, _check=None):
        self.xs = tuple(xs)
        self.vs = tuple(vs)
        self.exact = all(is_exact(c) for c in self.xs) and all(
            is_exact(c) for c in self.vs
        )
        if _check is None:
            _check = CHECK_INVARIANTS
        if _check:
            self._check()

    def _check(self):
        xs, vs = self.xs, self.vs
        if len(xs) < 2 or len(xs) != len(vs):
            raise ValueError("need matching breakpoint/value sequences")
        if xs[0] != 0 or xs[-1] != 1:
            raise ValueError("domain must be exactly [0, 1]")
        slack = 0 if self.exact else _CHECK_SLACK
        prev_slope = None
        for k in range(len(xs) - 1):
            dx = xs[k + 1] - xs[k]
            if dx <= 0:
                raise ValueError("breakpoints must be strictly increasing")
            slope = (vs[k + 1] - vs[k]) / dx
            if slope > slack:
                raise ValueError(f"function must be non-increasing (slope {slope})")
            if prev_slope is not None and slope < prev_slope - slack:
                raise ValueError("function must be convex")
            prev_slope = slope

    def __repr__(self):
        pts = ", ".join(f"({x}, {v})" for x, v in zip(self.xs, self.vs))
        return f"PLFunction[{pts}]"

    def __eq__(self, other):
        return (
            isinstance(other, PLFunction)
            and self.xs == other.xs
            and self.vs == other.vs
        )

    def __hash__(self):
        return hash((self.xs, self.vs))

    def __call__(self, y):
        return evaluate(self, y)

    def slopes(self):
        xs, vs = self.xs, self.vs
        return tuple(
            (vs[k + 1] - vs[k]) / (xs[k + 1] - xs[k]) for k in range(len(xs) - 1)
        )

    def leftmost_slope(self):
        return (self.vs[1] - self.vs[0]) / (self.xs[1] - self.xs[0])


_ONE = PLFunction((0, 1), (1, 1), _check=False)


def constant_one():
    """The constant function 1 (value of any already-won turn position)."""
    return _ONE


def constant(c):
    return PLFunction((0, 1), (c, c))


def evaluate(f, y, counter=None):
    """Exact value at y: segment located by binary search, then linear
    interpolation."""
    if y < 0 or y > 1:
        raise OutOfDomain(f"evaluation point {y} outside [0, 1]")
    if counter is not None:
        counter.evals += 1
    xs, vs = f.xs, f.vs
    k = bisect_right(xs, y) - 1
    if k >= len(xs) - 1:
        return vs[-1]
    if y == xs[k]:
        return vs[k]
    return vs[k] + (y - xs[k]) * (vs[k + 1] - vs[k]) / (xs[k + 1] - xs[k])


def breakpoint_count(f):
    """Number of non-differentiability points (interior breakpoints)."""
    return len(f.xs) - 2


def _collinear(x1, v1, x2, v2, x3, v3, exact):
    s12 = (v2 - v1) / (x2 - x1)
    s23 = (v3 - v2) / (x3 - x2)
    if exact:
        return s12 == s23
    return abs(s12 - s23) <= FLOAT_TOL * max(1.0, abs(s12), abs(s23))


def _coalesce(xs, vs, exact):
    ox = [xs[0]]
    ov = [vs[0]]
    for x, v in zip(xs[1:], vs[1:]):
        ox.append(x)
        ov.append(v)
        while len(ox) >= 3 and _collinear(
            ox[-3], ov[-3], ox[-2], ov[-2], ox[-1], ov[-1], exact
        ):
            del ox[-2]
            del ov[-2]
    return ox, ov


def _grid_values(f, grid, counter=None):
    """Values of f on an ascending grid inside [0, 1], by a linear walk."""
    if counter is not None:
        counter.evals += len(grid)
    xs, vs = f.xs, f.vs
    out = []
    k = 0
    top = len(xs) - 1
    for x in grid:
        while k < top and xs[k + 1] <= x:
            k += 1
        if x == xs[k]:
            out.append(vs[k])
        else:
            out.append(vs[k] + (x - xs[k]) * (vs[k + 1] - vs[k]) / (xs[k + 1] - xs[k]))
    return out


def affine_combine(terms, p0_weight, counter=None):
    """y -> p0_weight*(1-y) + sum of w_j * f_j(y).

    Weights must be non-negative and sum to one together with p0_weight.
    The output lives on the merged breakpoint grid of the inputs, with
    collinear points coalesced.
    """
    exact_w = is_exact(p0_weight) and all(is_exact(w) for w, _ in terms)
    mass = p0_weight
    for w, _ in terms:
        if w < 0:
            raise WeightMassError(f"negative weight {w}")
        mass = mass + w
    if p0_weight < 0:
        raise WeightMassError(f"negative weight {p0_weight}")
    if exact_w:
        if mass != 1:
            raise WeightMassError(f"weights sum to {mass}, not 1")
    elif abs(mass - 1.0) > FLOAT_TOL:
        raise WeightMassError(f"weights sum to {mass!r}, not 1")

    active = [(w, f) for w, f in terms if w > 0]
    grid = set()
    for _, f in active:
        grid.update(f.xs)
        if counter is not None:
            counter.merges += len(f.xs)
    grid.update((0, 1))
    grid = sorted(grid)

    exact = exact_w and all(f.exact for _, f in active)
    vals = [p0_weight * (1 - x) for x in grid]
    for w, f in active:
        fv = _grid_values(f, grid, counter)
        for i in range(len(grid)):
            vals[i] = vals[i] + w * fv[i]

    ox, ov = _coalesce(grid, vals, exact)
    return PLFunction(ox, ov)


def max_with_constant(f, c, counter=None):
    """y -> max(c, f(y)): f left of the unique crossing, constant c after.

    Adds at most one breakpoint.  In float mode an exact tie at a
    breakpoint keeps the constant branch, so the representation is
    deterministic.
    """
    if c < 0 or c > 1:
        raise OutOfDomain(f"constant {c} outside [0, 1]")
    xs, vs = f.xs, f.vs
    if c <= vs[-1]:
        return f
    if c >= vs[0]:
        return _ONE if c == 1 else constant(c)
    # first index whose value has dropped to c or below
    idx = 0
    while vs[idx] > c:
        idx += 1
    if counter is not None:
        counter.scans += idx + 1
    if vs[idx] == c:
        ystar = xs[idx]
        ox = list(xs[: idx + 1])
        ov = list(vs[: idx + 1])
    else:
        l = idx - 1
        ystar = xs[l] + (c - vs[l]) * (xs[idx] - xs[l]) / (vs[idx] - vs[l])
        # float guards: the crossing is strictly interior mathematically
        if ystar <= xs[l]:
            ox, ov = list(xs[:l]), list(vs[:l])
            ox.append(xs[l])
            ov.append(c)
        elif ystar >= xs[idx]:
            ox, ov = list(xs[:idx]), list(vs[:idx])
            ox.append(xs[idx])
            ov.append(c)
        else:
            ox, ov = list(xs[: l + 1]), list(vs[: l + 1])
            ox.append(ystar)
            ov.append(c)
    ox.append(1)
    ov.append(c)
    ox, ov = _coalesce(ox, ov, f.exact and is_exact(c))
    return PLFunction(ox, ov)


def upper_envelope(lines, counter=None):
    """Upper envelope of lines y -> A - B*y given in slope-ascending
    order (B descending), restricted to [0, 1].

    This is the half-plane-intersection construction of the top-level
    turn-value function from its candidate stopping lines; with the input
    pre-sorted it is a single hull scan.
    """
    exact = all(is_exact(c) for A, B in lines for c in (A, B))
    # below-width segments are numerical noise in float mode; absorbing
    # them keeps the output strictly convex
    eps = 0 if exact else FLOAT_TOL
    hull = []  # (A, B, start_y): line active from start_y rightward
    for A, B in lines:
        if counter is not None:
            counter.scans += 1
        y_int = None
        keep = True
        while hull:
            A0, B0, y0 = hull[-1]
            if B == B0:
                if A <= A0:
                    keep = False
                    break
                hull.pop()
                if counter is not None:
                    counter.merges += 1
                continue
            y_int = (A0 - A) / (B0 - B)
            if y_int <= y0 + eps:
                hull.pop()
                if counter is not None:
                    counter.merges += 1
                continue
            break
        if not keep:
            continue
        if not hull:
            hull.append((A, B, 0))
        else:
            hull.append((A, B, y_int))

    xs = []
    vs = []
    for A, B, y0 in hull:
        if y0 >= 1:
            break
        xs.append(y0)
        vs.append(A - B * y0)
    A, B, _ = hull[len(xs) - 1]
    xs.append(1)
    vs.append(A - B)
    if counter is not None:
        counter.evals += len(xs)
    xs, vs = _coalesce(xs, vs, exact)
    return PLFunction(xs, vs)


def _pullback_points(f_ab, f_ba, counter=None):
    """Preimages under f_ba of the breakpoints of f_ab (arguments of the
    composition g = f_ab o f_ba at which g may kink)."""
    xs, vs = f_ba.xs, f_ba.vs
    out = []
    l = 0
    top = len(xs) - 1
    # targets descending <=> preimages ascending (f_ba is non-increasing)
    for t in reversed(f_ab.xs):
        if t > vs[0] or t < vs[-1]:
            continue
        while l < top and vs[l + 1] > t:
            l += 1
        if counter is not None:
            counter.scans += 1
        if vs[l] == t:
            out.append(xs[l])
        elif l < top and vs[l + 1] != vs[l]:
            out.append(xs[l] + (t - vs[l]) * (xs[l + 1] - xs[l]) / (vs[l + 1] - vs[l]))
    return out


def solve_system(f_ab, f_ba, counter=None):
    """Unique (x, y) with x = f_ab(y) and y = f_ba(x).

    Forms g(x) = f_ab(f_ba(x)) on the pulled-back breakpoint grid and
    scans for the single segment where g(x) - x changes sign; the final
    linear equation is solved exactly.  Uniqueness holds because every
    slope product has magnitude below one.
    """
    if CHECK_INVARIANTS:
        for f in (f_ab, f_ba):
            if f.leftmost_slope() <= -1:
                raise NoCrossing(f"slope {f.leftmost_slope()} not above -1")

    cands = set(f_ba.xs)
    cands.update(_pullback_points(f_ab, f_ba, counter))
    cands = sorted(cands)

    prev_x = prev_g = None
    for x in cands:
        if counter is not None:
            counter.scans += 1
        g = evaluate(f_ab, evaluate(f_ba, x, counter), counter)
        h = g - x
        if h == 0:
            return x, evaluate(f_ba, x)
        if h < 0:
            if prev_x is None:
                break
            m = (g - prev_g) / (x - prev_x)
            xstar = (prev_g - m * prev_x) / (1 - m)
            if xstar < prev_x:
                xstar = prev_x
            elif xstar > x:
                xstar = x
            return xstar, evaluate(f_ba, xstar)
        prev_x, prev_g = x, g
    raise NoCrossing("no sign change found; inputs violate the slope bounds")


def to_curve_rows(f, mode):
    """Breakpoint rows for the curve CSV export (header 'y,f')."""
    from .numeric import format_curve

    return [(format_curve(x, mode), format_curve(v, mode)) for x, v in zip(f.xs, f.vs)]
