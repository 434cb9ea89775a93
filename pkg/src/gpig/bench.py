"""Operation-count benchmark for the backward solver.

Wall clock is recorded but never gated: the gated quantity is the
deterministic plinear operation counter (merge steps + scan steps +
evaluations), normalized by s*log(s) where s is the number of states of
the game, s = Theta(N^3).
"""

import json
import math
import time
from dataclasses import dataclass, field

from . import numeric
from .model import make_spec
from .plinear import OpCounter
from .solver import HAVE_FASTCORE, active_kernel, solve

SLACK = 0.25


def state_count(spec):
    """Number of states of the game, terminal marker included.

    Player j needs a (resp. b) points and the turn score ranges over
    0..need+n-1, for both orientations of (a, b).
    """
    N, n = spec.target, spec.n
    per_player = sum((need + n) * N for need in range(1, N + 1))
    return 2 * per_player + 1


@dataclass(frozen=True)
class BenchRow:
    target: int
    states: int
    elapsed: float
    merges: int
    scans: int
    evals: int
    kernel: str
    value: float

    @property
    def ops(self):
        return self.merges + self.scans + self.evals

    @property
    def ratio(self):
        s = self.states
        return self.ops / (s * math.log(s))

    def as_dict(self):
        return {
            "target": self.target,
            "states": self.states,
            "elapsed": self.elapsed,
            "merges": self.merges,
            "scans": self.scans,
            "evals": self.evals,
            "ops": self.ops,
            "ratio": self.ratio,
            "kernel": self.kernel,
            "value": self.value,
        }


@dataclass
class BenchReport:
    rows: list = field(default_factory=list)

    def verdict(self):
        """PASS iff each step from target N to M obeys the budget
        ops(M)/ops(N) <= (M/N)^3 * (log M / log N) * (1 + SLACK).

        With a single row there is nothing to judge and the verdict is
        None.  Rows from different kernels have identical counts, so the
        check runs on the deduplicated target sequence.
        """
        seen = {}
        for row in self.rows:
            seen[row.target] = row
        targets = sorted(seen)
        if len(targets) < 2:
            return None
        for n1, n2 in zip(targets, targets[1:]):
            r1, r2 = seen[n1], seen[n2]
            budget = (n2 / n1) ** 3 * (math.log(n2) / math.log(n1)) * (1 + SLACK)
            if r2.ops > r1.ops * budget:
                return "FAIL"
        return "PASS"

    def as_dict(self):
        return {"rows": [r.as_dict() for r in self.rows], "verdict": self.verdict()}

    def write_json(self, path):
        with open(path, "w") as fh:
            json.dump(self.as_dict(), fh, indent=2)
            fh.write("\n")


def run(spec, targets, kernel="auto"):
    """Solve the spec's game at each target and collect counter rows.

    ``kernel`` may also be "both": each target is solved with the compiled
    core and the pure fallback, giving a direct speed comparison (their
    operation counts must agree exactly).
    """
    if spec.mode != numeric.FLOAT:
        raise ValueError("benchmarking is a float-mode activity")
    if kernel == "both":
        kernels = ("fast", "pure") if HAVE_FASTCORE else ("pure",)
    else:
        kernels = (kernel,)
    report = BenchReport()
    for N in targets:
        sp = make_spec(spec.probs, N, mode=spec.mode)
        for k in kernels:
            resolved = active_kernel(sp.mode, k)
            counter = OpCounter()
            t0 = time.perf_counter()
            table, _ = solve(sp, counter=counter, kernel=k)
            elapsed = time.perf_counter() - t0
            report.rows.append(
                BenchRow(
                    target=N,
                    states=state_count(sp),
                    elapsed=elapsed,
                    merges=counter.merges,
                    scans=counter.scans,
                    evals=counter.evals,
                    kernel=resolved,
                    value=table.get(N, N),
                )
            )
    return report
