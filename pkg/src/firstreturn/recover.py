"""Recovery engine: evaluate a function along extracted subsequences and
diagnose convergence, plus the G-delta witness construction.

A function oracle is queried only on points of the dense sequence, with a
single separate ground-truth query at the probe point; the split is
enforced by a per-invocation query audit.  Finite-horizon surrogates for
limits are explicit: a discrete-valued run "converged" when its value tail
is constant over a configurable window, a rational-valued one when the
window oscillation is below 2^-t.  Everything short of that is reported as
not converged or, with enough tail flips, as divergence evidence.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .path import PATH, ROUTE, DenseSequence, PathTrace, path_trace, route_trace
from .space import Dist, GoodBasis, PointCode

DISCRETE = "discrete"
RATIONAL = "rational"


@dataclass
class FunctionOracle:
    """Total deterministic evaluator with a declared class tag.

    decomposition, when present, maps each range value to the closed pieces
    of its preimage (used by the builder, the G-delta construction and the
    EBC1 cover); functions without one cannot be fed to those constructions.
    """

    fid: str
    evaluator: Callable[[PointCode], object]
    y_kind: str = DISCRETE
    class_tag: str = "unknown"  # continuous | baire-one | unknown
    decomposition: Optional[dict] = None

    def __call__(self, p: PointCode):
        return self.evaluator(p)


class QueryAudit:
    """Counts oracle queries, split by channel."""

    def __init__(self, dense: DenseSequence):
        self.dense = dense
        self.on_dense = 0
        self.ground_truth = 0
        self.off_dense = 0

    def eval_on_dense(self, f: FunctionOracle, p: PointCode):
        if self.dense.contains(p):
            self.on_dense += 1
        else:
            self.off_dense += 1
        return f(p)

    def eval_ground_truth(self, f: FunctionOracle, p: PointCode):
        self.ground_truth += 1
        return f(p)

    def summary(self) -> dict:
        return {"on_dense": self.on_dense, "ground_truth": self.ground_truth,
                "off_dense": self.off_dense}


@dataclass
class Verdict:
    kind: str  # "converged" | "not-converged-at-horizon" | "diverged-evidence"
    value: object = None
    since: Optional[int] = None
    flips: int = 0

    def __str__(self):
        if self.kind == "converged":
            return f"converged({self.value}, since={self.since})"
        if self.kind == "diverged-evidence":
            return f"diverged-evidence({self.flips} flips)"
        return self.kind


@dataclass
class RecoveryResult:
    fid: str
    x: PointCode
    mode: str
    values: list
    verdict: Verdict
    expected: object
    correct: Optional[bool]
    trace: PathTrace
    audit: dict


def _tail_run_length(values: Sequence) -> int:
    if not values:
        return 0
    n = 1
    while n < len(values) and values[-n - 1] == values[-n]:
        n += 1
    return n


def _flips_in(values: Sequence) -> int:
    return sum(1 for i in range(len(values) - 1) if values[i + 1] != values[i])


def classify_values(values: Sequence, y_kind: str, window: int = 16,
                    tol_exp: int = 10) -> Verdict:
    """Finite-horizon verdict over a value trace.

    Discrete range: converged means constant over the last `window` steps;
    rational range: oscillation below 2^-tol_exp over that window.  Two or
    more tail flips count as divergence evidence; anything else is simply
    not converged at this horizon.
    """
    if len(values) < window:
        flips = _flips_in(values)
        if flips >= 2:
            return Verdict("diverged-evidence", flips=flips)
        return Verdict("not-converged-at-horizon")
    tail = values[-window:]
    if y_kind == DISCRETE:
        run = _tail_run_length(values)
        if run >= window:
            return Verdict("converged", values[-1], since=len(values) - run)
        flips = _flips_in(tail)
        if flips >= 2:
            return Verdict("diverged-evidence", flips=flips)
        return Verdict("not-converged-at-horizon")
    osc = max(tail) - min(tail)
    if osc < Fraction(1, 2 ** tol_exp):
        run = _tail_run_length(values)
        return Verdict("converged", values[-1], since=len(values) - run)
    if _flips_in(tail) >= 2:
        return Verdict("diverged-evidence", flips=_flips_in(tail))
    return Verdict("not-converged-at-horizon")


def recover_at(f: FunctionOracle, x: PointCode, dense: DenseSequence, mode: str,
               N: int, basis: Optional[GoodBasis] = None, window: int = 16,
               tol_exp: int = 10) -> RecoveryResult:
    """Evaluate f along the extracted subsequence for x and classify the tail.

    f is queried on the dense-sequence points of the trace plus exactly one
    ground-truth query at x; the audit in the result proves it.
    """
    if mode == PATH:
        trace = path_trace(x, dense, basis, N)
    elif mode == ROUTE:
        trace = route_trace(x, dense, N)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    audit = QueryAudit(dense)
    values = [audit.eval_on_dense(f, s.point) for s in trace.steps]
    expected = audit.eval_ground_truth(f, x)
    verdict = classify_values(values, f.y_kind, window, tol_exp)
    correct: Optional[bool] = None
    if verdict.kind == "converged":
        if f.y_kind == DISCRETE:
            correct = verdict.value == expected
        else:
            correct = abs(verdict.value - expected) <= Fraction(1, 2 ** tol_exp)
    return RecoveryResult(f.fid, x, mode, values, verdict, expected, correct,
                          trace, audit.summary())


def recovery_report(f: FunctionOracle, dense: DenseSequence, mode: str,
                    test_points: Sequence[PointCode], N: int,
                    basis: Optional[GoodBasis] = None, window: int = 16,
                    tol_exp: int = 10) -> dict:
    """Per-point verdicts plus summary rates; deterministic."""
    per_point = []
    counts: Dict[str, int] = {}
    correct = 0
    for x in test_points:
        res = recover_at(f, x, dense, mode, N, basis, window, tol_exp)
        counts[res.verdict.kind] = counts.get(res.verdict.kind, 0) + 1
        if res.correct:
            correct += 1
        per_point.append({
            "x": str(x),
            "verdict": str(res.verdict),
            "kind": res.verdict.kind,
            "expected": str(res.expected),
            "correct": res.correct,
            "steps": len(res.trace.steps),
            "terminated": res.trace.terminated,
            "audit": res.audit,
        })
    total = len(test_points)
    return {
        "fid": f.fid,
        "mode": mode,
        "horizon": N,
        "per_point": per_point,
        "counts": dict(sorted(counts.items())),
        "converged_rate": (counts.get("converged", 0) / total) if total else None,
        "correct_rate": (correct / total) if total else None,
    }


# ---------------------------------------------------------------------------
# Lemma-5 style G-delta witnesses
# ---------------------------------------------------------------------------


@dataclass
class GdeltaWitness:
    """The level-k witness data for a closed value set F_y.

    p_list enumerates (1-1, increasing) the dense-sequence indices whose
    value falls in O_k; U_j membership is decided by running the path and
    checking whether x_{p_j} is visited.  For discrete ranges O_k = F_y
    (simplification recorded in `notes`).
    """

    f: FunctionOracle
    F_y: tuple
    k: int
    i_max: int
    horizon: int
    p_list: List[int]
    dense: DenseSequence
    basis: GoodBasis
    notes: List[str] = field(default_factory=list)

    def in_O(self, value) -> bool:
        if self.f.y_kind == DISCRETE:
            return value in self.F_y
        bound = Fraction(1, 2 ** self.k)
        return any(abs(value - c) < bound for c in self.F_y)

    def in_closure_O(self, value) -> bool:
        if self.f.y_kind == DISCRETE:
            return value in self.F_y
        bound = Fraction(1, 2 ** self.k)
        return any(abs(value - c) <= bound for c in self.F_y)

    def membership(self, x: PointCode) -> dict:
        """Finite-i approximation of "x in H_k" with full detail."""
        trace = path_trace(x, dense=self.dense, basis=self.basis, N=self.horizon)
        visited = trace.visited()
        hits = [j for j, p in enumerate(self.p_list) if self.dense[p] in visited]
        exceptional = [m for m, p in enumerate(self.p_list) if self.dense[p] == x]
        member = True
        failed_at = None
        for i in range(self.i_max):
            via_u = any(j >= i for j in hits)
            via_exc = any(m < i for m in exceptional)
            if not (via_u or via_exc):
                member = False
                failed_at = i
                break
        return {"member": member, "hits": hits, "exceptional": exceptional,
                "failed_at": failed_at, "trace_terminated": trace.terminated}

    def contains(self, x: PointCode) -> bool:
        return self.membership(x)["member"]


def gdelta_witness(f: FunctionOracle, F_y, dense: DenseSequence,
                   basis: GoodBasis, k: int, i_max: int, horizon: int,
                   j_budget: int = 64) -> GdeltaWitness:
    """Materialize the (p_j) subsequence and the H_k membership test."""
    wit = GdeltaWitness(f, tuple(F_y), k, i_max, horizon, [], dense, basis)
    if f.y_kind == DISCRETE:
        wit.notes.append("discrete range: O_k = F_y for every k")
    seen_points = set()
    for p, pt in enumerate(dense.points):
        if pt in seen_points:
            continue  # enumerate points 1-1
        seen_points.add(pt)
        if wit.in_O(f(pt)):
            wit.p_list.append(p)
            if len(wit.p_list) >= j_budget:
                wit.notes.append(f"p_list truncated at {j_budget}")
                break
    return wit


def evaluation_map(family: Sequence[FunctionOracle], dense: DenseSequence,
                   P: int) -> dict:
    """Truncated evaluation map I(f) = (f(x_p))_{p<P} with injectivity check."""
    if P < 1:
        raise ValueError("width must be >= 1")
    rows = []
    for f in family:
        rows.append(tuple(f(dense[p]) for p in range(min(P, len(dense)))))
    collisions = []
    for i in range(len(family)):
        for j in range(i + 1, len(family)):
            if rows[i] == rows[j]:
                collisions.append((family[i].fid, family[j].fid))
    return {
        "width": min(P, len(dense)),
        "rows": {f.fid: rows[i] for i, f in enumerate(family)},
        "collisions": collisions,
        "injective_at_width": not collisions,
    }
