"""Deciding the safety hierarchy for a pragmatic distribution.

A query names a target variable U, a conditioner V, a left mode (the full
distribution of U, or only its expectation) and a right mode describing
how the conditioner enters:

=============  ================================================================
right mode     meaning for the checked guarantee
=============  ================================================================
``plain``      the pragmatic conditional is correct at every conditioning value
``angle``      correct on average over the conditioner
``square``     correct while ignoring the conditioner (marginal validity)
``dblsquare``  pragmatic conditionals bracket the truth (range guarantee)
=============  ================================================================

Every predicate is linear in the candidate truth P once conditional
denominators are cleared, so checking the finitely many extreme points of
the credal set is sound and complete. Guards of the form "for supported
strata" are quantified over the union of vertex supports: a two-point
mixture supports the union, and varying the mixture weight forces each
vertex's residual to vanish, so nothing in the interior can fail without
a vertex failing. All discrete checks are exact rational comparisons.

An optional stratifier W turns a query into its per-stratum version: both
the pragmatic distribution and the credal vertices are conditioned on
W = w for every vertex-supported w, and vertices giving w zero mass are
skipped for that stratum.

Everything here is a pure function over immutable inputs; per-vertex
checks are independent, and the reported counterexample is always the
first failure in (vertex order, value order), so results are
deterministic and safe to compute concurrently.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from ._linalg import UNIQUE, matrix_rank, solve_linear
from .core import (
    CredalSet,
    Pmf,
    Rv,
    condition,
    essentially_unique,
    expectation,
    joint_rv,
    support,
    value_pmf,
    value_sort_key,
)
from .errors import NonNumericTarget, NotEssentiallyUnique, ValidationError

LEFT_FULL = "full"
LEFT_AVERAGE = "average"
RIGHT_PLAIN = "plain"
RIGHT_ANGLE = "angle"
RIGHT_SQUARE = "square"
RIGHT_DBLSQUARE = "dblsquare"

#: Stable notion identifiers used in reports and on the command line.
NOTION_QUERIES = {
    "valid": (LEFT_FULL, RIGHT_PLAIN),
    "sqerr": (LEFT_AVERAGE, RIGHT_PLAIN),
    "dist-unbiased": (LEFT_FULL, RIGHT_ANGLE),
    "unbiased": (LEFT_AVERAGE, RIGHT_ANGLE),
    "marginal": (LEFT_FULL, RIGHT_SQUARE),
    "range": (LEFT_AVERAGE, RIGHT_DBLSQUARE),
}

NOTION_NOTATION = {
    "valid": "U|V",
    "sqerr": "<U>|V",
    "dist-unbiased": "U|<V>",
    "unbiased": "<U>|<V>",
    "marginal": "U|[V]",
    "range": "<U>|[[V]]",
    "avg-marginal": "<U>|[V]",
    "dist-range": "U|[[V]]",
    "calibrated": "calibrated",
    "pivotal": "pivotal",
}


@dataclass(frozen=True)
class SafetyQuery:
    """One node of the safety hierarchy."""

    target: Rv
    left_mode: str
    conditioner: Rv
    right_mode: str
    stratifier: Optional[Rv] = None

    def __post_init__(self):
        if self.left_mode not in (LEFT_FULL, LEFT_AVERAGE):
            raise ValidationError(f"unknown left mode {self.left_mode!r}")
        if self.right_mode not in (RIGHT_PLAIN, RIGHT_ANGLE, RIGHT_SQUARE, RIGHT_DBLSQUARE):
            raise ValidationError(f"unknown right mode {self.right_mode!r}")
        atoms = self.target.space.atoms
        if self.conditioner.space.atoms != atoms or (
            self.stratifier is not None and self.stratifier.space.atoms != atoms
        ):
            raise ValidationError("query variables must share one outcome space")


@dataclass(frozen=True)
class Counterexample:
    """Witness of a failed safety check. ``lhs`` is the actual quantity
    under the named vertex, ``rhs`` the pragmatic claim it should match.
    A missing vertex means the failure is structural (no credal member
    was needed to exhibit it)."""

    vertex: Optional[Pmf] = None
    v: object = None
    w: object = None
    u: object = None
    lhs: object = None
    rhs: object = None


@dataclass(frozen=True)
class Verdict:
    holds: bool
    counterexample: Optional[Counterexample] = None
    notes: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.holds and self.counterexample is None:
            raise ValidationError("failing verdict requires a counterexample")


def _conditional_rows(ptilde: Pmf, u: Rv, v: Rv) -> tuple[list, dict]:
    """Supported conditioning values (canonical order) and their rows."""
    supported = sorted(support(ptilde, v), key=value_sort_key)
    rows = {val: value_pmf(condition(ptilde, v, val), u) for val in supported}
    return supported, rows


def _conditional_means(ptilde: Pmf, u: Rv, v: Rv) -> tuple[list, dict]:
    supported = sorted(support(ptilde, v), key=value_sort_key)
    means = {val: expectation(condition(ptilde, v, val), u) for val in supported}
    return supported, means


def hull_membership(point: Mapping, generators: Sequence[Mapping]) -> bool:
    """Is ``point`` a convex combination of ``generators``?

    All arguments are probability maps over the same finite value set
    (missing keys mean zero). Decided by exact rational feasibility:
    every candidate support of size up to the constraint rank is solved
    exactly and accepted when its weights are nonnegative, which finds a
    basic feasible solution whenever any feasible combination exists.
    """
    values = sorted(
        {v for v in point} | {v for g in generators for v in g}, key=value_sort_key
    )
    m = len(generators)
    if m == 0:
        return False
    a = [[Fraction(g.get(val, 0)) for g in generators] for val in values]
    a.append([Fraction(1)] * m)
    b = [Fraction(point.get(val, 0)) for val in values] + [Fraction(1)]
    rank = matrix_rank(a)
    for k in range(1, min(m, rank) + 1):
        for cols in itertools.combinations(range(m), k):
            sub = [[row[c] for c in cols] for row in a]
            status, lam = solve_linear(sub, b)
            if status == UNIQUE and all(x >= 0 for x in lam):
                return True
    return False


def _scan_vertices(verts, per_vertex):
    """Run ``per_vertex`` over vertices in order; first counterexample wins."""
    for p in verts:
        ce = per_vertex(p)
        if ce is not None:
            return ce
    return None


def _check_unstratified(
    query: SafetyQuery, ptilde: Pmf, verts: Sequence[Pmf]
) -> Optional[Counterexample]:
    u, v = query.target, query.conditioner
    left, right = query.left_mode, query.right_mode

    if left == LEFT_AVERAGE:
        supported, means = _conditional_means(ptilde, u, v)
        arity = len(next(iter(means.values()))) if means else 0

        if right == RIGHT_DBLSQUARE:
            bounds = [
                (min(means[val][j] for val in supported),
                 max(means[val][j] for val in supported))
                for j in range(arity)
            ]

            def per_vertex(p):
                e = expectation(p, u)
                for j, (lo, hi) in enumerate(bounds):
                    if not (lo <= e[j] <= hi):
                        bound = lo if e[j] < lo else hi
                        return Counterexample(vertex=p, u=None, lhs=e[j], rhs=bound)
                return None

        elif right == RIGHT_ANGLE:
            def per_vertex(p):
                e = expectation(p, u)
                claim = [Fraction(0)] * arity
                for val in sorted(support(p, v), key=value_sort_key):
                    pv = p.prob(v, val)
                    for j in range(arity):
                        claim[j] += pv * means[val][j]
                for j in range(arity):
                    if e[j] != claim[j]:
                        return Counterexample(vertex=p, lhs=e[j], rhs=claim[j])
                return None

        elif right == RIGHT_SQUARE:
            def per_vertex(p):
                e = expectation(p, u)
                for val in supported:
                    for j in range(arity):
                        if e[j] != means[val][j]:
                            return Counterexample(vertex=p, v=val, lhs=e[j], rhs=means[val][j])
                return None

        else:  # RIGHT_PLAIN, denominators cleared
            def per_vertex(p):
                for val in v.range():
                    pv = p.prob(v, val)
                    if pv == 0:
                        continue
                    mass_weighted = [Fraction(0)] * arity
                    for z in p.space.atoms:
                        if v.table[z] == val and p.weights[z]:
                            for j, c in enumerate(u.table[z]):
                                mass_weighted[j] += p.weights[z] * c
                    for j in range(arity):
                        if mass_weighted[j] != means[val][j] * pv:
                            return Counterexample(
                                vertex=p, v=val,
                                lhs=mass_weighted[j] / pv, rhs=means[val][j],
                            )
                return None

        return _scan_vertices(verts, per_vertex)

    # left == LEFT_FULL: pointwise distribution checks over range(u)
    supported, rows = _conditional_rows(ptilde, u, v)
    u_range = u.range()

    if right == RIGHT_PLAIN:
        def per_vertex(p):
            for val in v.range():
                pv = p.prob(v, val)
                if pv == 0:
                    continue
                for uv in u_range:
                    joint = sum(
                        (p.weights[z] for z in p.space.atoms
                         if v.table[z] == val and u.table[z] == uv),
                        start=Fraction(0),
                    )
                    if joint != rows[val][uv] * pv:
                        return Counterexample(
                            vertex=p, v=val, u=uv, lhs=joint, rhs=rows[val][uv] * pv
                        )
            return None

    elif right == RIGHT_ANGLE:
        def per_vertex(p):
            actual = value_pmf(p, u)
            claim = {uv: Fraction(0) for uv in u_range}
            for val in sorted(support(p, v), key=value_sort_key):
                pv = p.prob(v, val)
                for uv in u_range:
                    claim[uv] += rows[val][uv] * pv
            for uv in u_range:
                if actual[uv] != claim[uv]:
                    return Counterexample(vertex=p, u=uv, lhs=actual[uv], rhs=claim[uv])
            return None

    elif right == RIGHT_SQUARE:
        def per_vertex(p):
            actual = value_pmf(p, u)
            for val in supported:
                for uv in u_range:
                    if actual[uv] != rows[val][uv]:
                        return Counterexample(
                            vertex=p, v=val, u=uv, lhs=actual[uv], rhs=rows[val][uv]
                        )
            return None

    else:  # RIGHT_DBLSQUARE: convex-hull membership of the target's law
        generators = [rows[val] for val in supported]

        def per_vertex(p):
            actual = value_pmf(p, u)
            if not hull_membership(actual, generators):
                return Counterexample(vertex=p)
            return None

    return _scan_vertices(verts, per_vertex)


def check_safety(query: SafetyQuery, ptilde: Pmf, credal: CredalSet) -> Verdict:
    """Decide the queried safety notion against every credal vertex.

    Raises NotEssentiallyUnique when some vertex supports a conditioning
    (or stratum) value the pragmatic distribution does not, and
    NonNumericTarget for average-mode queries on non-numeric targets.
    """
    u, v, w = query.target, query.conditioner, query.stratifier
    if query.left_mode == LEFT_AVERAGE and not u.is_numeric:
        raise NonNumericTarget(f"average-mode query needs a numeric target, got {u.name!r}")
    verts = credal.vertex_list()
    guard_rv = joint_rv(v, w) if w is not None else v
    if not essentially_unique(ptilde, guard_rv, credal):
        raise NotEssentiallyUnique(
            f"pragmatic conditionals on {guard_rv.name} are not essentially unique"
        )

    notes: list[str] = []
    if w is None:
        ce = _check_unstratified(query, ptilde, verts)
        return Verdict(holds=ce is None, counterexample=ce, notes=tuple(notes))

    flat = SafetyQuery(u, query.left_mode, v, query.right_mode)
    strata = sorted({wv for p in verts for wv in support(p, w)}, key=value_sort_key)
    for wv in strata:
        ptilde_w = condition(ptilde, w, wv)
        kept, originals = [], []
        for p in verts:
            if p.prob(w, wv) > 0:
                kept.append(condition(p, w, wv))
                originals.append(p)
        skipped = len(verts) - len(kept)
        if skipped:
            notes.append(f"stratum {w.name}={_fmt(wv)}: skipped {skipped} zero-mass vertex(es)")
        ce = _check_unstratified(flat, ptilde_w, kept)
        if ce is not None:
            original = originals[kept.index(ce.vertex)] if ce.vertex in kept else ce.vertex
            ce = Counterexample(
                vertex=original, v=ce.v, w=wv, u=ce.u, lhs=ce.lhs, rhs=ce.rhs
            )
            return Verdict(holds=False, counterexample=ce, notes=tuple(notes))
    return Verdict(holds=True, notes=tuple(notes))


def _fmt(value) -> str:
    from .core import format_value

    return format_value(value)


#: Solid implication arrows of the hierarchy, antecedent -> consequent.
HIERARCHY_IMPLICATIONS = (
    ("valid", "sqerr"),
    ("valid", "dist-unbiased"),
    ("valid", "calibrated"),
    ("sqerr", "unbiased"),
    ("dist-unbiased", "unbiased"),
    ("unbiased", "range"),
    ("marginal", "dist-unbiased"),
)


def hierarchy_report(u: Rv, v: Rv, ptilde: Pmf, credal: CredalSet) -> dict:
    """Evaluate every unstratified notion plus calibration and (when the
    probability-of-outcome pivot is available) pivotal safety.

    Violated implication arrows are appended to the consequent verdict's
    notes as internal-error diagnostics; they indicate a checker bug, not
    a property of the inputs.
    """
    from .calibration import check_calibrated_full
    from .errors import NotAPivot, NotFullSupport, UniquenessViolated
    from .pivots import canonical_pivot, check_pivotal_safety

    report: dict[str, Verdict] = {}
    for notion, (left, right) in NOTION_QUERIES.items():
        query = SafetyQuery(u, left, v, right)
        report[notion] = check_safety(query, ptilde, credal)
    report["calibrated"] = check_calibrated_full(u, v, ptilde, credal)
    try:
        spec = canonical_pivot(ptilde, u, v)
        report["pivotal"] = check_pivotal_safety(ptilde, u, v, spec, credal)
    except (UniquenessViolated, NotFullSupport):
        pass  # probability-of-outcome pivot undefined here; key omitted
    except NotAPivot as exc:
        report["pivotal"] = Verdict(
            holds=False,
            counterexample=Counterexample(),
            notes=(f"probability-of-outcome map is not a pivot: {exc}",),
        )

    for antecedent, consequent in HIERARCHY_IMPLICATIONS:
        if antecedent in report and consequent in report:
            if report[antecedent].holds and not report[consequent].holds:
                flagged = report[consequent]
                report[consequent] = Verdict(
                    holds=flagged.holds,
                    counterexample=flagged.counterexample,
                    notes=flagged.notes + (
                        f"internal-error: {NOTION_NOTATION[antecedent]} holds "
                        f"but {NOTION_NOTATION[consequent]} fails",
                    ),
                )
    return report
