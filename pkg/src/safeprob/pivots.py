"""Discrete pivots and pivotal safety.

A pivot is a function of (target, conditioner) that is injective in the
target at each conditioning value and whose law is agreed on by every
member of the credal set. A pragmatic distribution is pivotally safe when
the pivot is independent of the conditioner under it and carries the
common credal law, so that decisions scored through the pivot are exactly
as good as believed.

The probability-of-the-realized-outcome map plays a canonical role: when
no two outcomes share the same nonzero conditional probability it is
itself a pivot, and pivotal safety with any simple pivot is equivalent to
pivotal safety with this one.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from .core import (
    CredalSet,
    Pmf,
    Rv,
    condition,
    conditional_table,
    determines,
    support,
    value_sort_key,
)
from .errors import (
    EquivalenceViolation,
    NotAPivot,
    NotFullSupport,
    UniquenessViolated,
    ValidationError,
)
from .safety import (
    LEFT_FULL,
    RIGHT_SQUARE,
    Counterexample,
    SafetyQuery,
    Verdict,
    check_safety,
)


@dataclass(frozen=True)
class PivotSpec:
    """Total map from realizable (target value, conditioner value) cells
    to pivot values (numeric 1-tuples here, typically probabilities)."""

    name: str
    mapping: Mapping[tuple, tuple]

    def as_rv(self, u: Rv, v: Rv) -> Rv:
        table = {}
        for z in u.space.atoms:
            cell = (u.table[z], v.table[z])
            if cell not in self.mapping:
                raise ValidationError(f"pivot {self.name!r} undefined at cell {cell!r}")
            table[z] = self.mapping[cell]
        return Rv.generalized(u.space, self.name, table)


@dataclass(frozen=True)
class PivotVerdict:
    is_pivot: bool
    is_simple: bool
    failure: Optional[str] = None


def _induced_pmf(p: Pmf, u: Rv, v: Rv, spec: PivotSpec, atoms: Sequence[str]) -> dict:
    out: dict = {}
    for z in atoms:
        w = p.weights[z]
        if w:
            val = spec.mapping[(u.table[z], v.table[z])]
            out[val] = out.get(val, Fraction(0)) + w
    return out


def _check_pivot_on(
    spec: PivotSpec, u: Rv, v: Rv, verts: Sequence[Pmf], atoms: Sequence[str]
) -> PivotVerdict:
    cells = {(u.table[z], v.table[z]) for z in atoms}
    for cell in cells:
        if cell not in spec.mapping:
            return PivotVerdict(False, False, f"map undefined at cell {cell!r}")

    v_values = sorted({v.table[z] for z in atoms}, key=value_sort_key)
    images = {}
    for vv in v_values:
        seen: dict = {}
        for z in atoms:
            if v.table[z] != vv:
                continue
            uu = u.table[z]
            pv = spec.mapping[(uu, vv)]
            if seen.setdefault(pv, uu) != uu:
                return PivotVerdict(
                    False, False,
                    f"not injective at conditioning value {vv!r}: targets "
                    f"{seen[pv]!r} and {uu!r} both map to {pv!r}",
                )
        images[vv] = set(seen)

    laws = [_induced_pmf(p, u, v, spec, atoms) for p in verts]
    for law in laws[1:]:
        if law != laws[0]:
            return PivotVerdict(
                False, False, "credal members disagree on the pivot distribution"
            )

    overall = {spec.mapping[cell] for cell in cells}
    simple = all(images[vv] == overall for vv in v_values)
    failure = None if simple else "some conditioning value does not reach every pivot value"
    return PivotVerdict(True, simple, failure)


def check_pivot(spec: PivotSpec, u: Rv, v: Rv, credal: CredalSet) -> PivotVerdict:
    """Verify the pivot requirements: a well-defined map, injectivity in
    the target per conditioning value, and credal agreement on the
    induced law. Simple additionally means each per-value map is onto the
    whole pivot range."""
    return _check_pivot_on(spec, u, v, credal.vertex_list(), u.space.atoms)


def check_pivotal_safety(
    ptilde: Pmf,
    u: Rv,
    v: Rv,
    spec: PivotSpec,
    credal: CredalSet,
    w: Optional[Rv] = None,
) -> Verdict:
    """Pivotal safety of the pragmatic distribution with the given pivot.

    Requires the conditioner to have full pragmatic support and the
    supplied map to pass the pivot check (per stratum of ``w`` when
    given; ``w`` must be determined by the conditioner). Holds when the
    pivot is independent of the conditioner under the pragmatic
    distribution and its pragmatic law equals the common credal law.
    """
    if support(ptilde, v) != set(v.range()):
        raise NotFullSupport(
            f"{v.name} lacks full support under the pragmatic distribution"
        )
    if w is not None and determines(v, w) is None:
        raise ValidationError(f"stratifier {w.name!r} must be a coarsening of {v.name!r}")

    verts = credal.vertex_list()
    notes: list[str] = []

    def run_stratum(pt: Pmf, vs: Sequence[Pmf], atoms: Sequence[str], wv) -> Optional[Counterexample]:
        pv = _check_pivot_on(spec, u, v, vs, atoms)
        if not pv.is_pivot:
            raise NotAPivot(pv.failure or "pivot requirements not met")
        overall = _induced_pmf(pt, u, v, spec, atoms)
        for vv in sorted({v.table[z] for z in atoms}, key=value_sort_key):
            pt_v = condition(pt, v, vv)
            row = _induced_pmf(pt_v, u, v, spec, atoms)
            if row != overall:
                val = next(
                    k for k in sorted(set(row) | set(overall), key=value_sort_key)
                    if row.get(k, 0) != overall.get(k, 0)
                )
                notes.append("pragmatic pivot law varies with the conditioner")
                return Counterexample(
                    vertex=pt, v=vv, w=wv, u=val,
                    lhs=row.get(val, Fraction(0)), rhs=overall.get(val, Fraction(0)),
                )
        if vs:
            common = _induced_pmf(vs[0], u, v, spec, atoms)
            if common != overall:
                val = next(
                    k for k in sorted(set(common) | set(overall), key=value_sort_key)
                    if common.get(k, 0) != overall.get(k, 0)
                )
                notes.append("pragmatic pivot law differs from the common credal law")
                return Counterexample(
                    vertex=vs[0], w=wv, u=val,
                    lhs=common.get(val, Fraction(0)), rhs=overall.get(val, Fraction(0)),
                )
        return None

    if w is None:
        ce = run_stratum(ptilde, verts, ptilde.space.atoms, None)
        return Verdict(holds=ce is None, counterexample=ce, notes=tuple(notes))

    for wv in sorted(set(w.range()), key=value_sort_key):
        atoms_w = [z for z in ptilde.space.atoms if w.table[z] == wv]
        pt_w = condition(ptilde, w, wv)
        kept = [condition(p, w, wv) for p in verts if p.prob(w, wv) > 0]
        skipped = len(verts) - len(kept)
        if skipped:
            notes.append(f"stratum {w.name}={wv!r}: skipped {skipped} zero-mass vertex(es)")
        ce = run_stratum(pt_w, kept, atoms_w, wv)
        if ce is not None:
            return Verdict(holds=False, counterexample=ce, notes=tuple(notes))
    return Verdict(holds=True, notes=tuple(notes))


def _outcome_probability_mapping(ptilde: Pmf, u: Rv, v: Rv) -> dict:
    table = conditional_table(ptilde, u, v)
    return {
        (uu, vv): (Fraction(table.rows[vv][uu]),)
        for vv in v.range() for uu in u.range_given(v, vv)
    }


def canonical_pivot(ptilde: Pmf, u: Rv, v: Rv) -> PivotSpec:
    """The probability-of-the-realized-outcome map as a pivot spec.

    Defined when, at each conditioning value, no two realizable target
    values receive the same nonzero conditional probability; otherwise
    raises UniquenessViolated naming the clash.
    """
    table = conditional_table(ptilde, u, v)
    for vv in v.range():
        row = table.rows[vv]
        by_prob: dict = {}
        for uu in u.range_given(v, vv):
            prob = row[uu]
            if prob > 0 and prob in by_prob:
                raise UniquenessViolated(vv, prob, (by_prob[prob], uu))
            by_prob[prob] = uu
    return PivotSpec(
        name=f"prob({u.name}|{v.name})",
        mapping=_outcome_probability_mapping(ptilde, u, v),
    )


def pivot_equivalence(
    ptilde: Pmf, u: Rv, v: Rv, credal: CredalSet, search_cap: int = 8
) -> dict:
    """Cross-check the three faces of discrete pivotal safety.

    Computes (a) marginal validity of the probability-of-outcome map,
    (b) pivotal safety with that map, and (c) existence of any simple
    pivot achieving pivotal safety, searched exhaustively on spaces of at
    most ``search_cap`` atoms (beyond the cap (c) inherits (b), which is
    the witness direction). Under the uniqueness hypothesis (no two
    realizable outcomes share a nonzero conditional probability at any
    conditioning value) the three must agree and disagreement raises
    EquivalenceViolation, since it can only be an implementation bug;
    without the hypothesis the probability-of-outcome map need not be a
    pivot and only the individual answers are reported.

    Returns ``{"marginal_safe", "pivotal_safe", "simple_pivot_exists",
    "hypothesis_met"}``.
    """
    try:
        spec = canonical_pivot(ptilde, u, v)
        hypothesis_met = True
    except UniquenessViolated:
        spec = PivotSpec(
            name=f"prob({u.name}|{v.name})",
            mapping=_outcome_probability_mapping(ptilde, u, v),
        )
        hypothesis_met = False
    uprime = spec.as_rv(u, v)
    marginal_safe = check_safety(
        SafetyQuery(uprime, LEFT_FULL, v, RIGHT_SQUARE), ptilde, credal
    ).holds
    try:
        pivotal_safe = check_pivotal_safety(ptilde, u, v, spec, credal).holds
    except NotAPivot:
        pivotal_safe = False

    searched = len(ptilde.space.atoms) <= search_cap
    if searched:
        simple_exists = _search_simple_pivot(ptilde, u, v, credal)
    else:
        simple_exists = pivotal_safe

    if hypothesis_met and (
        marginal_safe != pivotal_safe or (searched and simple_exists != pivotal_safe)
    ):
        raise EquivalenceViolation(
            "pivot equivalence broke: "
            f"marginal={marginal_safe} pivotal={pivotal_safe} "
            f"simple-exists={simple_exists}"
        )
    return {
        "marginal_safe": marginal_safe,
        "pivotal_safe": pivotal_safe,
        "simple_pivot_exists": simple_exists,
        "hypothesis_met": hypothesis_met,
    }


def _search_simple_pivot(ptilde: Pmf, u: Rv, v: Rv, credal: CredalSet) -> bool:
    """Exhaustive search over relabelled simple pivots.

    A simple pivot restricted to each conditioning value is a bijection
    onto the pivot range, and pivotal safety only compares laws, so pivot
    values can be fixed to 0..k-1 without loss of generality.
    """
    v_values = v.range()
    row_ranges = {vv: u.range_given(v, vv) for vv in v_values}
    sizes = {len(r) for r in row_ranges.values()}
    if len(sizes) != 1:
        return False
    k = sizes.pop()
    labels = [(Fraction(i),) for i in range(k)]
    per_v_choices = [
        [list(zip(row_ranges[vv], perm)) for perm in itertools.permutations(labels)]
        for vv in v_values
    ]
    for combo in itertools.product(*per_v_choices):
        mapping = {}
        for vv, assignment in zip(v_values, combo):
            for uu, label in assignment:
                mapping[(uu, vv)] = label
        spec = PivotSpec(name="searched", mapping=mapping)
        try:
            if check_pivotal_safety(ptilde, u, v, spec, credal).holds:
                return True
        except NotAPivot:
            continue
    return False
