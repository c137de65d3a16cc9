"""Calibration checks and the ignore/equivalence structure around them.

A forecaster is calibrated when, conditioned on issuing a particular
forecast, the actual distribution of the target equals that forecast.
Here the forecast itself is treated as a generalized random variable: the
map sending each outcome to the pragmatic conditional row at its
conditioner value.

Row equality is exact rational equality by default; an optional additive
tolerance can relax the grouping of forecasts for near-calibration
studies.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional

from .core import (
    ConditionalTable,
    CredalSet,
    Pmf,
    Rv,
    conditional_table,
    determines,
    essentially_unique,
    joint_rv,
    support,
    value_pmf,
    value_sort_key,
)
from .errors import (
    EquivalenceViolation,
    MissingDetermination,
    NonNumericTarget,
    NotEssentiallyUnique,
)
from .safety import (
    LEFT_FULL,
    RIGHT_PLAIN,
    RIGHT_SQUARE,
    Counterexample,
    SafetyQuery,
    Verdict,
    check_safety,
)


def encode_row(row: Mapping) -> tuple:
    """Canonical hashable encoding of a pmf over target values."""
    return tuple(
        sorted(((uv, Fraction(pr)) for uv, pr in row.items()),
               key=lambda kv: value_sort_key(kv[0]))
    )


def decode_row(encoded: tuple) -> dict:
    return dict(encoded)


@dataclass(frozen=True)
class PredictedDistributionRv:
    """The forecast map: atom -> pragmatic conditional row at its
    conditioner value, usable as a generalized random variable."""

    base: ConditionalTable
    as_rv: Rv


def predicted_distribution_rv(
    ptilde: Pmf, u: Rv, v: Rv, name: Optional[str] = None
) -> PredictedDistributionRv:
    table = conditional_table(ptilde, u, v)
    label = name or f"pred({u.name}|{v.name})"
    values = {z: encode_row(table.rows[v.table[z]]) for z in ptilde.space.atoms}
    return PredictedDistributionRv(base=table, as_rv=Rv.generalized(ptilde.space, label, values))


def _guard(ptilde: Pmf, v: Rv, credal: CredalSet) -> tuple:
    verts = credal.vertex_list()
    if not essentially_unique(ptilde, v, credal):
        raise NotEssentiallyUnique(
            f"pragmatic conditionals on {v.name} are not essentially unique"
        )
    return verts


def check_calibrated_full(u: Rv, v: Rv, ptilde: Pmf, credal: CredalSet) -> Verdict:
    """Full-distribution calibration: for every credal vertex and every
    forecast row issued at some vertex-supported conditioning value, the
    vertex's conditional on that forecast equals the forecast. Checked in
    the denominator-cleared exact form; zero-mass forecasts are vacuous."""
    verts = _guard(ptilde, v, credal)
    pred = predicted_distribution_rv(ptilde, u, v).as_rv
    rows = sorted(
        {pred.table[z] for p in verts for z in p.space.atoms if p.weights[z] > 0},
        key=value_sort_key,
    )
    u_range = u.range()
    for p in verts:
        for row in rows:
            mass = p.prob(pred, row)
            forecast = decode_row(row)
            for uv in u_range:
                joint = sum(
                    (p.weights[z] for z in p.space.atoms
                     if u.table[z] == uv and pred.table[z] == row),
                    start=Fraction(0),
                )
                if joint != forecast[uv] * mass:
                    return Verdict(
                        holds=False,
                        counterexample=Counterexample(
                            vertex=p, v=row, u=uv, lhs=joint, rhs=forecast[uv] * mass
                        ),
                    )
    return Verdict(holds=True)


def check_calibrated_mean(u: Rv, v: Rv, ptilde: Pmf, credal: CredalSet) -> Verdict:
    """Mean calibration: conditioned on the pragmatic conditional mean
    taking a value, the actual conditional mean equals that value."""
    if not u.is_numeric:
        raise NonNumericTarget(f"mean calibration needs a numeric target, got {u.name!r}")
    verts = _guard(ptilde, v, credal)
    from .core import condition, expectation

    mean_at = {}
    for val in sorted(support(ptilde, v), key=value_sort_key):
        mean_at[val] = expectation(condition(ptilde, v, val), u)
    fallback = tuple(
        sum((uv[j] for uv in u.range()), start=Fraction(0)) / len(u.range())
        for j in range(len(u.range()[0]))
    )
    mean_rv = Rv.generalized(
        ptilde.space,
        f"mean({u.name}|{v.name})",
        {z: mean_at.get(v.table[z], fallback) for z in ptilde.space.atoms},
    )
    mus = sorted(
        {mean_rv.table[z] for p in verts for z in p.space.atoms if p.weights[z] > 0},
        key=value_sort_key,
    )
    arity = len(mus[0])
    for p in verts:
        for mu in mus:
            mass = p.prob(mean_rv, mu)
            for j in range(arity):
                weighted = sum(
                    (p.weights[z] * u.table[z][j] for z in p.space.atoms
                     if mean_rv.table[z] == mu),
                    start=Fraction(0),
                )
                if weighted != mu[j] * mass:
                    return Verdict(
                        holds=False,
                        counterexample=Counterexample(
                            vertex=p, v=mu, lhs=weighted, rhs=mu[j] * mass
                        ),
                    )
    return Verdict(holds=True)


def ignores(ptilde: Pmf, u: Rv, v: Rv, vprime: Rv) -> bool:
    """Does the pragmatic conditional on (v, vprime) ignore v?

    Requires vprime to be determined by v almost surely under the
    pragmatic distribution; raises MissingDetermination otherwise. True
    when every supported joint conditioning cell yields the same target
    row as conditioning on vprime alone.
    """
    if determines(v, vprime, ptilde) is None:
        raise MissingDetermination(
            f"{v.name} does not determine {vprime.name} almost surely"
        )
    from .core import condition

    pair = joint_rv(v, vprime)
    rows_prime = {
        pv: value_pmf(condition(ptilde, vprime, pv), u)
        for pv in support(ptilde, vprime)
    }
    for cell in support(ptilde, pair):
        row_joint = value_pmf(condition(ptilde, pair, cell), u)
        if row_joint != rows_prime[cell[1]]:
            return False
    return True


def calibration_equivalence(u: Rv, v: Rv, ptilde: Pmf, credal: CredalSet) -> dict:
    """Cross-check the three faces of calibration.

    Computes (a) the direct calibration check, (b) plain safety with the
    forecast map as conditioner, and (c) a search for a coarsening of the
    conditioner that is ignored while marginal validity holds per stratum
    of it. The three must agree; disagreement raises EquivalenceViolation
    because it can only come from an implementation bug.

    Returns ``{"calibrated", "safe_given_predicted", "ignore_witness"}``.
    """
    calibrated = check_calibrated_full(u, v, ptilde, credal).holds
    pred = predicted_distribution_rv(ptilde, u, v).as_rv
    safe_given_predicted = check_safety(
        SafetyQuery(u, LEFT_FULL, pred, RIGHT_PLAIN), ptilde, credal
    ).holds

    witness = None
    candidates = [Rv.constant(ptilde.space, "0", 0), v, pred]
    for cand in candidates:
        if determines(v, cand, ptilde) is None:
            continue
        verdict = check_safety(
            SafetyQuery(u, LEFT_FULL, v, RIGHT_SQUARE, stratifier=cand),
            ptilde, credal,
        )
        if verdict.holds:
            witness = cand
            break

    results = {calibrated, safe_given_predicted, witness is not None}
    if len(results) != 1:
        raise EquivalenceViolation(
            "calibration equivalence broke: "
            f"direct={calibrated} via-forecast={safe_given_predicted} "
            f"witness={witness!r}"
        )
    return {
        "calibrated": calibrated,
        "safe_given_predicted": safe_given_predicted,
        "ignore_witness": witness,
    }
