"""Symmetric loss functions, Bayes acts and decision safety.

Decision safety means: the expected loss of the policy that plays the
pragmatic Bayes act at each observed conditioning value is, under every
credal member, exactly what the pragmatic distribution claims it to be at
every conditioning value. Losses here are symmetric (invariant under a
simultaneous relabelling of outcomes and actions); built-in kinds are the
0/1 loss, the Brier score and the log score, and finite custom tables are
accepted after an explicit symmetry audit.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional

import numpy as np

from .core import (
    CredalSet,
    Pmf,
    Rv,
    as_rational,
    conditional_table,
    essentially_unique,
    support,
    value_sort_key,
)
from .errors import (
    InfiniteLoss,
    NotEssentiallyUnique,
    ValidationError,
)
from .safety import Counterexample, Verdict

ZERO_ONE = "zero_one"
BRIER = "brier"
LOG = "log"
CUSTOM = "custom_table"

LOG_TOLERANCE = 1e-12
_SYMMETRY_CAP = 6


@dataclass(frozen=True)
class LossFunction:
    """A symmetric loss. ``custom_table`` maps (outcome value, action id)
    to a rational loss or ``math.inf``; it is audited for permutation
    symmetry at construction and rejected otherwise."""

    kind: str
    custom_table: Optional[Mapping] = None
    randomized: bool = False  # zero_one only: score mixed actions as 1 - a(u)

    def __post_init__(self):
        if self.kind not in (ZERO_ONE, BRIER, LOG, CUSTOM):
            raise ValidationError(f"unknown loss kind {self.kind!r}")
        if self.kind == CUSTOM:
            if not self.custom_table:
                raise ValidationError("custom loss needs a table")
            normalized = {
                key: (math.inf if entry == math.inf else as_rational(entry))
                for key, entry in self.custom_table.items()
            }
            object.__setattr__(self, "custom_table", normalized)
            _audit_symmetry(normalized)
        elif self.custom_table is not None:
            raise ValidationError("only custom_table losses take a table")

    def outcomes(self) -> list:
        return sorted({u for (u, _) in self.custom_table}, key=value_sort_key)

    def actions(self) -> list[str]:
        return sorted({a for (_, a) in self.custom_table})


def _audit_symmetry(table: Mapping) -> None:
    outcomes = sorted({u for (u, _) in table}, key=value_sort_key)
    actions = sorted({a for (_, a) in table})
    for u in outcomes:
        for a in actions:
            if (u, a) not in table:
                raise ValidationError(f"custom loss table missing entry {(u, a)!r}")
    if len(outcomes) > _SYMMETRY_CAP:
        raise ValidationError(
            f"symmetry audit supports at most {_SYMMETRY_CAP} outcomes, got {len(outcomes)}"
        )
    columns = sorted(
        tuple(table[(u, a)] for u in outcomes) for a in actions
    )
    for perm in itertools.permutations(range(len(outcomes))):
        permuted = sorted(
            tuple(table[(outcomes[perm[i]], a)] for i in range(len(outcomes)))
            for a in actions
        )
        if permuted != columns:
            raise ValidationError(
                "custom loss table is not invariant under outcome permutations"
            )


@dataclass(frozen=True)
class Action:
    """Either a mass vector over outcomes (built-in losses) or an opaque
    action id (custom tables). ``tied`` records a broken Bayes-act tie."""

    mass: Optional[Mapping] = None
    action_id: Optional[str] = None
    tied: bool = False


def bayes_act(loss: LossFunction, belief: Mapping) -> Action:
    """An action minimising expected loss under ``belief``.

    Brier and log scores are proper, so the belief itself is optimal; the
    0/1 loss picks a point mass on the mode. Ties break to the lowest
    outcome (or action id) in canonical order and set the tie flag.
    """
    if loss.kind in (BRIER, LOG):
        return Action(mass={u: as_rational(p) for u, p in belief.items()})
    if loss.kind == ZERO_ONE:
        best = max(belief.values())
        modes = [u for u in sorted(belief, key=value_sort_key) if belief[u] == best]
        mass = {u: Fraction(1) if u == modes[0] else Fraction(0) for u in belief}
        return Action(mass=mass, tied=len(modes) > 1)

    best_value, best_action, tied = None, None, False
    for a in loss.actions():
        expected = Fraction(0)
        infinite = False
        for u, p in belief.items():
            if p == 0:
                continue
            entry = loss.custom_table[(u, a)]
            if entry == math.inf:
                infinite = True
                break
            expected += p * as_rational(entry)
        value = math.inf if infinite else expected
        if best_value is None or value < best_value:
            best_value, best_action, tied = value, a, False
        elif value == best_value:
            tied = True
    return Action(action_id=best_action, tied=tied)


def loss_value(loss: LossFunction, u_value, action: Action):
    """L(u, a); exact rational except for the log score (float, may be inf)."""
    if loss.kind == ZERO_ONE:
        got = action.mass.get(u_value, Fraction(0))
        if loss.randomized:
            return 1 - got
        return Fraction(0) if got == 1 else Fraction(1)
    if loss.kind == BRIER:
        total = Fraction(0)
        keys = set(action.mass) | {u_value}
        for k in keys:
            q = action.mass.get(k, Fraction(0))
            target = 1 if k == u_value else 0
            total += (target - q) ** 2
        return total
    if loss.kind == LOG:
        q = action.mass.get(u_value, Fraction(0))
        return math.inf if q == 0 else -math.log(q)
    return loss.custom_table[(u_value, action.action_id)]


def _losses_equal(kind: str, a, b) -> bool:
    if kind == LOG:
        if math.isinf(a) or math.isinf(b):
            return a == b
        return abs(a - b) <= LOG_TOLERANCE
    return a == b


def check_decision_safety(
    ptilde: Pmf, u: Rv, v: Rv, loss: LossFunction, credal: CredalSet
) -> Verdict:
    """Does the pragmatic Bayes policy earn exactly its believed loss?

    For every credal vertex P and every supported conditioning value v0,
    the expected loss of the policy under P must equal the pragmatic
    conditional expected loss at v0. Exact rational comparison except for
    the log score, compared to within 1e-12.
    """
    verts = credal.vertex_list()
    if not essentially_unique(ptilde, v, credal):
        raise NotEssentiallyUnique(
            f"pragmatic conditionals on {v.name} are not essentially unique"
        )
    notes: list[str] = []
    if loss.kind == CUSTOM:
        missing = set(u.range()) - set(loss.outcomes())
        if missing:
            raise ValidationError(
                f"custom loss table lacks outcomes {sorted(missing, key=value_sort_key)}"
            )
    table = conditional_table(ptilde, u, v)
    if table.arbitrary_rows:
        notes.append(
            "policy at unsupported conditioning values uses the uniform fill row"
        )
    policy = {}
    for vv in v.range():
        act = bayes_act(loss, table.rows[vv])
        if act.tied:
            notes.append(f"Bayes-act tie at conditioning value {vv!r} broken canonically")
        policy[vv] = act

    supported = sorted(support(ptilde, v), key=value_sort_key)
    believed = {}
    for vv in supported:
        total = Fraction(0) if loss.kind != LOG else 0.0
        for uu, p in table.rows[vv].items():
            if p == 0:
                continue
            term = loss_value(loss, uu, policy[vv])
            if term == math.inf:
                raise InfiniteLoss(
                    f"believed loss infinite at conditioning value {vv!r}, outcome {uu!r}"
                )
            total = total + p * term if loss.kind != LOG else total + float(p) * term
        believed[vv] = total

    for p in verts:
        actual = Fraction(0) if loss.kind != LOG else 0.0
        for z in p.space.atoms:
            w = p.weights[z]
            if w == 0:
                continue
            term = loss_value(loss, u.table[z], policy[v.table[z]])
            if term == math.inf:
                raise InfiniteLoss(
                    f"realized loss infinite at atom {z!r} under a credal vertex"
                )
            actual = actual + w * term if loss.kind != LOG else actual + float(w) * term
        for vv in supported:
            if not _losses_equal(loss.kind, actual, believed[vv]):
                return Verdict(
                    holds=False,
                    counterexample=Counterexample(
                        vertex=p, v=vv, lhs=actual, rhs=believed[vv]
                    ),
                    notes=tuple(notes),
                )
    return Verdict(holds=True, notes=tuple(notes))


def decision_loss_table(
    ptilde: Pmf, u: Rv, v: Rv, loss: LossFunction, credal: CredalSet
) -> dict:
    """Believed conditional losses per conditioning value and actual
    expected losses per credal vertex, for reporting alongside
    :func:`check_decision_safety`."""
    table = conditional_table(ptilde, u, v)
    policy = {vv: bayes_act(loss, table.rows[vv]) for vv in v.range()}
    believed = {}
    for vv in sorted(support(ptilde, v), key=value_sort_key):
        believed[vv] = sum(
            p * loss_value(loss, uu, policy[vv])
            for uu, p in table.rows[vv].items() if p
        )
    actual = []
    for vertex in credal.vertex_list():
        actual.append(sum(
            w * loss_value(loss, u.table[z], policy[v.table[z]])
            for z, w in vertex.weights.items() if w
        ))
    return {"policy": policy, "believed": believed, "actual": actual}


def gamble_demo(theta_bar: float, n: int, samples: int, seed: int) -> dict:
    """The over-eager gamble on a positive location parameter.

    A gamble pays -1 (a gain) when the parameter is positive and 1 when
    it is negative; the decision rule accepts whenever the pragmatic
    posterior puts more than half its mass above zero, which under the
    location-family confidence distribution means accepting exactly when
    the observed mean is positive. With a true negative parameter the
    actual expected loss is positive while the believed expected loss is
    negative: the rule is not safe for this loss.

    Returns closed-form and Monte Carlo versions of the actual expected
    loss plus the Monte Carlo believed expected loss. Raises if the
    computed signs contradict the guarantee beyond numerical resolution.
    """
    if not theta_bar < 0:
        raise ValidationError("the demo requires a negative true parameter")
    if n <= 0 or samples <= 0:
        raise ValidationError("n and samples must be positive")
    from .confidence import normal_cdf

    sqrt_n = math.sqrt(n)
    actual_closed = 1.0 - normal_cdf(-theta_bar * sqrt_n)

    rng = np.random.Generator(np.random.Philox(key=seed))
    theta_hat = rng.normal(loc=theta_bar, scale=1.0 / sqrt_n, size=samples)
    accept = theta_hat > 0
    actual_mc = float(np.mean(accept))  # loss is 1 whenever the rule accepts

    from scipy.special import ndtr

    believed_terms = np.where(accept, 2.0 * ndtr(-theta_hat * sqrt_n) - 1.0, 0.0)
    believed_mc = float(np.mean(believed_terms))

    resolution = 1e-9
    if actual_closed < -resolution or believed_mc > resolution:
        raise ValidationError(
            f"sign guarantee violated: actual={actual_closed}, believed={believed_mc}"
        )
    return {
        "actual_expected_loss": actual_closed,
        "actual_expected_loss_mc": actual_mc,
        "believed_expected_loss": believed_mc,
    }
