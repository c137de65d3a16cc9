import math
import random
from fractions import Fraction

import pytest

from conftest import pivotal_instance, product_space
from safeprob.core import CredalSet, Pmf
from safeprob.decisions import (
    BRIER,
    CUSTOM,
    LOG,
    ZERO_ONE,
    Action,
    LossFunction,
    bayes_act,
    check_decision_safety,
    decision_loss_table,
    gamble_demo,
    loss_value,
)
from safeprob.demos import monty_events, monty_scenario
from safeprob.errors import InfiniteLoss, ValidationError
from safeprob.pivots import canonical_pivot, check_pivot, check_pivotal_safety
from safeprob.updates import build_event_scenario, rule_completion

D = lambda i: (Fraction(i),)


class TestBayesAct:
    def test_brier_returns_belief(self):
        belief = {D(0): Fraction(1, 3), D(1): Fraction(2, 3)}
        act = bayes_act(LossFunction(BRIER), belief)
        assert act.mass == belief and not act.tied

    def test_zero_one_picks_mode(self):
        belief = {D(0): Fraction(1, 3), D(1): Fraction(2, 3)}
        act = bayes_act(LossFunction(ZERO_ONE), belief)
        assert act.mass[D(1)] == 1 and not act.tied

    def test_zero_one_tie_break(self):
        belief = {D(0): Fraction(1, 2), D(1): Fraction(1, 2)}
        act = bayes_act(LossFunction(ZERO_ONE), belief)
        assert act.mass[D(0)] == 1 and act.tied

    def test_custom_minimizes_exactly(self):
        table = {
            (D(0), "stay"): 0, (D(1), "stay"): 1,
            (D(0), "move"): 1, (D(1), "move"): 0,
        }
        loss = LossFunction(CUSTOM, custom_table=table)
        act = bayes_act(loss, {D(0): Fraction(1, 3), D(1): Fraction(2, 3)})
        assert act.action_id == "move"

    def test_brier_act_is_optimal_among_grid(self):
        # spot-check propriety: the belief beats nearby distorted actions
        belief = {D(0): Fraction(1, 4), D(1): Fraction(3, 4)}
        loss = LossFunction(BRIER)
        base = sum(p * loss_value(loss, u, Action(mass=belief)) for u, p in belief.items())
        for eps in (Fraction(1, 10), Fraction(-1, 10)):
            other = {D(0): belief[D(0)] + eps, D(1): belief[D(1)] - eps}
            alt = sum(p * loss_value(loss, u, Action(mass=other)) for u, p in belief.items())
            assert base < alt

    def test_permutation_covariance_zero_one(self):
        rng = random.Random(101)
        values = [D(0), D(1), D(2)]
        loss = LossFunction(ZERO_ONE)
        for _ in range(60):
            weights = rng.sample(range(1, 10), 3)
            total = sum(weights)
            belief = {v: Fraction(w, total) for v, w in zip(values, weights)}
            act = bayes_act(loss, belief)
            if act.tied:
                continue
            perm = values[:]
            rng.shuffle(perm)
            mapping = dict(zip(values, perm))
            moved_belief = {mapping[v]: p for v, p in belief.items()}
            moved_act = bayes_act(loss, moved_belief)
            assert not moved_act.tied
            assert moved_act.mass == {mapping[v]: m for v, m in act.mass.items()}


class TestLossFunctions:
    def test_custom_table_symmetry_accepted(self):
        table = {
            (D(0), "a"): 0, (D(1), "a"): 1,
            (D(0), "b"): 1, (D(1), "b"): 0,
        }
        LossFunction(CUSTOM, custom_table=table)

    def test_custom_table_asymmetry_rejected(self):
        table = {
            (D(0), "a"): 0, (D(1), "a"): 2,
            (D(0), "b"): 1, (D(1), "b"): 0,
        }
        with pytest.raises(ValidationError):
            LossFunction(CUSTOM, custom_table=table)

    def test_symmetry_cap(self):
        outcomes = [D(i) for i in range(7)]
        table = {(u, "a"): 0 for u in outcomes}
        with pytest.raises(ValidationError):
            LossFunction(CUSTOM, custom_table=table)

    def test_randomized_zero_one_scores_mixtures(self):
        loss = LossFunction(ZERO_ONE, randomized=True)
        mixed = Action(mass={D(0): Fraction(1, 4), D(1): Fraction(3, 4)})
        assert loss_value(loss, D(1), mixed) == Fraction(1, 4)

    def test_log_loss_infinite_on_zero_mass(self):
        loss = LossFunction(LOG)
        act = Action(mass={D(0): Fraction(1)})
        assert loss_value(loss, D(1), act) == math.inf


class TestDecisionSafety:
    def test_fair_monty_zero_one_exact(self):
        scn = monty_scenario()
        verdict = check_decision_safety(
            scn["ptilde"], scn["U"], scn["V"], LossFunction(ZERO_ONE), scn["credal"]
        )
        assert verdict.holds
        table = decision_loss_table(
            scn["ptilde"], scn["U"], scn["V"], LossFunction(ZERO_ONE), scn["credal"]
        )
        assert set(table["believed"].values()) == {Fraction(1, 3)}
        assert set(table["actual"]) == {Fraction(1, 3)}

    def test_fair_monty_brier_exact(self):
        scn = monty_scenario()
        verdict = check_decision_safety(
            scn["ptilde"], scn["U"], scn["V"], LossFunction(BRIER), scn["credal"]
        )
        assert verdict.holds
        table = decision_loss_table(
            scn["ptilde"], scn["U"], scn["V"], LossFunction(BRIER), scn["credal"]
        )
        assert set(table["believed"].values()) == {Fraction(4, 9)}
        assert set(table["actual"]) == {Fraction(4, 9)}

    def test_fair_monty_log_within_tolerance(self):
        scn = monty_scenario()
        verdict = check_decision_safety(
            scn["ptilde"], scn["U"], scn["V"], LossFunction(LOG), scn["credal"]
        )
        assert verdict.holds

    def test_naive_monty_fails_with_exact_gap(self):
        built = build_event_scenario(monty_events())
        joint = rule_completion(built["naive"], built["space"])
        verdict = check_decision_safety(
            joint, built["target"], built["conditioner"],
            LossFunction(ZERO_ONE), built["credal"],
        )
        assert not verdict.holds
        ce = verdict.counterexample
        assert ce.rhs == Fraction(1, 2)  # believed
        assert ce.lhs == Fraction(2, 3)  # realized under a deterministic host
        assert any("tie" in note for note in verdict.notes)

    def test_log_loss_raises_on_impossible_outcome(self):
        space, u, v = product_space(2, 2)
        ptilde = Pmf(space, {
            "u0v0": Fraction(1, 2), "u0v1": Fraction(1, 2),
        })
        vertex = Pmf(space, {"u1v0": Fraction(1, 2), "u1v1": Fraction(1, 2)})
        credal = CredalSet.from_vertices([vertex])
        with pytest.raises(InfiniteLoss):
            check_decision_safety(ptilde, u, v, LossFunction(LOG), credal)

    def test_pivotal_safety_gives_decision_safety(self):
        # a simple common-law pivot with tie-free Bayes acts makes the
        # pragmatic policy earn exactly its believed loss for every
        # symmetric built-in score
        rng = random.Random(103)
        exercised = 0
        for _ in range(200):
            inst = pivotal_instance(rng, safe=True)
            spec = canonical_pivot(inst["ptilde"], inst["U"], inst["V"])
            if not check_pivot(spec, inst["U"], inst["V"], inst["credal"]).is_simple:
                continue
            if not check_pivotal_safety(
                inst["ptilde"], inst["U"], inst["V"], spec, inst["credal"]
            ).holds:
                continue
            for kind in (ZERO_ONE, BRIER, LOG):
                loss = LossFunction(kind)
                verdict = check_decision_safety(
                    inst["ptilde"], inst["U"], inst["V"], loss, inst["credal"]
                )
                if any("tie" in note for note in verdict.notes):
                    continue
                assert verdict.holds, kind
                exercised += 1
        assert exercised >= 30

    def test_tower_property_under_pragmatic_truth(self):
        rng = random.Random(107)
        for _ in range(25):
            inst = pivotal_instance(rng, safe=rng.random() < 0.5)
            loss = LossFunction(rng.choice([ZERO_ONE, BRIER]))
            table = decision_loss_table(
                inst["ptilde"], inst["U"], inst["V"], loss,
                CredalSet.from_vertices([inst["ptilde"]]),
            )
            v = inst["V"]
            mixed = sum(
                inst["ptilde"].prob(v, vv) * believed
                for vv, believed in table["believed"].items()
            )
            assert mixed == table["actual"][0]


class TestGambleDemo:
    def test_requires_negative_parameter(self):
        with pytest.raises(ValidationError):
            gamble_demo(0.2, 10, 1000, 1)

    def test_believed_loss_matches_quadrature(self):
        # independent oracle: integrate the believed conditional loss of
        # the accept region against the sampling density of the mean
        from scipy.integrate import quad
        from scipy.stats import norm

        theta_bar, n = -0.2, 10
        root_n = math.sqrt(n)

        def integrand(t):
            return (2.0 * norm.cdf(-t * root_n) - 1.0) * norm.pdf(
                (t - theta_bar) * root_n
            ) * root_n

        want, err = quad(integrand, 0.0, 8.0)
        assert err < 1e-9
        out = gamble_demo(theta_bar, n, 2_000_000, seed=17)
        assert out["believed_expected_loss"] == pytest.approx(want, abs=2e-3)

    def test_far_tail_both_vanish(self):
        out = gamble_demo(-10.0, 10, 50_000, 3)
        assert abs(out["actual_expected_loss"]) < 1e-6
        assert abs(out["believed_expected_loss"]) < 1e-6

    def test_reproducible(self):
        a = gamble_demo(-0.2, 10, 20_000, 5)
        b = gamble_demo(-0.2, 10, 20_000, 5)
        assert a == b
