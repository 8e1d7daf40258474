import math
from unittest.mock import patch

from django.test import SimpleTestCase

from services.exact_poly import GaussianRational, UniPoly
from services.experiments import alternating_sequence, constant_sequence
from services.number_theory import FeketeSeries
from services.oscillation import (
    A_DISCREPANCY_NOTE,
    PLAN_REFINEMENT_ROUNDS,
    BoundViolationError,
    IntervalPlanError,
    PreconditionError,
    critical_polynomials,
    critical_set,
    delta_bound,
    delta_search,
    interval_plan,
    lemma31_check,
    lemma32_check,
    lemma33_check,
    padded_contacts,
    prop32_chain,
    r_sequence,
    recertify_interval_plan,
    theorem_reference,
)
from services.schemas import HypothesisStatus, Verdict


def zero_sequence(n):
    return 0


class CriticalSetTest(SimpleTestCase):
    def test_critical_polynomials(self):
        self.assertEqual(critical_polynomials(UniPoly([0, 0, 1])), [UniPoly([0, 2])])
        # Q = 1 + i X^2: constant real part, imaginary part X^2
        self.assertEqual(critical_polynomials(UniPoly([1, 0, GaussianRational(0, 1)])), [UniPoly([0, 2])])
        self.assertEqual(critical_polynomials(UniPoly([3, GaussianRational(1, 1)])), [])

    def test_critical_set_membership(self):
        cs = critical_set(UniPoly([0, -4, 1]))
        self.assertEqual(len(cs.real_intervals), 1)
        self.assertTrue(cs.meets(1, 3))
        self.assertFalse(cs.meets(3, 5))
        self.assertEqual(len(cs.to_model().real_points), 1)

    def test_constant_has_empty_critical_set(self):
        cs = critical_set(UniPoly([GaussianRational(2, 5)]))
        self.assertEqual(cs.enclosures, [])
        self.assertFalse(cs.meets(0, 100))


class IntervalPlanTest(SimpleTestCase):
    def test_r_sequence(self):
        self.assertEqual(r_sequence(1, 1, 1), [1, 2, 3])
        sequence = r_sequence(1, 1, 2)
        # ceil(e^2 + 1) = 9
        self.assertEqual(sequence[0], 9)
        self.assertEqual(len(sequence), 10)
        self.assertTrue(all(x < y for x, y in zip(sequence, sequence[1:])))

    def test_constant_polynomial_plan(self):
        plan = interval_plan([UniPoly.one()], 1, 1, 1)
        self.assertEqual((plan.a, plan.b, plan.L), (9, 10, 9))
        self.assertEqual(plan.chosen_index, 1)
        self.assertEqual(plan.R_sequence, [1, 2, 3])
        self.assertTrue(plan.certified)
        self.assertTrue(plan.padded_intervals_disjoint)
        self.assertIn(A_DISCREPANCY_NOTE, plan.notes)
        self.assertEqual(recertify_interval_plan(plan, [UniPoly.one()]).verdict, Verdict.HOLDS)

    def test_plan_skips_interval_containing_a_root(self):
        Qs = [UniPoly([-9, 1])]
        plan = interval_plan(Qs, 1, 1, 1)
        self.assertEqual(plan.chosen_index, 2)
        self.assertEqual((plan.a, plan.b), (18, 20))
        self.assertTrue(plan.size_bound.lower_value > plan.b)
        report = recertify_interval_plan(plan, Qs)
        self.assertTrue(report.holds)

    def test_recertification_catches_tampering(self):
        plan = interval_plan([UniPoly.one()], 1, 1, 1)
        tampered = plan.model_copy(update={"b": 30})
        report = recertify_interval_plan(tampered, [UniPoly.one()])
        self.assertEqual(report.verdict, Verdict.VIOLATED)
        self.assertEqual(report.hypotheses["iii"], HypothesisStatus.FAILED)

    def test_padded_contacts(self):
        # D = 2, m = 2: R_2 = 142 * 147 / 142 exactly
        self.assertEqual(padded_contacts([142, 147], 2, 36), ([], [(1, 20874)]))
        self.assertEqual(padded_contacts([142, 148], 2, 36), ([], []))
        self.assertEqual(padded_contacts([142, 146], 2, 36), ([1], []))

    def test_touching_padded_intervals_are_flagged_not_violations(self):
        plan = interval_plan([UniPoly.one()], 1, 1, 1)
        touching = plan.model_copy(update={"R_sequence": [8, 11]})
        report = recertify_interval_plan(touching, [UniPoly.one()])
        self.assertTrue(report.holds)
        self.assertNotIn("padded_disjoint", report.hypotheses)
        self.assertEqual(report.notes, ["padded intervals 1 and 2 share the endpoint 88"])

    def test_preconditions(self):
        with self.assertRaises(PreconditionError):
            interval_plan([UniPoly.one()], 0, 1, 1)
        with self.assertRaises(PreconditionError):
            interval_plan([UniPoly.one()], 1, 1, 2)
        with self.assertRaises(PreconditionError):
            interval_plan([UniPoly([0, 0, 1])], 1, 1, 1)

    @patch('services.oscillation._root_distance_status')
    def test_plan_error_names_failing_condition(self, mock_status):
        # Setup mocks
        mock_status.return_value = HypothesisStatus.FAILED

        with self.assertRaises(IntervalPlanError) as ctx:
            interval_plan([UniPoly.one()], 1, 1, 1)

        # Verify every round was attempted
        self.assertEqual(ctx.exception.failing_condition, "ii")
        self.assertEqual(mock_status.call_count, 9)


class DeltaSearchTest(SimpleTestCase):
    def test_constant_sequence_witness(self):
        witness = delta_search(constant_sequence, [UniPoly.one()], 1, 1)
        self.assertEqual(witness.n, 0)
        # 168 e^3 = 3374.38...
        self.assertLess(witness.bound.upper_value, 3375)
        self.assertGreater(witness.bound.lower_value, 3374)

    def test_legendre_witness(self):
        f = FeketeSeries(7)
        self.assertEqual(delta_search(f, [UniPoly.one()], 1, 1).n, 0)
        # Q_1 = X kills n = 0
        self.assertEqual(delta_search(f, [UniPoly([0, 1])], 1, 1).n, 1)

    def test_preconditions(self):
        with self.assertRaises(PreconditionError):
            delta_search(constant_sequence, [UniPoly.zero(), UniPoly.zero()], 1, 1)
        with self.assertRaises(PreconditionError):
            delta_search(constant_sequence, [UniPoly.one()], 0, 1)
        with self.assertRaises(PreconditionError):
            delta_search(constant_sequence, [UniPoly.one()], 5, 1)

    def test_identically_zero_delta_is_a_bound_violation(self):
        # f(n+1) + f(n+2) = 0 for the alternating sequence
        with self.assertRaises(BoundViolationError) as ctx:
            delta_search(alternating_sequence, [UniPoly.one(), UniPoly.one()], 1, 1)
        report = ctx.exception.report
        self.assertEqual(report["m"], 2)
        self.assertEqual(report["scanned"], math.ceil(delta_bound(1, 1, 1, 2).upper))


class LemmaCheckTest(SimpleTestCase):
    def setUp(self):
        self.plan = interval_plan([UniPoly.one()], 1, 1, 1)

    def test_lemma31_holds_on_constant_case(self):
        report = lemma31_check(UniPoly.one(), alternating_sequence, self.plan.a, self.plan.b, self.plan.L, 1)
        self.assertEqual(report.verdict, Verdict.HOLDS)
        self.assertEqual(report.lhs.lower_value, 2)

    def test_lemma31_reports_failed_hypotheses(self):
        report = lemma31_check(UniPoly.one(), zero_sequence, 9, 10, 9, 1)
        self.assertEqual(report.hypotheses["iii"], HypothesisStatus.FAILED)
        self.assertEqual(report.verdict, Verdict.HYPOTHESIS_FAILED)
        report = lemma31_check(UniPoly.zero(), constant_sequence, 9, 10, 9, 1)
        self.assertEqual(report.hypotheses["Q_nonzero"], HypothesisStatus.FAILED)

    def test_lemma32_holds_on_constant_case(self):
        report = lemma32_check(UniPoly.one(), alternating_sequence, 0, self.plan.a, self.plan.b, 1)
        self.assertEqual(report.verdict, Verdict.HOLDS)
        self.assertEqual(report.lhs.upper_value, 0)

    def test_lemma32_hypotheses(self):
        # Partial sums of f = 1 exceed tau = 1
        report = lemma32_check(UniPoly.one(), constant_sequence, 0, 9, 10, 1)
        self.assertEqual(report.hypotheses["partial_sums"], HypothesisStatus.FAILED)
        # C(X^2 - 4X) = {2}
        report = lemma32_check(UniPoly([0, -4, 1]), alternating_sequence, 0, 1, 3, 10)
        self.assertEqual(report.hypotheses["critical_set"], HypothesisStatus.FAILED)
        self.assertEqual(report.verdict, Verdict.HYPOTHESIS_FAILED)

    def test_lemma33_finds_witness(self):
        report = lemma33_check([UniPoly.one()], constant_sequence, self.plan.a, self.plan.b, self.plan.L, 1, 1)
        self.assertEqual(report.verdict, Verdict.HOLDS)
        self.assertEqual(report.witness, 9)

    def test_lemma33_with_zero_polynomials(self):
        report = lemma33_check([UniPoly.zero()], constant_sequence, 9, 10, 9, 1, 1)
        self.assertEqual(report.verdict, Verdict.HYPOTHESIS_FAILED)
        self.assertIsNone(report.witness)
        self.assertTrue(report.notes)

    @patch('services.oscillation._root_distance_status')
    def test_inconclusive_root_distance_is_refined(self, mock_status):
        # Setup mocks
        mock_status.side_effect = [HypothesisStatus.INCONCLUSIVE, HypothesisStatus.VERIFIED]

        report = lemma31_check(UniPoly.one(), alternating_sequence, self.plan.a, self.plan.b, self.plan.L, 1)

        # Verify a second, finer round settled the hypothesis
        self.assertEqual(report.hypotheses["i"], HypothesisStatus.VERIFIED)
        self.assertEqual(report.verdict, Verdict.HOLDS)
        self.assertEqual(mock_status.call_count, 2)

    @patch('services.oscillation._root_distance_status')
    def test_lemma33_stays_inconclusive_after_refinement_rounds(self, mock_status):
        # Setup mocks
        mock_status.return_value = HypothesisStatus.INCONCLUSIVE

        report = lemma33_check([UniPoly.one()], constant_sequence, self.plan.a, self.plan.b, self.plan.L, 1, 1)

        # Verify every refinement round was attempted
        self.assertEqual(mock_status.call_count, PLAN_REFINEMENT_ROUNDS)
        self.assertEqual(report.hypotheses["ii"], HypothesisStatus.INCONCLUSIVE)
        self.assertEqual(report.verdict, Verdict.INCONCLUSIVE)
        self.assertEqual(report.witness, 9)


class ChainTest(SimpleTestCase):
    def test_constant_chain(self):
        chain = prop32_chain(constant_sequence, [UniPoly.one()], 1, 1)
        self.assertEqual(chain.witness.n, 0)
        self.assertTrue(chain.witness_in_window)
        self.assertEqual(chain.window_report.verdict, Verdict.HOLDS)

    def test_theorem_reference(self):
        self.assertAlmostEqual(theorem_reference(101, 100), 1.0799, places=3)
        with self.assertRaises(PreconditionError):
            theorem_reference(101, 0)
