from django.test import SimpleTestCase

from services import power_series
from services.exact_poly import BiPoly
from services.experiments import catalan_numbers
from services.guesser import (
    GuesserError,
    InsufficientDataError,
    compute_dpn,
    counting_cap,
    guess_algebraic,
    guess_recurrence,
    min_algebraic_degree,
)
from services.holonomy import verify_annihilates
from services.number_theory import fekete_coefficients, smallest_nonresidue


class AlgebraicGuessTest(SimpleTestCase):
    def test_guess_x_plus_x_squared(self):
        guess = guess_algebraic([0, 1, 1], 1)
        self.assertIsNotNone(guess)
        # Y - X - XY up to sign
        expected = BiPoly.from_dict({(0, 1): 1, (1, 0): -1, (1, 1): -1})
        self.assertIn(guess.h, (expected, -expected))
        self.assertEqual(guess.residual_order, 3)

    def test_no_degree_one_annihilator(self):
        self.assertIsNone(guess_algebraic([0, 1, 1, -1], 1))

    def test_catalan_prefix_needs_degree_two(self):
        prefix = catalan_numbers(12)
        self.assertIsNone(guess_algebraic(prefix, 1))
        d, guess = min_algebraic_degree(prefix)
        self.assertEqual(d, 2)
        residue = power_series.evaluate_bipoly(guess.h, prefix, len(prefix))
        self.assertTrue(all(not c for c in residue))

    def test_counting_cap(self):
        self.assertEqual([counting_cap(n) for n in (1, 3, 4, 8, 9, 24, 25)], [1, 1, 2, 2, 3, 4, 5])

    def test_rejects_bad_input(self):
        with self.assertRaises(GuesserError):
            guess_algebraic([1], 1)
        with self.assertRaises(GuesserError):
            guess_algebraic([1, 2, 3], 0)


class DpnTest(SimpleTestCase):
    def test_d7_values(self):
        self.assertEqual(compute_dpn(7, 3)[0], 1)
        self.assertEqual(compute_dpn(7, 4)[0], 2)

    def test_report_fields(self):
        d, guess, result = compute_dpn(11, 6)
        self.assertEqual(result.d, d)
        self.assertEqual(result.witness_total_degree, guess.total_degree)
        self.assertFalse(result.n_at_least_p)
        self.assertAlmostEqual(result.reference_ratio * result.theorem_reference_value, d)
        residue = power_series.evaluate_bipoly(guess.h, fekete_coefficients(11, 6), 6)
        self.assertTrue(all(not c for c in residue))

    def test_monotone_and_trivial_below_nonresidue(self):
        for p in (13, 17):
            values = [compute_dpn(p, n)[0] for n in range(1, 16)]
            self.assertEqual(values, sorted(values))
            for n in range(1, smallest_nonresidue(p) + 1):
                self.assertEqual(values[n - 1], 1)
            for n, d in enumerate(values, start=1):
                self.assertLessEqual(d, counting_cap(n))

    def test_n_at_least_p_is_flagged(self):
        _, _, result = compute_dpn(5, 7)
        self.assertTrue(result.n_at_least_p)


class RecurrenceGuessTest(SimpleTestCase):
    def test_catalan_recurrence(self):
        rec = guess_recurrence(catalan_numbers(40), order=1, degree=1)
        self.assertIsNotNone(rec)
        self.assertEqual(rec.order, 1)
        self.assertTrue(verify_annihilates(rec, catalan_numbers(100)))

    def test_no_recurrence_for_noise(self):
        terms = [3, 1, 4, 1, 5, 9, 2, 6, 5, 3, 5, 8, 9, 7, 9, 3, 2, 3, 8, 4]
        self.assertIsNone(guess_recurrence(terms, order=1, degree=1))

    def test_no_low_order_recurrence_for_fekete_terms(self):
        terms = fekete_coefficients(101, 60)
        self.assertIsNone(guess_recurrence(terms, order=1, degree=1))

    def test_insufficient_data(self):
        with self.assertRaises(InsufficientDataError):
            guess_recurrence(catalan_numbers(10), order=1, degree=1)
