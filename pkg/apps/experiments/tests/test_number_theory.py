from django.test import SimpleTestCase

from services.number_theory import (
    FeketeSeries,
    InvalidModulusError,
    NumberTheoryError,
    complete_pair_sum,
    euler_criterion,
    fekete_coefficients,
    incomplete_pair_sum,
    incomplete_sum,
    is_prime,
    legendre_symbol,
    max_incomplete_sum,
    pair_correlation_tau,
    smallest_nonresidue,
)


class LegendreSymbolTest(SimpleTestCase):
    def test_known_values(self):
        self.assertEqual(legendre_symbol(3, 7), -1)
        self.assertEqual(legendre_symbol(2, 7), 1)
        self.assertEqual(legendre_symbol(0, 7), 0)
        self.assertEqual(legendre_symbol(14, 7), 0)
        self.assertEqual(legendre_symbol(-1, 7), -1)
        self.assertEqual(legendre_symbol(-1, 13), 1)

    def test_agrees_with_euler_criterion(self):
        for p in (3, 5, 7, 11, 13, 101, 199):
            for n in range(-p, 2 * p):
                self.assertEqual(legendre_symbol(n, p), euler_criterion(n, p), f"p={p}, n={n}")

    def test_rejects_invalid_moduli(self):
        for bad in (1, 2, 4, 9, 15, 2**31 + 11):
            with self.assertRaises(InvalidModulusError):
                legendre_symbol(1, bad)

    def test_is_prime(self):
        self.assertEqual([n for n in range(20) if is_prime(n)], [2, 3, 5, 7, 11, 13, 17, 19])


class FeketeSeriesTest(SimpleTestCase):
    def test_first_coefficients_mod_7(self):
        self.assertEqual(fekete_coefficients(7, 8), [0, 1, 1, -1, 1, -1, -1, 0])
        self.assertEqual(fekete_coefficients(3, 3), [0, 1, -1])

    def test_periodic_and_balanced(self):
        f = FeketeSeries(23)
        values = f.coefficients(23)
        self.assertEqual(values[0], 0)
        self.assertEqual(sum(values), 0)
        self.assertEqual(values.count(1), 11)
        for n in range(60):
            self.assertEqual(f(n), f(n + 23))

    def test_smallest_nonresidue(self):
        self.assertEqual(smallest_nonresidue(3), 2)
        self.assertEqual(smallest_nonresidue(7), 3)
        self.assertEqual(smallest_nonresidue(17), 3)
        self.assertEqual(smallest_nonresidue(23), 5)


class CharacterSumTest(SimpleTestCase):
    def test_full_period_sums(self):
        # Plain sums vanish over a period, shifted pair sums equal -1
        self.assertEqual(incomplete_sum(11, 4, 11), 0)
        self.assertEqual(complete_pair_sum(7, 0, 1), -1)
        for j, h in ((0, 1), (1, 3), (2, 9), (5, 10)):
            self.assertEqual(complete_pair_sum(11, j, h), -1)

    def test_short_pair_sum(self):
        # f(1) f(2) = 1 * 1
        self.assertEqual(incomplete_pair_sum(7, 0, 1, 0, 1), 1)
        self.assertEqual(incomplete_pair_sum(7, 0, 1, 0, 3), -1)

    def test_rejects_bad_shift_pairs(self):
        with self.assertRaises(NumberTheoryError):
            incomplete_pair_sum(7, 2, 2, 0, 3)
        with self.assertRaises(NumberTheoryError):
            incomplete_pair_sum(7, 0, 7, 0, 3)
        with self.assertRaises(NumberTheoryError):
            incomplete_sum(7, 0, 0)

    def test_max_incomplete_sum_matches_naive_scan(self):
        for p in (11, 13, 29):
            for shifts in (None, (0, 1), (1, 3)):
                for max_length in (1, 5, p):
                    best = 0
                    for start in range(p):
                        for length in range(1, max_length + 1):
                            if shifts is None:
                                value = incomplete_sum(p, start, length)
                            else:
                                value = incomplete_pair_sum(p, *shifts, start, length)
                            best = max(best, abs(value))
                    report = max_incomplete_sum(p, max_length, shifts)
                    self.assertEqual(abs(report.value), best, f"p={p}, shifts={shifts}, L={max_length}")

                    # Reported interval reproduces the reported value
                    start, length = report.interval
                    if shifts is None:
                        self.assertEqual(incomplete_sum(p, start, length), report.value)
                    else:
                        self.assertEqual(incomplete_pair_sum(p, *shifts, start, length), report.value)

    def test_normalized_ratio_below_one_for_101(self):
        report = max_incomplete_sum(101, 101, (0, 1))
        self.assertLess(report.normalized, 1.0)
        self.assertEqual(report.shift_pair, (0, 1))

    def test_max_length_range(self):
        with self.assertRaises(NumberTheoryError):
            max_incomplete_sum(7, 8)
        with self.assertRaises(NumberTheoryError):
            max_incomplete_sum(7, 0)

    def test_pair_correlation_tau(self):
        # No pairs for m = 1; the floor keeps tau positive
        self.assertEqual(pair_correlation_tau(7, 1), 1)
        tau = pair_correlation_tau(13, 3)
        expected = max(abs(max_incomplete_sum(13, 13, pair).value) for pair in ((1, 2), (1, 3), (2, 3)))
        self.assertEqual(tau, max(expected, 1))
        with self.assertRaises(NumberTheoryError):
            pair_correlation_tau(7, 7)
