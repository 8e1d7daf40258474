import random
from fractions import Fraction

from django.test import SimpleTestCase, override_settings

from services import power_series
from services.enclosures import (
    E2_ENCLOSURE,
    RationalInterval,
    abs_bounds,
    certified_ceil,
    e_power,
    sqrt_bounds,
)
from services.exact_poly import (
    BiPoly,
    GaussianRational,
    NotInvertibleError,
    UniPoly,
    ext_gcd_mod_h,
    normalize_polys,
    scalar_norm,
)
from services.linear_algebra import (
    bareiss_kernel,
    brute_force_kernel_dimension,
    gauss_jordan_kernel,
    polynomial_kernel,
    rank_mod_prime,
)
from services.roots import (
    count_real_roots,
    resolve_precision,
    root_enclosures,
    squarefree_decomposition,
)


def random_poly(rng: random.Random, degree: int) -> UniPoly:
    return UniPoly(GaussianRational(rng.randint(-4, 4), rng.randint(-4, 4)) for _ in range(degree + 1))


class GaussianRationalTest(SimpleTestCase):
    def test_real_results_collapse_to_fraction(self):
        product = GaussianRational(1, 1) * GaussianRational(1, -1)
        self.assertIsInstance(product, Fraction)
        self.assertEqual(product, 2)

    def test_division_and_norm(self):
        z = GaussianRational(3, 4)
        self.assertEqual(z.norm(), 25)
        self.assertEqual(z / z, 1)
        self.assertEqual(1 / GaussianRational(0, 1), GaussianRational(0, -1))


class UniPolyTest(SimpleTestCase):
    def setUp(self):
        self.rng = random.Random(7)

    def test_multiplication_and_evaluation(self):
        self.assertEqual(UniPoly([1, 1]) * UniPoly([1, -1]), UniPoly([1, 0, -1]))
        self.assertEqual(UniPoly([1, -1])(1), 0)
        self.assertEqual(UniPoly.variable() ** 3, UniPoly([0, 0, 0, 1]))

    def test_ring_identities(self):
        for _ in range(20):
            a, b, c = (random_poly(self.rng, self.rng.randint(0, 4)) for _ in range(3))
            self.assertEqual((a * b) * c, a * (b * c))
            self.assertEqual(a * (b + c), a * b + a * c)
            self.assertEqual((a + b) - b, a)

    def test_divmod_reconstructs_dividend(self):
        for _ in range(20):
            a = random_poly(self.rng, self.rng.randint(0, 6))
            b = random_poly(self.rng, self.rng.randint(0, 3))
            if b.is_zero:
                continue
            q, r = a.divmod(b)
            self.assertEqual(q * b + r, a)
            if b.degree > 0:
                self.assertLess(r.degree, b.degree)
            else:
                self.assertTrue(r.is_zero)

    def test_gcd_is_monic_common_factor(self):
        a = UniPoly.from_roots([1, 2, 3])
        b = UniPoly.from_roots([2, 3, 5])
        self.assertEqual(a.gcd(b), UniPoly.from_roots([2, 3]))

    def test_real_gcd_matches_field_euclid(self):
        for _ in range(20):
            common = UniPoly(Fraction(self.rng.randint(-5, 5), self.rng.randint(1, 4)) for _ in range(3))
            a = common * UniPoly(self.rng.randint(-3, 3) for _ in range(4))
            b = common * UniPoly(Fraction(self.rng.randint(-3, 3), 7) for _ in range(3))
            x, y = a, b
            while not y.is_zero:
                x, y = y, x % y
            self.assertEqual(a.gcd(b), x.monic())

    def test_gcd_with_zero(self):
        poly = UniPoly([2, 4])
        self.assertEqual(poly.gcd(UniPoly.zero()), UniPoly([Fraction(1, 2), 1]))
        self.assertEqual(UniPoly.zero().gcd(poly), UniPoly([Fraction(1, 2), 1]))
        self.assertTrue(UniPoly.zero().gcd(UniPoly.zero()).is_zero)

    def test_shift(self):
        # (T + 2)^2 = T^2 + 4T + 4
        self.assertEqual(UniPoly([0, 0, 1]).shift(2), UniPoly([4, 4, 1]))

    def test_real_imag_split(self):
        poly = UniPoly([GaussianRational(1, 1), 2, GaussianRational(0, 3)])
        real, imag = poly.real_imag_split()
        self.assertEqual(real, UniPoly([1, 2]))
        self.assertEqual(imag, UniPoly([1, 0, 3]))
        self.assertTrue(real.is_real)
        self.assertFalse(poly.is_real)

    def test_normalize_polys_fixes_sign_and_content(self):
        polys = normalize_polys([UniPoly([Fraction(-1, 2)]), UniPoly([Fraction(-1, 2), Fraction(1, 2)])],
                                lead_first=1)
        self.assertEqual(polys, [UniPoly([1]), UniPoly([1, -1])])


class BiPolyTest(SimpleTestCase):
    def setUp(self):
        # Y^2 - (1 - 4X)
        self.h = BiPoly.from_grid([[-1, 4], [], [1]])

    def test_degrees_and_coefficients(self):
        self.assertEqual(self.h.deg_y, 2)
        self.assertEqual(self.h.deg_x, 1)
        self.assertEqual(self.h.total_degree, 2)
        self.assertEqual(self.h.coefficient(1, 0), 4)
        self.assertEqual(BiPoly.from_dict({(1, 0): 4, (0, 0): -1, (0, 2): 1}), self.h)

    def test_partial_derivatives(self):
        self.assertEqual(self.h.derivative_y(), BiPoly.from_grid([[0], [2]]))
        self.assertEqual(self.h.derivative_x(), BiPoly.from_grid([[4]]))

    def test_evaluate(self):
        self.assertEqual(self.h.evaluate(0, 1), 0)
        self.assertEqual(self.h.evaluate(Fraction(1, 4), 0), 0)
        self.assertEqual(self.h.evaluate(1, 1), 4)

    def test_pseudo_remainder_degree(self):
        u = BiPoly.from_grid([[1], [0, 1], [2], [1]])
        remainder, _ = u.pseudo_remainder(self.h)
        self.assertLess(remainder.deg_y, self.h.deg_y)

    def test_modular_inverse(self):
        inverse = ext_gcd_mod_h(BiPoly.y(), self.h)
        self.assertEqual(inverse.denominator, UniPoly([1, -4]))
        residue = BiPoly.y() * inverse.numerator - BiPoly.from_x_poly(inverse.denominator)
        self.assertTrue(residue.pseudo_remainder(self.h)[0].is_zero)

    def test_inverse_reports_common_factor(self):
        # (Y - 1)^2 shares the factor Y - 1 with its Y-derivative
        h = BiPoly.from_grid([[1], [-2], [1]])
        with self.assertRaises(NotInvertibleError) as ctx:
            ext_gcd_mod_h(h.derivative_y(), h)
        self.assertEqual(ctx.exception.factor.deg_y, 1)
        with self.assertRaises(NotInvertibleError):
            ext_gcd_mod_h(self.h, self.h)


class RootEnclosureTest(SimpleTestCase):
    def assertEncloses(self, enclosure, point):
        self.assertLessEqual(scalar_norm(enclosure.center - point), enclosure.radius ** 2)

    def test_real_roots(self):
        enclosures = root_enclosures(UniPoly([-1, 0, 1]))
        self.assertEqual(len(enclosures), 2)
        self.assertEncloses(enclosures[0], -1)
        self.assertEncloses(enclosures[1], 1)
        for e in enclosures:
            self.assertEqual(e.multiplicity, 1)
            self.assertLessEqual(e.radius, resolve_precision()[0])
            self.assertTrue(e.meets_real_axis)

    def test_complex_roots(self):
        enclosures = root_enclosures(UniPoly([1, 0, 1]))
        self.assertEqual(len(enclosures), 2)
        for root in (GaussianRational(0, -1), GaussianRational(0, 1)):
            owners = [e for e in enclosures if scalar_norm(e.center - root) <= e.radius ** 2]
            self.assertEqual(len(owners), 1)
        self.assertFalse(any(e.meets_real_axis for e in enclosures))

    def test_repeated_root_keeps_multiplicity(self):
        poly = UniPoly.from_roots([2, 2, GaussianRational(0, 1)])
        multiplicities = sorted(k for _, k in squarefree_decomposition(poly))
        self.assertEqual(multiplicities, [1, 2])
        enclosures = root_enclosures(poly)
        self.assertEqual(sum(e.multiplicity for e in enclosures), 3)
        double = [e for e in enclosures if e.multiplicity == 2]
        self.assertEqual(len(double), 1)
        self.assertEncloses(double[0], 2)

    @override_settings(FEKETELAB_ROOT_TOLERANCE="1/1000", FEKETELAB_REFINEMENT_BUDGET=500)
    def test_precision_defaults_follow_settings(self):
        self.assertEqual(resolve_precision(), (Fraction(1, 1000), 64))
        self.assertEqual(resolve_precision(Fraction(1, 10), 3), (Fraction(1, 10), 3))
        for e in root_enclosures(UniPoly([-2, 0, 1])):
            self.assertLessEqual(e.radius, Fraction(1, 1000))

    def test_constant_has_no_roots(self):
        self.assertEqual(root_enclosures(UniPoly([5])), [])

    def test_sturm_counts_closed_intervals(self):
        poly = UniPoly.from_roots([1, 2, 5])
        self.assertEqual(count_real_roots(poly, 0, 3), 2)
        self.assertEqual(count_real_roots(poly, 1, 2), 2)
        self.assertEqual(count_real_roots(poly, 5, 5), 1)
        self.assertEqual(count_real_roots(poly, 6, 10), 0)
        self.assertEqual(count_real_roots(UniPoly([1, 0, 1]), -10, 10), 0)


class LinearAlgebraTest(SimpleTestCase):
    def test_bareiss_kernel_of_rank_one_matrix(self):
        kernel = bareiss_kernel([[1, 2, 3], [2, 4, 6]], 3)
        self.assertEqual(len(kernel), 2)
        for vector in kernel:
            self.assertEqual(sum(a * b for a, b in zip([1, 2, 3], vector)), 0)

    def test_full_rank_has_trivial_kernel(self):
        rows = [[1, 0], [Fraction(1, 3), 1]]
        self.assertEqual(rank_mod_prime(rows, 2), 2)
        self.assertEqual(bareiss_kernel(rows, 2), [])
        self.assertEqual(bareiss_kernel(rows, 2, screen=False), [])

    def test_oracles_agree_on_random_matrices(self):
        rng = random.Random(3)
        for _ in range(15):
            ncols = rng.randint(2, 6)
            rows = [[rng.randint(-2, 2) for _ in range(ncols)] for _ in range(rng.randint(1, 5))]
            self.assertEqual(len(bareiss_kernel(rows, ncols)), brute_force_kernel_dimension(rows, ncols))

    def test_gauss_jordan_over_gaussian_rationals(self):
        i = GaussianRational(0, 1)
        kernel = gauss_jordan_kernel([[1, i]], 2)
        self.assertEqual(len(kernel), 1)
        x = kernel[0]
        self.assertEqual(x[0] + i * x[1], 0)

    def test_polynomial_kernel_has_polynomial_entries(self):
        rng = random.Random(11)
        x = UniPoly.variable()
        for _ in range(10):
            rows = [[UniPoly(rng.randint(-3, 3) for _ in range(3)) for _ in range(3)] for _ in range(2)]
            kernel = polynomial_kernel(rows, 3, one=UniPoly.one())
            self.assertGreaterEqual(len(kernel), 1)
            for vector in kernel:
                self.assertTrue(any(not v.is_zero for v in vector))
                for row in rows:
                    total = UniPoly.zero()
                    for a, b in zip(row, vector):
                        total = total + a * b
                    self.assertTrue(total.is_zero)
        # X v_0 + X^2 v_1 = 0
        kernel = polynomial_kernel([[x, x * x]], 2, one=UniPoly.one())
        self.assertEqual(len(kernel), 1)
        self.assertEqual(kernel[0][0], -(x * x))
        self.assertEqual(kernel[0][1], x)


class EnclosureTest(SimpleTestCase):
    def test_e_powers_are_certified(self):
        e2 = e_power(2)
        self.assertTrue(e2.lower >= E2_ENCLOSURE[0] and e2.upper <= E2_ENCLOSURE[1])
        self.assertLess(e2.width, Fraction(1, 10**20))
        self.assertTrue(e2.contains(e2.lower))
        e3 = e_power(3)
        self.assertTrue(e3.certainly_above(20) and e3.certainly_below(21))

    def test_sqrt_bounds(self):
        self.assertEqual(sqrt_bounds(Fraction(9, 4)), RationalInterval(Fraction(3, 2), Fraction(3, 2)))
        root2 = sqrt_bounds(2)
        self.assertTrue(root2.lower ** 2 < 2 < root2.upper ** 2)
        self.assertEqual(abs_bounds(GaussianRational(3, 4)).lower, 5)

    def test_certified_ceil(self):
        # e^2 + 1 = 8.389...
        self.assertEqual(certified_ceil(lambda digits: e_power(2, digits) + 1), 9)


class PowerSeriesTest(SimpleTestCase):
    def test_inverse_of_geometric_denominator(self):
        self.assertEqual(power_series.inverse([1, -1], 5), [1, 1, 1, 1, 1])

    def test_evaluate_bipoly(self):
        # (1 - X) G - 1 vanishes on the geometric series
        h = BiPoly.from_grid([[-1], [1, -1]])
        residue = power_series.evaluate_bipoly(h, [1] * 6, 6)
        self.assertEqual(power_series.valuation(residue), 6)
