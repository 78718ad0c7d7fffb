import math
import unittest

from sumsetkit.baselines import brute_force_mod
from sumsetkit.cyclic_engine import (
    ModInstance,
    Segment,
    cover_units,
    cover_zm,
    ext_euclid,
    factorize,
    leaf_moduli,
    mod_inverse,
    mod_subset_sums,
    segment_sums,
    unit_length,
    unit_sums,
)
from sumsetkit.errors import ContractViolation
from sumsetkit.test.utilities import modular_sums, primes_up_to, rng


def units(m):
    return [x for x in range(1, m) if math.gcd(x, m) == 1]


class TestArithmetic(unittest.TestCase):
    def test_factorize(self):
        table = factorize(12)
        self.assertEqual(table.factors, ((2, 2), (3, 1)))
        self.assertEqual((table.sigma0, table.sigma1, table.totient), (6, 28, 4))
        self.assertEqual(table.divisors(), [1, 2, 3, 4, 6, 12])
        self.assertEqual(table.omega, 2)
        self.assertEqual(factorize(2 * 3 * 5 * 7 * 49).omega, 4)

        self.assertEqual(factorize(7).factors, ((7, 1),))
        one = factorize(1)
        self.assertEqual(one.factors, ())
        self.assertEqual((one.totient, one.sigma0, one.sigma1), (1, 1, 1))
        self.assertEqual(one.omega, 0)

    def test_factorize_rejects_zero(self):
        with self.assertRaises(ContractViolation):
            factorize(0)

    def test_totient_matches_count(self):
        for m in range(1, 300):
            table = factorize(m)
            self.assertEqual(math.prod(q**r for q, r in table.factors), m)
            coprime = sum(1 for x in range(m) if math.gcd(x, m) == 1)
            self.assertEqual(table.totient, coprime)

    def test_ext_euclid(self):
        x, y, g = ext_euclid(240, 46)
        self.assertEqual(g, 2)
        self.assertEqual(240 * x + 46 * y, 2)

    def test_mod_inverse(self):
        self.assertEqual(mod_inverse(3, 7), 5)
        with self.assertRaises(ContractViolation):
            mod_inverse(4, 8)


class TestSegment(unittest.TestCase):
    def test_members(self):
        self.assertEqual(Segment(2, 3, 7).members(), [2, 4, 6])
        self.assertIn(4, Segment(2, 3, 7))
        self.assertNotIn(1, Segment(2, 3, 7))

    def test_marker(self):
        self.assertEqual(Segment(0, 1, 6).members(), [0])

    def test_mod_instance_invariants(self):
        with self.assertRaises(ContractViolation):
            ModInstance((1,), 6, 4)
        with self.assertRaises(ContractViolation):
            ModInstance((6,), 6, 6)


class TestSegmentSums(unittest.TestCase):
    def test_examples(self):
        self.assertEqual(segment_sums([2, 4], 2, 2, 7).members(), [0, 2, 4, 6])
        self.assertEqual(segment_sums([3], 3, 1, 5).members(), [0, 3])
        self.assertEqual(segment_sums([], 3, 1, 5).members(), [0])

    def test_rejects(self):
        with self.assertRaises(ContractViolation):
            segment_sums([2], 2, 1, 4)
        with self.assertRaises(ContractViolation):
            segment_sums([3], 1, 2, 7)


class TestCoverUnits(unittest.TestCase):
    def test_examples(self):
        cover = cover_units([1, 2, 3, 4], 5, 2)
        self.assertEqual(cover, [Segment(1, 2, 5), Segment(4, 2, 5)])

        cover = cover_units([1], 11, 3)
        self.assertEqual(len(cover), 1)
        self.assertIn(1, cover[0])

        self.assertEqual(cover_units([], 5, 2), [])

    def test_rejects_non_units(self):
        with self.assertRaises(ContractViolation):
            cover_units([2], 4, 2)

    def test_random_covers(self):
        r = rng(30)
        primes = [p for p in primes_up_to(199) if p > 2]
        for _ in range(200):
            m = r.choice(primes)
            length = r.choice([math.isqrt(m - 1) + 1, -(-m // 2)])
            values = r.sample(range(1, m), r.randint(1, m - 1))
            cover = cover_units(values, m, length)
            for segment in cover:
                self.assertEqual(math.gcd(segment.generator, m), 1)
                self.assertEqual(segment.length, length)
            for b in values:
                self.assertTrue(any(b in segment for segment in cover))


class TestUnitSums(unittest.TestCase):
    def test_examples(self):
        self.assertEqual(unit_sums([1, 3], 4).members(), [0, 1, 3])
        self.assertEqual(unit_sums([1, 2, 3, 4], 5).members(), [0, 1, 2, 3, 4])
        self.assertEqual(unit_sums([1, 2, 4, 5, 7, 8], 9).members(), list(range(9)))
        self.assertEqual(modular_sums([1, 2, 4, 5, 7, 8], 9), set(range(9)))

    def test_length(self):
        self.assertEqual(unit_length(1, 100), 100)
        self.assertEqual(unit_length(4, 100), 50)
        self.assertEqual(unit_length(10**4, 100), 10)

    def test_large_unit_sets_generate_the_group(self):
        r = rng(31)
        for p in primes_up_to(61):
            size = min(p - 1, math.isqrt(4 * p - 1) + 1)
            for _ in range(20):
                values = r.sample(range(1, p), size)
                self.assertEqual(modular_sums(values, p), set(range(p)))
                self.assertEqual(len(unit_sums(values, p)), p)

    def test_matches_enumeration_without_shortcut(self):
        r = rng(32)
        for _ in range(100):
            m = r.randint(2, 120)
            candidates = units(m)
            values = r.sample(candidates, r.randint(0, min(8, len(candidates))))
            sums = unit_sums(values, m, trace=True)
            self.assertEqual(set(sums.members()), modular_sums(values, m))


class TestModSubsetSums(unittest.TestCase):
    def test_examples(self):
        self.assertEqual(mod_subset_sums([2, 3], 6).members(), [0, 2, 3, 5])
        self.assertEqual(mod_subset_sums([4, 6], 12).members(), [0, 4, 6, 10])
        self.assertEqual(mod_subset_sums([0], 5).members(), [0])

    def test_rejects(self):
        with self.assertRaises(ContractViolation):
            mod_subset_sums([1], 0)
        with self.assertRaises(ContractViolation):
            mod_subset_sums([6], 6)
        with self.assertRaises(ContractViolation):
            mod_subset_sums([2, 2], 6)

    def test_matches_brute_force(self):
        r = rng(33)
        moduli = list(range(2, 65)) + [72, 96, 100, 128, 360]
        for _ in range(500):
            m = r.choice(moduli)
            values = r.sample(range(m), r.randint(0, min(12, m)))
            self.assertEqual(mod_subset_sums(values, m), brute_force_mod(values, m))

    def test_leaf_moduli_are_divisors(self):
        for m in list(range(1, 100)) + [360, 1024, 2310]:
            self.assertEqual(leaf_moduli(m), factorize(m).divisors())


class TestCoverZm(unittest.TestCase):
    def expand(self, segments):
        return {x for segment in segments for x in segment.members()}

    def test_examples(self):
        segments = cover_zm(6, 6)
        self.assertEqual(len(segments), factorize(6).sigma0)
        self.assertEqual(self.expand(segments), set(range(6)))

        segments = cover_zm(5, 2)
        self.assertEqual(segments[0], Segment(0, 1, 5))
        self.assertEqual(len(segments), 3)
        self.assertEqual(self.expand(segments), set(range(5)))

        self.assertEqual(cover_zm(1, 1), [Segment(0, 1, 1)])

    def test_rejects_bad_length(self):
        with self.assertRaises(ContractViolation):
            cover_zm(5, 6)
        with self.assertRaises(ContractViolation):
            cover_zm(5, 0)

    def test_cover_validity_and_size(self):
        for m in range(1, 201):
            for length in {math.isqrt(m - 1) + 1 if m > 1 else 1, m}:
                segments = cover_zm(m, length)
                self.assertEqual(self.expand(segments), set(range(m)))
                table = factorize(m)
                bound = 8 * table.sigma1 * math.log(max(m, 2)) / length + table.sigma0
                self.assertLessEqual(len(segments), 2 * bound)


if __name__ == "__main__":
    unittest.main()
