import unittest

from sumsetkit.baselines import (
    GUARD,
    bellman_dp,
    brute_force,
    brute_force_mod,
    card_dp,
    reachable,
)
from sumsetkit.core import MultisetInput
from sumsetkit.errors import ContractViolation, GuardExceeded
from sumsetkit.test.utilities import (
    card_pairs,
    modular_sums,
    random_multiset,
    random_set,
    rng,
    subset_sums,
)


class TestReachable(unittest.TestCase):
    def test_examples(self):
        self.assertEqual(reachable([2, 3], 10).members(), [0, 2, 3, 5])
        self.assertEqual(reachable([11], 10).members(), [0])
        self.assertEqual(reachable([2, 2], 4).members(), [0, 2, 4])


class TestBellmanDp(unittest.TestCase):
    def test_examples(self):
        S = MultisetInput.from_values([3] * 5)

        self.assertEqual(bellman_dp(S, 15).members(), [0, 3, 6, 9, 12, 15])
        self.assertEqual(bellman_dp([1, 2], 0).members(), [0])

    def test_matches_brute_force(self):
        r = rng(60)
        for _ in range(200):
            values = random_multiset(r, r.randint(0, 14), 40)
            u = r.randint(0, 150)
            self.assertEqual(bellman_dp(values, u), brute_force(values, u))


class TestBruteForce(unittest.TestCase):
    def test_examples(self):
        self.assertEqual(brute_force([2, 3], 10).members(), [0, 2, 3, 5])
        self.assertEqual(brute_force_mod([2, 3], 4).members(), [0, 1, 2, 3])

    def test_guard(self):
        self.assertEqual(GUARD, 24)
        with self.assertRaises(GuardExceeded):
            brute_force(list(range(1, 26)), 10)
        with self.assertRaises(GuardExceeded):
            brute_force_mod([1] * 25, 7)

    def test_modulus_must_be_positive(self):
        with self.assertRaises(ContractViolation):
            brute_force_mod([1], 0)

    def test_matches_enumeration(self):
        r = rng(61)
        for _ in range(50):
            values = random_multiset(r, r.randint(0, 10), 30)
            u, m = r.randint(0, 100), r.randint(1, 40)
            self.assertEqual(set(brute_force(values, u)), subset_sums(values, u))
            self.assertEqual(set(brute_force_mod(values, m)), modular_sums(values, m))


class TestCardDp(unittest.TestCase):
    def test_examples(self):
        self.assertEqual(card_dp([1, 2], 3).members(), [(0, 0), (1, 1), (2, 1), (3, 2)])
        self.assertEqual(card_dp([5], 3).members(), [(0, 0)])
        self.assertEqual(
            card_dp([2, 3, 4], 7).members(),
            [(0, 0), (2, 1), (3, 1), (4, 1), (5, 2), (6, 2), (7, 2)],
        )

    def test_matches_enumeration(self):
        r = rng(62)
        for _ in range(50):
            values = random_set(r, r.randint(0, 10), 50)
            u = r.randint(0, 80)
            self.assertEqual(set(card_dp(values, u).members()), card_pairs(values, u))

    def test_projection_matches_bellman(self):
        r = rng(63)
        for _ in range(50):
            values = random_set(r, r.randint(0, 12), 50)
            u = r.randint(1, 80)
            self.assertEqual(card_dp(values, u).project(u), bellman_dp(values, u))


if __name__ == "__main__":
    unittest.main()
