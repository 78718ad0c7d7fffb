import unittest
from unittest.mock import patch

from sumsetkit.baselines import bellman_dp, brute_force
from sumsetkit.core import MultisetInput, SumSet
from sumsetkit.errors import ContractViolation
from sumsetkit.integer_engine import (
    Strategy,
    all_subset_sums,
    all_sums_sigma,
    capped_interval_sums,
    choose_r0,
    decide,
    interval_sums,
    layer_sums,
    partition_geometric,
    predicted_costs,
)
from sumsetkit.test.utilities import (
    card_pairs,
    random_multiset,
    random_set,
    rng,
    subset_sums,
)

STRATEGIES = [s for s in Strategy]


class TestAllSumsSigma(unittest.TestCase):
    def test_examples(self):
        self.assertEqual(all_sums_sigma([1, 2, 3]).members(), list(range(7)))
        self.assertEqual(all_sums_sigma([]).members(), [0])
        self.assertEqual(all_sums_sigma([3, 1, 2]).bound, 6)

    def test_rejects_duplicates(self):
        with self.assertRaises(ContractViolation):
            all_sums_sigma([4, 4])

    def test_matches_enumeration(self):
        r = rng(20)
        for _ in range(50):
            values = random_set(r, r.randint(0, 12), 50)
            expected = subset_sums(values, sum(values))
            self.assertEqual(set(all_sums_sigma(values).members()), expected)


class TestCappedIntervalSums(unittest.TestCase):
    def test_examples(self):
        self.assertEqual(
            capped_interval_sums([5, 6], 5, 2, 2).members(),
            [(0, 0), (5, 1), (6, 1), (11, 2)],
        )
        self.assertEqual(
            capped_interval_sums([5, 6], 5, 2, 1).members(), [(0, 0), (5, 1), (6, 1)]
        )
        self.assertEqual(capped_interval_sums([], 5, 2, 3).members(), [(0, 0)])

    def test_rejects_values_outside_interval(self):
        with self.assertRaises(ContractViolation):
            capped_interval_sums([4, 6], 5, 2, 2)

    def test_matches_enumeration(self):
        r = rng(21)
        for _ in range(60):
            low, length = r.randint(1, 30), r.randint(0, 30)
            pool = range(low, low + length + 1)
            values = sorted(r.sample(pool, r.randint(0, min(10, length + 1))))
            alpha = r.randint(0, 12)
            expected = {(s, j) for s, j in card_pairs(values, 10**9) if j <= alpha}
            grid = capped_interval_sums(values, low, length, alpha)
            self.assertEqual(set(grid.members()), expected)
            for s, j in grid.members():
                self.assertTrue(low * j <= s <= (low + length) * j)


class TestIntervalSums(unittest.TestCase):
    def test_examples(self):
        self.assertEqual(interval_sums([5, 6], 5, 2, 11).members(), [0, 5, 6, 11])
        self.assertEqual(interval_sums([5, 6], 5, 2, 7).members(), [0, 5, 6])
        self.assertEqual(interval_sums([9], 9, 0, 8).members(), [0])

    def test_interval_must_start_positive(self):
        with self.assertRaises(ContractViolation):
            interval_sums([1], 0, 3, 5)

    def test_matches_enumeration(self):
        r = rng(22)
        for _ in range(60):
            low, length = r.randint(1, 40), r.randint(0, 40)
            pool = range(low, low + length + 1)
            values = sorted(r.sample(pool, r.randint(0, min(10, length + 1))))
            u = r.randint(0, 300)
            self.assertEqual(
                set(interval_sums(values, low, length, u).members()),
                subset_sums(values, u),
            )


class TestPartitionGeometric(unittest.TestCase):
    def test_example(self):
        layering = partition_geometric([4, 15, 33, 90], 10, 100)

        bounds = [(layer.low, layer.high) for layer in layering.layers]
        self.assertEqual(bounds, [(1, 10), (11, 20), (21, 40), (41, 80), (81, 160)])
        buckets = [layer.values for layer in layering.layers]
        self.assertEqual(buckets, [(4,), (15,), (33,), (), (90,)])
        self.assertEqual(layering.nu, 5)

    def test_single_layer(self):
        layering = partition_geometric([3, 7], 50, 50)

        self.assertEqual(layering.nu, 1)
        self.assertEqual(layering.layers[0].values, (3, 7))

    def test_empty(self):
        layering = partition_geometric([], 10, 100)

        self.assertTrue(all(layer.values == () for layer in layering.layers))

    def test_rejects_bad_r0(self):
        with self.assertRaises(ContractViolation):
            partition_geometric([1], 0, 10)
        with self.assertRaises(ContractViolation):
            partition_geometric([1], 11, 10)


class TestLayerSums(unittest.TestCase):
    def test_examples(self):
        layering = partition_geometric([4, 15], 10, 20)
        sums = [t.members() for t in layer_sums(layering, 20)]
        self.assertEqual(sums, [[0, 4], [0, 15]])

        layering = partition_geometric([15, 18], 10, 30)
        sums = layer_sums(layering, 30)
        self.assertEqual(sums[1].members(), [0, 15, 18])

    def test_chaining_reproduces_all_sums(self):
        r = rng(23)
        for _ in range(30):
            u = r.randint(10, 200)
            values = random_set(r, r.randint(0, 12), u)
            layering = partition_geometric(values, r.randint(1, u), u)
            total = SumSet.zero(u)
            for sums in layer_sums(layering, u):
                total = SumSet.from_members(
                    {a + b for a in total.members() for b in sums.members()}, u
                )
            self.assertEqual(set(total.members()), subset_sums(values, u))


class TestAllSubsetSums(unittest.TestCase):
    def test_examples(self):
        for strategy in STRATEGIES:
            with self.subTest(strategy=strategy):
                S = MultisetInput.from_values([1, 2, 3])
                sums = all_subset_sums(S, 4, strategy)
                self.assertEqual(sums.members(), [0, 1, 2, 3, 4])
                S = MultisetInput.from_values([3] * 5)
                self.assertEqual(
                    all_subset_sums(S, 15, strategy).members(), [0, 3, 6, 9, 12, 15]
                )
                self.assertEqual(all_subset_sums([7], 6, strategy).members(), [0])

    def test_zero_bound(self):
        self.assertEqual(all_subset_sums([1, 2], 0).members(), [0])

    def test_unknown_strategy(self):
        with self.assertRaises(ContractViolation):
            all_subset_sums([1], 3, "fastest")

    def test_strategy_independence(self):
        r = rng(24)
        for _ in range(500):
            values = random_multiset(r, r.randint(0, 12), 64)
            u = r.randint(1, 128)
            expected = brute_force(values, u)
            self.assertEqual(bellman_dp(values, u), expected)
            for strategy in STRATEGIES:
                self.assertEqual(all_subset_sums(values, u, strategy), expected)

    def test_monotone_in_bound(self):
        r = rng(25)
        for _ in range(50):
            values = random_multiset(r, 10, 40)
            u = r.randint(1, 100)
            small = set(all_subset_sums(values, u))
            large = set(all_subset_sums(values, u + r.randint(0, 50)))
            self.assertLessEqual(small, large)

    def test_larger_instance_agrees_with_dp(self):
        r = rng(26)
        values = random_set(r, 300, 20000)
        u = 20000
        expected = bellman_dp(values, u)
        for strategy in (Strategy.R0_SQRT, Strategy.R0_TWOTHIRDS, Strategy.SIGMA):
            self.assertEqual(all_subset_sums(values, u, strategy), expected)

    def test_auto_picks_cheapest(self):
        costs = predicted_costs(5, 15, 10**6)
        self.assertEqual(min(costs, key=costs.get), Strategy.SIGMA)

        with patch("sumsetkit.integer_engine._sigma") as sigma:
            all_subset_sums(list(range(1, 2000)), 50, Strategy.AUTO)
        sigma.assert_not_called()

    def test_r0_is_clamped(self):
        self.assertEqual(choose_r0(Strategy.R0_SQRT, 10**6, 10), 1)
        self.assertEqual(choose_r0(Strategy.R0_TWOTHIRDS, 1, 1000), 100)
        self.assertEqual(choose_r0(Strategy.R0_SQRT, 1, 7), 7)


class TestDecide(unittest.TestCase):
    def test_decide(self):
        self.assertTrue(decide([1, 2, 3], 5))
        self.assertFalse(decide([2, 4], 3))
        self.assertTrue(decide([2, 4], 0))

    def test_target_beyond_total(self):
        self.assertFalse(decide([1, 2], 10**12))
        self.assertFalse(decide([1, 2], 1 << 70))
        self.assertTrue(decide([1, 2], 3))

        with patch("sumsetkit.integer_engine.all_subset_sums") as solve:
            self.assertFalse(decide([5, 5], 11, "dp"))
        solve.assert_not_called()

    def test_negative_target(self):
        with self.assertRaises(ContractViolation):
            decide([1], -1)


if __name__ == "__main__":
    unittest.main()
