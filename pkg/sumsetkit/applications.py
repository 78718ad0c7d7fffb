"""Problems solved on top of the sumset engines: balanced bottleneck cuts,
cardinality-annotated sums, subset counting and Banzhaf power."""

import enum
import itertools
import logging
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Union

import numpy as np

from sumsetkit.convolution import CountVector, bool_conv_2d, count_conv
from sumsetkit.core import (
    CardSumSet,
    MultisetInput,
    _frozen,
    is_decimal,
    require_distinct,
)
from sumsetkit.errors import ContractViolation, ParseError, SumsetError
from sumsetkit.integer_engine import BASE_CASE, Strategy, all_subset_sums
from sumsetkit.settings import Settings
from sumsetkit.witness import recover_subset
from sumsetkit.worker import run_all, thread_budget

LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class WeightedGraph:
    n: int
    edges: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        if self.n < 1:
            raise ContractViolation("a graph needs at least one vertex")
        for a, b, w in self.edges:
            if not (1 <= a <= self.n and 1 <= b <= self.n):
                raise ContractViolation(f"edge ({a}, {b}) leaves vertices 1..{self.n}")
            if a == b:
                raise ContractViolation(f"self-loop at vertex {a}")
            if w < 1:
                raise ContractViolation(f"edge ({a}, {b}) has weight {w} < 1")

    def weights(self) -> list[int]:
        return sorted({w for _, _, w in self.edges})


@dataclass(frozen=True)
class PartitionResult:
    bottleneck: int
    side_one: tuple[int, ...]
    side_two: tuple[int, ...]

    def side_of(self, vertex: int) -> int:
        return 1 if vertex in self.side_one else 2


def parse_graph(text: Union[str, bytes]) -> WeightedGraph:
    """Read ``n m`` followed by m lines ``a b w``."""
    if isinstance(text, bytes):
        text = text.decode("ascii", errors="replace")
    lines = [line.split() for line in text.splitlines() if line.strip()]
    if not lines or len(lines[0]) != 2:
        raise ParseError("graph must start with a line 'n m'")

    def number(token: str) -> int:
        if not is_decimal(token):
            raise ParseError(f"not a decimal integer: {token!r}", token)
        return int(token)

    n, m = (number(t) for t in lines[0])
    if len(lines) - 1 != m:
        raise ParseError(f"expected {m} edge lines, found {len(lines) - 1}")
    edges = []
    for fields in lines[1:]:
        if len(fields) != 3:
            raise ParseError(f"edge line needs 'a b w': {' '.join(fields)!r}")
        edges.append(tuple(number(t) for t in fields))
    return WeightedGraph(n, tuple(edges))


class UnionFind:
    """Disjoint sets over ``0..n-1`` with union by size and path compression."""

    def __init__(self, n: int):
        self.parents = list(range(n))
        self.sizes = [1] * n

    def find(self, i: int) -> int:
        root = i
        while self.parents[root] != root:
            root = self.parents[root]
        while self.parents[i] != root:
            self.parents[i], i = root, self.parents[i]
        return root

    def union(self, i: int, j: int) -> int:
        root_i, root_j = self.find(i), self.find(j)
        if root_i == root_j:
            return root_i
        large, small = root_i, root_j
        if self.sizes[root_i] < self.sizes[root_j]:
            large, small = small, large
        self.sizes[large] += self.sizes[small]
        self.parents[small] = large
        return large

    def groups(self) -> list[list[int]]:
        groups = defaultdict(list)
        for i in range(len(self.parents)):
            groups[self.find(i)].append(i)
        return list(groups.values())


def components(G: WeightedGraph, threshold: int) -> list[list[int]]:
    """Vertex sets (1-based, ascending) joined by edges heavier than threshold."""
    forest = UnionFind(G.n)
    for a, b, w in G.edges:
        if w > threshold:
            forest.union(a - 1, b - 1)
    groups = [sorted(v + 1 for v in group) for group in forest.groups()]
    return sorted(groups, key=lambda group: (len(group), group[0]))


def _half_reachable(groups: list[list[int]], half: int, trace: bool = False):
    sizes = MultisetInput.from_values(len(group) for group in groups)
    return all_subset_sums(sizes, half, Strategy.SIGMA, trace=trace)


def bottleneck_partition(G: WeightedGraph) -> PartitionResult:
    """Balanced two-sided cut minimizing the heaviest crossing edge.

    Cutting exactly the edges of weight at most B is possible iff the
    components left by the heavier edges can be grouped into half the
    vertices; feasibility grows with B, so B is found by binary search over
    ``{0} ∪ weights``.
    """
    if G.n < 2 or G.n % 2:
        raise ContractViolation(f"balanced partition needs an even n >= 2, got {G.n}")
    half = G.n // 2
    candidates = [0] + G.weights()

    def feasible(index: int) -> bool:
        groups = components(G, candidates[index])
        return half in _half_reachable(groups, half)

    lo, hi = 0, len(candidates) - 1
    if not feasible(hi):
        raise SumsetError("splitting every edge must leave a balanced cut")
    while lo < hi:
        mid = (lo + hi) // 2
        if feasible(mid):
            hi = mid
        else:
            lo = mid + 1
    bottleneck = candidates[lo]

    groups = components(G, bottleneck)
    chosen_sizes = recover_subset(_half_reachable(groups, half, trace=True), half)
    by_size = defaultdict(list)
    for group in groups:
        by_size[len(group)].append(group)
    side = set()
    for size in chosen_sizes:
        side.update(by_size[size].pop(0))

    side_one = tuple(sorted(side))
    side_two = tuple(v for v in range(1, G.n + 1) if v not in side)
    crossing = max(
        (w for a, b, w in G.edges if (a in side) != (b in side)), default=0
    )
    if crossing != bottleneck:
        raise SumsetError(
            f"cut crosses weight {crossing} but threshold {bottleneck} was chosen"
        )
    LOGGER.debug("bottleneck %d with %d components", bottleneck, len(groups))
    return PartitionResult(bottleneck, side_one, side_two)


def _card(values: list[int], u: int) -> CardSumSet:
    if len(values) <= BASE_CASE:
        cells = [
            (sum(combo), j)
            for j in range(len(values) + 1)
            for combo in itertools.combinations(values, j)
        ]
        return CardSumSet.from_members(cells, u, len(values))
    mid = len(values) // 2
    left, right = _card(values[:mid], u), _card(values[mid:], u)
    return bool_conv_2d(left, right, u, len(values))


def card_sums(S: Iterable[int], u: int) -> CardSumSet:
    """Every (sum, cardinality) pair with sum at most u realized by a subset."""
    values = require_distinct(S)
    n = len(values)
    small = sorted(v for v in values if v <= u)
    grid = np.zeros((u + 1, n + 1), dtype=bool)
    inner = _card(small, u).grid
    grid[:, : inner.shape[1]] = inner
    return CardSumSet(n, u, _frozen(grid))


class CountingMode(str, enum.Enum):
    EXACT = "exact"
    MODULAR = "modular"


def _count_vector(values: list[int], u: int, modulus: Optional[int]) -> CountVector:
    if not values:
        return CountVector.delta(u, modulus)
    if len(values) == 1:
        counts = [0] * (u + 1)
        counts[0] = 1
        if values[0] <= u:
            counts[values[0]] += 1
        return CountVector(u, tuple(counts), modulus)
    mid = len(values) // 2
    left = _count_vector(values[:mid], u, modulus)
    right = _count_vector(values[mid:], u, modulus)
    return count_conv(left, right, u)


def count_sums(
    S: Iterable[int], u: int, mode: Union[str, CountingMode] = CountingMode.MODULAR
) -> CountVector:
    """Number of subsets of S summing to x, for every x up to u."""
    values = require_distinct(S)
    if u < 0:
        raise ContractViolation("bound must be non-negative")
    mode = CountingMode(mode)
    modulus = None
    if mode is CountingMode.MODULAR:
        modulus = Settings().data["counting_prime"]
    return _count_vector(sorted(values), u, modulus)


@thread_budget()
def banzhaf(
    weights: Iterable[int],
    quota: int,
    mode: Union[str, CountingMode] = CountingMode.EXACT,
) -> tuple[int, ...]:
    """Raw Banzhaf swing counts, one per voter in input order.

    A coalition T of the other voters is a swing for voter i when
    ``sum(T) < quota <= sum(T) + w_i``. Counts without voter i come from the
    full counts by ``N_i(x) = N(x) - N_i(x - w_i)``.
    """
    weights = list(weights)
    if CountingMode(mode) is not CountingMode.EXACT:
        raise ContractViolation("banzhaf needs exact counting")
    if any(w < 1 for w in weights):
        raise ContractViolation("voter weights must be >= 1")
    if not 1 <= quota <= sum(weights):
        raise ContractViolation(f"quota {quota} outside [1, {sum(weights)}]")

    u = quota - 1
    full = _count_vector(sorted(weights), u, None).counts

    def swings(w: int) -> int:
        without = [0] * (u + 1)
        for x in range(u + 1):
            without[x] = full[x] - (without[x - w] if x >= w else 0)
        return sum(without[max(0, quota - w) :])

    distinct = sorted(set(weights))
    per_weight = dict(zip(distinct, run_all(swings, distinct)))
    return tuple(per_weight[w] for w in weights)


def banzhaf_index(weights: Iterable[int], quota: int) -> tuple[Fraction, ...]:
    """Swing counts normalized to fractions of the total swing count."""
    counts = banzhaf(weights, quota)
    total = sum(counts)
    if total == 0:
        return tuple(Fraction(0) for _ in counts)
    return tuple(Fraction(c, total) for c in counts)
