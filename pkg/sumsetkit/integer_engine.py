"""Subset sums over the integers, capped at a bound u.

Three routes produce the same set:

* divide and conquer on the element count, good when the total σ is small;
* geometric layering: elements are bucketed into ``[1, r0]``, ``(r0, 2 r0]``,
  ``(2 r0, 4 r0]``, ... and every bucket above the first is solved through its
  (sum, cardinality) grid in sheared coordinates, where only ``u / low``
  elements of a bucket can take part in a sum below u;
* the Bellman bit-vector DP from :mod:`sumsetkit.baselines`.

:func:`all_subset_sums` picks a route from predicted costs.
"""

import enum
import itertools
import logging
import math
from bisect import bisect_right
from typing import Iterable, Optional, Union

import numpy as np

from sumsetkit.baselines import reachable
from sumsetkit.convolution import bool_conv, bool_conv_2d
from sumsetkit.core import (
    CardSumSet,
    Layer,
    Layering,
    Mode,
    MultisetInput,
    SumSet,
    _frozen,
    _normalize,
    check_bound,
    require_distinct,
    split_into_two_sets,
)
from sumsetkit.errors import ContractViolation
from sumsetkit.witness import Trace, TraceNode
from sumsetkit.worker import run_all, thread_budget

LOGGER = logging.getLogger(__name__)

BASE_CASE = 4


class Strategy(str, enum.Enum):
    AUTO = "auto"
    SIGMA = "sigma"
    R0_SQRT = "r0-sqrt"
    R0_TWOTHIRDS = "r0-twothirds"
    MAIN = "main"
    DP = "dp"


def _subset_totals(values) -> list[int]:
    return [
        sum(combo)
        for k in range(len(values) + 1)
        for combo in itertools.combinations(values, k)
    ]


def _sigma(values: list[int], trace: bool) -> tuple[SumSet, Optional[TraceNode]]:
    total = sum(values)
    if len(values) <= BASE_CASE:
        sums = SumSet.from_members(_subset_totals(values), total)
        return sums, TraceNode.leaf(values, sums) if trace else None
    mid = len(values) // 2
    left, left_node = _sigma(values[:mid], trace)
    right, right_node = _sigma(values[mid:], trace)
    merged = bool_conv(left, right, total)
    return merged, TraceNode.combine(left_node, right_node, merged) if trace else None


def all_sums_sigma(values: Iterable[int], *, trace: bool = False) -> SumSet:
    """All subset sums of a set, bound σ = sum of the set."""
    values = sorted(require_distinct(values))
    sums, node = _sigma(values, trace)
    return sums.with_trace(Trace(node)) if trace else sums


def _check_interval(values: list[int], low: int, length: int):
    if low < 0 or length < 0:
        raise ContractViolation("interval start and length must be non-negative")
    for v in values:
        if not low <= v <= low + length:
            raise ContractViolation(f"{v} outside [{low}, {low + length}]")


def _unsheared_cap_mask(shape, low: int, cap: int) -> np.ndarray:
    y = np.arange(shape[0], dtype=np.int64)[:, None]
    j = np.arange(shape[1], dtype=np.int64)[None, :]
    return y + low * j > cap


def _sheared(
    values: list[int],
    low: int,
    length: int,
    alpha: int,
    cap: Optional[int],
    trace: bool,
) -> tuple[CardSumSet, Optional[TraceNode]]:
    """Σ^alpha(values) stored as ``(sum - low * j, j)``, alpha clipped to |values|."""
    a = min(alpha, len(values))
    width = length * a
    if a == 0:
        grid = CardSumSet.from_members((), 0, 0)
        return grid, TraceNode.leaf((), grid, shift=low) if trace else None
    if len(values) <= BASE_CASE:
        cells = []
        for j in range(1, a + 1):
            for combo in itertools.combinations(values, j):
                total = sum(combo)
                if cap is None or total <= cap:
                    cells.append((total - low * j, j))
        grid = CardSumSet.from_members(cells, width, a)
        return grid, TraceNode.leaf(values, grid, shift=low) if trace else None

    # median split, equal values stay left
    median = values[(len(values) - 1) // 2]
    split = bisect_right(values, median)
    left, left_node = _sheared(values[:split], low, length, alpha, cap, trace)
    right, right_node = _sheared(values[split:], low, length, alpha, cap, trace)
    merged = bool_conv_2d(left, right, width, a)
    if cap is not None:
        grid = merged.grid & ~_unsheared_cap_mask(merged.grid.shape, low, cap)
        merged = CardSumSet(a, width, grid)
    if not trace:
        return merged, None
    return merged, TraceNode.combine_2d(left_node, right_node, merged, shift=low)


def _unshear(grid: CardSumSet, low: int, length: int) -> CardSumSet:
    a = grid.alpha
    out = np.zeros(((low + length) * a + 1, a + 1), dtype=bool)
    for j in range(a + 1):
        ys = np.flatnonzero(grid.grid[:, j])
        out[ys + low * j, j] = True
    return CardSumSet(a, (low + length) * a, _frozen(out))


def capped_interval_sums(
    values: Iterable[int], low: int, length: int, alpha: int
) -> CardSumSet:
    """(sum, cardinality) pairs of subsets of at most ``alpha`` elements.

    All values must lie in ``[low, low + length]``. The returned grid has
    cardinality cap ``min(alpha, len(values))``.
    """
    values = sorted(require_distinct(values))
    _check_interval(values, low, length)
    if alpha < 0:
        raise ContractViolation("alpha must be non-negative")
    sheared, _ = _sheared(values, low, length, alpha, None, False)
    return _unshear(sheared, low, length)


def _project(sheared: CardSumSet, low: int, u: int) -> SumSet:
    bits = np.zeros(u + 1, dtype=bool)
    for j in range(sheared.alpha + 1):
        sums = np.flatnonzero(sheared.grid[:, j]) + low * j
        bits[sums[sums <= u]] = True
    return SumSet(u, Mode.CAPPED, _frozen(bits))


def _interval_sums(
    values: list[int], low: int, length: int, u: int, trace: bool
) -> tuple[SumSet, Optional[TraceNode]]:
    sheared, node = _sheared(values, low, length, u // low, u, trace)
    sums = _project(sheared, low, u)
    return sums, TraceNode.project(node, sums) if trace else None


def interval_sums(values: Iterable[int], low: int, length: int, u: int) -> SumSet:
    values = sorted(require_distinct(values))
    if low < 1:
        raise ContractViolation("interval_sums needs an interval starting at >= 1")
    _check_interval(values, low, length)
    check_bound(u)
    return _interval_sums(values, low, length, u, False)[0]


def partition_geometric(values: Iterable[int], r0: int, u: int) -> Layering:
    values = sorted(require_distinct(values))
    if not 1 <= r0 <= max(u, 1):
        raise ContractViolation(f"r0={r0} outside [1, {u}]")
    for v in values:
        if v > u:
            raise ContractViolation(f"{v} exceeds the bound {u}")

    bounds = [(1, r0)]
    while bounds[-1][1] < u:
        high = bounds[-1][1]
        bounds.append((high + 1, r0 << len(bounds)))

    layers = []
    start = 0
    for low, high in bounds:
        end = bisect_right(values, high, lo=start)
        layers.append(Layer(low, high, tuple(values[start:end])))
        start = end
    return Layering(r0, tuple(layers))


def _layer(index_layer, u: int, trace: bool):
    index, layer = index_layer
    values = list(layer.values)
    if index == 0:
        sums, node = _sigma(values, trace)
        capped = sums.truncate(u)
        return capped, TraceNode.cap(node, capped) if trace else None
    # values lie in [low, high] = [r_{i-1} + 1, r_{i-1} + (r_i - r_{i-1})]
    return _interval_sums(values, layer.low, layer.high - layer.low + 1, u, trace)


def _layer_sums(layering: Layering, u: int, trace: bool):
    return run_all(
        lambda item: _layer(item, u, trace), list(enumerate(layering.layers))
    )


def layer_sums(layering: Layering, u: int) -> list[SumSet]:
    return [sums for sums, _ in _layer_sums(layering, u, False)]


def _chain(results, u: int, trace: bool) -> tuple[SumSet, Optional[TraceNode]]:
    total, node = results[0]
    for sums, child in results[1:]:
        total = bool_conv(total, sums, u)
        if trace:
            node = TraceNode.combine(node, child, total)
    return total, node


def predicted_costs(n: int, sigma: int, u: int) -> dict[Strategy, float]:
    log_u = max(math.log2(u), 1.0)
    return {
        Strategy.SIGMA: sigma
        * max(math.log2(max(sigma, 2)), 1.0)
        * max(math.log2(max(n, 1) * log_u), 1.0),
        Strategy.R0_SQRT: math.sqrt(n) * u * log_u**2.5,
        Strategy.R0_TWOTHIRDS: float(u) ** (4 / 3) * log_u**2,
        Strategy.DP: n * u / 64,
    }


def _cube_root_squared(u: int) -> int:
    """Largest r with r^3 <= u^2."""
    target = u * u
    r = int(round(float(u) ** (2 / 3)))
    while r**3 > target:
        r -= 1
    while (r + 1) ** 3 <= target:
        r += 1
    return r


def choose_r0(strategy: Strategy, n: int, u: int) -> int:
    if strategy is Strategy.R0_SQRT:
        r0 = int(u / math.sqrt(max(n, 1)))
    else:
        r0 = _cube_root_squared(u)
    return min(max(r0, 1), u)


def _resolve(strategy: Strategy, values: list[int], u: int) -> Strategy:
    if strategy not in (Strategy.AUTO, Strategy.MAIN):
        return strategy
    costs = predicted_costs(len(values), sum(values), u)
    if strategy is Strategy.MAIN:
        costs = {k: costs[k] for k in (Strategy.R0_SQRT, Strategy.R0_TWOTHIRDS)}
    return min(costs, key=costs.get)


def _solve_set(
    values: list[int], u: int, strategy: Strategy, trace: bool
) -> tuple[SumSet, Optional[TraceNode]]:
    if not values:
        zero = SumSet.zero(u)
        return zero, TraceNode.leaf((), zero) if trace else None

    chosen = _resolve(strategy, values, u)
    LOGGER.debug("%d distinct values up to %d: %s", len(values), u, chosen.value)
    match chosen:
        case Strategy.SIGMA:
            sums, node = _sigma(values, trace)
            capped = sums.truncate(u)
            return capped, TraceNode.cap(node, capped) if trace else None
        case Strategy.DP:
            sums = reachable(values, u)
            return sums, TraceNode.leaf(values, sums) if trace else None
        case _:
            r0 = choose_r0(chosen, len(values), u)
            layering = partition_geometric(values, r0, u)
            LOGGER.debug("r0=%d gives %d layers", r0, layering.nu)
            return _chain(_layer_sums(layering, u, trace), u, trace)


def _as_multiset(S) -> MultisetInput:
    return S if isinstance(S, MultisetInput) else MultisetInput.from_values(S)


def _strategy(strategy: Union[str, Strategy]) -> Strategy:
    try:
        return Strategy(strategy)
    except ValueError:
        choices = ", ".join(s.value for s in Strategy)
        raise ContractViolation(
            f"unknown strategy {strategy!r}; choose one of {choices}"
        ) from None


@thread_budget()
def all_subset_sums(
    S: Union[MultisetInput, Iterable[int]],
    u: int,
    strategy: Union[str, Strategy] = Strategy.AUTO,
    *,
    trace: bool = False,
) -> SumSet:
    """Σ_u(S) for a multiset S of positive integers.

    The multiset is normalized to multiplicities of at most two, split into
    two sets P and Q, each set is solved by ``strategy`` and the two results
    are combined at cap u.
    """
    S = _as_multiset(S)
    strategy = _strategy(strategy)
    check_bound(u)
    if u == 0:
        zero = SumSet.zero(0)
        return zero.with_trace(Trace(TraceNode.leaf((), zero))) if trace else zero

    T, bundles = _normalize(S, u, track=trace)
    P, Q = split_into_two_sets(T)
    p_sums, p_node = _solve_set(P, u, strategy, trace)
    q_sums, q_node = _solve_set(Q, u, strategy, trace)
    result = bool_conv(p_sums, q_sums, u)
    if not trace:
        return result

    p_origins = {v: bundles[v][0] for v in P}
    q_origins = {v: bundles[v][1] for v in Q}
    root = TraceNode.combine(
        TraceNode.expand(p_node, p_origins), TraceNode.expand(q_node, q_origins), result
    )
    LOGGER.debug("trace of Σ_%d holds %d nodes", u, root.size())
    return result.with_trace(Trace(root))


def decide(
    S: Union[MultisetInput, Iterable[int]],
    target: int,
    strategy: Union[str, Strategy] = Strategy.AUTO,
) -> bool:
    """Is there a sub-multiset of S summing exactly to ``target``?"""
    if target < 0:
        raise ContractViolation("target must be non-negative")
    S, strategy = _as_multiset(S), _strategy(strategy)
    if target > S.sigma:
        return False
    return target in all_subset_sums(S, target, strategy)
