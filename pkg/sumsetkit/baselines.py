"""Reference oracles: Bellman reachability, exhaustive enumeration and the
cardinality table. None of these share code with the engines beyond the
multiset normalization."""

import logging
from typing import Iterable, Union

import numpy as np

from sumsetkit.core import (
    CardSumSet,
    Mode,
    MultisetInput,
    SumSet,
    _frozen,
    _normalize,
    check_bound,
    require_distinct,
)
from sumsetkit.errors import ContractViolation, GuardExceeded

LOGGER = logging.getLogger(__name__)

GUARD = 24


def _as_multiset(S: Union[MultisetInput, Iterable[int]]) -> MultisetInput:
    if isinstance(S, MultisetInput):
        return S
    return MultisetInput.from_values(S)


def reachable(values: Iterable[int], u: int) -> SumSet:
    """Bellman reachability over ``[0, u]``, one shifted OR per element."""
    bits = np.zeros(u + 1, dtype=bool)
    bits[0] = True
    for v in values:
        if v <= u:
            bits[v:] |= bits[: u + 1 - v].copy()
    return SumSet(u, Mode.CAPPED, _frozen(bits))


def bellman_dp(S: Union[MultisetInput, Iterable[int]], u: int) -> SumSet:
    S = _as_multiset(S)
    check_bound(u)
    if u == 0:
        return SumSet.zero(0)
    T, _ = _normalize(S, u, track=False)
    return reachable(T.expanded(), u)


def _guarded(values: list[int]) -> list[int]:
    if len(values) > GUARD:
        raise GuardExceeded(
            f"brute force over {len(values)} elements exceeds the guard of {GUARD}"
        )
    return values


def _all_subset_totals(values: list[int]) -> list[int]:
    # one entry per subset, 2^n in total
    totals = [0]
    for v in values:
        totals = totals + [t + v for t in totals]
    return totals


def brute_force(S: Union[MultisetInput, Iterable[int]], u: int) -> SumSet:
    values = _guarded(_as_multiset(S).expanded())
    return SumSet.from_members(_all_subset_totals(values), u)


def brute_force_mod(S: Iterable[int], m: int) -> SumSet:
    if m < 1:
        raise ContractViolation("modulus must be >= 1")
    values = list(S.expanded() if isinstance(S, MultisetInput) else S)
    _guarded(values)
    return SumSet.cyclic((t % m for t in _all_subset_totals(values)), m)


def card_dp(S: Iterable[int], u: int) -> CardSumSet:
    """Table of reachable (sum, cardinality) pairs, filled element by element.

    Row k of ``table`` holds the sums reachable with exactly k elements.
    """
    values = require_distinct(S)
    n = len(values)
    table = np.zeros((n + 1, u + 1), dtype=bool)
    table[0, 0] = True
    for v in values:
        if v > u:
            continue
        table[1:, v:] |= table[:-1, : u + 1 - v].copy()
    return CardSumSet(n, u, _frozen(table.T.copy()))
