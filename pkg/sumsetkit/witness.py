"""Solution recovery.

Engines called with ``trace=True`` attach a :class:`Trace` to the SumSet they
return. :func:`recover_subset` walks it top-down: at every combine node it
scans the left child's sums for a value whose complement is present in the
right child, then descends into both children. Coordinate maps (cardinality
shear, segment multiplier, cyclic lift, multiset bundles) are inverted on the
way down, so the subset comes back in input elements.

The Size/Sum oracles and :func:`witness_function` implement witness finding
for a single sumset through polynomial products instead of a stored trace.
"""

import enum
import itertools
import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Mapping, Optional, Union

import numpy as np

from sumsetkit.convolution import CountVector, bool_conv, count_conv
from sumsetkit.core import CardSumSet, Mode, SumSet
from sumsetkit.errors import ContractViolation, NotRealizableError

LOGGER = logging.getLogger(__name__)

# leaves up to this size are searched exhaustively
ENUMERATION_LIMIT = 16


class NodeKind(enum.Enum):
    LEAF = "leaf"
    SUM = "sum"
    SUM2D = "sum2d"
    PROJECT = "project"
    CAP = "cap"
    SCALE = "scale"
    LIFT = "lift"
    EXPAND = "expand"


@dataclass(frozen=True, eq=False)
class TraceNode:
    kind: NodeKind
    sums: Union[SumSet, CardSumSet] = field(repr=False)
    children: tuple["TraceNode", ...] = ()
    elements: tuple[int, ...] = ()
    shift: int = 0
    multiplier: int = 1
    modulus: Optional[int] = None
    origins: Optional[Mapping[int, tuple[int, ...]]] = field(default=None, repr=False)

    @classmethod
    def leaf(cls, elements, sums, *, shift=0, modulus=None) -> "TraceNode":
        return cls(
            NodeKind.LEAF, sums, elements=tuple(elements), shift=shift, modulus=modulus
        )

    @classmethod
    def combine(cls, left, right, sums, *, modulus=None) -> "TraceNode":
        return cls(NodeKind.SUM, sums, (left, right), modulus=modulus)

    @classmethod
    def combine_2d(cls, left, right, sums, *, shift) -> "TraceNode":
        return cls(NodeKind.SUM2D, sums, (left, right), shift=shift)

    @classmethod
    def project(cls, child, sums) -> "TraceNode":
        return cls(NodeKind.PROJECT, sums, (child,))

    @classmethod
    def cap(cls, child, sums) -> "TraceNode":
        return cls(NodeKind.CAP, sums, (child,))

    @classmethod
    def scale(cls, child, sums, *, multiplier, modulus) -> "TraceNode":
        return cls(
            NodeKind.SCALE, sums, (child,), multiplier=multiplier, modulus=modulus
        )

    @classmethod
    def lift(cls, child, sums, *, multiplier, modulus) -> "TraceNode":
        return cls(
            NodeKind.LIFT, sums, (child,), multiplier=multiplier, modulus=modulus
        )

    @classmethod
    def expand(cls, child, origins) -> "TraceNode":
        return cls(NodeKind.EXPAND, child.sums, (child,), origins=dict(origins))

    def contains(self, target) -> bool:
        if isinstance(self.sums, CardSumSet):
            s, j = target
            return (s - self.shift * j, j) in self.sums
        return target in self.sums

    def size(self) -> int:
        return 1 + sum(child.size() for child in self.children)


@dataclass(frozen=True)
class Trace:
    root: TraceNode

    @property
    def sums(self):
        return self.root.sums


@dataclass(frozen=True)
class WitnessQuery:
    """Oracle query: ``query`` is a subset of the left operand ``left``."""

    left: tuple[int, ...]
    query: tuple[int, ...]
    right: tuple[int, ...]

    def __post_init__(self):
        if not set(self.query) <= set(self.left):
            raise ContractViolation("query set must be a subset of the left operand")
        if any(x < 0 for x in self.left + self.right):
            raise ContractViolation("operands must be non-negative")

    @property
    def length(self) -> int:
        return max(self.left, default=0) + max(self.right, default=0) + 1


def _oracle(q: WitnessQuery, weights: list[int]) -> list[int]:
    cap = q.length - 1
    counts = [0] * (cap + 1)
    for x, weight in zip(q.query, weights):
        counts[x] = weight
    f = CountVector(cap, tuple(counts))
    g = CountVector.indicator(q.right, cap)
    return list(count_conv(f, g, cap).counts)


def size_oracle(q: WitnessQuery) -> list[int]:
    """``|W_i ∩ Q|`` for every i, where ``W_i = {x ∈ X : i - x ∈ Y}``."""
    return _oracle(q, [1] * len(q.query))


def sum_oracle(q: WitnessQuery) -> list[int]:
    """Sum of the elements of ``W_i ∩ Q`` for every i."""
    return _oracle(q, list(q.query))


def witness_function(X: SumSet, Y: SumSet, cap: int) -> dict[int, int]:
    """Map every member i of the capped ``X ⊕ Y`` to some x ∈ X with i - x ∈ Y.

    Targets with a unique witness read it off the sum oracle directly; the
    rest narrow down the sorted support of X by halving, one size/sum
    oracle pair per active interval and round.
    """
    xs = tuple(x for x in X.members() if x <= cap)
    ys = tuple(y for y in Y.members() if y <= cap)
    targets = bool_conv(X, Y, cap).members()

    def ask(query):
        q = WitnessQuery(xs, query, ys)
        return size_oracle(q), sum_oracle(q)

    sizes, sums = ask(xs)
    witness: dict[int, int] = {}
    active: dict[tuple[int, int], list[int]] = defaultdict(list)
    for i in targets:
        if sizes[i] == 1:
            witness[i] = sums[i]
        else:
            active[(0, len(xs))].append(i)

    rounds = 0
    while active:
        rounds += 1
        pending_next: dict[tuple[int, int], list[int]] = defaultdict(list)
        for (lo, hi), pending in active.items():
            if hi - lo == 1:
                for i in pending:
                    witness[i] = xs[lo]
                continue
            mid = (lo + hi) // 2
            sizes, sums = ask(xs[lo:mid])
            for i in pending:
                if sizes[i] == 1:
                    witness[i] = sums[i]
                elif sizes[i] > 1:
                    pending_next[(lo, mid)].append(i)
                else:
                    pending_next[(mid, hi)].append(i)
        active = pending_next
    LOGGER.debug("witness function for %d targets in %d rounds", len(targets), rounds)
    return witness


def _leaf_search(elements, target, modulus: Optional[int]) -> list[int]:
    if len(elements) <= ENUMERATION_LIMIT:
        for size in range(len(elements) + 1):
            for combo in itertools.combinations(elements, size):
                total = sum(combo)
                if (total % modulus if modulus else total) == target:
                    return list(combo)
        raise NotRealizableError(target)

    # reachability layers, then backtrack
    width = modulus or target + 1
    mask = (1 << width) - 1
    layers = [1]
    for v in elements:
        r = layers[-1]
        if modulus:
            shift = v % modulus
            shifted = ((r << shift) | (r >> (modulus - shift))) & mask
        else:
            shifted = (r << v) & mask
        layers.append(r | shifted)
    if not (layers[-1] >> target) & 1:
        raise NotRealizableError(target)
    chosen = []
    for k in reversed(range(len(elements))):
        if not (layers[k] >> target) & 1:
            v = elements[k]
            chosen.append(v)
            target = (target - v) % modulus if modulus else target - v
    return chosen


def _card_leaf_search(elements, target) -> list[int]:
    s, j = target
    for combo in itertools.combinations(elements, j):
        if sum(combo) == s:
            return list(combo)
    raise NotRealizableError(target)


def _split_1d(node: TraceNode, target: int) -> tuple[int, int]:
    left, right = node.children
    candidates = np.asarray(left.sums.members(), dtype=np.int64)
    rest = target - candidates
    if node.modulus:
        rest %= node.modulus
    bound = right.sums.bound
    valid = (rest >= 0) & (rest <= bound)
    hits = np.flatnonzero(valid)
    hits = hits[right.sums.bits[rest[hits]]]
    if not len(hits):
        raise NotRealizableError(target)
    return int(candidates[hits[0]]), int(rest[hits[0]])


def _split_2d(node: TraceNode, target) -> tuple[tuple, tuple]:
    left, right = node.children
    s, j = target
    x = node.shift
    sheared = s - x * j
    for y1, j1 in left.sums.members():
        y2, j2 = sheared - y1, j - j1
        if y2 >= 0 and j2 >= 0 and (y2, j2) in right.sums:
            return (y1 + x * j1, j1), (y2 + x * j2, j2)
    raise NotRealizableError(target)


def _recover(node: TraceNode, target) -> list[int]:
    match node.kind:
        case NodeKind.LEAF:
            if isinstance(node.sums, CardSumSet):
                return _card_leaf_search(node.elements, target)
            return _leaf_search(node.elements, target, node.modulus)
        case NodeKind.SUM:
            a, b = _split_1d(node, target)
            left, right = node.children
            return _recover(left, a) + _recover(right, b)
        case NodeKind.SUM2D:
            a, b = _split_2d(node, target)
            left, right = node.children
            return _recover(left, a) + _recover(right, b)
        case NodeKind.PROJECT:
            (child,) = node.children
            for j in range(child.sums.alpha + 1):
                if child.contains((target, j)):
                    return _recover(child, (target, j))
            raise NotRealizableError(target)
        case NodeKind.CAP:
            return _recover(node.children[0], target)
        case NodeKind.SCALE:
            (child,) = node.children
            m, x = node.modulus, node.multiplier
            start = target * pow(x, -1, m) % m
            for sigma in range(start, child.sums.bound + 1, m):
                if sigma in child.sums:
                    return [v * x % m for v in _recover(child, sigma)]
            raise NotRealizableError(target)
        case NodeKind.LIFT:
            (child,) = node.children
            if target % node.multiplier:
                raise NotRealizableError(target)
            inner = _recover(child, target // node.multiplier)
            return [v * node.multiplier for v in inner]
        case NodeKind.EXPAND:
            values = _recover(node.children[0], target)
            return [e for v in values for e in node.origins[v]]
    raise ContractViolation(f"unknown trace node kind {node.kind}")


def recover_subset(trace: Union[Trace, SumSet], t: int) -> list[int]:
    """Return input elements, ascending, whose (capped or modular) sum is t."""
    if isinstance(trace, SumSet):
        if trace.trace is None:
            raise ContractViolation("sumset was computed without trace=True")
        trace = trace.trace
    root = trace.root
    if not isinstance(root.sums, SumSet) or t not in root.sums:
        raise NotRealizableError(t)
    subset = sorted(_recover(root, t))
    total = sum(subset)
    if root.sums.mode is Mode.CYCLIC:
        total %= root.sums.modulus
    if total != t:
        raise ContractViolation(f"traceback produced sum {total} instead of {t}")
    return subset


def lexicographic_subset(values: list[int], t: int) -> list[int]:
    """The lexicographically smallest ascending sub-multiset summing to t."""
    values = sorted(values)
    mask = (1 << (t + 1)) - 1
    suffix = [1] * (len(values) + 1)
    for k in reversed(range(len(values))):
        suffix[k] = (suffix[k + 1] | (suffix[k + 1] << values[k])) & mask
    if not (suffix[0] >> t) & 1:
        raise NotRealizableError(t)

    chosen = []
    position, remaining = 0, t
    while remaining:
        for k in range(position, len(values)):
            v = values[k]
            if v <= remaining and (suffix[k + 1] >> (remaining - v)) & 1:
                chosen.append(v)
                remaining -= v
                position = k + 1
                break
    return chosen
