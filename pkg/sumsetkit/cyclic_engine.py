"""Subset sums in ℤ_m.

Units are handled by covering them with a few segments ``{x, 2x, ..., ℓx}``:
inside one segment every element is ``i * x`` with ``i <= ℓ``, so its subset
sums are an integer problem of total at most ``ℓ^2``. Non-units are peeled off
by recursing over the prime factorization of m, where each residue class
``q^k · U(ℤ_{m/q^k})`` becomes a unit problem of a smaller modulus.
"""

import heapq
import logging
import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional

import numpy as np

from sumsetkit.convolution import cyclic_bool_conv
from sumsetkit.core import Mode, SumSet, _frozen
from sumsetkit.errors import ContractViolation
from sumsetkit.integer_engine import _sigma
from sumsetkit.witness import Trace, TraceNode
from sumsetkit.worker import run_all, thread_budget

LOGGER = logging.getLogger(__name__)

MAX_MODULUS = 1 << 40


@dataclass(frozen=True)
class Segment:
    """``{i * generator mod modulus : 1 <= i <= length}``."""

    generator: int
    length: int
    modulus: int

    def __post_init__(self):
        if self.modulus < 1 or self.length < 1:
            raise ContractViolation("segments need modulus >= 1 and length >= 1")
        if not 0 <= self.generator < self.modulus:
            raise ContractViolation(
                f"generator {self.generator} is not a residue mod {self.modulus}"
            )

    def members(self) -> list[int]:
        steps = range(1, self.length + 1)
        return sorted({i * self.generator % self.modulus for i in steps})

    def index_of(self, value: int) -> Optional[int]:
        """The i in ``1..length`` with ``i * generator == value``; units only."""
        i = value * pow(self.generator, -1, self.modulus) % self.modulus
        if i == 0:
            i = self.modulus
        return i if i <= self.length else None

    def __contains__(self, value: int) -> bool:
        if math.gcd(self.generator, self.modulus) == 1:
            return self.index_of(value % self.modulus) is not None
        return value % self.modulus in self.members()


@dataclass(frozen=True)
class ModInstance:
    gamma: tuple[int, ...]
    mu: int
    tau: int

    def __post_init__(self):
        if self.mu < 1 or self.tau < 1 or self.mu % self.tau:
            raise ContractViolation(f"tau={self.tau} must divide mu={self.mu}")
        for s in self.gamma:
            if not 0 <= s < self.mu:
                raise ContractViolation(f"{s} is not a residue mod {self.mu}")


@dataclass(frozen=True)
class FactorTable:
    modulus: int
    factors: tuple[tuple[int, int], ...]

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(q for q, _ in self.factors)

    @property
    def sigma0(self) -> int:
        return math.prod(r + 1 for _, r in self.factors)

    @property
    def sigma1(self) -> int:
        return math.prod((q ** (r + 1) - 1) // (q - 1) for q, r in self.factors)

    @property
    def totient(self) -> int:
        return math.prod((q - 1) * q ** (r - 1) for q, r in self.factors)

    @property
    def omega(self) -> int:
        return len(self.factors)

    def divisors(self) -> list[int]:
        divisors = [1]
        for q, r in self.factors:
            divisors = [d * q**k for d in divisors for k in range(r + 1)]
        return sorted(divisors)


def factorize(m: int) -> FactorTable:
    if m < 1:
        raise ContractViolation("only positive integers can be factorized")
    factors = []
    rest, q = m, 2
    while q * q <= rest:
        if rest % q == 0:
            r = 0
            while rest % q == 0:
                rest //= q
                r += 1
            factors.append((q, r))
        q += 1 if q == 2 else 2
    if rest > 1:
        factors.append((rest, 1))
    return FactorTable(m, tuple(factors))


def ext_euclid(a: int, b: int) -> tuple[int, int, int]:
    """``(x, y, g)`` with ``a*x + b*y == g == gcd(a, b)``."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return x0, y0, a


def mod_inverse(a: int, m: int) -> int:
    x, _, g = ext_euclid(a % m, m)
    if g != 1:
        raise ContractViolation(f"{a} is not a unit mod {m}")
    return x % m


def _check_residues(values: Iterable[int], m: int) -> list[int]:
    values = list(values)
    if len(set(values)) != len(values):
        raise ContractViolation("duplicate residues in a set input")
    for s in values:
        if not 0 <= s < m:
            raise ContractViolation(f"{s} is not a residue mod {m}")
    return values


def _check_units(values: Iterable[int], m: int) -> list[int]:
    values = _check_residues(values, m)
    for s in values:
        if math.gcd(s, m) != 1:
            raise ContractViolation(f"{s} is not a unit mod {m}")
    return values


def _scaled(members: list[int], x: int, m: int) -> list[int]:
    if m < 1 << 31:
        array = np.asarray(members, dtype=np.int64) % m
        return (array * x % m).tolist()
    return [v * x % m for v in members]


def _segment_sums(values: list[int], segment: Segment, trace: bool):
    m, x = segment.modulus, segment.generator
    indices = []
    for s in values:
        i = segment.index_of(s)
        if i is None:
            raise ContractViolation(f"{s} is not in seg({x}, {segment.length}) mod {m}")
        indices.append(i)
    integer, node = _sigma(sorted(indices), trace)
    sums = SumSet.cyclic(_scaled(integer.members(), x, m), m)
    return sums, TraceNode.scale(node, sums, multiplier=x, modulus=m) if trace else None


def segment_sums(
    values: Iterable[int], generator: int, length: int, m: int, *, trace: bool = False
) -> SumSet:
    if math.gcd(generator, m) != 1:
        raise ContractViolation(f"generator {generator} is not a unit mod {m}")
    values = _check_residues(values, m)
    sums, node = _segment_sums(values, Segment(generator % m, length, m), trace)
    return sums.with_trace(Trace(node)) if trace else sums


def cover_units(values: Iterable[int], m: int, length: int) -> list[Segment]:
    """Greedy cover of a set of units by unit-generated segments of ``length``.

    Each element b lies in ``seg(x, length)`` exactly for ``x = b / i`` with
    ``i <= length`` a unit, so the candidate segments come from an inverse
    table. The most-covering segment is taken repeatedly; ties go to the
    smallest generator.
    """
    values = _check_units(values, m)
    if length < 1:
        raise ContractViolation("segment length must be >= 1")
    if not values:
        return []
    if length * length < m:
        LOGGER.debug("length %d is below sqrt(%d); cover size unbounded", length, m)

    inverses = [
        (i, mod_inverse(i, m))
        for i in range(1, min(length, m) + 1)
        if math.gcd(i, m) == 1
    ]
    holders: dict[int, set[int]] = {}
    covered_by: dict[int, set[int]] = defaultdict(set)
    for b in values:
        holders[b] = {inverse * b % m for _, inverse in inverses}
        for x in holders[b]:
            covered_by[x].add(b)

    count = {x: len(members) for x, members in covered_by.items()}
    buckets: dict[int, list[int]] = defaultdict(list)
    for x, c in count.items():
        buckets[c].append(x)
    for bucket in buckets.values():
        heapq.heapify(bucket)
    top = max(count.values())

    uncovered = set(values)
    chosen = []
    while uncovered:
        bucket = buckets[top]
        while bucket and count[bucket[0]] != top:
            heapq.heappop(bucket)
        if not bucket:
            top -= 1
            continue
        x = heapq.heappop(bucket)
        chosen.append(Segment(x, length, m))
        newly = covered_by[x] & uncovered
        uncovered -= newly
        for b in newly:
            for other in holders[b]:
                count[other] -= 1
                if count[other] > 0:
                    heapq.heappush(buckets[count[other]], other)
    LOGGER.debug("%d units mod %d in %d segments", len(values), m, len(chosen))
    return chosen


def _ceil_sqrt(n: int) -> int:
    r = math.isqrt(n)
    return r if r * r == n else r + 1


def unit_length(n: int, m: int) -> int:
    """``max(⌈√m⌉, ⌈m/√n⌉)`` capped at m."""
    by_count = _ceil_sqrt(-(-m * m // n))
    return min(m, max(_ceil_sqrt(m), by_count))


def _unit_sums(values: list[int], m: int, trace: bool):
    n = len(values)
    if m == 1 or n == 0:
        zero = SumSet.cyclic((), m)
        return zero, TraceNode.leaf((), zero, modulus=m) if trace else None
    if not trace and n * n >= 4 * m:
        LOGGER.debug("%d units mod %d generate the whole group", n, m)
        full = np.ones(m, dtype=bool)
        return SumSet(m - 1, Mode.CYCLIC, _frozen(full)), None

    length = unit_length(n, m)
    remaining = sorted(values)
    parts = []
    for segment in cover_units(values, m, length):
        part = [s for s in remaining if segment.index_of(s) is not None]
        if part:
            parts.append((segment, part))
            taken = set(part)
            remaining = [s for s in remaining if s not in taken]

    results = run_all(lambda item: _segment_sums(item[1], item[0], trace), parts)
    total, node = results[0]
    for sums, child in results[1:]:
        total = cyclic_bool_conv(total, sums, m)
        if trace:
            node = TraceNode.combine(node, child, total, modulus=m)
    return total, node


@thread_budget()
def unit_sums(values: Iterable[int], m: int, *, trace: bool = False) -> SumSet:
    """Subset sums of a set of units of ℤ_m.

    At least ``2√m`` units always generate all of ℤ_m; that shortcut is
    skipped when a trace is requested.
    """
    if m < 1:
        raise ContractViolation("modulus must be >= 1")
    values = _check_units(values, m)
    sums, node = _unit_sums(values, m, trace)
    return sums.with_trace(Trace(node)) if trace else sums


def _children(instance: ModInstance, primes: tuple[int, ...]):
    """Pivot q and the compressed children ``(k, instance)`` for ``k = 0..r``.

    Child k holds the elements divisible by exactly ``q^k`` (k < r), or by at
    least ``q^r`` (k = r), divided by ``q^k``, modulo ``mu / q^k``.
    """
    q = next(p for p in primes if instance.tau % p == 0)
    r, tau = 0, instance.tau
    while tau % q == 0:
        tau //= q
        r += 1
    children = []
    for k in range(r + 1):
        power = q**k
        gamma = tuple(
            s // power
            for s in instance.gamma
            if s % power == 0 and (k == r or (s // power) % q)
        )
        children.append((k, ModInstance(gamma, instance.mu // power, tau)))
    return q, children


def _lift(sums: SumSet, factor: int, m: int) -> SumSet:
    lifted = [v * factor for v in sums.members()]
    if lifted[-1] >= m:
        raise ContractViolation(f"lifted residues exceed modulus {m}")
    return SumSet.cyclic(lifted, m)


def _mod_solve(instance: ModInstance, primes, trace: bool):
    if instance.tau == 1:
        return _unit_sums(list(instance.gamma), instance.mu, trace)
    if not instance.gamma:
        zero = SumSet.cyclic((), instance.mu)
        return zero, TraceNode.leaf((), zero, modulus=instance.mu) if trace else None

    q, children = _children(instance, primes)
    total, node = None, None
    for k, child in reversed(children):
        sub, sub_node = _mod_solve(child, primes, trace)
        lifted = _lift(sub, q**k, instance.mu)
        lifted_node = None
        if trace:
            lifted_node = TraceNode.lift(
                sub_node, lifted, multiplier=q**k, modulus=instance.mu
            )
        if total is None:
            total, node = lifted, lifted_node
            continue
        total = cyclic_bool_conv(total, lifted, instance.mu)
        if trace:
            node = TraceNode.combine(node, lifted_node, total, modulus=instance.mu)
    return total, node


def _check_modulus(m: int):
    if m < 1:
        raise ContractViolation("modulus must be >= 1")
    if m > MAX_MODULUS:
        raise ContractViolation(f"modulus {m} exceeds 2^40")


@thread_budget()
def mod_subset_sums(values: Iterable[int], m: int, *, trace: bool = False) -> SumSet:
    """All subset sums of a set of residues, modulo m."""
    _check_modulus(m)
    values = [s for s in _check_residues(values, m) if s]
    table = factorize(m)
    instance = ModInstance(tuple(sorted(values)), m, m)
    sums, node = _mod_solve(instance, table.primes, trace)
    LOGGER.debug(
        "mod %d (%d prime factors): %d residues reachable",
        m,
        table.omega,
        len(sums),
    )
    return sums.with_trace(Trace(node)) if trace else sums


def _walk(instance: ModInstance, primes) -> Iterator[int]:
    if instance.tau == 1:
        yield instance.mu
        return
    _, children = _children(instance, primes)
    for _, child in children:
        yield from _walk(child, primes)


def leaf_moduli(m: int) -> list[int]:
    """Moduli of the unit leaves of the full recursion started at (∅, m, m)."""
    _check_modulus(m)
    return sorted(_walk(ModInstance((), m, m), factorize(m).primes))


def cover_zm(m: int, length: int) -> list[Segment]:
    """Segments of ``length`` covering ℤ_m; ``Segment(0, 1, m)`` stands for 0.

    Residues with ``gcd(s, m) = m / d`` are ``(m / d) · U(ℤ_d)``; each such
    class is covered on its own and lifted by ``m / d``.
    """
    if m < 1:
        raise ContractViolation("modulus must be >= 1")
    if not 1 <= length <= m:
        raise ContractViolation(f"segment length {length} outside [1, {m}]")
    table = factorize(m)
    segments = [Segment(0, 1, m)]
    for d in table.divisors()[1:]:
        factor = m // d
        if d <= length:
            segments.append(Segment(factor, length, m))
            continue
        units = [x for x in range(1, d) if math.gcd(x, d) == 1]
        for segment in cover_units(units, d, length):
            segments.append(Segment(segment.generator * factor, length, m))

    bound = 8 * table.sigma1 * math.log(max(m, 2)) / length + table.sigma0
    if len(segments) > bound:
        LOGGER.warning(
            "cover of Z_%d with length %d uses %d segments, above %.1f",
            m,
            length,
            len(segments),
            bound,
        )
    return segments
