"""Input multisets, sumset representations and multiset normalization."""

import enum
import heapq
import logging
import re
import zlib
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Iterable, Iterator

import numpy as np

from sumsetkit.errors import ContractViolation, ParseError

LOGGER = logging.getLogger(__name__)

# values and bounds must address a bit-vector
MAX_VALUE = (1 << 63) - 1

_DECIMAL = re.compile(r"[0-9]+")


class Mode(enum.Enum):
    CAPPED = "integer-capped"
    CYCLIC = "cyclic"


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class MultisetInput:
    """A multiset of positive integers stored as ascending (value, multiplicity)."""

    entries: tuple[tuple[int, int], ...]

    def __post_init__(self):
        previous = 0
        for value, multiplicity in self.entries:
            if value < 1 or value > MAX_VALUE:
                raise ContractViolation(f"value {value} outside [1, 2^63)")
            if multiplicity < 1:
                raise ContractViolation(f"multiplicity of {value} must be >= 1")
            if value <= previous:
                raise ContractViolation("entries must be strictly ascending")
            previous = value

    @classmethod
    def from_values(cls, values: Iterable[int]) -> "MultisetInput":
        return cls.from_counts(Counter(values))

    @classmethod
    def from_counts(cls, counts: dict[int, int]) -> "MultisetInput":
        return cls(tuple(sorted((v, m) for v, m in counts.items() if m > 0)))

    @property
    def n(self) -> int:
        return sum(m for _, m in self.entries)

    @property
    def distinct(self) -> int:
        return len(self.entries)

    @property
    def sigma(self) -> int:
        return sum(v * m for v, m in self.entries)

    def multiplicity(self, value: int) -> int:
        return dict(self.entries).get(value, 0)

    def expanded(self) -> list[int]:
        return [v for v, m in self.entries for _ in range(m)]

    def as_dict(self) -> dict[int, int]:
        return dict(self.entries)


@dataclass(frozen=True, eq=False)
class SumSet:
    """Membership bit-vector over sums ``0..bound``.

    In cyclic mode ``bound == m - 1`` and indices are residues. ``trace`` is
    only populated by engine entry points called with ``trace=True``.
    """

    bound: int
    mode: Mode
    bits: np.ndarray = field(repr=False, compare=False)
    trace: Any = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.bound < 0:
            raise ContractViolation("bound must be non-negative")
        bits = np.asarray(self.bits, dtype=bool)
        if bits.shape != (self.bound + 1,):
            raise ContractViolation(
                f"bit-vector of length {bits.shape} does not match bound {self.bound}"
            )
        if not bits[0]:
            raise ContractViolation("0 must be a member of every sumset")
        if bits.flags.writeable:
            bits = _frozen(bits.copy())
        object.__setattr__(self, "bits", bits)

    @classmethod
    def from_members(
        cls, members: Iterable[int], bound: int, mode: Mode = Mode.CAPPED
    ) -> "SumSet":
        bits = np.zeros(bound + 1, dtype=bool)
        bits[0] = True
        members = [x for x in members if x <= bound]
        if members:
            bits[np.asarray(members, dtype=np.int64)] = True
        return cls(bound, mode, _frozen(bits))

    @classmethod
    def zero(cls, bound: int = 0, mode: Mode = Mode.CAPPED) -> "SumSet":
        return cls.from_members((), bound, mode)

    @classmethod
    def cyclic(cls, members: Iterable[int], m: int) -> "SumSet":
        if m < 1:
            raise ContractViolation("modulus must be >= 1")
        return cls.from_members((x % m for x in members), m - 1, Mode.CYCLIC)

    @property
    def modulus(self) -> int:
        if self.mode is not Mode.CYCLIC:
            raise ContractViolation("only cyclic sumsets have a modulus")
        return self.bound + 1

    def members(self) -> list[int]:
        return np.flatnonzero(self.bits).tolist()

    def __contains__(self, x: int) -> bool:
        return 0 <= x <= self.bound and bool(self.bits[x])

    def __iter__(self) -> Iterator[int]:
        return iter(self.members())

    def __len__(self) -> int:
        return int(np.count_nonzero(self.bits))

    def __eq__(self, other) -> bool:
        if not isinstance(other, SumSet):
            return NotImplemented
        return (
            self.bound == other.bound
            and self.mode is other.mode
            and np.array_equal(self.bits, other.bits)
        )

    def __hash__(self):
        return hash((self.bound, self.mode, self.bits.tobytes()))

    def truncate(self, bound: int) -> "SumSet":
        """Intersect with ``[0, bound]``, padding when ``bound`` is larger."""
        if self.mode is not Mode.CAPPED:
            raise ContractViolation("only integer-capped sumsets can be truncated")
        bits = np.zeros(bound + 1, dtype=bool)
        keep = min(bound, self.bound) + 1
        bits[:keep] = self.bits[:keep]
        return SumSet(bound, Mode.CAPPED, _frozen(bits))

    def with_trace(self, trace) -> "SumSet":
        return SumSet(self.bound, self.mode, self.bits, trace)

    def checksum(self) -> str:
        return f"{zlib.crc32(np.packbits(self.bits).tobytes()):08x}"


@dataclass(frozen=True, eq=False)
class CardSumSet:
    """Membership grid over (sum, cardinality) pairs, ``grid[s, j]``."""

    alpha: int
    width: int
    grid: np.ndarray = field(repr=False, compare=False)

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=bool)
        if grid.shape != (self.width + 1, self.alpha + 1):
            raise ContractViolation(
                f"grid shape {grid.shape} does not match "
                f"({self.width + 1}, {self.alpha + 1})"
            )
        if not grid[0, 0]:
            raise ContractViolation("(0, 0) must be a member")
        if grid.flags.writeable:
            grid = _frozen(grid.copy())
        object.__setattr__(self, "grid", grid)

    @classmethod
    def from_members(
        cls, members: Iterable[tuple[int, int]], width: int, alpha: int
    ) -> "CardSumSet":
        grid = np.zeros((width + 1, alpha + 1), dtype=bool)
        grid[0, 0] = True
        for s, j in members:
            if s <= width and j <= alpha:
                grid[s, j] = True
        return cls(alpha, width, _frozen(grid))

    def members(self) -> list[tuple[int, int]]:
        return [(int(s), int(j)) for s, j in np.argwhere(self.grid)]

    def __contains__(self, pair: tuple[int, int]) -> bool:
        s, j = pair
        return 0 <= s <= self.width and 0 <= j <= self.alpha and bool(self.grid[s, j])

    def __len__(self) -> int:
        return int(np.count_nonzero(self.grid))

    def __eq__(self, other) -> bool:
        if not isinstance(other, CardSumSet):
            return NotImplemented
        return set(self.members()) == set(other.members())

    def __hash__(self):
        return hash(frozenset(self.members()))

    def project(self, bound: int) -> SumSet:
        """Forget cardinalities and intersect with ``[0, bound]``."""
        sums = np.flatnonzero(self.grid.any(axis=1))
        return SumSet.from_members(sums[sums <= bound].tolist(), bound)


@dataclass(frozen=True)
class Layer:
    low: int
    high: int
    values: tuple[int, ...]


@dataclass(frozen=True)
class Layering:
    r0: int
    layers: tuple[Layer, ...]

    @property
    def nu(self) -> int:
        return len(self.layers)


def is_decimal(token: str) -> bool:
    return _DECIMAL.fullmatch(token) is not None


def parse_multiset(text: str | bytes) -> MultisetInput:
    if isinstance(text, bytes):
        text = text.decode("ascii", errors="replace")
    tokens = text.split()
    if not tokens:
        raise ParseError("empty input: expected at least one positive integer")

    values = []
    for token in tokens:
        if not is_decimal(token):
            raise ParseError(f"not a decimal positive integer: {token!r}", token)
        value = int(token)
        if value == 0:
            raise ParseError(f"values must be positive: {token!r}", token)
        if value > MAX_VALUE:
            raise ParseError(f"value does not fit in 63 bits: {token!r}", token)
        values.append(value)
    return MultisetInput.from_values(values)


def check_bound(u: int, name: str = "bound") -> int:
    if u < 0 or u > MAX_VALUE:
        raise ContractViolation(f"{name} {u} outside [0, 2^63)")
    return u


def _normalize(
    S: MultisetInput, u: int, track: bool
) -> tuple[MultisetInput, dict[int, list[tuple[int, ...]]]]:
    """Fold multiplicities above two into doubled values.

    With ``track`` every copy in the output carries the bundle of input
    elements it stands for; bundles of one value are listed in the order the
    copies were emitted.
    """
    bundles: dict[int, list[tuple[int, ...]]] = {}
    pending: dict[int, int] = {}
    for value, multiplicity in S.entries:
        if value > u:
            continue
        pending[value] = multiplicity
        if track:
            bundles[value] = [(value,)] * multiplicity

    heap = list(pending)
    heapq.heapify(heap)
    out: dict[int, int] = {}
    out_bundles: dict[int, list[tuple[int, ...]]] = {}
    while heap:
        x = heapq.heappop(heap)
        mu = pending.pop(x)
        if mu <= 2:
            out[x] = mu
            if track:
                out_bundles[x] = bundles.pop(x)
            continue

        pairs = (mu - 1) // 2
        # one copy, plus the single leftover copy when mu is even
        out[x] = mu - 2 * pairs
        doubled = 2 * x
        if track:
            copies = bundles.pop(x)
            out_bundles[x] = copies[: out[x]]
            rest = copies[out[x] :]
            merged = [rest[2 * i] + rest[2 * i + 1] for i in range(pairs)]
        if doubled > u:
            continue
        if doubled not in pending:
            pending[doubled] = 0
            heapq.heappush(heap, doubled)
            if track:
                bundles[doubled] = []
        pending[doubled] += pairs
        if track:
            bundles[doubled].extend(merged)

    T = MultisetInput.from_counts(out)
    LOGGER.debug("normalized %d elements into %d (u=%d)", S.n, T.n, u)
    return T, out_bundles


def normalize_multiset(S: MultisetInput, u: int) -> MultisetInput:
    if u < 1:
        raise ContractViolation("normalization needs u >= 1")
    check_bound(u)
    return _normalize(S, u, track=False)[0]


def split_into_two_sets(T: MultisetInput) -> tuple[list[int], list[int]]:
    P, Q = [], []
    for value, multiplicity in T.entries:
        if multiplicity > 2:
            raise ContractViolation(
                f"value {value} has multiplicity {multiplicity} > 2"
            )
        P.append(value)
        if multiplicity == 2:
            Q.append(value)
    return P, Q


def require_distinct(values: Iterable[int]) -> list[int]:
    values = list(values)
    if len(set(values)) != len(values):
        duplicates = sorted(v for v, c in Counter(values).items() if c > 1)
        raise ContractViolation(f"duplicate values in a set input: {duplicates}")
    for v in values:
        if v < 1:
            raise ContractViolation(f"values must be positive, got {v}")
    return values
