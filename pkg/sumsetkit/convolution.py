"""Exact sumset combination: boolean 1-D, 2-D and cyclic, and counting.

Boolean products go through a number-theoretic transform over the prime
``15 * 2**27 + 1``. Every true coefficient of a 0/1 product is at most the
shorter operand length, which stays below the prime, so ``coefficient != 0``
is an exact membership test.

Counting products use Kronecker substitution: coefficients are packed into
one big integer per operand, multiplied once, and unpacked.
"""

import functools
import logging
from dataclasses import dataclass
from typing import Iterable, Optional

import gmpy2
import numba
import numpy as np

from sumsetkit.core import CardSumSet, Mode, SumSet, _frozen
from sumsetkit.errors import ContractViolation

LOGGER = logging.getLogger(__name__)

PRIME = 15 * (1 << 27) + 1
ROOT = 31
MAX_LOG2 = 27
DIRECT_CUTOFF = 64

_P = np.uint64(PRIME)


@dataclass(frozen=True)
class CountVector:
    """Counts indexed ``0..bound``; exact when ``modulus`` is None."""

    bound: int
    counts: tuple[int, ...]
    modulus: Optional[int] = None

    def __post_init__(self):
        if len(self.counts) != self.bound + 1:
            raise ContractViolation(
                f"{len(self.counts)} counts do not match bound {self.bound}"
            )
        if any(c < 0 for c in self.counts):
            raise ContractViolation("counts must be non-negative")
        if self.modulus is not None and self.modulus < 2:
            raise ContractViolation("counting modulus must be >= 2")

    @classmethod
    def indicator(
        cls, members: Iterable[int], bound: int, modulus: Optional[int] = None
    ) -> "CountVector":
        counts = [0] * (bound + 1)
        for x in members:
            if x <= bound:
                counts[x] = 1
        return cls(bound, tuple(counts), modulus)

    @classmethod
    def delta(cls, bound: int, modulus: Optional[int] = None) -> "CountVector":
        return cls.indicator([0], bound, modulus)

    @property
    def exact(self) -> bool:
        return self.modulus is None

    def __getitem__(self, x: int) -> int:
        return self.counts[x]

    def support(self) -> list[int]:
        return [x for x, c in enumerate(self.counts) if c]

    def to_sumset(self) -> SumSet:
        return SumSet.from_members(self.support(), self.bound)


@functools.lru_cache(maxsize=None)
def _stage_roots(log2: int, inverse: bool) -> np.ndarray:
    """Entry s is a primitive ``2^(s+1)``-th root of unity modulo PRIME."""
    roots = np.empty(max(log2, 1), dtype=np.uint64)
    for s in range(log2):
        w = pow(ROOT, (PRIME - 1) >> (s + 1), PRIME)
        roots[s] = pow(w, PRIME - 2, PRIME) if inverse else w
    return roots


@numba.njit(cache=True, nogil=True)
def _dif(a, roots, p):
    # natural order in, bit-reversed order out
    n = a.shape[0]
    s = roots.shape[0] - 1
    half = n >> 1
    twiddle = np.empty(max(half, 1), dtype=np.uint64)
    while half >= 1:
        w = roots[s]
        twiddle[0] = 1
        for j in range(1, half):
            twiddle[j] = twiddle[j - 1] * w % p
        for k in range(n >> 1):
            j = k & (half - 1)
            i = ((k >> s) << (s + 1)) | j
            x = np.uint64(a[i])
            y = np.uint64(a[i + half])
            total = x + y
            if total >= p:
                total -= p
            a[i] = total
            a[i + half] = (x + p - y) * twiddle[j] % p
        half >>= 1
        s -= 1


@numba.njit(cache=True, nogil=True)
def _dit(a, roots, p, n_inverse):
    # bit-reversed order in, natural order out
    n = a.shape[0]
    s = 0
    half = 1
    twiddle = np.empty(max(n >> 1, 1), dtype=np.uint64)
    while half < n:
        w = roots[s]
        twiddle[0] = 1
        for j in range(1, half):
            twiddle[j] = twiddle[j - 1] * w % p
        for k in range(n >> 1):
            j = k & (half - 1)
            i = ((k >> s) << (s + 1)) | j
            x = np.uint64(a[i])
            y = np.uint64(a[i + half]) * twiddle[j] % p
            total = x + y
            if total >= p:
                total -= p
            a[i] = total
            a[i + half] = (x + p - y) % p
        half <<= 1
        s += 1
    for i in range(n):
        a[i] = np.uint64(a[i]) * n_inverse % p


@numba.njit(cache=True, nogil=True)
def _pointwise(a, b, p):
    for i in range(a.shape[0]):
        a[i] = np.uint64(a[i]) * np.uint64(b[i]) % p


def _forward(values: np.ndarray) -> np.ndarray:
    """Transform of a power-of-two length vector, in bit-reversed order."""
    a = np.array(values, dtype=np.uint32)
    _dif(a, _stage_roots(len(a).bit_length() - 1, False), _P)
    return a


def _inverse(values: np.ndarray) -> np.ndarray:
    a = np.array(values, dtype=np.uint32)
    n_inverse = np.uint64(pow(len(a), PRIME - 2, PRIME))
    _dit(a, _stage_roots(len(a).bit_length() - 1, True), _P, n_inverse)
    return a


def _multiply(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Product coefficients of two 0/1 vectors, reduced modulo PRIME."""
    length = len(a) + len(b) - 1
    if min(len(a), len(b)) <= DIRECT_CUTOFF:
        return np.convolve(a.astype(np.int64), b.astype(np.int64))
    size = 1 << (length - 1).bit_length()
    if size > 1 << MAX_LOG2:
        raise ContractViolation(
            f"transform of length {size} exceeds 2^{MAX_LOG2}; shrink the bound"
        )
    log2 = size.bit_length() - 1
    fa = np.zeros(size, dtype=np.uint32)
    fb = np.zeros(size, dtype=np.uint32)
    fa[: len(a)] = a
    fb[: len(b)] = b
    _dif(fa, _stage_roots(log2, False), _P)
    _dif(fb, _stage_roots(log2, False), _P)
    _pointwise(fa, fb, _P)
    del fb
    _dit(fa, _stage_roots(log2, True), _P, np.uint64(pow(size, PRIME - 2, PRIME)))
    return fa[:length]


def _trimmed(bits: np.ndarray) -> np.ndarray:
    last = np.flatnonzero(bits)
    return bits[: last[-1] + 1] if len(last) else bits[:1]


def _trimmed_2d(grid: np.ndarray) -> np.ndarray:
    rows = np.flatnonzero(grid.any(axis=1))
    cols = np.flatnonzero(grid.any(axis=0))
    if not len(rows):
        return grid[:1, :1]
    return grid[: rows[-1] + 1, : cols[-1] + 1]


def bool_conv(A: SumSet, B: SumSet, cap: int) -> SumSet:
    if A.mode is not Mode.CAPPED or B.mode is not Mode.CAPPED:
        raise ContractViolation("bool_conv needs integer-capped operands")
    if cap < 0:
        raise ContractViolation("cap must be non-negative")
    a = _trimmed(A.bits[: cap + 1])
    b = _trimmed(B.bits[: cap + 1])
    product = _multiply(a, b)[: cap + 1] != 0
    bits = np.zeros(cap + 1, dtype=bool)
    bits[: len(product)] = product
    return SumSet(cap, Mode.CAPPED, _frozen(bits))


def bool_conv_2d(
    A: CardSumSet, B: CardSumSet, cap_sum: int, cap_card: int
) -> CardSumSet:
    """Pairwise sums of two (sum, cardinality) grids, truncated to the caps.

    Rows (one per cardinality) are laid out back to back with a stride wider
    than any row sum, so one 1-D product realizes the 2-D one.
    """
    ga = _trimmed_2d(A.grid[: cap_sum + 1, : cap_card + 1])
    gb = _trimmed_2d(B.grid[: cap_sum + 1, : cap_card + 1])
    (sa, ja), (sb, jb) = ga.shape, gb.shape
    stride = sa + sb - 1

    fa = np.zeros((ja, stride), dtype=bool)
    fb = np.zeros((jb, stride), dtype=bool)
    fa[:, :sa] = ga.T
    fb[:, :sb] = gb.T
    product = _multiply(fa.reshape(-1), fb.reshape(-1))[: (ja + jb - 1) * stride]
    rows = (product != 0).reshape(ja + jb - 1, stride)

    grid = np.zeros((cap_sum + 1, cap_card + 1), dtype=bool)
    keep_s = min(cap_sum + 1, stride)
    keep_j = min(cap_card + 1, ja + jb - 1)
    grid[:keep_s, :keep_j] = rows[:keep_j, :keep_s].T
    return CardSumSet(cap_card, cap_sum, _frozen(grid))


def cyclic_bool_conv(A: SumSet, B: SumSet, m: int) -> SumSet:
    if m < 1:
        raise ContractViolation("modulus must be >= 1")
    for operand in (A, B):
        if operand.mode is not Mode.CYCLIC or operand.bound != m - 1:
            raise ContractViolation(f"operands must be cyclic sumsets of Z_{m}")
    product = _multiply(_trimmed(A.bits), _trimmed(B.bits)) != 0
    bits = np.zeros(m, dtype=bool)
    head = min(m, len(product))
    bits[:head] = product[:head]
    if len(product) > m:
        bits[: len(product) - m] |= product[m:]
    return SumSet(m - 1, Mode.CYCLIC, _frozen(bits))


def _kronecker(f: list[int], g: list[int]) -> list[int]:
    largest = max(f) * max(g) * min(len(f), len(g))
    if largest == 0:
        return [0] * (len(f) + len(g) - 1)
    slot = (largest.bit_length() + 8) // 8
    packed_f = int.from_bytes(b"".join(c.to_bytes(slot, "little") for c in f), "little")
    packed_g = int.from_bytes(b"".join(c.to_bytes(slot, "little") for c in g), "little")
    product = int(gmpy2.mpz(packed_f) * gmpy2.mpz(packed_g))
    raw = product.to_bytes(slot * (len(f) + len(g)), "little")
    return [
        int.from_bytes(raw[i * slot : (i + 1) * slot], "little")
        for i in range(len(f) + len(g) - 1)
    ]


def _schoolbook(f: list[int], g: list[int]) -> list[int]:
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] += a * b
    return out


def count_conv(f: CountVector, g: CountVector, cap: int) -> CountVector:
    """``result(x) = sum_t f(t) * g(x - t)`` for ``x <= cap``.

    This is the standard convolution; the product formula printed as
    ``f(x) g(x - t)`` in some write-ups is read as this one.
    """
    if f.modulus != g.modulus:
        raise ContractViolation(
            f"counting modes differ: modulus {f.modulus} vs {g.modulus}"
        )
    if cap < 0:
        raise ContractViolation("cap must be non-negative")
    a = list(f.counts[: cap + 1])
    b = list(g.counts[: cap + 1])
    if min(len(a), len(b)) <= DIRECT_CUTOFF:
        product = _schoolbook(a, b)
    else:
        product = _kronecker(a, b)
    product = product[: cap + 1] + [0] * max(0, cap + 1 - len(product))
    if not f.exact:
        product = [c % f.modulus for c in product]
    return CountVector(cap, tuple(product), f.modulus)
