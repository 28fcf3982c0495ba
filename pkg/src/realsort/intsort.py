"""Non-comparison sorting of the integer keys produced by the converter."""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

__all__ = [
    "KeyRecord",
    "RadixStats",
    "PreconditionError",
    "ComparisonCountingInt",
    "radix_sort",
    "rank_compress",
    "DIGIT_BITS",
]

DIGIT_BITS = 16
# below this size the pure-Python counting passes beat numpy's setup cost
_NUMPY_MIN = 512


class PreconditionError(ValueError):
    pass


@dataclass(slots=True)
class KeyRecord:
    """Integer key of one distinct input value.

    ``input_index`` is the first position of the value in the input and
    ``indices`` lists every position holding an equal value, ascending.
    """

    key: int
    input_index: int
    multiplicity: int = 1
    indices: tuple[int, ...] = ()
    value: Fraction | None = field(default=None, compare=False)

    def __post_init__(self):
        if not self.indices:
            self.indices = (self.input_index,)


@dataclass
class RadixStats:
    passes: int = 0
    width_bits: int = 0
    backend: str = ""


class ComparisonCountingInt(int):
    """An ``int`` that counts every ordering or equality comparison made on it.

    Used to show that :func:`radix_sort` never compares keys.
    """

    comparisons = 0

    def _count(self):
        type(self).comparisons += 1

    def __lt__(self, other):
        self._count()
        return int.__lt__(self, other)

    def __le__(self, other):
        self._count()
        return int.__le__(self, other)

    def __gt__(self, other):
        self._count()
        return int.__gt__(self, other)

    def __ge__(self, other):
        self._count()
        return int.__ge__(self, other)

    def __eq__(self, other):
        self._count()
        return int.__eq__(self, other)

    def __ne__(self, other):
        self._count()
        return int.__ne__(self, other)

    __hash__ = int.__hash__


def _sort_python(blobs: list[bytes], nbytes: int) -> list[int]:
    # byte digits: 256 buckets keep the per-pass prefix sum cheap for small n
    n = len(blobs)
    order = list(range(n))
    for pos in range(nbytes - 1, -1, -1):
        digits = [blobs[i][pos] for i in order]
        counts = [0] * 256
        for d in digits:
            counts[d] += 1
        total = 0
        for d in range(256):
            c = counts[d]
            counts[d] = total
            total += c
        out = [0] * n
        for i, d in zip(order, digits):
            out[counts[d]] = i
            counts[d] += 1
        order = out
    return order


def _sort_numpy(blobs: list[bytes], passes: int) -> list[int]:
    n = len(blobs)
    digits = np.frombuffer(b"".join(blobs), dtype=">u2").reshape(n, passes)
    digits = digits.astype(np.uint16)
    order = np.arange(n)
    for col in range(passes - 1, -1, -1):
        # numpy's stable sort on uint16 is an LSD radix (counting) sort
        order = order[np.argsort(digits[order, col], kind="stable")]
    return order.tolist()


def radix_sort(
    records: Iterable[KeyRecord],
    *,
    backend: str = "auto",
    stats: RadixStats | None = None,
) -> list[KeyRecord]:
    """Stable LSD radix sort of records by ``key``.

    Keys are left-padded to the largest key's width.  The numpy backend makes
    ``ceil(width / 16)`` passes over 16-bit digits, the Python backend
    ``ceil(width / 8)`` passes over bytes.  Records with equal keys keep their input order.
    No two keys are ever compared.  ``backend`` is ``"python"``, ``"numpy"``
    or ``"auto"``.
    """
    recs = list(records)
    width = max((r.key.bit_length() for r in recs), default=0)
    if backend == "auto":
        backend = "numpy" if len(recs) >= _NUMPY_MIN else "python"
    if backend not in ("python", "numpy"):
        raise ValueError(f"unknown backend {backend!r}")
    passes = -(-width // (DIGIT_BITS if backend == "numpy" else 8))
    if stats is not None:
        stats.passes = passes
        stats.width_bits = width
        stats.backend = backend
    if passes == 0 or len(recs) < 2:
        return recs
    if backend == "python":
        blobs = [int.to_bytes(r.key, passes, "big") for r in recs]
        order = _sort_python(blobs, passes)
    else:
        blobs = [int.to_bytes(r.key, 2 * passes, "big") for r in recs]
        order = _sort_numpy(blobs, passes)
    return [recs[i] for i in order]


def rank_compress(records: Sequence[KeyRecord]) -> list[int]:
    """Map the i-th distinct key of key-sorted ``records`` to ``i``."""
    ranks = []
    rank = -1
    prev = None
    for r in records:
        if prev is None or r.key != prev:
            if prev is not None and r.key < prev:
                raise PreconditionError("records are not sorted by key")
            rank += 1
            prev = r.key
        ranks.append(rank)
    return ranks
