"""The stack of scale levels and the sparse table kept for each level.

A level is a power-of-two factor ``f``; at that level a real ``r`` in (0, 1)
is represented by the integer ``floor(r * f)``.  The stack holds the levels in
strictly increasing order with ``2**0`` at the bottom, and each level owns a
sparse table from those integers to tree nodes.  Factors grow far beyond any
array size, so the tables are dicts keyed by Python ints.
"""

from __future__ import annotations

from bisect import bisect_left
from collections.abc import Callable, Iterable
from dataclasses import dataclass, field
from typing import Any

from .metrics import MetricsRecord
from .numeric import DomainError, ScaleFactor, floor_shift

__all__ = [
    "LevelTable",
    "LevelStack",
    "MergedLevel",
    "MonotonicityError",
    "LevelNotFound",
    "push_level",
    "level_index",
    "table_probe",
    "merge_top_levels",
]


class MonotonicityError(ValueError):
    """A pushed level is not larger than the current top level."""


class LevelNotFound(KeyError):
    """A factor that is not on the stack was looked up."""


class LevelTable:
    """Sparse map from ``floor(r * factor)`` to the node occupying it."""

    __slots__ = ("log2", "entries", "_metrics")

    def __init__(self, log2: int, metrics: MetricsRecord | None = None):
        self.log2 = log2
        self.entries: dict[int, Any] = {}
        self._metrics = metrics if metrics is not None else MetricsRecord()

    @property
    def factor(self) -> ScaleFactor:
        return ScaleFactor(self.log2)

    @property
    def occupancy(self) -> int:
        return len(self.entries)

    def _check_key(self, key: int) -> None:
        if key < 0 or key >> self.log2:
            raise DomainError(f"key {key} outside [0, 2**{self.log2})")

    def probe(self, key: int):
        """Return the node at ``key`` or ``None`` when the position is vacant."""
        if key < 0 or key >> self.log2:
            raise DomainError(f"key {key} outside [0, 2**{self.log2})")
        self._metrics.probes += 1
        return self.entries.get(key)

    def insert(self, key: int, node) -> None:
        self._check_key(key)
        if key in self.entries:
            raise KeyError(f"position {key} at level 2**{self.log2} is already occupied")
        self.entries[key] = node

    def remove(self, key: int) -> None:
        del self.entries[key]

    def __contains__(self, key: int) -> bool:
        return key in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def __repr__(self) -> str:
        return f"LevelTable(2**{self.log2}, occupancy={len(self.entries)})"


@dataclass
class MergedLevel:
    """What a merge of the topmost levels did."""

    index: int
    factor: ScaleFactor
    merged_indices: range
    rekeyed: int
    discarded_occupancy: int
    groups: dict[int, Any] = field(default_factory=dict)


class LevelStack:
    """Strictly increasing stack of levels, ``levels[0] == 2**0``.

    ``exps[i]`` is the exponent of level ``i`` and ``tables[i]`` its table.
    ``tier_watermarks[j]`` is the stack index of the newest level produced by
    a tier-``j + 1`` merge; the merge schedule owns those values.
    """

    def __init__(self, metrics: MetricsRecord | None = None):
        self.metrics = metrics if metrics is not None else MetricsRecord()
        self.exps: list[int] = [0]
        self.tables: list[LevelTable] = [LevelTable(0, self.metrics)]
        self.tier_watermarks: list[int] = []

    @property
    def top(self) -> int:
        return len(self.exps) - 1

    @property
    def levels(self) -> list[ScaleFactor]:
        return [ScaleFactor(e) for e in self.exps]

    def __len__(self) -> int:
        return len(self.exps)

    def factor(self, i: int) -> ScaleFactor:
        return ScaleFactor(self.exps[i])

    def table(self, i: int) -> LevelTable:
        return self.tables[i]

    def key(self, r, i: int) -> int:
        return floor_shift(r, self.exps[i])

    def push(self, log2: int) -> int:
        if log2 <= self.exps[-1]:
            raise MonotonicityError(
                f"level 2**{log2} does not exceed top level 2**{self.exps[-1]}"
            )
        self.exps.append(log2)
        self.tables.append(LevelTable(log2, self.metrics))
        m = self.metrics
        m.levels_pushed += 1
        if self.top > m.max_top:
            m.max_top = self.top
        return self.top

    def index_of(self, log2: int) -> int:
        i = bisect_left(self.exps, log2)
        if i == len(self.exps) or self.exps[i] != log2:
            raise LevelNotFound(f"level 2**{log2} is not on the stack")
        return i

    def merge_top(
        self,
        l: int,
        residents: Iterable[Any],
        make_node: Callable[[int, list], Any] | None = None,
        value: Callable[[Any], Any] | None = None,
    ) -> MergedLevel:
        """Collapse levels ``l..top`` into one level with the old top factor.

        Each resident is re-keyed at the old top factor and grouped by key.
        ``value`` extracts the real from a resident (identity by default);
        ``make_node(key, members)`` builds the node stored in the fresh table
        (by default the member list itself).  Tables ``l..top`` are dropped.
        """
        top = self.top
        if l <= 0:
            raise DomainError("cannot merge away the root level")
        if l > top:
            raise IndexError(f"merge start {l} above top {top}")
        log2 = self.exps[top]
        discarded = sum(len(t) for t in self.tables[l:])
        groups: dict[int, list] = {}
        count = 0
        for item in residents:
            r = item if value is None else value(item)
            groups.setdefault(floor_shift(r, log2), []).append(item)
            count += 1
        del self.exps[l:]
        del self.tables[l:]
        table = LevelTable(log2, self.metrics)
        self.exps.append(log2)
        self.tables.append(table)
        nodes = {}
        for key, members in groups.items():
            node = members if make_node is None else make_node(key, members)
            table.insert(key, node)
            nodes[key] = node
        self.metrics.merge_rekeys += count
        return MergedLevel(
            index=l,
            factor=ScaleFactor(log2),
            merged_indices=range(l, top + 1),
            rekeyed=count,
            discarded_occupancy=discarded,
            groups=nodes,
        )

    def check(self) -> None:
        """Raise AssertionError unless the stack invariants hold."""
        assert self.exps[0] == 0, "bottom level must be 2**0"
        for a, b in zip(self.exps, self.exps[1:]):
            assert a < b, f"levels not strictly increasing: 2**{a}, 2**{b}"
        assert len(self.tables) == len(self.exps)
        for e, t in zip(self.exps, self.tables):
            assert t.log2 == e
            for k in t.entries:
                assert 0 <= k < (1 << e), f"key {k} outside level 2**{e}"

    def __repr__(self) -> str:
        return "LevelStack([" + ", ".join(f"2**{e}" for e in self.exps) + "])"


def push_level(s: LevelStack, f: ScaleFactor) -> None:
    s.push(f.log2)


def level_index(s: LevelStack, f: ScaleFactor) -> int:
    return s.index_of(f.log2)


def table_probe(t: LevelTable, key: int):
    return t.probe(key)


def merge_top_levels(s: LevelStack, l: int, residents: Iterable) -> MergedLevel:
    """Merge levels ``l..top`` of ``s``; ``residents`` are the reals living there."""
    return s.merge_top(l, set(residents))
