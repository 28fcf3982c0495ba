"""Conversion of reals in (0, 1) to order-preserving integer keys.

Inserted reals form a tree over the level tables.  A node is an occupied
position ``(i, floor(r * S[i]))``; leaves keep buckets of exact reals and
internal nodes only mark positions.  Not every level is populated on a real's
path.  For a node at stack index ``i`` the positions at the indices obtained
by repeatedly clearing the lowest set bit of ``i`` (its *ladder*) must be
occupied, which is enough for :meth:`Converter.find_match` to locate the
deepest occupied position with a binary descent over stack indices.

Each real lives in the leaf at the deepest occupied position on its path.
Leaves hold fewer than ``2t - 2`` distinct values; a leaf that reaches that
size is split by :meth:`Converter.branch_leaf`.  Levels accumulate at the top
of the stack and are collapsed by a base-``e`` cascade of merges.  After the
last insertion every level is merged into the largest one, each leaf is
sorted, and one final factor that separates all neighbours yields the keys.
"""

from __future__ import annotations

import logging
import time
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt
from operator import itemgetter

from .intsort import KeyRecord, radix_sort
from .levelspace import LevelStack
from .metrics import MetricsRecord
from .numeric import (
    DomainError,
    ScaleFactor,
    floor_shift,
    separating_exponent,
)

__all__ = [
    "DEFAULT_BIT_CAP",
    "CapacityError",
    "EmptyInputError",
    "InvariantViolation",
    "ConverterConfig",
    "Transform",
    "Resident",
    "TreeNode",
    "Match",
    "Converter",
    "Conversion",
    "preprocess",
    "convert",
    "sort_permutation",
    "ladder",
    "ladder_prefixes",
]

log = logging.getLogger(__name__)

DEFAULT_BIT_CAP = 1 << 20


class CapacityError(ValueError):
    """A level or final key would need more bits than the configured cap."""

    def __init__(self, message: str, pair: tuple = (), gap: Fraction | None = None):
        super().__init__(message)
        self.pair = pair
        self.gap = gap


class EmptyInputError(ValueError):
    pass


class InvariantViolation(AssertionError):
    pass


def _ceil_log2(n: int) -> int:
    return (n - 1).bit_length()


@dataclass(frozen=True)
class ConverterConfig:
    """Sizes derived from the input count ``n``.

    ``t`` is the integer stand-in for sqrt(log2 n), ``e = 2**t`` the batch
    base of the merge schedule, and ``tiers`` the number of base-``e`` digits
    needed to count to ``n``.
    """

    n: int
    t: int
    e: int
    leaf_capacity: int
    tiers: int
    bit_cap: int = DEFAULT_BIT_CAP

    @classmethod
    def for_n(cls, n: int, bit_cap: int = DEFAULT_BIT_CAP) -> "ConverterConfig":
        if n < 1:
            raise EmptyInputError("need at least one value")
        c = _ceil_log2(n)
        # smallest t with t*t >= log2(n); t >= 2 keeps the leaf capacity >= 2
        t = max(2, isqrt(c - 1) + 1 if c else 0)
        tiers = max(1, -(-c // t))
        return cls(n=n, t=t, e=1 << t, leaf_capacity=2 * t - 2, tiers=tiers, bit_cap=bit_cap)

    @property
    def max_levels(self) -> int:
        """Upper bound on ``top + 1``: ``1 + e * ceil(log n / log e)``."""
        return 1 + self.e * -(-_ceil_log2(self.n) // self.t)

    @property
    def median_rank(self) -> int:
        """0-based rank of the splitting median in a full leaf."""
        return self.leaf_capacity // 2 - 1


@dataclass(frozen=True)
class Transform:
    """Order-preserving map ``x -> (x - offset) / width`` into (0, 1)."""

    lo: Fraction
    hi: Fraction
    delta: Fraction

    @property
    def offset(self) -> Fraction:
        return self.lo - self.delta

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo + 2 * self.delta

    def apply(self, x: Fraction) -> Fraction:
        return (x - self.offset) / self.width

    def invert(self, y: Fraction) -> Fraction:
        return y * self.width + self.offset


def preprocess(values: Sequence[Fraction]) -> tuple[list[Fraction], Transform]:
    """Map ``values`` into (0, 1), preserving order and equality.

    Uses ``delta = max((hi - lo) / n, 1)`` of padding on both sides of the
    input range, so a constant input lands on 1/2.
    """
    if not values:
        raise EmptyInputError("need at least one value")
    lo = min(values)
    hi = max(values)
    delta = max((hi - lo) / len(values), Fraction(1))
    tr = Transform(Fraction(lo), Fraction(hi), delta)
    # (a/b - c/d) / (p/q) = (a*d - c*b) * q / (b * d * p), normalised once
    c, d = tr.offset.numerator, tr.offset.denominator
    p, q = tr.width.numerator, tr.width.denominator
    out = [
        Fraction((x.numerator * d - c * x.denominator) * q, x.denominator * d * p)
        for x in values
    ]
    return out, tr


def _value(res: "Resident") -> Fraction:
    return res.value


def _bucket_of(residents: Iterable["Resident"]) -> dict:
    return {(res.value.numerator, res.value.denominator): res for res in residents}


def ladder(i: int) -> list[int]:
    """Indices reached from ``i`` by clearing its lowest set bit, descending."""
    out = []
    while i:
        i &= i - 1
        out.append(i)
    return out


def ladder_prefixes(i: int) -> list[int]:
    """Nonzero binary prefixes of ``i`` in increasing order, ending with ``i``."""
    out = []
    acc = 0
    for b in range(i.bit_length() - 1, -1, -1):
        if i >> b & 1:
            acc |= 1 << b
            out.append(acc)
    return out


class Resident:
    """A distinct real with the input positions that hold it."""

    __slots__ = ("value", "indices")

    def __init__(self, value: Fraction, indices: list[int]):
        self.value = value
        self.indices = indices

    @property
    def multiplicity(self) -> int:
        return len(self.indices)

    def __repr__(self) -> str:
        return f"Resident({self.value}, x{len(self.indices)})"


class TreeNode:
    """Occupied position ``key`` at stack index ``level_index``.

    Leaves have a ``bucket``, an insertion-ordered dict from
    ``(numerator, denominator)`` to :class:`Resident` (hashing the int pair is
    far cheaper than hashing a Fraction);
    internal nodes have ``bucket is None``.  ``rep`` is a real known to key to
    this position.  ``leaf_mass`` of an internal node is the number of
    distinct reals below it when it became internal; masses only grow later.
    """

    __slots__ = ("level_index", "key", "bucket", "rep", "leaf_mass")

    def __init__(self, level_index: int, key: int, bucket: dict | None, rep: Fraction):
        self.level_index = level_index
        self.key = key
        self.bucket = bucket
        self.rep = rep
        self.leaf_mass = 0

    @property
    def is_leaf(self) -> bool:
        return self.bucket is not None

    def values(self) -> list[Fraction]:
        return [res.value for res in self.bucket.values()]

    @property
    def kind(self) -> str:
        return "leaf" if self.bucket is not None else "internal"

    def __repr__(self) -> str:
        body = self.values() if self.bucket is not None else f"mass={self.leaf_mass}"
        return f"TreeNode({self.kind}, i={self.level_index}, key={self.key}, {body})"


@dataclass(frozen=True)
class Match:
    """Result of :meth:`Converter.find_match`."""

    r0: Fraction | None
    level: ScaleFactor
    level_index: int
    node: TreeNode
    probes: int


class Converter:
    """Incremental structure turning reals in (0, 1) into integer keys.

    ``check`` selects runtime verification: 0 none, 1 checks every node an
    operation touches (plus the stack), 2 additionally cross-checks each
    match against a scan of all levels and re-validates the whole structure
    after every insertion and merge.
    """

    def __init__(
        self,
        config: ConverterConfig,
        *,
        check: int = 0,
        metrics: MetricsRecord | None = None,
        transform: Transform | None = None,
    ):
        self.config = config
        self.check = check
        self.metrics = metrics if metrics is not None else MetricsRecord(n=config.n)
        self.transform = transform
        self.stack = LevelStack(self.metrics)
        self.stack.tier_watermarks = [0] * max(0, config.tiers - 1)
        self.root = TreeNode(0, 0, {}, Fraction(1, 2))
        self.stack.tables[0].insert(0, self.root)
        self.inserted = 0
        self.merge_events: list[tuple[int, int]] = []
        # internal nodes created by ladder repair whose mass was below t
        self.light_repair_nodes = 0
        self.checks_run = 0
        self._touched: list[TreeNode] = []
        self._merge_ns = 0
        self._finished = False
        self.final_exponent: int | None = None

    # ---------------------------------------------------------------- match

    def find_match(self, r: Fraction) -> Match:
        """Descend over stack indices to the deepest occupied position of ``r``."""
        if not 0 < r < 1:
            raise DomainError(f"value {r} is not strictly inside (0, 1)")
        node, idx, probes = self._descend(r)
        if node.bucket:
            r0 = next(iter(node.bucket.values())).value
        elif node.bucket is None:
            r0 = node.rep
        else:
            r0 = None
        return Match(r0, self.stack.factor(idx), idx, node, probes)

    def _descend(self, r: Fraction, limit: int | None = None):
        exps = self.stack.exps
        tables = self.stack.tables
        top = len(exps) - 1 if limit is None else limit - 1
        m = self.metrics
        if top <= 0:
            m.probes += 1
            m.match_steps += 1
            return tables[0].entries[0], 0, 1
        num, den = r.numerator, r.denominator
        idx = 0
        node = self.root
        probes = 0
        i = top.bit_length() - 1
        while i >= 0:
            cand = idx + (1 << i)
            if cand <= top:
                probes += 1
                hit = tables[cand].entries.get((num << exps[cand]) // den)
                if hit is not None:
                    idx = cand
                    node = hit
            i -= 1
        m.probes += probes
        m.match_steps += top.bit_length()
        return node, idx, probes

    def brute_force_match(self, r: Fraction) -> int:
        """Deepest stack index whose table holds ``floor(r * S[i])``, by scanning."""
        exps = self.stack.exps
        for i in range(len(exps) - 1, -1, -1):
            if floor_shift(r, exps[i]) in self.stack.tables[i].entries:
                return i
        raise InvariantViolation("root position missing")

    # --------------------------------------------------------------- insert

    def insert_real(self, r: Fraction, index: int | None = None) -> None:
        """Insert one real of (0, 1); ``index`` is its input position."""
        if not 0 < r.numerator < r.denominator:
            raise DomainError(f"value {r} is not strictly inside (0, 1)")
        if index is None:
            index = self.inserted
        if self.check >= 2:
            expect = self.brute_force_match(r)
        node, j, probes = self._descend(r)
        self.inserted += 1
        if self.check:
            budget = max(1, self.stack.top.bit_length())
            if probes > budget:
                raise InvariantViolation(f"match used {probes} probes, budget {budget}")
            if self.check >= 2 and expect != j:
                raise InvariantViolation(f"descent found index {j}, scan found {expect}")
            self._touched = []
        bucket = node.bucket
        if bucket is not None:
            ident = (r.numerator, r.denominator)
            res = bucket.get(ident)
            if res is not None:
                res.indices.append(index)
            else:
                bucket[ident] = Resident(r, [index])
                if len(bucket) >= self.config.leaf_capacity:
                    self._branch(node)
                elif self.check:
                    self._touched.append(node)
        else:
            top = len(self.stack.exps) - 1
            if j >= top:
                raise InvariantViolation(f"internal node at top index {j}")
            c = j + 1
            key = floor_shift(r, self.stack.exps[c])
            leaf = TreeNode(c, key, {(r.numerator, r.denominator): Resident(r, [index])}, r)
            self.stack.tables[c].entries[key] = leaf
            self.metrics.ladder_writes += 1
            if self.check:
                self._touched.append(leaf)
        if self.check:
            self._check_touched()
            if self.check >= 2:
                self.check_structure()

    # --------------------------------------------------------------- branch

    def branch_leaf(self, leaf: TreeNode, r_new: Fraction, index: int | None = None) -> None:
        """Add ``r_new`` to a leaf holding ``2t - 3`` distinct values and split it."""
        if leaf.bucket is None:
            raise ValueError("branch_leaf needs a leaf")
        ident = (r_new.numerator, r_new.denominator)
        if len(leaf.bucket) != self.config.leaf_capacity - 1 or ident in leaf.bucket:
            raise ValueError(
                f"leaf holds {len(leaf.bucket)} distinct values; branching needs "
                f"{self.config.leaf_capacity - 1} plus one new value"
            )
        leaf.bucket[ident] = Resident(r_new, [self.inserted if index is None else index])
        self.inserted += 1
        self._touched = []
        self._branch(leaf)
        if self.check:
            self._check_touched()

    def _last_match_index(self, a: Fraction, b: Fraction, lo: int) -> int:
        """Largest stack index >= ``lo`` at which ``a`` and ``b`` share a key."""
        exps = self.stack.exps
        hi = len(exps) - 1
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if floor_shift(a, exps[mid]) == floor_shift(b, exps[mid]):
                lo = mid
            else:
                hi = mid - 1
        return lo

    def _capacity_error(self, a: Fraction, b: Fraction, exponent: int, what: str):
        tr = self.transform
        oa, ob = (tr.invert(a), tr.invert(b)) if tr else (a, b)
        gap = abs(ob - oa)
        return CapacityError(
            f"{what}: values {oa} and {ob} (gap {gap}) need 2**{exponent}, "
            f"above the bit cap of {self.config.bit_cap}",
            pair=(oa, ob),
            gap=gap,
        )

    def _branch(self, leaf: TreeNode) -> None:
        cfg = self.config
        t = cfg.t
        stack = self.stack
        exps = stack.exps
        tables = stack.tables
        residents = sorted(leaf.bucket.values(), key=_value)
        mr = cfg.median_rank
        m1, m2 = residents[mr].value, residents[mr + 1].value
        j = leaf.level_index
        jm = self._last_match_index(m1, m2, j)
        if jm == len(exps) - 1:
            s = separating_exponent(m1, m2)
            if s > cfg.bit_cap:
                raise self._capacity_error(m1, m2, s, "branch needs a new level")
            stack.push(s)
        cstar = jm + 1
        self.metrics.branch_count += 1
        leaf.bucket = None
        leaf.leaf_mass = len(residents)
        new_nodes = [leaf]
        remaining = residents
        for c in ladder_prefixes(cstar):
            if c <= j:
                continue
            ex = exps[c]
            entries = tables[c].entries
            k1 = floor_shift(m1, ex)
            stay = []
            run_key = None
            run: dict = {}
            for res in remaining:
                v = res.value
                k = floor_shift(v, ex)
                if k == k1:
                    stay.append(res)
                    continue
                if k != run_key:
                    if run:
                        new_nodes.append(self._new_leaf(c, run_key, run, entries))
                    run_key, run = k, {}
                run[v.numerator, v.denominator] = res
            if run:
                new_nodes.append(self._new_leaf(c, run_key, run, entries))
            if c == cstar or len(stay) < t:
                new_nodes.append(self._new_leaf(c, k1, _bucket_of(stay), entries))
                break
            spine = TreeNode(c, k1, None, m1)
            spine.leaf_mass = len(stay)
            entries[k1] = spine
            self.metrics.ladder_writes += 1
            new_nodes.append(spine)
            remaining = stay
        if self.check:
            for node in new_nodes:
                if node.bucket is not None and len(node.bucket) >= t:
                    raise InvariantViolation(f"branch left {len(node.bucket)} values in a leaf, t={t}")
                if node.bucket is None and node.leaf_mass < t:
                    raise InvariantViolation(f"branch left internal node with mass {node.leaf_mass}")
            self._touched.extend(new_nodes)

    def _new_leaf(self, c: int, key: int, bucket: dict, entries: dict) -> TreeNode:
        node = TreeNode(c, key, bucket, next(iter(bucket.values())).value)
        entries[key] = node
        self.metrics.ladder_writes += 1
        return node

    # ---------------------------------------------------------------- merge

    def merge_top_levels(self, l: int):
        """Collapse levels ``l..top`` into one level at index ``l``.

        Reals in leaves at those levels are re-keyed at the old top factor;
        each old leaf maps onto one or more new leaves.  Afterwards the ladder
        of index ``l`` is re-established for every new leaf.
        """
        t0 = time.perf_counter_ns()
        stack = self.stack
        residents = []
        for table in stack.tables[l:]:
            for node in table.entries.values():
                if node.bucket is not None:
                    for res in node.bucket.values():
                        residents.append((res.value, res, node))

        def make_leaf(key, members):
            src = members[0][2]
            for m in members:
                if m[2] is not src:
                    raise InvariantViolation("merge joined reals from two different leaves")
            return TreeNode(l, key, {(v.numerator, v.denominator): res for v, res, _ in members}, members[0][0])

        report = stack.merge_top(l, residents, make_leaf, value=itemgetter(0))
        steps = [i for i in reversed(ladder(l)) if i]
        new_leaves = list(report.groups.values())
        repaired = []
        if steps:
            for leaf in new_leaves:
                repaired.extend(self._repair_ladder(leaf, steps))
        if self.check:
            self._touched.extend(new_leaves)
            self._touched.extend(repaired)
        self._merge_ns += time.perf_counter_ns() - t0
        return report

    def _repair_ladder(self, leaf: TreeNode, steps: list[int]) -> list[TreeNode]:
        """Occupy the positions of ``leaf``'s ladder that a merge left vacant.

        If a shallower leaf on the same path holds reals that also key to a new
        position, those reals move into it so that every real still lives at
        the deepest occupied position of its path.
        """
        exps = self.stack.exps
        tables = self.stack.tables
        rep = leaf.rep
        m = self.metrics
        created = []
        for i in steps:
            key = floor_shift(rep, exps[i])
            entries = tables[i].entries
            m.probes += 1
            if key in entries:
                continue
            below, _, _ = self._descend(rep, limit=i)
            moved = None
            if below.bucket is not None:
                ex = exps[i]
                moved = {
                    ident: res for ident, res in below.bucket.items()
                    if floor_shift(res.value, ex) == key
                }
            if moved:
                for ident in moved:
                    del below.bucket[ident]
                node = TreeNode(i, key, moved, next(iter(moved.values())).value)
                if not below.bucket:
                    below.bucket = None
                    below.leaf_mass = len(moved) + len(leaf.bucket)
                    created.append(below)
            else:
                node = TreeNode(i, key, None, rep)
                node.leaf_mass = len(leaf.bucket)
                if node.leaf_mass < self.config.t:
                    self.light_repair_nodes += 1
                    log.debug("merge repair made internal node %s lighter than t=%d", node, self.config.t)
            entries[key] = node
            m.ladder_writes += 1
            created.append(node)
        return created

    def run_merge_schedule(self, inserted_count: int) -> None:
        """Fire the tier merges due after ``inserted_count`` insertions.

        Tier ``j`` fires every ``e**j`` insertions for ``j < tiers`` and folds
        all levels above its watermark into one new tier-``j`` level; lower
        tiers fire first.  The last tier is the final merge done by
        :meth:`final_merge`.
        """
        e = self.config.e
        period = e
        j = 1
        while j < self.config.tiers and inserted_count % period == 0:
            self._fire_tier(j, inserted_count)
            j += 1
            period *= e

    def _fire_tier(self, j: int, k: int) -> None:
        w = self.stack.tier_watermarks
        mark = w[j - 1]
        self.merge_events.append((k, j))
        if self.stack.top > mark:
            self.merge_top_levels(mark + 1)
            mark += 1
        for jj in range(j):
            w[jj] = mark
        self._after_merge()

    def final_merge(self) -> None:
        """Merge every level above the root into the largest level."""
        self.merge_events.append((self.inserted, self.config.tiers))
        if self.stack.top >= 1:
            self.merge_top_levels(1)
        self.stack.tier_watermarks = [min(w, self.stack.top) for w in self.stack.tier_watermarks]
        self._finished = True
        if self.light_repair_nodes:
            log.info("%d internal nodes created by merge repair started below leaf mass t=%d",
                     self.light_repair_nodes, self.config.t)
        self._after_merge()

    def _after_merge(self) -> None:
        if self.check:
            self._check_touched()
            if self.check >= 2:
                self.check_structure()

    # ------------------------------------------------------------- finalize

    def leaves(self) -> Iterable[TreeNode]:
        for table in self.stack.tables:
            for node in table.entries.values():
                if node.bucket is not None:
                    yield node

    def nodes(self) -> Iterable[TreeNode]:
        for table in self.stack.tables:
            yield from table.entries.values()

    def finalize_keys(self) -> list[KeyRecord]:
        """Keys for every distinct real, ordered by first input position.

        Each leaf is sorted; the final factor is the largest of the top level
        and the separating levels of all neighbouring values inside leaves.
        """
        if not self._finished:
            raise RuntimeError("finalize_keys needs final_merge first")
        t0 = time.perf_counter_ns()
        best = self.stack.exps[-1]
        worst_pair = None
        leaves = list(self.leaves())
        for leaf in leaves:
            vals = sorted(leaf.values())
            for a, b in zip(vals, vals[1:]):
                s = separating_exponent(a, b)
                if s > best:
                    best = s
                    worst_pair = (a, b)
        if best > self.config.bit_cap:
            raise self._capacity_error(*worst_pair, best, "final keys")
        records = []
        for leaf in leaves:
            for res in leaf.bucket.values():
                v = res.value
                records.append(
                    KeyRecord(
                        key=floor_shift(v, best),
                        input_index=res.indices[0],
                        multiplicity=len(res.indices),
                        indices=tuple(res.indices),
                        value=v,
                    )
                )
        records.sort(key=lambda rec: rec.input_index)
        self.final_exponent = best
        self.metrics.max_key_bits = best + 1
        self.metrics.finalize_ns += time.perf_counter_ns() - t0
        return records

    # --------------------------------------------------------------- checks

    def _check_node(self, node: TreeNode) -> None:
        exps = self.stack.exps
        tables = self.stack.tables
        i = node.level_index
        if i >= len(exps) or tables[i].entries.get(node.key) is not node:
            return  # discarded by a later merge
        reals = node.values() if node.bucket is not None else [node.rep]
        for r in reals:
            if floor_shift(r, exps[i]) != node.key:
                raise InvariantViolation(f"{r} does not key to {node}")
        r = reals[0] if reals else node.rep
        for a in ladder(i):
            if floor_shift(r, exps[a]) not in tables[a].entries:
                raise InvariantViolation(f"ladder position at index {a} missing for {node}")
        if node.bucket is not None and len(node.bucket) >= self.config.leaf_capacity:
            raise InvariantViolation(f"leaf over capacity: {node}")

    def _check_stack(self) -> None:
        exps = self.stack.exps
        if exps[0] != 0:
            raise InvariantViolation("bottom level is not 2**0")
        for a, b in zip(exps, exps[1:]):
            if a >= b:
                raise InvariantViolation("levels not strictly increasing")
        if len(exps) > self.config.max_levels:
            raise InvariantViolation(
                f"{len(exps)} levels exceed the bound {self.config.max_levels}"
            )

    def _check_touched(self) -> None:
        for node in self._touched:
            self._check_node(node)
        self._touched = []
        self._check_stack()
        self.checks_run += 1

    def check_structure(self) -> dict:
        """Validate the whole structure; returns soft findings.

        Hard invariants (ladders, leaf capacity, stack order and bound, every
        real living at the deepest occupied position of its path) raise
        :class:`InvariantViolation`.  Internal nodes lighter than ``t`` are
        counted, not raised.
        """
        self._check_stack()
        self.stack.check()
        exps = self.stack.exps
        count = 0
        where: dict[Fraction, TreeNode] = {}
        for i, table in enumerate(self.stack.tables):
            for key, node in table.entries.items():
                if node.level_index != i or node.key != key:
                    raise InvariantViolation(f"{node} filed under index {i}, key {key}")
                self._check_node(node)
                if node.bucket is not None:
                    for res in node.bucket.values():
                        v = res.value
                        if v in where:
                            raise InvariantViolation(f"{v} stored in two leaves")
                        where[v] = node
                        count += len(res.indices)
        if count != self.inserted:
            raise InvariantViolation(f"{count} reals stored, {self.inserted} inserted")
        for v, node in where.items():
            deepest = self.brute_force_match(v)
            if deepest != node.level_index:
                raise InvariantViolation(f"{v} lives at index {node.level_index}, deepest {deepest}")
        light = 0
        for node in self.nodes():
            if node.bucket is None and node is not self.root:
                i, k = node.level_index, node.key
                mass = sum(
                    1 for v, leaf in where.items()
                    if leaf.level_index > i and floor_shift(v, exps[i]) == k
                )
                if mass == 0:
                    raise InvariantViolation(f"internal node without reals: {node}")
                if mass < self.config.t:
                    light += 1
        self.checks_run += 1
        return {"light_internal_nodes": light}

    def leaf_mass(self, node: TreeNode) -> int:
        """Exact number of distinct reals in deeper leaves keyed to ``node``."""
        i, k = node.level_index, node.key
        ex = self.stack.exps[i]
        return sum(
            1 for leaf in self.leaves() if leaf.level_index > i
            for v in leaf.values() if floor_shift(v, ex) == k
        )


@dataclass
class Conversion:
    """Keys plus bookkeeping from one :func:`convert` run."""

    records: list[KeyRecord]
    metrics: MetricsRecord
    transform: Transform
    config: ConverterConfig
    converter: Converter = field(repr=False)

    @property
    def distinct(self) -> int:
        return len(self.records)


def convert(
    values: Sequence[Fraction],
    *,
    bit_cap: int = DEFAULT_BIT_CAP,
    check: int = 0,
) -> Conversion:
    """Convert arbitrary rationals to order-isomorphic integer keys."""
    t0 = time.perf_counter_ns()
    units, tr = preprocess(values)
    cfg = ConverterConfig.for_n(len(units), bit_cap)
    conv = Converter(cfg, check=check, transform=tr)
    insert = conv.insert_real
    schedule = conv.run_merge_schedule
    for i, r in enumerate(units):
        insert(r, i)
        schedule(i + 1)
    conv.final_merge()
    m = conv.metrics
    m.merge_ns = conv._merge_ns
    m.insert_ns = time.perf_counter_ns() - t0 - m.merge_ns
    records = conv.finalize_keys()
    return Conversion(records, m, tr, cfg, conv)


def sort_permutation(
    values: Sequence[Fraction],
    *,
    bit_cap: int = DEFAULT_BIT_CAP,
    check: int = 0,
) -> tuple[list[int], Conversion]:
    """Input positions in ascending value order, stable among equal values."""
    conv = convert(values, bit_cap=bit_cap, check=check)
    t0 = time.perf_counter_ns()
    ordered = radix_sort(conv.records)
    perm = [i for rec in ordered for i in rec.indices]
    conv.metrics.sort_ns = time.perf_counter_ns() - t0
    return perm, conv
