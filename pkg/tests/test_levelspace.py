from fractions import Fraction as F

import pytest

from realsort.levelspace import (
    LevelNotFound,
    LevelStack,
    LevelTable,
    MonotonicityError,
    level_index,
    merge_top_levels,
    push_level,
    table_probe,
)
from realsort.metrics import MetricsRecord
from realsort.numeric import DomainError, ScaleFactor


def test_push_onto_root():
    s = LevelStack()
    push_level(s, ScaleFactor(5))
    assert [f.value for f in s.levels] == [1, 32]
    assert s.top == 1


def test_push_sequence_gives_six_levels():
    s = LevelStack()
    for e in (5, 10, 50, 100, 300):
        push_level(s, ScaleFactor(e))
    assert len(s) == 6
    assert s.exps == [0, 5, 10, 50, 100, 300]
    assert s.metrics.levels_pushed == 5
    assert s.metrics.max_top == 5


@pytest.mark.parametrize("e", [3, 5])
def test_push_requires_strict_increase(e):
    s = LevelStack()
    s.push(5)
    with pytest.raises(MonotonicityError):
        s.push(e)
    assert s.exps == [0, 5]


def test_level_index():
    s = LevelStack()
    s.push(5)
    s.push(10)
    assert level_index(s, ScaleFactor(5)) == 1
    assert level_index(LevelStack(), ScaleFactor(0)) == 0
    t = LevelStack()
    t.push(5)
    with pytest.raises(LevelNotFound):
        level_index(t, ScaleFactor(6))


def test_table_probe():
    t = LevelTable(3)
    assert table_probe(t, 5) is None
    t.insert(5, "node")
    assert table_probe(t, 5) == "node"
    with pytest.raises(DomainError):
        table_probe(t, 8)
    with pytest.raises(DomainError):
        table_probe(t, -1)


def test_probe_counts():
    m = MetricsRecord()
    t = LevelTable(4, m)
    t.probe(1)
    t.probe(2)
    assert m.probes == 2


def test_table_insert_collision():
    t = LevelTable(2)
    t.insert(1, "a")
    with pytest.raises(KeyError):
        t.insert(1, "b")
    with pytest.raises(DomainError):
        t.insert(4, "c")
    assert t.occupancy == 1


def test_merge_third_into_sixteen():
    s = LevelStack()
    s.push(2)
    s.push(4)
    r = F(1, 3)
    s.table(1).insert(s.key(r, 1), [r])
    s.table(2).insert(s.key(r, 2), [r])
    rep = merge_top_levels(s, 1, [r])
    assert s.exps == [0, 4]
    assert list(s.table(1).entries) == [5]
    assert rep.rekeyed == 1
    assert rep.discarded_occupancy == 2
    assert rep.merged_indices == range(1, 3)


def test_merge_at_top_keeps_shape():
    s = LevelStack()
    s.push(3)
    s.push(6)
    rs = [F(1, 5), F(2, 5), F(3, 5)]
    for r in rs:
        s.table(2).entries.setdefault(s.key(r, 2), []).append(r)
    before = {k: sorted(v) for k, v in s.table(2).entries.items()}
    merge_top_levels(s, 2, rs)
    assert s.exps == [0, 3, 6]
    assert {k: sorted(v) for k, v in s.table(2).entries.items()} == before


def test_merge_root_rejected():
    s = LevelStack()
    s.push(3)
    with pytest.raises(DomainError):
        merge_top_levels(s, 0, [])
    with pytest.raises(IndexError):
        merge_top_levels(s, 2, [])


def test_merge_preserves_equal_keys():
    s = LevelStack()
    for e in (2, 5, 9):
        s.push(e)
    rs = [F(k, 97) for k in range(1, 97)]
    before = {r: s.key(r, 3) for r in rs}
    rep = s.merge_top(1, rs)
    for key, members in rep.groups.items():
        assert {before[r] for r in members} == {key}
    assert set(s.table(1).entries) == {r.numerator * 512 // 97 for r in rs}
    s.check()


def test_check_catches_bad_order():
    s = LevelStack()
    s.push(4)
    s.exps.append(2)
    s.tables.append(LevelTable(2))
    with pytest.raises(AssertionError):
        s.check()
