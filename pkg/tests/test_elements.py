import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from matroidbasis import ElementSet

ids = st.sets(st.integers(min_value=0, max_value=200), max_size=40)


@given(ids, ids)
@settings(max_examples=100, deadline=None)
def test_set_ops_match_python_sets(a, b):
    ea, eb = ElementSet.from_indices(a), ElementSet.from_indices(b)
    assert set(ea | eb) == a | b
    assert set(ea & eb) == a & b
    assert set(ea - eb) == a - b
    assert len(ea) == len(a)
    assert ea.issubset(eb) == a.issubset(b)
    assert ea.isdisjoint(eb) == a.isdisjoint(b)


@given(ids)
@settings(max_examples=50, deadline=None)
def test_roundtrip_indices(a):
    es = ElementSet.from_indices(a)
    assert set(es.indices().tolist()) == a
    assert ElementSet.from_array(es.indices()) == es


def test_iteration_is_ascending_and_deterministic():
    es = ElementSet.from_indices([9, 1, 5, 30])
    assert list(es) == [1, 5, 9, 30]
    assert list(es) == list(es)


def test_membership_add_remove():
    es = ElementSet.from_indices([2, 4])
    assert 2 in es and 3 not in es
    assert 3 in es.add(3)
    assert 2 not in es.remove(2)
    assert es == ElementSet.from_indices([4, 2])
    assert hash(es) == hash(ElementSet.from_indices([2, 4]))


def test_lowest():
    es = ElementSet.from_indices([7, 3, 11, 2])
    assert list(es.lowest(2)) == [2, 3]
    assert list(es.lowest(10)) == [2, 3, 7, 11]
    assert list(es.lowest(0)) == []


def test_full_and_empty():
    assert list(ElementSet.full(4)) == [0, 1, 2, 3]
    assert not ElementSet(0)
    assert len(ElementSet.from_array(np.array([], dtype=np.int32))) == 0
