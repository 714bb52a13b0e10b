import itertools

import pytest

from smadl.model import TaxonomyClass, class_join, class_leq, class_meet

ALL = list(TaxonomyClass)
ISOLATED = TaxonomyClass.ISOLATED
CONSUMER = TaxonomyClass.CONSUMER
PROVIDER = TaxonomyClass.PROVIDER
PROSUMER = TaxonomyClass.PROSUMER


def test_diamond_order():
    assert class_leq(ISOLATED, PROVIDER)
    assert class_leq(CONSUMER, CONSUMER)
    assert not class_leq(PROVIDER, CONSUMER)
    assert not class_leq(CONSUMER, PROVIDER)
    for cls in ALL:
        assert class_leq(ISOLATED, cls)
        assert class_leq(cls, PROSUMER)


def test_join_examples():
    assert class_join(PROVIDER, CONSUMER) is PROSUMER
    assert class_join(PROSUMER, CONSUMER) is PROSUMER
    for cls in ALL:
        assert class_join(ISOLATED, cls) is cls


def test_meet_examples():
    assert class_meet(PROVIDER, CONSUMER) is ISOLATED
    assert class_meet(ISOLATED, PROVIDER) is ISOLATED
    for cls in ALL:
        assert class_meet(PROSUMER, cls) is cls


@pytest.mark.parametrize("a,b", list(itertools.product(ALL, ALL)))
def test_commutativity(a, b):
    assert class_join(a, b) is class_join(b, a)
    assert class_meet(a, b) is class_meet(b, a)


@pytest.mark.parametrize("a,b,c", list(itertools.product(ALL, ALL, ALL)))
def test_associativity(a, b, c):
    assert class_join(a, class_join(b, c)) is class_join(class_join(a, b), c)
    assert class_meet(a, class_meet(b, c)) is class_meet(class_meet(a, b), c)


@pytest.mark.parametrize("a", ALL)
def test_idempotence(a):
    assert class_join(a, a) is a
    assert class_meet(a, a) is a


@pytest.mark.parametrize("a,b", list(itertools.product(ALL, ALL)))
def test_absorption(a, b):
    assert class_join(a, class_meet(a, b)) is a
    assert class_meet(a, class_join(a, b)) is a


@pytest.mark.parametrize("a,b", list(itertools.product(ALL, ALL)))
def test_order_agrees_with_join_and_meet(a, b):
    assert class_leq(a, b) == (class_join(a, b) is b)
    assert class_leq(a, b) == (class_meet(a, b) is a)


@pytest.mark.parametrize("a,b", list(itertools.product(ALL, ALL)))
def test_bounds_are_actual_bounds(a, b):
    join, meet = class_join(a, b), class_meet(a, b)
    assert class_leq(a, join) and class_leq(b, join)
    assert class_leq(meet, a) and class_leq(meet, b)
    # join is the least upper bound, meet the greatest lower bound
    for other in ALL:
        if class_leq(a, other) and class_leq(b, other):
            assert class_leq(join, other)
        if class_leq(other, a) and class_leq(other, b):
            assert class_leq(other, meet)
