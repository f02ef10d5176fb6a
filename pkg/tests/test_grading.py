from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from geomva.errors import InvalidScalar, WindowViolation
from geomva.grading import DegreeWindow, GradedVector, WindowedCompletion, embed, project, scale_action
from geomva.models import fock_basis, partitions
from geomva.scalars import GaussianRational

basis = fock_basis()
keys = [k for d in range(5) for k in basis.keys(d)]


def vectors(max_size=4):
    return st.dictionaries(
        st.sampled_from(keys), st.integers(-5, 5).filter(bool), max_size=max_size
    ).map(lambda d: GradedVector(basis, d))


def test_window_parse_and_contains():
    w = DegreeWindow.parse("0:6")
    assert (w.lo, w.hi) == (0, 6) and 3 in w and 7 not in w
    assert str(w) == "0:6"
    with pytest.raises(WindowViolation):
        DegreeWindow(3, 1)


def test_partition_dimensions():
    # p(n) for n = 0..10
    assert [basis.dim(n) for n in range(11)] == [1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42]
    assert list(partitions(4)) == [(4,), (3, 1), (2, 2), (2, 1, 1), (1, 1, 1, 1)]


def test_labels_roundtrip():
    for k in keys:
        assert basis.parse(basis.label(k)) == k
    assert basis.parse("b") == (1,)
    with pytest.raises(KeyError):
        basis.parse("nope", search_hi=3)


def test_project_embed_examples():
    a = basis.vector((2, 1), 3)
    w = DegreeWindow(0, 6)
    assert project(embed(a, w), 3) == a
    assert project(embed(a, w), 4).is_zero()
    vac = embed(basis.vector(()), w)
    assert project(vac, 0) == basis.vector(())
    assert embed(basis.zero(), w).is_zero()
    bb = embed(basis.vector((1, 1)), DegreeWindow(0, 4))
    assert [d for d in range(5) if not bb.component(d).is_zero()] == [2]


def test_window_violations():
    with pytest.raises(WindowViolation):
        embed(basis.vector((5, 2)), DegreeWindow(0, 6))
    with pytest.raises(WindowViolation):
        project(embed(basis.vector(()), DegreeWindow(0, 2)), 3)
    with pytest.raises(WindowViolation):
        WindowedCompletion(basis, DegreeWindow(0, 2), {1: basis.vector((2,))})


def test_scale_action_examples():
    b = basis.vector((1,))
    v = basis.vector((2, 1), Fraction(1, 3)) + b
    assert scale_action(1, v) == v
    assert scale_action(5, basis.vector(())) == basis.vector(())
    assert scale_action(2, b) == b * 2
    assert scale_action(3, basis.vector((1, 1))) == basis.vector((1, 1)) * 9
    with pytest.raises(InvalidScalar):
        scale_action(0, b)


@given(vectors(), vectors(), st.integers(-3, 3))
def test_vector_space_laws(x, y, c):
    assert x + y == y + x
    assert (x + y) * c == x * c + y * c
    assert (x - x).is_zero()
    assert sum((x.component(d) for d in range(5)), basis.zero()) == x


@given(vectors(), st.sampled_from([2, -1, Fraction(1, 2), GaussianRational(1, 1), GaussianRational(0, 1)]),
       st.sampled_from([3, Fraction(-2, 3), GaussianRational(2, -1)]))
def test_scale_action_is_a_group_action(v, s, t):
    assert scale_action(s, scale_action(t, v)) == scale_action(s * t, v)


@given(vectors())
def test_completion_arithmetic(v):
    w = DegreeWindow(0, 4)
    x = embed(v, w)
    assert (x - x).is_zero()
    assert (x + x).to_vector() == v * 2
    assert x.to_vector() == v
