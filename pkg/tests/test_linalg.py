from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from invoreduce import linalg
from invoreduce.scalars import Cyc


def test_rref_and_rank():
    rows = [[1, 2, 3], [2, 4, 6], [1, 0, 1]]
    assert linalg.rank(rows) == 2
    R, piv = linalg.rref(rows)
    assert piv == [0, 1]


def test_nullspace_exact():
    rows = [[1, 2, 3], [2, 4, 6]]
    basis = linalg.nullspace(rows, 3)
    assert len(basis) == 2
    for v in basis:
        assert all(sum(Fraction(a) * b for a, b in zip(r, v)) == 0 for r in rows)
    assert linalg.nullspace([], 2) == [(1, 0), (0, 1)]


def test_inverse():
    a = [[2, 1], [1, 1]]
    assert linalg.matmul(linalg.inverse(a), a) == linalg.identity(2)
    with pytest.raises(ValueError, match="singular"):
        linalg.inverse([[1, 2], [2, 4]])
    z = Cyc.zeta(3)
    b = [[z, 1], [0, 1]]
    assert linalg.matmul(b, linalg.inverse(b)) == linalg.identity(2)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.lists(st.integers(-4, 4), min_size=4, max_size=4), min_size=1, max_size=4))
def test_nullspace_property(rows):
    basis = linalg.nullspace(rows, 4)
    assert len(basis) == 4 - linalg.rank(rows)
    for v in basis:
        assert all(sum(a * b for a, b in zip(r, v)) == 0 for r in rows)
        assert linalg.in_span(basis, v)
