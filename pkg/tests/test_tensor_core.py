"""Core tensor type, matricization, serialization, and rank oracles."""

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from racsep import (EXACT, FLOAT, DenseTensor, FieldMismatchError,
                    IndexPartition, InvalidInputError, ShapeError,
                    dematricize, exact_array, hadamard_power, matricize,
                    multiset_coefficient, rank_exact, rank_numeric,
                    tensor_product)
from racsep.tensor import dump_tensor, parse_tensor


def test_exact_tensor_holds_fractions():
    t = DenseTensor.from_entries((2, 2), [1, 2, 3, 4], EXACT)
    assert t.data.dtype == object
    assert t[0, 1] == Fraction(2)
    assert t.order == 2 and t.dims == (2, 2)


def test_from_entries_wrong_count():
    with pytest.raises(ShapeError):
        DenseTensor.from_entries((2, 2), [1, 2, 3], EXACT)


def test_tensor_product_orders_add():
    a = DenseTensor.from_entries((2,), [1, 2], EXACT)
    b = DenseTensor.from_entries((3,), [1, 0, 2], EXACT)
    p = tensor_product(a, b)
    assert p.dims == (2, 3)
    assert p[1, 2] == Fraction(4)


def test_tensor_product_field_mismatch():
    a = DenseTensor.from_entries((2,), [1, 2], EXACT)
    b = DenseTensor.from_entries((2,), [1.0, 2.0], FLOAT)
    with pytest.raises(FieldMismatchError):
        tensor_product(a, b)


def test_matricize_known_entry_placement():
    # order-4, M=2: entry (d1,d2,d3,d4) -> row 2*(d1-1)+(d2-1), col likewise
    t = DenseTensor.zeros((2, 2, 2, 2), EXACT)
    t.data[0, 1, 1, 0] = Fraction(7)
    m = matricize(t, IndexPartition.start_end(4))
    assert m.dims == (4, 4)
    assert m[1, 2] == Fraction(7)


def test_matricize_interleaved_partition():
    t = DenseTensor.zeros((2, 2, 2, 2), EXACT)
    t.data[1, 0, 1, 0] = Fraction(5)
    p = IndexPartition(S=(1, 3), E=(2, 4))
    m = matricize(t, p)
    assert m[3, 0] == Fraction(5)


def test_matricize_requires_equal_dims():
    t = DenseTensor.zeros((2, 3), EXACT)
    with pytest.raises(ShapeError):
        matricize(t, IndexPartition(S=(1,), E=(2,)))


def test_start_end_needs_even_T():
    with pytest.raises(ShapeError):
        IndexPartition.start_end(3)


def test_partition_must_cover_modes():
    with pytest.raises(ShapeError):
        IndexPartition(S=(1, 2), E=(2, 3))
    with pytest.raises(ShapeError):
        IndexPartition(S=(1,), E=(3,))


@settings(deadline=None, max_examples=25)
@given(st.integers(2, 3), st.sampled_from([2, 4]), st.randoms(use_true_random=False))
def test_matricize_roundtrip(M, T, rnd):
    entries = [Fraction(rnd.randint(-5, 5)) for _ in range(M ** T)]
    t = DenseTensor.from_entries((M,) * T, entries, EXACT)
    S = tuple(sorted(rnd.sample(range(1, T + 1), T // 2)))
    E = tuple(i for i in range(1, T + 1) if i not in S)
    p = IndexPartition(S=S, E=E)
    back = dematricize(matricize(t, p), p, M)
    assert back.equals(t)


def test_hadamard_power_entrywise():
    m = DenseTensor.from_entries((2, 2), [1, 2, 3, 4], EXACT)
    sq = hadamard_power(m, 2)
    assert sq[1, 1] == Fraction(16)
    with pytest.raises(InvalidInputError):
        hadamard_power(m, 0)


@pytest.mark.parametrize("fmt_field", [EXACT, FLOAT])
def test_serialization_roundtrip(fmt_field):
    if fmt_field == EXACT:
        t = DenseTensor.from_entries((2, 3), [Fraction(1, 3), 2, 0, -5,
                                              Fraction(-7, 2), 9], EXACT)
    else:
        t = DenseTensor.from_entries((2, 3), [0.1, -2.5, 3e-17, 1.0, -0.0, 7.25],
                                     FLOAT)
    back = parse_tensor(dump_tensor(t))
    assert back.equals(t)
    # byte-determinism of the text format
    assert dump_tensor(back) == dump_tensor(t)


def test_parse_rejects_bad_header():
    with pytest.raises(InvalidInputError):
        parse_tensor("nonsense\n1 2 3\n")


# --- rank oracles ----------------------------------------------------------

def test_rank_exact_known_values():
    assert rank_exact(exact_array([[1, 2], [2, 4]])).rank == 1
    assert rank_exact(exact_array([[1, 0], [0, 1]])).rank == 2
    assert rank_exact(exact_array([[0, 0], [0, 0]])).rank == 0
    # cancellation that defeats naive float pivoting
    m = exact_array([[Fraction(1, 3), Fraction(1, 3)],
                     [Fraction(1, 7), Fraction(1, 7)]])
    assert rank_exact(m).rank == 1


def test_rank_exact_rejects_float():
    with pytest.raises(FieldMismatchError):
        rank_exact(np.eye(2))


def test_rank_numeric_matches_exact_on_integers():
    rng = np.random.default_rng(3)
    for _ in range(20):
        a = rng.integers(-4, 5, (5, 5))
        assert rank_numeric(a.astype(float)).rank == rank_exact(exact_array(a)).rank


def test_rank_numeric_tolerance_scale():
    a = np.diag([1.0, 1e-20])
    assert rank_numeric(a).rank == 1
    assert rank_numeric(a, rel_tol=1e-25).rank == 2


def test_rank_numeric_rejects_nan():
    with pytest.raises(InvalidInputError):
        rank_numeric(np.array([[1.0, np.nan], [0.0, 1.0]]))


@settings(deadline=None, max_examples=40)
@given(st.integers(0, 6), st.integers(0, 6))
def test_multiset_coefficient_recurrence(n, k):
    # multiset(n, k) counts size-k multisets: Pascal-style recurrence
    if n >= 1 and k >= 1:
        assert (multiset_coefficient(n, k)
                == multiset_coefficient(n - 1, k) + multiset_coefficient(n, k - 1))
    assert multiset_coefficient(n, 0) == 1
    if n == 0 and k > 0:
        assert multiset_coefficient(n, k) == 0


def test_multiset_paper_values():
    assert multiset_coefficient(2, 2) == 3
    assert multiset_coefficient(3, 2) == 6
    assert multiset_coefficient(2, 3) == 4
