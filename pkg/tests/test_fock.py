import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fockherald.errors import DomainError, ModeMismatchError, ResourceLimitError
from fockherald.fock import (
    CutoffPolicy,
    StateVector,
    basis_size,
    enumerate_basis,
    fixed_number_states,
    inner_product,
    photon_number_support,
    tensor_all,
    tensor_product,
)


@given(st.integers(1, 5), st.integers(0, 6))
def test_basis_size_matches_enumeration(modes, n):
    basis = enumerate_basis(modes, n)
    assert len(basis) == basis_size(modes, n) == math.comb(n + modes, modes)
    assert len(set(basis)) == len(basis)


def test_basis_order_is_graded():
    basis = enumerate_basis(3, 2)
    totals = [sum(k) for k in basis]
    assert totals == sorted(totals)
    assert basis[0] == (0, 0, 0)
    assert fixed_number_states(2, 2) == [(0, 2), (1, 1), (2, 0)]


def test_basis_limit():
    with pytest.raises(ResourceLimitError):
        enumerate_basis(12, 12, max_states=1000)


def test_threshold_drops_small_terms():
    s = StateVector(2, {(1, 0): 1.0, (0, 1): 1e-14})
    assert len(s) == 1
    s = StateVector(2, {(1, 0): 1.0, (0, 1): 1e-14}, CutoffPolicy(8, 1e-20))
    assert len(s) == 2


def test_validation():
    with pytest.raises(ModeMismatchError):
        StateVector(2, {(1, 0, 0): 1.0})
    with pytest.raises(DomainError):
        StateVector(1, {(-1,): 1.0})
    with pytest.raises(DomainError):
        StateVector(2, {}).normalized()


def test_terms_are_read_only():
    s = StateVector.vacuum(2)
    with pytest.raises(TypeError):
        s.terms[(1, 1)] = 1.0


def test_truncation_tracks_deficit():
    s = StateVector(1, {(0,): 0.8, (3,): 0.6})
    t = s.truncated(2)
    assert t.norm2 == pytest.approx(0.64)
    assert t.deficit == pytest.approx(0.36)


def test_tensor_and_inner_product():
    a = StateVector(1, {(0,): 0.6, (1,): 0.8})
    b = StateVector(1, {(2,): 1j})
    ab = tensor_product(a, b)
    assert ab.amplitude((1, 2)) == pytest.approx(0.8j)
    assert inner_product(ab, ab) == pytest.approx(1)
    assert tensor_all([a, a, a], max_total=1).max_photons == 1
    with pytest.raises(ModeMismatchError):
        inner_product(a, ab)


def test_permuted_and_support():
    s = StateVector(3, {(1, 0, 2): 1.0})
    assert s.permuted((2, 0, 1)).amplitude((2, 1, 0)) == 1
    assert photon_number_support(StateVector(2, {(0, 0): 0.6, (2, 2): 0.8})) == {0, 4}


@settings(max_examples=30)
@given(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3), st.floats(-1, 1), st.floats(-1, 1)), min_size=1, max_size=8))
def test_records_round_trip(items):
    terms = {(i, j): complex(re, im) for i, j, re, im in items}
    s = StateVector(2, terms)
    back = StateVector.from_records(s.to_records(), modes=2)
    assert back == s
    vec = s.to_dense(enumerate_basis(2, 6))
    assert np.vdot(vec, vec).real == pytest.approx(s.norm2)
