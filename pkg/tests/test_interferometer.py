import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fockherald.errors import DomainError, ResourceLimitError, UnitarityError
from fockherald.fock import StateVector
from fockherald.interferometer import (
    Circuit,
    ModeUnitary,
    apply,
    beamsplitter_r,
    compose,
    embed,
    nearest_unitary,
    pairing_unitary,
    permanent,
    phase_shift,
    scattering_amplitude,
    unitarity_deviation,
)
from fockherald.oracle import naive_permanent
from fockherald.sources import smsv, tmss
from fockherald.fock import CutoffPolicy, inner_product


def test_rejects_non_unitary():
    m = np.eye(3)
    m[0, 1] = 1e-6
    with pytest.raises(UnitarityError) as err:
        ModeUnitary(m)
    assert err.value.deviation > 1e-7
    assert unitarity_deviation(nearest_unitary(m)) < 1e-14


def test_matrix_is_read_only():
    u = ModeUnitary.identity(2)
    with pytest.raises(ValueError):
        u.matrix[0, 0] = 2


def test_beamsplitter_domain():
    with pytest.raises(DomainError):
        beamsplitter_r(1.5)
    assert np.allclose(beamsplitter_r(1).matrix, np.diag([1, -1]))


def test_hong_ou_mandel():
    out = apply(beamsplitter_r(0.5), StateVector(2, {(1, 1): 1.0}))
    assert out.amplitude((1, 1)) == pytest.approx(0, abs=1e-15)
    assert out.amplitude((2, 0)) == pytest.approx(1 / math.sqrt(2))
    assert out.amplitude((0, 2)) == pytest.approx(-1 / math.sqrt(2))


def test_phase_shift_on_fock():
    out = apply(phase_shift(0.4), StateVector(1, {(3,): 1.0}))
    assert out.amplitude((3,)) == pytest.approx(np.exp(1.2j))


def test_compose_order():
    c = Circuit(2).then("phase", (0,), phi=0.3).then("beamsplitter", (0, 1), a=0.3)
    expect = beamsplitter_r(0.3).matrix @ np.diag([np.exp(0.3j), 1])
    assert np.allclose(compose(c).matrix, expect)
    with pytest.raises(DomainError):
        Circuit(2).then("beamsplitter", (1, 2), a=0.5)


def test_embed_reversed_targets():
    bs = beamsplitter_r(0.3).matrix
    assert np.allclose(embed(bs, (1, 0), 2), bs[::-1, ::-1])


def test_pairing_unitary_makes_tmss():
    r = 0.6
    cut = CutoffPolicy(14)
    two = StateVector(2, {(k1[0], k2[0]): v1 * v2
                          for k1, v1 in smsv(r, cut).terms.items() for k2, v2 in smsv(r, cut).terms.items()}, cut)
    out = apply(pairing_unitary(), two.truncated(14))
    overlap = inner_product(tmss(r, cut), out)
    assert abs(overlap) ** 2 > 1 - 1e-4


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_ryser_matches_naive(n, seed):
    rng = np.random.default_rng(seed)
    m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    assert abs(permanent(m) - naive_permanent(m)) <= 1e-10 * max(1, abs(naive_permanent(m)))


def test_permanent_small_cases():
    assert permanent(np.zeros((0, 0))) == 1
    assert permanent(np.ones((4, 4))) == pytest.approx(24)
    with pytest.raises(ResourceLimitError):
        permanent(np.ones((5, 5)), max_dim=4)
    with pytest.raises(DomainError):
        permanent(np.ones((2, 3)))


def test_scattering_amplitude_checks():
    u = ModeUnitary.random(3, np.random.default_rng(1))
    assert scattering_amplitude((1, 0, 0), (0, 1, 0), u) == pytest.approx(u.matrix[1, 0])
    assert scattering_amplitude((1, 0, 0), (0, 2, 0), u) == 0


def test_apply_preserves_norm(rng):
    u = ModeUnitary.random(4, rng)
    s = StateVector(4, {(1, 0, 2, 0): 0.6, (0, 1, 0, 0): 0.8j})
    assert apply(u, s).norm2 == pytest.approx(1, abs=1e-12)


def test_apply_fixed_restricts_outputs(rng):
    u = ModeUnitary.random(3, rng)
    s = StateVector(3, {(1, 1, 0): 1.0})
    full = apply(u, s)
    part = apply(u, s, fixed={2: 1})
    assert all(k[2] == 1 for k in part.terms)
    for k, v in part.terms.items():
        assert v == pytest.approx(full.amplitude(k))


def test_output_limit():
    s = StateVector(6, {(2, 2, 2, 0, 0, 0): 1.0})
    with pytest.raises(ResourceLimitError):
        apply(ModeUnitary.identity(6), s, max_outputs=10)
