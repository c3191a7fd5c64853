import math

import pytest
from hypothesis import given, strategies as st

from fockherald.errors import DomainError
from fockherald.fock import CutoffPolicy
from fockherald.sources import SqueezeParams, chi, fock, smsv, smsv_coefficient, tmss, tmss_coefficient, vacuum


@given(st.floats(0, 2.5))
def test_tmss_norm_and_deficit(r):
    s = tmss(r, CutoffPolicy(10))
    lam = math.tanh(r)
    assert s.norm2 + s.deficit == pytest.approx(1, abs=1e-12)
    assert s.deficit == pytest.approx(lam**12)
    assert all(k[0] == k[1] for k in s.terms)


def test_tmss_coefficients():
    lam = math.sqrt(0.5)
    assert tmss_coefficient(lam, 0) == pytest.approx(math.sqrt(0.5))
    assert tmss_coefficient(lam, 2) == pytest.approx(math.sqrt(0.5) * 0.5)
    s = tmss(SqueezeParams.from_lambda(lam), CutoffPolicy(4))
    assert s.amplitude((1, 1)) == pytest.approx(0.5)
    assert s.amplitude((3, 3)) == 0


@given(st.floats(0, 2.0))
def test_smsv_norm(r):
    s = smsv(r, CutoffPolicy(40))
    assert s.norm2 + s.deficit == pytest.approx(1, abs=1e-12)
    assert all(k[0] % 2 == 0 for k in s.terms)


def test_smsv_known_values():
    r = 0.7
    t = math.tanh(r)
    assert smsv_coefficient(r, 1) == pytest.approx(math.sqrt(2) / 2 * t / math.sqrt(math.cosh(r)))
    assert smsv_coefficient(0.0, 3) == 0.0


def test_squeeze_params():
    assert SqueezeParams.from_lambda(0.5).lam == pytest.approx(0.5)
    with pytest.raises(DomainError):
        SqueezeParams(-0.1)
    with pytest.raises(DomainError):
        SqueezeParams.from_lambda(1.0)


def test_chi_and_fock():
    c = chi(0.75)
    assert c.amplitude((2, 0)) == pytest.approx(math.sqrt(0.75))
    assert c.amplitude((0, 2)) == pytest.approx(-0.5)
    with pytest.raises(DomainError):
        chi(1.2)
    assert fock((1, 2)).amplitude((1, 2)) == 1
    assert vacuum(3).amplitude((0, 0, 0)) == 1
