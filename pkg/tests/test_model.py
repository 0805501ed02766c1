import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ctcbilliard.errors import DomainError
from ctcbilliard.model import (GaussianPacket, KernelParams, ScatteredState, Variant, b_prime,
                               big_a, c_prime, normalize, xi)

finite = st.floats(-5.0, 5.0)


def test_packet_validation():
    with pytest.raises(DomainError):
        GaussianPacket(0.0)
    with pytest.raises(DomainError):
        GaussianPacket(-1.0)
    with pytest.raises(DomainError):
        GaussianPacket(1.0, b=(1.0, 2.0, 3.0))
    with pytest.raises(DomainError):
        GaussianPacket(1.0, b=(math.nan, 0.0))


def test_normalize_gives_unit_norm():
    # int |a_k|^2 d^2k = e^{2 Re c} pi / (2a)
    for a in (0.1, 1.0, 7.0):
        p = normalize(GaussianPacket(a, c=3 + 0.5j))
        assert p.is_normalized()
        assert math.exp(2 * p.c.real) * math.pi / (2 * a) == pytest.approx(1.0)
        assert p.c.imag == 0.5


@given(st.floats(0.01, 50.0), finite, finite, finite, finite)
def test_packet_roundtrip(a, bx, by, cr, ci):
    p = GaussianPacket(a, (bx, by), complex(cr, ci))
    assert GaussianPacket.from_dict(p.to_dict()) == p


@given(st.floats(0.01, 10.0), st.floats(-3, 3), st.lists(st.tuples(finite, finite), min_size=1, max_size=6))
def test_state_roundtrip(ar, ai, coeffs):
    s = ScatteredState(complex(ar, ai), tuple(complex(r, i) for r, i in coeffs))
    assert ScatteredState.from_dict(s.to_dict()) == s
    assert s.order == len(coeffs) - 1


def test_state_requires_positive_real_width():
    with pytest.raises(DomainError):
        ScatteredState(-0.5)
    with pytest.raises(DomainError):
        ScatteredState(1j)
    with pytest.raises(DomainError):
        ScatteredState.from_dict({"alpha_re": 1.0, "coeffs_re": [1, 2], "coeffs_im": [0]})


def test_state_evaluation():
    s = ScatteredState(2.0, (1.0, 0.5))
    p = np.array([0.0, 1.0, 2.0])
    assert np.allclose(s(p), (1 + 0.5 * p**2) * np.exp(-2 * p**2))


def test_kernel_params_validation():
    for kw in ({"epsilon": 0.0}, {"epsilon": 1.0}, {"coupling": math.inf},
               {"variant": "yukawa"}, {"yukawa_mass": 1.0}, {"variant": "bogus"}):
        with pytest.raises((DomainError, ValueError)):
            KernelParams(**kw)
    kp = KernelParams(variant="yukawa", yukawa_mass=0.5)
    assert kp.variant is Variant.YUKAWA
    assert KernelParams.from_dict(kp.to_dict()) == kp


def test_yukawa_shift():
    kp = KernelParams(variant=Variant.YUKAWA, yukawa_mass=0.3)
    assert kp.shifted_k2(2.0) == pytest.approx(4.09)
    assert KernelParams().shifted_k2(2.0) == 4.0


def test_b_and_c_prime():
    p = GaussianPacket(1.5, b=(0.2, -0.4), c=0.1 + 0.2j)
    P, Q = (0.3, 0.1), (-0.2, 0.5)
    d = np.subtract(P, Q)
    s = np.add(P, Q)
    assert b_prime(p, P, Q) == pytest.approx(np.linalg.norm(np.array(p.b) - 3.0 * d))
    assert c_prime(p, P, Q) == pytest.approx(p.c - 1.5 * s @ s - np.array(p.b) @ s)


def test_big_a():
    p = GaussianPacket(2.0)
    assert big_a(p, 1.0, KernelParams()) == pytest.approx(2 ** 0.75 * math.sqrt(2.0))


def test_xi_value_and_zero_coupling():
    p = GaussianPacket(1.0, c=0.3j)
    kp = KernelParams(coupling=0.7, epsilon=0.2)
    expect = 2j * 0.7 * math.pi**3 * math.pi / math.sin(0.2 * math.pi) * cmath.exp(0.3j)
    assert xi(p, kp) == pytest.approx(expect, rel=1e-13)
    assert xi(p, KernelParams(coupling=0.0)) == 0
