import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ctcbilliard import nls
from ctcbilliard.errors import BlowUpError, DomainError, PreconditionError


@pytest.fixture
def soliton0():
    return nls.sech_field(256, 40.0)


W_FOCUS = nls.CoefficientField.constant(-1.0)


def test_field_validation():
    with pytest.raises(DomainError):
        nls.WaveField(np.zeros(12), (1.0,))
    with pytest.raises(DomainError):
        nls.WaveField(np.zeros(8), (1.0,))
    with pytest.raises(DomainError):
        nls.WaveField(np.zeros((16, 16, 16)), (1.0, 1.0, 1.0))
    with pytest.raises(DomainError):
        nls.WaveField(np.zeros(16), (1.0, 2.0))
    with pytest.raises(DomainError):
        nls.WaveField(np.full(16, np.nan), (1.0,))


def test_coefficient_validation():
    with pytest.raises(DomainError):
        nls.CoefficientField.constant(1j)
    with pytest.raises(DomainError):
        nls.CoefficientField.tabulated(np.ones(16, dtype=complex))
    with pytest.raises(DomainError):
        nls.CoefficientField.gaussian_envelope(1.0, 0.0)
    wf = nls.sech_field(32, 10.0)
    with pytest.raises(DomainError):
        nls.CoefficientField.tabulated(np.ones(64)).spatial(wf)


def test_norm_values():
    wf = nls.gaussian_field(256, 40.0, width=1.3)
    assert nls.norm(wf) == pytest.approx(1.0, abs=1e-10)
    assert nls.norm(wf.with_values(np.zeros(256))) == 0.0
    assert nls.norm(wf.with_values(wf.values * np.exp(0.7j))) == pytest.approx(nls.norm(wf), rel=1e-15)
    g2 = nls.gaussian_field((64, 64), (20.0, 20.0), width=1.0)
    assert nls.norm(g2) == pytest.approx(1.0, abs=1e-10)


def test_energy_values():
    wf = nls.sech_field(16, 10.0)
    assert nls.energy(wf.with_values(np.zeros(16)), W_FOCUS) == 0.0
    L = 20.0
    k = 2 * math.pi * 3 / L
    x = nls.sech_field(64, L).axes()[0]
    pw = nls.WaveField(np.exp(1j * k * x) / math.sqrt(L), (L,))
    assert nls.energy(pw, nls.CoefficientField.constant(0.0)) == pytest.approx(k * k / 2, rel=1e-12)
    # sech with w = -1: 1/3 - 2/3
    assert nls.energy(nls.sech_field(256, 40.0), W_FOCUS) == pytest.approx(-1.0 / 3.0, rel=1e-10)


def test_energy_time_dependent_w():
    w = nls.CoefficientField.constant(-1.0, modulation=lambda t: 1 + 0.1 * math.sin(t))
    with pytest.raises(PreconditionError):
        nls.energy(nls.sech_field(32, 10.0), w)


def test_plane_wave_phase_rotation():
    L = 10.0
    x = nls.sech_field(32, L).axes()[0]
    k = 2 * math.pi * 2 / L
    wf = nls.WaveField(np.exp(1j * k * x), (L,))
    out = nls.run(wf, nls.CoefficientField.constant(0.0), 1.0, 0.1).final
    assert np.max(np.abs(out.values - wf.values * np.exp(-0.5j * k * k))) < 1e-12


def test_soliton_one_time_unit(soliton0):
    out = nls.run(soliton0, W_FOCUS, 1.0, 1e-3, sample_every=100).final
    x = soliton0.axes()[0]
    assert out.time == pytest.approx(1.0)
    assert np.max(np.abs(out.values - nls.soliton(x, 1.0))) < 1e-6


def test_second_order_in_time(soliton0):
    x = soliton0.axes()[0]
    errs = []
    for dt in (0.04, 0.02, 0.01):
        out = nls.run(soliton0, W_FOCUS, 1.0, dt, sample_every=1000).final
        errs.append(np.max(np.abs(out.values - nls.soliton(x, 1.0))))
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(np.abs(orders - 2.0) < 0.2), orders


def test_spatial_resolution():
    a = nls.run(nls.sech_field(256, 40.0), W_FOCUS, 1.0, 1e-3, 1000).final.values
    b = nls.run(nls.sech_field(512, 40.0), W_FOCUS, 1.0, 1e-3, 1000).final.values[::2]
    assert np.max(np.abs(a - b)) < 1e-9


@pytest.mark.parametrize("w", [nls.CoefficientField.constant(-1.0),
                               nls.CoefficientField.gaussian_envelope(-2.0, 3.0, background=0.5)])
def test_norm_conservation(w):
    g = nls.gaussian_field(256, 40.0, width=1.5, momentum=[0.7])
    traj = nls.run(g, w, 1.0, 1e-3, sample_every=1000)
    assert abs(traj.norms[-1] - traj.norms[0]) / traj.norms[0] < 1e-10


def test_norm_conserved_with_modulation_2d():
    w = nls.CoefficientField.gaussian_envelope(1.5, 2.0, modulation=lambda t: math.cos(3 * t))
    g = nls.gaussian_field((32, 32), (16.0, 16.0), width=1.2, momentum=[0.5, -0.3])
    traj = nls.run(g, w, 0.5, 5e-3, sample_every=20)
    assert np.all(np.isnan(traj.energies))
    assert max(abs(n - traj.norms[0]) for n in traj.norms) < 1e-12


def test_time_reversal():
    w = nls.CoefficientField.gaussian_envelope(-1.0, 2.0, modulation=lambda t: 1 + 0.5 * t)
    g = nls.gaussian_field(128, 40.0, width=1.5, momentum=[0.7])
    f = g
    for _ in range(100):
        f = nls.step(f, w, 0.01)
    for _ in range(100):
        f = nls.step(f, w, -0.01)
    assert np.max(np.abs(f.values - g.values)) < 1e-8
    assert abs(f.time) < 1e-12


def test_energy_drift_long_run(soliton0):
    traj = nls.run(soliton0, W_FOCUS, 10.0, 1e-3, sample_every=1000)
    e = np.array(traj.energies)
    assert np.max(np.abs(e - e[0])) / abs(e[0]) < 1e-6


def test_zero_field_flat():
    wf = nls.WaveField(np.zeros(32), (10.0,))
    traj = nls.run(wf, W_FOCUS, 0.1, 0.01)
    assert traj.norms == [0.0] * 11
    assert traj.energies == [0.0] * 11


def test_run_is_deterministic(soliton0):
    a = nls.run(soliton0, W_FOCUS, 0.05, 1e-3, keep_fields=True)
    b = nls.run(soliton0, W_FOCUS, 0.05, 1e-3, keep_fields=True)
    assert np.array_equal(a.final.values, b.final.values)
    assert len(a.fields) == 51


def test_blow_up_carries_trajectory():
    wf = nls.sech_field(32, 10.0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        with pytest.raises(BlowUpError) as info:
            nls.run(wf.with_values(wf.values * 1e200), W_FOCUS, 1.0, 0.1)
    assert info.value.trajectory is not None
    assert info.value.time == pytest.approx(0.1)
    assert len(info.value.trajectory.times) == 1


def test_step_warns_on_large_phase():
    wf = nls.sech_field(32, 10.0, amplitude=5.0)
    with pytest.warns(RuntimeWarning):
        nls.step(wf, W_FOCUS, 0.1)


def test_run_argument_checks(soliton0):
    with pytest.raises(DomainError):
        nls.run(soliton0, W_FOCUS, 1.0, 0.0)
    with pytest.raises(DomainError):
        nls.run(soliton0, W_FOCUS, 1.0, 0.3)
    with pytest.raises(DomainError):
        nls.run(soliton0, W_FOCUS, 1.0, 0.1, sample_every=0)


def test_snapshot_roundtrip(tmp_path):
    g = nls.gaussian_field((16, 32), (5.0, 7.5), width=1.0, momentum=[0.3, 0.1])
    g = nls.WaveField(g.values, g.box_lengths, time=1.25)
    path = tmp_path / "s.bin"
    nls.write_snapshot(path, g)
    raw = path.read_bytes()
    assert raw[:4] == b"NLS1"
    assert len(raw) == 4 + 4 + 8 + 16 + 8 + 16 * 16 * 32
    back = nls.read_snapshot(path)
    assert back.grid_shape == (16, 32) and back.box_lengths == (5.0, 7.5) and back.time == 1.25
    assert np.array_equal(back.values, g.values)
    path.write_bytes(b"XXXX" + raw[4:])
    with pytest.raises(DomainError):
        nls.read_snapshot(path)


@given(st.floats(0.5, 2.0), st.floats(-1.0, 1.0))
@settings(max_examples=10, deadline=None)
def test_norm_conservation_property(amp, wval):
    wf = nls.sech_field(64, 30.0, amplitude=amp)
    traj = nls.run(wf, nls.CoefficientField.constant(wval), 0.2, 0.01, sample_every=20)
    assert abs(traj.norms[-1] - traj.norms[0]) <= 1e-12 * traj.norms[0]
