import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from harmonic_derating.errors import AliasingError, InvalidArgument
from harmonic_derating.signal import HarmonicSpectrum, Waveform, rms, synthesize
from harmonic_derating.spectral import analyze


def test_waveform_validation():
    with pytest.raises(InvalidArgument):
        Waveform([1.0], 20000)
    with pytest.raises(InvalidArgument):
        Waveform([1.0, 2.0], 0)
    with pytest.raises(InvalidArgument):
        Waveform([1.0, 2.0], 20000, fundamental=-60)
    w = Waveform(np.zeros(400), 20000)
    assert w.duration == pytest.approx(0.02)
    assert not w.samples.flags.writeable


def test_spectrum_rejects_bad_entries():
    with pytest.raises(InvalidArgument):
        HarmonicSpectrum(60, {0: 1.0})
    with pytest.raises(InvalidArgument):
        HarmonicSpectrum(60, {3: -0.1})
    s = HarmonicSpectrum(60, {3: 0.2, 1: 1.0})
    assert s.orders == [1, 3]
    assert s.h_max == 3
    assert s.phase(3) == 0.0
    assert HarmonicSpectrum().h_max == 1


def test_unit_rms_sine_peak():
    w = synthesize(HarmonicSpectrum(60, {1: (1.0, 0.0)}), 1.0, 20000)
    assert len(w) == 20000
    assert w.samples.max() == pytest.approx(math.sqrt(2), rel=1e-6)


def test_empty_spectrum_gives_zeros():
    w = synthesize(HarmonicSpectrum(60, {}), 0.1, 20000)
    assert np.all(w.samples == 0)


def test_round_trip_h1_h3():
    s = HarmonicSpectrum(60, {1: 1.0, 3: 0.3})
    back = analyze(synthesize(s, 1.0, 20000))
    assert back.magnitude(1) == pytest.approx(1.0, rel=1e-6)
    assert back.magnitude(3) == pytest.approx(0.3, rel=1e-6)


def test_synthesize_errors():
    with pytest.raises(AliasingError) as exc:
        synthesize(HarmonicSpectrum(60, {1: 1.0, 200: 0.1}), 1.0, 20000)
    assert exc.value.order == 200
    with pytest.raises(InvalidArgument):
        synthesize(HarmonicSpectrum(60, {1: 1.0}), 0.0, 20000)
    with pytest.raises(InvalidArgument):
        synthesize(HarmonicSpectrum(60, {1: 1.0}), -1.0, 20000)


def test_rms_constant_and_sine():
    assert rms(Waveform(np.full(37, 2.0), 1000)) == pytest.approx(2.0, rel=1e-15)
    w = synthesize(HarmonicSpectrum(60, {1: 1.0}), 0.5, 20000)
    assert rms(w) == pytest.approx(1.0, rel=1e-12)
    with pytest.raises(InvalidArgument):
        rms(np.array([]))


def test_rms_matches_direct_summation(rng):
    x = rng.standard_normal(1024)
    total = 0.0
    for v in x:
        total += v * v
    assert rms(Waveform(x, 1000)) == pytest.approx(math.sqrt(total / len(x)), rel=1e-12)


spectra = st.dictionaries(
    st.integers(1, 15),
    st.tuples(st.floats(0.0, 10.0), st.floats(-math.pi, math.pi)),
    max_size=8,
)


@settings(max_examples=40, deadline=None)
@given(spectra)
def test_parseval_at_signal_level(entries):
    s = HarmonicSpectrum(60, entries)
    w = synthesize(s, 0.1, 20000)
    expected = sum(m * m for m in s.magnitudes().values())
    assert rms(w) ** 2 == pytest.approx(expected, rel=1e-9, abs=1e-20)


@settings(max_examples=40, deadline=None)
@given(spectra, spectra)
def test_synthesize_is_linear(a, b):
    s1, s2 = HarmonicSpectrum(60, a), HarmonicSpectrum(60, b)
    lhs = synthesize(s1 + s2, 0.05, 20000).samples
    rhs = synthesize(s1, 0.05, 20000).samples + synthesize(s2, 0.05, 20000).samples
    scale = max(1.0, np.abs(rhs).max())
    assert np.max(np.abs(lhs - rhs)) <= 1e-12 * scale


def test_phasor_addition_cancels():
    a = HarmonicSpectrum(60, {1: (2.0, 0.0), 5: (0.1, 0.0)})
    b = HarmonicSpectrum(60, {1: (2.0, math.pi)})
    total = a + b
    assert total.magnitude(1) == pytest.approx(0.0, abs=1e-15)
    assert total.magnitude(5) == 0.1


def test_spectrum_dict_round_trip():
    s = HarmonicSpectrum(50, {1: (1.0, 0.25), 7: (0.05, -1.0)})
    assert HarmonicSpectrum.from_dict(s.to_dict()) == s
