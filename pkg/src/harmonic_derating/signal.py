"""Sampled current waveforms and harmonic spectra.

Harmonic magnitudes are RMS amperes throughout. A spectrum entry
``(I, phi)`` for order ``h`` stands for the time-domain component
``sqrt(2) * I * sin(2*pi*h*f1*t + phi)``, so the complex phasor
``I * exp(1j*phi)`` adds linearly across sources.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import AliasingError, InvalidArgument


@dataclass(frozen=True)
class Waveform:
    """Uniformly sampled instantaneous current (A)."""

    samples: np.ndarray
    sample_rate: float
    fundamental: float = 60.0

    def __post_init__(self):
        x = np.array(self.samples, dtype=float).ravel()
        x.setflags(write=False)
        object.__setattr__(self, "samples", x)
        if not self.sample_rate > 0 or not math.isfinite(self.sample_rate):
            raise InvalidArgument(f"sample_rate must be positive, got {self.sample_rate}")
        if not self.fundamental > 0 or not math.isfinite(self.fundamental):
            raise InvalidArgument(f"fundamental must be positive, got {self.fundamental}")
        if x.size < 2:
            raise InvalidArgument("a waveform needs at least 2 samples")

    def __len__(self) -> int:
        return self.samples.size

    @property
    def duration(self) -> float:
        return self.samples.size / self.sample_rate

    @property
    def time(self) -> np.ndarray:
        return np.arange(self.samples.size) / self.sample_rate

    def __add__(self, other: "Waveform") -> "Waveform":
        if not isinstance(other, Waveform):
            return NotImplemented
        if len(self) != len(other) or self.sample_rate != other.sample_rate:
            raise InvalidArgument("waveforms must share length and sample rate")
        return Waveform(self.samples + other.samples, self.sample_rate, self.fundamental)


@dataclass(frozen=True)
class HarmonicSpectrum:
    """RMS magnitude and phase per integer harmonic order.

    ``entries`` maps order ``h`` to ``(magnitude, phase)``. Phases default to
    zero when a bare magnitude is given; none of the loss metrics depend on
    phase.
    """

    fundamental: float = 60.0
    entries: Mapping[int, tuple[float, float]] = field(default_factory=dict)

    def __post_init__(self):
        if not self.fundamental > 0:
            raise InvalidArgument(f"fundamental must be positive, got {self.fundamental}")
        clean: dict[int, tuple[float, float]] = {}
        for h, value in self.entries.items():
            h_int = int(h)
            if h_int != h or h_int < 1:
                raise InvalidArgument(f"harmonic order must be a positive integer, got {h!r}")
            if isinstance(value, (tuple, list)):
                mag, phase = float(value[0]), float(value[1])
            else:
                mag, phase = float(value), 0.0
            if not (mag >= 0 and math.isfinite(mag)):
                raise InvalidArgument(f"magnitude of order {h_int} must be finite and >= 0")
            clean[h_int] = (mag, phase)
        object.__setattr__(self, "entries", dict(sorted(clean.items())))

    @classmethod
    def from_magnitudes(cls, magnitudes: Mapping[int, float], fundamental: float = 60.0):
        return cls(fundamental, {h: (m, 0.0) for h, m in magnitudes.items()})

    @classmethod
    def from_phasors(cls, phasors: Mapping[int, complex], fundamental: float = 60.0):
        return cls(
            fundamental,
            {h: (abs(p), math.atan2(p.imag, p.real)) for h, p in phasors.items()},
        )

    @property
    def orders(self) -> list[int]:
        return list(self.entries)

    @property
    def h_max(self) -> int:
        return max(self.entries, default=1)

    def magnitude(self, h: int) -> float:
        return self.entries.get(h, (0.0, 0.0))[0]

    def phase(self, h: int) -> float:
        return self.entries.get(h, (0.0, 0.0))[1]

    def magnitudes(self) -> dict[int, float]:
        return {h: m for h, (m, _) in self.entries.items()}

    def phasors(self) -> dict[int, complex]:
        return {h: m * complex(math.cos(p), math.sin(p)) for h, (m, p) in self.entries.items()}

    def scaled(self, factor: float) -> "HarmonicSpectrum":
        """Multiply every phasor by a real factor (negative flips phase by pi)."""
        return HarmonicSpectrum.from_phasors(
            {h: factor * p for h, p in self.phasors().items()}, self.fundamental
        )

    def truncated(self, h_max: int) -> "HarmonicSpectrum":
        return HarmonicSpectrum(
            self.fundamental, {h: v for h, v in self.entries.items() if h <= h_max}
        )

    def __add__(self, other: "HarmonicSpectrum") -> "HarmonicSpectrum":
        if not isinstance(other, HarmonicSpectrum):
            return NotImplemented
        if self.fundamental != other.fundamental:
            raise InvalidArgument("cannot add spectra with different fundamentals")
        total = self.phasors()
        for h, p in other.phasors().items():
            total[h] = total[h] + p if h in total else p
        return HarmonicSpectrum.from_phasors(total, self.fundamental)

    def to_dict(self) -> dict:
        return {
            "fundamental_hz": self.fundamental,
            "harmonics": {str(h): {"rms_a": m, "phase_rad": p} for h, (m, p) in self.entries.items()},
        }

    @classmethod
    def from_dict(cls, doc: Mapping) -> "HarmonicSpectrum":
        entries = {}
        for h, v in doc.get("harmonics", {}).items():
            if isinstance(v, Mapping):
                entries[int(h)] = (v["rms_a"], v.get("phase_rad", 0.0))
            else:
                entries[int(h)] = (v, 0.0)
        return cls(float(doc.get("fundamental_hz", 60.0)), entries)


def synthesize(spectrum: HarmonicSpectrum, duration: float, sample_rate: float) -> Waveform:
    """Sample the sum of the spectrum's sinusoids on ``t = n / sample_rate``."""
    if not duration > 0:
        raise InvalidArgument(f"duration must be positive, got {duration}")
    if not sample_rate > 0:
        raise InvalidArgument(f"sample_rate must be positive, got {sample_rate}")
    n = int(round(duration * sample_rate))
    if n < 2:
        raise InvalidArgument("duration * sample_rate must be at least 2")
    nyquist = sample_rate / 2
    for h in spectrum.orders:
        if h * spectrum.fundamental >= nyquist:
            raise AliasingError(
                f"harmonic {h} ({h * spectrum.fundamental:g} Hz) is at or above "
                f"the Nyquist frequency {nyquist:g} Hz",
                order=h,
            )
    t = np.arange(n) / sample_rate
    x = np.zeros(n)
    for h, (mag, phase) in spectrum.entries.items():
        if mag:
            x += math.sqrt(2) * mag * np.sin(2 * np.pi * h * spectrum.fundamental * t + phase)
    return Waveform(x, sample_rate, spectrum.fundamental)


def rms(w: Waveform | np.ndarray) -> float:
    x = np.asarray(w.samples if isinstance(w, Waveform) else w, dtype=float)
    if x.size == 0:
        raise InvalidArgument("rms of an empty waveform")
    return float(np.sqrt(np.mean(x * x)))
