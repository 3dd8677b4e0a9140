"""Harmonic extraction from sampled current.

``fft`` is an iterative radix-2 Cooley-Tukey transform checked against the
O(N^2) ``dft_direct``. ``dft`` extends it to any length with Bluestein's
chirp-z identity, which lets ``analyze`` work on captures that hold a whole
number of fundamental periods (at 20 kHz and 60 Hz no power of two does).
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass

import numpy as np

from .errors import AliasingError, InsufficientResolution, InvalidArgument
from .signal import HarmonicSpectrum, Waveform


class Window(enum.Enum):
    NONE = "none"
    HANN = "hann"


@dataclass(frozen=True)
class SpectralConfig:
    h_max: int = 15
    scan_halfwidth: int = 2
    window: Window = Window.NONE
    # trim the capture to a whole number of fundamental periods before the transform
    trim_to_periods: bool = True

    def __post_init__(self):
        if isinstance(self.window, str):
            object.__setattr__(self, "window", Window(self.window.lower()))
        if self.window is None:
            object.__setattr__(self, "window", Window.NONE)
        if int(self.h_max) != self.h_max or self.h_max < 1:
            raise InvalidArgument(f"h_max must be an integer >= 1, got {self.h_max}")
        if int(self.scan_halfwidth) != self.scan_halfwidth or self.scan_halfwidth < 0:
            raise InvalidArgument(f"scan_halfwidth must be an integer >= 0, got {self.scan_halfwidth}")


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and n & (n - 1) == 0


@functools.lru_cache(maxsize=16)
def _dft_kernel(n: int) -> np.ndarray:
    k = np.arange(n)
    # reduce k*n modulo N first so large products keep full phase precision
    kn = np.outer(k, k) % n
    return np.exp(-2j * np.pi * kn / n)


def dft_direct(samples) -> np.ndarray:
    """X[k] = sum_n x[n] exp(-2j*pi*k*n/N), evaluated literally. O(N^2)."""
    x = np.asarray(samples, dtype=complex).ravel()
    if x.size == 0:
        raise InvalidArgument("DFT of an empty sequence")
    return _dft_kernel(x.size) @ x


@functools.lru_cache(maxsize=32)
def _fft_plan(n: int) -> tuple[np.ndarray, np.ndarray]:
    bits = n.bit_length() - 1
    rev = np.zeros(n, dtype=np.intp)
    idx = np.arange(n)
    for b in range(bits):
        rev |= ((idx >> b) & 1) << (bits - 1 - b)
    twiddles = np.exp(-2j * np.pi * np.arange(n // 2) / n)
    rev.setflags(write=False)
    twiddles.setflags(write=False)
    return rev, twiddles


def fft(samples) -> np.ndarray:
    """Radix-2 decimation-in-time FFT. Length must be a power of two."""
    x = np.asarray(samples, dtype=complex).ravel()
    n = x.size
    if not _is_power_of_two(n):
        raise InvalidArgument(f"fft length must be a power of two, got {n}; use dft() or prepare()")
    rev, twiddles = _fft_plan(n)
    x = x[rev]
    m = 2
    while m <= n:
        half = m // 2
        w = twiddles[:: n // m]
        blocks = x.reshape(-1, m)
        u = blocks[:, :half]
        t = blocks[:, half:] * w
        x = np.concatenate((u + t, u - t), axis=1).ravel()
        m *= 2
    return x


def ifft(spectrum) -> np.ndarray:
    X = np.asarray(spectrum, dtype=complex).ravel()
    return np.conj(fft(np.conj(X))) / X.size


@functools.lru_cache(maxsize=16)
def _bluestein_plan(n: int) -> tuple[np.ndarray, np.ndarray, int]:
    k = np.arange(n)
    chirp = np.exp(-1j * np.pi * ((k * k) % (2 * n)) / n)
    m = 1 << (2 * n - 1).bit_length()
    b = np.zeros(m, dtype=complex)
    b[:n] = np.conj(chirp)
    b[m - n + 1 :] = np.conj(chirp[1:])[::-1]
    return chirp, fft(b), m


def dft(samples) -> np.ndarray:
    """DFT of any length: radix-2 directly, otherwise Bluestein on radix-2."""
    x = np.asarray(samples, dtype=complex).ravel()
    n = x.size
    if n == 0:
        raise InvalidArgument("DFT of an empty sequence")
    if _is_power_of_two(n):
        return fft(x)
    chirp, b_hat, m = _bluestein_plan(n)
    a = np.zeros(m, dtype=complex)
    a[:n] = x * chirp
    conv = ifft(fft(a) * b_hat)
    return chirp * conv[:n]


def whole_period_length(n: int, sample_rate: float, fundamental: float) -> int | None:
    """Largest sample count <= n spanning an integer number of fundamental periods."""
    per_period = sample_rate / fundamental
    for p in range(int(n / per_period + 1e-9), 0, -1):
        m = p * per_period
        if abs(m - round(m)) <= 1e-6 * max(1.0, m) and round(m) <= n:
            return int(round(m))
    return None


def prepare(w: Waveform, trim: bool = True) -> np.ndarray:
    """Samples handed to the transform: trimmed to whole periods when possible."""
    x = w.samples
    if trim:
        m = whole_period_length(x.size, w.sample_rate, w.fundamental)
        if m is not None:
            x = x[:m]
    return np.asarray(x, dtype=float)


def _check(w: Waveform, cfg: SpectralConfig) -> None:
    nyquist = w.sample_rate / 2
    if cfg.h_max * w.fundamental >= nyquist:
        raise AliasingError(
            f"h_max={cfg.h_max} at {w.fundamental:g} Hz reaches {cfg.h_max * w.fundamental:g} Hz, "
            f"not below the Nyquist frequency {nyquist:g} Hz",
            order=cfg.h_max,
        )
    if w.duration * w.fundamental < 1 - 1e-9:
        raise InsufficientResolution(
            f"capture of {w.duration:g} s is shorter than one fundamental period"
        )


def analyze(w: Waveform, cfg: SpectralConfig | None = None) -> HarmonicSpectrum:
    """RMS magnitude and phase of harmonics 1..h_max.

    For each order the target bin ``round(h * f1 * N / fs)`` and its
    ``scan_halfwidth`` neighbours on either side are searched and the largest
    magnitude wins. The half-width is capped so a scan never reaches the
    bins of the adjacent harmonic.
    """
    cfg = cfg or SpectralConfig()
    _check(w, cfg)
    x = prepare(w, cfg.trim_to_periods)
    n = x.size
    if cfg.window is Window.HANN:
        win = 0.5 - 0.5 * np.cos(2 * np.pi * np.arange(n) / n)
    else:
        win = np.ones(n)
    X = dft(x * win)
    mags = np.abs(X) * math.sqrt(2) / win.sum()

    bins_per_order = n * w.fundamental / w.sample_rate
    halfwidth = min(cfg.scan_halfwidth, max(0, int((bins_per_order - 1) // 2)))
    top = (n - 1) // 2 if n % 2 else n // 2 - 1
    entries = {}
    for h in range(1, cfg.h_max + 1):
        k_h = int(round(h * bins_per_order))
        lo, hi = max(1, k_h - halfwidth), min(top, k_h + halfwidth)
        if lo > hi:
            entries[h] = (0.0, 0.0)
            continue
        k = lo + int(np.argmax(mags[lo : hi + 1]))
        phase = math.remainder(float(np.angle(X[k])) + math.pi / 2, 2 * math.pi)
        entries[h] = (float(mags[k]), phase)
    return HarmonicSpectrum(w.fundamental, entries)
