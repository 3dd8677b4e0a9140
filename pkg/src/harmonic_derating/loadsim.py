"""Household load currents at the service-transformer secondary.

Two routes are provided. Harmonic-signature templates scale a per-kW
spectrum by appliance power and are phasor-summed over houses; this is what
the scenario pipeline uses. ``simulate_rectifier`` is a small time-domain
model of a diode bridge with a DC-link capacitor, for generating a
capacitor-input current from first principles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import ConfigError, InvalidArgument, SimulationError
from .signal import HarmonicSpectrum, Waveform

NOMINAL_VOLTAGE = 240.0
NOMINAL_FREQUENCY = 60.0
PV_MAX_THD = 0.05


@dataclass(frozen=True)
class LoadSignature:
    """Harmonic template of one appliance type.

    ``spectrum_per_kw`` holds RMS amperes per kW drawn at the nominal
    voltage. Generators (PV) carry a fundamental at phase pi, so scaling by
    a positive output injects current against the loads.
    """

    name: str
    rated_power: float
    spectrum_per_kw: HarmonicSpectrum
    generator: bool = False

    def __post_init__(self):
        if self.spectrum_per_kw.magnitude(1) <= 0:
            raise ConfigError(f"signature {self.name!r} needs a positive fundamental")
        if not self.rated_power >= 0:
            raise ConfigError(f"signature {self.name!r} has negative rated power")

    @classmethod
    def from_fractions(
        cls,
        name: str,
        rated_power: float,
        fractions: Mapping[int, float],
        phases: Mapping[int, float] | None = None,
        generator: bool = False,
        voltage: float = NOMINAL_VOLTAGE,
        fundamental: float = NOMINAL_FREQUENCY,
    ) -> "LoadSignature":
        """Build from harmonic magnitudes given as fractions of the fundamental."""
        phases = dict(phases or {})
        base = 1000.0 / voltage
        offset = math.pi if generator else 0.0
        entries = {1: (base, offset)}
        for h, frac in fractions.items():
            h = int(h)
            if h == 1:
                continue
            if not (frac >= 0 and math.isfinite(frac)):
                raise ConfigError(f"signature {name!r}: fraction for order {h} must be finite and >= 0")
            entries[h] = (base * frac, phases.get(h, offset))
        return cls(name, rated_power, HarmonicSpectrum(fundamental, entries), generator)

    @property
    def fractions(self) -> dict[int, float]:
        i1 = self.spectrum_per_kw.magnitude(1)
        return {h: m / i1 for h, m in self.spectrum_per_kw.magnitudes().items() if h != 1}

    @property
    def thd(self) -> float:
        return math.sqrt(sum(f * f for f in self.fractions.values()))

    def spectrum(self, kw: float | None = None) -> HarmonicSpectrum:
        """Spectrum at ``kw`` (default: rated power)."""
        kw = self.rated_power if kw is None else kw
        return self.spectrum_per_kw.scaled(kw)


def validate_signature(sig: LoadSignature) -> None:
    """Qualitative checks a template must pass before use.

    VFD-type templates must have h3 > h5 > h7; generator templates must stay
    under 5% THD.
    """
    if sig.generator and sig.thd >= PV_MAX_THD:
        raise ConfigError(f"generator signature {sig.name!r} has THD {sig.thd:.2%}, must be < 5%")
    if "vfd" in sig.name.lower():
        f = sig.fractions
        h3, h5, h7 = f.get(3, 0.0), f.get(5, 0.0), f.get(7, 0.0)
        if not h3 > h5 > h7:
            raise ConfigError(f"VFD signature {sig.name!r} needs h3 > h5 > h7, got {h3}, {h5}, {h7}")


# Default templates. Percentages are plausible for each converter type but
# are not measurements; swap in measured spectra through the JSON config.
_DEFAULT_TEMPLATES = (
    # rectifier + buck DC-DC: desktop, home entertainment
    ("desktop", 0.3, {3: 0.40, 5: 0.24, 7: 0.12, 9: 0.06, 11: 0.04, 13: 0.03}, False),
    # rectifier + flyback DC-DC: laptop charger
    ("laptop", 0.1, {3: 0.45, 5: 0.30, 7: 0.16, 9: 0.08, 11: 0.05, 13: 0.03}, False),
    # VFD + induction motor: HVAC, washer, dryer
    ("vfd", 1.5, {3: 0.12, 5: 0.04, 7: 0.02, 9: 0.01, 11: 0.005, 13: 0.003}, False),
    # resistive and motor base load: lighting, water heating, cooking
    ("linear", 0.3, {}, False),
    # boost converter + inverter with output filter: PV, one unit
    ("pv", 3.5, {5: 0.008, 7: 0.006, 11: 0.012, 13: 0.010}, True),
)


def builtin_signatures() -> list[LoadSignature]:
    sigs = [
        LoadSignature.from_fractions(name, kw, fractions, generator=gen)
        for name, kw, fractions, gen in _DEFAULT_TEMPLATES
    ]
    for s in sigs:
        validate_signature(s)
    return sigs


def signature_map(signatures: Iterable[LoadSignature] | None = None) -> dict[str, LoadSignature]:
    return {s.name: s for s in (builtin_signatures() if signatures is None else signatures)}


@dataclass(frozen=True)
class House:
    appliances: tuple[tuple[LoadSignature, int], ...] = ()
    pv_units: int = 0

    def __post_init__(self):
        object.__setattr__(self, "appliances", tuple((s, int(c)) for s, c in self.appliances))
        if any(c < 0 for _, c in self.appliances) or self.pv_units < 0:
            raise InvalidArgument("appliance counts and pv_units must be >= 0")

    @property
    def load_kw(self) -> float:
        return sum(s.rated_power * c for s, c in self.appliances)


def pv_signature(signatures: Sequence[LoadSignature] | None) -> LoadSignature:
    for s in signatures or builtin_signatures():
        if s.generator:
            return s
    raise ConfigError("no generator (PV) signature available")


def aggregate(
    houses: Sequence[House],
    pv_output_per_unit: float,
    pv: LoadSignature | None = None,
    fundamental: float = NOMINAL_FREQUENCY,
) -> HarmonicSpectrum:
    """Phasor sum of every appliance and PV unit over all houses.

    Summation order is fixed (house index, then appliance index, then PV),
    which makes the result bit-reproducible.
    """
    pv = pv or pv_signature(None)
    total: dict[int, complex] = {}

    def add(spec: HarmonicSpectrum):
        for h, p in spec.phasors().items():
            total[h] = total[h] + p if h in total else p

    for house in houses:
        for sig, count in house.appliances:
            if count:
                add(sig.spectrum(sig.rated_power * count))
        if house.pv_units:
            add(pv.spectrum(pv_output_per_unit * house.pv_units))
    return HarmonicSpectrum.from_phasors(total, fundamental)


def net_load_kw(spectrum: HarmonicSpectrum, voltage: float = NOMINAL_VOLTAGE) -> float:
    """Signed active power implied by the fundamental, assuming unity displacement."""
    return spectrum.magnitude(1) * math.cos(spectrum.phase(1)) * voltage / 1000.0


# --- diode-bridge rectifier -------------------------------------------------


@dataclass(frozen=True)
class RectifierParams:
    """Full-wave diode bridge fed through source R-L into C parallel R_load.

    ``duration`` is the length of the returned record; the solver runs an
    extra ``discard_periods`` fundamental periods first to let the startup
    transient die out.
    """

    source_rms_voltage: float = NOMINAL_VOLTAGE
    source_resistance: float = 0.1
    source_inductance: float = 0.5e-3
    dc_capacitance: float = 470e-6
    dc_load_resistance: float = 60.0
    timestep: float = 50e-6
    duration: float = 0.5
    frequency: float = NOMINAL_FREQUENCY
    discard_periods: int = 5
    max_iterations: int = 20

    def __post_init__(self):
        for name in (
            "source_rms_voltage",
            "source_resistance",
            "source_inductance",
            "dc_capacitance",
            "dc_load_resistance",
            "timestep",
            "duration",
            "frequency",
        ):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise InvalidArgument(f"RectifierParams.{name} must be positive, got {v}")
        if self.timestep > 1 / (20 * self.frequency) * (1 + 1e-9):
            raise InvalidArgument(
                f"timestep {self.timestep:g} s exceeds 1/(20 f) = {1 / (20 * self.frequency):g} s"
            )
        if self.discard_periods < 0 or self.max_iterations < 1:
            raise InvalidArgument("discard_periods must be >= 0 and max_iterations >= 1")


@dataclass(frozen=True)
class RectifierResult:
    waveform: Waveform
    dc_voltage: np.ndarray
    dc_current: np.ndarray
    max_iterations: int
    total_iterations: int
    discarded_samples: int
    discarded_periods: int

    def diagnostics(self) -> dict:
        return {
            "max_iterations_per_step": self.max_iterations,
            "total_iterations": self.total_iterations,
            "discarded_periods": self.discarded_periods,
            "discarded_samples": self.discarded_samples,
            "min_dc_current_a": float(self.dc_current.min()),
            "final_dc_voltage_v": float(self.dc_voltage[-1]),
        }


_DIVERGENCE_LIMIT = 1e6


def run_rectifier(p: RectifierParams) -> RectifierResult:
    """Trapezoidal companion-model simulation with ideal diodes.

    The bridge has three states: +1 (D1/D4 conduct, line current >= 0),
    -1 (D2/D3, line current <= 0) and 0 (blocking). Each step starts from
    the previous state and re-solves until the state is consistent with the
    sign of the computed current.
    """
    h = p.timestep
    R, L, C, Rl = p.source_resistance, p.source_inductance, p.dc_capacitance, p.dc_load_resistance
    w = 2 * math.pi * p.frequency
    vpk = math.sqrt(2) * p.source_rms_voltage

    n_discard = int(round(p.discard_periods / p.frequency / h))
    n_keep = int(round(p.duration / h))
    n_total = n_discard + n_keep

    g_l = h / (2 * L)
    g_c = 2 * C / h
    G = g_c + 1 / Rl
    r_loop = R + 1 / g_l + 1 / G
    eps = 1e-9 * vpk / R

    line = np.empty(n_total)
    vdc = np.empty(n_total)
    idc = np.empty(n_total)

    i, v_l, v_c, i_c = 0.0, 0.0, 0.0, 0.0
    mode = 0
    worst = total = 0
    for n in range(n_total):
        vs = vpk * math.sin(w * (n + 1) * h)
        hist_l = i + g_l * v_l
        hist_c = i_c + g_c * v_c

        def solve(s):
            if s == 0:
                return 0.0, hist_c / G
            cur = (vs + hist_l / g_l - s * hist_c / G) / r_loop
            return cur, (s * cur + hist_c) / G

        for it in range(1, p.max_iterations + 1):
            cur, vc_new = solve(mode)
            if mode != 0 and mode * cur < -eps:
                new_mode = 0
            elif mode == 0:
                new_mode = 0
                for s in (1, -1):
                    trial, _ = solve(s)
                    if s * trial > eps:
                        new_mode = s
                        break
            else:
                new_mode = mode
            if new_mode == mode:
                break
            mode = new_mode
        else:
            raise SimulationError(
                f"diode states did not settle within {p.max_iterations} iterations "
                f"at t = {(n + 1) * h:g} s (timestep {h:g} s)"
            )
        worst = max(worst, it)
        total += it

        if mode == 0:
            cur = 0.0
            v_l = 0.0
        else:
            v_l = (cur - hist_l) / g_l
        i = cur
        i_c = g_c * vc_new - hist_c
        v_c = vc_new
        if not abs(i) < _DIVERGENCE_LIMIT or not math.isfinite(v_c):
            raise SimulationError(
                f"line current diverged ({i:g} A) at t = {(n + 1) * h:g} s (timestep {h:g} s)"
            )
        line[n] = i
        vdc[n] = v_c
        idc[n] = mode * i

    wf = Waveform(line[n_discard:], 1 / h, p.frequency)
    return RectifierResult(
        waveform=wf,
        dc_voltage=vdc[n_discard:],
        dc_current=idc[n_discard:],
        max_iterations=worst,
        total_iterations=total,
        discarded_samples=n_discard,
        discarded_periods=p.discard_periods,
    )


def simulate_rectifier(p: RectifierParams) -> Waveform:
    return run_rectifier(p).waveform
