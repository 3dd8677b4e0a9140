"""Harmonic analysis of residential load currents and service-transformer derating."""

__version__ = "0.1.0"

from .errors import (
    AliasingError,
    ConfigError,
    HarmonicDeratingError,
    InsufficientResolution,
    InvalidArgument,
    SimulationError,
    UndefinedMetric,
    WaveformFormatError,
)
from .signal import HarmonicSpectrum, Waveform, rms, synthesize
from .spectral import SpectralConfig, Window, analyze, dft, dft_direct, fft
from .xfmr import (
    DeratingReport,
    ThermalSpec,
    TransformerSpec,
    assess,
    derating,
    eddy_loss,
    f_hl,
    theta_rise,
    thd,
    total_loss,
)
from .loadsim import (
    House,
    LoadSignature,
    RectifierParams,
    aggregate,
    builtin_signatures,
    run_rectifier,
    simulate_rectifier,
)
from .scenario import ScenarioDef, ScenarioResult, builtin_scenarios, run, run_all
