"""Transformer losses, harmonic loss factor, temperature rise and derating."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

from .errors import InvalidArgument, UndefinedMetric
from .signal import HarmonicSpectrum


@dataclass(frozen=True)
class ThermalSpec:
    """Lumped single-body thermal model.

    ``emissivity_area`` is the product alpha*A (W/K); alpha and A never appear
    on their own. When ``time_constant`` is omitted it is m*c/(alpha*A); a
    supplied value more than 1% off that product only warns, since it may
    come from a heat-run measurement.
    """

    mass: float = 60.0
    specific_heat: float = 1300.0
    emissivity_area: float = 7.0
    time_constant: float | None = None

    def __post_init__(self):
        for name in ("mass", "specific_heat", "emissivity_area"):
            if not getattr(self, name) > 0:
                raise InvalidArgument(f"ThermalSpec.{name} must be positive")
        implied = self.mass * self.specific_heat / self.emissivity_area
        if self.time_constant is None:
            object.__setattr__(self, "time_constant", implied)
        elif not self.time_constant > 0:
            raise InvalidArgument("ThermalSpec.time_constant must be positive")
        elif abs(self.time_constant - implied) > 0.01 * implied:
            warnings.warn(
                f"time_constant {self.time_constant:g} s differs from m*c/(alpha*A) = "
                f"{implied:g} s by more than 1%",
                stacklevel=3,
            )


@dataclass(frozen=True)
class TransformerSpec:
    """Service transformer ratings and loss parameters.

    Defaults describe a 25 kVA single-phase pole-top unit with a 240 V
    secondary: rated current 104.17 A and roughly 375 W of load loss at
    rated sinusoidal current.
    """

    rated_current: float = 25_000 / 240
    r_dc: float = 0.0329
    p_ec_r: float = 0.05
    no_load_loss: float = 60.0
    stray_loss: float = 15.0
    thermal: ThermalSpec = field(default_factory=ThermalSpec)

    def __post_init__(self):
        if not self.rated_current > 0:
            raise InvalidArgument("rated_current must be positive")
        if not self.r_dc >= 0:
            raise InvalidArgument("r_dc must be >= 0")
        if not 0 <= self.p_ec_r <= 0.15:
            raise InvalidArgument(f"p_ec_r must lie in [0, 0.15], got {self.p_ec_r}")
        if self.no_load_loss < 0 or self.stray_loss < 0:
            raise InvalidArgument("no-load and stray losses must be >= 0")
        if isinstance(self.thermal, dict):
            object.__setattr__(self, "thermal", ThermalSpec(**self.thermal))


@dataclass(frozen=True)
class EddyLoss:
    watts: float
    per_unit: float


@dataclass(frozen=True)
class DeratingReport:
    thd: float
    eddy_loss_w: float
    eddy_loss_pu: float
    f_hl: float
    total_loss: float
    theta_final: float
    derating: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def _sums(s: HarmonicSpectrum) -> tuple[float, float]:
    plain = weighted = 0.0
    for h, m in s.magnitudes().items():
        plain += m * m
        weighted += m * m * h * h
    return plain, weighted


def thd(s: HarmonicSpectrum) -> float:
    """sqrt(sum_{h>=2} I_h^2) / I_1, as a fraction."""
    i1 = s.magnitude(1)
    if not i1 > 0:
        raise UndefinedMetric("THD is undefined without a nonzero fundamental")
    return math.sqrt(sum(m * m for h, m in s.magnitudes().items() if h >= 2)) / i1


def f_hl(s: HarmonicSpectrum) -> float:
    """Harmonic loss factor sum(I_h^2 h^2) / sum(I_h^2)."""
    plain, weighted = _sums(s)
    if not plain > 0:
        raise UndefinedMetric("harmonic loss factor is undefined for an all-zero spectrum")
    return weighted / plain


def eddy_loss(s: HarmonicSpectrum, t: TransformerSpec) -> EddyLoss:
    """Winding loss including the frequency-dependent eddy term.

    watts = I1^2 R_dc + P_EC-R R_dc sum(I_h^2 h^2). The per-unit figure is
    P_EC-R sum(I_h^2 h^2) / sum(I_h^2), so a pure fundamental reports
    exactly P_EC-R; an empty spectrum reports zero.
    """
    plain, weighted = _sums(s)
    i1 = s.magnitude(1)
    watts = i1 * i1 * t.r_dc + t.p_ec_r * t.r_dc * weighted
    per_unit = t.p_ec_r * weighted / plain if plain > 0 else 0.0
    return EddyLoss(watts, per_unit)


def derating(f_hl_value: float, t: TransformerSpec | float) -> float:
    """Largest per-unit RMS load current keeping winding loss at its rated value.

    sqrt((1 + P_EC-R) / (1 + F_HL * P_EC-R)). ``t`` may be a spec or a bare
    P_EC-R value.
    """
    p = t.p_ec_r if isinstance(t, TransformerSpec) else float(t)
    if p < 0:
        raise InvalidArgument("p_ec_r must be >= 0")
    if not f_hl_value >= 1:
        raise InvalidArgument(f"harmonic loss factor must be >= 1, got {f_hl_value}")
    if f_hl_value == 1:
        return 1.0
    return math.sqrt((1 + p) / (1 + f_hl_value * p))


def total_loss(s: HarmonicSpectrum, t: TransformerSpec) -> float:
    return t.no_load_loss + eddy_loss(s, t).watts + t.stray_loss


def theta_rise(power: float, th: ThermalSpec, t: float = math.inf) -> float:
    """Temperature rise above ambient (K) after ``t`` seconds at constant power.

    theta_final = P / (alpha*A); theta(t) = theta_final (1 - exp(-t/tau)).
    ``t = math.inf`` gives the steady state.
    """
    if t < 0:
        raise InvalidArgument(f"time must be >= 0, got {t}")
    if power < 0:
        raise InvalidArgument(f"power must be >= 0, got {power}")
    theta_final = power / th.emissivity_area
    if math.isinf(t):
        return theta_final
    return theta_final * -math.expm1(-t / th.time_constant)


def assess(s: HarmonicSpectrum, t: TransformerSpec) -> DeratingReport:
    """All metrics for one spectrum."""
    loss = eddy_loss(s, t)
    f = f_hl(s)
    total = total_loss(s, t)
    return DeratingReport(
        thd=thd(s),
        eddy_loss_w=loss.watts,
        eddy_loss_pu=loss.per_unit,
        f_hl=f,
        total_loss=total,
        theta_final=theta_rise(total, t.thermal),
        derating=derating(f, t),
    )
