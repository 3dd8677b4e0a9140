"""Exception hierarchy. Each class carries the code the CLI prints and exits with."""


class HarmonicDeratingError(Exception):
    code = "E_GENERIC"
    exit_status = 1


class InvalidArgument(HarmonicDeratingError, ValueError):
    code = "E_VALUE"
    exit_status = 8


class AliasingError(InvalidArgument):
    """A harmonic sits at or above half the sample rate."""

    code = "E_NYQUIST"
    exit_status = 4

    def __init__(self, message: str, order: int | None = None):
        super().__init__(message)
        self.order = order


class InsufficientResolution(InvalidArgument):
    code = "E_RESOLUTION"
    exit_status = 8


class UndefinedMetric(InvalidArgument):
    """THD or F_HL requested on a spectrum without the needed content."""

    code = "E_UNDEFINED"
    exit_status = 8


class WaveformFormatError(HarmonicDeratingError, ValueError):
    code = "E_CSV"
    exit_status = 3

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ConfigError(HarmonicDeratingError, ValueError):
    code = "E_CONFIG"
    exit_status = 5


class SimulationError(HarmonicDeratingError, RuntimeError):
    code = "E_SOLVER"
    exit_status = 7
