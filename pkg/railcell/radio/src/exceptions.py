"""Simulation configuration and runtime exceptions."""


class SimulationError(Exception):
    """Base exception for simulator failures."""

    def __init__(self, message: str, error_code: str | None = None, details: dict | None = None):
        super().__init__(message)
        self.error_code = error_code
        self.details = details or {}


class InvalidConfigurationError(SimulationError):
    """Raised when a scenario parameter is invalid."""

    def __init__(self, message: str, details: dict | None = None, error_code: str = "CFG_001"):
        super().__init__(message, error_code, details)


class ConfigParseError(InvalidConfigurationError):
    """Raised when a config line or value cannot be parsed."""

    def __init__(self, key: str | None, line_number: int, reason: str):
        location = f"line {line_number}" if key is None else f"key '{key}' (line {line_number})"
        message = f"Malformed config at {location}: {reason}"
        super().__init__(
            message,
            {"key": key, "line": line_number, "reason": reason},
            error_code="CFG_002",
        )
        self.key = key
        self.line_number = line_number


class UnknownConfigKeyError(InvalidConfigurationError):
    """Raised when a config file names a key the simulator does not know."""

    def __init__(self, key: str, line_number: int, known_keys: list | None = None):
        message = f"Unknown config key '{key}' (line {line_number})"
        super().__init__(
            message,
            {"key": key, "line": line_number, "known_keys": known_keys},
            error_code="CFG_003",
        )
        self.key = key
        self.line_number = line_number


class ConfigRangeError(InvalidConfigurationError):
    """Raised when a config value lies outside its allowed range."""

    def __init__(self, key: str, value, allowed: str, line_number: int | None = None):
        where = "" if line_number is None else f" (line {line_number})"
        message = f"Value {value!r} for '{key}' is out of range{where}: expected {allowed}"
        super().__init__(
            message,
            {"key": key, "value": value, "allowed": allowed, "line": line_number},
            error_code="CFG_004",
        )
        self.key = key
        self.line_number = line_number


class CoverageError(SimulationError):
    """Raised when a UE or train position has no radio coverage."""

    def __init__(self, position_m: float, reason: str = "no visible radio unit"):
        message = f"No coverage at track position {position_m:.2f} m: {reason}"
        super().__init__(message, "SIM_001", {"position_m": position_m})


class AssociationError(SimulationError):
    """Raised when a UE has no valid serving set."""

    def __init__(self, ue: int, reason: str, details: dict | None = None):
        message = f"Invalid association for UE {ue}: {reason}"
        super().__init__(message, "SIM_002", {"ue": ue, **(details or {})})
