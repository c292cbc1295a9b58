"""Exception hierarchy shared by every module."""


class StableLatError(Exception):
    pass


class ConfigError(StableLatError, ValueError):
    """Invalid parameters, dimension mismatch, incompatible inputs."""


class UnsupportedInputError(ConfigError):
    """The operation is not defined for this kind of integrand."""


class NumericalError(StableLatError, ArithmeticError):
    """Quadrature failure or a divergent integral."""
