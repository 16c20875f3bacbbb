"""Exception hierarchy shared by the sampling, oracle and CLI layers."""

from typing import Optional


class DensitySamplingError(Exception):
    """Root of every error raised by this package."""


class ConfigValidationError(DensitySamplingError, ValueError):
    pass


class GridMismatchError(ConfigValidationError):
    pass


class UnsupportedOperationError(DensitySamplingError, TypeError):
    pass


class UnknownScenarioError(DensitySamplingError, KeyError):
    def __init__(self, name: str, known: list[str]):
        self.name = name
        self.known = known
        super().__init__(f"unknown scenario '{name}' (known: {', '.join(known)})")

    def __str__(self) -> str:
        return self.args[0]


class NodeRegionError(DensitySamplingError, ArithmeticError):
    """Velocity requested where the density is below the node floor."""

    def __init__(self, x: float, t: float, rho: float, floor: float):
        self.x = x
        self.t = t
        self.rho = rho
        self.floor = floor
        super().__init__(
            f"density {rho:.3e} below velocity floor {floor:.1e} at x={x!r}, t={t!r}"
        )


class NodeEncounterError(NodeRegionError):
    """A guidance trajectory ran into a node region."""

    def __init__(
        self,
        x: float,
        t: float,
        rho: float,
        floor: float,
        last_good_step: int,
        last_good_position: Optional[float],
    ):
        super().__init__(x, t, rho, floor)
        self.last_good_step = last_good_step
        self.last_good_position = last_good_position

    def diagnostics(self) -> str:
        return (
            f"node encounter at t={self.t!r}, x={self.x!r} (rho={self.rho:.3e}); "
            f"last good step {self.last_good_step} at x={self.last_good_position!r}"
        )


class BoundViolationError(DensitySamplingError, ArithmeticError):
    """A proposed point had density above the sampling bound (stale rho_max)."""

    def __init__(self, x: float, rho: float, bound: float):
        self.x = x
        self.rho = rho
        self.bound = bound
        super().__init__(
            f"density {rho!r} at x={x!r} exceeds sampling bound {bound!r}; "
            "re-estimate rho_max"
        )


class QuantileBoundaryError(DensitySamplingError, ValueError):
    def __init__(self, p: float):
        self.p = p
        super().__init__(f"quantile P={p!r} must lie strictly inside (0, 1)")


class SamplingStalledError(DensitySamplingError, RuntimeError):
    """Acceptance-rejection made no progress (density vanishes under the bound)."""
