"""Exception types raised across the toolkit."""

from __future__ import annotations


class ParameterDomainError(ValueError):
    """A parameter lies outside the domain where the model is defined."""


class SizeError(ValueError):
    """A series or transform length is not supported."""


class AccuracyError(RuntimeError):
    """Numerical quadrature failed to reach the requested tolerance."""

    def __init__(self, message: str, achieved: float):
        super().__init__(f"{message} (achieved tolerance {achieved:.3g})")
        self.achieved = achieved


class ResolutionError(ValueError):
    """Grids are too coarse for the requested interpolation."""


class AliasingError(ValueError):
    """A field has not decayed at the grid edges; a periodic transform would alias."""

    def __init__(self, message: str, edge_mass: float):
        super().__init__(f"{message} (edge/peak ratio {edge_mass:.3g})")
        self.edge_mass = edge_mass


class FitError(ValueError):
    """Not enough data in the fit range, or the range is degenerate."""


class StatisticsError(ValueError):
    """Too few samples for a meaningful ensemble statistic."""
