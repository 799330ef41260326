"""Simulation and verification toolkit for linear fractional stable motion.

Modules
-------
exponents   scaling-exponent arithmetic and the shared parameter object
stable      symmetric alpha-stable variates
generator   LFSM, fBm, oLm and WBm sample paths
analytic    exact one-time density and self-similar collapse
kinetic     residual checks of the fractional kinetic equation
bursts      threshold-exceedance bursts, log-binned pdfs, power-law fits
estimators  spectral beta, R/s Joseph exponent, pdf-peak H
cli         command-line front end
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    AccuracyError,
    AliasingError,
    FitError,
    ParameterDomainError,
    ResolutionError,
    SizeError,
    StatisticsError,
)
from .exponents import ExponentSet, ProcessParams, derive_exponents  # noqa: E402
from .stable import StableSample, sample_stable  # noqa: E402
from .generator import (  # noqa: E402
    TimeSeries,
    generate_ensemble,
    generate_fbm,
    generate_lfsm,
    generate_olm,
    generate_wbm,
)
from .analytic import GridDensity, charfn, collapse_residual, pdf_on_grid  # noqa: E402
from .kinetic import (  # noqa: E402
    GridSpec,
    ResidualReport,
    evolve_fourier,
    fbm_residual,
    lfsm_residual,
    riesz_derivative,
)
from .bursts import (  # noqa: E402
    BurstRecord,
    Bursts,
    FitResult,
    PdfEstimate,
    detect_bursts,
    estimate_pdf,
    fit_power_law,
    predicted_exponents,
)
from .estimators import ExponentEstimate, estimate_beta, estimate_H_peak, estimate_J  # noqa: E402

__all__ = [
    "__version__",
    "AccuracyError", "AliasingError", "FitError", "ParameterDomainError",
    "ResolutionError", "SizeError", "StatisticsError",
    "ExponentSet", "ProcessParams", "derive_exponents",
    "StableSample", "sample_stable",
    "TimeSeries", "generate_ensemble", "generate_fbm", "generate_lfsm", "generate_olm", "generate_wbm",
    "GridDensity", "charfn", "collapse_residual", "pdf_on_grid",
    "GridSpec", "ResidualReport", "evolve_fourier", "fbm_residual", "lfsm_residual", "riesz_derivative",
    "BurstRecord", "Bursts", "FitResult", "PdfEstimate",
    "detect_bursts", "estimate_pdf", "fit_power_law", "predicted_exponents",
    "ExponentEstimate", "estimate_beta", "estimate_H_peak", "estimate_J",
]
