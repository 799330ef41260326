"""Threshold-exceedance bursts and their size/duration statistics.

A burst opens where the series crosses the threshold upwards and closes at
the next downward crossing. Crossing times are found by linear
interpolation between samples and the size is the exact integral of the
piecewise-linear path above the threshold.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import optimize

from . import _io
from .errors import FitError, ParameterDomainError, SizeError

__all__ = [
    "BurstRecord",
    "Bursts",
    "PdfEstimate",
    "FitResult",
    "detect_bursts",
    "resolve_threshold",
    "estimate_pdf",
    "fit_power_law",
    "predicted_exponents",
    "turnover_point",
    "default_duration_range",
    "size_fit_range",
    "DEFAULT_BINS_PER_DECADE",
]

DEFAULT_BINS_PER_DECADE = 10


@dataclass(frozen=True)
class BurstRecord:
    start: int
    duration_T: float
    size_e: float


@dataclass(frozen=True)
class Bursts:
    """Column view of a burst list: one array per field."""

    start: np.ndarray
    duration: np.ndarray
    size: np.ndarray
    end: np.ndarray

    def __len__(self) -> int:
        return len(self.start)

    def __getitem__(self, i) -> BurstRecord:
        return BurstRecord(int(self.start[i]), float(self.duration[i]), float(self.size[i]))

    def __iter__(self):
        return (self[i] for i in range(len(self)))

    def records(self) -> list[BurstRecord]:
        return list(self)

    @classmethod
    def concat(cls, parts) -> "Bursts":
        parts = list(parts)
        if not parts:
            return _empty()
        return cls(*(np.concatenate([getattr(p, f) for p in parts]) for f in ("start", "duration", "size", "end")))

    def to_csv(self, path) -> None:
        _io.write_csv(path, "start,duration,size", self.start, self.duration, self.size)


def _empty() -> Bursts:
    z = np.zeros(0)
    return Bursts(np.zeros(0, dtype=np.int64), z, z.copy(), np.zeros(0, dtype=np.int64))


def resolve_threshold(values: np.ndarray, threshold) -> float:
    """Turn ``'mean'``, ``'zero'`` or a number into a threshold level."""
    if isinstance(threshold, str):
        if threshold == "mean":
            return float(np.mean(values))
        if threshold == "zero":
            return 0.0
        return float(threshold)
    return float(threshold)


def detect_bursts(series, threshold="mean", dt: float | None = None) -> Bursts:
    """Bursts of ``series`` above ``threshold``.

    ``series`` is a :class:`~lfsmkit.generator.TimeSeries` or a plain array
    (then ``dt`` defaults to 1). Exceedances already in progress at the first
    sample or unfinished at the last are dropped, as are excursions so small
    that the interpolated duration rounds to zero.

    Returns
    -------
    Bursts
        ``start`` is the index of the first sample above threshold,
        ``end`` the last; ``duration`` is the interpolated crossing interval
        times ``dt`` and ``size`` the area above threshold (x * t units).
    """
    if hasattr(series, "values"):
        y = np.asarray(series.values, dtype=float)
        dt = series.dt if dt is None else dt
    else:
        y = np.asarray(series, dtype=float)
    dt = 1.0 if dt is None else float(dt)
    if y.size < 2:
        raise SizeError("burst detection needs at least 2 samples")
    level = resolve_threshold(y, threshold)

    a = y - level
    above = a > 0
    edge = np.diff(above.astype(np.int8))
    ups = np.flatnonzero(edge == 1)  # a[i] <= 0 < a[i+1]
    downs = np.flatnonzero(edge == -1)  # a[j] > 0 >= a[j+1]
    if ups.size == 0 or downs.size == 0:
        return _empty()
    downs = downs[downs > ups[0]]
    ups = ups[: downs.size]
    if ups.size == 0:
        return _empty()

    t_up = ups + (-a[ups]) / (a[ups + 1] - a[ups])
    t_dn = downs + a[downs] / (a[downs] - a[downs + 1])

    # trapezoid areas of fully-above segments, plus the two end triangles
    seg = 0.5 * (a[:-1] + a[1:])
    csum = np.concatenate([[0.0], np.cumsum(seg)])
    interior = csum[downs] - csum[ups + 1]
    head = 0.5 * a[ups + 1] * (ups + 1 - t_up)
    tail = 0.5 * a[downs] * (t_dn - downs)
    size = (interior + head + tail) * dt
    duration = (t_dn - t_up) * dt
    # excursions of a few ulps can interpolate to zero length; drop them
    ok = duration > 0
    return Bursts(start=ups[ok] + 1, duration=duration[ok], size=size[ok], end=downs[ok])


# -- pdf estimation --------------------------------------------------------


@dataclass(frozen=True)
class PdfEstimate:
    bin_centers: np.ndarray
    densities: np.ndarray
    counts: np.ndarray
    bin_edges_lo: np.ndarray
    bin_edges_hi: np.ndarray
    n_samples: int

    @property
    def bin_widths(self) -> np.ndarray:
        return self.bin_edges_hi - self.bin_edges_lo

    def to_csv(self, path) -> None:
        _io.write_csv(path, "center,density,count", self.bin_centers, self.densities, self.counts)


def estimate_pdf(samples, bins_per_decade: int = DEFAULT_BINS_PER_DECADE) -> PdfEstimate:
    """Logarithmically binned density of positive samples.

    Bin edges sit on the fixed lattice ``10**(k / bins_per_decade)``, so
    estimates from different data sets share bins. Empty bins are omitted.
    """
    x = np.asarray(samples, dtype=float).ravel()
    if x.size < 50:
        raise SizeError(f"pdf estimation needs >= 50 samples, got {x.size}")
    if np.any(~(x > 0)):
        raise ParameterDomainError("pdf estimation needs strictly positive samples")
    b = int(bins_per_decade)
    # guard against log10 rounding just below an exact lattice point
    k = np.floor(b * np.log10(x) + 1e-9).astype(np.int64)
    occupied, counts = np.unique(k, return_counts=True)
    lo = 10.0 ** (occupied / b)
    hi = 10.0 ** ((occupied + 1) / b)
    dens = counts / (x.size * (hi - lo))
    return PdfEstimate(
        bin_centers=np.sqrt(lo * hi),
        densities=dens,
        counts=counts,
        bin_edges_lo=lo,
        bin_edges_hi=hi,
        n_samples=int(x.size),
    )


# -- power-law fitting -----------------------------------------------------


@dataclass(frozen=True)
class FitResult:
    exponent: float
    fit_range: tuple[float, float]
    stderr: float
    method: str
    n_used: int

    def to_dict(self) -> dict:
        return {
            "exponent": self.exponent,
            "fit_range": list(self.fit_range),
            "stderr": self.stderr,
            "method": self.method,
            "n_used": self.n_used,
        }


def _truncated_nll(alpha: float, logx_sum: float, n: int, lo: float, hi: float) -> float:
    """Negative log-likelihood of ``x**-alpha`` normalized on ``[lo, hi]``."""
    span = np.log(hi / lo)
    s = 1.0 - alpha
    if abs(s) < 1e-9:
        log_norm = np.log(span)
    elif s < 0:
        log_norm = s * np.log(lo) + np.log(-np.expm1(s * span)) - np.log(-s)
    else:
        log_norm = s * np.log(hi) + np.log(-np.expm1(-s * span)) - np.log(s)
    return n * log_norm + alpha * logx_sum


def _fit_mle(x: np.ndarray, lo: float, hi: float) -> FitResult:
    sel = x[(x >= lo) & (x <= hi)]
    if sel.size < 100:
        raise FitError(f"mle fit needs >= 100 samples in [{lo:g}, {hi:g}], got {sel.size}")
    s = float(np.sum(np.log(sel)))
    nll = lambda a: _truncated_nll(a, s, sel.size, lo, hi)
    res = optimize.minimize_scalar(nll, bounds=(1e-3, 10.0), method="bounded", options={"xatol": 1e-10})
    a = float(res.x)
    h = 1e-4
    curv = (nll(a + h) - 2 * nll(a) + nll(a - h)) / h**2
    stderr = float(1.0 / np.sqrt(curv)) if curv > 0 else float("inf")
    return FitResult(a, (float(lo), float(hi)), stderr, "mle", int(sel.size))


def _fit_logls(pdf: PdfEstimate, lo: float, hi: float) -> FitResult:
    sel = (pdf.bin_edges_lo >= lo * (1 - 1e-9)) & (pdf.bin_edges_hi <= hi * (1 + 1e-9))
    if np.count_nonzero(sel) < 3:
        raise FitError(f"log-log fit needs >= 3 occupied bins in [{lo:g}, {hi:g}]")
    lx = np.log(pdf.bin_centers[sel])
    ly = np.log(pdf.densities[sel])
    A = np.column_stack([np.ones_like(lx), lx])
    coef, *_ = np.linalg.lstsq(A, ly, rcond=None)
    dof = lx.size - 2
    if dof > 0:
        resid = ly - A @ coef
        cov = (resid @ resid / dof) * np.linalg.inv(A.T @ A)
        stderr = float(np.sqrt(cov[1, 1]))
    else:
        stderr = 0.0
    return FitResult(float(-coef[1]), (float(lo), float(hi)), stderr, "logls", int(pdf.counts[sel].sum()))


def fit_power_law(data, fit_range=None, method: str = "mle",
                  bins_per_decade: int = DEFAULT_BINS_PER_DECADE) -> FitResult:
    """Fit ``pdf ~ value**-exponent`` over ``fit_range``.

    ``data`` is either raw positive samples or a :class:`PdfEstimate`.
    ``method='mle'`` maximizes the likelihood of a power law truncated to
    ``fit_range`` (raw samples only); ``method='logls'`` regresses log density
    on log bin center for bins lying wholly inside the range.
    """
    if isinstance(data, PdfEstimate):
        if method != "logls":
            raise FitError("a binned pdf can only be fitted with method='logls'")
        pdf, x = data, None
    else:
        x = np.asarray(data, dtype=float).ravel()
        x = x[x > 0]
        pdf = None
    if fit_range is None:
        if x is None:
            fit_range = (pdf.bin_edges_lo[0], pdf.bin_edges_hi[-1])
        else:
            fit_range = (float(x.min()), float(x.max()))
    lo, hi = map(float, fit_range)
    if not (0 < lo < hi) or not np.isfinite(hi):
        raise FitError(f"degenerate fit range [{lo!r}, {hi!r}]")
    if method == "mle":
        return _fit_mle(x, lo, hi)
    if method == "logls":
        if pdf is None:
            pdf = estimate_pdf(x, bins_per_decade)
        return _fit_logls(pdf, lo, hi)
    raise FitError(f"unknown fit method {method!r}")


def predicted_exponents(H: float) -> tuple[float, float]:
    """Burst duration and size exponents ``(2 - H, 2 / (1 + H))``."""
    if not (0.0 < H < 1.0):
        raise ParameterDomainError(f"H={H!r} violates 0 < H < 1")
    return 2.0 - H, 2.0 / (1.0 + H)


def default_duration_range(n: int, dt: float) -> tuple[float, float]:
    """Duration fit range ``[10 dt, n dt / 100]``."""
    return 10.0 * dt, n * dt / 100.0


def _local_slopes(lx: np.ndarray, ly: np.ndarray, half: int) -> np.ndarray:
    """Least-squares slope over a window of ``2 * half + 1`` points at each interior point."""
    out = np.full(lx.size, np.nan)
    for i in range(half, lx.size - half):
        u = lx[i - half:i + half + 1]
        v = ly[i - half:i + half + 1]
        du = u - u.mean()
        out[i] = du @ (v - v.mean()) / (du @ du)
    return out


def turnover_point(pdf: PdfEstimate, min_count: int = 20, half_window: int = 2) -> float:
    """Small-value turnover: where the log-log pdf bends most sharply.

    Local slopes are least-squares fits over ``2 * half_window + 1``
    neighbouring bins with at least ``min_count`` samples each. The turnover
    is the bin centre of the most negative slope change, searched only below
    the median bin (the large-value cutoff also bends the curve downward).
    """
    keep = pdf.counts >= min_count
    lx = np.log(pdf.bin_centers[keep])
    ly = np.log(pdf.densities[keep])
    if lx.size < 2 * half_window + 3:
        raise FitError("too few populated bins to locate a turnover")
    slope = _local_slopes(lx, ly, half_window)
    curv = np.diff(slope) / np.diff(lx)
    centre = 0.5 * (lx[:-1] + lx[1:])
    cdf = np.cumsum(pdf.counts[keep]) / pdf.counts[keep].sum()
    below = cdf[:-1] <= 0.5
    curv = np.where(below & np.isfinite(curv), curv, np.inf)
    if not np.isfinite(curv).any():
        raise FitError("no curvature estimate below the median bin")
    return float(np.exp(centre[int(np.argmin(curv))]))


def size_fit_range(bursts: Bursts, duration_range, tolerance: float = 0.12,
                   bins_per_decade: int = DEFAULT_BINS_PER_DECADE) -> tuple[float, float]:
    """Size range matching a duration range, kept above the small-size turnover.

    Each end is the median size of the bursts whose duration lies within
    ``tolerance`` (relative) of the corresponding duration bound; the lower
    end is raised to the turnover of the size pdf if that lies higher.
    """
    if len(bursts) == 0:
        raise FitError("no bursts")
    ends = []
    for T in duration_range:
        near = np.abs(bursts.duration / T - 1.0) <= tolerance
        if np.count_nonzero(near) < 5:
            raise FitError(f"fewer than 5 bursts with duration near {T:g}")
        ends.append(float(np.median(bursts.size[near])))
    lo, hi = ends
    lo = max(lo, turnover_point(estimate_pdf(bursts.size[bursts.size > 0], bins_per_decade)))
    if not lo < hi:
        raise FitError(f"size range collapsed to [{lo:g}, {hi:g}]")
    return lo, hi
