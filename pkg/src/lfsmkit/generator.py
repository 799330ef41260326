"""Sample paths of LFSM and its limits by Fourier-domain fractional integration.

Stable noise is drawn on an oversampled periodic grid, filtered with a real
even gain whose low-frequency behaviour is ``|f|^-d`` with
``d = H - 1/mu = beta/2 - 1``, and a centered window of the result is summed
into a motion.

The gain is the square root of the circulant eigenvalues of the fractional
Gaussian noise covariance with memory exponent ``J``. At ``mu = 2`` the
increments are therefore exact fGn; at ``beta = 2`` the gain is identically
one and the path is a plain sum of stable noise (ordinary Levy motion).
"""

from __future__ import annotations

import functools
from pathlib import Path
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _io
from .errors import ParameterDomainError, SizeError
from .exponents import ProcessParams
from .stable import sample_stable

__all__ = [
    "TimeSeries",
    "OVERSAMPLE",
    "transform_length",
    "fgn_autocovariance",
    "fractional_gain",
    "generate_lfsm",
    "generate_fbm",
    "generate_olm",
    "generate_wbm",
    "generate_ensemble",
    "process_kind",
    "write_series",
]

OVERSAMPLE = 4
MAX_TRANSFORM = 2**30


def process_kind(params: ProcessParams) -> str:
    """Tag a parameter set as one of ``lfsm | fbm | olm | wbm``."""
    gaussian = params.mu == 2.0
    memoryless = params.beta == 2.0
    if gaussian and memoryless:
        return "wbm"
    if gaussian:
        return "fbm"
    if memoryless:
        return "olm"
    return "lfsm"


@dataclass(frozen=True)
class TimeSeries:
    """Uniformly sampled path; ``values[0] == 0`` for generated motions."""

    values: np.ndarray
    dt: float
    params: ProcessParams
    kind: str
    member: int | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values.setflags(write=False)

    def __len__(self) -> int:
        return len(self.values)

    @property
    def times(self) -> np.ndarray:
        return self.dt * np.arange(len(self.values))

    def increments(self) -> np.ndarray:
        return np.diff(self.values)

    def metadata(self) -> dict:
        return {
            "kind": self.kind,
            "member": self.member,
            "dt": self.dt,
            "n": len(self.values),
            "params": self.params.to_dict(),
            **self.meta,
        }

    def to_csv(self, path) -> None:
        idx = np.arange(len(self.values))
        _io.write_csv(path, "index,time,value", idx, self.times, self.values)

    def to_binary(self, path) -> None:
        _io.write_f8(path, self.values)

    def write_sidecar(self, path) -> None:
        _io.write_json(path, self.metadata())

    @classmethod
    def from_csv(cls, path, params: ProcessParams, kind: str = "lfsm") -> "TimeSeries":
        header, data = _io.read_csv(path)
        col = {name: i for i, name in enumerate(header)}
        values = np.ascontiguousarray(data[:, col["value"]])
        dt = float(data[1, col["time"]] - data[0, col["time"]]) if len(values) > 1 else params.dt
        return cls(values=values, dt=dt, params=params, kind=kind)


def transform_length(n: int) -> int:
    """Power-of-two FFT length holding at least ``OVERSAMPLE * n`` increments."""
    if n < 2:
        raise SizeError(f"n={n} too short; a path needs at least 2 samples")
    m = 1 << int(np.ceil(np.log2(OVERSAMPLE * n)))
    if m > MAX_TRANSFORM:
        raise SizeError(f"n={n} needs a transform of length {m} > {MAX_TRANSFORM}")
    return m


def fgn_autocovariance(J: float, lags: np.ndarray) -> np.ndarray:
    """Unit-variance fractional Gaussian noise autocovariance at integer lags."""
    k = np.abs(np.asarray(lags, dtype=float))
    h2 = 2.0 * J
    return 0.5 * ((k + 1.0) ** h2 - 2.0 * k**h2 + np.abs(k - 1.0) ** h2)


@functools.lru_cache(maxsize=16)
def fractional_gain(m: int, J: float) -> np.ndarray:
    """Real half-spectrum gain (length ``m//2 + 1``) for memory exponent ``J``.

    Square root of the eigenvalues of the circulant embedding of the fGn
    covariance; tiny negative eigenvalues from rounding are clipped to zero.
    """
    half = fgn_autocovariance(J, np.arange(m // 2 + 1))
    row = np.concatenate([half, half[-2:0:-1]])
    eig = np.fft.rfft(row).real
    gain = np.sqrt(np.clip(eig, 0.0, None))
    gain.setflags(write=False)
    return gain


def _check_generation(params: ProcessParams) -> None:
    H = params.H
    if not (0.0 < H < 1.0):
        raise ParameterDomainError(
            f"derived H={H:.6g} (mu={params.mu:g}, beta={params.beta:g}) violates 0 < H < 1"
        )


def generate_lfsm(params: ProcessParams, member: int | None = None) -> TimeSeries:
    """Generate one LFSM path of ``params.n`` samples.

    ``member`` selects an independent random stream of ``params.seed``; the
    same ``(params, member)`` always yields the same path.

    Raises
    ------
    ParameterDomainError
        If the derived ``H`` is outside (0, 1).
    SizeError
        If ``n`` is below 2 or needs a transform longer than ``2**30``.
    """
    _check_generation(params)
    n = params.n
    m = transform_length(n)
    noise = sample_stable(m, params.mu, params.seed, stream=member).values

    J = params.J
    if J == 0.5:
        increments = noise
    else:
        spectrum = np.fft.rfft(noise)
        spectrum *= fractional_gain(m, J)
        increments = np.fft.irfft(spectrum, n=m)

    start = (m - n) // 2
    window = increments[start:start + n]
    path = np.cumsum(window)
    path -= path[0]
    # noise has unit scale per sample; restore sigma and the time unit
    path *= params.sigma ** (1.0 / params.mu) * params.dt**params.H
    return TimeSeries(
        values=path,
        dt=params.dt,
        params=params,
        kind=process_kind(params),
        member=member,
        meta={"transform_length": m, "oversample": OVERSAMPLE},
    )


def generate_fbm(params: ProcessParams, member: int | None = None) -> TimeSeries:
    """Fractional Brownian motion: ``generate_lfsm`` with ``mu = 2``."""
    return generate_lfsm(params.replace(mu=2.0), member)


def generate_olm(params: ProcessParams, member: int | None = None) -> TimeSeries:
    """Ordinary Levy motion: ``generate_lfsm`` with ``beta = 2`` (no memory)."""
    return generate_lfsm(params.replace(beta=2.0), member)


def generate_wbm(params: ProcessParams, member: int | None = None) -> TimeSeries:
    """Wiener Brownian motion: ``mu = 2`` and ``beta = 2``."""
    return generate_lfsm(params.replace(mu=2.0, beta=2.0), member)


def generate_ensemble(params: ProcessParams, size: int, workers: int = 1) -> list[TimeSeries]:
    """``size`` independent paths, member ``i`` drawn from stream ``i``.

    Results are returned in member order regardless of ``workers``.
    """
    if size < 1:
        raise ParameterDomainError(f"ensemble size {size} violates size >= 1")
    if workers <= 1:
        return [generate_lfsm(params, i) for i in range(size)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda i: generate_lfsm(params, i), range(size)))


def write_series(series: TimeSeries, stem, fmt: str = "csv") -> list:
    """Write a path plus its JSON sidecar; returns the written paths."""
    stem = Path(stem)
    written = []
    if fmt == "binary":
        target = stem.with_suffix(".f8")
        series.to_binary(target)
    elif fmt == "json":
        target = stem.with_suffix(".json")
        _io.write_json(target, {"values": series.values.tolist(), **series.metadata()})
    else:
        target = stem.with_suffix(".csv")
        series.to_csv(target)
    written.append(target)
    if fmt != "json":
        side = stem.with_name(stem.name + ".meta.json")
        series.write_sidecar(side)
        written.append(side)
    return written

