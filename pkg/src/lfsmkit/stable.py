"""Symmetric alpha-stable variates.

Standard variates have characteristic function ``exp(-|k|^mu)``; at
``mu = 2`` that is a Gaussian of variance 2, at ``mu = 1`` the standard
Cauchy law.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _io
from .errors import ParameterDomainError

__all__ = ["StableSample", "sample_stable", "stable_rng", "cms_transform"]


def stable_rng(seed: int, stream: int | None = None) -> np.random.Generator:
    """PCG64 generator fully determined by ``seed`` and an optional stream index.

    Streams are independent children of the same seed (``SeedSequence``
    spawn keys), so ensemble member ``i`` gets the same variates no matter
    how members are scheduled across workers.
    """
    if stream is None:
        ss = np.random.SeedSequence(int(seed))
    else:
        ss = np.random.SeedSequence(int(seed), spawn_key=(int(stream),))
    return np.random.Generator(np.random.PCG64(ss))


@dataclass(frozen=True)
class StableSample:
    values: np.ndarray
    mu: float
    seed: int

    def to_binary(self, path) -> None:
        _io.write_f8(path, self.values)

    def to_csv(self, path) -> None:
        _io.write_csv(path, "value", self.values)


def cms_transform(u: np.ndarray, w: np.ndarray, mu: float) -> np.ndarray:
    """Chambers-Mallows-Stuck map for the symmetric case.

    ``u`` is uniform on (-pi/2, pi/2), ``w`` standard exponential.
    """
    if mu == 1.0:
        return np.tan(u)
    cos_u = np.cos(u)
    return (np.sin(mu * u) / cos_u ** (1.0 / mu)) * (np.cos((1.0 - mu) * u) / w) ** ((1.0 - mu) / mu)


def sample_stable(n: int, mu: float, seed: int, stream: int | None = None) -> StableSample:
    """Draw ``n`` i.i.d. standard symmetric stable variates of index ``mu``."""
    if not (0.0 < mu <= 2.0):
        raise ParameterDomainError(f"mu={mu!r} violates 0 < mu <= 2")
    if n < 1:
        raise ParameterDomainError(f"n={n!r} violates n >= 1")
    rng = stable_rng(seed, stream)
    if mu == 2.0:
        values = np.sqrt(2.0) * rng.standard_normal(n)
    else:
        # open interval: the endpoints +-pi/2 make cos(u) vanish
        u = np.pi * (rng.random(n) - 0.5)
        u[u == -np.pi / 2] = np.nextafter(-np.pi / 2, 0.0)
        w = rng.standard_exponential(n)
        values = cms_transform(u, w, mu)
    return StableSample(values=values, mu=float(mu), seed=int(seed))
