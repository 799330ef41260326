"""Scaling exponents of linear fractional stable motion.

The self-similarity exponent of LFSM splits additively into a jump part
``L = 1/mu`` (Noah) and a memory part ``J = beta/2 - 1/2`` (Joseph)::

    H = L + J - 1/2 = 1/mu + beta/2 - 1

Burst statistics of a self-similar path follow from ``H`` alone: durations
scale with exponent ``2 - H`` and sizes with ``2/(1 + H)``.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from pathlib import Path

from .errors import ParameterDomainError

__all__ = [
    "ProcessParams",
    "ExponentSet",
    "derive_exponents",
    "hurst_from",
    "beta_from",
    "params_to_text",
    "params_from_text",
    "params_to_json",
    "params_from_json",
    "save_params",
    "load_params",
]

BETA_MIN = 1.0
BETA_MAX = 3.0


def _check_mu(mu: float) -> None:
    if not (0.0 < mu <= 2.0):
        raise ParameterDomainError(f"mu={mu!r} violates 0 < mu <= 2")


def _check_beta(beta: float) -> None:
    if not (BETA_MIN < beta < BETA_MAX):
        raise ParameterDomainError(f"beta={beta!r} violates {BETA_MIN:g} < beta < {BETA_MAX:g}")


def hurst_from(mu: float, beta: float) -> float:
    """Self-similarity exponent ``1/mu + beta/2 - 1``."""
    return 1.0 / mu + beta / 2.0 - 1.0


def beta_from(mu: float, H: float) -> float:
    """Memory exponent giving self-similarity ``H`` at stability index ``mu``."""
    return 2.0 * (H - 1.0 / mu + 1.0)


@dataclass(frozen=True)
class ProcessParams:
    """Parameters shared by generation, analytic densities and estimation.

    ``sigma`` is the scale in the characteristic function
    ``exp(-sigma |k|^mu t^(mu H))``; ``n`` is the path length in samples.
    """

    mu: float
    beta: float
    sigma: float = 1.0
    n: int = 65536
    dt: float = 1.0
    seed: int = 0

    def __post_init__(self):
        _check_mu(self.mu)
        _check_beta(self.beta)
        if not self.sigma > 0:
            raise ParameterDomainError(f"sigma={self.sigma!r} violates sigma > 0")
        if int(self.n) != self.n or self.n < 1:
            raise ParameterDomainError(f"n={self.n!r} violates n >= 1 (integer)")
        if not self.dt > 0:
            raise ParameterDomainError(f"dt={self.dt!r} violates dt > 0")
        if int(self.seed) != self.seed:
            raise ParameterDomainError(f"seed={self.seed!r} must be an integer")
        object.__setattr__(self, "mu", float(self.mu))
        object.__setattr__(self, "beta", float(self.beta))
        object.__setattr__(self, "sigma", float(self.sigma))
        object.__setattr__(self, "dt", float(self.dt))
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "seed", int(self.seed))

    @classmethod
    def with_H(cls, mu: float, H: float, **kwargs) -> "ProcessParams":
        """Build parameters from ``(mu, H)``, deriving ``beta``."""
        _check_mu(mu)
        return cls(mu=mu, beta=beta_from(mu, H), **kwargs)

    @property
    def H(self) -> float:
        return hurst_from(self.mu, self.beta)

    @property
    def J(self) -> float:
        return self.beta / 2.0 - 0.5

    @property
    def L(self) -> float:
        return 1.0 / self.mu

    def replace(self, **changes) -> "ProcessParams":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


@dataclass(frozen=True)
class ExponentSet:
    H: float
    J: float
    L: float
    duration_exp: float
    size_exp: float


def derive_exponents(params: ProcessParams) -> ExponentSet:
    """All scaling exponents implied by ``(mu, beta)``.

    Raises
    ------
    ParameterDomainError
        If ``mu`` or ``beta`` is out of range.
    """
    _check_mu(params.mu)
    _check_beta(params.beta)
    L = 1.0 / params.mu
    J = params.beta / 2.0 - 0.5
    H = L + J - 0.5
    return ExponentSet(H=H, J=J, L=L, duration_exp=2.0 - H, size_exp=2.0 / (1.0 + H))


# -- serialization ---------------------------------------------------------

_FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(ProcessParams)}
_INT_FIELDS = {"n", "seed"}


def _coerce(key: str, raw: str):
    if key in _INT_FIELDS:
        return int(raw)
    return float(raw)


def params_to_text(params: ProcessParams) -> str:
    """Flat ``key = value`` text, one field per line.

    Floats are written with ``repr`` so that reading back is bit-exact.
    """
    lines = [f"{k} = {v!r}" for k, v in params.to_dict().items()]
    return "\n".join(lines) + "\n"


def parse_kv(text: str) -> dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def params_from_text(text: str) -> ProcessParams:
    kv = parse_kv(text)
    unknown = set(kv) - set(_FIELD_TYPES)
    if unknown:
        raise ValueError(f"unknown parameter keys: {sorted(unknown)}")
    return ProcessParams(**{k: _coerce(k, v) for k, v in kv.items()})


def params_to_json(params: ProcessParams) -> str:
    return json.dumps(params.to_dict(), indent=2, sort_keys=True)


def params_from_json(text: str | dict) -> ProcessParams:
    data = json.loads(text) if isinstance(text, str) else dict(text)
    return ProcessParams(**{k: data[k] for k in _FIELD_TYPES if k in data})


def save_params(params: ProcessParams, path) -> None:
    path = Path(path)
    if path.suffix == ".json":
        path.write_text(params_to_json(params))
    else:
        path.write_text(params_to_text(params))


def load_params(path) -> ProcessParams:
    path = Path(path)
    text = path.read_text()
    if path.suffix == ".json":
        return params_from_json(text)
    return params_from_text(text)
