"""Command-line front end: ``lfsmkit <command> [options]``.

Commands: ``generate``, ``verify-kinetic``, ``bursts``, ``estimate`` and
``full-experiment``. Every run writes its outputs plus ``manifest.json``
(configuration, seed scheme, versions, output checksums), ``run.cfg`` (the
resolved configuration, re-runnable with ``--config``) and ``timings.json``
into ``--out``. Wall-clock times live in their own file so that the
manifest of a repeated run is byte-identical.

Configuration precedence: built-in defaults < ``--config`` file < flags.
"""

from __future__ import annotations

import argparse
import hashlib
import platform
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
import scipy

from . import __version__, _io
from .bursts import (
    Bursts,
    default_duration_range,
    detect_bursts,
    estimate_pdf,
    fit_power_law,
    predicted_exponents,
    size_fit_range,
)
from .errors import (
    AccuracyError,
    AliasingError,
    FitError,
    ParameterDomainError,
    ResolutionError,
    SizeError,
    StatisticsError,
)
from .estimators import MIN_PATHS, estimate_beta, estimate_H_peak, estimate_J
from .exponents import ProcessParams, beta_from, derive_exponents, hurst_from, parse_kv
from .generator import TimeSeries, generate_ensemble, process_kind, write_series
from .kinetic import GridSpec, residual_convergence

COMMANDS = ("generate", "verify-kinetic", "bursts", "estimate", "full-experiment")
FORMATS = ("csv", "json", "binary")

# key -> parser for config-file values; flags use the same names
_PARAM_KEYS = {"mu": float, "beta": float, "H": float, "sigma": float, "n": int, "dt": float, "seed": int}
_RUN_KEYS = {
    "ensemble": int,
    "threshold": str,
    "bins_per_decade": int,
    "refine": int,
    "t": float,
    "grid_points": int,
    "half_width": float,
    "times": str,
    "format": str,
    "out": str,
    "workers": int,
}
_DEFAULTS = {
    "sigma": 1.0,
    "n": 65536,
    "dt": 1.0,
    "seed": 0,
    "ensemble": 1,
    "threshold": "mean",
    "bins_per_decade": 10,
    "refine": 1,
    "t": 1.0,
    "grid_points": GridSpec.n_points,
    "half_width": GridSpec.half_width,
    "times": None,
    "format": "csv",
    "out": "out",
    "workers": 1,
}
_FATAL = (ParameterDomainError, SizeError, FitError, StatisticsError, AccuracyError,
          AliasingError, ResolutionError, ValueError)


@dataclass(frozen=True)
class RunConfig:
    command: str
    params: ProcessParams
    ensemble_size: int = 1
    output_dir: Path = Path("out")
    format: str = "csv"
    threshold: str = "mean"
    bins_per_decade: int = 10
    refine: int = 1
    t: float = 1.0
    grid_points: int = GridSpec.n_points
    half_width: float = GridSpec.half_width
    times: tuple | None = None
    workers: int = 1
    inputs: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.ensemble_size < 1:
            raise ParameterDomainError(f"ensemble size {self.ensemble_size} violates ensemble >= 1")
        if self.format not in FORMATS:
            raise ParameterDomainError(f"format {self.format!r} not in {FORMATS}")
        if self.threshold not in ("mean", "zero"):
            try:
                float(self.threshold)
            except ValueError:
                raise ParameterDomainError(
                    f"threshold {self.threshold!r} must be 'mean', 'zero' or a number") from None
        if self.bins_per_decade < 1:
            raise ParameterDomainError("bins per decade must be >= 1")
        if self.workers < 1:
            raise ParameterDomainError("workers must be >= 1")

    def to_dict(self) -> dict:
        """Everything that determines the numerical outputs.

        The output directory, worker count and input paths are left out:
        they do not change the numbers, and keeping them out makes manifests
        comparable across runs.
        """
        return {
            "command": self.command,
            "params": self.params.to_dict(),
            "ensemble": self.ensemble_size,
            "format": self.format,
            "threshold": self.threshold,
            "bins_per_decade": self.bins_per_decade,
            "refine": self.refine,
            "t": self.t,
            "grid_points": self.grid_points,
            "half_width": self.half_width,
            "times": list(self.times) if self.times else None,
        }

    def to_text(self) -> str:
        d = self.to_dict()
        lines = [f"command = {self.command}"]
        lines += [f"{k} = {v!r}" for k, v in d["params"].items()]
        for k in ("ensemble", "threshold", "bins_per_decade", "refine", "t",
                  "grid_points", "half_width", "format"):
            v = d[k]
            lines.append(f"{k} = {v}" if isinstance(v, str) else f"{k} = {v!r}")
        if self.times:
            lines.append("times = " + ",".join(repr(x) for x in self.times))
        return "\n".join(lines) + "\n"


# -- argument parsing ------------------------------------------------------


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="key = value file; flags override it")
    p.add_argument("--mu", type=float, help="stability index, 0 < mu <= 2")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--beta", type=float, help="memory exponent, 1 < beta < 3")
    g.add_argument("--H", type=float, help="self-similarity exponent; beta is derived")
    p.add_argument("--sigma", type=float, help="scale parameter (default 1)")
    p.add_argument("--n", type=int, help="path length in samples (default 65536)")
    p.add_argument("--dt", type=float, help="time step (default 1)")
    p.add_argument("--seed", type=int, help="base RNG seed (default 0)")
    p.add_argument("--out", help="output directory (default ./out)")
    p.add_argument("--format", choices=FORMATS, help="output format for data files")
    p.add_argument("--workers", type=int, help="worker threads for ensembles")


def _add_ensemble(p: argparse.ArgumentParser) -> None:
    p.add_argument("--ensemble", type=int, help="number of independent paths")


def _add_bursts(p: argparse.ArgumentParser) -> None:
    p.add_argument("--threshold", help="'mean', 'zero' or a number (default mean)")
    p.add_argument("--bins-per-decade", dest="bins_per_decade", type=int,
                   help="logarithmic pdf bins per decade (default 10)")


def _add_input(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", nargs="+", type=Path,
                   help="series files (.csv index,time,value or raw .f8) instead of generating")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lfsmkit", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="simulate LFSM / fBm / oLm / WBm paths")
    _add_common(p)
    _add_ensemble(p)

    p = sub.add_parser("verify-kinetic", help="residual check of the LFSM kinetic equation")
    _add_common(p)
    p.add_argument("--t", type=float, help="evaluation time (default 1)")
    p.add_argument("--refine", type=int, help="number of refinement levels (default 1)")
    p.add_argument("--grid-points", dest="grid_points", type=int, help="points of the base grid")
    p.add_argument("--half-width", dest="half_width", type=float,
                   help="base grid half-width in units of t^H")

    p = sub.add_parser("bursts", help="burst detection, pdfs and power-law fits")
    _add_common(p)
    _add_ensemble(p)
    _add_bursts(p)
    _add_input(p)

    p = sub.add_parser("estimate", help="estimate beta, J and H from paths")
    _add_common(p)
    _add_ensemble(p)
    _add_input(p)
    p.add_argument("--times", help="comma-separated time lags for the H estimate")

    p = sub.add_parser("full-experiment", help="generate, analyse bursts and estimate exponents")
    _add_common(p)
    _add_ensemble(p)
    _add_bursts(p)
    p.add_argument("--times", help="comma-separated time lags for the H estimate")
    return parser


def _read_config_file(path: Path, command: str) -> dict:
    kv = parse_kv(path.read_text())
    out = {}
    for key, raw in kv.items():
        if key == "command":
            if raw != command:
                raise ParameterDomainError(f"config file is for {raw!r}, not {command!r}")
            continue
        if key in _PARAM_KEYS:
            out[key] = _PARAM_KEYS[key](raw)
        elif key in _RUN_KEYS:
            out[key] = _RUN_KEYS[key](raw)
        else:
            raise ParameterDomainError(f"unknown config key {key!r}")
    if "beta" in out and "H" in out:
        raise ParameterDomainError("config file gives both beta and H; give one")
    return out


def _parse_times(text):
    if text is None or isinstance(text, tuple):
        return text
    return tuple(float(x) for x in str(text).split(",") if x.strip())


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Merge defaults, the config file and flags into a :class:`RunConfig`."""
    values = dict(_DEFAULTS)
    if getattr(args, "config", None) is not None:
        values.update(_read_config_file(args.config, args.command))
    flags = {k: v for k, v in vars(args).items() if v is not None and (k in _PARAM_KEYS or k in _RUN_KEYS)}
    # a flag for one of beta/H supersedes the other from the file
    if "H" in flags:
        values.pop("beta", None)
    if "beta" in flags:
        values.pop("H", None)
    values.update(flags)

    if "mu" not in values:
        raise ParameterDomainError("mu is required (--mu or config file)")
    mu = values["mu"]
    if "beta" in values:
        beta = values["beta"]
    elif "H" in values:
        if not (0.0 < mu <= 2.0):
            raise ParameterDomainError(f"mu={mu!r} violates 0 < mu <= 2")
        beta = beta_from(mu, values["H"])
    else:
        raise ParameterDomainError("one of beta or H is required")
    params = ProcessParams(mu=mu, beta=beta, sigma=values["sigma"], n=values["n"],
                           dt=values["dt"], seed=values["seed"])
    return RunConfig(
        command=args.command,
        params=params,
        ensemble_size=values["ensemble"],
        output_dir=Path(values["out"]),
        format=values["format"],
        threshold=str(values["threshold"]),
        bins_per_decade=values["bins_per_decade"],
        refine=values["refine"],
        t=values["t"],
        grid_points=values["grid_points"],
        half_width=values["half_width"],
        times=_parse_times(values["times"]),
        workers=values["workers"],
        inputs=tuple(getattr(args, "input", None) or ()),
    )


# -- output helpers --------------------------------------------------------


class _Run:
    """Collects written files and stage timings for one invocation."""

    def __init__(self, config: RunConfig):
        self.config = config
        self.out = config.output_dir
        self.out.mkdir(parents=True, exist_ok=True)
        self.files: list[Path] = []
        self.timings: dict[str, float] = {}
        self._t0 = time.perf_counter()

    def stage(self, name: str, start: float) -> None:
        self.timings[name] = time.perf_counter() - start

    def json(self, name: str, obj) -> None:
        path = self.out / f"{name}.json"
        _io.write_json(path, obj)
        self.files.append(path)

    def table(self, name: str, header: str, *columns) -> None:
        """CSV, or a JSON object of columns for ``--format json``.

        ``binary`` applies to paths only; tables are then written as CSV.
        """
        if self.config.format == "json":
            self.json(name, {h: np.asarray(c) for h, c in zip(header.split(","), columns)})
        else:
            path = self.out / f"{name}.csv"
            _io.write_csv(path, header, *columns)
            self.files.append(path)

    def finish(self) -> None:
        cfg_path = self.out / "run.cfg"
        cfg_path.write_text(self.config.to_text())
        manifest = {
            "command": self.config.command,
            "config": self.config.to_dict(),
            "exponents": asdict(derive_exponents(self.config.params)),
            "kind": process_kind(self.config.params),
            "seed_scheme": {
                "seed": self.config.params.seed,
                "generator": "numpy PCG64",
                "member_stream": "SeedSequence(seed, spawn_key=(member,)) for member = 0..ensemble-1",
            },
            "versions": {
                "lfsmkit": __version__,
                "numpy": np.__version__,
                "scipy": scipy.__version__,
                "python": platform.python_version(),
            },
            "outputs": {p.name: _sha256(p) for p in sorted(self.files + [cfg_path])},
            "rerun": f"lfsmkit {self.config.command} --config run.cfg",
        }
        _io.write_json(self.out / "manifest.json", manifest)
        self.timings["total"] = time.perf_counter() - self._t0
        _io.write_json(self.out / "timings.json", {"seconds": self.timings, "workers": self.config.workers})


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _load_inputs(paths, params: ProcessParams) -> list[TimeSeries]:
    series = []
    for p in paths:
        p = Path(p)
        if p.suffix == ".f8":
            values = _io.read_f8(p)
            series.append(TimeSeries(values=values, dt=params.dt, params=params, kind=process_kind(params)))
        else:
            series.append(TimeSeries.from_csv(p, params, kind=process_kind(params)))
    return series


def _series(run: _Run) -> list[TimeSeries]:
    cfg = run.config
    t0 = time.perf_counter()
    if cfg.inputs:
        out = _load_inputs(cfg.inputs, cfg.params)
    else:
        out = generate_ensemble(cfg.params, cfg.ensemble_size, workers=cfg.workers)
    run.stage("series", t0)
    return out


# -- commands --------------------------------------------------------------


def cmd_generate(run: _Run) -> None:
    cfg = run.config
    for s in _series(run):
        for path in write_series(s, run.out / f"path_{s.member:04d}", cfg.format):
            run.files.append(Path(path))
    print(f"wrote {cfg.ensemble_size} {process_kind(cfg.params)} path(s) of n={cfg.params.n} to {run.out}")


def cmd_verify_kinetic(run: _Run) -> None:
    cfg = run.config
    t0 = time.perf_counter()
    grid = GridSpec(cfg.grid_points, cfg.half_width)
    reports = residual_convergence(cfg.params, cfg.t, max(1, cfg.refine), grid)
    run.stage("kinetic", t0)
    abs_res = [r.max_abs_residual for r in reports]
    run.json("kinetic", {
        "reports": [r.to_dict() for r in reports],
        "monotone": bool(all(b < a for a, b in zip(abs_res, abs_res[1:]))),
    })
    for r in reports:
        ratio = "" if r.refinement_ratio is None else f"  ratio {r.refinement_ratio:.3g}"
        print(f"grid {r.grid['n_points']:>6d} x +-{r.grid['half_width']:g}: "
              f"max_rel_residual {r.max_rel_residual:.3e}{ratio}")


def _fit_or_error(fn):
    try:
        return fn().to_dict()
    except FitError as exc:
        print(f"warning: {exc}", file=sys.stderr)
        return {"error": str(exc)}


def _burst_analysis(run: _Run, series) -> dict:
    cfg = run.config
    t0 = time.perf_counter()
    bursts = Bursts.concat(detect_bursts(s, cfg.threshold) for s in series)
    run.stage("bursts", t0)
    run.table("bursts", "start,duration,size", bursts.start, bursts.duration, bursts.size)

    n = min(len(s) for s in series)
    dt = series[0].dt
    d_range = default_duration_range(n, dt)
    sizes = bursts.size[bursts.size > 0]
    summary = {"n_bursts": len(bursts), "n_series": len(series), "threshold": cfg.threshold}
    fits = {"duration_range": list(d_range)}
    if len(bursts) >= 50:
        pdf = estimate_pdf(bursts.duration, cfg.bins_per_decade)
        run.table("duration_pdf", "center,density,count", pdf.bin_centers, pdf.densities, pdf.counts)
        fits["duration_mle"] = _fit_or_error(lambda: fit_power_law(bursts.duration, d_range, "mle"))
        fits["duration_logls"] = _fit_or_error(
            lambda: fit_power_law(pdf, d_range, "logls", cfg.bins_per_decade))
    if sizes.size >= 50:
        pdf = estimate_pdf(sizes, cfg.bins_per_decade)
        run.table("size_pdf", "center,density,count", pdf.bin_centers, pdf.densities, pdf.counts)
        try:
            s_range = size_fit_range(bursts, d_range, bins_per_decade=cfg.bins_per_decade)
        except FitError as exc:
            print(f"warning: {exc}", file=sys.stderr)
            fits["size_range_error"] = str(exc)
        else:
            fits["size_range"] = list(s_range)
            fits["size_mle"] = _fit_or_error(lambda: fit_power_law(sizes, s_range, "mle"))
            fits["size_logls"] = _fit_or_error(
                lambda: fit_power_law(pdf, s_range, "logls", cfg.bins_per_decade))
    H = cfg.params.H
    if 0.0 < H < 1.0:
        dur, size = predicted_exponents(H)
        fits["predicted"] = {"H": H, "duration_exp": dur, "size_exp": size}
    run.json("fits", {"summary": summary, **fits})
    print(f"{len(bursts)} bursts from {len(series)} series")
    for key in ("duration_mle", "size_mle"):
        if key in fits and "exponent" in fits[key]:
            print(f"{key}: {fits[key]['exponent']:.4f} +- {fits[key]['stderr']:.4f}")
    return fits


def cmd_bursts(run: _Run) -> None:
    _burst_analysis(run, _series(run))


def _default_times(n: int, dt: float) -> tuple:
    top = min(256, n // 4)
    lags = [8 * 2**k for k in range(8) if 8 * 2**k <= top]
    return tuple(float(l * dt) for l in lags)


def _estimates(run: _Run, series) -> dict:
    cfg = run.config
    t0 = time.perf_counter()
    first = series[0]
    report = {"beta": estimate_beta(first).to_dict(), "J": estimate_J(first).to_dict(),
              "source": "member 0 for beta and J"}
    if len(series) >= MIN_PATHS:
        n = min(len(s) for s in series)
        times = cfg.times or _default_times(n, first.dt)
        H = estimate_H_peak([s.values[:n] for s in series] if len({len(s) for s in series}) > 1 else series,
                            times)
        report["H"] = H.to_dict()
        report["closure_residual"] = H.value - hurst_from(cfg.params.mu, report["beta"]["value"])
    else:
        report["H"] = {"skipped": f"needs >= {MIN_PATHS} paths, have {len(series)}"}
    report["expected"] = {**asdict(derive_exponents(cfg.params)), "beta": cfg.params.beta}
    run.stage("estimate", t0)
    run.json("estimates", report)
    print(f"beta {report['beta']['value']:.4f}  J {report['J']['value']:.4f}"
          + (f"  H {report['H']['value']:.4f}" if "value" in report["H"] else ""))
    return report


def cmd_estimate(run: _Run) -> None:
    _estimates(run, _series(run))


def cmd_full_experiment(run: _Run) -> None:
    series = _series(run)
    fits = _burst_analysis(run, series)
    est = _estimates(run, series)
    run.json("experiment", {
        "predicted": fits.get("predicted"),
        "duration_exp": fits.get("duration_mle", {}).get("exponent"),
        "size_exp": fits.get("size_mle", {}).get("exponent"),
        "beta": est["beta"]["value"],
        "J": est["J"]["value"],
        "H": est["H"].get("value"),
    })


_DISPATCH = {
    "generate": cmd_generate,
    "verify-kinetic": cmd_verify_kinetic,
    "bursts": cmd_bursts,
    "estimate": cmd_estimate,
    "full-experiment": cmd_full_experiment,
}


def run(config: RunConfig) -> int:
    """Execute one configured command; returns the process exit status."""
    r = _Run(config)
    _DISPATCH[config.command](r)
    r.finish()
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return run(resolve_config(args))
    except _FATAL as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
