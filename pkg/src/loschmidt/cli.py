"""Command-line entry point: ``loschmidt {echo,sweep,fit,validate,purity}``.

Exit codes: 0 success, 1 usage/config error, 2 engine/numerical error,
3 validation failure.
"""

from __future__ import annotations

import argparse
import csv
import itertools
import math
import sys
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__, edoracle, envelope, modes, quadratic
from .model import (Boundary, ChainSpec, ConfigError, EchoError, EchoSeries, PerSite,
                    QubitState, Uniform, default_dt, purity, time_grid)
from .validation import cross_validate

EXIT_OK, EXIT_USAGE, EXIT_ENGINE, EXIT_VALIDATION = 0, 1, 2, 3
ENGINES = ("modes", "quadratic", "ed", "strong_coupling", "short_time")
SWEEP_AXES = {"g": "g", "lambda": "lam", "gamma": "gamma", "n": "n_sites"}
SWEEP_HEADER = ["gamma", "lambda", "g", "n", "alpha", "residual", "threshold_flag", "error"]

DEFAULTS = {
    "n_sites": 100, "gamma": 1.0, "lambda": 0.0, "g": 0.0, "coupling": "uniform",
    "boundary": "periodic", "engine": "modes", "t_max": 1.5, "dt": None,
    "fermion_boundary": "periodic", "peak_threshold": envelope.INV_E,
    "intercept": "free", "window": None, "fit": None,
}


def fmt(x: float) -> str:
    return format(float(x), ".12g")


@dataclass(frozen=True)
class RunConfig:
    spec: ChainSpec
    coupling: object
    engine: str = "modes"
    t_max: float = 1.5
    dt: float | None = None
    out: str | None = None
    fit: tuple = ()
    peak_threshold: float = envelope.INV_E
    intercept: str = "free"
    window: tuple | None = None
    fermion_boundary: str = "periodic"

    def __post_init__(self):
        if self.engine not in ENGINES:
            raise ConfigError(f"engine must be one of {ENGINES}, got {self.engine!r}")
        self.coupling.validate(self.spec.n_sites)
        if self.engine == "modes":
            if not isinstance(self.coupling, Uniform):
                raise ConfigError("engine=modes requires uniform coupling")
            if not self.spec.periodic or self.spec.n_sites % 2:
                raise ConfigError("engine=modes requires a periodic chain with even n_sites")
        if self.engine in ("ed", "strong_coupling") and self.spec.n_sites > edoracle.MAX_SITES:
            raise ConfigError(f"engine={self.engine} requires n_sites <= {edoracle.MAX_SITES}")
        if self.engine == "strong_coupling" and not isinstance(self.coupling, Uniform):
            raise ConfigError("engine=strong_coupling requires uniform coupling")
        if self.engine == "short_time" and not (
                isinstance(self.coupling, PerSite) and len(self.coupling.pairs) == 1):
            raise ConfigError("engine=short_time requires coupling to a single site")
        if self.t_max <= 0:
            raise ConfigError("t_max must be > 0")
        if self.dt is not None and self.dt <= 0:
            raise ConfigError("dt must be > 0")

    @property
    def max_g(self) -> float:
        return float(np.max(np.abs(self.coupling.strengths(self.spec.n_sites))))

    @property
    def effective_dt(self) -> float:
        return self.dt if self.dt is not None else default_dt(self.max_g)

    def times(self) -> np.ndarray:
        return time_grid(self.t_max, self.effective_dt)

    def as_dict(self) -> dict:
        return {
            "n_sites": self.spec.n_sites, "gamma": fmt(self.spec.gamma),
            "lambda": fmt(self.spec.lam), "boundary": self.spec.boundary.value,
            "coupling": coupling_to_text(self.coupling), "g": fmt(self.max_g), "engine": self.engine,
            "t_max": fmt(self.t_max), "dt": fmt(self.effective_dt),
            "fermion_boundary": self.fermion_boundary,
            "fit": ",".join(self.fit), "peak_threshold": fmt(self.peak_threshold),
            "intercept": self.intercept,
            "window": "" if self.window is None else f"{fmt(self.window[0])}:{fmt(self.window[1])}",
        }


@dataclass(frozen=True)
class SweepConfig:
    template: RunConfig
    axes: dict
    jobs: int = 1
    rel_tol: float = 0.05

    def __post_init__(self):
        if not self.axes:
            raise ConfigError("sweep needs at least one --axis")
        for name, values in self.axes.items():
            if name not in SWEEP_AXES:
                raise ConfigError(f"unknown sweep axis {name!r}; choose from {sorted(SWEEP_AXES)}")
            if not values:
                raise ConfigError(f"sweep axis {name!r} is empty")
        if self.jobs < 1:
            raise ConfigError("--jobs must be >= 1")

    def grid(self):
        names = [a for a in ("gamma", "lambda", "g", "n") if a in self.axes]
        for combo in itertools.product(*(sorted(self.axes[a]) for a in names)):
            yield dict(zip(names, combo))

    def size(self) -> int:
        return math.prod(len(v) for v in self.axes.values())


def coupling_to_text(coupling) -> str:
    """Sidecar form; single-strength couplings defer their strength to the ``g`` key."""
    if isinstance(coupling, Uniform):
        return "uniform"
    if len(coupling.pairs) == 1:
        return f"site:{coupling.pairs[0][0]}"
    return ";".join(f"site:{j}:{fmt(g)}" for j, g in coupling.pairs)


def parse_coupling(text: str, g: float):
    """``uniform`` or ``site:<j>`` (strength from ``g``); sidecar forms also accepted."""
    text = text.strip()
    if text == "uniform":
        return Uniform(g)
    if text.startswith("uniform:"):
        return Uniform(float(text.split(":", 1)[1]))
    pairs = []
    for part in text.split(";"):
        bits = part.split(":")
        if bits[0] != "site" or len(bits) not in (2, 3):
            raise ConfigError(f"cannot parse coupling {text!r}; use uniform or site:<j>")
        try:
            pairs.append((int(bits[1]), float(bits[2]) if len(bits) == 3 else g))
        except ValueError as exc:
            raise ConfigError(f"cannot parse coupling {text!r}: {exc}") from None
    return PerSite(tuple(pairs))


def parse_window(text: str | None):
    if text in (None, ""):
        return None
    try:
        t0, t1 = (float(x) for x in text.split(":"))
    except ValueError:
        raise ConfigError(f"window must look like t0:t1, got {text!r}") from None
    return (t0, t1)


def parse_axis(items) -> dict:
    axes = {}
    for item in items or ():
        name, _, values = item.partition("=")
        name = name.strip()
        try:
            vals = [float(v) for v in values.split(",") if v.strip()]
        except ValueError:
            raise ConfigError(f"bad axis values in {item!r}") from None
        if name == "n":
            vals = [int(v) for v in vals]
        axes[name] = vals
    return axes


def read_config_file(path: str | None) -> dict:
    """Flat ``key=value`` file; the metadata sidecar of a run is a valid config."""
    if not path:
        return {}
    out = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    for lineno, line in enumerate(lines, 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"{path}:{lineno}: expected key=value")
        out[key.strip().replace("-", "_")] = value.strip()
    return out


def _settings(args) -> dict:
    merged = dict(DEFAULTS)
    merged.update({k: v for k, v in read_config_file(getattr(args, "config", None)).items()
                   if k in DEFAULTS})
    for key in DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    return merged


def run_config_from_args(args) -> RunConfig:
    s = _settings(args)
    try:
        spec = ChainSpec(int(s["n_sites"]), float(s["gamma"]), float(s["lambda"]),
                         Boundary(s["boundary"]))
        coupling = parse_coupling(str(s["coupling"]), float(s["g"]))
        fit = s["fit"] or ()
        if isinstance(fit, str):
            fit = tuple(f for f in fit.split(",") if f)
        dt = s["dt"]
        return RunConfig(
            spec=spec, coupling=coupling, engine=str(s["engine"]), t_max=float(s["t_max"]),
            dt=None if dt in (None, "") else float(dt), out=getattr(args, "out", None),
            fit=tuple(fit), peak_threshold=float(s["peak_threshold"]),
            intercept=str(s["intercept"]), window=parse_window(s["window"]),
            fermion_boundary=str(s["fermion_boundary"]))
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from None


def run_engine(config: RunConfig) -> EchoSeries:
    t = config.times()
    spec, coupling = config.spec, config.coupling
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", quadratic.DegenerateGroundStateWarning)
        if config.engine == "modes":
            return modes.echo(spec, coupling, t)
        if config.engine == "quadratic":
            return quadratic.echo(spec, coupling, t, fermion_boundary=config.fermion_boundary)
        if config.engine == "ed":
            return edoracle.echo(spec, coupling, t)
        if config.engine == "strong_coupling":
            h_c = edoracle.build_spin_hamiltonian(spec, coupling, 0)
            return edoracle.echo_strong_coupling(h_c, coupling.g, t)
        (site, g), = coupling.pairs
        gs = quadratic.ground_state(
            quadratic.build_quadratic(spec, coupling, 0, config.fermion_boundary))
        return quadratic.short_time_echo(quadratic.site_magnetization(gs, site), g, t)


def fit_series(series: EchoSeries, config: RunConfig, models, peaks_given: bool = False):
    """Fit report as ``(model, parameter, value)`` rows."""
    if peaks_given:
        peaks = envelope.PeakSet(series.times, series.values)
    else:
        peaks = envelope.find_peaks(series, "upper")
    rows, fits = [], {}
    for model in models:
        if model == "gaussian":
            f = envelope.fit_gaussian(peaks, config.spec.n_sites, config.peak_threshold,
                                      config.intercept)
            fits[model] = f
            rows += [("gaussian", "alpha", f.alpha), ("gaussian", "intercept", f.intercept),
                     ("gaussian", "n_scale", f.n_scale), ("gaussian", "residual", f.residual),
                     ("gaussian", "points_used", f.points_used),
                     ("gaussian", "threshold", f.threshold)]
        elif model == "powerlaw":
            if config.window is None:
                raise ConfigError("powerlaw fit needs --window t0:t1")
            f = envelope.fit_powerlaw(peaks, config.window)
            fits[model] = f
            rows += [("powerlaw", "exponent", f.exponent), ("powerlaw", "prefactor", f.prefactor),
                     ("powerlaw", "window_t0", f.fit_window[0]),
                     ("powerlaw", "window_t1", f.fit_window[1]),
                     ("powerlaw", "residual", f.residual),
                     ("powerlaw", "points_used", f.points_used),
                     ("powerlaw", "poor_fit", int(f.poor))]
        else:
            raise ConfigError(f"unknown fit model {model!r}")
    if len(fits) == 2:
        rows.append(("crossover", "time",
                     envelope.crossover_time(fits["gaussian"], fits["powerlaw"])))
    return rows


def write_fit_report(rows, path: Path | None):
    lines = ["model,parameter,value"] + [f"{m},{p},{fmt(v)}" for m, p, v in rows]
    text = "\n".join(lines) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        path.write_text(text)


def write_series(path: Path, series: EchoSeries, column: str = "L"):
    with open(path, "w", newline="") as fh:
        fh.write(f"t,{column}\n")
        for t, v in zip(series.times, series.values):
            fh.write(f"{fmt(t)},{fmt(v)}\n")


def write_sidecar(path: Path, entries: dict):
    with open(path, "w") as fh:
        for key, value in entries.items():
            fh.write(f"{key}={value}\n")


PLOT_TEMPLATE = '''"""Plot {data} (generated by loschmidt {command})."""
import csv
import matplotlib.pyplot as plt

with open({data!r}) as fh:
    rows = list(csv.DictReader(fh))
t = [float(r["t"]) for r in rows]
y = [float(r[{column!r}]) for r in rows]
plt.plot(t, y, lw=0.7)
plt.xlabel("t")
plt.ylabel({column!r})
plt.savefig({image!r}, dpi=150)
'''


def write_plot_script(out: Path, column: str, command: str):
    script = out.with_suffix(".plot.py")
    script.write_text(PLOT_TEMPLATE.format(data=out.name, column=column, command=command,
                                           image=out.with_suffix(".png").name))


def read_series_csv(path: str, column: str = "L") -> EchoSeries:
    """Parse a ``t,L`` CSV; errors carry the offending line number."""
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header[:2]] != ["t", column]:
            raise ConfigError(f"{path}:1: expected header 't,{column}', got {header}")
        ts, vs = [], []
        for lineno, row in enumerate(reader, 2):
            if not row:
                continue
            if len(row) != 2:
                raise ConfigError(f"{path}:{lineno}: expected 2 fields, got {len(row)}")
            try:
                ts.append(float(row[0]))
                vs.append(float(row[1]))
            except ValueError:
                raise ConfigError(f"{path}:{lineno}: non-numeric value in {row}") from None
    try:
        return EchoSeries(np.array(ts), np.array(vs))
    except EchoError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def cmd_echo(args) -> int:
    config = run_config_from_args(args)
    start = time.perf_counter()
    series = run_engine(config)
    wall = time.perf_counter() - start
    out = Path(args.out or "echo.csv")
    write_series(out, series)
    meta = config.as_dict()
    meta.update(version=__version__, wall_time_s=f"{wall:.3f}",
                created=datetime.now(timezone.utc).isoformat(timespec="seconds"),
                notes=";".join(series.notes), points=len(series))
    write_sidecar(out.with_suffix(".meta"), meta)
    write_plot_script(out, "L", "echo")
    if config.fit:
        rows = fit_series(series, config, config.fit)
        write_fit_report(rows, out.with_suffix(".fit.csv"))
        write_fit_report(rows, None)
    return EXIT_OK


def _sweep_point(template: RunConfig, point: dict):
    spec = template.spec
    changes = {SWEEP_AXES[k]: v for k, v in point.items() if k != "g"}
    try:
        if changes:
            spec = spec.with_(**changes)
        coupling = template.coupling
        if "g" in point:
            coupling = (Uniform(point["g"]) if isinstance(coupling, Uniform)
                        else PerSite(tuple((j, point["g"]) for j, _ in coupling.pairs)))
        config = replace(template, spec=spec, coupling=coupling)
        series = run_engine(config)
        peak_energy = None
        if config.engine == "modes" and spec.gamma != 0:
            try:
                peak_energy = modes.analytic_peak_energy(modes.build_mode_table(spec, coupling))
            except modes.UndefinedPeakError:
                pass
        peaks = envelope.find_peaks(series, "upper", peak_energy)
        f = envelope.fit_gaussian(peaks, spec.n_sites, config.peak_threshold, config.intercept)
        return spec, config.max_g, f.alpha, f.residual, ""
    except EchoError as exc:
        g = point.get("g", template.max_g)
        return spec, g, float("nan"), float("nan"), f"{type(exc).__name__}: {exc}"


def cmd_sweep(args) -> int:
    template = run_config_from_args(args)
    sweep = SweepConfig(template, parse_axis(args.axis), jobs=args.jobs or 1)
    if "fit" in vars(args) and template.fit and tuple(template.fit) != ("gaussian",):
        raise ConfigError("sweep fits the Gaussian width only (--fit gaussian)")
    points = list(sweep.grid())
    print(f"sweep: {sweep.size()} grid points, {sweep.jobs} job(s)", file=sys.stderr)
    with ThreadPoolExecutor(max_workers=sweep.jobs) as pool:
        results = list(pool.map(lambda p: _sweep_point(template, p), points))
    rows = []
    for spec, g, alpha, resid, err in results:
        rows.append({"gamma": spec.gamma, "lambda": spec.lam, "g": g, "n": spec.n_sites,
                     "alpha": alpha, "residual": resid, "error": err})
    # universality flag per (gamma, lambda, n) curve
    groups = {}
    for row in rows:
        groups.setdefault((row["gamma"], row["lambda"], row["n"]), []).append(row)
    for curve in groups.values():
        good = [r for r in curve if not r["error"]]
        g_star = None
        if len(good) >= 5 and len(good) == len(curve):
            g_star = envelope.universality_threshold([(r["g"], r["alpha"]) for r in good],
                                                     sweep.rel_tol)
        for r in curve:
            r["threshold_flag"] = "" if g_star is None else int(r["g"] >= g_star)
    out = Path(args.out or "sweep.csv")
    with open(out, "w", newline="") as fh:
        fh.write(",".join(SWEEP_HEADER) + "\n")
        for r in rows:
            cells = [fmt(r["gamma"]), fmt(r["lambda"]), fmt(r["g"]), str(r["n"]),
                     "" if r["error"] else fmt(r["alpha"]),
                     "" if r["error"] else fmt(r["residual"]),
                     str(r["threshold_flag"]), r["error"].replace(",", ";")]
            fh.write(",".join(cells) + "\n")
    meta = template.as_dict()
    meta.update(axes=";".join(f"{k}={','.join(fmt(v) for v in vals)}"
                              for k, vals in sweep.axes.items()),
                grid_size=sweep.size(), jobs=sweep.jobs, version=__version__,
                created=datetime.now(timezone.utc).isoformat(timespec="seconds"))
    write_sidecar(out.with_suffix(".meta"), meta)
    return EXIT_OK


def cmd_fit(args) -> int:
    config = run_config_from_args(args)
    if not config.fit:
        config = replace(config, fit=("gaussian",))
    series = read_series_csv(args.input)
    rows = fit_series(series, config, config.fit, peaks_given=args.peaks)
    write_fit_report(rows, Path(args.out) if args.out else None)
    return EXIT_OK


def cmd_validate(args) -> int:
    report = cross_validate(args.n_max, args.seed)
    text = "\n".join(report.lines()) + "\n"
    sys.stdout.write(text)
    if args.out:
        Path(args.out).write_text(text)
    return EXIT_OK if report.passed else EXIT_VALIDATION


def _complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", ""))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from None


def cmd_purity(args) -> int:
    qubit = QubitState(args.alpha, args.beta)
    if args.input:
        series = read_series_csv(args.input)
    else:
        series = run_engine(run_config_from_args(args))
    values = np.array([purity(qubit, v) for v in series.values])
    out = Path(args.out or "purity.csv")
    with open(out, "w", newline="") as fh:
        fh.write("t,purity\n")
        for t, p in zip(series.times, values):
            fh.write(f"{fmt(t)},{fmt(p)}\n")
    write_plot_script(out, "purity", "purity")
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_run_options(p):
    p.add_argument("--config", help="key=value file; flags override its entries")
    p.add_argument("--n-sites", dest="n_sites", type=int)
    p.add_argument("--gamma", type=float)
    p.add_argument("--lambda", dest="lambda", type=float)
    p.add_argument("--g", type=float)
    p.add_argument("--coupling", help="uniform | site:<j>")
    p.add_argument("--boundary", choices=[b.value for b in Boundary])
    p.add_argument("--engine", choices=ENGINES)
    p.add_argument("--fermion-boundary", dest="fermion_boundary",
                   choices=("periodic", "antiperiodic"))
    p.add_argument("--t-max", dest="t_max", type=float)
    p.add_argument("--dt", type=float)
    p.add_argument("--out")


def _add_fit_options(p):
    p.add_argument("--fit", action="append", choices=("gaussian", "powerlaw"))
    p.add_argument("--peak-threshold", dest="peak_threshold", type=float,
                   help="default 0.367879 (1/e)")
    p.add_argument("--intercept", choices=("free", "unit"))
    p.add_argument("--window", help="power-law window t0:t1")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="loschmidt", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("echo", help="compute one echo series")
    _add_run_options(p)
    _add_fit_options(p)
    p.set_defaults(func=cmd_echo)

    p = sub.add_parser("sweep", help="Gaussian width over a parameter grid")
    _add_run_options(p)
    _add_fit_options(p)
    p.add_argument("--axis", action="append", help="e.g. g=5,10,40 (repeatable)")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("fit", help="fit an existing t,L series")
    p.add_argument("input")
    p.add_argument("--config")
    p.add_argument("--n-sites", dest="n_sites", type=int)
    p.add_argument("--peaks", action="store_true", help="input rows are peaks already")
    p.add_argument("--out")
    _add_fit_options(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("validate", help="randomized cross-engine comparison")
    p.add_argument("--n-max", dest="n_max", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("purity", help="qubit purity from an echo")
    _add_run_options(p)
    p.add_argument("--input", help="existing t,L CSV instead of running an engine")
    p.add_argument("--alpha", type=_complex, default=complex(2 ** -0.5))
    p.add_argument("--beta", type=_complex, default=complex(2 ** -0.5))
    p.set_defaults(func=cmd_purity)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"loschmidt: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (EchoError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"loschmidt: engine error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ENGINE


if __name__ == "__main__":
    sys.exit(main())
