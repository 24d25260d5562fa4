"""Command-line front end.

Every subcommand reads an INI file (all keys optional; the defaults are the
reference configuration below), writes CSV/JSON files into ``--out`` and a
``manifest.json`` listing them with their SHA-256 digests.

Exit codes: 0 on success, 1 on a numerical failure, 2 on a usage or
configuration error. Errors are also written to standard error as a single
JSON object.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import hashlib
import json
import logging
import os
import platform
import sys
import time
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from pathlib import Path
from typing import Any, Callable, Iterable, Sequence

__all__ = ["main", "RunConfig", "load_config"]

logger = logging.getLogger("fracwear.cli")

SUBCOMMANDS = ("mlf", "spectrum", "init", "evolve", "stationary", "validate", "demo-paper")

# the reference run: semicircle start, cosine load 6 -> 10 over 0.5
DEFAULTS: dict[str, dict[str, str]] = {
    "model": {"a": "1", "eta": "1", "nu": "2", "mu": "1.2", "alpha": "0.6"},
    "kernel": {"kind": "log", "c_k": "1.6", "file": ""},
    "load": {"kind": "transitional_cosine", "p0": "6", "p1": "10", "t0": "0.5", "file": ""},
    "initial": {"kind": "semicircle", "coefficient": "0", "file": ""},
    "numerics": {
        "n": "200",
        "modes": "60",
        "dt": "0.001953125",
        "t_end": "2",
        "times": "0.1, 0.5, 1, 2",
        "x_stride": "1",
    },
    "mlf": {"alpha": "0.6", "beta": "1", "z": "-10, -1, 0, 1"},
    "stationary": {"fit_start": "", "fit_end": ""},
    "validate": {"tolerance": "0.02", "interior_fraction": "0.9"},
}


class ConfigError(ValueError):
    """A configuration value is missing, malformed or out of range."""


# {{{ configuration


def _decimal(text: str, key: str) -> float:
    try:
        return float(Decimal(text.strip()))
    except (InvalidOperation, ValueError) as exc:
        raise ConfigError(f"{key}: not a decimal number: {text!r}") from exc


def _decimal_list(text: str, key: str) -> list[float]:
    items = [s for s in (p.strip() for p in text.split(",")) if s]
    return [_decimal(s, key) for s in items]


def _integer(text: str, key: str) -> int:
    try:
        return int(text.strip())
    except ValueError as exc:
        raise ConfigError(f"{key}: not an integer: {text!r}") from exc


@dataclass(frozen=True)
class RunConfig:
    """Resolved configuration (defaults merged with the INI file)."""

    sections: dict[str, dict[str, str]]
    base_dir: Path

    def get(self, section: str, key: str) -> str:
        return self.sections[section][key]

    def num(self, section: str, key: str) -> float:
        return _decimal(self.get(section, key), f"{section}.{key}")

    def nums(self, section: str, key: str) -> list[float]:
        return _decimal_list(self.get(section, key), f"{section}.{key}")

    def int(self, section: str, key: str) -> int:
        return _integer(self.get(section, key), f"{section}.{key}")

    def path(self, section: str, key: str) -> Path:
        raw = self.get(section, key).strip()
        if not raw:
            raise ConfigError(f"{section}.{key}: a file is required")
        p = Path(raw)
        p = p if p.is_absolute() else self.base_dir / p
        if not p.is_file():
            raise ConfigError(f"{section}.{key}: no such file: {p}")
        return p

    def digest(self) -> str:
        canonical = json.dumps(self.sections, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()


def load_config(path: Path | None) -> RunConfig:
    """Merge an INI file over :data:`DEFAULTS`.

    Unknown sections or keys are errors, so typos do not pass silently.
    """
    sections = {name: dict(values) for name, values in DEFAULTS.items()}
    base_dir = Path.cwd()
    if path is not None:
        if not path.is_file():
            raise ConfigError(f"config file not found: {path}")
        parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=(";",))
        try:
            parser.read(path, encoding="utf-8")
        except configparser.Error as exc:
            raise ConfigError(f"cannot parse {path}: {exc}") from exc
        if not parser.sections():
            raise ConfigError(f"config file {path} has no sections")
        for name in parser.sections():
            if name not in sections:
                raise ConfigError(f"unknown section [{name}]")
            for key, value in parser.items(name):
                if key not in sections[name]:
                    raise ConfigError(f"unknown key {name}.{key}")
                sections[name][key] = value
        base_dir = path.resolve().parent
    cfg = RunConfig(sections=sections, base_dir=base_dir)
    _validate(cfg)
    return cfg


def _validate(cfg: RunConfig) -> None:
    # re-check the domain constraints up front so a bad file fails fast
    a = cfg.num("model", "a")
    eta = cfg.num("model", "eta")
    nu = cfg.num("model", "nu")
    mu = cfg.num("model", "mu")
    alpha = cfg.num("model", "alpha")
    if not a > 0:
        raise ConfigError("model.a must be positive")
    if eta < 0 or nu < 0 or mu < 0:
        raise ConfigError("model.eta, model.nu and model.mu must be non-negative")
    if not 0 < alpha < 2:
        raise ConfigError("model.alpha must lie in (0, 2)")
    if cfg.get("kernel", "kind") not in ("log", "tabulated"):
        raise ConfigError("kernel.kind must be 'log' or 'tabulated'")
    if cfg.get("load", "kind") not in ("constant", "transitional_cosine", "sampled"):
        raise ConfigError("load.kind must be constant, transitional_cosine or sampled")
    if cfg.get("initial", "kind") not in ("semicircle", "flat_punch", "quadratic_punch", "samples"):
        raise ConfigError("initial.kind must be semicircle, flat_punch, quadratic_punch or samples")
    if cfg.int("numerics", "n") < 6:
        raise ConfigError("numerics.n must be at least 6")
    if cfg.int("numerics", "modes") < 1:
        raise ConfigError("numerics.modes must be positive")
    if cfg.int("numerics", "x_stride") < 1:
        raise ConfigError("numerics.x_stride must be positive")
    dt = cfg.num("numerics", "dt")
    t_end = cfg.num("numerics", "t_end")
    if not (dt > 0 and t_end > 0):
        raise ConfigError("numerics.dt and numerics.t_end must be positive")
    steps = t_end / dt
    if abs(steps - round(steps)) > 1.0e-9 * steps:
        raise ConfigError("numerics.t_end must be a whole number of steps dt")
    times = cfg.nums("numerics", "times")
    if not times or min(times) < 0 or max(times) > t_end:
        raise ConfigError("numerics.times must be non-empty and lie in [0, t_end]")
    if cfg.get("kernel", "kind") == "tabulated":
        cfg.path("kernel", "file")
    if cfg.get("load", "kind") == "sampled":
        cfg.path("load", "file")
    if cfg.get("initial", "kind") == "samples":
        cfg.path("initial", "file")


def _read_columns(path: Path, n_cols: int) -> list[list[float]]:
    cols: list[list[float]] = [[] for _ in range(n_cols)]
    with path.open(newline="", encoding="utf-8") as fh:
        for row in csv.reader(fh):
            if not row or row[0].strip().startswith("#"):
                continue
            try:
                vals = [float(v) for v in row[:n_cols]]
            except ValueError:
                # header row
                continue
            if len(vals) != n_cols:
                raise ConfigError(f"{path}: expected {n_cols} columns")
            for c, v in zip(cols, vals):
                c.append(v)
    if not cols[0]:
        raise ConfigError(f"{path}: no data rows")
    return cols


# }}}


# {{{ output helpers


def _fmt(v: Any) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (bool,)):
        return str(int(v))
    if isinstance(v, int):
        return str(v)
    return f"{float(v):.17g}"


class OutputDir:
    """Collects emitted files for the manifest."""

    def __init__(self, root: Path) -> None:
        self.root = root
        self.files: list[str] = []
        root.mkdir(parents=True, exist_ok=True)

    def csv(self, name: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
        path = self.root / name
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([_fmt(v) for v in row])
        self.files.append(name)

    def json(self, name: str, payload: Any) -> None:
        path = self.root / name
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(_plain(payload), indent=2, sort_keys=True) + "\n", encoding="utf-8")
        self.files.append(name)

    def manifest(self, subcommand: str, cfg: RunConfig, tolerances: dict[str, float]) -> None:
        import numpy
        import scipy

        from fracwear import __version__

        entries = []
        for name in sorted(set(self.files)):
            digest = hashlib.sha256((self.root / name).read_bytes()).hexdigest()
            entries.append({"file": name, "sha256": digest})
        payload = {
            "subcommand": subcommand,
            "config_hash": cfg.digest(),
            "config": cfg.sections,
            "versions": {
                "fracwear": __version__,
                "numpy": numpy.__version__,
                "scipy": scipy.__version__,
                "python": platform.python_version(),
            },
            "tolerances": tolerances,
            "files": entries,
        }
        (self.root / "manifest.json").write_text(
            json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )


def _plain(obj: Any) -> Any:
    """Convert numpy scalars and arrays to JSON-native values."""
    import numpy as np

    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


# }}}


# {{{ model assembly


@dataclass(frozen=True)
class Setup:
    params: Any
    kernel: Any
    basis: Any
    load: Any
    state: Any
    coeffs: Any
    modes: int


def _kernel(cfg: RunConfig):
    from fracwear.spectrum import KernelSpec

    a = cfg.num("model", "a")
    if cfg.get("kernel", "kind") == "log":
        return KernelSpec.log_kernel(a, cfg.num("kernel", "c_k"))
    import numpy as np

    x, k = _read_columns(cfg.path("kernel", "file"), 2)
    return KernelSpec.tabulated(a, np.array(x), np.array(k))


def _params(cfg: RunConfig, **override: float):
    from fracwear.evolution import ModelParams

    values = {key: cfg.num("model", key) for key in ("a", "eta", "nu", "mu", "alpha")}
    values.update(override)
    return ModelParams(**values)


def _load(cfg: RunConfig):
    import numpy as np

    from fracwear.evolution import LoadProfile

    kind = cfg.get("load", "kind")
    if kind == "constant":
        return LoadProfile.constant(cfg.num("load", "p0"))
    if kind == "transitional_cosine":
        return LoadProfile.transitional_cosine(
            cfg.num("load", "p0"), cfg.num("load", "p1"), cfg.num("load", "t0")
        )
    t, v = _read_columns(cfg.path("load", "file"), 2)
    return LoadProfile.sampled(np.array(t), np.array(v))


def _initial_state(cfg: RunConfig, kernel, basis, params, load):
    import numpy as np

    from fracwear.initial_state import (
        InitialState,
        PunchProfile,
        initial_pressure_eta_pos,
        initial_pressure_eta_zero,
        prescribed_initial_profile,
        project_onto_grid,
    )

    kind = cfg.get("initial", "kind")
    grid = basis.grid
    p0 = load.p0
    if kind == "semicircle":
        return prescribed_initial_profile("semicircle", p0, grid)
    if kind in ("flat_punch", "quadratic_punch"):
        punch = (
            PunchProfile.flat(0.0)
            if kind == "flat_punch"
            else PunchProfile.quadratic(cfg.num("initial", "coefficient"))
        )
        if params.eta == 0:
            return initial_pressure_eta_zero(kernel, punch, p0, grid)
        return initial_pressure_eta_pos(basis.operators, params.eta, punch, p0)

    xs, ps = _read_columns(cfg.path("initial", "file"), 2)
    xs_a, ps_a = np.array(xs), np.array(ps)
    if np.any(np.diff(xs_a) <= 0):
        raise ConfigError("initial.file: x must be strictly increasing")
    samples = project_onto_grid(lambda x: np.interp(x, xs_a, ps_a), grid)
    mass = float(grid.integrate(samples))
    if abs(mass - p0) > 1.0e-6 * abs(p0):
        raise ConfigError(f"initial samples carry load {mass:.10g}, expected load.p0 = {p0:.10g}")
    return InitialState(grid=grid, p0=samples, delta0=0.0, load=p0, square_integrable=True)


def _setup(cfg: RunConfig, need_coeffs: bool = True, **override: float) -> Setup:
    from fracwear.initial_state import project_initial
    from fracwear.spectrum import compute_spectrum

    params = _params(cfg, **override)
    kernel = _kernel(cfg)
    basis = compute_spectrum(kernel, cfg.int("numerics", "n"))
    load = _load(cfg)
    state = _initial_state(cfg, kernel, basis, params, load)
    modes = min(cfg.int("numerics", "modes"), basis.n_modes)
    coeffs = project_initial(state, basis, modes) if need_coeffs else None
    return Setup(params, kernel, basis, load, state, coeffs, modes)


# }}}


# {{{ subcommands


def cmd_mlf(cfg: RunConfig, out: OutputDir) -> dict[str, float]:
    from fracwear.special_functions import mittag_leffler_info

    alpha = cfg.num("mlf", "alpha")
    beta = cfg.num("mlf", "beta")
    rows = []
    for z in cfg.nums("mlf", "z"):
        v = mittag_leffler_info(alpha, beta, z)
        rows.append((alpha, beta, z, v.value, v.branch, v.est_rel_err))
    out.csv("mlf.csv", ("alpha", "beta", "z", "value", "branch", "est_rel_err"), rows)
    return {"ml_target_rel_tol": 1.0e-12}


def cmd_spectrum(cfg: RunConfig, out: OutputDir) -> dict[str, float]:
    from fracwear.spectrum import compute_spectrum, mode_parity, spectrum_diagnostics

    kernel = _kernel(cfg)
    basis = compute_spectrum(kernel, cfg.int("numerics", "n"))
    parity = mode_parity(basis)
    lam = basis.lambda_k
    rows = (
        (k + 1, lam[k] if k < lam.size else "", basis.sigma[k], basis.loads[k], int(parity[k]))
        for k in range(basis.n_modes)
    )
    out.csv("spectrum.csv", ("n", "lambda_n", "sigma_n", "l_n", "parity"), rows)
    out.json("diagnostics.json", spectrum_diagnostics(basis, kernel))
    return {"psd": 1.0e-10, "interlacing": 1.0e-8, "null_mode": 1.0e-8}


def cmd_init(cfg: RunConfig, out: OutputDir) -> dict[str, float]:
    s = _setup(cfg, need_coeffs=False)
    from fracwear.initial_state import project_initial

    grid = s.basis.grid
    out.csv("initial.csv", ("x", "p0"), zip(grid.nodes, s.state.p0))
    diag: dict[str, Any] = {
        "delta0": s.state.delta0,
        "load": s.state.load,
        "mass": s.state.mass(),
        "square_integrable": s.state.square_integrable,
    }
    if s.state.square_integrable:
        coeffs = project_initial(s.state, s.basis, s.modes)
        out.csv(
            "coefficients.csv",
            ("k", "d0", "load"),
            ((k + 1, coeffs.d0[k], s.basis.loads[k]) for k in range(coeffs.n_modes)),
        )
        diag["projection_residual"] = coeffs.residual
        diag["d_perp0"] = coeffs.d_perp0
    else:
        diag["projection_residual"] = None
        diag["note"] = "initial pressure is not square integrable; no modal projection"
    out.json("diagnostics.json", diag)
    return {"mass": 1.0e-8}


def _x_select(cfg: RunConfig, n: int):
    return slice(None, None, cfg.int("numerics", "x_stride"))


def cmd_evolve(cfg: RunConfig, out: OutputDir) -> dict[str, float]:
    import numpy as np

    from fracwear.evolution import indentation, pressure_field, pressure_history, residual_check, wear_field

    s = _setup(cfg)
    times = np.array(cfg.nums("numerics", "times"))
    dt = cfg.num("numerics", "dt")
    t_end = cfg.num("numerics", "t_end")
    n_nodes = int(round(t_end / dt)) + 1

    field = pressure_field(s.params, s.basis, s.coeffs, s.load, times, s.modes)
    history = pressure_history(s.params, s.basis, s.coeffs, s.load, t_end, n_nodes, s.modes)
    wear_hist = wear_field(s.params, history)
    # wear is an integral in time, so linear interpolation between steps is second order
    wear = np.array([np.interp(times, history.t, col) for col in wear_hist.T]).T
    delta = indentation(s.params, s.basis, s.coeffs, s.load, times, s.modes)
    residual = residual_check(history, s.state, s.load)

    sel = _x_select(cfg, s.basis.grid.n)
    x = s.basis.grid.nodes[sel]
    out.csv(
        "pressure.csv",
        ("t", "x", "p"),
        ((t, xi, pi) for t, row in zip(times, field.p) for xi, pi in zip(x, row[sel])),
    )
    out.csv(
        "wear.csv",
        ("t", "x", "w"),
        ((t, xi, wi) for t, row in zip(times, wear) for xi, wi in zip(x, row[sel])),
    )
    out.csv("indentation.csv", ("t", "delta_rel"), zip(times, delta))
    mass_err = np.abs(field.mass() - field.load_values) / np.abs(field.load_values)
    out.json(
        "diagnostics.json",
        {
            "max_mass_rel_error": float(mass_err.max()),
            "min_wear": float(wear_hist.min()),
            "max_residual": float(np.max(residual[1:])) if residual.size > 1 else 0.0,
            "projection_residual": s.coeffs.residual,
            "modes": s.modes,
        },
    )
    return {"mass": 1.0e-8}


def _decay_times(alpha: float):
    import numpy as np

    if abs(alpha - 1.0) < 1.0e-12:
        return np.linspace(0.0, 30.0, 601)
    return np.concatenate([[0.0], np.geomspace(1.0e-2, 1.0e3, 400)])


def cmd_stationary(cfg: RunConfig, out: OutputDir) -> dict[str, float]:
    import numpy as np

    from fracwear.evolution import LoadProfile, mode_coefficients
    from fracwear.stationary import (
        decay_rate_fit,
        distance_to_stationary,
        stationary_constant_load,
        stationary_for_load,
    )

    s = _setup(cfg)
    limit = stationary_for_load(s.params, s.basis, s.coeffs, s.load, s.modes)
    out.csv("stationary.csv", ("x", "p_inf"), zip(limit.x, limit.values))

    # the approach to the limit is fitted on a constant-load run
    const = LoadProfile.constant(s.load.p0)
    limit0 = stationary_constant_load(s.params, s.basis, s.coeffs, s.load.p0, s.modes)
    times = _decay_times(s.params.alpha)
    norms = distance_to_stationary(s.params, s.basis, s.coeffs, const, limit0, times, s.modes)
    start, end = cfg.get("stationary", "fit_start"), cfg.get("stationary", "fit_end")
    window = None
    if start.strip() or end.strip():
        window = (
            _decimal(start, "stationary.fit_start") if start.strip() else float(times[1]),
            _decimal(end, "stationary.fit_end") if end.strip() else float(times[-1]),
        )
    fit = decay_rate_fit(times, norms, s.params, float(s.basis.sigma[0]), window=window)

    i0 = int(np.argmin(np.abs(s.basis.grid.nodes)))
    d = mode_coefficients(
        s.params, s.basis.sigma[: s.modes], s.coeffs.d0, s.basis.loads[: s.modes], const, times[1:]
    )
    dev = (d - limit0.coefficients) @ s.basis.phi[i0, : s.modes]
    signs = np.sign(dev[np.abs(dev) > 1.0e-12 * max(1.0, np.abs(dev).max())])
    payload = {
        "kind": fit.kind,
        "t_window": list(fit.t_window),
        "fitted": fit.fitted,
        "predicted": fit.predicted,
        "rel_dev": fit.rel_dev,
        "n_samples": fit.n_samples,
        "envelope": fit.envelope,
        "sign_changes_at_x0": int(np.count_nonzero(np.diff(signs) != 0)),
        "stationary_mass": limit.mass(s.basis.grid.weights),
        "terminal_load": limit.terminal_load,
    }
    out.json("decay_fit.json", payload)
    return {"stationary_mass": 1.0e-8}


def _validate_run(cfg: RunConfig, out: OutputDir, prefix: str = "") -> bool:
    import numpy as np

    from fracwear.evolution import pressure_field
    from fracwear.fd_reference import FdConfig, compare_solutions, solve_fd

    s = _setup(cfg)
    times = np.array(cfg.nums("numerics", "times"))
    tol = cfg.num("validate", "tolerance")
    frac = cfg.num("validate", "interior_fraction")

    t0 = time.perf_counter()
    spectral = pressure_field(s.params, s.basis, s.coeffs, s.load, times, s.modes)
    t1 = time.perf_counter()
    fd_cfg = FdConfig(
        dt=cfg.num("numerics", "dt"), t_end=cfg.num("numerics", "t_end"), n_space=s.basis.grid.n
    )
    fd = solve_fd(s.params, s.basis.operators, s.load, s.state, fd_cfg, output_times=times)
    t2 = time.perf_counter()
    dist = compare_solutions(fd, spectral, frac)

    out.csv(prefix + "comparison.csv", ("t", "rel_l2_interior"), zip(times, dist))
    passed = bool(np.all(dist <= tol))
    mass = lambda f: float(np.max(np.abs(f.mass() - f.load_values) / np.abs(f.load_values)))  # noqa: E731
    out.json(
        prefix + "verdict.json",
        {
            "passed": passed,
            "tolerance": tol,
            "interior_fraction": frac,
            "max_distance": float(dist.max()),
            "spectral_seconds": round(t1 - t0, 3),
            "fd_seconds": round(t2 - t1, 3),
            "spectral_mass_rel_error": mass(spectral),
            "fd_mass_rel_error": mass(fd),
            "stability": fd_cfg.stability_report(s.params, float(s.basis.sigma.min())),
        },
    )
    return passed


class NumericalFailure(RuntimeError):
    """A run completed but failed its own acceptance check."""


def _volterra_table(cfg: RunConfig, out: OutputDir) -> None:
    """Closed-form Volterra solvers against the product-integration oracle."""
    import math

    import numpy as np

    from fracwear.special_functions import mittag_leffler
    from fracwear.volterra import (
        SampledFunction,
        TimeGrid,
        residual,
        solve_abel_first_kind,
        solve_abel_first_kind_high,
        solve_abel_second_kind,
        solve_script_e_first_kind,
        solve_script_e_second_kind,
        volterra_oracle,
    )

    alpha, mu, lam = cfg.num("model", "alpha"), cfg.num("model", "mu"), 0.7
    grid = TimeGrid.uniform_grid(cfg.num("numerics", "t_end"), 400)
    f = SampledFunction.from_callable(grid, lambda t: t**2, lambda t: 2.0 * t, lambda t: 2.0 + 0.0 * t)

    def power(s):
        return s ** (alpha - 1.0) / math.gamma(alpha)

    def ml(s):
        return s ** (alpha - 1.0) * mittag_leffler(alpha, alpha, -mu * s**alpha)

    if alpha > 1:
        d_power = lambda s: s ** (alpha - 2.0) / math.gamma(alpha - 1.0)  # noqa: E731
        d_ml = lambda s: s ** (alpha - 2.0) * mittag_leffler(alpha, alpha - 1.0, -mu * s**alpha)  # noqa: E731
    else:
        d_power = lambda s: 0.0 * s  # noqa: E731
        d_ml = lambda s: -mu * np.exp(-mu * s)  # noqa: E731
    abel_first = solve_abel_first_kind if alpha < 1 else solve_abel_first_kind_high
    cases = [
        ("abel_second", solve_abel_second_kind(alpha, lam, f), power, lam, "second", None),
        ("script_e_second", solve_script_e_second_kind(alpha, mu, lam, f), ml, lam, "second", None),
        ("abel_first", abel_first(alpha, f), power, 1.0, "first", d_power),
        ("script_e_first", solve_script_e_first_kind(alpha, mu, f), ml, 1.0, "first", d_ml),
    ]
    rows = []
    mask = grid.nodes > 0
    for name, u, kern, coef, kind, deriv in cases:
        kw = {} if deriv is None else {"kernel_derivative": deriv}
        oracle = volterra_oracle(kern, alpha - 1.0, coef, f, kind, **kw)
        gap = np.max(np.abs(u.values[mask] - oracle.values[mask])) / np.max(np.abs(oracle.values[mask]))
        rows.append((name, alpha, gap, residual(kern, alpha - 1.0, coef, u, f, kind)))
    out.csv("volterra.csv", ("solver", "alpha", "oracle_gap", "residual"), rows)


def cmd_validate(cfg: RunConfig, out: OutputDir) -> dict[str, float]:
    _volterra_table(cfg, out)
    if not _validate_run(cfg, out):
        out.manifest("validate", cfg, {"rel_l2_interior": cfg.num("validate", "tolerance")})
        raise NumericalFailure("spectral and FD solutions differ by more than the tolerance")
    return {"rel_l2_interior": cfg.num("validate", "tolerance")}


def cmd_demo_paper(cfg: RunConfig, out: OutputDir) -> dict[str, float]:
    import numpy as np

    from fracwear.evolution import LoadProfile, mode_coefficients, pressure_field
    from fracwear.stationary import stationary_transitional_load

    # 1. cross-validation of the reference run
    passed = _validate_run(cfg, out, prefix="verification/")
    s = _setup(cfg)
    times = np.array(cfg.nums("numerics", "times"))
    field = pressure_field(s.params, s.basis, s.coeffs, s.load, times, s.modes)
    x = s.basis.grid.nodes
    out.csv(
        "verification/pressure.csv",
        ("t", "x", "p"),
        ((t, xi, pi) for t, row in zip(times, field.p) for xi, pi in zip(x, row)),
    )

    # 2. stationary profiles for a sweep of mu
    p1 = s.load(s.load.variation_end)
    rows, norms = [], {}
    for mu in (0.0, 0.5, 1.2, 3.0, 6.0):
        prm = _params(cfg, mu=mu)
        lim = stationary_transitional_load(prm, s.basis, s.coeffs, s.load.p0, float(p1), s.modes)
        rows.extend((mu, xi, pi) for xi, pi in zip(x, lim.values))
        norms[f"{mu:g}"] = s.basis.grid.norm(lim.values - float(p1) / (2.0 * prm.a))
    out.csv("mu_sweep/stationary.csv", ("mu", "x", "p_inf"), rows)
    out.json("mu_sweep/deviation_norms.json", norms)

    # 3. constant-load histories at x = 0 and x = 0.5 for a sweep of alpha
    const = LoadProfile.constant(s.load.p0)
    probes = np.array([0.0, 0.5 * s.params.a])
    phi_probe = np.array([np.interp(probes, x, s.basis.phi[:, k]) for k in range(s.modes)]).T
    rows = []
    for alpha in (0.6, 1.0, 1.2, 1.8):
        prm = _params(cfg, alpha=alpha)
        t = np.linspace(0.0, 40.0 if alpha > 1.5 else 10.0, 801)
        d = mode_coefficients(
            prm, s.basis.sigma[: s.modes], s.coeffs.d0, s.basis.loads[: s.modes], const, t
        )
        p = const.p0 / (2.0 * prm.a) + d @ phi_probe.T
        rows.extend((alpha, ti, pa, pb) for ti, pa, pb in zip(t, p[:, 0], p[:, 1]))
    out.csv("alpha_sweep/history.csv", ("alpha", "t", "p_x0", "p_x05"), rows)

    out.json("diagnostics.json", {"verification_passed": passed, "mu_deviation_norms": norms})
    return {"rel_l2_interior": cfg.num("validate", "tolerance")}


COMMANDS: dict[str, Callable[[RunConfig, OutputDir], dict[str, float]]] = {
    "mlf": cmd_mlf,
    "spectrum": cmd_spectrum,
    "init": cmd_init,
    "evolve": cmd_evolve,
    "stationary": cmd_stationary,
    "validate": cmd_validate,
    "demo-paper": cmd_demo_paper,
}


# }}}


# {{{ entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fracwear",
        description="Fractional hereditary wear of a punch: spectral solver and reference checks.",
    )
    parser.add_argument("subcommand", nargs="?", choices=SUBCOMMANDS)
    parser.add_argument("--config", type=Path, default=None, help="INI file (defaults if omitted)")
    parser.add_argument("--out", type=Path, default=Path("out"), help="output directory")
    parser.add_argument("--threads", type=int, default=None, help="BLAS thread count")
    parser.add_argument("--quiet", action="store_true", help="only report errors")
    return parser


def _error(kind: str, message: str, code: int) -> int:
    print(json.dumps({"error": kind, "message": message, "exit_code": code}), file=sys.stderr)
    return code


def _set_threads(n: int) -> None:
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ[var] = str(n)
    if "numpy" in sys.modules:
        logger.warning("numpy is already loaded; --threads may have no effect")


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.subcommand is None:
        parser.print_usage(sys.stderr)
        return _error("usage", "a subcommand is required", 2)
    if args.threads is not None:
        if args.threads < 1:
            return _error("usage", "--threads must be positive", 2)
        _set_threads(args.threads)

    logging.basicConfig(
        level=logging.ERROR if args.quiet else logging.INFO, format="%(levelname)s %(message)s"
    )

    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        parser.print_usage(sys.stderr)
        return _error("config", str(exc), 2)

    import numpy as np

    from fracwear.evolution import ConsistencyError
    from fracwear.fd_reference import StabilityError
    from fracwear.initial_state import ContractError
    from fracwear.spectrum import ModelAssumptionError
    from fracwear.stationary import FitError

    out = OutputDir(args.out)
    start = time.perf_counter()
    try:
        tolerances = COMMANDS[args.subcommand](cfg, out)
    except (ConfigError, ContractError, ModelAssumptionError) as exc:
        return _error(type(exc).__name__, str(exc), 2)
    except NumericalFailure as exc:
        return _error(type(exc).__name__, str(exc), 1)
    except (
        StabilityError,
        ConsistencyError,
        FitError,
        FloatingPointError,
        np.linalg.LinAlgError,
    ) as exc:
        return _error(type(exc).__name__, str(exc), 1)
    except ValueError as exc:
        return _error(type(exc).__name__, str(exc), 2)

    out.manifest(args.subcommand, cfg, tolerances)
    if not args.quiet:
        print(
            f"{args.subcommand}: wrote {len(set(out.files)) + 1} files to {out.root} "
            f"in {time.perf_counter() - start:.1f} s"
        )
    return 0


# }}}
