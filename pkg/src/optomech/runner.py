"""Configuration-driven batch runs, parameter sweeps and their file outputs."""

from __future__ import annotations

import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from . import __version__
from .evolution import propagate
from .model import (
    DEFAULT_EPS_TRUNC,
    CouplingKind,
    CouplingVariant,
    Coherent,
    Custom,
    EffOrder,
    PhotonAdded,
    SystemParams,
    initial_state,
)
from .observables import (
    LN2,
    field_vectors,
    photon_stats,
    reduced_rho_atom,
    reduced_rho_field,
    reduced_rho_mirror,
    svne,
)
from .tomography import (
    default_theta_axis,
    default_x_axis,
    hermite_functions,
    quadrature_variance,
    squeezing_flags,
    state_tomogram,
    tomographic_entropy,
)
from .wigner import default_axis, wigner_grid

OBSERVABLES = ("svne_atom", "svne_mirror", "svne_field", "photon_stats", "tomogram", "wigner", "squeezing")
SERIES_COLUMNS = {
    "svne_atom": ("svne_atom",),
    "svne_mirror": ("svne_mirror",),
    "svne_field": ("svne_field",),
    "photon_stats": ("mean_n", "var_n", "mandel_q", "inversion"),
    "squeezing": ("S_theta0", "var_X_theta0"),
}
COLUMN_ORDER = (
    "svne_atom", "svne_mirror", "svne_field", "mean_n", "var_n",
    "mandel_q", "inversion", "S_theta0", "var_X_theta0",
)
SWEEP_PARAMETERS = ("kappa", "phi", "alpha")
COUPLING_NAMES = {v.value: v for v in CouplingVariant}
DEFAULT_OBSERVABLES = ("svne_atom", "svne_mirror", "svne_field", "photon_stats", "squeezing")
DEFAULT_GRID_TAUS = (0.0, 2.0, 5.0, 8.0)
COLLAPSE_DELTA = 0.05


class ConfigError(ValueError):
    """Invalid run configuration; ``errors`` lists ``(field, message)`` pairs."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(f"{k}: {m}" for k, m in self.errors))


class RunIOError(OSError):
    pass


@dataclass(frozen=True)
class Sweep:
    parameter: str
    values: tuple


@dataclass(frozen=True)
class GridSettings:
    wigner_spacing: float = 0.05
    wigner_half_width: float | None = None
    tomo_x_points: int = 2001
    tomo_theta_points: int = 181
    tomo_x_half_width: float | None = None


@dataclass(frozen=True)
class RunConfig:
    params: SystemParams = field(default_factory=SystemParams)
    field_init: object = field(default_factory=lambda: Coherent(5.0))
    tau_max: float = 10.0
    tau_steps: int = 1001
    epsilon_trunc: float = DEFAULT_EPS_TRUNC
    observables: tuple = DEFAULT_OBSERVABLES
    sweep: Sweep | None = None
    output_dir: str = "out"
    entropy_base: str = "nat"
    wigner_tau: tuple = DEFAULT_GRID_TAUS
    tomo_tau: tuple = DEFAULT_GRID_TAUS
    grids: GridSettings = field(default_factory=GridSettings)

    @property
    def tau_axis(self) -> np.ndarray:
        return np.linspace(0.0, self.tau_max, self.tau_steps)

    def series_columns(self):
        wanted = {c for obs in self.observables for c in SERIES_COLUMNS.get(obs, ())}
        return [c for c in COLUMN_ORDER if c in wanted]


# ---------------------------------------------------------------------------
# config parsing
# ---------------------------------------------------------------------------

_SCHEMA = {
    "system": {"omega_m_hz", "g_hz", "omega_hz", "eff_order"},
    "coupling": {"kind", "kappa"},
    "atom": {"phi_rad"},
    "field": {"kind", "alpha_re", "alpha_im", "m", "amplitudes"},
    "sim": {"tau_max", "tau_steps", "epsilon_trunc", "entropy_base"},
    "outputs": {"dir", "observables", "wigner_tau", "tomo_tau"},
    "sweep": {"parameter", "values"},
    "grids": {"wigner_spacing", "wigner_half_width", "tomo_x_points", "tomo_theta_points", "tomo_x_half_width"},
}


def _num(errors, key, value, kind=float, lo=None, lo_open=False, hi=None):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        errors.append((key, f"expected a number, got {value!r}"))
        return None
    if kind is int and (not isinstance(value, int) and not float(value).is_integer()):
        errors.append((key, f"expected an integer, got {value!r}"))
        return None
    value = kind(value)
    if lo is not None and (value < lo or (lo_open and value == lo)):
        errors.append((key, f"must be {'>' if lo_open else '>='} {lo}, got {value}"))
    if hi is not None and value > hi:
        errors.append((key, f"must be <= {hi}, got {value}"))
    return value


def _complex_list(errors, key, items):
    out = []
    for i, v in enumerate(items):
        if isinstance(v, (list, tuple)) and len(v) == 2 and all(isinstance(x, (int, float)) for x in v):
            out.append(complex(v[0], v[1]))
        elif isinstance(v, (int, float)) and not isinstance(v, bool):
            out.append(complex(v))
        else:
            errors.append((f"{key}[{i}]", "expected a number or a [re, im] pair"))
    return tuple(out)


def config_from_dict(raw: dict, base_dir: str | os.PathLike = ".") -> RunConfig:
    """Validate a parsed TOML document and resolve defaults."""
    errors = []
    for section, body in raw.items():
        if section not in _SCHEMA:
            errors.append((section, "unknown section"))
            continue
        if not isinstance(body, dict):
            errors.append((section, "expected a table"))
            continue
        for key in body:
            if key not in _SCHEMA[section]:
                errors.append((f"{section}.{key}", "unknown key"))
    get = lambda sec, key, default=None: raw.get(sec, {}).get(key, default) if isinstance(raw.get(sec, {}), dict) else default

    omega_m = _num(errors, "system.omega_m_hz", get("system", "omega_m_hz", 1e9), lo=0, lo_open=True)
    g = _num(errors, "system.g_hz", get("system", "g_hz", 1e6), lo=0, lo_open=True)
    omega = _num(errors, "system.omega_hz", get("system", "omega_hz", 1e6), lo=0)
    order = get("system", "eff_order", EffOrder.FIRST_ORDER.value)
    if order not in {e.value for e in EffOrder}:
        errors.append(("system.eff_order", f"must be one of {[e.value for e in EffOrder]}"))
        order = EffOrder.FIRST_ORDER.value

    kind = get("coupling", "kind", "constant")
    kappa = _num(errors, "coupling.kappa", get("coupling", "kappa", 0.0), lo=0, hi=1)
    if kind not in COUPLING_NAMES:
        errors.append(("coupling.kind", f"must be one of {sorted(COUPLING_NAMES)}"))
        kind = "constant"
    coupling = CouplingKind(COUPLING_NAMES[kind], kappa if (kind == "kappa" and kappa is not None) else 0.0)

    phi = _num(errors, "atom.phi_rad", get("atom", "phi_rad", math.pi / 2))

    fkind = get("field", "kind", "coherent")
    are = _num(errors, "field.alpha_re", get("field", "alpha_re", 5.0))
    aim = _num(errors, "field.alpha_im", get("field", "alpha_im", 0.0))
    alpha = complex(are or 0.0, aim or 0.0)
    if fkind == "coherent":
        field_init = Coherent(alpha)
    elif fkind == "photon_added":
        m = _num(errors, "field.m", get("field", "m", 1), kind=int, lo=0)
        field_init = PhotonAdded(alpha, m or 0)
    elif fkind == "custom":
        amps = get("field", "amplitudes")
        if not isinstance(amps, list) or not amps:
            errors.append(("field.amplitudes", "custom field needs a non-empty list"))
            field_init = Custom((1.0,))
        else:
            vals = _complex_list(errors, "field.amplitudes", amps)
            if vals and not any(vals):
                errors.append(("field.amplitudes", "amplitudes have zero norm"))
            field_init = Custom(vals or (1.0,))
    else:
        errors.append(("field.kind", "must be one of ['coherent', 'custom', 'photon_added']"))
        field_init = Coherent(alpha)

    tau_max = _num(errors, "sim.tau_max", get("sim", "tau_max", 10.0), lo=0, lo_open=True)
    tau_steps = _num(errors, "sim.tau_steps", get("sim", "tau_steps", 1001), kind=int, lo=2)
    eps = _num(errors, "sim.epsilon_trunc", get("sim", "epsilon_trunc", DEFAULT_EPS_TRUNC), lo=0, lo_open=True, hi=1)
    if eps == 1:
        errors.append(("sim.epsilon_trunc", "must lie in (0, 1)"))
    base = get("sim", "entropy_base", "nat")
    if base not in ("nat", "two"):
        errors.append(("sim.entropy_base", "must be 'nat' or 'two'"))

    out_dir = get("outputs", "dir", "out")
    if not isinstance(out_dir, str):
        errors.append(("outputs.dir", "expected a string"))
        out_dir = "out"
    obs = get("outputs", "observables", list(DEFAULT_OBSERVABLES))
    if not isinstance(obs, list) or any(o not in OBSERVABLES for o in obs):
        errors.append(("outputs.observables", f"expected a list drawn from {list(OBSERVABLES)}"))
        obs = []
    taus = {}
    for key in ("wigner_tau", "tomo_tau"):
        vals = get("outputs", key, list(DEFAULT_GRID_TAUS))
        if not isinstance(vals, list):
            errors.append((f"outputs.{key}", "expected a list of numbers"))
            vals = []
        taus[key] = tuple(v for v in (_num(errors, f"outputs.{key}", v, lo=0) for v in vals) if v is not None)

    sweep = None
    if "sweep" in raw:
        param = get("sweep", "parameter")
        values = get("sweep", "values")
        if param not in SWEEP_PARAMETERS:
            errors.append(("sweep.parameter", f"must be one of {list(SWEEP_PARAMETERS)}"))
        if not isinstance(values, list) or not values:
            errors.append(("sweep.values", "expected a non-empty list of numbers"))
            values = []
        hi = 1 if param == "kappa" else None
        lo = 0 if param == "kappa" else None
        vals = tuple(v for v in (_num(errors, "sweep.values", v, lo=lo, hi=hi) for v in values) if v is not None)
        if param == "alpha" and isinstance(field_init, Custom):
            errors.append(("sweep.parameter", "alpha sweeps need a coherent or photon-added field"))
        sweep = Sweep(param, vals)

    grid_kw = {}
    for key, kind_, lo in (
        ("wigner_spacing", float, 0),
        ("wigner_half_width", float, 0),
        ("tomo_x_points", int, 3),
        ("tomo_theta_points", int, 2),
        ("tomo_x_half_width", float, 0),
    ):
        if get("grids", key) is not None:
            grid_kw[key] = _num(errors, f"grids.{key}", get("grids", key), kind=kind_, lo=lo, lo_open=kind_ is float)
    if grid_kw.get("tomo_x_points") is not None and grid_kw["tomo_x_points"] % 2 == 0:
        errors.append(("grids.tomo_x_points", "must be odd so that X = 0 is sampled"))

    if errors:
        raise ConfigError(errors)

    params = SystemParams(omega_m=omega_m, G=g, Omega=omega, coupling=coupling, phi=phi, eff_order=order)
    out_path = Path(out_dir)
    if not out_path.is_absolute():
        out_path = Path(base_dir) / out_path
    return RunConfig(
        params=params,
        field_init=field_init,
        tau_max=tau_max,
        tau_steps=tau_steps,
        epsilon_trunc=eps,
        observables=tuple(obs),
        sweep=sweep,
        output_dir=str(out_path),
        entropy_base=base,
        wigner_tau=taus["wigner_tau"],
        tomo_tau=taus["tomo_tau"],
        grids=GridSettings(**grid_kw),
    )


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigError([("<file>", f"{path} does not exist")]) from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError([("<file>", f"invalid TOML: {exc}")]) from None
    return config_from_dict(raw, base_dir=path.parent)


def resolved_config(config: RunConfig) -> dict:
    """The fully resolved configuration in TOML-key form (for output headers)."""
    p = config.params
    f = config.field_init
    fld = {"kind": "coherent"}
    if isinstance(f, (Coherent, PhotonAdded)):
        a = complex(f.alpha)
        fld = {"kind": "coherent" if isinstance(f, Coherent) else "photon_added", "alpha_re": a.real, "alpha_im": a.imag}
        if isinstance(f, PhotonAdded):
            fld["m"] = f.m
    else:
        fld = {"kind": "custom", "amplitudes": [[c.real, c.imag] for c in f.amplitudes]}
    out = {
        "system": {"omega_m_hz": p.omega_m, "g_hz": p.G, "omega_hz": p.Omega, "eff_order": p.eff_order.value},
        "coupling": {"kind": p.coupling.variant.value, "kappa": p.coupling.kappa},
        "atom": {"phi_rad": p.phi},
        "field": fld,
        "sim": {
            "tau_max": config.tau_max,
            "tau_steps": config.tau_steps,
            "epsilon_trunc": config.epsilon_trunc,
            "entropy_base": config.entropy_base,
        },
        "outputs": {
            "dir": config.output_dir,
            "observables": list(config.observables),
            "wigner_tau": list(config.wigner_tau),
            "tomo_tau": list(config.tomo_tau),
        },
        "grids": {k: v for k, v in vars(config.grids).items()},
    }
    if config.sweep is not None:
        out["sweep"] = {"parameter": config.sweep.parameter, "values": list(config.sweep.values)}
    return out


# ---------------------------------------------------------------------------
# computation
# ---------------------------------------------------------------------------


def _alpha_abs(config: RunConfig) -> float:
    f = config.field_init
    if isinstance(f, (Coherent, PhotonAdded)):
        return abs(complex(f.alpha))
    amps = np.asarray(f.amplitudes)
    p = np.abs(amps) ** 2
    return math.sqrt(float(np.sum(np.arange(p.size) * p) / p.sum()))


def _x_axis(config: RunConfig) -> np.ndarray:
    g = config.grids
    if g.tomo_x_half_width is not None:
        return np.linspace(-g.tomo_x_half_width, g.tomo_x_half_width, g.tomo_x_points)
    return default_x_axis(_alpha_abs(config), g.tomo_x_points)


def _series_rows(config: RunConfig, taus) -> np.ndarray:
    """Series values at ``taus`` (one row per tau, columns as ``series_columns``)."""
    cols = config.series_columns()
    params = config.params
    s0 = initial_state(params, config.field_init, epsilon_trunc=config.epsilon_trunc)
    base = config.entropy_base
    need_sq = "S_theta0" in cols
    if need_sq:
        x = _x_axis(config)
        psi = hermite_functions(s0.n_max, x)
    rows = np.empty((len(taus), len(cols)))
    for i, tau in enumerate(taus):
        s = propagate(s0, float(tau), params)
        vals = {}
        if "svne_atom" in cols:
            vals["svne_atom"] = svne(reduced_rho_atom(s), base)
        if "svne_mirror" in cols:
            vals["svne_mirror"] = svne(reduced_rho_mirror(s), base)
        if "svne_field" in cols:
            vals["svne_field"] = svne(reduced_rho_field(s), base)
        if "mean_n" in cols:
            st = photon_stats(s)
            vals.update(mean_n=st.mean_n, var_n=st.var_n, mandel_q=st.mandel_q, inversion=st.inversion)
        if need_sq:
            w = sum(np.abs(v @ psi) ** 2 for v in field_vectors(s))
            vals["S_theta0"] = tomographic_entropy(w, x)
            vals["var_X_theta0"] = quadrature_variance(w, x)
        rows[i] = [vals[c] for c in cols]
    return rows


def compute_series(config: RunConfig, workers: int = 1) -> np.ndarray:
    taus = config.tau_axis
    if not config.series_columns():
        return np.empty((taus.size, 0))
    if workers <= 1:
        return _series_rows(config, taus)
    chunks = np.array_split(taus, workers)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(_series_rows, [config] * len(chunks), chunks))
    return np.concatenate(parts, axis=0)


def collapse_windows(series, tau_axis, level: float, delta: float):
    """Maximal runs of samples with ``|series - level| <= delta`` as ``(tau_start, tau_end)``."""
    if delta <= 0:
        raise ValueError("delta must be positive")
    y = np.asarray(series, dtype=float)
    t = np.asarray(tau_axis, dtype=float)
    inside = np.abs(y - level) <= delta
    edges = np.diff(np.concatenate([[0], inside.astype(int), [0]]))
    starts = np.flatnonzero(edges == 1)
    ends = np.flatnonzero(edges == -1) - 1
    return [(float(t[a]), float(t[b])) for a, b in zip(starts, ends)]


def longest_window(windows) -> float:
    return max((b - a for a, b in windows), default=0.0)


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------


def _fmt(x: float) -> str:
    return format(float(x) + 0.0, ".17g")


def _tau_label(tau: float) -> str:
    # shortest round-trip repr keeps distinct values in distinct files
    text = repr(float(tau))
    return text[:-2] if text.endswith(".0") else text


def _provenance(config: RunConfig, extra: dict | None = None) -> str:
    lines = [f"# optomech {__version__}", "# config: " + json.dumps(resolved_config(config), sort_keys=True)]
    if extra:
        lines.append("# " + json.dumps(extra, sort_keys=True))
    return "\n".join(lines) + "\n"


class _Writer:
    """Writes files atomically and removes everything written on failure."""

    def __init__(self, out_dir):
        self.out_dir = Path(out_dir)
        self.written = []

    def write(self, name, text) -> str:
        path = self.out_dir / name
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_name(path.name + ".tmp")
        with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
        self.written.append(path)
        return str(path)

    def cleanup(self):
        for p in self.written:
            try:
                p.unlink()
            except OSError:
                pass
            tmp = p.with_name(p.name + ".tmp")
            if tmp.exists():
                tmp.unlink()


def _matrix_csv(corner, col_axis, row_axis, values) -> str:
    out = [",".join([corner] + [_fmt(v) for v in col_axis])]
    for r, row in zip(row_axis, values):
        out.append(",".join([_fmt(r)] + [_fmt(v) for v in row]))
    return "\n".join(out) + "\n"


def series_csv(config: RunConfig, rows: np.ndarray) -> str:
    cols = config.series_columns()
    text = _provenance(config)
    if not cols:
        return text
    lines = [",".join(["tau"] + cols)]
    for tau, row in zip(config.tau_axis, rows):
        lines.append(",".join([_fmt(tau)] + [_fmt(v) for v in row]))
    return text + "\n".join(lines) + "\n"


@dataclass
class RunReport:
    output_dir: str
    files: list
    summary: dict

    def as_dict(self):
        return {"output_dir": self.output_dir, "files": self.files, "summary": self.summary}


def _summary(config: RunConfig, rows: np.ndarray) -> dict:
    cols = config.series_columns()
    taus = config.tau_axis
    level = LN2 if config.entropy_base == "nat" else 1.0
    out = {"n_max": initial_state(config.params, config.field_init, epsilon_trunc=config.epsilon_trunc).n_max}
    windows = {}
    for c in ("svne_atom", "svne_mirror"):
        if c in cols:
            w = collapse_windows(rows[:, cols.index(c)], taus, level, COLLAPSE_DELTA * level)
            windows[c] = {"level": level, "delta": COLLAPSE_DELTA * level, "windows": w, "longest": longest_window(w)}
    if windows:
        out["collapse_windows"] = windows
    if "S_theta0" in cols:
        flags = [squeezing_flags(s, v) for s, v in zip(rows[:, cols.index("S_theta0")], rows[:, cols.index("var_X_theta0")])]
        out["squeezing_fraction_theta0"] = {
            "entropic": float(np.mean([f[0] for f in flags])),
            "quadrature": float(np.mean([f[1] for f in flags])),
        }
    return out


def _grid_outputs(config: RunConfig):
    """Yield ``(filename, csv text)`` for the requested Wigner and tomogram grids."""
    if not ({"wigner", "tomogram"} & set(config.observables)):
        return
    params = config.params
    s0 = initial_state(params, config.field_init, epsilon_trunc=config.epsilon_trunc)
    g = config.grids
    if "wigner" in config.observables:
        half = g.wigner_half_width if g.wigner_half_width is not None else _alpha_abs(config) + 5.0
        axis = default_axis(half - 5.0, g.wigner_spacing)
        for tau in config.wigner_tau:
            grid = wigner_grid(propagate(s0, tau, params), axis, axis)
            text = _provenance(config, {"kind": "wigner", "tau": tau, "rows": "alpha2", "cols": "alpha1"})
            yield f"wigner_tau{_tau_label(tau)}.csv", text + _matrix_csv("alpha2\\alpha1", axis, axis, grid.values)
    if "tomogram" in config.observables:
        x = _x_axis(config)
        th = default_theta_axis(g.tomo_theta_points)
        for tau in config.tomo_tau:
            tomo = state_tomogram(propagate(s0, tau, params), x, th)
            text = _provenance(config, {"kind": "tomogram", "tau": tau, "rows": "theta", "cols": "X"})
            yield f"tomogram_tau{_tau_label(tau)}.csv", text + _matrix_csv("theta\\X", x, th, tomo.values)


def run(config: RunConfig, workers: int = 1) -> RunReport:
    """Evolve over the tau grid, evaluate observables and write all outputs."""
    return _write_run(config, compute_series(config, workers))


def _write_run(config: RunConfig, rows: np.ndarray) -> RunReport:
    summary = _summary(config, rows)
    writer = _Writer(config.output_dir)
    try:
        files = [writer.write("series.csv", series_csv(config, rows))]
        for name, text in _grid_outputs(config):
            files.append(writer.write(name, text))
        report = RunReport(config.output_dir, files, summary)
        body = json.dumps({"config": resolved_config(config), "summary": summary, "files": files}, sort_keys=True, indent=2)
        files.append(writer.write("report.json", body + "\n"))
    except OSError as exc:
        writer.cleanup()
        raise RunIOError(f"failed writing outputs to {config.output_dir}: {exc}") from exc
    return report


def _sweep_config(config: RunConfig, value: float) -> RunConfig:
    param = config.sweep.parameter
    p = config.params
    sub = Path(config.output_dir) / f"{param}_{_tau_label(value)}"
    if param == "kappa":
        p = replace(p, coupling=CouplingKind.kappa_deformed(value))
        new = replace(config, params=p)
    elif param == "phi":
        new = replace(config, params=replace(p, phi=float(value)))
    else:
        f = config.field_init
        if isinstance(f, Custom):
            raise ConfigError([("sweep.parameter", "alpha sweeps need a coherent or photon-added field")])
        new = replace(config, field_init=replace(f, alpha=complex(value)))
    return replace(new, sweep=None, output_dir=str(sub))


@dataclass
class SweepReport:
    matrix_file: str
    quantity: str
    values: list
    runs: list

    def as_dict(self):
        return {"matrix_file": self.matrix_file, "quantity": self.quantity, "values": self.values,
                "runs": [r.as_dict() for r in self.runs]}


def _run_single(cfg):
    rows = compute_series(cfg, 1)
    return _write_run(cfg, rows), rows


def sweep(config: RunConfig, workers: int = 1) -> SweepReport:
    """One run per sweep value on a shared tau axis plus a combined matrix file."""
    if config.sweep is None:
        raise ConfigError([("sweep", "config has no [sweep] section")])
    subs = [_sweep_config(config, v) for v in config.sweep.values]
    if workers > 1 and len(subs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_single, subs))
    else:
        results = [_run_single(c) for c in subs]
    cols = config.series_columns()
    quantity = "svne_atom" if "svne_atom" in cols else (cols[0] if cols else None)
    writer = _Writer(config.output_dir)
    param = config.sweep.parameter
    try:
        text = _provenance(config, {"kind": "sweep", "quantity": quantity, "rows": param, "cols": "tau"})
        if quantity is not None:
            mat = np.array([rows[:, cols.index(quantity)] for _, rows in results])
            text += _matrix_csv(f"{param}\\tau", config.tau_axis, config.sweep.values, mat)
        path = writer.write(f"sweep_{param}.csv", text)
    except OSError as exc:
        writer.cleanup()
        raise RunIOError(f"failed writing sweep matrix: {exc}") from exc
    return SweepReport(path, quantity, list(config.sweep.values), [r for r, _ in results])
