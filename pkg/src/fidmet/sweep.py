"""Parameter sweeps persisted as CSV, plus plot-script emission.

The CSV schema is fixed: model,method,L,param1,param2,observable,value,
std_error,seed. Floats are serialized with 17 significant digits so a parsed
file reproduces the in-memory rows exactly and reruns are byte-identical.
Rows are ordered by grid index, then lattice size, then seed; failures of
single grid points (typically enumeration-budget violations) become rows
with observable="error" instead of aborting the sweep.
"""

from __future__ import annotations

import csv
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import eightvertex, ising, smf
from .errors import FidmetError

log = logging.getLogger(__name__)

CSV_COLUMNS = ("model", "method", "L", "param1", "param2", "observable", "value", "std_error", "seed")

MODELS = ("smf", "ising", "eight_vertex")
METHODS = ("enumerate", "mc", "exact_formula")

_CLASS_CODES = {"power_law": 1.0, "logarithmic": 0.0, "non_divergent": -1.0}


def _fmt17(x: float) -> str:
    return f"{float(x):.17g}"


@dataclass(frozen=True)
class SweepRow:
    model: str
    method: str
    L: int
    param1: float
    param2: float | None
    observable: str
    value: float
    std_error: float
    seed: int


@dataclass(frozen=True)
class SweepSpec:
    """What to compute: a parameter grid x sizes x seeds for one model/method.

    param1/param2 are (start, stop, count) axes; param2 is None for the
    one-parameter models. seeds apply to method="mc" only; exact rows carry
    seed 0 and std_error 0. exact_formula has no lattice size and uses
    sizes=[0] to mean the thermodynamic limit.
    """

    model: str
    method: str
    param1: tuple[float, float, int]
    param2: tuple[float, float, int] | None
    sizes: tuple[int, ...]
    n_therm: int = 200
    n_sweeps: int = 2000
    seeds: tuple[int, ...] = (1,)
    output_path: str | None = None
    threads: int = 1

    def __post_init__(self) -> None:
        if self.model not in MODELS:
            raise ValueError(f"model must be one of {MODELS}, got {self.model!r}")
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        for axis in (self.param1, self.param2):
            if axis is not None and (len(axis) != 3 or int(axis[2]) < 1):
                raise ValueError(f"parameter axis needs (start, stop, count >= 1), got {axis}")
        if self.model == "eight_vertex" and self.param2 is None:
            raise ValueError("eight_vertex sweeps need both parameter axes")
        if self.model in ("smf", "ising") and self.param2 is not None:
            raise ValueError(f"{self.model} sweeps take a single parameter axis")
        if len(set(self.seeds)) != len(self.seeds):
            raise ValueError("seeds must be unique")
        if not self.sizes:
            raise ValueError("sizes must be nonempty")
        if self.method == "exact_formula":
            if self.model == "smf":
                raise ValueError("smf has no closed-form route; use enumerate or mc")
            if tuple(self.sizes) != (0,):
                raise ValueError("exact_formula is a thermodynamic-limit route; use sizes=[0]")
        elif any(s < 2 for s in self.sizes):
            raise ValueError("lattice sizes must be >= 2")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")
        object.__setattr__(self, "param1", tuple(self.param1))
        if self.param2 is not None:
            object.__setattr__(self, "param2", tuple(self.param2))
        object.__setattr__(self, "sizes", tuple(int(s) for s in self.sizes))
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))

    def grid(self) -> list[tuple[float, float | None]]:
        """Grid points in row-major order (param1 outer, param2 inner)."""
        p1 = np.linspace(*self.param1[:2], int(self.param1[2]))
        if self.param2 is None:
            return [(float(a), None) for a in p1]
        p2 = np.linspace(*self.param2[:2], int(self.param2[2]))
        return [(float(a), float(b)) for a in p1 for b in p2]


@dataclass(frozen=True)
class SweepResult:
    spec: SweepSpec
    rows: tuple[SweepRow, ...]
    path: str | None


def _rows_smf(method, p1, p2, L, seed, spec):
    beta = p1
    if method == "enumerate":
        g = smf.metric_fluctuation(beta, L)
        vals = [
            ("Z", smf.partition_function(beta, L), 0.0),
            ("g_bb", g, 0.0),
            ("g_bb_per_site", g / (L * L), 0.0),
            ("m", smf.magnetization(beta, L), 0.0),
        ]
        return [SweepRow("smf", method, L, beta, None, o, v, e, 0) for o, v, e in vals]
    sample = ising.mc_sample_energy(beta, L, spec.n_therm, spec.n_sweeps, seed)
    var = sample.energy_var
    vals = [
        ("g_bb", var.mean / 4.0, var.std_error / 4.0),
        ("g_bb_per_site", var.mean / (4.0 * L * L), var.std_error / (4.0 * L * L)),
    ]
    return [SweepRow("smf", method, L, beta, None, o, v, e, seed) for o, v, e in vals]


def _rows_ising(method, p1, p2, L, seed, spec):
    beta = p1
    if method == "enumerate":
        vals = [
            ("c_v", ising.specific_heat_exact(beta, L), 0.0),
            ("E_mean", ising._energy_moments(beta, L)[0], 0.0),
        ]
        return [SweepRow("ising", method, L, beta, None, o, v, e, 0) for o, v, e in vals]
    if method == "exact_formula":
        return [
            SweepRow("ising", method, 0, beta, None, "c_v", ising.onsager_specific_heat(beta), 0.0, 0)
        ]
    sample = ising.mc_sample_energy(beta, L, spec.n_therm, spec.n_sweeps, seed)
    cv = sample.specific_heat()
    vals = [
        ("c_v", cv.mean, cv.std_error),
        ("E_mean", sample.energy.mean, sample.energy.std_error),
        ("E_var", sample.energy_var.mean, sample.energy_var.std_error),
    ]
    return [SweepRow("ising", method, L, beta, None, o, v, e, seed) for o, v, e in vals]


def _rows_8v(method, p1, p2, L, seed, spec):
    u, v = p1, p2
    if method == "enumerate":
        tensor = eightvertex.metric_fluctuations(u, v, L)
        vals = [
            ("g_cc", tensor.g_cc, 0.0),
            ("g_dd", tensor.g_dd, 0.0),
            ("g_cd", tensor.g_cd, 0.0),
        ]
        return [SweepRow("eight_vertex", method, L, u, v, o, val, e, 0) for o, val, e in vals]
    if method == "exact_formula":
        res = eightvertex.scaling_exponent(u, v)
        vals = [
            ("mu", res.mu, 0.0),
            ("exponent", res.exponent, 0.0),
            ("class_code", _CLASS_CODES[res.divergence_class], 0.0),
            ("integer_flag", 1.0 if res.integer_exponent else 0.0, 0.0),
        ]
        return [SweepRow("eight_vertex", method, 0, u, v, o, val, e, 0) for o, val, e in vals]
    sample = eightvertex.mc_sample_vertices(u, v, L, spec.n_therm, spec.n_sweeps, seed)
    su, sv = 4.0 * u * u, 4.0 * v * v
    vals = [
        ("n_c_mean", sample.n_c.mean, sample.n_c.std_error),
        ("n_d_mean", sample.n_d.mean, sample.n_d.std_error),
        ("g_cc", sample.var_c.mean / su, sample.var_c.std_error / su),
        ("g_dd", sample.var_d.mean / sv, sample.var_d.std_error / sv),
        ("g_cd", sample.cov_cd.mean / (2 * u * v), sample.cov_cd.std_error / (2 * u * v)),
    ]
    return [SweepRow("eight_vertex", method, L, u, v, o, val, e, seed) for o, val, e in vals]


_ROW_BUILDERS = {"smf": _rows_smf, "ising": _rows_ising, "eight_vertex": _rows_8v}


def _run_task(spec: SweepSpec, p1: float, p2, L: int, seed: int) -> list[SweepRow]:
    builder = _ROW_BUILDERS[spec.model]
    try:
        return builder(spec.method, p1, p2, L, seed, spec)
    except (FidmetError, ValueError, ArithmeticError) as exc:
        log.warning("sweep point failed (param1=%s, param2=%s, L=%s): %s", p1, p2, L, exc)
        nan = float("nan")
        return [SweepRow(spec.model, spec.method, L, p1, p2, "error", nan, nan, seed)]


def run_sweep(spec: SweepSpec) -> SweepResult:
    """Execute the sweep, optionally persist it, and return ordered rows.

    Tasks fan out to a thread pool (the Monte Carlo kernels release the GIL)
    but the output order is fixed by the task list, so the result and the
    CSV bytes do not depend on the thread count.
    """
    seeds = spec.seeds if spec.method == "mc" else (0,)
    tasks = [
        (p1, p2, L, seed)
        for (p1, p2) in spec.grid()
        for L in spec.sizes
        for seed in seeds
    ]
    if spec.threads == 1:
        results = [_run_task(spec, *t) for t in tasks]
    else:
        with ThreadPoolExecutor(max_workers=spec.threads) as pool:
            futures = [pool.submit(_run_task, spec, *t) for t in tasks]
            results = [f.result() for f in futures]
    rows = tuple(row for chunk in results for row in chunk)
    if spec.output_path is not None:
        write_sweep_csv(spec.output_path, rows)
    return SweepResult(spec=spec, rows=rows, path=spec.output_path)


def write_sweep_csv(path, rows) -> None:
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for r in rows:
            writer.writerow(
                [
                    r.model,
                    r.method,

                    str(r.L),
                    _fmt17(r.param1),
                    "" if r.param2 is None else _fmt17(r.param2),
                    r.observable,
                    _fmt17(r.value),
                    _fmt17(r.std_error),
                    str(r.seed),
                ]
            )


def read_sweep_csv(path) -> list[SweepRow]:
    """Parse a sweep CSV back into rows (exact round trip of the floats)."""
    rows = []
    with Path(path).open(newline="") as fh:
        reader = csv.DictReader(fh)
        missing = [c for c in CSV_COLUMNS if c not in (reader.fieldnames or [])]
        if missing:
            raise ValueError(f"missing column(s): {', '.join(missing)}")
        for rec in reader:
            rows.append(
                SweepRow(
                    model=rec["model"],
                    method=rec["method"],
                    L=int(rec["L"]),
                    param1=float(rec["param1"]),
                    param2=None if rec["param2"] == "" else float(rec["param2"]),
                    observable=rec["observable"],
                    value=float(rec["value"]),
                    std_error=float(rec["std_error"]),
                    seed=int(rec["seed"]),
                )
            )
    return rows


_PLOT_KINDS = ("metric_vs_beta", "peak_scaling", "exponent_map")

_CURVES_TEMPLATE = '''#!/usr/bin/env python3
"""{title}

Generated plotting script: reads the sweep CSV by relative path and only
selects columns; all numbers come straight from the file.
"""
import csv
import os
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

HERE = os.path.dirname(os.path.abspath(__file__))
CSV_PATH = os.path.join(HERE, {relpath!r})
OBSERVABLE = {observable!r}

series = defaultdict(list)
with open(CSV_PATH, newline="") as fh:
    for row in csv.DictReader(fh):
        if row["observable"] == OBSERVABLE:
            series[int(row["L"])].append(
                (float(row["param1"]), float(row["value"]), float(row["std_error"]))
            )
if not series:
    raise SystemExit(f"no rows with observable {{OBSERVABLE!r}} in {{CSV_PATH}}")

fig, ax = plt.subplots(figsize=(6, 4))
for L in sorted(series):
    pts = sorted(series[L])
    ax.errorbar(
        [p[0] for p in pts],
        [p[1] for p in pts],
        yerr=[p[2] for p in pts],
        marker="o",
        markersize=3,
        capsize=2,
        label=f"L={{L}}",
    )
ax.set_xlabel({xlabel!r})
ax.set_ylabel(OBSERVABLE)
ax.legend()
fig.tight_layout()
fig.savefig(os.path.join(HERE, {png!r}), dpi=150)
print("wrote", os.path.join(HERE, {png!r}))
'''

_MAP_TEMPLATE = '''#!/usr/bin/env python3
"""{title}

Generated plotting script: reads the sweep CSV by relative path and only
selects columns; all numbers come straight from the file.
"""
import csv
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

HERE = os.path.dirname(os.path.abspath(__file__))
CSV_PATH = os.path.join(HERE, {relpath!r})
OBSERVABLE = {observable!r}

us, vs, zs = [], [], []
with open(CSV_PATH, newline="") as fh:
    for row in csv.DictReader(fh):
        if row["observable"] == OBSERVABLE:
            us.append(float(row["param1"]))
            vs.append(float(row["param2"]))
            zs.append(float(row["value"]))
if len(us) < 3:
    raise SystemExit(f"need >= 3 rows with observable {{OBSERVABLE!r}} in {{CSV_PATH}}, found {{len(us)}}")

fig, ax = plt.subplots(figsize=(5.5, 4.5))
im = ax.tripcolor(us, vs, zs, shading="gouraud")
fig.colorbar(im, ax=ax, label=OBSERVABLE)
ax.set_xlabel("u = c^2")
ax.set_ylabel("v = d^2")
fig.tight_layout()
fig.savefig(os.path.join(HERE, {png!r}), dpi=150)
print("wrote", os.path.join(HERE, {png!r}))
'''


def emit_plot_script(csv_path, kind: str, out_path) -> str:
    """Write a standalone plotting script next to ``out_path``.

    kind selects the figure: per-size metric curves ("metric_vs_beta"),
    per-size specific-heat curves ("peak_scaling") or a (u, v) heat map
    ("exponent_map"). The script references the CSV by relative path.
    """
    if kind not in _PLOT_KINDS:
        raise ValueError(f"kind must be one of {_PLOT_KINDS}, got {kind!r}")
    csv_path = Path(csv_path)
    out_path = Path(out_path)
    with csv_path.open(newline="") as fh:
        header = next(csv.reader(fh), [])
    missing = [c for c in CSV_COLUMNS if c not in header]
    if missing:
        raise ValueError(f"missing column(s): {', '.join(missing)}")
    rel = _relpath(csv_path, out_path.parent)
    png = out_path.stem + ".png"
    if kind == "metric_vs_beta":
        text = _CURVES_TEMPLATE.format(
            title="Metric density vs coupling, one curve per lattice size.",
            relpath=rel,
            observable="g_bb_per_site",
            xlabel="beta",
            png=png,
        )
    elif kind == "peak_scaling":
        text = _CURVES_TEMPLATE.format(
            title="Per-site specific heat vs coupling, one curve per lattice size.",
            relpath=rel,
            observable="c_v",
            xlabel="beta",
            png=png,
        )
    else:
        text = _MAP_TEMPLATE.format(
            title="Predicted metric-divergence exponent over the (u, v) plane.",
            relpath=rel,
            observable="exponent",
            png=png,
        )
    out_path.write_text(text)
    return str(out_path)


def _relpath(target: Path, start: Path) -> str:
    return os.path.relpath(os.path.abspath(target), os.path.abspath(start) or ".")
