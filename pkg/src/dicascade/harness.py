"""End-to-end experiments: graph, simulation, mean-field solution, comparison."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Optional
from xml.sax.saxutils import escape

import numpy as np

from .degree_model import (
    DegreeSequence,
    JointDegreePMF,
    MarginalSpec,
    balance_stubs,
    empirical_pmf,
    make_marginal_pmf,
    moments,
    product_joint,
    sample_degree_sequence,
)
from .epidemic_sim import EpidemicParams, run_replicas
from .graph import DirectedGraph, build_configuration_graph, degree_census
from .meanfield import DEFAULT_DT, ClassState, MeanFieldForm, integrate
from .rng import STREAM_BALANCE, STREAM_GRAPH, STREAM_SAMPLE, make_rng
from .trajectory import Trajectory


class ConfigError(ValueError):
    """Invalid experiment configuration."""


@dataclass(frozen=True)
class ExperimentConfig:
    n: int
    in_spec: MarginalSpec
    out_spec: MarginalSpec
    lam: float
    nu: float
    init_frac: float
    t_max: float
    dt: float = DEFAULT_DT
    replicas: int = 10
    grid_points: int = 200
    seed: int = 0
    ode_init: str = "realized"
    workers: int = 1

    def __post_init__(self):
        if isinstance(self.n, bool) or not isinstance(self.n, int) or self.n < 1:
            raise ConfigError(f"n: must be a positive integer, got {self.n!r}")
        if not self.dt > 0:
            raise ConfigError(f"dt: must be > 0, got {self.dt!r}")
        if self.replicas < 1:
            raise ConfigError(f"replicas: must be >= 1, got {self.replicas!r}")
        if self.grid_points < 2:
            raise ConfigError(f"grid_points: must be >= 2, got {self.grid_points!r}")
        if self.seed < 0:
            raise ConfigError(f"seed: must be >= 0, got {self.seed!r}")
        if self.ode_init not in ("realized", "expected"):
            raise ConfigError(f"ode_init: must be 'realized' or 'expected', got {self.ode_init!r}")
        if self.workers < 1:
            raise ConfigError(f"workers: must be >= 1, got {self.workers!r}")
        try:
            self.params
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    @property
    def params(self) -> EpidemicParams:
        return EpidemicParams(self.lam, self.nu, self.init_frac, self.t_max)

    @property
    def grid(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max, self.grid_points)

    def pmf(self) -> JointDegreePMF:
        return product_joint(make_marginal_pmf(self.in_spec), make_marginal_pmf(self.out_spec))

    def replace(self, **changes) -> "ExperimentConfig":
        data = {f.name: getattr(self, f.name) for f in fields(self)}
        data.update({k: v for k, v in changes.items() if v is not None})
        return ExperimentConfig(**data)

    def to_dict(self) -> dict:
        d = {f.name: getattr(self, f.name) for f in fields(self)}
        d["in_spec"] = self.in_spec.to_dict()
        d["out_spec"] = self.out_spec.to_dict()
        d["lambda"] = d.pop("lam")
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        data = dict(data)
        known = {f.name for f in fields(cls)} - {"lam"} | {"lambda"}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown config field(s): {', '.join(unknown)}")
        required = {"n", "in_spec", "out_spec", "lambda", "nu", "init_frac", "t_max"}
        missing = sorted(required - set(data))
        if missing:
            raise ConfigError(f"missing config field(s): {', '.join(missing)}")
        for key in ("in_spec", "out_spec"):
            try:
                data[key] = MarginalSpec.from_dict(data[key])
            except (ValueError, TypeError, AttributeError) as exc:
                raise ConfigError(f"{key}: {exc}") from None
        for key in ("n", "replicas", "grid_points", "seed", "workers"):
            if key in data and (isinstance(data[key], bool) or not isinstance(data[key], int)):
                raise ConfigError(f"{key}: must be an integer, got {data[key]!r}")
        for key in ("lambda", "nu", "init_frac", "t_max", "dt"):
            if key in data and (isinstance(data[key], bool) or not isinstance(data[key], (int, float))):
                raise ConfigError(f"{key}: must be a number, got {data[key]!r}")
            if key in data:
                data[key] = float(data[key])
        data["lam"] = data.pop("lambda")
        return cls(**data)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
        return cls.from_dict(data)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        return cls.from_json(Path(path).read_text())


def build_network(cfg: ExperimentConfig) -> tuple[DegreeSequence, DirectedGraph]:
    """Sample, balance and wire the graph; each stage has its own stream."""
    raw = sample_degree_sequence(cfg.pmf(), cfg.n, make_rng(cfg.seed, STREAM_SAMPLE))
    seq = balance_stubs(raw, make_rng(cfg.seed, STREAM_BALANCE))
    return seq, build_configuration_graph(seq, make_rng(cfg.seed, STREAM_GRAPH))


def graph_stats(seq: DegreeSequence, g: DirectedGraph) -> dict:
    src, dst = g.edges()
    distinct = len(set(zip(src.tolist(), dst.tolist())))
    ek, el, vk, vl = moments(empirical_pmf(seq))
    return {
        "n": g.n,
        "m": g.m,
        "classes": len(degree_census(g)),
        "self_loops": g.self_loop_count(),
        "multi_edges": g.m - distinct,
        "mean_in": ek,
        "mean_out": el,
        "var_in": vk,
        "var_out": vl,
    }


@dataclass
class ComparisonReport:
    sup_dist: float
    l2_dist: float
    t_half: tuple[float, float]
    peak_time: tuple[float, float]
    peak_value: tuple[float, float]

    def to_dict(self) -> dict:
        return {k: list(v) if isinstance(v, tuple) else v for k, v in asdict(self).items()}


def half_time(traj: Trajectory) -> float:
    """First grid time at which ``i + r`` reaches half of its own maximum."""
    cum = traj.i + traj.r
    j = int(np.argmax(cum >= 0.5 * cum.max()))
    return float(traj.grid[j])


def compare_trajectories(a: Trajectory, b: Trajectory) -> ComparisonReport:
    """Distances between aggregate infected curves plus per-curve timing.

    ``l2_dist`` is the trapezoidal L2 norm of the difference over the grid.
    """
    if a.grid.shape != b.grid.shape or not np.array_equal(a.grid, b.grid):
        raise ValueError("trajectories are sampled on different grids")
    diff = a.i - b.i
    sup = float(np.max(np.abs(diff)))
    if len(a.grid) > 1:
        sq = diff**2
        l2 = math.sqrt(float(np.sum(0.5 * (sq[1:] + sq[:-1]) * np.diff(a.grid))))
    else:
        l2 = 0.0
    pa, pb = int(np.argmax(a.i)), int(np.argmax(b.i))
    return ComparisonReport(
        sup,
        l2,
        (half_time(a), half_time(b)),
        (float(a.grid[pa]), float(b.grid[pb])),
        (float(a.i[pa]), float(b.i[pb])),
    )


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    sequence: DegreeSequence
    graph: DirectedGraph
    pmf: JointDegreePMF
    stats: dict
    sim: Trajectory
    runs: list
    ode: Trajectory
    report: ComparisonReport


def ode_initial_state(cfg: ExperimentConfig, pmf: JointDegreePMF, sim: Optional[Trajectory]) -> ClassState:
    if cfg.ode_init == "realized" and sim is not None:
        if sim.classes != pmf.classes:
            raise ValueError("simulation classes do not match the empirical pmf")
        return ClassState(pmf, sim.class_i[0], np.zeros(len(pmf)))
    return ClassState.uniform_seed(pmf, cfg.init_frac)


def run_experiment(cfg: ExperimentConfig, form: MeanFieldForm = MeanFieldForm.ABSOLUTE) -> ExperimentResult:
    """Graph -> replica simulations -> mean-field solution -> comparison.

    The ODE is fed the graph's empirical class distribution and, by
    default, the seed fractions actually realized by the replicas.
    """
    seq, g = build_network(cfg)
    pmf = empirical_pmf(seq)
    grid = cfg.grid
    rep = run_replicas(g, cfg.params, grid, cfg.seed, cfg.replicas, workers=cfg.workers)
    init = ode_initial_state(cfg, pmf, rep.mean)
    ode = integrate(init, cfg.params, form, dt=cfg.dt, grid=grid)
    report = compare_trajectories(rep.mean, ode)
    return ExperimentResult(cfg, seq, g, pmf, graph_stats(seq, g), rep.mean, rep.runs, ode, report)


# ----------------------------------------------------------------------------
# CSV

def _fmt(x: float) -> str:
    return format(float(x), ".9g")


def emit_csv(traj: Trajectory, path, per_class: bool = False) -> None:
    """Write ``t,s,i,r`` (plus ``i_k_l,r_k_l`` pairs when ``per_class``)."""
    header = ["t", "s", "i", "r"]
    cols = [traj.grid, traj.s, traj.i, traj.r]
    if per_class:
        if not traj.has_classes:
            raise ValueError("trajectory has no per-class data")
        for j, (k, l) in enumerate(traj.classes):
            header += [f"i_{k}_{l}", f"r_{k}_{l}"]
            cols += [traj.class_i[:, j], traj.class_r[:, j]]
    with open(Path(path), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in zip(*cols):
            w.writerow([_fmt(x) for x in row])


def read_csv(path) -> Trajectory:
    with open(Path(path), newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0][:4] != ["t", "s", "i", "r"]:
        raise ValueError(f"{path}: expected header starting with t,s,i,r")
    header = rows[0]
    data = np.array([[float(x) for x in row] for row in rows[1:]]).reshape(-1, len(header))
    extra = header[4:]
    if not extra:
        return Trajectory(data[:, 0], data[:, 2], data[:, 3])
    if len(extra) % 2:
        raise ValueError(f"{path}: per-class columns must come in i/r pairs")
    classes = []
    for a, b in zip(extra[::2], extra[1::2]):
        _, k, l = a.split("_")
        if b != f"r_{k}_{l}":
            raise ValueError(f"{path}: column {b!r} does not pair with {a!r}")
        classes.append((int(k), int(l)))
    traj = Trajectory.from_classes(data[:, 0], classes, data[:, 4::2], data[:, 5::2])
    # keep the aggregate columns as written rather than re-summed
    traj.i, traj.r = data[:, 2], data[:, 3]
    return traj


# ----------------------------------------------------------------------------
# SVG

_PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"]


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    span = hi - lo
    if span <= 0:
        return [lo]
    raw = span / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=10 * mag)
    start = math.ceil(lo / step) * step
    return [start + j * step for j in range(int((hi - start) / step + 1e-9) + 1)]


def emit_svg(curves, path, title: str = "", xlabel: str = "time", ylabel: str = "fraction infected",
             width: int = 640, height: int = 420) -> None:
    """Write a standalone line chart, one polyline per ``(label, t, y)`` curve."""
    curves = [(str(lab), np.asarray(t, float), np.asarray(y, float)) for lab, t, y in curves]
    if not curves:
        raise ValueError("nothing to plot")
    left, right, top, bottom = 60, 20, 36, 48
    pw, ph = width - left - right, height - top - bottom
    x0 = min(float(t.min()) for _, t, _ in curves)
    x1 = max(float(t.max()) for _, t, _ in curves)
    y1 = max(float(y.max()) for _, _, y in curves)
    y0, y1 = 0.0, (y1 if y1 > 0 else 1.0) * 1.05
    x1 = x1 if x1 > x0 else x0 + 1.0

    def px(x):
        return left + (x - x0) / (x1 - x0) * pw

    def py(y):
        return top + ph - (y - y0) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    if title:
        out.append(f'<text x="{width / 2:.1f}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>')
    for xt in _ticks(x0, x1):
        out.append(f'<line x1="{px(xt):.2f}" y1="{top + ph}" x2="{px(xt):.2f}" y2="{top + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{px(xt):.2f}" y="{top + ph + 18}" text-anchor="middle">{xt:g}</text>')
    for yt in _ticks(y0, y1):
        out.append(f'<line x1="{left - 5}" y1="{py(yt):.2f}" x2="{left}" y2="{py(yt):.2f}" stroke="black"/>')
        out.append(f'<text x="{left - 8}" y="{py(yt) + 4:.2f}" text-anchor="end">{yt:g}</text>')
    out.append(f'<text x="{left + pw / 2:.1f}" y="{height - 10}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(
        f'<text x="16" y="{top + ph / 2:.1f}" text-anchor="middle" '
        f'transform="rotate(-90 16 {top + ph / 2:.1f})">{escape(ylabel)}</text>'
    )
    for j, (label, t, y) in enumerate(curves):
        color = _PALETTE[j % len(_PALETTE)]
        pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(t, y))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        ly = top + 14 + 16 * j
        out.append(f'<line x1="{left + pw - 130}" y1="{ly}" x2="{left + pw - 110}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{left + pw - 104}" y="{ly + 4}">{escape(label)}</text>')
    out.append("</svg>")
    Path(path).write_text("\n".join(out) + "\n")


def write_experiment(result: ExperimentResult, out_dir, per_class: bool = False) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    emit_csv(result.sim, out / "sim.csv", per_class)
    emit_csv(result.ode, out / "ode.csv", per_class)
    (out / "report.json").write_text(json.dumps(result.report.to_dict(), indent=2) + "\n")
    emit_svg(
        [
            (f"simulation (mean of {result.config.replicas})", result.sim.grid, result.sim.i),
            ("mean-field ODE", result.ode.grid, result.ode.i),
        ],
        out / "figure.svg",
        title=f"N = {result.config.n}, lambda = {result.config.lam:g}, nu = {result.config.nu:g}",
    )
