"""Experiment orchestration: replica fan-out, aggregation, CSV emission.

A run takes an :class:`ExperimentConfig`, generates (or loads) graphs,
applies the configured rankers, averages fairness curves across replicas,
and writes CSV outputs plus a JSON manifest that records the configuration,
per-replica seeds, and a hash of every emitted file. Replicas fan out over
a process pool; reduction always happens in replica-index order, so a
single-threaded run is byte-reproducible and a multi-threaded run produces
the same aggregates up to float associativity (identical here, since
reduction order is fixed).
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .bpam import BpamParams, GenerationStats, generate
from .fairness import (
    DEFAULT_GRID_POINTS,
    average_curves,
    curve_compare,
    log_grid,
    minority_share_curve,
)
from .graph import Color, ColoredDigraph, GraphError, ccdf_by_color, hri, minority_fraction
from .io import load_graph, write_color_file, write_edge_list, write_node_mapping
from .rankers import (
    IterationControl,
    RankingResult,
    degree_rank,
    hits,
    pagerank,
    rank_order,
    randomized_hits,
    subspace_hits,
)

__all__ = [
    "ALGORITHMS",
    "ExperimentConfig",
    "RunManifest",
    "compute_ranking",
    "averaged_ccdf",
    "run_synthetic",
    "run_real",
    "sweep",
]

ALGORITHMS = ("degree", "pagerank", "hits", "rhits", "subspace")

DEFAULT_REPS = 100


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything needed to reproduce one experiment.

    ``mode`` selects synthetic generation (BPAM parameters) or a real
    dataset (edge + color files). Per-algorithm knobs apply to whichever
    algorithms in ``algos`` consume them.
    """

    mode: str = "synthetic"
    # synthetic
    n_nodes: int = 1000
    outdeg: int = 6
    minority_ratio: float = 0.3
    homophily: float = 0.5
    reps: int = DEFAULT_REPS
    base_seed: int = 0
    # real
    edge_file: Optional[str] = None
    color_file: Optional[str] = None
    # ranking
    algos: tuple = ("degree", "pagerank", "hits")
    eta: float = 0.85
    eps: float = 0.15
    k: int = 6
    weight: str = "unit"
    tol: float = 1e-10
    max_iter: int = 1000
    degree_which: str = "total"
    tie_shuffle_seed: Optional[int] = None
    # fairness grid
    grid_points: int = DEFAULT_GRID_POINTS
    # io
    out_dir: str = "."
    threads: int = 1
    svg: bool = False

    def __post_init__(self):
        if self.mode not in ("synthetic", "real"):
            raise ValueError("mode must be 'synthetic' or 'real'")
        if self.reps < 1:
            raise ValueError("reps must be at least 1")
        if self.threads < 1:
            raise ValueError("threads must be at least 1")
        for algo in self.algos:
            if algo not in ALGORITHMS:
                raise ValueError(f"unknown algorithm {algo!r}")
        if self.mode == "real" and (self.edge_file is None or self.color_file is None):
            raise ValueError("real mode needs edge_file and color_file")

    def bpam_params(self) -> BpamParams:
        return BpamParams(self.n_nodes, self.outdeg, self.minority_ratio, self.homophily)

    def ctrl(self) -> IterationControl:
        return IterationControl(tol=self.tol, max_iter=self.max_iter)

    def replica_seed(self, index: int) -> int:
        return self.base_seed + index


@dataclass(frozen=True)
class RunManifest:
    """Reproducibility record emitted next to the outputs."""

    command: str
    config: dict
    seeds: list
    version: str
    wall_clock_sec: float
    file_hashes: dict

    def write(self, path) -> None:
        payload = dataclasses.asdict(self)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")


def compute_ranking(g: ColoredDigraph, algo: str, config: ExperimentConfig) -> RankingResult:
    """Run one configured algorithm; hub/authority pairs yield authorities."""
    ctrl = config.ctrl()
    if algo == "degree":
        return degree_rank(g, config.degree_which)
    if algo == "pagerank":
        return pagerank(g, config.eta, ctrl)
    if algo == "hits":
        return hits(g, ctrl)[0]
    if algo == "rhits":
        return randomized_hits(g, config.eps, ctrl)[0]
    if algo == "subspace":
        return subspace_hits(g, config.k, config.weight, ctrl)
    raise ValueError(f"unknown algorithm {algo!r}")


def _fmt(x) -> str:
    """Shortest round-trip decimal for a float; deterministic across runs."""
    return repr(float(x))


def _hash_file(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _write_text(path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _manifest(command, config, seeds, t0, out_dir, filenames) -> RunManifest:
    hashes = {name: _hash_file(os.path.join(out_dir, name)) for name in sorted(filenames)}
    manifest = RunManifest(
        command=command,
        config=dataclasses.asdict(config),
        seeds=list(seeds),
        version=__version__,
        wall_clock_sec=time.perf_counter() - t0,
        file_hashes=hashes,
    )
    manifest.write(os.path.join(out_dir, "manifest.json"))
    return manifest


def averaged_ccdf(
    graphs: Sequence[ColoredDigraph], color: Color, which: str = "total"
) -> tuple[np.ndarray, np.ndarray]:
    """Replica-mean CCDF for one color on a shared degree grid 0..max."""
    degs = [g.degrees(which)[g.colors == int(color)] for g in graphs]
    if not degs or any(d.size == 0 for d in degs):
        raise GraphError(f"color {Color(color).name} missing from some replica")
    kmax = max(int(d.max()) for d in degs)
    acc = np.zeros(kmax + 1)
    for d in degs:
        counts = np.bincount(d, minlength=kmax + 1)
        acc += counts[::-1].cumsum()[::-1] / d.size
    return np.arange(kmax + 1, dtype=np.int64), acc / len(degs)


def ccdf_csv(per_color: dict) -> str:
    """CSV ``color,k,ccdf`` from a color -> (k, ccdf) mapping."""
    lines = ["color,k,ccdf"]
    for color in (Color.B, Color.R):
        if color in per_color:
            ks, cc = per_color[color]
            for k_val, c_val in zip(ks.tolist(), cc.tolist()):
                lines.append(f"{color.name},{k_val},{_fmt(c_val)}")
    return "\n".join(lines) + "\n"


def ranking_csv(result: RankingResult, labels=None) -> str:
    """CSV ``node,score,rank`` sorted by rank (best first)."""
    lines = ["node,score,rank"]
    for rank_pos, node in enumerate(result.order.tolist(), start=1):
        label = str(node) if labels is None else labels[node]
        lines.append(f"{label},{_fmt(result.scores[node])},{rank_pos}")
    return "\n".join(lines) + "\n"


def _stats_csv(stats_list: Sequence[GenerationStats]) -> str:
    lines = ["replica,seed,alpha_hat,rejection_count,n_red,n_blue"]
    for i, st in enumerate(stats_list):
        lines.append(
            f"{i},{st.seed},{_fmt(st.alpha_hat)},{st.rejection_count},{st.n_red},{st.n_blue}"
        )
    return "\n".join(lines) + "\n"


# -- replica workers (top level so process pools can pickle them) ----------

def _curve_replica(args) -> tuple:
    config, seed = args
    g, stats = generate(config.bpam_params(), seed)
    grid = log_grid(g.n, config.grid_points)
    curves = {}
    flags = {}
    for algo in config.algos:
        result = compute_ranking(g, algo, config)
        order = result.order
        if config.tie_shuffle_seed is not None:
            order = rank_order(result.scores, config.tie_shuffle_seed + seed)
        curves[algo] = minority_share_curve(order, g.colors, grid)
        flags[algo] = result.converged
    return curves, flags, stats


def _generate_replica(args) -> GenerationStats:
    config, seed, index, out_dir = args
    g, stats = generate(config.bpam_params(), seed)
    write_edge_list(os.path.join(out_dir, f"edges_{index:04d}.tsv"), g)
    write_color_file(os.path.join(out_dir, f"colors_{index:04d}.tsv"), g)
    return stats


def _fan_out(config: ExperimentConfig, worker, job_args: list):
    if config.threads == 1:
        return [worker(args) for args in job_args]
    with ProcessPoolExecutor(max_workers=config.threads) as pool:
        return list(pool.map(worker, job_args))


def _maybe_svg(config, out_dir, averaged: dict, filenames: list) -> None:
    if not config.svg:
        return
    from .svg import curve_chart

    _write_text(os.path.join(out_dir, "curves.svg"), curve_chart(averaged))
    filenames.append("curves.svg")


def run_generate(config: ExperimentConfig) -> RunManifest:
    """Emit raw replica graphs (edge + color files) plus generation stats."""
    t0 = time.perf_counter()
    out_dir = config.out_dir
    os.makedirs(out_dir, exist_ok=True)
    seeds = [config.replica_seed(i) for i in range(config.reps)]
    jobs = [(config, seed, i, out_dir) for i, seed in enumerate(seeds)]
    stats = _fan_out(config, _generate_replica, jobs)
    _write_text(os.path.join(out_dir, "stats.csv"), _stats_csv(stats))
    filenames = ["stats.csv"]
    filenames += [f"edges_{i:04d}.tsv" for i in range(config.reps)]
    filenames += [f"colors_{i:04d}.tsv" for i in range(config.reps)]
    return _manifest("generate", config, seeds, t0, out_dir, filenames)


def run_synthetic(config: ExperimentConfig) -> tuple[dict, RunManifest, bool]:
    """Replica-averaged fairness curves for every configured algorithm.

    Writes ``curves.csv`` (long format), ``stats.csv`` (per replica), and
    ``manifest.json``. Returns (averaged curves, manifest, all-converged).
    """
    t0 = time.perf_counter()
    out_dir = config.out_dir
    os.makedirs(out_dir, exist_ok=True)
    seeds = [config.replica_seed(i) for i in range(config.reps)]
    results = _fan_out(config, _curve_replica, [(config, s) for s in seeds])

    averaged = {
        algo: average_curves([curves[algo] for curves, _, _ in results])
        for algo in config.algos
    }
    all_converged = all(
        flag for _, flags, _ in results for flag in flags.values()
    )
    _write_text(os.path.join(out_dir, "curves.csv"), curve_compare(averaged))
    _write_text(
        os.path.join(out_dir, "stats.csv"), _stats_csv([st for _, _, st in results])
    )
    filenames = ["curves.csv", "stats.csv"]
    _maybe_svg(config, out_dir, averaged, filenames)
    manifest = _manifest("curve", config, seeds, t0, out_dir, filenames)
    return averaged, manifest, all_converged


def run_real(config: ExperimentConfig) -> tuple[dict, RunManifest, bool]:
    """Single-pass analysis of a loaded dataset.

    Emits the same curve schema as synthetic runs plus summary stats
    (node/edge counts, minority fraction, cross-edge index), per-color
    CCDFs, and the node-id mapping.
    """
    t0 = time.perf_counter()
    out_dir = config.out_dir
    os.makedirs(out_dir, exist_ok=True)
    g, labels = load_graph(config.edge_file, config.color_file)
    r_hat = minority_fraction(g)
    if r_hat in (0.0, 1.0):
        raise GraphError("dataset has a single color; analysis undefined")

    grid = log_grid(g.n, config.grid_points)
    curves = {}
    all_converged = True
    for algo in config.algos:
        result = compute_ranking(g, algo, config)
        curves[algo] = minority_share_curve(result.order, g.colors, grid)
        all_converged &= result.converged

    summary = [
        "key,value",
        f"nodes,{g.n}",
        f"edges,{g.n_edges}",
        f"minority_fraction,{_fmt(r_hat)}",
        f"hri,{_fmt(hri(g))}",
    ]
    _write_text(os.path.join(out_dir, "curves.csv"), curve_compare(curves))
    _write_text(os.path.join(out_dir, "summary.csv"), "\n".join(summary) + "\n")
    _write_text(
        os.path.join(out_dir, "ccdf.csv"),
        ccdf_csv(ccdf_by_color(g, config.degree_which)),
    )
    write_node_mapping(os.path.join(out_dir, "node_mapping.tsv"), labels)
    filenames = ["curves.csv", "summary.csv", "ccdf.csv", "node_mapping.tsv"]
    _maybe_svg(config, out_dir, curves, filenames)
    manifest = _manifest("real", config, [], t0, out_dir, filenames)
    return curves, manifest, all_converged


def sweep(config: ExperimentConfig, axis: str, values: Sequence) -> tuple[str, RunManifest, bool]:
    """Curve sets across a swept parameter.

    ``axis="rho"`` regenerates synthetic replicas per homophily value;
    ``axis="k"`` reruns the eigenspace ranker per subspace dimension on
    the configured input (synthetic replicas or a real dataset). Emits one
    long-format CSV ``axis,value,algo,x,share,baseline``.
    """
    if axis not in ("rho", "k"):
        raise ValueError("axis must be 'rho' or 'k'")
    if len(values) == 0:
        raise ValueError("empty sweep axis")
    if axis == "rho" and config.mode == "real":
        raise ValueError("rho sweeps a generation parameter; needs synthetic mode")
    t0 = time.perf_counter()
    out_dir = config.out_dir
    os.makedirs(out_dir, exist_ok=True)
    lines = ["axis,value,algo,x,share,baseline"]
    seeds: list[int] = []
    converged = True

    for value in values:
        if axis == "rho":
            sub = dataclasses.replace(config, homophily=float(value))
        else:
            sub = dataclasses.replace(config, k=int(value), algos=("subspace",))
        if config.mode == "real" and axis == "k":
            g, _ = load_graph(sub.edge_file, sub.color_file)
            grid = log_grid(g.n, sub.grid_points)
            result = compute_ranking(g, "subspace", sub)
            converged &= result.converged
            averaged = {"subspace": minority_share_curve(result.order, g.colors, grid)}
        else:
            replica_seeds = [sub.replica_seed(i) for i in range(sub.reps)]
            seeds.extend(replica_seeds)
            results = _fan_out(sub, _curve_replica, [(sub, s) for s in replica_seeds])
            averaged = {
                algo: average_curves([curves[algo] for curves, _, _ in results])
                for algo in sub.algos
            }
            converged &= all(f for _, flags, _ in results for f in flags.values())
        value_txt = repr(int(value)) if axis == "k" else _fmt(value)
        for algo, curve in averaged.items():
            for x, s in zip(curve.grid.tolist(), curve.share.tolist()):
                lines.append(
                    f"{axis},{value_txt},{algo},{x!r},{s!r},{curve.baseline!r}"
                )

    _write_text(os.path.join(out_dir, "sweep.csv"), "\n".join(lines) + "\n")
    manifest = _manifest(f"sweep:{axis}", config, seeds, t0, out_dir, ["sweep.csv"])
    return "\n".join(lines) + "\n", manifest, converged
