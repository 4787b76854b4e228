"""Reconstruction experiments and their aggregation into plot-ready tables.

Randomness: the root seed feeds a ``numpy.random.SeedSequence``; task ``i``
(a trial, or a simulated signal) uses ``SeedSequence(seed).spawn(N)[i]``
and splits that further for its own sub-steps. Results depend only on the
task index, never on the number of workers.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np
from joblib import Parallel, delayed

from .baselines import symmetric_eigenbasis, undirected_matrices
from .closure import closure_operator
from .dag import WeightedDag, erdos_renyi_dag
from .dynnet import (
    DynamicNetwork,
    SirConfig,
    assign_influence_weights,
    ingest_contacts,
    sir_simulate,
    synth_contacts,
    unroll,
)
from .io import write_rows
from .learn import (
    FourierLasso,
    FourierLogisticRegression,
    lasso_lambda_max,
    predict_binary,
    relative_error,
    roc_auc,
    sample_nodes,
)
from .sem import SemSignalConfig, generate_sem_signal

__all__ = [
    "BASES",
    "ExperimentConfig",
    "make_bases",
    "run_synthetic_experiment",
    "run_sir_experiment",
    "aggregate",
    "emit_plot_data",
]

BASES = ("dag-weighted", "dag-boolean", "adjacency", "adjacency-closed", "laplacian", "laplacian-closed")
ROC_GRID = np.linspace(0.0, 1.0, 101)


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    """Settings for both experiments; unused fields are ignored by the other one."""

    experiment: str = "synthetic_sem"
    bases: list = field(default_factory=lambda: list(BASES))
    fractions: list = field(default_factory=lambda: [0.2, 0.4, 0.6, 0.8, 1.0])
    trials: int = 10
    seed: int = 0
    lam: float | None = None
    lam_ratio: float = 0.1
    tau: float = 0.5
    jobs: int = 1
    output_dir: str = "results"
    # synthetic SEM
    n_nodes: int = 100
    edge_prob: float = 0.05
    weight_range: list = field(default_factory=lambda: [-1.0, 1.0])
    cause_density: float = 0.1
    cause_range: list = field(default_factory=lambda: [1.0, 10.0])
    sigma_c: float = 0.1
    sigma_x: float = 0.1
    # SIR on a dynamic network
    contacts: str | None = None
    stride: int = 1
    cutoff: float = 20.0
    n_individuals: int = 60
    n_times: int = 24
    initial_infected: list = field(default_factory=lambda: [5, 9, 11])
    rho: float = 10.0
    eps: float = 20.0
    recovery: int = 5
    roc_fraction: float = 0.2
    weighted_semiring: str | None = None

    def __post_init__(self):
        self.validate()

    def validate(self):
        if self.experiment not in ("synthetic_sem", "dynamic_sir"):
            raise ConfigError(f"unknown experiment {self.experiment!r}")
        if self.trials < 1:
            raise ConfigError("trials must be at least 1")
        if not self.fractions or any(not 0.0 < f <= 1.0 for f in self.fractions):
            raise ConfigError("fractions must lie in (0, 1]")
        unknown = set(self.bases) - set(BASES)
        if unknown:
            raise ConfigError(f"unknown bases {sorted(unknown)}")
        if self.jobs < 1:
            raise ConfigError("jobs must be at least 1")

    @classmethod
    def from_json(cls, path, **overrides):
        with open(path) as fh:
            data = json.load(fh)
        names = {f.name for f in fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ConfigError(f"unknown config keys {sorted(unknown)}")
        data.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**data)

    def to_json(self):
        return json.dumps(asdict(self), indent=2, sort_keys=True)


def make_bases(dag: WeightedDag, kinds=BASES, semiring="pollution", lapack=False):
    """Basis matrices (columns = basis vectors) for each requested kind."""
    out = {}
    W = closure_operator(dag, semiring).dense()
    if "dag-weighted" in kinds:
        out["dag-weighted"] = W
    if "dag-boolean" in kinds:
        out["dag-boolean"] = closure_operator(dag, "boolean").dense()
    sym = undirected_matrices(dag, W)
    method = "lapack" if lapack else "auto"
    for kind in kinds:
        key = kind.replace("-", "_")
        if key in sym:
            out[kind] = symmetric_eigenbasis(sym[key], method=method, source=key).Q
    return {k: out[k] for k in kinds}


def _lam_for(cfg, X, y):
    # lam_ratio scales max|X^T y|, half the exact zero threshold of the unscaled objective
    return cfg.lam if cfg.lam is not None else cfg.lam_ratio * 0.5 * lasso_lambda_max(X, y)


def _synthetic_trial(cfg: ExperimentConfig, trial: int, seq: np.random.SeedSequence):
    dag_seed, sig_seed, sample_seq = seq.spawn(3)
    dag = erdos_renyi_dag(cfg.n_nodes, cfg.edge_prob, tuple(cfg.weight_range), seed=dag_seed)
    W = closure_operator(dag, "pollution")
    sem = SemSignalConfig(cfg.cause_density, tuple(cfg.cause_range), cfg.sigma_c, cfg.sigma_x)
    X, _ = generate_sem_signal(W, sem, seed=sig_seed)
    bases = make_bases(dag, cfg.bases, semiring="pollution")
    rows = []
    for fi, (frac, fseq) in enumerate(zip(cfg.fractions, sample_seq.spawn(len(cfg.fractions)))):
        samples = sample_nodes(X, frac, seed=fseq)
        for name in cfg.bases:
            B = bases[name]
            Xs = B[samples.indices]
            est = FourierLasso(alpha=_lam_for(cfg, Xs, samples.values)).fit(Xs, samples.values)
            r = B @ est.coef_
            rows.append({
                "basis": name, "fraction": float(frac), "trial": trial,
                "rel_error": relative_error(r, X), "nnz": int(np.count_nonzero(est.coef_)),
            })
    return rows


def _run_tasks(fn, cfg, n_tasks):
    seqs = np.random.SeedSequence(cfg.seed).spawn(n_tasks)
    if cfg.jobs == 1:
        parts = [fn(cfg, i, s) for i, s in enumerate(seqs)]
    else:
        parts = Parallel(n_jobs=cfg.jobs)(delayed(fn)(cfg, i, s) for i, s in enumerate(seqs))
    return [row for part in parts for row in part]


def run_synthetic_experiment(cfg: ExperimentConfig):
    """Lasso reconstruction of SEM signals on random DAGs.

    Returns a list of row dicts ``basis, fraction, trial, rel_error, nnz``
    sorted by basis order, fraction and trial.
    """
    rows = _run_tasks(_synthetic_trial, cfg, cfg.trials)
    order = {b: i for i, b in enumerate(cfg.bases)}
    rows.sort(key=lambda r: (order[r["basis"]], r["fraction"], r["trial"]))
    return rows


def _sir_network(cfg):
    if cfg.contacts:
        net = ingest_contacts(cfg.contacts, stride=cfg.stride, cutoff=cfg.cutoff)
    else:
        net = synth_contacts(cfg.n_individuals, cfg.n_times, seed=np.random.SeedSequence([cfg.seed, 7919]))
    return net.with_cutoff(cfg.cutoff)


def _sir_bases(cfg, net: DynamicNetwork):
    dag = assign_influence_weights(unroll(net), net)
    semiring = cfg.weighted_semiring or "influence"
    return make_bases(dag, cfg.bases, semiring=semiring)


def _sir_signal(cfg, net, bases, task, seq):
    i_idx, rep = divmod(task, cfg.trials)
    n_init = cfg.initial_infected[i_idx]
    sim_seed, sample_seq = seq.spawn(2)
    sir = SirConfig(cfg.rho, cfg.eps, cfg.recovery, n_init)
    s = sir_simulate(net, sir, seed=sim_seed).signal
    n = s.size
    rows, roc_rows = [], []
    for frac, fseq in zip(cfg.fractions, sample_seq.spawn(len(cfg.fractions))):
        samples = sample_nodes(s, frac, seed=fseq)
        trivial = np.zeros(n)
        scored = [("trivial", trivial)]
        for name in cfg.bases:
            B = bases[name]
            lam = cfg.lam if cfg.lam is not None else 0.1
            est = FourierLogisticRegression(alpha=lam, threshold=cfg.tau).fit(B[samples.indices], samples.values)
            scored.append((name, B @ est.coef_))
        for name, r in scored:
            pred = predict_binary(r, cfg.tau) if name != "trivial" else np.zeros(n, dtype=int)
            (fpr, tpr), auc = roc_auc(r, s)
            rows.append({
                "basis": name, "initial_infected": n_init, "repetition": rep, "fraction": float(frac),
                "accuracy": float(np.mean(pred == s)), "auc": auc,
            })
            if math.isclose(frac, cfg.roc_fraction):
                grid_tpr = np.interp(ROC_GRID, fpr, tpr)
                roc_rows.extend(
                    {"basis": name, "signal": task, "fpr": float(x), "tpr": float(y)}
                    for x, y in zip(ROC_GRID, grid_tpr)
                )
    return rows, roc_rows


def run_sir_experiment(cfg: ExperimentConfig, net: DynamicNetwork | None = None):
    """L1-logistic reconstruction of simulated infection signals.

    ``cfg.trials`` signals are simulated for each entry of
    ``cfg.initial_infected``. Every signal is fitted with every basis at
    every sample fraction; a constant "nobody infected" predictor is
    reported as basis ``trivial``. Returns ``(rows, roc_rows)``.
    """
    if net is None:
        net = _sir_network(cfg)
    bases = _sir_bases(cfg, net)
    n_tasks = cfg.trials * len(cfg.initial_infected)
    seqs = np.random.SeedSequence(cfg.seed).spawn(n_tasks)
    if cfg.jobs == 1:
        parts = [_sir_signal(cfg, net, bases, t, s) for t, s in enumerate(seqs)]
    else:
        parts = Parallel(n_jobs=cfg.jobs)(delayed(_sir_signal)(cfg, net, bases, t, s) for t, s in enumerate(seqs))
    rows = [r for p in parts for r in p[0]]
    roc_rows = [r for p in parts for r in p[1]]
    return rows, roc_rows


def aggregate(rows, x, series, value):
    """Mean and normal-approximation 95% interval (mean +- 1.96 * stderr) per (series, x).

    Series appear in first-seen order, x ascending. One observation gives
    a zero-width interval.
    """
    groups = {}
    for r in rows:
        groups.setdefault(r[series], {}).setdefault(r[x], []).append(r[value])
    out = []
    for name, by_x in groups.items():
        for xv in sorted(by_x):
            vals = np.asarray(by_x[xv], dtype=float)
            mean = float(vals.mean())
            half = 1.96 * float(vals.std(ddof=1)) / math.sqrt(vals.size) if vals.size > 1 else 0.0
            out.append({"x": xv, "series": name, "mean": mean, "ci_low": mean - half, "ci_high": mean + half})
    return out


PLOT_COLUMNS = ["x", "series", "mean", "ci_low", "ci_high"]


def _write_plot(path, table):
    write_rows(path, PLOT_COLUMNS, ([r[c] for c in PLOT_COLUMNS] for r in table))


def emit_plot_data(outdir, synthetic_rows=None, sir_rows=None, roc_rows=None):
    """Write one tidy CSV per figure; returns the written paths.

    ``relative_error.csv`` (synthetic), ``accuracy.csv``, ``auc.csv`` and
    ``roc.csv`` (SIR). A missing result set still produces a header-only
    file for each of its figures.
    """
    outdir = Path(outdir)
    written = []
    if synthetic_rows is not None:
        p = outdir / "relative_error.csv"
        _write_plot(p, aggregate(synthetic_rows, "fraction", "basis", "rel_error"))
        written.append(p)
    if sir_rows is not None:
        for name, value in (("accuracy.csv", "accuracy"), ("auc.csv", "auc")):
            p = outdir / name
            _write_plot(p, aggregate(sir_rows, "fraction", "basis", value))
            written.append(p)
    if roc_rows is not None:
        p = outdir / "roc.csv"
        _write_plot(p, aggregate(roc_rows, "fpr", "basis", "tpr"))
        written.append(p)
    return written
