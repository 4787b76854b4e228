"""Command line interface: ``dagsp <command> ...``.

Exit codes: 0 on success, 2 for usage, configuration or input-format
errors, 3 for errors raised while computing.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

import numpy as np

from .closure import closure_operator, reflexive_closure, weighted_transitive_closure
from .closure import capacity_to_influence, distance_to_influence
from .dynnet import SirConfig, assign_influence_weights, ingest_contacts, sir_simulate, unroll
from .exceptions import DagspError, ParseError
from .experiments import (
    BASES,
    ConfigError,
    ExperimentConfig,
    emit_plot_data,
    make_bases,
    run_sir_experiment,
    run_synthetic_experiment,
)
from .io import load_dag, read_signal, write_edge_csv, write_rows, write_signal, write_triplets
from .learn import FourierLasso, FourierLogisticRegression, lasso_lambda_max, relative_error, roc_auc, sample_nodes
from .semiring import get_semiring
from .sem import SemSignalConfig, generate_sem_signal
from .spectral import FourierOperator, apply_filter, frequency_order, total_variation

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 2, 3

SEMIRING_CHOICES = ["boolean", "pollution", "influence", "shortest-path", "capacity"]

SYNTHETIC_COLUMNS = ["basis", "fraction", "trial", "rel_error", "nnz"]
SIR_COLUMNS = ["basis", "initial_infected", "repetition", "fraction", "accuracy", "auc"]
ROC_COLUMNS = ["basis", "signal", "fpr", "tpr"]


def _floats(text):
    return [float(x) for x in text.split(",") if x.strip()]


def _ints(text):
    return [int(x) for x in text.split(",") if x.strip()]


def _operator(args):
    dag = load_dag(args.dag, args.labels)
    return dag, FourierOperator.from_dag(dag, args.semiring)


def cmd_closure(args):
    dag = load_dag(args.input, args.labels)
    s = get_semiring(args.semiring)
    if args.reflexive:
        W = closure_operator(dag, s.name).W
    else:
        W = weighted_transitive_closure(dag, s)
        if args.to_influence:
            if s.name == "shortest_path":
                W = distance_to_influence(W)
            elif s.name == "max_capacity":
                W = capacity_to_influence(W)
            W = reflexive_closure(W, "influence", dag).W - np.eye(dag.n)
    write_triplets(W, args.out)


def cmd_ft(args):
    dag, op = _operator(args)
    write_signal(op.transform(read_signal(args.signal, dag)), dag, args.out)


def cmd_ift(args):
    dag, op = _operator(args)
    write_signal(op.inverse(read_signal(args.signal, dag)), dag, args.out)


def cmd_filter(args):
    dag, op = _operator(args)
    h = read_signal(args.filter, dag)
    write_signal(apply_filter(h, read_signal(args.signal, dag), op), dag, args.out)


def cmd_tv(args):
    dag, op = _operator(args)
    tv, stv = total_variation(read_signal(args.signal, dag), op, normalize=args.normalize)
    labels = dag.ordered_labels()
    write_rows(args.out, ["shift", "tv"], [*zip(labels, tv), ("STV", stv)])


def cmd_freq_order(args):
    dag, op = _operator(args)
    fo = frequency_order(op)
    labels = dag.ordered_labels()
    write_rows(args.out, ["rank", "node", "stv"], ((i, labels[p], fo.stv[p]) for i, p in enumerate(fo.order)))


def cmd_gen_sem(args):
    dag = load_dag(args.dag, args.labels)
    W = closure_operator(dag, args.semiring)
    low, high = _floats(args.range)
    cfg = SemSignalConfig(args.density, (low, high), args.sigma_c, args.sigma_x, args.random_sign, args.seed)
    X, C = generate_sem_signal(W, cfg)
    write_signal(X, dag, args.out_signal)
    if args.out_causes:
        write_signal(C, dag, args.out_causes)


def cmd_reconstruct(args):
    dag = load_dag(args.dag, args.labels)
    s = read_signal(args.signal, dag)
    B = make_bases(dag, [args.basis], semiring=args.semiring)[args.basis]
    seqs = np.random.SeedSequence(args.seed).spawn(args.trials)
    rows = []
    for trial, seq in enumerate(seqs):
        samples = sample_nodes(s, args.fraction, seed=seq)
        Xs = B[samples.indices]
        if args.mode == "lasso":
            lam = args.lam if args.lam is not None else 0.05 * lasso_lambda_max(Xs, samples.values)
            est = FourierLasso(alpha=lam).fit(Xs, samples.values)
            rows.append((args.fraction, trial, relative_error(B @ est.coef_, s), ""))
        else:
            lam = args.lam if args.lam is not None else 0.1
            est = FourierLogisticRegression(alpha=lam, threshold=args.tau).fit(Xs, samples.values)
            _, auc = roc_auc(B @ est.coef_, s)
            rows.append((args.fraction, trial, "", auc))
    write_rows(args.out, ["fraction", "trial", "rel_error", "auc"], rows)


def _network(args):
    return ingest_contacts(args.contacts, stride=args.stride, cutoff=args.cutoff, n_individuals=args.n_individuals)


def cmd_dynnet(args):
    net = _network(args)
    dag = unroll(net)
    if args.action == "unroll":
        if args.weighted:
            dag = assign_influence_weights(dag, net)
        write_edge_csv(dag, args.out)
        return
    cfg = SirConfig(args.rho, args.eps, args.recovery, args.initial, args.seed)
    write_signal(sir_simulate(net, cfg).signal, dag, args.out)


def _config(args, experiment):
    overrides = {
        "seed": args.seed, "trials": args.trials, "jobs": args.jobs, "output_dir": args.out,
        "lam": args.lam, "fractions": _floats(args.fractions) if args.fractions else None,
    }
    if experiment == "dynamic_sir":
        overrides["contacts"] = args.contacts
        overrides["initial_infected"] = _ints(args.initial) if args.initial else None
    if args.config:
        cfg = ExperimentConfig.from_json(args.config, **overrides)
        if cfg.experiment != experiment:
            raise ConfigError(f"config describes experiment {cfg.experiment!r}")
        return cfg
    return ExperimentConfig(experiment=experiment, **{k: v for k, v in overrides.items() if v is not None})


def cmd_experiment(args):
    if args.kind == "synthetic":
        cfg = _config(args, "synthetic_sem")
        out = Path(cfg.output_dir)
        rows = run_synthetic_experiment(cfg)
        _write_dicts(out / "synthetic.csv", SYNTHETIC_COLUMNS, rows)
        emit_plot_data(out, synthetic_rows=rows)
    else:
        cfg = _config(args, "dynamic_sir")
        out = Path(cfg.output_dir)
        rows, roc_rows = run_sir_experiment(cfg)
        _write_dicts(out / "sir.csv", SIR_COLUMNS, rows)
        _write_dicts(out / "sir_roc.csv", ROC_COLUMNS, roc_rows)
        emit_plot_data(out, sir_rows=rows, roc_rows=roc_rows)
    (out / "config.json").write_text(cfg.to_json() + "\n")


def _write_dicts(path, columns, rows):
    write_rows(path, columns, ([r[c] for c in columns] for r in rows))


def _read_dicts(path):
    def convert(v):
        try:
            f = float(v)
        except ValueError:
            return v
        return int(f) if f.is_integer() and "." not in v and "e" not in v.lower() else f

    with open(path, newline="") as fh:
        return [{k: convert(v) for k, v in row.items()} for row in csv.DictReader(fh)]


def cmd_emit_plots(args):
    results = Path(args.results)
    kw = {}
    if (results / "synthetic.csv").exists():
        kw["synthetic_rows"] = _read_dicts(results / "synthetic.csv")
    if (results / "sir.csv").exists():
        kw["sir_rows"] = _read_dicts(results / "sir.csv")
    if (results / "sir_roc.csv").exists():
        kw["roc_rows"] = _read_dicts(results / "sir_roc.csv")
    if not kw:
        raise ConfigError(f"no result files in {results}")
    emit_plot_data(args.out or results, **kw)


def _dag_args(p, signal=True, out=True):
    p.add_argument("--dag", required=True, help="edge CSV with header src,dst,weight")
    p.add_argument("--labels", help="optional file with one node label per line")
    p.add_argument("--semiring", choices=SEMIRING_CHOICES, default="pollution")
    if signal:
        p.add_argument("--signal", required=True, help="node,value CSV")
    if out:
        p.add_argument("--out", required=True)


def _contact_args(p):
    p.add_argument("--contacts", required=True, help="t,u,v,distance CSV")
    p.add_argument("--stride", type=int, default=1)
    p.add_argument("--cutoff", type=float, default=20.0)
    p.add_argument("--n-individuals", type=int)


def _experiment_args(p):
    p.add_argument("--config", help="JSON file with ExperimentConfig fields")
    p.add_argument("--seed", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--jobs", type=int)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--fractions", help="comma separated sample fractions")
    p.add_argument("--out", help="output directory")


def build_parser():
    parser = argparse.ArgumentParser(prog="dagsp", description="Causal Fourier analysis on weighted DAGs.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("closure", help="weighted transitive closure as row,col,value triplets")
    p.add_argument("--semiring", choices=SEMIRING_CHOICES, required=True)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--labels")
    p.add_argument("--out", required=True)
    p.add_argument("--reflexive", action="store_true", help="write the Fourier basis W = I + closure")
    p.add_argument("--to-influence", action="store_true", help="convert distances or capacities to influences")
    p.set_defaults(func=cmd_closure)

    for name, func, hlp in (
        ("ft", cmd_ft, "Fourier transform (spectrum) of a signal"),
        ("ift", cmd_ift, "signal with the given spectrum"),
        ("tv", cmd_tv, "total variation per shift"),
    ):
        p = sub.add_parser(name, help=hlp)
        _dag_args(p)
        if name == "tv":
            p.add_argument("--normalize", action="store_true")
        p.set_defaults(func=func)

    p = sub.add_parser("filter", help="apply a filter given by its shift coefficients")
    _dag_args(p)
    p.add_argument("--filter", required=True, help="node,value CSV of shift coefficients")
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("freq-order", help="basis vectors sorted by total variation")
    _dag_args(p, signal=False)
    p.set_defaults(func=cmd_freq_order)

    p = sub.add_parser("gen-sem", help="sample a linear SEM signal")
    _dag_args(p, signal=False, out=False)
    p.add_argument("--density", type=float, default=0.1)
    p.add_argument("--range", default="1,10")
    p.add_argument("--sigma-c", type=float, default=0.1)
    p.add_argument("--sigma-x", type=float, default=0.1)
    p.add_argument("--random-sign", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-signal", required=True)
    p.add_argument("--out-causes")
    p.set_defaults(func=cmd_gen_sem)

    p = sub.add_parser("reconstruct", help="sparse reconstruction from random samples")
    _dag_args(p)
    p.add_argument("--basis", choices=BASES, default="dag-weighted")
    p.add_argument("--mode", choices=["lasso", "logistic"], default="lasso")
    p.add_argument("--fraction", type=float, default=0.2)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--tau", type=float, default=0.5)
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("dynnet", help="dynamic contact networks")
    dsub = p.add_subparsers(dest="action", required=True)
    q = dsub.add_parser("unroll", help="write the time-unrolled DAG as an edge CSV")
    _contact_args(q)
    q.add_argument("--weighted", action="store_true", help="contact edges get weight exp(-distance)")
    q.add_argument("--out", required=True)
    q.set_defaults(func=cmd_dynnet)
    q = dsub.add_parser("simulate", help="simulate an SIR infection signal")
    _contact_args(q)
    q.add_argument("--rho", type=float, default=10.0)
    q.add_argument("--eps", type=float, default=20.0)
    q.add_argument("--recovery", type=int, default=5)
    q.add_argument("--initial", type=int, default=9)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--out", required=True)
    q.set_defaults(func=cmd_dynnet)

    p = sub.add_parser("experiment", help="run a reconstruction experiment")
    esub = p.add_subparsers(dest="kind", required=True)
    q = esub.add_parser("synthetic", help="lasso on SEM signals over random DAGs")
    _experiment_args(q)
    q.set_defaults(func=cmd_experiment)
    q = esub.add_parser("sir", help="logistic fits of SIR signals on a dynamic network")
    _experiment_args(q)
    q.add_argument("--contacts", help="t,u,v,distance CSV; synthetic contacts when omitted")
    q.add_argument("--initial", help="comma separated initial infection counts")
    q.set_defaults(func=cmd_experiment)

    p = sub.add_parser("emit-plots", help="aggregate raw experiment CSVs into plot tables")
    p.add_argument("--results", required=True, help="directory written by 'experiment'")
    p.add_argument("--out", help="output directory (default: the results directory)")
    p.set_defaults(func=cmd_emit_plots)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_CONFIG
    try:
        args.func(args)
    except (ConfigError, ParseError, OSError) as exc:
        print(f"dagsp: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DagspError, ValueError, np.linalg.LinAlgError) as exc:
        print(f"dagsp: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
