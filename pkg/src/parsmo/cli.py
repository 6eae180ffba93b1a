"""Command line front end: train, fstar, predict."""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from .data import DatasetError, load_libsvm
from .driver import SolverConfig, StepsizeRule, train
from .kernel import KernelSpec, default_gamma
from .metrics import build_records, write_metrics
from .model import SvmModel
from .qp import ProblemSpec, objective, violation_view


def _add_problem_flags(p):
    p.add_argument("--data", help="training data in LIBSVM text format")
    p.add_argument("--kernel", choices=("linear", "gaussian"), default="gaussian")
    p.add_argument("--gamma", type=float, default=None, help="gaussian width, default 1/m")
    p.add_argument("--C", type=float, default=1.0)
    p.add_argument("--cache-cols", type=int, default=500)
    p.add_argument("--max-iter", type=int, default=1_000_000)


def build_parser():
    parser = argparse.ArgumentParser(prog="parsmo")
    sub = parser.add_subparsers(dest="command", required=True)

    t = sub.add_parser("train", help="train a classifier and emit metrics")
    t.add_argument("--config", help="key=value file supplying defaults; flags override")
    _add_problem_flags(t)
    t.add_argument("--q", type=int, default=1, help="parallel working pairs per iteration")
    t.add_argument("--variant", choices=("parsmo1", "parsmo2", "blocks"), default="parsmo1")
    t.add_argument("--block-size", type=int, default=0)
    t.add_argument("--stepsize", choices=("exact", "armijo", "diminishing"), default="exact")
    t.add_argument("--theta", type=float, default=1e-3)
    t.add_argument("--xi", type=float, default=0.7)
    t.add_argument("--tau", type=float, default=None)
    t.add_argument("--eta", type=float, default=1e-3)
    t.add_argument("--index-eps", type=float, default=None)
    t.add_argument("--descent-eps", type=float, default=0.5)
    t.add_argument("--threads", type=int, default=1)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--fstar", default=None, help="reference objective: a number or a file holding one")
    t.add_argument("--metrics-out", default=None)
    t.add_argument("--model-out", default=None)
    t.add_argument("--deterministic", choices=("on", "off"), default="on")

    f = sub.add_parser("fstar", help="compute a tight reference objective")
    _add_problem_flags(f)
    f.set_defaults(max_iter=100_000_000)
    f.add_argument("--eta", type=float, default=1e-10)
    f.add_argument("--out", default=None, help="file to write the value to")

    pr = sub.add_parser("predict", help="label data with a trained model")
    pr.add_argument("--model", required=True)
    pr.add_argument("--data", required=True)
    pr.add_argument("--out", default=None, help="file for predicted labels, one per line")
    return parser


def _config_args(path):
    """Translate key=value lines into flag arguments."""
    args = []
    with open(path, "r", encoding="ascii") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            key = key.strip().replace("_", "-")
            if not sep or not key:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {raw.strip()!r}")
            if key == "config":
                continue
            args.extend([f"--{key}", value.strip()])
    return args


def _problem_from(ns):
    if ns.data is None:
        raise ValueError("--data is required")
    ds = load_libsvm(ns.data)
    gamma = ns.gamma
    if ns.kernel == "gaussian" and gamma is None:
        gamma = default_gamma(ds.m)
    kern = KernelSpec(ns.kernel, gamma if ns.kernel == "gaussian" else None)
    return ProblemSpec(ds, kern, ns.C)


def _parse_fstar(value):
    try:
        return float(value)
    except ValueError:
        with open(value, "r", encoding="ascii") as fh:
            return float(fh.read().strip())


def run_train(ns):
    spec = _problem_from(ns)
    if ns.stepsize == "armijo":
        rule = StepsizeRule.armijo(theta=ns.theta)
    elif ns.stepsize == "diminishing":
        rule = StepsizeRule.diminishing(xi=ns.xi)
    else:
        rule = StepsizeRule.exact()
    config = SolverConfig(
        q=ns.q,
        variant=ns.variant,
        block_size=ns.block_size,
        stepsize=rule,
        eta=ns.eta,
        index_eps=ns.index_eps,
        descent_eps=ns.descent_eps,
        tau=ns.tau,
        max_iter=ns.max_iter,
        cache_capacity=ns.cache_cols,
        threads=ns.threads,
        seed=ns.seed,
        deterministic=ns.deterministic == "on",
    )
    started = time.perf_counter()
    result = train(spec, config)
    wall = time.perf_counter() - started
    fstar = _parse_fstar(ns.fstar) if ns.fstar is not None else None
    if ns.metrics_out:
        records = build_records(result, ns.q, fstar, zero_seconds=config.deterministic)
        write_metrics(records, ns.metrics_out)
    if ns.model_out:
        view = violation_view(spec, result.state, config.resolved(spec).index_eps)
        SvmModel.from_training(spec, result.state, view).save(ns.model_out)
    cols = result.cache.columns_computed
    print(f"status {result.status} after {result.state.k} iterations")
    print(f"objective {result.state.fval!r}")
    print(
        f"kernel columns {cols} fresh ({cols // ns.q} per process, remainder {cols % ns.q}), "
        f"{result.cache.cache_hits} cache hits"
    )
    print(f"wall time {wall:.3f}s")
    return 0


def run_fstar(ns):
    spec = _problem_from(ns)
    config = SolverConfig(
        q=1, eta=ns.eta, max_iter=ns.max_iter, cache_capacity=ns.cache_cols
    )
    result = train(spec, config)
    if not result.converged:
        print(f"did not reach eta {ns.eta:g} within {ns.max_iter} iterations", file=sys.stderr)
        return 1
    # recompute from columns rather than trusting the maintained value
    fstar = objective(spec, result.state.x, result.cache)
    text = format(fstar, ".17g")
    print(text)
    if ns.out:
        with open(ns.out, "w", encoding="ascii") as fh:
            fh.write(text + "\n")
    return 0


def run_predict(ns):
    model = SvmModel.load(ns.model)
    ds = load_libsvm(ns.data)
    labels = model.predict(ds)
    correct = int(np.sum(labels == ds.y))
    print(f"accuracy {correct / ds.n:.4f} ({correct}/{ds.n})")
    if ns.out:
        with open(ns.out, "w", encoding="ascii") as fh:
            fh.writelines(f"{int(v):+d}\n" for v in labels)
    return 0


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        if getattr(ns, "config", None):
            # inject config-file values before the user's flags so flags win
            ns = parser.parse_args([argv[0]] + _config_args(ns.config) + argv[1:])
        if ns.command == "train":
            return run_train(ns)
        if ns.command == "fstar":
            return run_fstar(ns)
        return run_predict(ns)
    except (DatasetError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
