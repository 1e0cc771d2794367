"""Command-line entry point: ``sketchlda <subcommand> ...``."""

import argparse
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import bounds as bd
from .dataset import ArrayRowProvider, class_statistics, load_csv, recode, train_test_split
from .errors import NumericalError, SketchLdaError, ValidationError
from .experiment import GM_SCALINGS, INTERCEPTS, METHODS, ExperimentConfig, emit, logspace_grid, \
    run_replicates
from .lda_gaussian import fit_gaussian
from .lda_ls import fit_ls
from .lda_rk import RkConfig, extract_direction, run_rk, sampler_for
from .metrics import accuracy_report, pca2

log = logging.getLogger("sketchlda")

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL, EXIT_IO = 0, 2, 3, 4


def float_list(text):
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a list of numbers: {text!r}")


def int_grid(text):
    """Comma list of integers, or ``logspace:lo:hi:count``."""
    try:
        if text.startswith("logspace:"):
            _, lo, hi, count = text.split(":")
            return list(logspace_grid(float(lo), float(hi), int(count)))
        return [int(float(t)) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad iteration grid {text!r}")


def _common(p):
    p.add_argument("--data", help="CSV file (split internally with --split)")
    p.add_argument("--train", help="training CSV (use with --test instead of --data)")
    p.add_argument("--test", help="test CSV")
    p.add_argument("--label-col", required=True)
    p.add_argument("--positive-class", required=True, help="label tag mapped to class 2")
    p.add_argument("--features", help="comma-separated feature columns (default: all others)")
    p.add_argument("--split", type=float, default=0.8, help="training fraction for --data")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", help="output directory (default: print to stdout)")
    p.add_argument("--format", choices=("csv", "json", "md"), default="csv")


def _rk_flags(p, multi):
    p.add_argument("--sampler", choices=("uniform", "rownorm", "leverage"), default="rownorm")
    p.add_argument("--step-size", type=float_list, default=[0.1, 0.2, 0.3, 0.4, 0.5] if multi else [0.9])
    p.add_argument("--iterations", type=int_grid, default=None)
    p.add_argument("--checkpoints", type=int_grid, default=None)
    p.add_argument("--replicates", type=int, default=20 if multi else 1)
    p.add_argument("--intercept", choices=INTERCEPTS, default="optimal")


def build_parser():
    ap = argparse.ArgumentParser(prog="sketchlda", description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit-gm", help="Gaussian LDA by eigendecomposition")
    _common(p)
    p.add_argument("--gm-scaling", choices=GM_SCALINGS, default="raw")

    p = sub.add_parser("fit-ls", help="least-squares LDA")
    _common(p)
    p.add_argument("--intercept", choices=INTERCEPTS, default="optimal")

    p = sub.add_parser("fit-rk", help="sketched LDA by randomized Kaczmarz")
    _common(p)
    _rk_flags(p, multi=False)

    p = sub.add_parser("bounds", help="evaluate the convergence bounds on the training design")
    _common(p)
    p.add_argument("--sampler", choices=("uniform", "rownorm", "leverage"), default="rownorm")
    p.add_argument("--step-size", type=float_list, default=[0.1])
    p.add_argument("--iterations", type=int_grid, default=[1000])
    p.add_argument("--estimate", choices=(bd.PLUG_IN, bd.GAUSSIAN_ASYMPTOTIC), default=bd.PLUG_IN,
                   help="how to obtain E||Xt||^2 from the test block")
    p.add_argument("--eps", type=float, help="also prescribe (c, k) for this tolerance")

    p = sub.add_parser("experiment", help="replicate grid over step sizes and iterations")
    _common(p)
    _rk_flags(p, multi=True)
    p.add_argument("--methods", default=",".join(METHODS))
    p.add_argument("--gm-scaling", choices=GM_SCALINGS, default="raw")
    p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("pca", help="scores on the first two principal components")
    _common(p)
    return ap


def _load(args):
    feats = args.features.split(",") if args.features else None
    if args.train or args.test:
        if not (args.train and args.test) or args.data:
            raise ValidationError("give either --data or both --train and --test")
        train = load_csv(args.train, args.label_col, args.positive_class, feats)
        test = load_csv(args.test, args.label_col, args.positive_class, feats)
        if test.feature_names != train.feature_names:
            raise ValidationError("train and test files have different feature columns")
        return train, test
    if not args.data:
        raise ValidationError("no input: give --data or --train/--test")
    ds = load_csv(args.data, args.label_col, args.positive_class, feats)
    if args.split >= 1.0:
        return ds, None
    return train_test_split(ds, args.split, args.seed)


def _write(args, name, payload):
    """Emit a dict of named rows as csv/json/md to stdout or ``--output``."""
    header, rows = payload
    if args.format == "json":
        text = json.dumps([dict(zip(header, r)) for r in rows], indent=2) + "\n"
    elif args.format == "md":
        lines = ["| " + " | ".join(header) + " |", "|" + "---|" * len(header)]
        lines += ["| " + " | ".join(_cell(v) for v in r) + " |" for r in rows]
        text = "\n".join(lines) + "\n"
    else:
        text = ",".join(header) + "\n" + "".join(",".join(_cell(v) for v in r) + "\n" for r in rows)
    if args.output:
        out = Path(args.output)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{name}.{args.format}").write_text(text)
    else:
        sys.stdout.write(text)


def _cell(v):
    if v is None or (isinstance(v, float) and math.isnan(v)):
        return ""
    return repr(float(v)) if isinstance(v, (float, np.floating)) else str(v)


def _coef_rows(names, direction, intercept=None):
    rows = [] if intercept is None else [("intercept", float(intercept))]
    return rows + [(n, float(b)) for n, b in zip(names, direction)]


def _accuracy_rows(clf, test):
    if test is None or not test.n:
        return []
    acc = accuracy_report(clf, test)
    return [("accuracy", acc.overall), ("accuracy_class1", acc.class1), ("accuracy_class2", acc.class2)]


def cmd_fit_gm(args):
    train, test = _load(args)
    model = fit_gaussian(train)
    d = model.unit_within_direction() if args.gm_scaling == "unit_within" else model.gm_direction
    rows = _coef_rows(train.feature_names, d) + _accuracy_rows(model, test)
    _write(args, "fit_gm", (("name", "value"), rows))


def cmd_fit_ls(args):
    train, test = _load(args)
    clf = fit_ls(recode(train))
    if args.intercept == "optimal":
        clf = clf.with_optimal_intercept(class_statistics(train))
    rows = _coef_rows(train.feature_names, clf.direction, clf.intercept) + _accuracy_rows(clf, test)
    _write(args, "fit_ls", (("name", "value"), rows))


def cmd_fit_rk(args):
    train, test = _load(args)
    provider = ArrayRowProvider(train.features, intercept=True)
    sampler = sampler_for(provider, args.sampler)
    iters = args.iterations or [100_000]
    cps = sorted(set(args.checkpoints or []) | set(iters))
    stats = class_statistics(train)
    y = recode(train).y
    rows = []
    for c in args.step_size:
        for rep in range(args.replicates):
            run = run_rk(provider, y, sampler,
                         RkConfig(c, max(cps), seed=args.seed, replicate=rep, checkpoints=cps))
            for k, beta in run.checkpoints:
                clf = extract_direction(beta)
                if args.intercept == "optimal" and not clf.degenerate:
                    clf = clf.with_optimal_intercept(stats)
                for name, v in _coef_rows(train.feature_names, clf.direction, clf.intercept) \
                        + _accuracy_rows(clf, test):
                    rows.append((c, k, rep, name, v))
    _write(args, "fit_rk", (("step_size", "iterations", "replicate", "name", "value"), rows))


def cmd_bounds(args):
    train, test = _load(args)
    X = recode(train).features_aug
    y = recode(train).y
    if args.estimate == bd.PLUG_IN:
        if test is None or not test.n:
            raise ValidationError("plug-in estimate needs a test block")
        E = bd.estimate_spectral_norm_sq(test.features, bd.PLUG_IN)
    else:
        N = test.n if test is not None and test.n else train.n
        E = bd.estimate_spectral_norm_sq((N, train.p), bd.GAUSSIAN_ASYMPTOTIC)
    inputs = bd.bound_inputs(X, y, args.sampler, E)
    rows = [(f, None, None, float(getattr(inputs, f))) for f in
            ("kappa", "frob_sq", "alpha_tilde", "r_star", "exp_xtilde_sq", "eps0")]
    for c in args.step_size:
        for k in args.iterations:
            for name, fn in (("theorem1", bd.theorem1_bound), ("corollary", None)):
                try:
                    v = fn(inputs, c, k) if fn else bd.corollary_bound(inputs, args.sampler, c, k)
                except ValidationError as exc:
                    log.warning("%s bound at c=%g: %s", name, c, exc)
                    v = math.nan
                rows.append((name, c, k, v))
    if args.eps is not None:
        pr = bd.prescribe(inputs, args.eps)
        rows.append(("prescribed", pr.step_size, pr.iterations, args.eps))
    _write(args, "bounds", (("quantity", "step_size", "iterations", "value"), rows))


def cmd_experiment(args):
    train, test = _load(args)
    cps = sorted(set(args.checkpoints or []) | set(args.iterations or []))
    cfg = ExperimentConfig(
        train=train, test=test, methods=[m for m in args.methods.split(",") if m],
        sampler=args.sampler, step_sizes=args.step_size,
        checkpoints=cps or logspace_grid(3, 6.5, 10), replicates=args.replicates,
        seed=args.seed, intercept=args.intercept, gm_scaling=args.gm_scaling, jobs=args.jobs,
    )
    table = run_replicates(cfg)
    if not args.output:
        raise ValidationError("experiment needs --output")
    for path in emit(table, args.output, args.format):
        log.info("wrote %s", path)


def cmd_pca(args):
    feats = args.features.split(",") if args.features else None
    if not args.data:
        raise ValidationError("pca needs --data")
    ds = load_csv(args.data, args.label_col, args.positive_class, feats)
    scores = pca2(ds.features)
    rows = [(float(a), float(b), int(lab)) for (a, b), lab in zip(scores, ds.labels)]
    _write(args, "pca", (("pc1", "pc2", "class"), rows))


COMMANDS = {
    "fit-gm": cmd_fit_gm, "fit-ls": cmd_fit_ls, "fit-rk": cmd_fit_rk,
    "bounds": cmd_bounds, "experiment": cmd_experiment, "pca": cmd_pca,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        COMMANDS[args.command](args)
    except ValidationError as exc:
        log.error("%s", exc)
        return EXIT_VALIDATION
    except NumericalError as exc:
        log.error("%s", exc)
        return EXIT_NUMERICAL
    except OSError as exc:
        log.error("%s", exc)
        return EXIT_IO
    except SketchLdaError as exc:
        log.error("%s", exc)
        return exc.exit_code
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
