"""Command-line front end: ``coupledscale <command> [options]``.

Exit codes: 0 success, 1 domain error (including bad arguments), 2 numeric
failure, 3 I/O failure.  The default seed of the randomized commands can be
overridden with the ``COUPLEDSCALE_SEED`` environment variable.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import distribution as dist
from . import entropy, harness
from .errors import ArtifactIOError, DomainError, NumericError
from .estimators import Method, estimate_scale
from .fitting import PValueMethod, SearchConfig, fit_kappa_sigma
from .sampleset import SampleSet

EXIT_OK, EXIT_DOMAIN, EXIT_NUMERIC, EXIT_IO = 0, 1, 2, 3
SEED_ENV = "COUPLEDSCALE_SEED"
_METHODS = {"gmean": Method.GEOMETRIC_MEAN, "genmean": Method.GENERALIZED_MEAN}


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors, which would collide with the numeric code
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_DOMAIN, f"{self.prog}: error: {message}\n")


def default_seed():
    raw = os.environ.get(SEED_ENV)
    if raw is None or raw == "":
        return 0
    try:
        return int(raw)
    except ValueError:
        raise DomainError(f"{SEED_ENV} must be an integer, got {raw!r}") from None


def _fmt(v):
    return repr(float(v))


def read_values(path):
    """Read one numeric column from a CSV file.

    A non-numeric first row is taken as a header; the column named ``x`` is
    used if present, otherwise the first column.
    """
    try:
        with open(path, newline="") as fh:
            rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    except OSError as exc:
        raise ArtifactIOError(path, exc.strerror or str(exc)) from exc
    if not rows:
        raise DomainError(f"{path}: no data")
    col = 0
    try:
        float(rows[0][0])
    except ValueError:
        header = [h.strip() for h in rows[0]]
        col = header.index("x") if "x" in header else 0
        rows = rows[1:]
    try:
        return np.array([float(r[col]) for r in rows], dtype=float)
    except (ValueError, IndexError) as exc:
        raise DomainError(f"{path}: non-numeric data ({exc})") from None


def _params(args):
    return dist.CoupledParams(args.mu, args.sigma, args.kappa, args.alpha)


def _family_args(p, sigma=True, alpha=True):
    p.add_argument("--mu", type=float, default=0.0)
    if sigma:
        p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--kappa", type=float, required=True)
    if alpha:
        p.add_argument("--alpha", type=float, default=2.0)


def cmd_sample(args, out):
    draws = dist.sample(_params(args), args.n, args.seed)
    if args.out:
        lines = ["x"] + [_fmt(v) for v in draws.values]
        try:
            Path(args.out).write_text("\n".join(lines) + "\n")
        except OSError as exc:
            raise ArtifactIOError(args.out, exc.strerror or str(exc)) from exc
    else:
        for v in draws.values:
            print(_fmt(v), file=out)


def cmd_pointwise(args, out):
    params = _params(args)
    if args.command == "quantile":
        if args.p is None:
            raise DomainError("quantile needs --p")
        values = [dist.quantile(params, p) for p in args.p]
        inputs = args.p
    else:
        if args.x is None:
            raise DomainError(f"{args.command} needs --x")
        fn = dist.pdf if args.command == "pdf" else dist.cdf
        values = [fn(params, x) for x in args.x]
        inputs = args.x
    for a, v in zip(inputs, values):
        print(f"{_fmt(a)}\t{_fmt(v)}", file=out)


def cmd_estimate(args, out):
    samples = SampleSet(read_values(args.input), args.mu)
    est = estimate_scale(samples, args.kappa, _METHODS[args.method])
    print(f"sigma_hat={_fmt(est.value)} method={est.method.value} n={est.n} kappa={_fmt(args.kappa)}", file=out)


def cmd_entropy(args, out):
    params = _params(args)
    if params.kappa > 0:
        rep = entropy.tsallis_entropies(params)
        print(f"coupled={_fmt(rep.coupled)}", file=out)
        print(f"tsallis={_fmt(rep.tsallis)}", file=out)
        print(f"normalized_tsallis={_fmt(rep.normalized_tsallis)}", file=out)
        print(f"average_density={_fmt(rep.average_density)}", file=out)
        print(f"q={_fmt(rep.q)}", file=out)
    else:
        print(f"coupled={_fmt(entropy.coupled_entropy(params))}", file=out)
        print(f"average_density={_fmt(entropy.average_density(params))}", file=out)


def _ensure_dir(path):
    try:
        Path(path).mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ArtifactIOError(path, exc.strerror or str(exc)) from exc
    return Path(path)


def cmd_convergence(args, out):
    if args.config:
        config = harness.load_config(args.config)
    else:
        config = harness.preset(args.preset)
    overrides = {}
    if args.seed is not None:
        overrides["master_seed"] = args.seed
    elif args.config is None:
        overrides["master_seed"] = default_seed()
    if args.estimator:
        overrides["estimator"] = _METHODS[args.estimator]
    if args.runs is not None:
        overrides["runs"] = args.runs
    config = replace(config, **overrides)
    out_dir = _ensure_dir(args.out_dir)
    records = harness.run_convergence(config, workers=args.workers)
    summary = harness.summarize(records, config.sigma_source)
    harness.emit_csv(records, out_dir / "convergence.csv", kind="convergence")
    harness.emit_csv(summary, out_dir / "summary.csv", kind="summary")
    harness.emit_svg(summary, out_dir / "convergence.svg", yscale=args.yscale, true_sigma=config.sigma_source)
    failed = sum(r.failed for r in records)
    print(f"records={len(records)} failed={failed} out_dir={out_dir}", file=out)


def _search_config(args):
    return SearchConfig(
        kappa_min=args.kappa_min,
        kappa_max=args.kappa_max,
        grid=args.grid,
        replicates=args.replicates,
        seed=default_seed() if args.seed is None else args.seed,
        method=PValueMethod(args.pvalue),
    )


def cmd_fit(args, out):
    samples = SampleSet(read_values(args.input), args.mu)
    res = fit_kappa_sigma(samples, _search_config(args))
    print(
        f"kappa_hat={_fmt(res.kappa_hat)} sigma_hat={_fmt(res.sigma_hat)} "
        f"p_value={_fmt(res.p_value)} statistic={_fmt(res.best.statistic)} "
        f"converged={'true' if res.converged else 'false'} n={res.n}",
        file=out,
    )
    if args.trace_out:
        harness.emit_csv(res.trace, args.trace_out, kind="trace")


def cmd_fit_experiment(args, out):
    source = dist.CoupledParams(args.mu, args.sigma, args.kappa, 2.0)
    sizes = [int(float(s)) for s in args.subsamples.split(",") if s.strip()]
    search = _search_config(args)
    rows = harness.run_fit_experiment(source, int(args.n_total), sizes, search.seed, search)
    out_dir = _ensure_dir(args.out_dir)
    harness.emit_csv(rows, out_dir / "fit.csv", kind="fit")
    harness.emit_fit_svg(rows, out_dir / "fit.svg")
    for r in rows:
        print(f"n={r.n} kappa_hat={_fmt(r.kappa_hat)} sigma_hat={_fmt(r.sigma_hat)} "
              f"p_value={_fmt(r.p_value)} converged={'true' if r.converged else 'false'}", file=out)


def _fit_args(p):
    p.add_argument("--kappa-min", type=float, default=0.02)
    p.add_argument("--kappa-max", type=float, default=20.0)
    p.add_argument("--grid", type=int, default=50)
    p.add_argument("--replicates", type=int, default=999)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--pvalue", choices=[m.value for m in PValueMethod], default="bootstrap")


def build_parser():
    parser = _Parser(prog="coupledscale", description="Coupled Gaussian scale estimation toolkit.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("sample", help="draw from a coupled exponential distribution")
    _family_args(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None, help="CSV path (default: one value per line on stdout)")
    p.set_defaults(func=cmd_sample)

    for name in ("pdf", "cdf", "quantile"):
        p = sub.add_parser(name, help=f"evaluate the {name}")
        _family_args(p)
        p.add_argument("--x", type=float, nargs="+")
        p.add_argument("--p", type=float, nargs="+")
        p.set_defaults(func=cmd_pointwise)

    p = sub.add_parser("estimate", help="estimate the scale of a sample with known kappa")
    p.add_argument("--method", choices=sorted(_METHODS), default="gmean")
    p.add_argument("--kappa", type=float, required=True)
    p.add_argument("--mu", type=float, default=0.0)
    p.add_argument("--in", dest="input", required=True)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("entropy", help="coupled, Tsallis and normalized Tsallis entropies")
    _family_args(p)
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser("convergence", help="Monte Carlo convergence sweep of a scale estimator")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--preset", choices=sorted(harness.PRESETS), default="desk")
    src.add_argument("--config", default=None)
    p.add_argument("--out-dir", default="convergence_out")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--runs", type=int, default=None)
    p.add_argument("--estimator", choices=sorted(_METHODS), default=None)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--yscale", choices=("auto", "linear", "log"), default="auto")
    p.set_defaults(func=cmd_convergence)

    p = sub.add_parser("fit", help="fit (kappa, sigma) to a sample by Cramer-von Mises search")
    p.add_argument("--mu", type=float, default=0.0)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--trace-out", default=None)
    _fit_args(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("fit-experiment", help="fit prefix subsamples of one simulated master sample")
    p.add_argument("--mu", type=float, default=0.0)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--kappa", type=float, required=True)
    p.add_argument("--n-total", type=float, default=1e5)
    p.add_argument("--subsamples", default="1000,10000,100000")
    p.add_argument("--out-dir", default="fit_out")
    _fit_args(p)
    p.set_defaults(func=cmd_fit_experiment)
    return parser


def main(argv=None, out=None):
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "seed", 0) is None and args.command == "sample":
            args.seed = default_seed()
        args.func(args, out)
    except ArtifactIOError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (DomainError, NotImplementedError) as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (NumericError, ArithmeticError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
