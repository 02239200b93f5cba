"""Monte Carlo harness: estimator convergence sweeps, parameter-fit
experiments, CSV output and static SVG plots.

Every record draws its own sample from a generator seeded by
``(master_seed, kappa_index, size_index, run)``, so records do not depend on
evaluation order, on the number of worker processes, or on how many runs
follow them.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from .distribution import CoupledParams, sample
from .errors import ArtifactIOError, CoupledError, DomainError
from .estimators import Method, estimate_scale, estimator_metrics
from .fitting import SearchConfig, fit_kappa_sigma

__all__ = [
    "ConvergenceConfig",
    "ConvergenceRecord",
    "SummaryRow",
    "FitRow",
    "PRESETS",
    "preset",
    "parse_config",
    "load_config",
    "run_convergence",
    "summarize",
    "run_fit_experiment",
    "emit_csv",
    "emit_svg",
    "emit_fit_svg",
    "CSV_HEADERS",
]


def _sizes_125(lo_exp, hi_exp):
    """10, 20, 50, 100, ... up to 10**hi_exp."""
    out = []
    for e in range(lo_exp, hi_exp):
        out.extend(m * 10**e for m in (1, 2, 5))
    out.append(10**hi_exp)
    return tuple(out)


@dataclass(frozen=True)
class ConvergenceConfig:
    kappas: tuple = (0.1, 0.5, 1.0, 2.0, 10.0)
    sigma_source: float = 10.0
    mu_source: float = 0.0
    sample_sizes: tuple = _sizes_125(1, 6)
    runs: int = 50
    estimator: Method = Method.GEOMETRIC_MEAN
    master_seed: int = 0

    def __post_init__(self):
        kappas = tuple(float(k) for k in self.kappas)
        sizes = tuple(int(n) for n in self.sample_sizes)
        if not kappas or any(not k > 0 for k in kappas):
            raise DomainError(f"kappas must be nonempty and positive, got {kappas}")
        if not sizes or sizes[0] < 1 or any(b <= a for a, b in zip(sizes, sizes[1:])):
            raise DomainError(f"sample sizes must be positive and strictly increasing, got {sizes}")
        if int(self.runs) < 1:
            raise DomainError(f"runs must be >= 1, got {self.runs}")
        if int(self.master_seed) < 0:
            raise DomainError(f"master_seed must be >= 0, got {self.master_seed}")
        if not self.sigma_source > 0:
            raise DomainError(f"sigma_source must be > 0, got {self.sigma_source}")
        object.__setattr__(self, "kappas", kappas)
        object.__setattr__(self, "sample_sizes", sizes)
        object.__setattr__(self, "runs", int(self.runs))
        object.__setattr__(self, "master_seed", int(self.master_seed))
        object.__setattr__(self, "sigma_source", float(self.sigma_source))
        object.__setattr__(self, "mu_source", float(self.mu_source))
        object.__setattr__(self, "estimator", Method(self.estimator))


# Both presets use a source scale of 10.
PRESETS = {
    "desk": ConvergenceConfig(
        kappas=(0.1, 0.5, 1.0, 2.0, 10.0),
        sample_sizes=_sizes_125(1, 5),
        runs=20,
    ),
    "paper": ConvergenceConfig(
        kappas=(0.02, 0.05, 0.1, 0.25, 0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 10.0),
        sample_sizes=_sizes_125(1, 6),
        runs=50,
    ),
}


def preset(name, **overrides):
    try:
        base = PRESETS[name]
    except KeyError:
        raise DomainError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
    return replace(base, **overrides)


_LIST_KEYS = {"kappas": float, "sample_sizes": int}
_SCALAR_KEYS = {"sigma_source": float, "mu_source": float, "runs": int, "estimator": str, "master_seed": int}


def parse_config(text):
    """Parse flat ``key = value`` lines into a ConvergenceConfig.

    Lists are comma separated; ``#`` starts a comment.  Unset keys keep the
    ConvergenceConfig defaults.
    """
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise DomainError(f"config line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        try:
            if key in _LIST_KEYS:
                conv = _LIST_KEYS[key]
                values[key] = tuple(conv(float(v)) for v in value.replace(" ", "").split(",") if v)
            elif key in _SCALAR_KEYS:
                conv = _SCALAR_KEYS[key]
                values[key] = int(float(value)) if conv is int else conv(value)
            else:
                raise DomainError(f"config line {lineno}: unknown key {key!r}")
        except ValueError as exc:
            raise DomainError(f"config line {lineno}: bad value for {key!r}: {exc}") from None
    return ConvergenceConfig(**values)


def load_config(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ArtifactIOError(path, exc.strerror or str(exc)) from exc
    return parse_config(text)


@dataclass(frozen=True)
class ConvergenceRecord:
    kappa: float
    n: int
    run: int
    estimator: str
    estimate: float
    failed: bool = False
    error: str = ""

    @property
    def run_index(self):
        return self.run


def _one_record(task):
    config, ki, ni, run = task
    kappa = config.kappas[ki]
    n = config.sample_sizes[ni]
    method = config.estimator
    try:
        params = CoupledParams(config.mu_source, config.sigma_source, kappa, 2.0)
        draws = sample(params, n, (config.master_seed, ki, ni, run))
        value = estimate_scale(draws, kappa, method).value
        if not math.isfinite(value):
            raise ArithmeticError(f"non-finite estimate {value!r}")
        return ConvergenceRecord(kappa, n, run, method.value, value)
    except (CoupledError, ArithmeticError, ValueError) as exc:
        return ConvergenceRecord(kappa, n, run, method.value, math.nan, True, f"{type(exc).__name__}: {exc}")


def run_convergence(config, workers=1):
    """All ``(kappa, n, run)`` records in canonical order.

    A failing record is kept with ``failed=True``; it never aborts the sweep.
    """
    tasks = [
        (config, ki, ni, run)
        for ki in range(len(config.kappas))
        for ni in range(len(config.sample_sizes))
        for run in range(config.runs)
    ]
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_one_record, tasks, chunksize=max(1, len(tasks) // (8 * workers))))
    return [_one_record(t) for t in tasks]


@dataclass(frozen=True)
class SummaryRow:
    """Statistics of one ``(kappa, n)`` group; std uses the population convention."""

    kappa: float
    n: int
    mean: float
    std: float
    bias: float
    variance: float
    mse: float
    count: int = 0
    failed: int = 0
    flagged: bool = False


def summarize(records, true_sigma):
    """Group records by ``(kappa, n)`` and compute mean, std, bias, variance, mse.

    Groups with fewer than two successful records are flagged and their
    spread statistics left as NaN.
    """
    groups = {}
    for rec in records:
        groups.setdefault((rec.kappa, rec.n), []).append(rec)
    rows = []
    for (kappa, n), recs in groups.items():
        good = [r.estimate for r in recs if not r.failed]
        failed = len(recs) - len(good)
        if len(good) >= 2:
            m = estimator_metrics(good, true_sigma)
            rows.append(SummaryRow(kappa, n, m.mean, m.std, m.bias, m.variance, m.mse, len(good), failed))
        else:
            mean = good[0] if good else math.nan
            bias = mean - true_sigma
            rows.append(SummaryRow(kappa, n, mean, math.nan, bias, math.nan, math.nan, len(good), failed, True))
    return rows


@dataclass(frozen=True)
class FitRow:
    n: int
    kappa_hat: float
    sigma_hat: float
    p_value: float
    converged: bool
    error: str = ""
    result: object = field(default=None, compare=False, repr=False)


def run_fit_experiment(source, n_total, subsample_sizes, seed, search=None):
    """Fit ``(kappa, sigma)`` on prefixes of one master sample.

    One sample of ``n_total`` is drawn from ``source`` with ``seed``; each
    requested size fits the leading observations.  Failures are recorded in
    their row.
    """
    sizes = [int(s) for s in subsample_sizes]
    if any(s < 1 or s > n_total for s in sizes):
        raise DomainError(f"subsample sizes must lie in [1, {n_total}], got {sizes}")
    master = sample(source, int(n_total), (int(seed), 0))
    base = search or SearchConfig()
    rows = []
    for i, size in enumerate(sizes):
        config = replace(base, seed=int(seed) * 1000 + i + 1, max_samples=None)
        try:
            res = fit_kappa_sigma(master.head(size), config)
            rows.append(FitRow(size, res.kappa_hat, res.sigma_hat, res.p_value, res.converged, result=res))
        except (CoupledError, ArithmeticError, ValueError) as exc:
            rows.append(FitRow(size, math.nan, math.nan, math.nan, False, f"{type(exc).__name__}: {exc}"))
    return rows


CSV_HEADERS = {
    "convergence": ("kappa", "n", "run", "estimator", "estimate", "failed"),
    "summary": ("kappa", "n", "mean", "std", "bias", "variance", "mse"),
    "fit": ("n", "kappa_hat", "sigma_hat", "p_value", "converged"),
    "trace": ("kappa", "sigma", "statistic", "p_value", "stage", "error"),
}
_KIND_OF = {ConvergenceRecord: "convergence", SummaryRow: "summary", FitRow: "fit"}


def _fmt(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def emit_csv(rows, path, kind=None):
    """Write rows with the fixed header for their kind.

    ``kind`` is inferred from the row type; pass it explicitly to write a
    header-only file for an empty row list.
    """
    rows = list(rows)
    if kind is None:
        kind = _KIND_OF.get(type(rows[0]), "trace") if rows else "convergence"
    header = CSV_HEADERS[kind]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        get = (lambda k: getattr(row, k))
        writer.writerow([_fmt(get(k)) for k in header])
    try:
        Path(path).write_text(buf.getvalue())
    except OSError as exc:
        raise ArtifactIOError(path, exc.strerror or str(exc)) from exc
    return Path(path)


# ---------------------------------------------------------------- SVG output

_PANEL_W, _PANEL_H = 520, 300
_MARGIN_L, _MARGIN_R, _MARGIN_T, _MARGIN_B = 70, 20, 34, 46
_COLOURS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _nice_linear_ticks(lo, hi, count=5):
    span = hi - lo
    if span <= 0:
        return [lo]
    raw = span / count
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=raw)
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 1e-9 * step:
        ticks.append(round(t, 12))
        t += step
    return ticks


class _Axes:
    def __init__(self, x0, y0, xlim, ylim, xlog, ylog):
        self.x0, self.y0 = x0, y0
        self.xlog, self.ylog = xlog, ylog
        self.xlim = tuple(math.log10(v) for v in xlim) if xlog else xlim
        self.ylim = tuple(math.log10(v) for v in ylim) if ylog else ylim
        self.w = _PANEL_W - _MARGIN_L - _MARGIN_R
        self.h = _PANEL_H - _MARGIN_T - _MARGIN_B

    def px(self, x):
        v = math.log10(x) if self.xlog else x
        lo, hi = self.xlim
        return self.x0 + _MARGIN_L + (v - lo) / (hi - lo) * self.w

    def py(self, y):
        if self.ylog:
            y = max(y, 10 ** self.ylim[0])
            v = math.log10(y)
        else:
            v = y
        lo, hi = self.ylim
        v = min(max(v, lo), hi)
        return self.y0 + _MARGIN_T + (1.0 - (v - lo) / (hi - lo)) * self.h


def _f(v):
    return f"{v:.2f}"


def _axis_frame(ax, title, xlabel, ylabel):
    out = []
    left, top = ax.x0 + _MARGIN_L, ax.y0 + _MARGIN_T
    out.append(f'<rect x="{_f(left)}" y="{_f(top)}" width="{_f(ax.w)}" height="{_f(ax.h)}" '
               f'fill="none" stroke="#000" stroke-width="1"/>')
    out.append(f'<text x="{_f(left + ax.w / 2)}" y="{_f(ax.y0 + 20)}" text-anchor="middle" '
               f'font-size="14">{title}</text>')
    out.append(f'<text x="{_f(left + ax.w / 2)}" y="{_f(ax.y0 + _PANEL_H - 8)}" text-anchor="middle" '
               f'font-size="12">{xlabel}</text>')
    cy = top + ax.h / 2
    out.append(f'<text x="{_f(ax.x0 + 16)}" y="{_f(cy)}" text-anchor="middle" font-size="12" '
               f'transform="rotate(-90 {_f(ax.x0 + 16)} {_f(cy)})">{ylabel}</text>')
    return out


def _ticks(ax):
    out = []
    bottom = ax.y0 + _MARGIN_T + ax.h
    left = ax.x0 + _MARGIN_L
    if ax.xlog:
        xt = [10.0**e for e in range(math.ceil(ax.xlim[0] - 1e-9), math.floor(ax.xlim[1] + 1e-9) + 1)]
        xlab = [f"1e{round(math.log10(t))}" for t in xt]
    else:
        xt = _nice_linear_ticks(*ax.xlim)
        xlab = [f"{t:g}" for t in xt]
    for t, lab in zip(xt, xlab):
        x = ax.px(t)
        out.append(f'<line x1="{_f(x)}" y1="{_f(bottom)}" x2="{_f(x)}" y2="{_f(bottom + 5)}" stroke="#000"/>')
        out.append(f'<text x="{_f(x)}" y="{_f(bottom + 18)}" text-anchor="middle" font-size="10">{lab}</text>')
    if ax.ylog:
        yt = [10.0**e for e in range(math.ceil(ax.ylim[0] - 1e-9), math.floor(ax.ylim[1] + 1e-9) + 1)]
        ylab = [f"1e{round(math.log10(t))}" for t in yt]
    else:
        yt = _nice_linear_ticks(*ax.ylim)
        ylab = [f"{t:g}" for t in yt]
    for t, lab in zip(yt, ylab):
        y = ax.py(t)
        out.append(f'<line x1="{_f(left - 5)}" y1="{_f(y)}" x2="{_f(left)}" y2="{_f(y)}" stroke="#000"/>')
        out.append(f'<text x="{_f(left - 8)}" y="{_f(y + 3)}" text-anchor="end" font-size="10">{lab}</text>')
    return out


def _padded(lo, hi, log):
    if log:
        lo, hi = math.log10(lo), math.log10(hi)
    if hi <= lo:
        lo, hi = lo - 0.5, hi + 0.5
    pad = 0.08 * (hi - lo)
    lo, hi = lo - pad, hi + pad
    return (10**lo, 10**hi) if log else (lo, hi)


def _write_svg(parts, width, height, path):
    body = "\n".join(parts)
    text = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">\n'
        f'<rect width="{width}" height="{height}" fill="#fff"/>\n{body}\n</svg>\n'
    )
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise ArtifactIOError(path, exc.strerror or str(exc)) from exc
    return Path(path)


def emit_svg(summary, path, yscale="auto", true_sigma=None):
    """Mean +/- std of the estimates against sample size, one panel per kappa.

    The x axis is logarithmic.  ``yscale="auto"`` uses a linear y axis for
    kappa <= 1 and a logarithmic one for kappa > 1; "linear" or "log" force
    one choice.  Each finite mean is drawn as one ``<circle>``.
    """
    if yscale not in ("auto", "linear", "log"):
        raise DomainError(f"yscale must be auto, linear or log, got {yscale!r}")
    by_kappa = {}
    for row in summary:
        by_kappa.setdefault(row.kappa, []).append(row)
    parts = []
    for panel, kappa in enumerate(sorted(by_kappa)):
        rows = sorted(by_kappa[kappa], key=lambda r: r.n)
        ylog = kappa > 1 if yscale == "auto" else yscale == "log"
        pts = [r for r in rows if math.isfinite(r.mean) and (r.mean > 0 or not ylog)]
        ns = [r.n for r in rows]
        lows, highs = [], []
        for r in pts:
            s = r.std if math.isfinite(r.std) else 0.0
            lows.append(r.mean - s)
            highs.append(r.mean + s)
        if true_sigma is not None:
            lows.append(true_sigma)
            highs.append(true_sigma)
        if ylog:
            positive = [v for v in lows + highs if v > 0] or [1.0]
            ylim = _padded(min(positive), max(positive), True)
        else:
            ylim = _padded(min(lows, default=0.0), max(highs, default=1.0), False)
        xlim = _padded(min(ns), max(ns), True)
        ax = _Axes(0, panel * _PANEL_H, xlim, ylim, True, ylog)
        scale_name = "log-log" if ylog else "linear-log"
        parts += _axis_frame(ax, f"kappa = {kappa:g} ({scale_name})", "sample size N", "scale estimate")
        parts += _ticks(ax)
        if true_sigma is not None:
            y = ax.py(true_sigma)
            parts.append(f'<line x1="{_f(ax.px(xlim[0]))}" y1="{_f(y)}" x2="{_f(ax.px(xlim[1]))}" '
                         f'y2="{_f(y)}" stroke="#888" stroke-dasharray="4 3"/>')
        colour = _COLOURS[panel % len(_COLOURS)]
        for r in pts:
            x = ax.px(r.n)
            if math.isfinite(r.std) and r.std > 0:
                parts.append(f'<line x1="{_f(x)}" y1="{_f(ax.py(r.mean - r.std))}" x2="{_f(x)}" '
                             f'y2="{_f(ax.py(r.mean + r.std))}" stroke="{colour}" stroke-width="1.5"/>')
            parts.append(f'<circle cx="{_f(x)}" cy="{_f(ax.py(r.mean))}" r="3" fill="{colour}"/>')
    height = max(1, len(by_kappa)) * _PANEL_H
    return _write_svg(parts, _PANEL_W, height, path)


def emit_fit_svg(fit_rows, path):
    """CVM p-value against candidate kappa for each fitted subsample size."""
    parts = []
    rows = [r for r in fit_rows if r.result is not None]
    kappas = [e.kappa for r in rows for e in r.result.trace if e.ok]
    if kappas:
        xlim = _padded(min(kappas), max(kappas), True)
    else:
        xlim = (0.01, 100.0)
    ax = _Axes(0, 0, xlim, (-0.05, 1.05), True, False)
    parts += _axis_frame(ax, "CVM p-value along the geometric-mean constraint", "coupling kappa", "p-value")
    parts += _ticks(ax)
    for i, r in enumerate(rows):
        colour = _COLOURS[i % len(_COLOURS)]
        entries = sorted((e for e in r.result.trace if e.ok), key=lambda e: e.kappa)
        pts = " ".join(f"{_f(ax.px(e.kappa))},{_f(ax.py(e.p_value))}" for e in entries)
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{colour}" stroke-width="1.2"/>')
        if math.isfinite(r.kappa_hat):
            parts.append(f'<circle cx="{_f(ax.px(r.kappa_hat))}" cy="{_f(ax.py(r.p_value))}" r="4" '
                         f'fill="{colour}"/>')
        parts.append(f'<text x="{_f(ax.x0 + _MARGIN_L + 8)}" y="{_f(ax.y0 + _MARGIN_T + 14 + 14 * i)}" '
                     f'font-size="11" fill="{colour}">n = {r.n}</text>')
    return _write_svg(parts, _PANEL_W, _PANEL_H, path)


def record_dicts(rows):
    """Plain dicts of dataclass rows (handy for JSON or DataFrame use)."""
    return [{f.name: getattr(r, f.name) for f in fields(r) if f.name != "result"} for r in rows]
