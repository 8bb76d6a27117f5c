"""coordctl: batch front-end for exact, Monte Carlo, bounds, region and
validation runs driven by a single JSON configuration file."""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Sequence

import numpy as np

from . import __version__
from .binning import build_one_shot, draw_binning
from .bounds import (
    BoundTerm,
    GammaChoice,
    eps_app,
    eps_app2,
    eps_dec,
    eps_tot,
    eps_tot_theoretical,
    fmt,
    region_csv,
    region_sweep,
    sweep_monotonicity,
    typicality_constants,
    dispersion,
    validate_decomposition,
)
from .dist import ResourceCapError
from .factors import TargetFactors, desk_instance, from_arrays, random_instance
from .sim import (
    EPISODE_FIELDS,
    FixedLengthScheme,
    empirical_l1,
    exact_induced,
    first_bound_distances,
    l1_to_target,
    select_f,
    simulate_episodes,
)

MODES = ("exact", "montecarlo", "bounds", "region", "validate")
ROW_TOL = 1e-9

EXIT_OK, EXIT_CONFIG, EXIT_CAP, EXIT_COMPARE = 0, 2, 3, 4

FACTOR_KEYS = {
    "P_U": ("U",),
    "P_W|U": ("U", "W"),
    "P_X|UW": ("U", "W", "X"),
    "P_Y|X": ("X", "Y"),
    "P_V|WY": ("W", "Y", "V"),
}


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

@dataclass
class ExperimentConfig:
    factors: TargetFactors
    n: int
    R0: float
    R: float
    gammas: GammaChoice | None  # None means the default choice for n
    eps1: float
    eps4: float | None
    eps5: float | None
    seed_count: int
    base_seed: int
    mode: str | None
    output: str | None
    region_n: list[float]
    region_eps1: list[float]
    region_eps4: list[float]
    episodes: int
    log_episodes: int
    select_f: str
    reference: str
    raw: dict = field(repr=False, default_factory=dict)

    def gamma_choice(self, n: int | None = None) -> GammaChoice:
        if self.gammas is not None:
            return self.gammas
        n = self.n if n is None else n
        try:
            return GammaChoice.default(n)
        except ValueError as e:
            raise ConfigError(f"field 'gamma': {e}") from None

    def hash(self) -> str:
        blob = json.dumps(self.raw, sort_keys=True, separators=(",", ":")).encode()
        return hashlib.sha256(blob).hexdigest()


def _number(raw: dict, key: str, default=None, lo: float | None = None, integer: bool = False):
    if key not in raw:
        if default is None:
            raise ConfigError(f"field '{key}' is required")
        return default
    val = raw[key]
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ConfigError(f"field '{key}' must be a number, got {val!r}")
    if integer and not float(val).is_integer():
        raise ConfigError(f"field '{key}' must be an integer, got {val!r}")
    if lo is not None and val < lo:
        raise ConfigError(f"field '{key}' must be >= {lo}, got {val!r}")
    return int(val) if integer else float(val)


def _check_rows(name: str, arr: np.ndarray) -> np.ndarray:
    if arr.dtype == object or not np.issubdtype(arr.dtype, np.number):
        raise ConfigError(f"factor '{name}' must be a rectangular numeric array")
    if np.any(~np.isfinite(arr)) or np.any(arr < 0):
        raise ConfigError(f"factor '{name}' has negative or non-finite entries")
    sums = arr.sum(axis=-1)
    for idx in np.ndindex(*sums.shape):
        if abs(sums[idx] - 1.0) > ROW_TOL:
            where = "".join(f"[{i}]" for i in idx) or "[]"
            raise ConfigError(f"factor '{name}' row {where} sums to {sums[idx]:.12g}, not 1 within {ROW_TOL:g}")
    return arr / sums[..., None]


def _factors(raw: dict) -> TargetFactors:
    inst = raw.get("instance")
    if inst is not None and "factors" in raw:
        raise ConfigError("give either 'instance' or 'factors', not both")
    if inst is not None:
        if isinstance(inst, str):
            inst = {"name": inst}
        if not isinstance(inst, dict) or "name" not in inst:
            raise ConfigError("field 'instance' must be a name or an object with 'name'")
        name = inst["name"]
        if name == "desk":
            return desk_instance(
                _number(inst, "w_flip", 0.2, lo=0.0), _number(inst, "channel_flip", 0.1, lo=0.0)
            )
        if name == "random":
            seed = _number(inst, "seed", 0, lo=0, integer=True)
            return random_instance(np.random.default_rng(seed), inst.get("sizes"), _number(inst, "concentration", 1.0))
        raise ConfigError(f"field 'instance.name': unknown instance {name!r}")

    facs = raw.get("factors")
    if not isinstance(facs, dict):
        raise ConfigError("field 'factors' is required (object with keys " + ", ".join(FACTOR_KEYS) + ")")
    missing = [k for k in FACTOR_KEYS if k not in facs]
    if missing:
        raise ConfigError(f"field 'factors' lacks {missing}")
    sizes = dict(raw.get("alphabets", {}))
    arrays = {}
    for key, axes in FACTOR_KEYS.items():
        try:
            arr = np.asarray(facs[key], dtype=float)
        except (TypeError, ValueError):
            raise ConfigError(f"factor '{key}' must be a rectangular numeric array") from None
        if arr.ndim != len(axes):
            raise ConfigError(f"factor '{key}' must have {len(axes)} dimensions indexed by {axes}, got {arr.ndim}")
        for ax, s in zip(axes, arr.shape):
            want = sizes.setdefault(ax, s)
            if want != s:
                raise ConfigError(f"factor '{key}' axis {ax} has size {s}, alphabet {ax} has size {want}")
        arrays[key] = _check_rows(key, arr)
    return from_arrays(*(arrays[k] for k in FACTOR_KEYS))


def _float_list(raw: dict, key: str, default: list[float]) -> list[float]:
    val = raw.get(key, default)
    if not isinstance(val, list) or not val:
        raise ConfigError(f"field '{key}' must be a nonempty list")
    for v in val:
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ConfigError(f"field '{key}' entries must be numbers, got {v!r}")
    return [float(v) for v in val]


def parse_config(raw: Any) -> ExperimentConfig:
    if not isinstance(raw, dict):
        raise ConfigError("configuration must be a JSON object")
    factors = _factors(raw)
    n = _number(raw, "n", 1, lo=1, integer=True)
    R0 = _number(raw, "R0", 0.0, lo=0.0)
    R = _number(raw, "R", 0.0, lo=0.0)
    g = raw.get("gamma", "default")
    if g == "default":
        gammas = None
    elif isinstance(g, list) and len(g) == 3 and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in g):
        if min(g) <= 0:
            raise ConfigError("field 'gamma': every gamma must be positive")
        gammas = GammaChoice(*map(float, g))
    else:
        raise ConfigError("field 'gamma' must be \"default\" or a list of three positive numbers")
    eps1 = _number(raw, "eps1", 0.0, lo=0.0)
    if "eps4" in raw and "eps5" in raw:
        raise ConfigError("give eps4 or eps5, not both")
    eps4 = _number(raw, "eps4") if "eps4" in raw else None
    eps5 = _number(raw, "eps5", lo=0.0) if "eps5" in raw else None
    if eps4 is not None and not 0 < eps4 < 1:
        raise ConfigError(f"field 'eps4' must lie in (0, 1), got {eps4}")
    seeds = raw.get("seeds", {})
    if not isinstance(seeds, dict):
        raise ConfigError("field 'seeds' must be an object with 'count' and 'base'")
    seed_count = _number(seeds, "count", 1, lo=0, integer=True)
    base_seed = _number(seeds, "base", 0, lo=0, integer=True)
    mode = raw.get("mode")
    if mode is not None and mode not in MODES:
        raise ConfigError(f"field 'mode' must be one of {MODES}, got {mode!r}")
    region = raw.get("region", {})
    if not isinstance(region, dict):
        raise ConfigError("field 'region' must be an object")
    mc = raw.get("montecarlo", {})
    if not isinstance(mc, dict):
        raise ConfigError("field 'montecarlo' must be an object")
    strategy = raw.get("select_f", "exhaustive")
    if strategy not in ("exhaustive", "greedy", "sampled"):
        raise ConfigError(f"field 'select_f' must be exhaustive, greedy or sampled, got {strategy!r}")
    reference = raw.get("reference", "target")
    if reference not in ("target", "rb"):
        raise ConfigError(f"field 'reference' must be target or rb, got {reference!r}")
    out = raw.get("output")
    if out is not None and not isinstance(out, str):
        raise ConfigError("field 'output' must be a path string")
    return ExperimentConfig(
        factors=factors,
        n=n,
        R0=R0,
        R=R,
        gammas=gammas,
        eps1=eps1,
        eps4=eps4,
        eps5=eps5,
        seed_count=seed_count,
        base_seed=base_seed,
        mode=mode,
        output=out,
        region_n=_float_list(region, "n", [float(n)]),
        region_eps1=_float_list(region, "eps1", [eps1]),
        region_eps4=_float_list(region, "eps4", [eps4 if eps4 is not None else 0.05]),
        episodes=_number(mc, "episodes", 1000, lo=1, integer=True),
        log_episodes=_number(mc, "log_episodes", 5, lo=0, integer=True),
        select_f=strategy,
        reference=reference,
        raw=raw,
    )


def load_config(path: str | Path, seeds: int | None = None, base_seed: int | None = None) -> ExperimentConfig:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ConfigError(f"cannot read {path}: {e.strerror}") from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: line {e.lineno}, column {e.colno}: {e.msg}") from None
    if isinstance(raw, dict) and (seeds is not None or base_seed is not None):
        s = dict(raw.get("seeds", {}))
        if seeds is not None:
            s["count"] = seeds
        if base_seed is not None:
            s["base"] = base_seed
        raw["seeds"] = s
    return parse_config(raw)


# ---------------------------------------------------------------------------
# per-seed work
# ---------------------------------------------------------------------------

def _scheme(cfg: ExperimentConfig, seed: int) -> FixedLengthScheme:
    binning = draw_binning(cfg.factors.sizes["W"], cfg.R0, cfg.R, seed)
    return FixedLengthScheme(build_one_shot(cfg.factors, binning), cfg.n)


@dataclass(frozen=True)
class Ledger:
    app: BoundTerm
    dec: BoundTerm
    app2: BoundTerm
    realized_R0: float
    realized_R: float

    @property
    def first(self) -> float:
        return self.app.value + 5.0 * self.dec.value

    @property
    def total(self) -> float:
        return eps_tot(self.app2.value, self.app.value, self.dec.value)


def _ledger(cfg: ExperimentConfig) -> Ledger:
    """Bounds at the realised rates log2 |K|, log2 |M| of the bin counts."""
    from .binning import bin_count

    r0 = math.log2(bin_count(cfg.R0))
    r = math.log2(bin_count(cfg.R))
    g = cfg.gamma_choice()
    target = cfg.factors.joint()
    return Ledger(
        eps_app(target, r + r0, cfg.n, g.gamma1),
        eps_dec(target, r + r0, cfg.n, g.gamma2),
        eps_app2(target, r, cfg.n, g.gamma3),
        r0,
        r,
    )


EXACT_METRICS = (
    ("l1_rc_target", None),
    ("l1_first_without_v", "bound_first"),
    ("l1_first_full", "bound_first"),
    ("l1_min_f", "eps_tot"),
)


def _exact_seed(args) -> dict:
    cfg, seed, led = args
    scheme = _scheme(cfg, seed)
    fb = first_bound_distances(scheme)
    choice = select_f(scheme, cfg.select_f, cfg.reference, rng=np.random.default_rng([seed, 2]))
    return {
        "seed": seed,
        "n": cfg.n,
        "realized_R0": led.realized_R0,
        "realized_R": led.realized_R,
        "l1_rc_target": l1_to_target(scheme, exact_induced(scheme)),
        "l1_first_without_v": fb["without_v"],
        "l1_first_full": fb["full"],
        "l1_min_f": choice.value,
        "f": " ".join(map(str, choice.f)),
        "f_exact": choice.exact,
        "bound_first": led.first,
        "eps_tot": led.total,
        "binning": scheme.one_shot.binning.to_record(),
    }


MC_METRICS = (
    ("l1_estimate", "eps_tot"),
    ("decode_error_rate", None),
)


def _mc_seed(args) -> dict:
    cfg, seed, led = args
    scheme = _scheme(cfg, seed)
    rng = np.random.default_rng([seed, 1])
    choice = select_f(scheme, "greedy", cfg.reference)
    est = empirical_l1(scheme, choice.f, cfg.episodes, rng)
    # a separate stream for the logged episodes keeps the estimate independent of log_episodes
    logged = simulate_episodes(scheme, cfg.log_episodes, np.random.default_rng([seed, 3]), choice.f) if cfg.log_episodes else None
    errs = simulate_episodes(scheme, cfg.episodes, np.random.default_rng([seed, 4]), choice.f)
    return {
        "seed": seed,
        "n": cfg.n,
        "realized_R0": led.realized_R0,
        "realized_R": led.realized_R,
        "episodes": cfg.episodes,
        "l1_estimate": est.estimate,
        "l1_stderr": est.stderr,
        "decode_error_rate": float(np.mean(errs["W_hat"] != errs["W"])),
        "f": " ".join(map(str, choice.f)),
        "eps_tot": led.total,
        "logged": logged,
        "binning": scheme.one_shot.binning.to_record(),
    }


def _map(fn: Callable, items: Sequence, jobs: int) -> list:
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items))


# ---------------------------------------------------------------------------
# compare
# ---------------------------------------------------------------------------

@dataclass
class Verdict:
    metric: str
    bound_name: str
    mean: float
    stderr: float
    bound: float
    passed: bool
    vacuous: bool


def compare(rows: Sequence[dict], metric: str, bound_key: str) -> Verdict:
    """Seed-averaged ``metric`` against ``bound_key`` with a 3-stderr margin."""
    if not rows:
        raise ValueError("compare needs at least one seed")
    ns = {r["n"] for r in rows}
    bounds = {r[bound_key] for r in rows}
    if len(ns) != 1 or len(bounds) != 1:
        raise ValueError("rows come from mismatched runs (n or bounds differ)")
    vals = np.array([r[metric] for r in rows], dtype=float)
    se = float(vals.std(ddof=1) / math.sqrt(vals.size)) if vals.size > 1 else 0.0
    b = bounds.pop()
    mean = float(vals.mean())
    return Verdict(metric, bound_key, mean, se, b, mean <= b + 3 * se, b >= 2.0)


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def _csv(columns: Sequence[str], rows: Sequence[Sequence], comment: str) -> str:
    buf = io.StringIO()
    buf.write(f"# {comment}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([v if isinstance(v, str) else fmt(v) for v in r])
    return buf.getvalue()


class Run:
    def __init__(self, cfg: ExperimentConfig, mode: str, out: Path):
        self.cfg, self.mode, self.out = cfg, mode, out
        self.hash = cfg.hash()
        self.files: dict[str, str] = {}
        self.extra: list[str] = []

    @property
    def comment(self) -> str:
        return f"config_sha256={self.hash} mode={self.mode}"

    def write(self, name: str, text: str) -> None:
        self.files[name] = text

    def seeds(self) -> list[int]:
        return [self.cfg.base_seed + i for i in range(self.cfg.seed_count)]

    def flush(self) -> None:
        self.out.mkdir(parents=True, exist_ok=True)
        for name, text in self.files.items():
            (self.out / name).write_text(text)
        lines = [
            f"tool strongcoord {__version__}",
            f"mode {self.mode}",
            f"config_sha256 {self.hash}",
            f"n {self.cfg.n}",
            f"R0 {fmt(self.cfg.R0)}",
            f"R {fmt(self.cfg.R)}",
        ]
        lines += self.extra
        for name in sorted(self.files):
            lines.append(f"file {name} sha256 {hashlib.sha256(self.files[name].encode()).hexdigest()}")
        (self.out / "manifest.txt").write_text("\n".join(lines) + "\n")


def _verdict_lines(vs: Sequence[Verdict]) -> list[str]:
    return [
        f"verdict {v.metric} mean={fmt(v.mean)} stderr={fmt(v.stderr)} {v.bound_name}={fmt(v.bound)} "
        f"{'pass' if v.passed else 'fail'}{' vacuous' if v.vacuous else ''}"
        for v in vs
    ]


COMPARE_COLUMNS = (
    "seed", "n", "realized_R0", "realized_R", "f", "metric", "value", "bound_name", "bound", "stderr", "passed",
)


def _compare_csv(run: Run, rows: list[dict], metrics: Sequence[tuple[str, str | None]],
                 verdicts: Sequence[Verdict]) -> str:
    """One row per (seed, metric), then one "mean" row per verdict."""
    body = []
    for r in rows:
        for metric, bound in metrics:
            b = r[bound] if bound else float("nan")
            passed = (r[metric] <= b) if bound else ""
            body.append([r["seed"], r["n"], r["realized_R0"], r["realized_R"], r["f"], metric, r[metric],
                         bound or "", b, "", passed])
    r0 = rows[0]
    for v in verdicts:
        body.append(["mean", r0["n"], r0["realized_R0"], r0["realized_R"], "", v.metric, v.mean, v.bound_name,
                     v.bound, v.stderr, v.passed])
    return _csv(COMPARE_COLUMNS, body, run.comment)


def _binning_lines(rows: Sequence[dict]) -> list[str]:
    out = []
    for r in rows:
        b = r["binning"]
        out.append(
            f"seed {r['seed']} K={b['count1']} M={b['count2']} phi1={','.join(map(str, b['phi1']))} "
            f"phi2={','.join(map(str, b['phi2']))}"
        )
    return out


def run_exact(run: Run, jobs: int) -> int:
    cfg = run.cfg
    if not run.seeds():
        raise ConfigError("seed set is empty; exact mode needs at least one seed")
    led = _ledger(cfg)
    rows = _map(_exact_seed, [(cfg, s, led) for s in run.seeds()], jobs)
    verdicts = [compare(rows, "l1_first_full", "bound_first"), compare(rows, "l1_min_f", "eps_tot")]
    run.write("compare.csv", _compare_csv(run, rows, EXACT_METRICS, verdicts))
    run.extra += [f"realized_R0 {fmt(led.realized_R0)}", f"realized_R {fmt(led.realized_R)}"]
    run.extra += _binning_lines(rows) + _verdict_lines(verdicts)
    run.flush()
    print("\n".join(_verdict_lines(verdicts)))
    return EXIT_OK if all(v.passed for v in verdicts) else EXIT_COMPARE


def run_montecarlo(run: Run, jobs: int) -> int:
    cfg = run.cfg
    if not run.seeds():
        raise ConfigError("seed set is empty; montecarlo mode needs at least one seed")
    led = _ledger(cfg)
    rows = _map(_mc_seed, [(cfg, s, led) for s in run.seeds()], jobs)
    verdicts = [compare(rows, "l1_estimate", "eps_tot")]
    run.write("compare.csv", _compare_csv(run, rows, MC_METRICS, verdicts))
    ep_rows = []
    for r in rows:
        logged = r["logged"]
        if logged is None:
            continue
        for e in range(logged["U"].shape[0]):
            for i in range(cfg.n):
                ep_rows.append([r["seed"], e, i] + [int(logged[a.upper() if a != "w_hat" else "W_hat"][e, i]) for a in EPISODE_FIELDS])
    run.write("episodes.csv", _csv(("seed", "episode", "i") + EPISODE_FIELDS, ep_rows, run.comment))
    run.extra += [f"realized_R0 {fmt(led.realized_R0)}", f"realized_R {fmt(led.realized_R)}"]
    run.extra += _binning_lines(rows) + _verdict_lines(verdicts)
    run.flush()
    print("\n".join(_verdict_lines(verdicts)))
    return EXIT_OK if all(v.passed for v in verdicts) else EXIT_COMPARE


BOUNDS_COLUMNS = (
    "n", "R", "R0", "gamma1", "gamma2", "gamma3", "eps1", "eps2", "eps3", "eps4", "eps5",
    "tail_app", "tail_dec", "tail_app2", "slack_app", "slack_dec", "slack_app2",
    "eps_app", "eps_dec", "eps_app2", "eps_tot", "eps_tot_theoretical",
)


def run_bounds(run: Run, jobs: int) -> int:
    cfg = run.cfg
    target = cfg.factors.joint()
    g = cfg.gamma_choice()
    a = eps_app(target, cfg.R + cfg.R0, cfg.n, g.gamma1)
    d = eps_dec(target, cfg.R + cfg.R0, cfg.n, g.gamma2)
    a2 = eps_app2(target, cfg.R, cfg.n, g.gamma3)
    e2, e3 = typicality_constants(target, cfg.eps1)
    disp = dispersion(target)
    be = 0.0 if disp.degenerate else disp.B / math.sqrt(cfg.n)
    e4, e5 = cfg.eps4, cfg.eps5
    if e4 is None and e5 is not None:
        e4 = e5 + be
    elif e4 is not None:
        e5 = e4 - be
    nan = float("nan")
    theo = eps_tot_theoretical(e5, cfg.n) if e5 is not None and e5 >= 0 else nan
    row = [
        cfg.n, cfg.R, cfg.R0, g.gamma1, g.gamma2, g.gamma3, cfg.eps1, e2, e3,
        nan if e4 is None else e4, nan if e5 is None else e5,
        a.tail, d.tail, a2.tail, a.slack, d.slack, a2.slack,
        a.value, d.value, a2.value, eps_tot(a2.value, a.value, d.value), theo,
    ]
    run.write("bounds.csv", _csv(BOUNDS_COLUMNS, [row], run.comment))
    run.flush()
    return EXIT_OK


def run_region(run: Run, jobs: int) -> int:
    cfg = run.cfg
    target = cfg.factors.joint()
    reports = region_sweep(
        target, cfg.region_n, cfg.region_eps1, cfg.region_eps4, R0=cfg.R0 if "R0" in cfg.raw else None, R=cfg.R,
        with_ledger=all(float(n).is_integer() and n >= 2 for n in cfg.region_n),
    )
    run.write("region.csv", region_csv(reports, run.comment))
    mono = sweep_monotonicity(reports)
    run.extra += [f"check {k} {'pass' if v else 'fail'}" for k, v in sorted(mono.items())]
    run.flush()
    return EXIT_OK


def run_validate(run: Run, jobs: int) -> int:
    v = validate_decomposition(run.cfg.factors)
    line = f"decomposition {'valid' if v.valid else 'invalid'} residual={fmt(v.residual)} tol={fmt(v.tol)}"
    run.extra.append(line)
    run.flush()
    print(line)
    return EXIT_OK if v.valid else EXIT_COMPARE


RUNNERS = {
    "exact": run_exact,
    "montecarlo": run_montecarlo,
    "bounds": run_bounds,
    "region": run_region,
    "validate": run_validate,
}


def run(mode: str, config: str | Path, out: str | Path | None = None, seeds: int | None = None,
        base_seed: int | None = None, jobs: int = 1) -> int:
    """Execute one mode; returns the process exit status."""
    try:
        cfg = load_config(config, seeds, base_seed)
        if cfg.mode is not None and cfg.mode != mode:
            raise ConfigError(f"field 'mode' is {cfg.mode!r} but the command line asks for {mode!r}")
        out_dir = Path(out or cfg.output or "runs/default")
        return RUNNERS[mode](Run(cfg, mode, out_dir), jobs)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except ResourceCapError as e:
        print(f"resource cap: {e}", file=sys.stderr)
        return EXIT_CAP


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="coordctl", description=__doc__)
    p.add_argument("mode", choices=MODES)
    p.add_argument("--config", required=True, help="JSON experiment configuration")
    p.add_argument("--out", help="output directory (overrides the config's 'output')")
    p.add_argument("--seeds", type=int, help="number of binning seeds")
    p.add_argument("--base-seed", type=int, help="first binning seed")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for seed sweeps")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return run(args.mode, args.config, args.out, args.seeds, args.base_seed, args.jobs)


if __name__ == "__main__":
    sys.exit(main())
