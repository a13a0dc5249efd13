"""Experiment drivers and deterministic result emission.

The density statements are replayed as finite-size measurements: Birkhoff
averages along sparse horocycle orbits against closed-orbit and invariant
references, cell coverage of a compact window, almost-prime orbit sums
through the linear sieve, and the effective-average probe with an
empirically fitted decay exponent.  No finite run proves density; every
report carries both proxies (deficits and coverage) and says which
schedule stages were clamped or skipped.

Everything is deterministic: reduction and summation schedules are fixed,
reals arrive as decimal strings (or the named literals "sqrt2", "golden",
"construct100"), outputs carry no timestamps, and identical configs give
byte-identical CSV/JSON.
"""

from __future__ import annotations

import csv
import json
import math
import os
import subprocess
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import __version__, kernels
from .diophantine import (
    GOLDEN,
    SQRT2,
    ContinuedFraction,
    _ln,
    cf_expand_available,
    construct_non_dioph_100,
    convergent_pairs,
    convergents,
    dioph_type_estimate,
    is_badly_approximable,
    lattice_dioph_type,
)
from .errors import (
    EnumerationOverflow,
    NoApproximantFound,
    PrecisionExhausted,
    ScheduleInfeasible,
)
from .expsum import power_sum
from .group import (
    IDENTITY,
    a_t,
    compose,
    effective_radius,
    injectivity_eta,
    lattice_point,
    lower_unipotent,
)
from .orbits import (
    approx_periodic_sequence,
    certify_minimal_period,
    error_budget_l45,
    error_budget_p23,
    haar_value,
    make_periodic_point,
    period_integral_family,
    schedule_l45,
    schedule_p23,
)
from .sequences import rough_numbers
from .sieve import SieveProblem, jr_bounds, legendre_S
from .testfns import SurfaceTestFn, gaussian_bump, height_indicator, one

_CHUNK = 2 ** 20
DEFAULT_MAX_N = 10 ** 7
COVERAGE_GRID = 32
WINDOW = (-0.5, 0.5, 1.0, 3.0)  # |x| <= 1/2, 1 <= y <= 3

EXPERIMENTS = (
    "th11", "th12", "th13", "effective_probe",
    "expsum_grid", "sieve_grid", "dioph", "period",
)

COLUMNS = ("k", "n", "fn", "value", "reference", "deficit", "budget", "coverage")


def experiment_family() -> tuple:
    """Default test functions: f == 1, two height indicators, four bumps."""
    return (
        one(),
        height_indicator(2.0),
        height_indicator(4.0),
        gaussian_bump(0.0, 1.2, 0.3),
        gaussian_bump(0.25, 1.8, 0.4),
        gaussian_bump(-0.25, 1.4, 0.25),
        gaussian_bump(0.1, 2.5, 0.5),
    )


def zero_fn() -> SurfaceTestFn:
    """f == 0: degenerate weight whose sums all vanish (vacuous verdicts)."""
    return SurfaceTestFn(
        name="zero",
        fn=lambda x, y: np.zeros_like(y),
        haar_closed_form=0.0,
    )


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

_REAL_KEYS = ("x", "alpha", "s", "kappa", "gamma", "c", "eps", "z_exponent")
_INT_KEYS = ("L", "n", "max_n", "threads", "seed", "depth", "digit_bound", "p", "q")
_LIST_KEYS = ("n_schedule", "k_values")
_STR_KEYS = ("experiment", "test_functions", "out")
_KNOWN_KEYS = set(_REAL_KEYS) | set(_INT_KEYS) | set(_LIST_KEYS) | set(_STR_KEYS)


def parse_real(spec):
    """Reals come as decimal strings (platform-stable) or named literals."""
    if isinstance(spec, str):
        name = spec.strip()
        if name == "sqrt2":
            return SQRT2
        if name == "golden":
            return GOLDEN
        if name == "construct100":
            return construct_non_dioph_100()[0]
        return Fraction(name)
    if isinstance(spec, int) and not isinstance(spec, bool):
        return spec
    raise ValueError(f"reals must be decimal strings or named literals, got {spec!r}")


def _as_float(value) -> float:
    """Binary64 view of any number-like the config can produce."""
    if isinstance(value, ContinuedFraction):
        p, q = convergent_pairs(value)[-1]
        return p / q  # big-int true division rounds correctly
    return float(value)


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    x: object = None
    alpha: object = None
    bruhat_s: object = 0
    kappa: float = 0.99
    gamma: float = 0.05
    c: float = 1.0
    eps: float = 1e-5
    z_exponent: float = 0.125
    big_l: int | None = None
    n: int | None = None
    n_schedule: tuple = ()
    k_values: tuple = ()
    max_n: int = DEFAULT_MAX_N
    threads: int = 1
    seed: int = 0
    depth: int = 30
    digit_bound: int = 100
    p: int | None = None
    q: int | None = None
    test_functions: str = "default"
    out: str | None = None
    echo: dict = field(default_factory=dict)

    def family(self) -> tuple:
        if self.test_functions == "default":
            return experiment_family()
        if self.test_functions == "with_zero":
            return experiment_family() + (zero_fn(),)
        raise ValueError(f"unknown test-function set {self.test_functions!r}")


def parse_config(raw: dict) -> ExperimentConfig:
    unknown = set(raw) - _KNOWN_KEYS
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    name = raw.get("experiment")
    if name not in EXPERIMENTS:
        raise ValueError(f"experiment must be one of {EXPERIMENTS}, got {name!r}")

    kwargs = {"experiment": name, "echo": dict(raw)}
    if "x" in raw:
        kwargs["x"] = parse_real(raw["x"])
    if "alpha" in raw:
        kwargs["alpha"] = parse_real(raw["alpha"])
    if "s" in raw:
        kwargs["bruhat_s"] = parse_real(raw["s"])
    for key in ("kappa", "gamma", "c", "eps", "z_exponent"):
        if key in raw:
            kwargs[key] = float(parse_real(raw[key]))
    for key, attr in (("L", "big_l"), ("n", "n"), ("max_n", "max_n"),
                      ("threads", "threads"), ("seed", "seed"),
                      ("depth", "depth"), ("digit_bound", "digit_bound"),
                      ("p", "p"), ("q", "q")):
        if key in raw:
            v = raw[key]
            if not isinstance(v, int) or isinstance(v, bool):
                raise ValueError(f"{key} must be an integer, got {v!r}")
            kwargs[attr] = v
    for key in _LIST_KEYS:
        if key in raw:
            vs = raw[key]
            if not all(isinstance(v, int) and not isinstance(v, bool) for v in vs):
                raise ValueError(f"{key} must be a list of integers")
            if key == "n_schedule" and any(a >= b for a, b in zip(vs, vs[1:])):
                raise ValueError("n_schedule must be strictly increasing")
            kwargs[key] = tuple(vs)
    for key, attr in (("test_functions", "test_functions"), ("out", "out")):
        if key in raw:
            kwargs[attr] = raw[key]
    return ExperimentConfig(**kwargs)


def load_config(path: str, overrides: dict | None = None) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as f:
        raw = json.load(f)
    if overrides:
        raw = dict(raw)
        raw.update({k: v for k, v in overrides.items() if v is not None})
    return parse_config(raw)


# ---------------------------------------------------------------------------
# orbit plumbing
# ---------------------------------------------------------------------------

def _sweep(x_float, time_fn, count, fns, threads=1, grid=0, start=1):
    """Chunked reduced-orbit sweep: per-fn Birkhoff means plus coverage.

    Indices start..start+count-1 map through time_fn to horocycle times;
    images go through the backend-pinned reduction, every test function
    accumulates blocked tree sums per chunk (Neumaier across chunks), and
    an optional boolean grid over WINDOW records visited cells.
    """
    parts = [[] for _ in fns]
    visited = np.zeros(grid * grid, dtype=bool) if grid else None
    x0, x1, y0, y1 = WINDOW
    for b0 in range(start, start + count, _CHUNK):
        idx = np.arange(b0, min(b0 + _CHUNK, start + count), dtype=np.float64)
        t = time_fn(idx)
        zx, zy = kernels.horo_images(x_float, 1.0, t)
        rx, ry = kernels.reduce_points(zx, zy)
        for j, f in enumerate(fns):
            parts[j].append(kernels.tree_sum(f(rx, ry), threads=threads))
        if grid:
            ix = np.floor((rx - x0) / (x1 - x0) * grid).astype(np.int64)
            iy = np.floor((ry - y0) / (y1 - y0) * grid).astype(np.int64)
            inside = (ix >= 0) & (ix < grid) & (iy >= 0) & (iy < grid)
            visited[ix[inside] * grid + iy[inside]] = True
    values = [kernels._neumaier(p) / count for p in parts]
    coverage = float(visited.mean()) if grid else None
    return values, coverage


def _point_images(point, t: np.ndarray):
    """Upper-half-plane images of point . u0(t) for a general coset rep."""
    a, b, c, d = (float(v) for v in point.reduced.entries())
    nr, ni = a * t + b, a
    dr, di = c * t + d, c
    d2 = dr * dr + di * di
    return (nr * dr + ni * di) / d2, (ni * dr - nr * di) / d2


def birkhoff_average(f, point, times, threads: int = 1) -> float:
    """(1/N) sum of f over the reduced time-translates of a lattice point."""
    t = np.asarray(times, dtype=np.float64)
    zx, zy = _point_images(point, t)
    rx, ry = kernels.reduce_points(zx, zy)
    return kernels.tree_sum(f(rx, ry), threads=threads) / t.size


def density_probe(point, times, grid: int = COVERAGE_GRID, window=WINDOW) -> float:
    """Fraction of grid cells over `window` visited by the reduced orbit."""
    if grid < 4:
        raise ValueError("partition needs at least 4 cells per axis")
    t = np.asarray(times, dtype=np.float64)
    zx, zy = _point_images(point, t)
    rx, ry = kernels.reduce_points(zx, zy)
    x0, x1, y0, y1 = window
    ix = np.floor((rx - x0) / (x1 - x0) * grid).astype(np.int64)
    iy = np.floor((ry - y0) / (y1 - y0) * grid).astype(np.int64)
    inside = (ix >= 0) & (ix < grid) & (iy >= 0) & (iy < grid)
    visited = np.zeros(grid * grid, dtype=bool)
    visited[ix[inside] * grid + iy[inside]] = True
    return float(visited.mean())


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

@dataclass
class DensityReport:
    experiment: str
    rows: list
    birkhoff: dict
    coverage: float | None
    budgets: list
    verdict: dict
    config: dict

    def __post_init__(self):
        if self.coverage is not None and not 0.0 <= self.coverage <= 1.0:
            raise ValueError(f"coverage {self.coverage} outside [0,1]")
        for row in self.rows:
            d = row.get("deficit")
            if isinstance(d, float) and not math.isfinite(d):
                raise ValueError(f"non-finite deficit in row {row}")


def _row(k, n, fn, value, reference, deficit, budget, coverage):
    return {
        "k": k, "n": n, "fn": fn, "value": value, "reference": reference,
        "deficit": deficit, "budget": budget, "coverage": coverage,
    }


def _ratio_check(per_stage_ratios: list):
    """Fitted constant = median ratio over the first half of the schedule;
    the check is that no ratio anywhere exceeds 5x that constant.  With
    nothing to fit the verdict is vacuous (None), not a pass."""
    flat = [r for stage in per_stage_ratios for r in stage]
    if not flat:
        return None, None
    half = per_stage_ratios[: (len(per_stage_ratios) + 1) // 2]
    fitted = float(np.median([r for stage in half for r in stage]))
    if fitted == 0.0:
        return all(r == 0.0 for r in flat), 0.0
    return all(r <= 5.0 * fitted for r in flat), fitted


def version_string() -> str:
    here = os.path.dirname(os.path.abspath(__file__))
    try:
        out = subprocess.run(
            ["git", "describe", "--always", "--dirty"],
            cwd=here, capture_output=True, text=True, timeout=10,
        )
        if out.returncode == 0 and out.stdout.strip():
            return f"horolab {__version__} ({out.stdout.strip()})"
    except OSError:
        pass
    return f"horolab {__version__}"


def _json_safe(obj):
    if isinstance(obj, dict):
        return {str(k): _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return obj


def emit(report: DensityReport, out_dir: str):
    """Write <experiment>.csv and <experiment>.json; byte-stable output."""
    os.makedirs(out_dir, exist_ok=True)
    csv_path = os.path.join(out_dir, f"{report.experiment}.csv")
    json_path = os.path.join(out_dir, f"{report.experiment}.json")

    def cell(v):
        if v is None:
            return ""
        if isinstance(v, float):
            return repr(v)
        return str(v)

    with open(csv_path, "w", encoding="utf-8", newline="") as f:
        w = csv.writer(f, lineterminator="\r\n")
        w.writerow(COLUMNS)
        for row in report.rows:
            w.writerow([cell(row[c]) for c in COLUMNS])

    summary = {
        "experiment": report.experiment,
        "config": report.config,
        "version": version_string(),
        "seed": report.config.get("seed", 0),
        "birkhoff": {
            name: {"value": v, "reference": ref, "deficit": d}
            for name, (v, ref, d) in report.birkhoff.items()
        },
        "coverage": report.coverage,
        "budgets": report.budgets,
        "verdict": report.verdict,
    }
    text = json.dumps(_json_safe(summary), sort_keys=True, indent=2,
                      allow_nan=False) + "\n"
    with open(json_path, "w", encoding="utf-8") as f:
        f.write(text)
    return csv_path, json_path


# ---------------------------------------------------------------------------
# theorem replays
# ---------------------------------------------------------------------------

def _feasible_stages(chain, max_n):
    """Stages whose closed-orbit reference is computable: period <= max_n.

    Skipped denominators are reported in log10 (they can run to hundreds
    of digits for the fast-growing constructions)."""
    feasible = [st for st in chain if st.point.period <= max_n]
    skipped = [round(math.log10(st.point.q), 3) for st in chain
               if st.point.period > max_n]
    return feasible, skipped


def run_th11(config: ExperimentConfig) -> DensityReport:
    """Sparse-time density replay at times c * n^(1+gamma).

    Classifies the starting point, and for approximable points walks the
    periodic tracking sequence: at each feasible stage the Birkhoff
    average is compared with the closed-orbit integral of the tracking
    periodic point, with the divergence/equidistribution budget alongside.
    """
    if not 0.0 < config.gamma < 0.1:
        raise ValueError("th11 needs 0 < gamma < 0.1")
    if config.c <= 0:
        raise ValueError("time scale c must be positive")
    if config.x is None:
        raise ValueError("th11 needs a starting point x")
    xf = _as_float(config.x)
    gamma, c = config.gamma, config.c
    fns = config.family()
    haars = [haar_value(f) for f in fns]
    profile = lattice_dioph_type(lattice_point(lower_unipotent(xf)),
                                 t_max=8.0, steps=17)
    try:
        chain = approx_periodic_sequence(config.x, config.kappa)
    except NoApproximantFound:
        chain = ()
    case = "approximation" if chain else "diophantine"
    feasible, skipped = _feasible_stages(chain, config.max_n)

    def time_fn(m):
        return c * m ** (1.0 + gamma)

    rows, budgets, per_stage_ratios, clamp = [], [], [], []
    values = coverage = None
    for k, st in enumerate(feasible):
        n_sched = schedule_p23(st.point.period)
        n_run = int(min(n_sched, config.max_n))
        clamp.append(n_run < n_sched)
        refs = period_integral_family(fns, st.point, threads=config.threads)
        last = k == len(feasible) - 1
        values, cov = _sweep(xf, time_fn, n_run, fns, config.threads,
                             grid=COVERAGE_GRID if last else 0)
        if last:
            coverage = cov
        budget = error_budget_p23(n_run, gamma, st.gap_exact, st.point.period)
        budgets.append({
            "q": st.point.q, "n_symbolic": n_sched, "n_run": n_run,
            "clamped": clamp[-1], "total": budget.total,
            "total_log10": budget.total_log10,
        })
        stage_ratios = []
        for f, v, ref in zip(fns, values, refs):
            d = abs(v - ref)
            rows.append(_row(k, n_run, f.name, v, ref, d, budget.total,
                             cov if last else None))
            if math.isfinite(budget.total) and budget.total > 0:
                stage_ratios.append(d / budget.total)
        # the consistency fit presumes the budget at the symbolic
        # schedule; clamped stages are reported but not fitted
        if not clamp[-1]:
            per_stage_ratios.append(stage_ratios)

    if not feasible:
        n_run = int(min(config.n or 10 ** 5, config.max_n))
        values, coverage = _sweep(xf, time_fn, n_run, fns, config.threads,
                                  grid=COVERAGE_GRID)
        for f, v, h in zip(fns, values, haars):
            rows.append(_row(0, n_run, f.name, v, h, abs(v - h), None, coverage))

    ratio_ok, fitted = _ratio_check(per_stage_ratios)
    birkhoff = {f.name: (v, h, abs(v - h))
                for f, v, h in zip(fns, values, haars)}
    verdict = {
        "case": case,
        "kappa_hat": profile.kappa_hat,
        "schedule_clamped": any(clamp),
        "skipped_q_log10": skipped,
        "fitted_constant": fitted,
        "ratio_ok": ratio_ok,
    }
    return DensityReport("th11", rows, birkhoff, coverage, budgets, verdict,
                         dict(config.echo))


def run_th13(config: ExperimentConfig) -> DensityReport:
    """Quadratic-time density replay at times alpha * c * n^2.

    The general starting data (upper-triangular shift s, geometric scale
    alpha, lower coordinate x) is normalized to the canonical lower-
    unipotent point with the time axis rescaled by alpha; the left factor
    is a fixed translate that cannot change equidistribution verdicts.
    """
    if config.alpha is None:
        raise ValueError("th13 needs the geometric scale alpha")
    if not is_badly_approximable(config.alpha, config.depth, config.digit_bound):
        raise ValueError("alpha failed the bounded-digit certificate")
    x = config.x if config.x is not None else construct_non_dioph_100()[0]
    xf = _as_float(x)
    af = _as_float(config.alpha)
    scale = af * config.c
    fns = config.family()
    haars = [haar_value(f) for f in fns]
    chain = approx_periodic_sequence(x, config.kappa)
    feasible, skipped = _feasible_stages(chain, config.max_n)
    if not feasible:
        raise ScheduleInfeasible(
            f"no tracking stage has period <= max_n={config.max_n}; "
            f"skipped q (log10): {skipped}"
        )

    def time_fn(m):
        return scale * m * m

    rows, budgets, per_stage_ratios, clamp = [], [], [], []
    values = coverage = None
    for k, st in enumerate(feasible):
        q = st.point.q
        n_sched = schedule_l45(q)
        n_run = int(min(n_sched, config.max_n))
        clamp.append(n_run < n_sched)
        refs = period_integral_family(fns, st.point, threads=config.threads)
        last = k == len(feasible) - 1
        values, cov = _sweep(xf, time_fn, n_run, fns, config.threads,
                             grid=COVERAGE_GRID if last else 0)
        if last:
            coverage = cov
        shape = 2.0 / q ** 4
        at_schedule = error_budget_l45(n_sched, st.gap_exact, q)
        at_run = error_budget_l45(n_run, st.gap_exact, q)
        budgets.append({
            "q": q, "n_symbolic": n_sched, "n_run": n_run,
            "clamped": clamp[-1], "shape": shape,
            "total_log10_at_schedule": at_schedule.total_log10,
            "total_at_run": at_run.total,
        })
        stage_ratios = []
        for f, v, ref in zip(fns, values, refs):
            d = abs(v - ref)
            rows.append(_row(k, n_run, f.name, v, ref, d, shape,
                             cov if last else None))
            stage_ratios.append(d / shape)
        per_stage_ratios.append(stage_ratios)

    ratio_ok, fitted = _ratio_check(per_stage_ratios)
    birkhoff = {f.name: (v, h, abs(v - h))
                for f, v, h in zip(fns, values, haars)}
    verdict = {
        "alpha_certified": True,
        "normalized_shift": _as_float(config.bruhat_s),
        "schedule_clamped": any(clamp),
        "skipped_q_log10": skipped,
        "fitted_constant": fitted,
        "ratio_ok": ratio_ok,
    }
    return DensityReport("th13", rows, birkhoff, coverage, budgets, verdict,
                         dict(config.echo))


def run_th12(config: ExperimentConfig) -> DensityReport:
    """Almost-prime orbit sums: sieve weights collected along the orbit.

    For each nonnegative test function the weights a(n) = f(orbit at time
    c n) feed the linear sieve; the report carries the exact sifted sum,
    the sandwich, the positivity verdict, and the uniform-weight sanity
    identity against the direct rough-number count.
    """
    x = config.x if config.x is not None else SQRT2
    xf = _as_float(x)
    n_run = int(min(config.n or 10 ** 5, config.max_n))
    z = n_run ** config.z_exponent
    big_l = config.big_l or int(1.0 / config.z_exponent) + 1
    d_level = z ** 4
    fns = config.family()

    # one sweep collecting every function's orbit weights
    weights = [{} for _ in fns]
    for b0 in range(1, n_run + 1, _CHUNK):
        idx = np.arange(b0, min(b0 + _CHUNK, n_run + 1), dtype=np.float64)
        zx, zy = kernels.horo_images(xf, 1.0, config.c * idx)
        rx, ry = kernels.reduce_points(zx, zy)
        for j, f in enumerate(fns):
            vals = f(rx, ry)
            nz = np.nonzero(vals)[0]
            w = weights[j]
            for i in nz:
                w[int(idx[i])] = float(vals[i])

    uniform = SieveProblem(weights=n_run, z=z, D=d_level, eps=config.eps)
    uniform_ok = legendre_S(uniform) == int(rough_numbers(z, n_run).size)

    try:
        chain = approx_periodic_sequence(x, config.kappa)
        q1 = chain[0].point.q
        perturbation_log10 = (math.log10(2.0) + 3.0 * math.log10(n_run)
                              - 2.0 / (1.0 - config.kappa) * math.log10(q1))
        case = "approximation"
    except NoApproximantFound:
        perturbation_log10 = None
        case = "diophantine"

    rows, positivity, inside = [], {}, {}
    birkhoff = {}
    sieve_s = None
    for f, w in zip(fns, weights):
        problem = SieveProblem(weights=w, z=z, D=d_level, eps=config.eps)
        rep = jr_bounds(problem)
        sieve_s = rep.s
        positivity[f.name] = rep.S > 0
        inside[f.name] = rep.inside
        rows.append(_row(0, n_run, f.name, rep.S, rep.lower, rep.S - rep.lower,
                         rep.upper, None))
        birkhoff[f.name] = (rep.S, rep.lower, rep.S - rep.lower)
    verdict = {
        "case": case,
        "almost_prime_order": big_l,
        "sieve_s": sieve_s,
        "z": z,
        "positivity": positivity,
        "all_positive": all(positivity.values()),
        "inside": inside,
        "uniform_matches_rough": uniform_ok,
        "perturbation_log10": perturbation_log10,
    }
    return DensityReport("th12", rows, birkhoff, None, [], verdict,
                         dict(config.echo))


def run_effective_probe(config: ExperimentConfig) -> DensityReport:
    """Discrete averages (K/T) sum f(point . u0(Kj)) with the probe radius.

    f is centered by its invariant mean, the radius r = T e^{-excursion}
    comes from the geodesic push at time log T, and the decay exponent is
    fitted from the (T, K) grid — recorded, never asserted.
    """
    point = (lattice_point(lower_unipotent(_as_float(config.x)))
             if config.x is not None else lattice_point(IDENTITY))
    xf = _as_float(config.x) if config.x is not None else 0.0
    t_grid = config.n_schedule or (1000, 3163, 10000, 31623, 100000)
    k_list = config.k_values or (1, 4, 16)
    fns = (height_indicator(2.0), gaussian_bump(0.0, 1.2, 0.3))
    haars = [haar_value(f) for f in fns]

    def probe_eta(flowed) -> float:
        try:
            return injectivity_eta(flowed)
        except EnumerationOverflow:
            # past the enumeration cap a reduced image sits high in the
            # cusp (y > 2), where translates with c != 0 cost at least
            # c*y and the unit translation at 1/y is the exact minimum
            return 1.0 / flowed.image().y

    rows, pending, ratios = [], [], {}
    last_vals = None
    for ti, big_t in enumerate(t_grid):
        if big_t < 2:
            raise ValueError("probe needs T > K >= 1")
        r = effective_radius(point, float(big_t))
        flowed = lattice_point(compose(point.reduced, a_t(-math.log(big_t))))
        eta = probe_eta(flowed)
        ratios[str(big_t)] = r / (float(big_t) * eta)
        for big_k in k_list:
            if big_k < 1:
                raise ValueError("probe needs T > K >= 1")
            if big_k >= big_t:
                continue
            count = -(-big_t // big_k)  # ceil: all j with 0 <= Kj < T
            vals, _ = _sweep(xf, lambda m: float(big_k) * m, count, fns,
                             config.threads, start=0)
            last_vals = vals
            for f, v, h in zip(fns, vals, haars):
                centered = v - h
                row = _row(ti, big_t, f"{f.name}|K={big_k}", centered,
                           0.0, abs(centered), None, None)
                rows.append(row)
                pending.append((row, r, big_k, abs(centered)))

    # fit |avg| ~ K^(1/2) ln^(3/2)(r+2) r^(-beta/2) in log space; the
    # exponent is an empirical readout, never an assertion, and it needs
    # genuine spread in r (the identity coset has r = 1 at every T)
    xs, ys = [], []
    for _, r, big_k, a in pending:
        if a > 1e-14 and r > 1.0:
            xs.append(math.log(r))
            ys.append(math.log(a / (math.sqrt(big_k) * math.log(r + 2.0) ** 1.5)))
    beta = None
    if len(xs) >= 2 and max(xs) - min(xs) > 0.5:
        beta = -2.0 * float(np.polyfit(xs, ys, 1)[0])
        for row, r, big_k, _ in pending:
            row["budget"] = (math.sqrt(big_k) * math.log(r + 2.0) ** 1.5
                             / r ** (beta / 2.0))
    ratio_ok = all(0.1 <= v <= 10.0 for v in ratios.values())
    verdict = {
        "fitted_beta": beta,
        "radius_eta_ratio_ok": ratio_ok,
        "radius_eta_ratios": ratios,
    }
    birkhoff = {}
    if last_vals is not None:
        birkhoff = {f.name: (v, h, abs(v - h))
                    for f, v, h in zip(fns, last_vals, haars)}
    return DensityReport("effective_probe", rows, birkhoff, None, [], verdict,
                         dict(config.echo))


# ---------------------------------------------------------------------------
# grid utilities
# ---------------------------------------------------------------------------

def run_expsum_grid(config: ExperimentConfig) -> DensityReport:
    ks = config.k_values or tuple(range(1, 9))
    ns = config.n_schedule or tuple(2 ** e for e in range(12, 23, 2))
    gamma, c = config.gamma, config.c
    rows, logs = [], []
    profile = {n: [] for n in ns}
    for k in ks:
        for n in ns:
            s = power_sum(c, gamma, k, n=n, threads=config.threads)
            rows.append(_row(k, n, f"power|k={k}", s.modulus, s.bound,
                             s.ratio, s.bound, None))
            logs.append((math.log(n), math.log(max(s.modulus, 1e-300))))
            profile[n].append(s.ratio)
    slope = float(np.polyfit([a for a, _ in logs], [b for _, b in logs], 1)[0])
    means = [float(np.mean(profile[n])) for n in ns]
    med = float(np.median(means))
    verdict = {
        "fitted_slope": slope,
        "slope_budget": (1.0 + gamma) / 2.0 + 0.05,
        "slope_ok": slope <= (1.0 + gamma) / 2.0 + 0.05,
        "ratio_profile": means,
        "ratio_profile_ok": med > 0 and max(means) <= 2.0 * med,
    }
    return DensityReport("expsum_grid", rows, {}, None, [], verdict,
                         dict(config.echo))


def run_sieve_grid(config: ExperimentConfig) -> DensityReport:
    ns = config.n_schedule or (10 ** 4, 10 ** 5, 10 ** 6)
    rows, inside = [], []
    for n in ns:
        z = n ** config.z_exponent
        rep = jr_bounds(SieveProblem(weights=n, z=z, D=z ** 4, eps=config.eps))
        rows.append(_row(0, n, "uniform", rep.S, rep.lower, rep.S - rep.lower,
                         rep.upper, None))
        inside.append(rep.inside)
    verdict = {"all_inside": all(inside), "lower_positive":
               all(r["reference"] > 0 for r in rows)}
    return DensityReport("sieve_grid", rows, {}, None, [], verdict,
                         dict(config.echo))


def run_dioph(config: ExperimentConfig) -> DensityReport:
    if config.x is None:
        raise ValueError("dioph needs a number x")
    cf = (config.x if isinstance(config.x, ContinuedFraction)
          else cf_expand_available(config.x, config.depth))
    rows = []
    for k, ra in enumerate(convergents(cf)):
        gap_log10 = _ln(ra.err_bound) / math.log(10.0)
        dirichlet = -2.0 * math.log10(ra.q)  # exact for big ints
        rows.append(_row(k, None, "gap_log10", gap_log10, dirichlet,
                         dirichlet - gap_log10, None, None))
    try:
        mu_hat = dioph_type_estimate(config.x, config.depth)
    except PrecisionExhausted:
        mu_hat = None  # rational or too-short expansion: no type estimate
    try:
        bad = is_badly_approximable(config.x, config.depth, config.digit_bound)
    except PrecisionExhausted:
        bad = None
    verdict = {"mu_hat": mu_hat, "badly_approximable": bad, "depth": cf.depth}
    return DensityReport("dioph", rows, {}, None, [], verdict,
                         dict(config.echo))


def run_period(config: ExperimentConfig) -> DensityReport:
    if config.p is None or config.q is None:
        raise ValueError("period needs integer coordinates p and q")
    pt = make_periodic_point(config.p, config.q)
    if pt.period > config.max_n:
        raise ScheduleInfeasible(
            f"period {pt.period} exceeds max_n={config.max_n}")
    fns = config.family()
    refs = period_integral_family(fns, pt, threads=config.threads)
    haars = [haar_value(f) for f in fns]
    rows = [
        _row(0, pt.period, f.name, ref, h, abs(ref - h), None, None)
        for f, ref, h in zip(fns, refs, haars)
    ]
    minimal = certify_minimal_period(pt) if pt.period <= 250_000 else None
    birkhoff = {f.name: (ref, h, abs(ref - h))
                for f, ref, h in zip(fns, refs, haars)}
    verdict = {"period": pt.period, "minimal_certified": minimal}
    return DensityReport("period", rows, birkhoff, None, [], verdict,
                         dict(config.echo))


RUNNERS = {
    "th11": run_th11,
    "th12": run_th12,
    "th13": run_th13,
    "effective_probe": run_effective_probe,
    "expsum_grid": run_expsum_grid,
    "sieve_grid": run_sieve_grid,
    "dioph": run_dioph,
    "period": run_period,
}


def run(config: ExperimentConfig) -> DensityReport:
    return RUNNERS[config.experiment](config)
