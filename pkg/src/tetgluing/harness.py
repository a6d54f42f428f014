"""Seeded sweeps over ``n``, per-record conservation checks, aggregation and
comparison with the asymptotic laws.

A sweep is fully determined by its :class:`ExperimentConfig`: trial ``i`` at
size ``n`` uses ``derive_seed(master_seed, n, i)``, so records do not depend
on the worker count or on scheduling.  Only ``wall_time`` varies between runs.
"""

from __future__ import annotations

import csv
import json
import math
import os
import time
from collections import Counter, defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from fractions import Fraction
from pathlib import Path

import numpy as np
from scipy import stats as sps

from .complex import (
    boundary_invariants,
    build_boundary_surface,
    build_edge_orbits,
    cusp_spectrum,
    default_cutoff,
    edge_histogram,
    genericity_check,
    pair_statistic,
    vertex_orbits,
)
from .dual_graph import build_dual, diameter, double_graph, is_connected, is_simple, spectral_gap
from .errors import (
    ConservationViolation,
    GluingError,
    InsufficientData,
    OrientationInconsistency,
    SizeLimitExceeded,
)
from .homology import DEFAULT_HOMOLOGY_MAX_N, homology_panel
from .model import derive_seed, enumerate_all, omega_size, sample_simple, sample_uniform
from .peeling import peel_algorithm1
from .smith import DEFAULT_MAX_NNZ
from .volume import OCTAHEDRON_VOLUME, volume_proxy, volume_report

PANELS = ("edges", "boundary", "homology", "dual", "peeling")
CONDITIONING = ("uniform", "simple")
SIMPLE_K_MAX = 10
QUANTILES = (0.05, 0.25, 0.5, 0.75, 0.95)
AGGREGATE_COLUMNS = ["n", "statistic", "count", "mean", "variance", "q05", "q25", "median", "q75", "q95"]

__all__ = [
    "AggregateStats",
    "ExperimentConfig",
    "LawCheck",
    "SampleRecord",
    "StatSummary",
    "SweepResult",
    "TheoryReport",
    "Tolerances",
    "check_record",
    "compare_theory",
    "exact_distribution",
    "instance_distribution",
    "run_sweep",
    "run_trial",
    "uniformity_test",
    "volume_proxy",
    "volume_report",
    "OCTAHEDRON_VOLUME",
]


@dataclass
class Tolerances:
    """Pass/fail thresholds used by :func:`compare_theory`."""

    slope_low: float = 0.4
    slope_high: float = 0.6
    edge_bracket_low: float = -2.0     # mean E - ln(n)/2
    edge_bracket_high: float = 4.0
    simple_ratio_low: float = 0.8      # mean simple E_k * 2k
    simple_ratio_high: float = 1.2
    simple_min_n: int = 10_000
    v1_min_fraction: float = 0.9
    v1_reference_n: int = 1000
    v1_sigmas: float = 2.0
    genus_low: float = 0.95
    genus_high: float = 1.0
    genus_min_n: int = 10_000
    lambda1_min: float = 0.05
    lambda1_fraction: float = 0.95
    diameter_factor: float = 2.0       # times log_3 n
    diameter_fraction: float = 0.95
    ekl_max: float = 0.5
    generic_fraction: float = 0.9
    generic_min_n: int = 10_000
    heegaard_fraction: float = 0.9


@dataclass
class ExperimentConfig:
    n_list: list[int]
    trials: int
    master_seed: int = 0
    conditioning: str = "uniform"
    panels: tuple[str, ...] = ("edges", "boundary")
    output_dir: str | None = None
    homology_max_n: int = DEFAULT_HOMOLOGY_MAX_N
    homology_max_nnz: int = DEFAULT_MAX_NNZ
    workers: int = 1
    max_retries: int = 1000
    spectral_tol: float = 1e-8
    tolerances: Tolerances = field(default_factory=Tolerances)

    def __post_init__(self):
        self.n_list = [int(n) for n in self.n_list]
        self.panels = tuple(self.panels)
        if isinstance(self.tolerances, dict):
            self.tolerances = Tolerances(**self.tolerances)
        if not self.n_list or any(n < 1 for n in self.n_list):
            raise ValueError("n_list must hold positive integers")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.panels:
            raise ValueError("at least one panel is required")
        unknown = set(self.panels) - set(PANELS)
        if unknown:
            raise ValueError(f"unknown panels {sorted(unknown)}")
        if self.conditioning not in CONDITIONING:
            raise ValueError(f"conditioning must be one of {CONDITIONING}")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["panels"] = list(self.panels)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        extra = set(d) - known
        if extra:
            raise ValueError(f"unknown config keys {sorted(extra)}")
        return cls(**d)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def dump(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2)


@dataclass
class SampleRecord:
    n: int
    trial: int
    seed: int
    wall_time: float = 0.0
    conditioning: str = "uniform"
    # edges
    V: int | None = None
    E: int | None = None
    edge_histogram: list | None = None      # [[k, E_k, simple E_k], ...]
    cutoff: int | None = None
    E_KL: int | None = None
    generic_dual_simple: bool | None = None
    generic_short_simple: bool | None = None
    generic_no_adjacent: bool | None = None
    cusp_largest: float | None = None
    cusp_second: float | None = None
    # boundary
    boundary_components: int | None = None
    genus_list: list | None = None
    chi_boundary: int | None = None
    # homology
    homology_skipped: bool | None = None
    b1_rel: int | None = None
    b1_abs: int | None = None
    b1_double: int | None = None
    torsion_factors: list | None = None
    heegaard_lower: int | None = None
    heegaard_upper: int | None = None
    chi_rel: int | None = None
    chi_abs: int | None = None
    chi_double: int | None = None
    # dual graph
    dual_simple: bool | None = None
    dual_connected: bool | None = None
    dual_diameter: int | None = None
    lambda1: float | None = None
    lambda1_double: float | None = None
    # peeling
    peel_E: int | None = None
    peel_multi_closures: int | None = None
    peel_bound_violations: int | None = None
    errors: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=False)

    @classmethod
    def from_dict(cls, d: dict) -> "SampleRecord":
        return cls(**d)

    @property
    def genus_total(self) -> int | None:
        return None if self.genus_list is None else sum(self.genus_list)


def _draw(config: ExperimentConfig, n: int, seed: int):
    if config.conditioning == "simple":
        return sample_simple(n, seed, config.max_retries)
    return sample_uniform(n, seed)


def run_trial(config: ExperimentConfig, n: int, trial: int) -> SampleRecord:
    """One sample with every configured panel; panel errors go into ``errors``."""
    seed = derive_seed(config.master_seed, n, trial)
    rec = SampleRecord(n=n, trial=trial, seed=seed, conditioning=config.conditioning)
    t0 = time.perf_counter()
    inst = _draw(config, n, seed)
    orbits = build_edge_orbits(inst)
    panels = set(config.panels)
    surface = None

    if "edges" in panels:
        E, hist, shist = edge_histogram(orbits)
        rec.E = E
        rec.V = int(vertex_orbits(inst).max()) + 1
        rec.edge_histogram = [[k, hist[k], shist.get(k, 0)] for k in sorted(hist)]
        cutoff = default_cutoff(n)
        rec.cutoff = cutoff
        rec.E_KL = pair_statistic(orbits, cutoff, cutoff)
        gen = genericity_check(inst, orbits, cutoff)
        rec.generic_dual_simple = gen.dual_simple
        rec.generic_short_simple = gen.all_short_edges_simple
        rec.generic_no_adjacent = gen.no_adjacent_short_edges
        spec = cusp_spectrum(orbits)
        rec.cusp_largest = float(spec.largest)
        rec.cusp_second = float(spec.second)

    if "boundary" in panels:
        surface = build_boundary_surface(inst, orbits)
        count, _, genera = boundary_invariants(surface)
        rec.boundary_components = count
        rec.genus_list = list(genera)
        rec.chi_boundary = surface.euler_characteristic
        if rec.E is None:
            rec.E = len(orbits)

    if "homology" in panels:
        if n > config.homology_max_n:
            rec.homology_skipped = True
        else:
            try:
                hp = homology_panel(inst, orbits, surface, config.homology_max_nnz)
            except SizeLimitExceeded as exc:
                rec.homology_skipped = True
                rec.errors["homology"] = str(exc)
            else:
                rec.homology_skipped = False
                rec.b1_rel, rec.b1_abs, rec.b1_double = hp.b1_rel, hp.b1_abs, hp.b1_double
                rec.torsion_factors = list(hp.torsion_factors)
                rec.heegaard_lower, rec.heegaard_upper = hp.heegaard_lower, hp.heegaard_upper
                rec.chi_rel = hp.relative.euler_characteristic
                rec.chi_abs = hp.absolute.euler_characteristic
                rec.chi_double = hp.double.euler_characteristic

    if "dual" in panels:
        g = build_dual(inst)
        rec.dual_simple = is_simple(g)
        rec.dual_connected = is_connected(g)
        d = diameter(g)
        rec.dual_diameter = None if math.isinf(d) else int(d)
        if n >= 2 and rec.dual_connected:
            try:
                rec.lambda1 = spectral_gap(g, config.spectral_tol, seed=seed % 2**32).lambda1
                rec.lambda1_double = spectral_gap(double_graph(g), config.spectral_tol, seed=seed % 2**32).lambda1
            except GluingError as exc:
                rec.errors["dual"] = f"{type(exc).__name__}: {exc}"

    if "peeling" in panels:
        _, trace = peel_algorithm1(n, seed)
        rec.peel_E = trace.total_edges
        rec.peel_multi_closures = sum(1 for e in trace.E_t if e >= 2)
        rec.peel_bound_violations = sum(
            1 for e, reg in zip(trace.E_t, trace.f_regular) if e > 3 or (reg and e > 1)
        )

    rec.wall_time = time.perf_counter() - t0
    check_record(rec)
    return rec


def check_record(rec: SampleRecord) -> None:
    """Exact per-record identities; raises ConservationViolation on failure."""
    n = rec.n
    problems = []
    if rec.edge_histogram is not None:
        if sum(k * c for k, c, _ in rec.edge_histogram) != 6 * n:
            problems.append("sum k E_k != 6n")
        if sum(c for _, c, _ in rec.edge_histogram) != rec.E:
            problems.append("sum E_k != E")
    if rec.chi_boundary is not None:
        if rec.chi_boundary != 2 * rec.E - 2 * n:
            problems.append("chi(boundary) != 2E - 2n")
        if rec.V is not None and rec.boundary_components != rec.V:
            problems.append("boundary components != V")
        if rec.boundary_components == 1 and rec.genus_list[0] != n + 1 - rec.E:
            problems.append("genus != n + 1 - E")
    if rec.homology_skipped is False:
        E = rec.E
        if rec.chi_rel != n - E or rec.chi_abs != E - n or rec.chi_double != 0:
            problems.append("chi identities of the chain complexes")
        if rec.boundary_components == 1 and rec.b1_abs != rec.genus_list[0] + rec.b1_rel:
            problems.append("half lives, half dies")
        if rec.heegaard_lower > rec.heegaard_upper:
            problems.append("Heegaard lower bound exceeds upper bound")
    if rec.peel_bound_violations:
        problems.append("peeling closed too many edges in one step")
    if problems:
        raise ConservationViolation(f"n={n} trial={rec.trial} seed={rec.seed}: " + "; ".join(problems))


def _trial_task(args):
    config_dict, n, trial = args
    return run_trial(ExperimentConfig.from_dict(config_dict), n, trial)


@dataclass
class SweepResult:
    records: list[SampleRecord]
    stats: "AggregateStats"


def run_sweep(config: ExperimentConfig, progress=None) -> SweepResult:
    """Run ``trials`` samples for every ``n``; write JSONL and CSV if configured."""
    tasks = [(n, i) for n in config.n_list for i in range(config.trials)]
    if config.workers == 1:
        records = []
        for n, i in tasks:
            records.append(run_trial(config, n, i))
            if progress is not None:
                progress(records[-1])
    else:
        payload = [(config.to_dict(), n, i) for n, i in tasks]
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            records = list(pool.map(_trial_task, payload, chunksize=max(1, len(payload) // (8 * config.workers))))
    stats = AggregateStats.from_records(records)
    if config.output_dir is not None:
        out = Path(config.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        write_records(out / "records.jsonl", records)
        stats.write_csv(out / "aggregate.csv")
        config.dump(out / "config.json")
    return SweepResult(records, stats)


def write_records(path, records) -> None:
    with open(path, "w") as fh:
        for rec in records:
            fh.write(rec.to_json() + "\n")


def read_records(path) -> list[SampleRecord]:
    with open(path) as fh:
        return [SampleRecord.from_dict(json.loads(line)) for line in fh if line.strip()]


# aggregation

def _hist_lookup(rec, col):
    return {k: row[col] for row in rec.edge_histogram for k in [row[0]]}


def record_statistics(rec: SampleRecord) -> dict[str, float]:
    """Flatten one record into named scalar statistics (missing ones omitted)."""
    out: dict[str, float] = {}

    def put(name, value):
        if value is not None:
            out[name] = float(value)

    put("E", rec.E)
    put("V", rec.V)
    if rec.V is not None:
        put("V_is_1", rec.V == 1)
    if rec.edge_histogram is not None:
        allk = _hist_lookup(rec, 1)
        simple = _hist_lookup(rec, 2)
        for k in range(1, SIMPLE_K_MAX + 1):
            put(f"E_{k}", allk.get(k, 0))
            put(f"E_simple_{k}", simple.get(k, 0))
    put("E_KL", rec.E_KL)
    if rec.generic_dual_simple is not None:
        put("generic", rec.generic_dual_simple and rec.generic_short_simple and rec.generic_no_adjacent)
    put("cusp_largest", rec.cusp_largest)
    put("cusp_second", rec.cusp_second)
    put("boundary_components", rec.boundary_components)
    if rec.genus_list is not None:
        put("genus_over_n", rec.genus_total / rec.n)
    put("b1_rel", rec.b1_rel)
    put("b1_abs", rec.b1_abs)
    put("b1_double", rec.b1_double)
    put("heegaard_lower", rec.heegaard_lower)
    put("heegaard_upper", rec.heegaard_upper)
    if rec.torsion_factors is not None:
        put("torsion_trivial", not rec.torsion_factors)
    put("dual_simple", rec.dual_simple)
    put("dual_connected", rec.dual_connected)
    put("dual_diameter", rec.dual_diameter)
    put("lambda1", rec.lambda1)
    put("lambda1_double", rec.lambda1_double)
    put("peel_E", rec.peel_E)
    return out


@dataclass(frozen=True)
class StatSummary:
    count: int
    mean: float
    variance: float
    q05: float
    q25: float
    median: float
    q75: float
    q95: float

    @classmethod
    def of(cls, values) -> "StatSummary":
        v = np.asarray(values, dtype=float)
        q = np.quantile(v, QUANTILES)
        var = float(v.var(ddof=1)) if len(v) > 1 else 0.0
        return cls(len(v), float(v.mean()), var, *map(float, q))

    @property
    def stderr(self) -> float:
        return math.sqrt(self.variance / self.count) if self.count else math.nan


@dataclass(frozen=True)
class Regression:
    slope: float
    intercept: float
    r2: float


@dataclass
class AggregateStats:
    """Per-``n`` summaries plus the raw values they came from (in trial order)."""

    values: dict[int, dict[str, np.ndarray]]
    summaries: dict[int, dict[str, StatSummary]]
    regression: Regression | None

    @classmethod
    def from_records(cls, records) -> "AggregateStats":
        grouped: dict[int, list[SampleRecord]] = defaultdict(list)
        for rec in records:
            grouped[rec.n].append(rec)
        values, summaries = {}, {}
        for n in sorted(grouped):
            recs = sorted(grouped[n], key=lambda r: r.trial)
            cols: dict[str, list[float]] = defaultdict(list)
            for rec in recs:
                for k, v in record_statistics(rec).items():
                    cols[k].append(v)
            values[n] = {k: np.asarray(v) for k, v in cols.items()}
            summaries[n] = {k: StatSummary.of(v) for k, v in cols.items()}
        reg = None
        ns = [n for n in summaries if "E" in summaries[n]]
        if len(ns) >= 2:
            x = np.log(np.asarray(ns, dtype=float))
            y = np.asarray([summaries[n]["E"].mean for n in ns])
            fit = sps.linregress(x, y)
            reg = Regression(float(fit.slope), float(fit.intercept), float(fit.rvalue ** 2))
        return cls(values, summaries, reg)

    @property
    def n_values(self) -> list[int]:
        return sorted(self.summaries)

    def has(self, n: int, stat: str) -> bool:
        return stat in self.summaries.get(n, {})

    def summary(self, n: int, stat: str) -> StatSummary:
        return self.summaries[n][stat]

    def raw(self, n: int, stat: str) -> np.ndarray:
        return self.values[n][stat]

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(AGGREGATE_COLUMNS)
            for n in self.n_values:
                for name in sorted(self.summaries[n]):
                    s = self.summaries[n][name]
                    w.writerow([n, name, s.count, s.mean, s.variance, s.q05, s.q25, s.median, s.q75, s.q95])
            if self.regression is not None:
                r = self.regression
                w.writerow(["all", "E_vs_ln_n_slope", len(self.n_values), r.slope, "", "", "", "", "", ""])
                w.writerow(["all", "E_vs_ln_n_intercept", len(self.n_values), r.intercept, "", "", "", "", "", ""])
                w.writerow(["all", "E_vs_ln_n_r2", len(self.n_values), r.r2, "", "", "", "", "", ""])


# comparison with the asymptotic laws

@dataclass(frozen=True)
class LawCheck:
    law: str
    n: int | None
    observed: float
    comparator: str
    passed: bool

    def line(self) -> str:
        where = "" if self.n is None else f" n={self.n}"
        return f"{'PASS' if self.passed else 'FAIL'} {self.law}{where}: observed {self.observed:.6g} vs {self.comparator}"


@dataclass
class TheoryReport:
    checks: list[LawCheck]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def text(self) -> str:
        return "\n".join(c.line() for c in self.checks) + "\n"

    def to_dict(self) -> dict:
        return {"passed": self.passed, "checks": [asdict(c) for c in self.checks]}


def law_edge_slope(stats: AggregateStats, tol: Tolerances) -> LawCheck:
    if stats.regression is None:
        raise InsufficientData("need mean E at two or more sizes")
    s = stats.regression.slope
    return LawCheck("slope of mean E vs ln n", None, s, f"[{tol.slope_low}, {tol.slope_high}]",
                    tol.slope_low <= s <= tol.slope_high)


def law_edge_bracket(stats: AggregateStats, n: int, tol: Tolerances) -> LawCheck:
    m = stats.summary(n, "E").mean
    lo, hi = 0.5 * math.log(n) + tol.edge_bracket_low, 0.5 * math.log(n) + tol.edge_bracket_high
    return LawCheck("mean E", n, m, f"[{lo:.4g}, {hi:.4g}] around ln(n)/2", lo <= m <= hi)


def law_simple_edges(stats: AggregateStats, n: int, tol: Tolerances) -> list[LawCheck]:
    out = []
    for k in range(1, SIMPLE_K_MAX + 1):
        r = stats.summary(n, f"E_simple_{k}").mean * 2 * k
        out.append(LawCheck(f"mean simple E_{k} * {2 * k}", n, r,
                            f"[{tol.simple_ratio_low}, {tol.simple_ratio_high}]",
                            tol.simple_ratio_low <= r <= tol.simple_ratio_high))
    return out


def law_single_boundary(stats: AggregateStats, tol: Tolerances) -> list[LawCheck]:
    ns = [n for n in stats.n_values if stats.has(n, "V_is_1")]
    out = []
    for n in ns:
        if n == tol.v1_reference_n:
            p = stats.summary(n, "V_is_1").mean
            out.append(LawCheck("P[V=1]", n, p, f">= {tol.v1_min_fraction}", p >= tol.v1_min_fraction))
    for a, b in zip(ns, ns[1:]):
        sa, sb = stats.summary(a, "V_is_1"), stats.summary(b, "V_is_1")
        slack = tol.v1_sigmas * math.hypot(sa.stderr, sb.stderr)
        out.append(LawCheck(f"P[V=1] non-decreasing {a}->{b}", b, sb.mean - sa.mean,
                            f">= -{slack:.3g} ({tol.v1_sigmas} sigma)", sb.mean - sa.mean >= -slack))
    return out


def law_genus(stats: AggregateStats, n: int, tol: Tolerances) -> LawCheck:
    g = stats.summary(n, "genus_over_n").mean
    return LawCheck("mean genus / n", n, g, f"[{tol.genus_low}, {tol.genus_high}]", tol.genus_low <= g <= tol.genus_high)


def law_dual(stats: AggregateStats, n: int, tol: Tolerances) -> list[LawCheck]:
    out = []
    if stats.has(n, "lambda1"):
        lam = stats.raw(n, "lambda1")
        total = stats.summary(n, "dual_connected").count
        frac = float(np.sum(lam >= tol.lambda1_min)) / total
        out.append(LawCheck("fraction lambda1 >= threshold", n, frac,
                            f">= {tol.lambda1_fraction} (threshold {tol.lambda1_min})", frac >= tol.lambda1_fraction))
    if stats.has(n, "dual_connected"):
        total = stats.summary(n, "dual_connected").count
        bound = tol.diameter_factor * math.log(n) / math.log(3)
        diam = stats.raw(n, "dual_diameter") if stats.has(n, "dual_diameter") else np.array([])
        frac = float(np.sum(diam <= bound)) / total
        out.append(LawCheck("fraction diameter <= factor * log_3 n", n, frac,
                            f">= {tol.diameter_fraction} (bound {bound:.4g})", frac >= tol.diameter_fraction))
    return out


def law_genericity(stats: AggregateStats, n: int, tol: Tolerances) -> list[LawCheck]:
    ekl = stats.summary(n, "E_KL").mean
    gen = stats.summary(n, "generic").mean
    return [
        LawCheck("mean E_KL at K=L=ceil(n^(1/4))", n, ekl, f"<= {tol.ekl_max}", ekl <= tol.ekl_max),
        LawCheck("fraction generic", n, gen, f">= {tol.generic_fraction}", gen >= tol.generic_fraction),
    ]


def law_homology(stats: AggregateStats, n: int, tol: Tolerances) -> list[LawCheck]:
    th = math.log(n) ** 2
    med = stats.summary(n, "b1_rel").median
    lo = stats.raw(n, "heegaard_lower")
    hi = stats.raw(n, "heegaard_upper")
    frac = float(np.mean(lo >= n - th))
    return [
        LawCheck("median b1(M, dM)", n, med, f"<= (ln n)^2 = {th:.4g}", med <= th),
        LawCheck("Heegaard lower <= upper (all trials)", n, float(np.mean(lo <= hi)), "== 1", bool(np.all(lo <= hi))),
        LawCheck("fraction Heegaard lower >= n - (ln n)^2", n, frac, f">= {tol.heegaard_fraction}",
                 frac >= tol.heegaard_fraction),
    ]


def compare_theory(stats: AggregateStats, tol: Tolerances | None = None) -> TheoryReport:
    """Every law the data supports; needs three sizes spanning a decade."""
    tol = tol or Tolerances()
    ns = stats.n_values
    if len(ns) < 3 or max(ns) < 10 * min(ns):
        raise InsufficientData("need at least 3 sizes spanning at least one decade")
    checks: list[LawCheck] = []
    if stats.regression is not None:
        checks.append(law_edge_slope(stats, tol))
    for n in ns:
        if stats.has(n, "E"):
            checks.append(law_edge_bracket(stats, n, tol))
        if n >= tol.simple_min_n and stats.has(n, "E_simple_1"):
            checks.extend(law_simple_edges(stats, n, tol))
        if n >= tol.genus_min_n and stats.has(n, "genus_over_n"):
            checks.append(law_genus(stats, n, tol))
        if n >= tol.generic_min_n and stats.has(n, "E_KL"):
            checks.extend(law_genericity(stats, n, tol))
        if stats.has(n, "dual_connected"):
            checks.extend(law_dual(stats, n, tol))
        if stats.has(n, "b1_rel"):
            checks.extend(law_homology(stats, n, tol))
    checks.extend(law_single_boundary(stats, tol))
    return TheoryReport(checks)


# exact small-n tables

def instance_distribution(n: int) -> dict[bytes, Fraction]:
    """Uniform law on every gluing of ``n`` tetrahedra, keyed by instance key."""
    total = omega_size(n)
    table = {}
    for inst in enumerate_all(n):
        table[inst.key()] = Fraction(1, total)
    if len(table) != total:
        raise OrientationInconsistency("enumeration produced duplicate instances")
    return table


def _atom(inst):
    orbits = build_edge_orbits(inst)
    E, hist, shist = edge_histogram(orbits)
    V = int(vertex_orbits(inst).max()) + 1
    g = build_dual(inst)
    loops = int(np.sum(g.edges[:, 0] == g.edges[:, 1]))
    return (
        V,
        E,
        tuple(sorted(hist.items())),
        tuple(sorted(shist.items())),
        (is_simple(g), is_connected(g), loops),
    )


def exact_distribution(n: int) -> dict[tuple, Fraction]:
    """Exact law of ``(V, E, E_k, simple E_k, (dual simple, connected, loops))``."""
    total = omega_size(n)
    counts = Counter(_atom(inst) for inst in enumerate_all(n))
    return {k: Fraction(c, total) for k, c in sorted(counts.items())}


@dataclass(frozen=True)
class UniformityTest:
    draws: int
    atoms: int
    chi2: float
    dof: int
    p_value: float


def uniformity_test(n: int = 1, draws: int = 1_000_000, master_seed: int = 0) -> UniformityTest:
    """Chi-square of ``sample_uniform`` draws against the exact uniform table."""
    table = instance_distribution(n)
    index = {k: i for i, k in enumerate(table)}
    counts = np.zeros(len(table), dtype=np.int64)
    for trial in range(draws):
        counts[index[sample_uniform(n, derive_seed(master_seed, n, trial)).key()]] += 1
    expected = draws / len(table)
    chi2 = float(np.sum((counts - expected) ** 2) / expected)
    dof = len(table) - 1
    return UniformityTest(draws, len(table), chi2, dof, float(sps.chi2.sf(chi2, dof)))


def default_workers() -> int:
    return max(1, (os.cpu_count() or 1))
