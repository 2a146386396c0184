"""Seeded multi-trial experiments, summary statistics and CSV output."""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from . import decoders
from .evolution import RUNNERS, TrialRecord, as_rng, uniform_spanning_tree
from .instances import (
    ClusteredGraph,
    cluster_graph,
    generate_gg_mst,
    generate_gg_tsp,
    generate_gs,
    generate_random,
    load_instance,
)

FAMILIES = ("gs", "gg-mst", "gg-tsp", "random", "file")
_COMPATIBLE = {
    "cluster": {"gs", "gg-mst", "random", "file"},
    "tree": {"gs", "gg-mst", "random", "file"},
    "tour": {"gg-tsp", "random", "file"},
}

RECORD_COLUMNS = ["trial", "seed", "evals_to_opt", "best_cost", "plateau", "wall_ms"]
SUMMARY_COLUMNS = [
    "algo", "family", "m", "trials", "success_rate",
    "mean_evals", "median_evals", "p90_evals",
]


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    algorithm: str
    family: str
    m: tuple[int, ...] = ()
    sizes: Optional[tuple[int, ...]] = None
    max_cost: int = 10
    trials: int = 10
    budget: int = 1000
    base_seed: int = 0
    instance_seed: int = 0
    instance: Optional[str] = None
    # wall_ms is only written when timing is on, so CSVs stay reproducible
    timing: bool = False
    workers: int = 1

    def __post_init__(self):
        if isinstance(self.m, int):
            self.m = (self.m,)
        self.m = tuple(self.m)
        if self.sizes is not None:
            self.sizes = tuple(self.sizes)
        self.validate()

    def validate(self) -> None:
        if self.algorithm not in RUNNERS:
            raise ConfigError(f"unknown algorithm {self.algorithm!r}")
        if self.family not in FAMILIES:
            raise ConfigError(f"unknown instance family {self.family!r}")
        if self.family not in _COMPATIBLE[self.algorithm]:
            raise ConfigError(
                f"algorithm {self.algorithm!r} does not apply to family {self.family!r}"
            )
        if self.trials < 1:
            raise ConfigError("trials must be positive")
        if self.budget < 1:
            raise ConfigError("budget must be positive")
        if self.family == "file":
            if not self.instance:
                raise ConfigError("family 'file' needs an instance path")
        elif not self.m:
            raise ConfigError("no cluster count m given")

    @property
    def problem(self) -> str:
        return "gtsp" if self.algorithm == "tour" else "gmstp"


def _parse_ints(value: str) -> tuple[int, ...]:
    return tuple(int(x) for x in value.replace(",", " ").split())


def _parse_bool(value: str) -> bool:
    v = value.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {value!r}")


_CONFIG_KEYS: dict[str, Callable[[str], object]] = {
    "algorithm": str.strip,
    "family": str.strip,
    "m": _parse_ints,
    "sizes": _parse_ints,
    "max_cost": int,
    "trials": int,
    "budget": int,
    "base_seed": int,
    "instance_seed": int,
    "instance": str.strip,
    "timing": _parse_bool,
    "workers": int,
}


def parse_config(text: str) -> ExperimentConfig:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        try:
            values[key] = _CONFIG_KEYS[key](value)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: {exc}") from exc
    for key in ("algorithm", "family"):
        if key not in values:
            raise ConfigError(f"missing required key {key!r}")
    return ExperimentConfig(**values)


def load_config(path) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def build_instance(cfg: ExperimentConfig, m: Optional[int]) -> ClusteredGraph:
    if cfg.family == "gs":
        return generate_gs(m)
    if cfg.family == "gg-mst":
        return generate_gg_mst(m)
    if cfg.family == "gg-tsp":
        return generate_gg_tsp(m)
    if cfg.family == "file":
        return load_instance(cfg.instance)
    sizes = cfg.sizes or (3,)
    if len(sizes) == 1:
        sizes = sizes * m
    g = generate_random(m, list(sizes), cfg.max_cost, cfg.instance_seed)
    return decoders.certify(g, cfg.problem)


def _run_trial(algorithm: str, family: str, g: ClusteredGraph, budget: int,
               index: int, seed: int) -> TrialRecord:
    rec = RUNNERS[algorithm](g, budget, seed)
    rec.trial_index = index
    rec.seed = seed
    rec.algorithm = algorithm
    rec.family = family
    rec.m = g.m
    return rec


def run_experiment(cfg: ExperimentConfig) -> list[TrialRecord]:
    """All trials of ``cfg``, one block per m, each ordered by trial index.

    Trial ``k`` is seeded with ``base_seed + k``.
    """
    cfg.validate()
    ms: Sequence[Optional[int]] = cfg.m if cfg.family != "file" else (None,)
    records: list[TrialRecord] = []
    for m in ms:
        g = build_instance(cfg, m)
        jobs = [
            (cfg.algorithm, cfg.family, g, cfg.budget, k, cfg.base_seed + k)
            for k in range(cfg.trials)
        ]
        if cfg.workers > 1:
            with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
                records.extend(pool.map(_run_trial, *zip(*jobs)))
        else:
            records.extend(_run_trial(*job) for job in jobs)
    return records


# ---------------------------------------------------------------------------
# aggregation and CSV
# ---------------------------------------------------------------------------


@dataclass
class SummaryStats:
    algorithm: str
    family: str
    m: int
    trials: int
    success_rate: float
    mean_evals: Optional[float]
    median_evals: Optional[float]
    p90_evals: Optional[float]
    mean_best_cost: float


def percentile(values: Sequence[float], q: float) -> float:
    """Percentile with linear interpolation between order statistics."""
    return float(np.percentile(np.asarray(values, dtype=float), q, method="linear"))


def summarize(records: Iterable[TrialRecord]) -> list[SummaryStats]:
    groups: dict[tuple, list[TrialRecord]] = {}
    for r in records:
        groups.setdefault((r.algorithm, r.family, r.m), []).append(r)
    out = []
    for (algo, family, m), recs in groups.items():
        hits = [r.evaluations_to_optimum for r in recs if r.success]
        out.append(
            SummaryStats(
                algorithm=algo,
                family=family,
                m=m,
                trials=len(recs),
                success_rate=len(hits) / len(recs),
                mean_evals=float(np.mean(hits)) if hits else None,
                median_evals=percentile(hits, 50) if hits else None,
                p90_evals=percentile(hits, 90) if hits else None,
                mean_best_cost=float(np.mean([float(r.best_cost) for r in recs])),
            )
        )
    return out


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, float):
        if math.isinf(x):
            return "inf"
        return format(x, ".10g")
    return str(x)


def records_csv(records: Iterable[TrialRecord], timing: bool = False) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(RECORD_COLUMNS)
    for r in records:
        w.writerow([
            r.trial_index,
            _fmt(r.seed),
            _fmt(r.evaluations_to_optimum),
            _fmt(r.best_cost),
            _fmt(r.hit_local_plateau),
            _fmt(round(r.wall_time_ms, 3)) if timing else "",
        ])
    return buf.getvalue()


def summary_csv(stats: Iterable[SummaryStats]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SUMMARY_COLUMNS)
    for s in stats:
        w.writerow([
            s.algorithm, s.family, _fmt(s.m), s.trials, _fmt(s.success_rate),
            _fmt(s.mean_evals), _fmt(s.median_evals), _fmt(s.p90_evals),
        ])
    return buf.getvalue()


def emit_csv(rows, path, timing: bool = False) -> None:
    """Write TrialRecords or SummaryStats to ``path``; header only if empty."""
    rows = list(rows)
    if rows and isinstance(rows[0], SummaryStats):
        text = summary_csv(rows)
    else:
        text = records_csv(rows, timing=timing)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


# ---------------------------------------------------------------------------
# oracle cross-validation
# ---------------------------------------------------------------------------


@dataclass
class OracleReport:
    passed: int = 0
    failed: int = 0
    lines: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def check(self, name: str, fast, brute) -> bool:
        good = fast.cost == brute.cost and fast.selection == brute.selection
        if good:
            self.passed += 1
        else:
            self.failed += 1
        status = "PASS" if good else "FAIL"
        self.lines.append(
            f"{status} {name}: fast={fast.cost} {fast.selection} "
            f"brute={brute.cost} {brute.selection}"
        )
        return good


def random_oracle_instance(rng: np.random.Generator, m: int, max_size: int) -> ClusteredGraph:
    sizes = [int(s) for s in rng.integers(1, max_size, size=m, endpoint=True)]
    # small cost range so that ties, and hence tie-breaking, are exercised
    max_cost = int(rng.integers(1, 6, endpoint=True))
    return generate_random(m, sizes, max_cost, int(rng.integers(2**31)))


def verify_oracles(seed: int, count: int, gtsp_count: Optional[int] = None,
                   log: Optional[Callable[[str], None]] = None) -> OracleReport:
    """Cross-check fast decoders against exhaustive enumeration.

    Runs ``count`` random GMSTP cases (m <= 5, clusters of at most 4 nodes)
    and ``gtsp_count`` (default ``count // 2``) GTSP cases (m = 4, clusters
    of at most 3 nodes).
    """
    if gtsp_count is None:
        gtsp_count = count // 2
    report = OracleReport()
    rng = as_rng(seed)

    def emit(start):
        if log is not None:
            for line in report.lines[start:]:
                log(line)

    for k in range(count):
        start = len(report.lines)
        g = random_oracle_instance(rng, int(rng.integers(2, 5, endpoint=True)), 4)
        h = cluster_graph(g)
        t = uniform_spanning_tree(h, rng)
        report.check(f"gmstp[{k}] tree {sorted(t)}", decoders.best_nodes_for_tree(g, t),
                     decoders.brute_nodes_for_tree(g, t))
        glob = decoders.brute_force_gmstp(g)
        best_tree = min(decoders.best_nodes_for_tree(g, tt).cost
                        for tt in decoders.spanning_trees(h))
        if best_tree == glob.cost:
            report.passed += 1
            report.lines.append(f"PASS gmstp[{k}] global optimum {glob.cost}")
        else:
            report.failed += 1
            report.lines.append(
                f"FAIL gmstp[{k}] global optimum: selections={glob.cost} trees={best_tree}"
            )
        emit(start)
    for k in range(gtsp_count):
        start = len(report.lines)
        g = random_oracle_instance(rng, 4, 3)
        tour = tuple(int(c) for c in rng.permutation(4))
        report.check(f"gtsp[{k}] tour {tour}", decoders.best_nodes_for_tour(g, tour),
                     decoders.brute_nodes_for_tour(g, tour))
        emit(start)
    return report
