"""Seeded Monte-Carlo trials over host families, with CSV output and summaries."""

from __future__ import annotations

import csv
import io
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from typing import Iterable, Optional, Sequence

import numpy as np

from . import graph as hg
from .brute import GUARD_N, GraphTooLarge, longest_cycle_brute_force
from .cycles import find_long_cycle, is_valid_cycle
from .forest import ThresholdError, Thresholds, find_vertical_path
from .percolation import PercolationOracle, mix_seed

HOST_FAMILIES = ("complete", "hypercube", "regular", "circulant", "file")

CSV_COLUMNS = (
    "trial", "n", "k", "p", "tested_edges", "tested_bound", "lemma3_ok", "frac_full",
    "poor_count", "heavy_count", "frac_height_ge_Ck", "path_found", "path_bad_count",
    "branch", "cycle_length", "success", "failure_reason", "elapsed_ms",
)


class ConfigError(ValueError):
    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


class EmptyInput(ValueError):
    pass


@dataclass(frozen=True)
class HostSpec:
    family: str
    n: Optional[int] = None
    d: Optional[int] = None
    dim: Optional[int] = None
    offsets: Optional[tuple[int, ...]] = None
    graph_file: Optional[str] = None
    fixed: bool = False

    @property
    def per_trial(self) -> bool:
        return self.family == "regular" and not self.fixed

    def build(self, seed: int = 0) -> hg.HostGraph:
        f = self.family
        if f == "complete":
            return hg.gen_complete(self.n)
        if f == "hypercube":
            return hg.gen_hypercube(self.dim)
        if f == "regular":
            return hg.gen_random_regular(self.n, self.d, seed)
        if f == "circulant":
            return hg.gen_circulant(self.n, self.offsets)
        if f == "file":
            return hg.read_edge_list(self.graph_file)
        raise ConfigError("host", f"unknown family {f!r}")

    def validate(self) -> None:
        if self.family not in HOST_FAMILIES:
            raise ConfigError("host", f"must be one of {', '.join(HOST_FAMILIES)}")
        need = {"complete": ("n",), "hypercube": ("dim",), "regular": ("n", "d"),
                "circulant": ("n", "offsets"), "file": ("graph_file",)}[self.family]
        for name in need:
            if getattr(self, name) is None:
                raise ConfigError(name.replace("_", "-"), f"required for host={self.family}")


@dataclass(frozen=True)
class TrialConfig:
    host: HostSpec
    p: Optional[float] = None
    c: Optional[float] = None
    eps: float = 0.05
    base_seed: int = 0
    trials: int = 1
    height_C: float = 1.0
    workers: int = 1
    trace: bool = False

    def resolve(self, k: int) -> float:
        """Edge probability, from ``p`` directly or as ``c / k``."""
        if (self.p is None) == (self.c is None):
            raise ConfigError("p", "give exactly one of p and c")
        if self.p is not None:
            p = self.p
        else:
            if k <= 0:
                raise ConfigError("c", "p = c/k needs a host with positive minimum degree")
            p = self.c / k
        if not 0.0 <= p <= 1.0:
            raise ConfigError("p" if self.c is None else "c", f"resolved p={p} outside [0, 1]")
        return p

    def validate(self) -> None:
        self.host.validate()
        if not 0 < self.eps <= 0.1:
            raise ConfigError("eps", "must lie in (0, 0.1]")
        if self.trials < 1:
            raise ConfigError("trials", "must be >= 1")
        if self.workers < 1:
            raise ConfigError("workers", "must be >= 1")
        if (self.p is None) == (self.c is None):
            raise ConfigError("p", "give exactly one of p and c")


@dataclass
class TrialRecord:
    trial: int
    n: int
    k: int
    p: float
    tested_edges: int
    tested_bound: float
    lemma3_ok: bool
    frac_full: float
    poor_count: int
    heavy_count: int
    frac_height_ge_Ck: float
    path_found: bool
    path_bad_count: Optional[int]
    branch: str
    cycle_length: int
    success: bool
    failure_reason: str
    elapsed_ms: float
    trace: list = field(default_factory=list, repr=False, compare=False)


def _thresholds(config: TrialConfig, k: int) -> Thresholds:
    try:
        return Thresholds.from_eps(config.eps, k)
    except ThresholdError as exc:
        raise ConfigError("eps", str(exc)) from None


def run_trial(config: TrialConfig, t: int, host: Optional[hg.HostGraph] = None) -> TrialRecord:
    start = time.perf_counter()
    if host is None:
        host = config.host.build(host_seed(config, t))
    k = host.min_degree
    p = config.resolve(k)
    th = _thresholds(config, k)
    oracle = PercolationOracle(host, p, mix_seed(config.base_seed, t))

    trace: list[str] = []
    out = find_long_cycle(host, oracle, th, tracer=trace.append if config.trace else None)
    res, table = out.exploration, out.table
    if out.success and not is_valid_cycle(out.cycle, host, oracle, res.forest):
        raise AssertionError(f"trial {t}: invalid cycle returned")

    search = out.path_search
    if search is None:
        bad = np.flatnonzero(~table.is_full | ~table.is_light).tolist()
        search = find_vertical_path(res.forest, bad, th)

    n = host.n
    bound = 2 * n / p if p > 0 else math.inf
    return TrialRecord(
        trial=t,
        n=n,
        k=k,
        p=p,
        tested_edges=res.tested_count,
        tested_bound=bound,
        lemma3_ok=res.tested_count <= bound,
        frac_full=table.full_count / n if n else 0.0,
        poor_count=table.poor_count,
        heavy_count=table.heavy_count,
        frac_height_ge_Ck=float(np.mean(table.height >= config.height_C * k)) if n else 0.0,
        path_found=search.path is not None,
        path_bad_count=search.bad_count,
        branch=out.branch.value if out.branch else "",
        cycle_length=out.best_length,
        success=out.success,
        failure_reason=str(out.failure) if out.failure else "",
        elapsed_ms=(time.perf_counter() - start) * 1000.0,
        trace=trace,
    )


_WORKER: dict = {}


def _init_worker(config: TrialConfig) -> None:
    _WORKER["config"] = config
    _WORKER["host"] = None if config.host.per_trial else _shared_host(config)


def _worker_trial(t: int) -> TrialRecord:
    return run_trial(_WORKER["config"], t, _WORKER["host"])


def host_seed(config: TrialConfig, t: int) -> int:
    """Seed for random host families; a fixed host reuses trial 0's."""
    return mix_seed(config.base_seed, t if config.host.per_trial else 0, 1)


def _shared_host(config: TrialConfig) -> hg.HostGraph:
    return config.host.build(host_seed(config, 0))


def run_trials(config: TrialConfig) -> list[TrialRecord]:
    """Run ``config.trials`` trials; trial ``t`` draws from ``mix_seed(base_seed, t)``.

    Records come back ordered by trial index whatever the worker count.
    """
    config.validate()
    host = None if config.host.per_trial else _shared_host(config)
    probe = host if host is not None else config.host.build(host_seed(config, 0))
    config.resolve(probe.min_degree)
    _thresholds(config, probe.min_degree)

    indices = range(config.trials)
    if config.workers == 1 or config.trials == 1:
        records = [run_trial(config, t, host) for t in indices]
    else:
        chunk = max(1, config.trials // (4 * config.workers))
        with ProcessPoolExecutor(config.workers, initializer=_init_worker, initargs=(config,)) as pool:
            records = list(pool.map(_worker_trial, indices, chunksize=chunk))
    records.sort(key=lambda r: r.trial)
    return records


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return ""
    if isinstance(value, float):
        if math.isinf(value):
            return "inf"
        return format(value, ".6g")
    return str(value)


def records_to_csv(records: Iterable[TrialRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in records:
        w.writerow([_fmt(getattr(r, c)) for c in CSV_COLUMNS])
    return buf.getvalue()


def write_csv(records: Iterable[TrialRecord], path) -> None:
    with open(path, "w", encoding="ascii", newline="") as fh:
        fh.write(records_to_csv(records))


def _parse_bool(s: str) -> bool:
    if s not in ("true", "false"):
        raise ValueError(f"bad boolean {s!r}")
    return s == "true"


def records_from_csv(text: str) -> list[TrialRecord]:
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
        raise ValueError("CSV header does not match the trial record columns")
    types = {f.name: f.type for f in fields(TrialRecord)}
    out = []
    for row in reader:
        kw = {}
        for col in CSV_COLUMNS:
            s, ty = row[col], types[col]
            if ty == "bool":
                kw[col] = _parse_bool(s)
            elif ty == "int":
                kw[col] = int(s)
            elif ty == "float":
                kw[col] = float(s)
            elif ty == "Optional[int]":
                kw[col] = int(s) if s else None
            else:
                kw[col] = s
        out.append(TrialRecord(**kw))
    return out


def nearest_rank(values: Sequence[float], q: float):
    """Nearest-rank quantile: the ``ceil(q * N)``-th smallest value (at least the first)."""
    if not values:
        raise EmptyInput("no values")
    xs = sorted(values)
    rank = max(1, math.ceil(q * len(xs)))
    return xs[rank - 1]


QUANTILES = (0.0, 0.1, 0.5, 0.9, 1.0)


@dataclass(frozen=True)
class GroupSummary:
    n: int
    k: int
    p: float
    trials: int
    mean_cycle_length: float
    cycle_length_quantiles: dict
    success_rate: float
    lemma3_pass_rate: float
    mean_frac_full: float


@dataclass(frozen=True)
class SweepSummary:
    groups: tuple[GroupSummary, ...]

    def to_text(self) -> str:
        cols = ["n", "k", "p", "trials", "mean_len"] + [f"q{int(q * 100)}" for q in QUANTILES] + [
            "success_rate", "lemma3_rate", "mean_frac_full"]
        lines = [",".join(cols)]
        for g in self.groups:
            vals = [g.n, g.k, g.p, g.trials, g.mean_cycle_length,
                    *[g.cycle_length_quantiles[q] for q in QUANTILES],
                    g.success_rate, g.lemma3_pass_rate, g.mean_frac_full]
            lines.append(",".join(_fmt(v) for v in vals))
        return "\n".join(lines) + "\n"


def summarize(records: Sequence[TrialRecord]) -> SweepSummary:
    if not records:
        raise EmptyInput("summarize needs at least one record")
    groups: dict[tuple, list[TrialRecord]] = {}
    for r in records:
        groups.setdefault((r.n, r.k, r.p), []).append(r)
    out = []
    for (n, k, p), rs in groups.items():
        lengths = [r.cycle_length for r in rs]
        m = len(rs)
        out.append(GroupSummary(
            n=n, k=k, p=p, trials=m,
            mean_cycle_length=sum(lengths) / m,
            cycle_length_quantiles={q: nearest_rank(lengths, q) for q in QUANTILES},
            success_rate=sum(r.success for r in rs) / m,
            lemma3_pass_rate=sum(r.lemma3_ok for r in rs) / m,
            mean_frac_full=sum(r.frac_full for r in rs) / m,
        ))
    return SweepSummary(tuple(out))


@dataclass(frozen=True)
class OracleComparison:
    trial: int
    builder_length: int
    oracle_length: int
    valid: bool

    @property
    def ok(self) -> bool:
        return self.valid and self.builder_length <= self.oracle_length


@dataclass(frozen=True)
class ValidationReport:
    rows: tuple[OracleComparison, ...]

    @property
    def cycles_checked(self) -> int:
        return sum(1 for r in self.rows if r.builder_length > 0)

    @property
    def passed(self) -> bool:
        return all(r.ok for r in self.rows)

    def to_text(self) -> str:
        lines = ["trial,builder_length,oracle_length,valid,ok"]
        for r in self.rows:
            lines.append(f"{r.trial},{r.builder_length},{r.oracle_length},{_fmt(r.valid)},{_fmt(r.ok)}")
        lines.append(f"# {sum(r.ok for r in self.rows)}/{len(self.rows)} trials ok, "
                     f"{self.cycles_checked} cycles compared")
        return "\n".join(lines) + "\n"


def revealed_subgraph(oracle: PercolationOracle) -> hg.HostGraph:
    """Graph of every edge found present so far; it contains the forest edges."""
    present = [(e.lo, e.hi) for e, hit in oracle.tested_items() if hit]
    return hg.build_from_edges(oracle.host.n, present)


def compare_with_oracle(host: hg.HostGraph, p: float, eps: float, seed: int, trial: int = 0) -> OracleComparison:
    if host.n > GUARD_N:
        raise GraphTooLarge(f"n={host.n} exceeds the brute-force guard of {GUARD_N}")
    oracle = PercolationOracle(host, p, seed)
    out = find_long_cycle(host, oracle, Thresholds.from_eps(eps, host.min_degree))
    best, _ = longest_cycle_brute_force(revealed_subgraph(oracle))
    if out.cycle is None:
        return OracleComparison(trial, 0, best, True)
    valid = is_valid_cycle(out.cycle, host, oracle, out.exploration.forest)
    return OracleComparison(trial, out.cycle.length, best, valid)


def validate_against_oracle(config: TrialConfig) -> ValidationReport:
    """Check every returned cycle is valid and no longer than the exact optimum
    of the revealed subgraph (forest edges plus edges found present)."""
    config.validate()
    rows = []
    for t in range(config.trials):
        host = config.host.build(host_seed(config, t))
        if host.n > GUARD_N:
            raise GraphTooLarge(f"n={host.n} exceeds the brute-force guard of {GUARD_N}")
        p = config.resolve(host.min_degree)
        _thresholds(config, host.min_degree)
        rows.append(compare_with_oracle(host, p, config.eps, mix_seed(config.base_seed, t), t))
    return ValidationReport(tuple(rows))
