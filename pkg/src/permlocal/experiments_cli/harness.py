"""Batched, seeded Monte Carlo experiments with exact integer tallies.

Samples are split into fixed-size batches; batch ``b`` draws from
``RandomStream(seed, b)`` and returns integer tallies, which are summed.  The
result therefore depends on ``(seed, samples)`` only, never on ``workers``.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from fractions import Fraction
from functools import partial
from typing import Callable, Sequence

import numpy as np

from .. import __version__
from ..limits_exact import enumerate_class, limit_density
from ..perm_core import Permutation, as_perm, format_perm, pattern_code, window_codes
from ..rooted_order import RootedPermutation, restrict
from ..samplers import RandomStream, limit231_window, limit321_windows, uniform_av
from . import defaults

MODELS = ("av231", "av321")
LIMIT_MODELS = ("limit231", "limit321")
_CLASS = {"av231": (2, 3, 1), "av321": (3, 2, 1)}
LIMIT_BATCH_SIZE = 5000


@dataclass(frozen=True)
class ExperimentSpec:
    model: str
    n: int
    samples: int
    pattern_size: int = 3
    seed: int = 0
    workers: int = 1
    radius: int | None = None
    patterns: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        if self.model not in MODELS:
            raise ValueError(f"model must be one of {MODELS}")
        if self.n < 1 or self.samples < 1 or self.pattern_size < 1 or self.workers < 1:
            raise ValueError("n, samples, pattern_size and workers must be positive")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")
        if self.radius is not None and self.radius < 1:
            raise ValueError("radius must be positive")
        if self.patterns is not None:
            object.__setattr__(self, "patterns", tuple(format_perm(as_perm(p)) for p in self.patterns))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["patterns"] = list(self.patterns) if self.patterns is not None else None
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentSpec":
        d = dict(d)
        if d.get("patterns") is not None:
            d["patterns"] = tuple(d["patterns"])
        return cls(**d)


@dataclass(frozen=True)
class ExperimentRecord:
    schema_version: int
    statistic: str
    model: str
    n: int
    samples: int
    seed: int
    pattern: str
    empirical_mean: float
    empirical_variance: float
    theoretical: str | None
    theoretical_float: float | None
    abs_error: float | None
    std_error: float
    wall_time_ms: int

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentRecord":
        return cls(**{f.name: d[f.name] for f in fields(cls)})


@dataclass
class ExperimentTable:
    name: str
    records: list[ExperimentRecord]
    summary: dict = field(default_factory=dict)


def envelope(spec: dict, records: Sequence[ExperimentRecord]) -> dict:
    return {"spec": spec, "records": [r.to_dict() for r in records], "library_version": __version__}


def dumps(spec: dict, records: Sequence[ExperimentRecord]) -> str:
    return json.dumps(envelope(spec, records), indent=2)


def loads(text: str) -> tuple[dict, list[ExperimentRecord]]:
    data = json.loads(text)
    return data["spec"], [ExperimentRecord.from_dict(r) for r in data["records"]]


def to_tsv(records: Sequence[ExperimentRecord]) -> str:
    names = [f.name for f in fields(ExperimentRecord)]
    rows = ["\t".join(names)]
    for r in records:
        rows.append("\t".join("" if getattr(r, k) is None else str(getattr(r, k)) for k in names))
    return "\n".join(rows) + "\n"


# -- batching -------------------------------------------------------------------


def _batches(samples: int, size: int) -> list[tuple[int, int]]:
    return [(b, min(size, samples - b * size)) for b in range((samples + size - 1) // size)]


def _run_batches(job: Callable[[int, int, int], list[int]], samples: int, seed: int, workers: int,
                 batch_size: int = defaults.BATCH_SIZE) -> list[int]:
    """Sum the integer tallies of ``job(seed, batch_index, count)`` over all batches."""
    plan = _batches(samples, batch_size)
    seeds = [seed] * len(plan)
    ids = [b for b, _ in plan]
    counts = [c for _, c in plan]
    if workers > 1 and len(plan) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(job, seeds, ids, counts))
    else:
        parts = list(map(job, seeds, ids, counts))
    total = [0] * len(parts[0])
    for part in parts:
        total = [a + b for a, b in zip(total, part)]
    return total


def _make_record(statistic: str, model: str, n: int, samples: int, seed: int, label: str,
                 s1: int, s2: int, denom: int, theo: Fraction | None, started: float) -> ExperimentRecord:
    """Record for per-sample values ``x = count / denom`` given ``sum count`` and ``sum count**2``."""
    mean = Fraction(s1, samples * denom)
    if samples > 1:
        var = (Fraction(s2) - Fraction(s1 * s1, samples)) / (samples - 1) / (denom * denom)
    else:
        var = Fraction(0)
    return ExperimentRecord(
        schema_version=defaults.SCHEMA_VERSION,
        statistic=statistic,
        model=model,
        n=n,
        samples=samples,
        seed=seed,
        pattern=label,
        empirical_mean=float(mean),
        empirical_variance=float(var),
        theoretical=None if theo is None else str(theo),
        theoretical_float=None if theo is None else float(theo),
        abs_error=None if theo is None else float(abs(mean - theo)),
        std_error=float(var / samples) ** 0.5,
        wall_time_ms=int((time.perf_counter() - started) * 1000),
    )


def _code_counts(arr: np.ndarray, k: int) -> dict[int, int]:
    codes, counts = np.unique(window_codes(arr, k), return_counts=True)
    return dict(zip(codes.tolist(), counts.tolist()))


# -- pattern densities ------------------------------------------------------------


def _convergence_job(model: str, n: int, groups: tuple[tuple[int, tuple[int, ...]], ...],
                     seed: int, batch: int, count: int) -> list[int]:
    stream = RandomStream(seed, batch)
    width = sum(len(codes) for _, codes in groups)
    tally = [0] * (2 * width)
    for _ in range(count):
        arr = np.fromiter(uniform_av(model, n, stream), dtype=np.int64, count=n)
        slot = 0
        for k, codes in groups:
            found = _code_counts(arr, k)
            for c in codes:
                m = found.get(c, 0)
                tally[2 * slot] += m
                tally[2 * slot + 1] += m * m
                slot += 1
    return tally


def _resolve_patterns(spec: ExperimentSpec, size: int) -> list[Permutation]:
    if spec.patterns is not None:
        return [as_perm(p) for p in spec.patterns]
    return enumerate_class(_CLASS[spec.model], size)


def _density_records(spec: ExperimentSpec, pats: list[Permutation], statistic: str,
                     label: Callable[[Permutation], str]) -> list[ExperimentRecord]:
    started = time.perf_counter()
    sizes = sorted({len(p) for p in pats})
    groups = tuple((k, tuple(pattern_code(p) for p in pats if len(p) == k)) for k in sizes)
    job = partial(_convergence_job, spec.model, spec.n, groups)
    tally = _run_batches(job, spec.samples, spec.seed, spec.workers)
    ordered = [p for k in sizes for p in pats if len(p) == k]
    by_pattern = {p: (tally[2 * i], tally[2 * i + 1]) for i, p in enumerate(ordered)}
    return [
        _make_record(statistic, spec.model, spec.n, spec.samples, spec.seed, label(p),
                     *by_pattern[p], spec.n, limit_density(spec.model, p), started)
        for p in pats
    ]


def run_convergence(spec: ExperimentSpec) -> list[ExperimentRecord]:
    """Mean and across-sample variance of the consecutive-pattern proportion for each pattern."""
    return _density_records(spec, _resolve_patterns(spec, spec.pattern_size), "c-occ", format_perm)


def _rooted_job(model: str, n: int, h: int, targets: tuple[RootedPermutation, ...],
                seed: int, batch: int, count: int) -> list[int]:
    stream = RandomStream(seed, batch)
    tally = [0] * (2 * len(targets))
    for _ in range(count):
        sigma = uniform_av(model, n, stream)
        seen: dict[RootedPermutation, int] = {}
        for i in range(1, n + 1):
            r = restrict(RootedPermutation(sigma, i), h)
            seen[r] = seen.get(r, 0) + 1
        for j, t in enumerate(targets):
            m = seen.get(t, 0)
            tally[2 * j] += m
            tally[2 * j + 1] += m * m
    return tally


def run_rooted_marginal(spec: ExperimentSpec) -> list[ExperimentRecord]:
    """Fraction of roots whose radius-``h`` window is ``(pi, h+1)``, for each ``|pi| = 2h+1``."""
    h = spec.radius if spec.radius is not None else 1
    if spec.n < 2 * h + 1:
        raise ValueError("need n >= 2h + 1")
    started = time.perf_counter()
    pats = _resolve_patterns(spec, 2 * h + 1)
    if any(len(p) != 2 * h + 1 for p in pats):
        raise ValueError("rooted patterns must have size 2h + 1")
    targets = tuple(RootedPermutation(p, h + 1) for p in pats)
    job = partial(_rooted_job, spec.model, spec.n, h, targets)
    tally = _run_batches(job, spec.samples, spec.seed, spec.workers)
    return [
        _make_record("rooted", spec.model, spec.n, spec.samples, spec.seed, str(t),
                     tally[2 * j], tally[2 * j + 1], spec.n, limit_density(spec.model, t.sigma), started)
        for j, t in enumerate(targets)
    ]


def run_variance_decay(model: str, pattern: Sequence[int] | str, n_grid: Sequence[int], samples: int,
                       seed: int, workers: int = 1) -> ExperimentTable:
    if any(b <= a for a, b in zip(n_grid, n_grid[1:])) or not n_grid:
        raise ValueError("n_grid must be nonempty and increasing")
    pi = format_perm(as_perm(pattern))
    records = [
        run_convergence(ExperimentSpec(model, n, samples, seed=seed, workers=workers, patterns=(pi,)))[0]
        for n in n_grid
    ]
    variances = [r.empirical_variance for r in records]
    return ExperimentTable(
        "variance-decay",
        records,
        {"final_variance": variances[-1], "nonincreasing": all(b <= a for a, b in zip(variances, variances[1:]))},
    )


# -- limit objects -----------------------------------------------------------------


def limit_windows(limit_model: str, h: int, count: int, stream: RandomStream) -> np.ndarray:
    """``count`` radius-``h`` windows as rows of ranks; column ``x + h`` is position ``x``."""
    if limit_model == "limit321":
        return limit321_windows(h, count, stream)
    if limit_model == "limit231":
        return np.array([limit231_window(h, stream).sigma for _ in range(count)], dtype=np.int64).reshape(count, 2 * h + 1)
    raise ValueError(f"limit model must be one of {LIMIT_MODELS}")


def _window_law_job(limit_model: str, h: int, seed: int, batch: int, count: int) -> list[int]:
    rows = limit_windows(limit_model, h, count, RandomStream(seed, batch))
    w = 2 * h + 1
    codes = (rows - 1) @ (w ** np.arange(w - 1, -1, -1, dtype=np.int64))
    return np.bincount(codes, minlength=w**w).tolist()


def run_limit_window_law(limit_model: str, h: int, draws: int, seed: int, workers: int = 1) -> list[ExperimentRecord]:
    """Empirical law of the radius-``h`` window against the exact limit law on ``Av^{2h+1}``."""
    if h > 2:
        raise ValueError("window laws are tabulated for h <= 2")
    started = time.perf_counter()
    model = "av" + limit_model[len("limit"):]
    job = partial(_window_law_job, limit_model, h)
    tally = _run_batches(job, draws, seed, workers, LIMIT_BATCH_SIZE)
    out = []
    for p in enumerate_class(_CLASS[model], 2 * h + 1):
        m = tally[pattern_code(p)]
        # per-draw indicator, so the square tally equals the count
        out.append(_make_record("window", limit_model, 2 * h + 1, draws, seed, str(RootedPermutation(p, h + 1)),
                                m, m, 1, limit_density(model, p), started))
    return out


def _shift_job(limit_model: str, radius: int, pats: tuple[tuple[int, ...], ...], shifts: tuple[int, ...],
               seed: int, batch: int, count: int) -> list[int]:
    rows = limit_windows(limit_model, radius, count, RandomStream(seed, batch))
    tally = []
    for pi in pats:
        for s in shifts:
            cols = rows[:, [v + s + radius for v in pi]]
            tally.append(int(np.all(np.diff(cols, axis=1) > 0, axis=1).sum()))
    return tally


def run_shift_invariance(limit_model: str, pattern: Sequence[int] | str, shifts: Sequence[int], radius: int,
                         samples: int, seed: int, workers: int = 1) -> ExperimentTable:
    """Empirical probability of the shifted pattern set ``O^s(pi)`` for every shift ``s``."""
    return run_shift_family(limit_model, [pattern], shifts, radius, samples, seed, workers)[0]


def run_shift_family(limit_model: str, patterns: Sequence[Sequence[int] | str], shifts: Sequence[int], radius: int,
                     samples: int, seed: int, workers: int = 1) -> list[ExperimentTable]:
    """One shift table per pattern, all read off the same sampled windows."""
    if limit_model not in LIMIT_MODELS:
        raise ValueError(f"limit model must be one of {LIMIT_MODELS}")
    pats = [as_perm(p) for p in patterns]
    if not pats or not shifts:
        raise ValueError("need at least one pattern and one shift")
    if radius < max(abs(s) for s in shifts) + max(len(p) for p in pats):
        raise ValueError("radius too small for the requested shifts")
    started = time.perf_counter()
    shifts = tuple(shifts)
    job = partial(_shift_job, limit_model, radius, tuple(map(tuple, pats)), shifts)
    tally = _run_batches(job, samples, seed, workers, LIMIT_BATCH_SIZE)
    tables = []
    for j, pi in enumerate(pats):
        counts = tally[j * len(shifts):(j + 1) * len(shifts)]
        records = [
            _make_record(f"shift {s}", limit_model, 2 * radius + 1, samples, seed, format_perm(pi), m, m, 1, None,
                         started)
            for s, m in zip(shifts, counts)
        ]
        values = [Fraction(m, samples) for m in counts]
        tables.append(ExperimentTable(
            "shift-invariance",
            records,
            {"spread": float(max(values) - min(values)), "common_value": float(sum(values) / len(values))},
        ))
    return tables


# -- 321 window statistics -------------------------------------------------------


def separating_line_count(sigma: Sequence[int], k: int) -> int:
    """Number of roots ``i`` for which the radius-``k`` window has a separating line."""
    arr = np.asarray(sigma, dtype=np.int64)
    n = len(arr)
    up = arr >= np.arange(1, n + 1)
    inf = n + 1
    first_up = np.full(n, inf)   # sigma(m+), +infinity when there is no E+ index
    last_down = np.full(n, -1)   # sigma(M-), -infinity when there is no E- index
    for x in range(-k, k + 1):
        lo, hi = max(0, -x), min(n, n - x)
        roots = np.arange(lo, hi)
        vals, ups = arr[roots + x], up[roots + x]
        fresh = ups & (first_up[roots] == inf)
        first_up[roots[fresh]] = vals[fresh]
        downs = ~ups
        last_down[roots[downs]] = vals[downs]
    ok = (first_up == inf) | (last_down == -1) | (first_up > last_down)
    return int(ok.sum())


def _separating_job(n: int, k: int, seed: int, batch: int, count: int) -> list[int]:
    stream = RandomStream(seed, batch)
    s1 = s2 = 0
    for _ in range(count):
        m = separating_line_count(uniform_av("av321", n, stream), k)
        s1, s2 = s1 + m, s2 + m * m
    return [s1, s2]


def run_separating_line(n: int, k: int, samples: int, seed: int, workers: int = 1) -> ExperimentRecord:
    """Mean over samples of the fraction of roots whose radius-``k`` window has a separating line."""
    if k < 1:
        raise ValueError("k must be positive")
    started = time.perf_counter()
    s1, s2 = _run_batches(partial(_separating_job, n, k), samples, seed, workers)
    return _make_record("separating-line", "av321", n, samples, seed, f"k={k}", s1, s2, n, Fraction(1), started)


def window_set_counts(sigma: Sequence[int], k: int) -> np.ndarray:
    """Histogram of ``E+`` window sets over interior roots; cell ``sum 2**(x+k)`` over members ``x``."""
    arr = np.asarray(sigma, dtype=np.int64)
    n = len(arr)
    if n < 2 * k + 1:
        raise ValueError("need n >= 2k + 1 for an interior root")
    up = (arr >= np.arange(1, n + 1)).astype(np.int64)
    win = np.lib.stride_tricks.sliding_window_view(up, 2 * k + 1)
    codes = win @ (1 << np.arange(2 * k + 1, dtype=np.int64))
    return np.bincount(codes, minlength=1 << (2 * k + 1))


def cell_members(code: int, k: int) -> frozenset[int]:
    return frozenset(x for x in range(-k, k + 1) if code >> (x + k) & 1)


def _window_set_job(n: int, k: int, seed: int, batch: int, count: int) -> list[int]:
    stream = RandomStream(seed, batch)
    cells = 1 << (2 * k + 1)
    s1, s2 = np.zeros(cells, dtype=np.int64), np.zeros(cells, dtype=np.int64)
    for _ in range(count):
        c = window_set_counts(uniform_av("av321", n, stream), k)
        s1 += c
        s2 += c * c
    return s1.tolist() + s2.tolist()


def run_window_set_uniformity(n: int, k: int, samples: int, seed: int, workers: int = 1) -> ExperimentTable:
    """Mean conditional frequency of each window set ``A`` over interior roots."""
    if k < 1 or n < 2 * k + 1:
        raise ValueError("need k >= 1 and n >= 2k + 1")
    started = time.perf_counter()
    cells = 1 << (2 * k + 1)
    tally = _run_batches(partial(_window_set_job, n, k), samples, seed, workers)
    interior = n - 2 * k
    target = Fraction(1, cells)
    records = []
    for code in range(cells):
        members = sorted(cell_members(code, k))
        label = "{" + ",".join(map(str, members)) + "}"
        records.append(_make_record("window-set", "av321", n, samples, seed, label,
                                    tally[code], tally[cells + code], interior, target, started))
    return ExperimentTable("window-set", records, {"discarded_fraction": 2 * k / n})
