"""Monte Carlo calibration, power curves, and diagnostic probes.

The selected-dimension statistic T_S has no usable closed-form null
distribution at finite n (the selector S is itself random), so critical
values and p-values come from simulation: draw null datasets, run the
full data-driven test on each, and read quantiles off the empirical
distribution of T_S.  The p-value uses the add-one estimator

    p = (1 + #{simulated T_S >= observed}) / (replications + 1),

which is exact-level for any replication count, and the critical value
at level alpha is the ceil((1 - alpha) * reps)-th order statistic.

Reproducibility is structural, not incidental: every replication draws
from its own Philox substream addressed by (seed, path..., index),
results land in preallocated slots by index, and aggregation only uses
order-insensitive reductions (sorts, counts).  Consequently any worker
count -- including the thread cap from NTGOF_THREADS -- produces
byte-identical output.  Power studies additionally split the seed path:
calibration replications and alternative replications never share a
stream, so evaluating power does not silently recycle the noise that
built the critical value.

Two probes back the asymptotics with finite-sample evidence.  The
consistency probe tracks P(S >= K) and the median T_S along a sample
size grid under a fixed alternative whose first excited score direction
is K: a working selector pushes the selected dimension up to K and the
statistic through any fixed critical value.  The tail-rate probe checks
the large-deviation behaviour of bounded i.i.d. means against the
reference rate exp(-n y^2 / (2 sigma)): empirical tails must fall at
least geometrically along a doubling n-grid.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from ._rng import resolve_workers, substream
from .catalog import AlternativeSpec, TestSpec, null_sampler, run_test

__all__ = [
    "MonteCarloConfig",
    "CalibrationResult",
    "PowerPoint",
    "PowerCurveResult",
    "ProbeRow",
    "ProbeResult",
    "null_distribution",
    "p_value",
    "power_curve",
    "consistency_probe",
    "tail_rate_probe",
    "substream",
]


@dataclass(frozen=True)
class MonteCarloConfig:
    """Replication budget, seed, level, and (for curves) the n-grid."""

    replications: int
    seed: int
    alpha: float = 0.05
    n_grid: tuple[int, ...] = ()

    def __post_init__(self):
        if self.replications < 100:
            raise ValueError("need at least 100 replications for any calibration")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie strictly between 0 and 1")
        object.__setattr__(self, "n_grid", tuple(int(n) for n in self.n_grid))
        if any(b <= a for a, b in zip(self.n_grid, self.n_grid[1:])):
            raise ValueError("n_grid must be strictly increasing")


@dataclass(frozen=True)
class CalibrationResult:
    """Simulated null distribution of T_S at one sample size."""

    n: int
    alpha: float
    replications: int
    seed: int
    critical_value: float
    statistics: np.ndarray  # sorted ascending
    s_counts: np.ndarray  # s_counts[k-1] = #{replications with S == k}

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "alpha": self.alpha,
            "replications": self.replications,
            "seed": self.seed,
            "critical_value": self.critical_value,
            "s_counts": [int(c) for c in self.s_counts],
        }


def _tag_replication(e: Exception, i: int) -> None:
    """Prefix an in-flight exception's message with the replication index."""
    head = f"replication {i}: "
    if e.args and isinstance(e.args[0], str):
        e.args = (head + e.args[0],) + e.args[1:]
    else:
        e.args = (head.rstrip(": "),) + e.args


def _map_indexed(fn: Callable[[int], object], count: int, workers: int | None) -> list:
    """fn(0..count-1), results in index order, any worker count."""
    nworkers = resolve_workers(workers)
    if nworkers <= 1 or count <= 1:
        return [fn(i) for i in range(count)]
    out: list = [None] * count
    with ThreadPoolExecutor(max_workers=nworkers) as pool:
        futures = {pool.submit(fn, i): i for i in range(count)}
        for fut in as_completed(futures):
            out[futures[fut]] = fut.result()
    return out


def _simulate_selected(
    spec: TestSpec,
    n: int,
    reps: int,
    seed: int,
    path: tuple[int, ...],
    workers: int | None,
) -> tuple[np.ndarray, np.ndarray]:
    """(T_S values, S values) over reps independent null/alt datasets."""
    sampler = null_sampler(spec)

    def one(i: int):
        rng = substream(seed, *path, i)
        try:
            outcome = run_test(sampler(rng, n), spec)
        except Exception as e:
            _tag_replication(e, i)
            raise
        return outcome.t_s, outcome.s

    pairs = _map_indexed(one, reps, workers)
    t = np.array([p[0] for p in pairs])
    s = np.array([p[1] for p in pairs], dtype=int)
    return t, s


def null_distribution(
    spec: TestSpec,
    n: int,
    config: MonteCarloConfig,
    workers: int | None = None,
) -> CalibrationResult:
    """Simulate the null distribution of T_S and its alpha critical value.

    Replication i draws from the substream (seed, 0, i); the returned
    statistics are sorted ascending and the critical value is the
    ceil((1 - alpha) * reps)-th order statistic.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    t, s = _simulate_selected(spec, n, config.replications, config.seed, (0,), workers)
    t.sort()
    idx = math.ceil((1.0 - config.alpha) * config.replications)
    d = spec.budget.d(n)
    return CalibrationResult(
        n=n,
        alpha=config.alpha,
        replications=config.replications,
        seed=config.seed,
        critical_value=float(t[idx - 1]),
        statistics=t,
        s_counts=np.bincount(s, minlength=d + 1)[1:],
    )


def p_value(observed: float, calibration: CalibrationResult) -> float:
    """Add-one Monte Carlo p-value of an observed T_S."""
    if not math.isfinite(observed):
        raise ValueError("observed statistic must be finite")
    stats = calibration.statistics
    count = stats.size - int(np.searchsorted(stats, observed, side="left"))
    return (1.0 + count) / (calibration.replications + 1.0)


@dataclass(frozen=True)
class PowerPoint:
    n: int
    critical_value: float
    rejection_rate: float

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "critical_value": self.critical_value,
            "rejection_rate": self.rejection_rate,
        }


@dataclass(frozen=True)
class PowerCurveResult:
    alternative: str
    alpha: float
    replications: int
    seed: int
    points: tuple[PowerPoint, ...]

    def as_dict(self) -> dict:
        return {
            "alternative": self.alternative,
            "alpha": self.alpha,
            "replications": self.replications,
            "seed": self.seed,
            "points": [p.as_dict() for p in self.points],
        }


def power_curve(
    spec: TestSpec,
    alternative: AlternativeSpec,
    config: MonteCarloConfig,
    workers: int | None = None,
) -> PowerCurveResult:
    """Rejection rate of the calibrated test along the n-grid.

    At each grid size the critical value is calibrated on the substream
    family (seed, gi, 0, .) and the alternative replications use
    (seed, gi, 1, .): disjoint streams by construction.  A replication
    rejects when its T_S exceeds the calibrated critical value.
    """
    if not config.n_grid:
        raise ValueError("config.n_grid must be non-empty for a power curve")
    points = []
    for gi, n in enumerate(config.n_grid):
        t_null, _ = _simulate_selected(
            spec, n, config.replications, config.seed, (gi, 0), workers
        )
        t_null.sort()
        idx = math.ceil((1.0 - config.alpha) * config.replications)
        crit = float(t_null[idx - 1])

        sampler = alternative.sampler

        def one(i: int, _n=n, _gi=gi):
            rng = substream(config.seed, _gi, 1, i)
            try:
                return run_test(sampler(rng, _n), spec).t_s
            except Exception as e:
                _tag_replication(e, i)
                raise

        t_alt = np.array(_map_indexed(one, config.replications, workers))
        points.append(
            PowerPoint(
                n=n,
                critical_value=crit,
                rejection_rate=float(np.mean(t_alt > crit)),
            )
        )
    return PowerCurveResult(
        alternative=alternative.name,
        alpha=config.alpha,
        replications=config.replications,
        seed=config.seed,
        points=tuple(points),
    )


@dataclass(frozen=True)
class ProbeRow:
    n: int
    values: dict

    def as_dict(self) -> dict:
        return {"n": self.n, **self.values}


@dataclass(frozen=True)
class ProbeResult:
    name: str
    passed: bool
    rows: tuple[ProbeRow, ...]
    detail: str = ""

    def as_dict(self) -> dict:
        return {
            "probe": self.name,
            "passed": self.passed,
            "detail": self.detail,
            "rows": [r.as_dict() for r in self.rows],
        }


def consistency_probe(
    spec: TestSpec,
    alternative: AlternativeSpec,
    config: MonteCarloConfig,
    threshold: float = 0.8,
    workers: int | None = None,
) -> ProbeResult:
    """Track P(S >= K) and median T_S along the n-grid under an alternative.

    K is the alternative's first excited score direction.  The probe
    passes when P(S >= K) is non-decreasing along the grid and reaches
    at least ``threshold`` at the largest size -- the observable
    footprint of the selector eventually looking far enough to see the
    alternative.
    """
    if not config.n_grid:
        raise ValueError("config.n_grid must be non-empty for a probe")
    if alternative.first_component is None:
        raise ValueError("alternative must declare its first excited component K")
    k = alternative.first_component
    rows = []
    p_track = []
    med_track = []
    for gi, n in enumerate(config.n_grid):
        def one(i: int, _n=n, _gi=gi):
            rng = substream(config.seed, _gi, 1, i)
            try:
                outcome = run_test(alternative.sampler(rng, _n), spec)
            except Exception as e:
                _tag_replication(e, i)
                raise
            return outcome.t_s, outcome.s

        pairs = _map_indexed(one, config.replications, workers)
        t = np.array([p[0] for p in pairs])
        s = np.array([p[1] for p in pairs], dtype=int)
        p_k = float(np.mean(s >= k))
        med = float(np.median(t))
        p_track.append(p_k)
        med_track.append(med)
        rows.append(ProbeRow(n=n, values={"p_s_ge_k": p_k, "median_t_s": med}))
    monotone_p = all(b >= a for a, b in zip(p_track, p_track[1:]))
    monotone_med = all(b >= a for a, b in zip(med_track, med_track[1:]))
    final_ok = p_track[-1] >= threshold
    detail = (
        f"P(S >= {k}) along grid: {[round(p, 4) for p in p_track]}; "
        f"median T_S: {[round(m, 3) for m in med_track]}; threshold {threshold:g}"
    )
    return ProbeResult(
        name="consistency",
        passed=monotone_p and monotone_med and final_ok,
        rows=tuple(rows),
        detail=detail,
    )


def tail_rate_probe(
    draw: Callable[[np.random.Generator, int], np.ndarray],
    mean: float,
    sigma: float,
    y: float,
    n_grid: Sequence[int],
    replications: int,
    seed: int,
    factor: float = 2.0,
    workers: int | None = None,
) -> ProbeResult:
    """Empirical large-deviation tails of a bounded i.i.d. mean.

    For each n in the grid, estimates P(|mean_n - mean| >= y) over
    ``replications`` independent substreams and reports it next to the
    reference rate exp(-n y^2 / (2 sigma)).  Passes when each successive
    tail is at most the previous divided by ``factor`` (with a doubling
    grid: tails at least halve), zeros allowed once the tail has died.
    """
    ns = [int(n) for n in n_grid]
    if len(ns) < 2 or any(b <= a for a, b in zip(ns, ns[1:])):
        raise ValueError("n_grid must hold at least 2 strictly increasing sizes")
    if replications < 100:
        raise ValueError("need at least 100 replications")
    if y < 0 or not sigma > 0:
        raise ValueError("y must be >= 0 and sigma positive")
    rows = []
    tails = []
    for gi, n in enumerate(ns):
        def one(i: int, _n=n, _gi=gi):
            rng = substream(seed, _gi, i)
            vals = np.asarray(draw(rng, _n), dtype=float)
            return abs(float(vals.mean()) - mean) >= y

        hits = _map_indexed(one, replications, workers)
        tail = float(np.mean(hits))
        tails.append(tail)
        rows.append(
            ProbeRow(
                n=n,
                values={
                    "tail": tail,
                    "reference_rate": math.exp(-n * y * y / (2.0 * sigma)),
                },
            )
        )
    ok = all(b <= a / factor for a, b in zip(tails, tails[1:]))
    detail = f"tails along grid: {tails}; required decay factor {factor:g}"
    return ProbeResult(name="tail_rate", passed=ok, rows=tuple(rows), detail=detail)
