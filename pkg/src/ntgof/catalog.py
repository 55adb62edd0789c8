"""Concrete data-driven score tests.

Every test here follows the same recipe: map the data into score
components l_1, ..., l_d that are mean-zero under the null, form the
statistic series T_1, ..., T_d (sums of squares for orthonormal scores,
a normalized quadratic form otherwise), and hand the series to the
penalized selector.  What varies is where the scores come from:

uniformity
    Observations already live on [0, 1]; the scores are the shifted
    Legendre values b_j(x_i) directly.  This is the canonical smooth
    test of the uniform null and the building block for everything
    else (test any fixed continuous null by plugging data through its
    CDF first).

independence_rank
    For pairs (X_i, Y_i), replace each coordinate by its normalized
    mid-rank (R_i - 1/2) / n and use the product scores
    l_j = b_j(u_i) * b_j(v_i).  Ranks make the test distribution-free;
    the products are uncorrelated with unit variance under
    independence, so identity normalization applies.

deconvolution
    The sample is Y = X + eps with known noise density h; the null says
    X has density f0.  Perturbing f0 along the basis directions,
    f_theta = f0 * (1 + sum theta_j b_j(F0)), and differentiating the
    observed-data likelihood at theta = 0 gives the efficient scores

        l_j(y) = int b_j(F0(s)) f0(s) h(y - s) ds
                 / int f0(s) h(y - s) ds,

    computed by adaptive quadrature.  These are not orthonormal, so
    the normalizing matrix is estimated from the null sampler and the
    statistic series uses nested inverse moment blocks.

composite
    The null is a parametric family {F(.; beta)}.  With beta estimated
    by maximum likelihood, the naive scores b_j(F(X_i; beta_hat)) lose
    variance along the fitted directions; the corrected quadratic form

        W_k = n * Ybar^T (I + R) Ybar,
        R   = I_b^T (I_bb - I_b I_b^T)^{-1} I_b,

    restores the chi-square(k) null limit.  Here I_b collects the
    cross-information terms -E[d/dbeta_t b_j(F(X; beta))] and I_bb is
    the Fisher information; (I + R) is exactly the inverse of the
    asymptotic covariance I - I_b^T I_bb^{-1} I_b of the plug-in score
    means (Woodbury), which is why the inverse on the middle factor is
    the default -- the uninverted variant is kept only for comparison.

Monte Carlo calibration needs the matching null samplers; use
:func:`null_sampler`.  Smooth contamination alternatives g = 1 + sum
c_j b_j for power studies come from :func:`contamination_alternative`.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np
from scipy import integrate, stats

from .basis import OrthonormalBasis, design_matrix, eval_basis, legendre_basis
from .errors import NumericError, SingularMatrixError
from .selection import (
    DimensionBudget,
    PenaltySchedule,
    SelectionOutcome,
    default_budget,
    schwarz_schedule,
    select_dimension,
)
from .statistics import (
    MeanVector,
    NormalizingMatrix,
    ScoreBasis,
    estimate_moment_matrix,
    nt_series,
    nt_statistic,
    snt_statistic,
)

__all__ = [
    "NullDensity",
    "NoiseDensity",
    "ParametricFamily",
    "AlternativeSpec",
    "TestSpec",
    "uniform_null",
    "gaussian_noise",
    "gaussian_location_family",
    "uniformity_spec",
    "independence_spec",
    "deconvolution_spec",
    "composite_spec",
    "rank_transform",
    "uniformity_test",
    "independence_rank_test",
    "deconvolution_score",
    "deconvolution_test",
    "information_blocks",
    "composite_score_statistic",
    "composite_test",
    "run_test",
    "null_sampler",
    "contamination_alternative",
    "noisy_copy_pairs",
]

KINDS = ("uniformity", "independence_rank", "deconvolution", "composite")


# ---------------------------------------------------------------------------
# ingredient types


@dataclass(frozen=True)
class NullDensity:
    """A fully specified continuous null on an interval."""

    name: str
    pdf: Callable[[np.ndarray], np.ndarray]
    cdf: Callable[[np.ndarray], np.ndarray]
    support: tuple[float, float]
    sampler: Callable[[np.random.Generator, int], np.ndarray]


def uniform_null() -> NullDensity:
    return NullDensity(
        name="uniform",
        pdf=lambda x: np.where((x >= 0.0) & (x <= 1.0), 1.0, 0.0),
        cdf=lambda x: np.clip(x, 0.0, 1.0),
        support=(0.0, 1.0),
        sampler=lambda rng, n: rng.random(n),
    )


@dataclass(frozen=True)
class NoiseDensity:
    """Additive noise with known density and a sampler for calibration."""

    name: str
    pdf: Callable[[np.ndarray], np.ndarray]
    scale: float
    sampler: Callable[[np.random.Generator, int], np.ndarray]

    def __post_init__(self):
        if not self.scale > 0:
            raise ValueError("noise scale must be positive")


def gaussian_noise(sigma: float) -> NoiseDensity:
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    return NoiseDensity(
        name=f"gaussian({sigma:g})",
        pdf=lambda e: np.exp(-0.5 * (e / sigma) ** 2) / (sigma * math.sqrt(2 * math.pi)),
        scale=float(sigma),
        sampler=lambda rng, n: sigma * rng.standard_normal(n),
    )


@dataclass(frozen=True)
class ParametricFamily:
    """A smooth family {F(.; beta)} with q real parameters.

    ``fit`` is the maximum-likelihood estimator, ``ppf`` the quantile
    function (used to pick integration ranges), and ``sampler`` draws
    from the family.  ``information_blocks``, when provided, returns
    the pair (I_b, I_bb) for a given (beta, basis, k) and short-cuts
    the generic quadrature in :func:`information_blocks`.
    """

    name: str
    q: int
    cdf: Callable
    logpdf: Callable
    fit: Callable[[np.ndarray], np.ndarray]
    sampler: Callable[[np.random.Generator, int, np.ndarray], np.ndarray]
    ppf: Callable
    information: Callable | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.q < 1:
            raise ValueError("family must have q >= 1 parameters")


def gaussian_location_family() -> ParametricFamily:
    """N(mu, 1) with unknown location.

    The MLE is the sample mean and every information block is free of
    mu (location invariance), so blocks are cached per dimension k.
    """
    cache: dict = {}

    def info(beta, basis, k):
        key = (id(basis), k)
        if key not in cache:
            cache[key] = _numeric_information_blocks(_family, np.zeros(1), basis, k)
        return cache[key]

    _family = ParametricFamily(
        name="gaussian_location",
        q=1,
        cdf=lambda x, beta: stats.norm.cdf(x - beta[0]),
        logpdf=lambda x, beta: -0.5 * (x - beta[0]) ** 2 - 0.5 * math.log(2 * math.pi),
        fit=lambda data: np.array([float(np.mean(data))]),
        sampler=lambda rng, n, beta: beta[0] + rng.standard_normal(n),
        ppf=lambda p, beta: beta[0] + stats.norm.ppf(p),
        information=info,
    )
    return _family


@dataclass(frozen=True)
class AlternativeSpec:
    """A named alternative for power and consistency studies.

    ``sampler(rng, n)`` must produce data of the same shape the test
    kind consumes.  ``first_component`` is the index K of the first
    score direction the alternative actually excites (when known), and
    ``leading_coefficient`` the corresponding score mean; consistency
    probes use them to know which P(S >= K) should climb to one.
    """

    name: str
    sampler: Callable[[np.random.Generator, int], np.ndarray]
    first_component: int | None = None
    leading_coefficient: float | None = None


@dataclass(frozen=True)
class TestSpec:
    """Everything needed to run one of the catalog tests.

    The budget cap may not exceed the basis degree -- the selector can
    only consider dimensions whose scores exist.
    """

    kind: str
    basis: OrthonormalBasis
    penalty: PenaltySchedule
    budget: DimensionBudget
    null_density: NullDensity | None = None
    noise: NoiseDensity | None = None
    family: ParametricFamily | None = None
    beta0: np.ndarray | None = None
    l_draws: int = 200_000
    l_seed: int = 0
    grid_points: int = 2001
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown test kind {self.kind!r}; expected one of {KINDS}")
        if self.budget.cap > self.basis.max_degree:
            raise ValueError(
                f"budget cap {self.budget.cap} exceeds basis max_degree "
                f"{self.basis.max_degree}"
            )
        if self.kind == "deconvolution":
            if self.null_density is None or self.noise is None:
                raise ValueError("deconvolution spec needs null_density and noise")
            if self.l_draws < 1000:
                raise ValueError("l_draws too small to estimate a normalizing matrix")
            if self.grid_points < 64:
                raise ValueError("grid_points too small for score tabulation")
        if self.kind == "composite":
            if self.family is None or self.beta0 is None:
                raise ValueError("composite spec needs family and beta0")
            object.__setattr__(self, "beta0", np.asarray(self.beta0, dtype=float))
            if self.beta0.shape != (self.family.q,):
                raise ValueError(
                    f"beta0 must have shape ({self.family.q},), got {self.beta0.shape}"
                )


def uniformity_spec(
    penalty: PenaltySchedule | None = None,
    budget: DimensionBudget | None = None,
    basis: OrthonormalBasis | None = None,
) -> TestSpec:
    return TestSpec(
        kind="uniformity",
        basis=basis or legendre_basis(12),
        penalty=penalty or schwarz_schedule(),
        budget=budget or default_budget(),
    )


def independence_spec(
    penalty: PenaltySchedule | None = None,
    budget: DimensionBudget | None = None,
    basis: OrthonormalBasis | None = None,
) -> TestSpec:
    return TestSpec(
        kind="independence_rank",
        basis=basis or legendre_basis(12),
        penalty=penalty or schwarz_schedule(),
        budget=budget or default_budget(),
    )


def deconvolution_spec(
    noise: NoiseDensity | None = None,
    null_density: NullDensity | None = None,
    penalty: PenaltySchedule | None = None,
    budget: DimensionBudget | None = None,
    basis: OrthonormalBasis | None = None,
    l_draws: int = 200_000,
    l_seed: int = 0,
    grid_points: int = 2001,
) -> TestSpec:
    return TestSpec(
        kind="deconvolution",
        basis=basis or legendre_basis(12),
        penalty=penalty or schwarz_schedule(),
        budget=budget or default_budget(),
        null_density=null_density or uniform_null(),
        noise=noise or gaussian_noise(0.25),
        l_draws=l_draws,
        l_seed=l_seed,
        grid_points=grid_points,
    )


def composite_spec(
    family: ParametricFamily | None = None,
    beta0=None,
    penalty: PenaltySchedule | None = None,
    budget: DimensionBudget | None = None,
    basis: OrthonormalBasis | None = None,
) -> TestSpec:
    family = family or gaussian_location_family()
    if beta0 is None:
        beta0 = np.zeros(family.q)
    return TestSpec(
        kind="composite",
        basis=basis or legendre_basis(12),
        penalty=penalty or schwarz_schedule(),
        budget=budget or default_budget(),
        family=family,
        beta0=beta0,
    )


# ---------------------------------------------------------------------------
# uniformity and rank independence


def _check_sample(data, ncols: int | None) -> np.ndarray:
    data = np.asarray(data, dtype=float)
    want = 1 if ncols is None else 2
    if data.ndim != want:
        raise ValueError(f"data must be {want}-dimensional, got shape {data.shape}")
    if ncols is not None and data.shape[1] != ncols:
        raise ValueError(f"data must have {ncols} columns, got {data.shape[1]}")
    if data.shape[0] < 2:
        raise ValueError("need at least 2 observations")
    if not np.all(np.isfinite(data)):
        raise ValueError("data contains non-finite values")
    return data


def uniformity_test(data, spec: TestSpec) -> SelectionOutcome:
    """Data-driven smooth test of Uniform[0, 1] against smooth densities."""
    data = _check_sample(data, None)
    n = data.shape[0]
    d = spec.budget.d(n)
    scores = design_matrix(spec.basis, data, d)
    return select_dimension(snt_statistic(scores), spec.penalty, n)


def rank_transform(values, i: int | None = None):
    """Normalized mid-ranks (R - 1/2) / n, with average ranks on ties.

    Passing a one-based index ``i`` returns that element's transformed
    rank alone.  Ties are resolved by averaging, which keeps the ranks
    sum-invariant, but tied data break the distribution-free guarantee,
    so a warning is emitted.
    """
    values = np.asarray(values, dtype=float)
    if values.ndim != 1 or values.size < 1:
        raise ValueError("values must be a non-empty 1-d array")
    if not np.all(np.isfinite(values)):
        raise ValueError("values contain non-finite entries")
    n = values.size
    if np.unique(values).size < n:
        warnings.warn(
            "tied observations: using average ranks; the null distribution "
            "of the rank test is no longer exact",
            UserWarning,
            stacklevel=2,
        )
    u = (stats.rankdata(values, method="average") - 0.5) / n
    if i is not None:
        if not 1 <= i <= n:
            raise ValueError(f"index i={i} outside 1..{n}")
        return float(u[i - 1])
    return u


def independence_rank_test(pairs, spec: TestSpec) -> SelectionOutcome:
    """Distribution-free test of independence for paired continuous data."""
    pairs = _check_sample(pairs, 2)
    n = pairs.shape[0]
    d = spec.budget.d(n)
    u = rank_transform(pairs[:, 0])
    v = rank_transform(pairs[:, 1])
    scores = design_matrix(spec.basis, u, d) * design_matrix(spec.basis, v, d)
    return select_dimension(snt_statistic(scores), spec.penalty, n)


# ---------------------------------------------------------------------------
# deconvolution


def deconvolution_score(
    y: float,
    j: int,
    null_density: NullDensity,
    noise: NoiseDensity,
    basis: OrthonormalBasis | None = None,
    abs_tol: float = 1e-9,
) -> float:
    """Efficient score l_j at one observed (noisy) point.

    Both integrals run over the intersection of the null support with
    [y - 8 scale, y + 8 scale]; a denominator below 1e-300 means the
    observation is impossibly far from the support for this noise and
    raises NumericError rather than dividing by (numerical) zero.
    """
    basis = basis or legendre_basis(12)
    if not 1 <= j <= basis.max_degree:
        raise ValueError(f"degree j={j} outside 1..{basis.max_degree}")
    lo = max(null_density.support[0], y - 8.0 * noise.scale)
    hi = min(null_density.support[1], y + 8.0 * noise.scale)
    if not lo < hi:
        raise NumericError(
            f"observation y={y:.6g} is more than 8 noise scales from the null support"
        )

    def den_f(s):
        return float(null_density.pdf(np.asarray(s)) * noise.pdf(np.asarray(y - s)))

    def num_f(s):
        u = float(np.clip(null_density.cdf(np.asarray(s)), 0.0, 1.0))
        return eval_basis(basis, j, u) * den_f(s)

    den, den_err = integrate.quad(den_f, lo, hi, epsabs=abs_tol, epsrel=1e-8, limit=200)
    if den < 1e-300:
        raise NumericError(
            f"noise-smoothed null density vanishes at y={y:.6g}; score undefined"
        )
    num, num_err = integrate.quad(num_f, lo, hi, epsabs=abs_tol, epsrel=1e-8, limit=200)
    if not (math.isfinite(num) and math.isfinite(den)):
        raise NumericError(f"quadrature failed at y={y:.6g}")
    return num / den


class _DeconvScoreTable:
    """Scores l_1..l_k tabulated on a y-grid, evaluated by interpolation.

    Direct quadrature per observation is exact but prohibitive inside a
    Monte Carlo loop; a fixed fine grid keeps evaluation deterministic
    and identical between calibration draws and observed data, which is
    what matters for a simulated reference distribution.
    """

    def __init__(self, spec: TestSpec, k: int):
        # Tabulate to 6 noise scales beyond the support; past that the
        # smoothed posterior has collapsed onto the nearest support
        # endpoint and the scores are flat, so clamped interpolation is
        # exact to within the table resolution.
        lo = spec.null_density.support[0] - 6.0 * spec.noise.scale
        hi = spec.null_density.support[1] + 6.0 * spec.noise.scale
        self.grid = np.linspace(lo, hi, spec.grid_points)
        self.cols = np.empty((spec.grid_points, k))
        for j in range(1, k + 1):
            self.cols[:, j - 1] = [
                deconvolution_score(y, j, spec.null_density, spec.noise, spec.basis)
                for y in self.grid
            ]
        self.k = k
        self._domain = (
            spec.null_density.support[0] - 8.0 * spec.noise.scale,
            spec.null_density.support[1] + 8.0 * spec.noise.scale,
        )

    def evaluate(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        if y.size and (np.min(y) < self._domain[0] or np.max(y) > self._domain[1]):
            bad = float(y[np.argmax((y < self._domain[0]) | (y > self._domain[1]))])
            raise NumericError(
                f"observation y={bad:.6g} is more than 8 noise scales from the null support"
            )
        return np.column_stack(
            [np.interp(y, self.grid, self.cols[:, j]) for j in range(self.k)]
        )


def _deconv_artifacts(spec: TestSpec, k: int):
    """Cached (score table, moment matrix) for dimension k."""
    key = ("deconv", k)
    if key not in spec._cache:
        table = _DeconvScoreTable(spec, k)
        moment = estimate_moment_matrix(
            null_sampler(spec),
            ScoreBasis(k, table.evaluate),
            spec.l_draws,
            spec.l_seed,
        )
        spec._cache[key] = (table, moment)
    return spec._cache[key]


def deconvolution_test(data, spec: TestSpec) -> SelectionOutcome:
    """Data-driven score test of a null density observed through noise."""
    data = _check_sample(data, None)
    n = data.shape[0]
    d = spec.budget.d(n)
    table, moment = _deconv_artifacts(spec, d)
    scores = table.evaluate(data)
    return select_dimension(nt_series(scores, moment), spec.penalty, n)


# ---------------------------------------------------------------------------
# composite parametric null


def _numeric_information_blocks(
    family: ParametricFamily,
    beta: np.ndarray,
    basis: OrthonormalBasis,
    k: int,
    nodes: int = 400,
    tail: float = 1e-10,
) -> tuple[np.ndarray, np.ndarray]:
    """Quadrature evaluation of I_b (q x k) and I_bb (q x q).

    Expectations are Gauss-Legendre integrals between the ``tail`` and
    1 - ``tail`` quantiles; parameter derivatives are central
    differences, which avoids requiring basis derivatives or analytic
    CDF gradients from the family.
    """
    q = family.q
    lo = family.ppf(tail, beta)
    hi = family.ppf(1.0 - tail, beta)
    t, w = np.polynomial.legendre.leggauss(nodes)
    x = 0.5 * (hi - lo) * t + 0.5 * (hi + lo)
    w = 0.5 * (hi - lo) * w
    dens = np.exp(np.asarray(family.logpdf(x, beta), dtype=float))
    wt = w * dens

    def u_of(b):
        return np.clip(np.asarray(family.cdf(x, b), dtype=float), 0.0, 1.0)

    i_b = np.empty((q, k))
    for tdx in range(q):
        h = 1e-5 * (1.0 + abs(beta[tdx]))
        bp, bm = beta.copy(), beta.copy()
        bp[tdx] += h
        bm[tdx] -= h
        dm = (design_matrix(basis, u_of(bp), k) - design_matrix(basis, u_of(bm), k)) / (2 * h)
        i_b[tdx] = -wt @ dm

    def lp(b):
        return np.asarray(family.logpdf(x, b), dtype=float)

    i_bb = np.empty((q, q))
    steps = [1e-4 * (1.0 + abs(beta[t_])) for t_ in range(q)]
    for a in range(q):
        for bdx in range(a, q):
            ha, hb = steps[a], steps[bdx]
            bpp, bpm, bmp, bmm = (beta.copy() for _ in range(4))
            bpp[a] += ha
            bpp[bdx] += hb
            bpm[a] += ha
            bpm[bdx] -= hb
            bmp[a] -= ha
            bmp[bdx] += hb
            bmm[a] -= ha
            bmm[bdx] -= hb
            d2 = (lp(bpp) - lp(bpm) - lp(bmp) + lp(bmm)) / (4 * ha * hb)
            i_bb[a, bdx] = i_bb[bdx, a] = -float(wt @ d2)
    return i_b, i_bb


def information_blocks(
    family: ParametricFamily,
    beta,
    basis: OrthonormalBasis,
    k: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Cross-information I_b and Fisher information I_bb at beta."""
    beta = np.asarray(beta, dtype=float)
    if beta.shape != (family.q,):
        raise ValueError(f"beta must have shape ({family.q},)")
    if family.information is not None:
        i_b, i_bb = family.information(beta, basis, k)
        return np.asarray(i_b, dtype=float), np.asarray(i_bb, dtype=float)
    return _numeric_information_blocks(family, beta, basis, k)


def _efficient_weight(i_b: np.ndarray, i_bb: np.ndarray, k: int, inverse_middle: bool):
    """Weight matrix I + R restoring the chi-square(k) limit."""
    ib = i_b[:, :k]
    mid = i_bb - ib @ ib.T
    if inverse_middle:
        wmid, vmid = np.linalg.eigh(0.5 * (mid + mid.T))
        if wmid[-1] <= 0 or wmid[0] < 1e-10 * wmid[-1]:
            raise SingularMatrixError(
                f"information middle factor singular at k={k} "
                f"(eigenvalue range [{wmid[0]:.3e}, {wmid[-1]:.3e}]); "
                "the score directions are not identifiable past the fitted parameters"
            )
        mid = (vmid / wmid) @ vmid.T
    r = ib.T @ mid @ ib
    return NormalizingMatrix.from_matrix(np.eye(k) + r, provenance="user_supplied")


def composite_score_statistic(
    data,
    family: ParametricFamily,
    k: int,
    basis: OrthonormalBasis | None = None,
    beta_hat=None,
    inverse_middle: bool = True,
) -> float:
    """Efficient-score statistic W_k for a parametric null with MLE plug-in.

    ``inverse_middle=False`` evaluates the variant without the inverse
    on (I_bb - I_b I_b^T); it is not the correct covariance correction
    (see the module docstring) and exists for side-by-side comparison.
    """
    data = _check_sample(data, None)
    basis = basis or legendre_basis(12)
    if not 1 <= k <= basis.max_degree:
        raise ValueError(f"k={k} outside 1..{basis.max_degree}")
    beta_hat = family.fit(data) if beta_hat is None else np.asarray(beta_hat, dtype=float)
    u = np.clip(np.asarray(family.cdf(data, beta_hat), dtype=float), 0.0, 1.0)
    ybar = MeanVector.from_scores(design_matrix(basis, u, k))
    i_b, i_bb = information_blocks(family, beta_hat, basis, k)
    weight = _efficient_weight(i_b, i_bb, k, inverse_middle)
    return nt_statistic(ybar, weight)


def composite_test(data, spec: TestSpec) -> SelectionOutcome:
    """Data-driven efficient-score test of a parametric family."""
    data = _check_sample(data, None)
    n = data.shape[0]
    d = spec.budget.d(n)
    beta_hat = spec.family.fit(data)
    u = np.clip(np.asarray(spec.family.cdf(data, beta_hat), dtype=float), 0.0, 1.0)
    mean_d = MeanVector.from_scores(design_matrix(spec.basis, u, d))
    i_b, i_bb = information_blocks(spec.family, beta_hat, spec.basis, d)
    series = np.empty(d)
    for k in range(1, d + 1):
        weight = _efficient_weight(i_b, i_bb, k, inverse_middle=True)
        series[k - 1] = nt_statistic(MeanVector(mean_d.values[:k], n), weight)
    return select_dimension(series, spec.penalty, n)


# ---------------------------------------------------------------------------
# dispatch, null samplers, alternatives


def run_test(data, spec: TestSpec) -> SelectionOutcome:
    """Run whichever catalog test ``spec`` describes."""
    if spec.kind == "uniformity":
        return uniformity_test(data, spec)
    if spec.kind == "independence_rank":
        return independence_rank_test(data, spec)
    if spec.kind == "deconvolution":
        return deconvolution_test(data, spec)
    if spec.kind == "composite":
        return composite_test(data, spec)
    raise ValueError(f"unknown test kind {spec.kind!r}")


def null_sampler(spec: TestSpec) -> Callable[[np.random.Generator, int], np.ndarray]:
    """Sampler producing null data of the shape ``spec``'s test consumes."""
    if spec.kind == "uniformity":
        return lambda rng, n: rng.random(n)
    if spec.kind == "independence_rank":
        return lambda rng, n: rng.random((n, 2))
    if spec.kind == "deconvolution":
        null_d, noise = spec.null_density, spec.noise
        return lambda rng, n: null_d.sampler(rng, n) + noise.sampler(rng, n)
    if spec.kind == "composite":
        family, beta0 = spec.family, spec.beta0
        return lambda rng, n: family.sampler(rng, n, beta0)
    raise ValueError(f"unknown test kind {spec.kind!r}")


def noisy_copy_pairs(noise_sd: float, name: str | None = None) -> AlternativeSpec:
    """Dependent pairs (X, X + eps) with X ~ N(0,1), eps ~ N(0, noise_sd^2).

    A stock alternative for the rank independence test: the grade
    correlation excites the first product-score direction, so the
    declared first component is 1.
    """
    if not noise_sd >= 0:
        raise ValueError("noise_sd must be >= 0")

    def sampler(rng: np.random.Generator, n: int) -> np.ndarray:
        x = rng.standard_normal(n)
        return np.column_stack([x, x + noise_sd * rng.standard_normal(n)])

    return AlternativeSpec(
        name=name or f"noisy_copy(sd={noise_sd:g})",
        sampler=sampler,
        first_component=1,
    )


def contamination_alternative(
    coefficients: Mapping[int, float] | Sequence[float],
    basis: OrthonormalBasis | None = None,
    name: str | None = None,
    grid_points: int = 4096,
) -> AlternativeSpec:
    """Smooth contaminated-uniform alternative g = 1 + sum c_j b_j.

    ``coefficients`` is either {degree: coefficient} or a plain
    sequence for degrees 1, 2, ....  The resulting function must be a
    genuine density: if it dips to zero or below anywhere on [0, 1]
    construction fails.  Sampling is by rejection with the exact
    envelope 1 + sum |c_j| sqrt(2j + 1), so draws cost a constant
    factor more than the envelope and stay deterministic per stream.
    """
    basis = basis or legendre_basis(12)
    if isinstance(coefficients, Mapping):
        coeffs = {int(j): float(c) for j, c in coefficients.items() if c != 0.0}
    else:
        coeffs = {j + 1: float(c) for j, c in enumerate(coefficients) if c != 0.0}
    if not coeffs:
        raise ValueError("alternative needs at least one non-zero coefficient")
    jmax = max(coeffs)
    if jmax > basis.max_degree:
        raise ValueError(f"coefficient degree {jmax} exceeds basis max_degree")

    def density(x):
        g = np.ones_like(np.asarray(x, dtype=float))
        for j, c in coeffs.items():
            g = g + c * eval_basis(basis, j, x)
        return g

    grid = np.linspace(0.0, 1.0, grid_points)
    gmin = float(np.min(density(grid)))
    if gmin <= 0.0:
        raise ValueError(
            f"1 + sum c_j b_j dips to {gmin:.4f} on [0, 1]; not a density"
        )
    envelope = 1.0 + sum(abs(c) * math.sqrt(2 * j + 1) for j, c in coeffs.items())

    def sampler(rng: np.random.Generator, n: int) -> np.ndarray:
        out = np.empty(n)
        have = 0
        while have < n:
            m = max(int((n - have) * envelope * 1.2) + 16, 16)
            x = rng.random(m)
            keep = rng.random(m) * envelope <= density(x)
            take = min(n - have, int(np.count_nonzero(keep)))
            out[have : have + take] = x[keep][:take]
            have += take
        return out

    first = min(coeffs)
    label = name or "contamination(" + ", ".join(
        f"c{j}={coeffs[j]:g}" for j in sorted(coeffs)
    ) + ")"
    return AlternativeSpec(
        name=label,
        sampler=sampler,
        first_component=first,
        leading_coefficient=coeffs[first],
    )
