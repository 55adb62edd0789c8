"""Score-based test statistics and their normalizing matrices.

Everything here operates on an n-by-k *score matrix*: row i holds the k
score components l_1(Y_i), ..., l_k(Y_i) of one observation.  Under the
null each component has mean zero, so the scaled column means

    v = n^{-1/2} * (sum_i l_1(Y_i), ..., sum_i l_k(Y_i))

are asymptotically centered Gaussian, and quadratic forms in v are the
natural test statistics.

Two normalizations are supported.  With an orthonormal score system the
components are already uncorrelated with unit variance and the statistic
is simply the cumulative sum of squares

    T_k = sum_{j<=k} ( n^{-1/2} sum_i l_j(Y_i) )^2,

computed by :func:`snt_statistic` for every dimension up to k at once.
For a general score system the squared norm is taken in the metric of
the inverse second-moment matrix L = (E_0 l(Y)^T l(Y))^{-1}:

    T_k = n * lbar L lbar^T,        lbar = column means,

computed by :func:`nt_statistic`.  When the score components are only
available through estimates (plug-in parameters, deconvolution weights,
numerical integrals), the same quadratic form applied to the estimated
scores is computed by :func:`gnt_statistic`; with exact scores it
reproduces :func:`nt_statistic` bit for bit because it goes through the
identical code path.

L is rarely available in closed form outside the orthonormal case, so
:func:`estimate_normalizing_matrix` builds it from a null sampler by
plain Monte Carlo: accumulate the empirical second-moment matrix in
fixed-size chunks (each chunk on its own counter-based stream, so the
result does not depend on the worker count), sanity-check that every
component mean is within a few standard errors of zero, and invert by
symmetric eigendecomposition with a hard condition-number gate.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import basis as _basis
from ._rng import resolve_workers, substream
from .errors import ScoreMeanError, SingularMatrixError

__all__ = [
    "ScoreBasis",
    "MeanVector",
    "NormalizingMatrix",
    "snt_statistic",
    "nt_statistic",
    "gnt_statistic",
    "nt_series",
    "estimate_moment_matrix",
    "estimate_normalizing_matrix",
    "ordered_eigenvalues",
]

# Relative eigenvalue floor below which a moment matrix is declared
# singular (condition number gate of 1e10).
_COND_GATE = 1e-10


class ScoreBasis:
    """A k-dimensional score system evaluated on observation batches.

    ``evaluate`` maps a batch of m observations (whatever shape one
    observation has) to an (m, k) float matrix of score components.
    """

    def __init__(self, k: int, evaluate: Callable[[np.ndarray], np.ndarray]):
        if k < 1:
            raise ValueError("score dimension k must be >= 1")
        self.k = int(k)
        self._evaluate = evaluate

    @classmethod
    def from_orthonormal_basis(cls, basis: _basis.OrthonormalBasis, k: int) -> "ScoreBasis":
        """Scores b_1, ..., b_k of an orthonormal basis on [0, 1]."""
        if k > basis.max_degree:
            raise ValueError(f"k={k} exceeds basis max_degree={basis.max_degree}")
        return cls(k, lambda obs: _basis.design_matrix(basis, obs, k))

    @classmethod
    def from_components(cls, components: Sequence[Callable]) -> "ScoreBasis":
        """Scores given as one vectorized callable per component."""
        funcs = tuple(components)

        def evaluate(obs):
            return np.column_stack([np.asarray(f(obs), dtype=float) for f in funcs])

        return cls(len(funcs), evaluate)

    def evaluate(self, obs) -> np.ndarray:
        scores = np.asarray(self._evaluate(obs), dtype=float)
        if scores.ndim != 2 or scores.shape[1] != self.k:
            raise ValueError(
                f"score evaluator returned shape {scores.shape}, expected (m, {self.k})"
            )
        return scores


@dataclass(frozen=True)
class MeanVector:
    """Column means of a score matrix together with the sample size."""

    values: np.ndarray
    n: int

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        if self.values.ndim != 1:
            raise ValueError("mean vector must be one-dimensional")
        if self.n < 1:
            raise ValueError("sample size must be >= 1")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("mean vector contains non-finite entries")

    @property
    def k(self) -> int:
        return self.values.shape[0]

    @classmethod
    def from_scores(cls, scores: np.ndarray) -> "MeanVector":
        scores = _as_score_matrix(scores)
        return cls(values=scores.mean(axis=0), n=scores.shape[0])


@dataclass(frozen=True)
class NormalizingMatrix:
    """Symmetric positive-definite weight matrix of an NT quadratic form.

    ``eigenvalues`` are stored in descending order; ``provenance``
    records where the matrix came from (``analytic_identity``,
    ``estimated_from_null_sampler`` or ``user_supplied``), because a
    calibration report has to say whether its normalization was exact
    or itself estimated.
    """

    matrix: np.ndarray
    eigenvalues: np.ndarray
    provenance: str

    _PROVENANCES = ("analytic_identity", "estimated_from_null_sampler", "user_supplied")

    def __post_init__(self):
        object.__setattr__(self, "matrix", np.asarray(self.matrix, dtype=float))
        object.__setattr__(self, "eigenvalues", np.asarray(self.eigenvalues, dtype=float))
        a = self.matrix
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("normalizing matrix must be square")
        scale = max(1.0, float(np.max(np.abs(a))))
        if np.max(np.abs(a - a.T)) > 1e-12 * scale:
            raise ValueError("normalizing matrix must be symmetric")
        if self.eigenvalues.shape != (a.shape[0],):
            raise ValueError("eigenvalue vector has wrong length")
        if np.any(np.diff(self.eigenvalues) > 0):
            raise ValueError("eigenvalues must be in descending order")
        if self.eigenvalues[-1] <= 0:
            raise ValueError("normalizing matrix must be positive definite")
        if self.provenance not in self._PROVENANCES:
            raise ValueError(f"unknown provenance {self.provenance!r}")

    @property
    def k(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def identity(cls, k: int) -> "NormalizingMatrix":
        """Exact identity weight: orthonormal scores need no rotation."""
        return cls(np.eye(k), np.ones(k), "analytic_identity")

    @classmethod
    def from_matrix(cls, matrix, provenance: str = "user_supplied") -> "NormalizingMatrix":
        a = np.asarray(matrix, dtype=float)
        a = 0.5 * (a + a.T)
        return cls(a, ordered_eigenvalues(a), provenance)

    @classmethod
    def from_moment_matrix(cls, moment, provenance: str) -> "NormalizingMatrix":
        """Invert a second-moment matrix E[l^T l] into the weight L.

        Inversion is by symmetric eigendecomposition; an eigenvalue
        below 1e-10 times the largest one means the score components
        are (numerically) linearly dependent and there is no honest L,
        so this raises SingularMatrixError instead of regularizing.
        """
        m = np.asarray(moment, dtype=float)
        m = 0.5 * (m + m.T)
        w, v = np.linalg.eigh(m)
        if w[-1] <= 0 or w[0] < _COND_GATE * w[-1]:
            raise SingularMatrixError(
                f"second-moment matrix is singular at dimension {m.shape[0]} "
                f"(eigenvalue range [{w[0]:.3e}, {w[-1]:.3e}])"
            )
        inv = (v / w) @ v.T
        inv = 0.5 * (inv + inv.T)
        return cls(inv, np.sort(1.0 / w)[::-1], provenance)


def _as_score_matrix(scores) -> np.ndarray:
    scores = np.asarray(scores, dtype=float)
    if scores.ndim != 2:
        raise ValueError(f"score matrix must be 2-d, got shape {scores.shape}")
    if scores.shape[0] < 1:
        raise ValueError("score matrix has no rows")
    if not np.all(np.isfinite(scores)):
        raise ValueError("score matrix contains non-finite entries")
    return scores


def snt_statistic(scores) -> np.ndarray:
    """Cumulative sums-of-squares statistics T_1, ..., T_k.

    ``scores`` is the n-by-k score matrix of an orthonormal system.
    Returns the length-k series with T_k = sum_{j<=k} (n^{-1/2} S_j)^2
    where S_j is the j-th column sum; the series is non-decreasing by
    construction.
    """
    scores = _as_score_matrix(scores)
    n = scores.shape[0]
    v = scores.sum(axis=0) / math.sqrt(n)
    return np.cumsum(v * v)


def nt_statistic(mean: MeanVector, weight: NormalizingMatrix) -> float:
    """Quadratic form T = n * lbar L lbar^T of the score mean."""
    if mean.k != weight.k:
        raise ValueError(f"dimension mismatch: mean k={mean.k}, weight k={weight.k}")
    v = mean.values
    return float(mean.n * (v @ weight.matrix @ v))


def gnt_statistic(scores, weight: NormalizingMatrix) -> float:
    """NT quadratic form evaluated on estimated scores.

    Identical computation to :func:`nt_statistic` applied to the column
    means of ``scores``; with exact score evaluations the two agree bit
    for bit.
    """
    return nt_statistic(MeanVector.from_scores(scores), weight)


def nt_series(scores, moment) -> np.ndarray:
    """T_1, ..., T_k with nested normalizations from one moment matrix.

    For each dimension k' <= k the weight is the inverse of the leading
    k'-by-k' block of ``moment`` (the second-moment matrix of the score
    system), which is the correct normalization for the truncated score
    vector -- note this differs from taking blocks of the full inverse.
    """
    scores = _as_score_matrix(scores)
    moment = np.asarray(moment, dtype=float)
    k = scores.shape[1]
    if moment.shape != (k, k):
        raise ValueError(f"moment matrix shape {moment.shape} does not match k={k}")
    mean = MeanVector.from_scores(scores)
    out = np.empty(k)
    for j in range(1, k + 1):
        w = NormalizingMatrix.from_moment_matrix(
            moment[:j, :j], provenance="estimated_from_null_sampler"
        )
        out[j - 1] = nt_statistic(MeanVector(mean.values[:j], mean.n), w)
    return out


def _moment_chunks(draws: int, chunk_size: int) -> list[int]:
    sizes = [chunk_size] * (draws // chunk_size)
    if draws % chunk_size:
        sizes.append(draws % chunk_size)
    return sizes


def estimate_moment_matrix(
    null_sampler: Callable[[np.random.Generator, int], np.ndarray],
    score_basis: ScoreBasis,
    draws: int,
    seed: int,
    *,
    workers: int | None = None,
    chunk_size: int = 4096,
    mean_gate: float = 4.0,
) -> np.ndarray:
    """Empirical second-moment matrix n^{-1} sum l(Y_i)^T l(Y_i).

    Draws come from ``null_sampler(rng, m)`` in fixed chunks, one Philox
    substream per chunk, and partial sums are reduced in chunk order, so
    the result is bit-identical for any worker count.  Each component
    mean must land within ``mean_gate`` standard errors of zero; a
    violation means the sampler is not the null of this score system
    and raises ScoreMeanError rather than returning a biased matrix.
    """
    k = score_basis.k
    if draws < 10 * k * k:
        raise ValueError(f"need at least 10*k^2 = {10 * k * k} draws, got {draws}")
    sizes = _moment_chunks(draws, chunk_size)

    def one_chunk(item):
        index, m = item
        obs = null_sampler(substream(seed, index), m)
        s = score_basis.evaluate(obs)
        if s.shape[0] != m:
            raise ValueError("null sampler returned wrong batch size")
        return s.T @ s, s.sum(axis=0)

    workers = resolve_workers(workers)
    items = list(enumerate(sizes))
    if workers > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(one_chunk, items))
    else:
        partials = [one_chunk(it) for it in items]

    outer = np.zeros((k, k))
    total = np.zeros(k)
    for po, ps in partials:  # fixed reduction order
        outer += po
        total += ps

    moment = outer / draws
    mean = total / draws
    var = np.maximum(np.diag(moment) - mean * mean, 0.0)
    se = np.sqrt(var / draws)
    off = np.abs(mean) > mean_gate * np.maximum(se, 1e-300)
    if np.any(off):
        j = int(np.argmax(off))
        raise ScoreMeanError(
            f"component {j + 1} has mean {mean[j]:.4e} "
            f"({abs(mean[j]) / max(se[j], 1e-300):.1f} standard errors from zero); "
            "sampler and score system disagree about the null"
        )
    return 0.5 * (moment + moment.T)


def estimate_normalizing_matrix(
    null_sampler: Callable[[np.random.Generator, int], np.ndarray],
    score_basis: ScoreBasis,
    draws: int,
    seed: int,
    *,
    workers: int | None = None,
    chunk_size: int = 4096,
    mean_gate: float = 4.0,
) -> NormalizingMatrix:
    """Monte Carlo estimate of L = (E_0 l^T l)^{-1} from a null sampler."""
    moment = estimate_moment_matrix(
        null_sampler,
        score_basis,
        draws,
        seed,
        workers=workers,
        chunk_size=chunk_size,
        mean_gate=mean_gate,
    )
    return NormalizingMatrix.from_moment_matrix(
        moment, provenance="estimated_from_null_sampler"
    )


def ordered_eigenvalues(a) -> np.ndarray:
    """Eigenvalues of a symmetric matrix, descending."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("matrix must be square")
    scale = max(1.0, float(np.max(np.abs(a))))
    if np.max(np.abs(a - a.T)) > 1e-12 * scale:
        raise ValueError("matrix must be symmetric")
    return np.sort(np.linalg.eigvalsh(a))[::-1]
