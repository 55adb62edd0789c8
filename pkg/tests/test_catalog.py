"""Catalog test instances: uniformity, rank independence, deconvolution,
composite parametric nulls, and the stock alternatives."""

import math

import numpy as np
import pytest
from scipy import integrate, stats

from ntgof.basis import design_matrix, eval_basis, legendre_basis
from ntgof.catalog import (
    composite_score_statistic,
    composite_spec,
    composite_test,
    contamination_alternative,
    deconvolution_score,
    deconvolution_spec,
    deconvolution_test,
    gaussian_location_family,
    gaussian_noise,
    independence_rank_test,
    independence_spec,
    information_blocks,
    noisy_copy_pairs,
    null_sampler,
    rank_transform,
    run_test,
    uniform_null,
    uniformity_spec,
    uniformity_test,
)
from ntgof.catalog import ParametricFamily, TestSpec as CatalogSpec
from ntgof.errors import NumericError, SingularMatrixError
from ntgof.selection import default_budget, schwarz_schedule
from ntgof.statistics import snt_statistic


# ---------------------------------------------------------------------------
# uniformity


def test_midpoint_grid_is_maximally_uniform():
    n = 100
    data = (np.arange(1, n + 1) - 0.5) / n
    out = uniformity_test(data, uniformity_spec())
    # every low-degree score sum cancels to quadrature error
    assert abs(out.series[0]) < 1e-20
    assert out.s == 1


def test_two_symmetric_points():
    out = uniformity_test(np.array([0.25, 0.75]), uniformity_spec())
    assert out.series[0] == pytest.approx(0.0, abs=1e-28)


def shifted_legendre_explicit(j, x):
    # hand-expanded shifted Legendre polynomials, normalized
    p = {
        1: 2 * x - 1,
        2: 6 * x**2 - 6 * x + 1,
        3: 20 * x**3 - 30 * x**2 + 12 * x - 1,
        4: 70 * x**4 - 140 * x**3 + 90 * x**2 - 20 * x + 1,
        5: 252 * x**5 - 630 * x**4 + 560 * x**3 - 210 * x**2 + 30 * x - 1,
    }[j]
    return math.sqrt(2 * j + 1) * p


def test_uniformity_against_explicit_reimplementation():
    # straight-line reimplementation: explicit polynomials, scalar loops,
    # and the selection rule spelled out
    rng = np.random.default_rng(42)
    n = 1000
    data = rng.random(n)

    d = min(12, max(2, int(n**0.25)))
    assert d == 5
    series = []
    total = 0.0
    for j in range(1, d + 1):
        colsum = 0.0
        for x in data:
            colsum += shifted_legendre_explicit(j, float(x))
        total += (colsum / math.sqrt(n)) ** 2
        series.append(total)
    penalized = [series[k - 1] - k * math.log(n) for k in range(1, d + 1)]
    best = max(penalized)
    s_ref = next(i + 1 for i in range(d) if penalized[i] == best)

    out = uniformity_test(data, uniformity_spec())
    assert out.s == s_ref
    assert out.t_s == pytest.approx(series[s_ref - 1], abs=1e-10)
    assert np.max(np.abs(out.series - np.array(series))) < 1e-10


def test_uniformity_series_permutation_invariant():
    rng = np.random.default_rng(1)
    data = rng.random(60)
    a = uniformity_test(data, uniformity_spec())
    b = uniformity_test(data[::-1].copy(), uniformity_spec())
    assert np.allclose(a.series, b.series, rtol=0, atol=1e-12)
    assert a.s == b.s


def test_uniformity_rejects_out_of_range_data():
    with pytest.raises(ValueError):
        uniformity_test(np.array([0.5, 1.5]), uniformity_spec())


def test_uniformity_rejects_single_point():
    with pytest.raises(ValueError):
        uniformity_test(np.array([0.5]), uniformity_spec())


# ---------------------------------------------------------------------------
# rank transform


def test_rank_single_value():
    assert rank_transform(np.array([7.0]), 1) == 0.5


def test_rank_hand_example():
    # values (10, 30, 20): rank of the 30 is 3 -> (3 - 1/2)/3
    assert rank_transform(np.array([10.0, 30.0, 20.0]), 2) == pytest.approx(2.5 / 3)


def test_rank_last_of_sorted():
    n = 9
    vals = np.arange(n, dtype=float)
    assert rank_transform(vals, n) == pytest.approx((n - 0.5) / n)


def test_rank_vector_between_zero_and_one():
    rng = np.random.default_rng(6)
    u = rank_transform(rng.standard_normal(50))
    assert u.shape == (50,)
    assert np.all((u > 0) & (u < 1))
    # mid-ranks of distinct values enumerate the grid (i - 1/2)/n
    assert np.allclose(np.sort(u), (np.arange(1, 51) - 0.5) / 50)


def test_rank_ties_average_and_warn():
    with pytest.warns(UserWarning, match="tie"):
        u = rank_transform(np.array([1.0, 1.0, 2.0]))
    assert u == pytest.approx([1.0 / 3, 1.0 / 3, 2.5 / 3])


def test_rank_invariant_under_monotone_map():
    rng = np.random.default_rng(12)
    x = rng.standard_normal(40)
    assert np.array_equal(rank_transform(x), rank_transform(np.exp(x)))


# ---------------------------------------------------------------------------
# rank independence


def test_independence_hand_example():
    out = independence_rank_test(np.array([[1.0, 2.0], [2.0, 1.0]]), independence_spec())
    # l_1 sums to -1.5, so T_1 = 1.5^2 / 2
    assert out.series[0] == pytest.approx(1.125)


def test_perfect_dependence_oracle():
    n = 50
    x = np.arange(1, n + 1, dtype=float)
    pairs = np.column_stack([x, x])
    out = independence_rank_test(pairs, independence_spec())
    u = (np.arange(1, n + 1) - 0.5) / n
    t1 = (np.sum(3.0 * (2 * u - 1) ** 2) / math.sqrt(n)) ** 2
    assert out.series[0] == pytest.approx(t1, rel=1e-12)
    assert out.s >= 1 and out.t_s >= out.series[0] - 1e-12


def test_independence_invariant_under_monotone_maps():
    rng = np.random.default_rng(3)
    pairs = rng.standard_normal((80, 2))
    a = independence_rank_test(pairs, independence_spec())
    warped = np.column_stack([np.exp(pairs[:, 0]), pairs[:, 1] ** 3])
    b = independence_rank_test(warped, independence_spec())
    assert a.s == b.s
    assert np.array_equal(a.series, b.series)


def test_independence_needs_pairs():
    with pytest.raises(ValueError):
        independence_rank_test(np.array([[1.0, 2.0]]), independence_spec())
    with pytest.raises(ValueError):
        independence_rank_test(np.ones((5, 3)), independence_spec())


# ---------------------------------------------------------------------------
# deconvolution scores


def test_score_degenerates_to_clean_basis_at_tiny_noise():
    noise = gaussian_noise(1e-4)
    f0 = uniform_null()
    for y in (0.2, 0.4, 0.7):
        got = deconvolution_score(y, 1, f0, noise)
        assert got == pytest.approx(eval_basis(legendre_basis(12), 1, y), abs=1e-3)


def test_score_odd_symmetry():
    noise = gaussian_noise(0.25)
    f0 = uniform_null()
    assert deconvolution_score(0.5, 1, f0, noise) == pytest.approx(0.0, abs=1e-10)
    left = deconvolution_score(0.1, 1, f0, noise)
    right = deconvolution_score(0.9, 1, f0, noise)
    assert left == pytest.approx(-right, rel=1e-8)


def test_score_even_symmetry():
    noise = gaussian_noise(0.25)
    f0 = uniform_null()
    left = deconvolution_score(0.2, 2, f0, noise)
    right = deconvolution_score(0.8, 2, f0, noise)
    assert left == pytest.approx(right, rel=1e-8)


def test_score_against_trapezoid_oracle():
    # independent fine-grid trapezoid evaluation of both integrals
    sigma, y = 0.25, 0.9
    s = np.linspace(max(0.0, y - 8 * sigma), min(1.0, y + 8 * sigma), 200_001)
    h = np.exp(-0.5 * ((y - s) / sigma) ** 2) / (sigma * math.sqrt(2 * math.pi))
    b1 = math.sqrt(3.0) * (2 * s - 1)
    num = integrate.trapezoid(b1 * h, s)
    den = integrate.trapezoid(h, s)
    want = num / den
    got = deconvolution_score(y, 1, uniform_null(), gaussian_noise(sigma))
    assert got == pytest.approx(want, abs=1e-6)
    assert got > 0


def test_score_zero_mean_under_observed_null():
    # integral of l_1 against the noise-smoothed null density vanishes
    sigma = 0.25
    noise = gaussian_noise(sigma)
    f0 = uniform_null()
    ys = np.linspace(-6 * sigma, 1 + 6 * sigma, 401)
    scores = np.array([deconvolution_score(y, 1, f0, noise) for y in ys])
    g0 = stats.norm.cdf(ys / sigma) - stats.norm.cdf((ys - 1) / sigma)
    assert integrate.trapezoid(scores * g0, ys) == pytest.approx(0.0, abs=1e-6)


def test_score_rejects_far_observation():
    with pytest.raises(NumericError):
        deconvolution_score(25.0, 1, uniform_null(), gaussian_noise(0.25))


def test_score_rejects_bad_degree():
    with pytest.raises(ValueError):
        deconvolution_score(0.5, 0, uniform_null(), gaussian_noise(0.25))


def small_deconv_spec():
    # cheap artifacts for test runs: coarse score table, modest
    # normalizing-matrix sample
    return deconvolution_spec(l_draws=20_000, grid_points=501)


def test_deconvolution_test_runs_and_caches():
    spec = small_deconv_spec()
    rng = np.random.default_rng(0)
    n = 144  # d(144) = 3 dimensions of score table
    data = rng.random(n) + 0.25 * rng.standard_normal(n)
    out1 = run_test(data, spec)
    assert out1.s >= 1
    assert math.isfinite(out1.t_s)
    assert len(out1.series) == spec.budget.d(n)
    # artifacts are cached on the spec: a second run reuses them
    assert ("deconv", 3) in spec._cache
    out2 = deconvolution_test(data, spec)
    assert out2.t_s == out1.t_s
    # tabulated scores track the direct quadrature closely
    table, _ = spec._cache[("deconv", 3)]
    for y in (-0.3, 0.12, 0.55, 1.31):
        direct = deconvolution_score(y, 2, spec.null_density, spec.noise, spec.basis)
        assert table.evaluate(np.array([y]))[0, 1] == pytest.approx(direct, abs=1e-4)


def test_deconvolution_test_rejects_far_data():
    spec = small_deconv_spec()
    with pytest.raises(NumericError):
        deconvolution_test(np.array([0.5, 0.6, 40.0]), spec)


# ---------------------------------------------------------------------------
# composite parametric nulls


def test_gaussian_location_information_blocks():
    fam = gaussian_location_family()
    i_b, i_bb = information_blocks(fam, np.zeros(1), legendre_basis(12), 6)
    assert i_bb[0, 0] == pytest.approx(1.0, rel=1e-6)  # Fisher info of N(mu, 1)
    # cross terms are Fourier coefficients of the standard normal
    # quantile; the first is sqrt(3/pi), even degrees vanish by symmetry
    assert i_b[0, 0] == pytest.approx(math.sqrt(3.0 / math.pi), rel=1e-6)
    assert abs(i_b[0, 1]) < 1e-8
    assert abs(i_b[0, 3]) < 1e-8
    assert abs(i_b[0, 5]) < 1e-8


def test_composite_weight_matches_partitioned_inverse():
    # (I + I_b^T (I_bb - I_b I_b^T)^{-1} I_b) must equal the inverse of
    # (I - I_b^T I_bb^{-1} I_b); both are the efficient-score covariance
    fam = gaussian_location_family()
    k = 4
    i_b, i_bb = information_blocks(fam, np.zeros(1), legendre_basis(12), k)
    ib = i_b[:, :k]
    mid = np.linalg.inv(i_bb - ib @ ib.T)
    plus_r = np.eye(k) + ib.T @ mid @ ib
    woodbury = np.linalg.inv(np.eye(k) - ib.T @ np.linalg.inv(i_bb) @ ib)
    assert np.allclose(plus_r, woodbury, rtol=1e-10, atol=1e-12)


def test_composite_statistic_location_invariant():
    rng = np.random.default_rng(10)
    data = rng.standard_normal(300)
    spec = composite_spec()
    a = composite_test(data, spec)
    b = composite_test(data + 7.5, spec)
    assert a.s == b.s
    assert np.allclose(a.series, b.series, rtol=0, atol=1e-9)


def test_composite_reduces_to_cumulative_form_when_orthogonal():
    # a family whose scores are orthogonal to every basis direction has
    # R = 0, so W_k collapses to the unweighted cumulative statistic
    flat = ParametricFamily(
        name="fixed_uniform",
        q=1,
        cdf=lambda x, beta: np.clip(x, 0.0, 1.0),
        logpdf=lambda x, beta: np.zeros_like(np.asarray(x, dtype=float)),
        fit=lambda data: np.zeros(1),
        sampler=lambda rng, n, beta: rng.random(n),
        ppf=lambda p, beta: p,
        information=lambda beta, basis, k: (np.zeros((1, k)), np.ones((1, 1))),
    )
    rng = np.random.default_rng(2)
    data = rng.random(100)
    for k in (1, 2, 4):
        w = composite_score_statistic(data, flat, k, beta_hat=np.zeros(1))
        t = snt_statistic(design_matrix(legendre_basis(12), data, k))[-1]
        assert w == pytest.approx(t, abs=1e-8)


def test_composite_chi_square_mean():
    # W_1 over null replications should average near 1
    fam = gaussian_location_family()
    vals = []
    rng = np.random.default_rng(5)
    for _ in range(2000):
        data = rng.standard_normal(500)
        vals.append(composite_score_statistic(data, fam, 1))
    assert 0.8 < np.mean(vals) < 1.2


def test_composite_singular_middle_factor():
    bad = ParametricFamily(
        name="degenerate",
        q=1,
        cdf=lambda x, beta: np.clip(x, 0.0, 1.0),
        logpdf=lambda x, beta: np.zeros_like(np.asarray(x, dtype=float)),
        fit=lambda data: np.zeros(1),
        sampler=lambda rng, n, beta: rng.random(n),
        ppf=lambda p, beta: p,
        # |I_b| = 1 with I_bb = 1 makes I_bb - I_b I_b^T exactly zero
        information=lambda beta, basis, k: (
            np.concatenate([[1.0], np.zeros(k - 1)]).reshape(1, k),
            np.ones((1, 1)),
        ),
    )
    rng = np.random.default_rng(8)
    with pytest.raises(SingularMatrixError):
        composite_score_statistic(rng.random(50), bad, 2, beta_hat=np.zeros(1))


def test_composite_inverse_middle_flag_changes_value():
    fam = gaussian_location_family()
    rng = np.random.default_rng(14)
    data = rng.standard_normal(200)
    with_inv = composite_score_statistic(data, fam, 3, inverse_middle=True)
    without = composite_score_statistic(data, fam, 3, inverse_middle=False)
    assert with_inv != without


# ---------------------------------------------------------------------------
# spec construction and dispatch


def test_budget_cap_must_fit_basis():
    with pytest.raises(ValueError, match="cap"):
        CatalogSpec(
            kind="uniformity",
            basis=legendre_basis(3),
            penalty=schwarz_schedule(),
            budget=default_budget(),  # cap 12 > max_degree 3
        )


def test_deconvolution_spec_requires_ingredients():
    with pytest.raises(ValueError):
        CatalogSpec(
            kind="deconvolution",
            basis=legendre_basis(12),
            penalty=schwarz_schedule(),
            budget=default_budget(),
        )


def test_unknown_kind_rejected():
    with pytest.raises(ValueError, match="kind"):
        CatalogSpec(
            kind="bogus",
            basis=legendre_basis(12),
            penalty=schwarz_schedule(),
            budget=default_budget(),
        )


def test_composite_beta0_shape_checked():
    with pytest.raises(ValueError, match="beta0"):
        composite_spec(beta0=np.zeros(2))


def test_dispatch_matches_direct_call():
    rng = np.random.default_rng(4)
    data = rng.random(50)
    spec = uniformity_spec()
    a = run_test(data, spec)
    b = uniformity_test(data, spec)
    assert a.s == b.s and a.t_s == b.t_s


@pytest.mark.parametrize(
    "spec, shape",
    [
        (uniformity_spec(), (30,)),
        (independence_spec(), (30, 2)),
        (composite_spec(), (30,)),
    ],
)
def test_null_sampler_shapes(spec, shape):
    rng = np.random.default_rng(0)
    data = null_sampler(spec)(rng, 30)
    assert data.shape == shape
    out = run_test(data, spec)
    assert out.s >= 1


def test_null_sampler_deconvolution_shape():
    spec = small_deconv_spec()
    data = null_sampler(spec)(np.random.default_rng(0), 100)
    assert data.shape == (100,)
    # convolution widens the support beyond the unit interval
    assert data.min() < 0.5 < data.max()


# ---------------------------------------------------------------------------
# alternatives


def test_contamination_mean_matches_coefficient():
    alt = contamination_alternative({3: 0.3})
    assert alt.first_component == 3
    assert alt.leading_coefficient == pytest.approx(0.3)
    rng = np.random.default_rng(0)
    x = alt.sampler(rng, 200_000)
    assert x.shape == (200_000,)
    assert np.all((x >= 0) & (x <= 1))
    b3 = eval_basis(legendre_basis(12), 3, x)
    # E b_3 = 0.3 under the contaminated density; 4 sigma MC margin
    se = np.std(b3) / math.sqrt(x.size)
    assert abs(np.mean(b3) - 0.3) < 4 * se


def test_contamination_sequence_form():
    alt = contamination_alternative([0.2, 0.1])
    assert alt.first_component == 1
    assert alt.leading_coefficient == pytest.approx(0.2)


def test_contamination_rejects_non_density():
    # 1 + 0.6 b_1 dips below zero near x = 0
    with pytest.raises(ValueError, match="density"):
        contamination_alternative({1: 0.6})


def test_contamination_rejects_empty():
    with pytest.raises(ValueError):
        contamination_alternative({})


def test_contamination_sampler_deterministic():
    alt = contamination_alternative({2: 0.25})
    a = alt.sampler(np.random.default_rng(123), 1000)
    b = alt.sampler(np.random.default_rng(123), 1000)
    assert np.array_equal(a, b)


def test_noisy_copy_pairs():
    alt = noisy_copy_pairs(0.5)
    assert alt.first_component == 1
    pairs = alt.sampler(np.random.default_rng(1), 4000)
    assert pairs.shape == (4000, 2)
    r = np.corrcoef(pairs[:, 0], pairs[:, 1])[0, 1]
    assert r > 0.8  # correlation 1/sqrt(1.25) ~ 0.894
