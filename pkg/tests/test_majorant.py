"""Finite-sample tail majorants: values, windows, parameter scaling."""

import math

import numpy as np
import pytest

from ntgof.basis import sup_norm_bound
from ntgof.errors import WindowViolationError
from ntgof.majorant import (
    PROHOROV_CONSTANT,
    MajorantParams,
    b2_tail_sum,
    prohorov_bound,
    prohorov_ptype_params,
    ptype_majorant,
)


# ---------------------------------------------------------------------------
# the explicit tail bound


def test_limit_value_k1():
    # k=1, y=sqrt(2), n -> inf: (C/Gamma(1/2)) * (y^2/2)^0 * e^{-1}
    got = prohorov_bound(1, math.sqrt(2.0), n=math.inf)
    want = PROHOROV_CONSTANT / math.sqrt(math.pi) * math.exp(-1.0)
    assert got == pytest.approx(want, rel=1e-12)
    assert got == pytest.approx(31176.6486, abs=5e-4)


def test_calculator_value_k2():
    # k=2, y=4, n=1e6, M=sqrt(5): Gamma(1)=1, (8)^{1/2}, exp{-8(1 - 4 sqrt 5/1000)}
    got = prohorov_bound(2, 4.0, n=1e6, envelope=math.sqrt(5.0))
    want = PROHOROV_CONSTANT * math.sqrt(8.0) * math.exp(-8.0 * (1.0 - math.sqrt(5.0) * 4.0 / 1000.0))
    assert got == pytest.approx(want, rel=1e-12)


def test_window_violation_low():
    with pytest.raises(WindowViolationError):
        prohorov_bound(2, 1.0, n=1e6)  # y^2 = 1 < 2k = 4


def test_window_violation_high():
    # upper end of the window is sqrt(n)/M(k)
    k, n = 3, 900.0
    y_hi = math.sqrt(n) / sup_norm_bound(k)
    prohorov_bound(k, y_hi, n=n)  # boundary is allowed
    with pytest.raises(WindowViolationError):
        prohorov_bound(k, y_hi * 1.01, n=n)


def test_default_envelope_is_score_bound():
    got = prohorov_bound(4, 4.0, n=1e6)
    want = prohorov_bound(4, 4.0, n=1e6, envelope=sup_norm_bound(4))
    assert got == want


def test_decreasing_in_y_far_from_slack():
    # for large n the exponential term dominates and the bound decays
    ys = np.linspace(4.0, 12.0, 40)
    vals = [prohorov_bound(2, y, n=1e8) for y in ys]
    assert all(b < a for a, b in zip(vals, vals[1:]))


def test_finite_n_is_larger_than_limit():
    # the slack term M y / sqrt(n) weakens the exponent at finite n
    y = 4.0
    assert prohorov_bound(2, y, n=2000.0) > prohorov_bound(2, y, n=math.inf)


def test_log_space_survives_large_k():
    # direct Gamma(k/2) would overflow near k ~ 300
    val = prohorov_bound(340, math.sqrt(2.0 * 340.0), n=1e12)
    assert math.isfinite(val)
    assert val >= 0.0


# ---------------------------------------------------------------------------
# parametric majorant family


def unit_params(c2=2.0):
    return MajorantParams(
        c1=1.0,
        c2=c2,
        phi1=lambda k: 1.0,
        phi2=lambda lam: 1.0,
        window=lambda k: (0.0, math.inf),
    )


def test_unit_parameters_value():
    got = ptype_majorant(unit_params(), k=1, y=3.0)
    assert got == pytest.approx(math.exp(-4.5), rel=1e-12)
    assert got == pytest.approx(0.011109, abs=1e-6)


def test_linear_in_c1():
    p1 = unit_params()
    p2 = MajorantParams(
        c1=2.0, c2=p1.c2, phi1=p1.phi1, phi2=p1.phi2, window=p1.window
    )
    y = 2.7
    assert ptype_majorant(p2, 3, y) == pytest.approx(2.0 * ptype_majorant(p1, 3, y), rel=1e-15)


def test_window_enforced():
    params = MajorantParams(
        c1=1.0,
        c2=2.0,
        phi1=lambda k: 1.0,
        phi2=lambda lam: 1.0,
        window=lambda k: (math.sqrt(2.0 * k), math.inf),
    )
    with pytest.raises(WindowViolationError):
        ptype_majorant(params, 3, 1.0)  # below the window floor sqrt(6)
    with pytest.raises(ValueError):
        ptype_majorant(params, 3, 0.0)  # y = 0 rejected before any window


def test_eigenvalue_argument_reaches_phi2():
    params = MajorantParams(
        c1=1.0,
        c2=2.0,
        phi1=lambda k: 1.0,
        phi2=lambda lam: float(np.prod(lam)),
        window=lambda k: (0.0, math.inf),
    )
    got = ptype_majorant(params, 2, 1.0, eigenvalues=np.array([4.0, 0.5]))
    base = ptype_majorant(params, 2, 1.0, eigenvalues=np.array([1.0, 1.0]))
    assert got == pytest.approx(2.0 * base, rel=1e-14)


def test_invalid_params_rejected():
    with pytest.raises(ValueError):
        MajorantParams(
            c1=0.0, c2=2.0, phi1=lambda k: 1.0, phi2=lambda lam: 1.0,
            window=lambda k: (0.0, 1.0),
        )
    with pytest.raises(ValueError):
        MajorantParams(
            c1=1.0, c2=-1.0, phi1=lambda k: 1.0, phi2=lambda lam: 1.0,
            window=lambda k: (0.0, 1.0),
        )


def test_frozen_slack_params_match_explicit_bound():
    # with the slack eta frozen, the parametric form reproduces the
    # explicit bound exactly at any y where 1 - M y / sqrt(n) = 1 - eta
    n = 1e6
    k = 2
    y = 4.0
    eta = sup_norm_bound(k) * y / math.sqrt(n)
    params = prohorov_ptype_params(n, eta)
    got = ptype_majorant(params, k, y)
    want = prohorov_bound(k, y, n=n)
    assert got == pytest.approx(want, rel=1e-12)


# ---------------------------------------------------------------------------
# tail summability


def test_single_term_sum():
    params = prohorov_ptype_params(1e6, eta=0.1)
    phi = lambda k, y: ptype_majorant(params, k, y)
    s = lambda k, n: math.sqrt(2.0 * k)
    one = b2_tail_sum(phi, k_from=5, k_to=5, s=s, n=1e6)
    assert one == pytest.approx(phi(5, s(5, 1e6)), rel=1e-14)


def test_sum_matches_manual_accumulation():
    params = prohorov_ptype_params(1e6, eta=0.1)
    phi = lambda k, y: ptype_majorant(params, k, y)
    s = lambda k, n: math.sqrt(2.0 * k)
    total = b2_tail_sum(phi, k_from=4, k_to=12, s=s, n=1e6)
    manual = sum(phi(k, s(k, 1e6)) for k in range(4, 13))
    assert total == pytest.approx(manual, rel=1e-14)
    assert math.isfinite(total)


def test_sum_works_with_explicit_bound():
    s = lambda k, n: math.sqrt(2.0 * k)
    phi = lambda k, y: prohorov_bound(k, y, n=1e6)
    total = b2_tail_sum(phi, k_from=4, k_to=12, s=s, n=1e6)
    manual = sum(phi(k, s(k, 1e6)) for k in range(4, 13))
    assert total == pytest.approx(manual, rel=1e-14)


def test_sum_rejects_reversed_range():
    params = prohorov_ptype_params(1e6, eta=0.1)
    phi = lambda k, y: ptype_majorant(params, k, y)
    with pytest.raises(ValueError):
        b2_tail_sum(phi, k_from=6, k_to=5, s=lambda k, n: math.sqrt(2 * k), n=1e6)
