import json
import math

import numpy as np
import pytest

from frdecomp.poly import poly_eval
from frdecomp.weights import (
    NonnegativityError,
    WeightParams,
    adaptive_simpson,
    aj_family,
    build_bump_profile,
    c0_constant,
    family_from_json,
    family_to_json,
    partial_fraction_coeffs,
    phi_sq_hat_exact,
    profile_from_json,
    profile_to_json,
    small_t_weight,
    vt_polynomial,
    wbar_value,
    wtilde,
)


def test_profile_invariants(profile_quarter):
    p = profile_quarter
    assert np.all(p.phi >= 0.0)
    assert np.all(p.phi_sq_hat >= 0.0)
    assert p.c0 > 0 and all(c > 0 for c in p.cprime)
    # transform of phi^2 vanishes beyond 4h
    assert p.phi_sq_hat_at(np.array([1.0, 1.3])).max() == 0.0


def test_profile_support_arithmetic(profile_quarter, profile_half):
    # 4 * (1/4) = 1 and 4 * (1/2) = 2
    assert profile_quarter.phi_sq_hat_step * (len(profile_quarter.phi_sq_hat) - 1) == pytest.approx(1.0)
    assert profile_half.phi_sq_hat_step * (len(profile_half.phi_sq_hat) - 1) == pytest.approx(2.0)
    assert profile_half.phi_sq_hat_at(1.8) > 0.0


def test_phi_sq_hat_transform_convention(profile_quarter):
    # the convolution table must match (1/2pi) int phi^2 e^{-i xi s} ds
    p = profile_quarter
    direct = phi_sq_hat_exact(p, np.array([0.0, 0.2, 0.5]))
    table = p.phi_sq_hat_at(np.array([0.0, 0.2, 0.5]))
    assert np.allclose(direct, table, rtol=1e-10, atol=1e-12 * direct[0])
    s = np.arange(len(p.phi)) * p.grid_step
    quad0 = np.trapezoid(p.phi ** 2, s) / np.pi
    assert quad0 == pytest.approx(direct[0], rel=1e-10)


def test_c0_identity_by_quadrature(profile_half):
    c0 = c0_constant(profile_half, 1.0)
    for lam in (0.5, 1.0, 2.0):
        val = adaptive_simpson(
            lambda t: float(profile_half.phi_at(math.sqrt(lam) * t)) ** 2 * t,
            0.0, profile_half.s_max / math.sqrt(lam), rel_tol=1e-10,
        )
        assert lam * c0 * val == pytest.approx(1.0, abs=1e-6)


def test_c0_homogeneity(profile_half):
    # replacing lambda by 4 lambda scales the integral by exactly 1/4
    def integral(lam):
        return adaptive_simpson(
            lambda t: float(profile_half.phi_at(math.sqrt(lam) * t)) ** 2 * t,
            0.0, profile_half.s_max / math.sqrt(lam), rel_tol=1e-10,
        )

    assert integral(4.0) == pytest.approx(integral(1.0) / 4.0, rel=1e-8)


def test_c0_equals_odd_moment_for_integer_p(profile_half):
    assert c0_constant(profile_half, 1.0) == pytest.approx(profile_half.cprime[0], rel=1e-10)
    assert c0_constant(profile_half, 0.5) == pytest.approx(profile_half.cprime[1], rel=1e-10)


def test_partial_fraction_values():
    assert partial_fraction_coeffs(1) == pytest.approx([2.0], abs=1e-12)
    assert partial_fraction_coeffs(2) == pytest.approx([4.0, 2.0 / 3.0], abs=1e-12)


@pytest.mark.parametrize("p,x", [(1, 0.1), (1, 1.0), (1, 2.0), (2, 1.3)])
def test_partial_fraction_lattice_sum(p, x):
    # truncated-sum oracle: sum over |n| <= N of the partial fractions, with
    # the analytic tail of the n-sum added, matches (1 - cos x)^(-p)
    a = partial_fraction_coeffs(p)
    N = 100_000
    ns = np.arange(-N, N + 1)
    total = 0.0
    for j in range(p):
        power = 2 * p - 2 * j
        total += a[j] * np.sum(1.0 / (x - 2 * np.pi * ns) ** power)
        if power == 2:
            # integral tail of sum_{|n| > N} (x - 2 pi n)^{-2}
            total += a[j] * 2.0 / (4.0 * np.pi ** 2 * (N + 0.5))
    assert total == pytest.approx((1.0 - math.cos(x)) ** (-p), abs=1e-6)


def test_partial_fraction_lattice_sum_smaller_window():
    a0 = partial_fraction_coeffs(1)[0]
    for x in (0.1, 1.0, 2.0):
        ns = np.arange(-10_000, 10_001)
        total = a0 * np.sum(1.0 / (x - 2 * np.pi * ns) ** 2)
        total += a0 * 2.0 / (4.0 * np.pi ** 2 * 10_000.5)
        assert total == pytest.approx(1.0 / (1.0 - math.cos(x)), rel=1e-7)


def test_vt_degree_bound(gff3):
    v = vt_polynomial(10.5, gff3.params, gff3.profile)
    assert v.degree <= 10


def test_vt_t1_constant(gff3):
    v = vt_polynomial(1.0, gff3.params, gff3.profile)
    assert v.degree == 0
    expected = (gff3.profile.cprime[0] * 2.0 * gff3.profile.phi_sq_hat[0]
                / (2.0 * gff3.params.B))
    assert v.coeffs[0] == pytest.approx(expected, rel=1e-10)


def test_vt_matches_periodization(gff3):
    lam = np.linspace(0.01, 12.0, 200)
    for t in (2.5, 8.0):
        v = vt_polynomial(t, gff3.params, gff3.profile)
        ref = wbar_value(t, lam, gff3.params, gff3.profile)
        got = poly_eval(v, lam ** gff3.params.gamma)
        assert np.max(np.abs(got - ref)) < 1e-9 * np.max(ref)


def test_small_t_weight_gff(gff3):
    # gamma = 1: Gamma vanishes and w_t = wbar_1 / t below t = 1
    assert gff3.gamma_const == 0.0
    for t in (0.25, 0.5, 0.9):
        assert small_t_weight(t, gff3.params, gff3.profile, gamma_const=0.0) == \
            pytest.approx(gff3.wbar1 / t, rel=1e-12)


def test_small_t_continuity_at_one(membrane5):
    # iota(1) = 0 makes w continuous across t = 1
    w_below = small_t_weight(1.0 - 1e-9, membrane5.params, membrane5.profile,
                             gamma_const=membrane5.gamma_const)
    w_at = wbar_value(1.0, 0.0, membrane5.params, membrane5.profile)
    assert w_below == pytest.approx(w_at, rel=1e-6)


def test_small_t_telescoping(membrane5):
    # int_0^1 t^((2-gamma)/gamma) w_t dt == int_0^1 t^((2-gamma)/gamma) wbar_t dt
    expo = (2.0 - membrane5.params.gamma) / membrane5.params.gamma

    def repaired(t):
        if t <= 0:
            return 0.0
        if t >= 1.0:
            return wbar_value(1.0, 0.0, membrane5.params, membrane5.profile)
        return small_t_weight(t, membrane5.params, membrane5.profile,
                              gamma_const=membrane5.gamma_const)

    lhs = adaptive_simpson(lambda t: t ** expo * repaired(t), 0.0, 1.0,
                           rel_tol=1e-9)
    rhs = adaptive_simpson(
        lambda t: t ** expo * wbar_value(max(t, 1e-14), 0.0, membrane5.params,
                                         membrane5.profile) if t > 0 else 0.0,
        0.0, 1.0, rel_tol=1e-9,
    )
    assert lhs == pytest.approx(rhs, rel=1e-8)
    assert membrane5.gamma_const >= 0.0


def test_aj_family_small_t(gff3):
    cert = aj_family(0.5, gff3.params, gff3.profile, gamma_const=0.0)
    w = small_t_weight(0.5, gff3.params, gff3.profile, gamma_const=0.0)
    assert cert.degrees == (0, 0, 0, 0)
    assert cert.cheb[0][0] == pytest.approx(math.sqrt(w), rel=1e-12)
    assert all(np.all(a == 0.0) for a in cert.cheb[1:])


def test_aj_family_reconstruction_and_degrees(gff3):
    lam = np.linspace(0.0012, 12.0, 500)
    for t in (1.5, 8.0, 33.3):
        cert = aj_family(t, gff3.params, gff3.profile, gamma_const=0.0)
        rec = cert.w_reconstruct(lam)
        ref = wbar_value(t, lam, gff3.params, gff3.profile)
        assert np.max(np.abs(rec - ref)) <= 1e-8 * np.max(np.abs(ref))
        d1, d2, d3, d4 = cert.degrees
        nf = int(math.floor(t))
        assert d1 <= nf and d2 <= nf
        assert d3 <= max(nf - 1, 0) and d4 <= max(nf - 1, 0)


def test_aj_family_monomial_view(gff3):
    cert = aj_family(6.0, gff3.params, gff3.profile, gamma_const=0.0)
    quad = cert.quadruple()
    mu = np.linspace(0.0, gff3.params.two_b_gamma, 300)
    c = gff3.params.two_b_gamma
    rec = (poly_eval(quad.a1, mu) ** 2 + poly_eval(quad.a2, mu) ** 2
           + (c - mu) * (poly_eval(quad.a3, mu) ** 2 + poly_eval(quad.a4, mu) ** 2))
    b1, b2, b3, b4 = cert.eval_mu(mu)
    ref = b1 ** 2 + b2 ** 2 + (c - mu) * (b3 ** 2 + b4 ** 2)
    assert np.allclose(rec, ref, rtol=1e-9, atol=1e-12 * np.max(ref))


def test_wtilde_identity_and_scaling(profile_half):
    for lam in (0.5, 1.0, 2.0):
        val = adaptive_simpson(
            lambda t: t * float(wtilde(lam, t, 1.0, profile_half)) ** 2,
            0.0, profile_half.s_max / math.sqrt(lam), rel_tol=1e-9,
        )
        assert lam * val == pytest.approx(1.0, abs=1e-6)
    # scale covariance of the argument
    assert wtilde(2.0, 3.0, 1.0, profile_half) == pytest.approx(
        float(wtilde(2.0 / 4.0, 6.0, 1.0, profile_half)), rel=1e-12)
    assert np.all(np.asarray(wtilde(np.linspace(0.1, 5, 50), 2.0, 1.0, profile_half)) >= 0.0)


def test_wtilde_requires_half_profile(profile_quarter):
    with pytest.raises(ValueError):
        wtilde(1.0, 1.0, 1.0, profile_quarter)


def test_negative_control_wide_profile(gff3):
    # the h = 1/2 profile spreads the transform of phi^2 beyond (-1, 1); the
    # degree-floor(t) truncation must then break nonnegativity for some t
    wide = build_bump_profile(0.5)
    tripped = False
    for t in np.exp(np.linspace(0.0, np.log(64.0), 17)):
        try:
            vt_polynomial(float(t), gff3.params, wide)
        except NonnegativityError:
            tripped = True
            break
    assert tripped


def test_params_validation():
    with pytest.raises(ValueError):
        WeightParams(gamma=0.3, B=1.0, pf_coeffs=(1.0,), model="gff")
    with pytest.raises(ValueError):
        WeightParams.for_model("membrane", 4)
    with pytest.raises(ValueError):
        WeightParams.for_model("gff", 2)


def test_serialization_roundtrip(gff3):
    blob = family_to_json(gff3)
    back = family_from_json(blob)
    assert back.params == gff3.params
    assert back.gamma_const == gff3.gamma_const
    assert np.array_equal(back.profile.phi, gff3.profile.phi)
    lam = np.linspace(0.1, 12.0, 17)
    assert np.allclose(back.w(5.0, lam), gff3.w(5.0, lam))
    text = profile_to_json(gff3.profile)
    prof = profile_from_json(text)
    assert prof.content_key() == gff3.profile.content_key()
    assert json.loads(text)["h"] == 0.25
