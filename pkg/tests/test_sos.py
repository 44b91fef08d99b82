import numpy as np
import pytest

from frdecomp.poly import Poly, poly_eval
from frdecomp.sos import (
    NotNonnegativeError,
    certificate_residual,
    halfline_split,
    sos_decompose,
    two_square_split,
)


def _random_halfline_nonneg(rng, max_factors=4, min_sep=0.0):
    """Product of (x + r), (x^2 + bx + c) with c > b^2/4, and squares.

    min_sep > 0 keeps the squared-factor roots separated; without it the
    draw can stack near-coincident squares whose root data is intrinsically
    ill-conditioned in double precision.
    """
    c = np.array([rng.uniform(0.2, 2.0)])
    used = []
    for _ in range(rng.integers(1, max_factors + 1)):
        kind = rng.integers(0, 3)
        if kind == 0:
            c = np.convolve(c, [rng.uniform(0.05, 3.0), 1.0])
        elif kind == 1:
            b = rng.uniform(-2.0, 2.0)
            c = np.convolve(c, [b * b / 4 + rng.uniform(0.05, 2.0), b, 1.0])
        else:
            for _ in range(64):
                r = rng.uniform(0.05, 2.5)
                if all(abs(r - u) >= min_sep for u in used):
                    break
            used.append(r)
            lin = np.array([-r, 1.0])
            c = np.convolve(c, np.convolve(lin, lin))
    return Poly(c)


def test_halfline_single_negative_root():
    pair = halfline_split(Poly(np.array([1.0, 1.0])))
    assert np.allclose(pair.b1.coeffs, [1.0])
    assert np.allclose(pair.b2.coeffs, [1.0])
    assert pair.prefactor == pytest.approx(1.0)


def test_halfline_pure_imaginary_pair():
    pair = halfline_split(Poly(np.array([1.0, 0.0, 1.0])))
    assert np.allclose(pair.prefactor * pair.b1.coeffs, [1.0, 0.0, 1.0], atol=1e-10)
    assert pair.b2.is_zero()


def test_halfline_mixed_expansion_oracle():
    s = Poly(np.convolve([2.0, -2.0, 1.0], [3.0, 1.0]))
    pair = halfline_split(s)
    xs = np.linspace(0.0, 10.0, 400)
    rec = pair.prefactor * (poly_eval(pair.b1, xs) + xs * poly_eval(pair.b2, xs))
    assert np.max(np.abs(rec - poly_eval(s, xs))) < 1e-10 * np.max(np.abs(poly_eval(s, xs)))
    # both pieces nonnegative on a wide real grid
    wide = np.linspace(-10.0, 10.0, 801)
    assert np.min(poly_eval(pair.b1, wide)) > -1e-10
    assert np.min(poly_eval(pair.b2, wide)) > -1e-10


def test_halfline_rejects_zero_at_origin():
    with pytest.raises(NotNonnegativeError):
        halfline_split(Poly(np.array([0.0, 1.0])))


def test_halfline_rejects_negative():
    with pytest.raises(NotNonnegativeError):
        halfline_split(Poly(np.array([1.0, -5.0, 1.0])))  # dips below 0 on x >= 0


def test_two_square_zero():
    p, q = two_square_split(Poly(np.zeros(1)))
    assert p.is_zero() and q.is_zero()


def test_two_square_conjugate_pair():
    p, q = two_square_split(Poly(np.array([4.0, 0.0, 1.0])))
    vals = sorted([np.abs(p.coeffs).tolist(), np.abs(q.coeffs).tolist()], key=len)
    assert vals[0] == pytest.approx([2.0], abs=1e-12)
    assert vals[1] == pytest.approx([0.0, 1.0], abs=1e-12)


def test_two_square_expansion_oracle():
    b = Poly(np.convolve([1.0, 0.0, 1.0], [2.0, 2.0, 1.0]))
    p, q = two_square_split(b)
    xs = np.linspace(-5.0, 5.0, 500)
    rec = poly_eval(p, xs) ** 2 + poly_eval(q, xs) ** 2
    assert np.max(np.abs(rec - poly_eval(b, xs))) < 1e-10 * np.max(np.abs(poly_eval(b, xs)))


def test_two_square_rejects_odd_root():
    with pytest.raises(NotNonnegativeError):
        two_square_split(Poly(np.array([0.0, 1.0])))  # b = x changes sign on R


def test_sos_pure_square_plus_one():
    quad = sos_decompose(Poly(np.array([1.0, 0.0, 1.0])))
    xs = np.linspace(0.0, 4.0, 100)
    assert certificate_residual(Poly(np.array([1.0, 0.0, 1.0])), quad, xs) < 1e-12
    assert quad.a3.is_zero() and quad.a4.is_zero()
    degs = sorted((quad.a1.degree, quad.a2.degree))
    assert degs == [0, 1]


def test_sos_monomial_x():
    quad = sos_decompose(Poly(np.array([0.0, 1.0])))
    assert quad.a1.is_zero() and quad.a2.is_zero()
    vals = sorted([abs(v) for v in (quad.a3.coeffs[0], quad.a4.coeffs[0])])
    assert vals == pytest.approx([0.0, 1.0], abs=1e-12)


def test_sos_weight_polynomial(gff3):
    from frdecomp.weights import vt_polynomial

    v8 = vt_polynomial(8.0, gff3.params, gff3.profile)
    c = gff3.params.two_b_gamma
    s = Poly(np.array(v8.coeffs) * 0.0)
    # certificate of v_8((2B) - x) on the half-line
    from frdecomp.poly import poly_compose_affine

    s = poly_compose_affine(v8, c, -1.0)
    quad = sos_decompose(s)
    xs = np.linspace(0.0, c, 1000)
    assert certificate_residual(s, quad, xs) < 1e-8
    n = s.degree
    assert quad.a1.degree <= n and quad.a2.degree <= n
    assert quad.a3.degree <= n - 1 and quad.a4.degree <= n - 1


def test_sos_randomized_property():
    # randomized soundness: nonnegative-by-construction inputs, degrees <= 24
    rng = np.random.default_rng(42)
    xs = np.linspace(0.0, 8.0, 300)
    n_cases = 10_000
    worst = 0.0
    for _ in range(n_cases):
        s = _random_halfline_nonneg(rng, min_sep=0.05)
        quad = sos_decompose(s)
        worst = max(worst, certificate_residual(s, quad, xs))
    assert worst < 1e-8, f"worst residual {worst:.3e}"


def test_sos_randomized_degenerate_degradation():
    # unrestricted draws can stack nearly coincident squared factors whose
    # roots are ill-conditioned; the certificate should degrade gracefully,
    # never catastrophically
    rng = np.random.default_rng(42)
    xs = np.linspace(0.0, 8.0, 300)
    residuals = []
    for _ in range(2000):
        s = _random_halfline_nonneg(rng)
        quad = sos_decompose(s)
        residuals.append(certificate_residual(s, quad, xs))
    residuals = np.array(residuals)
    assert residuals.max() < 1e-4, f"worst residual {residuals.max():.3e}"
    assert np.median(residuals) < 1e-12


def test_sos_parameter_stability_across_collision():
    # s_u = ((x-1)^2 + u)^2 (x+3): a quadruple tangency at u = 0 where roots
    # move between the real axis (u < 0) and conjugate pairs (u > 0); the
    # input stays nonnegative throughout, and the reconstructed values must
    # vary continuously in u even when certificate branches swap
    xs = np.array([0.3, 0.7, 1.0, 1.9])
    last = None
    for u in np.linspace(-0.04, 0.04, 41):
        quadratic = np.array([1.0 + u, -2.0, 1.0])  # (x-1)^2 + u
        s = Poly(np.convolve(np.convolve(quadratic, quadratic), [3.0, 1.0]))
        quad = sos_decompose(s)
        vals = quad.reconstruct_at(xs)
        scale = np.max(np.abs(poly_eval(s, xs)))
        assert np.max(np.abs(vals - poly_eval(s, xs))) < 1e-6 * scale
        if last is not None:
            assert np.max(np.abs(vals - last)) < 0.05
        last = vals
