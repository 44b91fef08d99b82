import numpy as np
import pytest

from frdecomp.lattice import ModelSpec
from frdecomp.oracle import (
    GreensOracle,
    dense_functional_calculus,
    dense_laplacian,
    export_greens_csv,
    random_walk_green_origin,
    scalar_partition_check,
)

WATSON_G0 = 0.2527310098586630  # (2 pi)^-3 int dk / (2 sum (1 - cos k_i)), d = 3


def test_green_watson_value(greens_oracle_gff3):
    val, err = greens_oracle_gff3.values([(0, 0, 0)])[(0, 0, 0)]
    assert val == pytest.approx(WATSON_G0, abs=1e-9)
    assert err < 1e-8


def test_green_axis_symmetry(greens_oracle_gff3):
    vals = greens_oracle_gff3.values([(1, 0, 0), (0, 1, 0), (0, 0, 1)])
    got = [v for v, _ in vals.values()]
    assert got[0] == pytest.approx(got[1], rel=1e-12)
    assert got[0] == pytest.approx(got[2], rel=1e-12)


def test_green_defining_equation(greens_oracle_gff3):
    # applying the negative lattice Laplacian to oracle values gives a delta
    def residual(centre):
        pts = [tuple(centre)]
        for ax in range(3):
            for s in (1, -1):
                nb = list(centre)
                nb[ax] += s
                pts.append(tuple(nb))
        vals = greens_oracle_gff3.values(pts)
        out = 6.0 * vals[tuple(centre)][0]
        for p in pts[1:]:
            out -= vals[p][0]
        return out

    assert residual((0, 0, 0)) == pytest.approx(1.0, abs=1e-6)
    assert residual((1, 0, 0)) == pytest.approx(0.0, abs=1e-6)
    assert residual((2, 1, 0)) == pytest.approx(0.0, abs=1e-6)


def test_green_decreases_along_axis(greens_oracle_gff3):
    vals = greens_oracle_gff3.values([(k, 0, 0) for k in range(5)])
    seq = [vals[(k, 0, 0)][0] for k in range(5)]
    assert all(a > b for a, b in zip(seq, seq[1:]))


def test_green_random_walk_cross_check(greens_oracle_gff3):
    # expected visits to the origin of simple random walk, divided by 2d
    est, se, tail = random_walk_green_origin(3, 10_000_000, seed=1)
    ref = greens_oracle_gff3.values([(0, 0, 0)])[(0, 0, 0)][0]
    assert abs(est - ref) < 4.0 * se + tail


def test_model_dimension_guards():
    # transience needs d > 2p; the model constructors enforce the stronger
    # dimension floors already
    with pytest.raises(ValueError):
        ModelSpec(model="membrane", d=4)
    with pytest.raises(ValueError):
        ModelSpec(model="gff", d=2)


def test_membrane_green_defining_equation():
    # (-Delta)^2 G = delta at the coarse d = 5 tolerance: assemble the
    # bilaplacian stencil from two applications of the Laplacian stencil;
    # only the four symmetry classes with |x|_1 <= 2 are computed
    from frdecomp.lattice import lag_class

    spec = ModelSpec(model="membrane", d=5)
    oracle = GreensOracle(spec)
    reps = [(0, 0, 0, 0, 0), (1, 0, 0, 0, 0), (2, 0, 0, 0, 0), (1, 1, 0, 0, 0)]
    vals = oracle.values(reps)

    def g(x):
        cls = lag_class(x)
        if sum(cls) > 2:
            return 0.0  # does not enter the stencil at the origin
        return vals[cls + (0,) * (5 - len(cls))][0]

    def lap(f, x):
        out = -2.0 * 5 * f(x)
        for ax in range(5):
            for s in (1, -1):
                nb = list(x)
                nb[ax] += s
                out += f(tuple(nb))
        return -out  # -Delta

    def bilap_at_origin():
        def mid(x):
            return lap(g, x)

        return lap(mid, (0, 0, 0, 0, 0))

    assert bilap_at_origin() == pytest.approx(1.0, abs=1e-3)


def test_scalar_partition_check_discrete(gff3):
    lams = gff3.params.B * np.logspace(-2, 0, 9)
    assert scalar_partition_check(gff3, lams, T=64.0) <= 1e-3


def test_scalar_partition_check_continuum(profile_half):
    from frdecomp.weights import WeightParams, build_weight_family

    fam = build_weight_family(WeightParams.for_model("continuum-gff", 3), profile_half)
    assert scalar_partition_check(fam, np.logspace(-1, 1, 5)) <= 1e-6


def test_dense_calculus_identity_and_delta(spec_gff3):
    M = dense_functional_calculus(spec_gff3, lambda lam: lam, 5)
    direct = dense_laplacian(3, 5)
    assert np.allclose(M, direct, atol=1e-12)
    eye = dense_functional_calculus(spec_gff3, lambda lam: 1.0, 5)
    assert np.allclose(eye, np.eye(125), atol=1e-12)


def test_dense_calculus_box_cap(spec_gff3):
    with pytest.raises(ValueError):
        dense_functional_calculus(spec_gff3, lambda lam: lam, 10)  # 1000 <= cap, ok
        dense_functional_calculus(spec_gff3, lambda lam: lam, 13)


def test_spectral_density_moments(densities):
    for d in (2, 3, 5):
        s, rho = densities[d]
        assert np.trapezoid(rho, s) == pytest.approx(1.0, abs=1e-12)
        assert np.trapezoid(s * rho, s) == pytest.approx(2.0 * d, rel=1e-6)
        assert np.trapezoid((s - 2.0 * d) ** 2 * rho, s) == pytest.approx(2.0 * d, rel=1e-3)


def test_spectral_density_vs_direct_torus(densities):
    s, rho = densities[3]
    n = 48
    k = 2.0 * np.pi * np.arange(n) / n
    sig = ((2 - 2 * np.cos(k))[:, None, None]
           + (2 - 2 * np.cos(k))[None, :, None]
           + (2 - 2 * np.cos(k))[None, None, :])
    for f in (lambda x: np.exp(-x / 3.0), lambda x: 1.0 / (1.0 + x)):
        direct = float(np.mean(f(sig)))
        via = float(np.trapezoid(f(s) * rho, s))
        assert via == pytest.approx(direct, rel=2e-5)


def test_export_csv(tmp_path, greens_oracle_gff3):
    vals = greens_oracle_gff3.values([(0, 0, 0), (1, 0, 0)])
    path = str(tmp_path / "g.csv")
    export_greens_csv(path, vals)
    lines = open(path).read().strip().splitlines()
    assert lines[0] == "x,value,error"
    assert len(lines) == 3
