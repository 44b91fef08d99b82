import math

import numpy as np
import pytest

from frdecomp.field import (
    FieldSampler,
    export_percolation_csv,
    percolation_probe,
    sweep_levels,
    _sweep_sample,
)
from frdecomp.lattice import greens_reconstruct


@pytest.fixture(scope="module")
def sampler(spec_gff3, gff3):
    return FieldSampler(spec_gff3, gff3, core=8, t_max=6.0, n_scales=9,
                        method="spectral")


@pytest.fixture(scope="module")
def sampler_direct(spec_gff3, gff3):
    return FieldSampler(spec_gff3, gff3, core=8, t_max=4.0, n_scales=7,
                        method="perscale")


def test_sample_field_wrapper(spec_gff3, gff3):
    from frdecomp.field import sample_field

    smp = sample_field(spec_gff3, gff3, core=6, seed=3, t_max=4.0, n_scales=7)
    assert smp.values.shape == (6, 6, 6)
    again = sample_field(spec_gff3, gff3, core=6, seed=3, t_max=4.0, n_scales=7)
    assert np.array_equal(smp.values, again.values)


def test_determinism(sampler):
    a = sampler.sample(seed=9, index=5).values
    b = sampler.sample(seed=9, index=5).values
    assert np.array_equal(a, b)
    c = sampler.sample(seed=9, index=6).values
    assert not np.array_equal(a, c)


def test_backends_agree_on_variance(spec_gff3, gff3, sampler):
    direct = FieldSampler(spec_gff3, gff3, core=8, t_max=6.0, n_scales=9,
                          method="perscale")
    assert direct.variance_origin() == pytest.approx(sampler.variance_origin(),
                                                     rel=1e-10)


def test_variance_matches_truncated_reconstruction(spec_gff3, gff3, sampler):
    grid = (sampler.t_nodes, sampler.t_weights)
    rec, _ = greens_reconstruct(spec_gff3, gff3, grid, [(0, 0, 0)], tail=False)
    assert sampler.variance_origin() == pytest.approx(rec[(0, 0, 0)], rel=1e-9)


def test_truncation_monotonicity(spec_gff3, gff3):
    v16 = FieldSampler(spec_gff3, gff3, core=4, t_max=16.0, n_scales=13,
                       method="perscale").variance_origin()
    v32 = FieldSampler(spec_gff3, gff3, core=4, t_max=32.0, n_scales=17,
                       method="perscale").variance_origin()
    assert v16 < v32


def test_empirical_covariance(spec_gff3, gff3, sampler):
    grid = (sampler.t_nodes, sampler.t_weights)
    lags = [(0, 0, 0), (1, 0, 0), (1, 1, 0)]
    rec, _ = greens_reconstruct(spec_gff3, gff3, grid, lags, tail=False)
    N = 3000
    acc = {x: 0.0 for x in lags}
    c = sampler.core // 2
    for i in range(N):
        v = sampler.sample(seed=31, index=i).values
        f0 = v[c, c, c]
        acc[(0, 0, 0)] += f0 * f0
        acc[(1, 0, 0)] += f0 * v[c + 1, c, c]
        acc[(1, 1, 0)] += f0 * v[c + 1, c + 1, c]
    se = 2.0 * rec[(0, 0, 0)] / math.sqrt(N)
    for x in lags:
        assert abs(acc[x] / N - rec[x]) < 3.0 * se


def test_scale_contributions_independent(sampler_direct):
    # empirical covariance between per-scale contributions at the origin
    # should vanish: the noise streams are keyed by scale
    s = sampler_direct
    N = 1200
    c = s.core // 2
    n_layers = len(s.bank) + 1
    contribs = np.zeros((N, n_layers))
    for i in range(N):
        # recompute the per-layer pieces by differencing partial sums
        pieces = []
        xi0 = s._noise(21, i, 0, 0, (s.core,) * 3)
        pieces.append(math.sqrt(s.var0) * xi0[c, c, c])
        for k, (slc, w) in enumerate(zip(s.bank, s.t_weights)):
            r = slc.field.box_radius
            side = s.core + 2 * r
            total = 0.0
            for ch, (offs, valsq) in enumerate(s._offsets[k]):
                xi = s._noise(21, i, k + 1, ch, (side,) * 3)
                for z, qv in zip(offs, valsq):
                    total += qv * xi[tuple(int(zc) + r + c for zc in z)]
            pieces.append(math.sqrt(w) * total)
        contribs[i] = pieces
    cov = np.cov(contribs.T)
    sd = np.sqrt(np.diag(cov))
    for i in range(n_layers):
        for j in range(i + 1, n_layers):
            if sd[i] == 0 or sd[j] == 0:
                continue
            corr = cov[i, j] / (sd[i] * sd[j])
            assert abs(corr) < 3.0 / math.sqrt(N)


def test_finite_range_coupling(sampler_direct):
    rho = 2
    a, b = sampler_direct.coupled_pair(seed=4, index=0, rho=rho)
    c = sampler_direct.core // 2
    rmax = sampler_direct.pad
    outside_equal = True
    inside_differs = False
    for idx in np.ndindex(a.shape):
        dist = max(abs(i - c) for i in idx)
        if dist > rho + rmax:
            outside_equal &= a[idx] == b[idx]
        if a[idx] != b[idx]:
            inside_differs = True
    assert outside_equal
    assert inside_differs


def test_percolation_extreme_levels():
    rng = np.random.default_rng(0)
    vals = rng.normal(size=(7, 7, 7))
    theta_hi, cross_hi, largest_hi = percolation_probe(vals, 1e9)
    assert theta_hi and cross_hi and largest_hi == 1.0
    theta_lo, cross_lo, largest_lo = percolation_probe(vals, -1e9)
    assert not theta_lo and not cross_lo and largest_lo == 0.0


def test_percolation_monotone_in_level():
    rng = np.random.default_rng(1)
    vals = rng.normal(size=(9, 9, 9))
    levels = np.linspace(-2.0, 2.0, 21)
    out = _sweep_sample(vals, levels)
    assert np.all(np.diff(out["theta"].astype(int)) >= 0)
    assert np.all(np.diff(out["crossing"].astype(int)) >= 0)
    assert np.all(np.diff(out["largest"]) >= -1e-15)
    # and the sweep agrees with independent single-level probes
    for k in (3, 10, 17):
        probe = percolation_probe(vals, float(levels[k]))
        assert probe == (bool(out["theta"][k]), bool(out["crossing"][k]),
                         pytest.approx(out["largest"][k]))


def test_percolation_known_configuration():
    # a hand-built 3x3x3 box: open path along the first axis through the
    # centre only when the level admits value -0.5
    vals = np.full((3, 3, 3), -10.0)
    vals[:, 1, 1] = -0.5
    theta, crossing, largest = percolation_probe(vals, 0.5)
    assert theta and crossing
    assert largest == pytest.approx(3.0 / 27.0)
    theta, crossing, _ = percolation_probe(vals, 0.4)
    assert not theta and not crossing


def test_sweep_levels_and_csv(tmp_path, sampler):
    levels = np.linspace(-1.0, 0.2, 7)
    res = sweep_levels(sampler, levels, n_samples=40, seed=2)
    assert [r.level for r in res] == pytest.approx(list(levels))
    thetas = [r.theta for r in res]
    assert all(a <= b + 1e-12 for a, b in zip(thetas, thetas[1:]))
    path = str(tmp_path / "perc.csv")
    export_percolation_csv(path, res)
    lines = open(path).read().strip().splitlines()
    assert len(lines) == len(levels) + 1
    res2 = sweep_levels(sampler, levels, n_samples=40, seed=2)
    assert [r.theta for r in res2] == thetas
