"""Independent reference computations the construction is checked against.

Nothing here goes through the polynomial/stencil pipeline: lattice Green's
functions come from Fourier quadrature with an analytic treatment of the
k = 0 singularity, partition-of-unity checks re-integrate the scalar weights
with their own quadrature, and small periodic boxes get exact functional
calculus by dense eigendecomposition.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field as dc_field
from typing import Callable, Dict, Tuple

import numpy as np

from .lattice import ModelSpec
from .weights import (
    WeightFamily,
    continuum_partition_integral,
    partition_integral,
)


# ---------------------------------------------------------------------------
# lattice Green's function by Fourier quadrature
# ---------------------------------------------------------------------------

def _angular_average(d: int, z):
    """int_{S^{d-1}} cos(z * omega_1) d omega, elementary for d = 3 and d = 5."""
    z = np.asarray(z, dtype=float)
    if d == 3:
        out = 4.0 * np.pi * np.sinc(z / np.pi)
        return out
    if d == 5:
        small = np.abs(z) < 1e-4
        zs = np.where(small, 1.0, z)
        main = 8.0 * np.pi ** 2 * (np.sin(zs) / zs - np.cos(zs)) / zs ** 2
        series = 8.0 * np.pi ** 2 * (1.0 / 3.0 - z * z / 30.0)
        return np.where(small, series, main)
    raise NotImplementedError("angular average implemented for d in {3, 5}")


def _panel_edges(levels: int) -> np.ndarray:
    """Dyadically refined edges of [0, pi] toward the singular corner at 0."""
    edges = [0.0] + [np.pi / 2 ** j for j in range(levels, -1, -1)]
    return np.array(edges)


def _axis_rule(levels: int, order: int):
    nodes_1d, weights_1d = [], []
    gl_x, gl_w = np.polynomial.legendre.leggauss(order)
    for a, b in zip(_panel_edges(levels)[:-1], _panel_edges(levels)[1:]):
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        nodes_1d.append(mid + half * gl_x)
        weights_1d.append(half * gl_w)
    return np.concatenate(nodes_1d), np.concatenate(weights_1d)


def symbol_transform(d: int, F, xs: np.ndarray, sing_power: int,
                     sing_coeff: float = 1.0, levels: int = 7, order: int = 12,
                     cutoff: float = np.pi / 7.0, block: int = 1 << 20) -> np.ndarray:
    """(2pi)^-d int_{[-pi,pi]^d} cos(k.x) F(sigma(k)) dk for several lags x.

    F may blow up like sing_coeff / sigma^sing_power at k = 0; that part is
    subtracted under a Gaussian cutoff chi and re-added through its radial
    closed form (the exponent d - 1 - 2p is 0 for both models, so the radial
    integrand is bounded).  The remaining integrand is handled by tensor
    Gauss panels refined dyadically toward the origin.
    """
    p = sing_power
    x1, w1 = _axis_rule(levels, order)
    L = len(x1)
    total = L ** d
    part_box = np.zeros(len(xs))
    # iterate the tensor grid in blocks; axis indices decoded from flat index
    for lo in range(0, total, block):
        idx = np.arange(lo, min(lo + block, total))
        k = np.empty((len(idx), d))
        w = np.ones(len(idx))
        rem = idx
        for axis in range(d - 1, -1, -1):
            rem, ax_idx = np.divmod(rem, L)
            k[:, axis] = x1[ax_idx]
            w *= w1[ax_idx]
        sigma = np.sum(2.0 - 2.0 * np.cos(k), axis=1)
        k2 = np.sum(k * k, axis=1)
        chi = np.exp(-k2 / (2.0 * cutoff ** 2))
        smooth = F(sigma) - sing_coeff * chi / k2 ** p
        cosprod = np.ones((len(xs), len(idx)))
        for axis in range(d):
            cosprod *= np.cos(np.outer(xs[:, axis], k[:, axis]))
        part_box += cosprod @ (w * smooth)
    part_box *= 2.0 ** d / (2.0 * np.pi) ** d

    # singular part over all of R^d, radially: d - 1 - 2p = 0 for both models
    r_nodes, r_w = np.polynomial.legendre.leggauss(240)
    upper = 9.0 * cutoff
    r = 0.5 * upper * (r_nodes + 1.0)
    rw = 0.5 * upper * r_w
    chir = np.exp(-r * r / (2.0 * cutoff ** 2))
    xnorm = np.sqrt(np.sum(xs * xs, axis=1))
    ang = _angular_average(d, np.outer(xnorm, r))
    part_sing = (ang * (chir * rw)[None, :]).sum(axis=1)
    part_sing *= sing_coeff / (2.0 * np.pi) ** d
    return part_box + part_sing


def _green_once(spec: ModelSpec, xs: np.ndarray, levels: int, order: int,
                cutoff: float) -> np.ndarray:
    p = spec.p
    return symbol_transform(spec.d, lambda s: 1.0 / s ** p, xs,
                            sing_power=p, levels=levels, order=order,
                            cutoff=cutoff)


@dataclass
class GreensOracle:
    """Cached Green's function values for one lattice model."""

    spec: ModelSpec
    levels: int = 7
    order: int = 12
    cutoff: float = np.pi / 7.0
    cache: Dict[Tuple[int, ...], Tuple[float, float]] = dc_field(default_factory=dict)

    def __post_init__(self):
        if self.spec.d <= 2 * self.spec.p:
            raise ValueError("Green's function diverges unless d > 2p")
        if self.spec.d == 5:
            # d = 5 tensor grids are large; coarser refinement, looser target
            self.levels = min(self.levels, 3)
            self.order = min(self.order, 6)

    def values(self, x_list) -> Dict[Tuple[int, ...], Tuple[float, float]]:
        missing = [tuple(int(v) for v in x) for x in x_list
                   if tuple(int(v) for v in x) not in self.cache]
        if missing:
            xs = np.array(missing, dtype=float)
            coarse = _green_once(self.spec, xs, self.levels, self.order, self.cutoff)
            if self.spec.d <= 3:
                fine = _green_once(self.spec, xs, self.levels + 1,
                                   self.order + 2, self.cutoff)
            else:
                # high dimensions: refine the order only; a full extra dyadic
                # level would multiply the node count beyond usefulness
                fine = _green_once(self.spec, xs, self.levels,
                                   self.order + 1, self.cutoff)
            for xm, vc, vf in zip(missing, coarse, fine):
                self.cache[xm] = (float(vf), float(abs(vf - vc)))
        return {tuple(int(v) for v in x): self.cache[tuple(int(v) for v in x)]
                for x in x_list}


def lattice_green(spec: ModelSpec, x, oracle: GreensOracle = None) -> Tuple[float, float]:
    """Green's function of (-Delta_d)^p at lag x, with an error estimate taken
    from two quadrature refinement levels."""
    oracle = oracle or GreensOracle(spec)
    return oracle.values([x])[tuple(int(v) for v in x)]


def export_greens_csv(path: str, values: Dict[Tuple[int, ...], Tuple[float, float]]):
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["x", "value", "error"])
        for x, (v, e) in sorted(values.items()):
            writer.writerow([" ".join(str(c) for c in x), repr(v), repr(e)])


def random_walk_green_origin(d: int, n_steps: int, seed: int = 0,
                             batch: int = 4000) -> Tuple[float, float, float]:
    """Monte Carlo estimate of G(0) for the gff model: expected visits to the
    origin of simple random walk divided by 2d.

    Returns (estimate, standard error, truncation bound): walks run for
    n_steps // batch steps each, and the unseen tail of the return series is
    bounded by the local-CLT envelope C * sum_{n > L} n^(-d/2)."""
    rng = np.random.default_rng(seed)
    length = max(2, n_steps // batch)
    pos = np.zeros((batch, d), dtype=np.int64)
    visits = np.ones(batch)
    arange = np.arange(batch)
    for _ in range(length):
        axis = rng.integers(0, d, size=batch)
        step = rng.integers(0, 2, size=batch) * 2 - 1
        pos[arange, axis] += step
        visits += np.all(pos == 0, axis=1)
    mean = visits.mean() / (2.0 * d)
    se = visits.std(ddof=1) / math.sqrt(batch) / (2.0 * d)
    # p_n(0,0) <= 2 (d / (2 pi n))^(d/2) for even n; integrate the tail
    c_env = 2.0 * (d / (2.0 * np.pi)) ** (d / 2.0)
    tail = c_env * 2.0 / (d - 2.0) * (length - 1.0) ** (1.0 - d / 2.0) / (2.0 * d)
    return float(mean), float(se), float(tail)


# ---------------------------------------------------------------------------
# scalar partition-of-unity check
# ---------------------------------------------------------------------------

def scalar_partition_check(family: WeightFamily, lambda_grid, T: float = 64.0) -> float:
    """max over the grid of |lambda * int_0^inf t^((2-gamma)/gamma) w dt - 1|.

    For the lattice families w is the repaired weight (closed form below
    t = 1, adaptive quadrature on [1, T], exact profile tail above); for the
    continuum families the integrand is wtilde^2.
    """
    errs = []
    for lam in np.asarray(lambda_grid, dtype=float):
        if family.params.model.startswith("continuum"):
            val = continuum_partition_integral(lam, family.params.gamma,
                                               family.profile)
        else:
            val = partition_integral(lam, family, T=T)
        errs.append(abs(val - 1.0))
    return float(np.max(errs))


# ---------------------------------------------------------------------------
# dense functional calculus on small periodic boxes
# ---------------------------------------------------------------------------

def dense_laplacian(d: int, n: int) -> np.ndarray:
    """Dense matrix of -Delta_d on the periodic box (Z/nZ)^d."""
    size = n ** d
    A = np.zeros((size, size))
    idx = np.arange(size)
    coords = np.stack(np.unravel_index(idx, (n,) * d), axis=1)
    for axis in range(d):
        for sgn in (1, -1):
            nb = coords.copy()
            nb[:, axis] = (nb[:, axis] + sgn) % n
            j = np.ravel_multi_index(tuple(nb.T), (n,) * d)
            A[idx, j] -= 1.0
    A[idx, idx] += 2.0 * d
    return A


def dense_functional_calculus(spec: ModelSpec, F: Callable, n: int) -> np.ndarray:
    """F(L) on the periodic n^d box by eigendecomposition, L = (-Delta_d)^p.

    Boxes are capped at ~11^3 entries; this is a reference implementation,
    not a fast path.
    """
    if n ** spec.d > 11 ** 3 + 1:
        raise ValueError("box too large for the dense reference")
    M = dense_laplacian(spec.d, n)
    evals, vecs = np.linalg.eigh(M)
    lam_L = evals ** spec.p
    return (vecs * np.asarray([F(v) for v in lam_L])) @ vecs.T


# ---------------------------------------------------------------------------
# spectral density of the Laplacian symbol
# ---------------------------------------------------------------------------

def _ellip_k(m):
    """Complete elliptic integral K(m) via the arithmetic-geometric mean."""
    m = np.asarray(m, dtype=float)
    a = np.ones_like(m)
    b = np.sqrt(np.clip(1.0 - m, 0.0, 1.0))
    for _ in range(60):
        a, b = 0.5 * (a + b), np.sqrt(a * b)
        if np.max(np.abs(a - b)) < 1e-16:
            break
    return np.pi / (2.0 * a)


def spectral_density(d: int, n_s: int = 8192, n_theta: int = 8192):
    """Density rho_d of sigma(k) = sum_i 2(1 - cos k_i) under uniform k.

    rho_2 has the exact elliptic form K(S(8-S)/16)/(2 pi^2); higher d come
    from iterated convolution with the one-dimensional factor through the
    substitution s_i = 2 - 2 cos theta, whose Jacobian removes that factor's
    square-root singularities.  Returns (s_grid, rho) with integral 1.
    """
    if d < 2:
        raise ValueError("use d >= 2 (the d = 1 density is singular)")
    s = np.linspace(0.0, 8.0, n_s + 1)
    m = np.clip(s * (8.0 - s) / 16.0, 0.0, 1.0)
    with np.errstate(divide="ignore"):
        rho = _ellip_k(m) / (2.0 * np.pi ** 2)
    # the log singularity at s = 4 is integrable; cap the grid point on it
    mid = n_s // 2
    rho[mid] = rho[mid - 1] + (rho[mid - 1] - rho[mid - 2])
    theta = np.linspace(0.0, np.pi, n_theta + 1)
    s_th = 2.0 - 2.0 * np.cos(theta)
    for mdim in range(3, d + 1):
        s_new = np.linspace(0.0, 4.0 * mdim, n_s + 1)
        shifted = s_new[:, None] - s_th[None, :]
        sampled = np.interp(shifted, s, rho, left=0.0, right=0.0)
        rho = np.trapezoid(sampled, theta, axis=1) / np.pi
        s = s_new
    rho = np.maximum(rho, 0.0)
    rho /= np.trapezoid(rho, s)
    return s, rho
