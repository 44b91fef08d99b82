"""Scalar weight families for the white-noise decompositions.

This module owns everything that happens before operators enter the picture:
the smooth bump profile and its transform tables, the quadrature constants,
the partial-fraction coefficients, the polynomial weights v_t with their
Chebyshev representation, the small-scale repair below t = 1, and the
half-line certificates that split each weight into squares.

Conventions.  The 1-d Fourier transform is f_hat(xi) = (1/2pi) * int f(x)
exp(-i xi x) dx, so products map to plain convolutions of transforms.  The
profile is phi = kappa^2 with kappa_hat a normalized C_c^infinity bump of
half-width h; the transform of phi^2 is then the fourfold self-convolution
of kappa_hat, with support [-4h, 4h].  The discrete construction needs that
support inside (-1, 1), hence h = 1/4 there; the continuum one only needs
supp(phi_hat) inside [-1, 1] and uses h = 1/2.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .poly import Poly, ZERO_TOL, poly_compose_affine
from .sos import (
    SosQuadruple,
    _sign_normalized,
    halfline_certificate_cheb,
)

AJ_RIDGE = 1e-11      # relative lift applied before certificate extraction
V_NEG_TOL = 1e-10     # allowed relative dip of v_t below zero on its interval


class NonnegativityError(ValueError):
    """A weight polynomial dips below zero beyond tolerance."""


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to reach the requested tolerance."""


# ---------------------------------------------------------------------------
# quadrature helpers
# ---------------------------------------------------------------------------

def adaptive_simpson(f: Callable[[float], float], a: float, b: float,
                     rel_tol: float = 1e-10, max_depth: int = 48) -> float:
    """Classic recursive Simpson with Richardson acceptance test."""
    fa, fm, fb = f(a), f(0.5 * (a + b)), f(b)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    scale = abs(whole) + 1e-300

    def recurse(a, fa, b, fb, fm, whole, depth):
        m = 0.5 * (a + b)
        lm, rm = f(0.5 * (a + m)), f(0.5 * (m + b))
        left = (m - a) / 6.0 * (fa + 4.0 * lm + fm)
        right = (b - m) / 6.0 * (fm + 4.0 * rm + fb)
        if depth <= 0:
            raise QuadratureError("adaptive Simpson exceeded maximum depth")
        if abs(left + right - whole) <= 15.0 * rel_tol * max(scale, abs(left + right)):
            return left + right + (left + right - whole) / 15.0
        return (recurse(a, fa, m, fm, lm, left, depth - 1)
                + recurse(m, fm, b, fb, rm, right, depth - 1))

    return recurse(a, fa, b, fb, fm, whole, max_depth)


def _composite_simpson(y: np.ndarray, dx: float) -> float:
    """Composite Simpson over a uniform table (trapezoid patch on odd tails)."""
    n = len(y)
    if n < 3:
        return float(np.trapezoid(y, dx=dx))
    m = n if n % 2 == 1 else n - 1
    core = (y[0] + y[m - 1] + 4.0 * np.sum(y[1:m - 1:2]) + 2.0 * np.sum(y[2:m - 2:2]))
    total = core * dx / 3.0
    if m != n:
        total += 0.5 * dx * (y[-2] + y[-1])
    return float(total)


def _cubic_interp(xq, dx: float, table: np.ndarray):
    """4-point Lagrange interpolation on a uniform grid starting at 0; 0 beyond."""
    xq = np.abs(np.asarray(xq, dtype=float))
    n = len(table)
    pos = xq / dx
    i1 = np.clip(np.floor(pos).astype(int), 1, n - 3)
    u = pos - i1
    y0, y1, y2, y3 = table[i1 - 1], table[i1], table[i1 + 1], table[i1 + 2]
    val = (
        y0 * (-u * (u - 1.0) * (u - 2.0) / 6.0)
        + y1 * ((u + 1.0) * (u - 1.0) * (u - 2.0) / 2.0)
        + y2 * (-(u + 1.0) * u * (u - 2.0) / 2.0)
        + y3 * ((u + 1.0) * u * (u - 1.0) / 6.0)
    )
    out = np.where(pos >= n - 1, 0.0, val)
    return out if out.shape else float(out)


# ---------------------------------------------------------------------------
# bump profile
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BumpProfile:
    """Tabulated bump data: kappa_hat, phi = kappa^2, the transform of phi^2,
    and the quadrature constants they induce.

    kappa_hat(xi) = exp(sharpness * (1 - 1/(1 - (xi/h)^2))) on (-h, h): a
    normalized C_c^infinity bump whose sharpness parameter controls how much
    of the support carries real mass.  Small values spread the transform of
    phi^2 across its full support, which is what pushes the kernels into
    their decay asymptotics at accessible scales; the default is tuned for
    that purpose and the construction is valid for any positive value.
    """

    h: float
    sharpness: float
    grid_step: float                 # step of the s-grid carrying phi
    s_max: float
    phi: np.ndarray                  # phi(s) on 0, step, ..., s_max
    kappa_hat: np.ndarray            # kappa_hat on [0, h], uniform
    phi_sq_hat: np.ndarray           # transform of phi^2 on [0, 4h], uniform
    phi_sq_hat_step: float
    c0: float                        # homogeneity constant for gamma = 1
    cprime: tuple                    # c'_0 .. c'_3
    psi_tails: np.ndarray            # Psi_q(s) = int_s^inf y^(2q-1) phi^2, q = 1..4

    def phi_at(self, s):
        return _cubic_interp(s, self.grid_step, self.phi)

    def phi_sq_hat_at(self, xi):
        return _cubic_interp(xi, self.phi_sq_hat_step, self.phi_sq_hat)

    def phi_sq_at(self, s):
        v = self.phi_at(s)
        return v * v

    def psi_at(self, q: int, s):
        """Upper tail integral of y^(2q-1) phi(y)^2 from s to infinity."""
        return _cubic_interp(s, self.grid_step, self.psi_tails[q - 1])

    def content_key(self) -> str:
        import hashlib
        hsh = hashlib.sha256()
        for arr in (self.phi, self.kappa_hat, self.phi_sq_hat):
            hsh.update(np.ascontiguousarray(arr).tobytes())
        hsh.update(f"{self.h}:{self.sharpness}:{self.grid_step}:{self.s_max}".encode())
        return hsh.hexdigest()[:16]


def build_bump_profile(h: float, n_grid: int = 4096,
                       sharpness: float = 0.2) -> BumpProfile:
    """Construct the profile tables for a bump of half-width h.

    Parameters
    ----------
    h : float
        Support half-width of kappa_hat.  Use 1/4 for the lattice models and
        1/2 for the continuum ones.
    n_grid : int
        Number of intervals across [-h, h] for kappa_hat; at least 4096.
    sharpness : float
        Exponential sharpness of the bump edges; see BumpProfile.
    """
    if h <= 0:
        raise ValueError("h must be positive")
    if n_grid < 4096:
        raise ValueError("n_grid must be at least 4096")
    if sharpness <= 0:
        raise ValueError("sharpness must be positive")
    xi = np.linspace(-h, h, n_grid + 1)
    dxi = xi[1] - xi[0]
    uu = xi / h
    kap = np.zeros_like(xi)
    pos = np.abs(uu) < 1.0
    kap[pos] = np.exp(sharpness * (1.0 - 1.0 / (1.0 - uu[pos] ** 2)))

    # phi = kappa^2 by direct cosine transform (kappa_hat is even and real)
    step = 0.01 / h
    s_max = 160.0 / h
    s = np.arange(0.0, s_max + 0.5 * step, step)
    kappa_vals = np.empty(len(s))
    for lo in range(0, len(s), 512):
        blk = s[lo:lo + 512]
        kappa_vals[lo:lo + 512] = (np.cos(np.outer(blk, xi)) @ kap) * dxi
    phi = kappa_vals ** 2

    # transform of phi^2 = fourfold self-convolution of kappa_hat
    conv2 = np.convolve(kap, kap) * dxi
    conv4 = np.convolve(conv2, conv2) * dxi
    mid = len(conv4) // 2
    phi_sq_hat = conv4[mid:]
    if np.min(phi_sq_hat) < -1e-12 * np.max(phi_sq_hat):
        raise NonnegativityError("tabulated transform of phi^2 went negative")
    phi_sq_hat = np.maximum(phi_sq_hat, 0.0)
    phi_sq_hat_step = 4.0 * h / (len(phi_sq_hat) - 1)

    phisq = phi ** 2
    cprime = tuple(
        1.0 / _composite_simpson(s ** (2 * k + 1) * phisq, step) for k in range(4)
    )
    psi = np.empty((4, len(s)))
    for q in range(1, 5):
        integrand = s ** (2 * q - 1) * phisq
        # right-to-left cumulative trapezoid gives the upper tail
        rev = np.concatenate([[0.0], np.cumsum((integrand[:-1] + integrand[1:]))[::1]])
        tail = (rev[-1] - rev) * 0.5 * step
        psi[q - 1] = tail

    return BumpProfile(
        h=h,
        sharpness=sharpness,
        grid_step=step,
        s_max=s_max,
        phi=phi,
        kappa_hat=kap[n_grid // 2:],
        phi_sq_hat=phi_sq_hat,
        phi_sq_hat_step=phi_sq_hat_step,
        c0=cprime[0],
        cprime=cprime,
        psi_tails=psi,
    )


def c0_constant(profile: BumpProfile, gamma: float) -> float:
    """Homogeneity constant: 1/lambda = c0 * int t^((2-gamma)/gamma) phi(lambda^(gamma/2) t)^2 dt.

    Substituting s = lambda^(gamma/2) t reduces the right side to
    lambda^(-1) * int s^((2-gamma)/gamma) phi(s)^2 ds, so c0 is the reciprocal
    of that profile moment.
    """
    expo = (2.0 - gamma) / gamma
    s = np.arange(len(profile.phi)) * profile.grid_step
    moment = _composite_simpson(s ** expo * profile.phi ** 2, profile.grid_step)
    if moment <= 0:
        raise QuadratureError("profile moment did not converge")
    return 1.0 / moment


# ---------------------------------------------------------------------------
# partial fractions
# ---------------------------------------------------------------------------

def partial_fraction_coeffs(p: int) -> list:
    """Coefficients a_0..a_(p-1) in the expansion of (1 - cos x)^(-p) over
    the lattice 2*pi*Z: the principal part at 0 is sum_j a_j x^(-(2p-2j)).

    Matching Laurent coefficients: 1 - cos x = (x^2/2) g(x^2) with
    g(u) = sum_m (-1)^m 2 u^m / (2m+2)!, so a_j = 2^p * [u^j] g(u)^(-p).
    """
    if p < 1:
        raise ValueError("p must be a positive integer")
    terms = p + 2
    g = np.array([(-1.0) ** m * 2.0 / math.factorial(2 * m + 2) for m in range(terms)])
    inv = np.zeros(terms)
    inv[0] = 1.0 / g[0]
    for m in range(1, terms):
        inv[m] = -np.dot(g[1:m + 1], inv[m - 1::-1]) / g[0]
    b = np.zeros(terms)
    b[0] = 1.0
    for _ in range(p):
        b = np.convolve(b, inv)[:terms]
    out = (2.0 ** p) * b[:p]
    if np.any(out < 0):
        raise ArithmeticError("partial-fraction coefficients must be nonnegative")
    return [float(v) for v in out]


# ---------------------------------------------------------------------------
# weight parameters and families
# ---------------------------------------------------------------------------

DISCRETE_MODELS = ("gff", "membrane")
CONTINUUM_MODELS = ("continuum-gff", "continuum-membrane")


@dataclass(frozen=True)
class WeightParams:
    """Model parameters: gamma with 1/gamma integral, spectral bound B,
    partial-fraction coefficients, and the model tag."""

    gamma: float
    B: float
    pf_coeffs: tuple
    model: str

    def __post_init__(self):
        p = 1.0 / self.gamma
        if abs(p - round(p)) > 1e-12:
            raise ValueError("1/gamma must be a positive integer")
        if any(a < 0 for a in self.pf_coeffs):
            raise ValueError("partial-fraction coefficients must be nonnegative")

    @property
    def p(self) -> int:
        return int(round(1.0 / self.gamma))

    @property
    def two_b_gamma(self) -> float:
        """(2B)^gamma, the right end of the certified interval in mu."""
        return (2.0 * self.B) ** self.gamma

    @classmethod
    def for_model(cls, model: str, d: int) -> "WeightParams":
        if model == "gff":
            if d < 3:
                raise ValueError("gff requires d >= 3")
            return cls(gamma=1.0, B=4.0 * d, pf_coeffs=tuple(partial_fraction_coeffs(1)), model=model)
        if model == "membrane":
            if d < 5:
                raise ValueError("membrane requires d >= 5")
            return cls(gamma=0.5, B=16.0 * d * d, pf_coeffs=tuple(partial_fraction_coeffs(2)), model=model)
        if model == "continuum-gff":
            if d < 3:
                raise ValueError("continuum-gff requires d >= 3")
            return cls(gamma=1.0, B=math.inf, pf_coeffs=(), model=model)
        if model == "continuum-membrane":
            if d < 5:
                raise ValueError("continuum-membrane requires d >= 5")
            return cls(gamma=0.5, B=math.inf, pf_coeffs=(), model=model)
        raise ValueError(f"unknown model {model!r}")


def iota(gamma: float, t):
    """Small-scale repair profile: 2(1-t) t^((2*gamma-2)/gamma).

    Satisfies int_0^1 t^((2-2*gamma)/gamma) iota(t) dt = 1 and iota(1) = 0 for
    every admissible gamma.
    """
    t = np.asarray(t, dtype=float)
    return 2.0 * (1.0 - t) * t ** ((2.0 * gamma - 2.0) / gamma)


def _theta(lam, params: WeightParams):
    ratio = (np.asarray(lam, dtype=float) / (2.0 * params.B)) ** params.gamma
    return np.arccos(1.0 - np.clip(ratio, 0.0, 2.0))


def wbar_value(t: float, lam, params: WeightParams, profile: BumpProfile):
    """Periodized evaluation of the raw weight \\bar w_t at spectral points lam.

    For t <= 1 only the constant Fourier mode survives, giving the closed
    lambda-independent form.
    """
    p = params.p
    pref = 1.0 / (2.0 * params.B)
    if t <= 1.0:
        ph0 = profile.phi_sq_hat[0]
        val = pref * sum(
            profile.cprime[p - j - 1] * params.pf_coeffs[j] * t ** (-(2 * j + 1))
            for j in range(p)
        ) * ph0
        lam = np.asarray(lam, dtype=float)
        out = np.full(lam.shape, val)
        return out if out.shape else float(val)
    th = _theta(lam, params)
    nmax = int(np.ceil((profile.s_max / t + np.pi) / (2.0 * np.pi))) + 1
    ns = 2.0 * np.pi * np.arange(-nmax, nmax + 1)
    args = (np.expand_dims(th, -1) - ns) * t
    per = profile.phi_sq_at(args).sum(axis=-1)
    total = 0.0
    for j in range(p):
        total = total + profile.cprime[p - j - 1] * params.pf_coeffs[j] * t ** (-2 * j) * per
    out = pref * total
    return out if np.ndim(out) else float(out)


def gamma_constant(params: WeightParams, profile: BumpProfile) -> float:
    """Gamma >= 0 compensating the small-t defect: int_0^1 t^((2-gamma)/gamma)
    (wbar_t - wbar_1/t) dt, lambda-independent since wbar is constant below 1."""
    if params.p == 1:
        return 0.0  # t*wbar_t is already constant in t below 1
    wbar1 = wbar_value(1.0, 0.0, params, profile)
    expo = (2.0 - params.gamma) / params.gamma

    def f(t):
        if t <= 0.0:
            return 0.0
        return t ** expo * (wbar_value(t, 0.0, params, profile) - wbar1 / t)

    val = adaptive_simpson(f, 0.0, 1.0, rel_tol=1e-10)
    return max(val, 0.0)


@dataclass(frozen=True)
class WeightFamily:
    """A ready-to-use weight family: parameters, profile, small-t repair."""

    params: WeightParams
    profile: BumpProfile
    gamma_const: float          # Gamma of the small-t modification
    wbar1: float                # the constant wbar_1

    @property
    def iota(self) -> Callable:
        g = self.params.gamma
        return lambda t: iota(g, t)

    @property
    def small_t_constant(self) -> Callable:
        return lambda t: small_t_weight(t, self.params, self.profile,
                                        gamma_const=self.gamma_const)

    def w(self, t: float, lam):
        """The final weight w_t(lambda): repaired below t = 1, wbar above."""
        if t < 1.0:
            val = self.small_t_constant(t)
            lam = np.asarray(lam, dtype=float)
            out = np.full(lam.shape, val)
            return out if out.shape else float(val)
        return wbar_value(t, lam, self.params, self.profile)

    def small_t_mass(self) -> float:
        """int_0^1 t^((2-gamma)/gamma) w_t dt in closed form."""
        return self.wbar1 / (2.0 * self.params.p - 1.0) + self.gamma_const

    def content_key(self) -> str:
        import hashlib
        hsh = hashlib.sha256()
        hsh.update(self.profile.content_key().encode())
        hsh.update(repr((self.params.gamma, self.params.B, self.params.model,
                         self.params.pf_coeffs, self.gamma_const)).encode())
        return hsh.hexdigest()[:16]


def build_weight_family(params: WeightParams, profile: BumpProfile) -> WeightFamily:
    if params.model in DISCRETE_MODELS:
        wbar1 = wbar_value(1.0, 0.0, params, profile)
        gc = gamma_constant(params, profile)
    else:
        wbar1 = 0.0
        gc = 0.0
    return WeightFamily(params=params, profile=profile, gamma_const=gc, wbar1=wbar1)


def small_t_weight(t: float, params: WeightParams, profile: BumpProfile,
                   gamma_const: float = None) -> float:
    """w_t for 0 < t < 1: (wbar_1 + Gamma * iota(t)) / t, independent of lambda."""
    if not 0.0 < t < 1.0:
        raise ValueError("small_t_weight requires 0 < t < 1")
    if gamma_const is None:
        gamma_const = gamma_constant(params, profile)
    wbar1 = wbar_value(1.0, 0.0, params, profile)
    return (wbar1 + gamma_const * float(iota(params.gamma, t))) / t


# ---------------------------------------------------------------------------
# the polynomial weights v_t and their certificates
# ---------------------------------------------------------------------------

def phi_sq_hat_exact(profile: BumpProfile, xi) -> np.ndarray:
    """Transform of phi^2 at the given frequencies, by direct quadrature of
    the phi table: (1/pi) int_0^inf phi(s)^2 cos(xi s) ds.

    More accurate than interpolating the convolution table (the coefficient
    extraction needs ~1e-13 relative accuracy so that near-zero flats of the
    weights are not polluted into sign changes); values beyond the support
    are clipped to zero.
    """
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    s = np.arange(len(profile.phi)) * profile.grid_step
    phisq = profile.phi ** 2
    out = np.empty(len(xi))
    for lo in range(0, len(xi), 64):
        blk = xi[lo:lo + 64]
        out[lo:lo + 64] = np.trapezoid(phisq[None, :] * np.cos(np.outer(blk, s)),
                                       dx=profile.grid_step, axis=1) / np.pi
    out[np.abs(xi) >= 4.0 * profile.h] = 0.0
    return out


def vt_cheb_coeffs(t: float, params: WeightParams, profile: BumpProfile) -> np.ndarray:
    """Folded Chebyshev coefficients of v_t in the variable 1 - mu/(2B)^gamma.

    beta[k] collects the +k and -k Fourier modes; all entries are nonnegative,
    so sum(beta) = v_t at mu = 0 is also the maximum over the interval.
    """
    p = params.p
    kmax = int(math.floor(t))
    al = np.maximum(phi_sq_hat_exact(profile, np.arange(kmax + 1) / t), 0.0)
    coef = sum(
        profile.cprime[p - j - 1] * params.pf_coeffs[j] * t ** (-(2 * j + 1))
        for j in range(p)
    ) / (2.0 * params.B)
    beta = np.concatenate([[al[0]], 2.0 * al[1:]]) * coef
    return beta


def _vt_w_mono(beta: np.ndarray) -> np.ndarray:
    """Monomial coefficients in w of sum beta_k T_k(w), trimmed at value scale."""
    vmax = float(np.sum(beta))
    mono = np.polynomial.chebyshev.cheb2poly(beta)
    nz = np.nonzero(np.abs(mono) > ZERO_TOL * vmax)[0]
    if len(nz) == 0:
        return mono[:1]
    return mono[: nz[-1] + 1]


def vt_polynomial(t: float, params: WeightParams, profile: BumpProfile) -> Poly:
    """The weight v_t as a polynomial in mu on [0, (2B)^gamma], degree <= floor(t).

    Raises NonnegativityError if the weight dips below -V_NEG_TOL relative on
    its interval (the symptom of a profile whose transform support is too
    wide for the enforced degree truncation).  The nonnegativity check runs
    on the Chebyshev form; the returned monomial representation is exact in
    value only up to its conditioning, which grows with the degree.
    """
    if t < 1.0:
        raise ValueError("vt_polynomial requires t >= 1")
    beta = vt_cheb_coeffs(t, params, profile)
    _check_vt_nonneg(beta, t)
    mono_w = _vt_w_mono(beta)
    c = params.two_b_gamma
    v_mu = poly_compose_affine(Poly(mono_w), 1.0, -1.0 / c)
    if v_mu.degree > int(math.floor(t)):
        raise AssertionError("degree bound floor(t) violated")
    return v_mu


def _check_vt_nonneg(beta: np.ndarray, t: float):
    wgrid = np.linspace(0.0, 1.0, 2001)
    vals = np.polynomial.chebyshev.chebval(wgrid, beta)
    vmax = np.max(np.abs(vals))
    if np.min(vals) < -V_NEG_TOL * vmax:
        raise NonnegativityError(
            f"v_t dips to {np.min(vals):.3e} (scale {vmax:.3e}) at t = {t:g}; "
            "the profile's transform support is too wide for degree floor(t)"
        )


@dataclass(frozen=True)
class KernelCertificate:
    """Sum-of-squares certificate of a weight w_t, in Chebyshev form.

    The four arrays are coefficients in T_k(1 - 2 mu/(2B)^gamma) (Chebyshev
    on the certified interval), with the x-slot scale folded in, so that for
    mu in [0, (2B)^gamma]

        w_t(lambda) = b1(mu)^2 + b2(mu)^2
                      + ((2B)^gamma - mu) (b3(mu)^2 + b4(mu)^2),

    mu = lambda^gamma.  This form stays well conditioned at the degrees
    large scales need; quadruple() gives the monomial view, faithful up to
    its own conditioning.
    """

    t: float
    c: float
    gamma: float
    cheb: tuple  # four arrays

    @property
    def degrees(self) -> tuple:
        return tuple(len(a) - 1 for a in self.cheb)

    def eval_mu(self, mu):
        u = 1.0 - 2.0 * np.asarray(mu, dtype=float) / self.c
        return [np.polynomial.chebyshev.chebval(u, a) for a in self.cheb]

    def w_reconstruct(self, lam):
        """The certified weight at spectral points lam."""
        mu = np.asarray(lam, dtype=float) ** self.gamma
        b1, b2, b3, b4 = self.eval_mu(mu)
        return b1 ** 2 + b2 ** 2 + (self.c - mu) * (b3 ** 2 + b4 ** 2)

    def quadruple(self) -> SosQuadruple:
        out = []
        for arr in self.cheb:
            mono_u = np.polynomial.chebyshev.cheb2poly(arr)
            pol = poly_compose_affine(Poly(mono_u), 1.0, -2.0 / self.c)
            out.append(_sign_normalized(pol))
        return SosQuadruple(*out)


def aj_family(t: float, params: WeightParams, profile: BumpProfile,
              gamma_const: float = None, ridge: float = AJ_RIDGE) -> KernelCertificate:
    """Certificate for w_t in the variable mu = lambda^gamma:

        w_t(lambda) = b1(mu)^2 + b2(mu)^2 + ((2B)^gamma - mu)(b3(mu)^2 + b4(mu)^2).

    For t < 1 the weight is the constant small_t_weight(t), certified by
    b1 = sqrt(w_t).  For t >= 1 the certificate is extracted from the root
    structure of v_t((2B)^gamma - x) after lifting it by ridge * max(v_t);
    the lift keeps noise-level minima strictly positive and sits far below
    the certified residual tolerance.
    """
    c = params.two_b_gamma
    zero = np.zeros(1)
    if t < 1.0:
        w = small_t_weight(t, params, profile, gamma_const=gamma_const)
        return KernelCertificate(
            t=t, c=c, gamma=params.gamma,
            cheb=(np.array([math.sqrt(w)]), zero, zero, zero),
        )
    beta = vt_cheb_coeffs(t, params, profile)
    _check_vt_nonneg(beta, t)
    vmax = float(np.sum(beta))
    lifted = np.array(beta)
    lifted[0] += ridge * vmax
    # s(x) = v_t((2B)^gamma - x): in y = x/(2B)^gamma the Chebyshev
    # coefficients of s are exactly those of v_t in w = 1 - mu/(2B)^gamma
    p1, q1, p2, q2 = halfline_certificate_cheb(lifted, vmax)
    nfloor = int(math.floor(t))
    scale3 = 1.0 / math.sqrt(c)  # the x-slot carries x = (2B)^gamma * y
    cert = KernelCertificate(
        t=t, c=c, gamma=params.gamma,
        cheb=(p1, q1, p2 * scale3, q2 * scale3),
    )
    d1, d2, d3, d4 = cert.degrees
    if max(d1, d2) > nfloor or max(d3, d4) > max(nfloor - 1, 0):
        raise AssertionError(
            f"certificate degrees {cert.degrees} exceed bounds at t = {t:g}"
        )
    return cert


def wtilde(lam: float, t: float, gamma: float, profile: BumpProfile):
    """Continuum weight sqrt(c0) * phi(lambda^(gamma/2) t); needs the h = 1/2 profile."""
    if abs(profile.h - 0.5) > 1e-12:
        raise ValueError("the continuum weight requires the h = 1/2 profile")
    c0 = c0_constant(profile, gamma)
    lam = np.asarray(lam, dtype=float)
    return math.sqrt(c0) * profile.phi_at(lam ** (gamma / 2.0) * t)


# ---------------------------------------------------------------------------
# partition-of-unity integrals
# ---------------------------------------------------------------------------

def tail_weight_integral(lam, T: float, params: WeightParams,
                         profile: BumpProfile):
    """Exact upper tail int_T^inf t^((2-gamma)/gamma) wbar_t(lam) dt via the
    tabulated moments Psi_q of phi^2.  Vectorized over lam."""
    p = params.p
    lam = np.asarray(lam, dtype=float)
    th = _theta(lam, params)
    nmax = int(np.ceil((profile.s_max / max(T, 1.0) + np.pi) / (2.0 * np.pi))) + 1
    ns = 2.0 * np.pi * np.arange(-nmax, nmax + 1)
    args = np.abs(np.expand_dims(th, -1) - ns)
    args = np.where(args < 1e-300, 1e-300, args)
    total = 0.0
    for j in range(p):
        q = p - j
        total = total + (
            profile.cprime[q - 1] * params.pf_coeffs[j]
            * np.sum(profile.psi_at(q, args * T) / args ** (2 * q), axis=-1)
        )
    out = total / (2.0 * params.B)
    return out if np.ndim(out) else float(out)


def partition_integral(lam: float, family: WeightFamily, T: float = 64.0,
                       rel_tol: float = 1e-8) -> float:
    """lambda * int_0^inf t^((2-gamma)/gamma) w_t(lambda) dt, assembled as the
    closed small-t mass, adaptive quadrature on [1, T], and the exact tail."""
    params, profile = family.params, family.profile
    expo = (2.0 - params.gamma) / params.gamma

    def f(u):  # log substitution keeps the grid resolution scale-free
        t = math.exp(u)
        return t ** (expo + 1.0) * wbar_value(t, lam, params, profile)

    quad = adaptive_simpson(f, 0.0, math.log(T), rel_tol=rel_tol)
    total = family.small_t_mass() + quad + tail_weight_integral(lam, T, params, profile)
    return lam * total


def continuum_partition_integral(lam: float, gamma: float, profile: BumpProfile,
                                 rel_tol: float = 1e-9) -> float:
    """lambda * int_0^inf t^((2-gamma)/gamma) wtilde_t(lambda)^2 dt."""
    c0 = c0_constant(profile, gamma)
    expo = (2.0 - gamma) / gamma
    root = lam ** (gamma / 2.0)
    upper = profile.s_max / root

    def f(t):
        v = profile.phi_at(root * t)
        return t ** expo * v * v

    # split at the phi peak scale to help the adaptive rule
    mid = min(1.0 / root, upper)
    val = adaptive_simpson(f, 0.0, mid, rel_tol=rel_tol)
    if upper > mid:
        val += adaptive_simpson(f, mid, upper, rel_tol=rel_tol)
    return lam * c0 * val


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def profile_to_json(profile: BumpProfile) -> str:
    payload = {
        "h": profile.h,
        "sharpness": profile.sharpness,
        "grid_step": profile.grid_step,
        "s_max": profile.s_max,
        "phi": profile.phi.tolist(),
        "kappa_hat": profile.kappa_hat.tolist(),
        "phi_sq_hat": profile.phi_sq_hat.tolist(),
        "phi_sq_hat_step": profile.phi_sq_hat_step,
        "c0": profile.c0,
        "cprime": list(profile.cprime),
        "psi_tails": profile.psi_tails.tolist(),
    }
    return json.dumps(payload)


def profile_from_json(text: str) -> BumpProfile:
    d = json.loads(text)
    return BumpProfile(
        h=d["h"],
        sharpness=d["sharpness"],
        grid_step=d["grid_step"],
        s_max=d["s_max"],
        phi=np.array(d["phi"]),
        kappa_hat=np.array(d["kappa_hat"]),
        phi_sq_hat=np.array(d["phi_sq_hat"]),
        phi_sq_hat_step=d["phi_sq_hat_step"],
        c0=d["c0"],
        cprime=tuple(d["cprime"]),
        psi_tails=np.array(d["psi_tails"]),
    )


def family_to_json(family: WeightFamily) -> str:
    payload = {
        "params": {
            "gamma": family.params.gamma,
            "B": family.params.B if math.isfinite(family.params.B) else "inf",
            "pf_coeffs": list(family.params.pf_coeffs),
            "model": family.params.model,
        },
        "gamma_const": family.gamma_const,
        "wbar1": family.wbar1,
        "profile": json.loads(profile_to_json(family.profile)),
    }
    return json.dumps(payload)


def family_from_json(text: str) -> WeightFamily:
    d = json.loads(text)
    pr = profile_from_json(json.dumps(d["profile"]))
    b = d["params"]["B"]
    params = WeightParams(
        gamma=d["params"]["gamma"],
        B=math.inf if b == "inf" else b,
        pf_coeffs=tuple(d["params"]["pf_coeffs"]),
        model=d["params"]["model"],
    )
    return WeightFamily(params=params, profile=pr,
                        gamma_const=d["gamma_const"], wbar1=d["wbar1"])
