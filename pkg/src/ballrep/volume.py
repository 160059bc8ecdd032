"""Volumes and moments of polynomial sublevel sets G = {x : g(x) <= 1}.

For a positively homogeneous g of degree d the Lebesgue volume and the
moments of G have two equivalent expressions that the backends exploit:

* an exponential integral over all of R^n,
      integral_G x^alpha dx
        = Gamma(1 + (n + |alpha|)/d)^-1 * integral x^alpha exp(-g(x)) dx,
  which drives the importance-sampling backend, and
* a radial reduction over the unit sphere,
      integral_G x^alpha dx
        = (n + |alpha|)^-1 * integral_S theta^alpha h(theta)^-(n+|alpha|)/d dsigma,
  with h the restriction of g to the sphere, which drives the deterministic
  spherical backend (periodic trapezoid for n = 2, product Gauss-Legendre
  for n = 3).

A slow grid indicator oracle provides an independent cross-check.  All
estimates carry a standard error: zero for the spherical backend,
statistical for Monte Carlo, and a boundary-cell bound for the grid.
"""

from __future__ import annotations

import hashlib
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import optimize

from .gammafn import log_gamma
from .polynomials import (
    Exponent,
    GeneralizedPolynomial,
    enumerate_indices,
    multinomial_coefficient,
)
from .serialize import serialize_polynomial

SPHERICAL = "spherical"
MONTE_CARLO = "monte_carlo"
GRID_ORACLE = "grid_oracle"
CLOSED_FORM = "closed_form"

DEFAULT_BUDGETS = {SPHERICAL: 8192, MONTE_CARLO: 200_000, GRID_ORACLE: 1_000_000}

_MC_BATCH = 1 << 16


class InfiniteVolumeError(ValueError):
    """The sublevel set is (or looks) of infinite Lebesgue volume."""

    def __init__(self, message: str, sphere_minimum: float | None = None):
        super().__init__(message)
        self.sphere_minimum = sphere_minimum


class EffectiveSampleSizeWarning(UserWarning):
    """Importance weights are heavy-tailed; the input is near infeasibility."""


@dataclass(frozen=True)
class VolumeEstimate:
    """A volume value with uncertainty and provenance.

    std_error is 0 for the spherical backend, a statistical standard error
    for Monte Carlo, and a boundary-cell discretization bound for the grid
    oracle.  ess is the effective sample size (Monte Carlo only).
    """

    value: float
    std_error: float
    backend: str
    samples_or_nodes: int
    ess: float | None = None


@dataclass(frozen=True)
class FeasibilityVerdict:
    """Outcome of the sphere-minimum heuristic for finite volume.

    finite_volume = False is a proof (a strictly negative direction was
    found); finite_volume = True is a belief, not a proof.
    """

    finite_volume: bool
    sphere_minimum: float
    restarts: int


@dataclass(frozen=True)
class MomentTable:
    """Moments of one sublevel set, keyed by exponent numerators over q."""

    q: int
    entries: dict[Exponent, tuple[float, float]]
    normalization: VolumeEstimate
    region: str

    def value(self, alpha: Exponent) -> float:
        return self.entries[tuple(alpha)][0]

    def error(self, alpha: Exponent) -> float:
        return self.entries[tuple(alpha)][1]

    def covers(self, alphas) -> bool:
        return all(tuple(a) in self.entries for a in alphas)

    def rows(self):
        """(alpha, value, std_error) triples in canonical order, volume row first."""
        out = []
        for alpha in sorted(self.entries, key=lambda a: (sum(a), tuple(-x for x in a))):
            v, e = self.entries[alpha]
            out.append((alpha, v, e))
        return out


@dataclass(frozen=True)
class MomentMatrix:
    """Matrix of moments M[a, b] = moment(g, a + b) over an ordered basis."""

    basis: tuple[Exponent, ...]
    values: np.ndarray
    errors: np.ndarray
    q: int
    normalization: VolumeEstimate


def region_hash(g: GeneralizedPolynomial) -> str:
    """Content hash of the defining polynomial (canonical JSON)."""
    return hashlib.sha256(serialize_polynomial(g).encode()).hexdigest()[:16]


# -- closed forms -------------------------------------------------------------


def closed_form_ball_volume(n: int, d) -> float:
    """Volume of {x : sum |x_i|**d <= 1}: 2^n Gamma(1/d)^n / (n d^(n-1) Gamma(n/d))."""
    d = float(Fraction(d)) if not isinstance(d, float) else d
    if n < 1:
        raise ValueError(f"dimension must be >= 1, got {n}")
    if not d > 0:
        raise ValueError(f"degree must be positive, got {d}")
    log_vol = (
        n * math.log(2.0)
        + n * log_gamma(1.0 / d)
        - math.log(n)
        - (n - 1) * math.log(d)
        - log_gamma(n / d)
    )
    if log_vol > 709.0:
        raise OverflowError(
            f"ball volume overflows double precision for n={n}, d={d} "
            f"(log volume {log_vol:.1f})"
        )
    if log_vol < -745.0:
        raise OverflowError(
            f"ball volume underflows double precision for n={n}, d={d} "
            f"(log volume {log_vol:.1f})"
        )
    return math.exp(log_vol)


def closed_form_ball_moment(n: int, d, axis: int = 0) -> float:
    """integral over the d-ball of |x_axis|**d, equal to its volume / (n + d)."""
    d = float(Fraction(d)) if not isinstance(d, float) else d
    if not 0 <= axis < n:
        raise ValueError(f"axis {axis} out of range for dimension {n}")
    return closed_form_ball_volume(n, d) / (n + d)


# -- symmetry zeros -----------------------------------------------------------


def _symmetry_zero(g: GeneralizedPolynomial, alpha: Exponent) -> bool:
    """True when integral_G x^alpha vanishes exactly by symmetry.

    Classical (even-degree) polynomials give centrally symmetric G, killing
    every moment of odd total degree; when additionally every stored
    exponent is even, G is invariant under per-coordinate sign flips and
    any alpha with an odd component vanishes.  Such moments are returned
    as exact zeros and never estimated.
    """
    if not g.is_classical:
        return False
    if sum(alpha) % 2 == 1:
        return True
    return g.has_even_support() and any(a % 2 == 1 for a in alpha)


# -- spherical backend --------------------------------------------------------


def _sphere_grid(n: int, budget: int):
    """Quadrature directions and weights on the unit sphere S^(n-1)."""
    if n == 2:
        nodes = max(16, int(budget))
        nodes -= nodes % 4  # multiple of 4 keeps coordinate symmetries exact
        theta = 2.0 * math.pi * np.arange(nodes) / nodes
        dirs = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
        weights = np.full(nodes, 2.0 * math.pi / nodes)
        return dirs, weights
    if n == 3:
        half = max(4, int(round(math.sqrt(max(budget, 32) / 2.0))))
        azim = 2 * half
        u, wu = np.polynomial.legendre.leggauss(half)  # u = cos(polar angle)
        psi = 2.0 * math.pi * np.arange(azim) / azim
        s = np.sqrt(1.0 - u**2)
        dirs = np.empty((half, azim, 3))
        dirs[..., 0] = s[:, None] * np.cos(psi)[None, :]
        dirs[..., 1] = s[:, None] * np.sin(psi)[None, :]
        dirs[..., 2] = u[:, None]
        weights = np.repeat(wu * (2.0 * math.pi / azim), azim)
        return dirs.reshape(-1, 3), weights
    raise ValueError(f"spherical backend supports n in {{2, 3}}, got {n}")


def _direction_powers(g: GeneralizedPolynomial, alpha: Exponent, dirs: np.ndarray):
    if g.is_classical:
        return np.prod(dirs ** np.asarray(alpha, dtype=int), axis=-1)
    exps = np.asarray(alpha, dtype=float) / g.q
    return np.prod(np.abs(dirs) ** exps, axis=-1)


def _spherical_estimate(g: GeneralizedPolynomial, alphas, budget: int):
    n, d = g.n, g.degree_float
    dirs, w = _sphere_grid(n, budget)
    h = np.asarray(g.evaluate(dirs), dtype=float)
    hmin = float(h.min())
    if hmin <= 0.0:
        raise InfiniteVolumeError(
            f"sublevel set has infinite volume (sphere minimum {hmin:.6g})",
            sphere_minimum=hmin,
        )
    vol = float(np.dot(w, h ** (-n / d)) / n)
    volume = VolumeEstimate(vol, 0.0, SPHERICAL, len(w))
    moments: dict[Exponent, tuple[float, float]] = {}
    radial_pow: dict[float, np.ndarray] = {}
    for alpha in alphas:
        alpha = tuple(alpha)
        if _symmetry_zero(g, alpha):
            moments[alpha] = (0.0, 0.0)
            continue
        k = n + sum(alpha) / g.q
        if k not in radial_pow:
            radial_pow[k] = h ** (-k / d)
        value = float(np.dot(w, _direction_powers(g, alpha, dirs) * radial_pow[k]) / k)
        moments[alpha] = (value, 0.0)
    return volume, moments


# -- Monte Carlo backend ------------------------------------------------------


def _reference_ratio_minimum(g: GeneralizedPolynomial, seed: int) -> float:
    """Seeded probe of min over directions of g / sum |x_i|^d.

    Both functions are positively homogeneous of the same degree, so the
    ratio is constant along rays and can be evaluated at raw samples; axis
    and diagonal directions (where cross terms bite) are always included.
    """
    n, d = g.n, g.degree_float
    rng = np.random.default_rng([max(0, int(seed)), 131071])
    t = rng.gamma(1.0 / d, 1.0, size=(4096, n))
    x = t ** (1.0 / d) * (rng.integers(0, 2, size=(4096, n)) * 2 - 1)
    ratios = np.asarray(g.evaluate(x), dtype=float) / t.sum(axis=1)
    smallest = float(ratios.min())
    probes = [np.ones(n), -np.ones(n)]
    probes.extend(sign * row for row in np.eye(n) for sign in (1.0, -1.0))
    for v in probes:
        reference = float(np.sum(np.abs(v) ** d))
        smallest = min(smallest, float(g.evaluate(v)) / reference)
    return smallest


def _mc_estimate(g: GeneralizedPolynomial, alphas, budget: int, seed: int):
    """Importance sampling with reference density proportional to exp(-sum |x_i|^d).

    Coordinates are drawn via |x_i|^d ~ Gamma(1/d) with random signs; the
    sample stream is split per batch index so results depend only on
    (seed, budget), not on how batches are scheduled.

    The reference only dominates exp(-2g) when g is at least about half of
    sum |x_i|^d in every direction; otherwise the weights are heavy-tailed
    and the plain estimator has infinite variance.  In that case the
    estimator is applied to the rescaled input tau * g and mapped back
    exactly through homogeneity, f(g) = tau**(n/d) f(tau g), which keeps
    the reference family fixed while taming the weights.
    """
    n, d = g.n, g.degree_float
    alphas = [tuple(a) for a in alphas]
    live = [a for a in alphas if not _symmetry_zero(g, a)]
    budget = int(budget)
    if budget < 1:
        raise ValueError("budget must be >= 1")
    ratio_min = _reference_ratio_minimum(g, seed)
    tau = 1.0
    if 0.0 < ratio_min < 0.75:
        tau = min(0.75 / ratio_min, 1e6)
        g = g.rescale(tau)
    log_zref = n * (math.log(2.0) + log_gamma(1.0 + 1.0 / d))
    sum_w = 0.0
    sum_w2 = 0.0
    sums = np.zeros(len(live))
    sums2 = np.zeros(len(live))
    exps = [np.asarray(a, dtype=float) / (g.q * d) for a in live]
    n_batches = (budget + _MC_BATCH - 1) // _MC_BATCH
    for b in range(n_batches):
        size = min(_MC_BATCH, budget - b * _MC_BATCH)
        rng = np.random.default_rng([max(0, int(seed)), b])
        t = rng.gamma(1.0 / d, 1.0, size=(size, n))
        x = t ** (1.0 / d)
        signs = rng.integers(0, 2, size=(size, n)) * 2 - 1
        x *= signs
        excess = np.asarray(g.evaluate(x), dtype=float) - t.sum(axis=1)
        if np.min(excess) < -700.0:
            raise InfiniteVolumeError(
                "importance weights overflow: the integrand exp(-g) is not "
                "dominated by the axis-power reference density"
            )
        w = np.exp(-excess)
        sum_w += float(w.sum())
        sum_w2 += float((w * w).sum())
        for i, a in enumerate(live):
            # |x_i|^(a_i/q) = t_i^(a_i/(q d)); classical moments restore the sign
            f = np.prod(t ** exps[i], axis=1)
            if g.is_classical:
                odd = np.asarray(a, dtype=int) % 2
                if odd.any():
                    f = f * np.prod(signs**odd, axis=1)
            fw = f * w
            sums[i] += float(fw.sum())
            sums2[i] += float((fw * fw).sum())
    ess = sum_w**2 / sum_w2 if sum_w2 > 0 else 0.0
    if ess < 0.01 * budget:
        warnings.warn(
            f"effective sample size {ess:.1f} below 1% of budget {budget}; "
            "the polynomial is near the feasibility boundary",
            EffectiveSampleSizeWarning,
            stacklevel=3,
        )

    def _mean_se(s, s2):
        mean = s / budget
        var = max(0.0, s2 / budget - mean * mean)
        return mean, math.sqrt(var / max(1, budget - 1))

    mean_w, se_w = _mean_se(sum_w, sum_w2)
    # map the tempered estimates back through f(g) = tau**(n/d) f(tau g)
    c_vol = math.exp(log_zref - log_gamma(1.0 + n / d)) * tau ** (n / d)
    volume = VolumeEstimate(c_vol * mean_w, c_vol * se_w, MONTE_CARLO, budget, ess=ess)
    moments: dict[Exponent, tuple[float, float]] = {a: (0.0, 0.0) for a in alphas}
    for i, a in enumerate(live):
        k = n + sum(a) / g.q
        c = math.exp(log_zref - log_gamma(1.0 + k / d)) * tau ** (k / d)
        mean, se = _mean_se(sums[i], sums2[i])
        moments[a] = (float(c * mean), float(c * se))
    return volume, moments


# -- grid oracle --------------------------------------------------------------


def _grid_estimate(
    g: GeneralizedPolynomial,
    alphas,
    budget: int,
    seed: int,
    feasibility: FeasibilityVerdict | None = None,
):
    """Indicator integration of g(x) <= 1 on a uniform cell grid.

    Intentionally simple and slow; the bounding half-width comes from the
    sphere minimum.  One jittered sample per cell makes the estimator
    unbiased (plain cell centers are systematically off along boundary
    stretches that run parallel to the grid), so the boundary-cell count
    gives an honest standard error: each boundary cell is a Bernoulli
    trial worth at most half a cell.
    """
    n, d = g.n, g.degree_float
    if n > 3:
        raise ValueError(f"grid oracle supports n <= 3, got {n}")
    verdict = feasibility or finite_volume_test(g, seed=seed)
    if not verdict.finite_volume:
        raise InfiniteVolumeError(
            f"sublevel set has infinite volume (sphere minimum "
            f"{verdict.sphere_minimum:.6g})",
            sphere_minimum=verdict.sphere_minimum,
        )
    half_width = verdict.sphere_minimum ** (-1.0 / d)
    m = max(8, int(budget ** (1.0 / n)))
    step = 2.0 * half_width / m
    corners = -half_width + step * np.arange(m)
    cell = step**n
    alphas = [tuple(a) for a in alphas]
    live = [a for a in alphas if not _symmetry_zero(g, a)]
    sums = np.zeros(len(live))
    fmax = np.zeros(len(live))
    inside_mask = np.empty((m,) * n, dtype=bool)
    tail = np.stack(
        np.meshgrid(*([corners] * (n - 1)), indexing="ij"), axis=-1
    ).reshape(-1, max(1, n - 1))
    for i0 in range(m):
        # per-slice stream keeps results independent of slicing order
        rng = np.random.default_rng([max(0, int(seed)), 515, i0])
        if n == 1:
            pts = corners.reshape(-1, 1) + step * rng.random((m, 1))
        else:
            pts = np.concatenate(
                [np.full((tail.shape[0], 1), corners[i0]), tail], axis=1
            )
            pts = pts + step * rng.random(pts.shape)
        inside = np.asarray(g.evaluate(pts), dtype=float) <= 1.0
        inside_mask[i0] = inside.reshape(inside_mask.shape[1:])
        if inside.any() and live:
            chosen = pts[inside]
            base = chosen if g.is_classical else np.abs(chosen)
            for i, a in enumerate(live):
                if g.is_classical:
                    f = np.prod(base ** np.asarray(a, dtype=int), axis=-1)
                else:
                    f = np.prod(base ** (np.asarray(a, dtype=float) / g.q), axis=-1)
                sums[i] += float(f.sum())
                fmax[i] = max(fmax[i], float(np.abs(f).max()))
        if n == 1:
            break
    count = int(np.count_nonzero(inside_mask))
    crossings = 0
    for ax in range(n):
        crossings += int(np.count_nonzero(np.diff(inside_mask, axis=ax)))
    sigma = 0.5 * cell * math.sqrt(max(1, crossings))
    volume = VolumeEstimate(count * cell, sigma, GRID_ORACLE, m**n)
    moments: dict[Exponent, tuple[float, float]] = {a: (0.0, 0.0) for a in alphas}
    for i, a in enumerate(live):
        moments[a] = (float(sums[i] * cell), float(sigma * fmax[i]))
    return volume, moments


# -- dispatch -----------------------------------------------------------------

_BACKENDS = {SPHERICAL, MONTE_CARLO, GRID_ORACLE}


def _estimate(g, alphas, backend: str, budget: int | None, seed: int):
    if backend not in _BACKENDS:
        raise ValueError(f"unknown backend {backend!r}; choose from {sorted(_BACKENDS)}")
    budget = DEFAULT_BUDGETS[backend] if budget is None else int(budget)
    if backend == SPHERICAL:
        return _spherical_estimate(g, alphas, budget)
    if backend == MONTE_CARLO:
        return _mc_estimate(g, alphas, budget, seed)
    return _grid_estimate(g, alphas, budget, seed)


def volume(
    g: GeneralizedPolynomial,
    backend: str = SPHERICAL,
    budget: int | None = None,
    seed: int = 0,
) -> VolumeEstimate:
    """Estimate vol({x : g(x) <= 1}).

    Deterministic backends are bit-reproducible; the Monte Carlo backend is
    reproducible given (seed, budget).  Callers are expected to have run
    finite_volume_test first; an infeasible input raises
    InfiniteVolumeError where the backend can detect it.
    """
    est, _ = _estimate(g, [], backend, budget, seed)
    return est


def moment(
    g: GeneralizedPolynomial,
    alpha,
    backend: str = SPHERICAL,
    budget: int | None = None,
    seed: int = 0,
) -> tuple[float, float]:
    """(value, std_error) of integral_G x^alpha dx.

    alpha is a tuple of exponent numerators over g's lattice denominator.
    Classical inputs integrate the signed monomial, generalized inputs the
    absolute one; Gamma normalization follows 1 + (n + |alpha|)/d.
    """
    _, moments = _estimate(g, [tuple(alpha)], backend, budget, seed)
    return moments[tuple(alpha)]


def moment_table(
    g: GeneralizedPolynomial,
    alphas=None,
    max_order=None,
    backend: str = SPHERICAL,
    budget: int | None = None,
    seed: int = 0,
) -> MomentTable:
    """Estimate a batch of moments with one shared pass (shared samples).

    By default the table covers the degree-d lattice slice (the index set
    of g's own coefficients).  With max_order it covers every lattice
    multi-index of total degree <= max_order, including the all-zeros
    volume row.
    """
    if alphas is None:
        if max_order is not None:
            top = int(Fraction(max_order) * g.q)
            alphas = [
                a
                for k in range(top + 1)
                for a in enumerate_indices(g.n, k)
            ]
        else:
            alphas = enumerate_indices(g.n, int(g.degree * g.q))
    alphas = [tuple(a) for a in alphas]
    est, moments = _estimate(g, alphas, backend, budget, seed)
    zero = (0,) * g.n
    if zero in moments:
        moments[zero] = (est.value, est.std_error)
    return MomentTable(g.q, moments, est, region_hash(g))


def grad_volume(
    g: GeneralizedPolynomial,
    backend: str = SPHERICAL,
    budget: int | None = None,
    seed: int = 0,
) -> dict[Exponent, float]:
    """Gradient of the volume functional at g, keyed by exponent numerators.

    Components cover the full degree-d lattice slice in the canonical index
    order.  The component at alpha is -(n + d)/d times the alpha moment of
    G; in the multinomial convention the chain rule through the stored
    coefficient multiplies by c_alpha.
    """
    basis = enumerate_indices(g.n, int(g.degree * g.q))
    _, moments = _estimate(g, basis, backend, budget, seed)
    factor = -(g.n + g.degree_float) / g.degree_float
    out = {}
    for alpha in basis:
        c = multinomial_coefficient(alpha) if g.convention == "multinomial" else 1.0
        out[alpha] = factor * c * moments[alpha][0]
    return out


def moment_matrix(
    g: GeneralizedPolynomial,
    half_degree: int | None = None,
    backend: str = SPHERICAL,
    budget: int | None = None,
    seed: int = 0,
) -> MomentMatrix:
    """Moment matrix M[a, b] = moment(g, a + b) over the half-degree basis.

    half_degree counts exponent numerators (so d*q/2 by default, which must
    be an integer).  Each distinct a + b is estimated once and mirrored, so
    M is symmetric by construction.
    """
    if half_degree is None:
        twice = g.degree * g.q
        if twice.denominator != 1 or int(twice) % 2 != 0:
            raise ValueError(
                f"d*q = {twice} is odd; pass half_degree explicitly"
            )
        half_degree = int(twice) // 2
    basis = enumerate_indices(g.n, int(half_degree))
    gammas = sorted(
        {tuple(a + b for a, b in zip(alpha, beta)) for alpha in basis for beta in basis},
        reverse=True,
    )
    est, moments = _estimate(g, gammas, backend, budget, seed)
    size = len(basis)
    values = np.zeros((size, size))
    errors = np.zeros((size, size))
    for i, alpha in enumerate(basis):
        for j in range(i, size):
            key = tuple(a + b for a, b in zip(alpha, basis[j]))
            values[i, j] = values[j, i] = moments[key][0]
            errors[i, j] = errors[j, i] = moments[key][1]
    return MomentMatrix(tuple(basis), values, errors, g.q, est)


def euler_residual(
    g: GeneralizedPolynomial,
    backend: str = SPHERICAL,
    budget: int | None = None,
    seed: int = 0,
) -> float:
    """integral_G g dx minus n/(n+d) * vol(G), from one shared pass.

    Homogeneity forces this to vanish; the shared pass makes the two
    estimates correlate so the residual is a sharp self-test.
    """
    support = list(g.terms)
    est, moments = _estimate(g, support, backend, budget, seed)
    integral_g = sum(g.monomial_coefficient(a) * moments[tuple(a)][0] for a in support)
    n, d = g.n, g.degree_float
    return integral_g - n / (n + d) * est.value


def finite_volume_test(
    g: GeneralizedPolynomial,
    restarts: int = 8,
    seed: int = 0,
    tolerance: float = 1e-9,
) -> FeasibilityVerdict:
    """Multi-start minimization of g over the unit sphere.

    A strictly negative minimum proves infinite volume (g is negative on an
    open cone).  finite_volume = True only means no negative direction was
    found; minima at exactly zero are reported as infeasible because the
    sublevel set is then unbounded along the minimizing direction.
    """
    n = g.n
    if n == 1:
        smin = min(float(g.evaluate([1.0])), float(g.evaluate([-1.0])))
        return FeasibilityVerdict(smin > tolerance, smin, 1)
    if n == 2:
        theta = 2.0 * math.pi * np.arange(2048) / 2048
        values = np.asarray(g.evaluate(np.stack([np.cos(theta), np.sin(theta)], -1)))
        order = np.argsort(values)
        smin = float(values.min())
        for idx in order[: max(1, restarts)]:
            lo = theta[idx] - 2.0 * math.pi / 2048
            hi = theta[idx] + 2.0 * math.pi / 2048
            res = optimize.minimize_scalar(
                lambda t: float(g.evaluate([math.cos(t), math.sin(t)])),
                bounds=(lo, hi),
                method="bounded",
                options={"xatol": 1e-12},
            )
            smin = min(smin, float(res.fun))
        return FeasibilityVerdict(smin > tolerance, smin, max(1, restarts))

    rng = np.random.default_rng([max(0, int(seed)), 911])
    starts = [np.eye(n)[i] for i in range(n)]
    starts.append(np.full(n, 1.0 / math.sqrt(n)))
    while len(starts) < max(restarts, n + 1):
        v = rng.normal(size=n)
        starts.append(v / np.linalg.norm(v))

    def objective(v):
        norm = np.linalg.norm(v)
        if norm < 1e-12:
            return float("inf")
        return float(g.evaluate(v / norm))

    smin = math.inf
    for v0 in starts[: max(restarts, n + 1)]:
        res = optimize.minimize(
            objective, v0, method="Nelder-Mead",
            options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 400},
        )
        smin = min(smin, float(res.fun))
    return FeasibilityVerdict(smin > tolerance, smin, max(restarts, n + 1))


def hankel_diag_bound_check(mm: MomentMatrix, sigmas: float = 3.0) -> bool:
    """Check |M[a, b]| <= max axis moment, up to combined standard errors.

    The axis moments are the diagonal entries at the pure powers
    (d*q/2) * e_i; for the ball B_d they dominate every other moment, a
    structural consequence of M being positive semidefinite Hankel.
    """
    basis = list(mm.basis)
    half = sum(basis[0])
    bound = -math.inf
    bound_err = 0.0
    n = len(basis[0])
    for i in range(n):
        pure = tuple(half if j == i else 0 for j in range(n))
        k = basis.index(pure)
        if mm.values[k, k] > bound:
            bound = float(mm.values[k, k])
            bound_err = float(mm.errors[k, k])
    excess = np.abs(mm.values) - bound
    allowance = sigmas * np.hypot(mm.errors, bound_err)
    return bool((excess <= allowance).all())
