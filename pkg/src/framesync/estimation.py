"""Covariant phase estimation: admissible costs, the optimal joint value,
the canonical error density, and an independent brute-force check.

A cost is an even trigonometric series c(phi) = c_0 + sum_q c_q cos(q phi)
with c_q <= 0 for q >= 1.  For a state with level-amplitude magnitudes m_n,
the best any joint measurement can do is

    c_0 + sum_{q>=1} c_q sum_n m_n m_{n+q}

and the optimal measurement's error delta = estimate - truth is distributed
with density |sum_n m_n exp(i n delta)|^2 / (2 pi).  ``brute_force_min_cost``
re-derives the optimum by searching covariant rank-one seed phases directly,
without using the closed form; it exists so the formula can be checked
against an implementation that cannot share its bugs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .core import ContractViolation, RandomSource, RngLike, as_generator

TWO_PI = 2.0 * math.pi

NORM_ATOL = 1e-10      # input normalization gate
DEFAULT_BINS = 1 << 16  # inverse-CDF sampling grid


@dataclass(frozen=True)
class CostFunction:
    """Even cosine-series cost; admissible means c_q <= 0 for every q >= 1."""

    c0: float
    cq: tuple

    def __post_init__(self):
        cq = tuple(float(c) for c in self.cq)
        if any(not np.isfinite(c) for c in (self.c0,) + cq):
            raise ContractViolation("cost coefficients must be finite")
        bad = [q + 1 for q, c in enumerate(cq) if c > 0.0]
        if bad:
            raise ContractViolation(f"cost is not admissible: c_q > 0 at q = {bad}")
        object.__setattr__(self, "c0", float(self.c0))
        object.__setattr__(self, "cq", cq)

    @property
    def qmax(self) -> int:
        return len(self.cq)

    def value(self, phi):
        """c(phi), vectorized over phi."""
        phi = np.asarray(phi, dtype=float)
        out = np.full(phi.shape, self.c0)
        for q, c in enumerate(self.cq, start=1):
            if c != 0.0:
                out += c * np.cos(q * phi)
        return out if out.shape else float(out)


def cost_value(cost: CostFunction, phi) -> float:
    return cost.value(phi)


def variance_cost() -> CostFunction:
    """c(phi) = 4 sin^2(phi/2) = 2 - 2 cos(phi)."""
    return CostFunction(2.0, (-2.0,))


def likelihood_cost(q_max: int) -> CostFunction:
    """Truncated negative-delta cost, rewarding exact hits.

    The full series has c_0 = -1/(2 pi) and c_q = -1/pi for all q >= 1;
    truncation keeps q <= q_max.
    """
    if q_max < 1:
        raise ContractViolation("likelihood cost needs q_max >= 1")
    return CostFunction(-1.0 / TWO_PI, (-1.0 / math.pi,) * q_max)


def _magnitudes(e) -> np.ndarray:
    m = np.abs(np.asarray(e, dtype=complex))
    if m.ndim != 1 or m.size == 0:
        raise ContractViolation("amplitude vector must be nonempty and 1-d")
    if abs(np.sum(m * m) - 1.0) > NORM_ATOL:
        raise ContractViolation(f"amplitudes must be normalized, got sum of squares {np.sum(m*m)!r}")
    return m


def min_joint_cost(e, cost: CostFunction) -> float:
    """Minimum average cost over all joint measurements, from magnitudes alone."""
    m = _magnitudes(e)
    total = cost.c0
    for q, c in enumerate(cost.cq, start=1):
        if q >= m.size:
            break
        total += c * float(np.dot(m[:-q], m[q:]))
    return total


@dataclass(frozen=True)
class CovariantSeed:
    """Rank-one covariant seed phases theta_n, gauge-fixed to theta_0 = 0."""

    phases: tuple

    def __post_init__(self):
        ph = tuple(float(t) for t in self.phases)
        if not ph:
            raise ContractViolation("seed needs at least one phase")
        if abs(ph[0]) > 1e-12:
            raise ContractViolation("seed gauge requires theta_0 = 0")
        object.__setattr__(self, "phases", ph)


@dataclass(frozen=True)
class EstimateDensity:
    """Error density p(delta) = |sum_n m_n exp(i n delta)|^2 / (2 pi).

    ``magnitudes[n]`` is the amplitude magnitude at integer level n; zeros are
    fine and encode spectral gaps.
    """

    magnitudes: tuple

    def __post_init__(self):
        m = tuple(float(x) for x in self.magnitudes)
        if any(x < -1e-12 for x in m):
            raise ContractViolation("magnitudes must be nonnegative")
        m = tuple(max(x, 0.0) for x in m)
        if abs(sum(x * x for x in m) - 1.0) > NORM_ATOL:
            raise ContractViolation("magnitudes must have unit sum of squares")
        object.__setattr__(self, "magnitudes", m)

    def pdf(self, delta):
        delta = np.asarray(delta, dtype=float)
        m = np.array(self.magnitudes)
        levels = np.arange(m.size)
        amp = np.exp(1j * np.multiply.outer(delta, levels)) @ m
        out = (amp.real**2 + amp.imag**2) / TWO_PI
        return out if out.shape else float(out)

    def average_cost(self, cost: CostFunction, points: int = DEFAULT_BINS) -> float:
        """Quadrature of c(delta) p(delta) on a uniform periodic grid.

        Uniform trapezoid quadrature of a trigonometric polynomial is exact
        once the grid beats the bandwidth, so the default is far more than
        enough for any desk-scale state.
        """
        grid = np.arange(points) * (TWO_PI / points)
        return float(np.mean(cost.value(grid) * self.pdf(grid)) * TWO_PI)


def estimate_density(psi_magnitudes) -> EstimateDensity:
    m = np.asarray(psi_magnitudes, dtype=float)
    if m.ndim != 1 or m.size == 0:
        raise ContractViolation("magnitude vector must be nonempty and 1-d")
    return EstimateDensity(tuple(m.tolist()))


@lru_cache(maxsize=32)
def _cdf_table(magnitudes: tuple, bins: int):
    """Cumulative masses of the midpoint-evaluated density on ``bins`` bins."""
    dens = EstimateDensity(magnitudes)
    width = TWO_PI / bins
    mid = (np.arange(bins) + 0.5) * width
    mass = dens.pdf(mid) * width
    cdf = np.concatenate(([0.0], np.cumsum(mass)))
    cdf /= cdf[-1]
    return cdf


def sample_estimate(density: EstimateDensity, phi_true: float, rng: RngLike,
                    bins: int = DEFAULT_BINS) -> float:
    """Draw an estimate with error distributed as the canonical density.

    Inverse-CDF sampling on a fixed grid: the density is evaluated at bin
    midpoints and treated as constant within each bin, so the sampled law is
    the piecewise-constant approximation (bias O(bins^-2) on smooth costs).
    Result is reduced to [0, 2 pi).
    """
    cdf = _cdf_table(density.magnitudes, bins)
    u = as_generator(rng).random()
    j = int(np.searchsorted(cdf, u, side="right")) - 1
    j = min(max(j, 0), bins - 1)
    mass = cdf[j + 1] - cdf[j]
    frac = (u - cdf[j]) / mass if mass > 0.0 else 0.0
    delta = (j + frac) * (TWO_PI / bins)
    return float((phi_true + delta) % TWO_PI)


def _pair_terms(e, cost: CostFunction):
    """Weighted phase-difference terms of the covariant-seed objective.

    Returns (c0, [(n, n+q, weight, offset)]) so that the average cost of the
    seed with phases theta is
    c0 + sum weight * cos((theta[j] + offset_arg_j) - (theta[i] + offset_arg_i)),
    folded here into a single offset per term.
    """
    e = np.asarray(e, dtype=complex)
    m = np.abs(e)
    arg = np.angle(e)
    terms = []
    for q, c in enumerate(cost.cq, start=1):
        if c == 0.0 or q >= e.size:
            continue
        for n in range(e.size - q):
            w = c * m[n] * m[n + q]
            if w != 0.0:
                terms.append((n, n + q, w, arg[n + q] - arg[n]))
    return cost.c0, terms


def _seed_cost(c0: float, terms, theta: np.ndarray) -> float:
    total = c0
    for i, j, w, off in terms:
        total += w * math.cos(theta[j] - theta[i] + off)
    return total


def _grid_search(c0, terms, n_levels, grid_points):
    """Exhaustive search of the phase grid; feasible up to three free phases."""
    axis = TWO_PI * np.arange(grid_points) / grid_points
    free = n_levels - 1
    if free == 0 or not terms:
        return c0 + sum(w * math.cos(off) for _, _, w, off in terms), np.zeros(n_levels)

    best_val = math.inf
    best = np.zeros(n_levels)
    if free == 1:
        vals = np.full(grid_points, c0)
        for i, j, w, off in terms:
            tj = axis if j == 1 else 0.0
            ti = axis if i == 1 else 0.0
            vals = vals + w * np.cos(tj - ti + off)
        k = int(np.argmin(vals))
        return float(vals[k]), np.array([0.0, axis[k]])
    if free == 2:
        t1, t2 = np.meshgrid(axis, axis, indexing="ij")
        planes = {0: 0.0, 1: t1, 2: t2}
        vals = np.full(t1.shape, c0)
        for i, j, w, off in terms:
            vals = vals + w * np.cos(planes[j] - planes[i] + off)
        k = np.unravel_index(int(np.argmin(vals)), vals.shape)
        return float(vals[k]), np.array([0.0, axis[k[0]], axis[k[1]]])
    if free == 3:
        t2, t3 = np.meshgrid(axis, axis, indexing="ij")
        for a1 in axis:
            planes = {0: 0.0, 1: a1, 2: t2, 3: t3}
            vals = np.full(t2.shape, c0)
            for i, j, w, off in terms:
                vals = vals + w * np.cos(planes[j] - planes[i] + off)
            k = np.unravel_index(int(np.argmin(vals)), vals.shape)
            if vals[k] < best_val:
                best_val = float(vals[k])
                best = np.array([0.0, a1, axis[k[0]], axis[k[1]]])
        return best_val, best
    raise ContractViolation("exhaustive grid search supports at most 3 free phases")


def _coordinate_descent(c0, terms, n_levels, restarts, rng):
    """Cyclic exact line search from random restarts.

    Restricted to one coordinate t, the objective collapses to a single
    sinusoid |Z| cos(t + arg Z), so each update jumps straight to the
    continuous minimizer t = pi - arg Z; restarts guard against the rare
    non-global critical point.
    """
    gen = as_generator(rng)
    by_coord = {}
    for t in terms:
        by_coord.setdefault(t[0], []).append(t)
        by_coord.setdefault(t[1], []).append(t)

    best_val = math.inf
    best = np.zeros(n_levels)
    for _ in range(max(1, restarts)):
        theta = np.concatenate(([0.0], gen.uniform(0.0, TWO_PI, size=n_levels - 1)))
        current = _seed_cost(c0, terms, theta)
        for _ in range(500):
            for n in range(1, n_levels):
                mine = by_coord.get(n)
                if not mine:
                    continue
                z = 0.0j
                for i, j, w, off in mine:
                    gamma = (theta[i] - off) if j == n else (theta[j] + off)
                    z += w * complex(math.cos(gamma), -math.sin(gamma))
                if abs(z) > 0.0:
                    theta[n] = (math.pi - math.atan2(z.imag, z.real)) % TWO_PI
            new = _seed_cost(c0, terms, theta)
            if current - new < 1e-14:
                current = new
                break
            current = new
        if current < best_val:
            best_val = current
            best = theta.copy()
    return best_val, best


def brute_force_min_cost(e, cost: CostFunction, grid_points: int = 360, *,
                         method: str = "auto", restarts: int = 8,
                         rng: RngLike | None = None, return_seed: bool = False):
    """Search covariant rank-one seeds for the minimum average cost.

    ``method`` is "grid" (exhaustive on ``grid_points`` per phase, at most 3
    free phases), "descent" (coordinate descent with exact line search from
    random restarts), or "auto" (grid up to 2 free phases, descent beyond).
    Returns the best value found, or with ``return_seed=True`` a
    (value, CovariantSeed) pair.
    """
    m = _magnitudes(e)  # validates normalization
    n_levels = m.size
    c0, terms = _pair_terms(e, cost)
    if grid_points < 4:
        raise ContractViolation("grid needs at least 4 points per phase")
    free = n_levels - 1

    if method == "auto":
        method = "grid" if free <= 2 else "descent"
    if method == "grid":
        if free > 3:
            raise ContractViolation("grid method supports at most 3 free phases")
        val, theta = _grid_search(c0, terms, n_levels, grid_points)
    elif method == "descent":
        val, theta = _coordinate_descent(
            c0, terms, n_levels, restarts,
            rng if rng is not None else RandomSource(0))
    else:
        raise ContractViolation(f"unknown method {method!r}")

    if return_seed:
        return val, CovariantSeed(tuple(theta.tolist()))
    return val
