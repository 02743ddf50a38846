"""Two-party protocols on top of the estimation layer.

One-way synchronization: Alice measures her half of a shared resource state
in a Fourier-type family, tells Bob the outcome, and Bob runs the optimal
covariant estimation on his collapsed half.  Every outcome leaves Bob with
the same amplitude-magnitude profile as the shared state, so one round of
classical communication already attains the joint optimum; that equality is
the point of the whole construction and is what the Monte Carlo here checks.

Also: two teleportation demos (coefficients survive classical relay, states
do not), an algebraic witness for why no protocol can do better, exact
alignment for finite cyclic groups, and the clock-offset reading of the
phase.
"""
from __future__ import annotations

import functools
import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core import (ATOL, ContractViolation, DensityMatrix, Generator, Ket,
                   RandomSource, RngLike, as_generator, basis_ket, fidelity,
                   measure, phase_shift, tensor)
from .estimation import (CostFunction, EstimateDensity, estimate_density,
                         min_joint_cost, sample_estimate)
from .states import BipartiteFrameState, expand, sector_magnitudes

TWO_PI = 2.0 * math.pi

SUPPORT_ATOL = 1e-12   # amplitude threshold for level supports


@dataclass(frozen=True)
class FourierOutcome:
    """Label of one Alice outcome: Fourier index k plus one degeneracy
    pick j_n per level, as ((level, j), ...) sorted by level."""

    k: int
    j: tuple

    def j_map(self) -> dict:
        return dict(self.j)


@dataclass(frozen=True, eq=False)
class ConditionalOutcome:
    outcome: FourierOutcome
    probability: float
    bob_state: Ket


def _fourier_family(g: Generator, weighting: str):
    """All (outcome label, vector) pairs of the Fourier measurement family.

    The vectors combine one discrete-Fourier pick per degenerate level with a
    Fourier transform across levels; the transform size is max level + 1 so
    level differences never alias.  ``weighting="unit"`` gives the unit-norm
    family (orthonormal exactly when every level is nondegenerate);
    ``weighting="povm"`` rescales so the rank-one elements resolve the
    identity, which is what an actual measurement needs once levels are
    degenerate.
    """
    if g.min_level < 0:
        raise ContractViolation("Fourier family needs nonnegative levels")
    size = g.max_level + 1
    degs = [d for _, d in g.levels]
    n_levels = len(degs)
    n_patterns = int(np.prod(degs))
    outcomes = []
    vectors = np.zeros((size * n_patterns, g.dim), dtype=complex)

    row = 0
    for k in range(size):
        for pattern in itertools.product(*[range(1, d + 1) for d in degs]):
            v = np.zeros(g.dim, dtype=complex)
            off = 0
            for (n, d), j in zip(g.levels, pattern):
                ls = np.arange(1, d + 1)
                phase = np.exp(2j * np.pi * (k * n / size + j * ls / d))
                if weighting == "unit":
                    v[off:off + d] = phase / math.sqrt(n_levels * d)
                elif weighting == "povm":
                    v[off:off + d] = phase / math.sqrt(size * n_patterns)
                else:
                    raise ContractViolation(f"unknown weighting {weighting!r}")
                off += d
            outcomes.append(FourierOutcome(k, tuple((n, j) for (n, _), j in zip(g.levels, pattern))))
            vectors[row] = v
            row += 1
    return outcomes, vectors


def alice_fourier_basis(g: Generator) -> list:
    """Unit-norm Fourier family on Alice's space, ordered by (k, picks)."""
    _, vectors = _fourier_family(g, "unit")
    return [Ket(v) for v in vectors]


def alice_measure(state: BipartiteFrameState) -> list:
    """Deterministic enumeration of Alice's outcomes on the shared state.

    Returns every outcome with its probability and Bob's collapsed state.
    Probabilities are uniform by construction and sum to one.
    """
    psi = expand(state).amplitudes.reshape(state.gen_a.dim, state.gen_b.dim)
    outcomes, vectors = _fourier_family(state.gen_a, "povm")
    cond = vectors.conj() @ psi          # outcome x Bob dimension
    probs = np.einsum("ij,ij->i", cond, cond.conj()).real
    results = []
    for label, row, p in zip(outcomes, cond, probs):
        if p <= 0.0:
            continue
        results.append(ConditionalOutcome(label, float(p), Ket(row / math.sqrt(p))))
    return results


def sector_form_residual(state: BipartiteFrameState) -> float:
    """Self-check: distance of each collapsed state from its sector form.

    Every Alice outcome should leave Bob in (a global phase times)
    sum_n e_n w^{k n} sum_l lam_{n,l} u^{-j l} |n, l>, with w the across-level
    and u the within-level Fourier phases.  Returns the worst global-phase-
    aligned distance over all outcomes; anything above ~1e-12 means the
    measurement and the sector bookkeeping disagree.
    """
    ga, gb = state.gen_a, state.gen_b
    size = ga.max_level + 1
    worst = 0.0
    for item in alice_measure(state):
        predicted = np.zeros(gb.dim, dtype=complex)
        picks = item.outcome.j_map()
        for n in range(state.total + 1):
            sec = state.sector(n)
            if sec is None or state.amps[n] == 0.0:
                continue
            a_level = state.total - n
            d_a = ga.degeneracy(a_level)
            sb = gb.level_slice(n)
            ls = np.arange(1, sec.rank + 1)
            phases = np.exp(-2j * np.pi * picks[a_level] * ls / d_a)
            predicted[sb.start:sb.start + sec.rank] = (
                state.amps[n] * np.exp(2j * np.pi * item.outcome.k * n / size)
                * np.array(sec.lam) * phases)
        predicted /= np.linalg.norm(predicted)
        overlap = np.vdot(predicted, item.bob_state.amplitudes)
        align = overlap / abs(overlap) if abs(overlap) > 0 else 1.0
        worst = max(worst, float(np.linalg.norm(item.bob_state.amplitudes - align * predicted)))
    return worst


class SyncProtocol:
    """Precomputed one-way sync run: outcome table plus Bob's error density.

    Bob's collapsed state has magnitude profile |e_n| for every outcome (the
    outcome only rotates phases, which the covariant seed absorbs), so a
    single density serves all outcomes.
    """

    def __init__(self, state: BipartiteFrameState):
        self.state = state
        self.outcomes = alice_measure(state)
        self._cum = np.cumsum([o.probability for o in self.outcomes])
        if abs(self._cum[-1] - 1.0) > 1e-10:
            raise ContractViolation(
                f"outcome probabilities sum to {self._cum[-1]!r}, expected 1")
        self.density: EstimateDensity = estimate_density(state.magnitudes())

    def trial(self, phi_true: float, rng: RngLike):
        gen = as_generator(rng)
        k = int(np.searchsorted(self._cum, gen.random(), side="right"))
        k = min(k, len(self.outcomes) - 1)
        phi_hat = sample_estimate(self.density, phi_true, gen)
        return phi_hat, self.outcomes[k]


def run_sync_trial(state: BipartiteFrameState, phi_true: float, rng: RngLike):
    """One protocol run: (Bob's estimate in [0, 2 pi), Alice's outcome record)."""
    return SyncProtocol(state).trial(float(phi_true), rng)


def monte_carlo_cost(state: BipartiteFrameState, cost: CostFunction, trials: int,
                     rng: RandomSource, *, threads: int | None = None):
    """Sample mean and standard error of the cost over seeded trials.

    The offset is drawn uniformly per trial; trial i uses the split stream
    ``rng.split(i)``, so results are independent of execution order and of
    ``threads`` (which only bounds worker parallelism).
    """
    if trials < 100:
        raise ContractViolation("need at least 100 trials for a standard error")
    if not isinstance(rng, RandomSource):
        raise ContractViolation("monte_carlo_cost needs a splittable RandomSource")
    protocol = SyncProtocol(state)

    def run_block(indices) -> np.ndarray:
        out = np.empty(len(indices))
        for pos, i in enumerate(indices):
            gen = rng.split(i).generator()
            phi = TWO_PI * gen.random()
            phi_hat, _ = protocol.trial(phi, gen)
            out[pos] = cost.value(phi_hat - phi)
        return out

    workers = max(1, int(threads)) if threads else 1
    if workers == 1:
        costs = run_block(range(trials))
    else:
        blocks = np.array_split(np.arange(trials), workers)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            costs = np.concatenate(list(pool.map(run_block, blocks)))
    mean = float(np.mean(costs))
    sem = float(np.std(costs, ddof=1) / math.sqrt(trials))
    return mean, sem


def frameness(state: BipartiteFrameState, cost: CostFunction) -> float:
    """Negated optimal joint cost; never increases under local operations
    and classical communication, which makes it a resource measure."""
    return -min_joint_cost(state.magnitudes(), cost)


def frameness_of_ket(e_ket: Ket, gen_a: Generator, gen_b: Generator,
                     cost: CostFunction) -> float:
    """Frameness straight from a ket, via sector block norms."""
    _, mags = sector_magnitudes(e_ket, gen_a, gen_b)
    return -min_joint_cost(mags, cost)


def _shift_clock_unitaries(dim: int):
    """Generalized X (cyclic shift) and Z (level phase) on ``dim`` levels."""
    x = np.zeros((dim, dim), dtype=complex)
    x[np.arange(dim), (np.arange(dim) - 1) % dim] = 1.0   # X|j> = |j+1 mod d>
    z = np.diag(np.exp(2j * np.pi * np.arange(dim) / dim))
    return x, z


def _bell_basis(dim: int):
    """Orthonormal maximally entangled basis (U_ab x I)|Phi+> with U_ab = X^a Z^b."""
    x, z = _shift_clock_unitaries(dim)
    phi_plus = np.eye(dim, dtype=complex).reshape(-1) / math.sqrt(dim)
    basis = []
    corrections = []
    for a in range(dim):
        for b in range(dim):
            u = np.linalg.matrix_power(x, a) @ np.linalg.matrix_power(z, b)
            basis.append(Ket(np.kron(u, np.eye(dim)) @ phi_plus))
            corrections.append(u)
    return basis, corrections


def si_teleport(alpha, phi: float) -> Ket:
    """Relay of the coefficient list across the frame mismatch.

    Sending the numbers alpha_n and re-preparing gives Bob the state with
    those coefficients in his own basis; described in Alice's basis that is
    the phase-shifted ket.  The numbers survive; the physical state differs.
    """
    psi = Ket(np.asarray(alpha, dtype=complex)).require_unit(what="coefficient list")
    g = Generator.ladder(psi.dim)
    return Ket(phase_shift(g, phi) @ psi.amplitudes)


def fidelity_after_relay(alpha, phi: float) -> float:
    """Overlap of the relayed coefficients with their intended target.

    The target of sending numbers is the state carrying those coefficients in
    the receiver's basis; the relay hits it exactly for every mismatch, which
    is the contrast to :func:`teleport_with_mismatch`.
    """
    alpha = np.asarray(alpha, dtype=complex)
    g = Generator.ladder(alpha.size)
    target = phase_shift(g, phi) @ alpha
    relayed = si_teleport(alpha, phi).amplitudes
    return float(abs(np.vdot(target, relayed)) ** 2)


def teleport_with_mismatch(input_state: Ket, phi: float,
                           resource_dim: int = 2) -> DensityMatrix:
    """Teleportation with Bob's corrections expressed in his own frame.

    Standard protocol over a maximally entangled resource (a qubit pair by
    default), except each correction C becomes U_phi C U_phi^dagger because
    Bob's reference differs from Alice's by the phase offset.  Returns the
    outcome-averaged output state; exact, no sampling.
    """
    psi = input_state.require_unit(what="input state")
    d = psi.dim
    if d != resource_dim:
        raise ContractViolation(
            f"input dimension {d} does not match the entangled resource dimension {resource_dim}")
    g = Generator.ladder(d)
    u_phi = phase_shift(g, phi)
    bell, corrections = _bell_basis(d)

    phi_plus = Ket(np.eye(d, dtype=complex).reshape(-1) / math.sqrt(d))
    joint = tensor(psi, phi_plus)                       # S x (A' B)
    cond = np.vstack([b.amplitudes for b in bell]).conj() @ joint.amplitudes.reshape(d * d, d)

    rho = np.zeros((d, d), dtype=complex)
    for row, c in zip(cond, corrections):
        p = float(np.vdot(row, row).real)
        if p <= 0.0:
            continue
        pre = row / math.sqrt(p)
        out = (u_phi @ c @ u_phi.conj().T) @ pre
        rho += p * np.outer(out, out.conj())
    return DensityMatrix(rho)


@dataclass(frozen=True)
class WitnessReport:
    """Why classical relay cannot orient a frame: diagnostics of the
    fixed-level-difference decomposition of (input x resource)."""

    levels: tuple                 # level differences with nonzero weight
    weights: tuple                # matching component weights
    l_max: int                    # top reachable level difference
    invariance_residual: float    # commutator norm of the top component
    input_ui_norm: float          # how far the input is from phase-invariant

    def passes(self, atol: float = 1e-10) -> bool:
        return self.invariance_residual <= atol


def no_go_witness(psi0: Ket, gen_s: Generator, e_ket: Ket,
                  gen_a: Generator, gen_b: Generator, *,
                  phi_points: int = 256) -> WitnessReport:
    """Decompose (input x resource) by level difference and test the blocker.

    Any protocol consuming the resource and classical messages only can be
    averaged over the unknown phase, which splits the global pure state over
    eigenspaces of (input level) - (Bob level).  The top-difference component
    is built solely from the input's highest level and Bob's lowest, so it
    commutes with Bob's generator; an input that is not phase-invariant
    therefore cannot be reproduced on Bob's side.  The report carries the
    commutator residual (should vanish) and the input's distance from phase
    invariance (should not).
    """
    psi0.require_unit(what="input state")
    e_ket.require_unit(what="resource ket")
    if e_ket.dim != gen_a.dim * gen_b.dim:
        raise ContractViolation(
            f"resource dimension {e_ket.dim} does not match {gen_a.dim} x {gen_b.dim}")
    if psi0.dim != gen_s.dim:
        raise ContractViolation("input dimension does not match its generator")

    joint = tensor(psi0, e_ket).amplitudes
    eig_s = gen_s.eigenvalues()
    eig_b = gen_b.eigenvalues()
    # level difference per joint basis slot, S x A x B ordering
    diff = (eig_s[:, None, None] + np.zeros((1, gen_a.dim, 1), dtype=int)
            + (-eig_b)[None, None, :]).reshape(-1)

    levels = []
    weights = []
    for l in sorted(set(diff.tolist())):
        w = float(np.sum(np.abs(joint[diff == l]) ** 2))
        if w > SUPPORT_ATOL:
            levels.append(int(l))
            weights.append(w)

    m_max = int(eig_s[np.abs(psi0.amplitudes) > SUPPORT_ATOL].max())
    res_b = np.linalg.norm(
        e_ket.amplitudes.reshape(gen_a.dim, gen_b.dim), axis=0)
    n_min = int(eig_b[res_b > SUPPORT_ATOL].min())
    l_max = m_max - n_min

    mask = (diff == l_max).astype(float)
    sigma = (joint * mask)[:, None] * (joint * mask).conj()[None, :]
    g_b_diag = np.tile(eig_b, gen_s.dim * gen_a.dim).astype(float)
    comm = sigma * (g_b_diag[:, None] - g_b_diag[None, :])
    invariance_residual = float(np.linalg.norm(comm, 2))

    grid = np.arange(phi_points) * (TWO_PI / phi_points)
    shifted = np.exp(-1j * np.outer(grid, eig_s)) * psi0.amplitudes[None, :]
    input_ui_norm = float(np.linalg.norm(shifted - psi0.amplitudes[None, :], axis=1).max())

    return WitnessReport(tuple(levels), tuple(weights), l_max,
                         invariance_residual, input_ui_norm)


@dataclass(frozen=True)
class GroupTable:
    """Finite group as a multiplication table, axioms checked up front."""

    table: tuple

    def __post_init__(self):
        t = tuple(tuple(int(x) for x in row) for row in self.table)
        d = len(t)
        if d == 0 or any(len(row) != d for row in t):
            raise ContractViolation("table must be square and nonempty")
        if any(not 0 <= x < d for row in t for x in row):
            raise ContractViolation("table entries must be element indices")
        identity = None
        for e in range(d):
            if all(t[e][x] == x and t[x][e] == x for x in range(d)):
                identity = e
                break
        if identity is None:
            raise ContractViolation("table has no identity element")
        for a in range(d):
            if identity not in t[a]:
                raise ContractViolation(f"element {a} has no inverse")
        for a in range(d):
            for b in range(d):
                for c in range(d):
                    if t[t[a][b]][c] != t[a][t[b][c]]:
                        raise ContractViolation(
                            f"associativity fails at ({a}, {b}, {c})")
        object.__setattr__(self, "table", t)
        object.__setattr__(self, "_identity", identity)

    @classmethod
    def cyclic(cls, order: int) -> "GroupTable":
        if order < 1:
            raise ContractViolation("cyclic group needs order >= 1")
        return cls(tuple(tuple((a + b) % order for b in range(order))
                         for a in range(order)))

    @property
    def order(self) -> int:
        return len(self.table)

    @property
    def identity(self) -> int:
        return self._identity

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def inverse(self, a: int) -> int:
        return self.table[a].index(self.identity)


@functools.lru_cache(maxsize=64)
def _element_basis(d: int) -> tuple[Ket, ...]:
    return tuple(basis_ket(d, h) for h in range(d))


@functools.lru_cache(maxsize=256)
def _correlated_state(table: tuple, mismatch: int) -> Ket:
    group = GroupTable(table)
    d = group.order
    amps = np.zeros((d, d), dtype=complex)
    for h in range(d):
        amps[h, group.mul(mismatch, h)] = 1.0 / math.sqrt(d)
    return Ket(amps.reshape(-1))


def finite_group_align(group: GroupTable, mismatch: int, rng: RngLike) -> int:
    """Recover a finite-group frame mismatch exactly from one shared pair.

    The parties share the uniform correlated state over group elements; Alice
    measures in her element basis, Bob in his (offset by the mismatch), and
    the estimate (Bob's outcome) * (Alice's outcome)^-1 is exact every time.
    """
    d = group.order
    if not 0 <= mismatch < d:
        raise ContractViolation(f"mismatch must be an element index 0..{d - 1}")
    gen = as_generator(rng)

    state = _correlated_state(group.table, mismatch)
    element_basis = _element_basis(d)
    a_out, posterior, _ = measure(state, element_basis, gen)
    b_out, _, _ = measure(posterior, element_basis, gen)
    return group.mul(b_out, group.inverse(a_out))


@dataclass(frozen=True)
class ClockParams:
    """Equally spaced clock: level spacing, number of levels, elapsed delay."""

    level_spacing: float
    dim: int
    delay: float

    def __post_init__(self):
        if self.level_spacing <= 0.0 or not np.isfinite(self.level_spacing):
            raise ContractViolation("level spacing must be positive and finite")
        if self.dim < 2:
            raise ContractViolation("a clock needs at least 2 levels")
        if not np.isfinite(self.delay):
            raise ContractViolation("delay must be finite")


def clock_phase(params: ClockParams) -> float:
    """Phase offset accumulated by a free clock over the delay, mod 2 pi.

    With unit-spaced integer levels scaled by the level spacing E0, waiting a
    time T turns synchronization into estimating phi = E0 T mod 2 pi.
    """
    return float((params.level_spacing * params.delay) % TWO_PI)
