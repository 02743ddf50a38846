"""Bipartite phase-reference resource states in sector form.

A resource state for a missing shared phase reference is an eigenstate of the
total level generator G_A + G_B with some eigenvalue N.  It splits into
sectors n = 0..N, where sector n lives on Alice level N-n and Bob level n:

    |E> = sum_n e_n |E_n>,   |E_n> = sum_l lam_{n,l} |N-n, l>_A |n, l>_B

with per-sector Schmidt coefficients lam paired through the degeneracy labels
of the two generators.  Degenerate sectors are built only through explicit
:class:`SchmidtSector` input; there is deliberately no random-state helper
here, so the rank bookkeeping (rank r_n at most the smaller degeneracy) stays
visible at every call site.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ContractViolation, Generator, Ket, _frozen_array
from .estimation import CostFunction

SECTOR_ATOL = 1e-12      # sector data normalization
EIGEN_ATOL = 1e-10       # eigenstate gate for decomposition
RESIDUAL_ATOL = 1e-10    # eigensolver residual gate


class NotInvariantState(ContractViolation):
    """Raised when a ket is not an eigenstate of the total generator."""


@dataclass(frozen=True)
class SchmidtSector:
    """One fixed-level-sum sector: level n on Bob's side plus paired
    Schmidt coefficients, nonnegative with unit sum of squares."""

    level: int
    lam: tuple

    def __post_init__(self):
        lam = tuple(float(x) for x in self.lam)
        if not lam:
            raise ContractViolation("sector needs at least one Schmidt coefficient")
        if any(x < 0.0 or not np.isfinite(x) for x in lam):
            raise ContractViolation("Schmidt coefficients must be finite and nonnegative")
        if abs(sum(x * x for x in lam) - 1.0) > SECTOR_ATOL:
            raise ContractViolation(
                f"sector {self.level}: Schmidt coefficients must have unit sum of squares")
        object.__setattr__(self, "level", int(self.level))
        object.__setattr__(self, "lam", lam)

    @property
    def rank(self) -> int:
        return len(self.lam)


@dataclass(frozen=True, eq=False)
class BipartiteFrameState:
    """Sector-form state: amplitudes e_n for n = 0..total plus sector data.

    ``amps[n]`` multiplies sector n (Bob level n, Alice level total-n).
    Every sector with nonzero amplitude must come with Schmidt data, and its
    rank is capped by the smaller of the two level degeneracies.
    """

    total: int
    gen_a: Generator
    gen_b: Generator
    amps: np.ndarray
    sectors: tuple

    def __post_init__(self):
        n_tot = int(self.total)
        if n_tot < 0:
            raise ContractViolation("total level must be nonnegative")
        if self.gen_a.min_level < 0 or self.gen_b.min_level < 0:
            raise ContractViolation("frame-state generators must have nonnegative levels")
        amps = np.asarray(self.amps, dtype=complex)
        if amps.shape != (n_tot + 1,):
            raise ContractViolation(
                f"amplitudes must have one entry per sector 0..{n_tot}, got shape {amps.shape}")
        if abs(float(np.sum(np.abs(amps) ** 2)) - 1.0) > SECTOR_ATOL:
            raise ContractViolation("sector amplitudes must have unit sum of squares")

        sectors = tuple(self.sectors)
        by_level = {}
        for s in sectors:
            if not isinstance(s, SchmidtSector):
                raise ContractViolation("sectors must be SchmidtSector values")
            if s.level in by_level:
                raise ContractViolation(f"duplicate sector level {s.level}")
            by_level[s.level] = s
        for n, s in by_level.items():
            if not 0 <= n <= n_tot:
                raise ContractViolation(f"sector level {n} outside 0..{n_tot}")
            da = self.gen_a.degeneracy(n_tot - n)
            db = self.gen_b.degeneracy(n)
            if da == 0 or db == 0:
                raise ContractViolation(
                    f"sector {n} needs level {n_tot - n} on side A and level {n} on side B")
            if s.rank > min(da, db):
                raise ContractViolation(
                    f"sector {n}: rank {s.rank} exceeds min degeneracy {min(da, db)}")
        for n in range(n_tot + 1):
            if abs(amps[n]) > SECTOR_ATOL and n not in by_level:
                raise ContractViolation(f"nonzero amplitude at sector {n} without Schmidt data")

        object.__setattr__(self, "total", n_tot)
        object.__setattr__(self, "amps", _frozen_array(amps, complex))
        object.__setattr__(self, "sectors", sectors)
        object.__setattr__(self, "_by_level", by_level)

    def sector(self, n: int) -> SchmidtSector | None:
        return self._by_level.get(n)

    def magnitudes(self) -> np.ndarray:
        """|e_n| for n = 0..total; all a joint measurement can use."""
        return np.abs(self.amps)


def _nondegenerate_state(n_tot: int, amps) -> BipartiteFrameState:
    g = Generator.ladder(n_tot + 1)
    sectors = tuple(SchmidtSector(n, (1.0,)) for n in range(n_tot + 1))
    return BipartiteFrameState(n_tot, g, g, np.asarray(amps, dtype=complex), sectors)


def flat_state(n_tot: int) -> BipartiteFrameState:
    """Uniform sector amplitudes 1/sqrt(N+1); linear-in-N cost scaling."""
    if n_tot < 1:
        raise ContractViolation("flat state needs total level >= 1")
    return _nondegenerate_state(n_tot, np.full(n_tot + 1, 1.0 / np.sqrt(n_tot + 1.0)))


def sine_state(n_tot: int) -> BipartiteFrameState:
    """Fixed half-period sine amplitude profile over the N+1 sectors.

    e_n = sin(pi (n + 1/2) / (N + 1)) * sqrt(2 / (N + 1)).  Exactly normalized
    for every N.  Note this fixed profile is not the cost minimizer for N >= 2;
    see :func:`optimal_frameness_state` for the true argmin.
    """
    if n_tot < 1:
        raise ContractViolation("sine state needs total level >= 1")
    n = np.arange(n_tot + 1)
    amps = np.sin(np.pi * (n + 0.5) / (n_tot + 1)) * np.sqrt(2.0 / (n_tot + 1))
    return _nondegenerate_state(n_tot, amps)


def single_sector_state(n_tot: int, level: int = 0) -> BipartiteFrameState:
    """All weight on one sector; carries no phase information at all."""
    if not 0 <= level <= n_tot:
        raise ContractViolation(f"sector level {level} outside 0..{n_tot}")
    amps = np.zeros(n_tot + 1, dtype=complex)
    amps[level] = 1.0
    g = Generator.ladder(n_tot + 1)
    return BipartiteFrameState(n_tot, g, g, amps, (SchmidtSector(level, (1.0,)),))


def optimal_frameness_state(n_tot: int, cost: CostFunction) -> BipartiteFrameState:
    """Sector profile minimizing the joint cost (maximizing frameness).

    The optimum over unit nonnegative profiles of
    c_0 + sum_q c_q sum_n e_n e_{n+q} is the leading eigenvector of the
    symmetric banded matrix M with M[n, n+q] = -c_q / 2, which has a
    nonnegative representative because M has nonnegative entries.
    """
    if n_tot < 1:
        raise ContractViolation("optimal state needs total level >= 1")
    dim = n_tot + 1
    m = np.zeros((dim, dim))
    for q, c in enumerate(cost.cq, start=1):
        if q >= dim or c == 0.0:
            continue
        idx = np.arange(dim - q)
        m[idx, idx + q] = -0.5 * c
        m[idx + q, idx] = -0.5 * c

    vals, vecs = np.linalg.eigh(m)
    lead = np.abs(vecs[:, -1])   # nonnegative representative of the top eigenspace
    lead /= np.linalg.norm(lead)
    residual = float(np.linalg.norm(m @ lead - vals[-1] * lead))
    if residual > RESIDUAL_ATOL:
        raise ArithmeticError(
            f"eigenvector residual {residual:.3e} exceeds {RESIDUAL_ATOL:.0e}; "
            "the leading eigenspace has no nonnegative representative here")
    return _nondegenerate_state(n_tot, lead)


def expand(state: BipartiteFrameState) -> Ket:
    """Sector form to a dense ket on the A x B product space."""
    ga, gb = state.gen_a, state.gen_b
    psi = np.zeros((ga.dim, gb.dim), dtype=complex)
    for n in range(state.total + 1):
        e = state.amps[n]
        s = state.sector(n)
        if s is None or e == 0.0:
            continue
        sa = ga.level_slice(state.total - n)
        sb = gb.level_slice(n)
        for l, lam in enumerate(s.lam):
            psi[sa.start + l, sb.start + l] = e * lam
    return Ket(psi.reshape(-1))


def _total_level(e_ket: Ket, gen_a: Generator, gen_b: Generator):
    """Total-generator eigenvalue of the ket, with the eigenstate gate."""
    if e_ket.dim != gen_a.dim * gen_b.dim:
        raise ContractViolation(
            f"ket dimension {e_ket.dim} does not match {gen_a.dim} x {gen_b.dim}")
    e_ket.require_unit(what="resource ket")
    eig = (gen_a.eigenvalues()[:, None] + gen_b.eigenvalues()[None, :]).reshape(-1)
    w = np.abs(e_ket.amplitudes) ** 2
    mean = float(np.dot(w, eig))
    n_tot = int(round(mean))
    residual = float(np.linalg.norm((eig - n_tot) * e_ket.amplitudes))
    if residual > EIGEN_ATOL * max(1.0, abs(n_tot)):
        support = sorted(set(eig[np.abs(e_ket.amplitudes) > 1e-12].tolist()))
        raise NotInvariantState(
            f"ket is not an eigenstate of the total generator: residual {residual:.3e}, "
            f"level-sum support {support}")
    return n_tot


def sector_magnitudes(e_ket: Ket, gen_a: Generator, gen_b: Generator):
    """(N, |e_n| for n = 0..N) of any total-generator eigenstate.

    Magnitudes are plain block norms, so they need no Schmidt alignment and
    are invariant under any local unitary that commutes with the generators.
    """
    n_tot = _total_level(e_ket, gen_a, gen_b)
    psi = e_ket.amplitudes.reshape(gen_a.dim, gen_b.dim)
    mags = np.zeros(n_tot + 1)
    for n in range(n_tot + 1):
        if not (gen_a.has_level(n_tot - n) and gen_b.has_level(n)):
            continue
        block = psi[gen_a.level_slice(n_tot - n), gen_b.level_slice(n)]
        mags[n] = np.linalg.norm(block)
    return n_tot, mags


def sector_decompose(e_ket: Ket, gen_a: Generator, gen_b: Generator) -> BipartiteFrameState:
    """Recover the sector form, amplitudes with their phases included.

    Requires each sector block to be Schmidt-aligned with the degeneracy
    labels (diagonal with one common phase), which holds for anything built
    by :func:`expand`; a block mixed across labels raises, because flattening
    it silently would re-pick local bases and break the round trip.
    """
    n_tot = _total_level(e_ket, gen_a, gen_b)
    psi = e_ket.amplitudes.reshape(gen_a.dim, gen_b.dim)
    amps = np.zeros(n_tot + 1, dtype=complex)
    sectors = []
    for n in range(n_tot + 1):
        if not (gen_a.has_level(n_tot - n) and gen_b.has_level(n)):
            continue
        block = psi[gen_a.level_slice(n_tot - n), gen_b.level_slice(n)]
        w = float(np.linalg.norm(block))
        if w <= SECTOR_ATOL:
            continue
        r = min(block.shape)
        diag = np.diagonal(block).copy()
        if float(np.abs(diag).max()) <= SECTOR_ATOL:
            raise ContractViolation(
                f"sector {n} is not aligned with the degeneracy labels; "
                "decomposition would have to re-pick local bases")
        phase = diag[int(np.argmax(np.abs(diag)))]
        phase /= abs(phase)
        lam = np.abs(diag) / w
        recon = np.zeros_like(block)
        recon[np.arange(r), np.arange(r)] = w * phase * lam
        if float(np.abs(block - recon).max()) > EIGEN_ATOL:
            raise ContractViolation(
                f"sector {n} is not aligned with the degeneracy labels; "
                "decomposition would have to re-pick local bases")
        while lam.size > 1 and lam[-1] == 0.0:
            lam = lam[:-1]
        amps[n] = w * phase
        sectors.append(SchmidtSector(n, tuple(lam.tolist())))
    return BipartiteFrameState(n_tot, gen_a, gen_b, amps, tuple(sectors))
