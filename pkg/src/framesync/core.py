"""Dense complex state-vector kernel.

Everything here is desk-scale (dimensions up to a few hundred), so states are
plain complex vectors, operators are dense ``numpy`` arrays, and no sparsity
or factorized structure is attempted.  The one domain-specific type is
:class:`Generator`, an integer-spectrum observable whose eigenvalues generate
phase rotations; its basis labels carry (level, degeneracy index) pairs so
that level bookkeeping never relies on implicit array positions.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

# Dense operators are bare arrays; only states and generators get wrappers.
Operator = np.ndarray

ATOL = 1e-12          # structural tolerance: norms, unitarity, idempotence
MEASURE_ATOL = 1e-10  # orthonormality / completeness gate for measurements


class ContractViolation(ValueError):
    """An input breaks a documented precondition (bad basis, bad norm, ...)."""


def _frozen_array(values, dtype) -> np.ndarray:
    a = np.array(values, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Ket:
    """Pure state as an ordered complex amplitude vector."""

    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.amplitudes, dtype=complex)
        if a.ndim != 1 or a.size == 0:
            raise ContractViolation(f"ket must be a nonempty 1-d vector, got shape {a.shape}")
        if not np.all(np.isfinite(a.view(float))):
            raise ContractViolation("ket amplitudes must be finite")
        object.__setattr__(self, "amplitudes", _frozen_array(a, complex))

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def is_unit(self, atol: float = ATOL) -> bool:
        return abs(self.norm() - 1.0) <= atol

    def require_unit(self, atol: float = MEASURE_ATOL, what: str = "state") -> "Ket":
        if abs(self.norm() - 1.0) > atol:
            raise ContractViolation(f"{what} must be normalized, got norm {self.norm():.6g}")
        return self

    def normalized(self) -> "Ket":
        n = self.norm()
        if n == 0.0:
            raise ContractViolation("cannot normalize the zero vector")
        return Ket(self.amplitudes / n)

    def inner(self, other: "Ket") -> complex:
        """Inner product <self|other> (conjugate-linear in self)."""
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def outer(self) -> np.ndarray:
        a = self.amplitudes
        return np.outer(a, a.conj())


def ket(values) -> Ket:
    return Ket(np.asarray(values, dtype=complex))


def basis_ket(dim: int, index: int) -> Ket:
    a = np.zeros(dim, dtype=complex)
    a[index] = 1.0
    return Ket(a)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Mixed state; validated hermitian, positive, unit trace on construction."""

    entries: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ContractViolation(f"density matrix must be square, got shape {m.shape}")
        if np.abs(m - m.conj().T).max() > ATOL:
            raise ContractViolation("density matrix must be hermitian within 1e-12")
        if abs(np.trace(m).real - 1.0) > ATOL:
            raise ContractViolation(f"density matrix trace must be 1, got {np.trace(m).real!r}")
        if np.linalg.eigvalsh(m).min() < -ATOL:
            raise ContractViolation("density matrix must be positive semidefinite")
        object.__setattr__(self, "entries", _frozen_array(m, complex))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @classmethod
    def pure(cls, psi: Ket) -> "DensityMatrix":
        return cls(psi.normalized().outer())


@dataclass(frozen=True)
class Generator:
    """Integer-spectrum observable given as (eigenvalue, degeneracy) levels.

    Levels are sorted strictly increasing.  The induced basis ordering is by
    level, then by 1-based degeneracy index, so basis slot ``i`` carries the
    label ``labels()[i] == (n, l)``.
    """

    levels: tuple

    def __post_init__(self):
        try:
            lv = tuple((int(n), int(d)) for n, d in self.levels)
        except (TypeError, ValueError) as exc:
            raise ContractViolation(f"levels must be (eigenvalue, degeneracy) pairs: {exc}")
        if not lv:
            raise ContractViolation("generator needs at least one level")
        for n, d in lv:
            if d < 1:
                raise ContractViolation(f"degeneracy must be >= 1, got {d} at level {n}")
        eigs = [n for n, _ in lv]
        if any(b <= a for a, b in zip(eigs, eigs[1:])):
            raise ContractViolation("eigenvalues must be strictly increasing")
        object.__setattr__(self, "levels", lv)

    @classmethod
    def ladder(cls, dim: int) -> "Generator":
        """Nondegenerate spectrum 0, 1, ..., dim-1."""
        if dim < 1:
            raise ContractViolation("ladder needs dim >= 1")
        return cls(tuple((n, 1) for n in range(dim)))

    @property
    def dim(self) -> int:
        return sum(d for _, d in self.levels)

    @property
    def min_level(self) -> int:
        return self.levels[0][0]

    @property
    def max_level(self) -> int:
        return self.levels[-1][0]

    def eigenvalues(self) -> np.ndarray:
        """Per-basis-slot eigenvalue, degeneracies expanded."""
        return np.repeat([n for n, _ in self.levels], [d for _, d in self.levels])

    def labels(self) -> tuple:
        """(level, degeneracy index) per basis slot; degeneracy index is 1-based."""
        return tuple((n, l) for n, d in self.levels for l in range(1, d + 1))

    def has_level(self, n: int) -> bool:
        return any(m == n for m, _ in self.levels)

    def degeneracy(self, n: int) -> int:
        for m, d in self.levels:
            if m == n:
                return d
        return 0

    def level_slice(self, n: int) -> slice:
        off = 0
        for m, d in self.levels:
            if m == n:
                return slice(off, off + d)
            off += d
        raise ContractViolation(f"generator has no level {n}")

    def index_of(self, n: int, l: int) -> int:
        s = self.level_slice(n)
        if not 1 <= l <= s.stop - s.start:
            raise ContractViolation(f"degeneracy index {l} out of range for level {n}")
        return s.start + (l - 1)

    def matrix(self) -> Operator:
        return np.diag(self.eigenvalues().astype(complex))


@dataclass(frozen=True)
class RandomSource:
    """Deterministic splittable randomness.

    A source is a value, not a stream: ``generator()`` always materializes the
    same numpy Generator for the same (seed, path), so any operation taking a
    RandomSource is pure.  ``split(i)`` derives an independent child stream;
    parallel trial i can use ``root.split(i)`` and is reproducible regardless
    of scheduling.  Mixing is delegated to numpy's SeedSequence spawn keys.
    """

    seed: int
    path: tuple = ()

    def __post_init__(self):
        if not 0 <= int(self.seed) < 2**64:
            raise ContractViolation("seed must be a 64-bit unsigned integer")
        object.__setattr__(self, "seed", int(self.seed))
        object.__setattr__(self, "path", tuple(int(i) for i in self.path))

    def split(self, index: int) -> "RandomSource":
        return RandomSource(self.seed, self.path + (index,))

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=self.path)
        return np.random.default_rng(ss)


RngLike = Union[RandomSource, np.random.Generator]


def as_generator(rng: RngLike) -> np.random.Generator:
    """Accept either a RandomSource value or a live numpy Generator."""
    if isinstance(rng, RandomSource):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    raise ContractViolation(f"expected RandomSource or numpy Generator, got {type(rng).__name__}")


def phase_shift(g: Generator, phi: float) -> Operator:
    """Diagonal unitary exp(-i * phi * G) in the generator's eigenbasis."""
    if not np.isfinite(phi):
        raise ContractViolation("phase must be finite")
    return np.diag(np.exp(-1j * phi * g.eigenvalues()))


def tensor(a, b):
    """Kronecker product; Ket x Ket gives a Ket, arrays give an array."""
    if isinstance(a, Ket) and isinstance(b, Ket):
        return Ket(np.kron(a.amplitudes, b.amplitudes))
    if isinstance(a, Ket) or isinstance(b, Ket):
        raise ContractViolation("tensor arguments must both be Kets or both be operators")
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def spectral_projector(g: Generator, eigenvalue: int) -> Operator:
    """Projector onto the eigenspace of the given level (zero if absent)."""
    diag = (g.eigenvalues() == eigenvalue).astype(complex)
    return np.diag(diag)


def _basis_matrix(basis: Sequence[Ket]) -> np.ndarray:
    dims = {b.dim for b in basis}
    if len(dims) != 1:
        raise ContractViolation("measurement basis vectors must share one dimension")
    return np.vstack([b.amplitudes for b in basis])


def measure(state: Ket, basis: Sequence[Ket], rng: RngLike):
    """Projective measurement of the leading tensor factor.

    The measured factor's dimension is the dimension of the basis vectors;
    the state dimension must be a multiple of it.  Returns
    (outcome index, posterior Ket of the unmeasured factors, probability).
    For a complete measurement the posterior is the trivial 1-d ket.
    """
    state.require_unit()
    B = _basis_matrix(basis)
    d_meas = B.shape[1]
    if B.shape[0] != d_meas:
        raise ContractViolation(
            f"basis must be complete on the measured factor: got {B.shape[0]} vectors in dimension {d_meas}")
    gram = B.conj() @ B.T
    if np.abs(gram - np.eye(d_meas)).max() > MEASURE_ATOL:
        raise ContractViolation("measurement basis is not orthonormal within 1e-10")
    if state.dim % d_meas != 0:
        raise ContractViolation(
            f"state dimension {state.dim} is not a multiple of the measured dimension {d_meas}")

    cond = B.conj() @ state.amplitudes.reshape(d_meas, -1)   # outcome x rest
    probs = np.einsum("ij,ij->i", cond, cond.conj()).real
    u = as_generator(rng).random()
    k = int(np.searchsorted(np.cumsum(probs), u, side="right"))
    k = min(k, d_meas - 1)
    p = float(probs[k])
    if p <= 0.0:
        # can only happen by numerical accident at the cumsum edge
        k = int(np.argmax(probs))
        p = float(probs[k])
    posterior = Ket(cond[k] / np.sqrt(p))
    return k, posterior, p


def fidelity(rho, psi: Ket) -> float:
    """<psi| rho |psi> for a density matrix (or bare matrix) and a pure state."""
    m = rho.entries if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    v = psi.amplitudes
    if m.shape != (v.size, v.size):
        raise ContractViolation(f"dimension mismatch: operator {m.shape} vs ket {v.size}")
    return float(np.real(np.vdot(v, m @ v)))
