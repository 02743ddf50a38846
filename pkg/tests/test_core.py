import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from framesync import (ContractViolation, DensityMatrix, Generator, Ket,
                       RandomSource, as_generator, basis_ket, fidelity, ket,
                       measure, phase_shift, spectral_projector, tensor)

RT2 = np.sqrt(2.0)

phases = st.floats(min_value=-10.0, max_value=10.0,
                   allow_nan=False, allow_infinity=False)


# ---------------------------------------------------------------- kets

def test_ket_norm_and_normalized():
    v = ket([3.0, 4.0j])
    assert v.norm() == pytest.approx(5.0, abs=1e-15)
    assert not v.is_unit()
    u = v.normalized()
    assert u.is_unit()
    np.testing.assert_allclose(u.amplitudes, [0.6, 0.8j], atol=1e-15)


def test_ket_rejects_bad_shapes():
    with pytest.raises(ContractViolation):
        ket([])
    with pytest.raises(ContractViolation):
        ket([[1.0, 0.0], [0.0, 1.0]])
    with pytest.raises(ContractViolation):
        ket([np.nan, 0.0])
    with pytest.raises(ContractViolation):
        ket([0.0, 0.0]).normalized()


def test_inner_is_conjugate_linear_in_first_slot():
    assert ket([1j, 0]).inner(ket([1, 0])) == pytest.approx(-1j)
    assert ket([1, 0]).inner(ket([1j, 0])) == pytest.approx(1j)


def test_ket_amplitudes_are_read_only():
    v = basis_ket(3, 0)
    with pytest.raises(ValueError):
        v.amplitudes[1] = 1.0


def test_outer_is_rank_one_projector():
    v = ket([1.0, 1.0j]).normalized()
    p = v.outer()
    np.testing.assert_allclose(p, p.conj().T, atol=1e-15)
    np.testing.assert_allclose(p @ p, p, atol=1e-15)
    assert np.trace(p) == pytest.approx(1.0)


# ------------------------------------------------------ density matrices

def test_density_matrix_validation():
    DensityMatrix(np.diag([0.5, 0.5]))
    with pytest.raises(ContractViolation):
        DensityMatrix(np.array([[0.5, 0.5], [0.0, 0.5]]))      # not hermitian
    with pytest.raises(ContractViolation):
        DensityMatrix(np.diag([0.7, 0.7]))                     # trace 1.4
    with pytest.raises(ContractViolation):
        DensityMatrix(np.diag([1.5, -0.5]))                    # not positive


def test_pure_density_normalizes():
    rho = DensityMatrix.pure(ket([2.0, 0.0]))
    np.testing.assert_allclose(rho.entries, np.diag([1.0, 0.0]), atol=1e-15)


# ------------------------------------------------------------ generators

def test_generator_labels_and_lookup():
    g = Generator(((0, 2), (2, 1)))
    assert g.dim == 3
    assert g.labels() == ((0, 1), (0, 2), (2, 1))
    np.testing.assert_array_equal(g.eigenvalues(), [0, 0, 2])
    assert g.level_slice(0) == slice(0, 2)
    assert g.index_of(2, 1) == 2
    assert g.degeneracy(1) == 0 and not g.has_level(1)
    with pytest.raises(ContractViolation):
        g.level_slice(1)
    with pytest.raises(ContractViolation):
        g.index_of(0, 3)


def test_generator_rejects_bad_spectra():
    with pytest.raises(ContractViolation):
        Generator(())
    with pytest.raises(ContractViolation):
        Generator(((1, 1), (0, 1)))     # not increasing
    with pytest.raises(ContractViolation):
        Generator(((0, 1), (0, 2)))     # duplicate level
    with pytest.raises(ContractViolation):
        Generator(((0, 0),))            # empty level


def test_ladder_is_nondegenerate_range():
    g = Generator.ladder(4)
    np.testing.assert_array_equal(g.eigenvalues(), [0, 1, 2, 3])
    np.testing.assert_allclose(g.matrix(), np.diag([0, 1, 2, 3]).astype(complex))


# ----------------------------------------------------------- phase shift

def test_phase_shift_frozen_values():
    g = Generator(((0, 1), (1, 1), (3, 1)))
    u = phase_shift(g, np.pi / 2)
    np.testing.assert_allclose(np.diag(u), [1.0, -1.0j, 1.0j], atol=1e-15)
    assert np.count_nonzero(u - np.diag(np.diag(u))) == 0


@given(phi1=phases, phi2=phases)
def test_phase_shift_is_a_group_homomorphism(phi1, phi2):
    g = Generator(((0, 2), (1, 1), (4, 1)))
    u = phase_shift(g, phi1) @ phase_shift(g, phi2)
    np.testing.assert_allclose(u, phase_shift(g, phi1 + phi2), atol=1e-12)


@given(phi=phases)
def test_phase_shift_unitary_and_periodic(phi):
    g = Generator(((0, 1), (2, 2), (5, 1)))
    u = phase_shift(g, phi)
    np.testing.assert_allclose(u @ u.conj().T, np.eye(4), atol=1e-12)
    # integer spectrum: 2 pi is the identity
    np.testing.assert_allclose(phase_shift(g, phi + 2 * np.pi), u, atol=1e-12)


def test_phase_shift_rejects_nonfinite():
    with pytest.raises(ContractViolation):
        phase_shift(Generator.ladder(2), np.inf)


# ------------------------------------------------------------ projectors

def test_spectral_projectors_resolve_identity():
    g = Generator(((0, 2), (1, 1), (3, 2)))
    ps = [spectral_projector(g, n) for n, _ in g.levels]
    np.testing.assert_allclose(sum(ps), np.eye(g.dim), atol=1e-15)
    for i, p in enumerate(ps):
        np.testing.assert_allclose(p @ p, p, atol=1e-15)
        for q in ps[i + 1:]:
            np.testing.assert_allclose(p @ q, 0.0 * p, atol=1e-15)
    recomposed = sum(n * spectral_projector(g, n) for n, _ in g.levels)
    np.testing.assert_allclose(recomposed, g.matrix(), atol=1e-15)
    np.testing.assert_allclose(spectral_projector(g, 2), np.zeros((5, 5)), atol=0)


# ---------------------------------------------------------------- tensor

def test_tensor_kets_and_type_mismatch():
    v = tensor(ket([1.0, 0.0]), ket([0.0, 1.0]))
    np.testing.assert_allclose(v.amplitudes, [0, 1, 0, 0], atol=0)
    with pytest.raises(ContractViolation):
        tensor(ket([1.0, 0.0]), np.eye(2))
    np.testing.assert_allclose(tensor(np.eye(2), np.eye(3)), np.eye(6), atol=0)


@given(st.integers(0, 3), st.integers(0, 2))
def test_tensor_of_basis_kets_is_basis_ket(i, j):
    v = tensor(basis_ket(4, i), basis_ket(3, j))
    assert v.amplitudes[i * 3 + j] == 1.0
    assert v.norm() == pytest.approx(1.0)


# ------------------------------------------------------------ randomness

def test_random_source_is_a_value():
    src = RandomSource(7, (1, 2))
    a = src.generator().random(5)
    b = src.generator().random(5)
    np.testing.assert_array_equal(a, b)


def test_random_source_split_streams_differ():
    root = RandomSource(7)
    a = root.split(0).generator().random(8)
    b = root.split(1).generator().random(8)
    assert not np.array_equal(a, b)
    assert root.split(0).path == (0,)


def test_random_source_validates_seed():
    with pytest.raises(ContractViolation):
        RandomSource(-1)
    with pytest.raises(ContractViolation):
        RandomSource(2**64)


def test_as_generator_accepts_both_kinds():
    gen = np.random.default_rng(0)
    assert as_generator(gen) is gen
    assert isinstance(as_generator(RandomSource(3)), np.random.Generator)
    with pytest.raises(ContractViolation):
        as_generator(42)


# ----------------------------------------------------------- measurement

def test_measure_complete_basis_frozen_probs():
    state = ket([0.6, 0.8j])
    basis = [basis_ket(2, 0), basis_ket(2, 1)]
    counts = np.zeros(2)
    gen = np.random.default_rng(11)
    for _ in range(200):
        k, post, p = measure(state, basis, gen)
        counts[k] += 1
        assert post.dim == 1 and post.is_unit()
        assert p == pytest.approx(0.36 if k == 0 else 0.64, abs=1e-12)
    assert counts[0] > 0 and counts[1] > 0


def test_measure_leading_factor_posterior():
    # (|01> + |10>)/sqrt(2), first qubit measured in the +/- basis:
    # both outcomes have p = 1/2 and leave the second qubit in the
    # matching +/- state (up to a global sign).
    bell = ket([0.0, 1.0, 1.0, 0.0]).normalized()
    plus = ket([1.0, 1.0]).normalized()
    minus = ket([1.0, -1.0]).normalized()
    gen = np.random.default_rng(5)
    seen = set()
    for _ in range(40):
        k, post, p = measure(bell, [plus, minus], gen)
        seen.add(k)
        assert p == pytest.approx(0.5, abs=1e-12)
        expected = plus if k == 0 else minus
        assert abs(post.inner(expected)) == pytest.approx(1.0, abs=1e-12)
    assert seen == {0, 1}


def test_measure_born_frequencies():
    probs = np.array([0.1, 0.2, 0.3, 0.4])
    state = ket(np.sqrt(probs) * np.exp(1j * np.array([0.0, 0.4, 1.1, 2.0])))
    basis = [basis_ket(4, i) for i in range(4)]
    trials = 100_000
    gen = RandomSource(2024).generator()
    counts = np.zeros(4)
    for _ in range(trials):
        k, _, _ = measure(state, basis, gen)
        counts[k] += 1
    freq = counts / trials
    sigma = np.sqrt(probs * (1 - probs) / trials)
    np.testing.assert_array_less(np.abs(freq - probs), 4 * sigma)


def test_measure_validates_inputs():
    gen = np.random.default_rng(0)
    with pytest.raises(ContractViolation):
        measure(ket([1.0, 1.0]), [basis_ket(2, 0), basis_ket(2, 1)], gen)   # norm
    with pytest.raises(ContractViolation):
        measure(basis_ket(2, 0), [basis_ket(2, 0), ket([1.0, 1.0]).normalized()], gen)
    with pytest.raises(ContractViolation):
        measure(basis_ket(3, 0), [basis_ket(3, 0), basis_ket(3, 1)], gen)   # incomplete
    with pytest.raises(ContractViolation):
        measure(basis_ket(3, 0), [basis_ket(2, 0), basis_ket(2, 1)], gen)   # 3 % 2


def test_measure_replays_under_random_source():
    state = ket([0.5, 0.5, 0.5, 0.5])
    basis = [basis_ket(2, 0), basis_ket(2, 1)]
    src = RandomSource(99, (4,))
    first = [measure(state, basis, src.split(i)) for i in range(20)]
    second = [measure(state, basis, src.split(i)) for i in range(20)]
    for (k1, v1, p1), (k2, v2, p2) in zip(first, second):
        assert k1 == k2 and p1 == p2
        np.testing.assert_array_equal(v1.amplitudes, v2.amplitudes)


# -------------------------------------------------------------- fidelity

def test_fidelity_frozen_and_validated():
    zero = basis_ket(2, 0)
    plus = ket([1.0, 1.0]).normalized()
    assert fidelity(DensityMatrix.pure(zero), plus) == pytest.approx(0.5, abs=1e-15)
    assert fidelity(zero.outer(), zero) == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(ContractViolation):
        fidelity(np.eye(3) / 3.0, zero)


@settings(max_examples=25)
@given(st.integers(0, 2**32 - 1))
def test_fidelity_of_state_with_itself(seed):
    gen = np.random.default_rng(seed)
    a = gen.normal(size=5) + 1j * gen.normal(size=5)
    v = ket(a).normalized()
    assert fidelity(DensityMatrix.pure(v), v) == pytest.approx(1.0, abs=1e-12)
