import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from framesync import (BipartiteFrameState, ContractViolation, Generator, Ket,
                       NotInvariantState, SchmidtSector, expand, flat_state,
                       ket, phase_shift, sector_decompose, sector_magnitudes,
                       sine_state, single_sector_state, tensor,
                       optimal_frameness_state, variance_cost)
from conftest import level_preserving_unitary, random_frame_state

seeds = st.integers(0, 2**32 - 1)


def _total_op(ga, gb):
    return (tensor(ga.matrix(), np.eye(gb.dim))
            + tensor(np.eye(ga.dim), gb.matrix()))


# ---------------------------------------------------------- named profiles

def test_flat_state_profile():
    s = flat_state(4)
    np.testing.assert_allclose(s.amps, np.full(5, 1 / np.sqrt(5)), atol=1e-15)
    assert s.total == 4 and s.sector(3).lam == (1.0,)


def test_sine_state_frozen_values():
    np.testing.assert_allclose(sine_state(1).amps,
                               [np.sqrt(0.5), np.sqrt(0.5)], atol=1e-15)
    np.testing.assert_allclose(
        sine_state(2).amps,
        [0.40824829046386296, 0.8164965809277261, 0.40824829046386296],
        atol=1e-14)


@given(st.integers(1, 64))
def test_sine_state_exactly_normalized(n_tot):
    assert np.sum(sine_state(n_tot).magnitudes() ** 2) == pytest.approx(1.0, abs=1e-12)


def test_named_profiles_reject_total_zero():
    for make in (flat_state, sine_state):
        with pytest.raises(ContractViolation):
            make(0)


def test_single_sector_state_is_one_hot():
    s = single_sector_state(3, level=2)
    np.testing.assert_allclose(s.magnitudes(), [0, 0, 1, 0], atol=0)
    with pytest.raises(ContractViolation):
        single_sector_state(3, level=4)


def test_optimal_variance_profile_is_discrete_sine():
    # leading eigenvector of the free tridiagonal band: sin(pi (n+1) / (N+2))
    for n_tot in (1, 2, 5, 16, 64):
        got = optimal_frameness_state(n_tot, variance_cost()).amps.real
        n = np.arange(n_tot + 1)
        want = np.sin(np.pi * (n + 1) / (n_tot + 2))
        want /= np.linalg.norm(want)
        np.testing.assert_allclose(got, want, atol=1e-10)


def test_optimal_state_differs_from_fixed_sine_profile():
    a = optimal_frameness_state(4, variance_cost()).amps.real
    b = sine_state(4).amps.real
    assert np.abs(a - b).max() > 1e-3


# ------------------------------------------------------------- validation

def test_schmidt_sector_validation():
    SchmidtSector(0, (0.6, 0.8))
    with pytest.raises(ContractViolation):
        SchmidtSector(0, ())
    with pytest.raises(ContractViolation):
        SchmidtSector(0, (-0.6, 0.8))
    with pytest.raises(ContractViolation):
        SchmidtSector(0, (0.6, 0.6))


def test_frame_state_validation():
    g = Generator.ladder(3)
    ok = tuple(SchmidtSector(n, (1.0,)) for n in range(3))
    amps = np.full(3, 1 / np.sqrt(3))
    BipartiteFrameState(2, g, g, amps, ok)
    with pytest.raises(ContractViolation):
        BipartiteFrameState(2, g, g, amps * 2, ok)            # norm
    with pytest.raises(ContractViolation):
        BipartiteFrameState(2, g, g, amps[:2], ok)            # shape
    with pytest.raises(ContractViolation):
        BipartiteFrameState(2, g, g, amps, ok[:2])            # missing sector 2
    with pytest.raises(ContractViolation):
        BipartiteFrameState(2, g, g, amps, ok + (SchmidtSector(0, (1.0,)),))
    with pytest.raises(ContractViolation):
        # rank 2 in a nondegenerate sector
        BipartiteFrameState(2, g, g, amps,
                            (SchmidtSector(0, (0.6, 0.8)),) + ok[1:])
    neg = Generator(((-1, 1), (0, 1), (1, 1)))
    with pytest.raises(ContractViolation):
        BipartiteFrameState(2, neg, g, amps, ok)


def test_frame_state_amps_keep_phases():
    amps = np.array([1.0, 1.0j]) / np.sqrt(2)
    s = BipartiteFrameState(1, Generator.ladder(2), Generator.ladder(2), amps,
                            (SchmidtSector(0, (1.0,)), SchmidtSector(1, (1.0,))))
    np.testing.assert_allclose(s.amps, amps, atol=0)
    np.testing.assert_allclose(s.magnitudes(), [1 / np.sqrt(2)] * 2, atol=1e-15)


# ----------------------------------------------------------------- expand

def test_expand_flat_two_sectors_is_shared_pair():
    psi = expand(flat_state(1))
    np.testing.assert_allclose(psi.amplitudes,
                               [0, np.sqrt(0.5), np.sqrt(0.5), 0], atol=1e-15)


def test_expand_degenerate_frozen_layout():
    ga = Generator(((0, 1), (1, 2)))
    gb = Generator(((0, 2), (1, 1)))
    amps = np.array([0.8, 0.6j])
    s = BipartiteFrameState(1, ga, gb, amps,
                            (SchmidtSector(0, (0.6, 0.8)), SchmidtSector(1, (1.0,))))
    psi = expand(s).amplitudes.reshape(3, 3)
    want = np.zeros((3, 3), dtype=complex)
    want[1, 0] = 0.8 * 0.6    # sector 0, first Schmidt pair
    want[2, 1] = 0.8 * 0.8    # sector 0, second pair
    want[0, 2] = 0.6j         # sector 1
    np.testing.assert_allclose(psi, want, atol=1e-15)


@settings(max_examples=30, deadline=None)
@given(seed=seeds, n_tot=st.integers(1, 5), max_deg=st.integers(1, 3))
def test_expand_gives_total_level_eigenstate(seed, n_tot, max_deg):
    s = random_frame_state(np.random.default_rng(seed), n_tot, max_deg)
    psi = expand(s)
    assert psi.is_unit(1e-10)
    h = _total_op(s.gen_a, s.gen_b)
    np.testing.assert_allclose(h @ psi.amplitudes, n_tot * psi.amplitudes,
                               atol=1e-10)


@settings(max_examples=20, deadline=None)
@given(seed=seeds, phi=st.floats(-10, 10))
def test_expanded_state_only_picks_up_a_global_phase(seed, phi):
    s = random_frame_state(np.random.default_rng(seed), 3, 2)
    psi = expand(s).amplitudes
    u = tensor(phase_shift(s.gen_a, phi), np.eye(s.gen_b.dim)) \
        @ tensor(np.eye(s.gen_a.dim), phase_shift(s.gen_b, phi))
    np.testing.assert_allclose(u @ psi, np.exp(-1j * phi * s.total) * psi,
                               atol=1e-12)


# -------------------------------------------------------------- decompose

@settings(max_examples=40, deadline=None)
@given(seed=seeds, n_tot=st.integers(1, 5), max_deg=st.integers(1, 3))
def test_expand_decompose_round_trip(seed, n_tot, max_deg):
    s = random_frame_state(np.random.default_rng(seed), n_tot, max_deg)
    back = sector_decompose(expand(s), s.gen_a, s.gen_b)
    assert back.total == s.total
    np.testing.assert_allclose(back.amps, s.amps, atol=1e-13)
    for n in range(n_tot + 1):
        np.testing.assert_allclose(back.sector(n).lam, s.sector(n).lam, atol=1e-13)


def test_decompose_shared_pair_frozen():
    psi = ket([0, 1, 1, 0]) .normalized()
    g = Generator.ladder(2)
    s = sector_decompose(psi, g, g)
    assert s.total == 1
    np.testing.assert_allclose(s.amps, [np.sqrt(0.5), np.sqrt(0.5)], atol=1e-15)


def test_decompose_trims_trailing_zero_schmidt_entries():
    g2 = Generator(((0, 2), (1, 2)))
    s = BipartiteFrameState(
        1, g2, g2, np.array([1.0, 0.0]),
        (SchmidtSector(0, (1.0, 0.0)),))
    back = sector_decompose(expand(s), g2, g2)
    assert back.sector(0).lam == (1.0,)


def test_decompose_rejects_non_eigenstate():
    g = Generator.ladder(2)
    with pytest.raises(NotInvariantState, match="level-sum support"):
        sector_decompose(ket([1, 0, 0, 1]).normalized(), g, g)


def test_decompose_rejects_label_mixing_block():
    g = Generator(((0, 2), (1, 2)))
    psi = np.zeros((4, 4), dtype=complex)
    psi[2, 1] = 1.0   # A level 1 label 1 paired with B level 0 label 2
    with pytest.raises(ContractViolation, match="not aligned"):
        sector_decompose(Ket(psi.reshape(-1)), g, g)


def test_decompose_keeps_sector_phases():
    amps = np.array([0.6, 0.8j])
    s = BipartiteFrameState(1, Generator.ladder(2), Generator.ladder(2), amps,
                            (SchmidtSector(0, (1.0,)), SchmidtSector(1, (1.0,))))
    back = sector_decompose(expand(s), s.gen_a, s.gen_b)
    np.testing.assert_allclose(back.amps, amps, atol=1e-15)


# ------------------------------------------------------------- magnitudes

@settings(max_examples=25, deadline=None)
@given(seed=seeds, n_tot=st.integers(1, 4), max_deg=st.integers(1, 3))
def test_sector_magnitudes_match_state(seed, n_tot, max_deg):
    s = random_frame_state(np.random.default_rng(seed), n_tot, max_deg)
    n_back, mags = sector_magnitudes(expand(s), s.gen_a, s.gen_b)
    assert n_back == n_tot
    np.testing.assert_allclose(mags, s.magnitudes(), atol=1e-12)


def test_sector_magnitudes_invariant_under_level_preserving_unitaries():
    gen = np.random.default_rng(314)
    s = random_frame_state(gen, 3, 3)
    psi = expand(s)
    _, base = sector_magnitudes(psi, s.gen_a, s.gen_b)
    for _ in range(20):
        u = tensor(level_preserving_unitary(gen, s.gen_a),
                   level_preserving_unitary(gen, s.gen_b))
        _, mags = sector_magnitudes(Ket(u @ psi.amplitudes), s.gen_a, s.gen_b)
        np.testing.assert_allclose(mags, base, atol=1e-10)


def test_sector_magnitudes_handles_missing_levels():
    # Alice lacks level 1, so sector n = 1 of N = 2 cannot carry weight
    ga = Generator(((0, 1), (2, 1)))
    gb = Generator.ladder(3)
    psi = np.zeros((2, 3), dtype=complex)
    psi[1, 0] = psi[0, 2] = 1 / np.sqrt(2)
    n_tot, mags = sector_magnitudes(Ket(psi.reshape(-1)), ga, gb)
    assert n_tot == 2
    np.testing.assert_allclose(mags, [np.sqrt(0.5), 0.0, np.sqrt(0.5)], atol=1e-15)


def test_sector_magnitudes_dimension_gate():
    g = Generator.ladder(2)
    with pytest.raises(ContractViolation):
        sector_magnitudes(ket([1, 0, 0]), g, g)
