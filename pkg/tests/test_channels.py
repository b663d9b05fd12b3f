"""Spin-chain Hamiltonians, ground states and the special channel families."""

from __future__ import annotations

import itertools

import numpy as np
import pytest

from bellchain import bell, channels
from bellchain.bell import BELL_LABELS, MM, classify
from bellchain.channels import SpinChainModel, build_hamiltonian, ground_state
from bellchain.errors import DimensionError, ValidationError
from bellchain.qstate import PureState, entanglement_entropy, expectation, inner, lowest_eigenpair

from conftest import dense_local

PAULIS = [np.array([[0, 1], [1, 0]]), np.array([[0, -1j], [1j, 0]]), np.diag([1.0, -1.0])]


def dense_dot(n, i, j):
    """S_i . S_j from Pauli krons (1-based sites)."""
    return sum(dense_local(p, i, n) @ dense_local(p, j, n) for p in PAULIS) / 4


def dense_heisenberg(n, beta, periodic):
    H = np.zeros((2**n, 2**n), dtype=complex)
    for d, coef in ((1, 1.0), (2, beta)):
        pairs = [(i, i + d) for i in range(1, n - d + 1)]
        if periodic:
            pairs += [(i, i + d - n) for i in range(n - d + 1, n + 1)]
        for i, j in pairs:
            H += coef * dense_dot(n, i, j)
    return H


class TestModel:
    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(kind="potts", sites=4),
            dict(kind="ising_af", sites=1),
            dict(kind="heisenberg_nnn", sites=4, beta=-1),
            dict(kind="ising_af", sites=4, boundary="twisted"),
            dict(kind="ising_af", sites=4, boundary="open_with_half_spin_ends"),
        ],
    )
    def test_rejects(self, kwargs):
        with pytest.raises(ValidationError):
            SpinChainModel(**kwargs)

    def test_too_large(self):
        with pytest.raises(DimensionError):
            build_hamiltonian(SpinChainModel("ising_af", 15))

    def test_local_dim(self):
        assert SpinChainModel("aklt", 3, boundary="open").local_dim == 3


class TestHamiltonians:
    @pytest.mark.parametrize("periodic", [True, False])
    @pytest.mark.parametrize("n", [4, 5])
    def test_heisenberg_matches_dense_oracle(self, n, periodic):
        model = SpinChainModel("heisenberg_nnn", n, beta=0.3, boundary="periodic" if periodic else "open")
        np.testing.assert_allclose(build_hamiltonian(model).toarray(), dense_heisenberg(n, 0.3, periodic), atol=1e-14)

    def test_two_site_periodic_counts_bond_twice(self):
        H = build_hamiltonian(SpinChainModel("heisenberg_nnn", 2)).toarray()
        np.testing.assert_allclose(H, 2 * dense_dot(2, 1, 2), atol=1e-15)

    def test_ising_is_diagonal(self):
        H = build_hamiltonian(SpinChainModel("ising_af", 4)).toarray()
        assert np.count_nonzero(H - np.diag(np.diag(H))) == 0
        # |udud> has four antiparallel bonds
        assert H[0b0101, 0b0101] == pytest.approx(-1.0)

    def test_commutes_with_total_spin(self):
        H = build_hamiltonian(SpinChainModel("heisenberg_nnn", 6, beta=0.7))
        S2 = channels.total_spin_squared(6)
        assert abs(H @ S2 - S2 @ H).max() < 1e-12

    def test_aklt_equals_projector_sum(self):
        # at alpha = 1/3 each bond term is 2 P_2 - 2/3
        n = 3
        H = build_hamiltonian(SpinChainModel("aklt", n, boundary="open")).toarray()
        expected = sum(2 * channels.spin_two_projector(n, i, i + 1).toarray() for i in range(n - 1))
        expected = expected - (n - 1) * 2 / 3 * np.eye(3**n)
        np.testing.assert_allclose(H, expected, atol=1e-12)


class TestSpinOperators:
    def test_two_site_spectrum(self):
        ev = np.linalg.eigvalsh(channels.total_spin_squared(2).toarray())
        np.testing.assert_allclose(ev, [0, 2, 2, 2], atol=1e-12)

    def test_singlet_and_triplet(self):
        s2 = channels.total_spin_squared(2)
        assert abs(expectation(bell.bell_state(MM), s2)) < 1e-14
        assert expectation(PureState(np.array([1, 0, 0, 0])), s2).real == pytest.approx(2)

    def test_spin_one_matrices(self):
        sz, sp_, sm = (m.toarray() for m in channels.spin_matrices(1))
        np.testing.assert_allclose(sp_ @ sm - sm @ sp_, 2 * sz, atol=1e-14)

    def test_unsupported_spin(self):
        with pytest.raises(ValidationError):
            channels.spin_matrices(1.5)


class TestGroundStates:
    @pytest.mark.parametrize("N", [4, 6])
    def test_majumdar_ghosh_point(self, N):
        pair = ground_state(SpinChainModel("heisenberg_nnn", N, beta=0.5))
        mg = channels.majumdar_ghosh_state(N)
        H = build_hamiltonian(SpinChainModel("heisenberg_nnn", N, beta=0.5))
        # exact MG energy -3N/8
        assert pair.energy == pytest.approx(-3 * N / 8, abs=1e-9)
        assert np.linalg.norm(H @ mg.amplitudes - pair.energy * mg.amplitudes) < 1e-9
        assert pair.degeneracy == 2

    @pytest.mark.parametrize("beta", [0.0, 0.25, 1.0])
    @pytest.mark.parametrize("N", [4, 6])
    def test_unique_spin_zero_ground_state(self, beta, N):
        pair = ground_state(SpinChainModel("heisenberg_nnn", N, beta=beta))
        assert pair.degeneracy == 1
        assert abs(expectation(pair.state, channels.total_spin_squared(N))) < 1e-8
        assert classify(pair.state).max_weight() == pytest.approx(1, abs=1e-8)

    def test_four_site_heisenberg_energy(self):
        # periodic 4-site Heisenberg ring: E0 = -2
        assert ground_state(SpinChainModel("heisenberg_nnn", 4)).energy == pytest.approx(-2, abs=1e-10)

    def test_ising_ground_space_is_neel(self):
        pair = ground_state(SpinChainModel("ising_af", 4))
        assert pair.degeneracy == 2
        span = np.array([s.amplitudes for s in pair.states])
        for neel in channels.neel_states(4):
            assert np.linalg.norm(span.conj() @ neel.amplitudes) == pytest.approx(1, abs=1e-10)


class TestIsing:
    def test_neel_pair_expansion(self):
        # |ud> = (|--} + |+-}) / sqrt 2 and |du> = (|+-} - |--}) / sqrt 2
        minus, plus = channels.neel_states(2)
        v0, v2 = (bell.bell_state(l).amplitudes for l in (MM, bell.PM))
        np.testing.assert_allclose(minus.amplitudes, (v0 + v2) / np.sqrt(2), atol=1e-15)
        np.testing.assert_allclose(plus.amplitudes, (v2 - v0) / np.sqrt(2), atol=1e-15)

    @pytest.mark.parametrize("N", [2, 4, 6])
    def test_neel_states_split_evenly(self, N):
        for s in channels.neel_states(N):
            w = classify(s)
            support = w.support()
            assert len(support) == 2
            for lab in support:
                assert w[lab] == pytest.approx(0.5, abs=1e-12)

    @pytest.mark.parametrize("N", [2, 4, 6])
    def test_superposition_is_one_ebit(self, N):
        s = channels.ising_superposition(N)
        assert classify(s).max_weight() == pytest.approx(1, abs=1e-12)
        for cut in range(1, N):
            assert entanglement_entropy(s, cut) == pytest.approx(1, abs=1e-10)

    def test_odd_rejected(self):
        with pytest.raises(ValidationError):
            channels.neel_states(3)


class TestAKLT:
    def test_symmetrizer(self):
        S = channels.SYMMETRIZER
        np.testing.assert_allclose(S @ S, S, atol=1e-15)
        assert round(np.trace(S).real) == 3

    def test_single_site_is_one_subspace(self):
        emb = channels.aklt_virtual_state(1)
        assert emb.virtual_state.sites == 4
        assert classify(emb.virtual_state).max_weight() == pytest.approx(1, abs=1e-12)

    @pytest.mark.parametrize("N", [2, 3, 4])
    def test_no_spin_two_on_any_bond(self, N):
        psi = channels.aklt_spin_one_reduction(channels.aklt_virtual_state(N))
        assert np.linalg.norm(psi) == pytest.approx(1, abs=1e-12)
        for i in range(N - 1):
            assert abs(channels.reduced_expectation(psi, channels.spin_two_projector(N, i, i + 1))) < 1e-10

    @pytest.mark.parametrize("N", [2, 3, 4])
    def test_open_chain_energy(self, N):
        psi = channels.aklt_spin_one_reduction(channels.aklt_virtual_state(N))
        H = build_hamiltonian(SpinChainModel("aklt", N, boundary="open"))
        assert channels.reduced_expectation(psi, H).real == pytest.approx(-2 * (N - 1) / 3, abs=1e-10)

    def test_reduction_reaches_ground_energy(self):
        H = build_hamiltonian(SpinChainModel("aklt", 4, boundary="open"))
        assert lowest_eigenpair(H, local_dim=3).energy == pytest.approx(-2, abs=1e-9)

    def test_pairs(self):
        assert channels.aklt_virtual_state(2).physical_pairs() == [(2, 3), (4, 5)]

    def test_cap(self):
        with pytest.raises(DimensionError):
            channels.aklt_virtual_state(7)


class TestRandomSpinZero:
    def test_two_sites_is_singlet(self):
        s = channels.random_spin_zero_state(2, seed=1)
        assert abs(inner(s, bell.bell_state(MM))) == pytest.approx(1, abs=1e-12)

    @pytest.mark.parametrize("L", [4, 6])
    def test_spin_zero_and_single_subspace(self, L):
        s = channels.random_spin_zero_state(L, seed=L)
        assert abs(expectation(s, channels.total_spin_squared(L))) < 1e-10
        assert classify(s)[MM if (L // 2) % 2 else bell.PP] == pytest.approx(1, abs=1e-9)

    def test_seeds_differ(self):
        a = channels.random_spin_zero_state(4, seed=1)
        b = channels.random_spin_zero_state(4, seed=2)
        assert abs(inner(a, b)) < 1 - 1e-6

    def test_odd_rejected(self):
        with pytest.raises(ValidationError):
            channels.random_spin_zero_state(3)
