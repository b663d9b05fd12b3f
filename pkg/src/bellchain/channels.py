"""Channel states and spin-chain Hamiltonians.

Hamiltonians are returned as ``scipy.sparse`` CSR matrices in the qstate
basis convention. Spin-1 sites use the basis ``m = +1, 0, -1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np
import scipy.sparse as sp
from numpy.typing import NDArray

from bellchain.bell import MM, bell_basis_state
from bellchain.errors import DimensionError, ValidationError
from bellchain.qstate import (
    MAX_DIM,
    Eigenpair,
    PureState,
    SeedLike,
    apply_local,
    basis_state,
    expectation,
    lowest_eigenpair,
    random_haar_state,
)

ModelKind = Literal["heisenberg_nnn", "ising_af", "aklt"]
Boundary = Literal["periodic", "open", "open_with_half_spin_ends"]


def spin_matrices(spin: float) -> tuple[sp.csr_matrix, sp.csr_matrix, sp.csr_matrix]:
    """``(S^z, S^+, S^-)`` for spin 1/2 or 1, basis ordered from ``m = +s`` down."""
    if spin == 0.5:
        sz = np.diag([0.5, -0.5])
        splus = np.array([[0.0, 1.0], [0.0, 0.0]])
    elif spin == 1:
        sz = np.diag([1.0, 0.0, -1.0])
        splus = np.sqrt(2) * np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [0.0, 0.0, 0.0]])
    else:
        raise ValidationError(f"only spin 1/2 and spin 1 are supported, got {spin}")
    return sp.csr_matrix(sz), sp.csr_matrix(splus), sp.csr_matrix(splus.T)


def _site_op(op: sp.csr_matrix, site: int, n_sites: int) -> sp.csr_matrix:
    d = op.shape[0]
    left = sp.identity(d**site, format="csr")
    right = sp.identity(d ** (n_sites - site - 1), format="csr")
    return sp.kron(sp.kron(left, op), right, format="csr")


def _check_dim(d: int, n: int) -> None:
    if d**n > MAX_DIM:
        raise DimensionError(f"{n} sites of dimension {d} exceed the {MAX_DIM} cap")


def spin_dot(n_sites: int, i: int, j: int, spin: float = 0.5) -> sp.csr_matrix:
    """``S_i . S_j`` on an ``n_sites`` chain (0-based site indices)."""
    sz, splus, sminus = spin_matrices(spin)
    _check_dim(sz.shape[0], n_sites)
    zi, pi, mi = (_site_op(o, i, n_sites) for o in (sz, splus, sminus))
    zj, pj, mj = (_site_op(o, j, n_sites) for o in (sz, splus, sminus))
    return (zi @ zj + 0.5 * (pi @ mj + mi @ pj)).tocsr()


def total_spin_squared(L: int, local_spin: float = 0.5) -> sp.csr_matrix:
    """``(sum_i S_i)^2``; eigenvalues ``S(S+1)``."""
    sz, splus, sminus = spin_matrices(local_spin)
    _check_dim(sz.shape[0], L)
    tz, tp, tm = (sum(_site_op(o, i, L) for i in range(L)) for o in (sz, splus, sminus))
    return (tz @ tz + 0.5 * (tp @ tm + tm @ tp)).tocsr()


@dataclass(frozen=True)
class SpinChainModel:
    """Model descriptor for :func:`build_hamiltonian`."""

    kind: ModelKind
    sites: int
    beta: float = 0.0
    alpha: float = 1.0 / 3.0
    boundary: Boundary = "periodic"

    def __post_init__(self) -> None:
        if self.kind not in ("heisenberg_nnn", "ising_af", "aklt"):
            raise ValidationError(f"unknown model kind {self.kind!r}")
        if self.sites < 2:
            raise ValidationError(f"a chain needs at least 2 sites, got {self.sites}")
        if self.beta < 0:
            raise ValidationError(f"beta must be >= 0, got {self.beta}")
        if self.boundary not in ("periodic", "open", "open_with_half_spin_ends"):
            raise ValidationError(f"unknown boundary {self.boundary!r}")
        if self.boundary == "open_with_half_spin_ends" and self.kind != "aklt":
            raise ValidationError("open_with_half_spin_ends applies to the aklt model only")

    @property
    def local_dim(self) -> int:
        return 3 if self.kind == "aklt" else 2

    def bonds(self, distance: int = 1) -> list[tuple[int, int]]:
        n = self.sites
        if self.boundary == "periodic":
            return [(i, (i + distance) % n) for i in range(n)]
        return [(i, i + distance) for i in range(n - distance)]


def build_hamiltonian(model: SpinChainModel) -> sp.csr_matrix:
    """Sparse Hamiltonian of ``model``.

    * ``heisenberg_nnn``: ``sum_i S_i.S_{i+1} + beta S_i.S_{i+2}``
    * ``ising_af``: ``sum_i S^z_i S^z_{i+1}``
    * ``aklt``: ``sum_i S_i.S_{i+1} + alpha (S_i.S_{i+1})^2`` on spin-1 sites

    Periodic sums wrap around, so a 2-site periodic chain counts its bond twice.
    For ``aklt`` the free spin-1/2 ends of the valence-bond construction do not
    enter the Hamiltonian.
    """
    n = model.sites
    _check_dim(model.local_dim, n)
    dim = model.local_dim**n
    H = sp.csr_matrix((dim, dim))
    if model.kind == "heisenberg_nnn":
        for i, j in model.bonds(1):
            H = H + spin_dot(n, i, j)
        if model.beta:
            for i, j in model.bonds(2):
                H = H + model.beta * spin_dot(n, i, j)
    elif model.kind == "ising_af":
        sz = spin_matrices(0.5)[0]
        for i, j in model.bonds(1):
            H = H + _site_op(sz, i, n) @ _site_op(sz, j, n)
    else:
        for i, j in model.bonds(1):
            b = spin_dot(n, i, j, spin=1)
            H = H + b + model.alpha * (b @ b)
    return H.tocsr()


def ground_state(model: SpinChainModel, tol: float = 1e-9) -> Eigenpair:
    return lowest_eigenpair(build_hamiltonian(model), tol=tol, local_dim=model.local_dim)


def _check_even(n: int) -> None:
    if n < 2 or n % 2:
        raise ValidationError(f"need an even number of sites, got {n}")


def majumdar_ghosh_state(N: int) -> PureState:
    """Singlets on (1,2), (3,4), ...; the translated dimer covering is not built."""
    _check_even(N)
    return bell_basis_state([MM] * (N // 2))


def neel_states(N: int) -> tuple[PureState, PureState]:
    """``(|udud...>, |dudu...>)``, the two Ising ground states."""
    _check_even(N)
    minus = basis_state([i % 2 for i in range(N)])
    plus = basis_state([(i + 1) % 2 for i in range(N)])
    return minus, plus


def ising_superposition(N: int) -> PureState:
    """``(|dudu...> - |udud...>) / sqrt(2)``."""
    minus, plus = neel_states(N)
    return PureState((plus.amplitudes - minus.amplitudes) / np.sqrt(2))


# AKLT valence-bond construction

SYMMETRIZER = (np.eye(4) + np.eye(4)[[0, 2, 1, 3]]).astype(complex) / 2

# rows: |uu>, (|ud> + |du>)/sqrt(2), |dd>  ->  spin-1 basis m = +1, 0, -1
TRIPLET_ISOMETRY = np.array(
    [[1, 0, 0, 0], [0, 1 / np.sqrt(2), 1 / np.sqrt(2), 0], [0, 0, 0, 1]], dtype=complex
)


@dataclass(frozen=True)
class VirtualEmbedding:
    """AKLT state on ``2N + 2`` virtual qubits ordered ``0', 1, 1', 2, 2', ..., N, N', N+1``.

    Physical spin-1 site ``k`` is the symmetrised pair ``(k, k')`` at qubit
    positions ``(2k, 2k+1)``; qubits 1 and ``2N+2`` are the free spin-1/2 ends.
    """

    physical_sites: int
    virtual_state: PureState
    per_site_symmetrizer: NDArray[np.complex128]

    def physical_pairs(self) -> list[tuple[int, int]]:
        return [(2 * k, 2 * k + 1) for k in range(1, self.physical_sites + 1)]


def aklt_virtual_state(N: int) -> VirtualEmbedding:
    if N < 1:
        raise ValidationError(f"need at least one physical site, got {N}")
    if 2 * N + 2 > 14:
        raise DimensionError(f"{2 * N + 2} virtual qubits exceed the 14-qubit cap")
    psi = bell_basis_state([MM] * (N + 1))
    for pair in [(2 * k, 2 * k + 1) for k in range(1, N + 1)]:
        psi = apply_local(psi, pair, SYMMETRIZER)
    return VirtualEmbedding(N, psi.normalized(), SYMMETRIZER)


def aklt_spin_one_reduction(embedding: VirtualEmbedding) -> NDArray[np.complex128]:
    """Map each symmetrised pair onto a spin-1 site.

    Returns a ``(3**N, 4)`` matrix: rows index the spin-1 chain, columns the
    two free boundary qubits (left end most significant).
    """
    N = embedding.physical_sites
    t = embedding.virtual_state.amplitudes.reshape((2,) + (4,) * N + (2,))
    for k in range(1, N + 1):
        t = np.moveaxis(np.tensordot(TRIPLET_ISOMETRY, t, axes=([1], [k])), 0, k)
    t = np.moveaxis(t, 0, -2)
    return t.reshape(3**N, 4)


def reduced_expectation(psi_matrix: NDArray[np.complex128], op: sp.spmatrix | NDArray) -> complex:
    """``Tr(Psi^dag op Psi)`` for a chain operator acting on the row index."""
    return complex(np.vdot(psi_matrix, op @ psi_matrix))


def spin_two_projector(n_sites: int, i: int, j: int) -> sp.csr_matrix:
    """Projector onto total spin 2 of spin-1 sites ``i, j`` (0-based)."""
    b = spin_dot(n_sites, i, j, spin=1)
    eye = sp.identity(3**n_sites, format="csr")
    return ((b + 2 * eye) @ (b + eye) / 6).tocsr()


def random_spin_zero_state(L: int, seed: SeedLike = None, max_tries: int = 10) -> PureState:
    """Haar-random qubit state projected onto total spin 0.

    The projection is the product ``prod_S (S(S+1) - S^2) / S(S+1)`` over
    ``S = 1..L/2``, applied after restricting to the ``S^z = 0`` sector.
    """
    _check_even(L)
    rng = np.random.default_rng(seed)
    s2 = total_spin_squared(L)
    idx = np.arange(2**L)
    n_down = np.array([bin(i).count("1") for i in idx])
    sz_zero = n_down == L // 2
    for _ in range(max_tries):
        psi = random_haar_state(2**L, rng).amplitudes * sz_zero
        for _ in range(2):
            for S in range(1, L // 2 + 1):
                c = S * (S + 1)
                psi = (c * psi - s2 @ psi) / c
            norm = np.linalg.norm(psi)
            if norm < 1e-8:
                break
            psi = psi / norm
        else:
            state = PureState(psi)
            if expectation(state, s2).real <= 1e-10:
                return state
    raise ValidationError(f"failed to draw a spin-0 state at L={L} after {max_tries} tries")


__all__ = [
    "SYMMETRIZER",
    "TRIPLET_ISOMETRY",
    "SpinChainModel",
    "VirtualEmbedding",
    "aklt_spin_one_reduction",
    "aklt_virtual_state",
    "build_hamiltonian",
    "ground_state",
    "ising_superposition",
    "majumdar_ghosh_state",
    "neel_states",
    "random_spin_zero_state",
    "reduced_expectation",
    "spin_dot",
    "spin_matrices",
    "spin_two_projector",
    "total_spin_squared",
]
