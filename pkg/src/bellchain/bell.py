"""Bell basis, the one-qubit correction group and Bell-subspace classification.

A Bell label ``(x, z)`` names the two-qubit state with ``sigma_x (x) sigma_x``
eigenvalue ``x`` and ``sigma_z (x) sigma_z`` eigenvalue ``z``. Phases are
fixed by ``bell_state(--) = (|ud> - |du>)/sqrt(2)`` (the singlet) and
``bell_state(label) = (I (x) X^i) singlet`` with::

    X^0 = I,  X^1 = sigma_x,  X^2 = -sigma_z,  X^3 = i sigma_y

and ``i`` running over ``--, -+, +-, ++`` in that order.

For an even number ``L`` of qubits the x- and z-string operators commute and
split the chain Hilbert space into four Bell subspaces labelled the same way.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Mapping, Sequence

import numpy as np
import scipy.sparse as sp
from numpy.typing import NDArray

from bellchain.errors import IntegrityError, ValidationError
from bellchain.qstate import (
    I2,
    PAULI,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    PureState,
    SeedLike,
    apply_local,
    expectation,
    random_haar_state,
)


@dataclass(frozen=True)
class BellLabel:
    """Eigenvalue pair ``(x_sign, z_sign)`` of one Bell pair or Bell subspace."""

    x_sign: int
    z_sign: int

    def __post_init__(self) -> None:
        if self.x_sign not in (1, -1) or self.z_sign not in (1, -1):
            raise ValidationError(f"Bell label entries must be +-1, got ({self.x_sign}, {self.z_sign})")

    @classmethod
    def parse(cls, text: str) -> BellLabel:
        if len(text) != 2 or any(c not in "+-" for c in text):
            raise ValidationError(f"Bell label must look like '+-', got {text!r}")
        return cls(*(1 if c == "+" else -1 for c in text))

    @property
    def index(self) -> int:
        """Position in the order ``--, -+, +-, ++``; also the X^i of its Bell state."""
        return 2 * (self.x_sign > 0) + (self.z_sign > 0)

    def __mul__(self, other: BellLabel) -> BellLabel:
        return BellLabel(self.x_sign * other.x_sign, self.z_sign * other.z_sign)

    def __str__(self) -> str:
        return ("+" if self.x_sign > 0 else "-") + ("+" if self.z_sign > 0 else "-")


MM = BellLabel(-1, -1)
MP = BellLabel(-1, 1)
PM = BellLabel(1, -1)
PP = BellLabel(1, 1)
BELL_LABELS: tuple[BellLabel, ...] = (MM, MP, PM, PP)

LabelVector = tuple[BellLabel, ...]

X_MATRICES: tuple[NDArray[np.complex128], ...] = (I2, SIGMA_X, -SIGMA_Z, 1j * SIGMA_Y)

SINGLET = np.array([0, 1, -1, 0], dtype=complex) / np.sqrt(2)


@dataclass(frozen=True)
class SignedCorrection:
    """``sign * X^index``, an element of the 8-element correction group."""

    index: int
    sign: int = 1

    def __post_init__(self) -> None:
        if self.index not in (0, 1, 2, 3) or self.sign not in (1, -1):
            raise ValidationError(f"invalid correction ({self.sign}, X^{self.index})")

    @property
    def matrix(self) -> NDArray[np.complex128]:
        return self.sign * X_MATRICES[self.index]

    @classmethod
    def from_matrix(cls, m: NDArray[np.complex128], atol: float = 1e-10) -> SignedCorrection:
        for index, x in enumerate(X_MATRICES):
            for sign in (1, -1):
                if np.allclose(m, sign * x, atol=atol):
                    return cls(index, sign)
        raise IntegrityError(f"matrix is not of the form +-X^i:\n{m}")

    def __matmul__(self, other: SignedCorrection) -> SignedCorrection:
        return _product(self, other)

    def inverse(self) -> SignedCorrection:
        # X^3 = i sigma_y squares to -I; the others are involutions
        return SignedCorrection(self.index, -self.sign if self.index == 3 else self.sign)

    def same_class(self, other: SignedCorrection) -> bool:
        return self.index == other.index

    def __str__(self) -> str:
        return ("-" if self.sign < 0 else "+") + f"X{self.index}"


@lru_cache(maxsize=None)
def _product(a: SignedCorrection, b: SignedCorrection) -> SignedCorrection:
    return SignedCorrection.from_matrix(a.matrix @ b.matrix)


# Rows: measured outcome |pq}; columns: channel |jk}; both ordered --, -+, +-, ++.
_TABLE = (
    ((0, -1), (1, -1), (2, -1), (3, -1)),
    ((1, 1), (0, 1), (3, -1), (2, -1)),
    ((2, 1), (3, 1), (0, 1), (1, 1)),
    ((3, -1), (2, -1), (1, 1), (0, 1)),
)


def bell_state(label: BellLabel) -> PureState:
    """Two-qubit Bell state ``(I (x) X^i) singlet``."""
    return PureState(np.kron(I2, X_MATRICES[label.index]) @ SINGLET)


def bell_basis_state(labels: Sequence[BellLabel]) -> PureState:
    """Tensored Bell basis state on pairs (1,2), (3,4), ..."""
    amps = np.ones(1, dtype=complex)
    for lab in labels:
        amps = np.kron(amps, bell_state(lab).amplitudes)
    return PureState(amps)


def bell_projector(label: BellLabel) -> NDArray[np.complex128]:
    v = bell_state(label).amplitudes
    return np.outer(v, v.conj())


def label_product(labels: Sequence[BellLabel]) -> BellLabel:
    out = PP
    for lab in labels:
        out = out * lab
    return out


def correction(channel: BellLabel, outcome: BellLabel) -> SignedCorrection:
    """Operator left on the output qubit when ``|v> (x) |channel}`` is measured as ``outcome``.

    Projecting target and first channel qubit onto ``outcome`` leaves
    ``(1/2) X |v>`` on the last qubit; the returned ``X`` must be inverted.
    """
    index, sign = _TABLE[outcome.index][channel.index]
    return SignedCorrection(index, sign)


def compose(corrections: Sequence[SignedCorrection]) -> SignedCorrection:
    """Matrix product of the list; the rightmost element acts first."""
    if not corrections:
        raise ValidationError("compose needs at least one correction")
    out = corrections[-1]
    for c in reversed(corrections[:-1]):
        out = c @ out
    return out


def _check_even(L: int) -> None:
    if L < 2 or L % 2:
        raise ValidationError(f"Bell-subspace structure needs an even number of qubits, got L={L}")


@lru_cache(maxsize=32)
def string_operator(L: int, axis: str) -> sp.csr_matrix:
    """``sigma_axis`` on every one of ``L`` qubits (sparse; a signed permutation)."""
    _check_even(L)
    if axis not in PAULI:
        raise ValidationError(f"axis must be x, y or z, got {axis!r}")
    out = sp.identity(1, dtype=complex, format="csr")
    for _ in range(L):
        out = sp.kron(out, sp.csr_matrix(PAULI[axis]), format="csr")
    return out


def subspace_projector(L: int, label: BellLabel) -> sp.csr_matrix:
    """``(I + x S_x)(I + z S_z) / 4``."""
    eye = sp.identity(2**L, dtype=complex, format="csr")
    sx = string_operator(L, "x")
    sz = string_operator(L, "z")
    return ((eye + label.x_sign * sx) @ (eye + label.z_sign * sz) / 4).tocsr()


@dataclass(frozen=True)
class SubspaceWeights:
    """Weight of a state in each of the four Bell subspaces."""

    weights: Mapping[BellLabel, float]

    def __getitem__(self, label: BellLabel | str) -> float:
        if isinstance(label, str):
            label = BellLabel.parse(label)
        return self.weights[label]

    def total(self) -> float:
        return float(sum(self.weights.values()))

    def argmax(self) -> BellLabel:
        # max() keeps the first maximum, so ties resolve in the order --, -+, +-, ++
        return max(BELL_LABELS, key=lambda lab: self.weights[lab])

    def max_weight(self) -> float:
        return self.weights[self.argmax()]

    def support(self, atol: float = 1e-12) -> list[BellLabel]:
        return [lab for lab in BELL_LABELS if self.weights[lab] > atol]

    def to_dict(self) -> dict[str, float]:
        return {str(lab): float(self.weights[lab]) for lab in BELL_LABELS}

    @classmethod
    def from_dict(cls, doc: Mapping[str, float]) -> SubspaceWeights:
        return cls({BellLabel.parse(k): float(v) for k, v in doc.items()})

    def __str__(self) -> str:
        return "{" + ", ".join(f"{k}: {v:.12g}" for k, v in self.to_dict().items()) + "}"


def classify(state: PureState) -> SubspaceWeights:
    """Squared norm of the projection onto each Bell subspace."""
    if state.local_dim != 2:
        raise ValidationError("classify is defined for qubit chains only")
    L = state.sites
    _check_even(L)
    psi = state.amplitudes
    sx_psi = string_operator(L, "x") @ psi
    sz = string_operator(L, "z")
    terms = (psi, sx_psi, sz @ psi, sz @ sx_psi)
    weights = {}
    for lab in BELL_LABELS:
        x, z = lab.x_sign, lab.z_sign
        # Pi_xz psi = (psi + x Sx psi + z Sz psi + xz Sz Sx psi) / 4
        proj = (terms[0] + x * terms[1] + z * terms[2] + x * z * terms[3]) / 4
        weights[lab] = float(np.vdot(proj, proj).real)
    return SubspaceWeights(weights)


def representatives(subspace: BellLabel, n_pairs: int) -> Iterator[LabelVector]:
    """Every label vector of length ``n_pairs`` whose pairwise product is ``subspace``."""
    for labels in itertools.product(BELL_LABELS, repeat=n_pairs):
        if label_product(labels) == subspace:
            yield labels


def representative(subspace: BellLabel, n_pairs: int) -> LabelVector:
    """Canonical representative: singlets everywhere except a fitted last pair."""
    head = (MM,) * (n_pairs - 1)
    return head + (subspace * label_product(head),)


def chain_correction(channel: Sequence[BellLabel], outcomes: Sequence[BellLabel]) -> SignedCorrection:
    """Accumulated correction ``X_n ... X_1`` for a tensored Bell channel."""
    if len(channel) != len(outcomes) or not outcomes:
        raise ValidationError("channel and outcome label vectors must have equal nonzero length")
    per_pair = [correction(c, o) for c, o in zip(channel, outcomes)]
    return compose(per_pair[::-1])


def subspace_correction(subspace: BellLabel, outcomes: Sequence[BellLabel]) -> SignedCorrection:
    """Total correction for any channel in ``subspace`` under the given outcomes.

    Only the class (``index``) is representative independent; the sign is that
    of the canonical representative.
    """
    return chain_correction(representative(subspace, len(outcomes)), outcomes)


def random_subspace_state(L: int, label: BellLabel, seed: SeedLike = None) -> PureState:
    """Haar-random state projected into one Bell subspace."""
    _check_even(L)
    rng = np.random.default_rng(seed)
    psi = random_haar_state(2**L, rng)
    return PureState(subspace_projector(L, label) @ psi.amplitudes).normalized()


# cluster states


def cluster_state(L: int) -> PureState:
    """Linear cluster state ``prod CZ_{i,i+1} |+>^L`` (minus sign on ``|11>`` pairs)."""
    if L < 2:
        raise ValidationError(f"cluster state needs L >= 2, got {L}")
    idx = np.arange(2**L)
    bits = (idx[:, None] >> np.arange(L)[::-1]) & 1
    parity = np.sum(bits[:, :-1] & bits[:, 1:], axis=1) % 2
    return PureState((1 - 2 * parity).astype(complex) / np.sqrt(2**L))


HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
PHASE_S = np.diag([1, 1j]).astype(complex)


def _canonical_phase(m: NDArray[np.complex128]) -> NDArray[np.complex128]:
    flat = m.reshape(-1)
    pivot = flat[np.argmax(np.abs(flat) > 1e-9)]
    return m * (abs(pivot) / pivot)


@lru_cache(maxsize=1)
def single_qubit_cliffords() -> tuple[NDArray[np.complex128], ...]:
    """The 24 single-qubit Clifford unitaries modulo global phase."""
    seen: dict[tuple, NDArray[np.complex128]] = {}
    frontier = [I2]
    while frontier:
        nxt = []
        for m in frontier:
            key = tuple(np.round(_canonical_phase(m), 8).reshape(-1))
            if key in seen:
                continue
            seen[key] = _canonical_phase(m)
            nxt.extend((HADAMARD @ m, PHASE_S @ m))
        frontier = nxt
    return tuple(seen.values())


def _apply_per_site(state: PureState, unitaries: Sequence[NDArray[np.complex128]]) -> PureState:
    for site, u in enumerate(unitaries, start=1):
        state = apply_local(state, [site], u)
    return state


def _string_expectation(state: PureState, paulis: Sequence[str]) -> float:
    psi = state
    for site, axis in enumerate(paulis, start=1):
        psi = apply_local(psi, [site], PAULI[axis])
    return float(np.vdot(state.amplitudes, psi.amplitudes).real)


def _search_local_cliffords(state: PureState) -> list[NDArray[np.complex128]] | None:
    L = state.sites
    stabilizing = [
        p for p in itertools.product("xyz", repeat=L) if abs(abs(_string_expectation(state, p)) - 1) < 1e-9
    ]
    for p, q in itertools.product(stabilizing, repeat=2):
        if all(a != b for a, b in zip(p, q)):
            break
    else:
        return None
    unitaries = []
    for a, b in zip(p, q):
        # V with V X V^dag ~ P_a and V Z V^dag ~ P_b; the site unitary is V^dag
        for v in single_qubit_cliffords():
            if _proportional(v @ SIGMA_X @ v.conj().T, PAULI[a]) and _proportional(
                v @ SIGMA_Z @ v.conj().T, PAULI[b]
            ):
                unitaries.append(v.conj().T)
                break
        else:  # pragma: no cover - the Clifford group acts transitively on anticommuting pairs
            raise IntegrityError(f"no Clifford maps (X, Z) to ({a}, {b})")
    return unitaries


def _proportional(a: NDArray[np.complex128], b: NDArray[np.complex128]) -> bool:
    return np.allclose(a, b, atol=1e-9) or np.allclose(a, -b, atol=1e-9)


def cluster_to_bell_subspace(L: int) -> tuple[list[NDArray[np.complex128]], PureState]:
    """Local unitaries taking the ``L``-qubit cluster state into the ``++`` subspace.

    Tries Hadamards on even sites first, then searches the local Clifford group.
    Raises :class:`IntegrityError` when no mapping is found.
    """
    _check_even(L)
    cluster = cluster_state(L)
    unitaries = [HADAMARD if site % 2 == 0 else I2 for site in range(1, L + 1)]
    if classify(_apply_per_site(cluster, unitaries)).max_weight() < 1 - 1e-12:
        found = _search_local_cliffords(cluster)
        if found is None:
            raise IntegrityError(f"no local Clifford maps the L={L} cluster state into a Bell subspace")
        unitaries = found
    mapped = _apply_per_site(cluster, unitaries)
    sx = expectation(mapped, string_operator(L, "x")).real
    sz = expectation(mapped, string_operator(L, "z")).real
    # a Pauli on site 1 flips whichever string sign is negative
    fix = {(True, True): I2, (False, True): SIGMA_Z, (True, False): SIGMA_X, (False, False): SIGMA_Y}
    unitaries[0] = fix[(sx > 0, sz > 0)] @ unitaries[0]
    mapped = _apply_per_site(cluster, unitaries)
    if classify(mapped)[PP] < 1 - 1e-12:
        raise IntegrityError(f"cluster mapping at L={L} did not reach the ++ subspace")
    return unitaries, mapped
