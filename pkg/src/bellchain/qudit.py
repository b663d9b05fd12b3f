"""Qudit (spin-s, N = 2s + 1 levels) Bell states and Weyl corrections.

Labels ``(A, B)`` run over ``0..N-1``; the symmetric range ``-s..s`` maps
onto it by a shift mod N. With ``omega = exp(2 pi i / N)``::

    |A B} = N**-0.5 * sum_i omega**(B i) |i, i + A>
    P = cyclic shift, P|j> = |j - 1>
    Q = diag(1, omega, ..., omega**(N-1))

so that ``Q P = omega**-1 P Q``. Corrections are kept as exact integer
exponents ``omega**c P**p Q**q``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np
from numpy.typing import NDArray

from bellchain.bell import BellLabel
from bellchain.errors import IntegrityError, ValidationError
from bellchain.qstate import PureState, project, tensor
from bellchain.teleport import PROBABILITY_FLOOR, TeleportOutcome


def omega(N: int) -> complex:
    return complex(np.exp(2j * np.pi / N))


def _check_N(N: int) -> None:
    if N < 2:
        raise ValidationError(f"qudit dimension must be >= 2, got {N}")


@dataclass(frozen=True)
class QuditLabel:
    A: int
    B: int

    def __post_init__(self) -> None:
        if self.A < 0 or self.B < 0:
            raise ValidationError(f"qudit labels are non-negative residues, got ({self.A}, {self.B})")

    def check(self, N: int) -> QuditLabel:
        if self.A >= N or self.B >= N:
            raise ValidationError(f"label ({self.A}, {self.B}) out of range for N={N}")
        return self

    @classmethod
    def from_symmetric(cls, A: int, B: int, N: int) -> QuditLabel:
        """Map labels from the symmetric range ``-s..s`` to residues mod N."""
        return cls(A % N, B % N)

    @classmethod
    def from_bell(cls, label: BellLabel) -> QuditLabel:
        """N = 2 correspondence: ``nbell_state(2, from_bell(l)) == bell_state(l)``."""
        return cls((1 - label.z_sign) // 2, (1 - label.x_sign) // 2)

    def __str__(self) -> str:
        return f"({self.A},{self.B})"


def all_labels(N: int) -> list[QuditLabel]:
    return [QuditLabel(a, b) for a in range(N) for b in range(N)]


def nbell_state(N: int, label: QuditLabel) -> PureState:
    _check_N(N)
    label.check(N)
    w = omega(N)
    amps = np.zeros(N * N, dtype=complex)
    for i in range(N):
        amps[i * N + (i + label.A) % N] = w ** (label.B * i)
    return PureState(amps / np.sqrt(N), N)


def nbell_projector(N: int, label: QuditLabel) -> NDArray[np.complex128]:
    v = nbell_state(N, label).amplitudes
    return np.outer(v, v.conj())


@lru_cache(maxsize=None)
def weyl_matrices(N: int) -> tuple[NDArray[np.complex128], NDArray[np.complex128]]:
    """``(P, Q)``: ones on the superdiagonal plus the bottom-left corner, and the clock."""
    _check_N(N)
    P = np.roll(np.eye(N, dtype=complex), 1, axis=1)
    Q = np.diag(omega(N) ** np.arange(N))
    P.flags.writeable = False
    Q.flags.writeable = False
    return P, Q


@dataclass(frozen=True)
class WeylCorrection:
    """``omega**phase_power * P**p_power * Q**q_power`` for dimension ``N``."""

    p_power: int
    q_power: int
    phase_power: int
    N: int

    def __post_init__(self) -> None:
        _check_N(self.N)
        for name in ("p_power", "q_power", "phase_power"):
            object.__setattr__(self, name, getattr(self, name) % self.N)

    @classmethod
    def identity(cls, N: int) -> WeylCorrection:
        return cls(0, 0, 0, N)

    @property
    def matrix(self) -> NDArray[np.complex128]:
        P, Q = weyl_matrices(self.N)
        return (
            omega(self.N) ** self.phase_power
            * np.linalg.matrix_power(P, self.p_power)
            @ np.linalg.matrix_power(Q, self.q_power)
        )

    def __matmul__(self, other: WeylCorrection) -> WeylCorrection:
        return compose_weyl(self, other)

    def inverse(self) -> WeylCorrection:
        return WeylCorrection(-self.p_power, -self.q_power, -self.phase_power - self.p_power * self.q_power, self.N)

    def same_class(self, other: WeylCorrection) -> bool:
        return (self.p_power, self.q_power) == (other.p_power, other.q_power)

    @classmethod
    def from_matrix(cls, m: NDArray[np.complex128], N: int, atol: float = 1e-9) -> WeylCorrection:
        """Identify ``m`` as ``omega**c P**p Q**q``; raise if it is not one."""
        P, Q = weyl_matrices(N)
        w = omega(N)
        hits = []
        for p in range(N):
            for q in range(N):
                basis = np.linalg.matrix_power(P, p) @ np.linalg.matrix_power(Q, q)
                coeff = np.trace(basis.conj().T @ m) / N
                if abs(coeff) > atol:
                    hits.append((p, q, coeff))
        if len(hits) != 1:
            raise IntegrityError(f"matrix is not a single Weyl operator ({len(hits)} components)")
        p, q, coeff = hits[0]
        c = int(round(np.angle(coeff) / (2 * np.pi / N))) % N
        if abs(coeff - w**c) > atol:
            raise IntegrityError(f"coefficient {coeff} is not a power of omega")
        return cls(p, q, c, N)

    def __str__(self) -> str:
        return f"w^{self.phase_power} P^{self.p_power} Q^{self.q_power}"


def compose_weyl(a: WeylCorrection, b: WeylCorrection, N: int | None = None) -> WeylCorrection:
    """Exponent form of the product ``a @ b``, using ``Q^m P^n = omega^(-mn) P^n Q^m``."""
    if a.N != b.N or (N is not None and N != a.N):
        raise ValidationError(f"dimension mismatch: {a.N}, {b.N}, {N}")
    return WeylCorrection(
        a.p_power + b.p_power,
        a.q_power + b.q_power,
        a.phase_power + b.phase_power - a.q_power * b.p_power,
        a.N,
    )


@lru_cache(maxsize=None)
def qudit_correction(N: int, channel: QuditLabel, outcome: QuditLabel) -> WeylCorrection:
    """Weyl operator left on the third qudit of ``|v> (x) |channel}`` after projecting onto ``|outcome}``.

    Solved numerically from the residual operator and checked to be a single
    Weyl element.
    """
    bra = nbell_state(N, outcome).amplitudes.conj()
    ket = nbell_state(N, channel).amplitudes
    m = np.zeros((N, N), dtype=complex)
    for c in range(N):
        v = np.zeros(N, dtype=complex)
        v[c] = 1.0
        full = np.kron(v, ket).reshape(N * N, N)
        m[:, c] = N * (bra @ full)
    return WeylCorrection.from_matrix(m, N)


def compose_all(corrections: Sequence[WeylCorrection]) -> WeylCorrection:
    """Product of the list; the rightmost element acts first."""
    if not corrections:
        raise ValidationError("compose_all needs at least one correction")
    out = corrections[-1]
    for c in reversed(corrections[:-1]):
        out = c @ out
    return out


def label_sum(labels: Sequence[QuditLabel], N: int) -> QuditLabel:
    return QuditLabel(sum(l.A for l in labels) % N, sum(l.B for l in labels) % N)


def qudit_chain_correction(N: int, channel: Sequence[QuditLabel], outcomes: Sequence[QuditLabel]) -> WeylCorrection:
    if len(channel) != len(outcomes) or not outcomes:
        raise ValidationError("channel and outcome label lists must have equal nonzero length")
    per_pair = [qudit_correction(N, c, o) for c, o in zip(channel, outcomes)]
    return compose_all(per_pair[::-1])


def qudit_representative(N: int, subspace: QuditLabel, n_pairs: int) -> tuple[QuditLabel, ...]:
    return (QuditLabel(0, 0),) * (n_pairs - 1) + (subspace.check(N),)


def qudit_subspace_correction(N: int, subspace: QuditLabel, outcomes: Sequence[QuditLabel]) -> WeylCorrection:
    """Total correction for a tensored N-Bell channel whose labels sum to ``subspace``.

    The ``(p, q)`` class does not depend on which representative is used.
    """
    return qudit_chain_correction(N, qudit_representative(N, subspace, len(outcomes)), outcomes)


def qudit_teleport_branch(
    channel: PureState,
    target: PureState,
    outcomes: Sequence[QuditLabel],
    assumed_subspace: QuditLabel,
) -> TeleportOutcome:
    """Qudit analogue of :func:`bellchain.teleport.teleport_branch`.

    ``assumed_subspace`` is the label sum of the tensored N-Bell channel the
    state is believed to be; the inverse of its total correction is applied.
    """
    N = channel.local_dim
    L = channel.sites
    if L < 2 or L % 2:
        raise ValidationError(f"teleportation needs an even number of channel qudits, got L={L}")
    if target.local_dim != N or target.sites != 1:
        raise ValidationError(f"target must be a single qudit of dimension {N}")
    outcomes = tuple(o.check(N) for o in outcomes)
    if len(outcomes) != L // 2:
        raise ValidationError(f"need {L // 2} outcomes for L={L}, got {len(outcomes)}")
    fix = qudit_subspace_correction(N, assumed_subspace, outcomes).inverse()

    branch = tensor(target, channel)
    for k, lab in enumerate(outcomes):
        branch, _ = project(branch, [2 * k + 1, 2 * k + 2], nbell_projector(N, lab))
    probability = branch.norm() ** 2
    if probability < PROBABILITY_FLOOR:
        return TeleportOutcome(outcomes, probability, None, fix, None)
    t = branch.amplitudes.reshape((N * N,) * len(outcomes) + (N,))
    for lab in outcomes:
        t = np.tensordot(nbell_state(N, lab).amplitudes.conj(), t, axes=([0], [0]))
    output = t / np.linalg.norm(t)
    fidelity = float(abs(np.vdot(target.amplitudes, fix.matrix @ output)) ** 2)
    return TeleportOutcome(outcomes, probability, PureState(output, N), fix, fidelity)


def nbell_basis_state(N: int, labels: Sequence[QuditLabel]) -> PureState:
    out = nbell_state(N, labels[0])
    for lab in labels[1:]:
        out = tensor(out, nbell_state(N, lab))
    return out
