"""Chained Bell-measurement teleportation, the string-order parameter and sweeps.

Measurement layout for a channel on ``L`` qubits with the target prepended:
pairs ``(target, 1), (2, 3), ..., (L-2, L-1)`` are Bell-measured in that
order and the output appears on chain site ``L``. Chain sites are 1-based;
in the combined ``L + 1`` qubit register the target is site 1.
"""

from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass
from pathlib import Path
from typing import TYPE_CHECKING, Iterable, Literal, NamedTuple, Sequence

import numpy as np
from numpy.typing import NDArray

from bellchain.bell import (
    BELL_LABELS,
    HADAMARD,
    BellLabel,
    LabelVector,
    SignedCorrection,
    SubspaceWeights,
    bell_projector,
    bell_state,
    classify,
    random_subspace_state,
    string_operator,
    subspace_correction,
)
from bellchain.errors import ValidationError
from bellchain.qstate import (
    I2,
    PureState,
    SeedLike,
    apply_local,
    expectation,
    from_amplitudes,
    project,
    random_haar_state,
    tensor,
)

if TYPE_CHECKING:
    from bellchain.qudit import WeylCorrection

PROBABILITY_FLOOR = 1e-12

Sampler = Literal["haar", "biased"]


@dataclass(frozen=True)
class TeleportOutcome:
    """One measurement branch.

    ``output_qubit`` is the normalised state left on the output site before
    correction; it and ``fidelity`` are ``None`` when the branch has
    probability below ``PROBABILITY_FLOOR``.
    """

    outcomes: tuple
    probability: float
    output_qubit: PureState | None
    applied_correction: SignedCorrection | WeylCorrection
    fidelity: float | None

    @property
    def is_null(self) -> bool:
        return self.fidelity is None


@dataclass(frozen=True)
class OParameter:
    """Sum of absolute x, y and z string expectations, with the signed components."""

    value: float
    components: tuple[float, float, float]


@dataclass(frozen=True)
class SweepRecord:
    channel_id: int
    o_value: float
    components: tuple[float, float, float]
    weights: SubspaceWeights
    fidelity_min: float
    fidelity_mean: float
    bound: float
    # smallest branch-averaged fidelity over the target set; not part of the CSV
    worst_target_mean: float


class FidelityProfile(NamedTuple):
    fidelity_min: float
    fidelity_mean: float
    worst_target_mean: float


def _check_channel(channel: PureState) -> int:
    if channel.local_dim != 2:
        raise ValidationError("qubit teleportation needs a qubit channel")
    L = channel.sites
    if L < 2 or L % 2:
        raise ValidationError(f"teleportation needs an even number of channel qubits, got L={L}")
    return L


def _check_target(target: PureState) -> None:
    if target.local_dim != 2 or target.sites != 1:
        raise ValidationError("target must be a single qubit")


def _default_subspace(channel: PureState) -> BellLabel:
    return classify(channel).argmax()


def measurement_pairs(L: int) -> list[tuple[int, int]]:
    """Measured pairs as sites of the combined register (target = site 1)."""
    return [(2 * k + 1, 2 * k + 2) for k in range(L // 2)]


def _extract_output(branch: PureState, outcomes: Sequence[BellLabel]) -> NDArray[np.complex128]:
    # branch = |a_1} (x) ... (x) |a_n} (x) o; strip the Bell factors
    t = branch.amplitudes.reshape((4,) * len(outcomes) + (2,))
    for lab in outcomes:
        t = np.tensordot(bell_state(lab).amplitudes.conj(), t, axes=([0], [0]))
    return t


def _fidelity(target: PureState, fix: NDArray[np.complex128], output: NDArray[np.complex128]) -> float:
    return float(abs(np.vdot(target.amplitudes, fix @ output)) ** 2)


def teleport_branch(
    channel: PureState,
    target: PureState,
    outcomes: Sequence[BellLabel],
    assumed_subspace: BellLabel | None = None,
) -> TeleportOutcome:
    """Force the measurement record ``outcomes`` and evaluate the corrected output.

    Projects each pair in sequence on the full register. ``assumed_subspace``
    defaults to the classification argmax of ``channel``.
    """
    L = _check_channel(channel)
    _check_target(target)
    outcomes = tuple(outcomes)
    if len(outcomes) != L // 2:
        raise ValidationError(f"need {L // 2} outcomes for L={L}, got {len(outcomes)}")
    if assumed_subspace is None:
        assumed_subspace = _default_subspace(channel)
    fix = subspace_correction(assumed_subspace, outcomes).inverse()

    branch = tensor(target, channel)
    for pair, lab in zip(measurement_pairs(L), outcomes):
        branch, _ = project(branch, pair, bell_projector(lab))
    probability = branch.norm() ** 2
    if probability < PROBABILITY_FLOOR:
        return TeleportOutcome(outcomes, probability, None, fix, None)
    output = _extract_output(branch, outcomes)
    output = output / np.linalg.norm(output)
    fidelity = _fidelity(target, fix.matrix, output)
    return TeleportOutcome(outcomes, probability, PureState(output), fix, fidelity)


def teleport_sample(
    channel: PureState,
    target: PureState,
    assumed_subspace: BellLabel | None = None,
    seed: SeedLike = None,
) -> TeleportOutcome:
    """Sample the measurement record pair by pair with the Born rule."""
    L = _check_channel(channel)
    _check_target(target)
    rng = np.random.default_rng(seed)
    state = tensor(target, channel)
    outcomes: list[BellLabel] = []
    probability = 1.0
    for pair in measurement_pairs(L):
        branches = [project(state, pair, bell_projector(lab)) for lab in BELL_LABELS]
        probs = np.array([p for _, p in branches])
        probs = np.clip(probs, 0.0, None)
        k = int(rng.choice(4, p=probs / probs.sum()))
        outcomes.append(BELL_LABELS[k])
        probability *= float(probs[k])
        state = branches[k][0].normalized()
    result = teleport_branch(channel, target, outcomes, assumed_subspace)
    return TeleportOutcome(
        result.outcomes, probability, result.output_qubit, result.applied_correction, result.fidelity
    )


def all_outcomes(n_pairs: int) -> Iterable[LabelVector]:
    """Every measurement record, first pair varying slowest."""
    return itertools.product(BELL_LABELS, repeat=n_pairs)


# vectorised branch enumeration


def transfer_matrices(channel: PureState) -> NDArray[np.complex128]:
    """Linear maps from target to unnormalised output for every branch.

    Shape ``(4,) * n_pairs + (2, 2)``; label axes follow ``BELL_LABELS``.
    """
    L = _check_channel(channel)
    n = L // 2
    bras = np.array([bell_state(lab).amplitudes.conj() for lab in BELL_LABELS])
    psi = channel.amplitudes.reshape((2,) + (4,) * (n - 1) + (2,))
    # first pair: (target, chain 1) -> axes (a_1, t, ...)
    t = np.tensordot(bras.reshape(4, 2, 2), psi, axes=([2], [0]))
    for k in range(n - 1):
        axis = 2 + k
        t = np.moveaxis(np.tensordot(bras, t, axes=([1], [axis])), 0, axis)
    # (a_1, t, a_2..a_n, out) -> (a_1..a_n, out, t)
    t = np.moveaxis(t, 1, -1)
    return t


def correction_matrices(assumed_subspace: BellLabel, n_pairs: int) -> NDArray[np.complex128]:
    """Applied (inverse) correction per branch, shape ``(4,) * n_pairs + (2, 2)``."""
    out = np.empty((4**n_pairs, 2, 2), dtype=complex)
    for i, outcomes in enumerate(all_outcomes(n_pairs)):
        out[i] = subspace_correction(assumed_subspace, outcomes).inverse().matrix
    return out.reshape((4,) * n_pairs + (2, 2))


def branch_table(
    channel: PureState, targets: Sequence[PureState], assumed_subspace: BellLabel | None = None
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Probabilities and fidelities of every branch for every target.

    Both arrays have shape ``(n_targets, 4 ** n_pairs)`` with branches in
    :func:`all_outcomes` order; fidelities of null branches are ``nan``.
    """
    L = _check_channel(channel)
    for t in targets:
        _check_target(t)
    if assumed_subspace is None:
        assumed_subspace = _default_subspace(channel)
    n = L // 2
    M = transfer_matrices(channel).reshape(4**n, 2, 2)
    C = correction_matrices(assumed_subspace, n).reshape(4**n, 2, 2)
    V = np.array([t.amplitudes for t in targets])
    out = np.einsum("bij,tj->tbi", M, V)
    prob = np.sum(np.abs(out) ** 2, axis=-1)
    overlap = np.einsum("ti,bij,tbj->tb", V.conj(), C, out)
    with np.errstate(invalid="ignore", divide="ignore"):
        fid = np.where(prob > PROBABILITY_FLOOR, np.abs(overlap) ** 2 / prob, np.nan)
    return prob, fid


AXIS_TARGETS: tuple[PureState, ...] = tuple(
    from_amplitudes(a)
    for a in ([1, 0], [0, 1], [1, 1], [1, -1], [1, 1j], [1, -1j])
)


def default_targets(seed: SeedLike = None, n_haar: int = 20) -> list[PureState]:
    """The six axis states followed by ``n_haar`` Haar-random qubits."""
    rng = np.random.default_rng(seed)
    return list(AXIS_TARGETS) + [random_haar_state(2, rng) for _ in range(n_haar)]


def channel_fidelity_profile(
    channel: PureState, targets: Sequence[PureState], assumed_subspace: BellLabel | None = None
) -> FidelityProfile:
    """Worst branch fidelity and branch-averaged fidelities over ``targets``.

    ``fidelity_min`` is the minimum over targets and non-null branches;
    ``fidelity_mean`` averages the probability-weighted branch mean over
    targets; ``worst_target_mean`` is the smallest such branch mean.
    """
    prob, fid = branch_table(channel, targets, assumed_subspace)
    per_target = np.nansum(prob * fid, axis=1) / np.sum(prob, axis=1)
    return FidelityProfile(float(np.nanmin(fid)), float(np.mean(per_target)), float(np.min(per_target)))


def o_parameter(channel: PureState) -> OParameter:
    """``sum_a |<(x) sigma^a>|`` over ``a = x, y, z``."""
    L = _check_channel(channel)
    comps = tuple(float(expectation(channel, string_operator(L, a)).real) for a in "xyz")
    return OParameter(float(sum(abs(c) for c in comps)), comps)


def fidelity_bound(o: OParameter | float) -> float:
    """``(O - 1) / 2``; negative values are vacuous and left as they are."""
    value = o.value if isinstance(o, OParameter) else float(o)
    return (value - 1.0) / 2.0


# Bell measurement from an entangling gate and single-qubit projections

CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
CIRCUIT_UNITARY = np.kron(HADAMARD, I2) @ CNOT


def circuit_outcome_digits(label: BellLabel) -> tuple[int, int]:
    """Computational outcome the circuit maps ``bell_state(label)`` to."""
    image = CIRCUIT_UNITARY @ bell_state(label).amplitudes
    k = int(np.argmax(np.abs(image)))
    return divmod(k, 2)


def bell_measure_via_circuit(
    state: PureState, pair: tuple[int, int], outcome: BellLabel
) -> tuple[PureState, float]:
    """Bell projection realised as ``U^dag P_2 P_1 U`` with one-site projectors."""
    j1, j2 = circuit_outcome_digits(outcome)
    branch = apply_local(state, pair, CIRCUIT_UNITARY)
    branch, _ = project(branch, [pair[0]], np.diag([1.0 - j1, float(j1)]).astype(complex))
    branch, _ = project(branch, [pair[1]], np.diag([1.0 - j2, float(j2)]).astype(complex))
    branch = apply_local(branch, pair, CIRCUIT_UNITARY.conj().T)
    return branch, branch.norm() ** 2


# fidelity vs O sweeps


def sample_channel(L: int, sampler: Sampler, seed: SeedLike = None) -> PureState:
    """Draw a channel; ``biased`` mixes a Haar state with an in-subspace state.

    ``biased``: ``t ~ U[0, 1]``, a uniformly chosen subspace, and
    ``sqrt(1 - t) psi_haar + sqrt(t) psi_sub`` renormalised.
    """
    rng = np.random.default_rng(seed)
    if sampler == "haar":
        return random_haar_state(2**L, rng)
    if sampler != "biased":
        raise ValidationError(f"unknown sampler {sampler!r}")
    t = rng.uniform()
    label = BELL_LABELS[int(rng.integers(4))]
    haar = random_haar_state(2**L, rng).amplitudes
    sub = random_subspace_state(L, label, rng).amplitudes
    return PureState(np.sqrt(1 - t) * haar + np.sqrt(t) * sub).normalized()


def sweep_channel(channel_id: int, L: int, seed: int, sampler: Sampler, n_haar_targets: int = 20) -> SweepRecord:
    """One sweep record; the random stream is derived from ``(seed, channel_id)``."""
    rng = np.random.default_rng([seed, channel_id])
    channel = sample_channel(L, sampler, rng)
    targets = default_targets(rng, n_haar_targets)
    o = o_parameter(channel)
    weights = classify(channel)
    profile = channel_fidelity_profile(channel, targets, weights.argmax())
    return SweepRecord(
        channel_id=channel_id,
        o_value=o.value,
        components=o.components,
        weights=weights,
        fidelity_min=profile.fidelity_min,
        fidelity_mean=profile.fidelity_mean,
        bound=fidelity_bound(o),
        worst_target_mean=profile.worst_target_mean,
    )


def sweep_experiment(
    n_channels: int, L: int, seed: int = 0, sampler: Sampler = "biased", n_haar_targets: int = 20
) -> list[SweepRecord]:
    """Sample ``n_channels`` channels and profile each one, ordered by id."""
    if L < 2 or L % 2:
        raise ValidationError(f"sweep needs an even number of qubits, got L={L}")
    if n_channels < 0:
        raise ValidationError(f"n_channels must be >= 0, got {n_channels}")
    if seed < 0:
        raise ValidationError(f"seed must be non-negative, got {seed}")
    return [sweep_channel(i, L, seed, sampler, n_haar_targets) for i in range(n_channels)]


CSV_COLUMNS = ("channel_id", "O", "Sx", "Sy", "Sz", "w_mm", "w_mp", "w_pm", "w_pp", "F_min", "F_mean", "bound")


def _fmt(x: float) -> str:
    return f"{x:.16e}"


def write_sweep_csv(records: Sequence[SweepRecord], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for r in sorted(records, key=lambda r: r.channel_id):
            w = r.weights.to_dict()
            writer.writerow(
                [r.channel_id, _fmt(r.o_value), *map(_fmt, r.components)]
                + [_fmt(w[k]) for k in ("--", "-+", "+-", "++")]
                + [_fmt(r.fidelity_min), _fmt(r.fidelity_mean), _fmt(r.bound)]
            )


def read_sweep_csv(path: str | Path) -> list[dict[str, float]]:
    """Rows as dicts keyed by the CSV column names."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
            raise ValidationError(f"{path}: unexpected header {reader.fieldnames}")
        return [
            {k: (int(v) if k == "channel_id" else float(v)) for k, v in row.items()} for row in reader
        ]
