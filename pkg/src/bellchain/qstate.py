"""Dense state-vector and operator engine.

States are complex amplitude vectors over a chain of ``sites`` sites of equal
local dimension. Basis index convention: site 1 is the most significant
digit, ``index = sum_i digit_i * d**(sites - i)``, and for qubits digit 0 is
spin up. Sites are numbered from 1 throughout the public API.

Operators are plain ``numpy`` arrays or ``scipy.sparse`` matrices.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence, Union

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from numpy.typing import NDArray

from bellchain.errors import DimensionError, SolverError, ValidationError

Operator = Union[NDArray[np.complex128], sp.spmatrix, sp.sparray]
SeedLike = Union[int, np.random.Generator, np.random.SeedSequence, Sequence[int], None]

MAX_DIM = 2**14
DENSE_EIGH_LIMIT = 2**11

I2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = {"x": SIGMA_X, "y": SIGMA_Y, "z": SIGMA_Z}


def _count_sites(length: int, local_dim: int) -> int:
    if local_dim < 2:
        raise DimensionError(f"local_dim must be >= 2, got {local_dim}")
    sites = round(math.log(length, local_dim)) if length > 1 else 0
    if sites < 1 or local_dim**sites != length:
        raise DimensionError(f"{length} amplitudes is not a power of local_dim={local_dim}")
    return sites


@dataclass(frozen=True, eq=False)
class PureState:
    """Immutable amplitude vector on ``sites`` sites of dimension ``local_dim``.

    Normalisation is not enforced so that projection branches can be carried
    with their weights; use :meth:`normalized` where a unit vector is needed.
    """

    amplitudes: NDArray[np.complex128]
    local_dim: int = 2

    def __post_init__(self) -> None:
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        _count_sites(amps.size, self.local_dim)
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @property
    def sites(self) -> int:
        return _count_sites(self.amplitudes.size, self.local_dim)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> PureState:
        n = self.norm()
        if n == 0.0:
            raise ValidationError("cannot normalise the zero vector")
        return PureState(self.amplitudes / n, self.local_dim)

    def tensor_view(self) -> NDArray[np.complex128]:
        """Amplitudes reshaped to one axis per site."""
        return self.amplitudes.reshape((self.local_dim,) * self.sites)

    def __repr__(self) -> str:
        return f"PureState(sites={self.sites}, local_dim={self.local_dim}, norm={self.norm():.6g})"


@dataclass(frozen=True)
class Eigenpair:
    """Lowest eigenvalue of a Hermitian operator with its (possibly degenerate) eigenspace."""

    energy: float
    states: tuple[PureState, ...]
    residual: float

    @property
    def state(self) -> PureState:
        return self.states[0]

    @property
    def degeneracy(self) -> int:
        return len(self.states)


def basis_index(digits: Sequence[int], local_dim: int = 2) -> int:
    index = 0
    for d in digits:
        if not 0 <= d < local_dim:
            raise ValidationError(f"digit {d} out of range for local_dim={local_dim}")
        index = index * local_dim + int(d)
    return index


def basis_digits(index: int, sites: int, local_dim: int = 2) -> tuple[int, ...]:
    if not 0 <= index < local_dim**sites:
        raise ValidationError(f"index {index} out of range for {sites} sites")
    digits = []
    for _ in range(sites):
        index, d = divmod(index, local_dim)
        digits.append(d)
    return tuple(reversed(digits))


def basis_state(digits: Sequence[int], local_dim: int = 2) -> PureState:
    """Computational basis state; for qubits ``0`` is up and ``1`` is down."""
    amps = np.zeros(local_dim ** len(digits), dtype=complex)
    amps[basis_index(digits, local_dim)] = 1.0
    return PureState(amps, local_dim)


def from_amplitudes(amplitudes: Sequence[complex], local_dim: int = 2, normalize: bool = True) -> PureState:
    state = PureState(np.asarray(amplitudes, dtype=complex), local_dim)
    return state.normalized() if normalize else state


def tensor(a: PureState, b: PureState, *more: PureState) -> PureState:
    """Kronecker product, ``a`` on the most significant sites."""
    out = a
    for nxt in (b, *more):
        if out.local_dim != nxt.local_dim:
            raise DimensionError(f"local_dim mismatch: {out.local_dim} vs {nxt.local_dim}")
        out = PureState(np.kron(out.amplitudes, nxt.amplitudes), out.local_dim)
    return out


def inner(a: PureState, b: PureState) -> complex:
    """``<a|b>``, conjugating ``a``."""
    if a.dim != b.dim:
        raise DimensionError(f"dimension mismatch: {a.dim} vs {b.dim}")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def _check_sites(state: PureState, sites: Sequence[int]) -> list[int]:
    idx = [int(s) - 1 for s in sites]
    if len(set(idx)) != len(idx):
        raise ValidationError(f"repeated site in {list(sites)}")
    for s in idx:
        if not 0 <= s < state.sites:
            raise ValidationError(f"site {s + 1} out of range 1..{state.sites}")
    return idx


def apply_local(state: PureState, sites: Sequence[int], op: NDArray[np.complex128]) -> PureState:
    """Apply ``op`` to the listed sites (listed order = tensor slot order).

    The result is not renormalised.
    """
    idx = _check_sites(state, sites)
    d = state.local_dim
    k = len(idx)
    op = np.asarray(op, dtype=complex)
    if op.shape != (d**k, d**k):
        raise DimensionError(f"operator shape {op.shape} does not act on {k} sites of dim {d}")
    psi = np.moveaxis(state.tensor_view(), idx, range(k))
    rest = psi.shape[k:]
    psi = (op @ psi.reshape(d**k, -1)).reshape((d,) * k + rest)
    psi = np.moveaxis(psi, range(k), idx)
    return PureState(psi.reshape(-1), d)


def project(
    state: PureState, sites: Sequence[int], projector: NDArray[np.complex128], atol: float = 1e-10
) -> tuple[PureState, float]:
    """Apply a local projector and return the unnormalised branch and its probability."""
    projector = np.asarray(projector, dtype=complex)
    if not np.allclose(projector, projector.conj().T, atol=atol):
        raise ValidationError("projector is not Hermitian")
    if not np.allclose(projector @ projector, projector, atol=atol):
        raise ValidationError("projector is not idempotent")
    branch = apply_local(state, sites, projector)
    return branch, branch.norm() ** 2


def expectation(state: PureState, op: Operator) -> complex:
    """``<state|op|state>`` for a dense or sparse operator on the full chain."""
    if op.shape != (state.dim, state.dim):
        raise DimensionError(f"operator shape {op.shape} does not match state dim {state.dim}")
    psi = state.amplitudes
    return complex(np.vdot(psi, op @ psi))


def operator_norm_bound(op: Operator) -> float:
    """Induced 1-norm; an upper bound on the spectral norm."""
    if sp.issparse(op):
        return float(spla.norm(op, 1))
    return float(np.linalg.norm(op, 1))


def is_hermitian(op: Operator, atol: float = 1e-12) -> bool:
    diff = op - op.conj().T
    if sp.issparse(diff):
        return diff.nnz == 0 or float(abs(diff).max()) <= atol
    return bool(np.max(np.abs(diff), initial=0.0) <= atol)


def lowest_eigenpair(H: Operator, tol: float = 1e-9, local_dim: int = 2) -> Eigenpair:
    """Ground energy and an orthonormal basis of the ground space of Hermitian ``H``.

    Eigenvalues within ``tol * ||H||`` of the minimum are returned as one
    degenerate set. Dense ``eigh`` is used up to dimension 2048, Lanczos
    (ARPACK) above.
    """
    dim = H.shape[0]
    if H.shape != (dim, dim):
        raise DimensionError(f"H must be square, got {H.shape}")
    if dim > MAX_DIM:
        raise DimensionError(f"dimension {dim} exceeds cap {MAX_DIM}")
    if not is_hermitian(H):
        raise ValidationError("H is not Hermitian")
    scale = operator_norm_bound(H)
    window = tol * scale

    if dim <= DENSE_EIGH_LIMIT:
        dense = H.toarray() if sp.issparse(H) else np.asarray(H)
        evals, evecs = np.linalg.eigh(dense)
    else:
        k = 8
        while True:
            evals, evecs = spla.eigsh(sp.csr_matrix(H), k=k, which="SA", tol=0)
            order = np.argsort(evals)
            evals, evecs = evals[order], evecs[:, order]
            if evals[-1] - evals[0] > window or k >= 64:
                break
            k *= 2

    ground = evals - evals[0] <= window
    vecs = evecs[:, ground]
    # orthonormalise explicitly; ARPACK vectors from a degenerate cluster may not be
    vecs, _ = np.linalg.qr(vecs)
    residual = 0.0
    for col in vecs.T:
        residual = max(residual, float(np.linalg.norm(H @ col - evals[0] * col)))
    if residual > tol * max(1.0, scale):
        raise SolverError("lowest_eigenpair did not converge", residual)
    states = tuple(PureState(col, local_dim) for col in vecs.T)
    return Eigenpair(float(evals[0]), states, residual)


def random_haar_state(dim: int, seed: SeedLike = None, local_dim: int = 2) -> PureState:
    """Unitarily invariant random state of dimension ``dim``."""
    rng = np.random.default_rng(seed)
    z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return PureState(z / np.linalg.norm(z), local_dim)


def schmidt_coefficients(state: PureState, cut: int) -> NDArray[np.float64]:
    """Schmidt coefficients across the cut after site ``cut`` (1 <= cut < sites)."""
    if not 1 <= cut < state.sites:
        raise ValidationError(f"cut {cut} must lie in 1..{state.sites - 1}")
    d = state.local_dim
    mat = state.normalized().amplitudes.reshape(d**cut, -1)
    return np.linalg.svd(mat, compute_uv=False)


def entanglement_entropy(state: PureState, cut: int) -> float:
    """Von Neumann entropy in bits across a contiguous cut."""
    p = schmidt_coefficients(state, cut) ** 2
    p = p[p > 1e-16]
    return float(-np.sum(p * np.log2(p)))


def reduced_density_matrix(state: PureState, site: int) -> NDArray[np.complex128]:
    """One-site reduced density matrix."""
    (s,) = _check_sites(state, [site])
    psi = np.moveaxis(state.normalized().tensor_view(), s, 0).reshape(state.local_dim, -1)
    return psi @ psi.conj().T


def state_to_dict(state: PureState) -> dict:
    return {
        "sites": state.sites,
        "local_dim": state.local_dim,
        "amplitudes": [[float(a.real), float(a.imag)] for a in state.amplitudes],
    }


def state_from_dict(doc: dict) -> PureState:
    try:
        sites = int(doc["sites"])
        local_dim = int(doc["local_dim"])
        amps = np.array([complex(re, im) for re, im in doc["amplitudes"]], dtype=complex)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed state document: {exc}") from exc
    if amps.size != local_dim**sites:
        raise DimensionError(f"expected {local_dim**sites} amplitudes, found {amps.size}")
    return PureState(amps, local_dim)


def save_state(state: PureState, path: str | Path) -> None:
    # json writes floats with repr(), i.e. 17 significant digits
    Path(path).write_text(json.dumps(state_to_dict(state), indent=1) + "\n")


def load_state(path: str | Path) -> PureState:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: not a state file ({exc})") from exc
    return state_from_dict(doc)
