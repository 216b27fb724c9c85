"""Dense statevector simulation at desk scale.

States are numpy complex128 vectors indexed so that bit q of the basis
index is the state of qubit q.  All stochastic entry points take an
explicit numpy Generator (see rng.make_rng).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    CapacityError,
    DimensionError,
    NonCommutingGroupError,
    ValidationError,
)
from .pauli import PauliString, PauliSum, commutes

__all__ = [
    "StateVector",
    "MeasurementRecord",
    "apply_pauli_string",
    "apply_pauli_exponential",
    "expectation_and_variance",
    "exact_eigensystem",
    "ground_state",
    "sample_group",
    "evolve_schedule",
]

_NORM_ATOL = 1e-8


class StateVector:
    """Normalized pure state on n qubits."""

    __slots__ = ("n_qubits", "amplitudes")

    def __init__(self, amplitudes: np.ndarray, copy: bool = True):
        amps = np.array(amplitudes, dtype=complex, copy=copy).ravel()
        n = int(amps.size).bit_length() - 1
        if amps.size != (1 << n) or amps.size < 2:
            raise ValidationError(f"amplitude count {amps.size} is not a power of two")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > _NORM_ATOL:
            raise ValidationError(f"state norm {norm} is not 1")
        self.n_qubits = n
        self.amplitudes = amps

    @classmethod
    def basis(cls, n_qubits: int, index: int) -> "StateVector":
        if not 0 <= index < (1 << n_qubits):
            raise ValidationError(f"basis index {index} out of range")
        amps = np.zeros(1 << n_qubits, dtype=complex)
        amps[index] = 1.0
        return cls(amps, copy=False)

    @classmethod
    def from_label(cls, label: str) -> "StateVector":
        """Basis state from a ket label, leftmost symbol = highest qubit."""
        if not label or any(c not in "01" for c in label):
            raise ValidationError(f"bad basis label {label!r}")
        return cls.basis(len(label), int(label, 2))

    def copy(self) -> "StateVector":
        return StateVector(self.amplitudes, copy=True)

    def overlap(self, other: "StateVector") -> complex:
        if self.n_qubits != other.n_qubits:
            raise DimensionError("states act on different qubit counts")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def fidelity(self, other: "StateVector") -> float:
        return abs(self.overlap(other)) ** 2

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def __repr__(self) -> str:
        return f"StateVector(n_qubits={self.n_qubits})"


@dataclass(frozen=True)
class MeasurementRecord:
    """Outcomes of one sequential projective measurement of a commuting group."""

    strings: tuple[PauliString, ...]
    outcomes: tuple[int, ...]
    post_state: "StateVector"


def _apply_string(amps: np.ndarray, s: PauliString) -> np.ndarray:
    """P|psi> for unit-coefficient P, via index arithmetic."""
    idx = np.arange(amps.size, dtype=np.uint64)
    src = idx ^ np.uint64(s.x_mask)
    out = amps[src]
    if s.z_mask:
        signs = 1.0 - 2.0 * (np.bitwise_count(src & np.uint64(s.z_mask)) & 1)
        out = out * signs
    k = (s.x_mask & s.z_mask).bit_count() % 4
    phase = (1.0 + 0j, 1j, -1.0 + 0j, -1j)[k]
    if phase != 1.0:
        out = out * phase
    return out


def apply_pauli_string(state: StateVector, s: PauliString) -> StateVector:
    if s.n_qubits != state.n_qubits:
        raise DimensionError("string and state qubit counts differ")
    out = StateVector.__new__(StateVector)
    out.n_qubits = state.n_qubits
    out.amplitudes = _apply_string(state.amplitudes, s)
    return out


def apply_pauli_exponential(state: StateVector, s: PauliString, theta: float) -> StateVector:
    """exp(i theta P)|psi>, exact: P^2 = I gives cos + i sin P."""
    if s.n_qubits != state.n_qubits:
        raise DimensionError("string and state qubit counts differ")
    theta = float(theta)
    amps = np.cos(theta) * state.amplitudes + 1j * np.sin(theta) * _apply_string(
        state.amplitudes, s
    )
    out = StateVector.__new__(StateVector)
    out.n_qubits = state.n_qubits
    out.amplitudes = amps
    return out


def _apply_sum(amps: np.ndarray, h: PauliSum) -> np.ndarray:
    out = np.zeros_like(amps)
    for t in h.terms:
        out += t.coeff * _apply_string(amps, t.string)
    return out


def expectation_and_variance(state: StateVector, h: PauliSum) -> tuple[float, float]:
    """Exact (<H>, <H^2> - <H>^2) for a Hermitian sum."""
    if h.n_qubits != state.n_qubits:
        raise DimensionError("operator and state qubit counts differ")
    if not h.is_hermitian():
        raise ValidationError("expectation requires a Hermitian sum")
    phi = _apply_sum(state.amplitudes, h)
    mean_c = complex(np.vdot(state.amplitudes, phi))
    if abs(mean_c.imag) > 1e-9 * max(1.0, abs(mean_c)):
        raise ValidationError(f"non-real expectation {mean_c}")
    second = float(np.real(np.vdot(phi, phi)))
    mean = mean_c.real
    return mean, max(0.0, second - mean * mean)


def exact_eigensystem(h: PauliSum, max_qubits: int = 12) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and eigenvector columns of a Hermitian sum."""
    if h.n_qubits > max_qubits:
        raise CapacityError(f"{h.n_qubits} qubits exceeds dense limit {max_qubits}")
    if not h.is_hermitian():
        raise ValidationError("eigensystem requires a Hermitian sum")
    m = h.to_matrix(max_qubits)
    vals, vecs = np.linalg.eigh(m)
    resid = np.max(np.abs(m @ vecs - vecs * vals))
    scale = max(1.0, float(np.max(np.abs(vals)))) if vals.size else 1.0
    if resid > 1e-9 * scale:
        raise ValidationError(f"eigensystem residual {resid} too large")
    return vals.real, vecs


def ground_state(h: PauliSum, max_qubits: int = 12) -> tuple[float, StateVector]:
    vals, vecs = exact_eigensystem(h, max_qubits)
    return float(vals[0]), StateVector(vecs[:, 0], copy=True)


def sample_group(
    state: StateVector,
    strings: list[PauliString] | tuple[PauliString, ...],
    rng: np.random.Generator,
) -> MeasurementRecord:
    """Measure a commuting group once, in order, with projective updates.

    One uniform variate is consumed per string, including deterministic
    outcomes, so seeded streams stay aligned across runs.
    """
    strings = tuple(strings)
    if not strings:
        raise ValidationError("empty measurement group")
    for s in strings:
        if s.n_qubits != state.n_qubits:
            raise DimensionError("group string and state qubit counts differ")
    for i in range(len(strings)):
        for j in range(i + 1, len(strings)):
            if not commutes(strings[i], strings[j]):
                raise NonCommutingGroupError(
                    f"{strings[i].letters} and {strings[j].letters} do not commute"
                )
    amps = state.amplitudes.copy()
    outcomes = []
    for s in strings:
        applied = _apply_string(amps, s)
        p_plus = 0.5 * (1.0 + float(np.real(np.vdot(amps, applied))))
        p_plus = min(1.0, max(0.0, p_plus))
        u = rng.random()
        o = 1 if u < p_plus else -1
        outcomes.append(o)
        amps = 0.5 * (amps + o * applied)
        p_o = p_plus if o == 1 else 1.0 - p_plus
        amps /= np.sqrt(max(p_o, 1e-300))
    post = StateVector.__new__(StateVector)
    post.n_qubits = state.n_qubits
    post.amplitudes = amps
    return MeasurementRecord(strings=strings, outcomes=tuple(outcomes), post_state=post)


def evolve_schedule(
    s0: StateVector,
    sched,
    h_i: PauliSum,
    h_p: PauliSum,
    tau: float,
    steps: int,
    callback=None,
) -> StateVector:
    """Integrate i d|psi>/dt = H(t)|psi>, H(t) = (1-g(t)) H_i + g(t) H_p.

    Piecewise-constant midpoint rule with exact per-step exponentials via
    eigendecomposition; global error is O((tau/steps)^2).  `callback(t, state)`,
    if given, is invoked after every step.
    """
    if tau <= 0:
        raise ValidationError("tau must be positive")
    if steps < 1:
        raise ValidationError("steps must be >= 1")
    if h_i.n_qubits != h_p.n_qubits or h_i.n_qubits != s0.n_qubits:
        raise DimensionError("Hamiltonians and state must share a qubit count")
    mi = h_i.to_matrix()
    mp = h_p.to_matrix()
    if not (h_i.is_hermitian() and h_p.is_hermitian()):
        raise ValidationError("evolution requires Hermitian Hamiltonians")
    dt = tau / steps
    t_mid = (np.arange(steps) + 0.5) * dt
    g = np.asarray(sched.evaluate(t_mid), dtype=float)
    if g.shape != t_mid.shape:
        g = np.array([float(sched.evaluate(t)) for t in t_mid])
    hams = (1.0 - g)[:, None, None] * mi + g[:, None, None] * mp
    w, v = np.linalg.eigh(hams)
    amps = s0.amplitudes.copy()
    for k in range(steps):
        vk = v[k]
        amps = vk @ (np.exp(-1j * w[k] * dt) * (vk.conj().T @ amps))
        if callback is not None:
            snap = StateVector.__new__(StateVector)
            snap.n_qubits = s0.n_qubits
            snap.amplitudes = amps.copy()
            callback((k + 1) * dt, snap)
    out = StateVector.__new__(StateVector)
    out.n_qubits = s0.n_qubits
    out.amplitudes = amps
    return out
