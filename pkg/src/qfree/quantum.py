"""Dense state-vector core over composite qudit registers.

Indexing convention: amplitudes are stored in mixed-radix order with the
most significant register first, i.e. basis state (x_0, ..., x_{r-1}) sits
at index ((x_0 * d_1 + x_1) * d_2 + x_2) * ... .
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import InputError

NORM_TOL = 1e-10
PROB_PRUNE = 1e-14


@dataclass(frozen=True)
class Register:
    role: str  # "question" | "answer"
    dimension: int
    copy: int = 0

    def __post_init__(self):
        if self.role not in ("question", "answer"):
            raise InputError(f"bad register role {self.role!r}")
        if self.dimension < 1:
            raise InputError("register dimension must be positive")


@dataclass(frozen=True)
class RegisterLayout:
    registers: tuple[Register, ...]

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(r.dimension for r in self.registers)

    @property
    def total_dimension(self) -> int:
        return math.prod(self.dims)

    def __len__(self) -> int:
        return len(self.registers)


def protocol_layout(question_dim: int, answer_dim: int, k: int) -> RegisterLayout:
    """Q_1 A_1 ... Q_k A_k layout with k copies of a (question, answer) pair."""
    regs = []
    for i in range(k):
        regs.append(Register("question", question_dim, i))
        regs.append(Register("answer", answer_dim, i))
    return RegisterLayout(tuple(regs))


class StateVector:
    """Unit-norm complex amplitude vector over a RegisterLayout."""

    def __init__(self, layout: RegisterLayout, amplitudes: np.ndarray):
        amplitudes = np.asarray(amplitudes, dtype=np.complex128)
        if amplitudes.shape != (layout.total_dimension,):
            raise InputError(
                f"amplitude vector length {amplitudes.shape} does not match "
                f"layout dimension {layout.total_dimension}"
            )
        norm = np.linalg.norm(amplitudes)
        if abs(norm - 1.0) > NORM_TOL:
            raise InputError(f"state norm {norm} is not 1 within {NORM_TOL}")
        self.layout = layout
        self.amplitudes = amplitudes
        self.amplitudes.setflags(write=False)

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape(self.layout.dims)

    def index_of(self, values: tuple[int, ...]) -> int:
        idx = 0
        for v, d in zip(values, self.layout.dims):
            idx = idx * d + v
        return idx

    def amplitude(self, values: tuple[int, ...]) -> complex:
        return complex(self.amplitudes[self.index_of(values)])

    def dump_json(self, threshold: float = PROB_PRUNE) -> str:
        """JSON array of (index, re, im) for amplitudes above threshold."""
        rows = [
            [int(i), float(a.real), float(a.imag)]
            for i, a in enumerate(self.amplitudes)
            if abs(a) > threshold
        ]
        return json.dumps(rows)


@dataclass
class OutcomeDistribution:
    """Map from outcome tuple (one value per measured register) to probability."""

    probabilities: dict[tuple[int, ...], float]

    def __post_init__(self):
        total = sum(self.probabilities.values())
        if any(p < -1e-12 for p in self.probabilities.values()):
            raise InputError("negative probability")
        if abs(total - 1.0) > 1e-9:
            raise InputError(f"probabilities sum to {total}, not 1")

    def prob(self, outcome: tuple[int, ...]) -> float:
        return self.probabilities.get(outcome, 0.0)


def qft_matrix(K: int) -> np.ndarray:
    """The K-point quantum Fourier transform: entry (t, s) = omega^(s*t)/sqrt(K)."""
    if K < 1:
        raise InputError("K must be >= 1")
    t, s = np.meshgrid(np.arange(K), np.arange(K), indexing="ij")
    return np.exp(2j * np.pi * (s * t % K) / K) / np.sqrt(K)


def apply_unitary_to_register(
    state: StateVector, register_index: int, U: np.ndarray
) -> StateVector:
    """Apply U to one tensor factor, leaving the rest untouched."""
    dims = state.layout.dims
    d = dims[register_index]
    U = np.asarray(U, dtype=np.complex128)
    if U.shape != (d, d):
        raise InputError(f"unitary shape {U.shape} does not match register dim {d}")
    left = math.prod(dims[:register_index])
    right = math.prod(dims[register_index + 1 :])
    tensor = state.amplitudes.reshape(left, d, right)
    new = np.einsum("ij,ajb->aib", U, tensor).reshape(-1)
    return StateVector(state.layout, new)


def measure_registers(
    state: StateVector, register_indices: tuple[int, ...]
) -> tuple[OutcomeDistribution, dict[tuple[int, ...], StateVector]]:
    """Standard-basis measurement of the given registers.

    Returns Born-rule outcome probabilities plus renormalized post-measurement
    states; outcomes with probability below PROB_PRUNE are omitted.
    """
    if len(set(register_indices)) != len(register_indices):
        raise InputError("measured register indices must be distinct")
    dims = state.layout.dims
    n = len(dims)
    tensor = state.tensor()
    measured = list(register_indices)
    rest = [i for i in range(n) if i not in register_indices]
    moved = np.transpose(tensor, measured + rest)
    m_shape = tuple(dims[i] for i in measured)
    flat = moved.reshape(math.prod(m_shape) if m_shape else 1, -1)
    probs = np.einsum("ij,ij->i", flat, flat.conj()).real

    distribution: dict[tuple[int, ...], float] = {}
    post_states: dict[tuple[int, ...], StateVector] = {}
    post_layout = RegisterLayout(tuple(state.layout.registers[i] for i in rest))
    for row, p in enumerate(probs):
        if p < PROB_PRUNE:
            continue
        outcome = np.unravel_index(row, m_shape) if m_shape else ()
        outcome = tuple(int(x) for x in outcome)
        distribution[outcome] = float(p)
        post_states[outcome] = StateVector(post_layout, flat[row] / np.sqrt(p))
    return OutcomeDistribution(distribution), post_states


def flat_support_distribution(
    state: StateVector, register_indices: tuple[int, ...]
) -> dict[tuple[int, ...], Fraction] | None:
    """Exact-rational outcome distribution for flat-amplitude states.

    If every nonzero amplitude of the state has the same magnitude (an honest,
    flat-superposition witness), standard-basis probabilities are exact
    rationals; returns None if the state is not flat.
    """
    mags = np.abs(state.amplitudes)
    support = np.flatnonzero(mags > 1e-12)
    if len(support) == 0:
        return None
    ref = mags[support[0]]
    if not np.allclose(mags[support], ref, atol=1e-12):
        return None
    dims = state.layout.dims
    counts: dict[tuple[int, ...], int] = {}
    for idx in support:
        values = np.unravel_index(int(idx), dims)
        outcome = tuple(int(values[i]) for i in register_indices)
        counts[outcome] = counts.get(outcome, 0) + 1
    total = len(support)
    return {o: Fraction(c, total) for o, c in counts.items()}


class ProductAcceptOperator:
    """Bell-measurement acceptance operator.

    One POVM per side (elements labelled by outcome), combined with a Boolean
    function on the outcome pair.  The state it is applied to lives on the
    concatenation of the two sides' layouts.
    """

    def __init__(self, side_a_elements, side_b_elements, accept):
        self.side_a = {k: np.asarray(v, dtype=np.complex128) for k, v in side_a_elements.items()}
        self.side_b = {k: np.asarray(v, dtype=np.complex128) for k, v in side_b_elements.items()}
        self.accept = accept
        self.dim_a = next(iter(self.side_a.values())).shape[0]
        self.dim_b = next(iter(self.side_b.values())).shape[0]
        for elems, dim in ((self.side_a, self.dim_a), (self.side_b, self.dim_b)):
            for m in elems.values():
                if m.shape != (dim, dim):
                    raise InputError("POVM elements on one side must share a dimension")
                if not np.allclose(m, m.conj().T, atol=1e-10):
                    raise InputError("POVM element is not Hermitian")
                eigs = np.linalg.eigvalsh(m)
                if eigs.min() < -1e-9 or eigs.max() > 1 + 1e-9:
                    raise InputError("POVM element eigenvalues must lie in [0, 1]")


def expectation(state: StateVector, op: ProductAcceptOperator) -> float:
    """Acceptance probability <psi| sum_{f(a,b)=1} A_a (x) B_b |psi>, clamped to [0,1]."""
    if state.layout.total_dimension != op.dim_a * op.dim_b:
        raise InputError(
            f"state dimension {state.layout.total_dimension} does not match "
            f"operator dimension {op.dim_a * op.dim_b}"
        )
    X = state.amplitudes.reshape(op.dim_a, op.dim_b)
    value = 0.0
    for a_label, A in op.side_a.items():
        C = X.conj().T @ (A @ X)  # (dim_b, dim_b)
        for b_label, B in op.side_b.items():
            if op.accept(a_label, b_label):
                value += float(np.real(np.sum(C * B.T)))
    if value < -1e-9 or value > 1 + 1e-9:
        raise InputError(f"expectation {value} outside [0, 1] tolerance")
    return min(max(value, 0.0), 1.0)
