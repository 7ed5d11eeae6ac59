"""The two-witness free-game protocol: honest witnesses, the uniformity and
consistency tests (exact acceptance probabilities by enumeration), and a
small library of cheating witness families.

Register layouts follow the protocol: Alice's witness lives on k copies of
(question dim m, answer dim K^2), Bob's on k copies of (question dim n,
answer dim K).  Alice answers encode ordered endpoint color pairs
(c1, c2) -> (c1-1)*K + (c2-1) with endpoints in (min, max) vertex order.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .csp import Coloring, KcolInstance
from .errors import InputError
from .quantum import (
    PROB_PRUNE,
    RegisterLayout,
    StateVector,
    measure_registers,
    protocol_layout,
    qft_matrix,
)


@dataclass(frozen=True)
class ProtocolParams:
    k: int
    eta: float
    instance: KcolInstance

    def __post_init__(self):
        if self.k < 1:
            raise InputError("k must be >= 1")
        if not 0 < self.eta < 1:
            raise InputError("eta must lie in (0, 1)")
        if self.instance.num_edges == 0:
            raise InputError("instance has no edges; protocol needs m >= 1")

    @property
    def m(self) -> int:
        return self.instance.num_edges

    @property
    def n(self) -> int:
        return self.instance.num_vertices

    @property
    def K(self) -> int:
        return self.instance.K

    def alice_layout(self) -> RegisterLayout:
        return protocol_layout(self.m, self.K**2, self.k)

    def bob_layout(self) -> RegisterLayout:
        return protocol_layout(self.n, self.K, self.k)


@dataclass(frozen=True)
class WitnessPair:
    psi1: StateVector
    psi2: StateVector


def encode_alice_answer(K: int, c1: int, c2: int) -> int:
    return (c1 - 1) * K + (c2 - 1)


def decode_alice_answer(K: int, a: int) -> tuple[int, int]:
    return a // K + 1, a % K + 1


def _per_copy_state(question_dim, answer_dim, weights, answer_of) -> np.ndarray:
    amp = np.zeros(question_dim * answer_dim, dtype=np.complex128)
    for q in range(question_dim):
        amp[q * answer_dim + answer_of(q)] = weights[q]
    norm = np.linalg.norm(amp)
    if norm < 1e-12:
        raise InputError("weight vector is not normalizable")
    return amp / norm


def _tensor_power(amp: np.ndarray, k: int) -> np.ndarray:
    out = amp
    for _ in range(k - 1):
        out = np.kron(out, amp)
    return out


def honest_witnesses(params: ProtocolParams, coloring: Coloring) -> WitnessPair:
    """Flat-amplitude witnesses induced by a coloring (proper or not)."""
    inst = params.instance
    for v in range(inst.num_vertices):
        if v not in coloring:
            raise InputError(f"coloring not total: vertex {v} missing")

    def alice_answer(e: int) -> int:
        v1, v2 = inst.edges[e]
        return encode_alice_answer(inst.K, coloring[v1], coloring[v2])

    amp1 = _per_copy_state(params.m, inst.K**2, np.ones(params.m), alice_answer)
    amp2 = _per_copy_state(
        params.n, inst.K, np.ones(params.n), lambda v: coloring[v] - 1
    )
    return WitnessPair(
        StateVector(params.alice_layout(), _tensor_power(amp1, params.k)),
        StateVector(params.bob_layout(), _tensor_power(amp2, params.k)),
    )


def _threshold_passes(z: int, k: int, K_prime: int, eta: float) -> bool:
    # Reject iff |Z|/k < (1-eta)/K'; compared exactly over rationals.
    return Fraction(z, k) >= (1 - Fraction(eta)) / K_prime


def uniformity_test_accept_prob(
    state: StateVector, K_prime: int, Q: int, k: int, eta: float
) -> float:
    """Exact acceptance probability of the uniformity test.

    Enumerates Fourier-basis outcomes of all answer registers; for outcomes
    meeting the zero-count threshold, computes the probability that every
    question register indexed by a zero answer outcome also Fourier-measures
    to zero (the remaining question registers are left unmeasured).
    """
    dims = state.layout.dims
    if dims != tuple([Q, K_prime] * k):
        raise InputError(f"layout {dims} is not (Q={Q}, K'={K_prime})^{k}")
    tensor = state.tensor()
    F = qft_matrix(K_prime)
    # Apply F to every answer axis (odd positions).
    for axis in range(1, 2 * k, 2):
        tensor = np.moveaxis(
            np.tensordot(F, tensor, axes=([1], [axis])), 0, axis
        )
    # Group: answer axes to the front.
    order = list(range(1, 2 * k, 2)) + list(range(0, 2 * k, 2))
    grouped = np.transpose(tensor, order).reshape(K_prime**k, Q**k)
    uniform = np.full(Q, 1 / math.sqrt(Q))
    accept = 0.0
    for row, r in enumerate(itertools.product(range(K_prime), repeat=k)):
        branch = grouped[row]
        if float(np.vdot(branch, branch).real) < PROB_PRUNE:
            continue
        z_set = [i for i in range(k) if r[i] == 0]
        if not _threshold_passes(len(z_set), k, K_prime, eta):
            continue
        sub = branch.reshape((Q,) * k)
        # Contract each zero-indexed question axis with the Fourier-0 row.
        for shift, axis in enumerate(z_set):
            sub = np.tensordot(uniform, sub, axes=([0], [axis - shift]))
        accept += float(np.vdot(sub, sub).real)
    return min(max(accept, 0.0), 1.0)


def consistency_outcome_accepts(
    inst: KcolInstance,
    alice_outcome: tuple[int, ...],
    bob_outcome: tuple[int, ...],
) -> bool:
    """The standard-basis check: decode questions/answers and test every
    (edge, vertex) incidence for color agreement and the edge relation."""
    k = len(alice_outcome) // 2
    ell = len(bob_outcome) // 2
    alice = []
    for i in range(k):
        e = alice_outcome[2 * i]
        c1, c2 = decode_alice_answer(inst.K, alice_outcome[2 * i + 1])
        alice.append((e, c1, c2))
    bob = [(bob_outcome[2 * j], bob_outcome[2 * j + 1] + 1) for j in range(ell)]
    for e, c1, c2 in alice:
        v1, v2 = inst.edges[e]
        for v, c in bob:
            if v == v1:
                if c != c1 or not inst.edge_allows(e, c1, c2):
                    return False
            elif v == v2:
                if c != c2 or not inst.edge_allows(e, c1, c2):
                    return False
    return True


def consistency_test_accept_prob(pair: WitnessPair, params: ProtocolParams) -> float:
    """Exact acceptance probability of the consistency test by outcome enumeration."""
    inst = params.instance
    if pair.psi1.layout.dims != params.alice_layout().dims:
        raise InputError("psi1 layout does not match protocol parameters")
    if pair.psi2.layout.dims != params.bob_layout().dims:
        raise InputError("psi2 layout does not match protocol parameters")
    dist1, _ = measure_registers(pair.psi1, tuple(range(2 * params.k)))
    dist2, _ = measure_registers(pair.psi2, tuple(range(2 * params.k)))
    total = 0.0
    for o1, p1 in dist1.probabilities.items():
        for o2, p2 in dist2.probabilities.items():
            if consistency_outcome_accepts(inst, o1, o2):
                total += p1 * p2
    return min(max(total, 0.0), 1.0)


def protocol_accept_prob(pair: WitnessPair, params: ProtocolParams) -> float:
    """Fair coin: heads runs both uniformity tests (AND), tails the consistency test."""
    u1 = uniformity_test_accept_prob(
        pair.psi1, params.K**2, params.m, params.k, params.eta
    )
    u2 = uniformity_test_accept_prob(
        pair.psi2, params.K, params.n, params.k, params.eta
    )
    cons = consistency_test_accept_prob(pair, params)
    return 0.5 * u1 * u2 + 0.5 * cons


def uniformity_accept_operator(
    K_prime: int, Q: int, k: int, eta: float
) -> np.ndarray:
    """Dense acceptance operator of the uniformity test on (Q, K')^k.

    Used for Bell-measurement structure cross-checks at small dimensions.
    """
    F = qft_matrix(K_prime)
    FQ = qft_matrix(Q)
    unif_proj = np.outer(FQ.conj().T[:, 0], FQ[0])  # F_Q^dag |0><0| F_Q
    eye_q = np.eye(Q)
    dim = (Q * K_prime) ** k
    op = np.zeros((dim, dim), dtype=np.complex128)
    for r in itertools.product(range(K_prime), repeat=k):
        z = sum(1 for x in r if x == 0)
        if not _threshold_passes(z, k, K_prime, eta):
            continue
        term = np.ones((1, 1), dtype=np.complex128)
        for ri in r:
            answer_proj = np.outer(F.conj().T[:, ri], F[ri])
            question_part = unif_proj if ri == 0 else eye_q
            term = np.kron(term, np.kron(question_part, answer_proj))
        op += term
    return op


@dataclass(frozen=True)
class AdversarySpec:
    """Parameterized cheating families for soundness experiments.

    kinds:
      honest                      -- requires coloring
      biased-amplitudes           -- requires coloring; optional per-question
                                     weight vectors for either side
      cheating-coloring           -- per-question answers, possibly inconsistent
      entangled-copies            -- joint amplitude table over Alice question
                                     tuples (answers still follow coloring)
      custom                      -- explicit state pair
    """

    kind: str
    coloring: Coloring | None = None
    weights1: tuple[float, ...] | None = None
    weights2: tuple[float, ...] | None = None
    alice_answers: dict[int, tuple[int, int]] | None = None
    bob_answers: dict[int, int] | None = None
    joint_amplitudes: np.ndarray | None = None
    custom_pair: WitnessPair | None = None


def build_witnesses(spec: AdversarySpec, params: ProtocolParams) -> WitnessPair:
    inst = params.instance
    if spec.kind == "honest":
        return honest_witnesses(params, spec.coloring)
    if spec.kind == "biased-amplitudes":
        coloring = spec.coloring
        w1 = np.asarray(
            spec.weights1 if spec.weights1 is not None else np.ones(params.m),
            dtype=float,
        )
        w2 = np.asarray(
            spec.weights2 if spec.weights2 is not None else np.ones(params.n),
            dtype=float,
        )
        if len(w1) != params.m or len(w2) != params.n:
            raise InputError("weight vector lengths must be m and n")

        def alice_answer(e: int) -> int:
            v1, v2 = inst.edges[e]
            return encode_alice_answer(inst.K, coloring[v1], coloring[v2])

        amp1 = _per_copy_state(params.m, inst.K**2, w1, alice_answer)
        amp2 = _per_copy_state(params.n, inst.K, w2, lambda v: coloring[v] - 1)
        return WitnessPair(
            StateVector(params.alice_layout(), _tensor_power(amp1, params.k)),
            StateVector(params.bob_layout(), _tensor_power(amp2, params.k)),
        )
    if spec.kind == "cheating-coloring":
        def alice_answer(e: int) -> int:
            c1, c2 = spec.alice_answers[e]
            return encode_alice_answer(inst.K, c1, c2)

        amp1 = _per_copy_state(params.m, inst.K**2, np.ones(params.m), alice_answer)
        amp2 = _per_copy_state(
            params.n, inst.K, np.ones(params.n), lambda v: spec.bob_answers[v] - 1
        )
        return WitnessPair(
            StateVector(params.alice_layout(), _tensor_power(amp1, params.k)),
            StateVector(params.bob_layout(), _tensor_power(amp2, params.k)),
        )
    if spec.kind == "entangled-copies":
        coloring = spec.coloring
        table = np.asarray(spec.joint_amplitudes, dtype=np.complex128)
        if table.shape != (params.m,) * params.k:
            raise InputError(f"joint amplitude table must have shape (m,)^k")
        norm = np.linalg.norm(table)
        if norm < 1e-12:
            raise InputError("joint amplitude table is not normalizable")
        table = table / norm
        K2 = inst.K**2
        amp1 = np.zeros(params.alice_layout().total_dimension, dtype=np.complex128)
        for q_tuple in itertools.product(range(params.m), repeat=params.k):
            idx = 0
            for q in q_tuple:
                v1, v2 = inst.edges[q]
                a = encode_alice_answer(inst.K, coloring[v1], coloring[v2])
                idx = (idx * params.m + q) * K2 + a
            amp1[idx] = table[q_tuple]
        amp2_copy = _per_copy_state(
            params.n, inst.K, np.ones(params.n), lambda v: coloring[v] - 1
        )
        return WitnessPair(
            StateVector(params.alice_layout(), amp1),
            StateVector(params.bob_layout(), _tensor_power(amp2_copy, params.k)),
        )
    if spec.kind == "custom":
        return spec.custom_pair
    raise InputError(f"unknown adversary kind {spec.kind!r}")
