import math

import numpy as np

from qfree.quantum import StateVector, protocol_layout, qft_matrix


def basis(dim: int, i: int) -> np.ndarray:
    v = np.zeros(dim, dtype=np.complex128)
    v[i] = 1.0
    return v


def generic_honest_state(Q, K_prime, k, answer=None, weights=None) -> StateVector:
    """Per-copy sum_q w_q |q>|a(q)>, tensored k times."""
    if answer is None:
        answer = lambda q: q % K_prime
    w = np.ones(Q) if weights is None else np.asarray(weights, dtype=float)
    w = w / np.linalg.norm(w)
    per = np.zeros(Q * K_prime, dtype=np.complex128)
    for q in range(Q):
        per[q * K_prime + answer(q)] = w[q]
    amp = per
    for _ in range(k - 1):
        amp = np.kron(amp, per)
    return StateVector(protocol_layout(Q, K_prime, k), amp)


def certainty_state(Q, K_prime, k, T, junk_questions, junk_answers) -> StateVector:
    """A state passing the uniformity test with certainty.

    Copies in T carry uniform question superpositions with the Fourier-zero
    answer state; the rest carry basis questions with answer F^dag|r>, r != 0,
    so they deterministically land outside Z and stay unmeasured.
    """
    F = qft_matrix(K_prime)
    amp = np.ones(1, dtype=np.complex128)
    for i in range(k):
        if i in T:
            vq = np.full(Q, 1 / math.sqrt(Q), dtype=np.complex128)
            va = F.conj().T[:, 0]
        else:
            assert junk_answers[i] != 0
            vq = basis(Q, junk_questions[i])
            va = F.conj().T[:, junk_answers[i]]
        amp = np.kron(amp, np.kron(vq, va))
    return StateVector(protocol_layout(Q, K_prime, k), amp)
