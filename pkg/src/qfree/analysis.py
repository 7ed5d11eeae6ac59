"""Optimization oracles: exact total-variation distance to the
uniform-on-T-times-junk mixture family (a linear program), and an alternating
seesaw maximization of tr(M rho) over product states.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import CapExceededError, InputError, InternalInvariantError
from .games import MixtureTerm
from .lp import solve_lp

DEFAULT_LP_CAP = 200_000  # rows * columns
_EXACT_DENOM_LIMIT = 10**12


@dataclass
class MixtureDecomposition:
    terms: list[MixtureTerm]
    distance: Fraction

    def total_weight(self) -> Fraction:
        return sum((t.weight for t in self.terms), Fraction(0))


def _admissible_subsets(k: int, t_min: int):
    for size in range(t_min, k + 1):
        yield from itertools.combinations(range(k), size)


def tv_to_mixture_family(
    mu: dict[tuple[int, ...], Fraction | float],
    Q: int,
    k: int,
    t_min: int,
    cap: int = DEFAULT_LP_CAP,
) -> tuple[float, MixtureDecomposition]:
    """Minimum TV distance from mu (a distribution over [Q]^k tuples) to the
    family sum_T p(T) uniform_T (x) junk_{T-bar} with |T| >= t_min.

    Formulated as an LP: one scaled sub-distribution variable block per
    admissible T, absolute-value slacks per atom, objective half the slack
    sum.  Rational inputs are solved by the exact simplex; otherwise a
    double-precision solver is used.
    """
    if not 0 <= t_min <= k:
        raise InputError(f"t_min = {t_min} must lie in [0, {k}]")
    atoms = list(itertools.product(range(Q), repeat=k))
    subsets = list(_admissible_subsets(k, t_min))
    blocks = []  # (T, complement, junk atoms, column offset)
    offset = 0
    for T in subsets:
        comp = tuple(i for i in range(k) if i not in T)
        junk_atoms = list(itertools.product(range(Q), repeat=len(comp)))
        blocks.append((T, comp, junk_atoms, offset))
        offset += len(junk_atoms)
    n_w = offset
    n_vars = n_w + 2 * len(atoms)
    n_rows = len(atoms) + 1
    if n_vars * n_rows > cap:
        raise CapExceededError(
            f"LP size {n_rows}x{n_vars} exceeds cap {cap} cells"
        )

    mu_full = {a: mu.get(a, 0) for a in atoms}
    # Rational inputs go to the exact simplex; float inputs to the double solver.
    exact = all(isinstance(v, (Fraction, int)) for v in mu_full.values())

    A = [[Fraction(0)] * n_vars for _ in range(n_rows)]
    b = []
    unif = Fraction(1, Q)
    atom_index = {a: i for i, a in enumerate(atoms)}
    for T, comp, junk_atoms, off in blocks:
        coeff = unif ** len(T)
        junk_index = {j: off + idx for idx, j in enumerate(junk_atoms)}
        for a, i in atom_index.items():
            j = tuple(a[c] for c in comp)
            A[i][junk_index[j]] += coeff
    for i, a in enumerate(atoms):
        A[i][n_w + 2 * i] = Fraction(1)  # s_plus
        A[i][n_w + 2 * i + 1] = Fraction(-1)  # s_minus
        b.append(Fraction(mu_full[a]) if exact else float(mu_full[a]))
    # Total mixture mass is 1.
    for j in range(n_w):
        A[-1][j] = Fraction(1)
    b.append(Fraction(1))
    c = [Fraction(0)] * n_w + [Fraction(1, 2)] * (2 * len(atoms))

    if exact:
        opt, x = solve_lp(A, b, c)
        distance = Fraction(opt)
        values = x
    else:
        from scipy.optimize import linprog

        res = linprog(
            [float(v) for v in c],
            A_eq=np.array([[float(v) for v in row] for row in A]),
            b_eq=np.array([float(v) for v in b]),
            bounds=(0, None),
            method="highs",
        )
        if not res.success:
            raise InternalInvariantError(f"LP solver failed: {res.message}")
        distance = Fraction(float(res.fun)).limit_denominator(10**12)
        values = [Fraction(float(v)).limit_denominator(10**12) for v in res.x]

    terms = []
    for T, comp, junk_atoms, off in blocks:
        weight = sum(values[off + idx] for idx in range(len(junk_atoms)))
        if weight == 0:
            continue
        junk = {
            j: values[off + idx] / weight
            for idx, j in enumerate(junk_atoms)
            if values[off + idx] != 0
        }
        terms.append(MixtureTerm(T, weight, junk))
    return float(distance), MixtureDecomposition(terms, distance)


@dataclass
class SepOptimizationResult:
    value: float
    witness_a: np.ndarray
    witness_b: np.ndarray
    iterations: int
    converged: bool


def _conditional_operator(M4, vec, side: str) -> np.ndarray:
    if side == "a":  # contract the B indices with vec
        return np.einsum("j,ijkl,l->ik", vec.conj(), M4, vec)
    return np.einsum("i,ijkl,k->jl", vec.conj(), M4, vec)


def hsep_seesaw(
    M: np.ndarray,
    dims: tuple[int, int],
    restarts: int = 32,
    max_iters: int = 500,
    seed: int = 0,
    tol: float = 1e-12,
) -> SepOptimizationResult:
    """Alternating maximization of <a|<b| M |a>|b> over product pure states.

    Each half-step sets one side to the top eigenvector of the operator
    conditioned on the other side, so the objective is monotone
    non-decreasing (checked every step).  Heuristic lower bound on the
    separable value; best over deterministic seeded restarts is returned.
    """
    dA, dB = dims
    M = np.asarray(M, dtype=np.complex128)
    if M.shape != (dA * dB, dA * dB):
        raise InputError(f"operator shape {M.shape} does not match dims {dims}")
    if not np.allclose(M, M.conj().T, atol=1e-10):
        raise InputError("operator must be Hermitian")
    M4 = M.reshape(dA, dB, dA, dB)

    best = None
    for r in range(restarts):
        rng = np.random.default_rng((seed, r))
        vb = rng.normal(size=dB) + 1j * rng.normal(size=dB)
        vb /= np.linalg.norm(vb)
        objective = -math.inf
        va = None
        converged = False
        iters = 0
        for iters in range(1, max_iters + 1):
            Ma = _conditional_operator(M4, vb, "a")
            vals, vecs = np.linalg.eigh(Ma)
            va = vecs[:, -1]
            mid = float(vals[-1])
            if mid < objective - 1e-10:
                raise InternalInvariantError(
                    f"seesaw objective decreased: {objective} -> {mid}"
                )
            Mb = _conditional_operator(M4, va, "b")
            vals, vecs = np.linalg.eigh(Mb)
            vb = vecs[:, -1]
            new = float(vals[-1])
            if new < mid - 1e-10:
                raise InternalInvariantError(
                    f"seesaw objective decreased: {mid} -> {new}"
                )
            if new - objective < tol:
                objective = new
                converged = True
                break
            objective = new
        witness_value = float(
            np.real(np.einsum("i,j,ijkl,k,l->", va.conj(), vb.conj(), M4, va, vb))
        )
        if abs(witness_value - objective) > 1e-9:
            raise InternalInvariantError(
                f"witness value {witness_value} != objective {objective}"
            )
        result = SepOptimizationResult(objective, va, vb, iters, converged)
        if best is None or result.value > best.value:
            best = result
    return best
