"""Acceptance suite: every check prints one PASS/FAIL line.

Run with `pytest -v -s tests/test_acceptance.py` to see the lines inline.
"""

import itertools
import math
import random
import time
from fractions import Fraction

import numpy as np

from qfree.analysis import hsep_seesaw, tv_to_mixture_family
from qfree.bellqma import (
    ProtocolParams,
    honest_witnesses,
    consistency_test_accept_prob,
    protocol_accept_prob,
    uniformity_test_accept_prob,
)
from qfree.bounds import (
    GameSpec,
    GameTable,
    LedgerConfig,
    advice_decide,
    answer_length_accounting,
    build_advice,
    extract_game_table,
    game_spec_classical_value,
    gapless_recursion,
    log_star,
    lower_bound_margin,
    table_bit_size,
)
from qfree.csp import KcolInstance, inequality_instance, is_colorable
from qfree.games import (
    ConsistencyGameSpec,
    MixtureTerm,
    QuestionDistribution,
    SideFactor,
    game_value,
    induced_subgame_value_check,
    restrict_distribution,
)
from qfree.quantum import StateVector, protocol_layout, qft_matrix
from qfree.sweeps import honest_uniformity_formula, loglog_slope, tv_sweep

from helpers import basis, certainty_state, generic_honest_state


def report(name: str, ok: bool, detail: str = ""):
    line = f"{'PASS' if ok else 'FAIL'}: {name}"
    if detail:
        line += f" ({detail})"
    print(line)
    assert ok, line


def test_fourier_core():
    start = time.time()
    ok = True
    for K in range(1, 65):
        F = qft_matrix(K)
        ok &= float(np.max(np.abs(F @ F.conj().T - np.eye(K)))) < 1e-12
        F2 = F @ F
        for s in range(K):
            ok &= float(np.max(np.abs(F2 @ basis(K, s) - basis(K, (-s) % K)))) < 1e-12
    elapsed = time.time() - start
    report("fourier core (K=1..64, unitarity + F^2 parity)", ok and elapsed < 1.0,
           f"{elapsed:.3f}s")


def test_completeness_4cycle_consistency():
    square = inequality_instance(4, [(0, 1), (1, 2), (2, 3), (0, 3)], 2)
    _, coloring = is_colorable(square)
    start = time.time()
    ok = True
    for k in (1, 2, 3):
        params = ProtocolParams(k, 0.5, square)
        pair = honest_witnesses(params, coloring)
        ok &= abs(consistency_test_accept_prob(pair, params) - 1.0) < 1e-10
    elapsed = time.time() - start
    report("completeness: honest 4-cycle consistency = 1 (k <= 3)",
           ok and elapsed < 5.0, f"{elapsed:.2f}s")


def test_uniformity_completeness_binomial():
    ok = True
    for k, K_prime, eta in itertools.product(range(1, 7), (2, 4), (0.3, 0.5)):
        state = generic_honest_state(2, K_prime, k)
        got = uniformity_test_accept_prob(state, K_prime, 2, k, eta)
        want = float(honest_uniformity_formula(k, K_prime, eta))
        ok &= abs(got - want) < 1e-10
    report("uniformity completeness: enumeration = binomial formula "
           "(k=1..6, K'=2/4, eta=0.3/0.5)", ok)


def test_certainty_passing_states_lp_distance():
    rng = random.Random(42)
    ok = True
    worst = 0.0
    for trial in range(20):
        k = rng.choice((2, 3))
        Q = rng.choice((2, 3))
        K_prime = rng.choice((2, 3))
        eta = 0.5
        t_min = math.ceil(Fraction(k) * (1 - Fraction(eta)) / K_prime)
        admissible = [
            T
            for size in range(max(t_min, 1), k + 1)
            for T in itertools.combinations(range(k), size)
        ]
        chosen = rng.sample(admissible, rng.randint(1, min(3, len(admissible))))
        raw = [Fraction(rng.randint(1, 5)) for _ in chosen]
        weights = [w / sum(raw) for w in raw]
        mu: dict[tuple[int, ...], Fraction] = {}
        for T, w in zip(chosen, weights):
            junk_q = {i: rng.randrange(Q) for i in range(k) if i not in T}
            junk_a = {i: rng.randrange(1, K_prime) for i in range(k) if i not in T}
            # each mixture component passes the uniformity test with certainty
            state = certainty_state(Q, K_prime, k, set(T), junk_q, junk_a)
            accept = uniformity_test_accept_prob(state, K_prime, Q, k, eta)
            ok &= abs(accept - 1.0) < 1e-10
            for fill in itertools.product(range(Q), repeat=len(T)):
                atom = [0] * k
                for c, v in zip(T, fill):
                    atom[c] = v
                for c, v in junk_q.items():
                    atom[c] = v
                key = tuple(atom)
                mu[key] = mu.get(key, Fraction(0)) + w * Fraction(1, Q ** len(T))
        distance, _ = tv_to_mixture_family(mu, Q, k, t_min)
        worst = max(worst, distance)
        ok &= distance <= 1e-8
    report("zero-error mixtures: 20 certainty-passing states, LP distance <= 1e-8",
           ok, f"worst distance {worst:.2e}")


def test_biased_sweep_trend():
    eps_values = [0.3, 0.1, 0.03, 0.01, 0.003]
    points = tv_sweep(2, 2, 0.5, 2, eps_values)
    ds = [p.tv_distance for p in points]
    monotone = all(a >= b - 1e-12 for a, b in zip(ds, ds[1:]))
    final_small = ds[-1] < 0.05
    slope = loglog_slope([p.eps_achieved for p in points], ds)
    report("uniformity soundness trend: non-increasing LP distance, final < 0.05",
           monotone and final_small,
           f"distances {['%.4f' % d for d in ds]}, log-log slope {slope:.3f}")


def _random_instance(rng: random.Random) -> KcolInstance:
    n = rng.randint(2, 4)
    all_edges = list(itertools.combinations(range(n), 2))
    m = rng.randint(1, min(4, len(all_edges)))
    edges = tuple(sorted(rng.sample(all_edges, m)))
    pairs = list(itertools.product((1, 2), repeat=2))
    relations = tuple(
        frozenset(rng.sample(pairs, rng.randint(1, 4))) for _ in edges
    )
    return KcolInstance(n, edges, K=2, relations=relations)


def _random_normal_factor(rng, domain, length, size):
    choices = list(itertools.combinations(range(length), size))
    raw = [Fraction(rng.randint(1, 5)) for _ in range(rng.randint(1, 2))]
    err_share = Fraction(rng.randint(0, 2), 20)
    scale = (1 - err_share) / sum(raw)
    terms = []
    for w in raw:
        coords = rng.choice(choices)
        rest = length - size
        space = list(itertools.product(range(domain), repeat=rest))
        junk_atoms = rng.sample(space, min(len(space), rng.randint(1, 2)))
        junk_raw = [Fraction(rng.randint(1, 3)) for _ in junk_atoms]
        junk = {a: p / sum(junk_raw) for a, p in zip(junk_atoms, junk_raw)}
        terms.append(MixtureTerm(coords, w * scale, junk))
    error = None
    if err_share:
        error = {tuple(rng.randrange(domain) for _ in range(length)): err_share}
    return SideFactor(domain, length, mixture=terms, error=error)


def test_discard_questions_inequality():
    rng = random.Random(777)
    start = time.time()
    violations = 0
    for _ in range(20):
        inst = _random_instance(rng)
        k, ell = rng.randint(1, 2), rng.randint(1, 2)
        k_prime, ell_prime = rng.randint(1, k), rng.randint(1, ell)
        dist = QuestionDistribution(
            _random_normal_factor(rng, inst.num_edges, k, k_prime),
            _random_normal_factor(rng, inst.num_vertices, ell, ell_prime),
        )
        restricted, _ = restrict_distribution(dist)
        ok, _, _ = induced_subgame_value_check(
            ConsistencyGameSpec(inst, k, ell), restricted, k_prime, ell_prime
        )
        violations += not ok
    elapsed = time.time() - start
    report("discard-questions inequality: 20 randomized instances, exact",
           violations == 0 and elapsed < 60.0,
           f"{violations} violations, {elapsed:.1f}s")


def test_soundness_triangle():
    triangle = inequality_instance(3, [(0, 1), (0, 2), (1, 2)], 2)
    game = game_value(ConsistencyGameSpec(triangle, 1, 1))
    classical_ok = game.exact and game.value < 1
    params = ProtocolParams(1, 0.5, triangle)
    best = 0.0
    for colors in itertools.product((1, 2), repeat=3):
        pair = honest_witnesses(params, dict(enumerate(colors)))
        best = max(best, protocol_accept_prob(pair, params))
    report("soundness: triangle game value < 1 and honest-family protocol value < 1",
           classical_ok and best < 1,
           f"G^(1,1) = {game.value}, best protocol accept {best:.4f}")


def test_game_table_and_advice():
    eq = GameSpec(1, 1, 1, lambda s: (s, s), lambda x, y, aa, ab: aa == ab)
    eq_gapless = GameSpec(
        1, 1, 1, lambda s: (s, s), lambda x, y, aa, ab: aa == ab, gapless=True
    )
    xor = GameSpec(
        2, 1, 1, lambda s: (s & 1, s >> 1), lambda x, y, aa, ab: (aa ^ ab) == (x & y)
    )
    gapped = extract_game_table(eq, delta=1)
    gapless = extract_game_table(eq_gapless, delta=1)
    sizes_ok = gapped.bit_size == 64 and gapless.bit_size == 16
    sizes_ok &= table_bit_size(1, 1, 1) == 64
    round_trip = all(
        GameTable.deserialize(t.serialize()).serialize() == t.serialize()
        and GameTable.deserialize(t.serialize()) == t
        for t in (gapped, gapless)
    )
    advice = build_advice([eq, xor], delta=1)
    bits = (advice_decide(eq, advice, 1), advice_decide(xor, advice, 1))
    bits_ok = bits == (1, 0)
    bits_ok &= game_spec_classical_value(xor) == Fraction(3, 4)
    report("game table: 64-bit gapped / 16-bit gapless, bit-exact round trip, "
           "advice bits", sizes_ok and round_trip and bits_ok,
           f"language bits {bits}")


def test_ledger_trajectory_and_accounting():
    config = LedgerConfig(log2_X_MS=10)
    trajectory, count = gapless_recursion(10**6, config)
    traj_ok = trajectory == [57, 29, 27] and config.Q0_gapless == 27
    bound_ok = True
    for e in range(4, 65):
        l0 = 2**e
        _, c = gapless_recursion(l0, config)
        bound_ok &= c <= 3 * log_star(l0)
    a0 = 12
    accounting_ok = (
        answer_length_accounting(a0, trajectory, "gapless", config)
        == a0 + sum(ell + 1 for ell in trajectory)
    )
    report("ledger: trajectory (57, 29, 27), Q0 = 27, iterations <= 3 log*, "
           "answer accounting", traj_ok and bound_ok and accounting_ok)


def test_hsep_seesaw_value():
    psi = np.array([1, 0, 0, 1]) / math.sqrt(2)
    M = np.outer(psi, psi)
    res = hsep_seesaw(M, (2, 2), restarts=16)
    # independent oracle: grid over one side, exact eigen-response on the other
    M4 = M.reshape(2, 2, 2, 2)
    oracle = 0.0
    steps = 90
    for i in range(steps + 1):
        theta = math.pi * i / steps
        for j in range(steps):
            phi = 2 * math.pi * j / steps
            a = np.array([math.cos(theta / 2), math.sin(theta / 2) * np.exp(1j * phi)])
            cond = np.einsum("i,ijkl,k->jl", a.conj(), M4, a)
            oracle = max(oracle, float(np.linalg.eigvalsh(cond)[-1]))
    ok = abs(res.value - 0.5) < 1e-6 and abs(res.value - oracle) < 1e-3
    report("h_Sep seesaw: maximally entangled projector value 1/2",
           ok, f"value {res.value:.9f}, grid oracle {oracle:.6f}")


def test_lower_bound_margin_crossover():
    result = lower_bound_margin(0.4, 0.9, 0.05)
    crossover = result["crossover_n0"]
    rows = result["rows"]
    max_n = max(r["n"] for r in rows)
    tail_ok = all(r["dominates"] for r in rows if r["n"] >= crossover)
    report("lower-bound margin: crossover reported, dominance up to 2^32",
           crossover is not None and max_n == 2**32 and tail_ok,
           f"crossover n0 = {crossover}")
