import itertools
import random
from fractions import Fraction

import pytest

from qfree.bellqma import ProtocolParams, honest_witnesses
from qfree.csp import KcolInstance, inequality_instance, is_colorable
from qfree.errors import CapExceededError, InputError
from qfree.games import (
    ConsistencyGameSpec,
    MixtureTerm,
    QuestionDistribution,
    SideFactor,
    birthday_collision_prob,
    game_value,
    induced_subgame_value_check,
    measured_question_distribution,
    restrict_distribution,
)


def test_triangle_value_is_eight_ninths(triangle):
    report = game_value(ConsistencyGameSpec(triangle, 1, 1))
    assert report.exact
    assert report.value == Fraction(8, 9)


def test_colorable_instance_has_value_one(square):
    for k, ell in ((1, 1), (2, 2)):
        report = game_value(ConsistencyGameSpec(square, k, ell))
        assert report.value == 1
        # the witness strategies actually achieve the value
        _, coloring = is_colorable(square)


def test_value_invariant_under_side_scaling(triangle):
    # tuple and subset models agree for batch size 1
    t = game_value(ConsistencyGameSpec(triangle, 1, 1, question_model="tuple"))
    s = game_value(ConsistencyGameSpec(triangle, 1, 1, question_model="subset"))
    assert t.value == s.value


def test_strategies_achieve_reported_value(triangle):
    from qfree.games import _win

    report = game_value(ConsistencyGameSpec(triangle, 2, 1))
    qa = sorted({tuple(sorted(q)) for q in itertools.product(range(3), repeat=2)})
    qb = [(v,) for v in range(3)]
    from qfree.games import _alice_vertices

    total = Fraction(0)
    for x in itertools.product(range(3), repeat=2):
        key = tuple(sorted(x))
        a_map = dict(zip(_alice_vertices(triangle, key), report.alice_strategy[key]))
        for y in range(3):
            b_map = {y: report.bob_strategy[(y,)][0]}
            if _win(triangle, key, a_map, (y,), b_map):
                total += Fraction(1, 27)
    assert total == report.value


def test_order_invariance_of_tuple_questions(triangle):
    # value computed from an explicit order-asymmetric distribution equals the
    # canonical uniform one when the multiset marginals agree
    atoms = list(itertools.product(range(3), repeat=2))
    explicit = {t: Fraction(1, 9) for t in atoms}
    factor_a = SideFactor(3, 2, explicit)
    factor_b = SideFactor(3, 1, {(v,): Fraction(1, 3) for v in range(3)})
    dist = QuestionDistribution(factor_a, factor_b)
    with_dist = game_value(ConsistencyGameSpec(triangle, 2, 1), dist)
    uniform = game_value(ConsistencyGameSpec(triangle, 2, 1))
    assert with_dist.value == uniform.value


def test_search_cap(triangle):
    with pytest.raises(CapExceededError):
        game_value(ConsistencyGameSpec(triangle, 3, 3), search_cap=10)


def test_measured_question_distribution_honest_is_uniform(square):
    _, coloring = is_colorable(square)
    params = ProtocolParams(2, 0.5, square)
    pair = honest_witnesses(params, coloring)
    dist = measured_question_distribution(pair, params)
    assert dist.alice.explicit[(0, 0)] == Fraction(1, 16)
    assert sum(dist.alice.explicit.values()) == 1
    assert dist.bob.explicit[(3, 1)] == Fraction(1, 16)


def test_side_factor_mixture_expansion():
    term = MixtureTerm((0,), Fraction(1), {(1,): Fraction(1)})
    factor = SideFactor(2, 2, mixture=[term])
    # uniform on coordinate 0, junk fixed at 1 on coordinate 1
    assert factor.explicit[(0, 1)] == Fraction(1, 2)
    assert factor.explicit[(1, 1)] == Fraction(1, 2)
    assert factor.explicit.get((0, 0), 0) == 0


def test_side_factor_rejects_bad_mixture():
    term = MixtureTerm((0,), Fraction(1), {(1,): Fraction(1)})
    explicit = {(0, 0): Fraction(1, 2), (1, 0): Fraction(1, 2)}
    with pytest.raises(InputError):
        SideFactor(2, 2, explicit, mixture=[term])


def test_restrict_distribution_drops_error_mass():
    good = MixtureTerm((0,), Fraction(9, 10), {(0,): Fraction(1)})
    error = {(1, 1): Fraction(1, 10)}
    factor = SideFactor(2, 2, mixture=[good], error=error)
    dist = QuestionDistribution(factor, SideFactor.uniform(2, 1))
    restricted, discarded = restrict_distribution(dist)
    assert discarded["A"] == Fraction(1, 10)
    assert restricted.alice.error_mass == 0
    assert sum(restricted.alice.explicit.values()) == 1


def _random_instance(rng: random.Random) -> KcolInstance:
    n = rng.randint(2, 4)
    all_edges = list(itertools.combinations(range(n), 2))
    m = rng.randint(1, min(4, len(all_edges)))
    edges = tuple(sorted(rng.sample(all_edges, m)))
    pairs = list(itertools.product((1, 2), repeat=2))
    relations = []
    for _ in edges:
        size = rng.randint(1, 4)
        relations.append(frozenset(rng.sample(pairs, size)))
    return KcolInstance(n, edges, K=2, relations=tuple(relations))


def _random_normal_factor(rng: random.Random, domain: int, length: int, size: int):
    """Mixture with every good term of |T| = size, plus a small error atom."""
    coords_choices = list(itertools.combinations(range(length), size))
    n_terms = rng.randint(1, 2)
    raw = [Fraction(rng.randint(1, 5)) for _ in range(n_terms)]
    err_share = Fraction(rng.randint(0, 2), 20)
    scale = (1 - err_share) / sum(raw)
    terms = []
    for w in raw:
        coords = rng.choice(coords_choices)
        rest = length - size
        space = list(itertools.product(range(domain), repeat=rest))
        junk_atoms = rng.sample(space, min(len(space), rng.randint(1, 2)))
        junk_raw = [Fraction(rng.randint(1, 3)) for _ in junk_atoms]
        junk = {a: p / sum(junk_raw) for a, p in zip(junk_atoms, junk_raw)}
        terms.append(MixtureTerm(coords, w * scale, junk))
    error = None
    if err_share:
        atom = tuple(rng.randrange(domain) for _ in range(length))
        error = {atom: err_share}
    return SideFactor(domain, length, mixture=terms, error=error)


def test_discard_questions_inequality_randomized():
    # omega(G^{k,l} restricted) <= omega(G^{k',l'}) on randomized instances
    rng = random.Random(2024)
    checked = 0
    while checked < 20:
        inst = _random_instance(rng)
        k = rng.randint(1, 2)
        ell = rng.randint(1, 2)
        k_prime = rng.randint(1, k)
        ell_prime = rng.randint(1, ell)
        factor_a = _random_normal_factor(rng, inst.num_edges, k, k_prime)
        factor_b = _random_normal_factor(rng, inst.num_vertices, ell, ell_prime)
        dist = QuestionDistribution(factor_a, factor_b)
        restricted, _ = restrict_distribution(dist)
        ok, restricted_value, sub_value = induced_subgame_value_check(
            ConsistencyGameSpec(inst, k, ell), restricted, k_prime, ell_prime
        )
        assert ok, (inst, restricted_value, sub_value)
        checked += 1


def test_birthday_collision(triangle, square):
    assert birthday_collision_prob(triangle, 1, 1) == Fraction(2, 3)
    assert birthday_collision_prob(triangle, 0, 1) == 0
    # monotone in the batch sizes
    p11 = birthday_collision_prob(square, 1, 1)
    p22 = birthday_collision_prob(square, 2, 2)
    assert p22 > p11
