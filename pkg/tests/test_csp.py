import itertools

import pytest
from hypothesis import given, settings, strategies as st

from qfree.csp import (
    KcolInstance,
    SatInstance,
    coloring_from_assignment,
    count_violated_edges,
    inequality_instance,
    is_colorable,
    parse_dimacs,
    reduce_3sat_to_kcol,
    sat_brute_force,
)
from qfree.errors import InputError


def test_single_clause_gadget():
    sat = SatInstance(3, [(1, -2, 3)])
    inst = reduce_3sat_to_kcol(sat)
    assert inst.num_vertices == 4  # 3 variables + 1 clause vertex
    assert inst.num_edges == 3
    assert inst.K == 7


def test_empty_cnf_reduces_to_edgeless():
    inst = reduce_3sat_to_kcol(SatInstance(2, []))
    assert inst.num_edges == 0
    assert inst.num_vertices == 2


def test_satisfying_assignment_gives_proper_coloring():
    sat = SatInstance(3, [(1, 2, 3), (-1, -2, 3)])
    assignment = sat_brute_force(sat)
    assert assignment is not None
    inst = reduce_3sat_to_kcol(sat)
    coloring = coloring_from_assignment(sat, assignment)
    assert count_violated_edges(inst, coloring) == 0


def _random_3cnf(rng, num_vars, num_clauses):
    clauses = []
    for _ in range(num_clauses):
        vs = rng.sample(range(1, num_vars + 1), 3)
        clauses.append(tuple(v if rng.random() < 0.5 else -v for v in vs))
    return SatInstance(num_vars, clauses)


def test_reduction_preserves_satisfiability():
    import random

    rng = random.Random(7)
    for _ in range(25):
        sat = _random_3cnf(rng, 3, rng.randint(1, 4))
        inst = reduce_3sat_to_kcol(sat)
        sat_ok = sat_brute_force(sat) is not None
        col_ok, witness = is_colorable(inst)
        assert sat_ok == col_ok
        if col_ok:
            assert count_violated_edges(inst, witness) == 0


def test_triangle_not_2colorable(triangle):
    ok, witness = is_colorable(triangle)
    assert not ok and witness is None


def test_square_2colorable(square):
    ok, witness = is_colorable(square)
    assert ok
    assert count_violated_edges(square, witness) == 0
    # lexicographically first proper coloring
    assert witness == {0: 1, 1: 2, 2: 1, 3: 2}


def test_clause_vars_must_be_distinct():
    with pytest.raises(InputError):
        SatInstance(3, [(1, 1, 2)])


def test_json_round_trip(triangle):
    again = KcolInstance.from_json(triangle.to_json())
    assert again.num_vertices == triangle.num_vertices
    assert again.edges == triangle.edges
    assert again.relations == triangle.relations


@settings(max_examples=40, deadline=None)
@given(
    n=st.integers(2, 5),
    K=st.integers(2, 3),
    data=st.data(),
)
def test_json_round_trip_random(n, K, data):
    all_edges = list(itertools.combinations(range(n), 2))
    edges = data.draw(
        st.lists(st.sampled_from(all_edges), min_size=1, max_size=4, unique=True)
    )
    pairs = list(itertools.product(range(1, K + 1), repeat=2))
    relations = []
    for _ in edges:
        allowed = data.draw(
            st.lists(st.sampled_from(pairs), min_size=1, max_size=len(pairs), unique=True)
        )
        relations.append(frozenset(allowed))
    inst = KcolInstance(n, tuple(sorted(edges)), K=K, relations=tuple(relations))
    again = KcolInstance.from_json(inst.to_json())
    assert again.edges == inst.edges
    assert again.relations == inst.relations


def test_parse_dimacs_and_errors():
    sat = parse_dimacs("c comment\np cnf 3 1\n1 -2 3 0\n")
    assert sat.num_vars == 3
    assert tuple(sat.clauses) == ((1, -2, 3),)
    with pytest.raises(InputError, match="line"):
        parse_dimacs("p cnf 2 1\n1 garbage 0\n")
    with pytest.raises(InputError):
        parse_dimacs("1 -2 3 0\n")  # missing header


def test_inequality_instance_relation():
    inst = inequality_instance(2, [(0, 1)], 3)
    assert not inst.edge_allows(0, 1, 1)
    assert inst.edge_allows(0, 1, 2)
