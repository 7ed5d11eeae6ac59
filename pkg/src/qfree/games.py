"""The classical batched consistency game, exact values by exhaustive search,
restricted question distributions with mixture structure, and the
discard-questions subgame comparison.

Alice receives a batch of edges and answers with colors for all their
endpoint vertices; Bob receives a batch of vertices and colors them.  The win
predicate re-runs the consistency-test checks on every (edge, vertex)
incidence across the two batches.

Because the win predicate ignores the order of a batch, ordered question
tuples are canonicalized to multisets (weights merged) before the search.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .csp import KcolInstance
from .errors import CapExceededError, InputError
from .kernels import best_response_search
from .quantum import StateVector, flat_support_distribution, measure_registers

DEFAULT_SEARCH_CAP = 8 * 10**6  # max enumerated strategies
_INT64_SAFE = 2**60


@dataclass(frozen=True)
class ConsistencyGameSpec:
    instance: KcolInstance
    k: int
    ell: int
    question_model: str = "tuple"  # "tuple" | "subset"

    def __post_init__(self):
        if self.k < 1 or self.ell < 1:
            raise InputError("k and ell must be >= 1")
        if self.question_model not in ("tuple", "subset"):
            raise InputError(f"unknown question model {self.question_model!r}")
        if self.question_model == "subset":
            if self.k > self.instance.num_edges or self.ell > self.instance.num_vertices:
                raise InputError("subset model requires k <= m and ell <= n")


@dataclass(frozen=True)
class MixtureTerm:
    """One good term: uniform on coordinates `coords`, junk elsewhere.

    junk maps outcome tuples over the complement coordinates (in increasing
    coordinate order) to probabilities summing to 1.
    """

    coords: tuple[int, ...]
    weight: Fraction
    junk: dict[tuple[int, ...], Fraction] = field(default_factory=dict)


class SideFactor:
    """One prover's question distribution over [domain]^length tuples,
    optionally annotated with a mixture decomposition plus an error residual."""

    def __init__(
        self,
        domain: int,
        length: int,
        explicit: dict[tuple[int, ...], Fraction] | None = None,
        mixture: list[MixtureTerm] | None = None,
        error: dict[tuple[int, ...], Fraction] | None = None,
    ):
        self.domain = domain
        self.length = length
        self.mixture = mixture
        self.error = error
        if explicit is None:
            if mixture is None:
                raise InputError("need explicit probabilities or a mixture")
            explicit = self._expand()
        self.explicit = {k: Fraction(v) for k, v in explicit.items()}
        total = sum(self.explicit.values())
        if abs(float(total) - 1.0) > 1e-9:
            raise InputError(f"factor probabilities sum to {float(total)}, not 1")
        if mixture is not None:
            expanded = self._expand()
            keys = set(expanded) | set(self.explicit)
            gap = max(
                abs(float(expanded.get(k, 0) - self.explicit.get(k, 0))) for k in keys
            )
            if gap > 1e-9:
                raise InputError(
                    f"mixture annotation does not reproduce the factor (gap {gap})"
                )

    def _expand(self) -> dict[tuple[int, ...], Fraction]:
        out: dict[tuple[int, ...], Fraction] = {}
        unif = Fraction(1, self.domain)
        for term in self.mixture or []:
            rest = [i for i in range(self.length) if i not in term.coords]
            for junk_outcome, junk_p in term.junk.items():
                if len(junk_outcome) != len(rest):
                    raise InputError("junk outcome length mismatch")
                for fill in itertools.product(range(self.domain), repeat=len(term.coords)):
                    tup = [0] * self.length
                    for c, v in zip(term.coords, fill):
                        tup[c] = v
                    for c, v in zip(rest, junk_outcome):
                        tup[c] = v
                    key = tuple(tup)
                    p = term.weight * junk_p * unif ** len(term.coords)
                    out[key] = out.get(key, Fraction(0)) + p
        for key, p in (self.error or {}).items():
            out[key] = out.get(key, Fraction(0)) + p
        return out

    @classmethod
    def uniform(cls, domain: int, length: int) -> "SideFactor":
        p = Fraction(1, domain**length)
        explicit = {
            t: p for t in itertools.product(range(domain), repeat=length)
        }
        term = MixtureTerm(tuple(range(length)), Fraction(1), {(): Fraction(1)})
        return cls(domain, length, explicit, mixture=[term])

    @property
    def error_mass(self) -> Fraction:
        return sum((self.error or {}).values(), Fraction(0))


@dataclass
class QuestionDistribution:
    alice: SideFactor
    bob: SideFactor


@dataclass
class GameValueReport:
    value: Fraction
    alice_strategy: dict
    bob_strategy: dict
    exact: bool
    error_bound: float = 0.0

    def to_json_dict(self) -> dict:
        return {
            "value": float(self.value),
            "numerator": self.value.numerator,
            "denominator": self.value.denominator,
            "exact": self.exact,
            "error_bound": self.error_bound,
            "alice_strategy": {str(k): list(v) for k, v in self.alice_strategy.items()},
            "bob_strategy": {str(k): list(v) for k, v in self.bob_strategy.items()},
        }


def _alice_vertices(inst: KcolInstance, edge_batch: tuple[int, ...]) -> tuple[int, ...]:
    verts = set()
    for e in set(edge_batch):
        verts.update(inst.edges[e])
    return tuple(sorted(verts))


def _win(
    inst: KcolInstance,
    edge_batch: tuple[int, ...],
    alice_colors: dict[int, int],
    vertex_batch: tuple[int, ...],
    bob_colors: dict[int, int],
) -> bool:
    bob_set = set(vertex_batch)
    for e in set(edge_batch):
        v1, v2 = inst.edges[e]
        c1, c2 = alice_colors[v1], alice_colors[v2]
        for v in (v1, v2):
            if v in bob_set:
                if bob_colors[v] != alice_colors[v]:
                    return False
                if not inst.edge_allows(e, c1, c2):
                    return False
    return True


def _canonical_questions(
    spec: ConsistencyGameSpec, factor: SideFactor | None, side: str
) -> tuple[list[tuple[int, ...]], list[Fraction]]:
    """Canonical (multiset) questions with merged probabilities."""
    inst = spec.instance
    if side == "A":
        domain, length = inst.num_edges, spec.k
    else:
        domain, length = inst.num_vertices, spec.ell
    merged: dict[tuple[int, ...], Fraction] = {}
    if factor is None:
        if spec.question_model == "subset":
            combos = list(itertools.combinations(range(domain), length))
            p = Fraction(1, len(combos))
            for q in combos:
                merged[q] = p
        else:
            p = Fraction(1, domain**length)
            for q in itertools.product(range(domain), repeat=length):
                key = tuple(sorted(q))
                merged[key] = merged.get(key, Fraction(0)) + p
    else:
        if factor.domain != domain or factor.length != length:
            raise InputError(
                f"{side}-side factor shape ({factor.domain}, {factor.length}) "
                f"does not match game ({domain}, {length})"
            )
        for q, p in factor.explicit.items():
            key = tuple(sorted(q))
            merged[key] = merged.get(key, Fraction(0)) + p
    questions = sorted(merged)
    return questions, [merged[q] for q in questions]


def _common_denominator(weights: list[Fraction]) -> tuple[list[int], int]:
    denom = 1
    for w in weights:
        denom = denom * w.denominator // math.gcd(denom, w.denominator)
    return [int(w * denom) for w in weights], denom


def game_value(
    spec: ConsistencyGameSpec,
    dist: QuestionDistribution | None = None,
    search_cap: int = DEFAULT_SEARCH_CAP,
) -> GameValueReport:
    """Exact game value by exhausting one side's deterministic strategies with
    per-question best response on the other (deterministic strategies suffice:
    the payoff is linear in each player's per-question behavior).

    The side with the smaller strategy space is the one enumerated; the
    reported value is invariant under the choice.
    """
    inst = spec.instance
    K = inst.K
    qa, pa = _canonical_questions(spec, dist.alice if dist else None, "A")
    qb, pb = _canonical_questions(spec, dist.bob if dist else None, "B")

    alice_verts = [_alice_vertices(inst, x) for x in qa]
    bob_verts = [tuple(sorted(set(y))) for y in qb]
    alice_answers = [
        [dict(zip(verts, colors)) for colors in itertools.product(range(1, K + 1), repeat=len(verts))]
        for verts in alice_verts
    ]
    bob_answers = [
        [dict(zip(verts, colors)) for colors in itertools.product(range(1, K + 1), repeat=len(verts))]
        for verts in bob_verts
    ]

    # Enumerate the cheaper side fully; call it side "B" of the kernel.
    log_alice = sum(math.log(len(a)) for a in alice_answers)
    log_bob = sum(math.log(len(b)) for b in bob_answers)
    swap = log_alice < log_bob
    if swap:
        qx, px, ax_maps, x_batches = qb, pb, bob_answers, qb
        qy, py, by_maps = qa, pa, alice_answers
        y_batches = qa
    else:
        qx, px, ax_maps = qa, pa, alice_answers
        x_batches = qa
        qy, py, by_maps = qb, pb, bob_answers
        y_batches = qb

    n_strategies = 1.0
    for maps in by_maps:
        n_strategies *= len(maps)
    if n_strategies > search_cap:
        raise CapExceededError(
            f"{n_strategies:.3g} strategies exceed search cap {search_cap}"
        )

    def win(ix, a_map, iy, b_map) -> bool:
        if swap:
            return _win(inst, qy[iy], b_map, qx[ix], a_map)
        return _win(inst, qx[ix], a_map, qy[iy], b_map)

    wx_int, denom_x = _common_denominator(px)
    wy_int, denom_y = _common_denominator(py)
    exact = denom_x < _INT64_SAFE and denom_y < _INT64_SAFE

    nx, ny = len(qx), len(qy)
    max_ax = max(len(m) for m in ax_maps)
    max_by = max(len(m) for m in by_maps)
    dtype = np.int64 if exact else np.float64
    P = np.zeros((nx, max_ax, ny, max_by), dtype=dtype)
    wins = np.zeros((nx, max_ax, ny, max_by), dtype=bool)
    for ix in range(nx):
        for ia, a_map in enumerate(ax_maps[ix]):
            for iy in range(ny):
                wy = wy_int[iy] if exact else float(py[iy])
                for ib, b_map in enumerate(by_maps[iy]):
                    if win(ix, a_map, iy, b_map):
                        wins[ix, ia, iy, ib] = True
                        P[ix, ia, iy, ib] = wy
    wA = (
        np.array(wx_int, dtype=np.int64)
        if exact
        else np.array([float(p) for p in px], dtype=np.float64)
    )
    n_ax = [len(m) for m in ax_maps]
    n_by = [len(m) for m in by_maps]
    best, best_b = best_response_search(P, wA, n_ax, n_by)

    # Reconstruct witness strategies: the enumerated side's optimum plus the
    # lexicographically first best responses on the other side.
    enum_strategy = {qy[iy]: by_maps[iy][int(best_b[iy])] for iy in range(ny)}
    responder_strategy = {}
    for ix in range(nx):
        scores = []
        for ia in range(len(ax_maps[ix])):
            s = sum(
                (wy_int[iy] if exact else float(py[iy]))
                for iy in range(ny)
                if wins[ix, ia, iy, int(best_b[iy])]
            )
            scores.append(s)
        best_ia = max(range(len(scores)), key=lambda i: (scores[i], -i))
        responder_strategy[qx[ix]] = ax_maps[ix][best_ia]

    if exact:
        value = Fraction(int(best), denom_x * denom_y)
        err = 0.0
    else:
        err = 1e-12 * nx * ny
        value = Fraction(min(max(float(best), 0.0), 1.0))
    if swap:
        alice_strategy, bob_strategy = enum_strategy, responder_strategy
    else:
        alice_strategy, bob_strategy = responder_strategy, enum_strategy
    # Strategies are stored as vertex -> color maps keyed by the question.
    alice_strategy = {
        q: tuple(m[v] for v in _alice_vertices(inst, q)) for q, m in alice_strategy.items()
    }
    bob_strategy = {
        q: tuple(m[v] for v in sorted(set(q))) for q, m in bob_strategy.items()
    }
    if not 0 <= value <= 1:
        raise InputError(f"computed game value {value} outside [0, 1]")
    return GameValueReport(value, alice_strategy, bob_strategy, exact, err)


def restrict_distribution(
    dist: QuestionDistribution, drop_error_terms: bool = True
) -> tuple[QuestionDistribution, dict[str, Fraction]]:
    """Drop the error residuals from both sides' mixtures and renormalize
    the good terms; reports the discarded mass per side."""
    discarded: dict[str, Fraction] = {}
    new_sides = {}
    for name, side in (("A", dist.alice), ("B", dist.bob)):
        if side.mixture is None:
            raise InputError(f"side {name} has no mixture annotation")
        mass = side.error_mass
        discarded[name] = mass
        if not drop_error_terms or mass == 0:
            new_sides[name] = side
            continue
        good = sum((t.weight for t in side.mixture), Fraction(0))
        if good == 0:
            raise InputError(f"side {name} has all its mass in error terms")
        terms = [
            MixtureTerm(t.coords, t.weight / good, t.junk) for t in side.mixture
        ]
        new_sides[name] = SideFactor(side.domain, side.length, mixture=terms)
    return QuestionDistribution(new_sides["A"], new_sides["B"]), discarded


def induced_subgame_value_check(
    spec: ConsistencyGameSpec,
    dist: QuestionDistribution,
    k_prime: int,
    ell_prime: int,
    search_cap: int = DEFAULT_SEARCH_CAP,
) -> tuple[bool, Fraction, Fraction]:
    """Check value(G^{k,ell} restricted to dist) <= value(G^{k',ell'}).

    Requires the normal form: every Alice mixture term has |T| = k', every
    Bob term |T| = ell', and no error mass.
    """
    for name, side, size in (("A", dist.alice, k_prime), ("B", dist.bob, ell_prime)):
        if side.mixture is None:
            raise InputError(f"side {name} has no mixture annotation")
        if side.error_mass != 0:
            raise InputError("discard error terms before the subgame comparison")
        for term in side.mixture:
            if len(term.coords) != size:
                raise InputError(
                    f"side {name} mixture term has |T| = {len(term.coords)}, "
                    f"expected {size}"
                )
    restricted = game_value(spec, dist, search_cap=search_cap)
    sub_spec = ConsistencyGameSpec(
        spec.instance, k_prime, ell_prime, question_model="tuple"
    )
    sub = game_value(sub_spec, None, search_cap=search_cap)
    return restricted.value <= sub.value, restricted.value, sub.value


def measured_question_distribution(pair, params) -> QuestionDistribution:
    """Standard-basis question marginals of a witness pair, as a product
    distribution (the witnesses are unentangled across provers)."""
    sides = []
    for state, domain in ((pair.psi1, params.m), (pair.psi2, params.n)):
        q_indices = tuple(range(0, 2 * params.k, 2))
        exact = flat_support_distribution(state, q_indices)
        if exact is not None:
            explicit = exact
        else:
            outcome_dist, _ = measure_registers(state, q_indices)
            explicit = {
                o: Fraction(p) for o, p in outcome_dist.probabilities.items()
            }
            total = sum(explicit.values())
            explicit = {o: p / total for o, p in explicit.items()}
        sides.append(SideFactor(domain, params.k, explicit))
    return QuestionDistribution(sides[0], sides[1])


def birthday_collision_prob(inst: KcolInstance, k: int, ell: int) -> Fraction:
    """Probability that some sampled edge is incident to some sampled vertex
    when k edges and ell vertices are drawn iid uniformly (tuple model)."""
    if k <= 0 or ell <= 0:
        return Fraction(0)
    m, n = inst.num_edges, inst.num_vertices
    if m == 0:
        return Fraction(0)
    no_collision = Fraction(0)
    for batch in itertools.product(range(m), repeat=k):
        covered = len(_alice_vertices(inst, batch))
        no_collision += Fraction((n - covered) ** ell, n**ell)
    no_collision /= m**k
    return 1 - no_collision
