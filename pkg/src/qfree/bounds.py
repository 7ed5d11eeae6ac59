"""Game-table extraction with advice/time accounting, and the
compression-recursion ledgers (question-length trajectories, iteration-count
bounds, answer-length growth, repetition counts).
"""

from __future__ import annotations

import itertools
import math
import struct
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .errors import CapExceededError, InputError

MAGIC = b"QFGT"
VERSION = 1
DEFAULT_SEED_CAP = 2**24
DEFAULT_ROW_CAP = 2**24
DEFAULT_STRATEGY_CAP = 10**7


# ---------------------------------------------------------------------------
# Game tables and advice accounting


@dataclass(frozen=True)
class GameSpec:
    """A two-player game given by a seeded sampler and a decider predicate.

    r, q, a are the bit lengths of the random seed, each question, and each
    answer.  The sampler maps a seed in [0, 2^r) to a question pair
    (x, y) in [0, 2^q)^2; the decider accepts or rejects (x, y, a_A, a_B).
    """

    r: int
    q: int
    a: int
    sampler: Callable[[int], tuple[int, int]]
    decider: Callable[[int, int, int, int], bool]
    gapless: bool = False

    def __post_init__(self):
        if min(self.r, self.q, self.a) < 0:
            raise InputError("bit lengths must be non-negative")


@dataclass(frozen=True)
class GameTable:
    """Explicit tabulation of a game, rows in lexicographic (x, y, aA, aB) order.

    exact_probs maps (x, y) to the exact rational seed-count probability;
    trunc_probs holds the same probabilities truncated toward zero to
    2q+delta fractional bits (as integer numerators over 2^(2q+delta)).
    Equality and round-trip identity are over the serialized content, which
    excludes the exact rationals in gapless mode.
    """

    q: int
    a: int
    delta: int
    gapless: bool
    trunc_probs: tuple[int, ...]  # indexed by x * 2^q + y; empty if gapless
    decider_bits: tuple[int, ...]  # lexicographic (x, y, aA, aB)
    exact_probs: dict[tuple[int, int], Fraction] = field(compare=False, default=None)

    @property
    def bit_size(self) -> int:
        return table_bit_size(self.q, self.a, self.delta, self.gapless)

    def serialize_payload(self) -> tuple[bytes, int]:
        """Bit-packed rows, no padding between rows; returns (bytes, bit length)."""
        bits = _BitWriter()
        prob_width = 2 * self.q + self.delta
        for x in range(2**self.q):
            for y in range(2**self.q):
                for aa in range(2**self.a):
                    for ab in range(2**self.a):
                        if not self.gapless:
                            bits.write(self.trunc_probs[x * 2**self.q + y], prob_width)
                        row = ((x * 2**self.q + y) * 2**self.a + aa) * 2**self.a + ab
                        bits.write(self.decider_bits[row], 1)
        return bits.to_bytes(), bits.length

    def serialize(self) -> bytes:
        payload, nbits = self.serialize_payload()
        header = MAGIC + struct.pack(
            ">BHHHB", VERSION, self.q, self.a, self.delta, int(self.gapless)
        )
        return header + payload

    @classmethod
    def deserialize(cls, blob: bytes) -> "GameTable":
        if blob[:4] != MAGIC:
            raise InputError("bad magic in game table file")
        version, q, a, delta, gapless = struct.unpack(">BHHHB", blob[4:12])
        if version != VERSION:
            raise InputError(f"unsupported game table version {version}")
        gapless = bool(gapless)
        reader = _BitReader(blob[12:])
        prob_width = 2 * q + delta
        trunc: list[int] = [0] * (2 ** (2 * q)) if not gapless else []
        decider: list[int] = []
        for x in range(2**q):
            for y in range(2**q):
                for _ in range(2 ** (2 * a)):
                    if not gapless:
                        trunc[x * 2**q + y] = reader.read(prob_width)
                    decider.append(reader.read(1))
        return cls(q, a, delta, gapless, tuple(trunc), tuple(decider))


class _BitWriter:
    def __init__(self):
        self._bits: list[int] = []

    def write(self, value: int, width: int):
        for i in range(width - 1, -1, -1):
            self._bits.append((value >> i) & 1)

    @property
    def length(self) -> int:
        return len(self._bits)

    def to_bytes(self) -> bytes:
        out = bytearray()
        for i in range(0, len(self._bits), 8):
            byte = 0
            for b in self._bits[i : i + 8]:
                byte = (byte << 1) | b
            byte <<= (8 - min(8, len(self._bits) - i)) % 8
            out.append(byte)
        return bytes(out)


class _BitReader:
    def __init__(self, data: bytes):
        self._data = data
        self._pos = 0

    def read(self, width: int) -> int:
        value = 0
        for _ in range(width):
            byte = self._data[self._pos // 8]
            value = (value << 1) | ((byte >> (7 - self._pos % 8)) & 1)
            self._pos += 1
        return value


def table_bit_size(q: int, a: int, delta: int, gapless: bool = False) -> int:
    """Serialized table size in bits: (2q+delta+1) * 2^(2(q+a)), or
    2^(2(q+a)) in gapless mode (probabilities omitted)."""
    if min(q, a, delta) < 0:
        raise InputError("bit lengths must be non-negative")
    rows = 2 ** (2 * (q + a))
    return rows if gapless else (2 * q + delta + 1) * rows


def extract_game_table(
    spec: GameSpec,
    delta: int,
    seed_cap: int = DEFAULT_SEED_CAP,
    row_cap: int = DEFAULT_ROW_CAP,
) -> GameTable:
    """Tabulate a game by looping over all 2^r seeds.

    Probabilities are exact counts over 2^r; the stored (gapped) values are
    truncated toward zero to 2q+delta fractional bits.
    """
    if 2**spec.r > seed_cap:
        raise CapExceededError(f"2^r = {2**spec.r} exceeds seed cap {seed_cap}")
    if 2 ** (2 * (spec.q + spec.a)) > row_cap:
        raise CapExceededError("table row count exceeds cap")
    counts: dict[tuple[int, int], int] = {}
    for seed in range(2**spec.r):
        x, y = spec.sampler(seed)
        if not (0 <= x < 2**spec.q and 0 <= y < 2**spec.q):
            raise InputError(f"sampler output ({x}, {y}) outside [0, 2^q)")
        counts[(x, y)] = counts.get((x, y), 0) + 1
    exact = {xy: Fraction(c, 2**spec.r) for xy, c in counts.items()}

    prob_scale = 2 ** (2 * spec.q + delta)
    trunc = []
    if not spec.gapless:
        for x in range(2**spec.q):
            for y in range(2**spec.q):
                p = exact.get((x, y), Fraction(0))
                trunc.append(int(p * prob_scale))  # floor: rounds toward zero
    decider_bits = []
    for x in range(2**spec.q):
        for y in range(2**spec.q):
            for aa in range(2**spec.a):
                for ab in range(2**spec.a):
                    decider_bits.append(int(bool(spec.decider(x, y, aa, ab))))
    return GameTable(
        spec.q, spec.a, delta, spec.gapless, tuple(trunc), tuple(decider_bits), exact
    )


def dtime_advice_bounds(
    r: int, q: int, a: int, t: int, delta: int = 1, gapless: bool = False
) -> tuple[int, int]:
    """(h, g): deterministic time 2^(r+2(q+a)) * t and advice length bound."""
    if min(r, q, a) < 0 or t < 0:
        raise InputError("inputs must be non-negative")
    h = 2 ** (r + 2 * (q + a)) * t
    return h, table_bit_size(q, a, delta, gapless)


def game_spec_classical_value(
    spec: GameSpec, strategy_cap: int = DEFAULT_STRATEGY_CAP
) -> Fraction:
    """Exact classical value of a GameSpec game by exhausting deterministic
    strategy pairs.  Toy sizes only (guarded)."""
    table = extract_game_table(spec, delta=0)
    questions = range(2**spec.q)
    answers = range(2**spec.a)
    n_strats = (2**spec.a) ** (2 * 2**spec.q)
    if n_strats > strategy_cap:
        raise CapExceededError(f"{n_strats} strategy pairs exceed cap")
    best = Fraction(0)
    support = [(xy, p) for xy, p in table.exact_probs.items() if p > 0]
    for s_alice in itertools.product(answers, repeat=2**spec.q):
        for s_bob in itertools.product(answers, repeat=2**spec.q):
            value = sum(
                (p for (x, y), p in support if spec.decider(x, y, s_alice[x], s_bob[y])),
                Fraction(0),
            )
            best = max(best, value)
    return best


def build_advice(specs: list[GameSpec], delta: int) -> dict[bytes, int]:
    """Advice string for a family of games: one bit per game table, set when
    the game's exact classical value equals 1."""
    advice = {}
    for spec in specs:
        table = extract_game_table(spec, delta)
        advice[table.serialize()] = int(game_spec_classical_value(spec) == 1)
    return advice


def advice_decide(spec: GameSpec, advice: dict[bytes, int], delta: int) -> int:
    """The table-then-advice decision procedure: tabulate the game, look its
    table up in the advice, return the stored language bit."""
    key = extract_game_table(spec, delta).serialize()
    if key not in advice:
        raise InputError("game table not present in advice string")
    return advice[key]


# ---------------------------------------------------------------------------
# Compression-recursion ledgers


@dataclass(frozen=True)
class LedgerConfig:
    log2_X_MS: int = 10
    C: float = 2.0
    beta: float = 2.0
    A: float = 1.0
    alpha: float = 1.0
    G: float | None = None
    const_gapless: int = 1
    const_gapped: int = 1
    C_rep: float = 1.0
    c_rep: float = 1.0

    def gapless_step(self, ell: int) -> int:
        return math.ceil(2 * math.log2(ell) + 7 + self.log2_X_MS)

    def gapped_step(self, ell: int) -> int:
        return math.ceil(self.C * math.log2(ell) ** self.beta)

    @property
    def Q0_gapless(self) -> int:
        return _derived_q0(self.gapless_step)

    @property
    def Q0_gapped(self) -> int:
        return _derived_q0(self.gapped_step)


def _derived_q0(step: Callable[[int], int], scan_limit: int = 1 << 16) -> int:
    """Smallest Q0 such that step(ell) < ell for every ell > Q0.

    The step functions are polylogarithmic, so violations live below a small
    scan bound; Q0 is the largest violating ell (at least 1)."""
    q0 = 1
    for ell in range(2, scan_limit + 1):
        if step(ell) >= ell:
            q0 = ell
    if step(scan_limit) >= scan_limit // 2:
        raise InputError("step function does not shrink; bad ledger constants")
    return q0


def log_star(x: float, base: float = 2.0) -> int:
    """Iterated logarithm: applications of log_base needed to reach <= 1."""
    if x < 0:
        raise InputError("log* needs a non-negative argument")
    count = 0
    while x > 1:
        x = math.log(x, base)
        count += 1
    return count


def gapless_recursion(l0: int, config: LedgerConfig) -> tuple[list[int], int]:
    """Question-length trajectory of the gapless compression loop.

    Returns (trajectory ell_1, ell_2, ..., iteration count); the loop runs
    while the current length exceeds the derived Q0 and must shrink strictly
    at every step above it."""
    if l0 < 1:
        raise InputError("l0 must be >= 1")
    q0 = config.Q0_gapless
    trajectory = []
    ell = l0
    while ell > q0:
        nxt = config.gapless_step(ell)
        if nxt >= ell:
            raise InputError(
                f"recursion failed to decrease at ell = {ell} (step gave {nxt})"
            )
        trajectory.append(nxt)
        ell = nxt
    return trajectory, len(trajectory)


def gapped_recursion(
    l0: int, config: LedgerConfig
) -> tuple[list[int], int, bool | None]:
    """Trajectory of the gapped loop plus the iteration-count bound check
    g(l0) <= G * log2 log2 log2 (l0) (skipped when the triple log is undefined
    or no G is configured)."""
    if l0 < 1:
        raise InputError("l0 must be >= 1")
    q0 = config.Q0_gapped
    trajectory = []
    ell = l0
    while ell > q0:
        nxt = config.gapped_step(ell)
        if nxt >= ell:
            raise InputError(
                f"recursion failed to decrease at ell = {ell} (step gave {nxt})"
            )
        trajectory.append(nxt)
        ell = nxt
    bound_ok = None
    if config.G is not None and l0 > math.e**math.e:
        triple = math.log2(math.log2(math.log2(l0)))
        if triple > 0:
            bound_ok = len(trajectory) <= config.G * triple
    return trajectory, len(trajectory), bound_ok


def calibrate_gapped_G(config: LedgerConfig, exponents=range(4, 65)) -> float:
    """Smallest G such that the iteration count stays below G*logloglog(l0)
    over l0 = 2^e for the given exponent sweep."""
    worst = 0.0
    for e in exponents:
        l0 = 2**e
        if l0 <= math.e**math.e:
            continue
        triple = math.log2(math.log2(math.log2(l0)))
        if triple <= 0:
            continue
        count = gapped_recursion(l0, config)[1]
        worst = max(worst, count / triple)
    return worst


def answer_length_accounting(
    a0: float, trajectory: list[int], mode: str, config: LedgerConfig
) -> float:
    """Final answer length after the compression loop.

    gapless: a0 + sum(ell_i + const); gapped: iterate
    a_{i+1} = A * (a_i + ell_i + const) * log2(ell_i)^alpha.
    """
    if mode == "gapless":
        return a0 + sum(ell + config.const_gapless for ell in trajectory)
    if mode == "gapped":
        a = a0
        for ell in trajectory:
            a = config.A * (a + ell + config.const_gapped) * math.log2(ell) ** config.alpha
        return a
    raise InputError(f"unknown accounting mode {mode!r}")


def repetition_count(
    eps: float, C_rep: float, c_rep: float, natural_log: bool = True
) -> int:
    """Parallel repetitions needed to push the repeated game value below 1/2:
    k = ceil((2 log 2 / C) * eps^(-c)).  natural_log picks ln-based `log 2`
    (consistent with the exponential bound the formula is derived from)."""
    if not 0 < eps <= 1:
        raise InputError("eps must lie in (0, 1]")
    if C_rep <= 0 or c_rep <= 0:
        raise InputError("repetition constants must be positive")
    log2_value = math.log(2) if natural_log else 1.0
    k = math.ceil((2 * log2_value / C_rep) * eps ** (-c_rep))
    decay = C_rep * eps**c_rep
    if math.exp(-decay * k / 2) > 0.5 + 1e-12:
        raise InputError(
            "repetition count does not drive the bound below 1/2; "
            "check the constants"
        )
    return k


def lower_bound_margin(
    gamma: float,
    c: float,
    eps: float,
    delta: int = 1,
    n_values: list[int] | None = None,
) -> dict:
    """Evaluate both sides of the advice-versus-n inequality
    (2*qa + delta + 1) * 2^(2*qa) <= c*n + log2(eps) with
    qa = floor(gamma * log2 n), and report the dominance crossover."""
    if not 0 < gamma < 0.5:
        raise InputError("gamma must lie strictly in (0, 1/2)")
    if not 2 * gamma < c < 1:
        raise InputError("need 2*gamma < c < 1")
    if not 0 < eps < 1 - c:
        raise InputError("need 0 < eps < 1 - c")
    if n_values is None:
        n_values = sorted({2**e for e in range(1, 33)} | {3 * 2**e for e in range(1, 31)})
    rows = []
    for n in sorted(n_values):
        qa = math.floor(gamma * math.log2(n))
        left = (2 * qa + delta + 1) * 2 ** (2 * qa)
        right = c * n + math.log2(eps)
        rows.append(
            {"n": n, "qa": qa, "left": left, "right": right, "dominates": right >= left}
        )
    crossover = None
    for i in range(len(rows)):
        if all(r["dominates"] for r in rows[i:]):
            crossover = rows[i]["n"]
            break
    return {"rows": rows, "crossover_n0": crossover}
