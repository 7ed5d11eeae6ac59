"""Experiment harness: drives every module, persists reproducible runs,
emits machine-readable CSV/JSON plus a digest manifest.

Error contract: exit 0 on success, 2 on input errors, 3 on resource-cap
errors, 4 on internal invariant violations.  Failures print a single
machine-parsable line `error<TAB>kind<TAB>message` to stderr.
"""

from __future__ import annotations

import argparse
import hashlib
import itertools
import json
import logging
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import DEFAULT_LP_CAP, tv_to_mixture_family
from .bellqma import (
    AdversarySpec,
    ProtocolParams,
    build_witnesses,
    consistency_outcome_accepts,
    consistency_test_accept_prob,
    uniformity_test_accept_prob,
)
from .bounds import (
    GameSpec,
    LedgerConfig,
    dtime_advice_bounds,
    extract_game_table,
    gapless_recursion,
    gapped_recursion,
    log_star,
    lower_bound_margin,
)
from .csp import (
    KcolInstance,
    is_colorable,
    count_violated_edges,
    parse_dimacs,
    reduce_3sat_to_kcol,
)
from .errors import CapExceededError, InputError, InternalInvariantError
from .games import ConsistencyGameSpec, game_value
from .quantum import qft_matrix
from .sweeps import (
    biased_failure_prob,
    find_bias_for_failure,
    honest_uniformity_formula,
    loglog_slope,
    tv_sweep,
)

log = logging.getLogger("qfree")

_LOG_LEVELS = {
    "error": logging.ERROR,
    "warn": logging.WARNING,
    "info": logging.INFO,
    "debug": logging.DEBUG,
}

DEFAULT_DIM_CAP = 2_000_000
_BEST_COLORING_CAP = 10**6


def _setup_logging():
    name = os.environ.get("QFREE_LOG", "warn").lower()
    if name not in _LOG_LEVELS:
        raise InputError(
            f"QFREE_LOG must be one of {sorted(_LOG_LEVELS)}, got {name!r}"
        )
    logging.basicConfig(level=_LOG_LEVELS[name], format="%(levelname)s %(name)s %(message)s")


# ---------------------------------------------------------------------------
# Output plumbing


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    return str(v)


def _json_safe(v):
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, dict):
        return {str(k): _json_safe(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_json_safe(x) for x in v]
    return v


def _table_body(fmt: str, header: list[str], rows: list[list]) -> str:
    """CSV uses '.' decimal, LF line endings, mandatory header row."""
    if fmt == "csv":
        lines = [",".join(header)]
        lines += [",".join(_fmt(v) for v in row) for row in rows]
        return "\n".join(lines) + "\n"
    records = [dict(zip(header, (_json_safe(v) for v in row))) for row in rows]
    return json.dumps(records, indent=2, sort_keys=True) + "\n"


def _config_snapshot(args: argparse.Namespace) -> dict:
    out = {}
    for key, val in sorted(vars(args).items()):
        if key == "func":
            continue
        out[key] = _json_safe(val)
    return out


def write_outputs(
    args: argparse.Namespace,
    results: dict[str, str | bytes],
    summary: dict | None = None,
) -> Path:
    """Persist result files plus a manifest with per-file sha256 digests.

    The manifest carries the config snapshot and a timestamp; result bodies
    never do, so identical (config, seed) reruns are byte-identical.
    """
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    digests = {}
    for name, body in results.items():
        data = body if isinstance(body, bytes) else body.encode("utf-8")
        (out_dir / name).write_bytes(data)
        digests[name] = hashlib.sha256(data).hexdigest()
    manifest = {
        "tool": "qfree",
        "version": __version__,
        "command": args.command,
        "config": _config_snapshot(args),
        "created_utc": datetime.now(timezone.utc).isoformat(),
        "results": digests,
    }
    if summary:
        manifest["summary"] = _json_safe(summary)
    path = out_dir / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path


def verify_manifest(out_dir: str | Path) -> bool:
    """Recompute every result digest recorded in the manifest."""
    out_dir = Path(out_dir)
    manifest = json.loads((out_dir / "manifest.json").read_text())
    for name, digest in manifest["results"].items():
        data = (out_dir / name).read_bytes()
        if hashlib.sha256(data).hexdigest() != digest:
            return False
    return True


def _load_instance(path: str) -> KcolInstance:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read instance file {path}: {exc}") from exc
    return KcolInstance.from_json(text)


def _ext(fmt: str) -> str:
    return "csv" if fmt == "csv" else "json"


# ---------------------------------------------------------------------------
# reduce


def cmd_reduce(args) -> int:
    try:
        text = Path(args.cnf).read_text()
    except OSError as exc:
        raise InputError(f"cannot read CNF file {args.cnf}: {exc}") from exc
    sat = parse_dimacs(text)
    inst = reduce_3sat_to_kcol(sat)
    out_name = args.out if args.out else "instance.json"
    write_outputs(
        args,
        {out_name: inst.to_json()},
        summary={"n": inst.num_vertices, "m": inst.num_edges, "K": inst.K},
    )
    print(f"n={inst.num_vertices} m={inst.num_edges} K={inst.K}")
    return 0


# ---------------------------------------------------------------------------
# simulate


def _best_coloring(inst: KcolInstance) -> dict[int, int]:
    """A proper coloring when one exists, else the lexicographically first
    coloring with the fewest violated edges."""
    ok, witness = is_colorable(inst)
    if ok:
        return witness
    if inst.K**inst.num_vertices > _BEST_COLORING_CAP:
        raise CapExceededError("instance too large for best-coloring search")
    best, best_viol = None, None
    for colors in itertools.product(range(1, inst.K + 1), repeat=inst.num_vertices):
        coloring = dict(enumerate(colors))
        viol = count_violated_edges(inst, coloring)
        if best_viol is None or viol < best_viol:
            best, best_viol = coloring, viol
    return best


def _parse_adversary(text: str, inst: KcolInstance) -> AdversarySpec:
    if text == "honest":
        return AdversarySpec("honest", coloring=_best_coloring(inst))
    if text.startswith("biased:"):
        try:
            theta = float(text.split(":", 1)[1])
        except ValueError as exc:
            raise InputError(f"bad bias value in adversary spec {text!r}") from exc
        if theta < 0:
            raise InputError("bias must be non-negative")
        m, n = inst.num_edges, inst.num_vertices
        w1 = (1 + theta,) + (1.0,) * (m - 1)
        w2 = (1 + theta,) + (1.0,) * (n - 1)
        return AdversarySpec(
            "biased-amplitudes",
            coloring=_best_coloring(inst),
            weights1=w1,
            weights2=w2,
        )
    if text == "cheat":
        # Alice claims (1, 2) on every edge, Bob colors everything 1; the
        # provers disagree on every second endpoint.
        alice = {e: (1, min(2, inst.K)) for e in range(inst.num_edges)}
        bob = {v: 1 for v in range(inst.num_vertices)}
        return AdversarySpec("cheating-coloring", alice_answers=alice, bob_answers=bob)
    raise InputError(
        f"unknown adversary {text!r}; expected honest, biased:<theta>, or cheat"
    )


def _threshold_passes(z: int, k: int, K_prime: int, eta: float) -> bool:
    return Fraction(z, k) >= (1 - Fraction(eta)) / K_prime


def _sample_outcome(tensor: np.ndarray, rng: np.random.Generator) -> tuple[int, ...]:
    # Sequential per-axis sampling from the Born distribution.
    out = []
    t = tensor
    while t.ndim > 0:
        marg = np.sum(np.abs(t) ** 2, axis=tuple(range(1, t.ndim)))
        total = marg.sum()
        if total <= 0:
            raise InternalInvariantError("zero-mass branch while sampling")
        i = int(rng.choice(len(marg), p=marg / total))
        out.append(i)
        t = t[i]
    return tuple(out)


def _sample_uniformity_accept(state, Q, K_prime, k, eta, rng) -> bool:
    # Fourier-measuring every question register (not just those indexed by Z)
    # and discarding the extras leaves the accept statistics unchanged.
    t = state.tensor()
    FQ = qft_matrix(Q)
    FA = qft_matrix(K_prime)
    for axis in range(2 * k):
        F = FQ if axis % 2 == 0 else FA
        t = np.moveaxis(np.tensordot(F, t, axes=([1], [axis])), 0, axis)
    o = _sample_outcome(t, rng)
    z = [i for i in range(k) if o[2 * i + 1] == 0]
    if not _threshold_passes(len(z), k, K_prime, eta):
        return False
    return all(o[2 * i] == 0 for i in z)


def cmd_simulate(args) -> int:
    inst = _load_instance(args.instance)
    params = ProtocolParams(args.k, args.eta, inst)
    spec = _parse_adversary(args.adversary, inst)
    pair = build_witnesses(spec, params)

    dim = max(
        params.alice_layout().total_dimension, params.bob_layout().total_dimension
    )
    header = ["run_id", "k", "eta", "adversary", "p_unif_1", "p_unif_2", "p_cons", "p_accept"]
    if args.mode == "exact":
        if dim > args.cap_dim:
            raise CapExceededError(
                f"state dimension {dim} exceeds --cap-dim {args.cap_dim}; "
                "try --mode sample"
            )
        u1 = uniformity_test_accept_prob(
            pair.psi1, inst.K**2, params.m, args.k, args.eta
        )
        u2 = uniformity_test_accept_prob(pair.psi2, inst.K, params.n, args.k, args.eta)
        cons = consistency_test_accept_prob(pair, params)
        accept = 0.5 * u1 * u2 + 0.5 * cons
        rows = [[0, args.k, args.eta, args.adversary, u1, u2, cons, accept]]
    else:
        if args.seed is None:
            raise InputError("--seed is mandatory in sample mode")
        rng = np.random.default_rng(args.seed)
        heads_hits = {"u1": 0, "u2": 0, "both": 0}
        heads_runs = 0
        cons_hits = 0
        cons_runs = 0
        accept_hits = 0
        t1 = pair.psi1.tensor()
        t2 = pair.psi2.tensor()
        for _ in range(args.samples):
            if rng.integers(2) == 0:
                heads_runs += 1
                a1 = _sample_uniformity_accept(
                    pair.psi1, params.m, inst.K**2, args.k, args.eta, rng
                )
                a2 = _sample_uniformity_accept(
                    pair.psi2, params.n, inst.K, args.k, args.eta, rng
                )
                heads_hits["u1"] += a1
                heads_hits["u2"] += a2
                ok = a1 and a2
                heads_hits["both"] += ok
            else:
                cons_runs += 1
                o1 = _sample_outcome(t1, rng)
                o2 = _sample_outcome(t2, rng)
                ok = consistency_outcome_accepts(inst, o1, o2)
                cons_hits += ok
            accept_hits += ok
        p_acc = accept_hits / args.samples
        stderr = math.sqrt(max(p_acc * (1 - p_acc), 0.0) / args.samples)
        rows = [
            [
                0,
                args.k,
                args.eta,
                args.adversary,
                heads_hits["u1"] / heads_runs if heads_runs else float("nan"),
                heads_hits["u2"] / heads_runs if heads_runs else float("nan"),
                cons_hits / cons_runs if cons_runs else float("nan"),
                p_acc,
                stderr,
            ]
        ]
        header = header + ["p_accept_stderr"]
    body = _table_body(args.format, header, rows)
    write_outputs(args, {f"simulate.{_ext(args.format)}": body})
    sys.stdout.write(body)
    return 0


# ---------------------------------------------------------------------------
# sweep


def _parse_float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise InputError(f"bad numeric list {text!r}") from exc


def cmd_sweep(args) -> int:
    if args.kind == "tv-vs-eps":
        eps_values = _parse_float_list(args.eps)
        if not eps_values:
            raise InputError("empty eps grid")
        t_min = math.ceil(Fraction(args.k) * (1 - Fraction(args.eta)) / args.K_prime)

        def point(idx_eps):
            idx, eps = idx_eps
            # Grid points are independent tasks; each owns an RNG derived
            # from (master seed, grid index) for future sampled variants.
            _ = np.random.default_rng((args.seed or 0, idx))
            theta = find_bias_for_failure(args.Q, args.k, eps)
            achieved = float(biased_failure_prob(args.Q, args.k, theta))
            from .sweeps import biased_question_distribution

            mu = biased_question_distribution(args.Q, args.k, theta)
            distance, _dec = tv_to_mixture_family(
                mu, args.Q, args.k, t_min, cap=args.cap_lp
            )
            return [eps, float(theta), achieved, distance]

        with ThreadPoolExecutor(max_workers=min(8, len(eps_values))) as pool:
            rows = list(pool.map(point, enumerate(eps_values)))
        header = ["eps_target", "theta", "eps_achieved", "tv_distance"]
        slope = None
        if len(rows) >= 2 and all(r[3] > 0 for r in rows):
            slope = loglog_slope([r[2] for r in rows], [r[3] for r in rows])
        summary = {"loglog_slope": slope}
    elif args.kind == "completeness-vs-k":
        header = ["k", "eta", "K_prime", "p_unif", "p_accept"]
        rows = []
        for k in range(1, args.k_max + 1):
            p = float(honest_uniformity_formula(k, args.K_prime, args.eta))
            rows.append([k, args.eta, args.K_prime, p, 0.5 * p * p + 0.5])
        summary = None
    elif args.kind == "value-gap":
        if args.instance:
            inst = _load_instance(args.instance)
        else:
            from .csp import inequality_instance

            inst = inequality_instance(3, [(0, 1), (0, 2), (1, 2)], 2)
        header = ["k", "ell", "value", "gap"]
        rows = []
        for k in range(1, args.k_max + 1):
            for ell in range(1, args.k_max + 1):
                report = game_value(ConsistencyGameSpec(inst, k, ell))
                v = float(report.value)
                rows.append([k, ell, v, 1.0 - v])
        summary = None
    else:
        raise InputError(f"unknown sweep kind {args.kind!r}")

    body = _table_body(args.format, header, rows)
    write_outputs(args, {f"sweep-{args.kind}.{_ext(args.format)}": body}, summary)
    sys.stdout.write(body)
    if args.kind == "tv-vs-eps" and summary and summary["loglog_slope"] is not None:
        print(f"loglog_slope={summary['loglog_slope']!r}", file=sys.stderr)
    return 0


# ---------------------------------------------------------------------------
# game-value, decompose


def cmd_game_value(args) -> int:
    inst = _load_instance(args.instance)
    spec = ConsistencyGameSpec(inst, args.k, args.ell, question_model=args.model)
    report = game_value(spec)
    doc = report.to_json_dict()
    if args.format == "csv":
        header = ["k", "ell", "model", "value", "numerator", "denominator", "exact"]
        body = _table_body(
            "csv",
            header,
            [[args.k, args.ell, args.model, float(report.value),
              report.value.numerator, report.value.denominator, report.exact]],
        )
        name = "game_value.csv"
    else:
        body = json.dumps(doc, indent=2, sort_keys=True) + "\n"
        name = "game_value.json"
    write_outputs(args, {name: body}, summary={"value": float(report.value)})
    sys.stdout.write(body)
    return 0


def _parse_prob(v) -> Fraction | float:
    if isinstance(v, str):
        try:
            return Fraction(v)
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"bad probability {v!r}") from exc
    if isinstance(v, (int, float)):
        return Fraction(v) if isinstance(v, int) else float(v)
    raise InputError(f"bad probability {v!r}")


def cmd_decompose(args) -> int:
    try:
        doc = json.loads(Path(args.dist).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read distribution JSON {args.dist}: {exc}") from exc
    for field in ("Q", "k", "atoms"):
        if field not in doc:
            raise InputError(f"distribution JSON missing field {field!r}")
    Q, k = int(doc["Q"]), int(doc["k"])
    mu = {}
    for entry in doc["atoms"]:
        if len(entry) != 2:
            raise InputError("each atom must be [outcome list, probability]")
        outcome, p = entry
        mu[tuple(int(x) for x in outcome)] = _parse_prob(p)
    distance, dec = tv_to_mixture_family(mu, Q, k, args.t_min, cap=args.cap_lp)
    out = {
        "distance": distance,
        "distance_exact": _json_safe(dec.distance),
        "terms": [
            {
                "coords": list(t.coords),
                "weight": _json_safe(t.weight),
                "junk": {",".join(map(str, o)): _json_safe(p) for o, p in t.junk.items()},
            }
            for t in dec.terms
        ],
    }
    body = json.dumps(out, indent=2, sort_keys=True) + "\n"
    write_outputs(args, {"decompose.json": body}, summary={"distance": distance})
    sys.stdout.write(body)
    return 0


# ---------------------------------------------------------------------------
# table


def _builtin_game(name: str) -> GameSpec:
    if name == "toy-equality":
        # One-bit questions from a shared seed bit; win iff the answers agree.
        return GameSpec(1, 1, 1, lambda s: (s, s), lambda x, y, aa, ab: aa == ab)
    if name == "toy-equality-gapless":
        return GameSpec(
            1, 1, 1, lambda s: (s, s), lambda x, y, aa, ab: aa == ab, gapless=True
        )
    if name == "toy-xor":
        # Two seed bits split into the questions; win iff aA xor aB = x and y.
        return GameSpec(
            2,
            1,
            1,
            lambda s: (s & 1, s >> 1),
            lambda x, y, aa, ab: (aa ^ ab) == (x & y),
        )
    raise InputError(
        f"unknown built-in game {name!r}; "
        "expected toy-equality, toy-equality-gapless, or toy-xor"
    )


def cmd_table(args) -> int:
    spec = _builtin_game(args.name)
    table = extract_game_table(spec, args.delta)
    blob = table.serialize()
    out_name = args.out if args.out else f"{args.name}.qfgt"
    report = {
        "name": args.name,
        "q": spec.q,
        "a": spec.a,
        "delta": args.delta,
        "gapless": spec.gapless,
        "rows": 2 ** (2 * (spec.q + spec.a)),
        "payload_bits": table.bit_size,
        "file_bytes": len(blob),
        "dtime_advice": dtime_advice_bounds(
            spec.r, spec.q, spec.a, t=1, delta=args.delta, gapless=spec.gapless
        ),
    }
    body = json.dumps(_json_safe(report), indent=2, sort_keys=True) + "\n"
    write_outputs(args, {out_name: blob, "table_report.json": body})
    sys.stdout.write(body)
    return 0


# ---------------------------------------------------------------------------
# ledger, lower-bound


def _ledger_config(args) -> LedgerConfig:
    return LedgerConfig(
        log2_X_MS=args.log2_xms,
        C=args.C,
        beta=args.beta,
        A=args.A,
        alpha=args.alpha,
        G=args.G,
    )


def cmd_ledger(args) -> int:
    config = _ledger_config(args)
    if args.sweep:
        header = ["l0_exp", "l0", "iterations", "log_star", "bound_3logstar", "within"]
        rows = []
        for e in range(2, args.sweep_max_exp + 1):
            l0 = 2**e
            if args.mode == "gapless":
                _, count = gapless_recursion(l0, config)
            else:
                _, count, _ = gapped_recursion(l0, config)
            ls = log_star(l0)
            rows.append([e, l0, count, ls, 3 * ls, count <= 3 * ls])
        name = f"ledger-sweep-{args.mode}"
        summary = {"mode": args.mode, "all_within": all(r[5] for r in rows)}
    else:
        if args.l0 is None:
            raise InputError("need --l0 <length> or --sweep")
        if args.mode == "gapless":
            trajectory, count = gapless_recursion(args.l0, config)
        else:
            trajectory, count, _ = gapped_recursion(args.l0, config)
        header = ["step", "ell"]
        rows = [[0, args.l0]] + [[i + 1, ell] for i, ell in enumerate(trajectory)]
        name = f"ledger-{args.mode}"
        summary = {
            "mode": args.mode,
            "iterations": count,
            "Q0": config.Q0_gapless if args.mode == "gapless" else config.Q0_gapped,
            "trajectory": trajectory,
        }
    body = _table_body(args.format, header, rows)
    write_outputs(args, {f"{name}.{_ext(args.format)}": body}, summary)
    sys.stdout.write(body)
    return 0


def cmd_lower_bound(args) -> int:
    n_values = None
    if args.n_max_exp is not None:
        n_values = sorted(
            {2**e for e in range(1, args.n_max_exp + 1)}
            | {3 * 2**e for e in range(1, args.n_max_exp)}
        )
    result = lower_bound_margin(args.gamma, args.c, args.eps, args.delta, n_values)
    header = ["n", "qa", "left", "right", "dominates"]
    rows = [[r["n"], r["qa"], r["left"], r["right"], r["dominates"]] for r in result["rows"]]
    body = _table_body(args.format, header, rows)
    write_outputs(
        args,
        {f"lower-bound.{_ext(args.format)}": body},
        summary={"crossover_n0": result["crossover_n0"]},
    )
    sys.stdout.write(body)
    print(f"crossover_n0={result['crossover_n0']}", file=sys.stderr)
    return 0


# ---------------------------------------------------------------------------
# Parser and entry point


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="qfree",
        description="Free-game protocol simulator and exact-analysis toolkit.",
        allow_abbrev=False,
    )
    p.add_argument("--seed", type=int, default=None, help="master RNG seed")
    p.add_argument("--out-dir", default=".", help="directory for results + manifest")
    p.add_argument("--cap-dim", type=int, default=DEFAULT_DIM_CAP)
    p.add_argument("--cap-lp", type=int, default=DEFAULT_LP_CAP)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("reduce", help="3-SAT DIMACS to coloring instance")
    sp.add_argument("cnf")
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_reduce)

    sp = sub.add_parser("simulate", help="protocol acceptance probabilities")
    sp.add_argument("instance")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--eta", type=float, required=True)
    sp.add_argument("--adversary", default="honest")
    sp.add_argument("--mode", choices=["exact", "sample"], default="exact")
    sp.add_argument("--samples", type=int, default=2000)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("sweep", help="parameter-grid experiments")
    sp.add_argument(
        "--kind",
        choices=["tv-vs-eps", "completeness-vs-k", "value-gap"],
        required=True,
    )
    sp.add_argument("--Q", type=int, default=2)
    sp.add_argument("--k", type=int, default=2)
    sp.add_argument("--eta", type=float, default=0.5)
    sp.add_argument("--K-prime", dest="K_prime", type=int, default=2)
    sp.add_argument("--eps", default="0.3,0.1,0.03,0.01,0.003")
    sp.add_argument("--k-max", dest="k_max", type=int, default=2)
    sp.add_argument("--instance", default=None)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("game-value", help="exact consistency-game value")
    sp.add_argument("--instance", required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--ell", type=int, required=True)
    sp.add_argument("--model", choices=["tuple", "subset"], default="tuple")
    sp.set_defaults(func=cmd_game_value)

    sp = sub.add_parser("decompose", help="TV distance to the mixture family")
    sp.add_argument("dist", help="distribution JSON: {Q, k, atoms: [[outcome, p]]}")
    sp.add_argument("--t-min", dest="t_min", type=int, required=True)
    sp.set_defaults(func=cmd_decompose)

    sp = sub.add_parser("table", help="tabulate a built-in toy game")
    sp.add_argument("name")
    sp.add_argument("--delta", type=int, default=1)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_table)

    sp = sub.add_parser("ledger", help="compression-recursion trajectories")
    sp.add_argument("--mode", choices=["gapless", "gapped"], default="gapless")
    sp.add_argument("--l0", type=int, default=None)
    sp.add_argument("--sweep", action="store_true")
    sp.add_argument("--sweep-max-exp", dest="sweep_max_exp", type=int, default=40)
    sp.add_argument("--log2-xms", dest="log2_xms", type=int, default=10)
    sp.add_argument("--C", type=float, default=2.0)
    sp.add_argument("--beta", type=float, default=2.0)
    sp.add_argument("--A", type=float, default=1.0)
    sp.add_argument("--alpha", type=float, default=1.0)
    sp.add_argument("--G", type=float, default=None)
    sp.set_defaults(func=cmd_ledger)

    sp = sub.add_parser("lower-bound", help="advice-versus-n margin table")
    sp.add_argument("--gamma", type=float, required=True)
    sp.add_argument("--c", type=float, required=True)
    sp.add_argument("--eps", type=float, required=True)
    sp.add_argument("--delta", type=int, default=1)
    sp.add_argument("--n-max-exp", dest="n_max_exp", type=int, default=None)
    sp.set_defaults(func=cmd_lower_bound)

    return p


def main(argv: list[str] | None = None) -> int:
    try:
        _setup_logging()
        args = build_parser().parse_args(argv)
        if args.cap_dim <= 0 or args.cap_lp <= 0:
            raise InputError("caps must be positive")
        return args.func(args)
    except InputError as exc:
        print(f"error\tinput\t{exc}", file=sys.stderr)
        return 2
    except CapExceededError as exc:
        print(f"error\tcap\t{exc}", file=sys.stderr)
        return 3
    except InternalInvariantError as exc:
        print(f"error\tinternal\t{exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
