"""Command-line harness tying streams, algorithms, oracle, and the game together.

Exit codes: 0 success, 2 validation or configuration error, 3 I/O error.
``SEMIMATCH_SEED`` supplies the default seed; flags override it.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
import time
from typing import Optional, Sequence

from . import adversary as adv
from .bucket import (
    BucketConfig,
    choose_q,
    ensemble_states,
    randomized_ratio_bound,
    stream_bucket_run,
)
from .certificate import build_certificate, filter_to_final_window
from .core import StreamSource, format_stream, load_stream
from .generators import (
    ExponentialClassWeights,
    RandomInstanceConfig,
    TightExampleConfig,
    UniformWeights,
    permute_stream,
    random_instance,
    tight_instance,
)
from .oracle import OracleLimit, OracleLimitError, max_weight_matching_exact
from .preemptive import make_victim

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3

VARIANTS = ("deterministic", "shifted", "ensemble")


def _default_seed() -> int:
    raw = os.environ.get("SEMIMATCH_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"SEMIMATCH_SEED must be an integer, got {raw!r}") from None


def _sha256(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        digest.update(handle.read())
    return digest.hexdigest()


def _matching_payload(matching) -> list[list[float]]:
    return [[e.u, e.v, e.weight] for e in matching]


def _parse_law(text: str):
    """Parse a weight law: 'uniform:<lo>,<hi>' or 'expclasses:<gamma>,<depth>'."""
    name, _, rest = text.partition(":")
    parts = rest.split(",") if rest else []
    if name == "uniform" and len(parts) == 2:
        return UniformWeights(lo=float(parts[0]), hi=float(parts[1]))
    if name == "expclasses" and len(parts) == 2:
        return ExponentialClassWeights(gamma=float(parts[0]), depth=int(parts[1]))
    raise ValueError(
        f"bad weight law {text!r}; use uniform:<lo>,<hi> or expclasses:<gamma>,<depth>")


def _emit(payload: dict, out: Optional[str]) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True)
    if out:
        with open(out, "w", encoding="utf-8") as handle:
            handle.write(text + "\n")
    else:
        print(text)


def _run_variant(stream: StreamSource, variant: str, gamma: float, epsilon: float,
                 delta: float, q: Optional[int]) -> dict:
    """Execute one single-pass run and collect the result record."""
    started = time.perf_counter()
    if variant == "ensemble":
        q = q if q is not None else choose_q(gamma, epsilon)
        states = ensemble_states(stream, gamma, epsilon, q)
        per_copy = [s.finalize() for s in states]
        best = per_copy[0]
        for cand in per_copy[1:]:
            if cand.weight > best.weight:
                best = cand
        record = {
            "variant": variant,
            "gamma": gamma,
            "epsilon": epsilon,
            "q": q,
            "matching": _matching_payload(best),
            "weight": best.weight,
            "per_copy_weights": [m.weight for m in per_copy],
            "stored_edge_peak": sum(s.stored_edge_peak for s in states),
            "edges_processed": sum(s.edges_processed for s in states),
        }
    else:
        d = 0.0 if variant == "deterministic" else delta
        state = stream_bucket_run(stream, BucketConfig(
            gamma=gamma, epsilon=epsilon, num_vertices=stream.num_vertices, delta=d))
        matching = state.finalize()
        record = {
            "variant": variant,
            "gamma": gamma,
            "epsilon": epsilon,
            "delta": d,
            "matching": _matching_payload(matching),
            "weight": matching.weight,
            "stored_edge_peak": state.stored_edge_peak,
            "edges_processed": state.edges_processed,
        }
    record["stream_passes"] = stream.passes
    record["wall_time_s"] = time.perf_counter() - started
    return record


def cmd_run(args: argparse.Namespace) -> int:
    stream, mapping = load_stream(args.stream)
    record = _run_variant(stream, args.variant, args.gamma, args.epsilon,
                          args.delta, args.q)
    report = {
        "command": "run",
        "config": {
            "stream": args.stream,
            "stream_sha256": _sha256(args.stream),
            "variant": args.variant,
            "gamma": args.gamma,
            "epsilon": args.epsilon,
            "delta": args.delta if args.variant == "shifted" else None,
            "q": record.get("q"),
            "num_vertices": stream.num_vertices,
            "num_edges": len(stream),
        },
        "seed": args.seed,
        "result": record,
    }
    if mapping is not None:
        report["vertex_labels"] = mapping
    if args.with_oracle:
        limit = OracleLimit(max_vertices=args.oracle_max_vertices,
                            max_edges=args.oracle_max_edges)
        opt, opt_weight = max_weight_matching_exact(stream.edges, limit)
        report["result"]["oracle_weight"] = opt_weight
        report["result"]["ratio_vs_oracle"] = (
            opt_weight / record["weight"] if record["weight"] > 0 else None)
    _emit(report, args.out)
    return EXIT_OK


def cmd_certificate(args: argparse.Namespace) -> int:
    stream, _mapping = load_stream(args.stream)
    delta = args.delta if args.variant == "shifted" else 0.0
    state = stream_bucket_run(stream, BucketConfig(
        gamma=args.gamma, epsilon=args.epsilon,
        num_vertices=stream.num_vertices, delta=delta))
    survivors = filter_to_final_window(state, stream.edges)
    limit = OracleLimit(max_vertices=args.oracle_max_vertices,
                        max_edges=args.oracle_max_edges)
    opt, _w = max_weight_matching_exact(survivors, limit)
    cert = build_certificate(state, opt)
    gamma = cert.gamma
    report = {
        "command": "certificate",
        "config": {
            "stream": args.stream,
            "stream_sha256": _sha256(args.stream),
            "variant": args.variant,
            "gamma": args.gamma,
            "epsilon": args.epsilon,
            "delta": delta,
        },
        "alg_weight": cert.alg_weight,
        "opt_weight": cert.opt_weight,
        "opt_rounded": cert.opt_rounded,
        "total_associated_weight": cert.total_associated_weight,
        "chain_holds": cert.chain_holds(),
        "chain": {
            "opt_le_gamma_opt_rounded": cert.opt_weight <= gamma * cert.opt_rounded * (1 + 1e-9),
            "opt_rounded_le_tw": cert.opt_rounded <= cert.total_associated_weight * (1 + 1e-9),
            "tw_le_bound_times_alg": cert.total_associated_weight
            <= (2 * gamma / (gamma - 1)) * cert.alg_weight * (1 + 1e-9),
        },
        "per_vertex_association": {
            str(v): [i, w] for v, (i, w) in sorted(cert.per_vertex_association.items())},
    }
    _emit(report, args.out)
    return EXIT_OK


def cmd_oracle(args: argparse.Namespace) -> int:
    stream, _mapping = load_stream(args.stream)
    limit = OracleLimit(max_vertices=args.oracle_max_vertices,
                        max_edges=args.oracle_max_edges)
    matching, weight = max_weight_matching_exact(stream.edges, limit)
    _emit({
        "command": "oracle",
        "stream": args.stream,
        "stream_sha256": _sha256(args.stream),
        "matching": _matching_payload(matching),
        "weight": weight,
    }, args.out)
    return EXIT_OK


def cmd_gen(args: argparse.Namespace) -> int:
    if args.family == "tight":
        stream = tight_instance(TightExampleConfig(gamma=args.gamma, k=args.k, eps=args.eps))
    else:
        config = RandomInstanceConfig(
            n=args.n, m=args.m, weight_law=_parse_law(args.law), seed=args.seed)
        stream = random_instance(config)
    text = format_stream(stream)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_adversary(args: argparse.Namespace) -> int:
    victim = make_victim(args.victim)
    config = adv.AdversaryConfig(C=args.C, max_steps=args.max_steps)
    result = adv.run_adversary(victim, config)
    payload = result.to_json_dict()
    payload["command"] = "adversary"
    payload["victim"] = args.victim
    payload["C"] = args.C
    if args.transcript:
        with open(args.transcript, "w", encoding="utf-8") as handle:
            for record in result.transcript:
                handle.write(json.dumps(record, sort_keys=True) + "\n")
        payload["transcript"] = f"written to {args.transcript}"
    _emit(payload, args.out)
    return EXIT_OK


def cmd_verify_sequences(args: argparse.Namespace) -> int:
    table = adv.generate_sequences(args.C, max_steps=args.max_steps)
    params = adv.closed_form_params(args.C)
    identities = adv.verify_identities(table)
    cf_errors = [
        abs(adv.closed_form_S(params, j) - table.S[j]) / max(1.0, abs(table.S[j]))
        for j in range(table.n + 1)
    ]
    report = {
        "command": "verify-sequences",
        "C": args.C,
        "n": table.n,
        "R": adv.solve_R(),
        "identities_ok": identities.ok,
        "identities_max_rel_error": identities.max_rel_error,
        "closed_form_max_rel_error": max(cf_errors),
        "closed_form_params": {
            "r": params.r, "theta": params.theta, "A": params.A,
            "x1": [params.x1.real, params.x1.imag],
        },
        "sign_change_recurrence": adv.first_nonpositive_recurrence(args.C),
        "sign_change_closed_form": adv.first_nonpositive_closed_form(params),
    }
    if identities.first_failure is not None:
        report["first_failure"] = list(identities.first_failure)
    _emit(report, args.out)
    return EXIT_OK if identities.ok else EXIT_CONFIG


def cmd_sweep(args: argparse.Namespace) -> int:
    gammas = [float(g) for g in args.gammas.split(",") if g]
    seeds = [int(s) for s in args.seeds.split(",") if s] if args.seeds else []
    limit = OracleLimit(max_vertices=args.oracle_max_vertices,
                        max_edges=args.oracle_max_edges)
    rows: list[dict] = []
    for seed in seeds:
        if args.family == "tight":
            stream = tight_instance(TightExampleConfig(gamma=2.0, k=args.k, eps=1e-6))
        else:
            stream = random_instance(RandomInstanceConfig(
                n=args.n, m=args.m, weight_law=_parse_law(args.law), seed=seed))
        try:
            _opt, opt_weight = max_weight_matching_exact(stream.edges, limit)
        except OracleLimitError:
            opt_weight = None
        for gamma in gammas:
            for variant in ("deterministic", "ensemble"):
                record = _run_variant(
                    permute_stream(stream, seed), variant, gamma, args.epsilon,
                    0.0, None)
                ratio = (opt_weight / record["weight"]
                         if opt_weight is not None and record["weight"] > 0 else None)
                rows.append({
                    "variant": variant,
                    "gamma": gamma,
                    "seed": seed,
                    "n": stream.num_vertices,
                    "m": len(stream),
                    "alg_weight": record["weight"],
                    "opt_weight": opt_weight,
                    "ratio": ratio,
                    "bound": randomized_ratio_bound(gamma),
                })
    fieldnames = ["variant", "gamma", "seed", "n", "m",
                  "alg_weight", "opt_weight", "ratio", "bound"]
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=fieldnames)
    writer.writeheader()
    for row in rows:
        writer.writerow({k: ("" if row[k] is None else row[k]) for k in fieldnames})
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as handle:
            handle.write(buffer.getvalue())
    else:
        sys.stdout.write(buffer.getvalue())
    if args.jsonl:
        with open(args.jsonl, "w", encoding="utf-8") as handle:
            for row in rows:
                handle.write(json.dumps(row, sort_keys=True) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="semimatch",
        description="Semi-streaming weighted matching toolkit and preemptive-matching adversary.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_oracle_limits(p: argparse.ArgumentParser) -> None:
        p.add_argument("--oracle-max-vertices", type=int, default=20)
        p.add_argument("--oracle-max-edges", type=int, default=64)

    p_run = sub.add_parser("run", help="run one variant over a stream file")
    p_run.add_argument("stream")
    p_run.add_argument("variant", choices=VARIANTS)
    p_run.add_argument("--gamma", type=float, required=True)
    p_run.add_argument("--epsilon", type=float, required=True)
    p_run.add_argument("--delta", type=float, default=0.0)
    p_run.add_argument("--q", type=int, default=None,
                       help="ensemble copies; omitted = smallest q within the epsilon budget")
    p_run.add_argument("--with-oracle", action="store_true",
                       help="also solve exactly (size-limited) and report the ratio")
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument("--out", default=None)
    add_oracle_limits(p_run)
    p_run.set_defaults(func=cmd_run)

    p_cert = sub.add_parser("certificate",
                            help="run, oracle the surviving edges, and emit the inequality chain")
    p_cert.add_argument("stream")
    p_cert.add_argument("--variant", choices=("deterministic", "shifted"),
                        default="deterministic")
    p_cert.add_argument("--gamma", type=float, required=True)
    p_cert.add_argument("--epsilon", type=float, required=True)
    p_cert.add_argument("--delta", type=float, default=0.0)
    p_cert.add_argument("--out", default=None)
    add_oracle_limits(p_cert)
    p_cert.set_defaults(func=cmd_certificate)

    p_oracle = sub.add_parser("oracle", help="print the exact optimal matching and weight")
    p_oracle.add_argument("stream")
    p_oracle.add_argument("--out", default=None)
    add_oracle_limits(p_oracle)
    p_oracle.set_defaults(func=cmd_oracle)

    p_gen = sub.add_parser("gen", help="generate an instance in the stream format")
    gen_sub = p_gen.add_subparsers(dest="family", required=True)
    p_tight = gen_sub.add_parser("tight", help="the tight ladder family")
    p_tight.add_argument("--gamma", type=float, required=True)
    p_tight.add_argument("--k", type=int, required=True)
    p_tight.add_argument("--eps", type=float, required=True)
    p_tight.add_argument("-o", "--out", default=None)
    p_tight.set_defaults(func=cmd_gen)
    p_rand = gen_sub.add_parser("random", help="seeded random instance")
    p_rand.add_argument("--n", type=int, required=True)
    p_rand.add_argument("--m", type=int, required=True)
    p_rand.add_argument("--law", default="uniform:1,100")
    p_rand.add_argument("--seed", type=int, default=None)
    p_rand.add_argument("-o", "--out", default=None)
    p_rand.set_defaults(func=cmd_gen)

    p_adv = sub.add_parser("adversary", help="play the lower-bound game against a victim")
    p_adv.add_argument("--victim", required=True,
                       help="'threshold:<c>' or 'hold-first'")
    p_adv.add_argument("--C", type=float, required=True)
    p_adv.add_argument("--max-steps", type=int, default=10 ** 6)
    p_adv.add_argument("--transcript", default=None,
                       help="write one JSON record per presented edge to this file")
    p_adv.add_argument("--out", default=None)
    p_adv.set_defaults(func=cmd_adversary)

    p_seq = sub.add_parser("verify-sequences",
                           help="check the weight-sequence identities and closed form")
    p_seq.add_argument("--C", type=float, required=True)
    p_seq.add_argument("--max-steps", type=int, default=10 ** 6)
    p_seq.add_argument("--out", default=None)
    p_seq.set_defaults(func=cmd_verify_sequences)

    p_sweep = sub.add_parser("sweep", help="ratio table over a gamma grid and seeds")
    p_sweep.add_argument("--family", choices=("random", "tight"), default="random")
    p_sweep.add_argument("--gammas", default="2,2.5,3,3.513,4")
    p_sweep.add_argument("--seeds", default="")
    p_sweep.add_argument("--n", type=int, default=12)
    p_sweep.add_argument("--m", type=int, default=30)
    p_sweep.add_argument("--k", type=int, default=2)
    p_sweep.add_argument("--law", default="uniform:1,100")
    p_sweep.add_argument("--epsilon", type=float, default=0.5)
    p_sweep.add_argument("--csv", default=None)
    p_sweep.add_argument("--jsonl", default=None)
    add_oracle_limits(p_sweep)
    p_sweep.set_defaults(func=cmd_sweep)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "seed", None) is None and hasattr(args, "seed"):
            args.seed = _default_seed()
        return args.func(args)
    except OSError as exc:
        print(f"semimatch: i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, OracleLimitError, adv.ContractViolationError) as exc:
        print(f"semimatch: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
