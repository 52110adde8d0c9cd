"""Batch command-line interface with machine-readable JSON output.

Exit codes: 0 success, 1 domain failure (not free, no candidate exponents,
failed check), 2 usage or parse errors. Exact quantities are emitted as
integer or rational strings; only losses, scores and timings are floats.
"""

from __future__ import annotations

import argparse
import json
import sys

from .arrangement import (
    Arrangement,
    arrangement_hash,
    arrangement_to_json,
    candidate_exponents,
    characteristic_polynomial,
    discriminant,
    intersection_summary,
    no_exponent_reason,
    read_arrangement,
    tjurina,
    write_arrangement,
)
from .certify import (
    Certified,
    NoCandidateExponents,
    NotFreeAtExponents,
    certificate_to_json,
    check_certificate,
    read_certificate,
    verify_arrangement,
    verify_free,
    write_certificate,
)
from .saito import ALSConfig, NoCandidateExponents as NoExponentsError, saito_functional
from .scores import RewardWeights
from .search import (
    Catalog,
    ExtensionConfig,
    beam_search_build,
    bootstrap_extend,
    candidate_pool,
    cascade,
    construct_certified,
    save_catalog,
)

USAGE_ERROR = 2
DOMAIN_ERROR = 1


def _emit(command: str, payload: dict, input_hash: str | None = None) -> None:
    print(json.dumps({"command": command, "input_hash": input_hash, "payload": payload}, indent=2))


def _load(path: str) -> Arrangement:
    try:
        return read_arrangement(path)
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(json.dumps({"command": "parse", "error": f"{path}: {exc}"}), file=sys.stderr)
        raise SystemExit(USAGE_ERROR)


def _parse_exponents(text: str | None) -> tuple[int, int] | None:
    if text is None:
        return None
    try:
        d1, d2 = (int(x) for x in text.split(","))
    except ValueError:
        raise SystemExit(USAGE_ERROR)
    return d1, d2


def _als_config(args) -> ALSConfig:
    return ALSConfig(iterations=args.als_iters, restarts=args.als_restarts, rng_seed=args.seed)


def _exponents_for(arr: Arrangement, args) -> tuple[int, int] | None:
    exps = _parse_exponents(getattr(args, "exponents", None))
    if exps is not None:
        return exps
    auto = candidate_exponents(arr)
    return (auto.d1, auto.d2) if auto is not None else None


def cmd_invariants(args) -> int:
    arr = _load(args.file)
    s = intersection_summary(arr)
    chi = characteristic_polynomial(arr)
    exps = candidate_exponents(arr)
    payload = {
        "n": str(arr.n),
        "t": {str(m): str(cnt) for m, cnt in s.t.items()},
        "b2": str(s.b2),
        "pair_count_check": s.pair_count_check,
        "delta": str(discriminant(arr)),
        "exponents": [str(exps.d1), str(exps.d2)] if exps else None,
        "no_exponent_reason": no_exponent_reason(arr),
        "tjurina": str(tjurina(arr)),
        "chi_cubic": [str(c) for c in chi.cubic],
        "chi_quadratic": [str(c) for c in chi.quadratic],
    }
    _emit("invariants", payload, arrangement_hash(arr))
    return 0


def cmd_saito(args) -> int:
    arr = _load(args.file)
    exps = _exponents_for(arr, args)
    if exps is None:
        _emit(
            "saito",
            {"error": "no-candidate-exponents", "reason": no_exponent_reason(arr)},
            arrangement_hash(arr),
        )
        return DOMAIN_ERROR
    ev = saito_functional(arr, exps[0], exps[1], config=_als_config(args))
    payload = {
        "loss": ev.loss,
        "exponents": [str(ev.d1), str(ev.d2)],
        "k1": str(ev.k1),
        "k2": str(ev.k2),
        "restart_losses": list(ev.result.restart_losses) if ev.result else [],
        "elapsed_ms": ev.elapsed_ms,
        "reason": ev.reason,
    }
    _emit("saito", payload, arrangement_hash(arr))
    return 0


def cmd_verify(args) -> int:
    arr = _load(args.file)
    exps = _exponents_for(arr, args)
    if exps is None:
        _emit(
            "verify",
            {"verdict": "no-candidate-exponents", "reason": no_exponent_reason(arr)},
            arrangement_hash(arr),
        )
        return DOMAIN_ERROR
    outcome = verify_free(arr, exps[0], exps[1])
    if isinstance(outcome, Certified):
        cert = outcome.certificate
        cert_path = args.certificate_out or (args.file + ".cert.json")
        write_certificate(cert_path, cert)
        _emit(
            "verify",
            {
                "verdict": "certified",
                "exponents": [str(cert.d1), str(cert.d2)],
                "c": str(cert.c),
                "certificate_path": cert_path,
            },
            arrangement_hash(arr),
        )
        return 0
    assert isinstance(outcome, NotFreeAtExponents)
    _emit(
        "verify",
        {
            "verdict": "not-free-at-exponents",
            "exponents": [str(outcome.d1), str(outcome.d2)],
            "pairs_scanned": str(outcome.pairs_scanned),
        },
        arrangement_hash(arr),
    )
    return DOMAIN_ERROR


def cmd_check(args) -> int:
    arr = _load(args.file)
    try:
        cert = read_certificate(args.certificate)
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(json.dumps({"command": "check", "error": str(exc)}), file=sys.stderr)
        return USAGE_ERROR
    ok, failing = check_certificate(arr, cert)
    _emit(
        "check",
        {"verdict": "valid" if ok else "invalid", "first_failing_check": failing},
        arrangement_hash(arr),
    )
    return 0 if ok else DOMAIN_ERROR


def cmd_construct(args) -> int:
    if not 1 <= args.d1 <= args.d2:
        print("need 1 <= d1 <= d2", file=sys.stderr)
        return USAGE_ERROR
    disc = construct_certified(args.d1, args.d2)
    payload = {
        "arrangement": arrangement_to_json(disc.arrangement),
        "certificate": certificate_to_json(disc.certificate),
        "n": str(disc.arrangement.n),
    }
    if args.out:
        import os

        os.makedirs(args.out, exist_ok=True)
        base = f"two_pencil_{args.d1}x{args.d2}"
        write_arrangement(os.path.join(args.out, base + ".json"), disc.arrangement)
        write_certificate(os.path.join(args.out, base + ".cert.json"), disc.certificate)
        payload["written_to"] = args.out
    _emit("construct", payload, arrangement_hash(disc.arrangement))
    return 0


def _file_config(args) -> dict:
    """Optional JSON config: weights, pool_bound, prefilter_threshold, beam, threads."""
    path = getattr(args, "config", None)
    if not path:
        return {}
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(json.dumps({"command": "config", "error": str(exc)}), file=sys.stderr)
        raise SystemExit(USAGE_ERROR)
    if not isinstance(data, dict):
        raise SystemExit(USAGE_ERROR)
    return data


def _weights_from(cfg: dict) -> RewardWeights:
    fields = {k: v for k, v in cfg.get("weights", {}).items()}
    return RewardWeights(**fields) if fields else RewardWeights()


def _extension_config(args) -> ExtensionConfig:
    cfg = _file_config(args)
    return ExtensionConfig(
        prefilter_threshold=cfg.get("prefilter_threshold", args.prefilter_threshold),
        pool_bound=cfg.get("pool_bound", args.pool_bound),
        delta_b2_target=getattr(args, "delta_b2", None),
        als=_als_config(args),
        threads=cfg.get("threads", args.threads),
    )


def cmd_extend(args) -> int:
    arr = _load(args.file)
    seed_outcome = verify_arrangement(arr)
    if not isinstance(seed_outcome, Certified):
        _emit("extend", {"error": "seed-not-certified"}, arrangement_hash(arr))
        return DOMAIN_ERROR
    discoveries = bootstrap_extend(arr, args.d1, args.d2, _extension_config(args))
    payload = {
        "seed_exponents": [str(seed_outcome.certificate.d1), str(seed_outcome.certificate.d2)],
        "discoveries": [
            {
                "arrangement": arrangement_to_json(d.arrangement),
                "certificate": certificate_to_json(d.certificate),
                "provenance": d.provenance,
            }
            for d in discoveries
        ],
    }
    if args.out:
        catalog = Catalog()
        for d in discoveries:
            catalog.add(d)
        payload["index"] = save_catalog(catalog, args.out)
    _emit("extend", payload, arrangement_hash(arr))
    return 0


def cmd_search(args) -> int:
    cfg = _file_config(args)
    entries = beam_search_build(
        args.n,
        args.d1,
        args.d2,
        weights=_weights_from(cfg),
        pool=candidate_pool(cfg.get("pool_bound", args.pool_bound)),
        beam_width=cfg.get("beam", args.beam),
        seed=args.seed,
    )
    payload = {
        "beam": [
            {
                "arrangement": arrangement_to_json(e.arrangement),
                "cumulative_reward": e.cumulative_reward,
                "sigma_alg": e.sigma_alg,
                "verdict": (
                    "certified"
                    if isinstance(e.outcome, Certified)
                    else "not-free-at-exponents"
                    if isinstance(e.outcome, NotFreeAtExponents)
                    else "no-candidate-exponents"
                ),
            }
            for e in entries
        ]
    }
    _emit("search", payload)
    return 0


def cmd_cascade(args) -> int:
    seeds = [_load(path) for path in args.seeds]
    targets = None
    if args.targets:
        targets = []
        for pair in args.targets.split(";"):
            d1, d2 = (int(x) for x in pair.split(","))
            targets.append((d1, d2))
    catalog = cascade(seeds, args.n_max, targets, _extension_config(args))
    payload = {
        "levels": {
            f"{n},{d1},{d2}": str(len(ds))
            for (n, d1, d2), ds in sorted(catalog.entries.items())
        },
        "total": str(catalog.size),
    }
    if args.out:
        payload["index"] = save_catalog(catalog, args.out)
    _emit("cascade", payload)
    return 0


def cmd_survey(args) -> int:
    rows = []
    for path in args.files:
        arr = _load(path)
        exps = _exponents_for(arr, args)
        if exps is None:
            rows.append(
                {
                    "file": path,
                    "n": str(arr.n),
                    "loss": None,
                    "reason": no_exponent_reason(arr),
                }
            )
            continue
        ev = saito_functional(arr, exps[0], exps[1], config=_als_config(args))
        rows.append(
            {
                "file": path,
                "n": str(arr.n),
                "exponents": [str(ev.d1), str(ev.d2)],
                "loss": ev.loss,
                "elapsed_ms": ev.elapsed_ms,
            }
        )
    _emit("survey", {"rows": rows})
    return 0


def _add_als_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--als-iters", type=int, default=10)
    p.add_argument("--als-restarts", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="freelines")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("invariants", help="lattice invariants of an arrangement file")
    p.add_argument("file")
    p.set_defaults(func=cmd_invariants)

    p = sub.add_parser("saito", help="evaluate the freeness loss")
    p.add_argument("file")
    p.add_argument("--exponents", help="d1,d2 override")
    _add_als_flags(p)
    p.set_defaults(func=cmd_saito)

    p = sub.add_parser("verify", help="exact freeness certification")
    p.add_argument("file")
    p.add_argument("--exponents", help="d1,d2 override")
    p.add_argument("--certificate-out", help="path for the certificate file")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("check", help="re-check a certificate against an arrangement")
    p.add_argument("file")
    p.add_argument("certificate")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("construct", help="certified two-pencil arrangement")
    p.add_argument("d1", type=int)
    p.add_argument("d2", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("extend", help="bootstrap extension of a certified seed")
    p.add_argument("file")
    p.add_argument("d1", type=int)
    p.add_argument("d2", type=int)
    p.add_argument("--pool-bound", type=int, default=2)
    p.add_argument("--prefilter-threshold", type=float, default=0.05)
    p.add_argument("--delta-b2", type=int, help="override the derived delta-b2 target")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--config", help="JSON config for weights/pool/thresholds")
    p.add_argument("--out")
    _add_als_flags(p)
    p.set_defaults(func=cmd_extend)

    p = sub.add_parser("search", help="deterministic beam-search construction")
    p.add_argument("n", type=int)
    p.add_argument("d1", type=int)
    p.add_argument("d2", type=int)
    p.add_argument("--beam", type=int, default=4)
    p.add_argument("--pool-bound", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--config", help="JSON config for weights/pool/thresholds")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("cascade", help="level-by-level bootstrap cascade")
    p.add_argument("seeds", nargs="*")
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--targets", help="semicolon-separated d1,d2 pairs")
    p.add_argument("--pool-bound", type=int, default=2)
    p.add_argument("--prefilter-threshold", type=float, default=0.05)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--config", help="JSON config for weights/pool/thresholds")
    p.add_argument("--out")
    _add_als_flags(p)
    p.set_defaults(func=cmd_cascade)

    p = sub.add_parser("survey", help="batch freeness-loss table over files")
    p.add_argument("files", nargs="+")
    p.add_argument("--exponents", help="d1,d2 override for every file")
    _add_als_flags(p)
    p.set_defaults(func=cmd_survey)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NoExponentsError as exc:
        print(json.dumps({"command": args.command, "error": str(exc)}), file=sys.stderr)
        return DOMAIN_ERROR
    except BrokenPipeError:  # pragma: no cover
        return 0


if __name__ == "__main__":
    sys.exit(main())
