"""Command line entry point: ``schattenmult {verify,gen,mult,bounds}``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import banach_p as bp
from .errors import SchattenMultError
from .harness.campaign import CampaignConfig, run_campaign
from .harness.generate import KINDS, generate_instance
from .harness.suites import suite_names
from .hs_frames import frame_bounds, frame_bounds_unsquared, is_riesz_basis
from .jsonio import dump_json, load_json, matrix_to_json, symbol_from_json, system_from_json
from .schatten_core import conjugate_exponent
from .multipliers import (
    MultiplierReport,
    assemble,
    riesz_invertibility_check,
    schatten_class_bound_check,
    upper_bound_check,
)

BANACH_KEYS = {"p", "r1", "r2", "samples", "seed"}


def _parse_dims(text: str) -> tuple[int, int, int]:
    try:
        d, N, n = (int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected d,N,n (three integers), got {text!r}") from None
    return d, N, n


def _parse_suites(text: str) -> list:
    names = [s.strip() for s in text.split(",") if s.strip()]
    unknown = [s for s in names if s not in suite_names()]
    if unknown:
        raise argparse.ArgumentTypeError(f"unknown suites {unknown}; known: {', '.join(suite_names())}")
    return names


def _emit(obj, out) -> None:
    if out:
        path = Path(out)
        if path.suffix != ".json":
            path = path / "output.json"
        dump_json(obj, path)
        print(path)
    else:
        print(json.dumps(obj, indent=1, default=str))


def _banach_config(path) -> dict:
    cfg = load_json(path)
    extra = set(cfg) - BANACH_KEYS
    if extra:
        raise SchattenMultError(f"{path}: unknown keys {sorted(extra)}; expected {sorted(BANACH_KEYS)}")
    return {"p": 2.0, "r1": 2.0, "r2": 2.0, "samples": 1000, "seed": 0, **cfg}


def cmd_verify(args) -> int:
    cfg = CampaignConfig.load(args.config) if args.config else CampaignConfig()
    if args.seed is not None:
        cfg.seeds = list(range(args.seed, args.seed + len(cfg.seeds)))
    if args.suite is not None:
        cfg.suites = args.suite
    if args.tol is not None:
        cfg.tol = args.tol
    if args.out is not None:
        cfg.out_dir = args.out
    cfg.__post_init__()
    report = run_campaign(cfg)
    for s in report.suites:
        status = "PASS" if s.failed == 0 else "FAIL"
        print(f"{status} {s.name}: {s.passes}/{s.instances} instances, worst residual {s.worst_residual:.3e}")
        for n in s.notes:
            print(f"     note: {n}")
    print(f"{report.failed_instances} failed instance(s) in {report.meta['elapsed_s']} s")
    if "files" in report.meta:
        for k, v in report.meta["files"].items():
            print(f"{k}: {v}")
    return report.exit_code


def cmd_gen(args) -> int:
    target = args.target_cond
    seed = args.seed if args.seed is not None else 0
    dims = args.dims
    if args.config:
        cfg = load_json(args.config)
        seed = int(cfg.get("seed", seed))
        dims = (int(cfg["d"]), int(cfg["N"]), int(cfg["n"]))
        target = cfg.get("target_cond", target)
    if dims is None:
        raise SchattenMultError("gen needs --dims d,N,n or a --config with d, N, n")
    manifest = generate_instance(args.kind, dims, seed, args.out or ".", target)
    print(json.dumps({"info": manifest["info"], "paths": manifest["paths"]}, indent=1))
    return 0


def cmd_mult(args) -> int:
    F, G = system_from_json(load_json(args.F)), system_from_json(load_json(args.G))
    m = symbol_from_json(load_json(args.symbol))
    M = assemble(m, F, G)
    rep = MultiplierReport(instance={"d": F.d, "N": F.N, "n": F.n, "F": str(args.F), "G": str(args.G)})
    rep.merge(upper_bound_check(m, F, G))
    rep.merge(schatten_class_bound_check(m, F, G, args.p), prefix="C_p.")
    riesz = riesz_invertibility_check(m, F, G)
    rep.merge(riesz, prefix="riesz.")
    if riesz.skipped:
        rep.skipped = f"riesz: {riesz.skipped}"
    rep.residual("op_norm", M.op_norm)
    out = rep.to_dict()
    out["matrix"] = matrix_to_json(M.matrix)
    if args.config:
        bc = _banach_config(args.config)
        q = conjugate_exponent(bc["p"])
        camp = bp.inequality_campaign(
            m, bp.PBesselSystem.from_hs(F, q, bc["r2"]), bp.PBesselSystem.from_hs(G, bc["p"], bc["r1"]),
            int(bc["samples"]), int(bc["seed"]),
        )
        out["banach"] = camp.to_dict()
        ok = rep.passed and camp.passed
    else:
        ok = rep.passed
    _emit(out, args.out)
    return 0 if ok else 1


def cmd_bounds(args) -> int:
    G = system_from_json(load_json(args.system))
    A, B = frame_bounds(G)
    a, b = frame_bounds_unsquared(G)
    rc = is_riesz_basis(G)
    out = {
        "d": G.d, "N": G.N, "n": G.n,
        "frame_bounds_squared": {"lower": A, "upper": B},
        "frame_bounds_unsquared": {"lower": a, "upper": b},
        "is_frame": G.is_frame,
        "riesz": {"is_riesz": rc.is_riesz, "bounded_below": rc.bounded_below, "complete": rc.complete,
                  "lower": rc.lower, "upper": rc.upper},
    }
    if args.config:
        bc = _banach_config(args.config)
        P = bp.PBesselSystem.from_hs(G, bc["p"], bc["r1"])
        pb = bp.p_bessel_estimate(P, int(bc["samples"]), int(bc["seed"]))
        qr = bp.q_riesz_estimate(P, int(bc["samples"]), int(bc["seed"]))
        out["banach"] = {
            "p": bc["p"], "r": bc["r1"],
            "p_bessel": {"A": pb.A.to_dict(), "B": pb.B.to_dict()},
            "q_riesz": {"A": qr.A.to_dict(), "B": qr.B.to_dict()},
        }
    _emit(out, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="schattenmult", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run the verification campaign")
    v.add_argument("--config", help="campaign config JSON")
    v.add_argument("--seed", type=int, help="first seed; the seed count is kept from the config")
    v.add_argument("--out", help="directory for report.json and summary.csv")
    v.add_argument("--suite", type=_parse_suites, help="comma-separated suite names (empty string: none)")
    v.add_argument("--tol", type=float, help="replace every check threshold by this value")
    v.set_defaults(func=cmd_verify)

    g = sub.add_parser("gen", help="generate a random instance")
    g.add_argument("--kind", choices=KINDS, default="frame")
    g.add_argument("--dims", type=_parse_dims, help="d,N,n")
    g.add_argument("--seed", type=int)
    g.add_argument("--target-cond", type=float, dest="target_cond")
    g.add_argument("--config", help='generator JSON {"seed","d","N","n","target_cond"}')
    g.add_argument("--out", help="output directory (default: current directory)")
    g.set_defaults(func=cmd_gen)

    m = sub.add_parser("mult", help="assemble one multiplier and report its checks")
    m.add_argument("--F", required=True, help="system JSON for F")
    m.add_argument("--G", required=True, help="system JSON for G")
    m.add_argument("--symbol", required=True, help="symbol JSON")
    m.add_argument("--p", type=float, default=2.0, help="Schatten exponent for the C_p bound")
    m.add_argument("--config", help='optional general-exponent JSON {"p","r1","r2","samples","seed"}')
    m.add_argument("--out", help="output file or directory")
    m.set_defaults(func=cmd_mult)

    b = sub.add_parser("bounds", help="frame and Riesz bounds of a stored system")
    b.add_argument("--system", required=True, help="system JSON")
    b.add_argument("--config", help='optional general-exponent JSON {"p","r1","r2","samples","seed"}')
    b.add_argument("--out", help="output file or directory")
    b.set_defaults(func=cmd_bounds)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (SchattenMultError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
