"""Command-line runner for frame scenarios.

Usage::

    proframes verify scenarios/standard_basis.json --frame e
    proframes check-duality s.json --frame1 f --frame2 g --tol 1e-8
    proframes gen --seed 42 --levels 2 --blocks 2,1 --rank 2 --count 4

Every command prints one JSON report (or writes it to ``--output``).  Exit
codes: 0 when the checked property holds, 1 when it fails, 2 when the input
is invalid.  Reports are byte-for-byte reproducible; ``--timing`` adds the
wall time and is the one flag that breaks that.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from . import frames as fr
from . import generate, oracle
from .errors import NotAFrame, NotScalarLevels, ParseError, ProFrameError, ValidationError
from .hilbert_module import ModuleSpace, bounded_module_norm, module_seminorm
from .serialize import (
    Scenario,
    dumps,
    frame_to_json,
    load_scenario,
    operator_to_json,
    scenario_to_json,
)

EXIT_OK, EXIT_FAIL, EXIT_INVALID = 0, 1, 2


class InputError(Exception):
    """Bad command-line usage that maps to exit code 2."""


def _pick_frame(s: Scenario, name: Optional[str], flag: str = "--frame") -> tuple[str, fr.Frame]:
    if name is None:
        if len(s.frames) != 1:
            raise InputError(f"{flag} is required when the scenario has {len(s.frames)} frames")
        name = next(iter(s.frames))
    if name not in s.frames:
        raise InputError(f"no frame named {name!r}; have {sorted(s.frames)}")
    return name, s.frames[name]


def _levels(s: Scenario) -> range:
    return range(1, s.chain.num_levels + 1)


def cmd_bounds(s: Scenario, args, tol: float) -> tuple[dict, bool]:
    name, frame = _pick_frame(s, args.frame)
    b = fr.optimal_bounds(frame)
    report = {"frame": name, "N": len(frame), **b.as_dict(), "is_frame": b.is_frame}
    return report, b.is_frame


def cmd_verify(s: Scenario, args, tol: float) -> tuple[dict, bool]:
    name, frame = _pick_frame(s, args.frame)
    b = fr.optimal_bounds(frame)
    per_level_normalized = fr.normalized_by_level(frame, tol)
    norms = fr.frame_membership_boundedness(frame)
    sampled = oracle.sampled_order_check(frame, b, args.trials, args.seed)
    report = {
        "frame": name,
        "N": len(frame),
        **b.as_dict(),
        "is_frame": b.is_frame,
        "normalized": fr.is_normalized(frame, tol),
        "normalized_by_level": per_level_normalized,
        "multiplier_norms": norms,
        "multiplier_norms_within_sqrt_D": all(x <= np.sqrt(b.upper) * (1 + tol) + tol for x in norms),
        "sampled_order_check": {"trials": args.trials, "seed": args.seed, "passed": sampled},
    }
    for row, ok in zip(report["levels"], per_level_normalized):
        row["normalized"] = ok
    return report, b.is_frame and sampled


def cmd_transform(s: Scenario, args, tol: float) -> tuple[dict, bool]:
    name, frame = _pick_frame(s, args.frame)
    bundle = fr.frame_transform(frame, tol)
    report = {
        "frame": name,
        "theta": operator_to_json(bundle.theta),
        "gram": operator_to_json(bundle.gram),
        "inv_gram": operator_to_json(bundle.inv_gram),
    }
    return report, True


def cmd_reconstruct(s: Scenario, args, tol: float) -> tuple[dict, bool]:
    name, frame = _pick_frame(s, args.frame)
    normalized = fr.is_normalized(frame, tol)
    dual = fr.canonical_dual(frame, tol)
    rng = np.random.default_rng(args.seed)
    plain = mixed = 0.0
    for _ in range(args.trials):
        xi = generate.random_module_element(rng, s.space)
        scale = 1.0 + bounded_module_norm(xi)
        top = s.chain.num_levels
        plain = max(plain, module_seminorm(fr.reconstruct(frame, xi) - xi, top) / scale)
        mixed = max(mixed, module_seminorm(fr.mixed_reconstruct(frame, dual, xi) - xi, top) / scale)
    ok = mixed <= tol and (plain <= tol or not normalized)
    report = {
        "frame": name,
        "trials": args.trials,
        "seed": args.seed,
        "normalized": normalized,
        "max_relative_residual": plain,
        "max_relative_residual_with_dual": mixed,
        "reconstruction_identity_holds": plain <= tol,
    }
    return report, ok


def cmd_normalize(s: Scenario, args, tol: float) -> tuple[dict, bool]:
    name, frame = _pick_frame(s, args.frame)
    out = fr.normalize(frame, tol)
    b = fr.optimal_bounds(out)
    ok = fr.is_normalized(out, tol)
    return {"frame": name, "normalized_frame": frame_to_json(out), **b.as_dict(), "normalized": ok}, ok


def cmd_dual(s: Scenario, args, tol: float) -> tuple[dict, bool]:
    name, frame = _pick_frame(s, args.frame)
    dual = fr.canonical_dual(frame, tol)
    residuals = fr.duality_residuals(frame, dual)
    ok = all(r <= tol for r in residuals)
    return {"frame": name, "dual_frame": frame_to_json(dual), "duality_residuals": residuals, "dual": ok}, ok


def cmd_check_duality(s: Scenario, args, tol: float) -> tuple[dict, bool]:
    n1, f1 = _pick_frame(s, args.frame1, "--frame1")
    n2, f2 = _pick_frame(s, args.frame2, "--frame2")
    residuals = fr.duality_residuals(f1, f2)
    ok = all(r <= tol for r in residuals)
    report = {
        "frame1": n1,
        "frame2": n2,
        "levels": [{"level": lv, "residual": r} for lv, r in zip(_levels(s), residuals)],
        "max_residual": max(residuals),
        "dual": ok,
    }
    return report, ok


def cmd_bidual(s: Scenario, args, tol: float) -> tuple[dict, bool]:
    name, frame = _pick_frame(s, args.frame)
    r = fr.bidual_report(frame, tol)
    report = {
        "frame": name,
        "multiplier_gap": r.multiplier_gap,
        "inverse_dual_gram_gap": r.gram_identity_gap,
        "cross_transform_gap": r.cross_identity_gap,
        "bidual_is_frame": r.holds,
    }
    return report, r.holds


def cmd_cross_validate(s: Scenario, args, tol: float) -> tuple[dict, bool]:
    name, frame = _pick_frame(s, args.frame)
    r = oracle.cross_validate(frame, tol)
    return {"frame": name, **r.as_dict()}, r.passed


COMMANDS: dict[str, Callable] = {
    "verify": cmd_verify,
    "bounds": cmd_bounds,
    "transform": cmd_transform,
    "reconstruct": cmd_reconstruct,
    "normalize": cmd_normalize,
    "dual": cmd_dual,
    "check-duality": cmd_check_duality,
    "bidual": cmd_bidual,
    "cross-validate": cmd_cross_validate,
}


def generate_scenario(seed: int, levels: int, blocks, rank: int, count: int, projective: bool = False) -> Scenario:
    rng = generate.rng_for(seed)
    chain = generate.random_chain(rng, levels, blocks)
    space = generate.random_projective_space(rng, chain, rank) if projective else ModuleSpace(chain, rank)
    frame = generate.random_frame(rng, space, count)
    return Scenario(chain, space, {"f": frame})


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="proframes", description="Frames of multipliers over pro-C*-algebras.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, frame_flags=("--frame",)):
        p.add_argument("scenario", help="scenario JSON file")
        for flag in frame_flags:
            p.add_argument(flag, default=None, help="name of a frame in the scenario")
        p.add_argument("--tol", type=float, default=None, help="override the scenario tolerance")
        p.add_argument("--trials", type=int, default=100)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--output", default=None, help="write the report here instead of stdout")
        p.add_argument("--timing", action="store_true", help="include wall time (breaks byte-identity)")

    for name in COMMANDS:
        common(sub.add_parser(name), ("--frame1", "--frame2") if name == "check-duality" else ("--frame",))

    g = sub.add_parser("gen", help="write a seeded random scenario")
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--levels", type=int, default=2)
    g.add_argument("--blocks", default="2,1", help="comma-separated top-level block sizes")
    g.add_argument("--rank", type=int, default=2)
    g.add_argument("--count", type=int, default=4)
    g.add_argument("--projective", action="store_true", help="use a random summand P A^rank")
    g.add_argument("--output", default=None)
    return ap


def _write(text: str, output: Optional[str]):
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _fail(msg: str) -> int:
    sys.stderr.write(f"proframes: error: {msg}\n")
    return EXIT_INVALID


def run(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK

    if args.command == "gen":
        try:
            blocks = [int(x) for x in args.blocks.split(",") if x.strip()]
            s = generate_scenario(args.seed, args.levels, blocks, args.rank, args.count, args.projective)
        except (ValueError, ProFrameError) as exc:
            return _fail(str(exc))
        _write(dumps(scenario_to_json(s)), args.output)
        return EXIT_OK

    start = time.perf_counter()
    try:
        s = load_scenario(args.scenario)
        if args.trials < 1:
            raise InputError("--trials must be >= 1")
        tol = args.tol if args.tol is not None else s.tol
        if tol < 0:
            raise InputError("--tol must be non-negative")
        body, ok = COMMANDS[args.command](s, args, tol)
    except (ParseError, ValidationError, InputError, NotScalarLevels) as exc:
        return _fail(str(exc))
    except NotAFrame as exc:
        body, ok = {"error": f"not a frame: {exc}"}, False
    except ProFrameError as exc:
        return _fail(str(exc))

    report = {"command": args.command, "scenario": str(args.scenario), **body, "tolerances": {"tol": tol}, "verdict": ok}
    if args.timing:
        report["wall_time_s"] = time.perf_counter() - start
    _write(dumps(report), args.output)
    return EXIT_OK if ok else EXIT_FAIL


def main() -> None:
    raise SystemExit(run())


if __name__ == "__main__":
    main()
