"""Command line interface: ``dgquot <group> <command> CONFIG [options]``.

Exit codes: 0 success, 1 a checked invariant failed, 2 malformed input.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import harness, koszul
from .config import ConfigError, InvariantViolation, load_config
from .dgla import ClassicalPoint, DgLieElement
from .exact import ContractError, PrimeField
from .io import write_report
from .quot import action_check, find_b, propagation_check, quotient_comparison

EXIT_OK, EXIT_INVARIANT, EXIT_INPUT = 0, 1, 2


class CommandFailed(Exception):
    def __init__(self, invariant: str, report: Optional[dict] = None):
        super().__init__(invariant)
        self.invariant, self.report = invariant, report


def _window(args, inst):
    if getattr(args, "window", None):
        a, t = args.window
        if a < inst.floor or t > inst.ceiling or t < a:
            raise ContractError(f"window [{a}, {t}] outside the instance range [{inst.floor}, {inst.ceiling}]")
        return (a, t)
    return (inst.floor, inst.ceiling)


def _point(args, inst, alg):
    """``(ClassicalPoint or None, element, submodule or None)``."""
    if getattr(args, "submodule", None):
        obj = harness.load_point_file(args.submodule, inst, alg)
    else:
        if inst.point_seed is None:
            raise ContractError("no --submodule given and the config has no 'point'")
        obj = harness.reference_submodule(inst, alg)
    pt, gamma = harness.point_from(obj, alg)
    return pt, gamma, (None if isinstance(obj, DgLieElement) else obj)


def _require_point(pt: Optional[ClassicalPoint], gamma: DgLieElement) -> ClassicalPoint:
    return pt if pt is not None else ClassicalPoint(gamma)


def _b(args, inst) -> int:
    return inst.floor if args.b is None else args.b


# ------------------------------------------------------------------ commands


def cmd_instance_validate(args, cfg, inst):
    return harness.report_instance(inst, cfg.digest)


def cmd_dgla_build(args, cfg, inst):
    return harness.report_build(harness.window_algebra(inst, _window(args, inst)))


def cmd_dgla_verify(args, cfg, inst):
    rep = harness.report_verify(harness.window_algebra(inst, _window(args, inst)), seed=inst.seed, triples=args.triples)
    if not rep["passed"]:
        failed = sorted(k for k, v in rep["checks"].items() if not v["passed"])
        raise CommandFailed("dg Lie axioms: " + ", ".join(failed), rep)
    return rep


def cmd_mc_residual(args, cfg, inst):
    alg = harness.window_algebra(inst, _window(args, inst))
    _, gamma, _ = _point(args, inst, alg)
    return harness.residual_report(alg, gamma)


def cmd_mc_certify(args, cfg, inst):
    alg = harness.window_algebra(inst, _window(args, inst))
    try:
        _, gamma, _ = _point(args, inst, alg)
    except ContractError as exc:
        raise CommandFailed(f"maurer-cartan: {exc}") from None
    rep = harness.residual_report(alg, gamma)
    if not rep["is_zero"]:
        raise CommandFailed("maurer-cartan: residual is nonzero", rep)
    rep["certified"] = True
    return rep


def cmd_tangent_cohomology(args, cfg, inst):
    alg = harness.window_algebra(inst, _window(args, inst))
    pt, gamma, sub = _point(args, inst, alg)
    rep = harness.report_tangent(alg, _require_point(pt, gamma), args.augmented, args.max_degree, sub)
    return rep


def cmd_tangent_sweep(args, cfg, inst):
    t_from = inst.floor if args.t_from is None else args.t_from
    t_to = inst.ceiling if args.t_to is None else args.t_to
    if not inst.floor <= t_from <= t_to <= inst.ceiling:
        raise ContractError(f"sweep range [{t_from}, {t_to}] outside [{inst.floor}, {inst.ceiling}]")
    rep = harness.stabilization_table(inst, args.depth, t_from, t_to, augmented=not args.plain)
    if rep["oracle_agrees"] is False:
        raise CommandFailed("tangent/oracle agreement", rep)
    return rep


def cmd_cdga_emit(args, cfg, inst):
    alg = harness.window_algebra(inst, _window(args, inst))
    pres = koszul.emit_cdga(alg, instance_hash=cfg.digest)
    text = koszul.dumps(pres)
    if args.cdga_out:
        Path(args.cdga_out).write_text(text, encoding="utf-8")
    rep = harness.report_cdga_check(pres, text) if args.check else {"header": pres.header, "generators_by_degree": {str(d): n for d, n in sorted(pres.count_by_degree().items())}}
    rep["file"] = args.cdga_out or None
    if args.inline:
        rep["cdga"] = text
    return rep


def cmd_cdga_check(args, cfg, inst):
    text = Path(args.cdga).read_text(encoding="utf-8")
    pres = koszul.loads(text)
    rep = harness.report_cdga_check(pres, text)
    if cfg is not None and pres.header.get("instance") != cfg.digest:
        rep["instance_matches_config"] = False
    if not rep["d_squared_zero"]:
        raise CommandFailed("cdga: d^2 != 0", rep)
    if not rep["round_trip_identical"]:
        raise CommandFailed("cdga: round trip not identical", rep)
    return rep


def cmd_quot_action_check(args, cfg, inst):
    alg = harness.window_algebra(inst, _window(args, inst), PrimeField(args.q) if args.q else None)
    pt, gamma, _ = _point(args, inst, alg)
    rng = np.random.default_rng(np.random.SeedSequence(inst.seed).spawn(1)[0])
    rep = action_check(_require_point(pt, gamma), _b(args, inst), rng, pairs=args.pairs, invariance=args.samples)
    if not all(rep[k] for k in ("right_action_law", "mc_preserved", "loci_preserved", "coordinates_invariant")):
        raise CommandFailed("symmetry", rep)
    return rep


def cmd_quot_invariants(args, cfg, inst):
    alg = harness.window_algebra(inst, _window(args, inst), PrimeField(args.q) if args.q else None)
    pt, gamma, _ = _point(args, inst, alg)
    rep = harness.report_invariants(_require_point(pt, gamma), _b(args, inst))
    if not rep["rank_bound_holds"] or not rep["nesting_independent"]:
        raise CommandFailed("invariant coordinates", rep)
    return rep


def cmd_quot_find_b(args, cfg, inst):
    q = harness.prime_of(inst, args.q)
    rep = find_b(inst, q, args.ceiling or inst.ceiling)
    if rep["b"] is None:
        raise CommandFailed(rep["status"], rep)
    return rep


def cmd_quot_propagation(args, cfg, inst):
    q = harness.prime_of(inst, args.q)
    a, t = _window(args, inst)
    rep = propagation_check(inst, _b(args, inst), q, samples=args.samples, twists=args.twists, t=t)
    if rep["counterexamples_total"] or rep["mismatches_total"]:
        raise CommandFailed("propagation of injectivity", rep)
    return rep


def cmd_quot_compare(args, cfg, inst):
    q = harness.prime_of(inst, args.q)
    a, t = _window(args, inst)
    rep = quotient_comparison(inst, _b(args, inst), q, t=t)
    if not all(rep["checks"].values()) or rep["counterexamples"]:
        raise CommandFailed("quotient comparison", rep)
    return rep


# -------------------------------------------------------------------- parser


def _add_common(p, window=True):
    p.add_argument("config", help="instance configuration (JSON)")
    p.add_argument("--out", "-o", default=None, help="write the report here instead of stdout")
    if window:
        p.add_argument("--window", nargs=2, type=int, metavar=("A", "T"), help="window [A, T] (default: the config's floor and ceiling)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dgquot", description="Finite windows of the dg Lie algebra of graded submodules.")
    groups = parser.add_subparsers(dest="group", required=True)

    g = groups.add_parser("instance").add_subparsers(dest="command", required=True)
    p = g.add_parser("validate", help="check a config and its invariants")
    _add_common(p, window=False)
    p.set_defaults(func=cmd_instance_validate, strict=True)

    g = groups.add_parser("dgla").add_subparsers(dest="command", required=True)
    p = g.add_parser("build", help="component table of the window algebra")
    _add_common(p)
    p.set_defaults(func=cmd_dgla_build)
    p = g.add_parser("verify", help="antisymmetry, Jacobi, d^2 = 0 and Leibniz")
    _add_common(p)
    p.add_argument("--triples", type=int, default=1000, help="random triples when exhaustive checking is too large")
    p.set_defaults(func=cmd_dgla_verify)

    g = groups.add_parser("mc").add_subparsers(dest="command", required=True)
    for name, func in (("residual", cmd_mc_residual), ("certify", cmd_mc_certify)):
        p = g.add_parser(name)
        _add_common(p)
        p.add_argument("--submodule", help="point file: seed, basis or raw element (default: the config's point)")
        p.set_defaults(func=func)

    g = groups.add_parser("tangent").add_subparsers(dest="command", required=True)
    p = g.add_parser("cohomology")
    _add_common(p)
    p.add_argument("--submodule")
    p.add_argument("--augmented", action="store_true", help="adjoin the gauge Lie algebra in degree -1")
    p.add_argument("--max-degree", type=int, default=None)
    p.set_defaults(func=cmd_tangent_cohomology)
    p = g.add_parser("sweep", help="stabilization table over window ceilings")
    _add_common(p, window=False)
    p.add_argument("--t-from", type=int, default=None)
    p.add_argument("--t-to", type=int, default=None)
    p.add_argument("--depth", type=int, default=0)
    p.add_argument("--plain", action="store_true", help="without the gauge term")
    p.set_defaults(func=cmd_tangent_sweep)

    g = groups.add_parser("cdga").add_subparsers(dest="command", required=True)
    p = g.add_parser("emit")
    _add_common(p)
    p.add_argument("--cdga-out", help="write the presentation to this file")
    p.add_argument("--check", action="store_true", help="also check d^2 = 0 and the round trip")
    p.add_argument("--inline", action="store_true", help="embed the presentation text in the report")
    p.set_defaults(func=cmd_cdga_emit)
    p = g.add_parser("check")
    p.add_argument("cdga", help="presentation file")
    p.add_argument("--config", default=None, help="config the file should come from")
    p.add_argument("--out", "-o", default=None)
    p.set_defaults(func=cmd_cdga_check, needs_config=False)

    g = groups.add_parser("quot").add_subparsers(dest="command", required=True)
    for name, func in (
        ("action-check", cmd_quot_action_check),
        ("invariants", cmd_quot_invariants),
        ("find-b", cmd_quot_find_b),
        ("propagation", cmd_quot_propagation),
        ("compare", cmd_quot_compare),
    ):
        p = g.add_parser(name)
        _add_common(p)
        p.add_argument("--b", type=int, default=None, help="stabilization degree (default: the floor)")
        p.add_argument("--q", type=int, default=None, help="prime field (default: the config's field)")
        if name in ("action-check", "invariants"):
            p.add_argument("--submodule")
        if name == "action-check":
            p.add_argument("--pairs", type=int, default=20)
            p.add_argument("--samples", type=int, default=100)
        if name == "find-b":
            p.add_argument("--ceiling", type=int, default=None)
        if name == "propagation":
            p.add_argument("--samples", type=int, default=10_000)
            p.add_argument("--twists", type=int, default=500)
        p.set_defaults(func=func)
    return parser


def run_command(argv: Sequence[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        cfg = inst = None
        path = args.config if getattr(args, "needs_config", True) else getattr(args, "config", None)
        if path:
            cfg = load_config(path)
            inst = cfg.build(strict=getattr(args, "strict", False))
        report = args.func(args, cfg, inst)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InvariantViolation as exc:
        print(f"invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except CommandFailed as exc:
        if exc.report is not None:
            write_report(exc.report, args.out)
        print(f"invariant violated: {exc.invariant}", file=sys.stderr)
        return EXIT_INVARIANT
    except (ContractError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    write_report(report, args.out)
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> None:
    sys.exit(run_command(sys.argv[1:] if argv is None else argv))


if __name__ == "__main__":
    main()
