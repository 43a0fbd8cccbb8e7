"""Command-line driver: instance I/O, the reduce/solve/extract stages,
end-to-end pipelines, sweeps, and fault fuzzing.

Exit codes: 0 success, 2 contract rejection (including bad arguments),
3 solver exhaustion.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional

from .condiv import (Division, default_eps, extract_solution, grid_solve,
                     mandated_colors, pieces, reduce_kneser_to_condiv)
from .errors import ContractError, SolverExhausted
from .kneser import (chromatic_formula, chromatic_number_exact,
                     find_monochromatic_hyperedge, load_coloring,
                     upper_bound_coloring, verify_hyperedge)
from .measure import rational
from .oracle import (FalseNegative, FalsePositive, KneserSQInstance,
                     check_violation)
from .pipeline import (CSV_COLUMNS, default_construction, reports_to_csv,
                       run_pipeline, sweep, tucker_budget)
from .sets import (ALLK, ALMOST_STABLE, EXPLICIT, STABLE, FamilyDescriptor,
                   colorability_defect)
from .zptucker import (chain_solve, check_chain_solution, extract_from_chain,
                       reduce_astab_to_tucker, reduce_kneser_to_tucker,
                       table_from_json)

_FAMILY_KINDS = (ALLK, STABLE, ALMOST_STABLE, EXPLICIT)


def _load_json_arg(value: Optional[str]) -> Optional[dict]:
    if value is None:
        return None
    text = value.strip()
    if text.startswith("{"):
        return json.loads(text)
    return json.loads(Path(value).read_text())


def _family_from_args(args) -> FamilyDescriptor:
    spec = getattr(args, "family", None)
    if spec and (spec.endswith(".json") or spec.strip().startswith("{")):
        return FamilyDescriptor.from_json(_load_json_arg(spec))
    kind = spec or getattr(args, "family_kind", None) or ALLK
    if kind not in _FAMILY_KINDS:
        raise ContractError(f"unknown family kind {kind!r}")
    if kind == EXPLICIT:
        raise ContractError("explicit families must be given as a JSON file")
    if args.n is None or args.k is None:
        raise ContractError("parametric families need --n and --k")
    return FamilyDescriptor(kind, args.n, args.k)


def _write_out(args, payload: dict, label: str) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True)
    if getattr(args, "out", None):
        Path(args.out).write_text(text + "\n")
        print(f"{label} written to {args.out}")
    else:
        print(text)


def _cmd_chromatic(args) -> int:
    family = _family_from_args(args)
    exact = chromatic_number_exact(family, args.r, cap=1 << args.size_cap)
    formula = chromatic_formula(family.n, family.k, args.r) if family.k else None
    print(f"exact={exact} formula={formula if formula is not None else '-'}")
    return 0


def _cmd_defect(args) -> int:
    family = _family_from_args(args)
    value = colorability_defect(family, args.r, args.mode, ground_cap=args.size_cap)
    print(f"cd_{args.r}={value} mode={args.mode}")
    return 0


def _cmd_upperbound(args) -> int:
    coloring = upper_bound_coloring(args.n, args.k, args.r)
    family = FamilyDescriptor.all_k(args.n, args.k)
    mono = find_monochromatic_hyperedge(family, args.r, coloring)
    print(f"colors={coloring.m} proper={'true' if mono is None else 'false'}")
    if args.out:
        Path(args.out).write_text(json.dumps(coloring.to_json(), indent=2) + "\n")
    return 0


def _build_sq_instance(family: FamilyDescriptor, coloring_spec: Optional[dict],
                       fault_spec: Optional[dict], p: int, m: int,
                       seed: int) -> KneserSQInstance:
    if coloring_spec is None:
        coloring_spec = {"type": "seeded", "m": m, "seed": seed}
    coloring = load_coloring(coloring_spec, family)
    return KneserSQInstance.honest(family, coloring, p).with_fault(fault_spec, seed)


def _cmd_reduce(args) -> int:
    family = _family_from_args(args)
    coloring_spec = _load_json_arg(args.coloring)
    fault_spec = _load_json_arg(args.fault)
    if args.target == "condiv":
        m = mandated_colors(family, args.p)
        inst = _build_sq_instance(family, coloring_spec, fault_spec, args.p, m, args.seed)
        eps = rational(args.eps) if args.eps else default_eps(args.p)
        condiv = reduce_kneser_to_condiv(inst, args.p, eps=eps)
        payload = {"kind": "condiv", "p": args.p, "eps": str(condiv.eps),
                   "m": condiv.m, "lipschitz": str(condiv.lipschitz),
                   "family": family.to_json(), "coloring": inst.coloring.to_json(),
                   "fault": fault_spec, "seed": args.seed}
        _write_out(args, payload, "instance")
        return 0
    construction = args.construction or default_construction(family)
    m = tucker_budget(family, args.p, construction)
    inst = _build_sq_instance(family, coloring_spec, fault_spec, args.p, m, args.seed)
    red = (reduce_astab_to_tucker(family.n, family.k, args.p, inst.coloring)
           if construction == "almost_stable"
           else reduce_kneser_to_tucker(family, inst.coloring, args.p))
    payload = {"kind": "tucker", "construction": construction, "p": args.p,
               "s": red.instance.s, "n": red.instance.n,
               "family": family.to_json(), "coloring": inst.coloring.to_json(),
               "seed": args.seed}
    _write_out(args, payload, "instance")
    return 0


def _condiv_from_payload(payload: dict):
    family = FamilyDescriptor.from_json(payload["family"])
    inst = _build_sq_instance(family, payload["coloring"], payload.get("fault"),
                              int(payload["p"]), int(payload["m"]),
                              int(payload.get("seed", 0)))
    return inst, reduce_kneser_to_condiv(inst, int(payload["p"]),
                                         eps=rational(payload["eps"]))


def _tucker_from_payload(payload: dict):
    family = FamilyDescriptor.from_json(payload["family"])
    coloring = load_coloring(payload["coloring"], family)
    if payload["construction"] == "almost_stable":
        return reduce_astab_to_tucker(family.n, family.k, int(payload["p"]), coloring)
    return reduce_kneser_to_tucker(family, coloring, int(payload["p"]))


def _cmd_solve(args) -> int:
    payload = _load_json_arg(args.instance)
    if args.target == "condiv":
        if payload.get("kind") != "condiv":
            raise ContractError("expected a condiv instance file")
        _, condiv = _condiv_from_payload(payload)
        result = grid_solve(condiv, args.denominator)
        out = {"division": result.division.to_json(),
               "denominator": result.denominator, "examined": result.examined}
        _write_out(args, out, "division")
        if args.plot:
            from .plots import render_division
            parts = pieces(result.division)
            values = {i: [condiv.valuations[i - 1](A) for A in parts]
                      for i in range(1, condiv.m + 1)}
            render_division(result.division, condiv.n, args.plot, values)
            print(f"figure written to {args.plot}")
        return 0
    if payload.get("kind") == "tucker_random":
        inst = table_from_json(payload)
    elif payload.get("kind") == "tucker":
        inst = _tucker_from_payload(payload).instance
    else:
        raise ContractError("expected a tucker instance file")
    result = chain_solve(inst)
    out = {"chain": [list(x) for x in result.chain], "label": result.label,
           "signs": result.signs, "vectors": result.vectors, "probes": result.probes}
    _write_out(args, out, "chain")
    return 0


def _cmd_extract(args) -> int:
    payload = _load_json_arg(args.instance)
    if args.target == "condiv":
        inst, condiv = _condiv_from_payload(payload)
        div_payload = _load_json_arg(args.division)
        division = Division.from_json(div_payload.get("division", div_payload))
        result = extract_solution(inst, division, int(payload["p"]),
                                  eps=rational(payload["eps"]))
        if isinstance(result, (FalseNegative, FalsePositive)):
            ok = check_violation(inst, result)
            _write_out(args, {"outcome": "violation", **result.to_json(),
                              "verified": ok}, "violation")
        else:
            ok = verify_hyperedge(inst.family, inst.r, inst.coloring, result)
            _write_out(args, {"outcome": "hyperedge",
                              "sets": [b.to_json() for b in result],
                              "color": inst.coloring(result[0]), "verified": ok},
                       "hyperedge")
        return 0 if ok else 1
    if payload.get("kind") != "tucker":
        raise ContractError("extraction needs a constructed tucker instance")
    red = _tucker_from_payload(payload)
    chain_payload = _load_json_arg(args.chain)
    chain = [tuple(int(v) for v in row)
             for row in chain_payload.get("chain", chain_payload.get("vectors", []))]
    if not check_chain_solution(red.instance, chain):
        raise ContractError("the supplied chain is not a solution of this instance")
    edge = extract_from_chain(red, chain)
    ok = verify_hyperedge(red.family, red.p, red.coloring, edge)
    _write_out(args, {"outcome": "hyperedge", "sets": [b.to_json() for b in edge],
                      "color": red.coloring(edge[0]), "verified": ok}, "hyperedge")
    return 0 if ok else 1


def _cmd_pipeline(args) -> int:
    family = _family_from_args(args)
    report = run_pipeline(args.route, family, args.p,
                          coloring_spec=_load_json_arg(args.coloring),
                          fault_spec=_load_json_arg(args.fault),
                          seed=args.seed,
                          eps=rational(args.eps) if args.eps else None,
                          denominator=args.denominator,
                          construction=args.construction)
    if args.report == "csv":
        text = reports_to_csv([report])
    else:
        text = json.dumps(report.to_json(), indent=2, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(text)
        print(f"report written to {args.out}")
    else:
        print(text, end="")
    kind = report.outcome.get("kind")
    if kind == "rejected":
        return 2
    if kind == "failure":
        return 3
    return 0 if report.verdict else 1


def _parse_range(text: str) -> list[int]:
    if ":" in text:
        lo, hi = text.split(":")
        return list(range(int(lo), int(hi) + 1))
    return [int(v) for v in text.split(",")]


def _cmd_sweep(args) -> int:
    reports = sweep(_parse_range(args.n_range), _parse_range(args.k_range),
                    _parse_range(args.p_range), args.routes.split(","),
                    seeds=list(range(args.seeds)),
                    family_kind=args.family_kind,
                    fault_spec=_load_json_arg(args.fault))
    text = reports_to_csv(reports)
    if args.out:
        Path(args.out).write_text(text)
        print(f"{len(reports)} rows written to {args.out}")
    else:
        print(text, end="")
    if args.plot:
        from .plots import render_sweep
        render_sweep(reports, args.plot)
        print(f"figure written to {args.plot}")
    bad = [r for r in reports
           if r.outcome.get("kind") in ("hyperedge", "violation") and not r.verdict]
    return 1 if bad else 0


def _cmd_fuzz(args) -> int:
    family = _family_from_args(args)
    fault = {"random_flips": args.flips}
    outcomes: dict[str, int] = {}
    unverified = 0
    for seed in range(args.seed, args.seed + args.count):
        report = run_pipeline(args.route, family, args.p, fault_spec=fault, seed=seed)
        kind = report.outcome.get("kind", "?")
        outcomes[kind] = outcomes.get(kind, 0) + 1
        if kind in ("hyperedge", "violation") and not report.verdict:
            unverified += 1
    print(f"fuzz: {args.count} runs, outcomes={outcomes}, unverified={unverified}")
    return 0 if unverified == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for all randomness")
    common.add_argument("--size-cap", type=int, default=12,
                        help="ground-set cap for exhaustive computations")
    common.add_argument("--report", choices=("json", "csv"), default="json")
    common.add_argument("--out", help="output path (defaults to stdout)")

    fam = argparse.ArgumentParser(add_help=False)
    fam.add_argument("--family", help="family kind (allk/stable/almost_stable) or JSON path")
    fam.add_argument("--family-kind", choices=_FAMILY_KINDS, dest="family_kind")
    fam.add_argument("--n", type=int)
    fam.add_argument("--k", type=int)

    parser = argparse.ArgumentParser(
        prog="kneserdiv",
        description="Kneser hypergraph coloring search via consensus division "
                    "and Z_p-Tucker: reductions, solvers, checkers.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_chrom = sub.add_parser("chromatic", parents=[common, fam],
                             help="exact chromatic number next to the closed form")
    p_chrom.add_argument("--r", type=int, required=True)
    p_chrom.set_defaults(func=_cmd_chromatic)

    p_def = sub.add_parser("defect", parents=[common, fam],
                           help="colorability defect (brute force or formula)")
    p_def.add_argument("--r", type=int, required=True)
    p_def.add_argument("--mode", choices=("bruteforce", "formula"), default="bruteforce")
    p_def.set_defaults(func=_cmd_defect)

    p_ub = sub.add_parser("upperbound", parents=[common],
                          help="pigeonhole coloring and its properness scan")
    p_ub.add_argument("--n", type=int, required=True)
    p_ub.add_argument("--k", type=int, required=True)
    p_ub.add_argument("--r", type=int, required=True)
    p_ub.set_defaults(func=_cmd_upperbound)

    for stage, fn in (("reduce", _cmd_reduce), ("solve", _cmd_solve),
                      ("extract", _cmd_extract)):
        p_stage = sub.add_parser(stage, help=f"{stage} one route")
        stage_sub = p_stage.add_subparsers(dest="target", required=True)
        for target in ("condiv", "tucker"):
            sp = stage_sub.add_parser(target, parents=[common, fam])
            if stage == "reduce":
                sp.add_argument("--p", type=int, required=True)
                sp.add_argument("--eps")
                sp.add_argument("--coloring", help="coloring spec JSON (path or literal)")
                sp.add_argument("--fault", help="fault spec JSON (path or literal)")
                sp.add_argument("--construction", choices=("general", "almost_stable"))
            elif stage == "solve":
                sp.add_argument("instance", help="instance JSON (path or literal)")
                sp.add_argument("--denominator", type=int)
                sp.add_argument("--plot", help="render the division to this file")
            else:
                sp.add_argument("--instance", required=True)
                sp.add_argument("--division")
                sp.add_argument("--chain")
            sp.set_defaults(func=fn)

    p_pipe = sub.add_parser("pipeline", parents=[common, fam],
                            help="reduce, solve, extract, verify in one shot")
    p_pipe.add_argument("--route", choices=("condiv", "tucker"), required=True)
    p_pipe.add_argument("--p", type=int, required=True)
    p_pipe.add_argument("--coloring")
    p_pipe.add_argument("--fault")
    p_pipe.add_argument("--eps")
    p_pipe.add_argument("--denominator", type=int)
    p_pipe.add_argument("--construction", choices=("general", "almost_stable"))
    p_pipe.set_defaults(func=_cmd_pipeline)

    p_sweep = sub.add_parser("sweep", parents=[common],
                             help="Cartesian sweep emitting one CSV row per cell")
    p_sweep.add_argument("--n-range", required=True, help="LO:HI or comma list")
    p_sweep.add_argument("--k-range", default="2")
    p_sweep.add_argument("--p-range", default="2")
    p_sweep.add_argument("--routes", default="condiv,tucker")
    p_sweep.add_argument("--seeds", type=int, default=1)
    p_sweep.add_argument("--family-kind", choices=_FAMILY_KINDS, default=ALLK)
    p_sweep.add_argument("--fault")
    p_sweep.add_argument("--plot", help="render the sweep summary to this file")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_fuzz = sub.add_parser("fuzz", parents=[common, fam],
                            help="seeded fault-injected pipelines with verification")
    p_fuzz.add_argument("--route", choices=("condiv", "tucker"), default="condiv")
    p_fuzz.add_argument("--p", type=int, default=2)
    p_fuzz.add_argument("--count", type=int, default=100)
    p_fuzz.add_argument("--flips", type=int, default=2)
    p_fuzz.set_defaults(func=_cmd_fuzz)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ContractError as exc:
        print(f"contract rejection: {exc}", file=sys.stderr)
        return 2
    except SolverExhausted as exc:
        print(f"solver exhausted: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
