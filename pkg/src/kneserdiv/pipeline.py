"""Pipeline orchestration: reduce -> solve -> extract -> verify, with report
rows suitable for JSON and CSV emission."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from . import __version__
from .condiv import (default_eps, extract_solution, grid_solve,
                     mandated_colors, reduce_kneser_to_condiv)
from .errors import ContractError, SizeCapError, SolverExhausted
from .kneser import load_coloring, verify_hyperedge
from .oracle import (FalseNegative, FalsePositive, KneserSQInstance,
                     check_violation)
from .sets import ALLK, ALMOST_STABLE, FamilyDescriptor, colorability_defect
from .zptucker import (chain_solve, extract_from_chain, reduce_astab_to_tucker,
                       reduce_kneser_to_tucker)

CSV_COLUMNS = ("route", "construction", "family", "n", "k", "p", "m", "seed",
               "fault", "outcome", "verdict", "solver_examined", "solver_param",
               "elapsed_ms")


@dataclass
class PipelineReport:
    route: str
    construction: str
    params: dict
    outcome: dict
    verdict: Optional[bool]
    stats: dict = field(default_factory=dict)
    version: str = __version__

    def to_json(self) -> dict:
        return {"version": self.version, "route": self.route,
                "construction": self.construction, "params": self.params,
                "outcome": self.outcome, "verdict": self.verdict,
                "stats": self.stats}

    def outcome_bytes(self) -> bytes:
        """Canonical bytes of the replay-deterministic part of the report."""
        return json.dumps({"outcome": self.outcome, "verdict": self.verdict},
                          sort_keys=True).encode()

    def csv_row(self) -> list:
        p = self.params
        return [self.route, self.construction, p.get("family", {}).get("kind", ""),
                p.get("family", {}).get("n", ""), p.get("family", {}).get("k", ""),
                p.get("p", ""), p.get("m", ""), p.get("seed", ""),
                "yes" if p.get("fault") else "",
                self.outcome.get("kind", ""),
                "" if self.verdict is None else str(self.verdict).lower(),
                self.stats.get("examined", ""), self.stats.get("param", ""),
                self.stats.get("elapsed_ms", "")]


def tucker_budget(family: FamilyDescriptor, p: int, construction: str) -> int:
    if construction == "almost_stable":
        return (family.n - p * (family.k - 1) - 1) // (p - 1)
    return (colorability_defect(family, p,
                                "formula" if family.kind == ALLK else "bruteforce")
            - 1) // (p - 1)


def default_construction(family: FamilyDescriptor) -> str:
    return "almost_stable" if family.kind == ALMOST_STABLE else "general"


def _verify_outcome(inst: KneserSQInstance, result, p: int) -> tuple[dict, bool]:
    if isinstance(result, (FalseNegative, FalsePositive)):
        payload = {"kind": "violation", **result.to_json()}
        return payload, check_violation(inst, result)
    payload = {"kind": "hyperedge", "sets": [b.to_json() for b in result],
               "color": inst.coloring(result[0])}
    return payload, verify_hyperedge(inst.family, p, inst.coloring, result)


def run_pipeline(route: str, family: FamilyDescriptor, p: int,
                 coloring_spec: Optional[dict] = None,
                 fault_spec: Optional[dict] = None,
                 seed: int = 0,
                 eps: Optional[Fraction] = None,
                 denominator: Optional[int] = None,
                 construction: Optional[str] = None) -> PipelineReport:
    """Run one full reduce -> solve -> extract -> verify pass.

    Stage errors are captured in the report (contract rejections as outcome
    kind "rejected", solver exhaustion as "failure"), never raised.
    """
    if route not in ("condiv", "tucker"):
        raise ContractError(f"unknown route {route!r}")
    construction = construction or default_construction(family)
    params = {"family": family.to_json(), "p": p, "seed": seed,
              "fault": fault_spec, "route": route}
    if route == "tucker":
        params["construction"] = construction
    start = time.monotonic()
    report = PipelineReport(route,
                            construction if route == "tucker" else "valuations",
                            params, {}, None)

    def finish(outcome: dict, verdict: Optional[bool], **stats) -> PipelineReport:
        report.outcome = outcome
        report.verdict = verdict
        report.stats = dict(stats)
        report.stats["elapsed_ms"] = round((time.monotonic() - start) * 1000, 3)
        return report

    try:
        if route == "condiv":
            m = mandated_colors(family, p)
        else:
            m = tucker_budget(family, p, construction)
        if m < 1:
            return finish({"kind": "rejected", "error": "degenerate budget"}, None)
        params["m"] = m
        if coloring_spec is None:
            coloring_spec = {"type": "seeded", "m": m, "seed": seed}
        params["coloring"] = coloring_spec
        coloring = load_coloring(coloring_spec, family)
        inst = KneserSQInstance.honest(family, coloring, p).with_fault(fault_spec, seed)

        if route == "condiv":
            condiv = reduce_kneser_to_condiv(inst, p, eps=eps)
            params["eps"] = str(condiv.eps)
            solved = grid_solve(condiv, denominator)
            result = extract_solution(inst, solved.division, p, eps=eps)
            outcome, ok = _verify_outcome(inst, result, p)
            outcome["division"] = solved.division.to_json()
            return finish(outcome, ok, examined=solved.examined,
                          param=solved.denominator)

        red = (reduce_astab_to_tucker(family.n, family.k, p, coloring)
               if construction == "almost_stable"
               else reduce_kneser_to_tucker(family, coloring, p))
        solved = chain_solve(red.instance)
        edge = extract_from_chain(red, solved.chain)
        outcome, ok = _verify_outcome(inst, edge, p)
        outcome["chain"] = [list(x) for x in solved.chain]
        outcome["label"] = solved.label
        return finish(outcome, ok, examined=solved.probes, param=red.instance.s,
                      vectors=solved.vectors)
    except (ContractError, SizeCapError) as exc:
        return finish({"kind": "rejected", "error": str(exc)}, None)
    except SolverExhausted as exc:
        return finish({"kind": "failure", "error": str(exc), **exc.details}, False)


def sweep(n_values: Sequence[int], k_values: Sequence[int], p_values: Sequence[int],
          routes: Sequence[str], seeds: Sequence[int],
          family_kind: str = ALLK,
          fault_spec: Optional[dict] = None) -> list[PipelineReport]:
    """Cartesian sweep in deterministic parameter order, one report per cell.

    Degenerate cells come back as rejected rows rather than errors.
    """
    reports = []
    for n in n_values:
        for k in k_values:
            for p in p_values:
                for route in routes:
                    for seed in seeds:
                        if n < p * k:
                            continue
                        family = FamilyDescriptor(family_kind, n, k)
                        reports.append(run_pipeline(route, family, p,
                                                    fault_spec=fault_spec,
                                                    seed=seed))
    return reports


def reports_to_csv(reports: Sequence[PipelineReport]) -> str:
    lines = [",".join(CSV_COLUMNS)]
    for rep in reports:
        lines.append(",".join(str(v) for v in rep.csv_row()))
    return "\n".join(lines) + "\n"
