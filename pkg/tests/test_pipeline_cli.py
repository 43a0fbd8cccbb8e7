import json

import pytest

from kneserdiv import cli
from kneserdiv.errors import SolverExhausted
from kneserdiv.pipeline import (CSV_COLUMNS, reports_to_csv, run_pipeline,
                                sweep)
from kneserdiv.sets import FamilyDescriptor


class TestRunPipeline:
    def test_tucker_route_verified(self):
        fam = FamilyDescriptor.all_k(5, 2)
        rep = run_pipeline("tucker", fam, 2, seed=3)
        assert rep.outcome["kind"] == "hyperedge"
        assert rep.verdict is True
        assert rep.params["m"] == 2

    def test_condiv_route_verified(self):
        fam = FamilyDescriptor.all_k(5, 2)
        rep = run_pipeline("condiv", fam, 2, seed=3)
        assert rep.outcome["kind"] == "hyperedge"
        assert rep.verdict is True
        assert "division" in rep.outcome

    def test_fault_route_produces_verified_violation_or_edge(self):
        fam = FamilyDescriptor.all_k(5, 2)
        kinds = set()
        for seed in range(25):
            rep = run_pipeline("condiv", fam, 2,
                               fault_spec={"random_flips": 3}, seed=seed)
            assert rep.outcome["kind"] in ("hyperedge", "violation")
            assert rep.verdict is True
            kinds.add(rep.outcome["kind"])
        assert "violation" in kinds

    def test_outcome_replay_is_byte_identical(self):
        fam = FamilyDescriptor.all_k(5, 2)
        for route in ("condiv", "tucker"):
            a = run_pipeline(route, fam, 2, seed=11)
            b = run_pipeline(route, fam, 2, seed=11)
            assert a.outcome_bytes() == b.outcome_bytes()

    def test_degenerate_budget_rejected_row(self):
        fam = FamilyDescriptor.stable(4, 2)  # defect 0: no colors to spend
        rep = run_pipeline("tucker", fam, 2)
        assert rep.outcome["kind"] == "rejected"
        assert rep.verdict is None

    def test_almost_stable_construction_route(self):
        fam = FamilyDescriptor.almost_stable(5, 2)
        rep = run_pipeline("tucker", fam, 2, seed=1)
        assert rep.construction == "almost_stable"
        assert rep.verdict is True


class TestSweep:
    def test_rows_and_verdicts(self):
        reports = sweep([4, 5], [2], [2], ["condiv", "tucker"], seeds=[0, 1])
        assert len(reports) == 8
        for rep in reports:
            if rep.outcome["kind"] == "hyperedge":
                assert rep.verdict is True
        csv_text = reports_to_csv(reports)
        lines = csv_text.strip().split("\n")
        assert lines[0] == ",".join(CSV_COLUMNS)
        assert len(lines) == 9

    def test_empty_sweep_has_header(self):
        assert reports_to_csv([]).strip() == ",".join(CSV_COLUMNS)

    def test_degenerate_cells_marked(self):
        reports = sweep([4], [2], [2], ["tucker"], seeds=[0], family_kind="stable")
        assert all(r.outcome["kind"] == "rejected" for r in reports)
        assert all("degenerate" in r.outcome["error"] for r in reports)


class TestCliCommands:
    def test_chromatic_output(self, capsys):
        assert cli.main(["chromatic", "--family", "allk", "--n", "5", "--k", "2",
                         "--r", "2"]) == 0
        assert "exact=3 formula=3" in capsys.readouterr().out

    def test_chromatic_stable(self, capsys):
        assert cli.main(["chromatic", "--family", "stable", "--n", "6", "--k", "2",
                         "--r", "2"]) == 0
        assert "exact=4 formula=4" in capsys.readouterr().out

    def test_chromatic_empty_hypergraph(self, capsys):
        assert cli.main(["chromatic", "--family", "allk", "--n", "3", "--k", "2",
                         "--r", "2"]) == 0
        assert "exact=1 formula=1" in capsys.readouterr().out

    def test_defect(self, capsys):
        assert cli.main(["defect", "--family", "allk", "--n", "6", "--k", "2",
                         "--r", "2", "--mode", "formula"]) == 0
        assert "cd_2=4" in capsys.readouterr().out

    def test_upperbound(self, capsys, tmp_path):
        out = tmp_path / "coloring.json"
        assert cli.main(["upperbound", "--n", "5", "--k", "2", "--r", "2",
                         "--out", str(out)]) == 0
        assert "colors=3 proper=true" in capsys.readouterr().out
        spec = json.loads(out.read_text())
        assert spec["type"] == "merged_upper_bound"

    def test_contract_rejection_exit_code(self, capsys):
        assert cli.main(["defect", "--family", "stable", "--n", "6", "--k", "2",
                         "--r", "2", "--mode", "formula"]) == 2

    def test_exhaustion_exit_code(self, monkeypatch, tmp_path, capsys):
        inst = tmp_path / "inst.json"
        assert cli.main(["reduce", "condiv", "--family", "allk", "--n", "4",
                         "--k", "2", "--p", "2", "--out", str(inst)]) == 0
        monkeypatch.setattr(cli, "grid_solve",
                            lambda *a, **k: (_ for _ in ()).throw(
                                SolverExhausted("stub")))
        assert cli.main(["solve", "condiv", str(inst)]) == 3

    def test_condiv_stage_round_trip(self, capsys, tmp_path):
        inst = tmp_path / "inst.json"
        div = tmp_path / "div.json"
        assert cli.main(["reduce", "condiv", "--family", "allk", "--n", "5",
                         "--k", "2", "--p", "2", "--seed", "4",
                         "--out", str(inst)]) == 0
        payload = json.loads(inst.read_text())
        assert payload["kind"] == "condiv" and payload["m"] == 2
        assert cli.main(["solve", "condiv", str(inst), "--out", str(div)]) == 0
        assert cli.main(["extract", "condiv", "--instance", str(inst),
                         "--division", str(div)]) == 0
        out = capsys.readouterr().out
        assert '"outcome": "hyperedge"' in out and '"verified": true' in out

    def test_tucker_stage_round_trip(self, capsys, tmp_path):
        inst = tmp_path / "inst.json"
        chain = tmp_path / "chain.json"
        assert cli.main(["reduce", "tucker", "--family", "allk", "--n", "5",
                         "--k", "2", "--p", "2", "--seed", "4",
                         "--out", str(inst)]) == 0
        assert cli.main(["solve", "tucker", str(inst), "--out", str(chain)]) == 0
        assert cli.main(["extract", "tucker", "--instance", str(inst),
                         "--chain", str(chain)]) == 0
        out = capsys.readouterr().out
        assert '"outcome": "hyperedge"' in out and '"verified": true' in out

    def test_pipeline_json_report(self, capsys):
        assert cli.main(["pipeline", "--route", "tucker", "--family", "allk",
                         "--n", "5", "--k", "2", "--p", "2", "--seed", "2"]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["outcome"]["kind"] == "hyperedge"
        assert report["verdict"] is True

    def test_pipeline_rejected_exit_code(self, capsys):
        assert cli.main(["pipeline", "--route", "tucker", "--family", "stable",
                         "--n", "4", "--k", "2", "--p", "2"]) == 2

    def test_fuzz(self, capsys):
        assert cli.main(["fuzz", "--family", "allk", "--n", "4", "--k", "2",
                         "--p", "2", "--count", "10", "--flips", "2"]) == 0
        assert "unverified=0" in capsys.readouterr().out

    def test_sweep_csv_and_figure(self, capsys, tmp_path):
        out = tmp_path / "sweep.csv"
        fig = tmp_path / "sweep.png"
        assert cli.main(["sweep", "--n-range", "4:5", "--k-range", "2",
                         "--p-range", "2", "--routes", "condiv,tucker",
                         "--seeds", "2", "--out", str(out),
                         "--plot", str(fig)]) == 0
        lines = out.read_text().strip().split("\n")
        assert lines[0].startswith("route,construction")
        assert len(lines) == 9
        assert fig.exists() and fig.stat().st_size > 1000

    def test_solve_plot_renders_division(self, capsys, tmp_path):
        inst = tmp_path / "inst.json"
        fig = tmp_path / "division.png"
        assert cli.main(["reduce", "condiv", "--family", "allk", "--n", "4",
                         "--k", "2", "--p", "2", "--out", str(inst)]) == 0
        assert cli.main(["solve", "condiv", str(inst), "--plot", str(fig)]) == 0
        assert fig.exists() and fig.stat().st_size > 1000
