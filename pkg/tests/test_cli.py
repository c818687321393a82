import json
import os

import numpy as np
import pytest

from projsdp.cli import main
from projsdp.driver import SolverParams, pcp_solve
from projsdp.fileio import save_instance, save_matrix_pair
from projsdp.instances import GenParams, generate_instance
from projsdp.model import SdpInstance
from projsdp.report import RunConfig, emit_report


@pytest.fixture
def toy_path(tmp_path):
    inst = SdpInstance(b=np.array([1.0]), A=[np.array([[1.0]])], C=np.array([[5.0]]))
    path = tmp_path / "toy.dat-s"
    save_instance(inst, str(path))
    return str(path)


class TestCliVerbs:
    def test_generate_and_solve(self, tmp_path, capsys):
        out = tmp_path / "inst.dat-s"
        rc = main(["generate", "--n", "8", "--k", "3", "--seed", "1", "-o", str(out)])
        assert rc == 0
        assert out.exists()
        rc = main(["solve", str(out), "--out-dir", str(tmp_path / "runs")])
        assert rc == 0
        captured = capsys.readouterr().out
        assert "status: converged" in captured

    def test_solve_exit_code_on_limit(self, toy_path, tmp_path, capsys):
        rc = main([
            "solve", toy_path, "--method", "cp", "--max-iters", "1",
            "--out-dir", str(tmp_path / "runs"),
        ])
        assert rc == 2

    def test_project_tricky_pair(self, tmp_path, capsys):
        pair = tmp_path / "pair.json"
        save_matrix_pair(
            np.diag([1.0, 0.0]), np.array([[0.0, 1.0], [1.0, 0.0]]), str(pair)
        )
        rc = main(["project", str(pair)])
        assert rc == 0
        out = capsys.readouterr().out
        assert "case: D-tricky" in out
        assert "t_star: 0" in out
        assert "hit_vectors: 0" in out

    def test_verify(self, toy_path, tmp_path, capsys):
        point = tmp_path / "y.json"
        point.write_text(json.dumps({"y": [4.0]}))
        assert main(["verify", toy_path, str(point)]) == 0
        point.write_text(json.dumps([6.0]))
        assert main(["verify", toy_path, str(point)]) == 1

    def test_missing_file_is_error(self, capsys):
        assert main(["solve", "nope.dat-s"]) == 1
        assert "error:" in capsys.readouterr().err

    def test_unknown_flag_rejected(self, toy_path):
        with pytest.raises(SystemExit):
            main(["solve", toy_path, "--nope"])

    def test_bench_small(self, tmp_path, capsys):
        rc = main([
            "bench", "--n", "6", "--k", "2", "--seeds", "0", "1",
            "--out-dir", str(tmp_path / "bench"), "--jobs", "1",
        ])
        assert rc == 0
        table = tmp_path / "bench" / "bench_summary.jsonl"
        rows = [json.loads(line) for line in table.read_text().splitlines()]
        assert len(rows) == 2
        assert all(r["status"] == "converged" for r in rows)


class TestReports:
    def test_csv_trace_and_summary(self, tmp_path):
        inst = generate_instance(GenParams(n=8, k=3, seed=2))
        result = pcp_solve(inst)
        config = RunConfig(command="solve", out_dir=str(tmp_path))
        paths = emit_report(result, config, stem="demo")
        trace = open(paths["trace"]).read().splitlines()
        header = trace[0].split(",")
        assert header[:6] == ["iter", "wall_seconds", "lb", "ub", "gap", "t_star"]
        assert len(trace) == len(result.trace) + 1
        # recomputing the gap from the logged bounds reproduces the gap column
        for line in trace[1:]:
            f = line.split(",")
            lb, ub, gap = float(f[2]), float(f[3]), float(f[4])
            assert gap == ub - lb
        summary = json.load(open(paths["summary"]))
        assert summary["status"] == "converged"
        assert summary["certificate"]["lambda_min"] >= -1e-7

    def test_byte_stable(self, tmp_path):
        inst = generate_instance(GenParams(n=6, k=2, seed=3))
        result = pcp_solve(inst)
        c1 = RunConfig(command="solve", out_dir=str(tmp_path / "a"))
        c2 = RunConfig(command="solve", out_dir=str(tmp_path / "b"))
        p1 = emit_report(result, c1)
        p2 = emit_report(result, c2)
        assert open(p1["trace"], "rb").read() == open(p2["trace"], "rb").read()
        assert open(p1["summary"], "rb").read() == open(p2["summary"], "rb").read()

    def test_jsonl_format(self, tmp_path):
        inst = generate_instance(GenParams(n=6, k=2, seed=4))
        result = pcp_solve(inst)
        config = RunConfig(command="solve", out_dir=str(tmp_path), log_format="jsonl")
        paths = emit_report(result, config)
        rows = [json.loads(line) for line in open(paths["trace"])]
        assert len(rows) == len(result.trace)
        assert rows[-1]["mode"] in ("projective", "bootstrap")

    def test_config_validation(self):
        with pytest.raises(ValueError):
            RunConfig(command="solve", log_format="xml")
        with pytest.raises(ValueError):
            RunConfig(command="solve", method="magic")

    def test_toy_run_csv_final_gap(self, tmp_path):
        inst = SdpInstance(
            b=np.array([1.0]), A=[np.array([[1.0]])], C=np.array([[5.0]])
        )
        result = pcp_solve(inst)
        paths = emit_report(result, RunConfig(command="solve", out_dir=str(tmp_path)))
        last = open(paths["trace"]).read().splitlines()[-1].split(",")
        assert float(last[4]) <= 1e-5  # gap column

    def test_trace_file_monotone_bounds(self, tmp_path):
        inst = generate_instance(GenParams(n=24, k=6, seed=24))
        result = pcp_solve(inst)
        assert result.status == "converged"
        paths = emit_report(result, RunConfig(command="solve", out_dir=str(tmp_path)))
        rows = [line.split(",") for line in open(paths["trace"]).read().splitlines()[1:]]
        lbs = [float(r[2]) for r in rows]
        ubs = [float(r[3]) for r in rows]
        assert all(b >= a for a, b in zip(lbs, lbs[1:]))
        assert all(b <= a for a, b in zip(ubs, ubs[1:]))
        assert all(l <= u for l, u in zip(lbs, ubs))

    def test_ub_sandwich_on_limit_run(self, tmp_path):
        inst = generate_instance(GenParams(n=8, k=3, seed=5))
        result = pcp_solve(inst, SolverParams(max_iters=3))
        assert result.status == "iter_limit"
        config = RunConfig(command="solve", out_dir=str(tmp_path))
        paths = emit_report(result, config)
        summary = json.load(open(paths["summary"]))
        assert summary["status"] == "iter_limit"
        assert summary["lb"] <= summary["ub"]
