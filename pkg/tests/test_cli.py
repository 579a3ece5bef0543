"""End-to-end command tests driving sskr_forge.cli.run in process.

Exit-code contract: 0 success, 1 model/validation failures, 2 planning
failures, 3 numerical/learning failures, 4 usage errors.  With --json the
whole stdout must parse as exactly one JSON document on every path.
"""

import hashlib
import json
import sys

import pytest

from sskr_forge import expr as ex
from sskr_forge import sskr
from sskr_forge.cli import main, run
from sskr_forge.sskr import (
    Ddt,
    Mkm,
    Mrm,
    MrmElement,
    Mrs,
    MrsRow,
    Parameter,
    Sskr,
    Variable,
)

P = MrmElement.present
Z = MrmElement.zero


def _linear(name, vars_, params):
    n = len(vars_)
    cells = [[P(params[r]) if r == c else Z() for c in range(n)] for r in range(n)]
    return Sskr(
        name=name,
        variables=[Variable(v, v, i + 1) for i, v in enumerate(vars_)],
        parameters=[Parameter(p, p, value=0.1 * (i + 1)) for i, p in enumerate(params)],
        mrm=Mrm(rows=[f"d{v}/dt" for v in vars_], cells=cells),
        mrs=Mrs(rows=[MrsRow(ex.parse(f"0 - p({i},{i},1)*v({i})"))
                      for i in range(1, n + 1)]),
        ddt=Ddt(),
        mkm=Mkm(items=[f"{name} note"], refs={(1, 1, 1): [1]}),
    )


def _doc(capsys):
    """Parse stdout as a single JSON document; anything extra is a failure."""
    out, err = capsys.readouterr()
    assert err == ""
    return json.loads(out)


def _sha(path):
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


SIM = ["--solver", "rk4", "--dt", "0.1", "--t-end", "1.0",
       "--ic", "S=0.99,I=0.01,R=0.0"]


class TestValidateCommand:
    def test_valid_model_exits_zero(self, fx, capsys):
        assert run(["validate", fx("bucky.sskr.json")]) == 0
        assert "bucky: ok" in capsys.readouterr().out

    def test_invalid_model_exits_one(self, fx, tmp_path, capsys):
        doc = json.load(open(fx("toy_sir.sskr.json")))
        doc["parameters"][0]["bounds"] = [0.9, 0.1]  # lo >= hi
        bad = tmp_path / "bad.sskr.json"
        bad.write_text(json.dumps(doc))
        assert run(["validate", str(bad)]) == 1
        assert "validation error" in capsys.readouterr().out

    def test_invalid_model_json_payload(self, fx, tmp_path, capsys):
        doc = json.load(open(fx("toy_sir.sskr.json")))
        doc["parameters"][0]["bounds"] = [0.9, 0.1]
        bad = tmp_path / "bad.sskr.json"
        bad.write_text(json.dumps(doc))
        assert run(["validate", str(bad), "--json"]) == 1
        out = _doc(capsys)
        assert out["command"] == "validate"
        assert out["status"] == "error" and out["exit_code"] == 1
        assert out["ok"] is False
        assert any(f["severity"] == "error" for f in out["findings"])

    def test_unreadable_file_is_a_usage_error(self, tmp_path, capsys):
        assert run(["validate", str(tmp_path / "missing.json")]) == 4
        capsys.readouterr()

    def test_garbage_file_is_a_schema_error(self, tmp_path, capsys):
        p = tmp_path / "junk.sskr.json"
        p.write_text("{\"name\": \"x\"}")
        assert run(["validate", str(p), "--json"]) == 1
        out = _doc(capsys)
        assert out["error"]["type"] == "SchemaError"


class TestJsonMode:
    def test_success_document_shape(self, fx, capsys):
        assert run(["validate", fx("bucky.sskr.json"), "--json"]) == 0
        out = _doc(capsys)
        assert out["command"] == "validate"
        assert out["status"] == "ok" and out["exit_code"] == 0
        assert out["ok"] is True and out["findings"] == []

    def test_unknown_command_is_json_too(self, capsys):
        assert run(["frobnicate", "--json"]) == 4
        out = _doc(capsys)
        assert out["status"] == "error" and out["exit_code"] == 4
        assert out["error"]["type"] == "usage"

    def test_no_command(self, capsys):
        assert run(["--json"]) == 4
        assert _doc(capsys)["error"]["type"] == "usage"

    def test_text_mode_usage_error_prints_usage(self, capsys):
        assert run(["frobnicate"]) == 4
        err = capsys.readouterr().err
        assert "error:" in err and "usage:" in err


class TestSimulateCommand:
    def test_writes_csv(self, fx, tmp_path, capsys):
        out = tmp_path / "traj.csv"
        assert run(["simulate", fx("toy_sir.sskr.json"), *SIM, "-o", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "t,S,I,R"
        assert len(lines) == 1 + 11  # t = 0.0 .. 1.0 by 0.1
        capsys.readouterr()

    def test_json_payload(self, fx, tmp_path, capsys):
        out = tmp_path / "traj.csv"
        assert run(["simulate", fx("toy_sir.sskr.json"), *SIM,
                    "-o", str(out), "--json"]) == 0
        doc = _doc(capsys)
        assert doc["variables"] == ["S", "I", "R"]
        assert doc["rows"] == 11 and doc["t_end"] == 1.0
        assert doc["files"] == [str(out)]

    def test_initial_conditions_from_csv_file(self, fx, tmp_path, capsys):
        ic = tmp_path / "ic.csv"
        ic.write_text("variable,value\nS,0.99\nI,0.01\nR,0.0\n")
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        run(["simulate", fx("toy_sir.sskr.json"), *SIM, "-o", str(a)])
        run(["simulate", fx("toy_sir.sskr.json"), "--solver", "rk4", "--dt", "0.1",
             "--t-end", "1.0", "--ic", str(ic), "-o", str(b)])
        assert a.read_text() == b.read_text()
        capsys.readouterr()

    def test_param_override_changes_the_run(self, fx, tmp_path, capsys):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        run(["simulate", fx("toy_sir.sskr.json"), *SIM, "-o", str(a)])
        assert run(["simulate", fx("toy_sir.sskr.json"), *SIM,
                    "--param", "gamma=0.25", "-o", str(b)]) == 0
        assert a.read_text() != b.read_text()
        capsys.readouterr()

    def test_plot_writes_figure_next_to_csv(self, fx, tmp_path, capsys):
        out = tmp_path / "traj.csv"
        assert run(["simulate", fx("toy_sir.sskr.json"), *SIM,
                    "-o", str(out), "--plot", "--json"]) == 0
        png = tmp_path / "traj.png"
        assert png.read_bytes()[:4] == b"\x89PNG"
        assert _doc(capsys)["files"] == [str(out), str(png)]

    def test_blowup_exits_three(self, tmp_path, capsys):
        quad = Sskr(
            name="quad",
            variables=[Variable("X", "X", 1)],
            parameters=[Parameter("k", "k", value=1.0)],
            mrm=Mrm(rows=["dX/dt"], cells=[[P("k")]]),
            mrs=Mrs(rows=[MrsRow(ex.parse("p(1,1,1)*v(1)*v(1)"))]),
            ddt=Ddt(),
            mkm=Mkm(items=["quad note"], refs={(1, 1, 1): [1]}),
        )
        model = tmp_path / "quad.sskr.json"
        sskr.save(quad, model)
        assert run(["simulate", str(model), "--solver", "euler", "--dt", "0.05",
                    "--t-end", "3", "--ic", "X=1",
                    "-o", str(tmp_path / "q.csv"), "--json"]) == 3
        assert _doc(capsys)["error"]["type"] == "NumericalBlowup"

    def test_missing_initial_condition(self, fx, tmp_path, capsys):
        assert run(["simulate", fx("toy_sir.sskr.json"), "--solver", "rk4",
                    "--dt", "0.1", "--t-end", "1.0", "--ic", "S=0.99",
                    "-o", str(tmp_path / "o.csv"), "--json"]) == 4
        assert _doc(capsys)["error"]["type"] == "InvalidConfig"

    def test_non_numeric_flag(self, fx, tmp_path, capsys):
        assert run(["simulate", fx("toy_sir.sskr.json"), "--solver", "rk4",
                    "--dt", "abc", "--t-end", "1.0", "--ic", "S=1",
                    "-o", str(tmp_path / "o.csv")]) == 4
        capsys.readouterr()


class TestPlanCommand:
    def test_plans_the_statement_file(self, fx, capsys):
        assert run(["plan", fx("gene_statements.txt"), "--rules", fx("rules.json"),
                    "--ontology", fx("sbo.json"), "--goal", "ode"]) == 0
        assert "planned 7 step(s)" in capsys.readouterr().out

    def test_trace_file(self, fx, tmp_path, capsys):
        trace = tmp_path / "trace.json"
        assert run(["plan", fx("gene_statements.txt"), "--rules", fx("rules.json"),
                    "--ontology", fx("sbo.json"), "--goal", "ode",
                    "--trace", str(trace), "--json"]) == 0
        doc = _doc(capsys)
        assert doc["planned"] is True and doc["steps"] == 7
        assert doc["digest"].startswith("sha256:")
        saved = json.loads(trace.read_text())
        assert set(saved) == {"plan", "spec"}

    def test_unreachable_goal_exits_two(self, fx, capsys):
        assert run(["plan", fx("gene_statements.txt"), "--rules", fx("rules.json"),
                    "--ontology", fx("sbo.json"), "--goal", "abm", "--json"]) == 2
        doc = _doc(capsys)
        assert doc["status"] == "error" and doc["planned"] is False
        assert "abm" in doc["missing"]

    def test_untransformed_statements_exit_two(self, fx, tmp_path, capsys):
        rules = [r for r in json.load(open(fx("rules.json"))) if r["id"] != 40]
        trimmed = tmp_path / "rules.json"
        trimmed.write_text(json.dumps(rules))
        assert run(["plan", fx("gene_statements.txt"), "--rules", str(trimmed),
                    "--ontology", fx("sbo.json"), "--goal", "ode", "--json"]) == 2
        doc = _doc(capsys)
        assert doc["statements"] == [4, 5]

    def test_goal_must_be_a_known_framework(self, fx, capsys):
        assert run(["plan", fx("gene_statements.txt"), "--rules", fx("rules.json"),
                    "--ontology", fx("sbo.json"), "--goal", "fortran"]) == 4
        capsys.readouterr()


class TestExtendCommand:
    def test_applies_script(self, fx, tmp_path, capsys):
        before = _sha(fx("bucky.sskr.json"))
        out = tmp_path / "extended.sskr.json"
        assert run(["extend", fx("bucky.sskr.json"),
                    "--script", fx("bucky_icu_extension.json"),
                    "-o", str(out), "--json"]) == 0
        doc = _doc(capsys)
        assert doc["steps"] == 35 and doc["rows"] == 10 and doc["variables"] == 10
        grown = sskr.load(out)
        assert grown.mrm.n_rows == 10
        # the input model file is never touched
        assert _sha(fx("bucky.sskr.json")) == before

    def test_step_error_exits_one(self, fx, tmp_path, capsys):
        script = tmp_path / "dup.json"
        script.write_text(json.dumps(
            [{"op": "AddVariable", "id": "S", "label": "S again", "at": 1}]))
        assert run(["extend", fx("bucky.sskr.json"), "--script", str(script),
                    "-o", str(tmp_path / "x.json"), "--json"]) == 1
        doc = _doc(capsys)
        assert doc["error"]["type"] == "StepError"
        assert "duplicate variable id" in doc["error"]["message"]


class TestDecomposeCommand:
    def test_replaces_parameter_with_sub_model(self, fx, tmp_path, capsys):
        sub = tmp_path / "sub.sskr.json"
        sskr.save(_linear("beta-dynamics", ["X", "Y"], ["q1", "q2"]), sub)
        out = tmp_path / "merged.sskr.json"
        assert run(["decompose", fx("bucky.sskr.json"), "--param", "beta",
                    "--sub", str(sub), "--outputs", "beta=dX/dt",
                    "-o", str(out), "--json"]) == 0
        doc = _doc(capsys)
        assert doc["rows"] == 10 and doc["variables"] == 10
        merged = sskr.load(out)
        assert merged.parameter_by_id("beta").computed == "dX/dt"

    def test_bad_outputs_entry(self, fx, tmp_path, capsys):
        sub = tmp_path / "sub.sskr.json"
        sskr.save(_linear("beta-dynamics", ["X", "Y"], ["q1", "q2"]), sub)
        assert run(["decompose", fx("bucky.sskr.json"), "--param", "beta",
                    "--sub", str(sub), "--outputs", "beta->dX/dt",
                    "-o", str(tmp_path / "o.json")]) == 4
        capsys.readouterr()

    def test_unknown_parameter_exits_one(self, fx, tmp_path, capsys):
        sub = tmp_path / "sub.sskr.json"
        sskr.save(_linear("beta-dynamics", ["X", "Y"], ["q1", "q2"]), sub)
        assert run(["decompose", fx("bucky.sskr.json"), "--param", "nope",
                    "--sub", str(sub), "--outputs", "nope=dX/dt",
                    "-o", str(tmp_path / "o.json"), "--json"]) == 1
        assert _doc(capsys)["error"]["type"] == "UnknownParameter"


class TestCompareCommand:
    def test_reports_structural_diff(self, fx, capsys):
        assert run(["compare", fx("bucky.sskr.json"), fx("bucky_extended.sskr.json"),
                    "--seed", "1", "--json"]) == 0
        doc = _doc(capsys)
        assert doc["variables_only_in_b"] == ["Iicu", "Ricu"]
        assert doc["rows_only_in_b"] == ["dIicu/dt", "dRicu/dt"]
        assert len(doc["changed_rows"]) == 6

    def test_text_mode_lists_sections(self, fx, capsys):
        assert run(["compare", fx("bucky.sskr.json"), fx("bucky_extended.sskr.json"),
                    "--seed", "1", "--samples", "200"]) == 0
        out = capsys.readouterr().out
        assert "variables only in b: Iicu, Ricu" in out

    def test_seed_is_required(self, fx, capsys):
        assert run(["compare", fx("bucky.sskr.json"),
                    fx("bucky_extended.sskr.json")]) == 4
        capsys.readouterr()


class TestComposeCommand:
    def test_disjoint_union(self, tmp_path, capsys):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        sskr.save(_linear("left", ["A"], ["k1"]), a)
        sskr.save(_linear("right", ["B"], ["k2"]), b)
        out = tmp_path / "joined.json"
        assert run(["compose", str(a), str(b), "-o", str(out), "--json"]) == 0
        doc = _doc(capsys)
        assert doc["rows"] == 2 and doc["variables"] == 2
        assert sskr.load(out).mrm.n_rows == 2

    def test_shared_variable_collapses(self, tmp_path, capsys):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        sskr.save(_linear("left", ["A", "B"], ["k1", "k2"]), a)
        sskr.save(_linear("right", ["C"], ["k3"]), b)
        out = tmp_path / "joined.json"
        assert run(["compose", str(a), str(b), "--share", "B=C",
                    "-o", str(out), "--json"]) == 0
        doc = _doc(capsys)
        assert doc["variables"] == 2 and doc["shared"] == [["B", "C"]]

    def test_name_collision_exits_one(self, tmp_path, capsys):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        sskr.save(_linear("left", ["A"], ["k1"]), a)
        sskr.save(_linear("right", ["A"], ["k2"]), b)
        assert run(["compose", str(a), str(b),
                    "-o", str(tmp_path / "o.json"), "--json"]) == 1
        assert _doc(capsys)["error"]["type"] == "NameCollision"

    def test_bad_share_entry(self, tmp_path, capsys):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        sskr.save(_linear("left", ["A"], ["k1"]), a)
        sskr.save(_linear("right", ["B"], ["k2"]), b)
        assert run(["compose", str(a), str(b), "--share", "A/B",
                    "-o", str(tmp_path / "o.json")]) == 4
        capsys.readouterr()


def _ga_config(tmp_path, fx, lo=0.0, hi=1.0):
    # every SIR value lies in [0,1]; a tighter band makes the run hopeless
    band = tmp_path / "band.csv"
    band.write_text(f"t,lo,hi\n0,{lo},{hi}\n1,{lo},{hi}\n2,{lo},{hi}\n")
    doc = {
        "model": fx("toy_sir.sskr.json"),
        "criterion": {"envelopes": {"S": str(band), "I": str(band), "R": str(band)}},
        "sim": {"solver": "rk4", "dt": 0.1, "t_end": 2.0,
                "initial": {"S": 0.99, "I": 0.01, "R": 0.0}},
        "ga": {"population": 6, "generations": 2, "seed": 0},
    }
    cfg = tmp_path / "ga.json"
    cfg.write_text(json.dumps(doc))
    return cfg


class TestCalibrateCommand:
    def test_writes_tables_and_figures(self, fx, tmp_path, capsys):
        cfg = _ga_config(tmp_path, fx)
        results = tmp_path / "results"
        assert run(["calibrate", "--config", str(cfg), "--results", str(results),
                    "--seed", "0", "--json"]) == 0
        doc = _doc(capsys)
        assert doc["plausible_found"] is True and doc["ensemble_size"] >= 1
        assert (results / "ensemble.csv").read_text().splitlines()[0] == "beta,gamma"
        for png in ("fitness_curve.png", "ensemble.png"):
            assert (results / png).read_bytes()[:4] == b"\x89PNG"

    def test_hopeless_band_exits_three(self, fx, tmp_path, capsys):
        cfg = _ga_config(tmp_path, fx, lo=5.0, hi=5.1)
        results = tmp_path / "results"
        assert run(["calibrate", "--config", str(cfg), "--results", str(results),
                    "--seed", "0", "--json"]) == 3
        assert _doc(capsys)["error"]["type"] == "NoPlausibleFound"
        # figures still land on disk for post-mortem inspection
        assert (results / "fitness_curve.png").exists()

    def test_seed_is_required(self, fx, tmp_path, capsys):
        cfg = _ga_config(tmp_path, fx)
        assert run(["calibrate", "--config", str(cfg),
                    "--results", str(tmp_path / "r")]) == 4
        capsys.readouterr()


class TestLearnCommand:
    def _config(self, tmp_path):
        import numpy as np

        pool = tmp_path / "pool.csv"
        rng = np.random.default_rng(9)
        rows = ["x1,x2"] + ["%.17g,%.17g" % tuple(p) for p in rng.random((240, 2))]
        pool.write_text("\n".join(rows) + "\n")
        doc = {
            "pool": str(pool),
            "oracle": {"kind": "ring", "center": [0.5, 0.5], "radius": 0.35},
            "al": {"batch_size": 12, "max_rounds": 6, "stopping_accuracy": 0.8,
                   "seed": 4, "initial_per_class": 8},
            "train": {"hidden": [16, 16], "epochs": 600, "learning_rate": 0.5},
        }
        cfg = tmp_path / "al.json"
        cfg.write_text(json.dumps(doc))
        return cfg

    def test_writes_curve_weights_and_figure(self, tmp_path, capsys):
        cfg = self._config(tmp_path)
        results = tmp_path / "results"
        assert run(["learn", "--config", str(cfg), "--results", str(results),
                    "--seed", "4", "--json"]) == 0
        doc = _doc(capsys)
        assert doc["reached_target"] is True
        assert doc["labels_used"] > 0
        header = (results / "accuracy.csv").read_text().splitlines()[0]
        assert header == "round,labels_used,accuracy"
        assert json.loads((results / "weights.json").read_text())
        assert (results / "accuracy.png").read_bytes()[:4] == b"\x89PNG"

    def test_seed_is_required(self, tmp_path, capsys):
        cfg = self._config(tmp_path)
        assert run(["learn", "--config", str(cfg),
                    "--results", str(tmp_path / "r")]) == 4
        capsys.readouterr()


class TestEmitCommand:
    def test_document_to_stdout(self, fx, capsys):
        assert run(["emit", fx("toy_sir.sskr.json"), "--solver", "rk4",
                    "--dt", "0.5", "--t-end", "1", "--ic", "S=0.99,I=0.01,R=0.0",
                    "--json"]) == 0
        doc = _doc(capsys)
        assert "d[S]/dt" in doc["document"]

    def test_document_to_file(self, fx, tmp_path, capsys):
        out = tmp_path / "doc.txt"
        assert run(["emit", fx("toy_sir.sskr.json"), "--solver", "rk4",
                    "--dt", "0.5", "--t-end", "1", "--ic", "S=0.99,I=0.01,R=0.0",
                    "-o", str(out)]) == 0
        assert "d[S]/dt" in out.read_text()
        capsys.readouterr()


class TestThreadControl:
    def test_explicit_thread_count(self, fx, capsys):
        assert run(["validate", fx("bucky.sskr.json"), "--threads", "2"]) == 0
        capsys.readouterr()

    @pytest.mark.parametrize("value", ["0", "-2", "many"])
    def test_bad_thread_count(self, fx, value, capsys):
        assert run(["validate", fx("bucky.sskr.json"), "--threads", value]) == 4
        capsys.readouterr()

    def test_environment_fallback(self, fx, capsys, monkeypatch):
        monkeypatch.setenv("SSKR_FORGE_THREADS", "3")
        assert run(["validate", fx("bucky.sskr.json")]) == 0
        monkeypatch.setenv("SSKR_FORGE_THREADS", "0")
        assert run(["validate", fx("bucky.sskr.json")]) == 4
        capsys.readouterr()


def test_main_raises_systemexit(fx, monkeypatch, capsys):
    monkeypatch.setattr(sys, "argv", ["sskr-forge", "validate", fx("bucky.sskr.json")])
    with pytest.raises(SystemExit) as excinfo:
        main()
    assert excinfo.value.code == 0
    capsys.readouterr()
