import json
import subprocess
import sys

from semistatic.cli import main
from tests.conftest import scenario_path

RUN = [sys.executable, "-m", "semistatic"]


def run_cli(*args):
    return subprocess.run(RUN + list(args), capture_output=True, text=True)


def run_json(*args):
    proc = run_cli("--format", "json", *args)
    return proc.returncode, json.loads(proc.stdout) if proc.stdout else None


def test_extremes_trinomial():
    code, report = run_json("extremes", str(scenario_path("trinomial")))
    assert code == 0
    assert report["result"]["count"] == 2
    assert report["result"]["vertices"][0]["weights"] == ["1/2", "0", "1/2"]
    assert report["result"]["vertices"][1]["weights"] == ["0", "1", "0"]


def test_duality_command():
    code, report = run_json("duality", "--payoff", "abs_S1", str(scenario_path("trinomial")))
    assert code == 0
    assert report["result"]["primal"] == "1"
    assert report["result"]["dual"] == "1"
    assert report["result"]["gap"] == "0"


def test_complete_with_vertex_index():
    code, report = run_json("complete", "--measure", "0", str(scenario_path("trinomial_calibrated")))
    assert code == 0 and report["result"]["complete"] is True


def test_complete_with_inline_measure():
    code, report = run_json(
        "complete", "--measure", "1/4,1/2,1/4", str(scenario_path("trinomial"))
    )
    assert code == 0 and report["result"]["complete"] is False


def test_replicate_command():
    code, report = run_json(
        "replicate", "--payoff", "ind_m", "--measure", "0",
        str(scenario_path("trinomial_calibrated")),
    )
    assert code == 0
    assert report["result"]["replicable"] is True
    assert report["result"]["strategy"]["cash"] == "1/2"


def test_tree_command_glued():
    code, report = run_json("tree", "--measure", "0", str(scenario_path("glued_two_vol")))
    assert code == 0
    assert report["result"]["dim"] == 2


def test_tree_command_counterexample():
    code, report = run_json("tree", "--measure", "0", str(scenario_path("jump_counterexample")))
    assert code == 0
    assert report["result"]["tree"] is None
    assert "sub-event" in report["result"]["reason"]


def test_informed_compare_command():
    code, report = run_json("informed-compare", str(scenario_path("initial_enlargement")))
    assert code == 0
    assert report["result"]["corollary_equal"] is True
    code, report = run_json("informed-compare", str(scenario_path("informed_arbitrage")))
    assert code == 0
    assert report["result"]["informed_arbitrage"] is True


def test_enlarge_command():
    code, report = run_json(
        "enlarge", "--measure", "0,1,0", str(scenario_path("initial_enlargement"))
    )
    assert code == 0
    assert report["result"]["per_jump"][0]["martingale_ok"] is True


def test_duality_on_arbitrage_model(tmp_path):
    bad = {
        "outcomes": ["u", "m", "d"],
        "times": [0, 1],
        "filtration": "natural",
        "prices": [[[0, 0, 0], [1, 0, -1]]],
        "claims": [[2, 1, 0]],
        "payoffs": {"zero": [0, 0, 0]},
    }
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(bad))
    code, report = run_json("duality", "--payoff", "zero", str(path))
    assert code == 0
    assert report["result"]["status"] == "arbitrage"
    assert report["result"]["certificate"]["feasible"] is False


def test_input_error_exit_code(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    proc = run_cli("validate", str(path))
    assert proc.returncode == 2


def test_unknown_payoff_exit_code():
    proc = run_cli("price", "--payoff", "nope", str(scenario_path("trinomial")))
    assert proc.returncode == 2


def test_not_calibrated_measure_exit_code():
    proc = run_cli("complete", "--measure", "1,0,0", str(scenario_path("trinomial")))
    assert proc.returncode == 2


def test_verify_multinomial_exit_zero():
    code, report = run_json("verify", "--suite", "multinomial", "--pmax", "3", "--mmax", "4")
    assert code == 0 and report["ok"] is True


def test_byte_identical_reports():
    first = run_cli("--format", "json", "extremes", str(scenario_path("glued_two_vol")))
    second = run_cli("--format", "json", "extremes", str(scenario_path("glued_two_vol")))
    assert first.stdout == second.stdout
    assert first.stdout.startswith("{")


def test_thread_env_var_has_no_semantic_effect():
    import os
    import subprocess as sp

    args = RUN + ["--format", "json", "duality", "--payoff", "abs_S1", str(scenario_path("trinomial"))]
    plain = sp.run(args, capture_output=True, text=True)
    threaded = sp.run(args, capture_output=True, text=True, env={**os.environ, "SEMISTATIC_THREADS": "8"})
    assert plain.stdout == threaded.stdout and plain.returncode == threaded.returncode == 0
    bad = sp.run(args, capture_output=True, text=True, env={**os.environ, "SEMISTATIC_THREADS": "lots"})
    assert bad.returncode == 2


def test_main_entry_in_process(capsys):
    code = main(["--format", "json", "price", "--payoff", "abs_S1", str(scenario_path("trinomial"))])
    assert code == 0
    out = capsys.readouterr().out
    assert json.loads(out)["result"]["value"] == "1"
