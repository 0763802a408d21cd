import importlib.util
import json

import pytest

from config.settings import BASE_DIR, CONFIGS_DIR
from src.instance import serialize_instance
from src.instance.generator import extend_instance
from src.instance.model import UNIFORM


@pytest.fixture(scope="module")
def cli():
    spec = importlib.util.spec_from_file_location("jobshoplab_cli", BASE_DIR / "scripts" / "jobshoplab.py")
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    return module


@pytest.fixture
def d2_path(instances_dir):
    return str(instances_dir / "d2.jsl")


def test_run_validate_and_gantt(cli, d2_path, tmp_path, capsys):
    trace = tmp_path / "d2.json"
    assert cli.main(["run", "--instance", d2_path, "--policy", "mwkr", "--trace-out", str(trace)]) == 0
    assert capsys.readouterr().out.split("Makespan:")[1].split()[0] == "7"

    assert cli.main(["validate", "--instance", d2_path, "--trace", str(trace)]) == 0

    gantt = tmp_path / "gantt.json"
    assert cli.main(["gantt", "--trace", str(trace), "--out", str(gantt)]) == 0
    assert json.loads(gantt.read_text())["makespan"] == 7


def test_validate_reports_violations(cli, d2_path, tmp_path):
    trace = tmp_path / "d2.json"
    cli.main(["run", "--instance", d2_path, "--trace-out", str(trace)])
    document = json.loads(trace.read_text())
    document["records"][1]["resource"] = "m2.pre"
    trace.write_text(json.dumps(document))
    assert cli.main(["validate", "--instance", d2_path, "--trace", str(trace)]) == 2


def test_bench(cli, instances_dir, tmp_path):
    report = tmp_path / "report.json"
    traces = tmp_path / "traces"
    db = tmp_path / "results.db"
    code = cli.main(["bench", "--instances", str(instances_dir), "--policies", "spt,mwkr", "--seeds", "0..1",
                     "--bounds", str(instances_dir / "bounds.txt"), "--report", str(report),
                     "--traces-dir", str(traces), "--db", str(db), "--workers", "2"])
    assert code == 0
    document = json.loads(report.read_text())
    assert len(document["runs"]) == 7 * 2 * 2
    assert all(0 < run["ratio"] <= 1 for run in document["runs"])
    assert document["failures"] == []
    assert document["bounds"]["la01"]["source"] == "bounds-file"
    assert (traces / "d2_spt_0.json").exists()
    assert db.exists()


def test_bench_with_extended_config(cli, instances_dir, tmp_path):
    report = tmp_path / "report.json"
    code = cli.main(["bench", "--instances", str(instances_dir), "--policies", "random",
                     "--config", str(CONFIGS_DIR / "extended.cfg"), "--report", str(report)])
    assert code == 0
    runs = json.loads(report.read_text())["runs"]
    assert all(run["objectives"]["total_energy"] > 0 for run in runs)


def test_solve_exact(cli, d2_path, instances_dir, tmp_path, capsys):
    witness = tmp_path / "witness.json"
    assert cli.main(["solve-exact", "--instance", d2_path, "--witness-out", str(witness)]) == 0
    assert "Optimal makespan: 7" in capsys.readouterr().out
    assert cli.main(["validate", "--instance", d2_path, "--trace", str(witness)]) == 0
    assert cli.main(["solve-exact", "--instance", str(instances_dir / "la01.orlib")]) == 3


@pytest.mark.parametrize("argv", [
    ["run", "--instance", "missing.jsl"],
    ["run", "--instance", "{d2}", "--policy", "fifo"],
    ["bench", "--instances", "{d2}", "--report", "out.json"],
    ["bench", "--instances", "{dir}", "--seeds", "5..1", "--report", "out.json"],
])
def test_input_errors_exit_1(cli, argv, d2_path, instances_dir):
    argv = [a.format(d2=d2_path, dir=instances_dir) for a in argv]
    assert cli.main(argv) == 1


def test_usage_errors_exit_1(cli):
    with pytest.raises(SystemExit) as exc:
        cli.main(["frobnicate"])
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        cli.main(["run"])
    assert exc.value.code == 1


def test_bench_is_reproducible_with_random_plugins(cli, d2, tmp_path):
    instances = tmp_path / "instances"
    instances.mkdir()
    cell = extend_instance(d2, transports=1, travel=2, outage=(6, 2), stochastic=(UNIFORM, (0.5, 1.5)))
    (instances / "cell.jsl").write_text(serialize_instance(cell.evolve(name="cell")))

    outputs = []
    for attempt in ("a", "b"):
        out = tmp_path / attempt
        code = cli.main(["bench", "--instances", str(instances), "--seeds", "0..2",
                         "--config", str(CONFIGS_DIR / "extended.cfg"),
                         "--report", str(out / "report.json"), "--traces-dir", str(out / "traces")])
        assert code == 0
        outputs.append(sorted((p.name, p.read_bytes()) for p in out.rglob("*.json")))
    assert outputs[0] == outputs[1]
    assert len(outputs[0]) == 1 + 3 * 3


def test_bench_with_deadlocked_instance_exits_3(cli, blocking, instances_dir, tmp_path, capsys):
    suite = tmp_path / "suite"
    suite.mkdir()
    (suite / "d2.jsl").write_text((instances_dir / "d2.jsl").read_text())
    (suite / "blocking.jsl").write_text(serialize_instance(blocking))
    report = tmp_path / "report.json"
    code = cli.main(["bench", "--instances", str(suite), "--policies", "spt", "--report", str(report)])
    assert code == 3
    document = json.loads(report.read_text())
    assert [run["instance"] for run in document["runs"]] == ["d2"]
    assert [(f["instance"], f["reason"]) for f in document["failures"]] == [("blocking", "deadlock")]
    assert "blocking/spt/seed 0: deadlock" in capsys.readouterr().out
