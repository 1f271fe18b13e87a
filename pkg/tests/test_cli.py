import json
from pathlib import Path

import numpy as np
import pytest

from ancestry.cli import RunConfig, main
from ancestry.data import ingest_csv, shift_column, write_csv
from ancestry.errors import InsufficientData, MissingData, ParseError
from ancestry.svar import Innovation, SvarSpec, TimeSeries

GEYSER = Path(__file__).parent / "data" / "geyser.csv"


def write(tmp_path, text, name="in.csv"):
    path = tmp_path / name
    path.write_text(text)
    return path


def test_ingest_geyser():
    series = ingest_csv(GEYSER)
    assert (series.T, series.d) == (299, 2)
    assert series.names == ("waiting", "duration")
    assert series.data[0].tolist() == [80.0, 4.0166667]


def test_shift_column():
    series = TimeSeries(np.arange(8.0).reshape(4, 2), ("a", "b"))
    shifted = shift_column(series, "a")
    np.testing.assert_array_equal(shifted.data, [[2, 1], [4, 3], [6, 5]])
    assert shift_column(ingest_csv(GEYSER), "waiting").T == 298


@pytest.mark.parametrize("text,error", [
    ("", InsufficientData),
    ("a,b\n", InsufficientData),
    ("a\n1\n2\n", InsufficientData),
    ("a,b\n1,2\n3,\n", MissingData),
    ("a,b\n1,2\nNA,4\n", MissingData),
    ("a,b\n1,2\n3,x\n", ParseError),
    ("a,b\n1,2\n3\n", ParseError),
])
def test_ingest_errors(tmp_path, text, error):
    with pytest.raises(error):
        ingest_csv(write(tmp_path, text))


def test_missing_data_names_cell(tmp_path):
    with pytest.raises(MissingData) as err:
        ingest_csv(write(tmp_path, "a,b\n1,2\n3,4\n5,\n"))
    assert (err.value.row, err.value.column) == (4, "b")


def test_run_config_validation():
    with pytest.raises(ValueError):
        RunConfig("graph", order=-1)
    with pytest.raises(ValueError):
        RunConfig("graph", alpha=1.0)
    with pytest.raises(ValueError):
        RunConfig("graph", exponent=1.0)


def spec_file(tmp_path):
    B0 = [[0, 0, 0], [0.8, 0, 0], [0, 0.6, 0]]
    B1 = [[0.3, 0, 0], [0, 0.2, 0], [0.4, 0, 0.1]]
    spec = SvarSpec((B0, B1), (Innovation("uniform"), Innovation("t", 7.0), Innovation("laplace")))
    return write(tmp_path, spec.to_json(), "spec.json")


def test_simulate_twice_identical(tmp_path):
    spec = spec_file(tmp_path)
    for out in ("a", "b"):
        assert main(["simulate", "--spec", str(spec), "--T", "1000", "--seed", "7",
                     "--out", str(tmp_path / out)]) == 0
    a = (tmp_path / "a" / "series.csv").read_bytes()
    assert a == (tmp_path / "b" / "series.csv").read_bytes()
    main(["simulate", "--spec", str(spec), "--T", "1000", "--seed", "8", "--out", str(tmp_path / "c")])
    assert a != (tmp_path / "c" / "series.csv").read_bytes()


def test_csv_round_trip_bit_exact(tmp_path, rng):
    series = TimeSeries(rng.standard_normal((50, 3)) * 10.0 ** rng.integers(-8, 8, (50, 3)),
                        ("x", "y", "z"))
    write_csv(series, tmp_path / "s.csv")
    back = ingest_csv(tmp_path / "s.csv")
    assert back.data.tobytes() == series.data.tobytes()
    assert back.names == series.names


def test_graph_on_shifted_geyser(tmp_path, capsys):
    assert main(["graph", str(GEYSER), "--shift-col", "waiting", "--order", "6",
                 "--alpha", "0.05", "--out", str(tmp_path)]) == 0
    doc = json.loads((tmp_path / "results.json").read_text())
    assert doc["T"] == 298
    edges = {(e["from"], e["to"]) for e in doc["graph"]["edges"]}
    assert edges == {("duration", "waiting")}
    pairs = {(q["from"], q["to"]): q["p"] for q in doc["pairs"]}
    assert pairs[("duration", "waiting")] < 0.01
    assert pairs[("waiting", "duration")] > 0.1
    assert len(doc["tests"]) == 2 * 7
    dot = (tmp_path / "graph.dot").read_text()
    assert '"duration" -> "waiting"' in dot
    assert "duration -> waiting" in capsys.readouterr().out


def test_summary_and_test_commands(tmp_path):
    assert main(["summary", str(GEYSER), "--shift-col", "waiting", "--out", str(tmp_path)]) == 0
    doc = json.loads((tmp_path / "results.json").read_text())
    assert doc["graph"]["scope"] == "summary"
    assert main(["test", str(GEYSER), "--target", "waiting", "--order", "2",
                 "--out", str(tmp_path / "t")]) == 0
    rows = json.loads((tmp_path / "t" / "results.json").read_text())["tests"]
    assert {(r["k"], r["tau"]) for r in rows} == {(1, 0), (1, 1), (1, 2)}
    assert main(["test", str(GEYSER), "--target", "2", "--out", str(tmp_path / "u")]) == 0


def test_error_json(tmp_path, capsys):
    bad = write(tmp_path, "a,b\n1,2\n3,oops\n")
    assert main(["graph", str(bad), "--out", str(tmp_path)]) == 1
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "parse_error" and "oops" in err["message"]
    assert main(["test", str(GEYSER), "--target", "nope", "--out", str(tmp_path)]) == 1
    assert json.loads(capsys.readouterr().err)["error"] == "invalid_input"
    assert main(["graph", str(tmp_path / "absent.csv"), "--out", str(tmp_path)]) == 1


def test_unstable_spec_reported(tmp_path, capsys):
    spec = write(tmp_path, SvarSpec(([[0.0]], [[1.1]])).to_json(), "spec.json")
    assert main(["simulate", "--spec", str(spec), "--T", "10", "--out", str(tmp_path)]) == 1
    assert json.loads(capsys.readouterr().err)["error"] == "unstable_model"


def test_bench_command(tmp_path):
    assert main(["bench", "--runs", "3", "--T", "300", "1000", "--out", str(tmp_path)]) == 0
    assert json.loads((tmp_path / "results.json").read_text())["config"]["n_runs"] == 3
    assert (tmp_path / "bench.csv").read_text().startswith("T,class,metric,value")
    assert main(["bench", "--runs", "2", "--T", "500", "--graphs", "--out", str(tmp_path / "g")]) == 0
