import json
import math
import subprocess
import sys
import time

import numpy as np
import pytest

from qpendulum.cli import main
from qpendulum.figures import (
    FIGURES,
    FigureDataset,
    build_figure,
    from_csv,
    from_json,
    to_csv,
    to_json,
)
from qpendulum.model import NOMINAL


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def parse_csv(text):
    return from_csv(text)


def test_spectrum_nominal(capsys):
    code, out, _ = run(capsys, "spectrum", "--v0", "80", "--hbar", "1", "--mass", "0.5", "--length", "1",
                       "--count", "40")
    assert code == 0
    data = parse_csv(out)
    assert len(data) == 40
    assert data.metadata["q"] == 160.0
    assert list(data.columns) == ["global_index", "parity", "r", "a", "E"]
    assert data.columns["E"][0] == pytest.approx(-73.7386, abs=1e-4)


def test_spectrum_q0_mathieu(capsys):
    code, out, _ = run(capsys, "spectrum", "--q", "0", "--count", "5", "--frame", "mathieu")
    assert code == 0
    data = parse_csv(out)
    assert data.columns["a"] == [0, 4, 4, 16, 16]
    assert "E" not in data.columns


def test_spectrum_q160_first_value(capsys):
    code, out, _ = run(capsys, "spectrum", "--q", "160", "--count", "2", "--frame", "mathieu")
    assert code == 0
    assert parse_csv(out).columns["a"][0] == pytest.approx(-294.954, abs=1e-3)


def test_spectrum_parity_filter(capsys):
    _, out, _ = run(capsys, "spectrum", "--count", "10", "--parity", "odd")
    assert set(parse_csv(out).columns["parity"]) == {"odd"}


def test_spectrum_json(capsys):
    code, out, _ = run(capsys, "spectrum", "--count", "6", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["metadata"]["q"] == 160.0
    assert len(doc["columns"]["a"]) == 6
    assert from_json(out).metadata == doc["metadata"]


def test_spectrum_to_file(tmp_path, capsys):
    target = tmp_path / "levels.csv"
    code, out, _ = run(capsys, "spectrum", "--count", "4", "--out", str(target))
    assert code == 0 and out == ""
    assert len(from_csv(target.read_text())) == 4


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "p.cfg"
    cfg.write_text("hbar = 2\nmass = 1\n")
    _, out, _ = run(capsys, "spectrum", "--config", str(cfg), "--count", "3")
    assert parse_csv(out).metadata["q"] == pytest.approx(80.0)


def test_seventeen_digit_formatting(capsys):
    _, out, _ = run(capsys, "spectrum", "--count", "3")
    line = out.splitlines()[2]
    assert line.split(",")[3] == format(float(line.split(",")[3]), ".17g")


def test_determinism(capsys):
    first = run(capsys, "figure", "fig6")[1]
    second = run(capsys, "figure", "fig6")[1]
    assert first == second


@pytest.mark.parametrize("argv", [
    ["spectrum", "--q", "10", "--v0", "3"],
    ["spectrum", "--q", "-1"],
    ["spectrum", "--count", "0"],
    ["spectrum", "--v0", "-5"],
    ["spectrum", "--frame", "polar"],
    ["spectrum", "--count", "many"],
    ["figure", "fig9"],
    ["figure", "fig4", "--order", "3"],
    ["selftest", "--benchmark", "cubic"],
    [],
])
def test_flag_errors_exit_2(capsys, argv):
    with pytest.raises(SystemExit) as info:
        code = main(argv)
        raise SystemExit(code)
    assert info.value.code == 2


def test_nonconvergence_exit_3(capsys, monkeypatch):
    import qpendulum.cli as cli
    from qpendulum.mathieu import ConvergenceError

    def boom(*args, **kwargs):
        raise ConvergenceError("forced")

    monkeypatch.setattr(cli, "spectrum", boom)
    code, _, err = run(capsys, "spectrum")
    assert code == 3
    assert "converge" in err


def test_selftest_all(capsys):
    code, out, _ = run(capsys, "selftest")
    report = json.loads(out)
    assert code == 0
    assert report["passed"]
    assert {c["check"] for c in report["checks"]} == {"engine", "constant", "linear", "quadratic"}


def test_selftest_failure_exit(capsys, monkeypatch):
    import qpendulum.selftest as st

    monkeypatch.setitem(st.CHECKS, "linear", lambda: {"check": "linear", "passed": False})
    code, out, _ = run(capsys, "selftest", "--benchmark", "linear")
    assert code != 0
    assert json.loads(out)["passed"] is False


def test_module_entry_point():
    done = subprocess.run([sys.executable, "-m", "qpendulum", "spectrum", "--q", "0", "--count", "3",
                           "--frame", "mathieu"], capture_output=True, text=True, check=True)
    assert from_csv(done.stdout).columns["a"] == [0, 4, 4]


def test_fig1_structure(capsys):
    _, out, _ = run(capsys, "figure", "fig1", "--q-points", "11")
    data = parse_csv(out)
    ids = data.series_ids()
    assert "+2q" in ids and "-2q" in ids
    assert any(i.startswith("a_") for i in ids) and any(i.startswith("b_") for i in ids)
    x, y = data.series("-2q")
    np.testing.assert_allclose(y, -2 * x)
    assert x.min() == 0 and x.max() == 200
    x, y = data.series("a_4")
    assert y[0] == 16.0


def test_fig4_order0_constant():
    data = build_figure("fig4", order=0)
    _, y = data.series("rotor_order0")
    assert len(y) > 10
    np.testing.assert_allclose(y, 2 * math.pi, rtol=1e-13)


def test_fig7_peak_at_separatrix():
    data = build_figure("fig7")
    for parity in ("even", "odd"):
        x, y = data.series(f"{parity}_raw")
        assert np.all(np.isfinite(y))
        peak = x[np.argmax(y)]
        assert abs(peak - 80.0) < 10.0
    x, y = data.series("classical_libration")
    assert np.all(np.diff(y) > 0)


def test_fig2_sign_convention():
    data = build_figure("fig2", order=0)
    x, y = data.series("oscillator_order0")
    # the harmonic approximation overestimates every bound level of the cosine well
    assert np.all(y > 0)
    assert set(data.series_ids()) == {"oscillator_order0", "rotor_order0"}


def test_fig8_has_analytic_curves():
    ids = build_figure("fig8").series_ids()
    for name in ("even_raw", "odd_parity-corrected", "even_scaled", "oscillator_order4", "rotor_order4"):
        assert name in ids


def test_fig6_orders():
    assert build_figure("fig6").series_ids() == [f"oscillator_order{g}" for g in range(1, 5)]


def test_fig3_fig5_have_classical_curves():
    for fid in ("fig3", "fig5"):
        data = build_figure(fid)
        assert "classical" in data.series_ids()
        assert len(data.series_ids()) >= 4


def test_unknown_figure():
    with pytest.raises(ValueError):
        build_figure("fig0")


@pytest.mark.parametrize("fid", sorted(FIGURES))
def test_round_trips(fid):
    data = build_figure(fid, q_points=5) if fid == "fig1" else build_figure(fid)
    back = from_csv(to_csv(data))
    assert back.metadata == data.metadata
    assert back.columns["series"] == data.columns["series"]
    np.testing.assert_array_equal(back.columns["x"], data.columns["x"])
    np.testing.assert_array_equal(back.columns["y"], data.columns["y"])
    again = from_json(to_json(data))
    assert again.metadata == data.metadata
    assert again.columns == data.columns
    assert data.metadata["provenance"].startswith("qpendulum-0.1.0+")
    assert data.metadata["config"] == NOMINAL.as_dict()


def test_dataset_rejects_ragged_columns():
    with pytest.raises(ValueError):
        FigureDataset("fig1", {"series": ["a"], "x": [1.0, 2.0], "y": [1.0]})


def test_json_nonfinite_is_null():
    data = FigureDataset("fig9", {"x": [1.0, math.inf], "y": [math.nan, 2.0]}, {})
    doc = json.loads(to_json(data))
    assert doc["columns"]["x"] == [1.0, None]
    assert doc["columns"]["y"] == [None, 2.0]


def test_all_figures_under_a_minute():
    start = time.perf_counter()
    for fid in FIGURES:
        build_figure(fid)
    assert time.perf_counter() - start < 60.0
