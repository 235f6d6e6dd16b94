import csv
import json

import numpy as np
import pytest

from kdcoh import io as kio
from kdcoh.cli import main, parse_basis
from kdcoh.errors import UsageError
from kdcoh.qstate import pure_state, random_density


@pytest.fixture
def plus_file(tmp_path):
    path = tmp_path / "plus.json"
    kio.save_state(pure_state([1, 1]), path)
    return path


def read_csv(path):
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# generated")
    return list(csv.DictReader(lines[1:]))


def test_parse_basis(tmp_path):
    assert parse_basis("computational", 3).dim == 3
    assert parse_basis("qubit:1.5707963,0", 2).dim == 2
    assert parse_basis("product-qubit:1,0,1,0", 4).is_product
    with pytest.raises(UsageError):
        parse_basis("qubit:1,0", 4)
    with pytest.raises(UsageError):
        parse_basis("nonsense", 2)


def test_kd_and_coherence(plus_file, tmp_path):
    out = tmp_path / "kd.json"
    assert main(["kd", str(plus_file), "--second", "qubit:1.5707963267948966,1.5707963267948966", "--out", str(out)]) == 0
    d = json.loads(out.read_text())
    assert d["functionals"]["nre"] == pytest.approx(1)
    assert main(["coherence", str(plus_file), "--starts", "4", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["value"] == pytest.approx(np.sqrt(2) - 1, abs=1e-9)
    assert main(["bounds", str(plus_file), "--starts", "4", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["all_satisfied"]


def test_bad_state_file_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{\n "matrix": [[[2,0]]]\n}')
    assert main(["coherence", str(bad)]) == 2
    assert "bad.json:2" in capsys.readouterr().err


def test_figure_csvs(tmp_path):
    f1, f2 = tmp_path / "f1.csv", tmp_path / "f2.csv"
    assert main(["figure1", "--theta-points", "5", "--r", "1", "0.5", "--grid-n", "300", "--out", str(f1)]) == 0
    rows = read_csv(f1)
    assert list(rows[0]) == ["theta", "r", "C_KD_NCl", "C_l1", "C_KD_NRe", "purity_bound"]
    assert [float(r["r"]) for r in rows] == [0.5] * 5 + [1.0] * 5
    assert main(["figure2", "--theta-points", "3", "--r", "0.8", "--out", str(f2)]) == 0
    assert list(read_csv(f2)[0]) == ["theta", "r", "C_KD_NCl", "MU"]
    assert main(["figure1", "--theta-points", "1"]) == 2
    assert main(["figure1", "--r", "1.5"]) == 2


def test_csv_reproducible(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for p in (a, b):
        main(["figure2", "--theta-points", "4", "--r", "0.7", "--grid-n", "100", "--out", str(p)])
    assert a.read_text().splitlines()[1:] == b.read_text().splitlines()[1:]


def test_examples_command(tmp_path):
    out = tmp_path / "ex.json"
    assert main(["examples", "--starts", "8", "--out", str(out)]) == 0
    d = json.loads(out.read_text())
    assert d["all_passed"] and len(d["items"]) >= 10


def test_susceptibility_and_estimate(tmp_path):
    pair = tmp_path / "pair.json"
    pair.write_text(json.dumps({"rho0": [[0.7, 0.1], [0.1, 0.3]], "H": [[0, 1], [1, 0]]}))
    out = tmp_path / "s.json"
    assert main(["susceptibility", str(pair), "--starts", "4", "--out", str(out)]) == 0
    d = json.loads(out.read_text())
    assert d["sld_residual"] < 1e-10 and d["normalized_bound"]["holds"]
    state = tmp_path / "st.json"
    kio.save_state(random_density(2, seed=1), state)
    csv_out = tmp_path / "trace.csv"
    assert main(["estimate", str(state), "--iterations", "10", "--starts", "2", "--format", "csv",
                 "--out", str(csv_out)]) == 0
    assert len(read_csv(csv_out)) == 10
    assert json.loads(csv_out.with_suffix(".json").read_text())["evaluations"] == 30


def test_figure2_trends_in_r(tmp_path):
    out = tmp_path / "f2.csv"
    main(["figure2", "--theta-points", "5", "--r", "1", "0.8", "0.5", "0", "--grid-n", "300", "--out", str(out)])
    rows = [{k: float(v) for k, v in r.items()} for r in read_csv(out)]

    def column(theta, key):
        sel = sorted((r for r in rows if abs(r["theta"] - theta) < 1e-6), key=lambda r: -r["r"])
        return np.array([r[key] for r in sel])

    c_mid, mu_mid = column(np.pi / 2, "C_KD_NCl"), column(np.pi / 2, "MU")
    assert np.all(np.diff(c_mid) < 0)
    # Born probabilities are (1/2, 1/2) at the equator for every r, so MU is flat there
    assert np.all(np.abs(np.diff(mu_mid)) < 1e-8)
    assert np.all(np.diff(column(np.pi / 4, "MU")) > 0)
    assert np.all(np.diff(column(np.pi / 4, "C_KD_NCl")) < 0)
    pure = [r for r in rows if r["r"] == 1]
    assert max(abs(r["C_KD_NCl"] - r["MU"]) for r in pure) <= 1e-4
    mixed_pole = [r for r in rows if r["r"] < 1 and r["theta"] == 0]
    assert all(r["C_KD_NCl"] <= 1e-8 and r["MU"] > 0 for r in mixed_pole)


def test_figure1_anchors(tmp_path):
    out = tmp_path / "f1.csv"
    main(["figure1", "--theta-points", "5", "--r", "1", "0.5", "--out", str(out)])
    rows = [{k: float(v) for k, v in r.items()} for r in read_csv(out)]
    top = [r for r in rows if r["r"] == 1 and abs(r["theta"] - np.pi / 2) < 1e-6][0]
    assert abs(top["C_KD_NCl"] - (np.sqrt(2) - 1)) <= 1e-4 and abs(top["C_l1"] - 1) <= 1e-12
    assert all(abs(r["C_KD_NRe"] - r["C_l1"]) <= 1e-4 for r in rows if r["r"] == 1)
    assert all(max(r["C_KD_NCl"], r["C_l1"], r["C_KD_NRe"]) <= 1e-8 for r in rows if r["theta"] == 0)
