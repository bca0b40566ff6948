import csv
import json
from pathlib import Path

import numpy as np
import pytest

from pwtransfer.cli import load_config, main, read_spectrum_csv
from pwtransfer.errors import InputError, UsageError

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def _rows(path):
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
    return rows[0], np.array(rows[1:], dtype=float)


@pytest.mark.parametrize("name, expect", [("alpha0", "PWT: yes, T = 1.570796"),
                                          ("legendre", "PWT: no"), ("chebyshev2", "PWT: no")])
def test_check_pwt_examples(tmp_path, capsys, name, expect):
    assert main(["check-pwt", "--config", str(CONFIGS / f"{name}.ini"), "--out", str(tmp_path)]) == 0
    assert capsys.readouterr().out.startswith(expect)
    d = json.loads((tmp_path / "pwt.json").read_text())
    assert d["_meta"]["command"] == "check-pwt"


def test_correlate_mirror_rows(tmp_path, capsys):
    ini = tmp_path / "c.ini"
    ini.write_text("[run]\ncommand = correlate\n[v]\nkind = cosine_series\ncos = 1.0, 0.0, 0.3\n"
                   "[numeric]\nn_max = 48\nn_modes = 48\n[correlate]\nx_points = 21\nt_points = 3\n")
    assert main(["--config", str(ini), "--out", str(tmp_path / "o")]) == 0
    cols, data = _rows(tmp_path / "o" / "correlate.csv")
    assert cols == ["x", "t", "re", "im", "abs"]
    t = np.unique(data[:, 1])
    first = data[data[:, 1] == t[0]]
    last = data[data[:, 1] == t[-1]]
    c0 = first[:, 2] + 1j * first[:, 3]
    cT = last[:, 2] + 1j * last[:, 3]
    assert np.allclose(last[:, 0], -first[::-1, 0], atol=1e-15)
    assert np.max(np.abs(cT - c0[::-1])) <= 1e-9


def test_outputs_are_deterministic_and_stamped(tmp_path, capsys):
    cfg = str(CONFIGS / "spectrum.ini")
    for d in ("a", "b"):
        assert main(["spectrum", "--config", cfg, "--out", str(tmp_path / d), "--n-max", "10", "--svg"]) == 0
    names = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert "spectrum.csv" in names and "modes.svg" in names
    for n in names:
        assert (tmp_path / "a" / n).read_bytes() == (tmp_path / "b" / n).read_bytes()
    h = load_config(cfg, "spectrum", {"n_max": 10, "out": str(tmp_path / "a"), "svg": True}).config_hash()
    head = (tmp_path / "a" / "spectrum.csv").read_text().splitlines()
    assert head[0].startswith("# pwtransfer ") and head[1] == f"# config_sha256 {h}"
    # atomic writes leave no temporaries behind
    assert not any(n.startswith(".") for n in names)


def test_hash_ignores_output_directory():
    cfg = str(CONFIGS / "alpha0.ini")
    a = load_config(cfg, None, {"out": "x"}).config_hash()
    b = load_config(cfg, None, {"out": "y"}).config_hash()
    c = load_config(cfg, None, {"n_max": 40}).config_hash()
    assert a == b != c


def test_exit_codes(tmp_path, capsys):
    cfg = str(CONFIGS / "alpha0.ini")
    assert main(["bogus"]) == 1
    assert main(["check-pwt", "--config", str(tmp_path / "missing.ini")]) == 1
    assert main(["check-pwt", "--config", cfg, "--grid", "100", "--out", str(tmp_path)]) == 1
    # too few modes for the period search is a numerical failure
    assert main(["check-pwt", "--config", cfg, "--n-max", "3", "--out", str(tmp_path)]) == 2
    err = capsys.readouterr().err
    assert "InsufficientModes" in err


def test_bad_numeric_value():
    with pytest.raises(UsageError):
        load_config(str(CONFIGS / "alpha0.ini"), None, {"n_max": 0})


def test_spectrum_csv_reader(tmp_path):
    good = tmp_path / "g.csv"
    good.write_text("# c\nn,E\n0,0.0\n1,3.0\n2,6.0\n")
    assert np.array_equal(read_spectrum_csv(good), [0.0, 3.0, 6.0])
    for body in ("n,E\n0,0.0\n2,3.0\n", "n,E\n0,zero\n", "n,E\n0\n"):
        bad = tmp_path / "b.csv"
        bad.write_text(body)
        with pytest.raises(InputError):
            read_spectrum_csv(bad)
    with pytest.raises(InputError):
        read_spectrum_csv(tmp_path / "none.csv")


def test_invert_malformed_target_exits_1(tmp_path, capsys):
    (tmp_path / "t.csv").write_text("n,E\n0,0.0\n1,x\n")
    ini = tmp_path / "i.ini"
    ini.write_text("[run]\ncommand = invert\n[invert]\ntarget = t.csv\n")
    assert main(["--config", str(ini), "--out", str(tmp_path / "o")]) == 1
    assert "InputError" in capsys.readouterr().err
