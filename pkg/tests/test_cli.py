import csv
import json
from pathlib import Path

import pytest

from levy_orlicz.cli import ConfigError, load_config, main, parse_config_text, run, validate

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def _run(tmp_path, text, *extra):
    cfg = tmp_path / "c.cfg"
    cfg.write_text(text)
    return main(["run", "--config", str(cfg), "--out", str(tmp_path / "out"), *extra])


def test_parse_repeated_sections():
    cfg = parse_config_text("suite = gns\nt = 2, 3\n[kernel]\nname = fractional-1/4\n"
                            "[kernel]\nfamily = fractional\ns = 0.125\n[function]\nname = hat\n")
    assert cfg.t == (2.0, 3.0)
    assert len(cfg.kernels) == 2 and cfg.kernels[1]["s"] == "0.125"
    validate(cfg)


@pytest.mark.parametrize("text, where", [
    ("suite = gns\nbogus = 1\n", ":2:"),
    ("suite = gns\n[weird]\n", ":2:"),
    ("suite = gns\njust text\n", ":2:"),
    ("t = 2\nt = 3\n", ":2:"),
    ("resolution = many\n", ":1:"),
])
def test_parse_errors_carry_line(text, where):
    with pytest.raises(ConfigError, match=where):
        parse_config_text(text)


@pytest.mark.parametrize("text", [
    "t = 1.5\n",
    "resolution = 1000\n",
    "resolution = 32\n",
    "suite = nope\n",
    "mode = b\n",
    "[kernel]\nfamily = fractional\ns = 1.5\n",
    "[function]\nname = unknown\n",
    "[function]\ncsv = missing.csv\n",
])
def test_validation_failures(text):
    with pytest.raises(ConfigError):
        validate(parse_config_text(text))


def test_exit_codes_matrix(tmp_path):
    assert _run(tmp_path, "suite = fractional-gns\nresolution = 256\n") == 0
    assert _run(tmp_path, "suite = gns\nt = 1.5\n") == 2
    assert _run(tmp_path, "suite = inverse\n[inverse]\nq = 2\nc = 1\n") == 2
    assert main(["run", "--config", str(tmp_path / "absent.cfg")]) == 2
    # an artificially negative tolerance cannot be set; a failing check gives 1
    assert _run(tmp_path, "suite = gns\nresolution = 256\n[kernel]\nfamily = indicator\n"
                          "[function]\nname = hat\n") == 1


def test_outputs_and_determinism(tmp_path):
    text = "suite = gns\nresolution = 256\nt = 2, 3\n[kernel]\nname = fractional-1/4\n"
    assert _run(tmp_path, text) == 0
    out = tmp_path / "out"
    first = (out / "reports.jsonl").read_bytes()
    rows = [json.loads(x) for x in first.decode().splitlines()]
    assert len(rows) == 8 and all(r["passed"] for r in rows)
    with open(out / "summary.csv") as fh:
        assert next(csv.reader(fh)) == ["id", "lhs", "rhs", "margin", "pass"]
    assert (out / "curves" / "phi_fractional-1_4.csv").exists()
    assert (out / "curves" / "w_fractional-1_4.csv").exists()
    assert (out / "curves" / "margins_gns.csv").exists()
    assert _run(tmp_path, text) == 0
    assert (out / "reports.jsonl").read_bytes() == first


def test_workers_do_not_change_output(tmp_path):
    text = "suite = lemmas\nresolution = 256\nt = 2, 3\n"
    assert _run(tmp_path, text) == 0
    serial = (tmp_path / "out" / "reports.jsonl").read_bytes()
    assert _run(tmp_path, text, "--workers", "3") == 0
    assert (tmp_path / "out" / "reports.jsonl").read_bytes() == serial


def test_golden_configs(tmp_path):
    assert main(["run", "--config", str(CONFIGS / "golden_gns.cfg"),
                 "--out", str(tmp_path / "g"), "--resolution", "256"]) == 0
    assert main(["run", "--config", str(CONFIGS / "bad_t.cfg"), "--out", str(tmp_path / "b")]) == 2
    assert main(["run", "--config", str(CONFIGS / "bad_inverse.cfg"),
                 "--out", str(tmp_path / "b")]) == 2


def test_describe_messages(capsys):
    assert main(["describe", "fractional", "s=0.25"]) == 0
    out = capsys.readouterr().out
    assert "32 t^4" in out and "theta: 0.420448" in out and "kappa: 1" in out
    main(["describe", "indicator", "radius=1"])
    assert "w saturates; phi undefined beyond r*" in capsys.readouterr().out
    main(["describe", "max-fractional", "s1=0.125", "s2=0.25"])
    out = capsys.readouterr().out
    assert "growth condition fails" in out and "per-component" in out


def test_norm_seminorm_critical(capsys, tmp_path):
    assert main(["seminorm", "indicator", "--kernel", "fractional s=0.25", "--resolution", "256"]) == 0
    assert "seminorm^p" in capsys.readouterr().out
    assert main(["norm", "hat", "--kernel", "fractional s=0.25", "--resolution", "256"]) == 0
    assert "luxemburg norm" in capsys.readouterr().out
    assert main(["critical", "--kernel", "fractional s=0.25", "--out", str(tmp_path / "phi.csv"),
                 "--explore", "--resolution", "256"]) == 0
    assert (tmp_path / "phi.csv").exists()
    assert main(["norm", "nosuch", "--kernel", "fractional s=0.25"]) == 2


def test_load_config_relative_csv(tmp_path):
    (tmp_path / "k.csv").write_text("0.1,31.62\n1,1\n10,0.03162\n")
    cfg_path = tmp_path / "c.cfg"
    cfg_path.write_text("suite = gns\n[kernel]\nfamily = csv\ncsv = k.csv\n")
    cfg = load_config(str(cfg_path))
    validate(cfg)
    cfg.out = str(tmp_path / "out")
    assert run(cfg, log=lambda *_: None) in (0, 1)
    assert (tmp_path / "out" / "reports.jsonl").exists()
