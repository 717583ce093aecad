import csv
import io
import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ellrs import cli
from ellrs.errors import ParseError, UnknownSubcommand, ValidationError
from ellrs.verify import ResidualReport

finite = st.floats(-1e6, 1e6, allow_nan=False)


# --- config ---------------------------------------------------------------------------

def test_empty_document_gives_defaults():
    cfg = cli.parse_config("")
    assert (cfg.n, cfg.tau, cfg.gamma, cfg.hbar) == (3, 1j, 0.21 + 0.13j, 0.1)
    assert cfg.checks == tuple(sorted(cli.vf.DEFAULT_TOLERANCES))


def test_defaults_round_trip():
    cfg = cli.ScenarioConfig()
    assert cli.parse_config(cli.emit_config(cfg)) == cfg


@given(finite, finite)
def test_complex_round_trip(a, b):
    z = complex(a, b)
    assert cli.parse_complex(cli.format_complex(z)) == z


@pytest.mark.parametrize("text,value", [("0.21+0.13i", 0.21 + 0.13j), ("i", 1j), ("-2.5 - 1e-3 i", -2.5 - 0.001j),
                                        ("3", 3), ("0.5j", 0.5j)])
def test_parse_complex(text, value):
    assert cli.parse_complex(text) == value


def test_full_document():
    text = """
    # scenario
    n = 4
    tau = 0.1+1.2i
    gamma = 0.3 + 0.05 i
    seeds = 7, 8
    n_values = 2, 5
    checks = prop3, cybe
    spectral_points = 0.3+0.1i; 0.6-0.1i | 0.2; 0.45+0.2i
    tol.prop3 = 1e-11
    """
    cfg = cli.parse_config(text)
    assert cfg.n == 4 and cfg.tau == 0.1 + 1.2j and cfg.seeds == (7, 8)
    assert cfg.checks == ("cybe", "prop3")
    assert cfg.spectral_points[1] == (0.2, 0.45 + 0.2j)
    assert cfg.tolerances == {"prop3": 1e-11}
    assert cli.parse_config(cli.emit_config(cfg)) == cfg


@pytest.mark.parametrize("text,exc,needle", [
    ("n = 9", ValidationError, "[2, 8]"),
    ("n_values = 1, 2", ValidationError, "[2, 8]"),
    ("tau = 1-0.5i", ValidationError, "Im(tau)"),
    ("checks = prop3, nonsense", ValidationError, "nonsense"),
    ("s12_variant = q", ValidationError, "s12_variant"),
    ("n 3", ParseError, "line 1"),
    ("colour = red", ParseError, "colour"),
    ("gamma = 1+", ParseError, "complex"),
    ("n = three", ParseError, "int"),
])
def test_config_errors(text, exc, needle):
    with pytest.raises(exc) as info:
        cli.parse_config(text)
    assert needle in str(info.value)


# --- report emission ----------------------------------------------------------------------

def reports():
    return [
        ResidualReport("alpha", 1e-12, 1e-13, 1e-9, "abc", True, ""),
        ResidualReport("beta", 0.5, 0.25, 1e-9, "def", False, "n=2 seed=0"),
    ]


def test_json_fixed_key_order():
    out = json.loads(cli.format_reports(reports(), "json"))
    assert len(out) == 2
    assert list(out[0]) == list(cli.REPORT_KEYS)


def test_csv_scientific_six_digits():
    rows = list(csv.reader(io.StringIO(cli.format_reports(reports(), "csv"))))
    assert rows[0] == list(cli.REPORT_KEYS)
    assert len(rows) == 3
    assert rows[2][2] == "2.50000e-01"


def test_human_table():
    text = cli.format_reports(reports(), "human")
    assert text.splitlines()[0].startswith("PASS alpha")
    assert "FAIL beta" in text and "1/2 passed" in text


def test_emission_is_deterministic():
    for fmt in ("json", "csv", "human"):
        assert cli.format_reports(reports(), fmt) == cli.format_reports(reports(), fmt)


# --- subcommands ----------------------------------------------------------------------------

def test_theta_prints_zero_at_origin():
    code, text, _ = cli.run(["theta", "0", "--format", "json"])
    data = json.loads(text)
    assert code == 0 and abs(complex(*data["sigma"])) < 1e-15


def test_verify_named_check_passes():
    code, text, _ = cli.run(["verify", "check_sklyanin", "--format", "json"])
    out = json.loads(text)
    assert code == 0 and len(out) == 1 and out[0]["check_name"] == "sklyanin"


def test_verify_via_check_flag():
    code, text, _ = cli.run(["verify", "--check", "TG_identity", "--format", "csv"])
    assert code == 0 and "tg_identity" in text


def test_failing_check_sets_exit_code(tmp_path):
    cfgfile = tmp_path / "c.cfg"
    cfgfile.write_text("tol.prop3 = 0\n")
    code, _, _ = cli.run(["verify", "prop3", "--config", str(cfgfile)])
    assert code == 1


def test_lax_and_rmat_commands():
    code, text, _ = cli.run(["lax", "0.4+0.1i", "--kind", "nijhoff", "--check"])
    assert code == 0 and "L =" in text
    code, text, _ = cli.run(["rmat", "0.3+0.05i", "--kind", "quantum", "--check", "--format", "json"])
    assert code == 0


def test_sweep_reports_slope():
    code, text, _ = cli.run(["sweep", "hbar", "--points", "5"])
    rows = list(csv.DictReader(io.StringIO(text)))
    assert len(rows) == 5 and abs(float(rows[0]["slope"]) - 2) < 0.1
    code, text, _ = cli.run(["sweep", "beta", "--points", "4"])
    rows = list(csv.DictReader(io.StringIO(text)))
    assert abs(float(rows[0]["slope"]) - 1) < 0.1


def test_main_writes_out_file(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert cli.main(["verify", "prop3", "--format", "json", "--out", str(out)]) == 0
    assert json.loads(out.read_text())[0]["passed"] is True
    assert capsys.readouterr().out == ""


def test_unknown_subcommand():
    with pytest.raises(UnknownSubcommand):
        cli.run(["plot"])
    assert cli.main(["plot"]) == 2


def test_seeded_runs_identical():
    a = cli.run(["verify", "prop3", "lemma1", "--seed", "5", "--format", "json"])
    b = cli.run(["verify", "prop3", "lemma1", "--seed", "5", "--format", "json"])
    assert a == b
