import json
import sys

import pytest
from loguru import logger

from facon_api import cli
from facon_api import config as settings
from facon_api.cli import EXIT_INPUT_ERROR, EXIT_OK, EXIT_VERIFY_MISMATCH, STRATIFY_KEYS, main
from facon_api.services.verify import OracleReport, VerifyReport

SMALL = ["-E", "2", "-D", "3", "--trials", "4", "--samples", "60", "--log-level", "WARNING"]


@pytest.fixture(autouse=True)
def restore_logging():
    yield
    # main() points the sink at the captured stderr
    logger.remove()
    logger.add(sys.stderr, level="WARNING")


def test_count_facons(capsys):
    assert main(["count-facons", "-n", "3", "--format", "text"]) == EXIT_OK
    assert capsys.readouterr().out == "19\n"
    assert main(["count-facons", "-n", "3"]) == EXIT_OK
    assert json.loads(capsys.readouterr().out) == 19


def test_count_facons_rejects_zero(capsys):
    assert main(["count-facons", "-n", "0"]) == EXIT_INPUT_ERROR
    assert "Dimension must be at least 1" in capsys.readouterr().err


def test_analyze_three_component_example(capsys, mappings_dir):
    assert main(["analyze", str(mappings_dir / "exfacon.map"), *SMALL, "--seed", "0"]) == EXIT_OK
    document = json.loads(capsys.readouterr().out)
    assert [entry["label"] for entry in document["facons"]] == ["(3)[1]", "(3)[2]", "(3)[1,2]"]
    assert [level["dimension"] for level in document["filtration"]] == [2, 1, 0]
    assert document["frontier"] is True
    assert document["scope"]["seed"] == 0


def test_stratify_keeps_only_the_stratification(capsys, mappings_dir):
    assert main(["stratify", str(mappings_dir / "cusp.map"), *SMALL]) == EXIT_OK
    document = json.loads(capsys.readouterr().out)
    assert tuple(sorted(document)) == tuple(sorted(STRATIFY_KEYS))
    assert [stratum["implicit_eqs"] for stratum in document["strata"]] == [["a1^3 - a2^2"], ["a1", "a2"]]


def test_text_format(capsys, mappings_dir):
    assert main(["analyze", str(mappings_dir / "cusp.map"), *SMALL, "--format", "text"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "(2)[1]^{1*}" in out
    assert "frontier: true" in out


def test_seed_falls_back_to_environment(capsys, mappings_dir, monkeypatch):
    monkeypatch.setenv("FACON_SEED", "42")
    assert main(["stratify", str(mappings_dir / "cusp.map"), *SMALL]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["scope"]["seed"] == 42


def test_parse_error_reports_position(capsys, tmp_path):
    path = tmp_path / "broken.map"
    path.write_text("vars x1 x2;\nx1;\nx1 + * x2\n", encoding="utf-8")
    assert main(["analyze", str(path), *SMALL]) == EXIT_INPUT_ERROR
    captured = capsys.readouterr()
    assert captured.out == ""
    assert f"{path}: line 3, column 6:" in captured.err


def test_missing_file(capsys, tmp_path):
    assert main(["analyze", str(tmp_path / "absent.map"), *SMALL]) == EXIT_INPUT_ERROR
    assert "cannot read" in capsys.readouterr().err


def test_invalid_bound_is_an_input_error(capsys, mappings_dir):
    assert main(["analyze", str(mappings_dir / "cusp.map"), "-E", "0"]) == EXIT_INPUT_ERROR
    assert "max_exponent: Value error, Must be at least 1" in capsys.readouterr().err


def test_verify_cusp(capsys, mappings_dir):
    assert main(["verify", str(mappings_dir / "cusp.map"), "-E", "2", "--log-level", "WARNING"]) == EXIT_OK
    document = json.loads(capsys.readouterr().out)
    assert document["passed"] is True
    assert document["scope"] == {"E": 2, "seed": 0}
    assert document["oracle"]["agrees"] is True


def test_undecodable_file_reports_position(capsys, tmp_path):
    path = tmp_path / "latin1.map"
    path.write_bytes(b"vars x1; x1 \xff\n")
    assert main(["analyze", str(path), *SMALL]) == EXIT_INPUT_ERROR
    captured = capsys.readouterr()
    assert captured.out == ""
    assert f"{path}: line 1, column 13: invalid UTF-8 byte 0xff" in captured.err


def test_verify_mismatch_exits_with_its_own_status(capsys, mappings_dir, monkeypatch):
    failing = VerifyReport(oracle=OracleReport(False, ("(2)[1]",), (), ("(2)[1] found numerically only",)))
    monkeypatch.setattr(cli, "verify", lambda *args, **kwargs: failing)
    assert main(["verify", str(mappings_dir / "cusp.map"), "-E", "2", "--log-level", "WARNING"]) == EXIT_VERIFY_MISMATCH
    document = json.loads(capsys.readouterr().out)
    assert document["passed"] is False
    assert document["oracle"]["mismatches"] == ["(2)[1] found numerically only"]


def test_malformed_seed_in_environment_is_an_input_error(capsys, mappings_dir, monkeypatch):
    monkeypatch.setenv("FACON_SEED", "abc")
    assert main(["stratify", str(mappings_dir / "cusp.map"), *SMALL]) == EXIT_INPUT_ERROR
    captured = capsys.readouterr()
    assert captured.out == ""
    assert "seed" in captured.err


def test_malformed_settings_are_input_errors(capsys, mappings_dir, monkeypatch):
    monkeypatch.setattr(settings, "INVALID_SETTINGS", ["FACON_TRIALS='x' is not an integer"])
    assert main(["stratify", str(mappings_dir / "cusp.map"), *SMALL]) == EXIT_INPUT_ERROR
    assert "facon: FACON_TRIALS='x' is not an integer" in capsys.readouterr().err


def test_integer_settings_fall_back_and_record_malformed_values(monkeypatch):
    recorded: list[str] = []
    monkeypatch.setattr(settings, "INVALID_SETTINGS", recorded)
    monkeypatch.setenv("FACON_TRIALS", " 7 ")
    assert settings.env_int("FACON_TRIALS", 12) == 7
    monkeypatch.setenv("FACON_TRIALS", "")
    assert settings.env_int("FACON_TRIALS", 12) == 12
    monkeypatch.setenv("FACON_TRIALS", "seven")
    assert settings.env_int("FACON_TRIALS", 12) == 12
    assert recorded == ["FACON_TRIALS='seven' is not an integer"]
