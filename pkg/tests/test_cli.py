import json
import math
import os
import subprocess
import sys

import numpy as np
import pytest

from nlrpb import serialize
from nlrpb.cli import main
from nlrpb.cryptoherm import CryptoPair
from nlrpb.models import chebyshev_model, chebyshev_paper_normalization


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    monkeypatch.delenv("NLRPB_TOL", raising=False)


def run_json(capsys, argv):
    rc = main(argv)
    out = capsys.readouterr().out
    return rc, json.loads(out)


def checks_by_name(doc):
    found = {}
    for sec in doc["sections"]:
        if sec["kind"] == "checks":
            for c in sec["checks"]:
                found[c["name"]] = c
    return found


class TestModelCommand:
    def test_chebyshev_report(self, capsys):
        rc, doc = run_json(capsys, ["model", "chebyshev", "--n", "5"])
        assert rc == 0
        assert doc["pass"] is True
        assert doc["command"] == "model"
        _, sys5 = chebyshev_model(5)
        spectrum = next(s for s in doc["sections"] if s["kind"] == "spectrum")
        assert np.abs(np.array(spectrum["values"]) - sys5.eps).max() < 1e-14
        checks = checks_by_name(doc)
        assert "p3_biorthonormality" in checks
        assert "commutator_gaps" in checks
        assert "eigen_relations" in checks

    def test_checks_sorted_by_name(self, capsys):
        rc, doc = run_json(capsys, ["model", "chebyshev", "--n", "3"])
        for sec in doc["sections"]:
            if sec["kind"] == "checks":
                names = [c["name"] for c in sec["checks"]]
                assert names == sorted(names)

    def test_two_param_report(self, capsys):
        rc, doc = run_json(capsys, ["model", "two-param", "--beta", "2", "--delta", "-1"])
        assert rc == 0
        spectrum = next(s for s in doc["sections"] if s["kind"] == "spectrum")
        assert np.abs(np.array(spectrum["values"]) - [0.0, 4.5]).max() < 1e-12

    def test_artifact_output(self, capsys, tmp_path):
        path = tmp_path / "model.json"
        rc, _ = run_json(capsys, ["model", "chebyshev", "--n", "4", "-o", str(path)])
        assert rc == 0
        art = serialize.load_document(path)
        assert serialize.detect_kind(art) == "artifact"
        assert art["family"] == "chebyshev"
        assert art["params"]["n"] == 4
        assert set(art["matrices"]) == {"m", "a", "b", "s_phi", "s_eta"}

    def test_two_param_artifact_params(self, capsys, tmp_path):
        path = tmp_path / "tp.json"
        rc, _ = run_json(capsys, ["model", "two-param", "--beta", "1", "--delta", "-1", "-o", str(path)])
        assert rc == 0
        art = serialize.load_document(path)
        assert art["family"] == "two-param"
        assert set(art["params"]) == {"beta", "delta", "y", "w"}

    def test_missing_n_is_invalid(self, capsys):
        assert main(["model", "chebyshev"]) == 2
        assert "error" in capsys.readouterr().err

    def test_mixed_family_flags_invalid(self, capsys):
        assert main(["model", "chebyshev", "--n", "3", "--beta", "1"]) == 2
        assert main(["model", "two-param", "--beta", "1", "--delta", "-1", "--n", "2"]) == 2

    def test_equal_parameters_invalid(self, capsys):
        assert main(["model", "two-param", "--beta", "1", "--delta", "1"]) == 2
        assert "beta equals delta" in capsys.readouterr().err

    def test_missing_delta_invalid(self, capsys):
        assert main(["model", "two-param", "--beta", "1"]) == 2

    def test_unknown_family_is_parser_error(self, capsys):
        assert main(["model", "hydrogen"]) == 2


class TestVerifyCommand:
    def make_artifact(self, capsys, tmp_path, n=4):
        path = tmp_path / "art.json"
        rc, _ = run_json(capsys, ["model", "chebyshev", "--n", str(n), "-o", str(path)])
        assert rc == 0
        return path

    def test_clean_artifact_passes(self, capsys, tmp_path):
        path = self.make_artifact(capsys, tmp_path)
        rc, doc = run_json(capsys, ["verify", str(path)])
        assert rc == 0
        assert doc["pass"] is True
        assert "eps_structure" in checks_by_name(doc)

    def test_corrupted_eps_fails_ladder_relations(self, capsys, tmp_path):
        path = self.make_artifact(capsys, tmp_path)
        art = json.loads(path.read_text())
        art["system"]["eps"][1] += 0.1
        path.write_text(json.dumps(art))
        rc, doc = run_json(capsys, ["verify", str(path)])
        assert rc == 1
        assert doc["pass"] is False
        checks = checks_by_name(doc)
        assert checks["p3_ladder_relations"]["pass"] is False
        assert checks["p3_biorthonormality"]["pass"] is True

    def test_bare_system_passes(self, capsys, tmp_path):
        path = tmp_path / "sys.json"
        serialize.write_document(path, serialize.system_to_dict(chebyshev_paper_normalization(3)))
        rc, doc = run_json(capsys, ["verify", str(path)])
        assert rc == 0
        assert "p4_resolution_of_identity" in checks_by_name(doc)

    def test_bad_ground_level_fails_structure_gate(self, capsys, tmp_path):
        doc_sys = serialize.system_to_dict(chebyshev_paper_normalization(3))
        doc_sys["eps"][0] = 0.5
        path = tmp_path / "sys.json"
        serialize.write_document(path, doc_sys)
        rc, doc = run_json(capsys, ["verify", str(path)])
        assert rc == 1
        checks = checks_by_name(doc)
        assert checks["eps_structure"]["pass"] is False
        assert checks["eps_structure"]["tolerance"] == 0.0
        # data-level pairing still reported, ladder checks skipped
        assert "p3_biorthonormality" in checks
        assert "p3_ladder_relations" not in checks

    def test_pair_document(self, capsys, tmp_path):
        _, sys3 = chebyshev_model(3)
        from nlrpb.cryptoherm import from_nlrpb

        pair = from_nlrpb(sys3)
        path = tmp_path / "pair.json"
        serialize.write_document(path, serialize.crypto_to_dict(pair))
        rc, doc = run_json(capsys, ["verify", str(path)])
        assert rc == 0
        checks = checks_by_name(doc)
        assert checks["cryptohermiticity"]["pass"] is True
        assert checks["metric_spd"]["pass"] is True
        assert checks["spectrum_min_gap"]["pass"] is True
        shifted = next(s for s in doc["sections"] if s["kind"] == "spectrum")
        assert np.abs(np.array(shifted["values"]) - sys3.eps).max() < 1e-10

    def test_pair_with_wrong_metric_fails(self, capsys, tmp_path):
        m, _ = chebyshev_model(3)
        pair = CryptoPair(m, np.eye(3))
        path = tmp_path / "pair.json"
        serialize.write_document(path, serialize.crypto_to_dict(pair))
        rc, doc = run_json(capsys, ["verify", str(path)])
        assert rc == 1
        checks = checks_by_name(doc)
        assert checks["cryptohermiticity"]["pass"] is False
        assert "spectrum_min_gap" not in checks

    def test_missing_file(self, capsys):
        assert main(["verify", "/no/such/file.json"]) == 3

    def test_garbage_file(self, capsys, tmp_path):
        path = tmp_path / "garbage.json"
        path.write_text("certainly { not json")
        assert main(["verify", str(path)]) == 3

    def test_unrecognized_schema(self, capsys, tmp_path):
        path = tmp_path / "odd.json"
        path.write_text('{"foo": 1}')
        assert main(["verify", str(path)]) == 3

    def test_env_tolerance_loosens(self, capsys, tmp_path, monkeypatch):
        path = self.make_artifact(capsys, tmp_path)
        art = json.loads(path.read_text())
        art["system"]["eps"][1] += 0.1
        path.write_text(json.dumps(art))
        monkeypatch.setenv("NLRPB_TOL", "1.0")
        rc, doc = run_json(capsys, ["verify", str(path)])
        assert rc == 0
        assert doc["tolerance"] == {"value": 1.0, "source": "env"}

    def test_flag_overrides_env(self, capsys, tmp_path, monkeypatch):
        path = self.make_artifact(capsys, tmp_path)
        art = json.loads(path.read_text())
        art["system"]["eps"][1] += 0.1
        path.write_text(json.dumps(art))
        monkeypatch.setenv("NLRPB_TOL", "1.0")
        rc, doc = run_json(capsys, ["verify", str(path), "--tol", "1e-10"])
        assert rc == 1
        assert doc["tolerance"] == {"value": 1e-10, "source": "flag"}

    def test_invalid_env_tolerance(self, capsys, tmp_path, monkeypatch):
        path = self.make_artifact(capsys, tmp_path)
        monkeypatch.setenv("NLRPB_TOL", "not-a-number")
        assert main(["verify", str(path)]) == 2

    def test_negative_flag_tolerance(self, capsys, tmp_path):
        path = self.make_artifact(capsys, tmp_path)
        assert main(["verify", str(path), "--tol", "-1"]) == 2


class TestConvertCommand:
    def test_system_to_pair_golden_metric(self, capsys, tmp_path):
        src = tmp_path / "sys.json"
        dst = tmp_path / "pair.json"
        serialize.write_document(src, serialize.system_to_dict(chebyshev_paper_normalization(2)))
        rc, doc = run_json(capsys, ["convert", "nlrpb2crypto", str(src), "-o", str(dst)])
        assert rc == 0
        pair = serialize.crypto_from_dict(serialize.load_document(dst))
        s2 = math.sqrt(2.0)
        ref = np.array([[3.0, -s2], [-s2, 6.0]]) / 4.0
        assert np.abs(pair.theta - ref).max() < 1e-12
        checks = checks_by_name(doc)
        assert checks["eps_roundtrip"]["pass"] is True
        assert checks["eigenline_cosines"]["pass"] is True

    def test_pair_to_system_identity_metric(self, capsys, tmp_path):
        s3 = math.sqrt(3.0)
        h_ref = np.array([[s3, math.sqrt(2.0), 0.0], [math.sqrt(2.0), s3, 1.0], [0.0, 1.0, s3]])
        src = tmp_path / "pair.json"
        dst = tmp_path / "sys.json"
        serialize.write_document(src, serialize.crypto_to_dict(CryptoPair(h_ref, np.eye(3))))
        rc, doc = run_json(capsys, ["convert", "crypto2nlrpb", str(src), "-o", str(dst)])
        assert rc == 0
        out = serialize.system_from_dict(serialize.load_document(dst))
        assert np.abs(out.phi - out.eta).max() < 1e-13
        assert np.abs(out.eps - [0.0, s3, 2.0 * s3]).max() < 1e-12

    def test_full_roundtrip_chebyshev_n4(self, capsys, tmp_path):
        art = tmp_path / "art.json"
        pair = tmp_path / "pair.json"
        back = tmp_path / "back.json"
        assert main(["model", "chebyshev", "--n", "4", "-o", str(art)]) == 0
        capsys.readouterr()
        assert main(["convert", "nlrpb2crypto", str(art), "-o", str(pair)]) == 0
        capsys.readouterr()
        rc, doc = run_json(capsys, ["convert", "crypto2nlrpb", str(pair), "-o", str(back)])
        assert rc == 0
        checks = checks_by_name(doc)
        assert checks["h_roundtrip"]["pass"] is True
        assert checks["theta_roundtrip"]["pass"] is True
        _, sys4 = chebyshev_model(4)
        out = serialize.system_from_dict(serialize.load_document(back))
        assert np.abs(out.eps - sys4.eps).max() < 1e-9

    def test_artifact_accepted_directly(self, capsys, tmp_path):
        art = tmp_path / "art.json"
        assert main(["model", "two-param", "--beta", "1.5", "--delta", "-0.5", "-o", str(art)]) == 0
        capsys.readouterr()
        rc, _ = run_json(capsys, ["convert", "nlrpb2crypto", str(art)])
        assert rc == 0

    def test_wrong_kind_for_direction(self, capsys, tmp_path):
        pair_path = tmp_path / "pair.json"
        serialize.write_document(pair_path, serialize.crypto_to_dict(CryptoPair(np.eye(2), np.eye(2))))
        assert main(["convert", "nlrpb2crypto", str(pair_path)]) == 3
        sys_path = tmp_path / "sys.json"
        serialize.write_document(sys_path, serialize.system_to_dict(chebyshev_paper_normalization(2)))
        assert main(["convert", "crypto2nlrpb", str(sys_path)]) == 3

    def test_semantically_broken_system_is_invalid(self, capsys, tmp_path):
        doc = {
            "n": 2,
            "eps": [0.0, 1.0],
            "phi": [[1.0, 0.0], [1.0, 1.0]],
            "eta": [[1.0, 0.0], [0.0, 1.0]],
        }
        path = tmp_path / "broken.json"
        serialize.write_document(path, doc)
        assert main(["convert", "nlrpb2crypto", str(path)]) == 2

    def test_degenerate_pair_is_invalid(self, capsys, tmp_path):
        path = tmp_path / "degenerate.json"
        serialize.write_document(path, serialize.crypto_to_dict(CryptoPair(np.eye(2), np.eye(2))))
        assert main(["convert", "crypto2nlrpb", str(path)]) == 2


class TestPaperTablesCommand:
    @pytest.mark.parametrize("table", ["n2", "n3", "n4", "n5", "two-param"])
    def test_all_tables_pass(self, capsys, table):
        rc, doc = run_json(capsys, ["paper-tables", table])
        assert rc == 0
        assert doc["pass"] is True
        for sec in doc["sections"]:
            if sec["kind"] == "comparison":
                for row in sec["rows"]:
                    assert row["deviation"] < 1e-8

    def test_markdown_format(self, capsys):
        rc = main(["paper-tables", "n2", "--format", "md"])
        out = capsys.readouterr().out
        assert rc == 0
        assert out.startswith("# nlrpb paper-tables n2")
        assert "| check | residual | tolerance | pass |" in out

    def test_csv_format(self, capsys):
        rc = main(["paper-tables", "n3", "--format", "csv"])
        out = capsys.readouterr().out
        assert rc == 0
        lines = out.strip().splitlines()
        assert lines[0] == "section,check,residual,tolerance,pass"
        assert all(line.endswith(",true") for line in lines[1:])

    def test_unknown_table_rejected(self, capsys):
        assert main(["paper-tables", "n9"]) == 2


class TestParserBasics:
    def test_help_exits_zero(self, capsys):
        assert main(["--help"]) == 0
        assert "model" in capsys.readouterr().out

    def test_no_command_is_error(self, capsys):
        assert main([]) == 2

    def test_unknown_command_is_error(self, capsys):
        assert main(["frobnicate"]) == 2

    def test_module_entry_point(self, tmp_path):
        env = {k: v for k, v in os.environ.items() if k != "NLRPB_TOL"}
        proc = subprocess.run(
            [sys.executable, "-m", "nlrpb", "paper-tables", "n4"],
            capture_output=True,
            text=True,
            env=env,
        )
        assert proc.returncode == 0
        doc = json.loads(proc.stdout)
        assert doc["pass"] is True

    def test_timestamp_is_utc(self, capsys):
        _, doc = run_json(capsys, ["paper-tables", "n4"])
        assert doc["timestamp"].endswith("+00:00")
