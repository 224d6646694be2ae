"""End-to-end runs of every subcommand through main(), checking exit codes
against the documented table and output against independent expectations."""
import json

import pytest

from raycap.cli import main
from raycap.report import check_stamp


@pytest.fixture(autouse=True)
def isolated_cache(tmp_path, monkeypatch):
    monkeypatch.setenv("RAYCAP_CACHE_DIR", str(tmp_path / "cache"))


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestRayclass:
    def test_rational_mod_five(self, capsys):
        code, out, _ = run(capsys, "rayclass", "--field", "Q", "--mod", "5")
        assert code == 0
        assert "invariants (2,)" in out

    def test_gaussian_mod_three(self, capsys):
        code, out, _ = run(capsys, "rayclass", "--d", "-1", "--mod", "3")
        assert code == 0
        assert "invariants (2,)" in out

    def test_trivial(self, capsys):
        code, out, _ = run(capsys, "rayclass", "--d", "2", "--mod", "1")
        assert code == 0
        assert "invariants ()" in out

    def test_json_is_stamped_and_consistent(self, capsys):
        code, out, _ = run(capsys, "rayclass", "--d", "-5", "--mod", "3", "--json")
        assert code == 0
        report = json.loads(out)
        assert check_stamp(report)
        assert report["kind"] == "rayclass"
        assert report["payload"]["identity_holds"] is True
        assert report["payload"]["order"] == 4

    def test_split_prime_selector(self, capsys):
        # 13 splits in Q(sqrt 3); either factor alone is a legal modulus
        code, out, _ = run(capsys, "rayclass", "--d", "3", "--mod", "13.0", "--json")
        assert code == 0
        assert len(json.loads(out)["payload"]["modulus"]) == 1

    def test_invalid_d_exits_two(self, capsys):
        code, _, err = run(capsys, "rayclass", "--d", "12", "--mod", "1")
        assert code == 2
        assert "squarefree" in err

    def test_bad_modulus_entry(self, capsys):
        code, _, _ = run(capsys, "rayclass", "--d", "3", "--mod", "15")
        assert code == 2


class TestSearchAndVerify:
    def test_flagship_end_to_end(self, capsys, tmp_path):
        cert_path = tmp_path / "cert.json"
        code, out, _ = run(
            capsys, "search", "--d", "34", "--mod", "1", "--class", "auto-2",
            "--l", "2", "--n", "1", "--bound", "1000000", "--out", str(cert_path),
        )
        assert code == 0
        assert "found p = 5" in out
        assert cert_path.exists()

        code, out, _ = run(capsys, "verify", str(cert_path), "--update")
        assert code == 0
        assert "status: capitulates" in out
        # verification was written back into the file
        data = json.loads(cert_path.read_text())
        assert data["payload"]["verification"]["status"] == "capitulates"

    def test_search_json_report(self, capsys, tmp_path):
        code, out, _ = run(
            capsys, "search", "--d", "34", "--mod", "1", "--json",
            "--out", str(tmp_path / "c.json"),
        )
        assert code == 0
        report = json.loads(out)
        assert check_stamp(report)
        assert report["payload"]["certificate"]["p"] == 5

    def test_bound_too_small_exits_three(self, capsys, tmp_path):
        code, _, _ = run(
            capsys, "search", "--d", "34", "--mod", "1", "--bound", "3",
            "--out", str(tmp_path / "c.json"),
        )
        assert code == 3

    def test_power_blocked_exits_four_with_hint(self, capsys, tmp_path):
        code, out, _ = run(
            capsys, "search", "--d", "34", "--mod", "1", "--n", "2", "--h", "1",
            "--out", str(tmp_path / "c.json"),
        )
        assert code == 4
        assert "q = 1 mod 8" in out

    def test_odd_group_has_no_auto_target(self, capsys, tmp_path):
        code, _, err = run(
            capsys, "search", "--d", "3", "--mod", "1",
            "--out", str(tmp_path / "c.json"),
        )
        assert code == 2
        assert "odd order" in err

    def test_explicit_class_vector(self, capsys, tmp_path):
        code, _, _ = run(
            capsys, "search", "--d", "34", "--mod", "1", "--class", "1",
            "--out", str(tmp_path / "c.json"),
        )
        assert code == 0

    def test_wrong_vector_length(self, capsys, tmp_path):
        code, _, _ = run(
            capsys, "search", "--d", "34", "--mod", "1", "--class", "1,0",
            "--out", str(tmp_path / "c.json"),
        )
        assert code == 2

    def test_failed_congruence_exits_five(self, capsys, tmp_path):
        cert_path = tmp_path / "fc.json"
        code, _, _ = run(
            capsys, "search", "--d", "6", "--mod", "11", "--class", "10",
            "--bound", "5000", "--out", str(cert_path),
        )
        assert code == 0
        code, out, _ = run(capsys, "verify", str(cert_path))
        assert code == 5
        assert "failed_congruence" in out

    def test_quartic_certificate_exits_seven(self, capsys, tmp_path):
        cert_path = tmp_path / "quartic.json"
        code, _, _ = run(
            capsys, "search", "--d", "82", "--mod", "1", "--n", "2",
            "--bound", "100000", "--out", str(cert_path),
        )
        assert code == 0
        code, out, _ = run(capsys, "verify", str(cert_path))
        assert code == 7
        assert "unverified" in out

    def test_verify_missing_file(self, capsys):
        code, _, _ = run(capsys, "verify", "/nonexistent/cert.json")
        assert code == 2

    def test_verify_tampered_file(self, capsys, tmp_path):
        cert_path = tmp_path / "t.json"
        run(capsys, "search", "--d", "34", "--mod", "1", "--out", str(cert_path))
        data = json.loads(cert_path.read_text())
        data["payload"]["certificate"]["root"] += 1
        cert_path.write_text(json.dumps(data))
        code, _, err = run(capsys, "verify", str(cert_path))
        assert code == 2
        assert "integrity" in err

    def test_cached_search_is_byte_identical(self, capsys, tmp_path):
        argv = ["search", "--d", "34", "--mod", "1", "--json",
                "--out", str(tmp_path / "c.json")]
        code1, out1, _ = run(capsys, *argv)
        code2, out2, _ = run(capsys, *argv)
        assert code1 == code2 == 0
        assert out1 == out2


class TestAmbig:
    def test_single_quadratic_case(self, capsys):
        code, out, _ = run(capsys, "ambig", "--L-disc", "-20", "--mod", "3")
        assert code == 0
        assert "all equal: True" in out

    def test_disc_eight(self, capsys):
        code, out, _ = run(capsys, "ambig", "--L-disc", "8", "--mod", "1", "--json")
        assert code == 0
        report = json.loads(out)
        assert report["payload"]["formula"] == report["payload"]["direct"] == 1

    def test_biquad_case(self, capsys):
        code, out, _ = run(capsys, "ambig", "--biquad", "2,5", "--mod", "11", "--json")
        assert code == 0
        report = json.loads(out)
        assert report["payload"]["equal"] is True
        assert report["payload"]["formula"] == 5

    def test_non_fundamental_disc(self, capsys):
        code, _, _ = run(capsys, "ambig", "--L-disc", "10", "--mod", "1")
        assert code == 2

    def test_unknown_sweep_name(self, capsys):
        code, _, _ = run(capsys, "ambig", "--sweep", "everything")
        assert code == 2

    def test_no_case_given(self, capsys):
        code, _, _ = run(capsys, "ambig")
        assert code == 2

    def test_cold_and_warm_runs_identical(self, capsys):
        code1, out1, _ = run(capsys, "ambig", "--L-disc", "-20", "--mod", "3", "--json")
        code2, out2, _ = run(capsys, "ambig", "--L-disc", "-20", "--mod", "3", "--json")
        assert code1 == code2 == 0
        assert out1 == out2


class TestSelftest:
    def test_battery_passes(self, capsys):
        code, out, _ = run(capsys, "selftest")
        assert code == 0
        assert "FAIL" not in out
        assert out.count("PASS") == 6
