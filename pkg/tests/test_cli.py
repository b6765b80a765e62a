import json
import subprocess
import sys

import pytest

from optquad import closed_form_m1, closed_form_m2
from optquad.cli import main


def run_cli(*args, capsys=None):
    code = main(list(args))
    out, err = capsys.readouterr()
    return code, out, err


class TestCoeffs:
    def test_order_one_single_interval(self, capsys):
        code, out, _ = run_cli("coeffs", "--m", "1", "--n", "1", "--method", "closed", capsys=capsys)
        assert code == 0
        doc = json.loads(out)
        assert doc["schema_version"] == 1
        assert doc["method"] == "closed"
        assert doc["nodes"] == [0.0, 1.0]
        expected = closed_form_m1(1).coefficients
        assert doc["coefficients"] == list(expected)
        assert doc["d"] == 0.0

    def test_order_two_single_interval(self, capsys):
        code, out, _ = run_cli("coeffs", "--m", "2", "--n", "1", "--method", "closed", capsys=capsys)
        assert code == 0
        doc = json.loads(out)
        assert doc["coefficients"][0] == pytest.approx(0.4180232931306735, abs=1e-15)
        assert doc["coefficients"][1] == pytest.approx(0.5819767068693265, abs=1e-15)

    def test_json_round_trip_is_exact(self, capsys):
        code, out, _ = run_cli("coeffs", "--m", "2", "--n", "8", capsys=capsys)
        assert code == 0
        doc = json.loads(out)
        assert doc["coefficients"] == list(closed_form_m2(8).coefficients)
        assert doc["h"] == 0.125

    def test_csv_format(self, capsys):
        code, out, _ = run_cli(
            "coeffs", "--m", "2", "--n", "2", "--format", "csv", capsys=capsys
        )
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "beta,node,coefficient"
        assert len(lines) == 4
        rule = closed_form_m2(2)
        for beta, line in enumerate(lines[1:]):
            b, node, coeff = line.split(",")
            assert int(b) == beta
            assert float(node) == beta / 2
            assert float(coeff) == rule.coefficients[beta]

    def test_out_file(self, tmp_path, capsys):
        target = tmp_path / "rule.json"
        code, out, _ = run_cli(
            "coeffs", "--m", "1", "--n", "4", "--out", str(target), capsys=capsys
        )
        assert code == 0
        assert out == ""
        doc = json.loads(target.read_text())
        assert doc["n"] == 4

    def test_closed_form_unavailable_for_order_three(self, capsys):
        code, _, err = run_cli("coeffs", "--m", "3", "--n", "2", "--method", "closed", capsys=capsys)
        assert code == 2
        assert "m" in err

    def test_solve_method_for_order_three(self, capsys):
        code, out, _ = run_cli("coeffs", "--m", "3", "--n", "4", "--method", "solve", capsys=capsys)
        assert code == 0
        doc = json.loads(out)
        assert doc["method"] == "solve"
        assert doc["diagnostics"]["condition_number"] > 1.0
        assert doc["diagnostics"]["constraint_residuals"]["exp"] <= 1e-11

    def test_zero_intervals_is_usage_error(self, capsys):
        code, _, err = run_cli("coeffs", "--m", "2", "--n", "0", capsys=capsys)
        assert code == 2


class TestGoldenStability:
    @pytest.mark.parametrize("m, n", [(1, 1), (2, 1), (2, 8)])
    def test_byte_identical_across_runs(self, m, n, capsys):
        _, first, _ = run_cli("coeffs", "--m", str(m), "--n", str(n), capsys=capsys)
        _, second, _ = run_cli("coeffs", "--m", str(m), "--n", str(n), capsys=capsys)
        assert first == second
        assert first.endswith("\n")

    def test_byte_identical_in_fresh_processes(self, tmp_path):
        cmd = [sys.executable, "-m", "optquad", "coeffs", "--m", "2", "--n", "8"]
        first = subprocess.run(cmd, capture_output=True, check=True).stdout
        second = subprocess.run(cmd, capture_output=True, check=True).stdout
        assert first == second

    def test_seventeen_digit_serialization_round_trips(self, capsys):
        # parse -> reformat at 17 significant digits -> identical text
        _, out, _ = run_cli("coeffs", "--m", "2", "--n", "8", capsys=capsys)
        doc = json.loads(out)
        for text_value, value in [
            (f"{c:.17g}", c) for c in closed_form_m2(8).coefficients
        ]:
            assert float(text_value) == value
            assert text_value in out
        assert doc["coefficients"] == list(closed_form_m2(8).coefficients)


class TestIntegrate:
    def test_exponential_exactness(self, capsys):
        code, out, _ = run_cli(
            "integrate", "--m", "2", "--n", "8", "--function", "exp-neg", capsys=capsys
        )
        assert code == 0
        error = float(out.splitlines()[2].split()[-1])
        assert error <= 1e-12

    def test_constant_order_two(self, capsys):
        code, out, _ = run_cli(
            "integrate", "--m", "2", "--n", "5", "--function", "one", capsys=capsys
        )
        assert code == 0
        assert float(out.splitlines()[2].split()[-1]) <= 1e-12

    def test_sin_error_decreases(self, capsys):
        errors = []
        for n in ("16", "32"):
            code, out, _ = run_cli(
                "integrate", "--m", "1", "--n", n, "--function", "sin", capsys=capsys
            )
            assert code == 0
            errors.append(float(out.splitlines()[2].split()[-1]))
        assert errors[0] > errors[1] > 0.0

    def test_unknown_function(self, capsys):
        code, _, err = run_cli(
            "integrate", "--m", "1", "--n", "4", "--function", "cosh", capsys=capsys
        )
        assert code == 2
        assert "unknown integrand" in err

    def test_order_three_defaults_to_solve(self, capsys):
        code, out, _ = run_cli(
            "integrate", "--m", "3", "--n", "4", "--function", "exp-neg", capsys=capsys
        )
        assert code == 0
        assert float(out.splitlines()[2].split()[-1]) <= 1e-11


class TestVerify:
    @pytest.mark.parametrize("m, n", [(1, 8), (2, 16), (3, 4)])
    def test_passes_for_valid_grids(self, m, n, capsys):
        code, out, _ = run_cli("verify", "--m", str(m), "--n", str(n), capsys=capsys)
        report = json.loads(out)
        assert code == 0
        assert report["passed"] is True
        names = {c["name"] for c in report["checks"]}
        assert "operator_identities" in names
        assert "solve_constraints" in names

    def test_reports_closed_vs_solve_deviation(self, capsys):
        code, out, _ = run_cli("verify", "--m", "2", "--n", "16", capsys=capsys)
        assert code == 0
        report = json.loads(out)
        check = next(c for c in report["checks"] if c["name"] == "closed_vs_solve")
        assert check["value"] <= 1e-9
        assert check["tolerance"] == 1e-9

    def test_usage_error_for_bad_grid(self, capsys):
        code, _, err = run_cli("verify", "--m", "2", "--n", "0", capsys=capsys)
        assert code == 2

    def test_report_written_to_file(self, tmp_path, capsys):
        target = tmp_path / "report.json"
        code, out, _ = run_cli(
            "verify", "--m", "1", "--n", "4", "--out", str(target), capsys=capsys
        )
        assert code == 0
        assert out == ""
        assert json.loads(target.read_text())["passed"] is True

    def test_failure_exit_code_when_a_check_fails(self, capsys, monkeypatch):
        import optquad.cli as cli_mod

        def broken(m, n):
            return [{"name": "forced", "value": 1.0, "tolerance": 1e-12, "passed": False}]

        monkeypatch.setattr(cli_mod, "_verify_checks", broken)
        code, out, _ = run_cli("verify", "--m", "1", "--n", "2", capsys=capsys)
        assert code == 1
        assert json.loads(out)["passed"] is False


class TestConvergence:
    def test_norm_mode_csv(self, capsys):
        code, out, _ = run_cli(
            "convergence", "--m", "1", "--n-list", "2,4,8,16", "--norm-mode", capsys=capsys
        )
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "n,value,ratio,order"
        values = [float(line.split(",")[1]) for line in lines[1:]]
        assert all(a > b for a, b in zip(values, values[1:]))

    def test_exactness_column_for_exp_neg(self, capsys):
        code, out, _ = run_cli(
            "convergence", "--m", "1", "--n-list", "2,4,8",
            "--function", "exp-neg", capsys=capsys,
        )
        assert code == 0
        values = [float(line.split(",")[1]) for line in out.strip().splitlines()[1:]]
        assert all(v <= 1e-12 for v in values)

    def test_json_format(self, capsys):
        code, out, _ = run_cli(
            "convergence", "--m", "2", "--n-list", "2,4", "--function", "exp",
            "--format", "json", capsys=capsys,
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["quantity"] == "exp"
        assert len(doc["rows"]) == 2
        assert doc["rows"][1]["order"] is not None

    def test_unsorted_list_rejected(self, capsys):
        code, _, err = run_cli(
            "convergence", "--m", "1", "--n-list", "8,4", "--norm-mode", capsys=capsys
        )
        assert code == 2
        assert "ascending" in err

    def test_function_or_norm_mode_required(self, capsys):
        code, _, err = run_cli(
            "convergence", "--m", "1", "--n-list", "2,4", capsys=capsys
        )
        assert code == 2

    def test_function_and_norm_mode_conflict(self, capsys):
        code, _, err = run_cli(
            "convergence", "--m", "1", "--n-list", "2,4",
            "--function", "sin", "--norm-mode", capsys=capsys,
        )
        assert code == 2
        assert "mutually exclusive" in err


class TestCompare:
    def test_exponential_favours_optimal(self, capsys):
        code, out, _ = run_cli(
            "compare", "--m", "1", "--n", "10", "--function", "exp-neg", capsys=capsys
        )
        assert code == 0
        lines = out.strip().splitlines()
        table = {line.split()[0]: float(line.split()[2]) for line in lines[1:]}
        assert table["optimal"] <= 1e-12
        assert table["trapezoid"] > 1e-6

    def test_constants_favour_trapezoid_at_order_one(self, capsys):
        code, out, _ = run_cli(
            "compare", "--m", "1", "--n", "10", "--function", "one", capsys=capsys
        )
        lines = out.strip().splitlines()
        table = {line.split()[0]: float(line.split()[2]) for line in lines[1:]}
        assert table["optimal"] > 1e-6
        assert table["trapezoid"] <= 1e-15

    def test_odd_n_omits_simpson(self, capsys):
        code, out, _ = run_cli(
            "compare", "--m", "1", "--n", "5", "--function", "sin", capsys=capsys
        )
        assert code == 0
        assert "simpson omitted" in out
        assert "simpson " not in out.splitlines()[1]

    def test_even_n_includes_simpson(self, capsys):
        code, out, _ = run_cli(
            "compare", "--m", "1", "--n", "6", "--function", "sin", capsys=capsys
        )
        names = [line.split()[0] for line in out.strip().splitlines()[1:]]
        assert names == ["optimal", "trapezoid", "simpson"]


class TestExitCodes:
    def test_numeric_failure_maps_to_three(self, capsys, monkeypatch):
        import optquad.cli as cli_mod
        from optquad import SolveError

        def explode(m, n, method):
            raise SolveError("synthetic numeric failure")

        monkeypatch.setattr(cli_mod, "build_rule", explode)
        code, _, err = run_cli("coeffs", "--m", "1", "--n", "2", capsys=capsys)
        assert code == 3
        assert "numeric failure" in err

    def test_missing_subcommand_is_usage_error(self, capsys):
        assert run_cli(capsys=capsys)[0] == 2

    def test_help_exits_zero(self, capsys):
        assert run_cli("--help", capsys=capsys)[0] == 0

    def test_console_script_runs(self):
        proc = subprocess.run(
            [sys.executable, "-m", "optquad", "verify", "--m", "1", "--n", "2"],
            capture_output=True,
        )
        assert proc.returncode == 0
