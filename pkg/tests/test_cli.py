"""Ingestion and command-line interface tests."""

from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
import pytest

try:
    import tomllib
except ModuleNotFoundError:
    import tomli as tomllib

from powerburr.claims import ClaimSample, ParseError, ingest
from powerburr.cli import EXIT_CONFIG, EXIT_OK, EXIT_PARSE, main
from powerburr.params import DomainError


@pytest.fixture
def claims_file(tmp_path) -> Path:
    path = tmp_path / "claims.csv"
    path.write_text("claim,region\n1.5,a\n2.25,b\n0.75,a\n10.0,c\n")
    return path


class TestClaimSample:
    def test_summary(self):
        sample = ClaimSample(np.array([1.0, 2.0, 3.0]))
        stats = sample.summary()
        assert stats["n"] == 3
        assert stats["mean"] == pytest.approx(2.0)
        assert stats["max"] == 3.0

    def test_positivity_enforced(self):
        with pytest.raises(DomainError):
            ClaimSample(np.array([1.0, -2.0]))


class TestIngest:
    def test_by_header_name(self, claims_file):
        sample = ingest(claims_file, column="claim")
        assert len(sample) == 4
        assert sample.values[0] == 1.5
        assert sample.source == str(claims_file)

    def test_by_index_with_header(self, claims_file):
        sample = ingest(claims_file, column=0)
        assert len(sample) == 4

    def test_nonpositive_rows_rejected_with_line_numbers(self, tmp_path):
        path = tmp_path / "zeros.csv"
        path.write_text("claim\n1.0\n0.0\n2.0\n-3.5\n4.0\n")
        sample = ingest(path, column="claim")
        assert len(sample) == 3
        assert sample.rejected_rows == (3, 5)

    def test_semicolon_delimiter_override(self, tmp_path):
        path = tmp_path / "semi.csv"
        path.write_text("claim;other\n1.5;x\n2.5;y\n")
        sample = ingest(path, column="claim", delimiter=";")
        assert list(sample.values) == [1.5, 2.5]
        # sniffing picks the same delimiter without the override
        assert list(ingest(path, column="claim").values) == [1.5, 2.5]

    def test_parse_error_carries_line_number(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("claim\n1.0\nnot-a-number\n")
        with pytest.raises(ParseError, match="line 3"):
            ingest(path, column="claim")

    def test_missing_column_name(self, claims_file):
        with pytest.raises(ParseError, match="no column named"):
            ingest(claims_file, column="absent")

    def test_empty_after_filtering(self, tmp_path):
        path = tmp_path / "allzero.csv"
        path.write_text("claim\n0.0\n-1.0\n")
        with pytest.raises(ParseError, match="no positive loss amounts"):
            ingest(path, column="claim")


def run_cli(*argv) -> int:
    return main(list(argv))


class TestSampleCommand:
    def test_reference_count_round_trip(self, tmp_path):
        out = tmp_path / "synthetic"
        code = run_cli(
            "sample", "--family", "pareto", "--params", "3,2", "-n", "6446",
            "--seed", "5", "--out", str(out),
        )
        assert code == EXIT_OK
        sample = ingest(out / "claims.csv", column="claim")
        assert len(sample) == 6446

    def test_deterministic(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        for out in (a, b):
            run_cli("sample", "--family", "gamma", "-n", "50", "--seed", "9", "--out", str(out))
        assert (a / "claims.csv").read_bytes() == (b / "claims.csv").read_bytes()

    def test_unknown_family_is_config_error(self, tmp_path):
        code = run_cli("sample", "--family", "cauchy", "--out", str(tmp_path / "x"))
        assert code == EXIT_CONFIG


class TestFitCommand:
    def test_ten_families_in_reference_order(self, tmp_path):
        data = tmp_path / "d"
        run_cli("sample", "--family", "gamma", "-n", "400", "--seed", "6", "--out", str(data))
        out = tmp_path / "fit"
        code = run_cli(
            "fit", "--data", str(data / "claims.csv"), "--column", "claim",
            "--seed", "1", "--out", str(out),
        )
        assert code == EXIT_OK
        lines = (out / "fits.csv").read_text().strip().splitlines()
        labels = [line.split(",")[1] for line in lines[1:]]
        assert labels == ["L-N", "L-G", "We", "Pa", "Ga", "E. Pa.", "4-par.", "5-par.", "5-par. 2", "6-par"]

    def test_single_family_selection(self, tmp_path):
        data = tmp_path / "d"
        run_cli("sample", "--family", "gamma", "-n", "300", "--seed", "6", "--out", str(data))
        out = tmp_path / "fit"
        code = run_cli(
            "fit", "--data", str(data / "claims.csv"), "--column", "claim",
            "--family", "six_param", "--out", str(out),
        )
        assert code == EXIT_OK
        lines = (out / "fits.csv").read_text().strip().splitlines()
        assert len(lines) == 2 and lines[1].startswith("six_param,")

    def test_byte_identical_reruns(self, tmp_path):
        data = tmp_path / "d"
        run_cli("sample", "--family", "weibull", "-n", "250", "--seed", "6", "--out", str(data))
        outputs = []
        for tag in ("r1", "r2"):
            out = tmp_path / tag
            run_cli(
                "fit", "--data", str(data / "claims.csv"), "--column", "claim",
                "--seed", "42", "--out", str(out),
            )
            outputs.append((out / "fits.csv").read_bytes())
        assert outputs[0] == outputs[1]

    def test_missing_data_is_config_error(self, tmp_path):
        assert run_cli("fit", "--out", str(tmp_path / "x")) == EXIT_CONFIG

    def test_bad_file_is_parse_error(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("claim\nfoo\n")
        assert run_cli("fit", "--data", str(path)) == EXIT_PARSE


class TestReserveCommand:
    def test_explicit_spec(self, tmp_path):
        out = tmp_path / "res"
        code = run_cli(
            "reserve", "--family", "gamma", "--params", "1,2", "--lambda", "10",
            "--epsilon", "0.05", "--epsilon", "0.01", "--m", "5000",
            "--seed", "3", "--out", str(out),
        )
        assert code == EXIT_OK
        lines = (out / "reserves.csv").read_text().strip().splitlines()
        assert len(lines) == 3
        q95 = float(lines[1].split(",")[4])
        q99 = float(lines[2].split(",")[4])
        assert q99 > q95 > 10.0

    def test_scale_column(self, tmp_path):
        out = tmp_path / "res"
        run_cli(
            "reserve", "--family", "gamma", "--params", "1,2", "--lambda", "1000",
            "--epsilon", "0.05", "--m", "2000", "--scale", "1000", "--out", str(out),
        )
        header, row = (out / "reserves.csv").read_text().strip().splitlines()
        assert header.endswith("q_star_scaled")
        cells = row.split(",")
        assert float(cells[5]) == pytest.approx(float(cells[4]) / 1000.0, rel=1e-12)

    def test_fitted_reserves_from_data(self, tmp_path):
        data = tmp_path / "d"
        run_cli("sample", "--family", "gamma", "-n", "500", "--seed", "8", "--out", str(data))
        out = tmp_path / "res"
        code = run_cli(
            "reserve", "--data", str(data / "claims.csv"), "--column", "claim",
            "--family", "gamma", "--family", "log_normal", "--lambda", "10",
            "--epsilon", "0.05", "--m", "2000", "--seed", "3", "--out", str(out),
        )
        assert code == EXIT_OK
        lines = (out / "reserves.csv").read_text().strip().splitlines()
        assert len(lines) == 3  # two families x one lambda x one epsilon


class TestBacktestCommand:
    def test_explicit_threshold_round_trip(self, tmp_path):
        # 314 of 6446 claims above the threshold at the 5% level: p ~ 0.668
        values = ["claim"] + ["2.0"] * 314 + ["0.5"] * (6446 - 314)
        path = tmp_path / "claims.csv"
        path.write_text("\n".join(values) + "\n")
        out = tmp_path / "bt"
        code = run_cli(
            "backtest", "--data", str(path), "--column", "claim",
            "--epsilon", "0.05", "--threshold", "1.0", "--out", str(out),
        )
        assert code == EXIT_OK
        row = (out / "backtest.csv").read_text().strip().splitlines()[1].split(",")
        assert int(row[3]) == 314
        assert float(row[5]) == pytest.approx(0.668, abs=0.02)

    def test_two_levels_in_one_report(self, tmp_path, claims_file):
        out = tmp_path / "bt"
        code = run_cli(
            "backtest", "--data", str(claims_file), "--column", "claim",
            "--family", "log_normal", "--epsilon", "0.05", "--epsilon", "0.01",
            "--out", str(out),
        )
        assert code == EXIT_OK
        lines = (out / "backtest.csv").read_text().strip().splitlines()
        assert len(lines) == 3

    def test_empty_epsilon_rejected(self, claims_file):
        assert run_cli("backtest", "--data", str(claims_file), "--column", "claim") == EXIT_CONFIG

    def test_threshold_count_mismatch(self, claims_file):
        code = run_cli(
            "backtest", "--data", str(claims_file), "--column", "claim",
            "--epsilon", "0.05", "--epsilon", "0.01", "--threshold", "1.0",
        )
        assert code == EXIT_CONFIG


class TestStudyCommand:
    def test_small_study_writes_tables(self, tmp_path):
        out = tmp_path / "study"
        code = run_cli(
            "study", "--true-family", "gamma", "--family", "gamma", "--family", "weibull",
            "--n", "150", "--replications", "4", "--m", "400", "--lambda", "5",
            "--seed", "2", "--out", str(out),
        )
        assert code == EXIT_OK
        names = sorted(p.name for p in out.glob("study_*.csv"))
        assert names == [
            "study_n150_quantile_0p01.csv",
            "study_n150_quantile_0p05.csv",
            "study_n150_reserve_0p01_5p0.csv",
            "study_n150_reserve_0p05_5p0.csv",
        ]
        header = (out / names[0]).read_text().splitlines()[0]
        assert header == "block,A\\T,Ga"

    def test_thread_count_preserves_bytes(self, tmp_path):
        outputs = []
        for tag, threads in (("t1", "1"), ("t8", "8")):
            out = tmp_path / tag
            run_cli(
                "study", "--true-family", "gamma", "--family", "gamma",
                "--n", "120", "--replications", "6", "--m", "300", "--lambda", "5",
                "--seed", "2", "--threads", threads, "--out", str(out),
            )
            outputs.append((out / "study_n120_quantile_0p05.csv").read_bytes())
        assert outputs[0] == outputs[1]


class TestConfigPrecedence:
    def test_config_file_overrides_flags(self, tmp_path):
        config = tmp_path / "study.toml"
        config.write_text('[study]\nreplications = 3\nn = [100]\nlambdas = []\n')
        out = tmp_path / "study"
        code = run_cli(
            "study", "--true-family", "gamma", "--family", "gamma",
            "--replications", "50", "--config", str(config),
            "--seed", "2", "--out", str(out),
        )
        assert code == EXIT_OK
        report = tomllib.loads((out / "report.toml").read_text())
        assert report["config"]["replications"] == 3
        assert report["config"]["n"] == [100]

    def test_unknown_config_key_rejected(self, tmp_path):
        config = tmp_path / "study.toml"
        config.write_text("[study]\nbogus_key = 1\n")
        assert run_cli("study", "--config", str(config)) == EXIT_CONFIG

    def test_report_config_reruns_identically(self, tmp_path):
        data = tmp_path / "d"
        run_cli("sample", "--family", "extended_pareto", "-n", "300", "--seed", "11", "--out", str(data))
        first = tmp_path / "first"
        run_cli(
            "fit", "--data", str(data / "claims.csv"), "--column", "claim",
            "--seed", "17", "--out", str(first),
        )
        report = tomllib.loads((first / "report.toml").read_text())
        cfg = report["config"]
        second = tmp_path / "second"
        code = run_cli(
            "fit", "--data", cfg["data"], "--column", cfg["column"],
            "--seed", str(cfg["seed"]), "--out", str(second),
        )
        assert code == EXIT_OK
        assert (first / "fits.csv").read_bytes() == (second / "fits.csv").read_bytes()
