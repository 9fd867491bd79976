"""Tests for the command-line entry point and result files."""

import csv
import logging
from unittest.mock import patch

import pytest

from railcell.radio.src.exceptions import CoverageError
from railcell.system.src.cli import EXIT_CONFIG_ERROR, EXIT_OK, EXIT_RUNTIME_ERROR, main
from railcell.system.src.config import ScenarioConfig, parse_config
from railcell.system.src.output import SWEEP_HEADER, drop_font_cache_notices, manifest_path

SMALL_CONFIG = """\
# three positions, short drops
drops_per_point=2
ttis_per_drop=5
positions_m=0:500:1000
master_seed=5
"""


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "scenario.cfg"
    path.write_text(SMALL_CONFIG, encoding="utf-8")
    return path


def _rows(path):
    with path.open(encoding="utf-8", newline="") as f:
        return list(csv.reader(f))


class TestMain:
    """Test cases for complete runs."""

    def test_sweep_csv(self, config_file, tmp_path):
        """Test the header and one row per (scheme, position)."""
        out = tmp_path / "sweep.csv"

        assert main(["--config", str(config_file), "--out", str(out)]) == EXIT_OK

        rows = _rows(out)
        assert out.read_text(encoding="utf-8").splitlines()[0] == ",".join(SWEEP_HEADER)
        assert len(rows) == 1 + 9
        assert [row[0] for row in rows[1:4]] == ["baseline"] * 3
        assert [row[1] for row in rows[1:4]] == ["0", "500", "1000"]
        assert all(row[4] == "2" for row in rows[1:])

    def test_byte_identical_reruns(self, config_file, tmp_path):
        """Test that the same config and seed reproduce the CSV exactly."""
        first = tmp_path / "a.csv"
        second = tmp_path / "b.csv"

        assert main(["--config", str(config_file), "--out", str(first)]) == EXIT_OK
        assert main(["--config", str(config_file), "--out", str(second)]) == EXIT_OK
        assert first.read_bytes() == second.read_bytes()

    def test_manifest_reproduces_config(self, config_file, tmp_path):
        """Test that the manifest parses back to the resolved config."""
        out = tmp_path / "sweep.csv"

        assert main(["--config", str(config_file), "--out", str(out), "--seed", "9"]) == EXIT_OK

        manifest = manifest_path(out)
        expected = parse_config(config_file).with_overrides(master_seed=9)
        assert parse_config(manifest) == expected
        assert "# master_seed: 9" in manifest.read_text(encoding="utf-8")

    def test_flag_overrides(self, config_file, tmp_path):
        """Test that flags override the config file."""
        out = tmp_path / "sweep.csv"
        argv = ["--config", str(config_file), "--out", str(out), "--scheme", "relay", "--positions", "250"]

        assert main(argv) == EXIT_OK

        rows = _rows(out)
        assert rows[1:] and [row[:2] for row in rows[1:]] == [["relay", "250"]]

    def test_config_from_environment(self, config_file, tmp_path, monkeypatch):
        """Test that the config path falls back to the environment."""
        monkeypatch.setenv("RAILCELL_CONFIG", str(config_file))
        out = tmp_path / "sweep.csv"

        assert main(["--out", str(out), "--scheme", "baseline"]) == EXIT_OK
        assert parse_config(manifest_path(out)).master_seed == 5

    def test_mobility_output(self, config_file, tmp_path):
        """Test the per-UE and moving-cell mobility rows."""
        out = tmp_path / "sweep.csv"
        mobility = tmp_path / "mobility.csv"
        argv = ["--config", str(config_file), "--out", str(out), "--scheme", "baseline", "--mobility-out", str(mobility)]

        assert main(argv) == EXIT_OK

        rows = _rows(mobility)
        assert len(rows) == 3
        assert rows[1][0] == "per_ue"
        assert rows[1][4] == "4600"
        assert rows[2][0] == "moving_cell"
        assert rows[2][4] == "0"

    def test_plot(self, config_file, tmp_path):
        """Test that the plot is written as SVG."""
        out = tmp_path / "sweep.csv"
        plot = tmp_path / "sweep.svg"

        assert main(["--config", str(config_file), "--out", str(out), "--plot", str(plot)]) == EXIT_OK
        assert "<svg" in plot.read_text(encoding="utf-8")

    def test_penetration_sweep(self, config_file, tmp_path):
        """Test one row per penetration value next to the sweep CSV."""
        out = tmp_path / "sweep.csv"
        argv = [
            "--config", str(config_file),
            "--out", str(out),
            "--scheme", "coordination",
            "--positions", "500",
            "--penetration-sweep", "0,15,30",
        ]

        assert main(argv) == EXIT_OK

        rows = _rows(tmp_path / "sweep_penetration.csv")
        assert rows[0][0] == "penetration_db"
        assert [row[0] for row in rows[1:]] == ["0", "15", "30"]


class TestExitCodes:
    """Test cases for configuration and runtime failures."""

    def test_unknown_key(self, tmp_path, capsys):
        """Test that an unknown config key exits with the config error code."""
        path = tmp_path / "bad.cfg"
        path.write_text("warp_speed=9\n", encoding="utf-8")

        assert main(["--config", str(path), "--out", str(tmp_path / "x.csv")]) == EXIT_CONFIG_ERROR
        assert "warp_speed" in capsys.readouterr().err

    def test_negative_speed(self, tmp_path, capsys):
        """Test that an out-of-range value names key and line."""
        path = tmp_path / "bad.cfg"
        path.write_text("train_speed_kmh=-5\n", encoding="utf-8")

        assert main(["--config", str(path), "--out", str(tmp_path / "x.csv")]) == EXIT_CONFIG_ERROR
        err = capsys.readouterr().err
        assert "train_speed_kmh" in err
        assert "line 1" in err

    def test_invalid_utf8_config(self, tmp_path, capsys):
        """Test that an undecodable config file exits with the config error code."""
        path = tmp_path / "bad.cfg"
        path.write_bytes(b"penetration_db=\xff\xfe10\n")

        assert main(["--config", str(path), "--out", str(tmp_path / "x.csv")]) == EXIT_CONFIG_ERROR
        assert "line 1" in capsys.readouterr().err

    def test_unknown_scheme_flag(self, tmp_path):
        """Test that an invalid choice is a config error, not a crash."""
        assert main(["--scheme", "psychic", "--out", str(tmp_path / "x.csv")]) == EXIT_CONFIG_ERROR

    def test_too_few_drops(self, tmp_path):
        """Test that a confidence interval needs two drops."""
        assert main(["--drops", "1", "--out", str(tmp_path / "x.csv")]) == EXIT_CONFIG_ERROR

    def test_bad_positions(self, tmp_path):
        """Test a malformed position range."""
        assert main(["--positions", "0:0:1000", "--out", str(tmp_path / "x.csv")]) == EXIT_CONFIG_ERROR

    def test_bad_log_level(self, tmp_path):
        """Test that an unknown log level is a config error."""
        assert main(["--log-level", "chatty", "--out", str(tmp_path / "x.csv")]) == EXIT_CONFIG_ERROR

    def test_coverage_failure(self, tmp_path, capsys):
        """Test that a runtime simulation error exits with code 2."""
        out = tmp_path / "x.csv"
        with patch("railcell.system.src.cli.sweep", side_effect=CoverageError(4200.0)):
            assert main(["--out", str(out)]) == EXIT_RUNTIME_ERROR

        assert "SIM_001" in capsys.readouterr().err
        assert not out.exists()

    def test_defaults_need_no_config(self, tmp_path, monkeypatch):
        """Test that a run without file or environment uses the defaults."""
        monkeypatch.delenv("RAILCELL_CONFIG", raising=False)
        out = tmp_path / "x.csv"

        with patch("railcell.system.src.cli.sweep", side_effect=CoverageError(0.0)) as mock_sweep:
            main(["--out", str(out)])

        assert mock_sweep.call_args.args[0] == ScenarioConfig()


class TestFontCacheNotices:
    """Test cases for silencing matplotlib's font indexing."""

    def _record(self, message):
        return logging.LogRecord("matplotlib.font_manager", logging.WARNING, __file__, 1, message, None, None)

    def test_drops_cache_build_notice(self):
        """Test that the first-run font cache notice is filtered out."""
        record = self._record("Matplotlib is building the font cache; this may take a moment.")
        assert not drop_font_cache_notices(record)

    def test_keeps_other_warnings(self):
        """Test that unrelated font warnings still pass."""
        assert drop_font_cache_notices(self._record("findfont: Font family 'Foo' not found."))

    def test_installed_once(self, config_file, tmp_path):
        """Test that repeated plots do not stack filters on the font logger."""
        font_logger = logging.getLogger("matplotlib.font_manager")
        for name in ("a", "b"):
            argv = ["--config", str(config_file), "--out", str(tmp_path / f"{name}.csv"), "--plot", str(tmp_path / f"{name}.svg")]
            assert main(argv) == EXIT_OK

        assert font_logger.filters.count(drop_font_cache_notices) == 1
