import subprocess
import sys
from pathlib import Path

import pytest

from permugibbs.cli import ConfigError, load_config, main, validate_config

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def write_config(tmp_path, body, name="cfg.toml"):
    path = tmp_path / name
    path.write_text(body, encoding="utf-8")
    return str(path)


MINIMAL = """
[run]
master_seed = 1
volumes = [[-2, 2]]
checks = ["v0-uniform"]
"""


class TestConfig:
    def test_minimal_valid(self, tmp_path):
        cfg = load_config(write_config(tmp_path, MINIMAL))
        assert cfg["run"]["checks"] == ["v0-uniform"]
        assert cfg["potential"]["kind"] == "power"

    def test_missing_file(self):
        with pytest.raises(ConfigError):
            load_config("/nonexistent/nope.toml")

    def test_bad_toml(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(write_config(tmp_path, "not [valid"))

    def test_unknown_section(self):
        with pytest.raises(ConfigError, match="unknown config sections"):
            validate_config({"bogus": {}})

    def test_unknown_key(self):
        with pytest.raises(ConfigError, match="unknown keys"):
            validate_config({"potential": {"gamma": 2}})

    def test_unknown_check(self):
        with pytest.raises(ConfigError, match="unknown check id"):
            validate_config({"run": {"checks": ["not-a-check"]}})

    def test_bad_volumes(self):
        with pytest.raises(ConfigError, match="volumes"):
            validate_config({"run": {"volumes": [[3, 1]]}})


class TestCommands:
    def test_points(self, tmp_path):
        cfg = write_config(tmp_path, """
[pointset]
kind = "integer-lattice"
window = [-3.0, 3.0]
""")
        out = tmp_path / "out"
        assert main(["points", "--config", cfg, "--out", str(out)]) == 0
        lines = (out / "points.csv").read_text().splitlines()
        assert lines[0] == "coord" and len(lines) == 8
        assert (out / "manifest.csv").exists()

    def test_verify_quick_config(self, tmp_path):
        rc = main(["verify", "--config", str(CONFIGS / "quick.toml"),
                   "--out", str(tmp_path / "v")])
        assert rc == 0
        report = (tmp_path / "v" / "report.csv").read_text().splitlines()
        assert report[0] == "check_id,params,bound,observed,margin,pass"
        assert all(line.endswith("true") for line in report[1:])

    def test_unknown_check_exits_2_without_outputs(self, tmp_path):
        cfg = write_config(tmp_path, """
[run]
checks = ["mystery"]
""")
        out = tmp_path / "nope"
        assert main(["verify", "--config", cfg, "--out", str(out)]) == 2
        assert not out.exists()

    def test_enumerate_cap_error(self, tmp_path):
        cfg = write_config(tmp_path, """
[run]
volumes = [[-6, 6]]
""")
        out = tmp_path / "big"
        assert main(["enumerate", "--config", cfg, "--out", str(out)]) == 2
        assert not (out / "table.csv").exists()

    def test_enumerate_writes_table(self, tmp_path):
        cfg = write_config(tmp_path, """
[run]
volumes = [[-1, 1]]
""")
        out = tmp_path / "t"
        assert main(["enumerate", "--config", cfg, "--out", str(out)]) == 0
        lines = (out / "table.csv").read_text().splitlines()
        assert lines[0] == "state_id,energy,probability,flow"
        assert len(lines) == 7  # 3! states

    def test_sample_deterministic(self, tmp_path):
        cfg = write_config(tmp_path, """
[sampler]
steps = 20000
burn_in = 1000

[run]
volumes = [[-2, 2]]
""")
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        assert main(["sample", "--config", cfg, "--seed", "7",
                     "--out", str(out_a)]) == 0
        assert main(["sample", "--config", cfg, "--seed", "7",
                     "--out", str(out_b)]) == 0
        assert (out_a / "empirical.csv").read_bytes() \
            == (out_b / "empirical.csv").read_bytes()

    def test_manifest_hash_stability(self, tmp_path):
        out_a, out_b = tmp_path / "m1", tmp_path / "m2"
        for out in (out_a, out_b):
            assert main(["verify", "--config", str(CONFIGS / "quick.toml"),
                         "--out", str(out)]) == 0
        assert (out_a / "manifest.csv").read_bytes() \
            == (out_b / "manifest.csv").read_bytes()

    def test_scan(self, tmp_path):
        cfg = write_config(tmp_path, """
[sampler]
steps = 60000
burn_in = 5000

[run]
volumes = [[-2, 2], [-3, 3]]
window = [-1, 1]
""")
        out = tmp_path / "s"
        assert main(["scan", "--config", cfg, "--out", str(out)]) == 0
        lines = (out / "scan.csv").read_text().splitlines()
        assert lines[0] == "pair,tv,stderr,exact,support"
        assert len(lines) == 2

    def test_console_entry_point(self, tmp_path):
        cfg = write_config(tmp_path, MINIMAL)
        proc = subprocess.run(
            [sys.executable, "-m", "permugibbs.cli", "verify",
             "--config", cfg, "--out", str(tmp_path / "cli_out")],
            capture_output=True, text=True)
        assert proc.returncode == 0
        assert "v0-uniform: pass" in proc.stdout
