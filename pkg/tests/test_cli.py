import json
import math

import numpy as np
import pytest

from spinchaos import config as config_mod
from spinchaos.cli import cli_main
from spinchaos.config import EnsembleConfig, RunConfig
from spinchaos.dynamics import DriveSpec, SystemParams
from spinchaos.entropy import HistogramSpec
from spinchaos.lyapunov import LleConfig


class TestConfigRoundTrip:
    def test_default_round_trip(self):
        cfg = RunConfig()
        assert config_mod.parse(config_mod.serialize(cfg)) == cfg

    def test_nondefault_round_trip(self):
        cfg = RunConfig(
            params=SystemParams(44.0, 46.5, 21.0),
            drive=DriveSpec(2.2, 61.5, (0.0, 1.0, 0.0)),
            dt=2e-5,
            lle=LleConfig(d0=5e-7, reset_time=0.025, n_iter=123, seed=9, stream=3),
            hist=HistogramSpec(bins_per_axis=4, sample_period=2e-3, n_samples=777),
            ensemble=EnsembleConfig(n_ens=64, full_n_ens=256, d_i=1e-3,
                                    t_f_tau=10.0, cadence_tau=0.2),
            seed=42,
            threads=1,
        )
        assert config_mod.parse(config_mod.serialize(cfg)) == cfg

    def test_defaults_match_reference_parameters(self):
        cfg = RunConfig()
        assert cfg.params.q_over_h == 45.0
        assert cfg.params.eps_s_over_h == 45.0
        assert cfg.params.omega_rabi == 22.5
        assert cfg.drive.freq_hz == 60.0
        assert cfg.params.tau_s == pytest.approx(1 / 45.0)

    def test_header_block_recovery(self):
        cfg = RunConfig(seed=7)
        text = config_mod.header_block(cfg, {"command": "test"}) + "a,b\n1,2\n"
        assert config_mod.parse_header(text) == cfg


class TestCli:
    def test_dips_table(self, capsys):
        assert cli_main(["dips", "--omega-m", "60", "--count", "4"]) == 0
        out = capsys.readouterr().out
        rows = [ln.split(",") for ln in out.strip().splitlines()[1:]]
        vals = [float(r[2]) for r in rows]
        assert vals == pytest.approx([5.11, 9.35, 13.56, 17.76], abs=0.01)

    def test_evolve_polar_fixed_point(self, tmp_path):
        # the polar state is stationary when the transverse field is off
        out = tmp_path / "traj.csv"
        rc = cli_main(["evolve", "--init", "polar", "--duration", "1",
                       "--rabi-hz", "0", "--sample-every", "0.1",
                       "--out", str(out)])
        assert rc == 0
        lines = [ln for ln in out.read_text().splitlines() if not ln.startswith("#")]
        header = lines[0].split(",")
        data = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
        rho0 = data[:, header.index("rho0")]
        m = data[:, header.index("m")]
        assert np.allclose(rho0, 1.0, atol=1e-10)
        assert np.allclose(m, 0.0, atol=1e-10)

    def test_evolve_header_is_reproducing(self, tmp_path):
        out = tmp_path / "a.csv"
        assert cli_main(["evolve", "--init", "xC", "--duration", "0.1",
                         "--sample-every", "0.05", "--seed", "5",
                         "--out", str(out)]) == 0
        out2 = tmp_path / "b.csv"
        assert cli_main(["evolve", "--init", "xC", "--duration", "0.1",
                         "--sample-every", "0.05", "--from-manifest", str(out),
                         "--out", str(out2)]) == 0
        strip = lambda p: [ln for ln in p.read_text().splitlines() if not ln.startswith("#")]
        assert strip(out) == strip(out2)

    def test_lle_smoke(self, capsys):
        assert cli_main(["lle", "--init", "xC", "--n-iter", "40"]) == 0
        out = capsys.readouterr().out
        assert "lambda * tau_s" in out

    def test_randomize_summary_json(self, tmp_path):
        out = tmp_path / "rand"
        rc = cli_main(["randomize", "--center", "xR", "--n-ens", "32",
                       "--drive-amp", "2.2", "--out", str(out)])
        assert rc == 0
        summary = json.loads((out / "summary.json").read_text())
        assert summary["n_ens"] == 32
        assert summary["floor"] == pytest.approx(1 / math.sqrt(32))
        assert "tau_r_over_tau_s" in summary
        assert isinstance(summary["randomized"], bool)

    def test_scan_specfile_cli(self, tmp_path):
        cfgfile = tmp_path / "spec.toml"
        cfgfile.write_text(
            '[scan]\nname = "mini"\ndiagnostics = ["lle"]\nic_kind = "haar"\nic_count = 2\n\n'
            '[lle]\nn_iter = 30\n\n'
            "[[point]]\namp = 0.0\nfreq_hz = 60.0\n")
        rc = cli_main(["scan", str(cfgfile), "--out", str(tmp_path / "scan")])
        assert rc == 0
        assert (tmp_path / "scan" / "lle.csv").exists()
        assert (tmp_path / "scan" / "manifest.json").exists()

    def test_usage_error_exit_code(self, capsys):
        with pytest.raises(SystemExit) as exc:
            cli_main(["lle", "--init"])  # missing value
        assert exc.value.code == 1

    def test_unknown_named_state_is_usage_error(self):
        assert cli_main(["evolve", "--init", "nope", "--duration", "0.1"]) == 1

    def test_threads_flag_accepted(self, capsys):
        assert cli_main(["dips", "--count", "1", "--threads", "1"]) == 0
