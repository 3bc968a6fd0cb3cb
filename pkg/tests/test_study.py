"""Study runner: configuration, CSV contract, determinism."""

import json
from dataclasses import replace

import numpy as np
import pytest

from lincov_fidelity.study import (
    CSV_COLUMNS,
    default_config,
    load_config,
    run_study,
    save_config,
)


@pytest.fixture(scope="module")
def small_cfg():
    # short arc, few samples: exercises every code path in seconds
    return replace(
        default_config(),
        grid_points=4,
        t_end=0.3,
        mc_samples=300,
        mc_rtol=1e-9,
        mc_atol=1e-9,
    )


@pytest.fixture(scope="module")
def small_run(small_cfg, tmp_path_factory):
    out = tmp_path_factory.mktemp("small_run")
    return run_study(small_cfg, out)


class TestDefaultConfig:
    def test_reference_covariance_entries(self):
        cov = default_config().cov_array
        assert cov[0, 0] == pytest.approx(1.01e-8)
        assert cov[2, 2] == pytest.approx(1.01e-8)
        assert cov[1, 1] == pytest.approx(1e-10)
        assert np.allclose(np.diag(cov)[3:], 1e-10)

    def test_reference_scalars(self):
        cfg = default_config()
        assert cfg.mc_samples == 10_000
        assert cfg.t_end == 1.511111
        assert cfg.grid_points == 100
        assert cfg.ut_kappa == -3.0

    def test_validation(self):
        with pytest.raises(ValueError):
            replace(default_config(), grid_points=1)
        with pytest.raises(ValueError):
            replace(default_config(), mc_samples=1)


class TestConfigRoundTrip:
    def test_save_load_identity(self, tmp_path):
        cfg = default_config()
        path = tmp_path / "study.cfg"
        save_config(cfg, path)
        assert load_config(path) == cfg

    def test_missing_field_diagnostic(self, tmp_path):
        path = tmp_path / "broken.cfg"
        path.write_text("[state]\nmean = 1 0 0 0 0 0\n")
        with pytest.raises(ValueError, match=r"\[covariance\] row1"):
            load_config(path)

    def test_malformed_value_diagnostic(self, tmp_path):
        cfg_path = tmp_path / "bad.cfg"
        save_config(default_config(), cfg_path)
        text = cfg_path.read_text().replace("points = 100", "points = many")
        cfg_path.write_text(text)
        with pytest.raises(ValueError, match=r"\[grid\] points"):
            load_config(cfg_path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ValueError, match="not found"):
            load_config(tmp_path / "nope.cfg")


class TestRunStudy:
    def test_csv_schema(self, small_run, small_cfg):
        lines = small_run.csv_path.read_text().splitlines()
        assert lines[0] == ",".join(CSV_COLUMNS)
        assert len(lines) == 1 + small_cfg.grid_points

    def test_t0_row_values(self, small_run):
        rep = small_run.reports[0]
        assert rep.esmd_2 == pytest.approx(6.0, abs=1e-9)
        assert abs(rep.esmd_mc - 6.0) < 6.0 * 4 / np.sqrt(300)  # loose CLT gate
        assert rep.wussos == 0.0
        assert rep.wussolc == 0.0
        assert rep.esmdole_2 == 0.0
        assert rep.smdm_2 == 0.0

    def test_manifest_contents(self, small_run):
        manifest = json.loads(small_run.manifest_path.read_text())
        assert manifest["config"]["mc_samples"] == 300
        assert "version" in manifest
        assert set(manifest["timings"]) >= {
            "reference_propagation_s",
            "metric_evaluation_s",
        }

    def test_determinism_small_config(self, small_cfg, small_run, tmp_path):
        again = run_study(small_cfg, tmp_path / "again")
        assert again.csv_path.read_bytes() == small_run.csv_path.read_bytes()

    def test_variant_independence(self, small_cfg, small_run, tmp_path):
        # disabling Monte Carlo must not perturb any other column
        no_mc = run_study(replace(small_cfg, mc_enabled=False), tmp_path / "nomc")
        mc_cols = [c for c in CSV_COLUMNS if c.endswith("_mc") or "_mc_" in c]
        keep = [c for c in CSV_COLUMNS if c not in mc_cols]
        full_rows = small_run.csv_path.read_text().splitlines()[1:]
        nomc_rows = no_mc.csv_path.read_text().splitlines()[1:]
        for full_line, nomc_line in zip(full_rows, nomc_rows):
            full = dict(zip(CSV_COLUMNS, full_line.split(",")))
            nomc = dict(zip(CSV_COLUMNS, nomc_line.split(",")))
            for c in keep:
                assert full[c] == nomc[c]
            for c in mc_cols:
                assert nomc[c] == ""

    def test_sample_dump(self, small_cfg, tmp_path):
        res = run_study(replace(small_cfg, grid_points=3), tmp_path / "dump",
                        dump_times=[0.15])
        assert len(res.dump_paths) == 1
        data = np.loadtxt(res.dump_paths[0], delimiter=",", skiprows=1)
        assert data.shape == (300, 6)

    def test_dump_requires_mc(self, small_cfg, tmp_path):
        with pytest.raises(ValueError, match="Monte Carlo"):
            run_study(replace(small_cfg, mc_enabled=False), tmp_path / "x",
                      dump_times=[0.1])


class TestCli:
    def test_write_default_config_and_run(self, tmp_path, capsys):
        from lincov_fidelity.cli import main

        cfg_path = tmp_path / "default.cfg"
        assert main(["--write-default-config", str(cfg_path)]) == 0
        cfg = load_config(cfg_path)
        # shrink for test speed, rewrite, run through the CLI
        save_config(replace(cfg, grid_points=3, t_end=0.2, mc_samples=200,
                            mc_rtol=1e-9, mc_atol=1e-9), cfg_path)
        out_dir = tmp_path / "out"
        code = main(["--config", str(cfg_path), "--output", str(out_dir), "--no-ut"])
        assert code == 0
        assert (out_dir / "metrics.csv").exists()
        assert (out_dir / "run_manifest.json").exists()

    def test_config_error_exit_code(self, tmp_path):
        from lincov_fidelity.cli import main

        bad = tmp_path / "bad.cfg"
        bad.write_text("[state]\nmean = 1\n")
        assert main(["--config", str(bad), "--output", str(tmp_path / "o")]) == 2

    def test_seed_override_changes_mc_only(self, tmp_path):
        from lincov_fidelity.cli import main

        cfg_path = tmp_path / "c.cfg"
        save_config(replace(default_config(), grid_points=3, t_end=0.2,
                            mc_samples=200, mc_rtol=1e-9, mc_atol=1e-9), cfg_path)
        assert main(["--config", str(cfg_path), "--output", str(tmp_path / "a"),
                     "--seed", "7"]) == 0
        assert main(["--config", str(cfg_path), "--output", str(tmp_path / "b"),
                     "--seed", "8"]) == 0
        rows_a = (tmp_path / "a" / "metrics.csv").read_text().splitlines()[1:]
        rows_b = (tmp_path / "b" / "metrics.csv").read_text().splitlines()[1:]
        cols = CSV_COLUMNS
        for ra, rb in zip(rows_a, rows_b):
            da, db = dict(zip(cols, ra.split(","))), dict(zip(cols, rb.split(",")))
            assert da["esmd_2"] == db["esmd_2"]
            assert da["wussos"] == db["wussos"]
        # the clouds differ, so at least one MC cell must differ
        assert any(
            dict(zip(cols, ra.split(",")))["esmd_mc"]
            != dict(zip(cols, rb.split(",")))["esmd_mc"]
            for ra, rb in zip(rows_a, rows_b)
        )
