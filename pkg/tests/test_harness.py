"""Harness tests: config round-trip, presets, CSV output, CLI, figures."""

import math
from pathlib import Path

import pytest

from cogd2d.harness import (
    CSV_HEADER,
    ExperimentConfig,
    PRESETS,
    get_preset_config,
    list_presets,
    load_config,
    run_experiment,
    save_config,
)
from cogd2d.harness.cli import main as cli_main
from cogd2d.harness.runner import write_outputs
from cogd2d.params import Policy, Side
from cogd2d.units import dbm_to_watts


class TestConfig:
    def test_roundtrip_exact(self, tmp_path):
        config = get_preset_config("fig3")
        path = tmp_path / "cfg.ini"
        save_config(config, path)
        assert load_config(path) == config

    def test_roundtrip_preserves_si_params(self, tmp_path):
        config = ExperimentConfig(p_b_dbm=37.0, gamma_dbm=-61.7, lambda_b_per_km2=2.43)
        path = tmp_path / "cfg.ini"
        save_config(config, path)
        again = load_config(path)
        assert again.network_params() == config.network_params()

    def test_dbm_conversion_rule(self):
        assert dbm_to_watts(37.0) == pytest.approx(10 ** ((37.0 - 30.0) / 10.0), rel=1e-15)

    def test_sweep_validation(self):
        with pytest.raises(ValueError):
            ExperimentConfig(sweep_values=())
        with pytest.raises(ValueError):
            ExperimentConfig(sweep_values=(2.0, 1.0))
        with pytest.raises(ValueError):
            ExperimentConfig(sweep_var="nonsense")

    def test_channel_plan_split(self):
        config = ExperimentConfig(n_channels=15)
        plan = config.channel_plan(Side.UPLINK, Policy.PSA)
        assert (plan.n_downlink, plan.n_uplink) == (8, 7)
        config = ExperimentConfig(n_channels=15, n_uplink=3)
        plan = config.channel_plan(Side.DOWNLINK, Policy.RSA)
        assert (plan.n_downlink, plan.n_uplink) == (12, 3)

    def test_nod2d_zeroes_density(self):
        config = ExperimentConfig()
        assert config.network_params("nod2d").lambda_d == 0.0
        assert config.network_params("cognitive").lambda_d > 0.0


class TestPresets:
    def test_catalog_size(self):
        assert len(list_presets()) == 6
        assert sorted(PRESETS) == ["fig3", "fig4", "fig5", "fig6", "fig7", "fig8"]

    def test_each_preset_names_sweep_variable(self):
        for preset in list_presets():
            assert preset.sweep_var
            assert preset.config.sweep_var == preset.sweep_var

    def test_baseline_defaults(self):
        base = ExperimentConfig()
        assert base.lambda_b_per_km2 == 1.0
        assert base.lambda_u_ratio == 10.0
        assert base.lambda_d_per_km2 == 20.0
        assert base.alpha == 4.0 and base.beta == 3.0
        assert base.n_channels == 10
        assert base.tau_db == 0.0
        assert base.sigma_z2_dbm == -104.0
        assert base.rho_b_dbm == -70.0

    def test_unknown_preset(self):
        with pytest.raises(KeyError):
            get_preset_config("fig99")


@pytest.fixture(scope="module")
def small_analytic_config():
    return ExperimentConfig(
        sweep_var="gamma_dbm",
        sweep_values=(-70.0, -60.0),
        engines="analytic",
    )


class TestRunner:
    def test_row_schema(self, small_analytic_config, tmp_path):
        grouped = run_experiment(small_analytic_config)
        paths = write_outputs(grouped, tmp_path / "out.csv")
        lines = paths[0].read_text().splitlines()
        assert lines[0] == CSV_HEADER
        # 2 values x 2 sides x 2 policies
        assert len(lines) == 1 + 8
        cells = lines[1].split(",")
        assert len(cells) == len(CSV_HEADER.split(","))

    def test_analytic_bytes_deterministic(self, small_analytic_config, tmp_path):
        a = write_outputs(run_experiment(small_analytic_config), tmp_path / "a.csv")[0]
        b = write_outputs(run_experiment(small_analytic_config), tmp_path / "b.csv")[0]
        assert a.read_bytes() == b.read_bytes()

    def test_cellular_cells_empty_when_exponents_differ(self, small_analytic_config):
        rows = run_experiment(small_analytic_config)["cognitive"]
        # beta defaults to 3 while alpha is 4: no closed-form cellular outage
        assert all(r.metrics["O_B_avg"] is None for r in rows)
        assert all(r.metrics["O_D"] is not None for r in rows)

    def test_mc_rows_deterministic(self, tmp_path):
        config = ExperimentConfig(
            sweep_values=(1.0,),
            policies=("rsa",),
            cd_sides=("dl",),
            engines="mc",
            window_km=3.0,
            iterations=4,
            seed=9,
            workers=1,
        )
        a = write_outputs(run_experiment(config), tmp_path / "a.csv")[0]
        b = write_outputs(run_experiment(config), tmp_path / "b.csv")[0]
        assert a.read_bytes() == b.read_bytes()

    def test_multi_mode_files(self, tmp_path):
        config = ExperimentConfig(
            sweep_values=(1.0,),
            policies=("rsa",),
            cd_sides=("dl",),
            d2d_modes=("nod2d", "cognitive"),
            beta=4.0,
        )
        paths = write_outputs(run_experiment(config), tmp_path / "fig8.csv")
        names = sorted(p.name for p in paths)
        assert names == ["fig8_cognitive.csv", "fig8_nod2d.csv"]

    def test_numeric_precision(self, small_analytic_config, tmp_path):
        path = write_outputs(run_experiment(small_analytic_config), tmp_path / "p.csv")[0]
        cell = path.read_text().splitlines()[1].split(",")[7]  # O_D column
        assert len(cell.split(".")[-1]) >= 8  # >= 9 significant digits


class TestCli:
    def test_list_presets(self, capsys):
        assert cli_main(["--list-presets"]) == 0
        out = capsys.readouterr().out
        for name in PRESETS:
            assert name in out

    def test_dump_and_reload_config(self, tmp_path, capsys):
        path = tmp_path / "fig5.ini"
        assert cli_main(["--preset", "fig5", "--dump-config", str(path)]) == 0
        config = load_config(path)
        assert config.n_channels == 15

    def test_end_to_end_analytic_with_plot(self, tmp_path, capsys):
        out = tmp_path / "run.csv"
        rc = cli_main(
            [
                "--preset",
                "fig5",
                "--engines",
                "analytic",
                "--policy",
                "psa",
                "--cd-side",
                "dl",
                "--out",
                str(out),
                "--plot",
            ]
        )
        assert rc == 0
        assert out.exists()
        assert out.with_suffix(".png").exists()
        assert out.read_text().splitlines()[0] == CSV_HEADER

    def test_bad_flag_combo(self, capsys):
        assert cli_main(["--config", "/nonexistent/nope.ini"]) == 2
