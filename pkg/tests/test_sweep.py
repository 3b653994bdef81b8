"""
Test sweeps and their result files.
"""
import json
import math

import numpy as np
import pandas as pd
import pytest

from mmv2i import analytic, sweep
from mmv2i.errors import ConfigError, QuadratureError, ResultsIOError
from mmv2i.model import REFERENCE_UNITS
from mmv2i.sweep import SweepSpec


@pytest.fixture
def pnl_spec(urban_cfg):
    return SweepSpec(base=urban_cfg, axis="bs_density", values=(2.0, 10.684),
                     metrics=("P_NL", "P_L"))


class TestScenarioAt:
    """Test moving one axis of a scenario."""

    def test_units(self, urban_cfg):
        """Test that axis values are given in display units."""
        np.testing.assert_allclose(sweep.scenario_at(urban_cfg, "bs_density", 20).bs_density, 0.02)
        np.testing.assert_allclose(sweep.scenario_at(urban_cfg, "speed", 36).speed, 10.0)
        assert sweep.scenario_at(urban_cfg, "slot", 1.0).slot == 1.0

    def test_speed_follows_unit_conventions(self, urban_cfg):
        """Test that a km/h axis value uses the base scenario's divisor."""
        base = urban_cfg.replace(units=REFERENCE_UNITS)
        cfg = sweep.scenario_at(base, "speed", 35)
        np.testing.assert_allclose(cfg.speed, 10.0)
        assert cfg.units == REFERENCE_UNITS

    def test_beamwidth_preset(self, urban_cfg):
        """Test that the beam axis swaps in the whole preset."""
        cfg = sweep.scenario_at(urban_cfg, "beamwidth_preset", 90)
        np.testing.assert_allclose(cfg.psi, math.radians(90))
        np.testing.assert_allclose(cfg.bs_antenna.main_gain, 10 ** 0.6)

    def test_unknown_axis(self, urban_cfg):
        """Test an unknown axis."""
        with pytest.raises(ConfigError):
            sweep.scenario_at(urban_cfg, "lanes", 3)


class TestSweepSpec:
    """Test sweep validation."""

    @pytest.mark.parametrize("changes", [
        {'axis': "lanes"},
        {'values': ()},
        {'metrics': ()},
        {'metrics': ("P_X",)},
        {'method': "guess"},
        {'trials': 0},
        {'workers': 0},
        {'axis': "beamwidth_preset", 'values': (45,)},
        {'values': (-1.0,)},
    ])
    def test_rejected(self, urban_cfg, changes):
        """Test that an invalid request fails before any evaluation."""
        fields = dict(base=urban_cfg, axis="bs_density", values=(10.0,))
        fields.update(changes)
        with pytest.raises(ConfigError):
            SweepSpec(**fields)

    def test_methods(self, urban_cfg):
        """Test that 'both' expands to both methods."""
        spec = SweepSpec(base=urban_cfg, axis="slot", values=[0.1], method="both")
        assert spec.methods == ("analytic", "simulate")
        assert spec.values == (0.1,)


class TestRunSweep:
    """Test sweep evaluation."""

    def test_analytic(self, pnl_spec, urban_cfg):
        """Test row layout and values of an analytic sweep."""
        table = sweep.run_sweep(pnl_spec)
        assert tuple(table.columns) == sweep.COLUMNS
        assert len(table) == 4
        assert list(table["metric"]) == ["P_NL", "P_L", "P_NL", "P_L"]
        assert list(table["axis_value"]) == [2.0, 2.0, 10.684, 10.684]
        assert set(table["method"]) == {"analytic"}
        assert table["trials"].isna().all()
        assert (table["std_error"] == 0).all()
        expected = analytic.no_leave_probability(urban_cfg.replace(bs_density=0.010684))
        np.testing.assert_allclose(table["value"].iloc[2], expected, rtol=1e-12)

    def test_both_methods(self, urban_cfg):
        """Test that simulated rows follow the analytic ones at each value."""
        spec = SweepSpec(base=urban_cfg, axis="speed", values=(60.0,), metrics=("P_cov",),
                         method="both", trials=300, seed=5)
        table = sweep.run_sweep(spec)
        assert list(table["method"]) == ["analytic", "simulate"]
        simulated = table.iloc[1]
        assert simulated["trials"] == 300
        assert simulated["seed"] == 5
        assert simulated["std_error"] > 0
        assert 0 <= simulated["value"] <= 1

    def test_failed_point(self, pnl_spec, monkeypatch, caplog):
        """Test that a failing point is kept as NaN and logged."""
        def fail(cfg, metric, spec):
            if metric == "P_L":
                raise QuadratureError("did not converge")
            return 0.5
        monkeypatch.setattr(sweep, "evaluate_analytic", fail)
        with caplog.at_level("WARNING", logger="mmv2i.sweep"):
            table = sweep.run_sweep(pnl_spec)
        assert table["value"].isna().sum() == 2
        assert (table.loc[table["metric"] == "P_NL", "value"] == 0.5).all()
        assert "did not converge" in caplog.text


class TestResultFiles:
    """Test writing and reading result tables."""

    def test_csv(self, pnl_spec, tmp_path):
        """Test that a CSV file reads back to the same table."""
        table = sweep.run_sweep(pnl_spec)
        path = tmp_path / "out.csv"
        sweep.write_results(table, "csv", path)
        assert path.read_text().splitlines()[0] == ",".join(sweep.COLUMNS)
        back = sweep.read_results(path)
        pd.testing.assert_frame_equal(back.drop(columns="wall_ms"), table.drop(columns="wall_ms"),
                                      rtol=1e-11)

    def test_json(self, pnl_spec, tmp_path):
        """Test the JSON layout: a list of records with nulls for missing values."""
        table = sweep.run_sweep(pnl_spec)
        path = tmp_path / "out.json"
        sweep.write_results(table, "json", path)
        records = json.loads(path.read_text())
        assert len(records) == 4
        assert set(records[0]) == set(sweep.COLUMNS)
        assert records[0]["trials"] is None
        back = sweep.read_results(path)
        np.testing.assert_allclose(back["value"], table["value"], rtol=1e-11)

    def test_nan_is_null(self, tmp_path):
        """Test that NaN and infinite values are written as null."""
        table = sweep.results_frame([dict(
            axis_name="slot", axis_value=0.3, metric="P_cov", method="simulate",
            value=math.nan, std_error=math.inf, trials=1, seed=0, wall_ms=1.0)])
        path = tmp_path / "out.json"
        sweep.write_results(table, "json", path)
        record = json.loads(path.read_text())[0]
        assert record["value"] is None
        assert record["std_error"] is None
        assert record["trials"] == 1

    def test_empty_csv(self, tmp_path):
        """Test that an empty table still writes its header."""
        path = tmp_path / "empty.csv"
        sweep.write_results(sweep.results_frame(), "csv", path)
        assert path.read_text().strip() == ",".join(sweep.COLUMNS)
        assert len(sweep.read_results(path)) == 0

    def test_unsupported_format(self, tmp_path):
        """Test an unknown file format."""
        with pytest.raises(ResultsIOError):
            sweep.write_results(sweep.results_frame(), None, tmp_path / "out.parquet")

    def test_unwritable(self, tmp_path):
        """Test that a write failure is a ResultsIOError."""
        with pytest.raises(ResultsIOError):
            sweep.write_results(sweep.results_frame(), "csv", tmp_path / "missing" / "out.csv")
