"""Tests for the preset catalog."""

import pytest

from elaasim.presets import PRESETS, case_layout, case_scenario, get_preset, preset_table
from elaasim.scenario import ConfigError


class TestCaseLayout:
    def test_case1_single_middle_ru(self):
        lay = case_layout(1, 25.0)
        assert len(lay.ru_places_x) == 1
        assert lay.ru_places_x[0] == lay.ut_x[2] == 0.0
        assert lay.ut_x[-1] - lay.ut_x[0] == pytest.approx(2.0)

    def test_case2_end_rus(self):
        lay = case_layout(2, 25.0)
        assert lay.ru_places_x == (lay.ut_x[0], lay.ut_x[-1])
        assert lay.ut_x[-1] - lay.ut_x[0] == pytest.approx(20.0)

    def test_case3_all_rus(self):
        lay = case_layout(3, 25.0)
        assert lay.ru_places_x == lay.ut_x
        assert lay.ut_x[-1] - lay.ut_x[0] == pytest.approx(50.0)

    def test_default_stream_count(self):
        lay = case_layout(3, 25.0)
        assert lay.n_streams == 20

    def test_case_scenario_m(self):
        assert case_scenario(1, 25.0).geometry.m_antennas == 2000
        assert case_scenario(1, 25.0, m=512).geometry.m_antennas == 512


class TestCatalog:
    def test_at_least_eight_presets(self):
        assert len(PRESETS) >= 8

    def test_all_presets_validate(self):
        for spec in PRESETS.values():
            spec.validate()

    def test_table1_budgets(self):
        spec = get_preset("table1-case3-50m")
        assert spec.trials == 10_000
        assert spec.gamma_db_grid == (10.0,)
        assert spec.scenario.geometry.m_antennas == 2000
        assert spec.scenario.layout.n_ue == 4

    def test_unknown_preset_names_nearest(self):
        with pytest.raises(ConfigError, match="table1-case3-50m"):
            get_preset("table1-case3-50")

    def test_machine_readable_table(self):
        table = preset_table()
        assert {row["name"] for row in table} == set(PRESETS)
        for row in table:
            assert set(row) >= {"name", "description", "trials", "mode", "m_antennas"}

    def test_casestudy1_layout(self):
        spec = get_preset("fig2-casestudy1")
        lay = spec.scenario.layout
        assert lay.n_ut == 10
        assert lay.n_ue == 1
        assert lay.d_perp == 25.0
        assert lay.ru_places_x == (lay.ut_x[0], lay.ut_x[-1])
