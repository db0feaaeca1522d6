"""Named experiment presets.

Each preset bundles a scenario, a trial budget, an SNR grid, and the
channel kinds to simulate.  Trial budgets are desk-scale defaults chosen
so a preset finishes in minutes on one core; pass --trials to override.
"""

from __future__ import annotations

import difflib
from dataclasses import dataclass, field

import numpy as np

from .scenario import (
    ConfigError,
    PropagationParams,
    ScenarioConfig,
    UlaGeometry,
    UtLayout,
)


@dataclass(frozen=True)
class ExperimentSpec:
    name: str
    description: str
    scenario: ScenarioConfig
    trials: int
    gamma_db_grid: tuple[float, ...] = (10.0,)
    channel_kinds: tuple[str, ...] = ("proposed",)
    mode: str = "capacity"  # capacity | hardening | ser
    extras: dict = field(default_factory=dict)

    def validate(self) -> "ExperimentSpec":
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        grid = np.asarray(self.gamma_db_grid, dtype=float)
        if grid.size == 0 or np.any(np.diff(grid) <= 0):
            raise ConfigError("gamma_db_grid must be non-empty and strictly increasing")
        self.scenario.validate()
        return self


def case_layout(case: int, d_perp: float, n_ut: int = 5, n_ue: int = 4) -> UtLayout:
    """UT rows of the three capacity cases: equally spaced UTs on a line,
    with the RU places depending on the case.

    Case 1: one RU in the middle of a 2 m row (every UT mixes from it).
    Case 2: RUs at both ends of a 20 m row.
    Case 3: every UT of a 50 m row is its own RU.
    """
    span = {1: 2.0, 2: 20.0, 3: 50.0}[case]
    ut_x = tuple(float(x) for x in np.linspace(-span / 2.0, span / 2.0, n_ut))
    if case == 1:
        ru = (ut_x[n_ut // 2],)
    elif case == 2:
        ru = (ut_x[0], ut_x[-1])
    else:
        ru = ut_x
    return UtLayout(ut_x=ut_x, d_perp=d_perp, n_ue=n_ue, ru_places_x=ru)


def case_scenario(case: int, d_perp: float, m: int = 2000, **kwargs) -> ScenarioConfig:
    return ScenarioConfig(
        geometry=UlaGeometry(m_antennas=m),
        layout=case_layout(case, d_perp),
        propagation=PropagationParams(),
        **kwargs,
    ).validate()


def _table1_presets() -> dict[str, ExperimentSpec]:
    out = {}
    for case in (1, 2, 3):
        for d_perp in (1, 25, 50):
            name = f"table1-case{case}-{d_perp}m"
            out[name] = ExperimentSpec(
                name=name,
                description=(
                    f"Capacity ensemble, Case {case}, d_perp={d_perp} m, M=2000, "
                    "gamma=10 dB; feeds the published mean/std table"
                ),
                scenario=case_scenario(case, float(d_perp)),
                trials=10_000,
                gamma_db_grid=(10.0,),
            )
    return out


def _build_presets() -> dict[str, ExperimentSpec]:
    presets = _table1_presets()

    presets["table2-case3-50m"] = ExperimentSpec(
        name="table2-case3-50m",
        description="Very large array spot check: M=200,000, Case 3, d_perp=50 m",
        scenario=case_scenario(3, 50.0, m=200_000),
        trials=200,
        gamma_db_grid=(10.0,),
    )

    presets["table3-regression"] = ExperimentSpec(
        name="table3-regression",
        description=(
            "Fits on the 10-30 dB SNR grid for every case and distance; "
            "linear regression of each fitted parameter against SNR in dB"
        ),
        scenario=case_scenario(3, 50.0),
        trials=2_000,
        gamma_db_grid=(10.0, 15.0, 20.0, 25.0, 30.0),
        mode="capacity",
        extras={"all_cases": True},
    )

    presets["fig2-casestudy1"] = ExperimentSpec(
        name="fig2-casestudy1",
        description=(
            "Case Study 1 channel snapshot: 10 UTs equally spaced, RUs at both "
            "ends, d_perp=25 m, M=2000; dump LoS states and RSS for plotting"
        ),
        scenario=ScenarioConfig(
            geometry=UlaGeometry(m_antennas=2000),
            layout=UtLayout(
                ut_x=tuple(float(x) for x in np.linspace(-22.5, 22.5, 10)),
                d_perp=25.0,
                n_ue=1,
                ru_places_x=(-22.5, 22.5),
            ),
            propagation=PropagationParams(),
        ),
        trials=1,
        gamma_db_grid=(10.0,),
    )

    presets["fig4-hardening"] = ExperimentSpec(
        name="fig4-hardening",
        description=(
            "Capacity std versus array size for the proposed cases and the "
            "i.i.d. Rayleigh reference (hardening comparison)"
        ),
        scenario=case_scenario(3, 25.0, m=2000),
        trials=2_000,
        gamma_db_grid=(10.0,),
        channel_kinds=("proposed", "iid_rayleigh"),
        mode="hardening",
        extras={"m_grid": (200, 2000, 20000), "d_perp": 25.0},
    )

    presets["fig9-ser"] = ExperimentSpec(
        name="fig9-ser",
        description=(
            "64-QAM symbol error rate of LMMSE and the genie MRC bound across "
            "channel kinds at desk scale (M=512, N=20)"
        ),
        scenario=case_scenario(3, 50.0, m=512),
        trials=2_000,
        gamma_db_grid=tuple(float(g) for g in range(0, 33, 2)),
        channel_kinds=("proposed", "iid_rayleigh", "ind_rayleigh", "visibility_region"),
        mode="ser",
        extras={"order": 64, "cases": (1, 2, 3)},
    )

    return presets


PRESETS = _build_presets()


def get_preset(name: str) -> ExperimentSpec:
    if name not in PRESETS:
        near = difflib.get_close_matches(name, PRESETS, n=1)
        hint = f"; did you mean '{near[0]}'?" if near else ""
        raise ConfigError(f"unknown preset '{name}'{hint}")
    return PRESETS[name]


def preset_table() -> list[dict]:
    return [
        {
            "name": spec.name,
            "description": spec.description,
            "trials": spec.trials,
            "gamma_db_grid": list(spec.gamma_db_grid),
            "channel_kinds": list(spec.channel_kinds),
            "mode": spec.mode,
            "m_antennas": spec.scenario.geometry.m_antennas,
        }
        for spec in PRESETS.values()
    ]
