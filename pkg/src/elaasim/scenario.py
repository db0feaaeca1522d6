"""Scenario configuration: array geometry, UT layout, propagation parameters.

The scenario is immutable after construction and owns every distance used
by the stochastic modules.  Coordinates are 2-D: the ULA lies on the x
axis centred at the origin, UTs on a parallel line at y = d_perp
(linear Wyner-type layout).  All distances are in meters.
"""

from __future__ import annotations

from dataclasses import dataclass, field, asdict

import numpy as np
import yaml

SPEED_OF_LIGHT = 299_792_458.0


class ConfigError(ValueError):
    """Raised when a configuration file or override violates the schema."""


@dataclass(frozen=True)
class UlaGeometry:
    """Uniform linear array on the x axis, centred at the origin."""

    m_antennas: int
    carrier_frequency_hz: float = 3.5e9
    antenna_spacing_m: float | None = None  # None -> wavelength / 2

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_frequency_hz

    @property
    def spacing(self) -> float:
        if self.antenna_spacing_m is not None:
            return self.antenna_spacing_m
        return self.wavelength / 2.0

    @property
    def length(self) -> float:
        return (self.m_antennas - 1) * self.spacing

    def antenna_x(self) -> np.ndarray:
        """x coordinate of every service antenna."""
        m = self.m_antennas
        return (np.arange(m) - (m - 1) / 2.0) * self.spacing

    def validate(self) -> None:
        if self.m_antennas < 1:
            raise ConfigError("geometry.m_antennas must be >= 1")
        if self.carrier_frequency_hz <= 0:
            raise ConfigError("geometry.carrier_frequency_hz must be positive")
        if self.antenna_spacing_m is not None and self.antenna_spacing_m <= 0:
            raise ConfigError("geometry.antenna_spacing_m must be positive")


@dataclass(frozen=True)
class UtLayout:
    """UTs on a line parallel to the ULA at perpendicular distance d_perp.

    RU places are positions on the UT line whose LoS vectors are generated
    independently; a UT sitting exactly on an RU place is an RU.
    """

    ut_x: tuple[float, ...]
    d_perp: float
    n_ue: int = 1
    ru_places_x: tuple[float, ...] = ()

    @property
    def n_ut(self) -> int:
        return len(self.ut_x)

    @property
    def n_streams(self) -> int:
        return self.n_ue * self.n_ut

    def ru_place_of(self, ut_index: int, tol: float = 1e-9) -> int | None:
        """Index of the RU place the UT sits on, or None for a non-RU."""
        x = self.ut_x[ut_index]
        for j, rx in enumerate(self.ru_places_x):
            if abs(x - rx) <= tol:
                return j
        return None

    def nearest_place(self, ut_index: int) -> int:
        """Index of the RU place closest to the UT."""
        if not self.ru_places_x:
            raise ConfigError("layout has no RU places")
        places = np.asarray(self.ru_places_x)
        return int(np.argmin(np.abs(places - self.ut_x[ut_index])))

    def proximity_clusters(self, link_m: float) -> tuple[int, ...]:
        """Cluster id of every UT: connected components of the proximity
        graph linking UTs closer than link_m."""
        ux = np.asarray(self.ut_x, dtype=float)
        order = np.argsort(ux)
        ids = np.empty(len(ux), dtype=int)
        cid = 0
        prev = None
        for i in order:
            if prev is not None and ux[i] - prev > link_m:
                cid += 1
            ids[i] = cid
            prev = ux[i]
        return tuple(int(c) for c in ids)

    def validate(self) -> None:
        if self.d_perp <= 0:
            raise ConfigError("d_perp must be positive")
        if self.n_ue < 1:
            raise ConfigError("layout.n_ue must be >= 1")
        if not self.ut_x:
            raise ConfigError("layout.ut_x must list at least one UT")
        if self.ru_places_x and list(self.ru_places_x) != sorted(self.ru_places_x):
            raise ConfigError("layout.ru_places_x must be sorted left-to-right")


@dataclass(frozen=True)
class PropagationParams:
    """Large-scale propagation parameters (UMi street-canyon defaults)."""

    d_los: float = 5000.0      # LoS-state correlation distance
    d_sf: float = 15.0         # shadowing correlation distance
    d1_bar: float = 18.0       # LoS-probability reference distances
    d2_bar: float = 36.0
    rho_los: float = 0.007     # path-loss coefficients
    rho_nlos: float = 0.020
    alpha_los: float = 1.050   # path-loss exponents
    alpha_nlos: float = 1.765
    sigma_sf_los_db: float = 4.0
    sigma_sf_nlos_db: float = 7.82
    kfactor_mean_db: float = 9.0
    kfactor_std_db: float = 10.0
    # Vertical offset between the array plane and the UT plane
    # (street-canyon BS at 25 m, UT at 1.5 m).
    height_offset_m: float = 23.5
    # Shadowing cross-correlation: UTs in one proximity cluster share a
    # fraction of the LoS shadowing field; UTs keyed to the same RU place
    # share the NLoS field.  cluster_link_m is the proximity threshold.
    shadow_corr_los: float = 0.16
    shadow_corr_nlos: float = 1.0
    cluster_link_m: float = 7.5

    def validate(self) -> None:
        for name in ("d_los", "d_sf", "d1_bar", "d2_bar"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"propagation.{name} must be positive")
        for name in ("rho_los", "rho_nlos", "alpha_los", "alpha_nlos"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"propagation.{name} must be positive")
        for name in ("sigma_sf_los_db", "sigma_sf_nlos_db", "kfactor_std_db",
                     "height_offset_m", "cluster_link_m"):
            if getattr(self, name) < 0:
                raise ConfigError(f"propagation.{name} must be >= 0")
        for name in ("shadow_corr_los", "shadow_corr_nlos"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ConfigError(f"propagation.{name} must be in [0, 1]")


@dataclass(frozen=True)
class VisibilityParams:
    """Visibility-region baseline: log-normal length, uniform centre."""

    length_mu_ln: float = float(np.log(5.0))
    length_sigma_ln: float = float(abs(np.log(0.4)))


@dataclass(frozen=True)
class ScenarioConfig:
    geometry: UlaGeometry
    layout: UtLayout
    propagation: PropagationParams = field(default_factory=PropagationParams)
    visibility: VisibilityParams = field(default_factory=VisibilityParams)
    # Erratum escape hatches; defaults follow the corrected readings.
    paper_literal_weights: bool = False
    paper_literal_moments: bool = False

    def validate(self) -> "ScenarioConfig":
        self.geometry.validate()
        self.layout.validate()
        self.propagation.validate()
        return self

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class DistanceTable:
    """All link distances of a scenario.

    ``d2d`` is the ground (horizontal-plane) distance used by the
    LoS-probability model; the channel gains use the full link distance,
    which additionally includes the vertical height offset.
    """

    antenna_x: np.ndarray      # (M,)
    spacing: float
    d2d: np.ndarray            # (M, n_ut) antenna-to-UT distance
    ru_place_d2d: np.ndarray   # (M, J) antenna-to-RU-place distance

    def delta(self, l: int | np.ndarray, m: int | np.ndarray) -> np.ndarray:
        """Inter-service-antenna distance; spacing * |l - m| for a ULA."""
        return self.spacing * np.abs(np.asarray(l) - np.asarray(m))


def compute_distances(scenario: ScenarioConfig) -> DistanceTable:
    geo, lay = scenario.geometry, scenario.layout
    ax = geo.antenna_x()

    def dist_to(points):
        pts = np.asarray(points, float)
        return np.sqrt((ax[:, None] - pts[None, :]) ** 2 + lay.d_perp**2)

    return DistanceTable(
        antenna_x=ax,
        spacing=geo.spacing,
        d2d=dist_to(lay.ut_x),
        ru_place_d2d=dist_to(lay.ru_places_x) if lay.ru_places_x else np.zeros((geo.m_antennas, 0)),
    )


# ---------------------------------------------------------------------------
# Structured-text configuration (YAML schema: geometry / layout /
# propagation / experiment blocks).
# ---------------------------------------------------------------------------

_BLOCKS = {"geometry", "layout", "propagation", "visibility", "flags", "experiment"}


def _build_block(cls, block: dict, name: str):
    valid = {f for f in cls.__dataclass_fields__}
    for key in block:
        if key not in valid:
            raise ConfigError(f"unknown field '{name}.{key}'")
    kwargs = dict(block)
    for seq_field in ("ut_x", "ru_places_x"):
        if seq_field in kwargs:
            kwargs[seq_field] = tuple(float(v) for v in kwargs[seq_field])
    # YAML 1.1 reads exponents without a sign ("3.5e9") as strings
    for key, value in kwargs.items():
        if isinstance(value, str):
            try:
                kwargs[key] = float(value)
            except ValueError:
                raise ConfigError(f"field '{name}.{key}' is not numeric: {value!r}") from None
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise ConfigError(f"invalid '{name}' block: {exc}") from None


def build_scenario(config_text: str) -> ScenarioConfig:
    """Parse a YAML scenario description and fill unset fields with the
    UMi street-canyon defaults.
    """
    try:
        raw = yaml.safe_load(config_text) or {}
    except yaml.YAMLError as exc:
        raise ConfigError(f"config is not valid YAML: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a mapping")
    for key in raw:
        if key not in _BLOCKS:
            raise ConfigError(f"unknown config block '{key}'")
    if "geometry" not in raw:
        raise ConfigError("missing required block 'geometry'")
    if "layout" not in raw:
        raise ConfigError("missing required block 'layout'")

    flags = raw.get("flags", {}) or {}
    for key in flags:
        if key not in ("paper_literal_weights", "paper_literal_moments"):
            raise ConfigError(f"unknown field 'flags.{key}'")
    scenario = ScenarioConfig(
        geometry=_build_block(UlaGeometry, raw["geometry"], "geometry"),
        layout=_build_block(UtLayout, raw["layout"], "layout"),
        propagation=_build_block(PropagationParams, raw.get("propagation", {}) or {}, "propagation"),
        visibility=_build_block(VisibilityParams, raw.get("visibility", {}) or {}, "visibility"),
        **flags,
    )
    return scenario.validate()


def serialize_scenario(scenario: ScenarioConfig) -> str:
    """Inverse of build_scenario up to semantic equality."""
    d = scenario.to_dict()
    out = {
        "geometry": d["geometry"],
        "layout": d["layout"],
        "propagation": d["propagation"],
        "visibility": d["visibility"],
        "flags": {
            "paper_literal_weights": scenario.paper_literal_weights,
            "paper_literal_moments": scenario.paper_literal_moments,
        },
    }
    out["layout"]["ut_x"] = list(out["layout"]["ut_x"])
    out["layout"]["ru_places_x"] = list(out["layout"]["ru_places_x"])
    return yaml.safe_dump(out, sort_keys=True)
