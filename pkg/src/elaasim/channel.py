"""Channel matrix synthesis.

Per link the channel is shadowing * (Rice LoS gain or Rayleigh NLoS gain)
selected by the binary LoS state; RU LoS vectors come from the windowed
chain sampler, non-RU vectors from the basis-expansion mix.  Baselines
(i.i.d. Rayleigh, i.n.d. Rayleigh, visibility region) are provided for
receiver benchmarks.

Shadowing is drawn once per fixed d_sf window of the array, per UE
antenna, with the window sigma picked by the window's majority LoS
state.  UTs within one proximity cluster share part of their LoS
shadowing field; UTs keyed to the same RU place share their NLoS field.

dB conventions: shadowing draws X ~ N(0, sigma_dB^2) are applied as
amplitude 10^(X/20); the K factor is 10^(K_dB/10) with
K_dB ~ N(mu_kappa, sigma_kappa^2).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .losfield import (
    LosVector,
    WindowSegmentation,
    generate_ru_los,
    shadow_segmentation,
)
from .rng import Draw, substream
from .scenario import DistanceTable, PropagationParams, ScenarioConfig, compute_distances
from .sobe import RuBasis, generate_nonru_los, mix_probability, weights_for_position

CHANNEL_KINDS = ("proposed", "iid_rayleigh", "ind_rayleigh", "visibility_region")

LN10_OVER_10 = float(np.log(10.0) / 10.0)

# Substream unit offsets for draws that are not keyed by a plain UT or RU
# place index (see rng.substream): per-UT private large-scale draws live
# at 100+u, cluster-shared shadow fields at 900+cluster, RU-place-shared
# shadow fields at 950+place.
_UNIT_UT_PRIVATE = 100
_UNIT_CLUSTER_FIELD = 900
_UNIT_GROUP_FIELD = 950

_MARGINAL_SEED = 777
_MARGINAL_TRIALS = 1000


@dataclass
class LinkDraws:
    """Per-UT large-scale draws of one trial (diagnostics and tests)."""

    beta: np.ndarray              # (M,)
    shadow_amplitude: np.ndarray  # (M, n_ue)
    shadow_windows: WindowSegmentation
    kappa: float


@dataclass
class ChannelMatrix:
    matrix: np.ndarray            # (M, N) complex
    kind: str
    seed: int
    trial: int
    norm_factor: float            # amplitude factor already applied
    link_draws: list[LinkDraws] | None = None


def shadow_power_moment(sigma_db: float, paper_literal: bool = False) -> float:
    """E|eps|^2 of the shadowing amplitude.

    Default follows the implemented dB convention
    (E 10^(X/10) = exp((sigma_dB*ln10/10)^2 / 2)); the literal flag keeps
    the published exp(sigma^2/2) form.
    """
    if paper_literal:
        return float(np.exp(sigma_db**2 / 2.0))
    return float(np.exp((sigma_db * LN10_OVER_10) ** 2 / 2.0))


def nlos_gain(d, delta, params: PropagationParams):
    """Rayleigh link gain sqrt(rho_N / d^alpha_N) * delta."""
    d = np.asarray(d, dtype=float)
    if np.any(d <= 0):
        raise ValueError("link distance must be positive")
    return np.sqrt(params.rho_nlos / d**params.alpha_nlos) * delta


def los_gain(d, delta, kappa: float, wavelength: float, params: PropagationParams):
    """Rice link gain with deterministic spherical-wave phase exp(-j2πd/λ)."""
    d = np.asarray(d, dtype=float)
    if np.any(d <= 0):
        raise ValueError("link distance must be positive")
    if kappa <= 0:
        raise ValueError("K factor must be positive")
    phase = np.exp(-2j * np.pi * d / wavelength)
    mix = np.sqrt(kappa / (kappa + 1.0)) * phase + np.sqrt(1.0 / (kappa + 1.0)) * delta
    return np.sqrt(params.rho_los / d**params.alpha_los) * mix


def _complex_normal(rng: np.random.Generator, shape) -> np.ndarray:
    re = rng.standard_normal(shape)
    im = rng.standard_normal(shape)
    return (re + 1j * im) / np.sqrt(2.0)


def ue_offsets(scenario: ScenarioConfig) -> np.ndarray:
    """x offsets of the UE antennas around the UT position (half-wavelength
    local ULA, centred)."""
    n_ue = scenario.layout.n_ue
    lam = scenario.geometry.wavelength
    return (np.arange(n_ue) - (n_ue - 1) / 2.0) * lam / 2.0


def link_distances(scenario: ScenarioConfig, dist: DistanceTable, ut_index: int) -> np.ndarray:
    """(M, n_ue) link distance from every service antenna to every UE
    antenna of one UT, including the vertical height offset."""
    lay, prop = scenario.layout, scenario.propagation
    dx = ue_offsets(scenario)
    ax = dist.antenna_x
    return np.sqrt(
        lay.d_perp**2
        + prop.height_offset_m**2
        + (ax[:, None] - (lay.ut_x[ut_index] + dx[None, :])) ** 2
    )


def generate_ru_basis(scenario: ScenarioConfig, dist: DistanceTable, seed: int, trial: int) -> RuBasis:
    """Realize the LoS vectors of every RU place for one trial."""
    lay, geo = scenario.layout, scenario.geometry
    cols = []
    for j in range(len(lay.ru_places_x)):
        rng = substream(seed, trial, j, Draw.RU_LOS)
        cols.append(generate_ru_los(dist.ru_place_d2d[:, j], geo.spacing, scenario.propagation, rng).beta)
    matrix = np.stack(cols, axis=1) if cols else np.zeros((geo.m_antennas, 0), dtype=np.uint8)
    return RuBasis(matrix=matrix, places_x=np.asarray(lay.ru_places_x))


def generate_los_fields(
    scenario: ScenarioConfig, dist: DistanceTable, seed: int, trial: int
) -> list[LosVector]:
    """LoS vector of every UT for one trial (RUs copy their place's column)."""
    lay, geo, prop = scenario.layout, scenario.geometry, scenario.propagation
    basis = generate_ru_basis(scenario, dist, seed, trial)
    fields: list[LosVector] = []
    for u in range(lay.n_ut):
        place = lay.ru_place_of(u)
        if place is not None:
            rng = substream(seed, trial, place, Draw.RU_LOS)
            fields.append(generate_ru_los(dist.ru_place_d2d[:, place], geo.spacing, prop, rng))
            continue
        zeta = weights_for_position(lay.ut_x[u], basis.places_x, scenario.paper_literal_weights)
        rho = mix_probability(basis, zeta)
        rng = substream(seed, trial, u, Draw.NONRU_LOS)
        fields.append(generate_nonru_los(rho, geo.spacing, prop.d_los, rng,
                                         int(np.argmin(dist.d2d[:, u]))))
    return fields


def _shadow_fields(scenario: ScenarioConfig, seed: int, trial: int, n_windows: int):
    """Shared and private standard-normal shadow fields of one trial."""
    lay = scenario.layout
    prop = scenario.propagation
    shape = (n_windows, lay.n_ue)
    cluster_of = lay.proximity_clusters(prop.cluster_link_m)
    group_of = tuple(lay.nearest_place(u) for u in range(lay.n_ut))
    cluster_fields = {
        g: substream(seed, trial, _UNIT_CLUSTER_FIELD + g, Draw.SHADOW_VAL).standard_normal(shape)
        for g in set(cluster_of)
    }
    group_fields = {
        g: substream(seed, trial, _UNIT_GROUP_FIELD + g, Draw.SHADOW_VAL).standard_normal(shape)
        for g in set(group_of)
    }
    return cluster_of, group_of, cluster_fields, group_fields


def synthesize(
    scenario: ScenarioConfig,
    seed: int,
    trial: int,
    dist: DistanceTable | None = None,
    normalize: bool = True,
    keep_draws: bool = False,
) -> ChannelMatrix:
    """One realization of the proposed spatially non-stationary channel."""
    if dist is None:
        dist = compute_distances(scenario)
    geo, lay, prop = scenario.geometry, scenario.layout, scenario.propagation
    m, n_ue = geo.m_antennas, lay.n_ue

    fields = generate_los_fields(scenario, dist, seed, trial)
    seg = shadow_segmentation(m, geo.spacing, prop)
    lengths, bounds = seg.lengths, seg.bounds
    cluster_of, group_of, cluster_fields, group_fields = _shadow_fields(
        scenario, seed, trial, seg.n_windows
    )
    c_l, c_n = prop.shadow_corr_los, prop.shadow_corr_nlos

    h = np.empty((m, lay.n_streams), dtype=np.complex128)
    draws: list[LinkDraws] = []
    for u in range(lay.n_ut):
        beta = fields[u].beta
        los_frac = np.add.reduceat(beta.astype(float), bounds[:-1]) / lengths
        los_win = (los_frac >= 0.5)[:, None]
        x_own = substream(seed, trial, _UNIT_UT_PRIVATE + u, Draw.SHADOW_VAL).standard_normal(
            (seg.n_windows, n_ue)
        )
        x_los = np.sqrt(c_l) * cluster_fields[cluster_of[u]] + np.sqrt(1.0 - c_l) * x_own
        x_nlos = np.sqrt(c_n) * group_fields[group_of[u]] + np.sqrt(1.0 - c_n) * x_own
        x_db = np.where(los_win, prop.sigma_sf_los_db * x_los, prop.sigma_sf_nlos_db * x_nlos)
        eps = np.repeat(10.0 ** (x_db / 20.0), lengths, axis=0)

        k_db = substream(seed, trial, _UNIT_UT_PRIVATE + u, Draw.KFACTOR).normal(
            prop.kfactor_mean_db, prop.kfactor_std_db
        )
        kappa = float(10.0 ** (k_db / 10.0))
        delta = _complex_normal(substream(seed, trial, u, Draw.SMALL_SCALE), (m, n_ue))

        d = link_distances(scenario, dist, u)
        los = los_gain(d, delta, kappa, geo.wavelength, prop)
        nlos = nlos_gain(d, delta, prop)
        mask = beta[:, None].astype(bool)
        h[:, u * n_ue : (u + 1) * n_ue] = eps * np.where(mask, los, nlos)
        if keep_draws:
            draws.append(LinkDraws(beta=beta, shadow_amplitude=eps, shadow_windows=seg, kappa=kappa))

    factor = normalization_factor(scenario) if normalize else 1.0
    return ChannelMatrix(
        matrix=h * factor,
        kind="proposed",
        seed=seed,
        trial=trial,
        norm_factor=factor,
        link_draws=draws if keep_draws else None,
    )


@lru_cache(maxsize=16)
def state_marginals(scenario: ScenarioConfig, seed: int = _MARGINAL_SEED,
                    trials: int = _MARGINAL_TRIALS) -> np.ndarray:
    """(M, n_ut) Monte Carlo estimate of the per-antenna LoS-state
    marginals under the window-chain sampler.

    The chain couples distant windows, so the realized marginal differs
    from the positional LoS probability; the normalization uses this
    estimate so the mean per-element power of the synthesized channel is
    one.  Estimated once per scenario with a fixed internal seed.
    """
    dist = compute_distances(scenario)
    m = scenario.geometry.m_antennas
    acc = np.zeros((m, scenario.layout.n_ut))
    for t in range(trials):
        for u, fld in enumerate(generate_los_fields(scenario, dist, seed, t)):
            acc[:, u] += fld.beta
    acc /= trials
    acc.setflags(write=False)
    return acc


def mean_link_power(scenario: ScenarioConfig, dist: DistanceTable | None = None) -> np.ndarray:
    """E|H_mn|^2 of the un-normalized proposed channel, combining the
    Monte Carlo state marginals with the closed-form per-state moments."""
    if dist is None:
        dist = compute_distances(scenario)
    prop = scenario.propagation
    p = state_marginals(scenario)
    e2_los = shadow_power_moment(prop.sigma_sf_los_db, scenario.paper_literal_moments)
    e2_nlos = shadow_power_moment(prop.sigma_sf_nlos_db, scenario.paper_literal_moments)
    d = np.sqrt(dist.d2d**2 + prop.height_offset_m**2)
    pw_los = e2_los * prop.rho_los / d**prop.alpha_los
    pw_nlos = e2_nlos * prop.rho_nlos / d**prop.alpha_nlos
    per_ut = p * pw_los + (1.0 - p) * pw_nlos  # (M, n_ut)
    return np.repeat(per_ut, scenario.layout.n_ue, axis=1)


@lru_cache(maxsize=16)
def normalization_factor(scenario: ScenarioConfig) -> float:
    """Amplitude factor sqrt(MN / E||H||^2) giving unit mean per-element
    power for the proposed channel."""
    power = mean_link_power(scenario)
    return float(np.sqrt(power.size / power.sum()))


def _ind_rayleigh_variances(scenario: ScenarioConfig, dist: DistanceTable) -> np.ndarray:
    prop = scenario.propagation
    d = np.sqrt(dist.d2d**2 + prop.height_offset_m**2)
    var = prop.rho_nlos / d**prop.alpha_nlos
    return np.repeat(var, scenario.layout.n_ue, axis=1)


def ind_rayleigh_factor(scenario: ScenarioConfig, dist: DistanceTable | None = None) -> float:
    if dist is None:
        dist = compute_distances(scenario)
    var = _ind_rayleigh_variances(scenario, dist)
    return float(np.sqrt(var.size / var.sum()))


def ind_rayleigh(
    scenario: ScenarioConfig,
    seed: int,
    trial: int,
    dist: DistanceTable | None = None,
    normalize: bool = True,
) -> ChannelMatrix:
    """Zero-mean i.n.d. Rayleigh baseline: per-link variance rho_N/d^alpha_N,
    no shadowing, no LoS component."""
    if dist is None:
        dist = compute_distances(scenario)
    var = _ind_rayleigh_variances(scenario, dist)
    delta = _complex_normal(substream(seed, trial, 0, Draw.SMALL_SCALE), var.shape)
    factor = ind_rayleigh_factor(scenario, dist) if normalize else 1.0
    return ChannelMatrix(np.sqrt(var) * delta * factor, "ind_rayleigh", seed, trial, factor)


def iid_rayleigh(scenario: ScenarioConfig, seed: int, trial: int, **_) -> ChannelMatrix:
    """Unit-power i.i.d. Rayleigh (WSSUS reference)."""
    shape = (scenario.geometry.m_antennas, scenario.layout.n_streams)
    h = _complex_normal(substream(seed, trial, 0, Draw.SMALL_SCALE), shape)
    return ChannelMatrix(h, "iid_rayleigh", seed, trial, 1.0)


@lru_cache(maxsize=16)
def visibility_profile(scenario: ScenarioConfig) -> np.ndarray:
    """(M,) probability that each antenna falls inside the visibility
    region, averaged over the log-normal length and the uniform centre.

    The centre integral is exact per antenna (interval-overlap length);
    the length integral uses Gauss-Hermite quadrature in log space.
    """
    vis = scenario.visibility
    ax = scenario.geometry.antenna_x()
    lo, hi = float(ax[0]), float(ax[-1])
    span = hi - lo
    if span <= 0:
        out = np.ones_like(ax)
        out.setflags(write=False)
        return out
    nodes, weights = np.polynomial.hermite_e.hermegauss(64)
    weights = weights / np.sqrt(2.0 * np.pi)
    prob = np.zeros_like(ax)
    for x, w in zip(nodes, weights):
        half = 0.5 * np.exp(vis.length_mu_ln + vis.length_sigma_ln * x)
        overlap = np.minimum(ax + half, hi) - np.maximum(ax - half, lo)
        prob += w * np.clip(overlap, 0.0, span) / span
    prob.setflags(write=False)
    return prob


def visibility_factor(scenario: ScenarioConfig, dist: DistanceTable | None = None) -> float:
    """Normalization of the visibility-region baseline: the per-link
    variance is weighted by the antenna's visibility probability so the
    mean per-element power including the zeroed antennas is one."""
    if dist is None:
        dist = compute_distances(scenario)
    var = _ind_rayleigh_variances(scenario, dist)
    weighted = visibility_profile(scenario)[:, None] * var
    return float(np.sqrt(weighted.size / weighted.sum()))


def visibility_region(
    scenario: ScenarioConfig,
    seed: int,
    trial: int,
    dist: DistanceTable | None = None,
    normalize: bool = True,
) -> ChannelMatrix:
    """Visibility-region baseline: per UT one contiguous visible stretch
    (log-normal length, uniform centre), i.n.d. Rayleigh inside and zero
    outside.  Normalization accounts for the expected visible fraction so
    the mean per-element power, zeros included, is one."""
    if dist is None:
        dist = compute_distances(scenario)
    lay, vis = scenario.layout, scenario.visibility
    ch = ind_rayleigh(scenario, seed, trial, dist, normalize=False)
    factor = visibility_factor(scenario, dist) if normalize else 1.0
    ch.matrix *= factor
    ch.norm_factor = factor
    rng = substream(seed, trial, 0, Draw.VISIBILITY)
    ax = dist.antenna_x
    lo, hi = ax[0], ax[-1]
    for u in range(lay.n_ut):
        length = float(np.exp(rng.normal(vis.length_mu_ln, vis.length_sigma_ln)))
        centre = float(rng.uniform(lo, hi))
        visible = (ax >= centre - length / 2.0) & (ax <= centre + length / 2.0)
        ch.matrix[~visible, u * lay.n_ue : (u + 1) * lay.n_ue] = 0.0
    ch.kind = "visibility_region"
    return ch


def make_channel(
    kind: str,
    scenario: ScenarioConfig,
    seed: int,
    trial: int,
    dist: DistanceTable | None = None,
) -> ChannelMatrix:
    """Dispatch on channel kind."""
    if kind == "proposed":
        return synthesize(scenario, seed, trial, dist)
    if kind == "iid_rayleigh":
        return iid_rayleigh(scenario, seed, trial)
    if kind == "ind_rayleigh":
        return ind_rayleigh(scenario, seed, trial, dist)
    if kind == "visibility_region":
        return visibility_region(scenario, seed, trial, dist)
    raise ValueError(f"unknown channel kind '{kind}'; expected one of {CHANNEL_KINDS}")
