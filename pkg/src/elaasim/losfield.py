"""Correlated LoS/NLoS fields over the service array.

A binary state vector is generated in two stages.  First the array is
partitioned into windows whose lengths follow the closed-form run-length
PMF of :func:`window_length_pmf` (the distribution of the number of
adjacent antennas sharing one state when the pairwise same-state
probability decays as exp(-delta/d_corr)); sampling whole windows avoids
stepping antenna by antenna.  Second, the window states follow a Markov
chain anchored at the antenna nearest to the user: each window copies its
inward neighbour with probability exp(-gap/d_corr) and otherwise redraws
from the local positional marginal.  At street-scale arrays the copy
probability is close to one, so the array is usually in a single state
per trial; at multi-kilometre apertures distant segments decouple and
revert to their local marginals.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .scenario import PropagationParams


@dataclass(frozen=True)
class LosVector:
    """Per-UT binary LoS state over the M service antennas."""

    beta: np.ndarray     # (M,) uint8
    anchors: np.ndarray  # indices where independent redraws occurred


@dataclass(frozen=True)
class WindowSegmentation:
    """Partition of [0, M) into correlation windows."""

    bounds: np.ndarray  # (W+1,) increasing, bounds[0]=0, bounds[-1]=M

    @property
    def n_windows(self) -> int:
        return len(self.bounds) - 1

    @property
    def lengths(self) -> np.ndarray:
        return np.diff(self.bounds)

    def window_ids(self) -> np.ndarray:
        """Window index of every antenna."""
        return np.repeat(np.arange(self.n_windows), self.lengths)


def los_probability(d2d, params: PropagationParams):
    """LoS probability of a link at 2-D distance d2d (UMi street canyon).

    Clamps to 1 for d2d <= d1_bar and decays to 0 as d2d grows.
    """
    d = np.asarray(d2d, dtype=float)
    safe = np.where(d > 0, d, 1.0)
    ratio = np.where(d > 0, np.minimum(params.d1_bar / safe, 1.0), 1.0)
    decay = np.exp(-d / params.d2_bar)
    out = ratio * (1.0 - decay) + decay
    return out if out.ndim else float(out)


def same_state_probability(delta, d_corr: float):
    """Probability that two antennas separated by delta share one state."""
    if d_corr <= 0:
        raise ValueError("d_corr must be positive")
    out = np.exp(-np.asarray(delta, dtype=float) / d_corr)
    return out if out.ndim else float(out)


def marginal_update(rho_l, p_same):
    """Marginal LoS probability of antenna m given the anchor marginal."""
    rho_l = np.asarray(rho_l, dtype=float)
    out = (2.0 * rho_l - 1.0) * np.asarray(p_same, dtype=float) + 1.0 - rho_l
    return out if out.ndim else float(out)


def window_length_pmf(x, wavelength: float, d_corr: float):
    """PMF of the number of adjacent antennas sharing one state (ULA,
    half-wavelength spacing)."""
    x = np.asarray(x, dtype=float)
    a = wavelength / (4.0 * d_corr)
    out = np.exp(-a * (x**2 - x)) - np.exp(-a * (x**2 + x))
    return out if out.ndim else float(out)


def _sample_run_lengths(rng: np.random.Generator, n: int, spacing: float, d_corr: float) -> np.ndarray:
    """Inverse-CDF draws from the window-length PMF for antenna spacing
    `spacing`; the PMF CDF is 1 - exp(-spacing*x*(x+1)/(2*d_corr))."""
    u = rng.random(n)
    c = -(2.0 * d_corr / spacing) * np.log1p(-u)
    x = np.ceil((np.sqrt(1.0 + 4.0 * c) - 1.0) / 2.0)
    return np.maximum(x, 1.0).astype(np.int64)


def window_anchors(rng: np.random.Generator, m: int, spacing: float, d_corr: float) -> np.ndarray:
    """Anchor indices of a window segmentation covering [0, m)."""
    if m < 1:
        raise ValueError("m must be >= 1")
    mean_len = max(1.0, float(np.sqrt(np.pi * d_corr / (2.0 * spacing))))
    anchors = [np.zeros(1, dtype=np.int64)]
    covered = 0
    while covered < m:
        batch = max(8, int((m - covered) / mean_len * 1.5) + 4)
        lengths = _sample_run_lengths(rng, batch, spacing, d_corr)
        starts = covered + np.cumsum(lengths)
        anchors.append(starts[starts < m])
        covered = int(starts[-1])
    return np.concatenate(anchors)


def segmentation_from_anchors(anchors: np.ndarray, m: int) -> WindowSegmentation:
    return WindowSegmentation(bounds=np.append(anchors, m))


def chain_states(
    rng: np.random.Generator,
    anchors: np.ndarray,
    m: int,
    spacing: float,
    d_corr: float,
    marginal: np.ndarray,
    start_antenna: int,
) -> np.ndarray:
    """Window states from a nearest-first Markov chain over the windows.

    The window covering ``start_antenna`` (the antenna closest to the
    user) draws its state from the marginal at that antenna.  Walking
    outward, each neighbouring window copies the previous state with
    probability exp(-gap/d_corr), where gap is the distance between the
    window anchors, and otherwise redraws from the marginal at its own
    near edge.  ``marginal`` gives the per-antenna LoS probability.
    """
    k = len(anchors)
    w0 = int(np.searchsorted(anchors, start_antenna, side="right") - 1)
    u = rng.random(k)
    copy_r = rng.random(k)
    s = np.empty(k, dtype=np.uint8)
    s[w0] = u[w0] < marginal[start_antenna]
    for i in range(w0 + 1, k):
        gap = (anchors[i] - anchors[i - 1]) * spacing
        s[i] = s[i - 1] if copy_r[i] < np.exp(-gap / d_corr) else (u[i] < marginal[anchors[i]])
    for i in range(w0 - 1, -1, -1):
        gap = (anchors[i + 1] - anchors[i]) * spacing
        right = anchors[i + 1] - 1
        s[i] = s[i + 1] if copy_r[i] < np.exp(-gap / d_corr) else (u[i] < marginal[right])
    return np.repeat(s, np.diff(np.append(anchors, m)))


def generate_ru_los(
    d2d: np.ndarray,
    spacing: float,
    params: PropagationParams,
    rng: np.random.Generator,
) -> LosVector:
    """Correlated LoS/NLoS vector of a reference user.

    Window lengths follow the closed-form run-length PMF; window states
    follow the Markov chain of :func:`chain_states`, anchored at the
    antenna closest to the user.
    """
    d2d = np.asarray(d2d, dtype=float)
    m = len(d2d)
    anchors = window_anchors(rng, m, spacing, params.d_los)
    marginal = np.asarray(los_probability(d2d, params), dtype=float)
    beta = chain_states(rng, anchors, m, spacing, params.d_los, marginal,
                        int(np.argmin(d2d)))
    return LosVector(beta=beta, anchors=anchors)


def shadow_segmentation(m: int, spacing: float, params: PropagationParams) -> WindowSegmentation:
    """Fixed shadowing-window segmentation: consecutive blocks of d_sf
    meters of array; antennas in one window share a single shadowing draw."""
    win = max(1, int(round(params.d_sf / spacing)))
    bounds = np.minimum(np.arange(0, m + win, win), m)
    bounds = bounds[: int(np.ceil(m / win)) + 1]
    return WindowSegmentation(bounds=bounds.astype(np.int64))
