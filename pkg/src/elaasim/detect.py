"""Uncoded link-level detection benchmark.

Gray-mapped square QAM, noisy uplink observations y = H s + v, LMMSE
equalization and a genie-aided per-stream MRC bound, plus Monte Carlo
symbol-error-rate sweeps over the channel kinds.

The per-receive-antenna average SNR gamma is defined against unit mean
per-element channel power, so the noise variance per element is N/gamma.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .rng import Draw, substream
from .scenario import ScenarioConfig, compute_distances
from .channel import CHANNEL_KINDS, make_channel

QAM_ORDERS = (4, 16, 64)


def _gray_levels(k: int) -> np.ndarray:
    """PAM levels in Gray order: index i carries the Gray code of i."""
    idx = np.arange(k)
    gray = idx ^ (idx >> 1)
    levels = 2 * idx - (k - 1)
    out = np.empty(k)
    out[gray] = levels
    return out


@dataclass(frozen=True)
class ModulationScheme:
    """Square QAM with unit average energy and Gray bit mapping."""

    order: int
    points: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.order not in QAM_ORDERS:
            raise ValueError(f"unsupported QAM order {self.order}; expected one of {QAM_ORDERS}")
        k = int(np.sqrt(self.order))
        pam = _gray_levels(k)
        grid = pam[:, None] + 1j * pam[None, :]
        points = grid.ravel()
        points = points / np.sqrt(np.mean(np.abs(points) ** 2))
        object.__setattr__(self, "points", points)

    def draw_symbols(self, rng: np.random.Generator, shape) -> np.ndarray:
        return self.points[rng.integers(0, self.order, shape)]

    def slice(self, x: np.ndarray) -> np.ndarray:
        """Nearest-constellation-point decisions."""
        x = np.asarray(x)
        idx = np.abs(x[..., None] - self.points).argmin(axis=-1)
        return self.points[idx]


@dataclass(frozen=True)
class DetectionRun:
    kind: str
    gamma_db_grid: tuple[float, ...]
    trials: int
    seed: int
    order: int = 64

    def validate(self) -> "DetectionRun":
        if self.kind not in CHANNEL_KINDS:
            raise ValueError(f"unknown channel kind '{self.kind}'")
        grid = np.asarray(self.gamma_db_grid, dtype=float)
        if len(grid) == 0 or np.any(np.diff(grid) <= 0):
            raise ValueError("gamma_db_grid must be non-empty and strictly increasing")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        return self


def transmit(s: np.ndarray, h: np.ndarray, gamma: float, rng: np.random.Generator) -> np.ndarray:
    """Noisy observation y = H s + v with v ~ CN(0, (N/gamma) I)."""
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    n = h.shape[1]
    v = noise(rng, h.shape[0], n, gamma)
    return h @ s + v


def noise(rng: np.random.Generator, m: int, n_streams: int, gamma: float) -> np.ndarray:
    sigma = np.sqrt(n_streams / gamma / 2.0)
    return sigma * (rng.standard_normal(m) + 1j * rng.standard_normal(m))


def lmmse_detect(
    y: np.ndarray,
    h: np.ndarray,
    gamma: float,
    scheme: ModulationScheme | None = None,
    paper_literal: bool = False,
) -> np.ndarray:
    """LMMSE equalizer (H^H H + c I)^-1 H^H y, c = N/gamma by default.

    The literal flag uses c = gamma/N instead.  Decisions are sliced to
    the constellation when a scheme is given, otherwise the soft
    estimates are returned.
    """
    n = h.shape[1]
    c = (gamma / n) if paper_literal else (n / gamma)
    gram = h.conj().T @ h + c * np.eye(n)
    est = np.linalg.solve(gram, h.conj().T @ y)
    return scheme.slice(est) if scheme is not None else est


def mrc_bound_detect(
    s: np.ndarray,
    h: np.ndarray,
    v: np.ndarray,
    scheme: ModulationScheme | None = None,
) -> np.ndarray:
    """Genie matched-filter bound: per stream, interference is removed and
    the estimate is (h_n^H h_n s_n + h_n^H v) / ||h_n||^2."""
    norms = np.sum(np.abs(h) ** 2, axis=0)
    if np.any(norms == 0):
        raise ValueError("zero-norm channel column; MRC bound undefined")
    est = s + (h.conj() * v[:, None]).sum(axis=0) / norms
    return scheme.slice(est) if scheme is not None else est


def ser_sweep(run: DetectionRun, scenario: ScenarioConfig) -> list[dict]:
    """Monte Carlo SER per SNR point for LMMSE and the MRC bound.

    Returns one record per (gamma, detector) with fields matching the
    CSV schema: gamma_db, channel_kind, detector, trials, symbol_errors,
    ser.
    """
    run.validate()
    scheme = ModulationScheme(run.order)
    dist = compute_distances(scenario)
    n = scenario.layout.n_streams
    records = []
    for gamma_db in run.gamma_db_grid:
        gamma = 10.0 ** (gamma_db / 10.0)
        errors = {"lmmse": 0, "mrc_bound": 0}
        for t in range(run.trials):
            h = make_channel(run.kind, scenario, run.seed, t, dist).matrix
            rng = substream(run.seed, t, 0, Draw.SYMBOLS)
            s = scheme.draw_symbols(rng, n)
            v = noise(substream(run.seed, t, 0, Draw.NOISE), h.shape[0], n, gamma)
            y = h @ s + v
            errors["lmmse"] += int(np.count_nonzero(lmmse_detect(y, h, gamma, scheme) != s))
            cols_ok = np.sum(np.abs(h) ** 2, axis=0) > 0
            if np.all(cols_ok):
                mrc = mrc_bound_detect(s, h, v, scheme)
                errors["mrc_bound"] += int(np.count_nonzero(mrc != s))
            else:
                # dead columns (possible under the visibility-region
                # baseline) are counted as stream errors
                sub = mrc_bound_detect(s[cols_ok], h[:, cols_ok], v, scheme)
                errors["mrc_bound"] += int(np.count_nonzero(sub != s[cols_ok]))
                errors["mrc_bound"] += int(np.count_nonzero(~cols_ok))
        total = run.trials * n
        for det, errs in errors.items():
            records.append(
                {
                    "gamma_db": float(gamma_db),
                    "channel_kind": run.kind,
                    "detector": det,
                    "trials": run.trials,
                    "symbol_errors": errs,
                    "ser": errs / total,
                }
            )
    return records


def gap_at_ser(records: list[dict], target_ser: float = 1e-3) -> float:
    """SNR gap (dB) between the LMMSE and MRC-bound curves at a target SER,
    via log-linear interpolation of each curve."""

    def crossing(detector: str) -> float:
        pts = sorted(
            (r for r in records if r["detector"] == detector), key=lambda r: r["gamma_db"]
        )
        xs = np.array([r["gamma_db"] for r in pts])
        ys = np.array([max(r["ser"], 1e-12) for r in pts])
        below = np.flatnonzero(ys <= target_ser)
        if below.size == 0:
            raise ValueError(f"{detector} curve never reaches SER {target_ser}")
        j = below[0]
        if j == 0:
            return float(xs[0])
        x0, x1 = xs[j - 1], xs[j]
        y0, y1 = np.log10(ys[j - 1]), np.log10(ys[j])
        frac = (np.log10(target_ser) - y0) / (y1 - y0)
        return float(x0 + frac * (x1 - x0))

    return crossing("lmmse") - crossing("mrc_bound")
