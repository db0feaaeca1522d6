"""Per-trial capacity metrics and ensemble statistics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

COND_RANK_DEFICIENT = np.inf


@dataclass(frozen=True)
class TrialMetrics:
    trial: int
    gamma_db: float
    capacity: float
    frobenius_norm: float
    condition_number: float


@dataclass(frozen=True)
class EcdfTable:
    values: np.ndarray  # sorted sample values
    probs: np.ndarray   # k/T at each sorted value

    def evaluate(self, x) -> np.ndarray:
        """Right-continuous ECDF at x."""
        idx = np.searchsorted(self.values, np.asarray(x, dtype=float), side="right")
        return idx / len(self.values)


def gram_eigenvalues(h: np.ndarray) -> np.ndarray:
    """Eigenvalues of H^H H (ascending, clipped at 0)."""
    if not np.all(np.isfinite(h)):
        raise ValueError("channel matrix contains non-finite entries")
    gram = h.conj().T @ h
    return np.clip(np.linalg.eigvalsh(gram), 0.0, None)


def capacity_from_eigenvalues(eigs: np.ndarray, gamma: float, n_streams: int):
    """log2 det(I + gamma/N H^H H) from precomputed Gram eigenvalues.

    Vectorizes over a leading trial axis of `eigs`.
    """
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    return np.log1p(gamma / n_streams * np.asarray(eigs)).sum(axis=-1) / np.log(2.0)


def capacity(h: np.ndarray, gamma: float) -> float:
    """Instantaneous capacity via the N x N Gram form (N << M)."""
    eigs = gram_eigenvalues(h)
    return float(capacity_from_eigenvalues(eigs, gamma, h.shape[1]))


def condition_number(h: np.ndarray) -> float:
    """sigma_max / sigma_min of H; inf sentinel for rank-deficient H."""
    s = np.linalg.svd(h, compute_uv=False)
    if s[0] == 0.0:
        raise ValueError("condition number of the all-zero matrix is undefined")
    if s[-1] <= s[0] * np.finfo(float).eps * max(h.shape):
        return COND_RANK_DEFICIENT
    return float(s[0] / s[-1])


def condition_number_from_eigenvalues(eigs: np.ndarray) -> float:
    """Condition number of H from Gram eigenvalues (sqrt of eig ratio)."""
    eigs = np.asarray(eigs)
    top = eigs.max(axis=-1)
    bottom = eigs.min(axis=-1)
    with np.errstate(divide="ignore"):
        return np.where(bottom > top * np.finfo(float).eps, np.sqrt(top / np.maximum(bottom, 1e-300)), COND_RANK_DEFICIENT)


def ensemble_stats(samples) -> tuple[float, float]:
    """Ensemble mean and population (1/T) standard deviation."""
    samples = np.asarray(samples, dtype=float)
    if samples.size == 0:
        raise ValueError("empty sample set")
    mu = float(samples.mean())
    sigma = float(np.sqrt(np.mean((samples - mu) ** 2)))
    return mu, sigma


def ecdf(samples) -> EcdfTable:
    samples = np.asarray(samples, dtype=float)
    if samples.size == 0:
        raise ValueError("empty sample set")
    values = np.sort(samples)
    probs = np.arange(1, len(values) + 1) / len(values)
    return EcdfTable(values=values, probs=probs)
