"""LoS/NLoS vectors for non-reference users.

A non-RU's per-antenna LoS probability is a convex mix of the realized RU
LoS vectors (basis matrix B); in the linear Wyner layout only the two
flanking RU places carry weight.  The binary vector is then realized with
the same windowed sampler as for RUs, redrawing anchors from the mixed
probability vector.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .losfield import LosVector, chain_states, window_anchors


@dataclass(frozen=True)
class RuBasis:
    """Realized RU LoS vectors, one column per RU place."""

    matrix: np.ndarray        # (M, J) uint8
    places_x: np.ndarray      # (J,) strictly increasing positions


def wyner_weights(
    ut_x: float,
    ru_left_x: float,
    ru_right_x: float,
    paper_literal: bool = False,
) -> tuple[float, float]:
    """Correlation weights of the two flanking RU places.

    Default gives the closer RU the larger weight, so a UT co-located with
    an RU place copies that place exactly.  `paper_literal` keeps the
    opposite orientation (weight proportional to own distance).
    """
    if not ru_left_x < ru_right_x:
        raise ValueError("ru_left_x must be strictly left of ru_right_x")
    if not (ru_left_x <= ut_x <= ru_right_x):
        raise ValueError("UT lies outside its flanking RU places; weights undefined")
    span = ru_right_x - ru_left_x
    d_left = ut_x - ru_left_x
    d_right = ru_right_x - ut_x
    if paper_literal:
        return d_left / span, d_right / span
    return d_right / span, d_left / span


def weights_for_position(
    ut_x: float, ru_places_x: np.ndarray, paper_literal: bool = False
) -> np.ndarray:
    """Length-J weight vector for a UT at ut_x (at most two nonzero)."""
    places = np.asarray(ru_places_x, dtype=float)
    j = len(places)
    if j == 0:
        raise ValueError("scenario has no RU places")
    zeta = np.zeros(j)
    if j == 1:
        zeta[0] = 1.0
        return zeta
    exact = np.flatnonzero(np.abs(places - ut_x) <= 1e-9)
    if exact.size:
        zeta[exact[0]] = 1.0
        return zeta
    if ut_x < places[0] or ut_x > places[-1]:
        raise ValueError(f"UT at x={ut_x} lies outside the RU-place span")
    right = int(np.searchsorted(places, ut_x))
    left = right - 1
    w_left, w_right = wyner_weights(ut_x, places[left], places[right], paper_literal)
    zeta[left] = w_left
    zeta[right] = w_right
    return zeta


def mix_probability(basis: RuBasis, zeta: np.ndarray) -> np.ndarray:
    """Per-antenna LoS probability B @ zeta of a non-RU."""
    zeta = np.asarray(zeta, dtype=float)
    if basis.matrix.shape[1] != len(zeta):
        raise ValueError(
            f"weight vector length {len(zeta)} does not match basis with "
            f"{basis.matrix.shape[1]} RU places"
        )
    rho = basis.matrix.astype(float) @ zeta
    return np.clip(rho, 0.0, 1.0)


def generate_nonru_los(
    rho_k: np.ndarray,
    spacing: float,
    d_los: float,
    rng: np.random.Generator,
    start_antenna: int = 0,
) -> LosVector:
    """Realize a non-RU LoS vector from its mixed probability vector.

    Windowing and the window chain are identical to the RU sampler;
    redraws use the per-antenna Bernoulli(rho_k) law in place of the
    positional marginal.  ``start_antenna`` should be the antenna closest
    to the UT.
    """
    rho_k = np.asarray(rho_k, dtype=float)
    m = len(rho_k)
    anchors = window_anchors(rng, m, spacing, d_los)
    beta = chain_states(rng, anchors, m, spacing, d_los, rho_k, int(start_antenna))
    return LosVector(beta=beta, anchors=anchors)
