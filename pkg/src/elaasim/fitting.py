"""Distribution fitting of capacity samples and SNR regression.

Three families are supported (gaussian, weibull, skew_normal).  Fit
quality is reported as the root-sum-square gap between the empirical CDF
and the fitted CDF over the sample points, which is comparable across
families, unlike the raw likelihood.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq, minimize
from scipy.special import erf, log_ndtr, ndtr

from .metrics import ecdf

FAMILIES = ("gaussian", "weibull", "skew_normal")

_SQRT_2PI = float(np.sqrt(2.0 * np.pi))


@dataclass(frozen=True)
class FitResult:
    family: str
    theta: tuple[float, ...]
    theta_err: float       # ECDF residual
    nll: float
    iterations: int
    converged: bool


@dataclass(frozen=True)
class RegressionResult:
    family: str
    param_index: int
    slope: float
    intercept: float
    theta_err: float       # residual of the regression-predicted CDF


class DegenerateDataError(ValueError):
    """Raised when samples cannot identify the family parameters."""


# ---------------------------------------------------------------------------
# Owen's T function
# ---------------------------------------------------------------------------

@lru_cache(maxsize=1)
def _gl_nodes(order: int = 64) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(order)


def _owens_t_core(h: np.ndarray, a: float) -> np.ndarray:
    """Gauss-Legendre quadrature of the defining integral, 0 <= a <= 1."""
    nodes, weights = _gl_nodes()
    x = (nodes + 1.0) * (a / 2.0)             # map [-1,1] -> [0,a]
    integrand = np.exp(-0.5 * h[..., None] ** 2 * (1.0 + x**2)) / (1.0 + x**2)
    return (a / 2.0) * (integrand * weights).sum(axis=-1) / (2.0 * np.pi)


def owens_t(h, a):
    """Owen's T(h, a); sign-symmetric in both arguments, reduced to the
    quadrature core on |a| <= 1 via the standard reciprocal identity."""
    h = np.abs(np.asarray(h, dtype=float))
    a = float(a)
    if a == 0.0:
        out = np.zeros_like(h)
        return out if out.ndim else float(out)
    sign = np.sign(a)
    a = abs(a)
    if a <= 1.0:
        out = _owens_t_core(h, a)
    else:
        # T(h,a) = [Phi(h)+Phi(ah)]/2 - Phi(h)Phi(ah) - T(ah, 1/a)
        ph, pah = ndtr(h), ndtr(a * h)
        out = 0.5 * (ph + pah) - ph * pah - _owens_t_core(a * h, 1.0 / a)
    out = sign * out
    return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# Family CDFs / negative log-likelihoods
# ---------------------------------------------------------------------------

def _check_theta(family: str, theta) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    if family == "gaussian":
        ok = theta.shape == (2,) and theta[1] > 0
    elif family == "weibull":
        ok = theta.shape == (2,) and theta[0] > 0 and theta[1] > 0
    elif family == "skew_normal":
        ok = theta.shape == (3,) and theta[1] > 0
    else:
        raise ValueError(f"unknown family '{family}'; expected one of {FAMILIES}")
    if not ok:
        raise ValueError(f"invalid parameter vector {theta.tolist()} for family '{family}'")
    return theta


def cdf(family: str, theta, x):
    """CDF of the fitted family at x.

    The skew-normal first term uses the standard-normal CDF, as required
    for a valid distribution function.
    """
    theta = _check_theta(family, theta)
    x = np.asarray(x, dtype=float)
    if family == "gaussian":
        out = 0.5 * (1.0 + erf((x - theta[0]) / (np.sqrt(2.0) * theta[1])))
    elif family == "weibull":
        out = np.where(x >= 0, -np.expm1(-((np.maximum(x, 0.0) / theta[0]) ** theta[1])), 0.0)
    else:
        z = (x - theta[0]) / theta[1]
        out = ndtr(z) - 2.0 * owens_t(z, theta[2])  # T is even in its first argument
    out = np.clip(out, 0.0, 1.0)
    return out if out.ndim else float(out)


def nll(family: str, theta, samples) -> float:
    theta = _check_theta(family, theta)
    x = np.asarray(samples, dtype=float)
    if family == "gaussian":
        mu, sd = theta
        return float(len(x) * np.log(sd * _SQRT_2PI) + np.sum((x - mu) ** 2) / (2 * sd**2))
    if family == "weibull":
        scale, shape = theta
        if np.any(x <= 0):
            return np.inf
        z = x / scale
        return float(-np.sum(np.log(shape / scale) + (shape - 1) * np.log(z) - z**shape))
    loc, scale, shape = theta
    z = (x - loc) / scale
    return float(-np.sum(np.log(2.0 / scale) - 0.5 * z**2 - np.log(_SQRT_2PI) + log_ndtr(shape * z)))


# ---------------------------------------------------------------------------
# Maximum-likelihood fitting
# ---------------------------------------------------------------------------

def _fit_gaussian(x: np.ndarray) -> tuple[np.ndarray, int, bool]:
    mu = x.mean()
    sd = np.sqrt(np.mean((x - mu) ** 2))
    if sd == 0.0:
        raise DegenerateDataError("constant samples: gaussian scale is zero")
    return np.array([mu, sd]), 0, True

def _weibull_profile_eq(k: float, x: np.ndarray, logx: np.ndarray) -> float:
    xk = x**k
    return float((xk * logx).sum() / xk.sum() - 1.0 / k - logx.mean())


def _fit_weibull(x: np.ndarray) -> tuple[np.ndarray, int, bool]:
    if np.any(x <= 0):
        raise ValueError("weibull fitting requires strictly positive samples")
    if x.min() == x.max():
        raise DegenerateDataError("constant samples: weibull shape unidentified")
    # Normalize to tame x**k overflow for large shapes.
    ref = x.mean()
    xs = x / ref
    logx = np.log(xs)
    lo, hi = 1e-3, 4.0
    while _weibull_profile_eq(hi, xs, logx) < 0 and hi < 1e6:
        hi *= 2.0
    shape = brentq(_weibull_profile_eq, lo, hi, args=(xs, logx), xtol=1e-10)
    scale = (np.mean(xs**shape)) ** (1.0 / shape) * ref
    return np.array([scale, shape]), 0, True


def _skew_normal_moment_init(x: np.ndarray) -> np.ndarray:
    mean, var = x.mean(), x.var()
    std = np.sqrt(var)
    g1 = np.mean(((x - mean) / std) ** 3)
    g1 = np.clip(g1, -0.98, 0.98)
    b = (2.0 / np.pi) ** 0.5
    r = np.sign(g1) * (2.0 * np.abs(g1) / (4.0 - np.pi)) ** (1.0 / 3.0)
    delta = np.clip(r / (b * np.sqrt(1.0 + r**2)), -0.995, 0.995)
    shape = delta / np.sqrt(1.0 - delta**2)
    scale = np.sqrt(var / (1.0 - 2.0 * delta**2 / np.pi))
    loc = mean - scale * delta * b
    return np.array([loc, scale, shape])


def _fit_skew_normal(x: np.ndarray) -> tuple[np.ndarray, int, bool]:
    if x.min() == x.max():
        raise DegenerateDataError("constant samples: skew-normal scale is zero")

    def objective(theta):
        if theta[1] <= 0:
            return np.inf
        return nll("skew_normal", theta, x)

    init = _skew_normal_moment_init(x)
    res = minimize(
        objective,
        init,
        method="Nelder-Mead",
        options={"xatol": 1e-8, "fatol": 1e-10, "maxiter": 2000, "maxfev": 4000},
    )
    return np.asarray(res.x), int(res.nit), bool(res.success)


def mle_fit(family: str, samples) -> FitResult:
    """Fit one family by maximum likelihood and attach the ECDF residual."""
    x = np.asarray(samples, dtype=float)
    if x.size < 10:
        raise ValueError("need at least 10 samples to fit")
    if family == "gaussian":
        theta, iters, converged = _fit_gaussian(x)
    elif family == "weibull":
        theta, iters, converged = _fit_weibull(x)
    elif family == "skew_normal":
        theta, iters, converged = _fit_skew_normal(x)
    else:
        raise ValueError(f"unknown family '{family}'; expected one of {FAMILIES}")
    fit = FitResult(
        family=family,
        theta=tuple(float(t) for t in theta),
        theta_err=float("nan"),
        nll=nll(family, theta, x),
        iterations=iters,
        converged=converged,
    )
    return FitResult(**{**fit.__dict__, "theta_err": residual_theta(fit, x)})


def residual_theta(fit: FitResult, samples) -> float:
    """Root-sum-square ECDF-vs-model gap over the sample points."""
    x = np.asarray(samples, dtype=float)
    emp = ecdf(x).evaluate(x)
    model = cdf(fit.family, fit.theta, x)
    return float(np.sqrt(np.sum((emp - model) ** 2)))


def regress_linear(points) -> tuple[float, float]:
    """Ordinary least squares through (snr, parameter) points."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 2:
        raise ValueError("need at least two (snr, value) points")
    x, y = pts[:, 0], pts[:, 1]
    if np.ptp(x) == 0:
        raise ValueError("regression requires at least two distinct snr values")
    xm, ym = x.mean(), y.mean()
    slope = float(np.sum((x - xm) * (y - ym)) / np.sum((x - xm) ** 2))
    return slope, float(ym - slope * xm)
