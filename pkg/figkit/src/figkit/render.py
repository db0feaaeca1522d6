"""Figure recipes over validated simulator bundles.

Each renderer takes already-validated inputs and an output path, draws
with a fixed style, and writes a PNG.  Rendering never mutates inputs
and embeds no timestamps, so a re-render is byte-stable for fixed
library versions.
"""

from __future__ import annotations

import numpy as np
from scipy import stats

from .schemas import SchemaError

_DPI = 150
_METADATA = {"Software": "figkit"}
_FAMILY_STYLE = {
    "gaussian": ("tab:orange", "--"),
    "weibull": ("tab:green", "-."),
    "skew_normal": ("tab:red", "-"),
}


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def _save(fig, out_path: str) -> None:
    fig.savefig(out_path, dpi=_DPI, metadata=_METADATA)
    _pyplot().close(fig)


def family_cdf(family: str, theta, x: np.ndarray) -> np.ndarray:
    """CDF of a fitted family under the simulator's parameterization:
    gaussian (mean, sd), weibull (scale, shape), skew_normal (loc, sd,
    shape)."""
    if family == "gaussian":
        return stats.norm.cdf(x, loc=theta[0], scale=theta[1])
    if family == "weibull":
        return stats.weibull_min.cdf(x, theta[1], scale=theta[0])
    if family == "skew_normal":
        return stats.skewnorm.cdf(x, theta[2], loc=theta[0], scale=theta[1])
    raise SchemaError(f"unknown family '{family}'")


def render_fig2(header: dict, h: np.ndarray, out_path: str) -> None:
    """Per-element RSS heatmap plus a high/low-RSS raster that exposes
    the window structure along the array."""
    plt = _pyplot()
    rss_db = 10.0 * np.log10(np.maximum(np.abs(h) ** 2, 1e-30))
    # threshold each stream at its own median so the raster shows the
    # piecewise-constant gain windows rather than absolute level
    raster = (rss_db > np.median(rss_db, axis=0, keepdims=True)).astype(float)

    fig, (ax0, ax1) = plt.subplots(1, 2, figsize=(10, 4), constrained_layout=True)
    ax0.imshow(raster.T, aspect="auto", interpolation="nearest", cmap="Greys")
    ax0.set_xlabel("antenna index")
    ax0.set_ylabel("stream index")
    ax0.set_title("high/low RSS state")
    im = ax1.imshow(rss_db.T, aspect="auto", interpolation="nearest", cmap="viridis")
    ax1.set_xlabel("antenna index")
    ax1.set_ylabel("stream index")
    ax1.set_title(f"RSS (dB), {header['kind']}, trial {header['trial']}")
    fig.colorbar(im, ax=ax1, shrink=0.9)
    _save(fig, out_path)


def render_fig4(rows: list[dict], out_path: str) -> None:
    """Capacity std versus array size, one curve per (kind, case)."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 4.5), constrained_layout=True)
    keys = sorted({(r["channel_kind"], r["case"]) for r in rows})
    for kind, case in keys:
        pts = sorted(
            (r["m_antennas"], r["capacity_std"])
            for r in rows
            if r["channel_kind"] == kind and r["case"] == case
        )
        label = kind if kind != "proposed" else f"proposed case {case}"
        ax.loglog([p[0] for p in pts], [max(p[1], 1e-12) for p in pts],
                  marker="o", label=label)
    ax.set_xlabel("number of antennas M")
    ax.set_ylabel("capacity std (bit/s/Hz)")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    _save(fig, out_path)


def render_fig6(trials: list[dict], fits: list[dict], out_path: str,
                channel_kind: str | None = None, gamma_db: float | None = None) -> None:
    """Capacity ECDF with the three fitted CDFs overlaid."""
    plt = _pyplot()
    kinds = sorted({r["channel_kind"] for r in trials})
    kind = channel_kind or kinds[0]
    if kind not in kinds:
        raise SchemaError(f"trials file has no rows for channel_kind '{kind}'")
    gammas = sorted({r["gamma_db"] for r in trials if r["channel_kind"] == kind})
    gamma = gammas[0] if gamma_db is None else float(gamma_db)
    samples = np.sort([
        r["capacity"] for r in trials
        if r["channel_kind"] == kind and r["gamma_db"] == gamma
    ])
    if samples.size == 0:
        raise SchemaError(f"trials file has no rows at gamma_db={gamma} for '{kind}'")

    fig, ax = plt.subplots(figsize=(6, 4.5), constrained_layout=True)
    ax.step(samples, np.arange(1, samples.size + 1) / samples.size,
            where="post", color="tab:blue", label="empirical")
    grid = np.linspace(samples[0], samples[-1], 400)
    for rec in fits:
        if rec["gamma_db"] != gamma:
            continue
        family = rec["family"]
        color, style = _FAMILY_STYLE[family]
        ax.plot(grid, family_cdf(family, rec["theta"], grid), style,
                color=color, label=family.replace("_", " "))
    ax.set_xlabel("capacity (bit/s/Hz)")
    ax.set_ylabel("CDF")
    ax.set_title(f"{kind}, gamma = {gamma:g} dB")
    ax.grid(alpha=0.3)
    ax.legend()
    _save(fig, out_path)


def render_fig8(regs: list[dict], out_path: str) -> None:
    """Residual of the regression-predicted CDF, grouped bars per
    scenario and family."""
    plt = _pyplot()
    # one theta_err per (scenario, family); records repeat it per parameter
    err = {}
    for rec in regs:
        err[(rec["scenario_id"], rec["family"])] = rec["theta_err"]
    scenarios = sorted({sid for sid, _ in err})
    families = [f for f in _FAMILY_STYLE if any((s, f) in err for s in scenarios)]

    fig, ax = plt.subplots(figsize=(max(6, 1.2 * len(scenarios)), 4.5),
                           constrained_layout=True)
    x = np.arange(len(scenarios))
    width = 0.8 / max(len(families), 1)
    for i, family in enumerate(families):
        vals = [err.get((s, family), np.nan) for s in scenarios]
        ax.bar(x + (i - (len(families) - 1) / 2) * width, vals, width,
               color=_FAMILY_STYLE[family][0], label=family.replace("_", " "))
    ax.set_xticks(x)
    ax.set_xticklabels(scenarios, rotation=30, ha="right")
    ax.set_ylabel("regression-predicted CDF residual")
    ax.grid(axis="y", alpha=0.3)
    ax.legend()
    _save(fig, out_path)


def render_fig9(rows: list[dict], out_path: str) -> None:
    """SER versus SNR, solid LMMSE and dashed MRC bound per scenario."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6.5, 4.8), constrained_layout=True)
    keys = sorted({(r["channel_kind"], r["case"]) for r in rows})
    colors = plt.rcParams["axes.prop_cycle"].by_key()["color"]
    for i, (kind, case) in enumerate(keys):
        color = colors[i % len(colors)]
        for det, style in (("lmmse", "-"), ("mrc_bound", "--")):
            pts = sorted(
                (r["gamma_db"], r["ser"]) for r in rows
                if r["channel_kind"] == kind and r["case"] == case and r["detector"] == det
            )
            if not pts:
                continue
            label = kind if kind != "proposed" else f"proposed case {case}"
            ax.semilogy([p[0] for p in pts], [max(p[1], 1e-12) for p in pts],
                        style, color=color, marker="o", markersize=3,
                        label=f"{label} ({det})")
    ax.set_xlabel("SNR (dB)")
    ax.set_ylabel("symbol error rate")
    ax.set_ylim(bottom=1e-5)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=7)
    _save(fig, out_path)
