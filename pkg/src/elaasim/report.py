"""Quick-look report figures rendered next to a result bundle.

Given an output directory produced by :func:`elaasim.runner.run_experiment`,
render one PNG per delimited output: capacity ECDFs per channel kind for
every trials CSV, capacity std vs array size for hardening runs, and SER
curves for detection sweeps.  matplotlib is imported lazily so the
simulation path works without it.
"""

from __future__ import annotations

import csv
import os
from collections import defaultdict


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def _read_csv(path: str) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def _render_trials(path: str, out_path: str) -> None:
    rows = _read_csv(path)
    plt = _pyplot()
    gammas = sorted({float(r["gamma_db"]) for r in rows})
    g_plot = gammas[len(gammas) // 2]
    by_kind = defaultdict(list)
    for r in rows:
        if float(r["gamma_db"]) == g_plot:
            by_kind[r["channel_kind"]].append(float(r["capacity"]))
    fig, ax = plt.subplots(figsize=(6, 4))
    for kind, caps in sorted(by_kind.items()):
        caps = sorted(caps)
        ecdf = [(i + 1) / len(caps) for i in range(len(caps))]
        ax.step(caps, ecdf, where="post", label=kind)
    ax.set_xlabel("capacity (bits/s/Hz)")
    ax.set_ylabel("ECDF")
    ax.set_title(f"capacity ECDF at {g_plot:g} dB")
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.savefig(out_path, dpi=150, bbox_inches="tight")
    plt.close(fig)


def _render_hardening(path: str, out_path: str) -> None:
    rows = _read_csv(path)
    plt = _pyplot()
    series = defaultdict(list)
    for r in rows:
        label = r["channel_kind"] if r["channel_kind"] != "proposed" else f"proposed case {r['case']}"
        series[label].append((int(float(r["m_antennas"])), float(r["capacity_std"])))
    fig, ax = plt.subplots(figsize=(6, 4))
    for label, pts in sorted(series.items()):
        pts.sort()
        ax.loglog([p[0] for p in pts], [p[1] for p in pts], "o-", label=label)
    ax.set_xlabel("M antennas")
    ax.set_ylabel("capacity std (bits/s/Hz)")
    ax.legend()
    ax.grid(True, which="both", alpha=0.3)
    fig.savefig(out_path, dpi=150, bbox_inches="tight")
    plt.close(fig)


def _render_ser(path: str, out_path: str) -> None:
    rows = _read_csv(path)
    plt = _pyplot()
    series = defaultdict(list)
    for r in rows:
        label = f"{r['channel_kind']}/case{r['case']}/{r['detector']}"
        series[label].append((float(r["gamma_db"]), float(r["ser"])))
    fig, ax = plt.subplots(figsize=(6, 4))
    for label, pts in sorted(series.items()):
        pts.sort()
        ax.semilogy([p[0] for p in pts], [max(p[1], 1e-7) for p in pts], "o-",
                    label=label, markersize=3, linewidth=1)
    ax.set_xlabel("SNR (dB)")
    ax.set_ylabel("SER")
    ax.legend(fontsize=6)
    ax.grid(True, which="both", alpha=0.3)
    fig.savefig(out_path, dpi=150, bbox_inches="tight")
    plt.close(fig)


def render_report(out_dir: str) -> list[str]:
    """Render report figures for every delimited output in out_dir;
    returns the written image paths."""
    written = []
    for name in sorted(os.listdir(out_dir)):
        path = os.path.join(out_dir, name)
        stem, ext = os.path.splitext(name)
        if ext != ".csv":
            continue
        out_path = os.path.join(out_dir, stem + ".png")
        if stem.startswith("trials"):
            _render_trials(path, out_path)
        elif stem == "hardening":
            _render_hardening(path, out_path)
        elif stem == "ser":
            _render_ser(path, out_path)
        else:
            continue
        written.append(out_path)
    return written
