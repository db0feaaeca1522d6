"""Experiment orchestration: Monte Carlo driver and result emission.

A run writes, under the output directory:

* ``trials.csv``       one row per (trial, gamma, kind): capacity,
                       Frobenius norm, condition number
* ``fits.json``        per (scenario, gamma, family) MLE records
* ``regression.json``  per-family linear fits of each parameter vs SNR (dB)
* ``manifest.json``    config hash, seed, versions
* ``ser.csv``          detection sweeps (ser mode only)
* ``hardening.csv``    capacity std vs array size (hardening mode only)

Numeric output is reproducible byte for byte for a fixed (spec, seed),
independent of the worker count: every random draw comes from a
substream keyed by (seed, trial, unit, purpose), never by worker.
"""

from __future__ import annotations

import csv
import hashlib
import json
import os
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__
from .channel import make_channel
from .detect import DetectionRun, ser_sweep
from .fitting import FAMILIES, DegenerateDataError, cdf, mle_fit, regress_linear
from .metrics import (
    capacity_from_eigenvalues,
    condition_number_from_eigenvalues,
    ecdf,
    ensemble_stats,
    gram_eigenvalues,
)
from .presets import ExperimentSpec, case_scenario
from .scenario import ScenarioConfig, compute_distances, serialize_scenario

_FLOAT_FMT = "%.12g"


def _fmt(x: float) -> str:
    return _FLOAT_FMT % x


def trial_metrics(scenario, kind, seed, trial, gamma_grid, dist=None):
    """Capacity over the SNR grid plus norm and condition number for one
    trial; eigenvalues are computed once and reused across the grid."""
    h = make_channel(kind, scenario, seed, trial, dist).matrix
    eigs = gram_eigenvalues(h)
    n = h.shape[1]
    caps = [float(capacity_from_eigenvalues(eigs, 10.0 ** (g / 10.0), n)) for g in gamma_grid]
    fro = float(np.sqrt(eigs.sum()))
    cond = float(condition_number_from_eigenvalues(eigs))
    return caps, fro, cond


def _capacity_block(args):
    scenario, kind, seed, trials, gamma_grid = args
    dist = compute_distances(scenario)
    rows = []
    for t in trials:
        caps, fro, cond = trial_metrics(scenario, kind, seed, t, gamma_grid, dist)
        rows.append((t, kind, caps, fro, cond))
    return rows


def run_capacity(
    scenario: ScenarioConfig,
    kinds,
    seed: int,
    n_trials: int,
    gamma_grid,
    workers: int = 1,
) -> list[tuple]:
    """All trial rows, ordered by (kind, trial) regardless of scheduling."""
    rows = []
    for kind in kinds:
        if workers <= 1:
            rows.extend(_capacity_block((scenario, kind, seed, range(n_trials), gamma_grid)))
        else:
            blocks = np.array_split(np.arange(n_trials), workers * 4)
            tasks = [(scenario, kind, seed, list(b), gamma_grid) for b in blocks if len(b)]
            with ProcessPoolExecutor(max_workers=workers) as pool:
                for part in pool.map(_capacity_block, tasks):
                    rows.extend(part)
    rows.sort(key=lambda r: (r[1], r[0]))
    return rows


def write_trials_csv(path, rows, gamma_grid):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["trial", "channel_kind", "gamma_db", "capacity", "fro_norm", "cond"])
        for t, kind, caps, fro, cond in rows:
            for g, c in zip(gamma_grid, caps):
                w.writerow([t, kind, _fmt(g), _fmt(c), _fmt(fro), _fmt(cond)])


def fit_records(scenario_id: str, gamma_db: float, samples) -> list[dict]:
    records = []
    for family in FAMILIES:
        try:
            fit = mle_fit(family, samples)
        except (DegenerateDataError, ValueError) as exc:
            records.append(
                {
                    "scenario_id": scenario_id,
                    "gamma_db": gamma_db,
                    "family": family,
                    "error": str(exc),
                }
            )
            continue
        records.append(
            {
                "scenario_id": scenario_id,
                "gamma_db": gamma_db,
                "family": family,
                "theta": list(fit.theta),
                "theta_err": fit.theta_err,
                "nll": fit.nll,
                "converged": fit.converged,
            }
        )
    return records


def regression_records(scenario_id: str, fits: list[dict], samples_by_gamma) -> list[dict]:
    """Linear fits of every family parameter against SNR in dB, with the
    residual of the regression-predicted CDF at the largest SNR point."""
    out = []
    for family in FAMILIES:
        rows = [r for r in fits if r["family"] == family and "theta" in r]
        if len(rows) < 2:
            continue
        n_par = len(rows[0]["theta"])
        coeffs = []
        for p in range(n_par):
            pts = [(r["gamma_db"], r["theta"][p]) for r in rows]
            a, c = regress_linear(pts)
            coeffs.append((a, c))
        # evaluate the regression-predicted CDF against the ECDF per gamma
        for p, (a, c) in enumerate(coeffs):
            err = _regression_theta_err(family, coeffs, samples_by_gamma)
            out.append(
                {
                    "scenario_id": scenario_id,
                    "family": family,
                    "param_index": p,
                    "a": a,
                    "c": c,
                    "theta_err": err,
                }
            )
    return out


def _regression_theta_err(family, coeffs, samples_by_gamma) -> float:
    worst = 0.0
    for gamma_db, samples in samples_by_gamma.items():
        theta = [a * gamma_db + c for a, c in coeffs]
        if family == "weibull" and (theta[0] <= 0 or theta[1] <= 0):
            return float("inf")
        if family in ("gaussian", "skew_normal") and theta[1] <= 0:
            return float("inf")
        x = np.asarray(samples)
        emp = ecdf(x).evaluate(x)
        model = cdf(family, theta, x)
        worst = max(worst, float(np.sqrt(np.sum((emp - model) ** 2))))
    return worst


def _manifest(spec: ExperimentSpec, seed: int, workers: int) -> dict:
    scenario_text = serialize_scenario(spec.scenario)
    payload = json.dumps(
        {
            "scenario": scenario_text,
            "trials": spec.trials,
            "gamma_db_grid": list(spec.gamma_db_grid),
            "channel_kinds": list(spec.channel_kinds),
            "mode": spec.mode,
            "seed": seed,
        },
        sort_keys=True,
    )
    return {
        "preset": spec.name,
        "seed": seed,
        "trials": spec.trials,
        "workers": workers,
        "config_sha256": hashlib.sha256(payload.encode()).hexdigest(),
        "version": __version__,
        "numpy_version": np.__version__,
    }


def run_experiment(
    spec: ExperimentSpec,
    out_dir: str,
    seed: int = 1234,
    workers: int = 1,
) -> dict:
    """Execute a preset and write the result bundle; returns the manifest."""
    spec.validate()
    os.makedirs(out_dir, exist_ok=True)
    gamma_grid = list(spec.gamma_db_grid)

    if spec.mode == "capacity":
        scenarios = [(spec.name, spec.scenario)]
        if spec.extras.get("all_cases"):
            scenarios = [
                (f"case{case}-{int(dp)}m", case_scenario(case, float(dp),
                                                         m=spec.scenario.geometry.m_antennas))
                for case in (1, 2, 3)
                for dp in (1.0, 25.0, 50.0)
            ]
        all_fits, all_regs = [], []
        for sid, scenario in scenarios:
            rows = run_capacity(scenario, spec.channel_kinds, seed, spec.trials, gamma_grid, workers)
            write_trials_csv(os.path.join(out_dir, f"trials-{sid}.csv" if len(scenarios) > 1 else "trials.csv"),
                             rows, gamma_grid)
            proposed = [r for r in rows if r[1] == spec.channel_kinds[0]]
            samples_by_gamma = {
                g: np.array([r[2][i] for r in proposed]) for i, g in enumerate(gamma_grid)
            }
            fits = []
            for g, samples in samples_by_gamma.items():
                fits.extend(fit_records(sid, g, samples))
            all_fits.extend(fits)
            if len(gamma_grid) >= 2:
                all_regs.extend(regression_records(sid, fits, samples_by_gamma))
        _write_json(os.path.join(out_dir, "fits.json"), all_fits)
        if all_regs:
            _write_json(os.path.join(out_dir, "regression.json"), all_regs)

    elif spec.mode == "hardening":
        _run_hardening(spec, out_dir, seed, workers)

    elif spec.mode == "ser":
        _run_ser(spec, out_dir, seed)

    else:
        raise ValueError(f"unknown experiment mode '{spec.mode}'")

    manifest = _manifest(spec, seed, workers)
    _write_json(os.path.join(out_dir, "manifest.json"), manifest)
    return manifest


def _run_hardening(spec, out_dir, seed, workers):
    m_grid = spec.extras.get("m_grid", (200, 2000, 20000))
    d_perp = spec.extras.get("d_perp", 25.0)
    path = os.path.join(out_dir, "hardening.csv")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["m_antennas", "channel_kind", "case", "trials", "capacity_mean", "capacity_std"])
        for m in m_grid:
            for kind in spec.channel_kinds:
                cases = (1, 2, 3) if kind == "proposed" else (3,)
                for case in cases:
                    scenario = case_scenario(case, d_perp, m=int(m))
                    rows = run_capacity(scenario, [kind], seed, spec.trials,
                                        list(spec.gamma_db_grid), workers)
                    caps = np.array([r[2][0] for r in rows])
                    mu, sigma = ensemble_stats(caps)
                    w.writerow([m, kind, case, spec.trials, _fmt(mu), _fmt(sigma)])


def _run_ser(spec, out_dir, seed):
    order = spec.extras.get("order", 64)
    cases = spec.extras.get("cases", (3,))
    path = os.path.join(out_dir, "ser.csv")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["gamma_db", "channel_kind", "case", "detector", "trials",
                    "symbol_errors", "ser"])
        m = spec.scenario.geometry.m_antennas
        for kind in spec.channel_kinds:
            kind_cases = cases if kind == "proposed" else (3,)
            for case in kind_cases:
                scenario = case_scenario(case, spec.scenario.layout.d_perp, m=m)
                run = DetectionRun(kind, tuple(spec.gamma_db_grid), spec.trials, seed, order)
                for rec in ser_sweep(run, scenario):
                    w.writerow([_fmt(rec["gamma_db"]), kind, case, rec["detector"],
                                rec["trials"], rec["symbol_errors"], _fmt(rec["ser"])])


def dump_channel(spec: ExperimentSpec, trial: int, path: str, kind: str = "proposed",
                 seed: int = 1234):
    """Per-trial channel export for plotting: a JSON header plus a CSV body
    of interleaved re/im values, row-major over antennas."""
    scenario = spec.scenario
    ch = make_channel(kind, scenario, seed, trial)
    h = ch.matrix
    header = {
        "m_antennas": h.shape[0],
        "n_streams": h.shape[1],
        "kind": kind,
        "seed": ch.seed,
        "trial": trial,
        "d_perp": scenario.layout.d_perp,
        "ut_x": list(scenario.layout.ut_x),
        "n_ue": scenario.layout.n_ue,
    }
    with open(path, "w") as fh:
        fh.write(json.dumps(header, sort_keys=True))
        fh.write("\n")
        w = csv.writer(fh)
        for row in h:
            out = []
            for z in row:
                out.append(_fmt(z.real))
                out.append(_fmt(z.imag))
            w.writerow(out)


def _write_json(path, obj):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=1, sort_keys=True)
        fh.write("\n")
