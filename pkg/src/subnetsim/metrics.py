"""Evaluation metrics: relative absolute error, exact ECDF, run summaries."""

from __future__ import annotations

import math
from typing import Iterable

import numpy as np

from .link_adaptation import LaConfig, McsTable, achieved_bler, select_mcs

SWEEP_TARGETS = (1e-5, 1e-4, 1e-3, 1e-2, 1e-1)


class DegenerateTruth(ValueError):
    """Raised when the relative error is requested against a zero truth."""


class EmptyInput(ValueError):
    """Raised when a statistic is requested over no samples."""


def rae(true_ipv: float, pred_ipv: float) -> float:
    """Relative absolute error |(true - pred) / true|."""
    if true_ipv == 0.0:
        raise DegenerateTruth("relative error undefined at zero true power")
    return abs((true_ipv - pred_ipv) / true_ipv)


def ecdf(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Exact empirical CDF: sorted values against i/n, no binning."""
    vals = np.asarray(values, dtype=float).ravel()
    if vals.size == 0:
        raise EmptyInput("ecdf needs at least one sample")
    s = np.sort(vals)
    probs = np.arange(1, s.size + 1, dtype=float) / s.size
    return s, probs


def quantile_sorted(sorted_values: np.ndarray, p: float) -> float:
    """Order-statistic quantile: the ceil(p*n)-th smallest value."""
    n = len(sorted_values)
    if n == 0:
        raise EmptyInput("quantile over empty data")
    if not (0.0 <= p <= 1.0):
        raise ValueError("p must lie in [0, 1]")
    idx = min(n - 1, max(0, math.ceil(p * n) - 1))
    return float(sorted_values[idx])


def to_db(x: float) -> float:
    if x <= 0.0:
        raise ValueError("dB transform needs a positive value")
    return 10.0 * math.log10(x)


def predictors_in_frame(frame: dict) -> list[str]:
    prefix = "pred_ipv_"
    return [k[len(prefix):] for k in frame if k.startswith(prefix)]


def rae_values(frame: dict, predictor: str) -> tuple[np.ndarray, int]:
    """Per-record RAE for one predictor, skipping zero-truth records.

    Returns (values, n_skipped)."""
    truth = frame["true_ipv"]
    pred = frame[f"pred_ipv_{predictor}"]
    mask = truth > 0.0
    skipped = int(np.sum(~mask))
    vals = np.abs((truth[mask] - pred[mask]) / truth[mask])
    return vals, skipped


def _bler_stats(
    frame: dict,
    predictor: str,
    table: McsTable,
    target: float,
    reselect: bool,
) -> dict:
    """Attainment statistics over the TTIs feasible for this predictor.

    With reselect=True the MCS choice is replayed from the stored adjusted
    SINR at the given target; otherwise the recorded selection is used.
    """
    adj = frame[f"adjusted_sinr_db_{predictor}"]
    true_db = frame["true_sinr_db"]
    if reselect:
        achieved = np.empty(adj.size)
        infeasible = np.empty(adj.size, dtype=bool)
        for i in range(adj.size):
            mcs, bad = select_mcs(float(adj[i]), table, target)
            infeasible[i] = bad
            achieved[i] = achieved_bler(table, mcs, float(true_db[i]))
    else:
        achieved = frame[f"achieved_bler_{predictor}"]
        infeasible = frame[f"infeasible_{predictor}"].astype(bool)
    feasible = ~infeasible
    n_feasible = int(np.sum(feasible))
    out = {
        "target_bler": target,
        "n_feasible": n_feasible,
        "n_infeasible": int(np.sum(infeasible)),
    }
    if n_feasible:
        ach = np.sort(achieved[feasible])
        out["fraction_meeting_target"] = float(np.mean(ach <= target))
        out["p95_achieved"] = quantile_sorted(ach, 0.95)
        out["median_achieved"] = quantile_sorted(ach, 0.5)
    else:
        out["fraction_meeting_target"] = None
        out["p95_achieved"] = None
        out["median_achieved"] = None
    return out


def summarize_frame(
    frame: dict,
    table: McsTable,
    la_cfg: LaConfig,
    sweep_targets: Iterable[float] = SWEEP_TARGETS,
) -> dict:
    """Aggregate one run's records into a JSON-ready summary."""
    names = predictors_in_frame(frame)
    n = int(frame["true_ipv"].size)
    if n == 0:
        raise EmptyInput("no records to summarize")
    summary: dict = {
        "n_records": n,
        "n_drops": int(frame["drop"].max()) + 1 if n else 0,
        "n_subnets": int(frame["subnet"].max()) + 1 if n else 0,
        "target_bler": la_cfg.target_bler,
        "predictors": {},
    }
    subnets = np.unique(frame["subnet"])
    for name in names:
        vals, skipped = rae_values(frame, name)
        entry: dict = {"rae_skipped_zero_truth": skipped}
        if vals.size:
            s = np.sort(vals)
            median = quantile_sorted(s, 0.5)
            entry["rae"] = {
                "n": int(s.size),
                "median": median,
                "median_db": to_db(median) if median > 0 else None,
                "p10": quantile_sorted(s, 0.1),
                "p90": quantile_sorted(s, 0.9),
                "mean": float(np.mean(s)),
            }
            per_subnet = {}
            truth = frame["true_ipv"]
            pred = frame[f"pred_ipv_{name}"]
            for sn in subnets:
                m = (frame["subnet"] == sn) & (truth > 0.0)
                if np.any(m):
                    sv = np.sort(np.abs((truth[m] - pred[m]) / truth[m]))
                    per_subnet[int(sn)] = quantile_sorted(sv, 0.5)
            entry["rae_median_per_subnet"] = per_subnet
        else:
            entry["rae"] = None
            entry["rae_median_per_subnet"] = {}
        entry["bler"] = _bler_stats(frame, name, table, la_cfg.target_bler, reselect=False)
        entry["bler_sweep"] = [
            _bler_stats(frame, name, table, t, reselect=True) for t in sweep_targets
        ]
        summary["predictors"][name] = entry
    return summary
