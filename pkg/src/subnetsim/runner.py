"""Drop orchestration: world stepping, prediction, link adaptation, records.

One drop wires the modules together per TTI: mobility, then per-link channel
evolution, then traffic, interference aggregation and true SINR, then the
report pipeline and every enabled predictor, then MCS selection and the
achieved error probability at the true SINR. Reports reach the access point
with a fixed delay, so the filter folds in the report measured report_delay
TTIs ago and projects forward for the current decision.

Randomness is split into named independent streams per drop (mobility,
traffic, estimation noise, and per-link fading, shadowing, LOS), all derived
from the root seed. Enabling or disabling predictors therefore never changes
the world realization. The quantizer anchor is calibrated per drop and subnet
from a replay of the same realization, so it is a deterministic function of
(seed, drop) as well.
"""

from __future__ import annotations

import csv
import json
import logging
import math
import os
from collections import deque
from dataclasses import dataclass

import numpy as np

from . import channel as ch
from . import cqi as cq
from . import interference as itf
from . import link_adaptation as la
from . import metrics as mt
from . import predictor as pr
from . import scenario as sc
from .config import RunConfig, config_to_ini

log = logging.getLogger(__name__)

# stream labels for SeedSequence derivation
_S_MOBILITY = 0
_S_TRAFFIC = 1
_S_ESM = 2
_S_FADING = 3
_S_SHADOW = 4
_S_LOS = 5

BASE_COLUMNS = ("drop", "tti", "subnet", "true_ipv", "true_sinr_db", "cqi_index")
PREDICTOR_COLUMNS = ("pred_ipv", "adjusted_sinr_db", "mcs", "achieved_bler", "infeasible")


def _rng(seed: int, drop: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=(seed, drop, *key)))


class _World:
    """Deployment, per-link channels, traffic. Identical for every rebuild."""

    def __init__(self, cfg: RunConfig, drop: int):
        self.cfg = cfg
        scn = cfg.scenario
        self.mobility_rng = _rng(cfg.seed, drop, _S_MOBILITY)
        self.traffic_rng = _rng(cfg.seed, drop, _S_TRAFFIC)
        self.state = sc.init_deployment(scn, self.mobility_rng)
        self.noise = itf.thermal_noise_power(cfg.noise)
        self.step_length = scn.speed * scn.tti

        self.links: dict[tuple[int, int], ch.LinkChannel] = {}
        self.link_rngs: dict[tuple[int, int], tuple[np.random.Generator, np.random.Generator]] = {}
        for n in range(scn.n_subnets):
            ids, dists = sc.interferer_distances(self.state, n)
            pairs = [(n, n, sc.desired_distance(self.state, n))]
            pairs += [(n, int(m), float(d)) for m, d in zip(ids, dists)]
            for victim, src, dist in pairs:
                fading_rng = _rng(cfg.seed, drop, _S_FADING, victim, src)
                shadow_rng = _rng(cfg.seed, drop, _S_SHADOW, victim, src)
                los_rng = _rng(cfg.seed, drop, _S_LOS, victim, src)
                link = ch.init_link(dist, cfg.channel, fading_rng, shadow_rng, los_rng)
                self.links[(victim, src)] = link
                self.link_rngs[(victim, src)] = (shadow_rng, los_rng)

    def _link_distance(self, victim: int, src: int) -> float:
        if victim == src:
            return sc.desired_distance(self.state, victim)
        ue = self.state.positions[victim] + self.state.ue_offsets[victim]
        delta = self.state.positions[src] - ue
        return float(np.hypot(delta[0], delta[1]))

    def step(self, tti: int) -> None:
        """Advance mobility and every link by one TTI (called for tti >= 1)."""
        self.state = sc.step_mobility(self.state, self.cfg.scenario, self.mobility_rng)
        for key, link in self.links.items():
            victim, src = key
            dist = self._link_distance(victim, src)
            shadow_rng, los_rng = self.link_rngs[key]
            ch.step_los_state(link, dist, tti, self.cfg.channel, los_rng)
            ch.step_shadowing(link, self.step_length, self.cfg.channel, shadow_rng)
            ch.step_fading(link)

    def snapshot(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Per-subnet (signal, interference, sinr) for the current TTI."""
        scn = self.cfg.scenario
        active = itf.sample_traffic(scn.n_subnets, self.cfg.traffic, self.traffic_rng)
        p = self.cfg.traffic.tx_power
        signal = np.empty(scn.n_subnets)
        ipv = np.empty(scn.n_subnets)
        sinr = np.empty(scn.n_subnets)
        for n in range(scn.n_subnets):
            own = self.links[(n, n)]
            signal[n] = p * ch.link_gain(own, sc.desired_distance(self.state, n), self.cfg.channel)
            ids, dists = sc.interferer_distances(self.state, n)
            gains = np.array([
                ch.link_gain(self.links[(n, int(m))], float(d), self.cfg.channel)
                for m, d in zip(ids, dists)
            ])
            ipv[n] = itf.aggregate_interference(active[ids], gains, p)
            sinr[n] = itf.true_sinr(signal[n], ipv[n], self.noise)
        return signal, ipv, sinr


def calibrate_anchors(cfg: RunConfig, drop: int) -> np.ndarray:
    """Per-subnet quantizer anchor: 1st percentile of true SINR in dB.

    Replays the drop's own realization for calibration_ttis, so the anchor
    depends only on (seed, drop) and the world configuration.
    """
    if cfg.cqi.sinr_min_db is not None:
        return np.full(cfg.scenario.n_subnets, float(cfg.cqi.sinr_min_db))
    world = _World(cfg, drop)
    n = cfg.scenario.n_subnets
    samples = np.empty((cfg.calibration_ttis, n))
    for t in range(cfg.calibration_ttis):
        if t > 0:
            world.step(t)
        _, _, sinr = world.snapshot()
        samples[t] = 10.0 * np.log10(sinr)
    anchors = np.empty(n)
    for sn in range(n):
        anchors[sn] = mt.quantile_sorted(np.sort(samples[:, sn]), 0.01)
    return anchors


@dataclass
class DropStats:
    anchors: list[float]
    cov_violations: int
    updates: int


def run_drop(cfg: RunConfig, drop: int) -> tuple[dict, DropStats]:
    """Simulate one drop and return (columnar records, stats)."""
    anchors = calibrate_anchors(cfg, drop)
    world = _World(cfg, drop)
    scn = cfg.scenario
    n = scn.n_subnets
    noise = world.noise
    esm_rng = _rng(cfg.seed, drop, _S_ESM)
    table = build_table(cfg)

    alpha = pr.correlation_factor([cfg.dssm.doppler_freq] * n, cfg.dssm.tti)
    ekf_states = [pr.make_ekf_state(alpha, noise, cfg.dssm) for _ in range(n)]
    ma_est = [noise] * n
    queues = [cq.ReportQueue(cfg.cqi.report_delay) for _ in range(n)]
    signal_hist = [deque() for _ in range(n)]   # lockstep with the report queue
    truth_hist = [deque(maxlen=2) for _ in range(n)]

    enabled = tuple(cfg.predictors)
    columns: dict[str, list] = {c: [] for c in BASE_COLUMNS}
    for name in enabled:
        for col in PREDICTOR_COLUMNS:
            columns[f"{col}_{name}"] = []

    cov_violations = 0
    updates = 0

    for t in range(cfg.n_ttis):
        if t > 0:
            world.step(t)
        signal, ipv, sinr = world.snapshot()
        for sn in range(n):
            s_now = float(signal[sn])
            i_now = float(ipv[sn])
            g_now = float(sinr[sn])
            g_db = 10.0 * math.log10(g_now)

            measured = cq.esm_compress(g_db, cfg.cqi, esm_rng)
            idx = cq.quantize_cqi(measured, float(anchors[sn]), cfg.cqi)
            delivered = queues[sn].push(idx)
            signal_hist[sn].append(s_now)
            s_meas = None
            if len(signal_hist[sn]) > cfg.cqi.report_delay:
                s_meas = signal_hist[sn].popleft()

            estimates: dict[str, float] = {}
            if "ekf" in enabled:
                if delivered is not None:
                    y_db = cq.dequantize_cqi(delivered, float(anchors[sn]), cfg.cqi)
                    y_lin = 10.0 ** (y_db / 10.0)
                    prior = pr.ekf_predict(ekf_states[sn], cfg.dssm)
                    ekf_states[sn] = pr.ekf_update(
                        ekf_states[sn], prior, y_lin, s_meas, noise, cfg.dssm
                    )
                    updates += 1
                    if ekf_states[sn].cov > prior[1]:
                        cov_violations += 1
                if cfg.dssm.extra_predict_for_delay:
                    estimates["ekf"] = max(0.0, pr.ekf_predict(ekf_states[sn], cfg.dssm)[0])
                else:
                    estimates["ekf"] = ekf_states[sn].est_prev
            if "ma" in enabled:
                if len(truth_hist[sn]) == 2:
                    ma_est[sn] = pr.ma_predict(
                        truth_hist[sn][0], ma_est[sn], cfg.dssm.ma_smoothing
                    )
                estimates["ma"] = ma_est[sn]
            if "genie" in enabled:
                estimates["genie"] = i_now
            truth_hist[sn].append(i_now)

            if t < cfg.warmup_ttis:
                continue
            columns["drop"].append(drop)
            columns["tti"].append(t)
            columns["subnet"].append(sn)
            columns["true_ipv"].append(i_now)
            columns["true_sinr_db"].append(g_db)
            columns["cqi_index"].append(idx)
            for name in enabled:
                est = estimates[name]
                adj_db = la.adjusted_sinr_db(s_now, est, noise)
                mcs, infeasible = la.select_mcs(adj_db, table, cfg.la.target_bler)
                ach = la.achieved_bler(table, mcs, g_db)
                columns[f"pred_ipv_{name}"].append(est)
                columns[f"adjusted_sinr_db_{name}"].append(adj_db)
                columns[f"mcs_{name}"].append(mcs)
                columns[f"achieved_bler_{name}"].append(ach)
                columns[f"infeasible_{name}"].append(int(infeasible))

    frame = {k: np.asarray(v) for k, v in columns.items()}
    stats = DropStats(
        anchors=[float(a) for a in anchors],
        cov_violations=cov_violations,
        updates=updates,
    )
    return frame, stats


def build_table(cfg: RunConfig) -> la.McsTable:
    if cfg.la.table_source == "csv":
        return la.load_mcs_table(cfg.la.table_path)
    return la.build_mcs_table(cfg.la.packet_bits)


def record_columns(predictors: tuple[str, ...]) -> list[str]:
    cols = list(BASE_COLUMNS)
    for name in predictors:
        cols += [f"{c}_{name}" for c in PREDICTOR_COLUMNS]
    return cols


def _format_cell(value) -> str:
    if isinstance(value, (np.floating, float)):
        return repr(float(value))
    return str(int(value))


def write_records_csv(frame: dict, predictors: tuple[str, ...], path: str) -> None:
    cols = record_columns(predictors)
    n = frame["tti"].size
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(cols)
        for i in range(n):
            writer.writerow([_format_cell(frame[c][i]) for c in cols])


def read_records_csv(path: str) -> dict:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = list(reader)
    frame: dict[str, np.ndarray] = {}
    int_cols = {"drop", "tti", "subnet", "cqi_index"}
    for j, col in enumerate(header):
        raw = [row[j] for row in rows]
        if col in int_cols or col.startswith(("mcs_", "infeasible_")):
            frame[col] = np.array([int(v) for v in raw])
        else:
            frame[col] = np.array([float(v) for v in raw])
    return frame


def write_ecdf_csv(path: str, series: dict[str, np.ndarray]) -> None:
    """Exact per-predictor ECDFs, one (predictor, value, cum_prob) row each."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["predictor", "value", "cum_prob"])
        for name, values in series.items():
            if values.size == 0:
                continue
            xs, ps = mt.ecdf(values)
            for x, p in zip(xs, ps):
                writer.writerow([name, repr(float(x)), repr(float(p))])


def run_simulation(cfg: RunConfig, out_dir: str | None = None) -> tuple[dict, dict]:
    """Run every drop, optionally writing the full output set to out_dir."""
    cfg.validate()
    frames = []
    all_stats = []
    for drop in range(cfg.n_drops):
        log.info("drop %d: simulating %d TTIs", drop, cfg.n_ttis)
        frame, stats = run_drop(cfg, drop)
        frames.append(frame)
        all_stats.append(stats)
    merged = {k: np.concatenate([f[k] for f in frames]) for k in frames[0]}

    table = build_table(cfg)
    summary = mt.summarize_frame(merged, table, cfg.la)
    summary["drops"] = [
        {"anchors_db": s.anchors, "cov_violations": s.cov_violations, "updates": s.updates}
        for s in all_stats
    ]
    summary["cov_violations_total"] = int(sum(s.cov_violations for s in all_stats))

    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        write_records_csv(merged, cfg.predictors, os.path.join(out_dir, "records.csv"))
        la.save_mcs_table(table, os.path.join(out_dir, "mcs_table.csv"))
        with open(os.path.join(out_dir, "config.ini"), "w") as fh:
            fh.write(config_to_ini(cfg))
        with open(os.path.join(out_dir, "summary.json"), "w") as fh:
            json.dump(summary, fh, indent=2, sort_keys=True)
            fh.write("\n")
        rae_series = {}
        bler_series = {}
        for name in cfg.predictors:
            vals, _ = mt.rae_values(merged, name)
            rae_series[name] = vals
            feasible = merged[f"infeasible_{name}"] == 0
            bler_series[name] = merged[f"achieved_bler_{name}"][feasible]
        write_ecdf_csv(os.path.join(out_dir, "ecdf_rae.csv"), rae_series)
        write_ecdf_csv(os.path.join(out_dir, "ecdf_bler.csv"), bler_series)
    return merged, summary


def summarize_directory(out_dir: str) -> dict:
    """Recompute summary.json and the ECDF files from stored records."""
    from .config import parse_config

    cfg = parse_config(os.path.join(out_dir, "config.ini"))
    table_path = os.path.join(out_dir, "mcs_table.csv")
    table = la.load_mcs_table(table_path) if os.path.exists(table_path) else build_table(cfg)
    frame = read_records_csv(os.path.join(out_dir, "records.csv"))
    predictors = tuple(mt.predictors_in_frame(frame))
    summary = mt.summarize_frame(frame, table, cfg.la)
    with open(os.path.join(out_dir, "summary.json"), "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    rae_series = {}
    bler_series = {}
    for name in predictors:
        vals, _ = mt.rae_values(frame, name)
        rae_series[name] = vals
        feasible = frame[f"infeasible_{name}"] == 0
        bler_series[name] = frame[f"achieved_bler_{name}"][feasible]
    write_ecdf_csv(os.path.join(out_dir, "ecdf_rae.csv"), rae_series)
    write_ecdf_csv(os.path.join(out_dir, "ecdf_bler.csv"), bler_series)
    return summary
