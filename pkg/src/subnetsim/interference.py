"""Traffic activity, thermal noise, and interference aggregation."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

THERMAL_NOISE_DBM_PER_HZ = -174.0


@dataclass(frozen=True)
class TrafficConfig:
    activity_prob: float = 0.5   # per-subnet ON probability, redrawn each TTI
    tx_power: float = 1.0        # W

    def validate(self) -> None:
        if not (0.0 <= self.activity_prob <= 1.0):
            raise ValueError("activity_prob must lie in [0, 1]")
        if self.tx_power <= 0.0:
            raise ValueError("tx_power must be positive")


@dataclass(frozen=True)
class NoiseConfig:
    noise_figure: float = 10.0   # dB
    bandwidth: float = 50e6      # Hz

    def validate(self) -> None:
        if self.bandwidth <= 0.0:
            raise ValueError("bandwidth must be positive")
        if self.noise_figure < 0.0:
            raise ValueError("noise_figure must be nonnegative")


def thermal_noise_power(cfg: NoiseConfig) -> float:
    """Receiver noise power in watts over the configured bandwidth."""
    dbm = THERMAL_NOISE_DBM_PER_HZ + 10.0 * math.log10(cfg.bandwidth) + cfg.noise_figure
    return 10.0 ** (dbm / 10.0) * 1e-3


def sample_traffic(n_subnets: int, cfg: TrafficConfig, rng: np.random.Generator) -> np.ndarray:
    """One independent ON/OFF draw per subnet for the current TTI."""
    return rng.uniform(size=n_subnets) < cfg.activity_prob


def aggregate_interference(active: np.ndarray, gains: np.ndarray, tx_power: float) -> float:
    """Sum of received powers from the active co-channel transmitters.

    `active` and `gains` are aligned per interferer; idle entries contribute
    exactly zero.
    """
    if active.shape != gains.shape:
        raise ValueError("active mask and gains must align")
    return float(tx_power * np.sum(gains[active]))


def true_sinr(signal: float, interference: float, noise: float) -> float:
    """Linear SINR; noise must be positive so the ratio is always finite."""
    if noise <= 0.0:
        raise ValueError("noise power must be positive")
    if signal < 0.0 or interference < 0.0:
        raise ValueError("powers must be nonnegative")
    return signal / (interference + noise)
