"""Channel-quality reporting: SINR estimation error, quantization, delay.

The device estimates an effective SINR (modeled as the true SINR in dB plus a
small Gaussian estimation error), quantizes it with a uniform mid-rise code
over a fixed span, and the index reaches the access point a fixed number of
TTIs later.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np

DEFAULT_LEVELS = 29
DEFAULT_SPAN_DB = 4.8


class IndexOutOfRange(ValueError):
    """Raised when a report index falls outside the code range."""


@dataclass(frozen=True)
class CqiConfig:
    n_levels: int = DEFAULT_LEVELS
    sinr_span_db: float = DEFAULT_SPAN_DB
    # None means the anchor is calibrated per drop and subnet by the harness
    sinr_min_db: float | None = None
    esm_error_std: float = DEFAULT_SPAN_DB / math.sqrt(12.0 * DEFAULT_LEVELS)
    report_delay: int = 1

    @property
    def step_db(self) -> float:
        return self.sinr_span_db / self.n_levels

    def validate(self) -> None:
        if self.n_levels < 2:
            raise ValueError("n_levels must be at least 2")
        if self.sinr_span_db <= 0.0:
            raise ValueError("sinr_span_db must be positive")
        if self.esm_error_std < 0.0:
            raise ValueError("esm_error_std must be nonnegative")
        if self.report_delay < 1:
            raise ValueError("report_delay must be at least one TTI")


def esm_compress(sinr_db: float, cfg: CqiConfig, rng: np.random.Generator) -> float:
    """Effective SINR seen by the device: truth plus estimation error, in dB."""
    return sinr_db + cfg.esm_error_std * float(rng.standard_normal())


def quantize_cqi(value_db: float, sinr_min_db: float, cfg: CqiConfig) -> int:
    """Uniform quantizer index, floored and saturated to [0, n_levels - 1]."""
    idx = math.floor((value_db - sinr_min_db) / cfg.step_db)
    return min(cfg.n_levels - 1, max(0, idx))


def dequantize_cqi(index: int, sinr_min_db: float, cfg: CqiConfig) -> float:
    """Mid-rise reconstruction of a report index, in dB."""
    if not (0 <= index < cfg.n_levels):
        raise IndexOutOfRange(f"index {index} outside [0, {cfg.n_levels - 1}]")
    return sinr_min_db + (index + 0.5) * cfg.step_db


class ReportQueue:
    """Fixed-delay delivery of report indices for one subnet.

    push() enqueues the index measured this TTI and returns the index that is
    delivered now, or None while the pipe is still filling.
    """

    def __init__(self, delay: int):
        if delay < 1:
            raise ValueError("delay must be at least one TTI")
        self._delay = delay
        self._pipe: deque[int] = deque()

    def push(self, index: int) -> int | None:
        self._pipe.append(index)
        if len(self._pipe) > self._delay:
            return self._pipe.popleft()
        return None
