"""Interference-power prediction from delayed, quantized SINR reports.

The aggregate interference power at a device is modeled as a first-order
process whose one-step correlation is tied to the Doppler spread through
J0(2 pi f_d tau), averaged over subnetworks and clamped into (0, 1):

    prior_mean = alpha * est_prev + (1 - alpha) * est_prev2
    prior_cov  = alpha^2 * cov + q

The only measurement is the SINR reconstructed from the last delivered
channel-quality report. With known received signal power S and noise power
sigma_w^2, the measurement map is y = S / (x + sigma_w^2), linearized at the
prior with Jacobian dy/dx = -S / (x + sigma_w^2)^2. Measurement noise fuses
the quantization and mapping error sources as a product of Gaussians,
R = g1 * g2 / (g1 + g2). The scalar Kalman correction then follows the
standard gain/covariance algebra, with the posterior mean clamped at zero
because the state is a power.

Two baselines are provided: an exponential moving average driven by the
ground-truth interference two TTIs back, and a genie that forwards the true
SINR unchanged.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable

ALPHA_CLAMP = 1e-6

# switchover between the power series and the large-argument expansion
_J0_SERIES_LIMIT = 15.0


class DegenerateDenominator(ValueError):
    """Raised when the measurement map is evaluated at a nonpositive total power."""


class NumericalBreakdown(FloatingPointError):
    """Raised when the innovation variance or covariance loses positivity."""


class PredictorKind(enum.Enum):
    EKF = "ekf"
    MOVING_AVERAGE = "ma"
    GENIE = "genie"

    @classmethod
    def from_string(cls, name: str) -> "PredictorKind":
        for kind in cls:
            if kind.value == name.strip().lower():
                return kind
        raise ValueError(f"unknown predictor '{name}'")


@dataclass(frozen=True)
class DssmConfig:
    process_noise_var: float = 0.0042
    quant_error_var: float = 4.8 ** 2 / (12.0 * 29.0)
    cqi_map_error_var: float = 2e-9
    doppler_freq: float = 80.0     # Hz, the filter's assumed Doppler
    tti: float = 1e-4              # s, the filter's assumed report spacing
    process_noise_domain: str = "linear"   # "linear" (watts^2) or "db"
    extra_predict_for_delay: bool = True
    ma_smoothing: float = 0.01

    def validate(self) -> None:
        if self.process_noise_var <= 0.0:
            raise ValueError("process_noise_var must be positive")
        if self.quant_error_var <= 0.0 or self.cqi_map_error_var <= 0.0:
            raise ValueError("measurement error variances must be positive")
        if self.doppler_freq < 0.0:
            raise ValueError("doppler_freq must be nonnegative")
        if self.tti <= 0.0:
            raise ValueError("tti must be positive")
        if self.process_noise_domain not in ("linear", "db"):
            raise ValueError("process_noise_domain must be 'linear' or 'db'")
        if not (0.0 < self.ma_smoothing <= 1.0):
            raise ValueError("ma_smoothing must lie in (0, 1]")


def bessel_j0(x: float) -> float:
    """Bessel function of the first kind, order zero.

    Power series for |x| <= 15, Hankel asymptotic expansion beyond. Absolute
    error stays below 1e-10 over |x| <= 1e3.
    """
    ax = abs(float(x))
    if ax <= _J0_SERIES_LIMIT:
        q = 0.25 * ax * ax
        term = 1.0
        total = 1.0
        for k in range(1, 80):
            term *= -q / (k * k)
            total += term
            if abs(term) < 1e-18 * max(1.0, abs(total)):
                break
        return total

    # asymptotic series: J0 = sqrt(2/(pi x)) * (P cos(chi) - Q sin(chi))
    p_sum = 1.0
    q_sum = 0.0
    term = 1.0
    prev = math.inf
    for m in range(1, 40):
        term *= (2 * m - 1) ** 2 / (8.0 * m * ax)
        if term >= prev:
            break
        prev = term
        if m % 2 == 1:
            sign = -1.0 if (m + 1) // 2 % 2 == 1 else 1.0
            q_sum += sign * term
        else:
            sign = -1.0 if (m // 2) % 2 == 1 else 1.0
            p_sum += sign * term
        if term < 1e-18:
            break
    chi = ax - 0.25 * math.pi
    return math.sqrt(2.0 / (math.pi * ax)) * (
        p_sum * math.cos(chi) - q_sum * math.sin(chi)
    )


def correlation_factor(dopplers: Iterable[float], tti: float) -> float:
    """Average one-step fading correlation across subnetworks, clamped to (0, 1)."""
    values = [bessel_j0(2.0 * math.pi * f * tti) for f in dopplers]
    if not values:
        raise ValueError("need at least one Doppler value")
    alpha = sum(values) / len(values)
    return min(1.0 - ALPHA_CLAMP, max(ALPHA_CLAMP, alpha))


@dataclass(frozen=True)
class EkfState:
    """Filter memory: the two most recent posterior means, covariance, alpha."""

    est_prev: float
    est_prev2: float
    cov: float
    alpha: float


def make_ekf_state(alpha: float, noise_power: float, cfg: DssmConfig) -> EkfState:
    """Warm start at the noise floor with covariance at the process noise level."""
    return EkfState(
        est_prev=noise_power,
        est_prev2=noise_power,
        cov=_process_noise(cfg, noise_power),
        alpha=alpha,
    )


def _process_noise(cfg: DssmConfig, reference: float) -> float:
    if cfg.process_noise_domain == "linear":
        return cfg.process_noise_var
    # dB-domain reading: treat the variance as dB^2 around the current level
    scale = math.log(10.0) / 10.0 * max(reference, 1e-300)
    return scale * scale * cfg.process_noise_var


def ekf_predict(state: EkfState, cfg: DssmConfig) -> tuple[float, float]:
    """One-step prior from the last two posterior means."""
    prior_mean = state.alpha * state.est_prev + (1.0 - state.alpha) * state.est_prev2
    prior_cov = state.alpha ** 2 * state.cov + _process_noise(cfg, state.est_prev)
    return prior_mean, prior_cov


def predicted_sinr(signal_power: float, ipv: float, noise_power: float) -> float:
    """Measurement map: linear SINR expected at a given interference power."""
    total = ipv + noise_power
    if total <= 0.0:
        raise DegenerateDenominator(f"nonpositive total power {total}")
    return signal_power / total


def measurement_jacobian(signal_power: float, ipv: float, noise_power: float) -> float:
    """Derivative of the measurement map with respect to the interference power."""
    total = ipv + noise_power
    if total <= 0.0:
        raise DegenerateDenominator(f"nonpositive total power {total}")
    return -signal_power / (total * total)


def measurement_noise_variance(cfg: DssmConfig) -> float:
    """Fused variance of the quantization and mapping error sources."""
    g1 = cfg.quant_error_var
    g2 = cfg.cqi_map_error_var
    return g1 * g2 / (g1 + g2)


def kalman_update(
    prior_mean: float,
    prior_cov: float,
    innovation: float,
    jacobian: float,
    meas_var: float,
) -> tuple[float, float, float]:
    """Scalar Kalman correction; returns (post_mean, post_cov, gain).

    The posterior covariance is computed as prior_cov * R / S with
    S = j^2 P + R, which equals (1 - gain * jacobian) * prior_cov exactly
    but stays positive and bounded by the prior under rounding even when
    j^2 P dwarfs R.
    """
    if prior_cov < 0.0:
        raise NumericalBreakdown(f"negative prior covariance {prior_cov}")
    s = jacobian * jacobian * prior_cov + meas_var
    if not (s > 0.0) or not math.isfinite(s):
        raise NumericalBreakdown(f"innovation variance {s} is not positive finite")
    gain = prior_cov * jacobian / s
    post_mean = prior_mean + gain * innovation
    post_cov = prior_cov * meas_var / s
    if not math.isfinite(post_mean) or post_cov < 0.0:
        raise NumericalBreakdown("update produced a non-finite or negative state")
    return post_mean, post_cov, gain


def ekf_update(
    state: EkfState,
    prior: tuple[float, float],
    observation_sinr: float,
    signal_power: float,
    noise_power: float,
    cfg: DssmConfig,
) -> EkfState:
    """Fold one delivered SINR observation into the filter.

    The observation is the linear SINR reconstructed from the report; the
    posterior mean is clamped at zero since the state is a power.
    """
    prior_mean, prior_cov = prior
    y_pred = predicted_sinr(signal_power, prior_mean, noise_power)
    jac = measurement_jacobian(signal_power, prior_mean, noise_power)
    r = measurement_noise_variance(cfg)
    post_mean, post_cov, _ = kalman_update(
        prior_mean, prior_cov, observation_sinr - y_pred, jac, r
    )
    return EkfState(
        est_prev=max(0.0, post_mean),
        est_prev2=state.est_prev,
        cov=post_cov,
        alpha=state.alpha,
    )


def ma_predict(delayed_truth: float, prev_estimate: float, smoothing: float = 0.01) -> float:
    """Exponential moving average over the ground-truth power two TTIs back."""
    if delayed_truth < 0.0:
        raise ValueError("interference power must be nonnegative")
    return smoothing * delayed_truth + (1.0 - smoothing) * prev_estimate


def genie_sinr(true_sinr: float) -> float:
    """Perfect-knowledge baseline: forwards the true SINR unchanged."""
    return true_sinr
