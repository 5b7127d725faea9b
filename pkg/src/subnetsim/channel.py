"""Radio channel for factory-hall links: pathloss, shadowing, fading, LOS state.

Large-scale attenuation follows the indoor-factory curves (LOS and the
dense-clutter-low-antenna NLOS variant, the latter lower-bounded by LOS).
Small-scale fading comes from a sum-of-sinusoids generator whose real-part
autocorrelation converges to J0(2 pi f_d tau), with an optional deterministic
rotating phasor for Rician conditions. Shadowing is a Gauss-Markov chain in dB
with an exponential spatial correlation. Each link blends a LOS and an NLOS
branch through a smoothed indicator beta:

    gain = beta * g_los + sqrt(1 - beta^2) * g_nlos

where g_x = |h_x|^2 * 10^(-(PL_x + zeta_x)/10). The blend weights are applied
exactly in this form, they do not sum to one by design.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

BETA_MIN = 0.001
BETA_MAX = 0.999

# clutter parameters for the LOS probability of a dense-clutter factory hall
CLUTTER_DENSITY = 0.6
CLUTTER_SIZE_M = 2.0


@dataclass(frozen=True)
class ChannelConfig:
    carrier_freq: float = 6e9            # Hz, valid 0.5 to 100 GHz
    doppler_freq: float = 80.0           # Hz, maximum Doppler shift
    tti: float = 1e-4                    # s
    shadow_std_los: float = 4.0          # dB
    shadow_std_nlos: float = 7.2         # dB
    decorrelation_distance: float = 10.0  # m
    rician_k: float = 10.0 ** 0.7        # linear ratio, 7 dB
    los_blend_time_constant: float = 50.0  # TTIs
    los_reeval_ttis: int = 100
    n_sinusoids: int = 16

    def validate(self) -> None:
        if not (0.5e9 <= self.carrier_freq <= 100e9):
            raise ValueError("carrier_freq must lie in [0.5, 100] GHz")
        if self.doppler_freq < 0.0:
            raise ValueError("doppler_freq must be nonnegative")
        if self.tti <= 0.0:
            raise ValueError("tti must be positive")
        if self.shadow_std_los < 0.0 or self.shadow_std_nlos < 0.0:
            raise ValueError("shadow standard deviations must be nonnegative")
        if self.decorrelation_distance <= 0.0:
            raise ValueError("decorrelation_distance must be positive")
        if self.rician_k < 0.0:
            raise ValueError("rician_k must be nonnegative")
        if self.los_blend_time_constant < 1.0:
            raise ValueError("los_blend_time_constant must be at least one TTI")
        if self.los_reeval_ttis < 1:
            raise ValueError("los_reeval_ttis must be at least 1")
        if self.n_sinusoids < 8:
            raise ValueError("n_sinusoids below 8 gives a poor Doppler spectrum")


def pathloss_los_db(distance: float, carrier_freq: float) -> float:
    """LOS pathloss in dB; distances below 1 m are clamped to 1 m."""
    d = max(float(distance), 1.0)
    f_ghz = carrier_freq / 1e9
    return 31.84 + 21.5 * math.log10(d) + 19.0 * math.log10(f_ghz)


def pathloss_nlos_db(distance: float, carrier_freq: float) -> float:
    """NLOS pathloss in dB, never below the LOS value at the same distance."""
    d = max(float(distance), 1.0)
    f_ghz = carrier_freq / 1e9
    nlos = 33.0 + 25.5 * math.log10(d) + 20.0 * math.log10(f_ghz)
    return max(nlos, pathloss_los_db(distance, carrier_freq))


def los_probability(
    distance: float,
    clutter_density: float = CLUTTER_DENSITY,
    clutter_size: float = CLUTTER_SIZE_M,
) -> float:
    """Probability that a link of the given length is line of sight.

    Exponential decay exp(-d / k) with k set by the clutter statistics,
    k = -d_clutter / ln(1 - r). Equals 1 at zero distance and decreases
    monotonically.
    """
    if distance < 0.0:
        raise ValueError("distance must be nonnegative")
    k = -clutter_size / math.log(1.0 - clutter_density)
    return math.exp(-distance / k)


class FadingProcess:
    """Sum-of-sinusoids small-scale fading with unit mean power.

    The in-phase and quadrature parts each sum n_sinusoids cosines whose
    Doppler shifts sample the arrival-angle quadrant through a randomized
    grid, so time-averaged statistics match the classical isotropic model:
    autocorrelation of either part approaches J0(2 pi f_d tau) and the
    envelope is Rayleigh. A positive k_factor adds a deterministic phasor
    (specular path) on top of the diffuse sum, scaled so total mean power
    stays at one. With zero Doppler the process is constant in time.

    The process is a closed-form function of the sample index, so arbitrary
    blocks can be generated without stepping through intermediate samples.
    """

    def __init__(
        self,
        doppler_hz: float,
        tti: float,
        n_sinusoids: int,
        rng: np.random.Generator,
        k_factor: float = 0.0,
    ):
        m = int(n_sinusoids)
        if m < 1:
            raise ValueError("need at least one sinusoid")
        if k_factor < 0.0:
            raise ValueError("k_factor must be nonnegative")
        omega = 2.0 * math.pi * doppler_hz
        theta = rng.uniform(-math.pi, math.pi)
        arrival = (2.0 * math.pi * np.arange(1, m + 1) - math.pi + theta) / (4.0 * m)
        self._freq_i = omega * np.cos(arrival)
        self._freq_q = omega * np.sin(arrival)
        self._phase_i = rng.uniform(-math.pi, math.pi, size=m)
        self._phase_q = rng.uniform(-math.pi, math.pi, size=m)
        self._k = float(k_factor)
        # specular parameters are drawn even for k=0 to keep stream layout stable
        specular_angle = rng.uniform(-math.pi, math.pi)
        self._freq_s = omega * math.cos(specular_angle)
        self._phase_s = rng.uniform(-math.pi, math.pi)
        self._scale = 1.0 / math.sqrt(m)
        self._tti = float(tti)
        self.index = 0
        self.value = self._at(0.0)

    def _at(self, t: float) -> complex:
        xc = self._scale * float(np.sum(np.cos(self._freq_i * t + self._phase_i)))
        xs = self._scale * float(np.sum(np.cos(self._freq_q * t + self._phase_q)))
        h = complex(xc, xs)
        if self._k > 0.0:
            phase = self._freq_s * t + self._phase_s
            specular = math.sqrt(self._k) * complex(math.cos(phase), math.sin(phase))
            h = (h + specular) / math.sqrt(1.0 + self._k)
        return h

    def step(self) -> complex:
        self.index += 1
        self.value = self._at(self.index * self._tti)
        return self.value

    def block(self, count: int, start: int = 0, chunk: int = 65536) -> np.ndarray:
        """Complex samples at indices start .. start+count-1, vectorized."""
        out = np.empty(count, dtype=np.complex128)
        done = 0
        while done < count:
            n = min(chunk, count - done)
            t = (start + done + np.arange(n)) * self._tti
            xc = np.cos(np.outer(t, self._freq_i) + self._phase_i).sum(axis=1)
            xs = np.cos(np.outer(t, self._freq_q) + self._phase_q).sum(axis=1)
            h = self._scale * (xc + 1j * xs)
            if self._k > 0.0:
                spec = np.exp(1j * (self._freq_s * t + self._phase_s))
                h = (h + math.sqrt(self._k) * spec) / math.sqrt(1.0 + self._k)
            out[done:done + n] = h
            done += n
        return out


@dataclass
class LinkChannel:
    """Per-link channel state. Value-semantic, nothing is shared across links."""

    los_fading: FadingProcess
    nlos_fading: FadingProcess
    shadow_los: float          # dB
    shadow_nlos: float         # dB
    beta: float
    los_indicator: bool


def init_link(
    distance: float,
    cfg: ChannelConfig,
    fading_rng: np.random.Generator,
    shadow_rng: np.random.Generator,
    los_rng: np.random.Generator,
) -> LinkChannel:
    """Fresh link state: stationary shadowing draws, settled LOS blend."""
    los_fading = FadingProcess(
        cfg.doppler_freq, cfg.tti, cfg.n_sinusoids, fading_rng, k_factor=cfg.rician_k
    )
    nlos_fading = FadingProcess(cfg.doppler_freq, cfg.tti, cfg.n_sinusoids, fading_rng)
    shadow_los = cfg.shadow_std_los * float(shadow_rng.standard_normal())
    shadow_nlos = cfg.shadow_std_nlos * float(shadow_rng.standard_normal())
    indicator = bool(los_rng.uniform() < los_probability(distance))
    beta = BETA_MAX if indicator else BETA_MIN
    return LinkChannel(los_fading, nlos_fading, shadow_los, shadow_nlos, beta, indicator)


def step_fading(link: LinkChannel) -> None:
    link.los_fading.step()
    link.nlos_fading.step()


def _gauss_markov(value: float, std: float, rho: float, rng: np.random.Generator) -> float:
    return rho * value + std * math.sqrt(1.0 - rho * rho) * float(rng.standard_normal())


def step_shadowing(
    link: LinkChannel,
    displacement: float,
    cfg: ChannelConfig,
    rng: np.random.Generator,
) -> None:
    """Advance both shadowing branches by one spatial step.

    Correlation rho = exp(-displacement / decorrelation_distance); the
    stationary standard deviation equals the configured one for any
    displacement sequence. Draw order is LOS first, then NLOS.
    """
    if displacement < 0.0:
        raise ValueError("displacement must be nonnegative")
    rho = math.exp(-displacement / cfg.decorrelation_distance)
    link.shadow_los = _gauss_markov(link.shadow_los, cfg.shadow_std_los, rho, rng)
    link.shadow_nlos = _gauss_markov(link.shadow_nlos, cfg.shadow_std_nlos, rho, rng)


def step_los_state(
    link: LinkChannel,
    distance: float,
    tti: int,
    cfg: ChannelConfig,
    rng: np.random.Generator,
) -> None:
    """Resample the LOS indicator on schedule and slew beta toward it.

    The indicator is redrawn as Bernoulli(los_probability(distance)) every
    los_reeval_ttis; between redraws beta moves monotonically toward the
    indicator with the configured time constant and stays inside
    (BETA_MIN, BETA_MAX).
    """
    if tti % cfg.los_reeval_ttis == 0:
        link.los_indicator = bool(rng.uniform() < los_probability(distance))
    target = 1.0 if link.los_indicator else 0.0
    link.beta += (target - link.beta) / cfg.los_blend_time_constant
    link.beta = min(BETA_MAX, max(BETA_MIN, link.beta))


def link_gain(link: LinkChannel, distance: float, cfg: ChannelConfig) -> float:
    """Instantaneous linear power gain of the link.

    Both branches are always alive; the LOS branch carries weight beta and
    the NLOS branch sqrt(1 - beta^2).
    """
    pl_los = pathloss_los_db(distance, cfg.carrier_freq)
    pl_nlos = pathloss_nlos_db(distance, cfg.carrier_freq)
    g_los = abs(link.los_fading.value) ** 2 * 10.0 ** (-(pl_los + link.shadow_los) / 10.0)
    g_nlos = abs(link.nlos_fading.value) ** 2 * 10.0 ** (-(pl_nlos + link.shadow_nlos) / 10.0)
    return link.beta * g_los + math.sqrt(1.0 - link.beta * link.beta) * g_nlos
