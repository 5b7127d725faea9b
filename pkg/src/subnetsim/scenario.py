"""Deployment geometry and mobility for a factory-floor subnetwork layout.

Subnetworks (one access point plus one device each) are dropped uniformly in a
square service area with a minimum pairwise separation, assigned to sub-bands
so that each band carries the same number of co-channel subnetworks, and moved
with a random-direction model: straight travel at constant speed, reflection
at the area boundary, and a fresh heading drawn only when a reflection occurs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

TWO_PI = 2.0 * math.pi


class PlacementInfeasible(RuntimeError):
    """Raised when rejection sampling cannot satisfy the separation constraint."""


@dataclass(frozen=True)
class ScenarioConfig:
    n_subnets: int = 16
    area_side: float = 20.0          # m, square service area
    min_separation: float = 4.0      # m, AP to AP at deployment time
    cell_radius: float = 2.0         # m, device stays within this radius of its AP
    speed: float = 2.0               # m/s
    tti: float = 1e-4                # s
    n_subbands: int = 4
    ues_per_subnet: int = 1
    max_placement_attempts: int = 1_000_000

    def validate(self) -> None:
        if self.n_subnets <= 0:
            raise ValueError("n_subnets must be positive")
        if self.n_subbands <= 0 or self.n_subnets % self.n_subbands != 0:
            raise ValueError("n_subnets must divide evenly into n_subbands groups")
        if not (0.0 < self.cell_radius):
            raise ValueError("cell_radius must be positive")
        if self.min_separation < 0.0 or self.min_separation > self.area_side:
            raise ValueError("min_separation must lie in [0, area_side]")
        if self.area_side <= 0.0:
            raise ValueError("area_side must be positive")
        if self.speed < 0.0:
            raise ValueError("speed must be nonnegative")
        if self.tti <= 0.0:
            raise ValueError("tti must be positive")
        if self.ues_per_subnet != 1:
            raise ValueError("only one device per subnetwork is supported")


@dataclass(frozen=True)
class SubnetPose:
    """Pose of one subnetwork: AP position, travel heading, rigid device offset."""

    position: tuple[float, float]
    heading: float
    ue_offset: tuple[float, float]


@dataclass
class ScenarioState:
    """Positions are AP coordinates, shape (N, 2); devices ride rigidly."""

    positions: np.ndarray
    headings: np.ndarray
    ue_offsets: np.ndarray
    subband: np.ndarray        # group index per subnet, shape (N,)

    def pose(self, n: int) -> SubnetPose:
        return SubnetPose(
            position=(float(self.positions[n, 0]), float(self.positions[n, 1])),
            heading=float(self.headings[n]),
            ue_offset=(float(self.ue_offsets[n, 0]), float(self.ue_offsets[n, 1])),
        )

    def ue_position(self, n: int) -> np.ndarray:
        return self.positions[n] + self.ue_offsets[n]


def _sample_disc(radius: float, rng: np.random.Generator) -> np.ndarray:
    # sqrt transform gives a uniform density over the disc
    r = radius * math.sqrt(rng.uniform())
    phi = rng.uniform(0.0, TWO_PI)
    return np.array([r * math.cos(phi), r * math.sin(phi)])


def init_deployment(cfg: ScenarioConfig, rng: np.random.Generator) -> ScenarioState:
    """Draw a deployment satisfying the minimum AP separation.

    Rejection sampling over uniform candidates; raises PlacementInfeasible once
    the global attempt budget is exhausted. Separation is enforced at placement
    time only, mobility may later bring APs closer.
    """
    cfg.validate()
    placed: list[np.ndarray] = []
    attempts = 0
    while len(placed) < cfg.n_subnets:
        if attempts >= cfg.max_placement_attempts:
            raise PlacementInfeasible(
                f"placed {len(placed)}/{cfg.n_subnets} subnets after {attempts} attempts"
            )
        candidate = rng.uniform(0.0, cfg.area_side, size=2)
        attempts += 1
        ok = all(
            float(np.hypot(*(candidate - p))) >= cfg.min_separation for p in placed
        )
        if ok:
            placed.append(candidate)

    positions = np.array(placed)
    headings = rng.uniform(0.0, TWO_PI, size=cfg.n_subnets)
    ue_offsets = np.array([_sample_disc(cfg.cell_radius, rng) for _ in range(cfg.n_subnets)])

    group_size = cfg.n_subnets // cfg.n_subbands
    order = rng.permutation(cfg.n_subnets)
    subband = np.empty(cfg.n_subnets, dtype=np.int64)
    for g in range(cfg.n_subbands):
        subband[order[g * group_size:(g + 1) * group_size]] = g

    return ScenarioState(positions, headings, ue_offsets, subband)


def _reflect(value: float, limit: float) -> tuple[float, bool]:
    reflected = False
    while value < 0.0 or value > limit:
        if value < 0.0:
            value = -value
        else:
            value = 2.0 * limit - value
        reflected = True
    return value, reflected


def step_mobility(
    state: ScenarioState, cfg: ScenarioConfig, rng: np.random.Generator
) -> ScenarioState:
    """Advance every subnetwork by one TTI of straight travel.

    Boundary hits mirror the overshoot back into the area and redraw that
    subnetwork's heading uniformly; headings are otherwise preserved.
    """
    step = cfg.speed * cfg.tti
    positions = state.positions.copy()
    headings = state.headings.copy()
    for n in range(positions.shape[0]):
        x = positions[n, 0] + step * math.cos(headings[n])
        y = positions[n, 1] + step * math.sin(headings[n])
        x, rx = _reflect(x, cfg.area_side)
        y, ry = _reflect(y, cfg.area_side)
        positions[n, 0] = x
        positions[n, 1] = y
        if rx or ry:
            headings[n] = rng.uniform(0.0, TWO_PI)
    return ScenarioState(positions, headings, state.ue_offsets, state.subband)


def co_channel_interferers(state: ScenarioState, n: int) -> np.ndarray:
    """Ids of subnets sharing subnet n's sub-band, excluding n itself."""
    same = np.flatnonzero(state.subband == state.subband[n])
    return same[same != n]


def desired_distance(state: ScenarioState, n: int) -> float:
    """AP to device distance inside subnet n."""
    return float(np.hypot(*(state.ue_offsets[n])))


def interferer_distances(state: ScenarioState, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Distances from subnet n's device to every co-channel AP.

    Returns (ids, distances) with ids sorted ascending so downstream RNG
    consumption is order-stable.
    """
    ids = co_channel_interferers(state, n)
    ue = state.positions[n] + state.ue_offsets[n]
    deltas = state.positions[ids] - ue
    return ids, np.hypot(deltas[:, 0], deltas[:, 1])
