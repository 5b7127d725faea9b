"""MCS table construction and outer-loop-free link adaptation.

Each modulation-and-coding scheme is summarized by its spectral efficiency;
transmitting a k-bit packet at efficiency SE occupies n = ceil(k / SE)
channel uses. Error probability over the AWGN-equivalent channel follows the
normal approximation for finite blocklength:

    BLER(gamma) = Q( (n C(gamma) - k + 0.5 log2 n) / sqrt(n V(gamma)) )

with capacity C = log2(1 + gamma) and dispersion
V = gamma (gamma + 2) / (gamma + 1)^2 * (log2 e)^2. Curves are tabulated on a
fixed SINR grid in dB and interpolated linearly; outside the grid the edge
value applies. Selection picks the highest-efficiency entry whose
interpolated BLER meets the target, falling back to the lowest entry with an
infeasible flag when none does.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

GRID_MIN_DB = -20.0
GRID_MAX_DB = 40.0
GRID_POINTS = 601

# (modulation order, code rate x 1024) pairs of the 29-entry low-efficiency
# table used for high-reliability traffic; efficiency = order * rate / 1024
MCS_RATE_PAIRS: tuple[tuple[int, int], ...] = (
    (2, 30), (2, 40), (2, 50), (2, 64), (2, 78), (2, 99), (2, 120),
    (2, 157), (2, 193), (2, 251), (2, 308), (2, 379), (2, 449), (2, 526),
    (2, 602), (4, 340), (4, 378), (4, 434), (4, 490), (4, 553), (4, 616),
    (6, 438), (6, 466), (6, 517), (6, 567), (6, 616), (6, 666), (6, 719),
    (6, 772),
)

DEFAULT_EFFICIENCIES: tuple[float, ...] = tuple(
    order * rate / 1024.0 for order, rate in MCS_RATE_PAIRS
)

LOG2_E = math.log2(math.e)


class ParseError(ValueError):
    """Raised when an MCS table file is malformed."""


class MonotonicityViolation(ValueError):
    """Raised when BLER curves or efficiencies are out of order."""


@dataclass(frozen=True)
class LaConfig:
    target_bler: float = 1e-5
    packet_bits: int = 160
    table_source: str = "analytic"   # "analytic" or "csv"
    table_path: str | None = None

    def validate(self) -> None:
        if not (0.0 < self.target_bler < 1.0):
            raise ValueError("target_bler must lie in (0, 1)")
        if self.packet_bits < 1:
            raise ValueError("packet_bits must be positive")
        if self.table_source not in ("analytic", "csv"):
            raise ValueError("table_source must be 'analytic' or 'csv'")
        if self.table_source == "csv" and not self.table_path:
            raise ValueError("table_source 'csv' requires table_path")


@dataclass(frozen=True)
class McsEntry:
    mcs_id: int
    spectral_efficiency: float
    bler: np.ndarray           # aligned with the table grid


@dataclass(frozen=True)
class McsTable:
    sinr_grid_db: np.ndarray   # ascending, shape (G,)
    entries: tuple[McsEntry, ...]   # sorted by spectral efficiency ascending
    curves: np.ndarray = field(repr=False, default=None)  # shape (E, G)

    def row_of(self, mcs_id: int) -> int:
        for i, e in enumerate(self.entries):
            if e.mcs_id == mcs_id:
                return i
        raise KeyError(f"unknown mcs_id {mcs_id}")

    def __len__(self) -> int:
        return len(self.entries)


def qfunc(z: float) -> float:
    """Gaussian tail probability Q(z)."""
    return 0.5 * math.erfc(z / math.sqrt(2.0))


def bler_normal_approx(gamma: float, n: int, k: int) -> float:
    """Block error probability of a (n, k) code at linear SINR gamma."""
    if gamma < 0.0:
        raise ValueError("gamma must be nonnegative")
    if gamma == 0.0:
        return 1.0
    capacity = math.log2(1.0 + gamma)
    dispersion = gamma * (gamma + 2.0) / ((gamma + 1.0) ** 2) * LOG2_E ** 2
    numerator = n * capacity - k + 0.5 * math.log2(n)
    return qfunc(numerator / math.sqrt(n * dispersion))


def _assemble(
    grid: np.ndarray, ids: list[int], effs: list[float], curves: np.ndarray
) -> McsTable:
    order = np.argsort(np.asarray(effs), kind="stable")
    effs_sorted = [effs[i] for i in order]
    for a, b in zip(effs_sorted, effs_sorted[1:]):
        if not (a < b):
            raise MonotonicityViolation("spectral efficiencies must ascend strictly")
    curves_sorted = curves[order]
    diffs = np.diff(curves_sorted, axis=1)
    if np.any(diffs > 0.0):
        raise MonotonicityViolation("BLER curves must be non-increasing in SINR")
    entries = tuple(
        McsEntry(int(ids[i]), float(effs[i]), curves[i]) for i in order
    )
    return McsTable(sinr_grid_db=grid, entries=entries, curves=curves_sorted)


def build_mcs_table(
    packet_bits: int = 160,
    efficiencies: tuple[float, ...] = DEFAULT_EFFICIENCIES,
) -> McsTable:
    """Tabulate analytic BLER curves for every efficiency on the fixed grid."""
    grid = np.linspace(GRID_MIN_DB, GRID_MAX_DB, GRID_POINTS)
    gammas = 10.0 ** (grid / 10.0)
    ids = list(range(len(efficiencies)))
    effs = [float(se) for se in efficiencies]
    if any(se <= 0.0 for se in effs):
        raise ValueError("spectral efficiencies must be positive")
    curves = np.empty((len(effs), grid.size))
    for i, se in enumerate(effs):
        n = math.ceil(packet_bits / se)
        curves[i] = [bler_normal_approx(g, n, packet_bits) for g in gammas]
    return _assemble(grid, ids, effs, curves)


def save_mcs_table(table: McsTable, path: str) -> None:
    """Write the table as CSV rows (mcs_id, spectral_efficiency, sinr_db, bler)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["mcs_id", "spectral_efficiency", "sinr_db", "bler"])
        for entry in table.entries:
            for x, b in zip(table.sinr_grid_db, entry.bler):
                writer.writerow(
                    [entry.mcs_id, repr(entry.spectral_efficiency), repr(float(x)), repr(float(b))]
                )


def load_mcs_table(path: str) -> McsTable:
    """Read a table written by save_mcs_table or an external tool.

    Every entry must share one ascending SINR grid; curves must be
    non-increasing and efficiencies strictly ascending.
    """
    per_id: dict[int, tuple[float, list[float], list[float]]] = {}
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header != ["mcs_id", "spectral_efficiency", "sinr_db", "bler"]:
                raise ParseError(f"unexpected header {header!r}")
            for lineno, row in enumerate(reader, start=2):
                if len(row) != 4:
                    raise ParseError(f"line {lineno}: expected 4 fields, got {len(row)}")
                try:
                    mcs_id = int(row[0])
                    se = float(row[1])
                    x = float(row[2])
                    b = float(row[3])
                except ValueError as exc:
                    raise ParseError(f"line {lineno}: {exc}") from exc
                if not (0.0 <= b <= 1.0):
                    raise ParseError(f"line {lineno}: bler {b} outside [0, 1]")
                slot = per_id.setdefault(mcs_id, (se, [], []))
                if slot[0] != se:
                    raise ParseError(f"line {lineno}: inconsistent efficiency for id {mcs_id}")
                slot[1].append(x)
                slot[2].append(b)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    if not per_id:
        raise ParseError("table file holds no rows")

    ids = list(per_id)
    first_grid = per_id[ids[0]][1]
    if any(b <= a for a, b in zip(first_grid, first_grid[1:])):
        raise ParseError("SINR grid must ascend strictly")
    for mcs_id in ids:
        if per_id[mcs_id][1] != first_grid:
            raise ParseError(f"id {mcs_id} uses a different SINR grid")
    grid = np.array(first_grid)
    effs = [per_id[i][0] for i in ids]
    curves = np.array([per_id[i][2] for i in ids])
    return _assemble(grid, ids, effs, curves)


def _interp_rows(table: McsTable, sinr_db: float) -> np.ndarray:
    """Interpolated BLER of every entry at one SINR; exact on grid nodes."""
    grid = table.sinr_grid_db
    if sinr_db <= grid[0]:
        return table.curves[:, 0]
    if sinr_db >= grid[-1]:
        return table.curves[:, -1]
    j = int(np.searchsorted(grid, sinr_db, side="right")) - 1
    t = (sinr_db - grid[j]) / (grid[j + 1] - grid[j])
    return table.curves[:, j] * (1.0 - t) + table.curves[:, j + 1] * t


def select_mcs(sinr_db: float, table: McsTable, target_bler: float) -> tuple[int, bool]:
    """Pick the highest-efficiency entry meeting the target at this SINR.

    Returns (mcs_id, infeasible). When nothing qualifies the lowest-efficiency
    entry is returned with infeasible = True.
    """
    blers = _interp_rows(table, sinr_db)
    qualified = np.flatnonzero(blers <= target_bler)
    if qualified.size:
        return table.entries[int(qualified[-1])].mcs_id, False
    return table.entries[0].mcs_id, True


def adjusted_sinr_db(signal_power: float, pred_ipv: float, noise_power: float) -> float:
    """SINR the scheduler assumes given a predicted interference power."""
    if signal_power <= 0.0:
        raise ValueError("signal power must be positive")
    denom = max(pred_ipv, 0.0) + noise_power
    if denom <= 0.0:
        raise ValueError("total interference plus noise must be positive")
    return 10.0 * math.log10(signal_power / denom)


def achieved_bler(table: McsTable, mcs_id: int, true_sinr_db: float) -> float:
    """BLER the selected entry actually suffers at the true SINR."""
    row = table.row_of(mcs_id)
    return float(_interp_rows(table, true_sinr_db)[row])
