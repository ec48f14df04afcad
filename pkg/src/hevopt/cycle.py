"""Drive-cycle ingestion, validation and summary statistics.

A cycle is a uniformly sampled speed trace; everything downstream (wheel
demand, the DP horizon, the forward rollout) is driven by it.  The bundled
JN-1015 trace lives in ``hevopt/data/jn1015.csv``.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

__all__ = [
    "CycleError",
    "DriveCycle",
    "CycleStats",
    "load_cycle",
    "bundled_cycle_path",
    "compute_stats",
    "accel_at",
]


class CycleError(ValueError):
    """Raised for malformed or physically invalid cycle files."""


@dataclass(frozen=True)
class DriveCycle:
    """Uniformly sampled speed-vs-time trace.

    Attributes
    ----------
    dt : float
        Sample period in seconds.
    speeds : np.ndarray
        Vehicle speed in m/s, one entry per sample, all >= 0.
    name : str
        Label, usually the source file stem.
    """

    dt: float
    speeds: np.ndarray
    name: str = "cycle"

    def __post_init__(self):
        speeds = np.asarray(self.speeds, dtype=float)
        speeds.setflags(write=False)
        object.__setattr__(self, "speeds", speeds)
        if self.dt <= 0:
            raise CycleError(f"sample period must be positive, got {self.dt}")
        if speeds.ndim != 1 or speeds.size < 2:
            raise CycleError("a cycle needs at least 2 speed samples")
        if np.any(speeds < 0):
            k = int(np.argmax(speeds < 0))
            raise CycleError(f"negative speed {speeds[k]} at sample {k}")

    @property
    def n_samples(self) -> int:
        return int(self.speeds.size)

    @property
    def n_stages(self) -> int:
        """Number of DP stages: one per sample interval."""
        return self.n_samples - 1

    def __repr__(self) -> str:
        return (
            f"DriveCycle({self.name!r}, {self.n_samples} samples @ {self.dt} s, "
            f"vmax={self.speeds.max():.2f} m/s)"
        )


@dataclass(frozen=True)
class CycleStats:
    distance: float            # m, rectangular left-endpoint sum
    duration: float            # s, (n_samples - 1) * dt
    max_speed: float           # m/s
    mean_speed_overall: float  # m/s, distance / duration
    mean_speed_moving: float   # m/s, mean over samples with v > 0
    mean_accel: float          # m/s^2, mean of forward differences


def load_cycle(path: str | Path, dt_override: float | None = None) -> DriveCycle:
    """Load and validate a cycle CSV (header ``t_s,v_mps``, one row per sample).

    Timestamps must be uniformly spaced; ``dt_override`` replaces the inferred
    spacing (the timestamp column is still checked for uniformity).  Speeds
    are preserved bit-exact from the file.
    """
    path = Path(path)
    try:
        raw = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise CycleError(f"cannot read cycle file {path}: {exc}") from exc

    lines = raw.splitlines()
    if not lines:
        raise CycleError(f"{path}: empty file")
    header = lines[0].strip()
    if header != "t_s,v_mps":
        raise CycleError(f"{path}: line 1: expected header 't_s,v_mps', got {header!r}")

    times: list[float] = []
    speeds: list[float] = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise CycleError(f"{path}: line {lineno}: expected 2 fields, got {len(parts)}")
        try:
            t = float(parts[0])
            v = float(parts[1])
        except ValueError as exc:
            raise CycleError(f"{path}: line {lineno}: {exc}") from exc
        if v < 0:
            raise CycleError(f"{path}: line {lineno}: negative speed {parts[1].strip()}")
        times.append(t)
        speeds.append(v)

    if len(speeds) < 2:
        raise CycleError(f"{path}: need at least 2 samples, got {len(speeds)}")

    steps = np.diff(np.asarray(times))
    if not np.allclose(steps, steps[0], rtol=0.0, atol=1e-9):
        k = int(np.argmax(~np.isclose(steps, steps[0], rtol=0.0, atol=1e-9)))
        raise CycleError(
            f"{path}: line {k + 3}: non-uniform timestamp spacing "
            f"({steps[k]} s vs {steps[0]} s)"
        )
    dt = float(dt_override) if dt_override is not None else float(steps[0])
    if dt <= 0:
        raise CycleError(f"{path}: sample period must be positive, got {dt}")

    return DriveCycle(dt=dt, speeds=np.asarray(speeds), name=path.stem)


def bundled_cycle_path() -> Path:
    """Path of the JN-1015 trace shipped with the package."""
    return Path(resources.files("hevopt").joinpath("data/jn1015.csv"))


def compute_stats(cycle: DriveCycle) -> CycleStats:
    """Summary statistics; distance uses the rectangular left-endpoint rule."""
    v = cycle.speeds
    n = cycle.n_stages
    duration = n * cycle.dt
    distance = float(np.sum(v[:-1]) * cycle.dt)
    moving = v[v > 0]
    mean_moving = float(moving.mean()) if moving.size else 0.0
    return CycleStats(
        distance=distance,
        duration=duration,
        max_speed=float(v.max()),
        mean_speed_overall=distance / duration,
        mean_speed_moving=mean_moving,
        mean_accel=float((v[-1] - v[0]) / duration),
    )


def accel_at(cycle: DriveCycle, k: int) -> float:
    """Forward-difference acceleration attributed to stage k: (v[k+1]-v[k])/dt."""
    if not 0 <= k < cycle.n_stages:
        raise IndexError(f"stage index {k} out of range [0, {cycle.n_stages})")
    return (cycle.speeds[k + 1] - cycle.speeds[k]) / cycle.dt
