"""Lookup-table primitives: 1-D breakpoint curves and 2-D gridded maps.

Curve CSV format: two columns ``x,value`` with x strictly ascending.
Grid CSV format: first row = speed breakpoints (rad/s), first column =
torque breakpoints (N*m), body = values; bilinear interpolation inside the
hull, queries outside are a configuration error.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = ["Curve1D", "GridMap2D", "TableError"]


class TableError(ValueError):
    """Malformed table file or query outside a gridded domain."""


@dataclass(frozen=True)
class Curve1D:
    """Piecewise-linear curve over ascending breakpoints (clamped at the ends)."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if x.ndim != 1 or x.size < 1 or x.shape != y.shape:
            raise TableError("curve needs matching 1-D breakpoint/value arrays")
        if x.size > 1 and np.any(np.diff(x) <= 0):
            raise TableError("curve breakpoints must be strictly ascending")
        x.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @classmethod
    def constant(cls, value: float) -> "Curve1D":
        return cls(np.array([0.0]), np.array([float(value)]))

    @classmethod
    def affine(cls, intercept: float, slope: float, lo: float = 0.0, hi: float = 1.0) -> "Curve1D":
        return cls(np.array([lo, hi]), np.array([intercept + slope * lo, intercept + slope * hi]))

    @classmethod
    def from_csv(cls, path: str | Path) -> "Curve1D":
        rows = _read_numeric_rows(path, min_fields=2, max_fields=2)
        arr = np.asarray(rows)
        return cls(arr[:, 0], arr[:, 1])

    def __call__(self, x):
        if self.x.size == 1:
            return self.y[0] if np.isscalar(x) else np.full(np.shape(x), self.y[0])
        out = np.interp(x, self.x, self.y)
        return float(out) if np.isscalar(x) else out


@dataclass(frozen=True)
class GridMap2D:
    """Bilinear map over (speed, torque) breakpoints; no extrapolation."""

    speeds: np.ndarray
    torques: np.ndarray
    values: np.ndarray  # shape (len(torques), len(speeds))

    def __post_init__(self):
        s = np.asarray(self.speeds, dtype=float)
        t = np.asarray(self.torques, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if s.ndim != 1 or t.ndim != 1 or v.shape != (t.size, s.size):
            raise TableError("grid map shape mismatch")
        if np.any(np.diff(s) <= 0) or np.any(np.diff(t) <= 0):
            raise TableError("grid breakpoints must be strictly ascending")
        for arr in (s, t, v):
            arr.setflags(write=False)
        object.__setattr__(self, "speeds", s)
        object.__setattr__(self, "torques", t)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_csv(cls, path: str | Path) -> "GridMap2D":
        rows = _read_numeric_rows(path, min_fields=2)
        header = rows[0]
        try:
            body = np.asarray(rows[1:], dtype=float)
        except ValueError as exc:
            raise TableError(f"{path}: ragged grid body") from exc
        if body.ndim != 2:
            raise TableError(f"{path}: ragged grid body")
        # header may or may not carry a padding value in the corner cell
        if len(header) == body.shape[1]:
            speeds = np.asarray(header[1:])
        elif len(header) == body.shape[1] - 1:
            speeds = np.asarray(header)
        else:
            raise TableError(f"{path}: header/body width mismatch")
        return cls(speeds=speeds, torques=body[:, 0], values=body[:, 1:])

    def __call__(self, speed: float, torque: float) -> float:
        s, t = self.speeds, self.torques
        if not (s[0] <= speed <= s[-1] and t[0] <= torque <= t[-1]):
            raise TableError(
                f"query (speed={speed}, torque={torque}) outside gridded domain "
                f"[{s[0]}, {s[-1]}] x [{t[0]}, {t[-1]}]"
            )
        i = min(int(np.searchsorted(s, speed, side="right")) - 1, s.size - 2)
        j = min(int(np.searchsorted(t, torque, side="right")) - 1, t.size - 2)
        i = max(i, 0)
        j = max(j, 0)
        fs = (speed - s[i]) / (s[i + 1] - s[i])
        ft = (torque - t[j]) / (t[j + 1] - t[j])
        v = self.values
        return float(
            v[j, i] * (1 - ft) * (1 - fs)
            + v[j + 1, i] * ft * (1 - fs)
            + v[j, i + 1] * (1 - ft) * fs
            + v[j + 1, i + 1] * ft * fs
        )


def _read_numeric_rows(path: str | Path, min_fields: int, max_fields: int | None = None):
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise TableError(f"cannot read table {path}: {exc}") from exc
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = [p for p in line.split(",")]
        if len(parts) < min_fields or (max_fields is not None and len(parts) > max_fields):
            raise TableError(f"{path}: line {lineno}: unexpected field count {len(parts)}")
        try:
            rows.append([float(p) for p in parts])
        except ValueError as exc:
            raise TableError(f"{path}: line {lineno}: {exc}") from exc
    if not rows:
        raise TableError(f"{path}: no data rows")
    return rows
