"""Minimal dependency-free SVG line plots for the CLI reports.

Hand-rolled on purpose: output bytes depend only on the data, which keeps
the manifest-reproducibility guarantee (re-running a manifest reproduces
every artifact byte for byte) independent of plotting-library versions.
"""

from __future__ import annotations

from pathlib import Path

__all__ = ["plot_series"]

_W, _H = 800, 420
_ML, _MR, _MT, _MB = 64, 16, 32, 44
_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd")


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def plot_series(
    path: str | Path,
    title: str,
    xlabel: str,
    ylabel: str,
    x,
    series,                 # iterable of (label, values)
    hlines=(),              # horizontal guide lines (e.g. bounds)
) -> None:
    x = list(map(float, x))
    series = [(label, list(map(float, ys))) for label, ys in series]
    ys_all = [v for _, ys in series for v in ys] + [float(h) for h in hlines]
    x_lo, x_hi = min(x), max(x)
    y_lo, y_hi = min(ys_all), max(ys_all)
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0
    pad = 0.05 * (y_hi - y_lo)
    y_lo -= pad
    y_hi += pad
    pw = _W - _ML - _MR
    ph = _H - _MT - _MB

    def sx(v: float) -> str:
        return _fmt(_ML + (v - x_lo) / (x_hi - x_lo) * pw)

    def sy(v: float) -> str:
        return _fmt(_MT + (y_hi - v) / (y_hi - y_lo) * ph)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}" font-family="sans-serif" font-size="12">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<rect x="{_ML}" y="{_MT}" width="{pw}" height="{ph}" fill="none" stroke="#444"/>',
        f'<text x="{_W // 2}" y="20" text-anchor="middle" font-size="14">{title}</text>',
        f'<text x="{_ML + pw / 2:.6g}" y="{_H - 8}" text-anchor="middle">{xlabel}</text>',
        f'<text x="14" y="{_MT + ph / 2:.6g}" text-anchor="middle" '
        f'transform="rotate(-90 14 {_MT + ph / 2:.6g})">{ylabel}</text>',
    ]
    # axis ticks: 5 per axis
    for i in range(5):
        xv = x_lo + i * (x_hi - x_lo) / 4
        yv = y_lo + i * (y_hi - y_lo) / 4
        parts.append(
            f'<text x="{sx(xv)}" y="{_H - _MB + 16}" text-anchor="middle">{_fmt(xv)}</text>'
        )
        parts.append(
            f'<text x="{_ML - 6}" y="{sy(yv)}" text-anchor="end" dominant-baseline="middle">'
            f"{_fmt(yv)}</text>"
        )
    for h in hlines:
        parts.append(
            f'<line x1="{_ML}" y1="{sy(float(h))}" x2="{_ML + pw}" y2="{sy(float(h))}" '
            f'stroke="#888" stroke-dasharray="6 4"/>'
        )
    for idx, (label, ys) in enumerate(series):
        color = _COLORS[idx % len(_COLORS)]
        pts = " ".join(f"{sx(xv)},{sy(yv)}" for xv, yv in zip(x, ys))
        parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>'
        )
        parts.append(
            f'<text x="{_ML + pw - 6}" y="{_MT + 16 + 16 * idx}" text-anchor="end" '
            f'fill="{color}">{label}</text>'
        )
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n", encoding="utf-8")
