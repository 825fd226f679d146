"""Minimal deterministic SVG output: benchmark bar charts and path overlays.

Hand-rolled on purpose: no plotting dependency, fixed float formatting, so
two runs over the same inputs produce identical bytes.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

PALETTE = ("#e8801a", "#c8a02a", "#1a7ed8", "#5aa469", "#9459c8", "#d85a8a")


def _fmt(v: float) -> str:
    return f"{v:.3f}".rstrip("0").rstrip(".")


def _polyline(points: np.ndarray, color: str, width: float, opacity: float = 1.0) -> str:
    coords = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in points)
    return (
        f'<polyline points="{coords}" fill="none" stroke="{color}" '
        f'stroke-width="{_fmt(width)}" stroke-opacity="{_fmt(opacity)}" '
        f'stroke-linecap="round" stroke-linejoin="round"/>'
    )


def write_bar_chart(values: dict[str, float], title: str, path) -> None:
    """Vertical bars for per-mode scores in [0, 1]."""
    width, height = 480, 300
    margin, base = 50, 250
    bar_w = (width - 2 * margin) / max(len(values), 1)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2}" y="24" text-anchor="middle" font-family="sans-serif" '
        f'font-size="15">{title}</text>',
        f'<line x1="{margin}" y1="{base}" x2="{width - margin}" y2="{base}" '
        f'stroke="#333" stroke-width="1"/>',
    ]
    for tick in (0.0, 0.25, 0.5, 0.75, 1.0):
        y = base - tick * 200
        parts.append(
            f'<text x="{margin - 8}" y="{_fmt(y + 4)}" text-anchor="end" '
            f'font-family="sans-serif" font-size="10">{_fmt(tick)}</text>'
        )
        parts.append(
            f'<line x1="{margin}" y1="{_fmt(y)}" x2="{width - margin}" y2="{_fmt(y)}" '
            f'stroke="#ddd" stroke-width="0.5"/>'
        )
    for i, (name, value) in enumerate(values.items()):
        x = margin + i * bar_w + bar_w * 0.15
        h = max(0.0, min(1.0, value)) * 200
        color = PALETTE[i % len(PALETTE)]
        parts.append(
            f'<rect x="{_fmt(x)}" y="{_fmt(base - h)}" width="{_fmt(bar_w * 0.7)}" '
            f'height="{_fmt(h)}" fill="{color}"/>'
        )
        parts.append(
            f'<text x="{_fmt(x + bar_w * 0.35)}" y="{base + 16}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="11">{name}</text>'
        )
        parts.append(
            f'<text x="{_fmt(x + bar_w * 0.35)}" y="{_fmt(base - h - 6)}" '
            f'text-anchor="middle" font-family="sans-serif" font-size="10">'
            f"{value:.3f}</text>"
        )
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n", encoding="utf-8")


def write_path_overlay(
    query_deltas: np.ndarray,
    matched_deltas: list[tuple[str, np.ndarray]],
    path,
    title: str = "query vs retrieved spans",
) -> None:
    """Draw the query's motion shape over the top matched spans.

    Every delta sequence is integrated from the origin so only shape is
    compared, mirroring how retrieval sees the data.
    """
    curves = [np.vstack([np.zeros(2), np.cumsum(query_deltas, axis=0)])]
    for _, deltas in matched_deltas:
        curves.append(np.vstack([np.zeros(2), np.cumsum(deltas, axis=0)]))
    allpts = np.vstack(curves)
    lo = allpts.min(axis=0)
    hi = allpts.max(axis=0)
    span = np.maximum(hi - lo, 1e-9)
    width, height, margin = 520, 420, 40
    scale = min((width - 2 * margin) / span[0], (height - 2 * margin - 30) / span[1])

    def to_px(c: np.ndarray) -> np.ndarray:
        return (c - lo) * scale + np.asarray([margin, margin + 30])

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2}" y="22" text-anchor="middle" font-family="sans-serif" '
        f'font-size="14">{title}</text>',
    ]
    for i, (name, _) in enumerate(matched_deltas):
        color = PALETTE[(i + 1) % len(PALETTE)]
        parts.append(_polyline(to_px(curves[i + 1]), color, 1.5, opacity=0.6))
        parts.append(
            f'<text x="{width - margin}" y="{44 + 14 * i}" text-anchor="end" '
            f'font-family="sans-serif" font-size="10" fill="{color}">{name}</text>'
        )
    parts.append(_polyline(to_px(curves[0]), "#111111", 3.0))
    parts.append(
        f'<text x="{margin}" y="44" font-family="sans-serif" font-size="10" '
        f'fill="#111111">query</text>'
    )
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n", encoding="utf-8")
