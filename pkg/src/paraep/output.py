"""Deterministic CSV and SVG emission with provenance headers.

Every file starts with a comment block recording the artifact version, the
resolved configuration hash and the seed, so identical configurations always
produce byte-identical outputs (no timestamps anywhere).  Floats are written
with shortest round-trip precision.
"""

from __future__ import annotations

import hashlib
import json
import math
from pathlib import Path

__version__ = "0.1.0"

__all__ = ["config_hash", "provenance_lines", "write_csv", "write_svg", "fmt"]


def config_hash(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def fmt(value) -> str:
    """Render a CSV cell: shortest round-trip decimal for floats."""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):  # includes numpy float scalars
        value = float(value)
        if math.isnan(value):
            return "nan"
        return repr(value)
    if hasattr(value, "item"):  # remaining numpy scalars (ints, bools)
        return fmt(value.item())
    return str(value)


def provenance_lines(experiment: str, config: dict, seed=None):
    cfg = json.dumps(config, sort_keys=True, separators=(",", ":"), default=str)
    return [
        f"# paraep {__version__} experiment={experiment}",
        f"# config_hash={config_hash(config)} seed={seed if seed is not None else 'none'}",
        f"# config={cfg}",
    ]


def write_csv(path, columns, rows, experiment: str, config: dict, seed=None,
              trailer=()):
    """Write one CSV file; ``trailer`` lines become closing '# ' comments."""
    path = Path(path)
    lines = provenance_lines(experiment, config, seed)
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(fmt(v) for v in row))
    for t in trailer:
        lines.append(f"# {t}")
    path.write_text("\n".join(lines) + "\n", newline="\n")
    return path


def _ticks(lo, hi, n=5):
    if not (math.isfinite(lo) and math.isfinite(hi)) or hi <= lo:
        return [lo]
    step = (hi - lo) / (n - 1)
    return [lo + i * step for i in range(n)]


def write_svg(path, series, title="", xlabel="", ylabel="",
              width=720, height=480):
    """Minimal standalone polyline plot (no external assets).

    ``series`` is a list of (label, x_array, y_array) triples.
    """
    path = Path(path)
    margin = 60.0
    xs = [float(x) for _, xa, _ in series for x in xa if math.isfinite(float(x))]
    ys = [float(y) for _, _, ya in series for y in ya if math.isfinite(float(y))]
    if not xs or not ys:
        xs, ys = [0.0, 1.0], [0.0, 1.0]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0

    def px(x):
        return margin + (x - x_lo) / (x_hi - x_lo) * (width - 2 * margin)

    def py(y):
        return height - margin - (y - y_lo) / (y_hi - y_lo) * (height - 2 * margin)

    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
              "#8c564b", "#17becf", "#7f7f7f"]
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2}" y="24" text-anchor="middle" font-size="16">{title}</text>',
        f'<line x1="{margin}" y1="{height - margin}" x2="{width - margin}" '
        f'y2="{height - margin}" stroke="black"/>',
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" y2="{height - margin}" '
        'stroke="black"/>',
        f'<text x="{width / 2}" y="{height - 12}" text-anchor="middle" '
        f'font-size="12">{xlabel}</text>',
        f'<text x="16" y="{height / 2}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 16 {height / 2})">{ylabel}</text>',
    ]
    for t in _ticks(x_lo, x_hi):
        parts.append(f'<text x="{px(t):.1f}" y="{height - margin + 16:.1f}" '
                     f'text-anchor="middle" font-size="10">{t:.4g}</text>')
    for t in _ticks(y_lo, y_hi):
        parts.append(f'<text x="{margin - 6:.1f}" y="{py(t) + 3:.1f}" '
                     f'text-anchor="end" font-size="10">{t:.4g}</text>')
    for k, (label, xa, ya) in enumerate(series):
        pts = " ".join(f"{px(float(x)):.2f},{py(float(y)):.2f}"
                       for x, y in zip(xa, ya)
                       if math.isfinite(float(x)) and math.isfinite(float(y)))
        color = colors[k % len(colors)]
        parts.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" '
                     f'points="{pts}"/>')
        parts.append(f'<text x="{width - margin + 4}" y="{margin + 14 * k + 10}" '
                     f'font-size="10" fill="{color}">{label}</text>')
    parts.append("</svg>")
    path.write_text("\n".join(parts) + "\n", newline="\n")
    return path
