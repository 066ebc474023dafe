"""Minimal standalone SVG charts.

Hand-written markup keeps the output byte-for-byte reproducible: no
timestamps, no generated ids, fixed number formatting. Colours are picked
from a fixed palette by cluster index.
"""

from __future__ import annotations

from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from .errors import EmptyData, IoError, ShapeMismatch

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
           "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf")
KINDS = ("trajectories", "embedding_scatter", "ch_bars", "mean_curves")

WIDTH, HEIGHT = 640, 420
LEFT, RIGHT, TOP, BOTTOM = 60, 20, 40, 50


def color(index) -> str:
    return PALETTE[int(index) % len(PALETTE)]


def _n(v: float) -> str:
    return f"{v:.2f}"


class _Canvas:
    def __init__(self, xlim, ylim, title: str, xlabel: str, ylabel: str):
        self.x0, self.x1 = self._pad(*xlim)
        self.y0, self.y1 = self._pad(*ylim)
        self.parts = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
            f'viewBox="0 0 {WIDTH} {HEIGHT}">',
            f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>',
            f'<text x="{WIDTH / 2}" y="22" text-anchor="middle" font-family="sans-serif" '
            f'font-size="15">{escape(title)}</text>',
        ]
        self._axes(xlabel, ylabel)

    @staticmethod
    def _pad(lo, hi):
        lo, hi = float(lo), float(hi)
        if hi <= lo:
            lo, hi = lo - 0.5, hi + 0.5
        span = hi - lo
        return lo - 0.04 * span, hi + 0.04 * span

    def px(self, x):
        return LEFT + (np.asarray(x, dtype=float) - self.x0) / (self.x1 - self.x0) * (WIDTH - LEFT - RIGHT)

    def py(self, y):
        return HEIGHT - BOTTOM - (np.asarray(y, dtype=float) - self.y0) / (self.y1 - self.y0) * (HEIGHT - TOP - BOTTOM)

    def _axes(self, xlabel, ylabel):
        x_lo, x_hi = LEFT, WIDTH - RIGHT
        y_lo, y_hi = HEIGHT - BOTTOM, TOP
        self.parts.append(f'<line x1="{x_lo}" y1="{y_lo}" x2="{x_hi}" y2="{y_lo}" stroke="#000000"/>')
        self.parts.append(f'<line x1="{x_lo}" y1="{y_lo}" x2="{x_lo}" y2="{y_hi}" stroke="#000000"/>')
        for v in np.linspace(self.x0, self.x1, 5):
            x = _n(float(self.px(v)))
            self.parts.append(f'<text x="{x}" y="{y_lo + 16}" text-anchor="middle" font-family="sans-serif" '
                              f'font-size="10">{v:.3g}</text>')
        for v in np.linspace(self.y0, self.y1, 5):
            y = _n(float(self.py(v)))
            self.parts.append(f'<text x="{x_lo - 6}" y="{y}" text-anchor="end" font-family="sans-serif" '
                              f'font-size="10">{v:.3g}</text>')
        self.parts.append(f'<text x="{(x_lo + x_hi) / 2}" y="{HEIGHT - 12}" text-anchor="middle" '
                          f'font-family="sans-serif" font-size="12">{escape(xlabel)}</text>')
        self.parts.append(f'<text x="14" y="{(y_lo + y_hi) / 2}" text-anchor="middle" font-family="sans-serif" '
                          f'font-size="12" transform="rotate(-90 14 {(y_lo + y_hi) / 2})">{escape(ylabel)}</text>')

    def polyline(self, xs, ys, stroke, width=1.0, opacity=1.0):
        pts = " ".join(f"{_n(a)},{_n(b)}" for a, b in zip(self.px(xs), self.py(ys)))
        self.parts.append(f'<polyline points="{pts}" fill="none" stroke="{stroke}" '
                          f'stroke-width="{width}" stroke-opacity="{opacity}"/>')

    def marker(self, x, y, fill):
        self.parts.append(f'<circle cx="{_n(float(self.px(x)))}" cy="{_n(float(self.py(y)))}" r="3" '
                          f'fill="{fill}" fill-opacity="0.8"/>')

    def bar(self, x, half_width, y, fill):
        left, right = float(self.px(x - half_width)), float(self.px(x + half_width))
        top, base = float(self.py(y)), float(self.py(max(self.y0, 0.0)))
        self.parts.append(f'<rect x="{_n(left)}" y="{_n(min(top, base))}" width="{_n(right - left)}" '
                          f'height="{_n(abs(base - top))}" fill="{fill}"/>')

    def text(self):
        return "\n".join(self.parts + ["</svg>"]) + "\n"


def _groups(groups, n):
    if groups is None:
        return np.zeros(n, dtype=np.int64)
    groups = np.asarray(groups)
    if groups.shape != (n,):
        raise ShapeMismatch(f"{groups.shape[0]} group labels for {n} items")
    _, idx = np.unique(groups, return_inverse=True)
    return idx


def _trajectories(data) -> str:
    values = np.atleast_2d(np.asarray(data["values"], dtype=float))
    n, t = values.shape
    if n == 0 or t == 0:
        raise EmptyData("no trajectories to draw")
    times = np.asarray(data.get("times", np.arange(t)), dtype=float)
    groups = _groups(data.get("groups"), n)
    c = _Canvas((times.min(), times.max()), (values.min(), values.max()),
                data.get("title", "Trajectories"), "time", "value")
    for row, g in zip(values, groups):
        c.polyline(times, row, color(g), 1.0, 0.6)
    return c.text()


def _scatter(data) -> str:
    pts = np.asarray(data["points"], dtype=float)
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise EmptyData("no points to draw")
    if pts.shape[1] < 2:
        pts = np.column_stack([pts[:, 0], np.zeros(pts.shape[0])])
    groups = _groups(data.get("groups"), pts.shape[0])
    c = _Canvas((pts[:, 0].min(), pts[:, 0].max()), (pts[:, 1].min(), pts[:, 1].max()),
                data.get("title", "Embedding"), "e0", "e1")
    for (x, y), g in zip(pts[:, :2], groups):
        c.marker(x, y, color(g))
    return c.text()


def _bars(data) -> str:
    ks = np.asarray(data["ks"], dtype=float)
    scores = np.asarray(data["scores"], dtype=float)
    if ks.size == 0:
        raise EmptyData("no bars to draw")
    if ks.shape != scores.shape:
        raise ShapeMismatch("one score per k required")
    c = _Canvas((ks.min() - 0.5, ks.max() + 0.5), (min(0.0, scores.min()), scores.max()),
                data.get("title", "Calinski-Harabasz"), "k", "criterion")
    best = int(np.argmax(scores))
    for i, (k, s) in enumerate(zip(ks, scores)):
        c.bar(k, 0.35, s, PALETTE[1] if i == best else PALETTE[0])
    return c.text()


def _means(data) -> str:
    curves = np.atleast_2d(np.asarray(data["curves"], dtype=float))
    if curves.size == 0:
        raise EmptyData("no curves to draw")
    t = curves.shape[1]
    times = np.asarray(data.get("times", np.arange(t)), dtype=float)
    background = data.get("background")
    lo, hi = curves.min(), curves.max()
    if background is not None:
        background = np.atleast_2d(np.asarray(background, dtype=float))
        lo, hi = min(lo, background.min()), max(hi, background.max())
    c = _Canvas((times.min(), times.max()), (lo, hi), data.get("title", "Cluster mean trajectories"),
                "time", "value")
    if background is not None:
        groups = _groups(data.get("groups"), background.shape[0])
        for row, g in zip(background, groups):
            c.polyline(times, row, color(g), 0.6, 0.25)
    for j, row in enumerate(curves):
        c.polyline(times, row, color(j), 3.0, 1.0)
    return c.text()


_RENDERERS = {"trajectories": _trajectories, "embedding_scatter": _scatter,
              "ch_bars": _bars, "mean_curves": _means}


def render_svg(kind: str, data: dict, path) -> Path:
    """Write one chart and return its path.

    ``data`` keys per kind:

    - ``trajectories``: ``values`` (N x T), optional ``groups``, ``times``
    - ``embedding_scatter``: ``points`` (N x 2), optional ``groups``
    - ``ch_bars``: ``ks`` and ``scores``
    - ``mean_curves``: ``curves`` (k x T), optional ``background`` trajectories
      with their ``groups``
    """
    if kind not in _RENDERERS:
        raise ValueError(f"unknown plot kind {kind!r}; choose from {KINDS}")
    text = _RENDERERS[kind](data)
    path = Path(path)
    try:
        with open(path, "w", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc
    return path
