"""Small deterministic SVG 1.1 writer for the study figures.

No timestamps, no randomness: the same data always serialises to the same
bytes. Coordinates are mapped from data space into a fixed-size canvas with
margins; the y axis points up.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field


def _fmt(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"non-finite coordinate {x!r} in SVG output")
    s = f"{x:.3f}"
    return "0.000" if s == "-0.000" else s


@dataclass
class Canvas:
    """Data-space to page-space mapping plus an element buffer."""

    x_range: tuple[float, float]
    y_range: tuple[float, float]
    width: float = 640.0
    height: float = 480.0
    margin: float = 56.0
    elements: list = field(default_factory=list)

    def _sx(self, x: float) -> float:
        x0, x1 = self.x_range
        if x1 == x0:
            return self.width / 2.0
        frac = (x - x0) / (x1 - x0)
        return self.margin + frac * (self.width - 2.0 * self.margin)

    def _sy(self, y: float) -> float:
        y0, y1 = self.y_range
        if y1 == y0:
            return self.height / 2.0
        frac = (y - y0) / (y1 - y0)
        return self.height - self.margin - frac * (self.height - 2.0 * self.margin)

    def polyline(self, xs, ys, stroke="#000000", width=1.0, dashed=False):
        pts = " ".join(f"{_fmt(self._sx(x))},{_fmt(self._sy(y))}"
                       for x, y in zip(xs, ys))
        dash = ' stroke-dasharray="6,4"' if dashed else ""
        self.elements.append(
            f'<polyline fill="none" stroke="{stroke}" stroke-width="{width}"'
            f'{dash} points="{pts}"/>')

    def segment(self, x1, y1, x2, y2, stroke="#000000", width=1.0, dashed=False):
        dash = ' stroke-dasharray="6,4"' if dashed else ""
        self.elements.append(
            f'<line x1="{_fmt(self._sx(x1))}" y1="{_fmt(self._sy(y1))}"'
            f' x2="{_fmt(self._sx(x2))}" y2="{_fmt(self._sy(y2))}"'
            f' stroke="{stroke}" stroke-width="{width}"{dash}/>')

    def circle(self, x, y, radius_px=2.5, stroke="#000000", fill="none"):
        self.elements.append(
            f'<circle cx="{_fmt(self._sx(x))}" cy="{_fmt(self._sy(y))}"'
            f' r="{_fmt(radius_px)}" stroke="{stroke}" fill="{fill}"/>')

    def data_circle(self, x, y, radius, stroke="#000000", fill="none"):
        """Circle whose radius lives in data units (x scale)."""
        x0, x1 = self.x_range
        scale = (self.width - 2.0 * self.margin) / (x1 - x0) if x1 != x0 else 1.0
        self.elements.append(
            f'<circle cx="{_fmt(self._sx(x))}" cy="{_fmt(self._sy(y))}"'
            f' r="{_fmt(abs(radius) * scale)}" stroke="{stroke}" fill="{fill}"/>')

    def text(self, x, y, label, size=12, anchor="start", color="#000000"):
        self.elements.append(
            f'<text x="{_fmt(self._sx(x))}" y="{_fmt(self._sy(y))}"'
            f' font-family="sans-serif" font-size="{size}" fill="{color}"'
            f' text-anchor="{anchor}">{label}</text>')

    def page_text(self, px, py, label, size=12, anchor="start", color="#000000"):
        self.elements.append(
            f'<text x="{_fmt(px)}" y="{_fmt(py)}" font-family="sans-serif"'
            f' font-size="{size}" fill="{color}" text-anchor="{anchor}">{label}</text>')

    def axes(self, x_label="", y_label="", ticks=5):
        x0, x1 = self.x_range
        y0, y1 = self.y_range
        self.polyline([x0, x1], [y0, y0])
        self.polyline([x0, x0], [y0, y1])
        for k in range(ticks + 1):
            xt = x0 + (x1 - x0) * k / ticks
            yt = y0 + (y1 - y0) * k / ticks
            self.page_text(self._sx(xt), self.height - self.margin + 16,
                           f"{xt:.4g}", size=10, anchor="middle")
            self.page_text(self._sx(x0) - 6, self._sy(yt) + 4,
                           f"{yt:.4g}", size=10, anchor="end")
        if x_label:
            self.page_text(self.width / 2.0, self.height - 12, x_label,
                           anchor="middle")
        if y_label:
            self.elements.append(
                f'<text x="14" y="{_fmt(self.height / 2.0)}" font-family="sans-serif"'
                f' font-size="12" fill="#000000" text-anchor="middle"'
                f' transform="rotate(-90 14 {_fmt(self.height / 2.0)})">{y_label}</text>')

    def render(self) -> str:
        head = (
            '<?xml version="1.0" encoding="UTF-8"?>\n'
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
            f'width="{_fmt(self.width)}" height="{_fmt(self.height)}" '
            f'viewBox="0 0 {_fmt(self.width)} {_fmt(self.height)}">\n'
        )
        body = "\n".join(self.elements)
        return head + body + "\n</svg>\n"

    def write(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.render())


def padded_range(lo: float, hi: float, pad: float = 0.05) -> tuple[float, float]:
    if hi < lo:
        lo, hi = hi, lo
    span = hi - lo
    if span == 0.0:
        span = abs(hi) if hi != 0.0 else 1.0
    return lo - pad * span, hi + pad * span
