"""
utils/svg_plot.py
──────────────────────────────────────────────────────────────────────────────
SVG pictures of end-curves, corner modules and boundary components on the
grid of a module's window.

Births are solid staircases, deaths dashed, top-left corners up-left
half-disks, bottom-right corners down-right half-disks. Boundary curves are
drawn on top; a section the curve walks twice is drawn again slightly
offset so both passes stay visible.
──────────────────────────────────────────────────────────────────────────────
"""

import logging
import math
from typing import Iterable, List, Optional, Sequence, Set, Tuple

from core.errors import OutputFileError
from core.gridmod import Bigrade, Window

logger = logging.getLogger(__name__)

CELL = 40.0
MARGIN = 30.0
RADIUS = 8.0
RETRACE_OFFSET = 4.0
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")

PREAMBLE = """\
<?xml version="1.0" standalone="no"?>
<svg width="{width:.1f}" height="{height:.1f}" viewBox="0 0 {width:.1f} {height:.1f}" version="1.1" xmlns="http://www.w3.org/2000/svg">
<rect x="0" y="0" width="{width:.1f}" height="{height:.1f}" style="fill:#ffffff"/>
"""

POSTAMBLE = "</svg>\n"


class GridSVG:
    """Collects drawing commands in grid coordinates; y grows upwards."""

    def __init__(self, window: Window):
        self.window = window
        self.commands: List[str] = []

    @property
    def width(self) -> float:
        return (self.window.hi.x - self.window.lo.x) * CELL + 2 * MARGIN

    @property
    def height(self) -> float:
        return (self.window.hi.y - self.window.lo.y) * CELL + 2 * MARGIN

    def to_screen(self, q: Sequence[float]) -> Tuple[float, float]:
        return (
            MARGIN + (q[0] - self.window.lo.x) * CELL,
            MARGIN + (self.window.hi.y - q[1]) * CELL,
        )

    def grid(self):
        for q in self.window.points():
            sx, sy = self.to_screen(q)
            self.commands.append(f'<circle cx="{sx:.1f}" cy="{sy:.1f}" r="1.5" style="fill:#bbbbbb"/>')

    def polyline(self, points: Sequence[Sequence[float]], stroke: str, dashed: bool = False, width: float = 2.0):
        if len(points) == 1:
            sx, sy = self.to_screen(points[0])
            self.commands.append(f'<circle cx="{sx:.1f}" cy="{sy:.1f}" r="3" style="fill:{stroke}"/>')
            return
        coords = " ".join("{:.1f},{:.1f}".format(*self.to_screen(q)) for q in points)
        dash = ' stroke-dasharray="6,4"' if dashed else ""
        self.commands.append(
            f'<polyline points="{coords}" style="fill:none;stroke:{stroke};stroke-width:{width}"{dash}/>'
        )

    def half_disk(self, q: Sequence[int], up_left: bool, fill: str):
        cx, cy = self.to_screen(q)
        d = RADIUS / math.sqrt(2)
        ax, ay, bx, by = cx + d, cy - d, cx - d, cy + d
        sweep = 0 if up_left else 1
        self.commands.append(
            f'<path d="M {ax:.1f} {ay:.1f} A {RADIUS} {RADIUS} 0 0 {sweep} {bx:.1f} {by:.1f} Z" '
            f'style="fill:{fill};fill-opacity:0.6"/>'
        )

    def segment(self, a: Tuple[float, float], b: Tuple[float, float], stroke: str):
        self.commands.append(
            f'<line x1="{a[0]:.1f}" y1="{a[1]:.1f}" x2="{b[0]:.1f}" y2="{b[1]:.1f}" '
            f'style="stroke:{stroke};stroke-width:1.5;stroke-opacity:0.8"/>'
        )

    def closed_curve(self, curve: Sequence[Bigrade], stroke: str, shift: float):
        if len(curve) == 1:
            sx, sy = self.to_screen(curve[0])
            self.commands.append(
                f'<circle cx="{sx + shift:.1f}" cy="{sy - shift:.1f}" r="{RADIUS / 2}" '
                f'style="fill:none;stroke:{stroke};stroke-width:1.5"/>'
            )
            return
        drawn: Set[frozenset] = set()
        for a, b in zip(curve, list(curve[1:]) + [curve[0]]):
            if a == b:
                continue
            key = frozenset((a, b))
            extra = RETRACE_OFFSET if key in drawn else 0.0
            drawn.add(key)
            (ax, ay), (bx, by) = self.to_screen(a), self.to_screen(b)
            # perpendicular to the unit grid step in screen space
            nx, ny = (by - ay) / CELL, (ax - bx) / CELL
            self.segment(
                (ax + nx * extra + shift, ay + ny * extra - shift),
                (bx + nx * extra + shift, by + ny * extra - shift),
                stroke,
            )

    def render(self) -> str:
        body = "\n".join(self.commands)
        return PREAMBLE.format(width=self.width, height=self.height) + body + "\n" + POSTAMBLE

    def save(self, filename: str):
        try:
            with open(filename, "w", encoding="utf-8") as f:
                f.write(self.render())
        except OSError as exc:
            raise OutputFileError(f"cannot write {filename}: {exc.strerror or exc}") from exc
        logger.info(f"[PLOT] wrote {filename} ({len(self.commands)} elements)")


def staircase(points: Iterable[Sequence[int]]) -> List[Bigrade]:
    """Spread-curve points in walking order, top-left end first."""
    return sorted((Bigrade(*q) for q in points), key=lambda q: q.x - q.y)


def plot_summary(
    window: Window,
    births: Iterable,
    deaths: Iterable,
    topleft: Iterable[Sequence[int]] = (),
    botright: Iterable[Sequence[int]] = (),
    components: Optional[Iterable] = None,
) -> GridSVG:
    """Births / closed deaths as SpreadCurve objects, corners as grade lists, components with a ``curve``."""
    svg = GridSVG(window)
    svg.grid()
    for k, curve in enumerate(births):
        svg.polyline(staircase(curve.points), PALETTE[k % len(PALETTE)])
    for k, curve in enumerate(deaths):
        svg.polyline(staircase(curve.points), PALETTE[k % len(PALETTE)], dashed=True)
    for q in topleft:
        svg.half_disk(q, up_left=True, fill="#444444")
    for q in botright:
        svg.half_disk(q, up_left=False, fill="#444444")
    for k, comp in enumerate(components or ()):
        svg.closed_curve(list(comp.curve), PALETTE[(k + 3) % len(PALETTE)], shift=1.5 * (k + 1))
    return svg
