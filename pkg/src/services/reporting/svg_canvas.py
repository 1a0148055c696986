"""Minimal static SVG 1.1 writer and a linear axes helper."""
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence
from xml.sax.saxutils import escape

from src.core.constants import PlotColors

PREAMBLE = """<?xml version="1.0" standalone="no"?>
<!DOCTYPE svg PUBLIC "-//W3C//DTD SVG 1.1//EN" "http://www.w3.org/Graphics/SVG/1.1/DTD/svg11.dtd">
"""


def _num(value: float) -> str:
    text = f"{value:.2f}".rstrip("0").rstrip(".")
    return "0" if text in ("-0", "") else text


class SvgCanvas:
    """Accumulates SVG elements in drawing order; output is a pure function of the calls."""

    def __init__(self, width: int, height: int, background: str = PlotColors.BACKGROUND):
        self.width = width
        self.height = height
        self.elements: list[str] = []
        self._open_groups = 0
        self.rect(0, 0, width, height, fill=background, css_class="background")

    @staticmethod
    def _attrs(css_class: Optional[str], extra: str = "") -> str:
        attrs = f' class="{css_class}"' if css_class else ""
        return attrs + (f" {extra}" if extra else "")

    def group_start(self, css_class: Optional[str] = None, transform: Optional[str] = None) -> None:
        extra = f'transform="{transform}"' if transform else ""
        self.elements.append(f"<g{self._attrs(css_class, extra)}>")
        self._open_groups += 1

    def group_end(self) -> None:
        if self._open_groups == 0:
            raise ValueError("group_end without group_start")
        self.elements.append("</g>")
        self._open_groups -= 1

    def line(
        self,
        x1: float,
        y1: float,
        x2: float,
        y2: float,
        stroke: str = PlotColors.AXIS,
        width: float = 1.0,
        dash: Optional[str] = None,
        css_class: Optional[str] = None,
    ) -> None:
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        self.elements.append(
            f'<line{self._attrs(css_class)} x1="{_num(x1)}" y1="{_num(y1)}" x2="{_num(x2)}" y2="{_num(y2)}" '
            f'stroke="{stroke}" stroke-width="{_num(width)}"{dash_attr}/>'
        )

    def polyline(
        self,
        points: Iterable[tuple[float, float]],
        stroke: str,
        width: float = 1.5,
        dash: Optional[str] = None,
        css_class: Optional[str] = None,
    ) -> None:
        coords = " ".join(f"{_num(x)},{_num(y)}" for x, y in points)
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        self.elements.append(
            f'<polyline{self._attrs(css_class)} points="{coords}" fill="none" '
            f'stroke="{stroke}" stroke-width="{_num(width)}"{dash_attr}/>'
        )

    def circle(
        self, cx: float, cy: float, r: float, fill: str, css_class: Optional[str] = None, opacity: float = 1.0
    ) -> None:
        opacity_attr = f' fill-opacity="{_num(opacity)}"' if opacity < 1.0 else ""
        self.elements.append(
            f'<circle{self._attrs(css_class)} cx="{_num(cx)}" cy="{_num(cy)}" r="{_num(r)}" fill="{fill}"{opacity_attr}/>'
        )

    def rect(
        self,
        x: float,
        y: float,
        width: float,
        height: float,
        fill: str,
        css_class: Optional[str] = None,
        stroke: Optional[str] = None,
    ) -> None:
        stroke_attr = f' stroke="{stroke}"' if stroke else ""
        self.elements.append(
            f'<rect{self._attrs(css_class)} x="{_num(x)}" y="{_num(y)}" width="{_num(width)}" '
            f'height="{_num(height)}" fill="{fill}"{stroke_attr}/>'
        )

    def text(
        self,
        x: float,
        y: float,
        content: str,
        size: int = 12,
        anchor: str = "middle",
        bold: bool = False,
        italic: bool = False,
        rotate: Optional[float] = None,
        fill: str = PlotColors.AXIS,
        css_class: Optional[str] = None,
    ) -> None:
        extra = [f'font-size="{size}"', f'text-anchor="{anchor}"', 'font-family="sans-serif"', f'fill="{fill}"']
        if bold:
            extra.append('font-weight="bold"')
        if italic:
            extra.append('font-style="italic"')
        if rotate is not None:
            extra.append(f'transform="rotate({_num(rotate)} {_num(x)} {_num(y)})"')
        self.elements.append(
            f'<text{self._attrs(css_class)} x="{_num(x)}" y="{_num(y)}" {" ".join(extra)}>{escape(content)}</text>'
        )

    def title(self, content: str) -> None:
        self.elements.append(f"<title>{escape(content)}</title>")

    def to_string(self) -> str:
        if self._open_groups:
            raise ValueError(f"{self._open_groups} unclosed group(s)")
        head = (
            f'<svg version="1.1" width="{self.width}" height="{self.height}" '
            f'viewBox="0 0 {self.width} {self.height}" xmlns="http://www.w3.org/2000/svg">'
        )
        return PREAMBLE + head + "\n" + "\n".join(self.elements) + "\n</svg>\n"

    def save(self, path: str | Path) -> Path:
        target = Path(path)
        target.write_text(self.to_string(), encoding="utf-8")
        return target


@dataclass(frozen=True)
class Axes:
    """Linear map from a data rectangle onto a pixel rectangle (y grows upwards)."""

    left: float
    top: float
    width: float
    height: float
    x_min: float
    x_max: float
    y_min: float
    y_max: float

    def x(self, value: float) -> float:
        span = self.x_max - self.x_min or 1.0
        return self.left + (value - self.x_min) / span * self.width

    def y(self, value: float) -> float:
        span = self.y_max - self.y_min or 1.0
        return self.top + self.height - (value - self.y_min) / span * self.height

    @property
    def bottom(self) -> float:
        return self.top + self.height

    @property
    def right(self) -> float:
        return self.left + self.width

    def draw_frame(
        self,
        canvas: SvgCanvas,
        x_ticks: Sequence[float],
        y_ticks: Sequence[float],
        x_label: str,
        y_label: str,
        highlight_x: Sequence[float] = (),
        highlight_y: Sequence[float] = (),
        tick_format: str = "{:g}",
    ) -> None:
        """Axis lines, ticks and labels; highlighted ticks are drawn bold italic."""
        canvas.group_start("axes")
        canvas.line(self.left, self.bottom, self.right, self.bottom, css_class="axis")
        canvas.line(self.left, self.top, self.left, self.bottom, css_class="axis")
        for value in x_ticks:
            px = self.x(value)
            canvas.line(px, self.bottom, px, self.bottom + 4, css_class="tick")
            strong = value in highlight_x
            canvas.text(px, self.bottom + 16, tick_format.format(value), size=10, bold=strong, italic=strong)
        for value in y_ticks:
            py = self.y(value)
            canvas.line(self.left - 4, py, self.left, py, css_class="tick")
            strong = value in highlight_y
            canvas.text(self.left - 7, py + 3, tick_format.format(value), size=10, anchor="end", bold=strong, italic=strong)
        canvas.text(self.left + self.width / 2, self.bottom + 34, x_label, size=12)
        canvas.text(self.left - 40, self.top + self.height / 2, y_label, size=12, rotate=-90)
        canvas.group_end()


def linear_ticks(low: float, high: float, count: int = 5) -> list[float]:
    """count + 1 evenly spaced tick values from low to high."""
    if high <= low:
        return [low]
    step = (high - low) / count
    return [low + i * step for i in range(count + 1)]


def integer_ticks(values: Sequence[int], max_ticks: int = 10) -> list[int]:
    """A subset of at most max_ticks grid values (always including the first and last)."""
    if len(values) <= max_ticks:
        return list(values)
    stride = -(-len(values) // max_ticks)
    ticks = list(values[::stride])
    if ticks[-1] != values[-1]:
        ticks.append(values[-1])
    return ticks


__all__ = ["Axes", "SvgCanvas", "integer_ticks", "linear_ticks"]
