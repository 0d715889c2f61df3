"""Rendering style: canvas, gradient ranges, shades, and per-hand palettes."""
from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

Color = tuple[int, int, int]


class StyleError(ValueError):
    pass


@dataclass(frozen=True)
class HandPalette:
    fingers_in: tuple[Color, ...]
    fingers_out: tuple[Color, ...]
    palm_in: Color
    palm_out: Color

    def colors(self) -> set[Color]:
        return set(self.fingers_in) | set(self.fingers_out) | {self.palm_in, self.palm_out}


@dataclass(frozen=True)
class RasterStyle:
    width: int = 512
    height: int = 512
    margin: float = 0.1
    vertical: tuple[int, int] = (0, 255)
    horizontal: tuple[int, int] = (0, 255)
    body_shades: tuple[tuple[str, Color], ...] = ()
    face_shade: Color = (200, 200, 200)
    brow_shade: Color = (64, 64, 64)
    connection_shade: Color = (160, 160, 160)
    connections: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...] = ()
    limb_width: float = 18
    finger_width: float = 5
    connection_width: float = 4
    brow_width: float = 4
    palettes: tuple[tuple[str, HandPalette], ...] = ()

    def __post_init__(self):
        if self.width < 2 or self.height < 2:
            raise StyleError("canvas must be at least 2x2")
        for lo, hi in (self.vertical, self.horizontal):
            if not (0 <= lo <= 255 and 0 <= hi <= 255):
                raise StyleError("gradient ranges must lie within 0..255")
        pals = dict(self.palettes)
        for p in pals.values():
            if len(p.fingers_in) != 5 or len(p.fingers_out) != 5:
                raise StyleError("each hand palette needs 5 finger colors per orientation")
        if len(pals) == 2:
            a, b = pals.values()
            if a.colors() & b.colors():
                raise StyleError("left and right hand palettes must not share colors")

    def shade(self, part: str) -> Color:
        return dict(self.body_shades)[part]

    def palette(self, hand: str) -> HandPalette:
        return dict(self.palettes)[hand]

    @classmethod
    def from_json(cls, d: dict) -> "RasterStyle":
        def col(c) -> Color:
            c = tuple(int(v) for v in c)
            if len(c) != 3 or not all(0 <= v <= 255 for v in c):
                raise StyleError(f"bad color {c}")
            return c

        pals = tuple(
            (hand, HandPalette(tuple(col(c) for c in p["in"]), tuple(col(c) for c in p["out"]),
                               col(p["palm_in"]), col(p["palm_out"])))
            for hand, p in d["hand_palettes"].items())
        w = d.get("widths", {})
        return cls(
            width=int(d["canvas"][0]), height=int(d["canvas"][1]), margin=float(d.get("margin", 0.1)),
            vertical=tuple(d["gradient"]["vertical"]), horizontal=tuple(d["gradient"]["horizontal"]),
            body_shades=tuple((k, col(v)) for k, v in d["body_shades"].items()),
            face_shade=col(d["face_shade"]), brow_shade=col(d["brow_shade"]),
            connection_shade=col(d["connection_shade"]),
            connections=tuple((tuple(a), tuple(b)) for a, b in d.get("connections", [])),
            limb_width=float(w.get("limb", 18)), finger_width=float(w.get("finger", 5)),
            connection_width=float(w.get("connection", 4)), brow_width=float(w.get("brow", 4)),
            palettes=pals)


def load_style(name: str | Path = "default") -> RasterStyle:
    if str(name) == "default":
        text = resources.files("aslgen.data").joinpath("style.json").read_text(encoding="utf-8")
    else:
        text = Path(name).read_text(encoding="utf-8")
    return RasterStyle.from_json(json.loads(text))
