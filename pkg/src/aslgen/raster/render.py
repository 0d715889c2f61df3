"""Conditioning-image rendering of pose frames."""
from __future__ import annotations

import enum
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from ..posedict.schema import (
    BODY, FACE, HANDS, INDEX_MCP, L_SHOULDER, PINKY_MCP, R_SHOULDER, WRIST, PoseFrame,
)
from ..posedict.skeleton import BROW_LEFT, BROW_RIGHT
from .geometry import convex_hull, fill_convex, fill_stroke, snap
from .style import RasterStyle, load_style

TORSO = (L_SHOULDER, R_SHOULDER, 24, 23)
ARMS = {"left_arm": (L_SHOULDER, 13, 15), "right_arm": (R_SHOULDER, 14, 16)}
FINGERS = ((1, 2, 3, 4), (5, 6, 7, 8), (9, 10, 11, 12), (13, 14, 15, 16), (17, 18, 19, 20))
PALM = (WRIST, 1, INDEX_MCP, 9, 13, PINKY_MCP)


class DegenerateHand(ValueError):
    pass


class Orientation(enum.Enum):
    IN = "in"
    OUT = "out"


@dataclass(frozen=True, eq=False)
class RasterFrame:
    pixels: np.ndarray
    degenerate_hands: tuple[str, ...] = ()

    def tobytes(self) -> bytes:
        return self.pixels.tobytes()


def palm_orientation(hand: np.ndarray, eps: float = 1e-9) -> Orientation:
    """Sign of the palm normal's z: (index base - wrist) x (pinky base - wrist)."""
    h = np.asarray(hand, dtype=np.float64)
    if h.shape[-1] == 2:
        h = np.concatenate([h, np.zeros((len(h), 1))], axis=1)
    u = h[INDEX_MCP] - h[WRIST]
    v = h[PINKY_MCP] - h[WRIST]
    n = np.cross(u, v)
    if np.linalg.norm(n) <= eps * max(np.linalg.norm(u) * np.linalg.norm(v), eps):
        raise DegenerateHand("index and pinky bases are collinear with the wrist")
    return Orientation.OUT if n[2] > 0 else Orientation.IN


def draw_background(style: RasterStyle) -> np.ndarray:
    """Vertical ramp in red, horizontal ramp in green, rounded half up in integer arithmetic."""
    w, h = style.width, style.height

    def ramp(n, lo, hi):
        k = np.arange(n, dtype=np.int64)
        num = 2 * (lo * (n - 1) + (hi - lo) * k) + (n - 1)
        return (num // (2 * (n - 1))).astype(np.uint8)

    img = np.zeros((h, w, 3), dtype=np.uint8)
    img[:, :, 0] = ramp(h, *style.vertical)[:, None]
    img[:, :, 1] = ramp(w, *style.horizontal)[None, :]
    return img


def to_pixels(pts: np.ndarray, style: RasterStyle) -> np.ndarray:
    """Normalized coordinates to pixel space, with the unit square on the central canvas region."""
    p = np.asarray(pts, dtype=np.float64)[..., :2]
    sx = style.width * (1 - 2 * style.margin)
    sy = style.height * (1 - 2 * style.margin)
    return np.stack([style.width * style.margin + p[..., 0] * sx,
                     style.height * style.margin + p[..., 1] * sy], axis=-1)


def _hull_fill(buf, pts_px, color):
    fill_convex(buf, convex_hull(snap(pts_px)), color)


def draw_frame(frame: PoseFrame, style: RasterStyle | None = None) -> RasterFrame:
    style = style or load_style()
    buf = draw_background(style)
    valid = frame.valid
    if valid.get(BODY, False):
        body = to_pixels(frame[BODY], style)
        _hull_fill(buf, body[list(TORSO)], style.shade("torso"))
        for part, chain in ARMS.items():
            fill_stroke(buf, body[list(chain)], style.limb_width, style.shade(part))
    if valid.get(FACE, False):
        face = to_pixels(frame[FACE], style)
        _hull_fill(buf, face, style.face_shade)
        for brow in (BROW_RIGHT, BROW_LEFT):
            fill_stroke(buf, face[list(brow)], style.brow_width, style.brow_shade)
        if valid.get(BODY, False):
            for face_idx, body_idx in style.connections:
                a = face[list(face_idx)].mean(axis=0)
                b = body[list(body_idx)].mean(axis=0)
                fill_stroke(buf, np.stack([a, b]), style.connection_width, style.connection_shade)
    degenerate = []
    for hand in HANDS:
        if not valid.get(hand, False):
            continue
        pts = np.asarray(frame[hand])
        try:
            orient = palm_orientation(pts)
        except DegenerateHand:
            orient = Orientation.IN
            degenerate.append(hand)
        pal = style.palette(hand)
        px = to_pixels(pts, style)
        _hull_fill(buf, px[list(PALM)], pal.palm_out if orient is Orientation.OUT else pal.palm_in)
        colors = pal.fingers_out if orient is Orientation.OUT else pal.fingers_in
        for chain, color in zip(FINGERS, colors):
            fill_stroke(buf, px[[WRIST, *chain]] if chain[0] == 1 else px[list(chain)], style.finger_width, color)
    return RasterFrame(buf, tuple(degenerate))


def save_png(frame: RasterFrame, path: str | Path) -> None:
    Image.fromarray(frame.pixels, "RGB").save(path, format="PNG", compress_level=6)


def load_png(path: str | Path) -> np.ndarray:
    with Image.open(path) as im:
        return np.asarray(im.convert("RGB"))


def _render(args):
    frame, style = args
    return draw_frame(frame, style)


def render_frames(frames, style: RasterStyle | None = None, workers: int = 1) -> list[RasterFrame]:
    style = style or load_style()
    frames = list(frames)
    if workers > 1 and len(frames) > 1:
        with ProcessPoolExecutor(workers) as ex:
            return list(ex.map(_render, [(f, style) for f in frames], chunksize=8))
    return [draw_frame(f, style) for f in frames]


def write_png_sequence(frames, out_dir: str | Path, style: RasterStyle | None = None,
                       workers: int = 1) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for i, r in enumerate(render_frames(frames, style, workers)):
        p = out / f"frame_{i:06d}.png"
        save_png(r, p)
        paths.append(p)
    return paths


def write_rgb24(frames, path: str | Path, style: RasterStyle | None = None, workers: int = 1) -> int:
    n = 0
    with open(path, "wb") as fh:
        for r in render_frames(frames, style, workers):
            fh.write(r.tobytes())
            n += 1
    return n
