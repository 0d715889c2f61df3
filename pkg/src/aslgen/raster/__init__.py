"""Pose-frame rasterization into gradient-background conditioning images."""
from .geometry import SUBPIXEL, convex_hull, fill_convex, fill_stroke, snap
from .render import (
    DegenerateHand, Orientation, RasterFrame, draw_background, draw_frame, load_png,
    palm_orientation, render_frames, save_png, to_pixels, write_png_sequence, write_rgb24,
)
from .style import HandPalette, RasterStyle, StyleError, load_style

__all__ = [name for name in dir() if not name.startswith("_")]
