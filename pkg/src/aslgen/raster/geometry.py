"""Integer rasterization: fixed-point snapping, convex hulls, and scanline fill."""
from __future__ import annotations

import math

import numpy as np

SUBPIXEL = 16


def snap(px: np.ndarray) -> np.ndarray:
    """Pixel-space floats to 1/16-pixel integers."""
    return np.rint(np.asarray(px, dtype=np.float64) * SUBPIXEL).astype(np.int64)


def convex_hull(pts: np.ndarray) -> np.ndarray:
    """Monotone-chain hull of integer points, counter-clockwise, no repeated endpoint."""
    uniq = sorted({(int(x), int(y)) for x, y in pts})
    if len(uniq) <= 2:
        return np.asarray(uniq, dtype=np.int64).reshape(-1, 2)

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower: list = []
    for p in uniq:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list = []
    for p in reversed(uniq):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return np.asarray(lower[:-1] + upper[:-1], dtype=np.int64)


def fill_convex(buf: np.ndarray, poly: np.ndarray, color) -> None:
    """Fill a convex fixed-point polygon; pixel centers on the left/top edge are in, right/bottom out."""
    if len(poly) < 3:
        return
    h, w = buf.shape[:2]
    half = SUBPIXEL // 2
    pts = [(int(x), int(y)) for x, y in poly]
    ys = [y for _, y in pts]
    # rows whose pixel center lies in [ymin, ymax)
    y_lo = max(-((half - min(ys)) // SUBPIXEL), 0)
    y_hi = min(-((half - max(ys)) // SUBPIXEL), h)
    if y_hi <= y_lo:
        return
    edges = []
    for (x0, y0), (x1, y1) in zip(pts, pts[1:] + pts[:1]):
        if y0 == y1:
            continue
        if y0 > y1:
            x0, y0, x1, y1 = x1, y1, x0, y0
        edges.append((y0, y1, x0, x1 - x0, y1 - y0))
    # plain ints: polygons are small and numpy call overhead dominates
    for row in range(y_lo, y_hi):
        c = SUBPIXEL * row + half
        start, end, hits = w, 0, 0
        for y0, y1, x0, dx, den in edges:
            if y0 <= c < y1:
                # crossing x = num / den exactly; first pixel whose center is >= x
                num = x0 * den + (c - y0) * dx
                px = -((half * den - num) // (SUBPIXEL * den))
                start = min(start, px)
                end = max(end, px)
                hits += 1
        if hits >= 2:
            s, e = max(start, 0), min(end, w)
            if e > s:
                buf[row, s:e] = color


def segment_quad(p: np.ndarray, q: np.ndarray, width: float) -> np.ndarray:
    """Pixel-space rectangle around segment pq; a square when p == q."""
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    r = width / 2.0
    d = q - p
    n = math.hypot(d[0], d[1])
    if n < 1e-12:
        return np.array([p + (-r, -r), p + (r, -r), p + (r, r), p + (-r, r)])
    u = d / n
    perp = np.array([-u[1], u[0]]) * r
    return np.array([p + perp, q + perp, q - perp, p - perp])


def fill_stroke(buf: np.ndarray, pts_px: np.ndarray, width: float, color) -> None:
    pts_px = np.asarray(pts_px, dtype=np.float64)
    if len(pts_px) == 1:
        fill_convex(buf, convex_hull(snap(segment_quad(pts_px[0], pts_px[0], width))), color)
    for a, b in zip(pts_px, pts_px[1:]):
        fill_convex(buf, convex_hull(snap(segment_quad(a, b, width))), color)
