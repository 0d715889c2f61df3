"""Procedural stand-in skeletons: the shipped neutral pose and the demo sign corpus."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .schema import BODY, DEFAULT_SCHEMA, FACE, LEFT_HAND, RIGHT_HAND, PoseFrame

HEAD = (0.5, 0.25)
HEAD_RADII = (0.075, 0.095)
CHIN = 152
BROW_RIGHT = (70, 63, 105, 66, 107, 55, 65, 52, 53, 46)
BROW_LEFT = (336, 296, 334, 293, 300, 285, 295, 282, 283, 276)

_BODY_FIXED = {
    0: (0.5, 0.25), 1: (0.515, 0.235), 2: (0.525, 0.232), 3: (0.535, 0.235),
    4: (0.485, 0.235), 5: (0.475, 0.232), 6: (0.465, 0.235), 7: (0.565, 0.245),
    8: (0.435, 0.245), 9: (0.515, 0.29), 10: (0.485, 0.29), 11: (0.65, 0.42),
    12: (0.35, 0.42), 23: (0.6, 0.86), 24: (0.4, 0.86), 25: (0.6, 1.1), 26: (0.4, 1.1),
    27: (0.6, 1.35), 28: (0.4, 1.35), 29: (0.61, 1.38), 30: (0.39, 1.38), 31: (0.63, 1.4),
    32: (0.37, 1.4),
}

# local right-hand layout, palm towards the camera, fingers up (-y), unit palm length
_THUMB = ((-0.2, -0.1), (-0.35, -0.25), (-0.45, -0.38), (-0.52, -0.5))
_MCP = ((-0.12, -0.45), (0.0, -0.48), (0.11, -0.45), (0.21, -0.4))
_PHALANX = (0.2, 0.13, 0.1)
UPPER_ARM, FOREARM = 0.2, 0.19


@dataclass(frozen=True)
class HandShape:
    """Wrist position, in-plane angle (radians, 0 = fingers up), size, curl 0..1, facing ±1."""

    wrist: tuple[float, float]
    angle: float = 0.0
    size: float = 0.07
    curl: float = 0.0
    facing: int = 1
    spread: float = 0.0


def hand_points(shape: HandShape) -> np.ndarray:
    pts = [(0.0, 0.0, 0.0)]
    for x, y in _THUMB:
        pts.append((x * (1 - 0.3 * shape.curl), y * (1 - 0.3 * shape.curl), 0.05 * shape.curl))
    for k, (x, y) in enumerate(_MCP):
        spread = (k - 1.5) * shape.spread
        dx, dy = math.sin(spread), -math.cos(spread)
        px, py, pz = x, y, 0.0
        pts.append((px, py, pz))
        for j, seg in enumerate(_PHALANX):
            bend = shape.curl * (j + 1) * 0.5
            px += dx * seg * math.cos(bend)
            py += dy * seg * math.cos(bend)
            pz += seg * math.sin(bend)
            pts.append((px, py, pz))
    a = np.asarray(pts, dtype=np.float64)
    a[:, 0] *= shape.facing
    c, s = math.cos(shape.angle), math.sin(shape.angle)
    rot = np.array([[c, -s], [s, c]])
    out = np.empty_like(a)
    out[:, :2] = a[:, :2] @ rot.T * shape.size + np.asarray(shape.wrist)
    out[:, 2] = a[:, 2] * shape.size
    return out


def mirror_hand(pts: np.ndarray, about_x: float = 0.5) -> np.ndarray:
    out = pts.copy()
    out[:, 0] = 2 * about_x - out[:, 0]
    return out


def _elbow(shoulder: np.ndarray, wrist: np.ndarray, outward: float) -> np.ndarray:
    d = wrist - shoulder
    dist = float(np.linalg.norm(d))
    if dist < 1e-9:
        return shoulder + np.array([0.0, UPPER_ARM])
    if dist >= UPPER_ARM + FOREARM:
        return shoulder + d * (UPPER_ARM / dist)
    # law of cosines for the elbow offset along and across the shoulder-wrist line
    a = (UPPER_ARM ** 2 - FOREARM ** 2 + dist ** 2) / (2 * dist)
    h = math.sqrt(max(UPPER_ARM ** 2 - a ** 2, 0.0))
    u = d / dist
    perp = np.array([-u[1], u[0]])
    if perp[0] * outward < 0:
        perp = -perp
    return shoulder + a * u + h * perp


def face_points(center=HEAD, radii=HEAD_RADII, brow_lift: float = 0.0) -> np.ndarray:
    n = DEFAULT_SCHEMA.count(FACE)
    k = np.arange(n)
    r = np.sqrt((k + 0.5) / n)
    theta = k * math.pi * (3 - math.sqrt(5))
    pts = np.stack([center[0] + radii[0] * r * np.cos(theta),
                    center[1] + radii[1] * r * np.sin(theta)], axis=1)
    pts[CHIN] = (center[0], center[1] + radii[1])
    for side, idx in ((-1, BROW_RIGHT), (1, BROW_LEFT)):
        for j, i in enumerate(idx):
            t = j / (len(idx) - 1)
            x = center[0] + side * (0.012 + 0.045 * t)
            y = center[1] - 0.045 - brow_lift - 0.008 * math.sin(math.pi * t)
            pts[i] = (x, y)
    return pts


def body_points(left_wrist, right_wrist) -> np.ndarray:
    b = np.zeros((DEFAULT_SCHEMA.count(BODY), 2))
    for i, p in _BODY_FIXED.items():
        b[i] = p
    lw, rw = np.asarray(left_wrist, float), np.asarray(right_wrist, float)
    b[13] = _elbow(b[11], lw, +1)
    b[14] = _elbow(b[12], rw, -1)
    b[15], b[16] = lw, rw
    for i, off in ((17, (0.01, 0.03)), (19, (0.0, 0.035)), (21, (-0.01, 0.025))):
        b[i] = lw + off
        b[i + 1] = rw + (-off[0], off[1])
    return b


def compose(left: HandShape, right: HandShape, brow_lift: float = 0.0) -> PoseFrame:
    lh = hand_points(left)
    rh = hand_points(right)
    pts = {BODY: body_points(lh[0, :2], rh[0, :2]), FACE: face_points(brow_lift=brow_lift),
           LEFT_HAND: lh, RIGHT_HAND: rh}
    return PoseFrame(pts, {g: True for g in pts})


REST_LEFT = HandShape(wrist=(0.53, 0.78), angle=-1.2, curl=0.3, facing=-1)
REST_RIGHT = HandShape(wrist=(0.47, 0.78), angle=1.2, curl=0.3, facing=1)


def rest_frame() -> PoseFrame:
    """Hands together just below the chest, face forward."""
    return compose(REST_LEFT, REST_RIGHT)
