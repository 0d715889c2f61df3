"""Image-level comparison metrics."""
from __future__ import annotations

import math

import numpy as np
from scipy import ndimage

from .flow import DimensionMismatch

PSNR_IDENTICAL = math.inf


def _check(a, b):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionMismatch(f"{a.shape} vs {b.shape}")
    return a, b


def l1(a, b) -> float:
    a, b = _check(a, b)
    return float(np.mean(np.abs(a - b)))


def psnr(a, b, max_value: float = 255.0) -> float:
    a, b = _check(a, b)
    mse = float(np.mean((a - b) ** 2))
    if mse == 0:
        return PSNR_IDENTICAL
    return 10 * math.log10(max_value ** 2 / mse)


def ssim(a, b, data_range: float = 255.0, sigma: float = 1.5, k1: float = 0.01, k2: float = 0.03) -> float:
    """Mean SSIM with an 11x11 Gaussian window, averaged over channels, borders cropped."""
    a, b = _check(a, b)
    if a.ndim == 2:
        a, b = a[..., None], b[..., None]
    truncate = 3.5
    pad = int(truncate * sigma + 0.5)
    c1, c2 = (k1 * data_range) ** 2, (k2 * data_range) ** 2
    vals = []
    for ch in range(a.shape[-1]):
        x, y = a[..., ch], b[..., ch]

        def blur(z):
            return ndimage.gaussian_filter(z, sigma, truncate=truncate, mode="reflect")

        mx, my = blur(x), blur(y)
        vx = blur(x * x) - mx * mx
        vy = blur(y * y) - my * my
        cxy = blur(x * y) - mx * my
        s = ((2 * mx * my + c1) * (2 * cxy + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2))
        vals.append(s[pad:-pad, pad:-pad].mean() if min(s.shape) > 2 * pad else s.mean())
    return float(np.mean(vals))


def image_metrics(a, b) -> dict[str, float]:
    return {"l1": l1(a, b), "psnr": psnr(a, b), "ssim": ssim(a, b)}
