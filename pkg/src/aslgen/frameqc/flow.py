"""Dense optical flow by polynomial expansion (Farneback) over a Gaussian pyramid."""
from __future__ import annotations

import numpy as np
from scipy import ndimage


class DimensionMismatch(ValueError):
    pass


LUMA = np.array([0.299, 0.587, 0.114])


def to_gray(img: np.ndarray) -> np.ndarray:
    """ITU-R 601 luma for RGB input; 2D input passes through as float."""
    a = np.asarray(img, dtype=np.float64)
    if a.ndim == 3:
        return a[..., :3] @ LUMA
    return a


def _poly_basis(n: int, sigma: float):
    x = np.arange(-n, n + 1, dtype=np.float64)
    g = np.exp(-x * x / (2 * sigma * sigma))
    g /= g.sum()
    # 1D kernels for x^0, x^1, x^2 weighted by g
    k = [g, g * x, g * x * x]
    # Gram matrix of basis (1, x, y, x^2, y^2, xy) under separable weight g(x)g(y)
    m = [float(np.sum(g * x ** p)) for p in range(5)]
    def mom(px, py):
        return m[px] * m[py]
    powers = [(0, 0), (1, 0), (0, 1), (2, 0), (0, 2), (1, 1)]
    G = np.array([[mom(a[0] + b[0], a[1] + b[1]) for b in powers] for a in powers])
    return k, powers, np.linalg.inv(G)


def poly_expansion(img: np.ndarray, n: int = 5, sigma: float = 1.1):
    """Per-pixel quadratic fit f(p) ~ p^T A p + b^T p + c, p = (x, y); returns (A, b)."""
    k, powers, ginv = _poly_basis(n, sigma)
    corr = []
    for px, py in powers:
        # correlate with g(x) x^px along columns and g(y) y^py along rows
        r = ndimage.correlate1d(img, k[px], axis=1, mode="nearest")
        r = ndimage.correlate1d(r, k[py], axis=0, mode="nearest")
        corr.append(r)
    c = np.stack(corr, axis=-1)
    r = c @ ginv.T
    A = np.empty(img.shape + (2, 2))
    A[..., 0, 0] = r[..., 3]
    A[..., 1, 1] = r[..., 4]
    A[..., 0, 1] = A[..., 1, 0] = r[..., 5] / 2
    b = r[..., 1:3]
    return A, b


def _warp(field: np.ndarray, flow: np.ndarray) -> np.ndarray:
    h, w = flow.shape[:2]
    yy, xx = np.mgrid[0:h, 0:w].astype(np.float64)
    coords = [yy + flow[..., 1], xx + flow[..., 0]]
    flat = field.reshape(h, w, -1)
    out = np.stack([ndimage.map_coordinates(flat[..., i], coords, order=1, mode="nearest")
                    for i in range(flat.shape[-1])], axis=-1)
    return out.reshape(field.shape)


def _update(A1, b1, A2, b2, flow, winsize):
    A2w = _warp(A2, flow)
    b2w = _warp(b2, flow)
    A = (A1 + A2w) / 2
    db = -0.5 * (b2w - b1) + np.einsum("...ij,...j->...i", A, flow)
    ata = np.einsum("...ki,...kj->...ij", A, A)
    atb = np.einsum("...ki,...k->...i", A, db)
    size = (winsize, winsize)
    g11 = ndimage.uniform_filter(ata[..., 0, 0], size, mode="nearest")
    g12 = ndimage.uniform_filter(ata[..., 0, 1], size, mode="nearest")
    g22 = ndimage.uniform_filter(ata[..., 1, 1], size, mode="nearest")
    h1 = ndimage.uniform_filter(atb[..., 0], size, mode="nearest")
    h2 = ndimage.uniform_filter(atb[..., 1], size, mode="nearest")
    det = g11 * g22 - g12 * g12
    # textureless neighbourhoods carry no evidence; keep the prior there
    flat = det < 1e-12
    idet = 1.0 / np.where(flat, 1.0, det)
    out = np.empty_like(flow)
    out[..., 0] = (g22 * h1 - g12 * h2) * idet
    out[..., 1] = (g11 * h2 - g12 * h1) * idet
    out[flat] = flow[flat]
    return out


def dense_flow(a: np.ndarray, b: np.ndarray, levels: int = 3, winsize: int = 15,
               iterations: int = 3, poly_n: int = 5, poly_sigma: float = 1.1) -> np.ndarray:
    """Flow field (H, W, 2) in pixels, (dx, dy), such that b(p + d) ~ a(p)."""
    a = to_gray(a)
    b = to_gray(b)
    if a.shape != b.shape:
        raise DimensionMismatch(f"{a.shape} vs {b.shape}")
    # work on 0..1 intensities
    a = a / 255.0
    b = b / 255.0
    pyr_a, pyr_b = [a], [b]
    for _ in range(levels - 1):
        if min(pyr_a[-1].shape) < 2 * (2 * poly_n + 1):
            break
        pyr_a.append(_down(pyr_a[-1]))
        pyr_b.append(_down(pyr_b[-1]))
    flow = None
    for la, lb in zip(reversed(pyr_a), reversed(pyr_b)):
        if flow is None:
            flow = np.zeros(la.shape + (2,))
        else:
            flow = _up(flow, la.shape) * 2.0
        A1, b1 = poly_expansion(la, poly_n, poly_sigma)
        A2, b2 = poly_expansion(lb, poly_n, poly_sigma)
        for _ in range(iterations):
            flow = _update(A1, b1, A2, b2, flow, winsize)
    return flow


def _down(img: np.ndarray) -> np.ndarray:
    return ndimage.gaussian_filter(img, 1.0, mode="nearest")[::2, ::2]


def _up(flow: np.ndarray, shape) -> np.ndarray:
    h, w = shape
    fh, fw = flow.shape[:2]
    zy, zx = h / fh, w / fw
    return np.stack([ndimage.zoom(flow[..., i], (zy, zx), order=1, mode="nearest", grid_mode=True)[:h, :w]
                     for i in range(2)], axis=-1)


def blur_score(a: np.ndarray, b: np.ndarray, **kw) -> float:
    """Mean flow magnitude between consecutive frames."""
    f = dense_flow(a, b, **kw)
    return float(np.mean(np.hypot(f[..., 0], f[..., 1])))
