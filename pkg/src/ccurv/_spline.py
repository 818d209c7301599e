"""Periodic bicubic B-spline interpolation on a uniform grid over the unit square."""

import numpy as np


def _bspline_weights(frac):
    """Cubic B-spline weights (and first/second derivatives) for offsets -1..2."""
    f = frac[..., None]
    d = f - np.array([-1.0, 0.0, 1.0, 2.0])   # distance from each node
    ad = np.abs(d)
    sgn = np.sign(d)
    inner = ad < 1.0
    w = np.where(inner, (4.0 - 6.0 * ad**2 + 3.0 * ad**3) / 6.0, (2.0 - ad) ** 3 / 6.0)
    dw = np.where(inner, (-12.0 * ad + 9.0 * ad**2) / 6.0, -0.5 * (2.0 - ad) ** 2) * sgn
    d2w = np.where(inner, (-12.0 + 18.0 * ad) / 6.0, (2.0 - ad))
    return w, dw, d2w


class PeriodicBicubic:
    """Interpolating periodic cubic spline of samples ``values[i, j] = f(i/N, j/M)``.

    Coordinates passed to :meth:`evaluate` are fractional (period 1 in both axes).
    """

    def __init__(self, values):
        values = np.asarray(values, dtype=float)
        if values.ndim != 2:
            raise ValueError("values must be a 2-D grid")
        self.shape = values.shape
        n, m = self.shape
        kx = np.fft.fftfreq(n) * n
        ky = np.fft.fftfreq(m) * m
        mx = (4.0 + 2.0 * np.cos(2 * np.pi * kx / n)) / 6.0
        my = (4.0 + 2.0 * np.cos(2 * np.pi * ky / m)) / 6.0
        self.coef = np.real(np.fft.ifft2(np.fft.fft2(values) / np.outer(mx, my)))

    def evaluate(self, xi):
        """Return value, gradient (...,2) and Hessian (...,2,2) in fractional coordinates."""
        xi = np.asarray(xi, dtype=float)
        n, m = self.shape
        tx = xi[..., 0] * n
        ty = xi[..., 1] * m
        ix = np.floor(tx)
        iy = np.floor(ty)
        wx, dwx, d2wx = _bspline_weights(tx - ix)
        wy, dwy, d2wy = _bspline_weights(ty - iy)
        offs = np.arange(-1, 3)
        gx = (ix.astype(np.int64)[..., None] + offs) % n
        gy = (iy.astype(np.int64)[..., None] + offs) % m
        c = self.coef[gx[..., :, None], gy[..., None, :]]     # (...,4,4)

        def contract(a, b):
            return np.einsum("...a,...ab,...b->...", a, c, b)

        val = contract(wx, wy)
        grad = np.stack([contract(dwx, wy) * n, contract(wx, dwy) * m], axis=-1)
        hxx = contract(d2wx, wy) * n * n
        hyy = contract(wx, d2wy) * m * m
        hxy = contract(dwx, dwy) * n * m
        hess = np.stack([np.stack([hxx, hxy], -1), np.stack([hxy, hyy], -1)], -2)
        return val, grad, hess
