"""Richardson-Lucy estimation of the blur kernel between a ground truth and
its reconstruction.

Convolution is commutative, so ``reconstructed = original (*) kernel`` can be
solved for the kernel with ordinary RL by letting the known original play the
role of the point-spread function.  The kernel lives on a small odd window
centred on zero shift; everything else is periodic.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .core import ParameterError, as_image

__all__ = ["KernelEstimate", "estimate_kernel_rl", "kernel_width", "radial_profile"]


@dataclass
class KernelEstimate:
    kernel: np.ndarray
    iterations_run: int
    sigma_est: float
    fwhm: float
    objective: np.ndarray = field(repr=False)
    diverged: bool = False


def _to_nonnegative(original, reconstructed, margin=0.01):
    # common offset keeps y = x (*) k valid for unit-mass k
    x = original - original.mean()
    y = reconstructed - reconstructed.mean()
    lo = min(x.min(), y.min())
    span = max(x.max(), y.max()) - lo
    offset = -lo + margin * (span if span > 0 else 1.0)
    return x + offset, y + offset


def _window_index(size, shape):
    half = size // 2
    s = np.arange(-half, half + 1)
    return np.ix_(s % shape[0], s % shape[1])


def _kl(y, model):
    pos = y > 0
    return float(np.sum(y[pos] * np.log(y[pos] / model[pos])) - y.sum() + model.sum())


def estimate_kernel_rl(
    original,
    reconstructed,
    kernel_size: int = 15,
    iterations: int = 100,
    pixel_m: float = 1.0,
    patience: int = 5,
) -> KernelEstimate:
    """Estimate ``k`` with ``reconstructed ~ original (*) k`` by Richardson-Lucy.

    Both images are mean-subtracted and lifted by one common offset so that
    they are positive with equal totals; the multiplicative updates then keep
    the kernel non-negative with unit mass.  Starts from a uniform kernel.
    If the Kullback-Leibler objective rises for ``patience`` consecutive
    iterations the run stops and the best iterate is returned with
    ``diverged=True``.
    """
    x = as_image(original, "original")
    y = as_image(reconstructed, "reconstructed")
    if x.shape != y.shape:
        raise ParameterError(f"shape mismatch {x.shape} vs {y.shape}")
    kernel_size = int(kernel_size)
    if kernel_size < 1 or kernel_size % 2 == 0 or kernel_size > min(x.shape):
        raise ParameterError(f"kernel_size must be odd and <= {min(x.shape)}, got {kernel_size}")
    if int(iterations) < 1:
        raise ParameterError("iterations must be >= 1")

    x, y = _to_nonnegative(x, y)
    win = _window_index(kernel_size, x.shape)
    X = np.fft.fft2(x)
    k = np.full((kernel_size, kernel_size), 1.0 / kernel_size**2)

    def forward(kern):
        full = np.zeros(x.shape)
        full[win] = kern
        return np.fft.ifft2(X * np.fft.fft2(full)).real

    model = forward(k)
    best_k, best_obj = k, _kl(y, model)
    history = [best_obj]
    rises = 0
    diverged = False
    it = 0
    for it in range(1, int(iterations) + 1):
        ratio = y / model
        corr = np.fft.ifft2(np.fft.fft2(ratio) * np.conj(X)).real[win]
        k = k * corr / x.sum()
        model = forward(k)
        obj = _kl(y, model)
        rises = rises + 1 if obj > history[-1] else 0
        history.append(obj)
        if obj < best_obj:
            best_k, best_obj = k, obj
        if rises >= patience:
            diverged = True
            break
    if not diverged:
        best_k = k
    best_k = best_k / best_k.sum()
    sigma, fwhm = kernel_width(best_k, pixel_m)
    return KernelEstimate(best_k, it, sigma, fwhm, np.asarray(history), diverged)


def _centroid(kernel):
    m = np.arange(kernel.shape[0])[:, None]
    n = np.arange(kernel.shape[1])[None, :]
    return float((kernel * m).sum()), float((kernel * n).sum())


def radial_profile(kernel, step: float = 0.05, n_angles: int = 16):
    """Azimuthally averaged, bilinearly interpolated profile about the centroid.

    Returns ``(radius_px, value)``.
    """
    kernel = np.asarray(kernel, dtype=float)
    cm, cn = _centroid(kernel / kernel.sum())
    rmax = min(cm, cn, kernel.shape[0] - 1 - cm, kernel.shape[1] - 1 - cn)
    r = np.arange(0.0, rmax + 1e-9, step)
    theta = np.linspace(0, 2 * np.pi, n_angles, endpoint=False)
    coords = np.stack(
        [cm + r[:, None] * np.cos(theta), cn + r[:, None] * np.sin(theta)]
    ).reshape(2, -1)
    vals = ndimage.map_coordinates(kernel, coords, order=1, mode="constant")
    return r, vals.reshape(r.size, n_angles).mean(axis=1)


def kernel_width(kernel, pixel_m: float = 1.0) -> tuple[float, float]:
    """Gaussian-equivalent sigma and FWHM of a kernel, in units of ``pixel_m``.

    ``sigma`` is the root of the mean of the two per-axis second central
    moments; the FWHM comes from the half-maximum crossing of
    :func:`radial_profile`.
    """
    kernel = np.asarray(kernel, dtype=float)
    if np.any(kernel < 0):
        raise ParameterError("kernel has negative weights")
    mass = kernel.sum()
    if not mass > 0:
        raise ParameterError("kernel has zero mass")
    p = kernel / mass
    cm, cn = _centroid(p)
    m = np.arange(p.shape[0])[:, None] - cm
    n = np.arange(p.shape[1])[None, :] - cn
    var = 0.5 * ((p * m**2).sum() + (p * n**2).sum())
    sigma = float(np.sqrt(var)) * pixel_m

    r, prof = radial_profile(p)
    half = 0.5 * prof[0]
    below = np.nonzero(prof <= half)[0]
    if below.size == 0:
        r_half = r[-1]
    else:
        i = below[0]
        r0, r1, v0, v1 = r[i - 1], r[i], prof[i - 1], prof[i]
        r_half = r0 + (v0 - half) * (r1 - r0) / (v0 - v1) if v0 != v1 else r1
    return sigma, float(2.0 * r_half * pixel_m)
