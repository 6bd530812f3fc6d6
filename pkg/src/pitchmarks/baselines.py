"""Reference edge/line detectors the watershed pipeline is compared against.

All detectors expose a response image normalized to [0, 1] by its
theoretical maximum, and a mask obtained as ``response > threshold``, so
threshold sweeps are comparable across methods and higher thresholds always
yield subset masks.
"""

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from ._accel import NUMBA_ENABLED, jit_kernel
from .errors import InvalidInputError
from .morphology import disk, enhance_lines
from .raster import as_gray, as_mask, as_rgb

SOBEL_X = np.array([[-1.0, 0.0, 1.0], [-2.0, 0.0, 2.0], [-1.0, 0.0, 1.0]])
SOBEL_Y = SOBEL_X.T
#: Per-component response of an all-0/all-1 split is at most 4, so the
#: magnitude is bounded by 4*sqrt(2).
_SOBEL_MAX = 4.0 * np.sqrt(2.0)

DEFAULT_LOG_SIGMA = 2.0


# ---------------------------------------------------------------------------
# Sobel

def sobel_response(gray) -> np.ndarray:
    """Normalized Sobel gradient magnitude (replicate border)."""
    img = as_gray(gray)
    gx = ndimage.convolve(img, SOBEL_X, mode="nearest")
    gy = ndimage.convolve(img, SOBEL_Y, mode="nearest")
    return np.hypot(gx, gy) / _SOBEL_MAX


def sobel_edges(gray, threshold: float) -> np.ndarray:
    """Threshold the normalized Sobel gradient magnitude."""
    return sobel_response(gray) > threshold


# ---------------------------------------------------------------------------
# Laplacian of Gaussian

def log_kernel(sigma: float = DEFAULT_LOG_SIGMA) -> np.ndarray:
    """Sampled LoG kernel, radius 3*sigma, adjusted to zero sum."""
    if sigma <= 0:
        raise InvalidInputError("sigma must be positive")
    radius = int(np.ceil(3.0 * sigma))
    y, x = np.mgrid[-radius : radius + 1, -radius : radius + 1].astype(np.float64)
    r2 = x * x + y * y
    s2 = sigma * sigma
    kernel = (r2 - 2.0 * s2) / (s2 * s2) * np.exp(-r2 / (2.0 * s2))
    kernel -= kernel.mean()  # zero response on flat patches
    return kernel


def log_response(gray, sigma: float = DEFAULT_LOG_SIGMA) -> np.ndarray:
    """LoG response normalized by the kernel's positive mass (range [-1, 1])."""
    img = as_gray(gray)
    kernel = log_kernel(sigma)
    positive_mass = kernel[kernel > 0].sum()
    return ndimage.convolve(img, kernel, mode="nearest") / positive_mass


def log_crossing_strength(gray, sigma: float = DEFAULT_LOG_SIGMA) -> np.ndarray:
    """Zero-crossing strength: for each opposite-sign 4-neighbor pair the
    response jump |r_p - r_q| is credited to the pixel with smaller |r|."""
    resp = log_response(gray, sigma)
    strength = np.zeros_like(resp)
    for axis in (0, 1):
        a = resp if axis == 0 else resp.T
        s = strength if axis == 0 else strength.T
        p, q = a[:-1, :], a[1:, :]
        crossing = p * q < 0.0
        jump = np.abs(p - q)
        p_smaller = np.abs(p) <= np.abs(q)
        first = crossing & p_smaller
        second = crossing & ~p_smaller
        s[:-1, :][first] = np.maximum(s[:-1, :][first], jump[first])
        s[1:, :][second] = np.maximum(s[1:, :][second], jump[second])
    return strength


def log_edges(gray, threshold: float, sigma: float = DEFAULT_LOG_SIGMA) -> np.ndarray:
    """Zero crossings of the LoG response with jump strength above threshold."""
    return log_crossing_strength(gray, sigma) > threshold


# ---------------------------------------------------------------------------
# Thresholded top-hat

def tophat_threshold(rgb, threshold: float, se_diameter: int | None = None) -> np.ndarray:
    """Threshold the min-channel top-hat line enhancement directly."""
    se = disk() if se_diameter is None else disk(se_diameter)
    return enhance_lines(as_rgb(rgb), se) > threshold


# ---------------------------------------------------------------------------
# Hough transform

@dataclass(frozen=True)
class HoughLine:
    """Line col*cos(theta) + row*sin(theta) = rho.

    theta is in [0, pi); rho is signed (a nonnegative-rho convention cannot
    represent every line once theta is restricted to a half turn).  ``votes``
    is the accumulator count of the peak.
    """

    theta: float
    rho: float
    votes: int

    def distances(self, points_rc: np.ndarray) -> np.ndarray:
        pts = np.asarray(points_rc, dtype=np.float64)
        return np.abs(
            pts[:, 1] * np.cos(self.theta) + pts[:, 0] * np.sin(self.theta) - self.rho
        )

    def support_pixels(self, mask, tol_px: float = 2.0) -> np.ndarray:
        """Mask pixels within tol_px of the line (its pixel-level footprint)."""
        m = as_mask(mask)
        rows, cols = np.nonzero(m)
        pts = np.stack([rows, cols], axis=1)
        return pts[self.distances(pts) <= tol_px]


def _vote_loop(rows, cols, cos_t, sin_t, acc, rho_offset):
    n_theta = cos_t.shape[0]
    for i in range(rows.shape[0]):
        y = rows[i]
        x = cols[i]
        for t in range(n_theta):
            rho = np.rint(x * cos_t[t] + y * sin_t[t])
            acc[t, int(rho) + rho_offset] += 1
    return acc


_vote_kernel = jit_kernel(_vote_loop)


def hough_accumulator(mask) -> tuple[np.ndarray, np.ndarray, int]:
    """Vote mask pixels into a (180, n_rho) accumulator with 1 deg x 1 px bins.

    Returns (accumulator, thetas, rho_offset); bin (t, k) covers angle
    thetas[t] and signed distance k - rho_offset.
    """
    m = as_mask(mask)
    rows, cols = np.nonzero(m)
    thetas = np.deg2rad(np.arange(180.0))
    rho_max = int(np.ceil(np.hypot(*m.shape)))
    acc = np.zeros((180, 2 * rho_max + 1), dtype=np.int64)
    if rows.size == 0:
        return acc, thetas, rho_max
    cos_t = np.cos(thetas)
    sin_t = np.sin(thetas)
    if NUMBA_ENABLED:
        acc = _vote_kernel(
            rows.astype(np.float64), cols.astype(np.float64), cos_t, sin_t, acc, rho_max
        )
    else:
        for t in range(180):
            rho_idx = np.rint(cols * cos_t[t] + rows * sin_t[t]).astype(np.int64) + rho_max
            np.add.at(acc[t], rho_idx, 1)
    return acc, thetas, rho_max


def hough_lines(mask, n_lines: int) -> list[HoughLine]:
    """Strongest accumulator peaks after 5x5 non-maximum suppression.

    A bin survives when no 5x5 neighbor outvotes it and no equal-voted
    neighbor precedes it in scan order; peaks are ranked by (votes desc,
    theta index, rho index) and the top ``n_lines`` returned (fewer when the
    accumulator has fewer peaks).  Voting is additive, so the result does
    not depend on pixel enumeration order.
    """
    if n_lines < 1:
        raise InvalidInputError("n_lines must be >= 1")
    acc, thetas, rho_offset = hough_accumulator(mask)
    footprint = np.ones((5, 5), dtype=bool)
    local_max = ndimage.maximum_filter(acc, footprint=footprint, mode="constant", cval=0)
    candidates = np.argwhere((acc > 0) & (acc == local_max))
    peaks = []
    for t_idx, r_idx in candidates:
        window = acc[
            max(t_idx - 2, 0) : t_idx + 3, max(r_idx - 2, 0) : r_idx + 3
        ]
        ties = np.argwhere(window == acc[t_idx, r_idx])
        ties[:, 0] += max(t_idx - 2, 0)
        ties[:, 1] += max(r_idx - 2, 0)
        first = min(map(tuple, ties))
        if (t_idx, r_idx) == first:
            peaks.append((int(acc[t_idx, r_idx]), int(t_idx), int(r_idx)))
    peaks.sort(key=lambda p: (-p[0], p[1], p[2]))
    return [
        HoughLine(theta=float(thetas[t]), rho=float(r - rho_offset), votes=v)
        for v, t, r in peaks[:n_lines]
    ]
