"""Flat-disk grayscale morphology and the line-enhancement preprocessor.

Pitch marks are thin bright features on grass.  A grayscale opening with a
flat disk wider than the marks erases them; subtracting the opening (the
top-hat) keeps only what the disk could not contain.  Taking the channel-wise
minimum of the three RGB top-hats then keeps only features that are bright in
every channel, i.e. white-ish ones.

All operators use replicate padding at the borders and preserve shape.
"""

from dataclasses import dataclass, field

import numpy as np

from ._accel import NUMBA_ENABLED, jit_kernel
from .errors import InvalidInputError
from .raster import as_gray, as_rgb

DEFAULT_SE_DIAMETER = 11


@dataclass(frozen=True)
class StructuringElement:
    """Flat disk footprint: pixel centers within Euclidean radius (d-1)/2."""

    diameter: int
    footprint: np.ndarray = field(repr=False)

    @property
    def radius(self) -> int:
        return (self.diameter - 1) // 2

    @property
    def offsets(self) -> np.ndarray:
        """(K, 2) array of (dr, dc) offsets inside the footprint."""
        rows, cols = np.nonzero(self.footprint)
        return np.stack([rows - self.radius, cols - self.radius], axis=1)


def disk(diameter: int = DEFAULT_SE_DIAMETER) -> StructuringElement:
    """Build the flat disk structuring element for an odd diameter >= 3."""
    if diameter < 3 or diameter % 2 == 0:
        raise InvalidInputError(f"disk diameter must be odd and >= 3, got {diameter}")
    radius = (diameter - 1) // 2
    dr, dc = np.mgrid[-radius : radius + 1, -radius : radius + 1]
    footprint = dr * dr + dc * dc <= radius * radius
    return StructuringElement(diameter=diameter, footprint=footprint)


def _erode_loop(image, out, offr, offc):
    height, width = image.shape
    for r in range(height):
        for c in range(width):
            best = np.inf
            for k in range(offr.shape[0]):
                rr = r + offr[k]
                cc = c + offc[k]
                # replicate border: clamp into the image
                if rr < 0:
                    rr = 0
                elif rr >= height:
                    rr = height - 1
                if cc < 0:
                    cc = 0
                elif cc >= width:
                    cc = width - 1
                v = image[rr, cc]
                if v < best:
                    best = v
            out[r, c] = best
    return out


def _dilate_loop(image, out, offr, offc):
    height, width = image.shape
    for r in range(height):
        for c in range(width):
            best = -np.inf
            for k in range(offr.shape[0]):
                rr = r + offr[k]
                cc = c + offc[k]
                if rr < 0:
                    rr = 0
                elif rr >= height:
                    rr = height - 1
                if cc < 0:
                    cc = 0
                elif cc >= width:
                    cc = width - 1
                v = image[rr, cc]
                if v > best:
                    best = v
            out[r, c] = best
    return out


_erode_kernel = jit_kernel(_erode_loop)
_dilate_kernel = jit_kernel(_dilate_loop)


def _extremum_numpy(image, se, reduce_fn):
    # Vectorized fallback: reduce over one edge-padded shifted view per offset.
    radius = se.radius
    padded = np.pad(image, radius, mode="edge")
    height, width = image.shape
    out = None
    for dr, dc in se.offsets:
        view = padded[radius + dr : radius + dr + height, radius + dc : radius + dc + width]
        out = view.copy() if out is None else reduce_fn(out, view)
    return out


def erode(image, se: StructuringElement) -> np.ndarray:
    """Grayscale erosion (windowed minimum over the disk, replicate border)."""
    img = as_gray(image)
    if NUMBA_ENABLED:
        offsets = se.offsets
        out = np.empty_like(img)
        return _erode_kernel(img, out, offsets[:, 0].copy(), offsets[:, 1].copy())
    return _extremum_numpy(img, se, np.minimum)


def dilate(image, se: StructuringElement) -> np.ndarray:
    """Grayscale dilation (windowed maximum over the disk, replicate border)."""
    img = as_gray(image)
    if NUMBA_ENABLED:
        offsets = se.offsets
        out = np.empty_like(img)
        return _dilate_kernel(img, out, offsets[:, 0].copy(), offsets[:, 1].copy())
    return _extremum_numpy(img, se, np.maximum)


def gray_open(image, se: StructuringElement) -> np.ndarray:
    """Grayscale opening: erosion followed by dilation with the same disk."""
    return dilate(erode(image, se), se)


def top_hat(image, se: StructuringElement) -> np.ndarray:
    """White top-hat: image minus its opening.  Nonnegative, bounded by the image."""
    img = as_gray(image)
    return img - gray_open(img, se)


def enhance_lines(image, se: StructuringElement | None = None) -> np.ndarray:
    """Channel-wise minimum of the three RGB top-hats.

    Keeps thin features that are bright in all channels (white marks);
    colored or wide features drop out in at least one channel.
    """
    rgb = as_rgb(image)
    if se is None:
        se = disk()
    return np.minimum(
        np.minimum(top_hat(rgb[:, :, 0], se), top_hat(rgb[:, :, 1], se)),
        top_hat(rgb[:, :, 2], se),
    )
