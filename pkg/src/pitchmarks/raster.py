"""Raster conventions, validation helpers and image file I/O.

Images are plain numpy arrays: grayscale ``(H, W)`` or RGB ``(H, W, 3)``
float64 with samples in [0, 1]; binary masks are ``(H, W)`` bool.  8-bit
files map to [0, 1] by dividing by 255.  Probability images round-trip
through 16-bit PNG as ``round(value * 65535)``.
"""

import os

import cv2
import numpy as np

from .errors import InvalidInputError


def as_gray(image) -> np.ndarray:
    """Validate and return a grayscale image as float64 in [0, 1]."""
    arr = np.asarray(image, dtype=np.float64)
    if arr.ndim != 2 or arr.size == 0:
        raise InvalidInputError(f"expected nonempty (H, W) image, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)) or arr.min() < 0.0 or arr.max() > 1.0:
        raise InvalidInputError("grayscale samples must be finite and within [0, 1]")
    return arr


def as_rgb(image) -> np.ndarray:
    """Validate and return an RGB image as float64 in [0, 1]."""
    arr = np.asarray(image, dtype=np.float64)
    if arr.ndim != 3 or arr.shape[2] != 3 or arr.shape[0] == 0 or arr.shape[1] == 0:
        raise InvalidInputError(f"expected (H, W, 3) image, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)) or arr.min() < 0.0 or arr.max() > 1.0:
        raise InvalidInputError("RGB samples must be finite and within [0, 1]")
    return arr


def as_mask(mask) -> np.ndarray:
    """Validate and return a binary mask as a bool array."""
    arr = np.asarray(mask)
    if arr.ndim != 2 or arr.size == 0:
        raise InvalidInputError(f"expected nonempty (H, W) mask, got shape {arr.shape}")
    if arr.dtype != np.bool_:
        if not np.isin(arr, (0, 1)).all():
            raise InvalidInputError("mask values must be boolean or 0/1")
        arr = arr.astype(bool)
    return arr


def check_same_shape(a: np.ndarray, *others: np.ndarray) -> None:
    for b in others:
        if a.shape[:2] != b.shape[:2]:
            raise InvalidInputError(f"shape mismatch: {a.shape[:2]} vs {b.shape[:2]}")


# ---------------------------------------------------------------------------
# PNG

def read_image(path) -> np.ndarray:
    """Read a PNG (or any cv2-supported) image as float RGB or grayscale."""
    raw = cv2.imread(os.fspath(path), cv2.IMREAD_UNCHANGED)
    if raw is None:
        raise InvalidInputError(f"cannot read image: {path}")
    if raw.ndim == 3:
        if raw.shape[2] == 4:
            raw = raw[:, :, :3]
        raw = raw[:, :, ::-1]  # BGR -> RGB
    scale = 65535.0 if raw.dtype == np.uint16 else 255.0
    return raw.astype(np.float64) / scale


def write_image(path, image) -> None:
    """Write a [0, 1] float image (gray or RGB) as an 8-bit PNG."""
    arr = np.asarray(image, dtype=np.float64)
    arr = as_rgb(arr) if arr.ndim == 3 else as_gray(arr)
    data = np.rint(arr * 255.0).astype(np.uint8)
    if data.ndim == 3:
        data = data[:, :, ::-1]
    if not cv2.imwrite(os.fspath(path), data):
        raise InvalidInputError(f"cannot write image: {path}")


def read_mask(path) -> np.ndarray:
    """Read a 0/255 PNG mask."""
    raw = cv2.imread(os.fspath(path), cv2.IMREAD_GRAYSCALE)
    if raw is None:
        raise InvalidInputError(f"cannot read mask: {path}")
    return raw > 127


def write_mask(path, mask) -> None:
    """Write a bool mask as a 0/255 PNG."""
    arr = as_mask(mask)
    if not cv2.imwrite(os.fspath(path), arr.astype(np.uint8) * 255):
        raise InvalidInputError(f"cannot write mask: {path}")


def read_probability(path) -> np.ndarray:
    """Read a probability image stored as 16-bit PNG."""
    raw = cv2.imread(os.fspath(path), cv2.IMREAD_UNCHANGED)
    if raw is None or raw.ndim != 2:
        raise InvalidInputError(f"cannot read probability image: {path}")
    if raw.dtype != np.uint16:
        raise InvalidInputError(f"probability image must be 16-bit: {path}")
    return raw.astype(np.float64) / 65535.0


def write_probability(path, prob) -> None:
    """Write a [0, 1] probability image as 16-bit PNG (value * 65535)."""
    arr = as_gray(prob)
    data = np.rint(arr * 65535.0).astype(np.uint16)
    if not cv2.imwrite(os.fspath(path), data):
        raise InvalidInputError(f"cannot write probability image: {path}")


# ---------------------------------------------------------------------------
# Run-length pixel sets (used by the JSON primitive formats)

def pixels_to_runs(pixels: np.ndarray) -> list[list[int]]:
    """Encode (N, 2) integer pixels as sorted [row, col_start, length] runs."""
    pts = np.asarray(pixels, dtype=np.int64)
    if pts.size == 0:
        return []
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    pts = pts[order]
    runs = []
    row, start, prev = int(pts[0, 0]), int(pts[0, 1]), int(pts[0, 1])
    for r, c in pts[1:]:
        r, c = int(r), int(c)
        if r == row and c == prev + 1:
            prev = c
            continue
        if r == row and c == prev:
            continue
        runs.append([row, start, prev - start + 1])
        row, start, prev = r, c, c
    runs.append([row, start, prev - start + 1])
    return runs


def runs_to_pixels(runs) -> np.ndarray:
    """Decode [row, col_start, length] runs back to (N, 2) pixels."""
    coords = []
    for row, start, length in runs:
        for c in range(start, start + length):
            coords.append((row, c))
    if not coords:
        return np.empty((0, 2), dtype=np.int64)
    return np.array(coords, dtype=np.int64)


# ---------------------------------------------------------------------------
# Binary PPM (P6) / PGM (P5)

def _read_netpbm_header(fh):
    # Header tokens may be separated by whitespace and '#' comments.
    tokens = []
    while len(tokens) < 4:
        line = fh.readline()
        if not line:
            raise InvalidInputError("truncated PPM/PGM header")
        line = line.split(b"#", 1)[0]
        tokens.extend(line.split())
    magic = tokens[0].decode("ascii")
    width, height, maxval = (int(t) for t in tokens[1:4])
    if maxval <= 0 or maxval > 255:
        raise InvalidInputError(f"unsupported PPM/PGM maxval {maxval}")
    return magic, width, height, maxval


def read_netpbm(path) -> np.ndarray:
    """Read a binary PPM (P6, returns RGB) or PGM (P5, returns grayscale)."""
    with open(path, "rb") as fh:
        magic, width, height, maxval = _read_netpbm_header(fh)
        channels = {"P6": 3, "P5": 1}.get(magic)
        if channels is None:
            raise InvalidInputError(f"unsupported netpbm magic {magic!r}")
        data = fh.read(width * height * channels)
    if len(data) != width * height * channels:
        raise InvalidInputError(f"truncated netpbm payload: {path}")
    arr = np.frombuffer(data, dtype=np.uint8).astype(np.float64) / maxval
    if channels == 3:
        return arr.reshape(height, width, 3)
    return arr.reshape(height, width)


def write_netpbm(path, image) -> None:
    """Write RGB as binary PPM (P6) or grayscale as binary PGM (P5)."""
    arr = np.asarray(image, dtype=np.float64)
    arr = as_rgb(arr) if arr.ndim == 3 else as_gray(arr)
    magic = b"P6" if arr.ndim == 3 else b"P5"
    height, width = arr.shape[:2]
    payload = np.rint(arr * 255.0).astype(np.uint8).tobytes()
    with open(path, "wb") as fh:
        fh.write(magic + b"\n%d %d\n255\n" % (width, height))
        fh.write(payload)
