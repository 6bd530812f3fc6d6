"""Geometric primitives and least-squares fits for pixel chains.

Lines are fitted by orthogonal (total least squares) regression: centroid
plus principal direction of the scatter matrix, which minimizes the rms of
perpendicular point-line distances.  Ellipses are fitted by the direct
least-squares conic method (eigenvector of a reduced scatter system under
the constraint 4AC - B^2 = 1, numerically stabilized by the split-matrix
formulation), with the Sampson distance serving as the point-wise error.

Point arguments are (row, col) pixel coordinates.  Fitted lines live in
(row, col) space; fitted ellipses store their geometry in (x, y) = (col,
row) axes with the major-axis angle measured from +x, in [0, pi).
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import FitError, InvalidInputError

#: Conic coefficient magnitudes below this are treated as degenerate.
_EPS = 1e-12


def _as_points(points) -> np.ndarray:
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] == 0:
        raise InvalidInputError(f"expected (N, 2) points, got shape {pts.shape}")
    if not np.all(np.isfinite(pts)):
        raise InvalidInputError("points must be finite")
    return pts


# ---------------------------------------------------------------------------
# Straight lines

@dataclass(frozen=True)
class StraightLine:
    """Line {p : normal . p = offset} in (row, col) coordinates.

    Canonical form: unit normal, offset >= 0; at offset == 0 the normal has
    n_row > 0, or n_row == 0 and n_col > 0.
    """

    normal: np.ndarray
    offset: float
    rmse: float = 0.0
    support: tuple[int, ...] = ()
    pixels: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def direction(self) -> np.ndarray:
        """Unit direction vector (perpendicular to the normal)."""
        return np.array([-self.normal[1], self.normal[0]])

    def distances(self, points) -> np.ndarray:
        """Orthogonal distances from points (row, col) to the line."""
        pts = _as_points(points)
        return np.abs(pts @ self.normal - self.offset)

    def endpoints(self) -> Optional[tuple[np.ndarray, np.ndarray]]:
        """Extremal support-pixel projections onto the line, if pixels known."""
        if self.pixels is None or len(self.pixels) == 0:
            return None
        t = self.pixels @ self.direction
        base = self.offset * self.normal
        return (base + t.min() * self.direction, base + t.max() * self.direction)


def _canonical_normal(normal: np.ndarray, offset: float) -> tuple[np.ndarray, float]:
    if offset < 0.0 or (
        offset == 0.0 and (normal[0] < 0.0 or (normal[0] == 0.0 and normal[1] < 0.0))
    ):
        return -normal, -offset
    return normal, offset


def fit_line(points) -> StraightLine:
    """Orthogonal regression line through (row, col) points.

    Needs >= 2 distinct points; all-coincident input raises FitError.
    """
    pts = _as_points(points)
    centroid = pts.mean(axis=0)
    centered = pts - centroid
    scatter = centered.T @ centered
    eigvals, eigvecs = np.linalg.eigh(scatter)
    if eigvals[1] <= _EPS:
        raise FitError("line fit needs at least two distinct points")
    # Largest-eigenvalue vector is the direction; the other one the normal.
    normal = eigvecs[:, 0]
    offset = float(normal @ centroid)
    normal, offset = _canonical_normal(normal, offset)
    rmse = float(np.sqrt(np.mean((pts @ normal - offset) ** 2)))
    return StraightLine(normal=normal, offset=offset, rmse=rmse)


# ---------------------------------------------------------------------------
# Ellipses

@dataclass(frozen=True)
class Ellipse:
    """Ellipse in (x, y) = (col, row) coordinates.

    ``conic`` holds (A, B, C, D, E, F) of Ax^2 + Bxy + Cy^2 + Dx + Ey + F = 0
    normalized to unit euclidean norm with A + C > 0; B^2 - 4AC < 0 holds.
    Semi-axes satisfy a >= b > 0; theta is the major-axis angle from +x in
    [0, pi).
    """

    conic: np.ndarray
    center: np.ndarray
    axes: tuple[float, float]
    theta: float
    rmse: float = 0.0
    support: tuple[int, ...] = ()
    pixels: Optional[np.ndarray] = field(default=None, repr=False)

    def sampson_distances(self, points) -> np.ndarray:
        """First-order (Sampson) point-to-ellipse distances for (row, col) points."""
        pts = _as_points(points)
        return sampson_distance(self.conic, pts)


def sampson_distance(conic: np.ndarray, points_rc: np.ndarray) -> np.ndarray:
    """|Q(p)| / ||grad Q(p)|| for the conic Q; points given as (row, col)."""
    a, b, c, d, e, f = conic
    x = points_rc[:, 1]
    y = points_rc[:, 0]
    q = a * x * x + b * x * y + c * y * y + d * x + e * y + f
    gx = 2.0 * a * x + b * y + d
    gy = b * x + 2.0 * c * y + e
    grad = np.hypot(gx, gy)
    grad = np.where(grad < _EPS, _EPS, grad)
    return np.abs(q) / grad


def _conic_to_geometry(conic: np.ndarray) -> tuple[np.ndarray, tuple[float, float], float]:
    a, b, c, d, e, f = conic
    m33 = np.array([[a, b / 2.0], [b / 2.0, c]])
    # B^2 - 4AC < 0 was checked upstream; det(m33) > 0 can still be tiny in
    # absolute terms because the unit-norm conic of a large ellipse has small
    # quadratic coefficients, so only the sign is tested here.
    if np.linalg.det(m33) <= 0.0:
        raise FitError("conic is not an ellipse")
    try:
        center = np.linalg.solve(m33, np.array([-d / 2.0, -e / 2.0]))
    except np.linalg.LinAlgError as exc:
        raise FitError("conic is not an ellipse") from exc
    # Conic value at the center; axes^2 = -qc / eigenvalue.
    qc = (
        a * center[0] ** 2
        + b * center[0] * center[1]
        + c * center[1] ** 2
        + d * center[0]
        + e * center[1]
        + f
    )
    eigvals, eigvecs = np.linalg.eigh(m33)
    if qc >= 0.0 or eigvals[0] <= 0.0:  # A + C > 0 makes both eigenvalues positive
        raise FitError("conic has no real ellipse points")
    axis_major = float(np.sqrt(-qc / eigvals[0]))
    axis_minor = float(np.sqrt(-qc / eigvals[1]))
    major_vec = eigvecs[:, 0]
    theta = float(np.arctan2(major_vec[1], major_vec[0]) % np.pi)
    return center, (axis_major, axis_minor), theta


def fit_ellipse(points) -> Ellipse:
    """Direct least-squares ellipse through (row, col) points.

    Minimizes the algebraic error under 4AC - B^2 = 1 via the stable
    split-scatter eigensystem; the input is centered and isotropically
    scaled first, and the conic is mapped back afterwards.  Needs >= 6
    points in non-degenerate position; otherwise raises FitError.
    """
    pts = _as_points(points)
    if pts.shape[0] < 6:
        raise FitError("ellipse fit needs at least 6 points")
    x_raw = pts[:, 1]
    y_raw = pts[:, 0]
    mx = x_raw.mean()
    my = y_raw.mean()
    dx = x_raw - mx
    dy = y_raw - my
    scale = np.sqrt((dx * dx + dy * dy).mean() / 2.0)
    if scale < _EPS:
        raise FitError("ellipse fit needs non-coincident points")
    u = dx / scale
    v = dy / scale

    d1 = np.stack([u * u, u * v, v * v], axis=1)
    d2 = np.stack([u, v, np.ones_like(u)], axis=1)
    s1 = d1.T @ d1
    s2 = d1.T @ d2
    s3 = d2.T @ d2
    try:
        t_mat = -np.linalg.solve(s3, s2.T)
    except np.linalg.LinAlgError as exc:
        raise FitError("degenerate point configuration") from exc
    m_red = s1 + s2 @ t_mat
    # Premultiply by inv(C1) for the constraint matrix C1 = [[0,0,2],[0,-1,0],[2,0,0]].
    m_red = np.array([m_red[2] / 2.0, -m_red[1], m_red[0] / 2.0])
    eigvals, eigvecs = np.linalg.eig(m_red)
    best = None
    for k in range(3):
        if abs(eigvals[k].imag) > 1e-8:
            continue
        vec = np.real(eigvecs[:, k])
        kappa = 4.0 * vec[0] * vec[2] - vec[1] ** 2
        if kappa > _EPS:
            best = vec / np.sqrt(kappa)
            break
    if best is None:
        raise FitError("no conic satisfying the ellipse constraint")
    a1 = best
    a2 = t_mat @ a1
    ap, bp, cp, dp, ep, fp = a1[0], a1[1], a1[2], a2[0], a2[1], a2[2]

    # Map the conic from normalized (u, v) back to (x, y).
    s = scale
    a = ap
    b = bp
    c = cp
    d = -2.0 * ap * mx - bp * my + s * dp
    e = -bp * mx - 2.0 * cp * my + s * ep
    f = (
        ap * mx * mx
        + bp * mx * my
        + cp * my * my
        - s * dp * mx
        - s * ep * my
        + s * s * fp
    )
    conic = np.array([a, b, c, d, e, f])
    conic /= np.linalg.norm(conic)
    if conic[0] + conic[2] < 0.0:
        conic = -conic
    if conic[1] ** 2 - 4.0 * conic[0] * conic[2] >= 0.0:
        raise FitError("fitted conic is not an ellipse")

    center, axes, theta = _conic_to_geometry(conic)
    rmse = float(np.sqrt(np.mean(sampson_distance(conic, pts) ** 2)))
    return Ellipse(conic=conic, center=center, axes=axes, theta=theta, rmse=rmse)


def arc_coverage_deg(ellipse: Ellipse, points, bin_deg: float = 5.0) -> float:
    """Angular extent (degrees) of the support on the fitted ellipse.

    Points are mapped to their parametric angle and counted into fixed-width
    angular bins; coverage is occupied bins times bin width.  A shallow arc
    of a huge ellipse covers only a few degrees, however many pixels it has.
    """
    pts = _as_points(points)
    cos_t = np.cos(ellipse.theta)
    sin_t = np.sin(ellipse.theta)
    x = pts[:, 1] - ellipse.center[0]
    y = pts[:, 0] - ellipse.center[1]
    # Rotate into the axis frame, normalize by the semi-axes.
    xr = (cos_t * x + sin_t * y) / ellipse.axes[0]
    yr = (-sin_t * x + cos_t * y) / ellipse.axes[1]
    phi = np.degrees(np.arctan2(yr, xr)) % 360.0
    n_bins = int(round(360.0 / bin_deg))
    occupied = np.unique((phi / bin_deg).astype(int) % n_bins)
    return float(occupied.size * bin_deg)


def ellipse_points(ellipse: Ellipse, n: int = 360) -> np.ndarray:
    """Sample n (row, col) points along the ellipse (for drawing/tests)."""
    phi = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
    cos_t = np.cos(ellipse.theta)
    sin_t = np.sin(ellipse.theta)
    x = ellipse.axes[0] * np.cos(phi)
    y = ellipse.axes[1] * np.sin(phi)
    col = ellipse.center[0] + cos_t * x - sin_t * y
    row = ellipse.center[1] + sin_t * x + cos_t * y
    return np.stack([row, col], axis=1)
