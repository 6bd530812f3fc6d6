"""Synthetic pitch scenes with exact ground truth.

World model: a standard 105 x 68 m pitch on the plane z = 0, x along its
length, y across, origin at the center mark.  A pinhole camera (no roll)
projects markings; a single-coefficient radial distortion acts on normalized
image coordinates after projection.  Ground truth centerlines come from the
same projected curves drawn 1 px wide, so they agree with the analytic
projection to raster rounding.
"""

import math
from dataclasses import dataclass, field, replace

import cv2
import numpy as np

from .dataset import DatasetItem, GroundTruthPrimitive
from .errors import RenderError

PITCH_LENGTH = 105.0
PITCH_WIDTH = 68.0
HALF_LENGTH = PITCH_LENGTH / 2.0
HALF_WIDTH = PITCH_WIDTH / 2.0
CIRCLE_RADIUS = 9.15
PENALTY_DEPTH = 16.5
PENALTY_HALF_WIDTH = 40.32 / 2.0
GOAL_AREA_DEPTH = 5.5
GOAL_AREA_HALF_WIDTH = 18.32 / 2.0
PENALTY_MARK = 11.0
GRASS_MARGIN = 6.0
STRIPE_PERIOD = 10.5

IMAGE_SIZE = (320, 180)
MIN_PRIMITIVE_PIXELS = 20

GRASS_DARK = (0.205, 0.405, 0.165)
GRASS_LIGHT = (0.235, 0.455, 0.195)
LINE_COLOR = (0.93, 0.93, 0.90)
STANDS_COLOR = (0.32, 0.295, 0.285)
BALL_COLOR = (0.95, 0.95, 0.93)


# ---------------------------------------------------------------------------
# World geometry

def _segment(x0, y0, x1, y1, step=0.1):
    n = max(int(math.ceil(math.hypot(x1 - x0, y1 - y0) / step)), 1)
    t = np.linspace(0.0, 1.0, n + 1)
    return np.stack([x0 + (x1 - x0) * t, y0 + (y1 - y0) * t], axis=1)


def _arc(cx, cy, radius, deg0, deg1, step_deg=0.25):
    n = max(int(math.ceil(abs(deg1 - deg0) / step_deg)), 8)
    a = np.deg2rad(np.linspace(deg0, deg1, n + 1))
    return np.stack([cx + radius * np.cos(a), cy + radius * np.sin(a)], axis=1)


def pitch_markings() -> list[tuple[str, str, np.ndarray]]:
    """All markings as (kind, name, world polyline) with no corner arcs."""
    curves = [
        ("line", "touch_south", _segment(-HALF_LENGTH, -HALF_WIDTH, HALF_LENGTH, -HALF_WIDTH)),
        ("line", "touch_north", _segment(-HALF_LENGTH, HALF_WIDTH, HALF_LENGTH, HALF_WIDTH)),
        ("line", "goal_west", _segment(-HALF_LENGTH, -HALF_WIDTH, -HALF_LENGTH, HALF_WIDTH)),
        ("line", "goal_east", _segment(HALF_LENGTH, -HALF_WIDTH, HALF_LENGTH, HALF_WIDTH)),
        ("line", "halfway", _segment(0.0, -HALF_WIDTH, 0.0, HALF_WIDTH)),
        ("ellipse", "center_circle", _arc(0.0, 0.0, CIRCLE_RADIUS, 0.0, 360.0)),
    ]
    # penalty arc: the part of the circle around the penalty mark lying
    # outside the penalty area
    phi = math.degrees(math.acos((PENALTY_DEPTH - PENALTY_MARK) / CIRCLE_RADIUS))
    for side, tag in ((-1.0, "west"), (1.0, "east")):
        goal_x = side * HALF_LENGTH
        front_pa = side * (HALF_LENGTH - PENALTY_DEPTH)
        front_ga = side * (HALF_LENGTH - GOAL_AREA_DEPTH)
        mark_x = side * (HALF_LENGTH - PENALTY_MARK)
        curves += [
            ("line", f"penalty_{tag}_front",
             _segment(front_pa, -PENALTY_HALF_WIDTH, front_pa, PENALTY_HALF_WIDTH)),
            ("line", f"penalty_{tag}_south",
             _segment(goal_x, -PENALTY_HALF_WIDTH, front_pa, -PENALTY_HALF_WIDTH)),
            ("line", f"penalty_{tag}_north",
             _segment(goal_x, PENALTY_HALF_WIDTH, front_pa, PENALTY_HALF_WIDTH)),
            ("line", f"goalarea_{tag}_front",
             _segment(front_ga, -GOAL_AREA_HALF_WIDTH, front_ga, GOAL_AREA_HALF_WIDTH)),
            ("line", f"goalarea_{tag}_south",
             _segment(goal_x, -GOAL_AREA_HALF_WIDTH, front_ga, -GOAL_AREA_HALF_WIDTH)),
            ("line", f"goalarea_{tag}_north",
             _segment(goal_x, GOAL_AREA_HALF_WIDTH, front_ga, GOAL_AREA_HALF_WIDTH)),
        ]
        if side < 0:
            arc = _arc(mark_x, 0.0, CIRCLE_RADIUS, -phi, phi)
        else:
            arc = _arc(mark_x, 0.0, CIRCLE_RADIUS, 180.0 - phi, 180.0 + phi)
        curves.append(("ellipse", f"arc_{tag}", arc))
    return curves


# ---------------------------------------------------------------------------
# Camera

@dataclass(frozen=True)
class Camera:
    """Pinhole camera above the pitch, no roll, radial distortion k1."""

    position: tuple[float, float, float]
    look_at: tuple[float, float, float]
    focal_px: float
    size: tuple[int, int] = IMAGE_SIZE
    k1: float = 0.0

    def __post_init__(self):
        if self.position[2] <= 0:
            raise RenderError("camera must be above the ground plane")
        fwd = np.subtract(self.look_at, self.position, dtype=np.float64)
        norm = np.linalg.norm(fwd)
        if norm < 1e-9 or abs(fwd[2] / norm) > 0.999:
            raise RenderError("camera orientation is degenerate")
        fwd = fwd / norm
        right = np.cross(fwd, (0.0, 0.0, 1.0))
        right /= np.linalg.norm(right)
        up = np.cross(right, fwd)
        object.__setattr__(self, "_basis", (right, up, fwd))
        if self.k1 < 0.0:
            # barrel distortion folds back beyond r* = sqrt(-1/(3 k1));
            # the frame corner must stay inside the invertible branch
            w, h = self.size
            corner = math.hypot(w / 2.0, h / 2.0) / self.focal_px
            r_star = math.sqrt(-1.0 / (3.0 * self.k1))
            if corner >= r_star * (1.0 + self.k1 * r_star * r_star):
                raise RenderError("k1 too strong for this field of view")

    @property
    def center(self) -> tuple[float, float]:
        w, h = self.size
        return ((w - 1) / 2.0, (h - 1) / 2.0)

    def project(self, points_xyz: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """World points -> (pixel uv, camera depth); caller culls depth <= 0."""
        right, up, fwd = self._basis
        rel = np.asarray(points_xyz, dtype=np.float64) - np.asarray(self.position)
        x = rel @ right
        y = rel @ up
        z = rel @ fwd
        with np.errstate(divide="ignore", invalid="ignore"):
            xn = x / z
            yn = y / z
        rn2 = xn * xn + yn * yn
        factor = 1.0 + self.k1 * rn2
        if self.k1 < 0.0:
            # beyond the fold radius the distortion model maps points back
            # into the frame; treat those as invisible
            factor = np.where(rn2 < -1.0 / (3.0 * self.k1), factor, np.nan)
        cx, cy = self.center
        u = cx + self.focal_px * xn * factor
        v = cy - self.focal_px * yn * factor
        return np.stack([u, v], axis=1), z

    def ground_coords(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Per-pixel world (x, y) on the ground plane and a validity mask."""
        right, up, fwd = self._basis
        w, h = self.size
        cx, cy = self.center
        uu, vv = np.meshgrid(np.arange(w, dtype=np.float64), np.arange(h, dtype=np.float64))
        xd = (uu - cx) / self.focal_px
        yd = (cy - vv) / self.focal_px
        if self.k1 != 0.0:
            rd = np.hypot(xd, yd)
            rn = rd.copy()
            for _ in range(6):
                f = rn * (1.0 + self.k1 * rn * rn) - rd
                rn = rn - f / (1.0 + 3.0 * self.k1 * rn * rn)
            scale = np.where(rd > 1e-12, rn / np.maximum(rd, 1e-12), 1.0)
            xn = xd * scale
            yn = yd * scale
        else:
            xn, yn = xd, yd
        direction = (
            xn[..., None] * right + yn[..., None] * up + np.ones_like(xn)[..., None] * fwd
        )
        dz = direction[..., 2]
        valid = dz < -1e-9
        with np.errstate(divide="ignore", invalid="ignore"):
            t = -self.position[2] / dz
        gx = self.position[0] + t * direction[..., 0]
        gy = self.position[1] + t * direction[..., 1]
        return gx, gy, valid


# ---------------------------------------------------------------------------
# Scene description

@dataclass(frozen=True)
class Occluder:
    """A player (upright ellipse anchored at its feet) or a ball."""

    kind: str
    position: tuple[float, float]
    color: tuple[float, float, float]
    height_m: float = 1.8
    width_m: float = 0.55
    radius_m: float = 0.22


@dataclass(frozen=True)
class Illumination:
    """Multiplicative light field over the pitch."""

    base: float = 1.0
    gradient_dir: tuple[float, float] = (1.0, 0.0)
    gradient_amp: float = 0.1
    shadow_polygon: tuple[tuple[float, float], ...] | None = None
    shadow_ratio: float = 1.0
    shadow_soft_px: float = 1.5


@dataclass(frozen=True)
class PitchScene:
    """Full deterministic recipe for one rendered frame."""

    name: str
    match: str
    camera: Camera
    illumination: Illumination = field(default_factory=Illumination)
    occluders: tuple[Occluder, ...] = ()
    base_thickness_px: float = 3.0
    noise_sigma: float = 0.015
    seed: int = 0
    zoom: str = "wide"
    tags: tuple[str, ...] = ()


# ---------------------------------------------------------------------------
# Rendering

def _visible_chunks(uv, depth, size):
    """Split a projected polyline into runs that lie safely in front of the
    camera and not absurdly far outside the frame."""
    w, h = size
    margin = 80
    ok = (
        (depth > 0.5)
        & (uv[:, 0] > -margin)
        & (uv[:, 0] < w + margin)
        & (uv[:, 1] > -margin)
        & (uv[:, 1] < h + margin)
        & np.isfinite(uv).all(axis=1)
    )
    chunks = []
    start = None
    for i, flag in enumerate(ok):
        if flag and start is None:
            start = i
        elif not flag and start is not None:
            if i - start >= 2:
                chunks.append((uv[start:i], depth[start:i]))
            start = None
    if start is not None and len(ok) - start >= 2:
        chunks.append((uv[start:], depth[start:]))
    return chunks


def _draw_polyline(canvas, uv, thickness, color_u8):
    pts = np.rint(uv * 8.0).astype(np.int32).reshape(-1, 1, 2)
    cv2.polylines(canvas, [pts], False, color_u8, thickness, cv2.LINE_AA, shift=3)


def _stroke_pieces(uv, depth, ref_depth, base_px):
    """Constant-thickness pieces whose width tracks 1/depth, clamped 3..9."""
    pieces = []
    n = uv.shape[0]
    step = 40
    for start in range(0, max(n - 1, 1), step):
        stop = min(start + step + 1, n)
        if stop - start < 2:
            break
        mean_depth = float(depth[start:stop].mean())
        px = int(np.clip(np.rint(base_px * ref_depth / mean_depth), 3, 9))
        pieces.append((uv[start:stop], px))
    return pieces


def _shadow_mask(camera, polygon, soft_px):
    pts_world = np.array([(x, y, 0.0) for x, y in polygon], dtype=np.float64)
    uv, depth = camera.project(pts_world)
    if (depth <= 0.5).any():
        raise RenderError("shadow polygon behind camera")
    w, h = camera.size
    mask = np.zeros((h, w), dtype=np.uint8)
    cv2.fillPoly(mask, [np.rint(uv).astype(np.int32).reshape(-1, 1, 2)], 255)
    blurred = cv2.GaussianBlur(mask.astype(np.float64), (0, 0), max(soft_px, 0.1))
    return blurred / 255.0


def _draw_occluder(canvas, camera, occ, ref_scale):
    foot = np.array([[occ.position[0], occ.position[1], 0.0]])
    if occ.kind == "ball":
        uv, depth = camera.project(foot)
        if depth[0] <= 1.0:
            return
        scale = camera.focal_px / depth[0]
        radius = max(int(round(occ.radius_m * scale)), 1)
        color = tuple(int(round(c * 255)) for c in occ.color)
        cv2.circle(canvas, tuple(np.rint(uv[0]).astype(int)), radius, color, -1, cv2.LINE_AA)
        return
    head = np.array([[occ.position[0], occ.position[1], occ.height_m]])
    uv_f, d_f = camera.project(foot)
    uv_h, d_h = camera.project(head)
    if d_f[0] <= 1.0 or d_h[0] <= 1.0:
        return
    mid = (uv_f[0] + uv_h[0]) / 2.0
    body = uv_h[0] - uv_f[0]
    length = np.linalg.norm(body)
    if length < 1.0:
        return
    width_px = max(occ.width_m * camera.focal_px / d_f[0], 1.5)
    angle = math.degrees(math.atan2(body[1], body[0]))
    color = tuple(int(round(c * 255)) for c in occ.color)
    cv2.ellipse(
        canvas,
        tuple(np.rint(mid).astype(int)),
        (max(int(round(length / 2.0)), 1), max(int(round(width_px / 2.0)), 1)),
        angle,
        0.0,
        360.0,
        color,
        -1,
        cv2.LINE_AA,
    )


def render(scene: PitchScene) -> DatasetItem:
    """Rasterize a scene into an annotated dataset item."""
    camera = scene.camera
    w, h = camera.size
    rng = np.random.default_rng(scene.seed)

    gx, gy, on_ground = camera.ground_coords()
    grass_x = HALF_LENGTH + GRASS_MARGIN
    grass_y = HALF_WIDTH + GRASS_MARGIN
    with np.errstate(invalid="ignore"):
        field_mask = (
            on_ground & (np.abs(gx) <= grass_x) & (np.abs(gy) <= grass_y)
        )
    if not field_mask.any():
        raise RenderError(f"scene {scene.name}: camera sees no pitch area")

    canvas = np.empty((h, w, 3), dtype=np.uint8)
    canvas[:] = tuple(int(round(c * 255)) for c in STANDS_COLOR)
    stripe = np.zeros((h, w), dtype=bool)
    stripe[field_mask] = (
        np.floor((gx[field_mask] + grass_x) / (STRIPE_PERIOD / 2.0)).astype(np.int64) % 2 == 0
    )
    dark = tuple(int(round(c * 255)) for c in GRASS_DARK)
    light = tuple(int(round(c * 255)) for c in GRASS_LIGHT)
    canvas[field_mask & stripe] = dark
    canvas[field_mask & ~stripe] = light

    ref_depth = float(camera.project(np.array([camera.look_at]))[1][0])
    line_u8 = tuple(int(round(c * 255)) for c in LINE_COLOR)

    primitives = []
    line_mask = np.zeros((h, w), dtype=np.uint8)
    for kind, name, world_xy in pitch_markings():
        pts = np.zeros((world_xy.shape[0], 3))
        pts[:, :2] = world_xy
        uv, depth = camera.project(pts)
        gt_canvas = np.zeros((h, w), dtype=np.uint8)
        for chunk_uv, chunk_depth in _visible_chunks(uv, depth, camera.size):
            for piece_uv, px in _stroke_pieces(chunk_uv, chunk_depth, ref_depth, scene.base_thickness_px):
                _draw_polyline(canvas, piece_uv, px, line_u8)
            ipts = np.rint(chunk_uv).astype(np.int32).reshape(-1, 1, 2)
            cv2.polylines(gt_canvas, [ipts], False, 255, 1, cv2.LINE_8)
        gt_canvas[~field_mask] = 0
        pixels = np.argwhere(gt_canvas > 0)
        if pixels.shape[0] >= MIN_PRIMITIVE_PIXELS:
            primitives.append(GroundTruthPrimitive(kind=kind, name=name, pixels=pixels))
            line_mask |= gt_canvas

    for occ in scene.occluders:
        _draw_occluder(canvas, camera, occ, ref_depth)

    img = canvas.astype(np.float64) / 255.0

    illum = scene.illumination
    dir_norm = math.hypot(*illum.gradient_dir)
    ux, uy = (illum.gradient_dir[0] / dir_norm, illum.gradient_dir[1] / dir_norm)
    proj = np.where(on_ground, gx * ux + gy * uy, 0.0)
    span = max(abs(grass_x * ux) + abs(grass_y * uy), 1e-6)
    light_map = illum.base * (1.0 + illum.gradient_amp * proj / span)
    light_map = np.where(field_mask, light_map, illum.base)
    if illum.shadow_polygon is not None:
        shade = _shadow_mask(camera, illum.shadow_polygon, illum.shadow_soft_px)
        light_map = light_map * (1.0 - (1.0 - illum.shadow_ratio) * shade)
    img *= light_map[..., None]

    texture = cv2.GaussianBlur(rng.normal(0.0, 1.0, (h, w)), (0, 0), 1.0)
    img[field_mask] *= (1.0 + 0.04 * texture[field_mask])[..., None]
    crowd = rng.normal(0.0, 0.05, (h, w, 3))
    img[~field_mask] += crowd[~field_mask]

    img = cv2.GaussianBlur(img, (0, 0), 0.7)
    sigma_map = scene.noise_sigma * (0.4 + 0.6 * np.clip(light_map, 0.0, 1.5))
    img += rng.normal(0.0, 1.0, (h, w, 3)) * sigma_map[..., None]
    img = np.clip(img, 0.0, 1.0)

    meta = {
        "stadium": scene.match,
        "camera_type": "end" if abs(camera.position[0]) > HALF_LENGTH else "master",
        "zoom": scene.zoom,
        "k1": camera.k1,
        "seed": scene.seed,
        "occluders": len(scene.occluders),
        "tags": list(scene.tags),
    }
    return DatasetItem(
        match=scene.match,
        name=scene.name,
        image=img,
        field_mask=field_mask,
        line_mask=line_mask > 0,
        primitives=tuple(primitives),
        meta=meta,
    )


def chord_sagitta(pixels: np.ndarray) -> float:
    """Max deviation of a pixel chain from the chord between its two most
    distant members; measures how bent a nominally straight marking is."""
    pts = np.asarray(pixels, dtype=np.float64).reshape(-1, 2)
    if pts.shape[0] < 3:
        return 0.0
    sample = pts[:: max(pts.shape[0] // 256, 1)]
    d2 = ((sample[:, None, :] - sample[None, :, :]) ** 2).sum(axis=2)
    i, j = np.unravel_index(np.argmax(d2), d2.shape)
    a, b = sample[i], sample[j]
    chord = b - a
    norm = np.linalg.norm(chord)
    if norm < 1e-9:
        return 0.0
    normal = np.array([-chord[1], chord[0]]) / norm
    return float(np.abs((pts - a) @ normal).max())


# ---------------------------------------------------------------------------
# Standard suite

def _players(rng, n, colors, window, avoid_curves, min_dist=2.5):
    """Place n players uniformly in a world window, off the curved markings."""
    out = []
    tries = 0
    while len(out) < n and tries < 200 * max(n, 1):
        tries += 1
        x = rng.uniform(window[0], window[1])
        y = rng.uniform(window[2], window[3])
        ok = True
        for curve in avoid_curves:
            gap = np.hypot(curve[:, 0] - x, curve[:, 1] - y).min()
            if gap < min_dist:
                ok = False
                break
        if ok:
            color = colors[len(out) % len(colors)]
            out.append(Occluder(kind="player", position=(x, y), color=color))
    return out


def standard_suite(master_seed: int = 0) -> list[PitchScene]:
    """20 deterministic scenes in 5 match groups covering wide/medium/tight
    zoom, both pitch ends, a sunlit/shadow split, moderate radial
    distortion, and 0-8 occluders per scene."""
    curves = [c for kind, _, c in pitch_markings() if kind == "ellipse"]
    seeds = [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(master_seed).spawn(20)]
    scenes = []

    def add(idx, match, name, cam, zoom, occluders=(), illum=None, thickness=3.0,
            noise=0.015, tags=()):
        scenes.append(
            PitchScene(
                name=f"s{idx:02d}_{name}",
                match=match,
                camera=cam,
                illumination=illum or Illumination(),
                occluders=tuple(occluders),
                base_thickness_px=thickness,
                noise_sigma=noise,
                seed=seeds[idx - 1],
                zoom=zoom,
                tags=tuple(tags),
            )
        )

    day = Illumination(base=1.0, gradient_dir=(1.0, 0.3), gradient_amp=0.12)
    red = (0.78, 0.12, 0.10)
    blue = (0.10, 0.16, 0.72)
    rng = np.random.default_rng(np.random.SeedSequence((master_seed, 0xA1)))

    add(1, "alpha_day", "sw_corner_med",
        Camera((-55.0, -39.0, 24.0), (-32.0, -25.5, 0.0), 420.0),
        "medium", _players(rng, 2, [red, blue], (-44, -26, -32, -20), curves),
        day, 3.0, 0.012, tags=("three_lines",))
    add(2, "alpha_day", "west_box_wide",
        Camera((-14.0, -58.0, 24.0), (-30.0, 2.0, 0.0), 300.0),
        "wide", _players(rng, 3, [red, blue], (-48, -12, -22, 22), curves),
        day, 3.0, 0.012)
    add(3, "alpha_day", "east_box_med",
        Camera((14.0, -58.0, 24.0), (30.0, 0.0, 0.0), 380.0),
        "medium", _players(rng, 3, [blue, red], (14, 48, -18, 18), curves),
        day, 3.0, 0.012)
    add(4, "alpha_day", "center_south_med",
        Camera((4.0, -56.0, 20.0), (2.0, -8.0, 0.0), 440.0),
        "medium", _players(rng, 4, [red, blue], (-14, 18, -26, 8), curves),
        day, 4.0, 0.012)

    tele = Illumination(base=1.0, gradient_dir=(0.8, -0.4), gradient_amp=0.10)
    add(5, "alpha_tele", "west_box_tight",
        Camera((-18.0, -60.0, 26.0), (-40.0, 4.0, 0.0), 600.0),
        "tight", _players(rng, 3, [red, blue], (-50, -28, -14, 16), curves),
        tele, 4.0, 0.015)
    add(6, "alpha_tele", "east_box_tight",
        Camera((18.0, -60.0, 26.0), (40.0, -2.0, 0.0), 620.0),
        "tight", _players(rng, 2, [blue, red], (28, 50, -14, 12), curves),
        tele, 4.0, 0.015)
    add(7, "alpha_tele", "north_touch_med",
        Camera((0.0, -60.0, 26.0), (2.0, 16.0, 0.0), 500.0),
        "medium", _players(rng, 5, [red, blue], (-20, 24, 0, 30), curves),
        tele, 4.0, 0.015)
    add(8, "alpha_tele", "west_mid_med",
        Camera((-8.0, -57.0, 22.0), (-20.0, -8.0, 0.0), 470.0),
        "medium", _players(rng, 3, [blue, red], (-34, -4, -26, 6), curves),
        tele, 3.0, 0.015)

    ends = Illumination(base=0.95, gradient_dir=(0.2, 1.0), gradient_amp=0.15)
    orange = (0.85, 0.45, 0.08)
    add(9, "beta_ends", "west_goal_wide",
        Camera((-75.0, -8.0, 18.0), (-38.0, -2.0, 0.0), 300.0, k1=-0.25),
        "wide", (), ends, 3.0, 0.015)
    add(10, "beta_ends", "west_goal_full",
        Camera((-78.0, 0.0, 20.0), (-45.0, 0.0, 0.0), 260.0, k1=-0.25),
        "wide", _players(rng, 1, [orange], (-30, -10, -20, 20), curves),
        ends, 3.0, 0.015, tags=("ten_lines",))
    add(11, "beta_ends", "west_high_touch",
        Camera((-70.0, 10.0, 17.0), (-36.0, 10.0, 0.0), 330.0, k1=-0.25),
        "medium", _players(rng, 2, [orange, blue], (-48, -18, -12, 26), curves),
        ends, 3.0, 0.015, tags=("sagitta",))
    add(12, "beta_ends", "east_goal_med",
        Camera((80.0, -12.0, 22.0), (42.0, -4.0, 0.0), 360.0, k1=-0.25),
        "medium", _players(rng, 3, [orange, blue], (26, 50, -20, 16), curves),
        ends, 4.0, 0.015)

    white = (0.92, 0.92, 0.92)
    yellow = (0.85, 0.80, 0.12)
    sun = Illumination(base=1.05, gradient_dir=(1.0, 0.15), gradient_amp=0.22)
    shadow_mid = Illumination(
        base=1.05, gradient_dir=(1.0, 0.15), gradient_amp=0.22,
        shadow_polygon=((-70.0, -42.0), (5.0, -42.0), (-25.0, 42.0), (-75.0, 42.0)),
        shadow_ratio=0.34, shadow_soft_px=1.2,
    )
    balls = [
        Occluder(kind="ball", position=(11.0, -5.0), color=BALL_COLOR, radius_m=0.3),
        Occluder(kind="ball", position=(16.0, 8.0), color=BALL_COLOR, radius_m=0.3),
    ]
    add(13, "gamma_sun", "sun_center",
        Camera((0.0, -58.0, 24.0), (0.0, 2.0, 0.0), 330.0),
        "wide",
        _players(rng, 6, [white, yellow], (-24, 24, -18, 22), curves) + balls,
        shadow_mid, 3.0, 0.018, tags=("sunlit_shadow",))
    add(14, "gamma_sun", "sun_west_box",
        Camera((-16.0, -58.0, 23.0), (-32.0, 0.0, 0.0), 380.0),
        "medium",
        _players(rng, 4, [white, yellow], (-48, -14, -18, 18), curves),
        replace(shadow_mid, shadow_polygon=((-72.0, -42.0), (-2.0, -42.0), (-32.0, 42.0), (-76.0, 42.0))),
        3.0, 0.018)
    add(15, "gamma_sun", "sun_east_box",
        Camera((16.0, -58.0, 23.0), (32.0, 2.0, 0.0), 400.0),
        "medium",
        _players(rng, 4, [white, yellow], (14, 48, -16, 18), curves),
        replace(shadow_mid, shadow_polygon=((2.0, -42.0), (74.0, -42.0), (70.0, 42.0), (30.0, 42.0)),
                shadow_ratio=0.38),
        4.0, 0.018)
    add(16, "gamma_sun", "sun_center_tight",
        Camera((6.0, -60.0, 26.0), (4.0, 4.0, 0.0), 560.0),
        "tight",
        _players(rng, 3, [white, yellow], (-10, 18, -8, 16), curves),
        replace(shadow_mid, shadow_polygon=((-30.0, -42.0), (30.0, -42.0), (14.0, 42.0), (-44.0, 42.0))),
        4.0, 0.018)

    night = Illumination(base=0.82, gradient_dir=(-0.5, 1.0), gradient_amp=0.06)
    maroon = (0.45, 0.10, 0.16)
    teal = (0.05, 0.45, 0.42)
    add(17, "delta_night", "night_east_mid",
        Camera((10.0, -55.0, 21.0), (28.0, 8.0, 0.0), 540.0),
        "tight", _players(rng, 6, [maroon, teal], (14, 42, -4, 20), curves),
        night, 4.0, 0.025)
    add(18, "delta_night", "night_west_mid",
        Camera((-12.0, -55.0, 21.0), (-30.0, -6.0, 0.0), 600.0),
        "tight", _players(rng, 5, [teal, maroon], (-44, -16, -18, 6), curves),
        night, 5.0, 0.025)
    add(19, "delta_night", "night_north",
        Camera((0.0, -60.0, 25.0), (-4.0, 14.0, 0.0), 500.0),
        "medium", _players(rng, 8, [maroon, teal], (-24, 16, 2, 28), curves),
        night, 4.0, 0.025)
    add(20, "delta_night", "night_arc_east",
        Camera((22.0, -62.0, 28.0), (41.0, 0.0, 0.0), 620.0),
        "tight", _players(rng, 2, [teal, maroon], (26, 38, -12, 12), curves),
        night, 4.0, 0.025)
    return scenes
