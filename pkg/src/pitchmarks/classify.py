"""Classification of a segmented line mask into straight lines and ellipses.

Stages, each exposed as its own function:

1. ``extract_regions``: thin the mask to one-pixel chains, delete
   intersection pixels (more than two neighbors), and collect 8-connected
   regions with an ordered pixel chain each.
2. ``split_region`` / ``initial_classify``: recursively bisect chains that no
   single line explains, then label every sufficiently large piece as line
   or ellipse by comparing fit errors; small pieces stay unassigned.
3. ``merge_lines``: greedily merge collinear line groups (absorbing small
   unassigned fragments) while the joint fit stays accurate.
4. ``merge_ellipses``: greedily merge ellipse groups with any group whose
   pixels the joint ellipse explains at least as well as its current model.
5. ``refine``: drop support pixels far from their model, refit once, drop
   primitives that lost too much support, and label every input-mask pixel.

An ellipse hypothesis is only admitted when the support spans enough angular
extent of the fitted ellipse; a shallow arc (e.g. a long straight mark bent
by lens distortion) fits some enormous ellipse almost perfectly, but its
parameters are not identifiable from the arc, so such regions are treated as
line material.
"""

import json
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np
from scipy import ndimage

from ._accel import NUMBA_ENABLED, jit_kernel
from .errors import FitError, InvalidInputError
from .fitting import (
    Ellipse,
    StraightLine,
    arc_coverage_deg,
    fit_ellipse,
    fit_line,
    sampson_distance,
)
from .raster import as_mask, pixels_to_runs, runs_to_pixels

DEFAULT_RMSE_LINE = 2.0
DEFAULT_RMSE_MERGE = 4.0
DEFAULT_MIN_REGION = 50
DEFAULT_MIN_ARC_DEG = 60.0
#: Merge candidates must have bounding boxes within this fraction of the
#: image diagonal of each other.
BBOX_GATE_FRACTION = 0.25
#: An ellipse may absorb another group only if the joint rmse is within this
#: many pixels of the best of the two current fits.
CAPTURE_SLACK = 1.0

RESULT_SCHEMA_VERSION = 1

_EIGHT = np.ones((3, 3), dtype=int)


# ---------------------------------------------------------------------------
# Thinning (Zhang-Suen)

def _thin_phase_loop(img, flags, phase):
    # One Zhang-Suen subiteration; deletions are collected into flags so the
    # pass acts simultaneously.  Returns the number of flagged pixels.
    height, width = img.shape
    count = 0
    for r in range(height):
        for c in range(width):
            if img[r, c] == 0:
                continue
            p2 = img[r - 1, c] if r > 0 else 0
            p3 = img[r - 1, c + 1] if (r > 0 and c + 1 < width) else 0
            p4 = img[r, c + 1] if c + 1 < width else 0
            p5 = img[r + 1, c + 1] if (r + 1 < height and c + 1 < width) else 0
            p6 = img[r + 1, c] if r + 1 < height else 0
            p7 = img[r + 1, c - 1] if (r + 1 < height and c > 0) else 0
            p8 = img[r, c - 1] if c > 0 else 0
            p9 = img[r - 1, c - 1] if (r > 0 and c > 0) else 0
            b = p2 + p3 + p4 + p5 + p6 + p7 + p8 + p9
            if b < 2 or b > 6:
                continue
            a = 0
            if p2 == 0 and p3 == 1:
                a += 1
            if p3 == 0 and p4 == 1:
                a += 1
            if p4 == 0 and p5 == 1:
                a += 1
            if p5 == 0 and p6 == 1:
                a += 1
            if p6 == 0 and p7 == 1:
                a += 1
            if p7 == 0 and p8 == 1:
                a += 1
            if p8 == 0 and p9 == 1:
                a += 1
            if p9 == 0 and p2 == 1:
                a += 1
            if a != 1:
                continue
            if phase == 0:
                if p2 * p4 * p6 != 0 or p4 * p6 * p8 != 0:
                    continue
            else:
                if p2 * p4 * p8 != 0 or p2 * p6 * p8 != 0:
                    continue
            flags[r, c] = 1
            count += 1
    return count


def _prune_redundant_loop(img):
    # Reduce a thinned stroke to a minimal 8-connected curve.  Thinning can
    # leave staircase corners carrying both an axial and a diagonal neighbor;
    # such pixels have 3 "neighbors" without being real junctions and would
    # shatter smooth chains once intersections are deleted.  A pixel is
    # removed (sequentially, row-major, repeated until stable) when it has
    # >= 2 neighbors and its Yokoi 8-connectivity number is 1, i.e. removal
    # does not disconnect or shorten anything.
    height, width = img.shape
    removed_total = 0
    changed = True
    while changed:
        changed = False
        for r in range(height):
            for c in range(width):
                if img[r, c] == 0:
                    continue
                # ring in the order E, NE, N, NW, W, SW, S, SE
                x1 = img[r, c + 1] if c + 1 < width else 0
                x2 = img[r - 1, c + 1] if (r > 0 and c + 1 < width) else 0
                x3 = img[r - 1, c] if r > 0 else 0
                x4 = img[r - 1, c - 1] if (r > 0 and c > 0) else 0
                x5 = img[r, c - 1] if c > 0 else 0
                x6 = img[r + 1, c - 1] if (r + 1 < height and c > 0) else 0
                x7 = img[r + 1, c] if r + 1 < height else 0
                x8 = img[r + 1, c + 1] if (r + 1 < height and c + 1 < width) else 0
                degree = x1 + x2 + x3 + x4 + x5 + x6 + x7 + x8
                if degree < 2:
                    continue
                c8 = (
                    (1 - x1) - (1 - x1) * (1 - x2) * (1 - x3)
                    + (1 - x3) - (1 - x3) * (1 - x4) * (1 - x5)
                    + (1 - x5) - (1 - x5) * (1 - x6) * (1 - x7)
                    + (1 - x7) - (1 - x7) * (1 - x8) * (1 - x1)
                )
                if c8 == 1:
                    img[r, c] = 0
                    removed_total += 1
                    changed = True
    return removed_total


_thin_phase_kernel = jit_kernel(_thin_phase_loop)
_prune_redundant_kernel = jit_kernel(_prune_redundant_loop)


def _thin_phase_numpy(img: np.ndarray, phase: int) -> np.ndarray:
    padded = np.pad(img, 1)
    p2 = padded[:-2, 1:-1]
    p3 = padded[:-2, 2:]
    p4 = padded[1:-1, 2:]
    p5 = padded[2:, 2:]
    p6 = padded[2:, 1:-1]
    p7 = padded[2:, :-2]
    p8 = padded[1:-1, :-2]
    p9 = padded[:-2, :-2]
    ring = (p2, p3, p4, p5, p6, p7, p8, p9, p2)
    b = sum(ring[:-1])
    a = sum(((ring[i] == 0) & (ring[i + 1] == 1) for i in range(8)), np.zeros_like(img))
    cond = (img == 1) & (b >= 2) & (b <= 6) & (a == 1)
    if phase == 0:
        cond &= (p2 * p4 * p6 == 0) & (p4 * p6 * p8 == 0)
    else:
        cond &= (p2 * p4 * p8 == 0) & (p2 * p6 * p8 == 0)
    return cond


def skeletonize(mask) -> np.ndarray:
    """Thin to minimal one-pixel-wide, 8-connected strokes.

    Zhang-Suen thinning followed by redundant-corner pruning, so mid-curve
    pixels end with exactly two neighbors and degree > 2 only happens at
    real junctions.
    """
    img = as_mask(mask).astype(np.uint8)
    if NUMBA_ENABLED:
        flags = np.zeros_like(img)
        while True:
            changed = 0
            for phase in (0, 1):
                flags[:] = 0
                changed += _thin_phase_kernel(img, flags, phase)
                img[flags == 1] = 0
            if changed == 0:
                break
        _prune_redundant_kernel(img)
        return img.astype(bool)
    while True:
        changed = 0
        for phase in (0, 1):
            cond = _thin_phase_numpy(img, phase)
            changed += int(cond.sum())
            img[cond] = 0
        if changed == 0:
            break
    _prune_redundant_loop(img)
    return img.astype(bool)


# ---------------------------------------------------------------------------
# Regions

@dataclass(frozen=True)
class Region:
    """An 8-connected chain of skeleton pixels with at most 2 neighbors each."""

    region_id: int
    chain: np.ndarray  # (N, 2) int, ordered walk; consecutive rows are 8-neighbors

    @property
    def size(self) -> int:
        return int(self.chain.shape[0])

    @property
    def pixels(self) -> np.ndarray:
        return self.chain

    def bbox(self) -> tuple[int, int, int, int]:
        """(rmin, cmin, rmax, cmax) of the support."""
        return (
            int(self.chain[:, 0].min()),
            int(self.chain[:, 1].min()),
            int(self.chain[:, 0].max()),
            int(self.chain[:, 1].max()),
        )


def _order_chain(pixels: np.ndarray) -> np.ndarray:
    """Order the pixels of a degree-<=2 component into a walk."""
    coords = [tuple(p) for p in pixels.tolist()]
    coord_set = set(coords)
    neighbors = {}
    for r, c in coords:
        adj = []
        for dr in (-1, 0, 1):
            for dc in (-1, 0, 1):
                if dr == 0 and dc == 0:
                    continue
                q = (r + dr, c + dc)
                if q in coord_set:
                    adj.append(q)
        neighbors[(r, c)] = sorted(adj)
    endpoints = sorted(p for p, adj in neighbors.items() if len(adj) <= 1)
    start = endpoints[0] if endpoints else min(coords)
    chain = [start]
    visited = {start}
    current = start
    while True:
        nxt = [q for q in neighbors[current] if q not in visited]
        if not nxt:
            break
        current = nxt[0]
        chain.append(current)
        visited.add(current)
    return np.array(chain, dtype=np.int64)


def extract_regions(mask) -> list[Region]:
    """Thin the mask, delete intersection pixels, return ordered chain regions.

    Intersections are skeleton pixels with more than two 8-neighbors; all are
    deleted simultaneously, so the surviving components are simple paths or
    simple cycles and each gets a deterministic ordered chain (paths walk
    from the lexicographically smallest endpoint, cycles start at the
    smallest pixel).
    """
    skeleton = skeletonize(mask)
    neighbor_count = ndimage.convolve(
        skeleton.astype(np.uint8), _EIGHT, mode="constant", cval=0
    ) - skeleton.astype(np.uint8)
    pruned = skeleton & (neighbor_count <= 2)
    labels, n_comp = ndimage.label(pruned, structure=_EIGHT)
    regions = []
    for k in range(1, n_comp + 1):
        rows, cols = np.nonzero(labels == k)
        chain = _order_chain(np.stack([rows, cols], axis=1))
        regions.append(Region(region_id=k, chain=chain))
    return regions


# ---------------------------------------------------------------------------
# Splitting

def _split_chain(chain: np.ndarray, rmse_max: float, min_size: int) -> list[np.ndarray]:
    if chain.shape[0] < max(min_size, 2):
        return [chain]
    line = fit_line(chain)
    if line.rmse <= rmse_max:
        return [chain]
    deviations = line.distances(chain)
    k = int(np.argmax(deviations))
    k = min(max(k, 1), chain.shape[0] - 2)  # keep both halves nonempty
    return _split_chain(chain[: k + 1], rmse_max, min_size) + _split_chain(
        chain[k + 1 :], rmse_max, min_size
    )


def split_region(
    region: Region,
    rmse_max: float = DEFAULT_RMSE_LINE,
    min_size: int = DEFAULT_MIN_REGION,
    first_id: Optional[int] = None,
) -> list[Region]:
    """Recursively bisect the chain at the max-deviation pixel until every
    piece fits a line with rmse <= rmse_max or drops below min_size.

    Pieces get fresh consecutive ids starting at ``first_id`` (callers that
    hold several regions pass a globally unique base; the default derives
    one from the parent id).
    """
    chains = _split_chain(region.chain, rmse_max, min_size)
    if len(chains) == 1:
        return [region]
    if first_id is None:
        first_id = region.region_id * 1000 + 1
    return [
        Region(region_id=first_id + i, chain=chain) for i, chain in enumerate(chains)
    ]


# ---------------------------------------------------------------------------
# Classification result model

@dataclass
class ClassifiedPrimitive:
    """A kept line or ellipse with its fit support and claimed mask pixels."""

    kind: str  # 'line' | 'ellipse'
    model: Union[StraightLine, Ellipse]
    support_regions: tuple[int, ...]
    support_pixels: np.ndarray
    claimed: np.ndarray = field(default_factory=lambda: np.empty((0, 2), dtype=np.int64))

    @property
    def rmse(self) -> float:
        return float(self.model.rmse)


@dataclass
class ClassificationResult:
    """Primitives plus the per-pixel labeling of the input mask.

    ``assigned_mask`` uses 0 = discarded, 1 = line, 2 = ellipse and is None
    until :func:`refine` runs.  ``regions`` indexes every region (including
    split products) by id; ``unassigned`` lists region ids not absorbed into
    any primitive.
    """

    primitives: list[ClassifiedPrimitive]
    regions: dict[int, Region]
    unassigned: list[int]
    assigned_mask: Optional[np.ndarray] = None
    audit: list[str] = field(default_factory=list)

    @property
    def lines(self) -> list[ClassifiedPrimitive]:
        return [p for p in self.primitives if p.kind == "line"]

    @property
    def ellipses(self) -> list[ClassifiedPrimitive]:
        return [p for p in self.primitives if p.kind == "ellipse"]


def _region_pixels(result: ClassificationResult, ids) -> np.ndarray:
    return np.concatenate([result.regions[i].chain for i in ids], axis=0)


def _identifiable_ellipse(pixels: np.ndarray, min_arc_deg: float):
    """Fitted ellipse and rmse, or (None, inf) when unfit or unidentifiable."""
    try:
        ellipse = fit_ellipse(pixels)
    except FitError:
        return None, np.inf
    if arc_coverage_deg(ellipse, pixels) < min_arc_deg:
        return None, np.inf
    return ellipse, float(ellipse.rmse)


def initial_classify(
    regions: list[Region],
    rmse_line: float = DEFAULT_RMSE_LINE,
    min_region: int = DEFAULT_MIN_REGION,
    min_arc_deg: float = DEFAULT_MIN_ARC_DEG,
) -> ClassificationResult:
    """Label each region (or split piece) as line, ellipse or unassigned.

    Per region of at least ``min_region`` pixels the whole-region ellipse
    rmse competes against the pixel-weighted rms of the post-split line
    pieces; the ellipse must also be identifiable (sufficient arc coverage).
    Ties prefer the line.  Pieces below ``min_region`` stay unassigned.
    """
    result = ClassificationResult(primitives=[], regions={}, unassigned=[])
    next_id = max((r.region_id for r in regions), default=0) + 1
    for region in regions:
        result.regions[region.region_id] = region
        if region.size < min_region:
            result.unassigned.append(region.region_id)
            continue
        ellipse, ellipse_rmse = _identifiable_ellipse(region.chain, min_arc_deg)
        pieces = split_region(
            region, rmse_max=rmse_line, min_size=min_region, first_id=next_id
        )
        if len(pieces) > 1:
            next_id += len(pieces)
        piece_fits = []
        sq_sum = 0.0
        for piece in pieces:
            try:
                line = fit_line(piece.chain)
                piece_fits.append(line)
                sq_sum += line.rmse**2 * piece.size
            except FitError:
                piece_fits.append(None)
                sq_sum += np.inf
        line_rmse = np.sqrt(sq_sum / region.size)

        if ellipse is not None and ellipse_rmse < line_rmse:
            result.primitives.append(
                ClassifiedPrimitive(
                    kind="ellipse",
                    model=ellipse,
                    support_regions=(region.region_id,),
                    support_pixels=region.chain,
                )
            )
            result.audit.append(
                f"region {region.region_id}: ellipse (rmse {ellipse_rmse:.3f} < line {line_rmse:.3f})"
            )
            continue

        if len(pieces) > 1:
            del result.regions[region.region_id]
            result.audit.append(
                f"region {region.region_id}: split into {len(pieces)} pieces"
            )
        for piece, line in zip(pieces, piece_fits):
            if len(pieces) > 1:
                result.regions[piece.region_id] = piece
            if piece.size < min_region or line is None or line.rmse > rmse_line:
                result.unassigned.append(piece.region_id)
                continue
            result.primitives.append(
                ClassifiedPrimitive(
                    kind="line",
                    model=line,
                    support_regions=(piece.region_id,),
                    support_pixels=piece.chain,
                )
            )
    return result


# ---------------------------------------------------------------------------
# Merging

def _bbox_of(pixels: np.ndarray) -> tuple[int, int, int, int]:
    return (
        int(pixels[:, 0].min()),
        int(pixels[:, 1].min()),
        int(pixels[:, 0].max()),
        int(pixels[:, 1].max()),
    )


def _bbox_gap(box_a, box_b) -> float:
    dr = max(box_a[0] - box_b[2], box_b[0] - box_a[2], 0)
    dc = max(box_a[1] - box_b[3], box_b[1] - box_a[3], 0)
    return float(np.hypot(dr, dc))


@dataclass
class _Group:
    key: int
    kind: str  # 'line' | 'ellipse' | 'none'
    region_ids: tuple[int, ...]
    pixels: np.ndarray
    model: Optional[Union[StraightLine, Ellipse]]

    @property
    def cost(self) -> float:
        return float(self.model.rmse) if self.model is not None else np.inf


def _result_groups(result: ClassificationResult) -> list[_Group]:
    groups = []
    key = 0
    for prim in result.primitives:
        groups.append(
            _Group(
                key=key,
                kind=prim.kind,
                region_ids=prim.support_regions,
                pixels=prim.support_pixels,
                model=prim.model,
            )
        )
        key += 1
    for rid in result.unassigned:
        groups.append(
            _Group(
                key=key,
                kind="none",
                region_ids=(rid,),
                pixels=result.regions[rid].chain,
                model=None,
            )
        )
        key += 1
    return groups


def _groups_to_result(
    groups: list[_Group], result: ClassificationResult
) -> ClassificationResult:
    primitives = []
    unassigned = []
    for group in groups:
        if group.kind == "none":
            unassigned.extend(group.region_ids)
        else:
            primitives.append(
                ClassifiedPrimitive(
                    kind=group.kind,
                    model=group.model,
                    support_regions=tuple(group.region_ids),
                    support_pixels=group.pixels,
                )
            )
    return ClassificationResult(
        primitives=primitives,
        regions=result.regions,
        unassigned=sorted(unassigned),
        audit=list(result.audit),
    )


def _image_diagonal(result: ClassificationResult, image_shape) -> float:
    if image_shape is not None:
        return float(np.hypot(image_shape[0], image_shape[1]))
    pixels = [r.chain for r in result.regions.values()]
    if not pixels:
        return np.inf
    allpix = np.concatenate(pixels, axis=0)
    return float(np.hypot(allpix[:, 0].max() + 1, allpix[:, 1].max() + 1))


def _greedy_merge(groups, allowed, joint_fit, rmse_max, gate, audit, stage):
    """Best-first merging to fixpoint.

    ``allowed(a, b)`` filters candidate pairs, ``joint_fit(a, b)`` returns
    (model, kind, rmse) or None.  Pairs whose bounding boxes are farther
    apart than ``gate`` are never considered.  The lowest-rmse acceptable
    pair merges first; caches are invalidated only for the merged group.
    """
    boxes = {g.key: _bbox_of(g.pixels) for g in groups}
    alive = {g.key: g for g in groups}
    cache: dict[tuple[int, int], Optional[tuple]] = {}
    next_key = max(alive) + 1 if alive else 0

    def pair_fit(a: _Group, b: _Group):
        pk = (min(a.key, b.key), max(a.key, b.key))
        if pk not in cache:
            if _bbox_gap(boxes[a.key], boxes[b.key]) > gate or not allowed(a, b):
                cache[pk] = None
            else:
                cache[pk] = joint_fit(a, b)
        return cache[pk]

    while True:
        best = None
        keys = sorted(alive)
        for i, ka in enumerate(keys):
            for kb in keys[i + 1 :]:
                fit = pair_fit(alive[ka], alive[kb])
                if fit is None or fit[2] > rmse_max:
                    continue
                if best is None or fit[2] < best[0]:
                    best = (fit[2], ka, kb, fit)
        if best is None:
            return list(alive.values())
        _, ka, kb, (model, kind, rmse) = best
        ga = alive.pop(ka)
        gb = alive.pop(kb)
        merged = _Group(
            key=next_key,
            kind=kind,
            region_ids=tuple(ga.region_ids) + tuple(gb.region_ids),
            pixels=np.concatenate([ga.pixels, gb.pixels], axis=0),
            model=model,
        )
        boxes[merged.key] = _bbox_of(merged.pixels)
        alive[merged.key] = merged
        audit.append(
            f"{stage}: merged groups {ga.region_ids} + {gb.region_ids} (joint rmse {rmse:.3f})"
        )
        next_key += 1


def merge_lines(
    result: ClassificationResult,
    rmse_merge: float = DEFAULT_RMSE_MERGE,
    image_shape=None,
) -> ClassificationResult:
    """Greedily merge line groups (absorbing unassigned fragments).

    A merge requires the joint orthogonal fit over both supports to stay
    within ``rmse_merge``; at least one side must contain line material, so
    unassigned fragments join lines but never found one on their own.
    """
    gate = BBOX_GATE_FRACTION * _image_diagonal(result, image_shape)
    audit = list(result.audit)

    def allowed(a: _Group, b: _Group) -> bool:
        kinds = {a.kind, b.kind}
        return "line" in kinds and "ellipse" not in kinds

    def joint_fit(a: _Group, b: _Group):
        pixels = np.concatenate([a.pixels, b.pixels], axis=0)
        try:
            line = fit_line(pixels)
        except FitError:
            return None
        return (line, "line", float(line.rmse))

    groups = _greedy_merge(
        _result_groups(result), allowed, joint_fit, rmse_merge, gate, audit, "merge_lines"
    )
    merged = _groups_to_result(groups, result)
    merged.audit = audit
    return merged


def merge_ellipses(
    result: ClassificationResult,
    rmse_merge: float = DEFAULT_RMSE_MERGE,
    min_arc_deg: float = DEFAULT_MIN_ARC_DEG,
    image_shape=None,
) -> ClassificationResult:
    """Greedily grow ellipses over compatible groups of any current label.

    A merge requires the joint ellipse to (a) fit both supports within
    ``rmse_merge``, (b) fit no worse than the best current model of the two
    sides plus one pixel, so a genuinely straight distant line is not
    swallowed, and (c) remain identifiable (arc coverage) on the joint
    support.
    """
    gate = BBOX_GATE_FRACTION * _image_diagonal(result, image_shape)
    audit = list(result.audit)

    def allowed(a: _Group, b: _Group) -> bool:
        return a.kind == "ellipse" or b.kind == "ellipse"

    def joint_fit(a: _Group, b: _Group):
        pixels = np.concatenate([a.pixels, b.pixels], axis=0)
        ellipse, rmse = _identifiable_ellipse(pixels, min_arc_deg)
        if ellipse is None:
            return None
        if rmse > min(a.cost, b.cost) + CAPTURE_SLACK:
            return None
        return (ellipse, "ellipse", rmse)

    groups = _greedy_merge(
        _result_groups(result), allowed, joint_fit, rmse_merge, gate, audit, "merge_ellipses"
    )
    merged = _groups_to_result(groups, result)
    merged.audit = audit
    return merged


# ---------------------------------------------------------------------------
# Refinement and pixel labeling

def _model_distances(model, pixels: np.ndarray) -> np.ndarray:
    if isinstance(model, StraightLine):
        return model.distances(pixels)
    return sampson_distance(model.conic, pixels)


def _segment_distances(line: StraightLine, support: np.ndarray, pixels: np.ndarray) -> np.ndarray:
    """Distance to the support-bounded segment of the line (not the infinite line)."""
    direction = line.direction
    t = pixels.astype(np.float64) @ direction
    t_lo, t_hi = (support @ direction).min(), (support @ direction).max()
    t = np.clip(t, t_lo, t_hi)
    base = line.offset * line.normal
    closest = base[None, :] + t[:, None] * direction[None, :]
    return np.hypot(*(pixels - closest).T)


def _refit(prim: ClassifiedPrimitive, pixels: np.ndarray) -> Union[StraightLine, Ellipse, None]:
    try:
        if prim.kind == "line":
            return fit_line(pixels)
        return fit_ellipse(pixels)
    except FitError:
        return None


def _with_rmse(model, rmse: float, pixels):
    kwargs = {"rmse": float(rmse), "pixels": pixels}
    if isinstance(model, StraightLine):
        return StraightLine(normal=model.normal, offset=model.offset, **kwargs)
    return Ellipse(
        conic=model.conic, center=model.center, axes=model.axes, theta=model.theta, **kwargs
    )


def refine(
    result: ClassificationResult,
    mask,
    dist_max: float = DEFAULT_RMSE_MERGE,
    min_region: int = DEFAULT_MIN_REGION,
) -> ClassificationResult:
    """Prune far support pixels, refit once, drop starved primitives, label pixels.

    Support pixels farther than ``dist_max`` from their model are discarded
    and the model refitted once on the survivors; if the refit explains the
    survivors worse than the old model (possible for the algebraic ellipse
    fit), the old model is kept, so every kept primitive ends with rmse <=
    ``dist_max``.  Primitives with fewer than ``min_region`` surviving pixels
    are dropped.  Finally every input-mask pixel is labeled by its nearest
    kept primitive within ``dist_max`` (0 discarded / 1 line / 2 ellipse);
    ties prefer the smaller distance, then lines, then primitive order.
    """
    mask = as_mask(mask)
    audit = list(result.audit)
    kept: list[ClassifiedPrimitive] = []
    dropped_ids: list[int] = list(result.unassigned)
    for prim in result.primitives:
        dists = _model_distances(prim.model, prim.support_pixels)
        keep = dists <= dist_max
        survivors = prim.support_pixels[keep]
        if survivors.shape[0] < min_region:
            dropped_ids.extend(prim.support_regions)
            audit.append(
                f"refine: dropped {prim.kind} on regions {prim.support_regions} "
                f"({survivors.shape[0]} px left)"
            )
            continue
        old_rmse = float(np.sqrt(np.mean(_model_distances(prim.model, survivors) ** 2)))
        model = prim.model
        new_model = _refit(prim, survivors)
        if new_model is not None:
            new_rmse = float(
                np.sqrt(np.mean(_model_distances(new_model, survivors) ** 2))
            )
            if new_rmse <= old_rmse:
                model, old_rmse = new_model, new_rmse
        if (~keep).any():
            audit.append(
                f"refine: pruned {int((~keep).sum())} px from {prim.kind} on "
                f"regions {prim.support_regions}"
            )
        kept.append(
            ClassifiedPrimitive(
                kind=prim.kind,
                model=_with_rmse(model, old_rmse, survivors),
                support_regions=prim.support_regions,
                support_pixels=survivors,
            )
        )

    # Claim every input-mask pixel for its nearest primitive within dist_max.
    rows, cols = np.nonzero(mask)
    pix = np.stack([rows, cols], axis=1)
    assigned = np.zeros(mask.shape, dtype=np.uint8)
    owner = np.full(pix.shape[0], -1, dtype=np.int64)
    if pix.size and kept:
        best = np.full(pix.shape[0], np.inf)
        order = sorted(
            range(len(kept)), key=lambda i: (0 if kept[i].kind == "line" else 1, i)
        )
        for idx in order:
            prim = kept[idx]
            if isinstance(prim.model, StraightLine):
                d = _segment_distances(prim.model, prim.support_pixels, pix)
            else:
                d = _model_distances(prim.model, pix)
            better = (d <= dist_max) & (d < best)
            best[better] = d[better]
            owner[better] = idx
        for idx, prim in enumerate(kept):
            claimed = pix[owner == idx]
            prim.claimed = claimed
            assigned[claimed[:, 0], claimed[:, 1]] = 1 if prim.kind == "line" else 2

    return ClassificationResult(
        primitives=kept,
        regions=result.regions,
        unassigned=sorted(set(dropped_ids)),
        assigned_mask=assigned,
        audit=audit,
    )


def classify_pipeline(
    mask,
    rmse_line: float = DEFAULT_RMSE_LINE,
    rmse_merge: float = DEFAULT_RMSE_MERGE,
    min_region: int = DEFAULT_MIN_REGION,
    min_arc_deg: float = DEFAULT_MIN_ARC_DEG,
) -> ClassificationResult:
    """Full chain: extract, classify, merge lines, merge ellipses, refine."""
    mask = as_mask(mask)
    regions = extract_regions(mask)
    draft = initial_classify(
        regions, rmse_line=rmse_line, min_region=min_region, min_arc_deg=min_arc_deg
    )
    draft = merge_lines(draft, rmse_merge=rmse_merge, image_shape=mask.shape)
    draft = merge_ellipses(
        draft, rmse_merge=rmse_merge, min_arc_deg=min_arc_deg, image_shape=mask.shape
    )
    return refine(draft, mask, dist_max=rmse_merge, min_region=min_region)


# ---------------------------------------------------------------------------
# Serialization

def result_to_json(result: ClassificationResult) -> str:
    """Serialize a refined result to versioned JSON (stable key order)."""
    doc = {"version": RESULT_SCHEMA_VERSION, "lines": [], "ellipses": []}
    for prim in result.primitives:
        entry = {
            "rmse": round(prim.rmse, 6),
            "pixel_count": int(prim.claimed.shape[0]),
            "support_pixel_count": int(prim.support_pixels.shape[0]),
            "runs": pixels_to_runs(prim.claimed),
        }
        if prim.kind == "line":
            model = prim.model
            ends = model.endpoints()
            entry.update(
                {
                    "normal": [round(float(v), 9) for v in model.normal],
                    "offset": round(float(model.offset), 6),
                    "endpoints": None
                    if ends is None
                    else [[round(float(v), 3) for v in p] for p in ends],
                }
            )
            doc["lines"].append(entry)
        else:
            model = prim.model
            entry.update(
                {
                    "center_xy": [round(float(v), 6) for v in model.center],
                    "axes": [round(float(v), 6) for v in model.axes],
                    "theta": round(float(model.theta), 9),
                    "conic": [round(float(v), 12) for v in model.conic],
                }
            )
            doc["ellipses"].append(entry)
    return json.dumps(doc, sort_keys=True, indent=2)


def result_from_json(text: str) -> ClassificationResult:
    """Rebuild primitives (models + claimed pixels) from their JSON form."""
    doc = json.loads(text)
    if doc.get("version") != RESULT_SCHEMA_VERSION:
        raise InvalidInputError(f"unsupported result schema version {doc.get('version')}")
    primitives = []
    for entry in doc["lines"]:
        claimed = runs_to_pixels(entry["runs"])
        model = StraightLine(
            normal=np.array(entry["normal"]),
            offset=float(entry["offset"]),
            rmse=float(entry["rmse"]),
            pixels=claimed,
        )
        primitives.append(
            ClassifiedPrimitive(
                kind="line",
                model=model,
                support_regions=(),
                support_pixels=claimed,
                claimed=claimed,
            )
        )
    for entry in doc["ellipses"]:
        claimed = runs_to_pixels(entry["runs"])
        model = Ellipse(
            conic=np.array(entry["conic"]),
            center=np.array(entry["center_xy"]),
            axes=tuple(entry["axes"]),
            theta=float(entry["theta"]),
            rmse=float(entry["rmse"]),
            pixels=claimed,
        )
        primitives.append(
            ClassifiedPrimitive(
                kind="ellipse",
                model=model,
                support_regions=(),
                support_pixels=claimed,
                claimed=claimed,
            )
        )
    return ClassificationResult(primitives=primitives, regions={}, unassigned=[])
