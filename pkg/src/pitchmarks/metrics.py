"""Tolerance-based pixel and object detection scores.

Ground-truth markings are one pixel wide while detections are several pixels
wide, so exact overlap is meaningless; both directions of the comparison use
a chamfer tolerance instead (a pixel counts as hit when the other set comes
within ``tol_px`` of it).
"""

from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .errors import InvalidInputError
from .raster import as_mask, check_same_shape

DEFAULT_TOL_PX = 2.0
DEFAULT_COVERAGE = 0.5


def _safe_ratio(num: int, den: int) -> float:
    """num/den with the empty-case convention: no possible errors scores 1."""
    if den == 0:
        return 1.0
    return num / den


@dataclass(frozen=True)
class PixelMetrics:
    """Tolerant pixel counts and the derived recall/precision/F-score."""

    tp: int
    fp: int
    fn: int

    @property
    def recall(self) -> float:
        return _safe_ratio(self.tp, self.tp + self.fn)

    @property
    def precision(self) -> float:
        return _safe_ratio(self.tp, self.tp + self.fp)

    @property
    def f_score(self) -> float:
        if self.tp + self.fp + self.fn == 0:
            return 1.0
        r = self.recall
        p = self.precision
        if r + p == 0.0:
            return 0.0
        return 2.0 * r * p / (r + p)


def _distance_to(mask: np.ndarray) -> np.ndarray:
    """Euclidean distance from each pixel to the nearest True pixel."""
    if not mask.any():
        return np.full(mask.shape, np.inf)
    return ndimage.distance_transform_edt(~mask)


def pixel_metrics(pred, truth, tol_px: float = DEFAULT_TOL_PX) -> PixelMetrics:
    """Chamfer-tolerant pixel scores of a detection mask against a truth mask.

    A predicted pixel is a true positive when some truth pixel lies within
    tol_px, otherwise a false positive; a truth pixel with no prediction
    within tol_px is a false negative.
    """
    p = as_mask(pred)
    t = as_mask(truth)
    check_same_shape(p, t)
    if tol_px < 0:
        raise InvalidInputError("tol_px must be >= 0")
    dist_to_truth = _distance_to(t)
    dist_to_pred = _distance_to(p)
    tp = int(np.count_nonzero(p & (dist_to_truth <= tol_px)))
    fp = int(np.count_nonzero(p)) - tp
    fn = int(np.count_nonzero(t & (dist_to_pred > tol_px)))
    return PixelMetrics(tp=tp, fp=fp, fn=fn)


def sum_pixel_metrics(parts: Iterable[PixelMetrics]) -> PixelMetrics:
    """Micro-average: pool the raw counts, then derive the ratios."""
    tp = fp = fn = 0
    for part in parts:
        tp += part.tp
        fp += part.fp
        fn += part.fn
    return PixelMetrics(tp=tp, fp=fp, fn=fn)


# ---------------------------------------------------------------------------
# Object level

@dataclass(frozen=True)
class ObjectCounts:
    """Detection bookkeeping for one class of primitives."""

    detected: int
    misdetected: int
    false_detections: int
    matches: tuple[tuple[int, int], ...] = field(default=())

    @property
    def recall(self) -> float:
        return _safe_ratio(self.detected, self.detected + self.misdetected)

    @property
    def precision(self) -> float:
        return _safe_ratio(self.detected, self.detected + self.false_detections)

    @property
    def f_score(self) -> float:
        if self.detected + self.misdetected + self.false_detections == 0:
            return 1.0
        r = self.recall
        p = self.precision
        if r + p == 0.0:
            return 0.0
        return 2.0 * r * p / (r + p)


def _normalize_objects(objs) -> list[tuple[str, np.ndarray]]:
    out = []
    for obj in objs:
        if isinstance(obj, tuple):
            kind, pixels = obj
        else:
            kind = obj.kind
            pixels = getattr(obj, "claimed", None)
            if pixels is None:
                pixels = obj.pixels
        pixels = np.asarray(pixels, dtype=np.int64).reshape(-1, 2)
        out.append((str(kind), pixels))
    return out


def match_objects(
    pred,
    truth,
    shape: tuple[int, int],
    tol_px: float = DEFAULT_TOL_PX,
    coverage_min: float = DEFAULT_COVERAGE,
) -> dict[str, ObjectCounts]:
    """Greedy one-to-one matching of predicted to truth primitives per class.

    Objects are (kind, pixels) pairs or anything with .kind and
    .claimed/.pixels attributes; pixels are (row, col) arrays.  A pair is a
    candidate when kinds agree and at least ``coverage_min`` of the truth
    pixels lie within tol_px of the prediction.  Candidates are consumed
    best-coverage first (ties broken by truth index then prediction index),
    each object matching at most once.
    """
    pred_objs = _normalize_objects(pred)
    truth_objs = _normalize_objects(truth)
    kinds = sorted({k for k, _ in pred_objs} | {k for k, _ in truth_objs})

    pred_dist = []
    for _, pixels in pred_objs:
        mask = np.zeros(shape, dtype=bool)
        if pixels.size:
            mask[pixels[:, 0], pixels[:, 1]] = True
        pred_dist.append(_distance_to(mask))

    candidates = []
    for gi, (gkind, gpix) in enumerate(truth_objs):
        if gpix.size == 0:
            continue
        for pi, (pkind, _) in enumerate(pred_objs):
            if pkind != gkind:
                continue
            covered = pred_dist[pi][gpix[:, 0], gpix[:, 1]] <= tol_px
            coverage = float(np.count_nonzero(covered)) / gpix.shape[0]
            if coverage >= coverage_min:
                candidates.append((coverage, gi, pi))
    candidates.sort(key=lambda c: (-c[0], c[1], c[2]))

    matched_truth: dict[int, int] = {}
    matched_pred: set[int] = set()
    for _, gi, pi in candidates:
        if gi in matched_truth or pi in matched_pred:
            continue
        matched_truth[gi] = pi
        matched_pred.add(pi)

    result = {}
    for kind in kinds:
        truth_idx = [i for i, (k, _) in enumerate(truth_objs) if k == kind]
        pred_idx = [i for i, (k, _) in enumerate(pred_objs) if k == kind]
        matches = tuple(
            sorted((gi, matched_truth[gi]) for gi in truth_idx if gi in matched_truth)
        )
        detected = len(matches)
        result[kind] = ObjectCounts(
            detected=detected,
            misdetected=len(truth_idx) - detected,
            false_detections=len([i for i in pred_idx if i not in matched_pred]),
            matches=matches,
        )
    return result


def sum_object_counts(parts: Iterable[ObjectCounts]) -> ObjectCounts:
    """Micro-average object counts (matches are not carried over)."""
    detected = misdetected = false_detections = 0
    for part in parts:
        detected += part.detected
        misdetected += part.misdetected
        false_detections += part.false_detections
    return ObjectCounts(detected=detected, misdetected=misdetected, false_detections=false_detections)


def merge_class_counts(parts: Sequence[dict[str, ObjectCounts]]) -> dict[str, ObjectCounts]:
    """Micro-average per-class object counts across images."""
    kinds = sorted({k for part in parts for k in part})
    return {
        kind: sum_object_counts(part[kind] for part in parts if kind in part)
        for kind in kinds
    }
