"""On-disk dataset of annotated pitch images.

Layout, one directory per match:

    <root>/<match>/<image>.png             RGB frame
    <root>/<match>/<image>.field.png       field mask (white = playing field)
    <root>/<match>/<image>.lines.png       marking centerline mask, 1 px wide
    <root>/<match>/<image>.primitives.json typed primitives + metadata

The primitives file stores each marking as run-length encoded centerline
pixels so annotations stay diffable and image-codec independent.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DatasetError
from .raster import (
    as_mask,
    as_rgb,
    check_same_shape,
    pixels_to_runs,
    read_image,
    read_mask,
    runs_to_pixels,
    write_image,
    write_mask,
)

ANNOTATION_VERSION = 1
PRIMITIVE_KINDS = ("line", "ellipse")


@dataclass(frozen=True)
class GroundTruthPrimitive:
    """One marking: its class, a stable name, and centerline pixels."""

    kind: str
    name: str
    pixels: np.ndarray

    def __post_init__(self):
        if self.kind not in PRIMITIVE_KINDS:
            raise DatasetError(f"unknown primitive kind {self.kind!r}")
        pixels = np.asarray(self.pixels, dtype=np.int64).reshape(-1, 2)
        object.__setattr__(self, "pixels", pixels)


@dataclass(frozen=True)
class DatasetItem:
    """One annotated frame plus its ground truth."""

    match: str
    name: str
    image: np.ndarray
    field_mask: np.ndarray
    line_mask: np.ndarray
    primitives: tuple[GroundTruthPrimitive, ...]
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        image = as_rgb(self.image)
        field_mask = as_mask(self.field_mask)
        line_mask = as_mask(self.line_mask)
        check_same_shape(image[..., 0], field_mask, line_mask)
        for prim in self.primitives:
            if prim.pixels.size and not field_mask[prim.pixels[:, 0], prim.pixels[:, 1]].all():
                raise DatasetError(
                    f"{self.match}/{self.name}: primitive {prim.name!r} leaves the field mask"
                )
        object.__setattr__(self, "image", image)
        object.__setattr__(self, "field_mask", field_mask)
        object.__setattr__(self, "line_mask", line_mask)
        object.__setattr__(self, "primitives", tuple(self.primitives))

    @property
    def key(self) -> tuple[str, str]:
        return (self.match, self.name)


def _annotation_payload(item: DatasetItem) -> dict:
    return {
        "version": ANNOTATION_VERSION,
        "match": item.match,
        "name": item.name,
        "meta": item.meta,
        "primitives": [
            {
                "kind": prim.kind,
                "name": prim.name,
                "runs": [[int(v) for v in run] for run in pixels_to_runs(prim.pixels)],
            }
            for prim in item.primitives
        ],
    }


def save_item(item: DatasetItem, root) -> Path:
    """Write one item into the layout; returns the match directory."""
    match_dir = Path(root) / item.match
    match_dir.mkdir(parents=True, exist_ok=True)
    write_image(match_dir / f"{item.name}.png", item.image)
    write_mask(match_dir / f"{item.name}.field.png", item.field_mask)
    write_mask(match_dir / f"{item.name}.lines.png", item.line_mask)
    payload = _annotation_payload(item)
    path = match_dir / f"{item.name}.primitives.json"
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return match_dir


def save_dataset(items, root) -> Path:
    root = Path(root)
    for item in items:
        save_item(item, root)
    return root


def _load_item(match_dir: Path, name: str) -> DatasetItem:
    image_path = match_dir / f"{name}.png"
    field_path = match_dir / f"{name}.field.png"
    lines_path = match_dir / f"{name}.lines.png"
    ann_path = match_dir / f"{name}.primitives.json"
    for path in (field_path, lines_path, ann_path):
        if not path.exists():
            raise DatasetError(f"missing companion file {path}")
    image = read_image(image_path)
    field_mask = read_mask(field_path)
    line_mask = read_mask(lines_path)
    try:
        payload = json.loads(ann_path.read_text())
    except json.JSONDecodeError as exc:
        raise DatasetError(f"unparsable annotation {ann_path}: {exc}") from None
    if payload.get("version") != ANNOTATION_VERSION:
        raise DatasetError(f"{ann_path}: unsupported version {payload.get('version')!r}")
    primitives = tuple(
        GroundTruthPrimitive(
            kind=entry["kind"],
            name=entry["name"],
            pixels=runs_to_pixels(entry["runs"]),
        )
        for entry in payload.get("primitives", [])
    )
    try:
        return DatasetItem(
            match=match_dir.name,
            name=name,
            image=image,
            field_mask=field_mask,
            line_mask=line_mask,
            primitives=primitives,
            meta=payload.get("meta", {}),
        )
    except Exception as exc:
        raise DatasetError(f"{image_path}: {exc}") from None


def _is_item_image(path: Path) -> bool:
    return path.suffix == ".png" and not (
        path.name.endswith(".field.png") or path.name.endswith(".lines.png")
    )


def load_dataset(root, errors: list | None = None) -> list[DatasetItem]:
    """Load every item under root, sorted by (match, name).

    Malformed items are skipped.  When ``errors`` is a list, a
    (path, message) diagnostic is appended per failure and the scan result
    is returned; otherwise any failure raises DatasetError listing all of
    them after the full scan.
    """
    root = Path(root)
    if not root.is_dir():
        raise DatasetError(f"dataset root {root} is not a directory")
    collected: list[tuple[str, str]] = []
    items = []
    for match_dir in sorted(p for p in root.iterdir() if p.is_dir()):
        for image_path in sorted(p for p in match_dir.iterdir() if _is_item_image(p)):
            name = image_path.name[: -len(".png")]
            try:
                items.append(_load_item(match_dir, name))
            except (DatasetError, OSError, KeyError, ValueError) as exc:
                collected.append((str(image_path), str(exc)))
    if collected:
        if errors is not None:
            errors.extend(collected)
        else:
            summary = "; ".join(msg for _, msg in collected)
            raise DatasetError(f"{len(collected)} item(s) failed to load: {summary}")
    return items
