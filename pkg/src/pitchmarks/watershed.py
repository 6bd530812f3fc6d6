"""Seeded watershed flooding and its stochastic (Monte Carlo) averaging.

A single seeded watershed floods basins outward from marker pixels in order
of image intensity; pixels where two basins meet form the watershed lines.
Averaging the line masks of many runs with independently drawn seeds turns
"was a boundary" into "how often was a boundary": lines that separate
genuinely distinct flat areas (the painted marks) persist across runs, while
boundaries induced by any particular seed placement wash out.  Thresholding
the average close to 1 keeps only the persistent lines.

Coordinates in :class:`SeedSet` are 1-based (row, col), matching the usual
matrix convention for seed lists; everything internal is 0-based numpy.
"""

import csv
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._accel import jit_kernel
from .errors import InvalidInputError
from .raster import as_gray, as_mask, check_same_shape

DEFAULT_EXPERIMENTS = 20
DEFAULT_THRESHOLD = 0.8
DEFAULT_CELL_SIZE = 32

# 4-neighborhood in fixed push order: up, down, left, right.
_DR4 = np.array([-1, 1, 0, 0], dtype=np.int64)
_DC4 = np.array([0, 0, -1, 1], dtype=np.int64)


@dataclass(frozen=True)
class SeedSet:
    """Seed pixels of one experiment, 1-based (row, col)."""

    experiment_index: int
    rows: np.ndarray
    cols: np.ndarray
    lattice_origin: Optional[tuple[int, int]] = None

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=np.int64)
        cols = np.asarray(self.cols, dtype=np.int64)
        if rows.ndim != 1 or rows.shape != cols.shape or rows.size == 0:
            raise InvalidInputError("seed rows/cols must be equal-length nonempty 1-D arrays")
        if rows.min() < 1 or cols.min() < 1:
            raise InvalidInputError("seed coordinates are 1-based and must be >= 1")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)

    def __len__(self) -> int:
        return int(self.rows.size)

    def coords(self) -> list[tuple[int, int]]:
        return list(zip(self.rows.tolist(), self.cols.tolist()))


@dataclass(frozen=True)
class StochasticConfig:
    """Parameters of the stochastic watershed accumulation.

    ``mode`` is "windowed" (one seed per lattice cell, random lattice origin
    per experiment) or "uniform" (independent uniform seeds).  ``cells`` is
    the (rows, cols) cell grid for windowed mode; ``count`` the seed count
    for uniform mode.  ``lattice_origin`` pins the windowed lattice origin
    for every experiment (None draws a fresh origin each time; pinning it
    exists to reproduce the fixed-lattice accumulation artifact).
    """

    num_experiments: int = DEFAULT_EXPERIMENTS
    mode: str = "windowed"
    cells: Optional[tuple[int, int]] = None
    count: Optional[int] = None
    threshold: float = DEFAULT_THRESHOLD
    master_seed: int = 0
    lattice_origin: Optional[tuple[int, int]] = None

    def __post_init__(self):
        if self.num_experiments < 1:
            raise InvalidInputError("num_experiments must be >= 1")
        if not 0.0 < self.threshold <= 1.0:
            raise InvalidInputError("threshold must be in (0, 1]")
        if self.mode == "windowed":
            if self.cells is not None:
                n_r, n_c = self.cells
                if n_r * n_c < 2:
                    raise InvalidInputError("windowed mode needs at least 2 cells")
        elif self.mode == "uniform":
            if self.count is None or self.count < 2:
                raise InvalidInputError("uniform mode needs count >= 2")
        else:
            raise InvalidInputError(f"unknown seeding mode {self.mode!r}")

    def resolve_cells(self, height: int, width: int) -> tuple[int, int]:
        """Cell grid for an image: explicit, or ~cell-size-32 with >= 2 per axis."""
        if self.cells is not None:
            return self.cells
        return (
            max(2, int(round(height / DEFAULT_CELL_SIZE))),
            max(2, int(round(width / DEFAULT_CELL_SIZE))),
        )


def experiment_rng(master_seed: int, index: int) -> np.random.Generator:
    """Deterministic child RNG stream for experiment ``index``."""
    return np.random.default_rng(np.random.SeedSequence(entropy=master_seed, spawn_key=(index,)))


def gen_uniform_seeds(
    height: int,
    width: int,
    count: int,
    rng: np.random.Generator,
    experiment_index: int = 0,
) -> SeedSet:
    """Draw ``count`` seeds with i.i.d. uniform rows and columns.

    Rows are drawn first as one batch, then columns, each uniform over
    [1, height] resp. [1, width].
    """
    if height < 1 or width < 1 or count < 1:
        raise InvalidInputError("height, width and count must be positive")
    rows = rng.integers(1, height + 1, size=count)
    cols = rng.integers(1, width + 1, size=count)
    return SeedSet(experiment_index=experiment_index, rows=rows, cols=cols)


def cell_bounds(extent: int, n_cells: int) -> np.ndarray:
    """0-based cell boundaries: cell j spans [bounds[j], bounds[j+1])."""
    if n_cells < 1 or n_cells > extent:
        raise InvalidInputError(f"cell count must be in [1, {extent}], got {n_cells}")
    return np.rint(np.arange(n_cells + 1) * (extent / n_cells)).astype(np.int64)


def gen_windowed_seeds(
    height: int,
    width: int,
    n_r: int,
    n_c: int,
    rng: np.random.Generator,
    experiment_index: int = 0,
    origin: Optional[tuple[int, int]] = None,
) -> SeedSet:
    """Draw one uniform seed inside each of ``n_r * n_c`` wrap-around cells.

    The lattice origin (o_r, o_c) shifts every cell cyclically; with
    ``origin=None`` it is drawn uniform over [0, height) x [0, width) per
    experiment.  Draw order: origin row, origin col, all row offsets
    (row-major cells), all col offsets.  Returned coordinates are 1-based.
    """
    if n_r * n_c < 2:
        raise InvalidInputError("windowed seeding needs at least 2 cells")
    b_r = cell_bounds(height, n_r)
    b_c = cell_bounds(width, n_c)
    if origin is None:
        o_r = int(rng.integers(0, height))
        o_c = int(rng.integers(0, width))
    else:
        o_r, o_c = int(origin[0]) % height, int(origin[1]) % width
    low_r = np.repeat(b_r[:-1], n_c)
    high_r = np.repeat(b_r[1:], n_c)
    low_c = np.tile(b_c[:-1], n_r)
    high_c = np.tile(b_c[1:], n_r)
    rows = (o_r + rng.integers(low_r, high_r)) % height + 1
    cols = (o_c + rng.integers(low_c, high_c)) % width + 1
    return SeedSet(
        experiment_index=experiment_index,
        rows=rows,
        cols=cols,
        lattice_origin=(o_r, o_c),
    )


def seeds_for_experiment(
    height: int, width: int, cfg: StochasticConfig, index: int
) -> SeedSet:
    """Seed set of experiment ``index`` under ``cfg`` (fresh child stream)."""
    rng = experiment_rng(cfg.master_seed, index)
    if cfg.mode == "uniform":
        return gen_uniform_seeds(height, width, cfg.count, rng, experiment_index=index)
    n_r, n_c = cfg.resolve_cells(height, width)
    return gen_windowed_seeds(
        height,
        width,
        n_r,
        n_c,
        rng,
        experiment_index=index,
        origin=cfg.lattice_origin,
    )


# ---------------------------------------------------------------------------
# Priority flood

def _heap_push(heap_v, heap_a, heap_p, size, value, age, pixel):
    heap_v[size] = value
    heap_a[size] = age
    heap_p[size] = pixel
    i = size
    while i > 0:
        parent = (i - 1) >> 1
        if heap_v[parent] > heap_v[i] or (
            heap_v[parent] == heap_v[i] and heap_a[parent] > heap_a[i]
        ):
            heap_v[parent], heap_v[i] = heap_v[i], heap_v[parent]
            heap_a[parent], heap_a[i] = heap_a[i], heap_a[parent]
            heap_p[parent], heap_p[i] = heap_p[i], heap_p[parent]
            i = parent
        else:
            break
    return size + 1


def _heap_pop(heap_v, heap_a, heap_p, size):
    value = heap_v[0]
    age = heap_a[0]
    pixel = heap_p[0]
    size -= 1
    heap_v[0] = heap_v[size]
    heap_a[0] = heap_a[size]
    heap_p[0] = heap_p[size]
    i = 0
    while True:
        left = 2 * i + 1
        right = left + 1
        smallest = i
        if left < size and (
            heap_v[left] < heap_v[smallest]
            or (heap_v[left] == heap_v[smallest] and heap_a[left] < heap_a[smallest])
        ):
            smallest = left
        if right < size and (
            heap_v[right] < heap_v[smallest]
            or (heap_v[right] == heap_v[smallest] and heap_a[right] < heap_a[smallest])
        ):
            smallest = right
        if smallest == i:
            break
        heap_v[smallest], heap_v[i] = heap_v[i], heap_v[smallest]
        heap_a[smallest], heap_a[i] = heap_a[i], heap_a[smallest]
        heap_p[smallest], heap_p[i] = heap_p[i], heap_p[smallest]
        i = smallest
    return value, age, pixel, size


def _flood_loop(gray, seed_r, seed_c, labels, queued, heap_v, heap_a, heap_p, dr4, dc4):
    # Meyer-style flood, 4-connectivity.  Queue priority is (intensity, age)
    # where age numbers first pushes globally; each pixel is pushed once.
    # A popped pixel adjacent to >= 2 distinct basins becomes a line (-1)
    # and does not flood further.
    height, width = gray.shape
    n_seeds = seed_r.shape[0]
    for s in range(n_seeds):
        labels[seed_r[s], seed_c[s]] = s + 1
    size = 0
    age = 0
    for s in range(n_seeds):
        for d in range(4):
            rr = seed_r[s] + dr4[d]
            cc = seed_c[s] + dc4[d]
            if 0 <= rr < height and 0 <= cc < width:
                if labels[rr, cc] == 0 and not queued[rr, cc]:
                    size = _heap_push(heap_v, heap_a, heap_p, size, gray[rr, cc], age, rr * width + cc)
                    queued[rr, cc] = True
                    age += 1
    while size > 0:
        _, _, pixel, size = _heap_pop(heap_v, heap_a, heap_p, size)
        r = pixel // width
        c = pixel % width
        if labels[r, c] != 0:
            continue
        first = 0
        multiple = False
        for d in range(4):
            rr = r + dr4[d]
            cc = c + dc4[d]
            if 0 <= rr < height and 0 <= cc < width:
                lab = labels[rr, cc]
                if lab > 0:
                    if first == 0:
                        first = lab
                    elif lab != first:
                        multiple = True
        if multiple:
            labels[r, c] = -1
        else:
            labels[r, c] = first
            for d in range(4):
                rr = r + dr4[d]
                cc = c + dc4[d]
                if 0 <= rr < height and 0 <= cc < width:
                    if labels[rr, cc] == 0 and not queued[rr, cc]:
                        size = _heap_push(
                            heap_v, heap_a, heap_p, size, gray[rr, cc], age, rr * width + cc
                        )
                        queued[rr, cc] = True
                        age += 1
    return labels


_heap_push = jit_kernel(_heap_push)
_heap_pop = jit_kernel(_heap_pop)
_flood_kernel = jit_kernel(_flood_loop)


def _unique_sorted_seeds(gray: np.ndarray, seeds: SeedSet) -> tuple[np.ndarray, np.ndarray]:
    height, width = gray.shape
    if seeds.rows.max() > height or seeds.cols.max() > width:
        raise InvalidInputError("seed coordinates exceed image bounds")
    flat = np.unique((seeds.rows - 1) * width + (seeds.cols - 1))
    return (flat // width).astype(np.int64), (flat % width).astype(np.int64)


def watershed_labels(gray, seeds: SeedSet) -> np.ndarray:
    """Flood ``gray`` from ``seeds``; int32 labels, -1 on watershed lines.

    Duplicate seed pixels collapse to one marker.  Basin labels follow the
    sorted (row, col) order of the distinct seed pixels, which makes the
    result invariant to the seed list order.  Pixels sealed off by line
    pixels before any basin reaches them keep label 0.
    """
    img = as_gray(gray)
    seed_r, seed_c = _unique_sorted_seeds(img, seeds)
    n = img.size
    labels = np.zeros(img.shape, dtype=np.int32)
    queued = np.zeros(img.shape, dtype=np.bool_)
    heap_v = np.empty(n + 1, dtype=np.float64)
    heap_a = np.empty(n + 1, dtype=np.int64)
    heap_p = np.empty(n + 1, dtype=np.int64)
    return _flood_kernel(img, seed_r, seed_c, labels, queued, heap_v, heap_a, heap_p, _DR4, _DC4)


def seeded_watershed(gray, seeds: SeedSet) -> np.ndarray:
    """Binary mask of the watershed-line pixels of one seeded flood."""
    return watershed_labels(gray, seeds) == -1


def stochastic_watershed(gray, cfg: StochasticConfig) -> np.ndarray:
    """Average the line masks of ``cfg.num_experiments`` independent floods.

    Returns a probability image with values in {0, 1/M, ..., 1}.  The sum is
    accumulated in integers, so the result does not depend on experiment
    execution order.
    """
    img = as_gray(gray)
    height, width = img.shape
    counts = np.zeros(img.shape, dtype=np.int64)
    for i in range(cfg.num_experiments):
        seeds = seeds_for_experiment(height, width, cfg, i)
        counts += seeded_watershed(img, seeds)
    return counts / float(cfg.num_experiments)


def binarize_lines(prob, field_mask, threshold: float = DEFAULT_THRESHOLD) -> np.ndarray:
    """Line mask: probability >= threshold, gated by the field mask."""
    p = as_gray(prob)
    field = as_mask(field_mask)
    check_same_shape(p, field)
    if not 0.0 < threshold <= 1.0:
        raise InvalidInputError("threshold must be in (0, 1]")
    return (p >= threshold) & field


# ---------------------------------------------------------------------------
# Seed serialization

def write_seeds_csv(path, seed_sets: list[SeedSet]) -> None:
    """Write seed sets as CSV rows (experiment, row, col)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["experiment", "row", "col"])
        for seeds in seed_sets:
            for r, c in zip(seeds.rows.tolist(), seeds.cols.tolist()):
                writer.writerow([seeds.experiment_index, r, c])


def read_seeds_csv(path) -> list[SeedSet]:
    """Read seed sets written by :func:`write_seeds_csv`."""
    per_exp: dict[int, list[tuple[int, int]]] = {}
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            per_exp.setdefault(int(row["experiment"]), []).append(
                (int(row["row"]), int(row["col"]))
            )
    out = []
    for index in sorted(per_exp):
        coords = np.array(per_exp[index], dtype=np.int64)
        out.append(SeedSet(experiment_index=index, rows=coords[:, 0], cols=coords[:, 1]))
    return out
