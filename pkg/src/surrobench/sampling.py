"""Sample-set construction, normalization, and evaluated-point bookkeeping.

Sample sets are shifted by a base point and scaled by the largest distance
to it, so that every fitted model works on points inside the closed unit
ball. Datasets accumulate (point, value) pairs produced by a solver run and
remember through which channel each point entered.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

PROVENANCE_TAGS = (
    "fd-stencil",
    "line-search-first",
    "line-search-all",
    "ball-extra",
    "poll",
)

# two points closer than this (relative to magnitude) count as one
DUPLICATE_TOL = 1e-14


class DegenerateSampleError(ValueError):
    """All points of a sample set coincide with the base point."""


@dataclass
class SampleSet:
    """Points y^0..y^N with the shift base and scaling radius Delta.

    ``base``/``delta`` always refer to the original coordinates, so a
    normalized set can map points back via ``to_original``.
    """

    points: np.ndarray
    base: np.ndarray
    delta: float
    normalized: bool = False
    fvalues: np.ndarray | None = None

    @classmethod
    def from_points(cls, points, base=None, fvalues=None) -> "SampleSet":
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if base is None:
            base = points[0]
        base = np.asarray(base, dtype=float)
        delta = float(np.max(np.linalg.norm(points - base, axis=1)))
        if fvalues is not None:
            fvalues = np.asarray(fvalues, dtype=float)
        return cls(points, base.copy(), delta, False, fvalues)

    def __len__(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def to_normalized(self, x) -> np.ndarray:
        return (np.asarray(x, dtype=float) - self.base) / self.delta

    def to_original(self, z) -> np.ndarray:
        return self.base + self.delta * np.asarray(z, dtype=float)


def shift_scale(s: SampleSet) -> SampleSet:
    """Map a raw sample set into the closed unit ball around the origin."""
    if s.normalized:
        return s
    if s.delta <= 0.0:
        raise DegenerateSampleError("sample set has zero spread")
    z = (s.points - s.base) / s.delta
    return SampleSet(z, s.base.copy(), s.delta, True, s.fvalues)


def sample_ball(center, radius: float, count: int, seed) -> np.ndarray:
    """Draw ``count`` points uniformly from the ball B(center; radius).

    Directions come from normalized Gaussians and radii from the inverse-CDF
    transform r * U^(1/n), which together give the uniform ball density.
    """
    center = np.asarray(center, dtype=float)
    n = center.size
    rng = np.random.default_rng(seed)
    dirs = rng.standard_normal((count, n))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    radii = radius * rng.random(count) ** (1.0 / n)
    return center + dirs * radii[:, None]


def standard_sizes(n: int) -> tuple[int, int]:
    """Training and testing sample-set sizes for dimension n."""
    train = (n + 1) * (n + 2) // 2
    test = -(-train // 5)  # ceil(0.2 * train) without float edge cases
    return train, test


@dataclass
class Dataset:
    """Evaluated points with values, a role tag, and per-point provenance."""

    role: str = "train"
    _points: list = field(default_factory=list, repr=False)
    _values: list = field(default_factory=list, repr=False)
    _tags: list = field(default_factory=list, repr=False)

    def __len__(self) -> int:
        return len(self._points)

    def append(self, x, f: float, tag: str) -> bool:
        """Add one evaluated point; returns False when x duplicates an entry."""
        if tag not in PROVENANCE_TAGS:
            raise ValueError(f"unknown provenance tag {tag!r}")
        x = np.asarray(x, dtype=float).copy()
        if self._points:
            tol = DUPLICATE_TOL * max(1.0, float(np.max(np.abs(x))))
            diffs = np.max(np.abs(self.points_array() - x), axis=1)
            if float(np.min(diffs)) <= tol:
                return False
        self._points.append(x)
        self._values.append(float(f))
        self._tags.append(tag)
        return True

    def points_array(self) -> np.ndarray:
        return np.array(self._points, dtype=float)

    def values_array(self) -> np.ndarray:
        return np.array(self._values, dtype=float)

    @property
    def tags(self) -> list[str]:
        return list(self._tags)

    def to_csv(self, path) -> None:
        n = len(self._points[0]) if self._points else 0
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow([f"x{i}" for i in range(n)] + ["f", "provenance"])
            for x, f, tag in zip(self._points, self._values, self._tags):
                w.writerow([repr(float(v)) for v in x] + [repr(f), tag])

    @classmethod
    def from_csv(cls, path, role="train") -> "Dataset":
        ds = cls(role=role)
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
        header = rows[0]
        n = len(header) - 2
        for row in rows[1:]:
            x = np.array([float(v) for v in row[:n]])
            ds._points.append(x)
            ds._values.append(float(row[n]))
            tag = row[n + 1]
            if tag not in PROVENANCE_TAGS:
                raise ValueError(f"unknown provenance tag {tag!r}")
            ds._tags.append(tag)
        return ds


def minimal_ball_exponent(distances, need: int) -> int:
    """Smallest integer j with at least ``need`` distances <= 0.1 * 1.1^j."""
    d = np.sort(np.asarray(distances, dtype=float))
    if d.size < need:
        raise ValueError(f"need {need} points, have {d.size}")
    r = float(d[need - 1])
    if r <= 0.0:
        raise ValueError("degenerate distances: duplicates at the center")
    j = math.ceil(math.log(r / 0.1) / math.log(1.1))
    # guard the log against roundoff at exact boundaries
    while 0.1 * 1.1 ** (j - 1) >= r:
        j -= 1
    while 0.1 * 1.1**j < r:
        j += 1
    return j


def select_local_sample(dataset: Dataset, x_k, n: int) -> SampleSet:
    """Pick the sample set for a local model around x_k.

    The selection ball B(x_k; 0.1 * 1.1^j) uses the smallest integer j
    (possibly negative) for which it holds at least (n+1)(n+2)/2 dataset
    points. Points are ordered by distance, so y^0 is x_k itself when
    present and the nearest point otherwise. Function values ride along in
    ``fvalues``.
    """
    need = (n + 1) * (n + 2) // 2
    if len(dataset) < need:
        raise ValueError(
            f"dataset holds {len(dataset)} points, need {need} for n={n}"
        )
    x_k = np.asarray(x_k, dtype=float)
    pts = dataset.points_array()
    vals = dataset.values_array()
    dist = np.linalg.norm(pts - x_k, axis=1)
    j = minimal_ball_exponent(dist, need)
    radius = 0.1 * 1.1**j
    mask = dist <= radius
    order = np.argsort(dist[mask], kind="stable")
    sel = pts[mask][order]
    return SampleSet.from_points(sel, fvalues=vals[mask][order])
