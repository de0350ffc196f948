"""Axis-aligned boxes, tracklets, and overlap measures."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence


@dataclass(frozen=True)
class BBox:
    """Axis-aligned box in pixel coordinates, (x, y) top-left corner."""

    x: float
    y: float
    w: float
    h: float

    def __post_init__(self):
        for name in ("x", "y", "w", "h"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValueError(f"BBox.{name} must be finite, got {v!r}")
        if self.w <= 0 or self.h <= 0:
            raise ValueError(f"BBox must have positive size, got w={self.w}, h={self.h}")

    @property
    def x2(self) -> float:
        return self.x + self.w

    @property
    def y2(self) -> float:
        return self.y + self.h

    @property
    def cx(self) -> float:
        return self.x + self.w / 2.0

    @property
    def cy(self) -> float:
        return self.y + self.h / 2.0

    @property
    def area(self) -> float:
        return self.w * self.h

    @property
    def diagonal(self) -> float:
        return math.hypot(self.w, self.h)

    def center_distance(self, other: "BBox") -> float:
        return math.hypot(self.cx - other.cx, self.cy - other.cy)

    def translated(self, dx: float, dy: float) -> "BBox":
        return BBox(self.x + dx, self.y + dy, self.w, self.h)

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.x, self.y, self.w, self.h)


def iou(a: BBox, b: BBox) -> float:
    """Intersection-over-union of two boxes, in [0, 1]."""
    ix = min(a.x2, b.x2) - max(a.x, b.x)
    if ix <= 0:
        return 0.0
    iy = min(a.y2, b.y2) - max(a.y, b.y)
    if iy <= 0:
        return 0.0
    inter = ix * iy
    return inter / (a.area + b.area - inter)


@dataclass(frozen=True)
class Tracklet:
    """A short box sequence ordered newest-first.

    ``boxes[k]`` is the box at frame ``end_frame - k``, so the sequence
    runs from ``end_frame`` back to ``end_frame - len(boxes) + 1``.
    """

    end_frame: int
    boxes: tuple[BBox, ...]

    def __post_init__(self):
        if not isinstance(self.boxes, tuple):
            object.__setattr__(self, "boxes", tuple(self.boxes))
        if len(self.boxes) < 1:
            raise ValueError("Tracklet needs at least one box")

    def __len__(self) -> int:
        return len(self.boxes)

    @property
    def start_frame(self) -> int:
        return self.end_frame - len(self.boxes) + 1

    @property
    def head(self) -> BBox:
        """Box at end_frame (the newest one)."""
        return self.boxes[0]

    def box_at(self, frame: int) -> BBox:
        k = self.end_frame - frame
        if k < 0 or k >= len(self.boxes):
            raise ValueError(f"frame {frame} outside tracklet span "
                             f"[{self.start_frame}, {self.end_frame}]")
        return self.boxes[k]

    def prepended(self, box: BBox) -> "Tracklet":
        """New tracklet with `box` as the head at end_frame + 1."""
        return Tracklet(self.end_frame + 1, (box,) + self.boxes)

    def truncated(self, n: int) -> "Tracklet":
        """Keep only the newest n boxes."""
        if n < 1:
            raise ValueError("cannot truncate tracklet below one box")
        return Tracklet(self.end_frame, self.boxes[:n])


def tracklet_avg_iou(p: Tracklet, q: Tracklet) -> float:
    """Mean per-frame IoU over the overlap of two co-terminal tracklets.

    Both tracklets must end on the same frame; comparison runs over the
    newest min(len(p), len(q)) frames, i.e. the longer one is truncated.
    """
    if p.end_frame != q.end_frame:
        raise ValueError(f"tracklets end on different frames: "
                         f"{p.end_frame} != {q.end_frame}")
    m = min(len(p), len(q))
    total = 0.0
    for k in range(m):
        total += iou(p.boxes[k], q.boxes[k])
    # the float sum of m values each <= 1.0 can round a hair past m
    return min(total / m, 1.0)


def make_tracklet(end_frame: int, boxes: Sequence[BBox]) -> Tracklet:
    """Convenience constructor accepting any box sequence (newest first)."""
    return Tracklet(end_frame, tuple(boxes))
