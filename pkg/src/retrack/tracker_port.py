"""Abstract contract between the post-processing engine and a tracker.

The engine never talks to a concrete tracker directly; it sees a
:class:`TrackerPort` that can crop templates, propose scored boxes for a
frame given a search prior, and run short single-direction segments.
Implementations must be deterministic: identical (template, frame, prior)
triples must yield identical proposals.
"""
from __future__ import annotations

import abc
from dataclasses import dataclass
from typing import Sequence

from .geometry import BBox, Tracklet


@dataclass(frozen=True)
class Template:
    """Opaque handle for an appearance patch cropped at a frame/box."""

    source_frame: int
    source_box: BBox


@dataclass(frozen=True)
class RawCandidates:
    """Scored box proposals for one frame, as emitted by the tracker."""

    boxes: tuple[BBox, ...]
    scores: tuple[float, ...]

    def __post_init__(self):
        if not isinstance(self.boxes, tuple):
            object.__setattr__(self, "boxes", tuple(self.boxes))
        if not isinstance(self.scores, tuple):
            object.__setattr__(self, "scores", tuple(float(s) for s in self.scores))
        if len(self.boxes) != len(self.scores):
            raise ValueError("boxes and scores length mismatch")
        if len(self.boxes) < 1:
            raise ValueError("a tracker must propose at least one box")
        for s in self.scores:
            if not (0.0 <= s <= 1.0):
                raise ValueError(f"score {s} outside [0, 1]")

    def __len__(self) -> int:
        return len(self.boxes)

    def argmax(self) -> int:
        """Index of the highest-scoring box; ties break to the lowest index."""
        best = 0
        for i in range(1, len(self.scores)):
            if self.scores[i] > self.scores[best]:
                best = i
        return best


class TrackerPort(abc.ABC):
    """What the engine needs from a single-object tracker."""

    @abc.abstractmethod
    def make_template(self, frame: int, box: BBox) -> Template:
        """Crop an appearance template at `box` in `frame`."""

    @abc.abstractmethod
    def propose(self, template: Template, frame: int, prior: BBox) -> RawCandidates:
        """Scored box proposals for `frame`, searching around `prior`."""

    def track_segment(self, template: Template, start: BBox,
                      frames: Sequence[int]) -> Tracklet:
        """Track through `frames` by chaining propose + per-step argmax.

        `frames` must be consecutive and either ascending (forward) or
        descending (backtracking). The first proposal searches around
        `start`; each later step searches around the previous step's
        argmax box. The result is ordered newest-first regardless of the
        traversal direction.
        """
        frames = list(frames)
        if not frames:
            raise ValueError("track_segment needs at least one frame")
        if len(frames) > 1:
            step = frames[1] - frames[0]
            if step not in (1, -1):
                raise ValueError("frames must be consecutive")
            for a, b in zip(frames, frames[1:]):
                if b - a != step:
                    raise ValueError("frames must advance by a constant step of 1")
        prior = start
        out: list[BBox] = []
        for f in frames:
            raw = self.propose(template, f, prior)
            prior = raw.boxes[raw.argmax()]
            out.append(prior)
        if len(frames) > 1 and frames[1] > frames[0]:
            out.reverse()
        return Tracklet(max(frames), tuple(out))
