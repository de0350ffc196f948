"""Candidate set construction: confidence filtering, soft suppression,
and injection of the motion-predicted box."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .geometry import BBox, iou
from .tracker_port import RawCandidates


@dataclass(frozen=True)
class CandidateSet:
    """Final per-frame candidates handed to the engine.

    `kalman_index` marks the motion-predicted box, if one was injected;
    that box is appearance-free, carries score 0.0, and never competes in
    confidence argmax.
    """

    boxes: tuple[BBox, ...]
    scores: tuple[float, ...]
    kalman_index: int | None = None

    def __post_init__(self):
        if len(self.boxes) != len(self.scores):
            raise ValueError("boxes and scores length mismatch")
        if len(self.boxes) < 1:
            raise ValueError("candidate set cannot be empty")
        if self.kalman_index is not None and not (0 <= self.kalman_index < len(self.boxes)):
            raise ValueError("kalman_index out of range")

    def __len__(self) -> int:
        return len(self.boxes)

    def non_kalman_indices(self) -> list[int]:
        return [i for i in range(len(self.boxes)) if i != self.kalman_index]

    def argmax_confidence(self) -> int:
        """Highest-score index among real (non-injected) candidates."""
        best = -1
        for i in self.non_kalman_indices():
            if best < 0 or self.scores[i] > self.scores[best]:
                best = i
        if best < 0:
            raise ValueError("candidate set holds only the injected box")
        return best


def filter_by_confidence(raw: RawCandidates, alpha: float) -> RawCandidates:
    """Keep boxes scoring strictly above alpha times the max score.

    Boxes tied with the max always survive, so the argmax is never lost
    even at alpha = 1.
    """
    if not (0.0 <= alpha <= 1.0):
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    s_max = max(raw.scores)
    cut = alpha * s_max
    keep = [i for i, s in enumerate(raw.scores) if s > cut or s == s_max]
    return RawCandidates(tuple(raw.boxes[i] for i in keep),
                         tuple(raw.scores[i] for i in keep))


def soft_nms(raw: RawCandidates, iou_thresh: float, sigma: float,
             score_floor: float = 1e-3) -> RawCandidates:
    """Greedy soft suppression with a Gaussian score decay.

    Boxes are consumed highest-current-score first. Each pick decays every
    remaining box overlapping it above `iou_thresh` by exp(-IoU^2 / sigma);
    a box whose decayed score drops below `score_floor` is discarded.
    Non-overlapping boxes are never touched. Output is in pick order.
    """
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    remaining = list(range(len(raw.boxes)))
    scores = list(raw.scores)
    kept: list[int] = []
    while remaining:
        best = remaining[0]
        for i in remaining[1:]:
            if scores[i] > scores[best]:
                best = i
        remaining.remove(best)
        kept.append(best)
        survivors = []
        for i in remaining:
            ov = iou(raw.boxes[best], raw.boxes[i])
            if ov > iou_thresh:
                scores[i] *= math.exp(-(ov * ov) / sigma)
                if scores[i] < score_floor:
                    continue
            survivors.append(i)
        remaining = survivors
    return RawCandidates(tuple(raw.boxes[i] for i in kept),
                         tuple(scores[i] for i in kept))


def assemble(filtered: RawCandidates, kalman_box: BBox | None) -> CandidateSet:
    """Append the motion-predicted box (if any) after suppression."""
    if kalman_box is None:
        return CandidateSet(filtered.boxes, filtered.scores, None)
    return CandidateSet(filtered.boxes + (kalman_box,),
                        filtered.scores + (0.0,),
                        len(filtered.boxes))
