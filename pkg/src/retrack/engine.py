"""The correction engine: per-frame candidate validation and selection.

Each step proposes candidates around the previous result, filters and
softly suppresses them, and appends a motion-predicted box. A cheap
stability gate decides whether plain argmax is trustworthy; when it is
not, every candidate is backtracked and a maximum-weight matching against
the neighbor pool and the target history picks the winner. The template
is fixed at the init frame and never refreshed.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

from .candidate_select import CandidateSet, assemble, filter_by_confidence, soft_nms
from .geometry import BBox, Tracklet, iou, tracklet_avg_iou
from .matching import (NoViableCandidateError, build_weights, hungarian_max,
                       resolve_target)
from .motion import MotionState, motion_init, motion_predict, motion_update
from .pools import NeighborPool, build_candidate_pool, empty_neighbor_pool, \
    update_neighbor_pool
from .tracker_port import Template, TrackerPort

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class EngineConfig:
    """Tunables; defaults follow the reference operating point."""

    alpha: float = 0.7            # confidence-ratio filter
    nms_iou: float = 0.25         # overlap above which scores decay
    nms_sigma: float = 0.01       # Gaussian decay width
    nms_floor: float = 1e-3       # decayed scores below this are dropped
    tau: int = 9                  # backtrack depth in frames
    stability_iou: float = 0.6    # history-overlap gate threshold
    assoc_iou: float = 0.3        # stable-path neighbor association
    use_kalman: bool = True

    def as_dict(self) -> dict:
        return {
            "alpha": self.alpha, "nms_iou": self.nms_iou,
            "nms_sigma": self.nms_sigma, "nms_floor": self.nms_floor,
            "tau": self.tau, "stability_iou": self.stability_iou,
            "assoc_iou": self.assoc_iou, "use_kalman": self.use_kalman,
        }


@dataclass(frozen=True)
class EngineState:
    """Everything carried between frames. Value-semantic."""

    frame: int
    template: Template
    target: Tracklet            # selected history, ends at `frame`
    neighbors: NeighborPool     # loser histories, end at `frame`
    motion: MotionState | None


def engine_init(port: TrackerPort, frame0: int, b0: BBox,
                cfg: EngineConfig) -> EngineState:
    """Anchor the engine on the ground-truth box of the first frame."""
    template = port.make_template(frame0, b0)
    motion = motion_init(b0, frame0) if cfg.use_kalman else None
    return EngineState(frame=frame0, template=template,
                       target=Tracklet(frame0, (b0,)),
                       neighbors=empty_neighbor_pool(frame0),
                       motion=motion)


def is_stable(cands: CandidateSet, target: Tracklet,
              top_tracklet: Tracklet | None, threshold: float) -> bool:
    """Whether plain argmax can be trusted this frame.

    True when only one real candidate exists (nothing to match against),
    or when the backtracked history of the argmax-confidence candidate
    overlaps the target history above `threshold`.
    """
    if len(cands.non_kalman_indices()) == 1:
        return True
    if top_tracklet is None:
        raise ValueError("multiple candidates require the argmax tracklet")
    return tracklet_avg_iou(target, top_tracklet) > threshold


def _advance_neighbors_stable(neighbors: NeighborPool, cands: CandidateSet,
                              selected: int, t: int, cfg: EngineConfig) -> NeighborPool:
    """Cheap neighbor refresh for stable frames: greedily associate each
    unselected real candidate with a previous neighbor head by IoU and
    prepend; candidates with no association start fresh histories. The
    injected motion box has no appearance identity and is left out."""
    losers = [i for i in cands.non_kalman_indices() if i != selected]
    prev = neighbors.entries
    scored = []
    for ci, i in enumerate(losers):
        for nj, tr in enumerate(prev):
            ov = iou(cands.boxes[i], tr.head)
            if ov >= cfg.assoc_iou:
                scored.append((ov, ci, nj))
    scored.sort(key=lambda s: (-s[0], s[1], s[2]))
    taken_c: dict[int, int] = {}
    taken_n: set[int] = set()
    for ov, ci, nj in scored:
        if ci in taken_c or nj in taken_n:
            continue
        taken_c[ci] = nj
        taken_n.add(nj)
    out = []
    for ci, i in enumerate(losers):
        box = cands.boxes[i]
        if ci in taken_c:
            shifted = prev[taken_c[ci]].prepended(box)
            if len(shifted) > cfg.tau:
                shifted = shifted.truncated(cfg.tau)
        else:
            shifted = Tracklet(t, (box,))
        out.append(shifted)
    return NeighborPool(t, tuple(out))


def step(state: EngineState, frame: int, port: TrackerPort,
         cfg: EngineConfig) -> tuple[BBox, EngineState, dict]:
    """Advance one frame; returns (selected box, new state, decision record)."""
    if frame != state.frame + 1:
        raise ValueError(f"expected frame {state.frame + 1}, got {frame}")
    t = frame
    prior = state.target.head
    raw = port.propose(state.template, t, prior)
    pruned = soft_nms(filter_by_confidence(raw, cfg.alpha),
                      cfg.nms_iou, cfg.nms_sigma, cfg.nms_floor)
    if cfg.use_kalman:
        kalman_box, predicted = motion_predict(state.motion)
        cands = assemble(pruned, kalman_box)
    else:
        predicted = None
        cands = assemble(pruned, None)

    top = cands.argmax_confidence()
    top_tracklet = None
    gate_overlap = None
    if len(cands.non_kalman_indices()) == 1:
        stable = True
        gate = "single_candidate"
    else:
        depth = min(cfg.tau, t)
        back_frames = range(t - 1, t - 1 - depth, -1)
        template = port.make_template(t, cands.boxes[top])
        top_tracklet = port.track_segment(template, cands.boxes[top], back_frames)
        gate_overlap = tracklet_avg_iou(state.target, top_tracklet)
        stable = is_stable(cands, state.target, top_tracklet, cfg.stability_iou)
        gate = "history_overlap" if stable else "fired"

    weights_list = None
    pairs_list = None
    if stable:
        selected = top
        source = "argmax"
        neighbors = _advance_neighbors_stable(state.neighbors, cands, selected, t, cfg)
    else:
        precomputed = {top: top_tracklet}
        pool = build_candidate_pool(cands, port, t, cfg.tau, precomputed=precomputed)
        weights = build_weights(pool, state.neighbors, state.target)
        assignment = hungarian_max(weights)
        try:
            selected = resolve_target(assignment, weights, cands)
            matched_row = None
            for r, c in assignment.pairs:
                if c == weights.target_col and weights.values[r, c] > 0.0:
                    matched_row = r
            if matched_row is not None:
                source = "target_matched"
            elif weights.values[selected, weights.target_col] > 0.0:
                source = "best_unmatched"
            else:
                source = "kalman_fallback"
        except NoViableCandidateError:
            selected = top
            source = "degraded_argmax"
            log.warning("frame %d: no viable candidate, degrading to argmax", t)
        weights_list = [[float(v) for v in row] for row in weights.values]
        pairs_list = [[r, c] for r, c in assignment.pairs]
        neighbors = update_neighbor_pool(pool, selected, cfg.tau,
                                         exclude=cands.kalman_index)

    box = cands.boxes[selected]
    target = state.target.prepended(box)
    if len(target) > cfg.tau:
        target = target.truncated(cfg.tau)
    motion = motion_update(predicted, box) if cfg.use_kalman else None

    record = {
        "frame": t,
        "n_candidates": len(cands),
        "kalman_index": cands.kalman_index,
        "scores": [float(s) for s in cands.scores],
        "gate": gate,
        "gate_overlap": gate_overlap,
        "top": top,
        "weights": weights_list,
        "pairs": pairs_list,
        "selected": selected,
        "source": source,
        "box": list(box.as_tuple()),
    }
    new_state = EngineState(frame=t, template=state.template, target=target,
                            neighbors=neighbors, motion=motion)
    return box, new_state, record


def run_sequence(port: TrackerPort, frames: Sequence[int], b0: BBox,
                 cfg: EngineConfig) -> tuple[list[BBox], list[dict]]:
    """Track `frames` (consecutive, ascending) starting from box `b0`.

    Returns one box per frame (the first is `b0` itself) and one decision
    record per stepped frame.
    """
    frames = list(frames)
    if len(frames) < 1:
        raise ValueError("need at least one frame")
    for a, b in zip(frames, frames[1:]):
        if b - a != 1:
            raise ValueError("frames must be consecutive and ascending")
    state = engine_init(port, frames[0], b0, cfg)
    boxes = [b0]
    records: list[dict] = []
    for t in frames[1:]:
        box, state, record = step(state, t, port, cfg)
        boxes.append(box)
        records.append(record)
    return boxes, records


def run_baseline(port: TrackerPort, frames: Sequence[int], b0: BBox) -> list[BBox]:
    """The conventional loop: best-scoring proposal wins, no validation."""
    frames = list(frames)
    if len(frames) < 1:
        raise ValueError("need at least one frame")
    for a, b in zip(frames, frames[1:]):
        if b - a != 1:
            raise ValueError("frames must be consecutive and ascending")
    template = port.make_template(frames[0], b0)
    prior = b0
    out = [b0]
    for t in frames[1:]:
        raw = port.propose(template, t, prior)
        prior = raw.boxes[raw.argmax()]
        out.append(prior)
    return out
