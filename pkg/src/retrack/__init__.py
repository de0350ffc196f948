"""Tracker-agnostic correction engine for single-object tracking.

The engine sits behind any tracker exposing the small `TrackerPort`
interface. Each frame it screens the tracker's raw candidates, backtracks
the survivors, and matches them against the target's recent history and
the neighbor pool to decide which box really is the target; a constant
velocity motion model supplies a fallback candidate for full occlusion.
The package also ships a synthetic occlusion benchmark (`simworld`), an
evaluation kit, and a command-line front end.
"""

from .candidate_select import (CandidateSet, assemble, filter_by_confidence,
                               soft_nms)
from .engine import (EngineConfig, EngineState, engine_init, is_stable,
                     run_baseline, run_sequence, step)
from .evalkit import (EvalReport, SuccessResult, VotResult, eao_lite,
                      id_switches, success_metrics, vot_metrics)
from .geometry import BBox, Tracklet, iou, make_tracklet, tracklet_avg_iou
from .matching import NoViableCandidateError, build_weights, hungarian_max, resolve_target
from .motion import (MotionState, motion_init, motion_predict, motion_update)
from .pools import (CandidateEntry, CandidatePool, NeighborPool,
                    build_candidate_pool, empty_neighbor_pool,
                    update_neighbor_pool)
from .simworld import (MockConfig, MockTracker, MotFormatError, ObjectSpec,
                       OcclusionEvent, Path, Scene, ScenarioConfig,
                       generate_scene, load_mot, load_scene, save_mot,
                       save_scene)
from .tracker_port import RawCandidates, Template, TrackerPort

__version__ = "0.1.0"

__all__ = [
    "BBox", "Tracklet", "iou", "make_tracklet", "tracklet_avg_iou",
    "Template", "RawCandidates", "TrackerPort",
    "CandidateSet", "filter_by_confidence", "soft_nms", "assemble",
    "MotionState", "motion_init", "motion_predict", "motion_update",
    "CandidateEntry", "CandidatePool", "NeighborPool",
    "build_candidate_pool", "empty_neighbor_pool", "update_neighbor_pool",
    "build_weights", "hungarian_max", "resolve_target",
    "NoViableCandidateError",
    "EngineConfig", "EngineState", "engine_init", "is_stable", "step",
    "run_sequence", "run_baseline",
    "Scene", "ObjectSpec", "OcclusionEvent", "Path", "ScenarioConfig",
    "MockTracker", "MockConfig", "MotFormatError",
    "generate_scene", "save_scene", "load_scene", "save_mot", "load_mot",
    "VotResult", "SuccessResult", "EvalReport",
    "vot_metrics", "eao_lite", "success_metrics", "id_switches",
    "__version__",
]
