"""Engine behavior: gating, neighbor upkeep, rescue, and fallbacks."""
import pytest

from conftest import ScriptPort, solo_scene, zero_iou_scene
from retrack.engine import (EngineConfig, engine_init, is_stable, run_baseline,
                            run_sequence, step)
from retrack.geometry import BBox, Tracklet, iou
from retrack.simworld import MockTracker, ScenarioConfig, generate_scene
from retrack.tracker_port import RawCandidates
from retrack.candidate_select import CandidateSet


def _target_box(f):
    return BBox(2.0 * f, 0.0, 10.0, 10.0)


D_NEAR = BBox(100.0, 50.0, 10.0, 10.0)
D_JUMPED = BBox(200.0, 50.0, 10.0, 10.0)


def _two_lane_script(n=6, jump_at=4):
    script = {}
    for f in range(n):
        d = D_NEAR if f < jump_at else D_JUMPED
        script[f] = ((_target_box(f), d), (0.9, 0.8))
    return script


class TestConfig:
    def test_defaults_round_trip_through_as_dict(self):
        cfg = EngineConfig()
        assert cfg.as_dict() == {
            "alpha": 0.7, "nms_iou": 0.25, "nms_sigma": 0.01,
            "nms_floor": 1e-3, "tau": 9, "stability_iou": 0.6,
            "assoc_iou": 0.3, "use_kalman": True,
        }


class TestInit:
    def test_state_anchored_on_first_box(self):
        port = ScriptPort(_two_lane_script())
        b0 = _target_box(0)
        state = engine_init(port, 0, b0, EngineConfig())
        assert state.frame == 0
        assert state.target.head == b0
        assert len(state.target) == 1
        assert len(state.neighbors) == 0
        assert state.motion is not None
        assert state.template.source_frame == 0
        off = engine_init(port, 0, b0, EngineConfig(use_kalman=False))
        assert off.motion is None


class TestIsStable:
    def test_single_real_candidate_is_trusted(self):
        cands = CandidateSet((BBox(0, 0, 4, 4), BBox(9, 9, 4, 4)), (0.5, 0.0), 1)
        assert is_stable(cands, Tracklet(3, (BBox(0, 0, 4, 4),)), None, 0.6)

    def test_threshold_is_strict(self):
        cands = CandidateSet((BBox(0, 0, 4, 4), BBox(9, 9, 4, 4)), (0.5, 0.4))
        target = Tracklet(3, (BBox(0.0, 0.0, 4.0, 1.0),))
        exact = Tracklet(3, (BBox(0.0, 0.0, 4.0, 1.0),))
        shifted = Tracklet(3, (BBox(1.0, 0.0, 4.0, 1.0),))  # overlap 0.6 exactly
        assert is_stable(cands, target, exact, 0.6)
        assert not is_stable(cands, target, shifted, 0.6)
        with pytest.raises(ValueError):
            is_stable(cands, target, None, 0.6)


class TestStablePath:
    def test_neighbor_histories_grow_cap_and_reset(self):
        port = ScriptPort(_two_lane_script())
        cfg = EngineConfig(tau=3, use_kalman=False)
        state = engine_init(port, 0, _target_box(0), cfg)
        lengths = []
        for t in range(1, 6):
            box, state, rec = step(state, t, port, cfg)
            assert box == _target_box(t)
            assert rec["gate"] == "history_overlap"
            assert rec["gate_overlap"] == 1.0
            assert rec["source"] == "argmax"
            assert rec["weights"] is None and rec["pairs"] is None
            lengths.append([len(tr) for tr in state.neighbors.entries])
        # grows by one per frame, capped at tau, fresh after the jump
        assert lengths == [[1], [2], [3], [1], [2]]
        assert state.neighbors.frame == 5
        assert state.neighbors.entries[0].head == D_JUMPED

    def test_step_requires_the_next_frame(self):
        port = ScriptPort(_two_lane_script())
        cfg = EngineConfig(use_kalman=False)
        state = engine_init(port, 0, _target_box(0), cfg)
        with pytest.raises(ValueError):
            step(state, 2, port, cfg)


class TestFallbacks:
    """A script whose backtracks land nowhere near the target history."""

    def _script(self):
        return ScriptPort({
            0: ((BBox(300.0, 300.0, 10.0, 10.0),), (0.5,)),
            1: ((BBox(100.0, 100.0, 10.0, 10.0),
                 BBox(200.0, 200.0, 10.0, 10.0)), (0.9, 0.8)),
        })

    def test_no_kalman_degrades_to_argmax(self):
        port = self._script()
        cfg = EngineConfig(use_kalman=False)
        state = engine_init(port, 0, BBox(0.0, 0.0, 10.0, 10.0), cfg)
        box, state, rec = step(state, 1, port, cfg)
        assert rec["gate"] == "fired"
        assert rec["gate_overlap"] == 0.0
        assert rec["source"] == "degraded_argmax"
        assert rec["selected"] == rec["top"] == 0
        assert box == BBox(100.0, 100.0, 10.0, 10.0)
        assert rec["weights"] == [[0.0], [0.0]]
        assert rec["pairs"] == [[0, 0]]

    def test_kalman_box_rescues_when_no_overlap_evidence(self):
        port = self._script()
        cfg = EngineConfig()
        b0 = BBox(0.0, 0.0, 10.0, 10.0)
        state = engine_init(port, 0, b0, cfg)
        box, state, rec = step(state, 1, port, cfg)
        assert rec["gate"] == "fired"
        assert rec["source"] == "kalman_fallback"
        assert rec["selected"] == rec["kalman_index"] == 2
        assert rec["scores"][2] == 0.0
        # constant-velocity prediction from a standing start stays put
        assert box == b0


class TestSoloScene:
    def test_engine_reduces_to_baseline_when_unchallenged(self, solo):
        port = MockTracker(solo)
        frames = range(solo.length)
        b0 = solo.true_box(1, 0)
        base = run_baseline(port, frames, b0)
        got, records = run_sequence(MockTracker(solo), frames, b0, EngineConfig())
        assert got == base
        assert all(r["gate"] == "single_candidate" for r in records)
        assert all(r["source"] == "argmax" for r in records)
        assert all(r["weights"] is None for r in records)
        assert all(r["n_candidates"] == 2 for r in records)


class TestCrossingRescue:
    def test_engine_holds_target_where_baseline_switches(self):
        scene = generate_scene(ScenarioConfig("crossing"), 0)
        frames = range(scene.length)
        b0 = scene.true_box(1, 0)
        last = scene.length - 1
        base = run_baseline(MockTracker(scene), frames, b0)
        assert iou(base[-1], scene.true_box(1, last)) == 0.0
        assert iou(base[-1], scene.true_box(2, last)) > 0.5

        got, records = run_sequence(MockTracker(scene), frames, b0, EngineConfig())
        assert iou(got[-1], scene.true_box(1, last)) > 0.9
        fired = [r for r in records if r["gate"] == "fired"]
        assert fired
        assert any(r["source"] == "target_matched" for r in fired)
        for r in fired:
            assert len(r["weights"]) == r["n_candidates"]
            assert all(isinstance(p, list) and len(p) == 2 for p in r["pairs"])

    def test_rescue_does_not_need_the_motion_box(self):
        scene = generate_scene(ScenarioConfig("crossing"), 0)
        frames = range(scene.length)
        b0 = scene.true_box(1, 0)
        cfg = EngineConfig(use_kalman=False)
        got, records = run_sequence(MockTracker(scene), frames, b0, cfg)
        assert iou(got[-1], scene.true_box(1, scene.length - 1)) > 0.9
        assert all(r["kalman_index"] is None for r in records)


class TestZeroOverlapOcclusion:
    """Full scene blackout: only the motion prior bridges the gap."""

    def test_kalman_bridges_and_plain_argmax_is_hijacked(self):
        scene = zero_iou_scene()
        frames = range(scene.length)
        b0 = scene.true_box(2, 0)
        gt_last = scene.true_box(2, scene.length - 1)

        base = run_baseline(MockTracker(scene), frames, b0)
        assert iou(base[-1], gt_last) == 0.0

        on, rec_on = run_sequence(MockTracker(scene), frames, b0, EngineConfig())
        assert iou(on[-1], gt_last) > 0.9
        assert iou(on[20], scene.true_box(2, 20)) > 0.9
        blackout = rec_on[19]
        assert blackout["frame"] == 20
        assert blackout["gate"] == "fired"
        assert blackout["source"] == "kalman_fallback"
        assert blackout["selected"] == blackout["kalman_index"]
        assert rec_on[20]["gate"] == "single_candidate"
        assert all(r["source"] != "degraded_argmax" for r in rec_on)

        off, rec_off = run_sequence(MockTracker(scene), frames, b0,
                                    EngineConfig(use_kalman=False))
        assert iou(off[-1], gt_last) == 0.0
        hijack = rec_off[19]
        assert hijack["source"] == "degraded_argmax"
        assert hijack["selected"] == hijack["top"] == 0


class TestRunners:
    def test_sequences_must_be_consecutive(self):
        port = ScriptPort(_two_lane_script())
        b0 = _target_box(0)
        for frames in ([], [0, 2, 3], [2, 1, 0]):
            with pytest.raises(ValueError):
                run_sequence(port, frames, b0, EngineConfig(use_kalman=False))
            with pytest.raises(ValueError):
                run_baseline(port, frames, b0)

    def test_single_frame_run_returns_the_anchor(self):
        port = ScriptPort(_two_lane_script())
        b0 = _target_box(0)
        boxes, records = run_sequence(port, [0], b0, EngineConfig())
        assert boxes == [b0]
        assert records == []
        assert run_baseline(port, [0], b0) == [b0]

    def test_record_per_stepped_frame(self):
        port = ScriptPort(_two_lane_script())
        cfg = EngineConfig(use_kalman=False)
        boxes, records = run_sequence(port, range(6), _target_box(0), cfg)
        assert len(boxes) == 6
        assert [r["frame"] for r in records] == [1, 2, 3, 4, 5]
        assert [list(b.as_tuple()) for b in boxes[1:]] == [r["box"] for r in records]
