"""Synthetic tracking worlds with scripted occlusions.

A :class:`Scene` is a fully deterministic ground-truth world: every object
has a parametric box path, a unit appearance vector that may drift as a
spherical random walk, and scripted occlusion events. A mock tracker
implements the engine's port against a scene, scoring each proposal as
visibility times the cosine between the template appearance and the
object's effective (occlusion-mixed) appearance. Scenes can also be
ingested from and written to MOT ground-truth text files.
"""
from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path as FsPath

import numpy as np

from .geometry import BBox
from .tracker_port import RawCandidates, Template, TrackerPort

log = logging.getLogger(__name__)

STATIC = "static"  # occluder id for scenery that is not a tracked object

SCENE_FORMAT = "retrack-scene-v1"


class MotFormatError(ValueError):
    """A MOT ground-truth file violated the expected row format."""


# ---------------------------------------------------------------------------
# scene specification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OcclusionEvent:
    """Target obscured over [start, end] (inclusive) by `occluder`."""

    start: int
    end: int
    occluder: int | str
    severity: float

    def __post_init__(self):
        if self.end < self.start:
            raise ValueError("occlusion event ends before it starts")
        if not (0.0 < self.severity <= 1.0):
            raise ValueError(f"severity must lie in (0, 1], got {self.severity}")

    def active(self, frame: int) -> bool:
        return self.start <= frame <= self.end


@dataclass(frozen=True)
class Path:
    """Box-center path. `linear` interpolates (frame, cx, cy) waypoints,
    `sine` superimposes a sinusoid on a constant drift, and `frames`
    stores explicit per-frame boxes (used for file-ingested scenes)."""

    kind: str
    size: tuple[float, float] = (40.0, 40.0)
    waypoints: tuple[tuple[float, float, float], ...] = ()
    start: tuple[float, float] = (0.0, 0.0)
    velocity: tuple[float, float] = (0.0, 0.0)
    amplitude: float = 0.0
    period: float = 32.0
    axis: str = "y"
    boxes: tuple[tuple[float, float, float, float], ...] = ()

    def box_at(self, frame: int) -> BBox:
        if self.kind == "frames":
            x, y, w, h = self.boxes[frame]
            return BBox(x, y, w, h)
        if self.kind == "linear":
            cx, cy = self._interp(frame)
        elif self.kind == "sine":
            cx = self.start[0] + self.velocity[0] * frame
            cy = self.start[1] + self.velocity[1] * frame
            sweep = self.amplitude * math.sin(2.0 * math.pi * frame / self.period)
            if self.axis == "x":
                cx += sweep
            else:
                cy += sweep
        else:
            raise ValueError(f"unknown path kind {self.kind!r}")
        w, h = self.size
        return BBox(cx - w / 2.0, cy - h / 2.0, w, h)

    def _interp(self, frame: int) -> tuple[float, float]:
        pts = self.waypoints
        if not pts:
            raise ValueError("linear path needs waypoints")
        if frame <= pts[0][0]:
            return pts[0][1], pts[0][2]
        for (f0, x0, y0), (f1, x1, y1) in zip(pts, pts[1:]):
            if frame <= f1:
                t = (frame - f0) / (f1 - f0)
                return x0 + t * (x1 - x0), y0 + t * (y1 - y0)
        return pts[-1][1], pts[-1][2]


@dataclass(frozen=True)
class ObjectSpec:
    """One world object: identity, path, appearance, occlusion script."""

    id: int
    path: Path
    appearance: tuple[float, ...]
    drift: float = 0.0
    drift_spikes: tuple[tuple[int, int, float], ...] = ()
    occlusions: tuple[OcclusionEvent, ...] = ()

    def drift_at(self, frame: int) -> float:
        rate = self.drift
        for start, end, spike in self.drift_spikes:
            if start <= frame <= end:
                rate = max(rate, spike)
        return rate


@dataclass(eq=False)
class Scene:
    """Ground-truth world with precomputed per-frame observables."""

    length: int
    bounds: tuple[float, float]
    seed: int
    objects: tuple[ObjectSpec, ...]
    static_appearance: tuple[float, ...] | None = None

    _boxes: dict = field(init=False, repr=False)
    _apps: dict = field(init=False, repr=False)        # raw (drifted) appearance
    _eff_apps: dict = field(init=False, repr=False)    # occlusion-mixed appearance
    _visibility: dict = field(init=False, repr=False)

    def __post_init__(self):
        if self.length < 1:
            raise ValueError("scene needs at least one frame")
        ids = [o.id for o in self.objects]
        if len(ids) != len(set(ids)):
            raise ValueError("object ids must be unique")
        self.objects = tuple(sorted(self.objects, key=lambda o: o.id))
        self._derive()

    # -- derived world state ------------------------------------------------

    def _derive(self):
        dim = len(self.objects[0].appearance) if self.objects else 16
        if self.static_appearance is None:
            wall = _random_unit(np.random.default_rng([self.seed, 911]), dim)
            self.static_appearance = tuple(float(v) for v in wall)
        self._boxes = {}
        self._apps = {}
        for obj in self.objects:
            self._boxes[obj.id] = [obj.path.box_at(f) for f in range(self.length)]
            self._apps[obj.id] = self._walk_appearance(obj, dim)
        self._visibility = {}
        self._eff_apps = {}
        wall = np.asarray(self.static_appearance, dtype=float)
        for obj in self.objects:
            vis = np.ones(self.length)
            eff = self._apps[obj.id].copy()
            for f in range(self.length):
                severity, occluder = 0.0, None
                for ev in obj.occlusions:
                    if ev.active(f) and ev.severity > severity:
                        severity, occluder = ev.severity, ev.occluder
                if severity == 0.0:
                    continue
                vis[f] = 1.0 - severity
                occ_app = wall if occluder == STATIC else self._apps[occluder][f]
                mixed = (1.0 - severity) * self._apps[obj.id][f] + severity * occ_app
                eff[f] = _unit(mixed)
            self._visibility[obj.id] = vis
            self._eff_apps[obj.id] = eff

    def _walk_appearance(self, obj: ObjectSpec, dim: int) -> np.ndarray:
        base = _unit(np.asarray(obj.appearance, dtype=float))
        if base.shape != (dim,):
            raise ValueError("appearance vectors must share one dimension")
        out = np.empty((self.length, dim))
        out[0] = base
        if obj.drift == 0.0 and not obj.drift_spikes:
            out[1:] = base
            return out
        rng = np.random.default_rng([self.seed, obj.id, 1])
        steps = rng.standard_normal((self.length - 1, dim))
        for f in range(1, self.length):
            rate = obj.drift_at(f - 1)
            out[f] = _unit(out[f - 1] + rate * steps[f - 1])
        return out

    # -- queries ------------------------------------------------------------

    def ids(self) -> list[int]:
        return [o.id for o in self.objects]

    def true_box(self, obj_id: int, frame: int) -> BBox:
        return self._boxes[obj_id][frame]

    def visibility(self, obj_id: int, frame: int) -> float:
        return float(self._visibility[obj_id][frame])

    def effective_appearance(self, obj_id: int, frame: int) -> np.ndarray:
        return self._eff_apps[obj_id][frame]

    def target_path(self, obj_id: int) -> list[BBox]:
        return list(self._boxes[obj_id])

    # -- serialization ------------------------------------------------------

    def to_jsonable(self) -> dict:
        return {
            "format": SCENE_FORMAT,
            "length": self.length,
            "bounds": list(self.bounds),
            "seed": self.seed,
            "static_appearance": list(self.static_appearance),
            "objects": [
                {
                    "id": o.id,
                    "path": {
                        "kind": o.path.kind,
                        "size": list(o.path.size),
                        "waypoints": [list(p) for p in o.path.waypoints],
                        "start": list(o.path.start),
                        "velocity": list(o.path.velocity),
                        "amplitude": o.path.amplitude,
                        "period": o.path.period,
                        "axis": o.path.axis,
                        "boxes": [list(b) for b in o.path.boxes],
                    },
                    "appearance": list(o.appearance),
                    "drift": o.drift,
                    "drift_spikes": [list(s) for s in o.drift_spikes],
                    "occlusions": [
                        {"start": ev.start, "end": ev.end,
                         "occluder": ev.occluder, "severity": ev.severity}
                        for ev in o.occlusions
                    ],
                }
                for o in self.objects
            ],
        }

    @classmethod
    def from_jsonable(cls, data: dict) -> "Scene":
        if data.get("format") != SCENE_FORMAT:
            raise ValueError(f"unsupported scene format {data.get('format')!r}")
        objects = []
        for od in data["objects"]:
            pd = od["path"]
            path = Path(
                kind=pd["kind"],
                size=tuple(pd["size"]),
                waypoints=tuple(tuple(p) for p in pd["waypoints"]),
                start=tuple(pd["start"]),
                velocity=tuple(pd["velocity"]),
                amplitude=pd["amplitude"],
                period=pd["period"],
                axis=pd["axis"],
                boxes=tuple(tuple(b) for b in pd["boxes"]),
            )
            objects.append(ObjectSpec(
                id=od["id"],
                path=path,
                appearance=tuple(od["appearance"]),
                drift=od["drift"],
                drift_spikes=tuple(tuple(s) for s in od["drift_spikes"]),
                occlusions=tuple(OcclusionEvent(**ev) for ev in od["occlusions"]),
            ))
        return cls(
            length=data["length"],
            bounds=tuple(data["bounds"]),
            seed=data["seed"],
            objects=tuple(objects),
            static_appearance=tuple(data["static_appearance"]),
        )


def save_scene(scene: Scene, path: FsPath | str) -> None:
    FsPath(path).write_text(json.dumps(scene.to_jsonable(), sort_keys=True, indent=1))


def load_scene(path: FsPath | str) -> Scene:
    return Scene.from_jsonable(json.loads(FsPath(path).read_text()))


# ---------------------------------------------------------------------------
# appearance helpers
# ---------------------------------------------------------------------------

def _unit(v: np.ndarray) -> np.ndarray:
    n = np.linalg.norm(v)
    if n == 0:
        raise ValueError("cannot normalize a zero vector")
    return v / n


def _random_unit(rng: np.random.Generator, dim: int) -> np.ndarray:
    return _unit(rng.standard_normal(dim))


def _orthogonal_unit(rng: np.random.Generator, basis: list[np.ndarray]) -> np.ndarray:
    v = rng.standard_normal(len(basis[0]))
    for b in basis:
        v = v - np.dot(v, b) * b
    return _unit(v)


def _unit_with_cosine(rng: np.random.Generator, u: np.ndarray, c: float) -> np.ndarray:
    """A unit vector whose cosine against unit vector `u` is exactly c."""
    w = _orthogonal_unit(rng, [u])
    return _unit(c * u + math.sqrt(max(0.0, 1.0 - c * c)) * w)


# ---------------------------------------------------------------------------
# mock tracker
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MockConfig:
    """Knobs for the scene-backed tracker."""

    search_radius_scale: float = 2.5   # times the prior box diagonal
    jitter: float = 0.0                # Gaussian pixel noise on proposals
    clutter: int = 0                   # spurious boxes per frame
    clutter_score: float = 0.3


class MockTracker(TrackerPort):
    """Deterministic tracker over a :class:`Scene`.

    Each object whose center lies within the search radius of the prior is
    proposed at its true box (optionally jittered), scored by visibility
    times the clipped cosine between the template appearance and the
    object's effective appearance. When nothing is in range the prior
    itself is returned at score zero, so a proposal always exists.
    """

    def __init__(self, scene: Scene, config: MockConfig | None = None):
        self.scene = scene
        self.config = config or MockConfig()
        self._template_cache: dict = {}

    def make_template(self, frame: int, box: BBox) -> Template:
        if not (0 <= frame < self.scene.length):
            raise ValueError(f"frame {frame} outside scene [0, {self.scene.length})")
        return Template(frame, box)

    def template_appearance(self, template: Template) -> np.ndarray:
        """What the crop at (source_frame, source_box) actually looks like:
        the effective appearance of the object overlapping it the most."""
        key = (template.source_frame, template.source_box.as_tuple())
        cached = self._template_cache.get(key)
        if cached is not None:
            return cached
        from .geometry import iou as _iou
        best_id, best_ov = None, 0.0
        for obj_id in self.scene.ids():
            ov = _iou(template.source_box,
                      self.scene.true_box(obj_id, template.source_frame))
            if ov > best_ov:
                best_id, best_ov = obj_id, ov
        if best_id is None:
            app = np.zeros(len(self.scene.static_appearance))
        else:
            app = self.scene.effective_appearance(best_id, template.source_frame)
        self._template_cache[key] = app
        return app

    def propose(self, template: Template, frame: int, prior: BBox) -> RawCandidates:
        if not (0 <= frame < self.scene.length):
            raise ValueError(f"frame {frame} outside scene [0, {self.scene.length})")
        tpl_app = self.template_appearance(template)
        radius = self.config.search_radius_scale * prior.diagonal
        boxes: list[BBox] = []
        scores: list[float] = []
        for obj_id in self.scene.ids():
            true = self.scene.true_box(obj_id, frame)
            if prior.center_distance(true) > radius:
                continue
            box = true
            if self.config.jitter > 0.0:
                rng = np.random.default_rng([self.scene.seed, frame, obj_id, 3])
                dx, dy, dw, dh = rng.normal(0.0, self.config.jitter, 4)
                box = BBox(true.x + dx, true.y + dy,
                           max(true.w + dw, 1.0), max(true.h + dh, 1.0))
            eff = self.scene.effective_appearance(obj_id, frame)
            sim = float(np.dot(tpl_app, eff))
            score = self.scene.visibility(obj_id, frame) * sim
            boxes.append(box)
            scores.append(min(max(score, 0.0), 1.0))
        for k in range(self.config.clutter):
            rng = np.random.default_rng([self.scene.seed, frame, 7, k])
            cx = prior.cx + rng.uniform(-radius, radius)
            cy = prior.cy + rng.uniform(-radius, radius)
            scale = rng.uniform(0.8, 1.2)
            boxes.append(BBox(cx - prior.w * scale / 2.0, cy - prior.h * scale / 2.0,
                              prior.w * scale, prior.h * scale))
            scores.append(float(rng.uniform(0.0, self.config.clutter_score)))
        if not boxes:
            boxes, scores = [prior], [0.0]
        return RawCandidates(tuple(boxes), tuple(scores))


# ---------------------------------------------------------------------------
# scenario generation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ScenarioConfig:
    """Parameter ranges for scripted scenes; values are sampled per seed.

    `similarity` is the distractor-vs-target appearance cosine and
    `severity` the occlusion strength. The defaults keep every draw inside
    the band where an obscured target still outscores the distractor under
    its own current appearance (so backtracking holds on) yet loses to it
    under the stale start-frame template (so a plain argmax tracker takes
    the bait): for severity s the distractor cosine must stay between
    (1-s)^2/m and m, with m = hypot(1-s, s), with enough slack on the
    upper side to survive one taper step of template mismatch. Severities
    are sampled on a 1/256 grid, which keeps visibility values exact
    through file round-trips.
    """

    kind: str
    length: int = 64
    bounds: tuple[float, float] = (512.0, 512.0)
    appearance_dim: int = 16
    box_size: float = 40.0
    similarity: tuple[float, float] = (0.71, 0.73)
    severity: tuple[float, float] = (0.26171875, 0.296875)
    speed: tuple[float, float] = (3.5, 4.5)
    lane_gap: tuple[float, float] = (55.0, 75.0)
    drift: float = 0.0

    @classmethod
    def from_file(cls, path: FsPath | str) -> "ScenarioConfig":
        data = json.loads(FsPath(path).read_text())
        for key in ("bounds", "similarity", "severity", "speed", "lane_gap"):
            if key in data:
                data[key] = tuple(data[key])
        return cls(**data)


SCENARIOS = ("crossing", "convoy", "deform")


def generate_scene(cfg: ScenarioConfig, seed: int) -> Scene:
    """Deterministic scripted scene for (config, seed)."""
    if cfg.kind == "crossing":
        return _gen_crossing(cfg, seed)
    if cfg.kind == "convoy":
        return _gen_convoy(cfg, seed)
    if cfg.kind == "deform":
        return _gen_deform(cfg, seed)
    raise ValueError(f"unknown scenario {cfg.kind!r}; expected one of {SCENARIOS}")


def _sample_severity(rng: np.random.Generator, lo: float, hi: float) -> float:
    # 1/256 grid: exact complements, exact file round-trips
    lo_t, hi_t = int(math.ceil(lo * 256)), int(math.floor(hi * 256))
    return int(rng.integers(lo_t, hi_t + 1)) / 256.0

TAPER_STEP = 8.0 / 256


def _tapered_occlusion(start: int, end: int, sev: float,
                       step: float = TAPER_STEP) -> tuple[OcclusionEvent, ...]:
    """Full-strength occlusion over [start, end] that then fades out one
    small severity step per frame.

    A hard trailing edge would leave a freshly-visible target whose recent
    past is still fully obscured; nothing cropped at the clear frame can
    follow the target back through that stretch, because the look-alike
    scores higher there by the very margin that makes the scene a trap.
    Fading one step per frame keeps each frame's immediate past matchable
    from that frame's own appearance. Steps stay on the dyadic grid, so
    visibility values round-trip exactly."""
    events = [OcclusionEvent(start, end, STATIC, sev)]
    level = sev - step
    frame = end + 1
    while level > 1e-12:
        events.append(OcclusionEvent(frame, frame, STATIC, level))
        level -= step
        frame += 1
    return tuple(events)


def _pair_appearances(rng: np.random.Generator, dim: int,
                      similarity: float) -> tuple[tuple, tuple, tuple]:
    """Target and distractor vectors at the given cosine, plus a wall
    vector orthogonal to both so static occlusion adds no bias."""
    u = _random_unit(rng, dim)
    v = _unit_with_cosine(rng, u, similarity)
    residual = v - np.dot(v, u) * u
    basis = [u] if np.linalg.norm(residual) < 1e-12 else [u, _unit(residual)]
    wall = _orthogonal_unit(rng, basis)
    return (tuple(map(float, u)), tuple(map(float, v)), tuple(map(float, wall)))


def _gen_crossing(cfg: ScenarioConfig, seed: int) -> Scene:
    """Two look-alikes in opposing lanes crossing mid-sequence; the target
    is obscured around the cross long enough for an argmax tracker to be
    carried out of its own search range. The lanes sit three quarters of a
    box apart vertically, which keeps the pair's overlap low enough that
    suppression never collapses them into a single detection."""
    rng = np.random.default_rng([seed, 101])
    v = float(rng.uniform(*cfg.speed))
    sim = float(rng.uniform(*cfg.similarity))
    sev = _sample_severity(rng, *cfg.severity)
    t_meet = int(cfg.length * 0.42)
    cy = cfg.bounds[1] / 2.0
    mid = cfg.bounds[0] / 2.0
    size = (cfg.box_size, cfg.box_size)
    radius = 2.5 * math.hypot(*size)
    dy = 0.75 * cfg.box_size
    # full-strength occlusion holds until the pair has separated beyond the
    # search radius; the fade tail comes on top of that
    w_pre = int(rng.integers(8, 13))
    w_post = int(math.ceil((radius + 5.0) / (2.0 * v))) + 1
    start, end = t_meet - w_pre, min(t_meet + w_post, cfg.length - 12)

    def lane(direction: float, cy_lane: float) -> Path:
        x0 = mid - direction * v * t_meet
        x1 = mid + direction * v * (cfg.length - 1 - t_meet)
        return Path("linear", size=size,
                    waypoints=((0, x0, cy_lane), (cfg.length - 1, x1, cy_lane)))

    app_t, app_d, wall = _pair_appearances(rng, cfg.appearance_dim, sim)
    target = ObjectSpec(1, lane(+1.0, cy - dy / 2.0), app_t, drift=cfg.drift,
                        occlusions=_tapered_occlusion(start, end, sev))
    distractor = ObjectSpec(2, lane(-1.0, cy + dy / 2.0), app_d, drift=cfg.drift)
    return Scene(cfg.length, cfg.bounds, seed, (target, distractor),
                 static_appearance=wall)


def _gen_convoy(cfg: ScenarioConfig, seed: int) -> Scene:
    """Two look-alikes on parallel lanes; the target lane is obscured for a
    stretch while the companion stays in plain view."""
    rng = np.random.default_rng([seed, 202])
    v = float(rng.uniform(*cfg.speed))
    sim = float(rng.uniform(*cfg.similarity))
    sev = _sample_severity(rng, *cfg.severity)
    gap = float(rng.uniform(*cfg.lane_gap))
    start = int(rng.integers(14, 19))
    end = start + int(rng.integers(12, 17))
    cy = cfg.bounds[1] / 2.0
    size = (cfg.box_size, cfg.box_size)
    x0 = 40.0

    def lane(cy_lane: float) -> Path:
        return Path("linear", size=size,
                    waypoints=((0, x0, cy_lane),
                               (cfg.length - 1, x0 + v * (cfg.length - 1), cy_lane)))

    app_t, app_d, wall = _pair_appearances(rng, cfg.appearance_dim, sim)
    target = ObjectSpec(1, lane(cy - gap / 2.0), app_t, drift=cfg.drift,
                        occlusions=_tapered_occlusion(start, end, sev))
    companion = ObjectSpec(2, lane(cy + gap / 2.0), app_d, drift=cfg.drift)
    return Scene(cfg.length, cfg.bounds, seed, (target, companion),
                 static_appearance=wall)


def _gen_deform(cfg: ScenarioConfig, seed: int) -> Scene:
    """A single weaving target whose appearance drifts sharply for a spell,
    with a mildly similar bystander parked nearby."""
    rng = np.random.default_rng([seed, 303])
    v = float(rng.uniform(*cfg.speed))
    spike_start = int(rng.integers(20, 27))
    spike = (spike_start, spike_start + int(rng.integers(8, 13)), 0.12)
    cy = cfg.bounds[1] / 2.0
    size = (cfg.box_size, cfg.box_size)
    app_t, app_d, wall = _pair_appearances(rng, cfg.appearance_dim, 0.5)
    target = ObjectSpec(
        1, Path("sine", size=size, start=(40.0, cy), velocity=(v, 0.0),
                amplitude=30.0, period=40.0, axis="y"),
        app_t, drift=cfg.drift, drift_spikes=(spike,))
    bystander = ObjectSpec(
        2, Path("linear", size=size,
                waypoints=((0, 40.0, cy + 90.0),
                           (cfg.length - 1, 40.0 + v * (cfg.length - 1), cy + 90.0))),
        app_d, drift=cfg.drift)
    return Scene(cfg.length, cfg.bounds, seed, (target, bystander),
                 static_appearance=wall)


# ---------------------------------------------------------------------------
# MOT ground-truth text format
# ---------------------------------------------------------------------------

def save_mot(scene: Scene, path: FsPath | str) -> None:
    """Write per-frame ground truth as MOT rows.

    Columns: frame (1-based), id, x, y, w, h, conf, class, visibility.
    Floats are written with repr so a read-back parses to identical values.
    """
    lines = []
    for f in range(scene.length):
        for obj in scene.objects:
            b = scene.true_box(obj.id, f)
            vis = scene.visibility(obj.id, f)
            lines.append(f"{f + 1},{obj.id},{b.x!r},{b.y!r},{b.w!r},{b.h!r},1,1,{vis!r}")
    FsPath(path).write_text("\n".join(lines) + "\n")


def load_mot(path: FsPath | str, seed: int = 0, appearance_dim: int = 16) -> Scene:
    """Build a Scene from a MOT ground-truth file.

    Visibility maps to occlusion severity (1 - visibility) attributed to
    static scenery. Frame gaps within an id's annotations are filled by
    linear interpolation with a warning; ids missing at the sequence edges
    hold their first/last annotated box. Malformed rows fail with the
    offending line number. Appearance vectors are drawn per id from `seed`.
    """
    per_id: dict[int, dict[int, tuple[BBox, float]]] = {}
    max_frame = 0
    text = FsPath(path).read_text()
    for lineno, rawline in enumerate(text.splitlines(), start=1):
        line = rawline.strip()
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != 9:
            raise MotFormatError(f"{path}: line {lineno}: expected 9 comma-separated "
                                 f"fields, got {len(parts)}")
        try:
            frame = int(parts[0])
            obj_id = int(parts[1])
            x, y, w, h = (float(p) for p in parts[2:6])
            float(parts[6])
            vis = float(parts[8])
        except ValueError as exc:
            raise MotFormatError(f"{path}: line {lineno}: {exc}") from None
        if frame < 1:
            raise MotFormatError(f"{path}: line {lineno}: frame must be >= 1, got {frame}")
        if w <= 0 or h <= 0:
            raise MotFormatError(f"{path}: line {lineno}: nonpositive box size "
                                 f"w={w}, h={h}")
        if not (0.0 <= vis <= 1.0):
            raise MotFormatError(f"{path}: line {lineno}: visibility {vis} "
                                 f"outside [0, 1]")
        entry = per_id.setdefault(obj_id, {})
        if frame - 1 in entry:
            raise MotFormatError(f"{path}: line {lineno}: duplicate row for "
                                 f"id {obj_id} at frame {frame}")
        entry[frame - 1] = (BBox(x, y, w, h), vis)
        max_frame = max(max_frame, frame)
    if not per_id:
        raise MotFormatError(f"{path}: no data rows")

    length = max_frame
    objects = []
    for obj_id in sorted(per_id):
        rows = per_id[obj_id]
        frames = sorted(rows)
        gaps = [(a, b) for a, b in zip(frames, frames[1:]) if b - a > 1]
        for a, b in gaps:
            log.warning("%s: id %d missing frames %d..%d, interpolating",
                        path, obj_id, a + 2, b)  # report in 1-based file frames
        boxes: list[tuple[float, float, float, float]] = []
        vis_seq: list[float] = []
        for f in range(length):
            if f in rows:
                box, vis = rows[f]
            elif f < frames[0]:
                box, vis = rows[frames[0]]
            elif f > frames[-1]:
                box, vis = rows[frames[-1]]
            else:
                a = max(x for x in frames if x < f)
                b = min(x for x in frames if x > f)
                t = (f - a) / (b - a)
                (ba, va), (bb, vb) = rows[a], rows[b]
                box = BBox(ba.x + t * (bb.x - ba.x), ba.y + t * (bb.y - ba.y),
                           ba.w + t * (bb.w - ba.w), ba.h + t * (bb.h - ba.h))
                vis = va + t * (vb - va)
            boxes.append(box.as_tuple())
            vis_seq.append(vis)
        occlusions = _visibility_to_events(vis_seq)
        rng = np.random.default_rng([seed, obj_id])
        app = tuple(float(v) for v in _random_unit(rng, appearance_dim))
        objects.append(ObjectSpec(obj_id, Path("frames", boxes=tuple(boxes)),
                                  app, occlusions=occlusions))
    xmax = max(b[0] + b[2] for o in objects for b in o.path.boxes)
    ymax = max(b[1] + b[3] for o in objects for b in o.path.boxes)
    return Scene(length, (xmax, ymax), seed, tuple(objects))


def _visibility_to_events(vis_seq: list[float]) -> tuple[OcclusionEvent, ...]:
    """Runs of constant reduced visibility become static occlusion events."""
    events = []
    run_start, run_sev = None, 0.0
    for f, vis in enumerate(vis_seq + [1.0]):  # sentinel terminates the last run
        sev = 1.0 - vis
        if run_start is not None and sev != run_sev:
            events.append(OcclusionEvent(run_start, f - 1, STATIC, run_sev))
            run_start = None
        if run_start is None and sev > 0.0:
            run_start, run_sev = f, sev
    return tuple(events)
