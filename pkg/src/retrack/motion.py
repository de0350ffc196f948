"""Constant-velocity Kalman filter over box center and size.

State is 8-dimensional: (cx, cy, w, h, vcx, vcy, vw, vh). Process and
measurement noise are scaled by the current box height, the convention
used by the SORT family of trackers, so uncertainty tracks object scale.
All operations are pure: they return new states and never mutate.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import BBox

# Noise scale relative to box height.
STD_WEIGHT_POSITION = 1.0 / 20
STD_WEIGHT_VELOCITY = 1.0 / 160

MIN_SIZE = 1.0  # smallest box side the filter will report


@dataclass(frozen=True)
class MotionState:
    """Filter state at a frame: mean (8,), covariance (8, 8)."""

    mean: np.ndarray
    covariance: np.ndarray
    frame: int

    def __post_init__(self):
        object.__setattr__(self, "mean", np.asarray(self.mean, dtype=float))
        object.__setattr__(self, "covariance", np.asarray(self.covariance, dtype=float))
        if self.mean.shape != (8,):
            raise ValueError(f"mean must have shape (8,), got {self.mean.shape}")
        if self.covariance.shape != (8, 8):
            raise ValueError(f"covariance must have shape (8, 8), got {self.covariance.shape}")

    def predicted_box(self) -> BBox:
        cx, cy, w, h = self.mean[:4]
        w = max(w, MIN_SIZE)
        h = max(h, MIN_SIZE)
        return BBox(cx - w / 2.0, cy - h / 2.0, w, h)


def _transition_matrix() -> np.ndarray:
    f = np.eye(8)
    for i in range(4):
        f[i, i + 4] = 1.0
    return f


_F = _transition_matrix()
_H = np.eye(4, 8)


def _measurement(box: BBox) -> np.ndarray:
    return np.array([box.cx, box.cy, box.w, box.h], dtype=float)


def motion_init(b0: BBox, frame: int = 0) -> MotionState:
    """Start a filter at `b0` with zero velocity and scale-matched spread."""
    mean = np.zeros(8)
    mean[:4] = _measurement(b0)
    h = b0.h
    std = np.array([
        2 * STD_WEIGHT_POSITION * h, 2 * STD_WEIGHT_POSITION * h,
        2 * STD_WEIGHT_POSITION * h, 2 * STD_WEIGHT_POSITION * h,
        10 * STD_WEIGHT_VELOCITY * h, 10 * STD_WEIGHT_VELOCITY * h,
        10 * STD_WEIGHT_VELOCITY * h, 10 * STD_WEIGHT_VELOCITY * h,
    ])
    return MotionState(mean, np.diag(std ** 2), frame)


def _process_noise(h: float) -> np.ndarray:
    std = np.array([
        STD_WEIGHT_POSITION * h, STD_WEIGHT_POSITION * h,
        STD_WEIGHT_POSITION * h, STD_WEIGHT_POSITION * h,
        STD_WEIGHT_VELOCITY * h, STD_WEIGHT_VELOCITY * h,
        STD_WEIGHT_VELOCITY * h, STD_WEIGHT_VELOCITY * h,
    ])
    return np.diag(std ** 2)


def _measurement_noise(h: float) -> np.ndarray:
    std = STD_WEIGHT_POSITION * h
    return np.eye(4) * std ** 2


def _symmetrize(p: np.ndarray) -> np.ndarray:
    return (p + p.T) / 2.0


def motion_predict(s: MotionState) -> tuple[BBox, MotionState]:
    """Advance one frame; returns the predicted box and the new state."""
    mean = _F @ s.mean
    # keep the filter inside the valid box domain
    mean[2] = max(mean[2], MIN_SIZE)
    mean[3] = max(mean[3], MIN_SIZE)
    cov = _symmetrize(_F @ s.covariance @ _F.T + _process_noise(mean[3]))
    state = MotionState(mean, cov, s.frame + 1)
    return state.predicted_box(), state


def motion_update(s: MotionState, observed: BBox) -> MotionState:
    """Condition the state on an observed box at the current frame."""
    r = _measurement_noise(s.mean[3])
    innovation = _measurement(observed) - _H @ s.mean
    innovation_cov = _H @ s.covariance @ _H.T + r
    gain = s.covariance @ _H.T @ np.linalg.inv(innovation_cov)
    mean = s.mean + gain @ innovation
    mean[2] = max(mean[2], MIN_SIZE)
    mean[3] = max(mean[3], MIN_SIZE)
    # Joseph form keeps the covariance symmetric PSD under roundoff
    ikh = np.eye(8) - gain @ _H
    cov = _symmetrize(ikh @ s.covariance @ ikh.T + gain @ r @ gain.T)
    return MotionState(mean, cov, s.frame)
