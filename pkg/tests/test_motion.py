"""Motion filter against an independently written textbook implementation."""
import numpy as np
import pytest

from retrack.geometry import BBox
from retrack.motion import (MIN_SIZE, STD_WEIGHT_POSITION, STD_WEIGHT_VELOCITY,
                            MotionState, motion_init, motion_predict,
                            motion_update)


def _z(box):
    return np.array([box.cx, box.cy, box.w, box.h])


class Oracle:
    """Plain predict/update equations, standard covariance form."""

    def __init__(self, box):
        self.f = np.block([[np.eye(4), np.eye(4)], [np.zeros((4, 4)), np.eye(4)]])
        self.h = np.hstack([np.eye(4), np.zeros((4, 4))])
        self.x = np.concatenate([_z(box), np.zeros(4)])
        h = box.h
        std = np.array([2 * STD_WEIGHT_POSITION * h] * 4 +
                       [10 * STD_WEIGHT_VELOCITY * h] * 4)
        self.p = np.diag(std ** 2)

    def predict(self):
        self.x = self.f @ self.x
        self.x[2] = max(self.x[2], MIN_SIZE)
        self.x[3] = max(self.x[3], MIN_SIZE)
        h = self.x[3]
        q = np.diag(np.array([STD_WEIGHT_POSITION * h] * 4 +
                             [STD_WEIGHT_VELOCITY * h] * 4) ** 2)
        self.p = self.f @ self.p @ self.f.T + q

    def update(self, box):
        r = np.eye(4) * (STD_WEIGHT_POSITION * self.x[3]) ** 2
        s = self.h @ self.p @ self.h.T + r
        k = np.linalg.solve(s.T, self.h @ self.p.T).T
        self.x = self.x + k @ (_z(box) - self.h @ self.x)
        self.x[2] = max(self.x[2], MIN_SIZE)
        self.x[3] = max(self.x[3], MIN_SIZE)
        self.p = (np.eye(8) - k @ self.h) @ self.p


def test_init_state_matches_measurement():
    b = BBox(10, 20, 30, 40)
    s = motion_init(b, frame=3)
    assert s.frame == 3
    np.testing.assert_allclose(s.mean[:4], [25, 40, 30, 40])
    np.testing.assert_array_equal(s.mean[4:], np.zeros(4))
    assert s.predicted_box().as_tuple() == b.as_tuple()
    # spread scales with box height
    expected = np.array([2 * STD_WEIGHT_POSITION * 40] * 4 +
                        [10 * STD_WEIGHT_VELOCITY * 40] * 4) ** 2
    np.testing.assert_allclose(np.diag(s.covariance), expected)


def test_state_shape_validation():
    with pytest.raises(ValueError):
        MotionState(np.zeros(7), np.eye(8), 0)
    with pytest.raises(ValueError):
        MotionState(np.zeros(8), np.eye(7), 0)


def test_tracks_oracle_through_noisy_sequence():
    rng = np.random.default_rng(11)
    b0 = BBox(50, 60, 20, 24)
    s = motion_init(b0)
    oracle = Oracle(b0)
    for i in range(15):
        _, s = motion_predict(s)
        oracle.predict()
        np.testing.assert_allclose(s.mean, oracle.x, rtol=0, atol=1e-9)
        np.testing.assert_allclose(s.covariance, oracle.p, rtol=0, atol=1e-7)
        dx, dy = rng.normal(0, 1.5, 2)
        obs = BBox(50 + 3 * i + dx, 60 + dy, 20, 24)
        s = motion_update(s, obs)
        oracle.update(obs)
        np.testing.assert_allclose(s.mean, oracle.x, rtol=0, atol=1e-8)
        np.testing.assert_allclose(s.covariance, oracle.p, rtol=0, atol=1e-7)


def test_constant_velocity_convergence():
    vx, vy = 3.0, -1.5
    s = motion_init(BBox(100, 100, 16, 16))
    for i in range(1, 31):
        box, s = motion_predict(s)
        s = motion_update(s, BBox(100 + vx * i, 100 + vy * i, 16, 16))
    box, _ = motion_predict(s)
    true = BBox(100 + vx * 31, 100 + vy * 31, 16, 16)
    assert abs(box.cx - true.cx) < 0.1
    assert abs(box.cy - true.cy) < 0.1
    assert abs(s.mean[4] - vx) < 0.1
    assert abs(s.mean[5] - vy) < 0.1


def test_predicted_box_floors_size():
    mean = np.array([5.0, 5.0, 0.2, 0.4, 0, 0, 0, 0])
    s = MotionState(mean, np.eye(8), 0)
    box = s.predicted_box()
    assert box.w == MIN_SIZE and box.h == MIN_SIZE
    assert (box.cx, box.cy) == (5.0, 5.0)


def test_shrinking_box_stays_valid():
    s = motion_init(BBox(0, 0, 8, 8))
    for i in range(1, 25):
        box, s = motion_predict(s)
        assert box.w >= MIN_SIZE and box.h >= MIN_SIZE
        w = max(8 - i, 1)
        s = motion_update(s, BBox(0, 0, w, w))
    assert s.mean[2] >= MIN_SIZE and s.mean[3] >= MIN_SIZE


def test_covariance_stays_symmetric_psd():
    rng = np.random.default_rng(7)
    s = motion_init(BBox(0, 0, 10, 10))
    for i in range(40):
        _, s = motion_predict(s)
        np.testing.assert_array_equal(s.covariance, s.covariance.T)
        assert np.linalg.eigvalsh(s.covariance).min() > 0
        jx, jy = rng.normal(0, 5, 2)
        s = motion_update(s, BBox(4 * i + jx, jy, 10, 10))
        np.testing.assert_array_equal(s.covariance, s.covariance.T)
        assert np.linalg.eigvalsh(s.covariance).min() > 0


def test_operations_do_not_mutate_inputs():
    s = motion_init(BBox(1, 2, 3, 4))
    mean0, cov0 = s.mean.copy(), s.covariance.copy()
    _, pred = motion_predict(s)
    motion_update(pred, BBox(2, 3, 3, 4))
    np.testing.assert_array_equal(s.mean, mean0)
    np.testing.assert_array_equal(s.covariance, cov0)
    assert pred.frame == s.frame + 1
