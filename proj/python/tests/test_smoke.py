import math

import pytest

import panotrack


def test_polar_examples():
    assert panotrack.image_to_polar((960, 480)) == pytest.approx((0.0, 0.0))
    assert panotrack.image_to_polar((0, 0)) == pytest.approx((180.0, 90.0))


def test_round_trip():
    cam = panotrack.CameraModel()
    neck = panotrack.world_to_image((2.0, 1.0, 1.45), cam)
    ankle = panotrack.world_to_image((2.0, 1.0, cam.ankle_height), cam)
    x, y, z = panotrack.localize(ankle, neck, cam)
    assert (x, y, z) == pytest.approx((2.0, 1.0, 1.45), abs=1e-9)


def test_above_horizon_raises():
    with pytest.raises(ValueError):
        panotrack.localize((960, 400), (960, 300))


def test_wrap_distance():
    assert panotrack.wrap_distance((5, 100), (1915, 100)) == pytest.approx(10.0)


def test_sensitivity():
    assert panotrack.localization_sensitivity(2.0, 5.0) == pytest.approx(0.0799, abs=1e-3)
    assert math.isinf(panotrack.localization_sensitivity(40.0, 20.0))


def test_assignment():
    pairs, cost = panotrack.solve_assignment([[1.0, 2.0], [2.0, 5.0]], 150.0)
    assert sorted(pairs) == [(0, 1), (1, 0)]
    assert cost == pytest.approx(4.0)


def test_run_circle():
    scenario = {
        "fps": 30,
        "duration": 3,
        "seed": 1,
        "noise": {"joint_sigma": 1.0, "miss_prob": 0.0, "occlusion_enabled": False},
        "agents": [{"id": 0, "trajectory": {"type": "circle", "radius": 2.0, "angular_speed": 0.5}}],
    }
    out = panotrack.run(scenario, {"strategy": "tiles"})
    assert out["report"]["m1"] == 1.0
    assert out["report"]["m2"] == 1.0
    assert out["report"]["m3"] < 0.3
    assert len(out["tracks"]) == 90


def test_bad_config():
    with pytest.raises(ValueError):
        panotrack.run({"agents": []}, {"strategy": "mosaic"})
