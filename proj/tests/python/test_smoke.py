"""End-to-end checks through the Python bindings.

Runs under pytest; the module are found via PYTHONPATH=<build>/python.
"""

import numpy as np

import multicup


def flat_scene(width=100, height=52, fx=500.0, depth=0.5):
    depth_img = np.full((height, width), depth, dtype=np.float32)
    affordance = np.ones((height, width), dtype=np.float32)
    intrinsics = {
        "fx": fx,
        "fy": fx,
        "cx": 0.5 * (width - 1),
        "cy": 0.5 * (height - 1),
        "width": width,
        "height": height,
    }
    return depth_img, affordance, intrinsics


TWO_CUP = [[-0.04, 0.0, 0.0], [0.04, 0.0, 0.0]]


def test_plan_full_plane_multi_cup():
    depth, affordance, intrinsics = flat_scene()
    out = multicup.plan(depth, affordance, intrinsics, TWO_CUP, threads=1)
    assert out["outcome"] == "multi_cup"
    best = out["optimal"]
    assert best["activation"] == [1, 1]
    assert best["max_obj"] == 1
    assert best["source"] == "multi_cup"
    assert abs(best["position"][2] - 0.5025) < 1e-9
    assert len(out["ranking"]) >= 1
    # 99 x 51 mm of pixels bucket into a 19 x 10 x 1 grid.
    assert out["counters"]["occupied_cells"] == 190
    assert out["counters"]["orientations"] == 216
    assert out["timings"]["total_ms"] > 0.0


def test_plan_empty_affordance_is_no_solution():
    depth, affordance, intrinsics = flat_scene()
    affordance[:] = 0.0
    out = multicup.plan(depth, affordance, intrinsics, TWO_CUP, threads=1)
    assert out["outcome"] == "no_solution"
    assert "optimal" not in out
    assert out["ranking"] == []


def test_config_kwargs_reach_the_planner():
    depth, affordance, intrinsics = flat_scene()
    # An impossible occupancy threshold forces the single-cup fallback.
    out = multicup.plan(depth, affordance, intrinsics, TWO_CUP,
                        threads=1, min_points_per_voxel=10_000)
    assert out["outcome"] == "single_cup_fallback"
    assert sum(out["optimal"]["activation"]) == 1


def test_two_boxes_spans_two_objects():
    scene = multicup.render_preset("two-boxes")
    out = multicup.plan(scene["depth"], scene["affordance"],
                        scene["intrinsics"], TWO_CUP, threads=1)
    assert out["outcome"] == "multi_cup"
    assert out["optimal"]["max_obj"] == 2
    assert sorted(out["optimal"]["contact_labels"]) == [0, 1]


def test_small_blob_falls_back_at_the_ramp_peak():
    assert set(multicup.preset_names()) == {
        "flat-plate", "two-boxes", "three-boxes", "small-blob", "sphere-cap"}
    scene = multicup.render_preset("small-blob")
    affordance = scene["affordance"]
    assert scene["depth"].shape == (181, 241)
    v, u = scene["argmax_pixel"]
    assert (v, u) == np.unravel_index(np.argmax(affordance), affordance.shape)
    out = multicup.plan(scene["depth"], affordance, scene["intrinsics"],
                        TWO_CUP, threads=1)
    assert out["outcome"] == "single_cup_fallback"


def test_random_instances_match_the_oracle():
    assert multicup.validate_random(instances=3, max_dim=32,
                                    max_orientations=16, seed=20240915)


def test_cli_runs_in_process(tmp_path):
    assert multicup.run_cli([]) == 1
    out_dir = tmp_path / "scene"
    rc = multicup.run_cli(["gen-scene", "--preset", "flat-plate",
                           "--out-dir", str(out_dir)])
    assert rc == 0
    arr = np.load(out_dir / "depth.npy")
    scene = multicup.render_preset("flat-plate")
    np.testing.assert_array_equal(arr, scene["depth"])
