#pragma once

#include <optional>

#include "multicup/orientation.hpp"
#include "multicup/ranking.hpp"

namespace multicup {

struct PlanRequest {
  PlannerConfig config;
  GripperSpec gripper;
  int threads = 1;                  // 0 = hardware concurrency
  std::optional<Vec3> current_tcp;  // fallback picks the cup moving least
};

enum class PlanStatus : uint8_t { kMultiCup, kFallback, kNoSolution };

inline const char* to_string(PlanStatus s) {
  switch (s) {
    case PlanStatus::kMultiCup: return "multi_cup";
    case PlanStatus::kFallback: return "single_cup_fallback";
    default: return "no_solution";
  }
}

/// End-to-end planner output with per-stage diagnostics.
struct PlanOutcome {
  PlanStatus status = PlanStatus::kNoSolution;
  RankedPlan plan;  // empty ranking unless status == kMultiCup

  // Counters.
  int occupied_cells = 0;
  int orientation_count = 0;
  int kernels_built = 0;
  std::int64_t cells_convolved = 0;  // grid cells x kernels
  int raw_candidates = 0;            // after decode
  int checked_candidates = 0;        // after the normal-direction check
  int cluster_count = 0;

  // Stage wall times, milliseconds.
  double t_voxelize_ms = 0.0;
  double t_orientations_ms = 0.0;
  double t_kernels_ms = 0.0;
  double t_conv_ms = 0.0;
  double t_decode_ms = 0.0;
  double t_rank_ms = 0.0;
  double t_total_ms = 0.0;
};

/// Runs the full pipeline on a scene: voxelize, sample orientations, build
/// kernels, convolve (sparse path, batched over orientations), decode,
/// normal-direction check, cluster, rank. When no multi-cup candidate
/// survives, falls back to a single-cup grasp at the affordance-argmax
/// pixel (ties broken nearest to the image center) with the gripper axis
/// on that pixel's normal. A scene with no usable affordance yields a
/// no-solution outcome rather than an error.
///
/// `map` may be shared across calls; when null a map is built for this
/// call's (angle_interval, eps_normal).
PlanOutcome plan(const AffordanceScene& scene, const PlanRequest& request,
                 const NormalOrientationMap* map = nullptr);

}  // namespace multicup
