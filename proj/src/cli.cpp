#include "multicup/cli.hpp"

#include <chrono>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "multicup/conv.hpp"
#include "multicup/oracle.hpp"
#include "multicup/planner.hpp"
#include "multicup/report.hpp"
#include "multicup/synth.hpp"

namespace multicup {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInput = 2;
constexpr int kExitValidation = 3;

nlohmann::json load_json_file(const std::string& path) {
  try {
    return nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path + ": " + e.what());
  }
}

GripperSpec load_gripper(const std::string& path) {
  const nlohmann::json j = load_json_file(path);
  GripperSpec g;
  try {
    for (const auto& c : j.at("cup_centers_local")) {
      if (c.size() != 3) throw IoError(path + ": cup center needs 3 numbers");
      g.cup_centers_local.emplace_back(c[0].get<double>(), c[1].get<double>(),
                                       c[2].get<double>());
    }
    g.cup_radius = j.value("cup_radius", 0.0);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path + ": " + e.what());
  }
  try {
    g.validate();
  } catch (const std::invalid_argument& e) {
    throw IoError(path + ": " + e.what());
  }
  return g;
}

PlannerConfig load_config(const std::string& path) {
  const nlohmann::json j = load_json_file(path);
  PlannerConfig c;
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "voxel_size") c.voxel_size = value.get<double>();
      else if (key == "angle_interval") c.angle_interval = value.get<double>();
      else if (key == "angle_interval_deg")
        c.angle_interval = deg2rad(value.get<double>());
      else if (key == "eps_normal") c.eps_normal = value.get<double>();
      else if (key == "eps_normal_deg")
        c.eps_normal = deg2rad(value.get<double>());
      else if (key == "eps_dist") c.eps_dist = value.get<double>();
      else if (key == "min_points_per_voxel")
        c.min_points_per_voxel = value.get<int>();
      else if (key == "normal_k") c.normal_k = value.get<int>();
      else if (key == "top_fraction") c.top_fraction = value.get<double>();
      else if (key == "min_cluster_size")
        c.min_cluster_size = value.get<int>();
      else if (key == "w_dist") c.w_dist = value.get<double>();
      else if (key == "w_var") c.w_var = value.get<double>();
      else if (key == "w_orient") c.w_orient = value.get<double>();
      else throw IoError(path + ": unknown config key '" + key + "'");
    } catch (const nlohmann::json::exception& e) {
      throw IoError(path + ": key '" + key + "': " + e.what());
    }
  }
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw IoError(path + ": " + e.what());
  }
  return c;
}

SceneSpec load_scene_spec(const std::string& path) {
  const nlohmann::json j = load_json_file(path);
  SceneSpec s;
  try {
    s.width = j.value("width", s.width);
    s.height = j.value("height", s.height);
    s.fx = j.value("fx", s.fx);
    s.fy = j.value("fy", s.fy);
    s.camera_z = j.value("camera_z", s.camera_z);
    s.plane_graspable = j.value("plane_graspable", s.plane_graspable);
    s.plane_half_extent = j.value("plane_half_extent", s.plane_half_extent);
    if (j.contains("normal_cutoff_deg"))
      s.normal_cutoff = deg2rad(j["normal_cutoff_deg"].get<double>());
    s.edge_margin = j.value("edge_margin", s.edge_margin);
    s.radial_ramp = j.value("radial_ramp", s.radial_ramp);
    s.seed = j.value("seed", s.seed);
    for (const auto& p : j.value("primitives", nlohmann::json::array())) {
      Primitive prim;
      const std::string kind = p.at("kind").get<std::string>();
      if (kind == "box") prim.kind = Primitive::Kind::kBox;
      else if (kind == "sphere") prim.kind = Primitive::Kind::kSphere;
      else throw IoError(path + ": unknown primitive kind '" + kind + "'");
      prim.cx = p.value("cx", 0.0);
      prim.cy = p.value("cy", 0.0);
      prim.cz = p.value("cz", 0.0);
      prim.hx = p.value("hx", 0.0);
      prim.hy = p.value("hy", 0.0);
      prim.height = p.value("height", 0.0);
      prim.radius = p.value("radius", 0.0);
      s.primitives.push_back(prim);
    }
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path + ": " + e.what());
  }
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw IoError(path + ": " + e.what());
  }
  return s;
}

/// Grasps the PLY shows: the report's ranking for multi-cup outcomes, the
/// lone fallback grasp otherwise.
std::vector<RankedEntry> reported_entries(const PlanOutcome& outcome) {
  if (outcome.status == PlanStatus::kMultiCup) return outcome.plan.ranking;
  if (outcome.status == PlanStatus::kFallback)
    return {RankedEntry{{}, ScoreBreakdown{}, outcome.plan.optimal}};
  return {};
}

struct PlanArgs {
  std::string depth, affordance, intrinsics, gripper, config, out, ply;
  int threads = 0;
};

int run_plan(const PlanArgs& args) {
  PlanRequest request;
  request.gripper = load_gripper(args.gripper);
  if (!args.config.empty()) request.config = load_config(args.config);
  request.threads = args.threads;

  const AffordanceScene scene = load_scene(
      args.depth, args.affordance, args.intrinsics, request.config.normal_k);
  const PlanOutcome outcome = plan(scene, request);

  write_text_file(args.out,
                  build_report(outcome, request.config, request.gripper).dump());
  if (!args.ply.empty())
    write_grasps_ply(args.ply, scene, reported_entries(outcome));

  std::printf("outcome: %s\n", to_string(outcome.status));
  if (outcome.status == PlanStatus::kMultiCup) {
    const RankedEntry& top = outcome.plan.ranking.front();
    std::printf("grasps: %zu  max_obj: %d  J: %.6f\n",
                outcome.plan.ranking.size(), top.score.max_obj, top.score.j);
  }
  std::printf(
      "cells: %d  orientations: %d  raw: %d  checked: %d  total: %.1f ms\n",
      outcome.occupied_cells, outcome.orientation_count,
      outcome.raw_candidates, outcome.checked_candidates, outcome.t_total_ms);
  std::printf("report: %s\n", args.out.c_str());
  return kExitOk;
}

struct ValidateArgs {
  int random = 20;
  int grid = 32;
  int orientations = 16;
  unsigned seed = 20240915;
  std::string depth, affordance, intrinsics, gripper, config;
  int threads = 0;
};

int validate_random_instances(const ValidateArgs& args) {
  std::mt19937 rng(args.seed);
  for (int i = 0; i < args.random; ++i) {
    const RandomInstance inst =
        random_instance(rng, args.grid, args.orientations);
    const EncodedKernelSet kernels = build_encoded_kernels(
        inst.gripper, inst.samples.rotations, inst.grid.voxel_size);
    const ConvResult conv = conv3d_sparse(inst.grid, kernels, args.threads);
    const std::vector<GraspCandidate> decoded =
        decode(conv, inst.grid, inst.samples, inst.gripper);
    const std::vector<GraspCandidate> oracle =
        brute_force_candidates(inst.grid, inst.samples, inst.gripper);
    if (candidate_keys(decoded) != candidate_keys(oracle)) {
      std::fprintf(stderr,
                   "validate: instance %d mismatch (pipeline %zu vs oracle "
                   "%zu candidates)\n",
                   i, decoded.size(), oracle.size());
      return kExitValidation;
    }
    std::printf("instance %2d: ok (%zu candidates, %d cups, %d orientations)\n",
                i, decoded.size(), inst.gripper.cup_count(),
                inst.samples.count());
  }
  std::printf("validate: PASS (%d/%d instances match the brute-force oracle)\n",
              args.random, args.random);
  return kExitOk;
}

int validate_scene(const ValidateArgs& args) {
  PlanRequest request;
  request.gripper = load_gripper(args.gripper);
  if (!args.config.empty()) request.config = load_config(args.config);
  request.threads = args.threads;

  const AffordanceScene scene = load_scene(
      args.depth, args.affordance, args.intrinsics, request.config.normal_k);
  const PlanOutcome outcome = plan(scene, request);
  if (outcome.status != PlanStatus::kMultiCup) {
    std::printf("validate: %s outcome, no multi-cup grasps to check\n",
                to_string(outcome.status));
    return kExitOk;
  }

  double worst_residual = 0.0;
  int failures = 0;
  for (size_t i = 0; i < outcome.plan.ranking.size(); ++i) {
    const ConditionReport rep =
        check_conditions(outcome.plan.ranking[i].candidate, scene,
                         request.config);
    worst_residual = std::max(worst_residual, rep.distance_residual);
    if (!rep.all_ok()) {
      ++failures;
      std::fprintf(stderr,
                   "validate: grasp %zu fails conditions "
                   "(contacts=%d coplanar=%d normals=%d distances=%d)\n",
                   i, rep.cond_contacts, rep.cond_coplanar, rep.cond_normals,
                   rep.cond_distances);
    }
  }
  std::printf("validate: %zu grasps checked, %d failures, "
              "max distance residual %.6f m\n",
              outcome.plan.ranking.size(), failures, worst_residual);
  return failures == 0 ? kExitOk : kExitValidation;
}

struct BenchArgs {
  int size = 64;
  double occupancy = 0.05;
  int kernels = 32;
  int threads = 0;
  unsigned seed = 7;
};

int run_bench(const BenchArgs& args) {
  VoxelGrid grid;
  grid.voxel_size = 0.005;
  grid.dims = {args.size, args.size, args.size};
  grid.b_min = Vec3::Constant(-0.5 * args.size * grid.voxel_size);
  grid.b_max = grid.b_min + Vec3::Constant(args.size * grid.voxel_size);
  grid.occupancy.resize(grid.num_cells());
  grid.cell_slot.assign(grid.num_cells(), -1);

  std::mt19937 rng(args.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (auto& o : grid.occupancy) o = unit(rng) < args.occupancy ? 1 : 0;

  GripperSpec gripper;
  gripper.cup_centers_local = {
      {-0.03, -0.02, 0}, {0.03, -0.02, 0}, {-0.03, 0.02, 0}, {0.03, 0.02, 0}};
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  std::uniform_real_distribution<double> phi(0.0, kPi / 2);
  std::vector<Mat3> rotations;
  for (int n = 0; n < args.kernels; ++n)
    rotations.push_back(zyz_rotation(angle(rng), phi(rng), angle(rng)));
  const EncodedKernelSet kernels =
      build_encoded_kernels(gripper, rotations, grid.voxel_size);

  const double total_cells =
      static_cast<double>(grid.num_cells()) * args.kernels;
  std::printf("grid %d^3 (%lld cells), occupancy %.2f%%, %d kernels (K_e=%d)\n",
              args.size, static_cast<long long>(grid.num_cells()),
              100.0 * grid.occupied_count() / double(grid.num_cells()),
              args.kernels, kernels.size);

  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  const ConvResult dense = conv3d_dense(grid, kernels, args.threads);
  const auto t1 = clock::now();
  const ConvResult sparse = conv3d_sparse(grid, kernels, args.threads);
  const auto t2 = clock::now();

  const double dense_s = std::chrono::duration<double>(t1 - t0).count();
  const double sparse_s = std::chrono::duration<double>(t2 - t1).count();
  std::printf("dense:  %10.1f ms  (%.3g cells/s)\n", dense_s * 1e3,
              total_cells / dense_s);
  std::printf("sparse: %10.1f ms  (%.3g cells/s)\n", sparse_s * 1e3,
              total_cells / sparse_s);
  std::printf("speedup: %.1fx\n", dense_s / sparse_s);

  if (dense.volumes != sparse.volumes) {
    std::fprintf(stderr, "bench: dense and sparse outputs differ\n");
    return kExitValidation;
  }
  std::printf("outputs identical\n");
  return kExitOk;
}

struct GenSceneArgs {
  std::string spec, preset, out_dir;
};

int run_gen_scene(const GenSceneArgs& args) {
  SceneSpec spec;
  if (!args.spec.empty()) spec = load_scene_spec(args.spec);
  else spec = preset_scene(args.preset);

  const RenderedScene rendered = render_scene(spec);
  save_scene_files(rendered.gt, args.out_dir);

  int affordable = 0;
  for (float a : rendered.gt.affordance.data)
    if (a > 0.f) ++affordable;
  std::printf("scene %dx%d, %d affordance pixels, %zu regions -> %s\n",
              spec.width, spec.height, affordable,
              rendered.gt.regions.size(), args.out_dir.c_str());
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"multi-cup suction grasp planner"};
  app.require_subcommand(1);

  PlanArgs plan_args;
  CLI::App* plan_cmd = app.add_subcommand(
      "plan", "plan grasps for a depth + affordance scene");
  plan_cmd->add_option("--depth", plan_args.depth, "depth image (NPY, meters)")
      ->required();
  plan_cmd->add_option("--affordance", plan_args.affordance,
                       "affordance map (NPY, [0,1])")
      ->required();
  plan_cmd->add_option("--intrinsics", plan_args.intrinsics,
                       "camera intrinsics (JSON)")
      ->required();
  plan_cmd->add_option("--gripper", plan_args.gripper, "gripper spec (JSON)")
      ->required();
  plan_cmd->add_option("--config", plan_args.config,
                       "planner config (JSON); defaults when omitted");
  plan_cmd->add_option("--out", plan_args.out, "report output path (JSON)")
      ->required();
  plan_cmd->add_option("--ply", plan_args.ply,
                       "also write a point-cloud + grasp-marker PLY");
  plan_cmd->add_option("--threads", plan_args.threads, "0 = auto");

  ValidateArgs val_args;
  CLI::App* val_cmd = app.add_subcommand(
      "validate",
      "check the pipeline against the brute-force oracle, or a scene's "
      "grasps against the grasp conditions");
  val_cmd->add_option("--random", val_args.random,
                      "number of random instances");
  val_cmd->add_option("--grid", val_args.grid, "max grid cells per axis")
      ->check(CLI::Range(1, 64));
  val_cmd->add_option("--orientations", val_args.orientations,
                      "max orientations per instance")
      ->check(CLI::Range(1, 128));
  val_cmd->add_option("--seed", val_args.seed, "instance RNG seed");
  val_cmd->add_option("--depth", val_args.depth, "scene mode: depth NPY");
  val_cmd->add_option("--affordance", val_args.affordance,
                      "scene mode: affordance NPY");
  val_cmd->add_option("--intrinsics", val_args.intrinsics,
                      "scene mode: intrinsics JSON");
  val_cmd->add_option("--gripper", val_args.gripper,
                      "scene mode: gripper JSON");
  val_cmd->add_option("--config", val_args.config, "scene mode: config JSON");
  val_cmd->add_option("--threads", val_args.threads, "0 = auto");

  BenchArgs bench_args;
  CLI::App* bench_cmd =
      app.add_subcommand("bench", "time the dense vs sparse conv paths");
  bench_cmd->add_option("--size", bench_args.size, "grid cells per axis")
      ->check(CLI::Range(4, 128));
  bench_cmd->add_option("--occupancy", bench_args.occupancy,
                        "occupied-cell fraction")
      ->check(CLI::Range(0.0, 1.0));
  bench_cmd->add_option("--kernels", bench_args.kernels, "orientation count")
      ->check(CLI::Range(1, 512));
  bench_cmd->add_option("--threads", bench_args.threads, "0 = auto");
  bench_cmd->add_option("--seed", bench_args.seed, "occupancy RNG seed");

  GenSceneArgs gen_args;
  CLI::App* gen_cmd = app.add_subcommand(
      "gen-scene", "render a synthetic scene to depth/affordance/intrinsics");
  CLI::Option* spec_opt =
      gen_cmd->add_option("--spec", gen_args.spec, "scene spec (JSON)");
  gen_cmd->add_option("--preset", gen_args.preset,
                      "built-in scene: " + [] {
                        std::string names;
                        for (const auto& n : preset_names())
                          names += (names.empty() ? "" : ", ") + n;
                        return names;
                      }())
      ->excludes(spec_opt);
  gen_cmd->add_option("--out-dir", gen_args.out_dir, "output directory")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (plan_cmd->parsed()) return run_plan(plan_args);
    if (val_cmd->parsed()) {
      if (!val_args.depth.empty()) {
        if (val_args.affordance.empty() || val_args.intrinsics.empty() ||
            val_args.gripper.empty()) {
          std::fprintf(stderr,
                       "validate: scene mode needs --depth --affordance "
                       "--intrinsics --gripper\n");
          return kExitUsage;
        }
        return validate_scene(val_args);
      }
      return validate_random_instances(val_args);
    }
    if (bench_cmd->parsed()) return run_bench(bench_args);
    if (gen_cmd->parsed()) {
      if (gen_args.spec.empty() && gen_args.preset.empty()) {
        std::fprintf(stderr, "gen-scene: give --spec or --preset\n");
        return kExitUsage;
      }
      return run_gen_scene(gen_args);
    }
  } catch (const IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInput;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInput;
  }
  return kExitUsage;
}

}  // namespace multicup
