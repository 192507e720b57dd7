#include <doctest.h>

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

#include "helpers.hpp"
#include "multicup/cli.hpp"
#include "multicup/report.hpp"

using namespace multicup;

namespace {

AffordanceScene full_plane_scene() {
  return testing::flat_scene(100, 52, 500.0, 0.5,
                             [](int, int) { return 1.f; });
}

PlanRequest default_request() {
  PlanRequest req;
  req.gripper.cup_centers_local = {Vec3(-0.04, 0, 0), Vec3(0.04, 0, 0)};
  req.threads = 1;
  return req;
}

int cli(const std::vector<const char*>& args) {
  std::vector<const char*> argv;
  argv.push_back("multicup");
  argv.insert(argv.end(), args.begin(), args.end());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const std::string& path) { return read_text_file(path); }

}  // namespace

TEST_CASE("json values serialize canonically and round-trip by byte") {
  JsonValue root = JsonValue::object();
  root.set("int", JsonValue::integer(42));
  root.set("big", JsonValue::integer(1234567890123456789LL));
  root.set("negative", JsonValue::integer(-7));
  root.set("third", JsonValue::number(1.0 / 3.0));
  root.set("tenth", JsonValue::number(0.1));
  root.set("neg_zero", JsonValue::number(-0.0));
  root.set("nan", JsonValue::number(std::numeric_limits<double>::quiet_NaN()));
  root.set("text", JsonValue::str("a\"b\\c\nd\te\rf"));
  root.set("flag", JsonValue::boolean(true));
  root.set("nothing", JsonValue());
  JsonValue arr = JsonValue::array();
  arr.push(JsonValue::integer(1));
  arr.push(JsonValue::str("two"));
  JsonValue inner = JsonValue::object();
  inner.set("k", JsonValue::number(-2.5));
  arr.push(std::move(inner));
  root.set("list", std::move(arr));
  root.set("empty_list", JsonValue::array());
  root.set("empty_obj", JsonValue::object());

  const std::string once = root.dump();
  CHECK(once.back() == '\n');
  const JsonValue parsed = JsonValue::parse(once);
  CHECK(parsed.dump() == once);

  // Kinds and values survive.
  CHECK(parsed.find("int")->kind() == JsonValue::Kind::kInt);
  CHECK(parsed.find("int")->as_int() == 42);
  CHECK(parsed.find("big")->as_int() == 1234567890123456789LL);
  CHECK(parsed.find("third")->kind() == JsonValue::Kind::kDouble);
  CHECK(parsed.find("text")->as_string() == "a\"b\\c\nd\te\rf");
  CHECK(parsed.find("flag")->as_bool());
  CHECK(parsed.find("nothing")->kind() == JsonValue::Kind::kNull);
  CHECK(parsed.find("list")->items().size() == 3);
  CHECK(parsed.find("missing") == nullptr);

  // Canonical number text: %.9g, "-0" normalized, non-finite zeroed.
  CHECK(once.find("\"third\": 0.333333333") != std::string::npos);
  CHECK(once.find("\"tenth\": 0.1") != std::string::npos);
  CHECK(once.find("\"neg_zero\": 0") != std::string::npos);
  CHECK(once.find("\"nan\": 0") != std::string::npos);

  // Insertion order is preserved; overwriting keeps the slot.
  CHECK(parsed.members().front().first == "int");
  JsonValue ordered = JsonValue::object();
  ordered.set("a", JsonValue::integer(1));
  ordered.set("b", JsonValue::integer(2));
  ordered.set("a", JsonValue::integer(3));
  CHECK(ordered.members().size() == 2);
  CHECK(ordered.members()[0].first == "a");
  CHECK(ordered.members()[0].second.as_int() == 3);
}

TEST_CASE("json parser accepts escapes and rejects malformed input") {
  const JsonValue v = JsonValue::parse(
      "{\"s\": \"caf\\u00e9 \\/ \\b\\f\", \"e\": 1e3, \"neg\": -4}");
  CHECK(v.find("s")->as_string() == "caf\xc3\xa9 / \b\f");
  CHECK(v.find("e")->as_double() == 1000.0);
  CHECK(v.find("neg")->as_int() == -4);

  CHECK_THROWS_AS(JsonValue::parse("{\"a\": 1} extra"), IoError);
  CHECK_THROWS_AS(JsonValue::parse("{\"a\": tru}"), IoError);
  CHECK_THROWS_AS(JsonValue::parse("\"unterminated"), IoError);
  CHECK_THROWS_AS(JsonValue::parse("[1, ]"), IoError);
  CHECK_THROWS_AS(JsonValue::parse(""), IoError);
}

TEST_CASE("multi-cup reports carry the full schema") {
  const AffordanceScene scene = full_plane_scene();
  const PlanRequest req = default_request();
  const PlanOutcome out = plan(scene, req);
  REQUIRE(out.status == PlanStatus::kMultiCup);
  REQUIRE(out.plan.ranking.size() >= 4);

  const JsonValue report = build_report(out, req.config, req.gripper);
  CHECK(report.find("schema_version")->as_int() == 1);
  CHECK(report.find("outcome")->as_string() == "multi_cup");

  const JsonValue* cfg = report.find("config");
  REQUIRE(cfg);
  CHECK(cfg->find("voxel_size")->as_double() == 0.005);
  CHECK(cfg->find("angle_interval_deg")->as_double() ==
        doctest::Approx(5.0).epsilon(1e-12));
  CHECK(cfg->find("eps_normal_deg")->as_double() ==
        doctest::Approx(11.5).epsilon(1e-12));
  CHECK(cfg->find("min_points_per_voxel")->as_int() == 11);

  const JsonValue* grip = report.find("gripper");
  REQUIRE(grip);
  CHECK(grip->find("cup_centers_local")->items().size() == 2);
  CHECK(grip->find("cup_centers_local")->items()[1].items()[0].as_double() ==
        0.04);

  const JsonValue* optimal = report.find("optimal");
  REQUIRE(optimal);
  REQUIRE(optimal->find("position"));
  for (int i = 0; i < 3; ++i)
    CHECK(optimal->find("position")->items()[i].as_double() ==
          doctest::Approx(out.plan.optimal.position[i]).epsilon(1e-8));
  CHECK(optimal->find("orientation")->items().size() == 9);
  CHECK(optimal->find("activation")->items().size() == 2);
  CHECK(optimal->find("source")->as_string() == "multi_cup");
  CHECK(optimal->find("max_obj")->as_int() ==
        out.plan.ranking.front().score.max_obj);
  CHECK(optimal->find("j")->as_double() ==
        doctest::Approx(out.plan.ranking.front().score.j).epsilon(1e-8));
  REQUIRE(optimal->find("breakdown"));
  CHECK(optimal->find("breakdown")->find("j_orient"));

  // Ranking mirrors the outcome, capped by max_grasps.
  CHECK(report.find("ranking_total")->as_int() ==
        static_cast<std::int64_t>(out.plan.ranking.size()));
  CHECK(report.find("ranking")->items().size() ==
        std::min<size_t>(50, out.plan.ranking.size()));
  CHECK(report.find("ranking")->items()[0].find("contact_labels"));

  const JsonValue capped = build_report(out, req.config, req.gripper, 3);
  CHECK(capped.find("ranking")->items().size() == 3);
  CHECK(capped.find("ranking_total")->as_int() ==
        static_cast<std::int64_t>(out.plan.ranking.size()));

  const JsonValue* counters = report.find("counters");
  REQUIRE(counters);
  CHECK(counters->find("occupied_cells")->as_int() == out.occupied_cells);
  CHECK(counters->find("orientations")->as_int() == out.orientation_count);
  CHECK(counters->find("cells_convolved")->as_int() == out.cells_convolved);
  REQUIRE(report.find("timings"));
  CHECK(report.find("timings")->find("total_ms")->as_double() > 0.0);

  // The serialized report is byte-stable through a parse cycle.
  const std::string text = report.dump();
  CHECK(JsonValue::parse(text).dump() == text);
}

TEST_CASE("fallback and no-solution reports stay minimal") {
  const AffordanceScene scene = full_plane_scene();
  PlanRequest req = default_request();
  req.config.min_points_per_voxel = 1000;
  const PlanOutcome fb = plan(scene, req);
  REQUIRE(fb.status == PlanStatus::kFallback);

  const JsonValue report = build_report(fb, req.config, req.gripper);
  CHECK(report.find("outcome")->as_string() == "single_cup_fallback");
  const JsonValue* optimal = report.find("optimal");
  REQUIRE(optimal);
  CHECK(optimal->find("source")->as_string() == "single_cup_fallback");
  // No score members on a fallback grasp.
  CHECK(optimal->find("max_obj") == nullptr);
  CHECK(optimal->find("breakdown") == nullptr);
  CHECK(report.find("ranking")->items().empty());
  CHECK(report.find("ranking_total")->as_int() == 0);

  const AffordanceScene empty =
      testing::flat_scene(20, 20, 500.0, 0.5, [](int, int) { return 0.f; });
  const PlanOutcome none = plan(empty, default_request());
  REQUIRE(none.status == PlanStatus::kNoSolution);
  const JsonValue nr = build_report(none, req.config, req.gripper);
  CHECK(nr.find("outcome")->as_string() == "no_solution");
  CHECK(nr.find("optimal") == nullptr);
  CHECK(nr.find("ranking")->items().empty());
}

TEST_CASE("grasp ply lists valid points then cup markers") {
  AffordanceScene scene =
      testing::flat_scene(8, 6, 400.0, 0.5, [](int v, int u) {
        return (u < 4 && v < 3) ? 1.f : 0.f;
      });
  const double nan = std::numeric_limits<double>::quiet_NaN();
  scene.points[scene.index(5, 7)] = Vec3(nan, nan, nan);  // dropped

  RankedEntry a;
  a.candidate.cup_centers_world = {Vec3(0.01, 0, 0.5), Vec3(-0.01, 0, 0.5)};
  a.candidate.activation = {1, 0};
  RankedEntry b = a;
  b.candidate.cup_centers_world = {Vec3(0.02, 0, 0.5), Vec3(-0.02, 0, 0.5)};

  const std::string path = testing::temp_dir("ply") + "/grasps.ply";
  write_grasps_ply(path, scene, {a, b}, /*max_grasps=*/1);

  std::istringstream in(slurp(path));
  std::string line;
  int declared = -1;
  std::vector<std::string> body;
  bool in_body = false;
  while (std::getline(in, line)) {
    if (in_body) {
      body.push_back(line);
    } else if (line.rfind("element vertex ", 0) == 0) {
      declared = std::stoi(line.substr(15));
    } else if (line == "end_header") {
      in_body = true;
    }
  }
  // 47 valid scene points plus 2 cups of the single reported grasp.
  CHECK(declared == 49);
  REQUIRE(static_cast<int>(body.size()) == declared);

  // Affordance-positive points are tinted, plain ones gray.
  CHECK(body.front().substr(body.front().size() - 11) == "120 140 220");
  CHECK(body[7].substr(body[7].size() - 11) == "160 160 160");
  // Markers: active cup green-ish, inactive red-ish, grasp `a` only.
  const std::string active = body[body.size() - 2];
  const std::string inactive = body.back();
  CHECK(active.find("0.010000") == 0);
  CHECK(active.substr(active.size() - 9) == "30 200 40");
  CHECK(inactive.rfind("220 40 40") == inactive.size() - 9);
}

TEST_CASE("cli subcommands run end to end with documented exit codes") {
  const std::string dir = testing::temp_dir("cli");
  const std::string scene_dir = dir + "/scene";

  // Usage errors: no subcommand, gen-scene without a source.
  CHECK(cli({}) == 1);
  CHECK(cli({"gen-scene", "--out-dir", scene_dir.c_str()}) == 1);

  // Generate a small scene from an inline spec.
  const std::string spec_path = dir + "/spec.json";
  write_text_file(spec_path, R"({
    "width": 121, "height": 91,
    "primitives": [{"kind": "box", "hx": 0.06, "hy": 0.05, "height": 0.02}]
  })");
  CHECK(cli({"gen-scene", "--spec", spec_path.c_str(), "--out-dir",
             scene_dir.c_str()}) == 0);
  CHECK(std::ifstream(scene_dir + "/depth.npy").good());
  CHECK(std::ifstream(scene_dir + "/affordance.npy").good());
  CHECK(std::ifstream(scene_dir + "/intrinsics.json").good());

  CHECK(cli({"gen-scene", "--preset", "no-such-preset", "--out-dir",
             (dir + "/x").c_str()}) == 2);

  // Plan against the generated scene.
  const std::string gripper_path = dir + "/gripper.json";
  write_text_file(gripper_path,
                  R"({"cup_centers_local": [[-0.04, 0, 0], [0.04, 0, 0]]})");
  const std::string depth = scene_dir + "/depth.npy";
  const std::string aff = scene_dir + "/affordance.npy";
  const std::string intr = scene_dir + "/intrinsics.json";
  const std::string report_path = dir + "/report.json";
  const std::string ply_path = dir + "/grasps.ply";
  CHECK(cli({"plan", "--depth", depth.c_str(), "--affordance", aff.c_str(),
             "--intrinsics", intr.c_str(), "--gripper", gripper_path.c_str(),
             "--out", report_path.c_str(), "--ply", ply_path.c_str(),
             "--threads", "1"}) == 0);

  const JsonValue report = JsonValue::parse(slurp(report_path));
  CHECK(report.find("outcome")->as_string() == "multi_cup");
  CHECK(report.find("ranking_total")->as_int() > 0);
  CHECK(std::ifstream(ply_path).good());

  // Config overrides: degree keys parse, unknown keys are input errors.
  const std::string config_path = dir + "/config.json";
  write_text_file(config_path,
                  R"({"eps_normal_deg": 10.0, "min_cluster_size": 4})");
  CHECK(cli({"plan", "--depth", depth.c_str(), "--affordance", aff.c_str(),
             "--intrinsics", intr.c_str(), "--gripper", gripper_path.c_str(),
             "--config", config_path.c_str(), "--out",
             (dir + "/report2.json").c_str(), "--threads", "1"}) == 0);
  const JsonValue second = JsonValue::parse(slurp(dir + "/report2.json"));
  CHECK(second.find("config")->find("eps_normal_deg")->as_double() ==
        doctest::Approx(10.0).epsilon(1e-12));

  const std::string bad_config = dir + "/bad_config.json";
  write_text_file(bad_config, R"({"voxel": 0.01})");
  CHECK(cli({"plan", "--depth", depth.c_str(), "--affordance", aff.c_str(),
             "--intrinsics", intr.c_str(), "--gripper", gripper_path.c_str(),
             "--config", bad_config.c_str(), "--out",
             (dir + "/report3.json").c_str()}) == 2);

  // Missing input file.
  CHECK(cli({"plan", "--depth", (dir + "/nope.npy").c_str(), "--affordance",
             aff.c_str(), "--intrinsics", intr.c_str(), "--gripper",
             gripper_path.c_str(), "--out", (dir + "/r.json").c_str()}) == 2);

  // Malformed gripper spec.
  const std::string bad_gripper = dir + "/bad_gripper.json";
  write_text_file(bad_gripper, R"({"cup_radius": 0.01})");
  CHECK(cli({"plan", "--depth", depth.c_str(), "--affordance", aff.c_str(),
             "--intrinsics", intr.c_str(), "--gripper", bad_gripper.c_str(),
             "--out", (dir + "/r.json").c_str()}) == 2);

  // Oracle cross-check on a few random instances.
  CHECK(cli({"validate", "--random", "3", "--threads", "1"}) == 0);

  // Scene mode re-checks planned grasps against the grasp conditions.
  CHECK(cli({"validate", "--depth", depth.c_str(), "--affordance", aff.c_str(),
             "--intrinsics", intr.c_str(), "--gripper", gripper_path.c_str(),
             "--threads", "1"}) == 0);
  CHECK(cli({"validate", "--depth", depth.c_str()}) == 1);

  // Conv micro-benchmark agrees across paths on a tiny grid.
  CHECK(cli({"bench", "--size", "12", "--kernels", "2", "--threads", "1"}) ==
        0);
}
