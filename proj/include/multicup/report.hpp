#pragma once

#include <string>

#include "multicup/planner.hpp"

namespace multicup {

/// Minimal insertion-ordered JSON value for canonical, byte-stable output.
/// Floats print with %.9g; round-tripping a serialized report reproduces
/// the bytes exactly.
class JsonValue {
 public:
  enum class Kind { kNull, kBool, kInt, kDouble, kString, kArray, kObject };

  JsonValue() : kind_(Kind::kNull) {}
  static JsonValue boolean(bool b);
  static JsonValue integer(std::int64_t i);
  static JsonValue number(double d);
  static JsonValue str(std::string s);
  static JsonValue array();
  static JsonValue object();

  Kind kind() const { return kind_; }
  void push(JsonValue v);                       // arrays
  void set(const std::string& key, JsonValue v); // objects, insertion order

  bool as_bool() const { return bool_; }
  std::int64_t as_int() const { return int_; }
  double as_double() const;
  const std::string& as_string() const { return string_; }
  const std::vector<JsonValue>& items() const { return items_; }
  const std::vector<std::pair<std::string, JsonValue>>& members() const {
    return members_;
  }
  const JsonValue* find(const std::string& key) const;

  std::string dump(int indent = 2) const;
  static JsonValue parse(const std::string& text);

 private:
  Kind kind_;
  bool bool_ = false;
  std::int64_t int_ = 0;
  double double_ = 0.0;
  std::string string_;
  std::vector<JsonValue> items_;
  std::vector<std::pair<std::string, JsonValue>> members_;

  void dump_to(std::string& out, int indent, int depth) const;
};

/// Serializes a plan outcome (schema_version, parameters, grasps with pose
/// + activation + scores, counters, timings).
JsonValue build_report(const PlanOutcome& outcome, const PlannerConfig& cfg,
                       const GripperSpec& gripper, int max_grasps = 50);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

/// ASCII PLY holding every valid scene point (gray, affordance-positive
/// ones tinted blue) plus cup_count marker vertices per reported grasp
/// (green = active cup, red = inactive).
void write_grasps_ply(const std::string& path, const AffordanceScene& scene,
                      const std::vector<RankedEntry>& entries,
                      int max_grasps = 50);

}  // namespace multicup
