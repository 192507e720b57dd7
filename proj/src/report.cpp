#include "multicup/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace multicup {
namespace {

/// %.9g with canonical zero (never "-0") so serialize(parse(s)) == s.
std::string format_double(double d) {
  if (!std::isfinite(d)) d = 0.0;
  if (d == 0.0) return "0";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", d);
  return buf;
}

void escape_into(std::string& out, const std::string& s) {
  out.push_back('"');
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out.push_back(c);
        }
    }
  }
  out.push_back('"');
}

class Parser {
 public:
  explicit Parser(const std::string& text) : s_(text) {}

  JsonValue parse() {
    JsonValue v = value();
    skip_ws();
    if (pos_ != s_.size()) fail("trailing characters");
    return v;
  }

 private:
  const std::string& s_;
  size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& what) {
    throw IoError("JSON parse error at offset " + std::to_string(pos_) + ": " +
                  what);
  }
  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\n' ||
                                s_[pos_] == '\t' || s_[pos_] == '\r'))
      ++pos_;
  }
  char peek() {
    if (pos_ >= s_.size()) fail("unexpected end");
    return s_[pos_];
  }
  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  JsonValue value() {
    skip_ws();
    const char c = peek();
    if (c == '{') return object();
    if (c == '[') return array();
    if (c == '"') return JsonValue::str(string());
    if (c == 't' || c == 'f') return boolean();
    if (c == 'n') {
      literal("null");
      return JsonValue();
    }
    return number();
  }

  void literal(const char* lit) {
    const size_t n = std::strlen(lit);
    if (s_.compare(pos_, n, lit) != 0) fail("bad literal");
    pos_ += n;
  }

  JsonValue boolean() {
    if (peek() == 't') {
      literal("true");
      return JsonValue::boolean(true);
    }
    literal("false");
    return JsonValue::boolean(false);
  }

  std::string string() {
    expect('"');
    std::string out;
    while (true) {
      if (pos_ >= s_.size()) fail("unterminated string");
      char c = s_[pos_++];
      if (c == '"') break;
      if (c == '\\') {
        if (pos_ >= s_.size()) fail("bad escape");
        const char e = s_[pos_++];
        switch (e) {
          case '"': out.push_back('"'); break;
          case '\\': out.push_back('\\'); break;
          case '/': out.push_back('/'); break;
          case 'n': out.push_back('\n'); break;
          case 't': out.push_back('\t'); break;
          case 'r': out.push_back('\r'); break;
          case 'b': out.push_back('\b'); break;
          case 'f': out.push_back('\f'); break;
          case 'u': {
            if (pos_ + 4 > s_.size()) fail("bad unicode escape");
            const int code = std::stoi(s_.substr(pos_, 4), nullptr, 16);
            pos_ += 4;
            if (code < 0x80) {
              out.push_back(static_cast<char>(code));
            } else if (code < 0x800) {
              out.push_back(static_cast<char>(0xC0 | (code >> 6)));
              out.push_back(static_cast<char>(0x80 | (code & 0x3F)));
            } else {
              out.push_back(static_cast<char>(0xE0 | (code >> 12)));
              out.push_back(static_cast<char>(0x80 | ((code >> 6) & 0x3F)));
              out.push_back(static_cast<char>(0x80 | (code & 0x3F)));
            }
            break;
          }
          default: fail("bad escape");
        }
      } else {
        out.push_back(c);
      }
    }
    return out;
  }

  JsonValue number() {
    const size_t start = pos_;
    if (peek() == '-') ++pos_;
    while (pos_ < s_.size() &&
           (std::isdigit(static_cast<unsigned char>(s_[pos_])) ||
            s_[pos_] == '.' || s_[pos_] == 'e' || s_[pos_] == 'E' ||
            s_[pos_] == '+' || s_[pos_] == '-'))
      ++pos_;
    const std::string tok = s_.substr(start, pos_ - start);
    if (tok.empty() || tok == "-") fail("bad number");
    if (tok.find_first_of(".eE") == std::string::npos) {
      try {
        return JsonValue::integer(std::stoll(tok));
      } catch (const std::out_of_range&) {
        return JsonValue::number(std::stod(tok));
      }
    }
    return JsonValue::number(std::stod(tok));
  }

  JsonValue array() {
    expect('[');
    JsonValue arr = JsonValue::array();
    skip_ws();
    if (peek() == ']') {
      ++pos_;
      return arr;
    }
    while (true) {
      arr.push(value());
      skip_ws();
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      expect(']');
      return arr;
    }
  }

  JsonValue object() {
    expect('{');
    JsonValue obj = JsonValue::object();
    skip_ws();
    if (peek() == '}') {
      ++pos_;
      return obj;
    }
    while (true) {
      skip_ws();
      std::string key = string();
      skip_ws();
      expect(':');
      obj.set(key, value());
      skip_ws();
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      expect('}');
      return obj;
    }
  }
};

}  // namespace

JsonValue JsonValue::boolean(bool b) {
  JsonValue v;
  v.kind_ = Kind::kBool;
  v.bool_ = b;
  return v;
}
JsonValue JsonValue::integer(std::int64_t i) {
  JsonValue v;
  v.kind_ = Kind::kInt;
  v.int_ = i;
  return v;
}
JsonValue JsonValue::number(double d) {
  JsonValue v;
  v.kind_ = Kind::kDouble;
  v.double_ = std::isfinite(d) ? d : 0.0;
  return v;
}
JsonValue JsonValue::str(std::string s) {
  JsonValue v;
  v.kind_ = Kind::kString;
  v.string_ = std::move(s);
  return v;
}
JsonValue JsonValue::array() {
  JsonValue v;
  v.kind_ = Kind::kArray;
  return v;
}
JsonValue JsonValue::object() {
  JsonValue v;
  v.kind_ = Kind::kObject;
  return v;
}

void JsonValue::push(JsonValue v) { items_.push_back(std::move(v)); }

void JsonValue::set(const std::string& key, JsonValue v) {
  for (auto& [k, existing] : members_) {
    if (k == key) {
      existing = std::move(v);
      return;
    }
  }
  members_.emplace_back(key, std::move(v));
}

double JsonValue::as_double() const {
  return kind_ == Kind::kInt ? static_cast<double>(int_) : double_;
}

const JsonValue* JsonValue::find(const std::string& key) const {
  for (const auto& [k, v] : members_)
    if (k == key) return &v;
  return nullptr;
}

void JsonValue::dump_to(std::string& out, int indent, int depth) const {
  const std::string pad(size_t(indent) * (depth + 1), ' ');
  const std::string close_pad(size_t(indent) * depth, ' ');
  switch (kind_) {
    case Kind::kNull: out += "null"; break;
    case Kind::kBool: out += bool_ ? "true" : "false"; break;
    case Kind::kInt: out += std::to_string(int_); break;
    case Kind::kDouble: out += format_double(double_); break;
    case Kind::kString: escape_into(out, string_); break;
    case Kind::kArray: {
      if (items_.empty()) {
        out += "[]";
        break;
      }
      out += "[\n";
      for (size_t i = 0; i < items_.size(); ++i) {
        out += pad;
        items_[i].dump_to(out, indent, depth + 1);
        if (i + 1 < items_.size()) out += ",";
        out += "\n";
      }
      out += close_pad + "]";
      break;
    }
    case Kind::kObject: {
      if (members_.empty()) {
        out += "{}";
        break;
      }
      out += "{\n";
      for (size_t i = 0; i < members_.size(); ++i) {
        out += pad;
        escape_into(out, members_[i].first);
        out += ": ";
        members_[i].second.dump_to(out, indent, depth + 1);
        if (i + 1 < members_.size()) out += ",";
        out += "\n";
      }
      out += close_pad + "}";
      break;
    }
  }
}

std::string JsonValue::dump(int indent) const {
  std::string out;
  dump_to(out, indent, 0);
  out += "\n";
  return out;
}

JsonValue JsonValue::parse(const std::string& text) {
  return Parser(text).parse();
}

namespace {

JsonValue vec3_json(const Vec3& v) {
  JsonValue a = JsonValue::array();
  for (int i = 0; i < 3; ++i) a.push(JsonValue::number(v[i]));
  return a;
}

JsonValue mat3_json(const Mat3& m) {
  JsonValue a = JsonValue::array();
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) a.push(JsonValue::number(m(r, c)));
  return a;
}

JsonValue grasp_json(const GraspCandidate& cand, const ScoreBreakdown* score) {
  JsonValue g = JsonValue::object();
  g.set("position", vec3_json(cand.position));
  g.set("orientation", mat3_json(cand.orientation));
  JsonValue cups = JsonValue::array();
  for (const Vec3& c : cand.cup_centers_world) cups.push(vec3_json(c));
  g.set("cup_centers", std::move(cups));
  JsonValue act = JsonValue::array();
  for (uint8_t a : cand.activation) act.push(JsonValue::integer(a));
  g.set("activation", std::move(act));
  g.set("source", JsonValue::str(to_string(cand.source)));
  if (score) {
    g.set("max_obj", JsonValue::integer(score->max_obj));
    g.set("j", JsonValue::number(score->j));
    JsonValue b = JsonValue::object();
    b.set("j_dist", JsonValue::number(score->j_dist));
    b.set("j_var", JsonValue::number(score->j_var));
    b.set("j_orient", JsonValue::number(score->j_orient));
    g.set("breakdown", std::move(b));
  }
  return g;
}

}  // namespace

JsonValue build_report(const PlanOutcome& outcome, const PlannerConfig& cfg,
                       const GripperSpec& gripper, int max_grasps) {
  JsonValue root = JsonValue::object();
  root.set("schema_version", JsonValue::integer(1));
  root.set("outcome", JsonValue::str(to_string(outcome.status)));

  JsonValue config = JsonValue::object();
  config.set("voxel_size", JsonValue::number(cfg.voxel_size));
  config.set("angle_interval_deg", JsonValue::number(rad2deg(cfg.angle_interval)));
  config.set("eps_normal_deg", JsonValue::number(rad2deg(cfg.eps_normal)));
  config.set("eps_dist", JsonValue::number(cfg.eps_dist));
  config.set("min_points_per_voxel", JsonValue::integer(cfg.min_points_per_voxel));
  config.set("normal_k", JsonValue::integer(cfg.normal_k));
  config.set("top_fraction", JsonValue::number(cfg.top_fraction));
  config.set("min_cluster_size", JsonValue::integer(cfg.min_cluster_size));
  config.set("w_dist", JsonValue::number(cfg.w_dist));
  config.set("w_var", JsonValue::number(cfg.w_var));
  config.set("w_orient", JsonValue::number(cfg.w_orient));
  root.set("config", std::move(config));

  JsonValue grip = JsonValue::object();
  JsonValue cups = JsonValue::array();
  for (const Vec3& c : gripper.cup_centers_local) cups.push(vec3_json(c));
  grip.set("cup_centers_local", std::move(cups));
  grip.set("cup_radius", JsonValue::number(gripper.cup_radius));
  root.set("gripper", std::move(grip));

  if (outcome.status == PlanStatus::kMultiCup) {
    const RankedEntry& top = outcome.plan.ranking.front();
    root.set("optimal", grasp_json(top.candidate, &top.score));
    JsonValue ranking = JsonValue::array();
    const int n = std::min<int>(max_grasps,
                                static_cast<int>(outcome.plan.ranking.size()));
    for (int i = 0; i < n; ++i) {
      const RankedEntry& e = outcome.plan.ranking[i];
      JsonValue entry = grasp_json(e.candidate, &e.score);
      JsonValue labels = JsonValue::array();
      for (int l : e.contact_labels) labels.push(JsonValue::integer(l));
      entry.set("contact_labels", std::move(labels));
      ranking.push(std::move(entry));
    }
    root.set("ranking", std::move(ranking));
    root.set("ranking_total", JsonValue::integer(
        static_cast<std::int64_t>(outcome.plan.ranking.size())));
  } else if (outcome.status == PlanStatus::kFallback) {
    root.set("optimal", grasp_json(outcome.plan.optimal, nullptr));
    root.set("ranking", JsonValue::array());
    root.set("ranking_total", JsonValue::integer(0));
  } else {
    root.set("ranking", JsonValue::array());
    root.set("ranking_total", JsonValue::integer(0));
  }

  JsonValue counters = JsonValue::object();
  counters.set("occupied_cells", JsonValue::integer(outcome.occupied_cells));
  counters.set("orientations", JsonValue::integer(outcome.orientation_count));
  counters.set("kernels_built", JsonValue::integer(outcome.kernels_built));
  counters.set("cells_convolved", JsonValue::integer(outcome.cells_convolved));
  counters.set("raw_candidates", JsonValue::integer(outcome.raw_candidates));
  counters.set("checked_candidates",
               JsonValue::integer(outcome.checked_candidates));
  counters.set("clusters", JsonValue::integer(outcome.cluster_count));
  root.set("counters", std::move(counters));

  JsonValue timings = JsonValue::object();
  timings.set("voxelize_ms", JsonValue::number(outcome.t_voxelize_ms));
  timings.set("orientations_ms", JsonValue::number(outcome.t_orientations_ms));
  timings.set("kernels_ms", JsonValue::number(outcome.t_kernels_ms));
  timings.set("conv_ms", JsonValue::number(outcome.t_conv_ms));
  timings.set("decode_ms", JsonValue::number(outcome.t_decode_ms));
  timings.set("rank_ms", JsonValue::number(outcome.t_rank_ms));
  timings.set("total_ms", JsonValue::number(outcome.t_total_ms));
  root.set("timings", std::move(timings));
  return root;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  if (!out) throw IoError("short write to " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_grasps_ply(const std::string& path, const AffordanceScene& scene,
                      const std::vector<RankedEntry>& entries,
                      int max_grasps) {
  const int grasps = std::min<int>(max_grasps, static_cast<int>(entries.size()));
  int scene_points = 0;
  for (int i = 0; i < scene.size(); ++i)
    if (scene.valid_at(i)) ++scene_points;

  int cups = 0;
  for (int g = 0; g < grasps; ++g)
    cups += static_cast<int>(entries[g].candidate.cup_centers_world.size());

  std::ostringstream out;
  out << "ply\nformat ascii 1.0\n";
  out << "element vertex " << (scene_points + cups) << "\n";
  out << "property float x\nproperty float y\nproperty float z\n";
  out << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  out << "end_header\n";

  char line[128];
  for (int i = 0; i < scene.size(); ++i) {
    if (!scene.valid_at(i)) continue;
    const Vec3& p = scene.points[i];
    const bool masked = scene.affordance[i] > 0.f;
    std::snprintf(line, sizeof line, "%.6f %.6f %.6f %d %d %d\n", p.x(), p.y(),
                  p.z(), masked ? 120 : 160, masked ? 140 : 160,
                  masked ? 220 : 160);
    out << line;
  }
  for (int g = 0; g < grasps; ++g) {
    const GraspCandidate& cand = entries[g].candidate;
    for (size_t i = 0; i < cand.cup_centers_world.size(); ++i) {
      const Vec3& c = cand.cup_centers_world[i];
      const bool on = cand.activation[i] != 0;
      std::snprintf(line, sizeof line, "%.6f %.6f %.6f %d %d %d\n", c.x(),
                    c.y(), c.z(), on ? 30 : 220, on ? 200 : 40, 40);
      out << line;
    }
  }
  write_text_file(path, out.str());
}

}  // namespace multicup
