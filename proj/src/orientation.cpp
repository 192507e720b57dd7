#include "multicup/orientation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>

#include <json.hpp>

namespace multicup {

AngleLattice::AngleLattice(double angle_interval_rad)
    : angle_interval(angle_interval_rad) {
  if (!(angle_interval_rad > 0.0) || angle_interval_rad > kPi / 2)
    throw std::invalid_argument("angle interval must be in (0, pi/2]");
  n_theta = std::max(1, static_cast<int>(std::lround(2 * kPi / angle_interval)));
  n_phi = std::max(1, static_cast<int>(std::lround((kPi / 2) / angle_interval)));
}

std::pair<int, int> AngleLattice::key_of(double theta, double phi) const {
  int jj = static_cast<int>(std::lround(phi / angle_interval));
  jj = std::clamp(jj, 0, n_phi);
  if (jj == 0) return {0, 0};
  int ii = static_cast<int>(std::lround((theta + kPi) / angle_interval));
  ii = ((ii % n_theta) + n_theta) % n_theta;
  return {ii, jj};
}

std::pair<int, int> AngleLattice::key_of_normal(const Vec3& n) const {
  const auto [theta, phi] = vec_to_angles(n);
  return key_of(theta, phi);
}

Vec3 AngleLattice::direction(int ii, int jj) const {
  const double theta = theta_of(ii);
  const double phi = phi_of(jj);
  return {std::cos(theta) * std::sin(phi), std::sin(theta) * std::sin(phi),
          std::cos(phi)};
}

const std::vector<std::pair<int, int>>& NormalOrientationMap::orientations_for(
    int ii, int jj) const {
  if (jj < 0 || jj > lattice_.n_phi)
    throw std::out_of_range("normal key jj out of range");
  if (jj == 0) ii = 0;
  if (ii < 0 || ii >= lattice_.n_theta)
    throw std::out_of_range("normal key ii out of range");
  return entries_[size_t(jj) * lattice_.n_theta + ii];
}

NormalOrientationMap build_orientation_map(double angle_interval_rad,
                                           double eps_normal_rad) {
  if (angle_interval_rad > kPi / 4)
    throw std::invalid_argument("angle interval must be <= pi/4");
  if (!(eps_normal_rad > 0.0))
    throw std::invalid_argument("eps_normal must be > 0");

  NormalOrientationMap map;
  map.lattice_ = AngleLattice(angle_interval_rad);
  map.eps_normal_ = eps_normal_rad;
  const AngleLattice& lat = map.lattice_;
  map.entries_.assign(size_t(lat.n_phi + 1) * lat.n_theta, {});

  for (int jj = 0; jj <= lat.n_phi; ++jj) {
    const int ii_count = jj == 0 ? 1 : lat.n_theta;
    for (int ii = 0; ii < ii_count; ++ii) {
      auto& entry = map.entries_[size_t(jj) * lat.n_theta + ii];
      const Vec3 n = lat.direction(ii, jj);
      for (int jjp = 0; jjp <= lat.n_phi; ++jjp) {
        if (jjp == 0) {
          // Gripper-axis pole: a single lattice direction for any ii'.
          if (angle_from_dot(n.z()) < eps_normal_rad) entry.push_back({0, 0});
          continue;
        }
        if (jj == 0) {
          // Deviation from the pole normal is phi' for every azimuth; all
          // ii' match or none do, so store the ii' = 0 representative.
          if (lat.phi_of(jjp) < eps_normal_rad) entry.push_back({0, jjp});
          continue;
        }
        for (int iip = 0; iip < lat.n_theta; ++iip) {
          const Vec3 g = lat.direction(iip, jjp);
          if (angle_from_dot(n.dot(g)) < eps_normal_rad)
            entry.push_back({iip, jjp});
        }
      }
    }
  }
  return map;
}

void NormalOrientationMap::save(const std::string& path) const {
  nlohmann::json j;
  j["angle_interval"] = lattice_.angle_interval;
  j["eps_normal"] = eps_normal_;
  nlohmann::json entries = nlohmann::json::object();
  for (int jj = 0; jj <= lattice_.n_phi; ++jj) {
    const int ii_count = jj == 0 ? 1 : lattice_.n_theta;
    for (int ii = 0; ii < ii_count; ++ii) {
      const auto& e = entries_[size_t(jj) * lattice_.n_theta + ii];
      nlohmann::json list = nlohmann::json::array();
      for (const auto& [iip, jjp] : e) list.push_back({iip, jjp});
      entries[std::to_string(ii) + "," + std::to_string(jj)] = list;
    }
  }
  j["entries"] = std::move(entries);
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << j.dump() << "\n";
}

bool NormalOrientationMap::load(const std::string& path,
                                double angle_interval_rad,
                                double eps_normal_rad) {
  std::ifstream in(path);
  if (!in) return false;
  nlohmann::json j;
  try {
    in >> j;
    if (std::abs(j.at("angle_interval").get<double>() - angle_interval_rad) >
            1e-12 ||
        std::abs(j.at("eps_normal").get<double>() - eps_normal_rad) > 1e-12)
      return false;
    AngleLattice lat(angle_interval_rad);
    std::vector<std::vector<std::pair<int, int>>> entries(
        size_t(lat.n_phi + 1) * lat.n_theta);
    for (const auto& [key, list] : j.at("entries").items()) {
      const auto comma = key.find(',');
      if (comma == std::string::npos) return false;
      const int ii = std::stoi(key.substr(0, comma));
      const int jj = std::stoi(key.substr(comma + 1));
      if (jj < 0 || jj > lat.n_phi || ii < 0 || ii >= lat.n_theta) return false;
      auto& e = entries[size_t(jj) * lat.n_theta + ii];
      for (const auto& pair : list)
        e.push_back({pair.at(0).get<int>(), pair.at(1).get<int>()});
    }
    lattice_ = lat;
    eps_normal_ = eps_normal_rad;
    entries_ = std::move(entries);
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

OrientationSamples sample_gripper_orientations(const AffordanceScene& scene,
                                               const NormalOrientationMap& map,
                                               double top_fraction) {
  if (!(top_fraction > 0.0) || top_fraction > 1.0)
    throw std::invalid_argument("top_fraction must be in (0, 1]");

  const AngleLattice& lat = map.lattice();
  std::map<std::pair<int, int>, int> votes;
  for (int i = 0; i < scene.size(); ++i) {
    if (!(scene.affordance[i] > 0.f)) continue;
    const Vec3& n = scene.normals[i];
    if (!n.allFinite()) continue;
    ++votes[lat.key_of_normal(n)];
  }

  OrientationSamples out;
  if (votes.empty()) return out;

  // Threshold at the (1 - top_fraction) quantile of the ascending counts;
  // everything at or above it survives, so ties are never split and at
  // least one key remains.
  std::vector<int> counts;
  counts.reserve(votes.size());
  for (const auto& [key, c] : votes) counts.push_back(c);
  std::sort(counts.begin(), counts.end());
  const int k = static_cast<int>(counts.size());
  const int qi = std::min(
      k - 1, static_cast<int>(std::ceil((1.0 - top_fraction) * k)));
  const int threshold = counts[qi];

  for (const auto& [key, c] : votes) {
    if (c >= threshold) {
      out.retained_keys.push_back(key);
      out.retained_counts.push_back(c);
    }
  }

  // Union of the retained keys' map entries, deduplicated, in (jj', ii')
  // order so downstream kernel indices are reproducible.
  std::vector<std::pair<int, int>> okeys;
  for (const auto& [ii, jj] : out.retained_keys) {
    const auto& entry = map.orientations_for(ii, jj);
    okeys.insert(okeys.end(), entry.begin(), entry.end());
  }
  std::sort(okeys.begin(), okeys.end(), [](const auto& a, const auto& b) {
    return std::tie(a.second, a.first) < std::tie(b.second, b.first);
  });
  okeys.erase(std::unique(okeys.begin(), okeys.end()), okeys.end());

  out.rotations.reserve(okeys.size() * lat.n_theta);
  for (const auto& [iip, jjp] : okeys) {
    const double theta = lat.theta_of(iip);
    const double phi = lat.phi_of(jjp);
    for (int kk = 0; kk < lat.n_theta; ++kk) {
      const double gamma = lat.gamma_of(kk);
      out.rotations.push_back(zyz_rotation(theta, phi, gamma));
      out.angles.push_back({theta, phi, gamma});
      out.orientation_keys.push_back({iip, jjp});
    }
  }
  return out;
}

}  // namespace multicup
