#include "multicup/synth.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <stdexcept>

#include "multicup/npy.hpp"

namespace multicup {
namespace {

struct Hit {
  double t = std::numeric_limits<double>::infinity();  // camera-frame depth
  int id = -2;                                         // -1 plane, -2 none
  Vec3 point = Vec3::Zero();
  Vec3 normal = Vec3::UnitZ();
};

/// Ray o + t*(dx, -dy, -1) against one primitive; updates h on a nearer hit.
void intersect(const Primitive& prim, int id, const Vec3& o, const Vec3& d,
               Hit& h) {
  if (prim.kind == Primitive::Kind::kBox) {
    // Slab test over [cx-hx, cx+hx] x [cy-hy, cy+hy] x [0, height].
    const Vec3 lo(prim.cx - prim.hx, prim.cy - prim.hy, 0.0);
    const Vec3 hi(prim.cx + prim.hx, prim.cy + prim.hy, prim.height);
    double tmin = 0.0, tmax = std::numeric_limits<double>::infinity();
    int enter_axis = -1;
    double enter_sign = 0.0;
    for (int a = 0; a < 3; ++a) {
      if (std::abs(d[a]) < 1e-15) {
        if (o[a] < lo[a] || o[a] > hi[a]) return;
        continue;
      }
      double t0 = (lo[a] - o[a]) / d[a];
      double t1 = (hi[a] - o[a]) / d[a];
      double sign = -1.0;
      if (t0 > t1) {
        std::swap(t0, t1);
        sign = 1.0;
      }
      if (t0 > tmin) {
        tmin = t0;
        enter_axis = a;
        enter_sign = sign;
      }
      tmax = std::min(tmax, t1);
      if (tmin > tmax) return;
    }
    if (enter_axis < 0 || tmin <= 0.0 || tmin >= h.t) return;
    h.t = tmin;
    h.id = id;
    h.point = o + tmin * d;
    h.normal = Vec3::Zero();
    h.normal[enter_axis] = enter_sign;
  } else {
    const Vec3 c(prim.cx, prim.cy, prim.cz);
    const double a = d.squaredNorm();
    const double b = 2.0 * d.dot(o - c);
    const double cc = (o - c).squaredNorm() - prim.radius * prim.radius;
    const double disc = b * b - 4 * a * cc;
    if (disc < 0.0) return;
    const double t = (-b - std::sqrt(disc)) / (2 * a);
    if (t <= 0.0 || t >= h.t) return;
    h.t = t;
    h.id = id;
    h.point = o + t * d;
    h.normal = (h.point - c) / prim.radius;
  }
}

/// Affordance of a surface hit: 1 (or the ramp value) on the inset
/// top-facing region of the hit primitive, else 0.
float affordance_of(const SceneSpec& spec, const Hit& h) {
  const double delta = spec.edge_margin;
  double rnorm = -1.0;  // normalized distance from region center, [0, 1]

  if (h.id == -1) {
    if (!spec.plane_graspable) return 0.f;
    const double inset = spec.plane_half_extent - delta;
    if (inset <= 0.0) return 0.f;
    if (std::abs(h.point.x()) > inset || std::abs(h.point.y()) > inset)
      return 0.f;
    rnorm = std::hypot(h.point.x(), h.point.y()) /
            std::hypot(inset, inset);
  } else if (h.id >= 0) {
    const Primitive& prim = spec.primitives[h.id];
    if (prim.kind == Primitive::Kind::kBox) {
      if (h.normal.z() < std::cos(spec.normal_cutoff)) return 0.f;
      const double ix = prim.hx - delta, iy = prim.hy - delta;
      if (ix <= 0.0 || iy <= 0.0) return 0.f;
      const double dx = h.point.x() - prim.cx, dy = h.point.y() - prim.cy;
      if (std::abs(dx) > ix || std::abs(dy) > iy) return 0.f;
      rnorm = std::hypot(dx, dy) / std::hypot(ix, iy);
    } else {
      const double psi = angle_from_dot(h.normal.z());
      const double psi_max = spec.normal_cutoff - delta / prim.radius;
      if (psi_max <= 0.0 || psi > psi_max) return 0.f;
      rnorm = psi / psi_max;
    }
  } else {
    return 0.f;
  }

  if (!spec.radial_ramp) return 1.f;
  return static_cast<float>(1.0 - 0.5 * std::min(1.0, rnorm));
}

}  // namespace

void SceneSpec::validate() const {
  if (width <= 0 || height <= 0 || !(fx > 0) || !(fy > 0))
    throw std::invalid_argument("bad camera in scene spec");
  if (!(camera_z > 0))
    throw std::invalid_argument("camera must sit above the plane");
  if (edge_margin < 0) throw std::invalid_argument("edge_margin must be >= 0");
  for (const auto& p : primitives) {
    if (p.kind == Primitive::Kind::kBox) {
      if (!(p.hx > 0) || !(p.hy > 0) || !(p.height > 0))
        throw std::invalid_argument("degenerate box");
      if (p.height >= camera_z)
        throw std::invalid_argument("primitive behind camera");
    } else {
      if (!(p.radius > 0)) throw std::invalid_argument("degenerate sphere");
      if (p.cz + p.radius >= camera_z)
        throw std::invalid_argument("primitive behind camera");
    }
  }
}

RenderedScene render_scene(const SceneSpec& spec, int normal_k) {
  spec.validate();

  CameraIntrinsics cam;
  cam.fx = spec.fx;
  cam.fy = spec.fy;
  cam.cx = (spec.width - 1) / 2.0;
  cam.cy = (spec.height - 1) / 2.0;
  cam.width = spec.width;
  cam.height = spec.height;
  cam.camera_to_world << 1, 0, 0, 0,
                         0, -1, 0, 0,
                         0, 0, -1, spec.camera_z,
                         0, 0, 0, 1;

  GroundTruth gt;
  gt.camera = cam;
  gt.depth = Image<float>(spec.height, spec.width, 0.f);
  gt.affordance = Image<float>(spec.height, spec.width, 0.f);
  gt.primitive_id.assign(size_t(spec.height) * spec.width, -2);
  gt.normal.assign(size_t(spec.height) * spec.width, Vec3::UnitZ());

  const Vec3 origin(0, 0, spec.camera_z);
  float best_aff = 0.f;
  double best_center_d2 = 0.0;
  for (int v = 0; v < spec.height; ++v) {
    for (int u = 0; u < spec.width; ++u) {
      const Vec3 dir((u - cam.cx) / cam.fx, -(v - cam.cy) / cam.fy, -1.0);
      Hit hit;
      // Background plane z = 0 is always behind the primitives.
      hit.t = spec.camera_z;
      hit.id = -1;
      hit.point = origin + spec.camera_z * dir;
      hit.normal = Vec3::UnitZ();
      for (int i = 0; i < static_cast<int>(spec.primitives.size()); ++i)
        intersect(spec.primitives[i], i, origin, dir, hit);

      const int idx = v * spec.width + u;
      gt.depth.at(v, u) = static_cast<float>(hit.t);
      gt.primitive_id[idx] = hit.id;
      gt.normal[idx] = hit.normal;
      const float aff = affordance_of(spec, hit);
      gt.affordance.at(v, u) = aff;

      if (aff > 0.f) {
        const double du = u - cam.cx, dv = v - cam.cy;
        const double center_d2 = du * du + dv * dv;
        const bool better =
            aff > best_aff ||
            (aff == best_aff &&
             (gt.argmax_u < 0 || center_d2 < best_center_d2));
        if (better) {
          best_aff = aff;
          best_center_d2 = center_d2;
          gt.argmax_u = u;
          gt.argmax_v = v;
        }
      }
    }
  }

  // Region outlines (world frame).
  const double delta = spec.edge_margin;
  for (const auto& prim : spec.primitives) {
    std::vector<Vec3> poly;
    if (prim.kind == Primitive::Kind::kBox) {
      const double ix = prim.hx - delta, iy = prim.hy - delta;
      if (ix > 0 && iy > 0) {
        poly = {{prim.cx - ix, prim.cy - iy, prim.height},
                {prim.cx + ix, prim.cy - iy, prim.height},
                {prim.cx + ix, prim.cy + iy, prim.height},
                {prim.cx - ix, prim.cy + iy, prim.height}};
      }
    } else {
      const double psi_max = spec.normal_cutoff - delta / prim.radius;
      if (psi_max > 0) {
        const double rho = prim.radius * std::sin(psi_max);
        const double z = prim.cz + prim.radius * std::cos(psi_max);
        for (int s = 0; s < 24; ++s) {
          const double a = 2 * kPi * s / 24;
          poly.push_back(
              {prim.cx + rho * std::cos(a), prim.cy + rho * std::sin(a), z});
        }
      }
    }
    gt.regions.push_back(std::move(poly));
  }
  if (spec.plane_graspable) {
    const double in = spec.plane_half_extent - delta;
    if (in > 0)
      gt.regions.push_back(
          {{-in, -in, 0}, {in, -in, 0}, {in, in, 0}, {-in, in, 0}});
  }

  RenderedScene out;
  out.gt = std::move(gt);
  out.scene = make_scene(out.gt.depth, out.gt.affordance, cam, normal_k);
  return out;
}

int expected_max_obj(const SceneSpec& spec, const GripperSpec& gripper,
                     double xy_step, int yaw_steps) {
  spec.validate();
  gripper.validate();

  // Region membership for a cup landing at (x, y): primitive index and the
  // contact height, or nothing.
  const double delta = spec.edge_margin;
  auto region_of = [&](double x, double y, int& id, double& z) {
    for (int i = 0; i < static_cast<int>(spec.primitives.size()); ++i) {
      const Primitive& p = spec.primitives[i];
      if (p.kind == Primitive::Kind::kBox) {
        if (std::abs(x - p.cx) <= p.hx - delta &&
            std::abs(y - p.cy) <= p.hy - delta) {
          id = i;
          z = p.height;
          return true;
        }
      } else {
        const double psi_max = spec.normal_cutoff - delta / p.radius;
        const double rho = std::hypot(x - p.cx, y - p.cy);
        if (psi_max > 0 && rho <= p.radius * std::sin(psi_max)) {
          id = i;
          z = p.cz + std::sqrt(p.radius * p.radius - rho * rho);
          return true;
        }
      }
    }
    if (spec.plane_graspable &&
        std::abs(x) <= spec.plane_half_extent - delta &&
        std::abs(y) <= spec.plane_half_extent - delta) {
      id = -1;
      z = 0.0;
      return true;
    }
    return false;
  };

  double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
  for (const auto& p : spec.primitives) {
    const double ex = p.kind == Primitive::Kind::kBox ? p.hx : p.radius;
    const double ey = p.kind == Primitive::Kind::kBox ? p.hy : p.radius;
    xmin = std::min(xmin, p.cx - ex);
    xmax = std::max(xmax, p.cx + ex);
    ymin = std::min(ymin, p.cy - ey);
    ymax = std::max(ymax, p.cy + ey);
  }
  if (spec.plane_graspable) {
    xmin = std::min(xmin, -spec.plane_half_extent);
    xmax = std::max(xmax, spec.plane_half_extent);
    ymin = std::min(ymin, -spec.plane_half_extent);
    ymax = std::max(ymax, spec.plane_half_extent);
  }
  const double reach = gripper.max_cup_distance();
  xmin -= reach;
  xmax += reach;
  ymin -= reach;
  ymax += reach;

  int best = 0;
  std::vector<std::pair<std::int64_t, int>> contacts;  // (height key, id)
  for (double x = xmin; x <= xmax; x += xy_step) {
    for (double y = ymin; y <= ymax; y += xy_step) {
      for (int yi = 0; yi < yaw_steps; ++yi) {
        const double yaw = 2 * kPi * yi / yaw_steps;
        const double cy = std::cos(yaw), sy = std::sin(yaw);
        contacts.clear();
        for (const Vec3& c : gripper.cup_centers_local) {
          const double cx_w = x + cy * c.x() - sy * c.y();
          const double cy_w = y + sy * c.x() + cy * c.y();
          int id;
          double z;
          if (region_of(cx_w, cy_w, id, z))
            contacts.emplace_back(std::llround(z * 1e4), id);
        }
        if (static_cast<int>(contacts.size()) < 2) continue;
        // A vertical grasp needs its contacts at one height; take the
        // height bucket grasping the most distinct regions with >= 2 cups.
        std::sort(contacts.begin(), contacts.end());
        for (size_t a = 0; a < contacts.size();) {
          size_t b = a;
          while (b < contacts.size() && contacts[b].first == contacts[a].first)
            ++b;
          if (b - a >= 2) {
            int distinct = 1;
            for (size_t s = a + 1; s < b; ++s)
              if (contacts[s].second != contacts[s - 1].second) ++distinct;
            best = std::max(best, distinct);
          }
          a = b;
        }
      }
    }
  }
  return best;
}

void save_scene_files(const GroundTruth& gt, const std::string& dir) {
  std::filesystem::create_directories(dir);
  write_npy_f32(dir + "/depth.npy", gt.depth);
  write_npy_f32(dir + "/affordance.npy", gt.affordance);
  save_intrinsics(dir + "/intrinsics.json", gt.camera);
}

SceneSpec preset_scene(const std::string& name) {
  SceneSpec spec;
  if (name == "flat-plate") {
    Primitive plate;
    plate.kind = Primitive::Kind::kBox;
    plate.hx = 0.07;
    plate.hy = 0.05;
    plate.height = 0.02;
    spec.primitives.push_back(plate);
  } else if (name == "two-boxes") {
    for (double cx : {-0.04, 0.04}) {
      Primitive box;
      box.kind = Primitive::Kind::kBox;
      box.cx = cx;
      box.hx = 0.03;
      box.hy = 0.03;
      box.height = 0.03;
      spec.primitives.push_back(box);
    }
  } else if (name == "three-boxes") {
    for (double cx : {-0.08, 0.0, 0.08}) {
      Primitive box;
      box.kind = Primitive::Kind::kBox;
      box.cx = cx;
      box.hx = 0.03;
      box.hy = 0.03;
      box.height = 0.03;
      spec.primitives.push_back(box);
    }
  } else if (name == "small-blob") {
    Primitive box;
    box.kind = Primitive::Kind::kBox;
    box.hx = 0.025;
    box.hy = 0.025;
    box.height = 0.03;
    spec.primitives.push_back(box);
    spec.radial_ramp = true;
  } else if (name == "sphere-cap") {
    Primitive ball;
    ball.kind = Primitive::Kind::kSphere;
    ball.cz = -0.16;
    ball.radius = 0.25;
    spec.primitives.push_back(ball);
  } else {
    throw std::invalid_argument("unknown scene preset: " + name);
  }
  return spec;
}

std::vector<std::string> preset_names() {
  return {"flat-plate", "two-boxes", "three-boxes", "small-blob",
          "sphere-cap"};
}

}  // namespace multicup
