#include "mcon/designs.hpp"

#include "mcon/design_io.hpp"

#include <array>
#include <cmath>
#include <deque>
#include <numbers>

namespace mcon {

namespace {

struct FamilyInfo {
  Family family;
  std::string_view name;
  Dimensionality dim;
  Density density;
  bool dynamic;
};

constexpr std::array<FamilyInfo, 8> kFamilies{{
    {Family::Gaussian1D, "gaussian_1d", Dimensionality::D1, Density::Dense, false},
    {Family::Sine1D, "sine_1d", Dimensionality::D1, Density::Dense, true},
    {Family::Disk2D, "disk_2d", Dimensionality::D2, Density::Dense, false},
    {Family::Ring2D, "ring_2d", Dimensionality::D2, Density::Sparse, false},
    {Family::Triangle2D, "triangle_2d", Dimensionality::D2, Density::Sparse, true},
    {Family::Dome3D, "dome_3d", Dimensionality::D3, Density::Dense, false},
    {Family::Shell3D, "shell_3d", Dimensionality::D3, Density::Sparse, false},
    {Family::Triangle3D, "triangle_3d", Dimensionality::D3, Density::Sparse, true},
}};

const FamilyInfo& info(Family family) {
  for (const auto& f : kFamilies)
    if (f.family == family) return f;
  throw ContractError("unknown family");
}

double param(const DesignSpec& spec, const char* name) {
  const auto it = spec.params.find(name);
  if (it == spec.params.end())
    throw ContractError(std::string(to_string(spec.family)) + ": missing parameter '" + name + "'");
  return it->second;
}

// std::round already rounds halves away from zero.
int round_height(double v) { return static_cast<int>(std::round(v)); }

double dist(double x, double y, double cx, double cy) { return std::hypot(x - cx, y - cy); }

CellGrid gaussian(const DesignSpec& s, int w) {
  const double a = param(s, "amplitude"), mu = param(s, "center"), sigma = param(s, "sigma");
  if (sigma <= 0) throw ContractError("gaussian_1d: sigma must be positive");
  CellGrid t(1, w);
  for (int x = 0; x < w; ++x) t(0, x) = std::max(0, round_height(a * std::exp(-(x - mu) * (x - mu) / (2 * sigma * sigma))));
  return t;
}

CellGrid sine(const DesignSpec& s, int w) {
  const double a = param(s, "amplitude"), f = param(s, "frequency"), phi = param(s, "phase"), b = param(s, "offset");
  CellGrid t(1, w);
  for (int x = 0; x < w; ++x)
    t(0, x) = std::max(0, round_height(a * std::sin(2 * std::numbers::pi * f * x / w + phi) + b));
  return t;
}

template <typename Height>
CellGrid radial(int w, int h, double cx, double cy, Height&& height_at) {
  CellGrid t(h, w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) t(y, x) = height_at(dist(x, y, cx, cy));
  return t;
}

bool in_triangle(double px, double py, const std::array<double, 6>& v) {
  auto edge = [&](double ax, double ay, double bx, double by) { return (bx - ax) * (py - ay) - (by - ay) * (px - ax); };
  const double e0 = edge(v[0], v[1], v[2], v[3]);
  const double e1 = edge(v[2], v[3], v[4], v[5]);
  const double e2 = edge(v[4], v[5], v[0], v[1]);
  constexpr double eps = 1e-9;
  const bool neg = e0 < -eps || e1 < -eps || e2 < -eps;
  const bool pos = e0 > eps || e1 > eps || e2 > eps;
  return !(neg && pos);
}

// Inner boundary of the centre-inclusion rasterization: filled cells with an unfilled 4-neighbour.
CellGrid triangle_outline(const DesignSpec& s, int w, int h, int height) {
  const std::array<double, 6> v{param(s, "ax"), param(s, "ay"), param(s, "bx"), param(s, "by"), param(s, "cx"), param(s, "cy")};
  MaskGrid filled(h, w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) filled(y, x) = in_triangle(x, y, v);
  auto inside = [&](int x, int y) { return x >= 0 && y >= 0 && x < w && y < h && filled(y, x); };
  CellGrid t = CellGrid::Zero(h, w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (filled(y, x) && !(inside(x - 1, y) && inside(x + 1, y) && inside(x, y - 1) && inside(x, y + 1)))
        t(y, x) = height;
  return t;
}

DesignSpec make(Family f, std::map<std::string, double> params, int group = -1) { return {f, std::move(params), group}; }

using Tri = std::array<double, 6>;

// Evaluation triangles, shared by the 2D and 3D dynamic families. All vertices lie in [1, 18].
constexpr std::array<Tri, 10> kTriangles{{
    {2, 2, 17, 2, 9, 16},
    {3, 15, 16, 15, 9, 3},
    {2, 3, 2, 17, 16, 10},
    {17, 2, 17, 17, 3, 9},
    {4, 4, 15, 6, 6, 16},
    {1, 1, 18, 9, 5, 18},
    {5, 2, 14, 3, 10, 12},
    {3, 6, 16, 4, 12, 17},
    {2, 10, 17, 1, 15, 18},
    {6, 6, 13, 6, 9, 13},
}};

struct SineRow {
  double amplitude, frequency, phase, offset;
};

constexpr std::array<SineRow, 10> kSines{{
    {3, 1.0, 0.0, 4},
    {2, 1.5, 0.5, 3},
    {4, 1.0, 1.5, 4},
    {3, 2.0, 0.0, 3},
    {2, 0.5, 0.0, 2},
    {5, 1.0, 3.0, 5},
    {3, 2.5, 1.0, 4},
    {4, 1.5, 2.0, 4},
    {2, 2.0, 4.0, 2},
    {3, 0.5, 4.5, 3},
}};

DesignSpec triangle_spec(Family f, const Tri& t, int group, double height) {
  std::map<std::string, double> p{{"ax", t[0]}, {"ay", t[1]}, {"bx", t[2]}, {"by", t[3]}, {"cx", t[4]}, {"cy", t[5]}};
  if (f == Family::Triangle3D) p["height"] = height;
  return make(f, std::move(p), group);
}

double triangle_area(const Tri& t) {
  return std::abs((t[2] - t[0]) * (t[5] - t[1]) - (t[4] - t[0]) * (t[3] - t[1])) / 2;
}

}  // namespace

std::string_view to_string(Family family) { return info(family).name; }

Family family_from_string(std::string_view text) {
  for (const auto& f : kFamilies)
    if (f.name == text) return f.family;
  throw ContractError("unknown design family: " + std::string(text));
}

Dimensionality dimension_of(Family family) { return info(family).dim; }
Density density_of(Family family) { return info(family).density; }
bool is_dynamic(Family family) { return info(family).dynamic; }

Design generate(const DesignSpec& spec, const EnvConfig& cfg) {
  const auto& fam = info(spec.family);
  if (fam.dim != cfg.dim) throw ContractError(std::string(fam.name) + " does not fit a " + std::string(to_string(cfg.dim)) + " world");
  const int w = cfg.width, h = cfg.height;
  if (w <= 0 || h <= 0) throw ContractError("world dimensions must be positive");

  Design d;
  d.dim = fam.dim;
  d.variant = fam.dynamic ? Variant::Dynamic : Variant::Static;
  d.density = fam.density;
  d.group_id = spec.group_id;

  switch (spec.family) {
    case Family::Gaussian1D: d.target = gaussian(spec, w); break;
    case Family::Sine1D: d.target = sine(spec, w); break;
    case Family::Disk2D: {
      const double cx = param(spec, "cx"), cy = param(spec, "cy"), r = param(spec, "radius");
      d.target = radial(w, h, cx, cy, [&](double dd) { return dd <= r ? 1 : 0; });
      break;
    }
    case Family::Ring2D: {
      const double cx = param(spec, "cx"), cy = param(spec, "cy"), r = param(spec, "radius");
      const double t = param(spec, "thickness");
      d.target = radial(w, h, cx, cy, [&](double dd) { return dd <= r && dd > r - t ? 1 : 0; });
      break;
    }
    case Family::Dome3D: {
      const double cx = param(spec, "cx"), cy = param(spec, "cy"), r = param(spec, "radius");
      const int levels = static_cast<int>(param(spec, "levels"));
      if (levels < 1) throw ContractError("dome_3d: levels must be at least 1");
      d.target = radial(w, h, cx, cy, [&](double dd) {
        int height = 0;
        for (int k = 0; k < levels; ++k)
          if (dd <= r * (levels - k) / levels) ++height;
        return height;
      });
      break;
    }
    case Family::Shell3D: {
      const double cx = param(spec, "cx"), cy = param(spec, "cy"), r = param(spec, "radius");
      const int height = static_cast<int>(param(spec, "height"));
      d.target = radial(w, h, cx, cy, [&](double dd) { return dd <= r && dd > r - 1 ? height : 0; });
      break;
    }
    case Family::Triangle2D: d.target = triangle_outline(spec, w, h, 1); break;
    case Family::Triangle3D: d.target = triangle_outline(spec, w, h, static_cast<int>(param(spec, "height"))); break;
  }

  if (d.brick_count() <= 0) throw ContractError(std::string(fam.name) + ": parameters produce an empty design");
  d.validate();
  return d;
}

DesignSpec static_spec(Family family) {
  switch (family) {
    case Family::Gaussian1D: return make(family, {{"amplitude", 8}, {"center", 14.5}, {"sigma", 5}});
    case Family::Disk2D: return make(family, {{"cx", 9.5}, {"cy", 9.5}, {"radius", 6}});
    case Family::Ring2D: return make(family, {{"cx", 9.5}, {"cy", 9.5}, {"radius", 6}, {"thickness", 1}});
    case Family::Dome3D: return make(family, {{"cx", 9.5}, {"cy", 9.5}, {"radius", 6}, {"levels", 3}});
    case Family::Shell3D: return make(family, {{"cx", 9.5}, {"cy", 9.5}, {"radius", 6}, {"height", 2}});
    default: throw ContractError(std::string(to_string(family)) + " is not a static family");
  }
}

std::vector<DesignSpec> dynamic_group_specs(Family family) {
  std::vector<DesignSpec> specs;
  switch (family) {
    case Family::Sine1D:
      for (int g = 0; g < 10; ++g) {
        const auto& s = kSines[g];
        specs.push_back(make(family,
                             {{"amplitude", s.amplitude}, {"frequency", s.frequency}, {"phase", s.phase}, {"offset", s.offset}},
                             g));
      }
      break;
    case Family::Triangle2D:
    case Family::Triangle3D:
      for (int g = 0; g < 10; ++g) specs.push_back(triangle_spec(family, kTriangles[g], g, 1 + g % 2));
      break;
    default: throw ContractError(std::string(to_string(family)) + " is not a dynamic family");
  }
  return specs;
}

std::vector<Design> dynamic_test_groups(Family family, const EnvConfig& cfg) {
  std::vector<Design> designs;
  for (const auto& spec : dynamic_group_specs(family)) designs.push_back(generate(spec, cfg));
  return designs;
}

Design sample_training_design(Family family, const EnvConfig& cfg, Rng& rng) {
  if (!is_dynamic(family)) throw ContractError(std::string(to_string(family)) + " is not a dynamic family");
  for (;;) {
    DesignSpec spec;
    if (family == Family::Sine1D) {
      const double a = uniform_real(rng, 1, 5);
      spec = make(family, {{"amplitude", a},
                           {"frequency", uniform_real(rng, 0.5, 2.5)},
                           {"phase", uniform_real(rng, 0, 2 * std::numbers::pi)},
                           {"offset", uniform_real(rng, a, a + 2)}});
    } else {
      Tri t;
      for (int i = 0; i < 6; i += 2) {
        t[i] = uniform_real(rng, 1, cfg.width - 2);
        t[i + 1] = uniform_real(rng, 1, cfg.height - 2);
      }
      const double height = family == Family::Triangle3D ? uniform_int(rng, 1, 2) : 1;
      // Reject slivers: they rasterize to a few disconnected cells.
      if (triangle_area(t) < 0.1 * (cfg.width - 2) * (cfg.height - 2)) continue;
      spec = triangle_spec(family, t, -1, height);
    }
    try {
      return generate(spec, cfg);
    } catch (const ContractError&) {
      // empty rasterization; draw again
    }
  }
}

nlohmann::json design_tables_json() {
  nlohmann::json doc;
  doc["version"] = kDesignTableVersion;
  auto spec_json = [](const DesignSpec& s) {
    nlohmann::json p(s.params);
    return nlohmann::json{{"group_id", s.group_id}, {"params", p}};
  };
  for (const auto& f : kFamilies) {
    if (f.dynamic) {
      auto groups = nlohmann::json::array();
      for (const auto& s : dynamic_group_specs(f.family)) groups.push_back(spec_json(s));
      doc["dynamic"][std::string(f.name)] = groups;
    } else {
      doc["static"][std::string(f.name)] = spec_json(static_spec(f.family));
    }
  }
  return doc;
}

nlohmann::json emit_design_suite(const std::filesystem::path& dir) {
  nlohmann::json manifest;
  manifest["version"] = kDesignTableVersion;
  for (const auto& f : kFamilies) {
    const auto cfg = EnvConfig::defaults(f.dim);
    const std::string name(f.name);
    if (f.dynamic) {
      auto groups = nlohmann::json::array();
      const auto designs = dynamic_test_groups(f.family, cfg);
      for (const auto& d : designs) {
        const std::string file = "groups/" + name + "_g" + std::to_string(d.group_id) + ".json";
        write_design(dir / file, d);
        groups.push_back({{"group_id", d.group_id}, {"file", file}, {"hash", design_hash(d)}});
      }
      manifest["dynamic"][name] = groups;
    } else {
      const auto d = generate(static_spec(f.family), cfg);
      const std::string file = "static/" + name + ".json";
      write_design(dir / file, d);
      manifest["static"][name] = {{"file", file}, {"hash", design_hash(d)}};
    }
  }
  write_text_file(dir / "tables.json", design_tables_json().dump(2) + "\n");
  write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");
  return manifest;
}

bool is_dense_shape(const CellGrid& target) {
  const int h = static_cast<int>(target.rows()), w = static_cast<int>(target.cols());
  auto flood = [&](MaskGrid& seen, std::deque<std::pair<int, int>> queue, bool support) {
    while (!queue.empty()) {
      const auto [x, y] = queue.front();
      queue.pop_front();
      constexpr int dx[] = {1, -1, 0, 0}, dy[] = {0, 0, 1, -1};
      for (int k = 0; k < 4; ++k) {
        const int nx = x + dx[k], ny = y + dy[k];
        if (nx < 0 || ny < 0 || nx >= w || ny >= h || seen(ny, nx)) continue;
        if ((target(ny, nx) > 0) != support) continue;
        seen(ny, nx) = true;
        queue.emplace_back(nx, ny);
      }
    }
  };

  std::deque<std::pair<int, int>> start;
  for (int y = 0; y < h && start.empty(); ++y)
    for (int x = 0; x < w; ++x)
      if (target(y, x) > 0) {
        start.emplace_back(x, y);
        break;
      }
  if (start.empty()) return false;
  MaskGrid support_seen = MaskGrid::Constant(h, w, false);
  support_seen(start.front().second, start.front().first) = true;
  flood(support_seen, start, true);
  if ((support_seen != (target > 0)).any()) return false;

  MaskGrid outside = MaskGrid::Constant(h, w, false);
  std::deque<std::pair<int, int>> border;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if ((x == 0 || y == 0 || x == w - 1 || y == h - 1) && target(y, x) == 0) {
        outside(y, x) = true;
        border.emplace_back(x, y);
      }
  flood(outside, border, false);
  return ((target > 0) || outside).all();
}

bool is_sparse_shape(const CellGrid& target) {
  const int h = static_cast<int>(target.rows()), w = static_cast<int>(target.cols());
  auto empty = [&](int x, int y) { return x < 0 || y < 0 || x >= w || y >= h || target(y, x) == 0; };
  bool any = false;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (target(y, x) == 0) continue;
      any = true;
      if (!(empty(x - 1, y) || empty(x + 1, y) || empty(x, y - 1) || empty(x, y + 1))) return false;
    }
  return any;
}

}  // namespace mcon
