#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "wgff/dimer.hpp"
#include "wgff/domain.hpp"
#include "wgff/error.hpp"
#include "wgff/planar_graph.hpp"
#include "wgff/walk.hpp"

namespace wgff {

inline constexpr const char* artifact_version = "1.0.0";

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

inline nlohmann::json sidecar(const std::string& config_text, std::uint64_t seed, nlohmann::json extra = nlohmann::json::object()) {
  extra["config_hash"] = hex64(fnv1a64(config_text));
  extra["seed"] = seed;
  extra["version"] = artifact_version;
  return extra;
}

/// Writes `content` to `path` and `meta` to `path` + ".json".
inline void write_with_sidecar(const std::filesystem::path& path, const std::string& content, const nlohmann::json& meta) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ComputationError("cannot open " + path.string());
    f << content;
  }
  std::ofstream s(path.string() + ".json", std::ios::binary);
  if (!s) throw ComputationError("cannot open " + path.string() + ".json");
  s << meta.dump(2) << '\n';
}

inline nlohmann::json graph_to_json(const PlanarGraph& g) {
  nlohmann::json j;
  j["version"] = "winding-gff/graph/1";
  j["delta"] = g.delta;
  auto& vs = j["vertices"] = nlohmann::json::array();
  for (std::size_t i = 0; i < g.pos.size(); ++i) {
    nlohmann::json v{{"id", i}, {"x", g.pos[i].real()}, {"y", g.pos[i].imag()}};
    if (!g.color.empty()) v["color"] = g.color[i];
    vs.push_back(std::move(v));
  }
  auto& es = j["edges"] = nlohmann::json::array();
  for (const Edge& e : g.edges) {
    nlohmann::json poly = nlohmann::json::array();
    for (Point p : e.polyline) poly.push_back({p.real(), p.imag()});
    es.push_back({{"src", e.src}, {"dst", e.dst}, {"weight", e.weight}, {"polyline", std::move(poly)}});
  }
  return j;
}

inline PlanarGraph graph_from_json(const nlohmann::json& j) {
  require(j.value("version", "") == "winding-gff/graph/1", "unsupported graph version");
  PlanarGraph g;
  g.delta = j.at("delta").get<double>();
  const auto& vs = j.at("vertices");
  g.pos.resize(vs.size());
  bool colored = !vs.empty() && vs[0].contains("color");
  if (colored) g.color.resize(vs.size());
  for (const auto& v : vs) {
    const auto id = v.at("id").get<std::size_t>();
    require(id < vs.size(), "vertex id out of range");
    g.pos[id] = {v.at("x").get<double>(), v.at("y").get<double>()};
    if (colored) g.color[id] = v.at("color").get<int>();
  }
  for (const auto& e : j.at("edges")) {
    Edge ed;
    ed.src = e.at("src").get<int>();
    ed.dst = e.at("dst").get<int>();
    require(ed.src >= 0 && ed.dst >= 0 && static_cast<std::size_t>(std::max(ed.src, ed.dst)) < g.pos.size(), "edge endpoint out of range");
    ed.weight = e.at("weight").get<double>();
    for (const auto& p : e.at("polyline")) ed.polyline.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
    require(ed.polyline.size() >= 2, "edge polyline needs at least two points");
    g.edges.push_back(std::move(ed));
  }
  g.finalize();
  return g;
}

inline std::string full_precision(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

/// CSV of (vertex_id, parent_vertex_id); the root has id n.
inline std::string tree_csv(const SpanningTree& t, const WiredDomainGraph& w) {
  std::ostringstream os;
  os << "vertex_id,parent_vertex_id\n";
  for (int v = 0; v < w.num_interior(); ++v) os << v << ',' << t.parent(w, v) << '\n';
  return os.str();
}

inline nlohmann::json domain_to_json(const Domain& d) {
  nlohmann::json j;
  switch (d.kind()) {
    case Domain::Kind::disc:
      j = {{"kind", "disc"}, {"center", {d.center().real(), d.center().imag()}}, {"radius", d.radius()}};
      break;
    case Domain::Kind::rectangle: {
      const Box b = d.bounding_box();
      j = {{"kind", "rectangle"}, {"lo", {b.lo.real(), b.lo.imag()}}, {"hi", {b.hi.real(), b.hi.imag()}}};
      break;
    }
    default: {
      j["kind"] = "polygon";
      nlohmann::json pts = nlohmann::json::array();
      for (Point p : d.as_polygon()) pts.push_back({p.real(), p.imag()});
      j["vertices"] = std::move(pts);
    }
  }
  j["marked"] = {d.marked_point().real(), d.marked_point().imag()};
  return j;
}

inline nlohmann::json tree_metadata(std::uint64_t seed, const std::string& order, const WiredDomainGraph& w) {
  return {{"seed", seed}, {"order", order}, {"delta", w.delta()}, {"domain", domain_to_json(w.domain())}, {"root", w.root()}};
}

/// CSV of (vertex_id, x, y, value).
inline std::string field_csv(const std::vector<Point>& pos, const std::vector<double>& values, const std::vector<int>& ids = {}) {
  require(pos.size() == values.size(), "positions and values differ in size");
  require(ids.empty() || ids.size() == values.size(), "ids and values differ in size");
  std::ostringstream os;
  os << "vertex_id,x,y,value\n";
  for (std::size_t i = 0; i < values.size(); ++i)
    os << (ids.empty() ? static_cast<int>(i) : ids[i]) << ',' << full_precision(pos[i].real()) << ',' << full_precision(pos[i].imag()) << ','
       << full_precision(values[i]) << '\n';
  return os.str();
}

/// CSV of matched edges: black and white vertex ids with their positions.
inline std::string dimer_csv(const DimerConfiguration& c, const DimerGraph& dg) {
  std::ostringstream os;
  os << "black,white,bx,by,wx,wy\n";
  for (int e : c.edges) {
    const auto& ed = dg.edges[e];
    os << ed.black << ',' << ed.white << ',' << full_precision(dg.pos[ed.black].real()) << ',' << full_precision(dg.pos[ed.black].imag())
       << ',' << full_precision(dg.pos[ed.white].real()) << ',' << full_precision(dg.pos[ed.white].imag()) << '\n';
  }
  return os.str();
}

/// CSV of (face_id, cx, cy, height).
inline std::string height_csv(const std::vector<Point>& centers, const std::vector<double>& heights) {
  require(centers.size() == heights.size(), "centers and heights differ in size");
  std::ostringstream os;
  os << "face_id,cx,cy,height\n";
  for (std::size_t i = 0; i < heights.size(); ++i)
    os << i << ',' << full_precision(centers[i].real()) << ',' << full_precision(centers[i].imag()) << ',' << full_precision(heights[i])
       << '\n';
  return os.str();
}

struct Raster {
  std::string pgm;      // binary P5 image
  nlohmann::json meta;  // affine value->gray map and pixel geometry
};

/// Grayscale raster on a regular grid over `box`, each pixel taking the value of the nearest point.
/// gray = round(255 (value - vmin) / (vmax - vmin)); pixels outside `mask` (when given) are 0.
inline Raster rasterize(const std::vector<Point>& pos, const std::vector<double>& values, const Box& box, int width, int height,
                        const Domain* mask = nullptr) {
  require(pos.size() == values.size() && !pos.empty(), "raster needs matching non-empty points and values");
  require(width > 0 && height > 0, "raster size must be positive");
  const double vmin = *std::min_element(values.begin(), values.end()), vmax = *std::max_element(values.begin(), values.end());
  const double span = vmax > vmin ? vmax - vmin : 1.0;
  // bucket grid for nearest-point lookup
  const int gb = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(pos.size()))));
  const double bw = (box.hi.real() - box.lo.real()) / gb, bh = (box.hi.imag() - box.lo.imag()) / gb;
  require(bw > 0 && bh > 0, "raster box must have positive extent");
  auto cell = [&](Point p) {
    const int i = std::clamp(static_cast<int>(std::floor((p.real() - box.lo.real()) / bw)), 0, gb - 1);
    const int j = std::clamp(static_cast<int>(std::floor((p.imag() - box.lo.imag()) / bh)), 0, gb - 1);
    return std::pair{i, j};
  };
  std::vector<std::vector<int>> buckets(static_cast<std::size_t>(gb) * gb);
  for (std::size_t k = 0; k < pos.size(); ++k) {
    auto [i, j] = cell(pos[k]);
    buckets[static_cast<std::size_t>(j) * gb + i].push_back(static_cast<int>(k));
  }
  auto nearest = [&](Point p) {
    auto [ci, cj] = cell(p);
    int best = -1;
    double bd = 1e300;
    for (int r = 0; r <= gb; ++r) {
      for (int j = cj - r; j <= cj + r; ++j)
        for (int i = ci - r; i <= ci + r; ++i) {
          if (i < 0 || j < 0 || i >= gb || j >= gb || std::max(std::abs(i - ci), std::abs(j - cj)) != r) continue;
          for (int k : buckets[static_cast<std::size_t>(j) * gb + i]) {
            const double d = std::norm(pos[k] - p);
            if (d < bd) bd = d, best = k;
          }
        }
      if (best >= 0 && std::sqrt(bd) <= r * std::min(bw, bh)) break;
    }
    return best;
  };
  std::string data(static_cast<std::size_t>(width) * height, '\0');
  const double pw = (box.hi.real() - box.lo.real()) / width, ph = (box.hi.imag() - box.lo.imag()) / height;
  for (int r = 0; r < height; ++r)
    for (int c = 0; c < width; ++c) {
      const Point p{box.lo.real() + (c + 0.5) * pw, box.hi.imag() - (r + 0.5) * ph};  // row 0 at the top
      if (mask && !mask->contains(p)) continue;
      const double v = values[nearest(p)];
      data[static_cast<std::size_t>(r) * width + c] = static_cast<char>(std::lround(255 * (v - vmin) / span));
    }
  Raster out;
  out.pgm = "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n" + data;
  out.meta = {{"width", width},
              {"height", height},
              {"lo", {box.lo.real(), box.lo.imag()}},
              {"hi", {box.hi.real(), box.hi.imag()}},
              {"value_min", vmin},
              {"value_max", vmax},
              {"gray_per_value", 255 / span},
              {"gray_offset", -255 * vmin / span},
              {"masked_gray", mask ? nlohmann::json(0) : nlohmann::json(nullptr)}};
  return out;
}

}  // namespace wgff
