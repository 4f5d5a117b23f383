#include "eventsum/geo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

namespace eventsum::geo {

bool valid_point(const GeoPoint& p) {
  return std::isfinite(p.lat) && std::isfinite(p.lon) && p.lat >= -90.0 && p.lat <= 90.0 &&
         p.lon >= -180.0 && p.lon <= 180.0;
}

double point_distance(const GeoPoint& a, const GeoPoint& b, DistanceMetric metric) {
  if (metric == DistanceMetric::Euclidean) {
    const double dlat = a.lat - b.lat;
    const double dlon = a.lon - b.lon;
    return std::sqrt(dlat * dlat + dlon * dlon);
  }
  constexpr double kEarthRadiusKm = 6371.0088;
  constexpr double kDeg = 3.14159265358979323846 / 180.0;
  const double s1 = std::sin((b.lat - a.lat) * kDeg / 2);
  const double s2 = std::sin((b.lon - a.lon) * kDeg / 2);
  const double h = s1 * s1 + std::cos(a.lat * kDeg) * std::cos(b.lat * kDeg) * s2 * s2;
  return 2 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

namespace {

// Uniform grid over (lat, lon) with cell size eps; a point's neighbours at
// distance <= eps can only live in the 3x3 block around its cell.
class NeighbourGrid {
 public:
  NeighbourGrid(std::span<const GeoPoint> points, double eps) : points_(points), eps_(eps) {
    cells_.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i)
      cells_[key(points[i])].push_back(static_cast<int>(i));
  }

  // Indices within eps (Euclidean on degrees), ascending, inclusive of self.
  std::vector<int> query(int idx) const {
    const GeoPoint& p = points_[idx];
    std::vector<int> out;
    const auto [ci, cj] = cell(p);
    for (std::int64_t di = -1; di <= 1; ++di) {
      for (std::int64_t dj = -1; dj <= 1; ++dj) {
        auto it = cells_.find(pack(ci + di, cj + dj));
        if (it == cells_.end()) continue;
        for (int j : it->second)
          if (point_distance(p, points_[j], DistanceMetric::Euclidean) <= eps_)
            out.push_back(j);
      }
    }
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  std::pair<std::int64_t, std::int64_t> cell(const GeoPoint& p) const {
    return {static_cast<std::int64_t>(std::floor(p.lat / eps_)),
            static_cast<std::int64_t>(std::floor(p.lon / eps_))};
  }
  static std::uint64_t pack(std::int64_t i, std::int64_t j) {
    return (static_cast<std::uint64_t>(i) << 32) ^ static_cast<std::uint32_t>(j);
  }
  std::uint64_t key(const GeoPoint& p) const {
    const auto [i, j] = cell(p);
    return pack(i, j);
  }

  std::span<const GeoPoint> points_;
  double eps_;
  std::unordered_map<std::uint64_t, std::vector<int>> cells_;
};

std::vector<int> brute_query(std::span<const GeoPoint> points, int idx, double eps,
                             DistanceMetric metric) {
  std::vector<int> out;
  for (std::size_t j = 0; j < points.size(); ++j)
    if (point_distance(points[idx], points[j], metric) <= eps)
      out.push_back(static_cast<int>(j));
  return out;
}

}  // namespace

std::vector<int> dbscan(std::span<const GeoPoint> points, const DbscanParams& params) {
  if (points.empty()) throw std::invalid_argument("dbscan: empty input");
  if (!(params.eps > 0)) throw std::invalid_argument("dbscan: eps must be > 0");
  if (params.min_pts < 1) throw std::invalid_argument("dbscan: min_pts must be >= 1");
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!std::isfinite(points[i].lat) || !std::isfinite(points[i].lon))
      throw std::invalid_argument("dbscan: non-finite coordinate at index " + std::to_string(i));
  }

  const bool euclid = params.metric == DistanceMetric::Euclidean;
  std::optional<NeighbourGrid> grid;
  if (euclid) grid.emplace(points, params.eps);
  auto query = [&](int idx) {
    return euclid ? grid->query(idx) : brute_query(points, idx, params.eps, params.metric);
  };

  constexpr int kUnvisited = -2;
  std::vector<int> labels(points.size(), kUnvisited);
  int cluster = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (labels[i] != kUnvisited) continue;
    auto neighbours = query(static_cast<int>(i));
    if (static_cast<int>(neighbours.size()) < params.min_pts) {
      labels[i] = kNoiseLabel;
      continue;
    }
    labels[i] = cluster;
    std::deque<int> seeds(neighbours.begin(), neighbours.end());
    while (!seeds.empty()) {
      const int q = seeds.front();
      seeds.pop_front();
      if (labels[q] == kNoiseLabel) labels[q] = cluster;  // border point
      if (labels[q] != kUnvisited) continue;
      labels[q] = cluster;
      auto qn = query(q);
      if (static_cast<int>(qn.size()) >= params.min_pts)
        seeds.insert(seeds.end(), qn.begin(), qn.end());
    }
    ++cluster;
  }
  return labels;
}

namespace {

// Cross product (b - a) x (c - a) with x = lon, y = lat.
double cross(const GeoPoint& a, const GeoPoint& b, const GeoPoint& c) {
  return (b.lon - a.lon) * (c.lat - a.lat) - (b.lat - a.lat) * (c.lon - a.lon);
}

}  // namespace

std::vector<GeoPoint> convex_hull(std::span<const GeoPoint> points) {
  std::vector<GeoPoint> pts(points.begin(), points.end());
  std::sort(pts.begin(), pts.end(), [](const GeoPoint& a, const GeoPoint& b) {
    return a.lon != b.lon ? a.lon < b.lon : a.lat < b.lat;
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) throw std::invalid_argument("convex_hull: fewer than 3 distinct points");

  // Andrew's monotone chain; strict turns only, so collinear boundary
  // points never become vertices.
  const std::size_t n = pts.size();
  std::vector<GeoPoint> hull(2 * n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {  // lower chain
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  const std::size_t lower = k + 1;
  for (std::size_t i = n - 1; i-- > 0;) {  // upper chain
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  if (hull.size() < 3) throw std::invalid_argument("convex_hull: points are collinear");
  return hull;
}

double polygon_area(std::span<const GeoPoint> ring) {
  double twice = 0;
  for (std::size_t i = 0, n = ring.size(); i < n; ++i) {
    const GeoPoint& a = ring[i];
    const GeoPoint& b = ring[(i + 1) % n];
    twice += a.lon * b.lat - b.lon * a.lat;
  }
  return twice / 2;
}

double ClusterRegion::area() const { return polygon_area(hull); }

bool point_in_hull(const GeoPoint& p, std::span<const GeoPoint> hull) {
  constexpr double kEps = 1e-12;
  for (std::size_t i = 0, n = hull.size(); i < n; ++i) {
    if (cross(hull[i], hull[(i + 1) % n], p) < -kEps) return false;
  }
  return true;
}

int assign_region(const GeoPoint& p, std::span<const ClusterRegion> regions) {
  int best = kNoiseRegion;
  double best_area = std::numeric_limits<double>::infinity();
  for (const ClusterRegion& r : regions) {
    if (!point_in_hull(p, r.hull)) continue;
    const double a = r.area();
    if (a < best_area || (a == best_area && r.id < best)) {
      best = r.id;
      best_area = a;
    }
  }
  return best;
}

std::vector<ClusterRegion> build_regions(std::span<const GeoPoint> points,
                                         std::span<const int> labels,
                                         const std::string& label_prefix) {
  if (points.size() != labels.size())
    throw std::invalid_argument("build_regions: points/labels size mismatch");
  int max_label = -1;
  for (int l : labels) max_label = std::max(max_label, l);
  std::vector<std::vector<GeoPoint>> members(max_label + 1);
  for (std::size_t i = 0; i < points.size(); ++i)
    if (labels[i] >= 0) members[labels[i]].push_back(points[i]);

  std::vector<ClusterRegion> regions;
  for (const auto& pts : members) {
    try {
      auto hull = convex_hull(pts);
      const int id = static_cast<int>(regions.size());
      regions.push_back({id, label_prefix + "-" + std::to_string(id), std::move(hull)});
    } catch (const std::invalid_argument&) {
      // degenerate cluster folds into noise
    }
  }
  return regions;
}

void write_regions(std::ostream& out, std::span<const ClusterRegion> regions) {
  for (const ClusterRegion& r : regions) {
    nlohmann::json hull = nlohmann::json::array();
    for (const GeoPoint& p : r.hull) hull.push_back({p.lat, p.lon});
    nlohmann::json j = {{"id", r.id}, {"label", r.label}, {"hull", std::move(hull)}};
    out << j.dump() << '\n';
  }
}

std::vector<ClusterRegion> read_regions(std::istream& in) {
  std::vector<ClusterRegion> regions;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
      ClusterRegion r;
      r.id = j.at("id").get<int>();
      r.label = j.at("label").get<std::string>();
      for (const auto& v : j.at("hull")) r.hull.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
      if (r.hull.size() < 3)
        throw std::invalid_argument("hull has fewer than 3 vertices");
      regions.push_back(std::move(r));
    } catch (const std::exception& e) {
      throw std::runtime_error("regions file line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return regions;
}

}  // namespace eventsum::geo
