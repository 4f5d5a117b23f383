#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "eventsum/date.hpp"

namespace eventsum::geo {

struct GeoPoint {
  double lat = 0;  // degrees in [-90, 90]
  double lon = 0;  // degrees in [-180, 180]

  bool operator==(const GeoPoint&) const = default;
};

bool valid_point(const GeoPoint& p);

/// Region id for points outside every cluster hull.
inline constexpr int kNoiseRegion = -1;
/// Label used by dbscan for points not reachable from any core point.
inline constexpr int kNoiseLabel = -1;

enum class DistanceMetric {
  Euclidean,  // straight-line distance on raw (lat, lon) degree pairs
  Haversine,  // great-circle distance in kilometres
};

double point_distance(const GeoPoint& a, const GeoPoint& b, DistanceMetric metric);

struct DbscanParams {
  double eps = 0;   // neighbourhood radius, units of the metric
  int min_pts = 0;  // core threshold, neighbourhood inclusive of the point itself
  DistanceMetric metric = DistanceMetric::Euclidean;
};

/// Density-based clustering over raw coordinates. Returns one label per
/// point: contiguous cluster ids from 0, or kNoiseLabel. Deterministic in
/// input order; expansion visits candidates in first-seen index order.
/// Throws std::invalid_argument on empty input, bad parameters, or a
/// non-finite coordinate (message names the offending index).
std::vector<int> dbscan(std::span<const GeoPoint> points, const DbscanParams& params);

/// Convex hull polygon with id and label; hull vertices are stored in
/// counter-clockwise order (x = lon, y = lat) with no collinear or repeated
/// vertices.
struct ClusterRegion {
  int id = 0;
  std::string label;
  std::vector<GeoPoint> hull;

  double area() const;
};

/// Strict convex hull (collinear boundary points dropped), CCW, minimal.
/// Throws std::invalid_argument when fewer than 3 distinct points remain or
/// all points are collinear.
std::vector<GeoPoint> convex_hull(std::span<const GeoPoint> points);

/// Shoelace area; positive for CCW rings.
double polygon_area(std::span<const GeoPoint> ring);

/// Inclusive point-in-convex-polygon test (boundary counts as inside).
bool point_in_hull(const GeoPoint& p, std::span<const GeoPoint> hull);

/// Id of the containing region, smallest hull area winning overlaps (ties
/// to the lower id), or kNoiseRegion.
int assign_region(const GeoPoint& p, std::span<const ClusterRegion> regions);

/// Builds hull regions from dbscan labels. Clusters whose hull degenerates
/// (fewer than 3 distinct points, or collinear) are folded into noise and
/// skipped; surviving regions are re-numbered contiguously from 0 and
/// labelled "<label_prefix>-<id>".
std::vector<ClusterRegion> build_regions(std::span<const GeoPoint> points,
                                         std::span<const int> labels,
                                         const std::string& label_prefix = "cluster");

/// Regions file: one JSON object per line,
/// {"id": int, "label": str, "hull": [[lat, lon], ...]}.
void write_regions(std::ostream& out, std::span<const ClusterRegion> regions);
std::vector<ClusterRegion> read_regions(std::istream& in);

}  // namespace eventsum::geo
