// Independent reference implementations the test suites check the library
// against. Everything here recomputes results from first principles and
// shares no code with src/.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "eventsum/geo.hpp"

namespace oracles {

// ---------------------------------------------------------------------------
// Fisher: exact hypergeometric upper tail using __int128 binomials. The
// whole tail fits because sum_k C(K,k) C(N-K,n-k) = C(N,n) <= C(120,60).
class ExactHypergeometric {
 public:
  explicit ExactHypergeometric(int max_n) : max_n_(max_n), choose_(static_cast<std::size_t>(max_n + 1)) {
    for (int n = 0; n <= max_n; ++n) {
      choose_[n].assign(static_cast<std::size_t>(n + 1), 0);
      choose_[n][0] = 1;
      for (int k = 1; k <= n; ++k)
        choose_[n][k] = choose_[n - 1][k - 1] + (k <= n - 1 ? choose_[n - 1][k] : 0);
    }
  }

  // P[X >= a] for X ~ Hypergeometric(N = a+b+c+d, K = a+c, n = a+b).
  long double upper_tail(int a, int b, int c, int d) const {
    const int population = a + b + c + d;
    const int successes = a + c;
    const int draws = a + b;
    const int k_max = std::min(successes, draws);
    unsigned __int128 numerator = 0;
    for (int k = a; k <= k_max; ++k) {
      const int rest = draws - k;
      if (rest < 0 || rest > population - successes) continue;
      numerator += choose_[successes][k] * choose_[population - successes][rest];
    }
    const unsigned __int128 denominator = choose_[population][draws];
    return static_cast<long double>(numerator) / static_cast<long double>(denominator);
  }

 private:
  int max_n_;
  std::vector<std::vector<unsigned __int128>> choose_;
};

// ---------------------------------------------------------------------------
// EARS C2 reference: plain mean / population-sigma arithmetic.
struct C2Reference {
  bool alarm = false;
  double statistic = 0;
};

inline C2Reference c2_reference(const std::vector<double>& counts, int t, int window,
                                double sigma) {
  C2Reference r;
  const double mean =
      std::accumulate(counts.begin() + (t - window), counts.begin() + t, 0.0) / window;
  double var = 0;
  for (int i = t - window; i < t; ++i) var += (counts[i] - mean) * (counts[i] - mean);
  var /= window;
  const double sd = std::sqrt(var);
  const double x = counts[t];
  if (sd > 0) {
    r.statistic = (x - mean) / sd;
    r.alarm = x - mean > sigma * sd;
  } else {
    r.statistic = x - mean;
    r.alarm = x - mean >= 1.0;
  }
  return r;
}

// ---------------------------------------------------------------------------
// mu reference on raw integer history, recomputed with sort-based medians.
inline double mu_reference(double observation, std::vector<int> history, double floor) {
  std::sort(history.begin(), history.end());
  auto median = [](const std::vector<double>& sorted) {
    const std::size_t n = sorted.size();
    return n % 2 == 1 ? sorted[n / 2] : (sorted[n / 2 - 1] + sorted[n / 2]) / 2;
  };
  std::vector<double> values(history.begin(), history.end());
  const double med = median(values);
  std::vector<double> deviations;
  for (double v : values) deviations.push_back(std::abs(v - med));
  std::sort(deviations.begin(), deviations.end());
  const double mad = median(deviations);
  return (observation - med) / std::max(mad, floor);
}

// ---------------------------------------------------------------------------
// Brute-force DBSCAN over the full distance matrix; returns the same label
// conventions as the library (contiguous ids, -1 noise).
inline std::vector<int> dbscan_reference(const std::vector<eventsum::geo::GeoPoint>& points,
                                         double eps, int min_pts) {
  const int n = static_cast<int>(points.size());
  std::vector<std::vector<int>> neighbours(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double dlat = points[i].lat - points[j].lat;
      const double dlon = points[i].lon - points[j].lon;
      if (std::sqrt(dlat * dlat + dlon * dlon) <= eps) neighbours[i].push_back(j);
    }
  std::vector<int> labels(n, -2);
  int cluster = 0;
  for (int i = 0; i < n; ++i) {
    if (labels[i] != -2) continue;
    if (static_cast<int>(neighbours[i].size()) < min_pts) {
      labels[i] = -1;
      continue;
    }
    labels[i] = cluster;
    std::vector<int> stack = neighbours[i];
    while (!stack.empty()) {
      const int q = stack.front();
      stack.erase(stack.begin());
      if (labels[q] == -1) labels[q] = cluster;
      if (labels[q] != -2) continue;
      labels[q] = cluster;
      if (static_cast<int>(neighbours[q].size()) >= min_pts)
        stack.insert(stack.end(), neighbours[q].begin(), neighbours[q].end());
    }
    ++cluster;
  }
  return labels;
}

// ---------------------------------------------------------------------------
// Point-in-polygon by ray casting, with an explicit boundary check so
// points on an edge or vertex count as inside.
inline bool point_in_polygon_reference(const eventsum::geo::GeoPoint& p,
                                       const std::vector<eventsum::geo::GeoPoint>& ring) {
  const double x = p.lon, y = p.lat;
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = ring[i];
    const auto& b = ring[(i + 1) % n];
    const double cross = (b.lon - a.lon) * (y - a.lat) - (b.lat - a.lat) * (x - a.lon);
    const double dot = (x - a.lon) * (x - b.lon) + (y - a.lat) * (y - b.lat);
    if (std::abs(cross) < 1e-12 && dot <= 1e-12) return true;  // on the segment
  }
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const auto& a = ring[i];
    const auto& b = ring[j];
    if ((a.lat > y) != (b.lat > y)) {
      const double x_cross = (b.lon - a.lon) * (y - a.lat) / (b.lat - a.lat) + a.lon;
      if (x < x_cross) inside = !inside;
    }
  }
  return inside;
}

// ---------------------------------------------------------------------------
// Paice/Husk reference stemmer with its own embedded table, stored
// un-reversed and applied recursively.
class LancasterReference {
 public:
  std::string stem(std::string word) const {
    bool intact = true;
    while (true) {
      bool applied = false;
      for (const Entry& e : table()) {
        if (word.size() < e.ending.size()) continue;
        if (word.compare(word.size() - e.ending.size(), e.ending.size(), e.ending) != 0) continue;
        if (e.intact && !intact) continue;
        std::string candidate = word.substr(0, word.size() - e.remove) + e.append;
        if (!ok(candidate)) continue;
        word = candidate;
        intact = false;
        applied = true;
        if (!e.cont) return word;
        break;
      }
      if (!applied) return word;
    }
  }

 private:
  struct Entry {
    std::string ending;  // word order
    bool intact;
    int remove;
    std::string append;
    bool cont;  // true for '>' rules
  };

  static bool ok(const std::string& s) {
    if (s.empty()) return false;
    auto vowel = [](char c) {
      return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
    };
    if (vowel(s[0])) return s.size() >= 2;
    if (s.size() < 3) return false;
    for (std::size_t i = 1; i < s.size(); ++i)
      if (vowel(s[i]) || s[i] == 'y') return true;
    return false;
  }

  static const std::vector<Entry>& table() {
    static const std::vector<Entry> entries = {
        {"ia", true, 2, "", false},   {"a", true, 1, "", false},
        {"bb", false, 1, "", false},  {"ytic", false, 3, "s", false},
        {"ic", false, 2, "", true},   {"nc", false, 1, "t", true},
        {"dd", false, 1, "", false},  {"ied", false, 3, "y", true},
        {"ceed", false, 2, "ss", false}, {"eed", false, 1, "", false},
        {"ed", false, 2, "", true},   {"hood", false, 4, "", true},
        {"e", false, 1, "", true},    {"lief", false, 1, "v", false},
        {"if", false, 2, "", true},   {"ing", false, 3, "", true},
        {"iag", false, 3, "y", false}, {"ag", false, 2, "", true},
        {"gg", false, 1, "", false},  {"th", true, 2, "", false},
        {"guish", false, 5, "ct", false}, {"ish", false, 3, "", true},
        {"i", true, 1, "", false},    {"i", false, 1, "y", true},
        {"ij", false, 1, "d", false}, {"fuj", false, 1, "s", false},
        {"uj", false, 1, "d", false}, {"oj", false, 1, "d", false},
        {"hej", false, 1, "r", false}, {"verj", false, 1, "t", false},
        {"misj", false, 2, "t", false}, {"nj", false, 1, "d", false},
        {"j", false, 1, "s", false},  {"ifiabl", false, 6, "", false},
        {"iabl", false, 4, "y", false}, {"abl", false, 3, "", true},
        {"ibl", false, 3, "", false}, {"bil", false, 2, "l", true},
        {"cl", false, 1, "", false},  {"iful", false, 4, "y", false},
        {"ful", false, 3, "", true},  {"ul", false, 2, "", false},
        {"ial", false, 3, "", true},  {"ual", false, 3, "", true},
        {"al", false, 2, "", true},   {"ll", false, 1, "", false},
        {"ium", false, 3, "", false}, {"um", true, 2, "", false},
        {"ism", false, 3, "", true},  {"mm", false, 1, "", false},
        {"sion", false, 4, "j", true}, {"xion", false, 4, "ct", false},
        {"ion", false, 3, "", true},  {"ian", false, 3, "", true},
        {"an", false, 2, "", true},   {"een", false, 0, "", false},
        {"en", false, 2, "", true},   {"nn", false, 1, "", false},
        {"ship", false, 4, "", true}, {"pp", false, 1, "", false},
        {"er", false, 2, "", true},   {"ear", false, 0, "", false},
        {"ar", false, 2, "", false},  {"or", false, 2, "", true},
        {"ur", false, 2, "", true},   {"rr", false, 1, "", false},
        {"tr", false, 1, "", true},   {"ier", false, 3, "y", true},
        {"ies", false, 3, "y", true}, {"sis", false, 2, "", false},
        {"is", false, 2, "", true},   {"ness", false, 4, "", true},
        {"ss", false, 0, "", false},  {"ous", false, 3, "", true},
        {"us", true, 2, "", false},   {"s", true, 1, "", true},
        {"s", false, 0, "", false},   {"plicat", false, 4, "y", false},
        {"at", false, 2, "", true},   {"ment", false, 4, "", true},
        {"ent", false, 3, "", true},  {"ant", false, 3, "", true},
        {"ript", false, 2, "b", false}, {"orpt", false, 2, "b", false},
        {"duct", false, 1, "", false}, {"sumpt", false, 2, "", false},
        {"cept", false, 2, "iv", false}, {"olut", false, 2, "v", false},
        {"sist", false, 0, "", false}, {"ist", false, 3, "", true},
        {"tt", false, 1, "", false},  {"iqu", false, 3, "", false},
        {"ogu", false, 1, "", false}, {"siv", false, 3, "j", true},
        {"eiv", false, 0, "", false}, {"iv", false, 2, "", true},
        {"bly", false, 1, "", true},  {"ily", false, 3, "y", true},
        {"ply", false, 0, "", false}, {"ly", false, 2, "", true},
        {"ogy", false, 1, "", false}, {"phy", false, 1, "", false},
        {"omy", false, 1, "", false}, {"opy", false, 1, "", false},
        {"ity", false, 3, "", true},  {"ety", false, 3, "", true},
        {"lty", false, 2, "", false}, {"istry", false, 5, "", false},
        {"ary", false, 3, "", true},  {"ory", false, 3, "", true},
        {"ify", false, 3, "", false}, {"nly", false, 2, "", true},
        {"ivy", false, 3, "y", false}, {"iz", false, 2, "", true},
        {"yz", false, 1, "s", false},
    };
    return entries;
  }
};

}  // namespace oracles
