#include <algorithm>
#include <cmath>

#include "region_internal.hpp"
#include "tslab/errors.hpp"
#include "tslab/region.hpp"

namespace tslab {

namespace {

using Vec = std::vector<double>;

// Generator of the closure: a point, or the i-th coordinate ray.
struct Generator {
  bool ray = false;
  std::size_t index = 0;
};

Vec direction(const Generator& g, const std::vector<Vec>& pts, const Vec& base) {
  Vec v(base.size(), 0.0);
  if (g.ray) {
    v[g.index] = 1.0;
  } else {
    for (std::size_t k = 0; k < base.size(); ++k) v[k] = pts[g.index][k] - base[k];
  }
  return v;
}

// Normal to the span of one direction (2D) or two directions (3D).
Vec normal_of(const std::vector<Vec>& dirs) {
  if (dirs.size() == 1) return {-dirs[0][1], dirs[0][0]};
  const Vec& a = dirs[0];
  const Vec& b = dirs[1];
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

}  // namespace

HullReport hull_and_corners(const Region& region, double tol) {
  const std::size_t dim = region.coordinates.size();
  require(dim == 2 || dim == 3, "hull needs a region over two or three coordinates");
  HullReport rep;
  std::vector<Vec> all;
  for (const auto& p : region.points) all.push_back(region.coords(p.point));
  if (all.empty()) return rep;

  // Points within tol of an earlier one are merged into it.
  std::vector<std::size_t> reps;
  for (std::size_t i = 0; i < all.size(); ++i) {
    bool merged = false;
    for (std::size_t r : reps) {
      double gap = 0.0;
      for (std::size_t k = 0; k < dim; ++k) gap = std::max(gap, std::abs(all[r][k] - all[i][k]));
      merged = merged || gap <= tol;
    }
    if (!merged) reps.push_back(i);
  }
  // A point is a corner when the closure of the others misses it.
  std::vector<std::size_t> corners;
  std::vector<Vec> cpts;
  for (std::size_t i : reps) {
    std::vector<Vec> others;
    for (std::size_t j : reps)
      if (j != i) others.push_back(all[j]);
    if (others.empty() || detail::shift_to_closure(others, all[i]) > tol) {
      corners.push_back(i);
      cpts.push_back(all[i]);
    }
  }
  rep.corners = corners;

  // Facets are spanned by a corner plus dim - 1 further generators.
  auto add_facet = [&](Vec n, const Vec& base) {
    double len = 0.0;
    for (double x : n) len += x * x;
    len = std::sqrt(len);
    if (len < 1e-12) return;
    // Outward normals point into the negative orthant.
    bool neg = true, pos = true;
    for (double& x : n) {
      x /= len;
      if (std::abs(x) < 1e-12) x = 0.0;
      neg = neg && x <= 0.0;
      pos = pos && x >= 0.0;
    }
    if (!neg && !pos) return;
    if (!neg) {
      for (double& x : n) x = -x;
    }
    double offset = 0.0;
    for (std::size_t k = 0; k < dim; ++k) offset += n[k] * base[k];
    std::vector<std::size_t> on;
    for (std::size_t j = 0; j < cpts.size(); ++j) {
      double v = 0.0;
      for (std::size_t k = 0; k < dim; ++k) v += n[k] * cpts[j][k];
      if (v > offset + tol) return;
      if (v >= offset - tol) on.push_back(corners[j]);
    }
    for (auto& f : rep.facets) {
      double diff = std::abs(f.offset - offset);
      for (std::size_t k = 0; k < dim; ++k) diff = std::max(diff, std::abs(f.normal[k] - n[k]));
      if (diff <= 1e-9) return;  // coplanar with a facet already found
    }
    rep.facets.push_back({std::move(n), offset, std::move(on)});
  };
  for (std::size_t b = 0; b < cpts.size(); ++b) {
    // Generators after the base avoid recounting point sets.
    std::vector<Generator> g;
    for (std::size_t i = b + 1; i < cpts.size(); ++i) g.push_back({false, i});
    for (std::size_t k = 0; k < dim; ++k) g.push_back({true, k});
    for (std::size_t i = 0; i < g.size(); ++i) {
      const Vec di = direction(g[i], cpts, cpts[b]);
      if (dim == 2) {
        add_facet(normal_of({di}), cpts[b]);
        continue;
      }
      for (std::size_t j = i + 1; j < g.size(); ++j) {
        add_facet(normal_of({di, direction(g[j], cpts, cpts[b])}), cpts[b]);
      }
    }
  }
  std::sort(rep.facets.begin(), rep.facets.end(),
            [](const Facet& a, const Facet& b) { return a.normal < b.normal; });
  return rep;
}

}  // namespace tslab
