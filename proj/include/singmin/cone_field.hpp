#ifndef SINGMIN_CONE_FIELD_HPP
#define SINGMIN_CONE_FIELD_HPP

#include <algorithm>
#include <cmath>

#include "singmin/error.hpp"
#include "singmin/field.hpp"
#include "singmin/geometry.hpp"

namespace singmin {

/// Distance from `center` along the unit direction (ux, uy) to the first exit
/// from the discrete domain, starting the march at distance `start` (a point
/// known to be inside). Bisection to h/100.
inline double ray_exit_distance(const GridDomain& d, Point center, double ux, double uy,
                                double start) {
  const double step = 0.25 * d.h();
  auto at = [&](double s) { return Point{center.x + s * ux, center.y + s * uy}; };
  double lo = start;
  double hi = start + step;
  while (d.contains(at(hi))) {
    lo = hi;
    hi += step;
  }
  while (hi - lo > 0.01 * d.h()) {
    const double mid = 0.5 * (lo + hi);
    if (d.contains(at(mid))) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

/// Exit distance from the analytic shape (scaled to the domain), bisected to
/// 1e-6 h. Falls back to `start` if the start point is already outside.
inline double shape_exit_distance(const GridDomain& d, Point center, double ux, double uy, double start) {
  const double t = d.scale();
  auto inside = [&](double s) {
    return shape_contains(d.spec(), {(center.x + s * ux) / t, (center.y + s * uy) / t});
  };
  if (!inside(start)) return start;
  const double step = 0.25 * d.h();
  double lo = start, hi = start + step;
  while (inside(hi)) {
    lo = hi;
    hi += step;
  }
  while (hi - lo > 1e-6 * d.h()) {
    const double mid = 0.5 * (lo + hi);
    if (inside(mid)) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

/// Star-shaped cone function rho(x) = 1 - 1/r(x) = 1 - |x-c| / |exit point - c|.
/// Zero off the interior, 1 at a node coinciding with the center.
inline ScalarField cone_field(const DomainPtr& domain, Point center) {
  const GridDomain& d = *domain;
  if (!d.contains(center)) throw ArgumentError("cone center is not inside the domain");
  // the center must not sit on the outer rim of included triangles
  {
    const double r = 0.05 * d.h();
    for (int k = 0; k < 8; ++k) {
      const double a = k * 0.7853981633974483;
      if (!d.contains({center.x + r * std::cos(a), center.y + r * std::sin(a)}))
        throw ArgumentError("cone center lies on the domain boundary");
    }
  }
  // Analytic shapes use the smooth boundary; measuring to the staircase
  // polygon would give rho an O(1) tangential gradient near the rim.
  const bool analytic = d.spec().kind != ShapeKind::mask_file;
  ScalarField rho(domain);
  for (int n : d.interior_nodes()) {
    const Point x = d.position(n);
    const double dx = x.x - center.x;
    const double dy = x.y - center.y;
    const double dist = std::hypot(dx, dy);
    if (dist < 1e-12 * d.h()) {
      rho[n] = 1.0;
      continue;
    }
    const double exit = analytic ? shape_exit_distance(d, center, dx / dist, dy / dist, dist)
                                 : ray_exit_distance(d, center, dx / dist, dy / dist, dist);
    rho[n] = std::clamp(1.0 - dist / exit, 0.0, 1.0);
  }
  return rho;
}

inline ScalarField cone_field(const DomainPtr& domain) {
  return cone_field(domain, domain->center());
}

}  // namespace singmin

#endif  // SINGMIN_CONE_FIELD_HPP
