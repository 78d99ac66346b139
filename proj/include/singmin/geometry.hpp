#ifndef SINGMIN_GEOMETRY_HPP
#define SINGMIN_GEOMETRY_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "singmin/error.hpp"

namespace singmin {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

enum class NodeKind : std::uint8_t { exterior = 0, boundary = 1, interior = 2 };

enum class ShapeKind { disk, rect, lshape, mask_file };

/// Shape recipe. Lengths are in domain units; `resolution` is nodes per unit length.
struct ShapeSpec {
  ShapeKind kind = ShapeKind::disk;
  double radius = 1.0;      // disk
  double width = 1.0;       // rect, lshape
  double height = 1.0;      // rect, lshape
  double cut = 0.5;         // lshape: side of the removed upper-right square
  std::string mask_path;    // mask_file
  double resolution = 64.0; // 1/h for analytic shapes
  double mask_spacing = 0.0; // h for mask files
  std::optional<Point> center;

  static ShapeSpec disk(double r, double res) {
    ShapeSpec s;
    s.kind = ShapeKind::disk;
    s.radius = r;
    s.resolution = res;
    return s;
  }
  static ShapeSpec rect(double w, double h, double res) {
    ShapeSpec s;
    s.kind = ShapeKind::rect;
    s.width = w;
    s.height = h;
    s.resolution = res;
    return s;
  }
  static ShapeSpec lshape(double w, double h, double cut, double res) {
    ShapeSpec s;
    s.kind = ShapeKind::lshape;
    s.width = w;
    s.height = h;
    s.cut = cut;
    s.resolution = res;
    return s;
  }
  static ShapeSpec mask_file(std::string path, double spacing) {
    ShapeSpec s;
    s.kind = ShapeKind::mask_file;
    s.mask_path = std::move(path);
    s.mask_spacing = spacing;
    return s;
  }

  /// Star-shaped gauge center: explicit, or the natural one for the kind.
  Point gauge_center() const {
    if (center) return *center;
    switch (kind) {
      case ShapeKind::disk: return {0.0, 0.0};
      case ShapeKind::rect: return {0.5 * width, 0.5 * height};
      case ShapeKind::lshape: return {0.5 * (width - cut), 0.5 * (height - cut)};
      case ShapeKind::mask_file: break;
    }
    return {0.0, 0.0};
  }
};

inline std::string to_string(ShapeKind k) {
  switch (k) {
    case ShapeKind::disk: return "disk";
    case ShapeKind::rect: return "rect";
    case ShapeKind::lshape: return "lshape";
    case ShapeKind::mask_file: return "mask";
  }
  return "unknown";
}

/// One right triangle of the structured split. Its gradient is
/// ((v[xp]-v[xm])/h, (v[yp]-v[ym])/h); the vertex set is {xm, xp, ym, yp}.
struct Triangle {
  int xm, xp, ym, yp;

  std::array<int, 3> nodes() const {
    // xm/xp span one leg, ym/yp the other; exactly one index is shared.
    if (ym == xm || ym == xp) return {xm, xp, yp};
    return {xm, xp, ym};
  }
};

/// Structured triangulated 2-D domain. Nodes sit on a lattice with spacing h;
/// each lattice cell is split along its (i,j)-(i+1,j+1) diagonal. Immutable
/// once built.
class GridDomain {
public:
  int nx() const noexcept { return nx_; }
  int ny() const noexcept { return ny_; }
  double h() const noexcept { return h_; }
  Point origin() const noexcept { return origin_; }
  double volume() const noexcept { return volume_; }
  double triangle_area() const noexcept { return 0.5 * h_ * h_; }
  const ShapeSpec& spec() const noexcept { return spec_; }
  /// Gauge center in this domain's (possibly scaled) coordinates.
  Point center() const noexcept { return center_; }

  int node_count() const noexcept { return nx_ * ny_; }
  int node_index(int ix, int iy) const noexcept { return iy * nx_ + ix; }
  int ix_of(int node) const noexcept { return node % nx_; }
  int iy_of(int node) const noexcept { return node / nx_; }
  Point position(int node) const noexcept {
    return {origin_.x + h_ * ix_of(node), origin_.y + h_ * iy_of(node)};
  }
  NodeKind kind(int node) const noexcept { return mask_[node]; }
  const std::vector<NodeKind>& mask() const noexcept { return mask_; }

  const std::vector<Triangle>& triangles() const noexcept { return triangles_; }

  /// Interior nodes are the unknowns of every solver, in lattice order.
  int interior_count() const noexcept { return static_cast<int>(interior_.size()); }
  const std::vector<int>& interior_nodes() const noexcept { return interior_; }
  /// -1 for non-interior nodes.
  int unknown_of(int node) const noexcept { return unknown_[node]; }
  /// Lumped quadrature weights of the interior nodes; they sum to volume().
  const std::vector<double>& weights() const noexcept { return weights_; }

  /// True iff p lies in a closed included triangle.
  bool contains(Point p) const noexcept {
    const double fx = (p.x - origin_.x) / h_;
    const double fy = (p.y - origin_.y) / h_;
    if (!(fx >= 0.0) || !(fy >= 0.0)) return false;
    int cx = static_cast<int>(std::floor(fx));
    int cy = static_cast<int>(std::floor(fy));
    if (cx >= nx_ - 1 || cy >= ny_ - 1) {
      if (cx == nx_ - 1 && fx == cx) cx -= 1;
      if (cy == ny_ - 1 && fy == cy) cy -= 1;
      if (cx >= nx_ - 1 || cy >= ny_ - 1) return false;
    }
    const double lx = fx - cx;
    const double ly = fy - cy;
    const int cell = cy * (nx_ - 1) + cx;
    // lower triangle (a,b,c) has ly <= lx; on the diagonal either one counts
    if (ly <= lx && cell_tri_[2 * cell]) return true;
    if (ly >= lx && cell_tri_[2 * cell + 1]) return true;
    return false;
  }

  /// Copy with lattice spacing and origin multiplied by t (same mask).
  GridDomain scaled(double t) const {
    GridDomain d = *this;
    d.h_ = h_ * t;
    d.origin_ = {origin_.x * t, origin_.y * t};
    d.center_ = {center_.x * t, center_.y * t};
    d.volume_ = volume_ * t * t;
    for (double& w : d.weights_) w *= t * t;
    d.scale_ = scale_ * t;
    return d;
  }

  /// Accumulated scale factor relative to the built shape (1 unless scaled).
  double scale() const noexcept { return scale_; }

  /// Assemble from a lattice classification of non-exterior nodes.
  static GridDomain from_lattice(int nx, int ny, double h, Point origin,
                                 const std::vector<std::uint8_t>& inside,
                                 ShapeSpec spec, Point center) {
    if (nx < 2 || ny < 2) throw ConstructionError("lattice needs at least 2x2 nodes");
    if (!(h > 0.0)) throw ConstructionError("grid spacing must be positive");
    GridDomain d;
    d.nx_ = nx;
    d.ny_ = ny;
    d.h_ = h;
    d.origin_ = origin;
    d.spec_ = std::move(spec);
    d.center_ = center;
    const int n = nx * ny;
    auto in = [&](int ix, int iy) {
      return ix >= 0 && iy >= 0 && ix < nx && iy < ny && inside[iy * nx + ix] != 0;
    };
    d.mask_.assign(n, NodeKind::exterior);
    static constexpr std::array<std::array<int, 2>, 6> nbr{
        {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {-1, -1}}};
    for (int iy = 0; iy < ny; ++iy) {
      for (int ix = 0; ix < nx; ++ix) {
        if (!in(ix, iy)) continue;
        bool all = true;
        for (const auto& o : nbr) all = all && in(ix + o[0], iy + o[1]);
        d.mask_[iy * nx + ix] = all ? NodeKind::interior : NodeKind::boundary;
      }
    }
    d.unknown_.assign(n, -1);
    for (int k = 0; k < n; ++k) {
      if (d.mask_[k] == NodeKind::interior) {
        d.unknown_[k] = static_cast<int>(d.interior_.size());
        d.interior_.push_back(k);
      }
    }
    if (d.interior_.empty()) throw ConstructionError("domain has an empty interior");

    d.cell_tri_.assign(2 * (nx - 1) * (ny - 1), 0);
    for (int cy = 0; cy + 1 < ny; ++cy) {
      for (int cx = 0; cx + 1 < nx; ++cx) {
        const int a = d.node_index(cx, cy);
        const int b = d.node_index(cx + 1, cy);
        const int c = d.node_index(cx + 1, cy + 1);
        const int dd = d.node_index(cx, cy + 1);
        const int cell = cy * (nx - 1) + cx;
        if (in(cx, cy) && in(cx + 1, cy) && in(cx + 1, cy + 1)) {
          d.cell_tri_[2 * cell] = 1;
          d.triangles_.push_back({a, b, b, c});
        }
        if (in(cx, cy) && in(cx + 1, cy + 1) && in(cx, cy + 1)) {
          d.cell_tri_[2 * cell + 1] = 1;
          d.triangles_.push_back({dd, c, a, dd});
        }
      }
    }
    d.volume_ = static_cast<double>(d.triangles_.size()) * d.triangle_area();

    d.weights_.assign(d.interior_.size(), 0.0);
    for (const Triangle& t : d.triangles_) {
      const auto vs = t.nodes();
      int k = 0;
      for (int v : vs) k += (d.unknown_[v] >= 0);
      if (k == 0) continue;
      for (int v : vs) {
        if (d.unknown_[v] >= 0) d.weights_[d.unknown_[v]] += d.triangle_area() / k;
      }
    }
    double total = 0.0;
    for (double w : d.weights_) total += w;
    for (double& w : d.weights_) w *= d.volume_ / total;
    return d;
  }

private:
  int nx_ = 0;
  int ny_ = 0;
  double h_ = 0.0;
  double scale_ = 1.0;
  Point origin_{};
  Point center_{};
  double volume_ = 0.0;
  ShapeSpec spec_{};
  std::vector<NodeKind> mask_;
  std::vector<Triangle> triangles_;
  std::vector<std::uint8_t> cell_tri_;
  std::vector<int> interior_;
  std::vector<int> unknown_;
  std::vector<double> weights_;
};

using DomainPtr = std::shared_ptr<const GridDomain>;

namespace detail {

inline GridDomain domain_from_mask_file(const ShapeSpec& spec) {
  std::ifstream in(spec.mask_path);
  if (!in) throw IoError("cannot read mask file '" + spec.mask_path + "'");
  std::vector<std::string> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    rows.push_back(line);
  }
  if (rows.empty()) throw IoError("mask file '" + spec.mask_path + "' is empty");
  const std::size_t width = rows.front().size();
  for (const auto& r : rows) {
    if (r.size() != width) throw IoError("mask rows have non-uniform length");
    for (char c : r) {
      if (c != '.' && c != '#') throw IoError(std::string("invalid mask character '") + c + "'");
    }
  }
  if (!(spec.mask_spacing > 0.0)) throw ArgumentError("mask spacing must be positive");
  // one exterior layer of padding on every side
  const int nx = static_cast<int>(width) + 2;
  const int ny = static_cast<int>(rows.size()) + 2;
  std::vector<std::uint8_t> inside(static_cast<std::size_t>(nx) * ny, 0);
  bool any = false;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const int iy = static_cast<int>(rows.size() - 1 - r) + 1;
    for (std::size_t c = 0; c < width; ++c) {
      if (rows[r][c] == '#') {
        inside[iy * nx + static_cast<int>(c) + 1] = 1;
        any = true;
      }
    }
  }
  if (!any) throw ConstructionError("mask file has no interior cells");
  const double h = spec.mask_spacing;
  const Point origin{-h, -h};
  Point center = spec.center.value_or(Point{0.5 * h * (width - 1), 0.5 * h * (rows.size() - 1)});
  return GridDomain::from_lattice(nx, ny, h, origin, inside, spec, center);
}

}  // namespace detail

/// Analytic membership for disk/rect/lshape in the shape's own (unscaled)
/// coordinates, with a relative tolerance so lattice points on the rim count.
/// Mask shapes have no analytic form and always return false.
inline bool shape_contains(const ShapeSpec& spec, Point p) {
  const double eps = 1e-9 / spec.resolution;
  const double x = p.x, y = p.y;
  switch (spec.kind) {
    case ShapeKind::disk: return x * x + y * y <= spec.radius * spec.radius * (1.0 + 1e-12);
    case ShapeKind::rect: return x >= -eps && y >= -eps && x <= spec.width + eps && y <= spec.height + eps;
    case ShapeKind::lshape: {
      const bool box = x >= -eps && y >= -eps && x <= spec.width + eps && y <= spec.height + eps;
      const bool removed = x > spec.width - spec.cut + eps && y > spec.height - spec.cut + eps;
      return box && !removed;
    }
    case ShapeKind::mask_file: break;
  }
  return false;
}

/// Build a GridDomain from a shape recipe. A triangle is included iff all
/// three of its vertices lie in the closed shape.
inline DomainPtr make_domain(const ShapeSpec& spec) {
  if (spec.kind == ShapeKind::mask_file) {
    return std::make_shared<const GridDomain>(detail::domain_from_mask_file(spec));
  }
  if (!(spec.resolution > 0.0)) throw ArgumentError("resolution must be positive");
  const double h = 1.0 / spec.resolution;
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  switch (spec.kind) {
    case ShapeKind::disk:
      if (!(spec.radius > 0.0)) throw ArgumentError("disk radius must be positive");
      x0 = y0 = -spec.radius;
      x1 = y1 = spec.radius;
      break;
    case ShapeKind::rect:
      if (!(spec.width > 0.0) || !(spec.height > 0.0))
        throw ArgumentError("rectangle sides must be positive");
      x1 = spec.width;
      y1 = spec.height;
      break;
    case ShapeKind::lshape:
      if (!(spec.width > 0.0) || !(spec.height > 0.0) || !(spec.cut > 0.0) ||
          spec.cut >= std::min(spec.width, spec.height))
        throw ArgumentError("L-shape needs positive sides and 0 < cut < min(w,h)");
      x1 = spec.width;
      y1 = spec.height;
      break;
    case ShapeKind::mask_file: break;
  }
  // lattice through the origin, padded by one node
  const int ix0 = static_cast<int>(std::floor(x0 / h + 1e-9)) - 1;
  const int iy0 = static_cast<int>(std::floor(y0 / h + 1e-9)) - 1;
  const int ix1 = static_cast<int>(std::ceil(x1 / h - 1e-9)) + 1;
  const int iy1 = static_cast<int>(std::ceil(y1 / h - 1e-9)) + 1;
  const int nx = ix1 - ix0 + 1;
  const int ny = iy1 - iy0 + 1;
  const Point origin{ix0 * h, iy0 * h};

  auto inside_shape = [&](double x, double y) { return shape_contains(spec, {x, y}); };
  std::vector<std::uint8_t> inside(static_cast<std::size_t>(nx) * ny, 0);
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      inside[iy * nx + ix] = inside_shape(origin.x + ix * h, origin.y + iy * h) ? 1 : 0;
    }
  }
  return std::make_shared<const GridDomain>(
      GridDomain::from_lattice(nx, ny, h, origin, inside, spec, spec.gauge_center()));
}

/// Homothety x -> t x: spacing t*h, volume t^2*volume, identical mask.
inline DomainPtr scale_domain(const GridDomain& d, double t) {
  if (!(t > 0.0)) throw ArgumentError("scale factor must be positive");
  return std::make_shared<const GridDomain>(d.scaled(t));
}

/// Rescale so the discrete volume equals `target` (default 1).
inline DomainPtr normalize_volume(const GridDomain& d, double target = 1.0) {
  if (!(target > 0.0)) throw ArgumentError("target volume must be positive");
  return scale_domain(d, std::sqrt(target / d.volume()));
}

/// Radius of the disk with the same (discrete) area.
inline double schwarz_radius(const GridDomain& d) {
  return std::sqrt(d.volume() / std::numbers::pi);
}

}  // namespace singmin

#endif  // SINGMIN_GEOMETRY_HPP
