#ifndef SINGMIN_FIELD_HPP
#define SINGMIN_FIELD_HPP

#include <cmath>
#include <functional>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "singmin/error.hpp"
#include "singmin/geometry.hpp"

namespace singmin {

/// Nodal values on a GridDomain, one per lattice node.
class ScalarField {
public:
  ScalarField() = default;
  explicit ScalarField(DomainPtr domain)
      : domain_(std::move(domain)), values_(domain_->node_count(), 0.0) {}
  ScalarField(DomainPtr domain, std::vector<double> values)
      : domain_(std::move(domain)), values_(std::move(values)) {
    if (static_cast<int>(values_.size()) != domain_->node_count())
      throw ArgumentError("field size does not match the domain's node count");
  }

  /// Interior values given in unknown order; every other node is 0.
  static ScalarField from_interior(DomainPtr domain, const Eigen::VectorXd& x) {
    ScalarField f(std::move(domain));
    const auto& nodes = f.domain_->interior_nodes();
    if (x.size() != static_cast<Eigen::Index>(nodes.size()))
      throw ArgumentError("interior vector size mismatch");
    for (std::size_t k = 0; k < nodes.size(); ++k) f.values_[nodes[k]] = x[static_cast<Eigen::Index>(k)];
    return f;
  }

  /// Evaluate g(x, y) at interior nodes; zero elsewhere.
  static ScalarField from_function(DomainPtr domain, const std::function<double(Point)>& g) {
    ScalarField f(std::move(domain));
    for (int n : f.domain_->interior_nodes()) f.values_[n] = g(f.domain_->position(n));
    return f;
  }

  const GridDomain& domain() const noexcept { return *domain_; }
  const DomainPtr& domain_ptr() const noexcept { return domain_; }
  const std::vector<double>& values() const noexcept { return values_; }
  std::vector<double>& values() noexcept { return values_; }
  double operator[](int node) const noexcept { return values_[node]; }
  double& operator[](int node) noexcept { return values_[node]; }

  Eigen::VectorXd interior() const {
    const auto& nodes = domain_->interior_nodes();
    Eigen::VectorXd x(static_cast<Eigen::Index>(nodes.size()));
    for (std::size_t k = 0; k < nodes.size(); ++k) x[static_cast<Eigen::Index>(k)] = values_[nodes[k]];
    return x;
  }

  /// Zero on every non-interior node and finite everywhere.
  bool is_dirichlet() const noexcept {
    for (int k = 0; k < domain_->node_count(); ++k) {
      if (!std::isfinite(values_[k])) return false;
      if (domain_->kind(k) != NodeKind::interior && values_[k] != 0.0) return false;
    }
    return true;
  }

  ScalarField scaled(double c) const {
    ScalarField f = *this;
    for (double& v : f.values_) v *= c;
    return f;
  }

private:
  DomainPtr domain_;
  std::vector<double> values_;
};

/// Geometric-mean carrier: value = exp(log_value), value == 0 iff log_value == -inf.
struct MeanValue {
  double value = 0.0;
  double log_value = -INFINITY;
};

/// Smoothed uniform noise in [-1, 1] (max-abs normalized), zero off the interior.
inline ScalarField smooth_noise(const DomainPtr& domain, std::mt19937_64& rng, int passes = 8) {
  const GridDomain& d = *domain;
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> a(d.node_count(), 0.0);
  for (int n : d.interior_nodes()) a[n] = u(rng);
  std::vector<double> b(a.size(), 0.0);
  for (int pass = 0; pass < passes; ++pass) {
    for (int n : d.interior_nodes()) {
      const int ix = d.ix_of(n), iy = d.iy_of(n);
      double s = 2.0 * a[n];
      s += a[d.node_index(ix + 1, iy)] + a[d.node_index(ix - 1, iy)];
      s += a[d.node_index(ix, iy + 1)] + a[d.node_index(ix, iy - 1)];
      b[n] = s / 6.0;
    }
    std::swap(a, b);
  }
  double mx = 0.0;
  for (int n : d.interior_nodes()) mx = std::max(mx, std::abs(a[n]));
  if (mx > 0.0)
    for (double& v : a) v /= mx;
  return ScalarField(domain, std::move(a));
}

}  // namespace singmin

#endif  // SINGMIN_FIELD_HPP
