#ifndef SINGMIN_FIELD_OPS_HPP
#define SINGMIN_FIELD_OPS_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Core>

#include "singmin/error.hpp"
#include "singmin/field.hpp"
#include "singmin/geometry.hpp"

namespace singmin {

namespace detail {

inline void scatter_interior(const GridDomain& d, const Eigen::VectorXd& x, std::vector<double>& full) {
  full.assign(d.node_count(), 0.0);
  const auto& nodes = d.interior_nodes();
  for (std::size_t k = 0; k < nodes.size(); ++k) full[nodes[k]] = x[static_cast<Eigen::Index>(k)];
}

/// Regularized p-energy sum_T area ((|g|^2 + delta^2)^{p/2} - delta^p) over
/// full nodal values. If grad is non-null it receives dE/dv at every node.
inline double energy_full(const GridDomain& d, const std::vector<double>& v, double p, double delta,
                          std::vector<double>* grad) {
  const double h = d.h();
  const double area = d.triangle_area();
  const double d2 = delta * delta;
  const double dp = delta > 0.0 ? std::pow(delta, p) : 0.0;
  if (grad) grad->assign(d.node_count(), 0.0);
  double e = 0.0;
  for (const Triangle& t : d.triangles()) {
    const double gx = (v[t.xp] - v[t.xm]) / h;
    const double gy = (v[t.yp] - v[t.ym]) / h;
    const double s = gx * gx + gy * gy + d2;
    if (s <= 0.0) continue;
    const double sp = std::pow(s, 0.5 * p);
    e += area * (sp - dp);
    if (grad) {
      const double c = area * p * sp / s / h;
      (*grad)[t.xp] += c * gx;
      (*grad)[t.xm] -= c * gx;
      (*grad)[t.yp] += c * gy;
      (*grad)[t.ym] -= c * gy;
    }
  }
  return e;
}

/// Energy of an interior vector, with the gradient restricted to unknowns.
inline double energy_interior(const GridDomain& d, const Eigen::VectorXd& x, double p, double delta,
                              Eigen::VectorXd* grad) {
  std::vector<double> full;
  scatter_interior(d, x, full);
  if (!grad) return energy_full(d, full, p, delta, nullptr);
  std::vector<double> g;
  const double e = energy_full(d, full, p, delta, &g);
  const auto& nodes = d.interior_nodes();
  grad->resize(static_cast<Eigen::Index>(nodes.size()));
  for (std::size_t k = 0; k < nodes.size(); ++k) (*grad)[static_cast<Eigen::Index>(k)] = g[nodes[k]];
  return e;
}

/// s = (1/V) sum w (|x|^q - 1)/q, computed with expm1; log m_q = log1p(q s)/q.
inline double log_q_mean_interior(const GridDomain& d, const Eigen::VectorXd& x, double q) {
  const auto& w = d.weights();
  double s = 0.0;
  bool any = false;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    const double a = std::abs(x[k]);
    any = any || a > 0.0;
    s += w[static_cast<std::size_t>(k)] * (a > 0.0 ? std::expm1(q * std::log(a)) : -1.0) / q;
  }
  if (!any) return -std::numeric_limits<double>::infinity();
  s /= d.volume();
  const double qs = q * s;
  if (qs <= -1.0) return -std::numeric_limits<double>::infinity();
  return std::log1p(qs) / q;
}

/// beta = (1/V) sum w log|x|; -inf if any interior value vanishes.
inline double log_mean_interior(const GridDomain& d, const Eigen::VectorXd& x) {
  const auto& w = d.weights();
  double s = 0.0;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    const double a = std::abs(x[k]);
    if (!(a > 0.0)) return -std::numeric_limits<double>::infinity();
    s += w[static_cast<std::size_t>(k)] * std::log(a);
  }
  return s / d.volume();
}

inline void check_q(double q) {
  if (!(q > 0.0 && q <= 1.0)) throw ArgumentError("q must lie in (0, 1]");
}

inline void check_p(double p) {
  if (!(p > 1.0) || !std::isfinite(p)) throw ArgumentError("p must be a finite value > 1");
}

}  // namespace detail

/// sum over triangles of area * |grad v|^p for the piecewise-linear interpolant.
inline double p_energy(const ScalarField& v, double p) {
  detail::check_p(p);
  return detail::energy_full(v.domain(), v.values(), p, 0.0, nullptr);
}

/// log m_q(v) with lumped quadrature; -inf when v vanishes identically.
inline double log_q_mean(const ScalarField& v, double q) {
  detail::check_q(q);
  return detail::log_q_mean_interior(v.domain(), v.interior(), q);
}

/// m_q(v) = ((1/|Omega|) int |v|^q)^{1/q}.
inline double q_mean(const ScalarField& v, double q) {
  const double l = log_q_mean(v, q);
  return std::isinf(l) ? 0.0 : std::exp(l);
}

/// beta_v and theta_v = e^{beta_v}.
inline MeanValue log_mean(const ScalarField& v) {
  const double b = detail::log_mean_interior(v.domain(), v.interior());
  if (std::isinf(b)) return {0.0, b};
  return {std::exp(b), b};
}

/// E(v) / m_q(v)^p = lambda-quotient times |Omega|^{p/q}.
inline double quotient_q(const ScalarField& v, double p, double q) {
  detail::check_p(p);
  detail::check_q(q);
  const double lm = log_q_mean(v, q);
  if (std::isinf(lm)) throw DegenerateFieldError("q-mean of the field is zero");
  return p_energy(v, p) * std::exp(-p * lm);
}

/// E(v) / theta_v^p; +inf when theta_v = 0.
inline double quotient_log(const ScalarField& v, double p) {
  detail::check_p(p);
  const MeanValue m = log_mean(v);
  if (std::isinf(m.log_value)) return std::numeric_limits<double>::infinity();
  return p_energy(v, p) * std::exp(-p * m.log_value);
}

/// (1/p) E(v) - lam int log|v|; +inf when beta_v = -inf.
inline double energy_J(const ScalarField& v, double p, double lam) {
  detail::check_p(p);
  if (lam < 0.0) throw ArgumentError("energy_J requires lam >= 0");
  const MeanValue m = log_mean(v);
  if (std::isinf(m.log_value)) return std::numeric_limits<double>::infinity();
  return p_energy(v, p) / p - lam * v.domain().volume() * m.log_value;
}

inline double sup_norm(const ScalarField& v) {
  double m = 0.0;
  for (double x : v.values()) m = std::max(m, std::abs(x));
  return m;
}

/// Lumped integral of g(v) over interior nodes.
template <class G>
double lumped_integral(const ScalarField& v, G&& g) {
  const GridDomain& d = v.domain();
  const auto& nodes = d.interior_nodes();
  const auto& w = d.weights();
  double s = 0.0;
  for (std::size_t k = 0; k < nodes.size(); ++k) s += w[k] * g(v[nodes[k]]);
  return s;
}

/// Lumped measure of {v > t}: total weight of interior nodes above t.
inline double lumped_level_set_measure(const ScalarField& v, double t) {
  return lumped_integral(v, [t](double x) { return x > t ? 1.0 : 0.0; });
}

/// Exact measure of {v > t} for the piecewise-linear interpolant.
inline double level_set_measure(const ScalarField& v, double t) {
  const GridDomain& d = v.domain();
  const double area = d.triangle_area();
  double total = 0.0;
  for (const Triangle& tri : d.triangles()) {
    auto n = tri.nodes();
    std::array<double, 3> f{v[n[0]], v[n[1]], v[n[2]]};
    std::sort(f.begin(), f.end());
    const double a = f[0], b = f[1], c = f[2];
    double frac;
    if (t >= c) frac = 0.0;
    else if (t < a) frac = 1.0;
    else if (t < b) frac = 1.0 - (t - a) * (t - a) / ((b - a) * (c - a));
    else frac = (c - t) * (c - t) / ((c - a) * (c - b));
    total += area * frac;
  }
  return total;
}

}  // namespace singmin

#endif  // SINGMIN_FIELD_OPS_HPP
