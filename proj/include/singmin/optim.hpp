#ifndef SINGMIN_OPTIM_HPP
#define SINGMIN_OPTIM_HPP

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <memory>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "singmin/error.hpp"
#include "singmin/geometry.hpp"

namespace singmin {

/// Solver knobs shared by every variational solve.
struct SolverConfig {
  double grad_reg = 1e-8;     // delta, used only when p < 2
  double eps_rel = 1e-6;      // positivity floor relative to the sup norm
  double tol_rel = 1e-10;     // predicted-decrease stopping threshold
  int max_iter = 5000;
  int multistart = 4;
  unsigned long long seed = 12345;
  int workers = 1;
  int lbfgs_memory = 12;

  void validate() const {
    if (!(grad_reg >= 0.0)) throw ArgumentError("grad_reg must be >= 0");
    if (!(eps_rel > 0.0 && eps_rel < 1e-2)) throw ArgumentError("eps_rel must lie in (0, 1e-2)");
    if (!(tol_rel > 0.0)) throw ArgumentError("tol_rel must be positive");
    if (max_iter < 1) throw ArgumentError("max_iter must be >= 1");
    if (multistart < 1) throw ArgumentError("multistart must be >= 1");
    if (workers < 1) throw ArgumentError("workers must be >= 1");
    if (lbfgs_memory < 1) throw ArgumentError("lbfgs_memory must be >= 1");
  }

  double delta_for(double p) const { return p < 2.0 ? grad_reg : 0.0; }
};

/// P1 stiffness matrix of the Dirichlet Laplacian on interior unknowns.
inline Eigen::SparseMatrix<double> stiffness_matrix(const GridDomain& d) {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(d.triangles().size() * 8);
  const double c = d.triangle_area() / (d.h() * d.h());
  auto add_pair = [&](int plus, int minus) {
    const int a = d.unknown_of(plus);
    const int b = d.unknown_of(minus);
    if (a >= 0) trip.emplace_back(a, a, c);
    if (b >= 0) trip.emplace_back(b, b, c);
    if (a >= 0 && b >= 0) {
      trip.emplace_back(a, b, -c);
      trip.emplace_back(b, a, -c);
    }
  };
  for (const Triangle& t : d.triangles()) {
    add_pair(t.xp, t.xm);
    add_pair(t.yp, t.ym);
  }
  const int n = d.interior_count();
  Eigen::SparseMatrix<double> K(n, n);
  K.setFromTriplets(trip.begin(), trip.end());
  return K;
}

/// Factored stiffness matrix, shareable across solves on one domain.
class LaplacianPreconditioner {
public:
  explicit LaplacianPreconditioner(const GridDomain& d) {
    solver_.compute(stiffness_matrix(d));
    if (solver_.info() != Eigen::Success) throw SolverDefectError("stiffness factorization failed");
  }
  Eigen::VectorXd apply(const Eigen::VectorXd& r) const { return solver_.solve(r); }

private:
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver_;
};

using Objective = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd*)>;

struct DescentOptions {
  double tol = 1e-10;
  /// stop when -g.d <= tol * (relative_stop ? max(|f|, abs_scale) : abs_scale)
  bool relative_stop = false;
  double abs_scale = 1.0;
  int max_iter = 5000;
  int memory = 12;
  /// nonzero: reject steps taking any entry below floor_rel * max|x|
  double floor_rel = 0.0;
  /// rescale x by 1/c after each step (0-homogeneous objectives); returns c
  std::function<double(const Eigen::VectorXd&)> normalizer;
  /// observer called after each accepted step with (iteration, x, f)
  std::function<void(int, const Eigen::VectorXd&, double)> on_step;
};

struct DescentResult {
  Eigen::VectorXd x;
  double f = 0.0;
  int iterations = 0;
  bool converged = false;
  double last_decrease = 0.0;
};

/// Preconditioned limited-memory BFGS with Armijo backtracking.
inline DescentResult minimize_lbfgs(const Objective& fun, Eigen::VectorXd x,
                                    const LaplacianPreconditioner& pre, const DescentOptions& opt) {
  const double c1 = 1e-4;
  Eigen::VectorXd g;
  if (opt.normalizer) {
    const double c = opt.normalizer(x);
    if (!(c > 0.0) || !std::isfinite(c)) throw DegenerateFieldError("initial iterate cannot be normalized");
    x /= c;
  }
  double f = fun(x, &g);
  if (!std::isfinite(f)) throw DegenerateFieldError("objective is not finite at the initial iterate");

  std::deque<Eigen::VectorXd> S, Y;
  std::deque<double> rho;
  double gamma = 1.0;
  DescentResult res;
  int fails = 0;

  for (int it = 0; it < opt.max_iter; ++it) {
    // two-loop recursion with H0 = gamma K^{-1}
    Eigen::VectorXd q = g;
    const int m = static_cast<int>(S.size());
    std::vector<double> alpha(static_cast<std::size_t>(m));
    for (int i = m - 1; i >= 0; --i) {
      alpha[i] = rho[i] * S[i].dot(q);
      q -= alpha[i] * Y[i];
    }
    Eigen::VectorXd r = gamma * pre.apply(q);
    for (int i = 0; i < m; ++i) {
      const double beta = rho[i] * Y[i].dot(r);
      r += S[i] * (alpha[i] - beta);
    }
    Eigen::VectorXd d = -r;
    double gd = g.dot(d);
    if (!(gd < 0.0)) {
      S.clear();
      Y.clear();
      rho.clear();
      d = -gamma * pre.apply(g);
      gd = g.dot(d);
      if (!(gd < 0.0)) {
        res.converged = true;
        res.last_decrease = 0.0;
        break;
      }
    }
    const double scale = opt.relative_stop ? std::max(std::abs(f), opt.abs_scale) : opt.abs_scale;
    res.last_decrease = -gd;
    if (-gd <= opt.tol * scale) {
      res.converged = true;
      break;
    }

    double step = 1.0;
    if (opt.floor_rel > 0.0) {
      const double floor = opt.floor_rel * x.cwiseAbs().maxCoeff();
      for (Eigen::Index k = 0; k < x.size(); ++k) {
        if (d[k] < 0.0) step = std::min(step, 0.99 * (x[k] - floor) / -d[k]);
      }
      step = std::max(step, 0.0);
    }
    Eigen::VectorXd xn, gn;
    double fn = 0.0;
    bool accepted = false;
    for (int bt = 0; bt < 60 && step > 0.0; ++bt) {
      xn = x + step * d;
      fn = fun(xn, &gn);
      if (std::isfinite(fn) && fn <= f + c1 * step * gd) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      // rounding floor reached or the curvature pairs misled us: restart once
      if (++fails >= 2 || S.empty()) {
        res.converged = -gd <= 1e3 * opt.tol * scale;
        break;
      }
      S.clear();
      Y.clear();
      rho.clear();
      continue;
    }
    fails = 0;
    Eigen::VectorXd s = xn - x;
    Eigen::VectorXd y = gn - g;
    x = std::move(xn);
    g = std::move(gn);
    f = fn;
    if (opt.normalizer) {
      const double c = opt.normalizer(x);
      if (c > 0.0 && std::isfinite(c)) {
        x /= c;
        g *= c;
        s /= c;
        y *= c;
        for (auto& v : S) v /= c;
        for (auto& v : Y) v *= c;
      }
    }
    const double sy = s.dot(y);
    if (sy > 0.0) {
      const Eigen::VectorXd Ky = pre.apply(y);
      gamma = sy / y.dot(Ky);
      S.push_back(std::move(s));
      Y.push_back(std::move(y));
      rho.push_back(1.0 / sy);
      if (static_cast<int>(S.size()) > opt.memory) {
        S.pop_front();
        Y.pop_front();
        rho.pop_front();
      }
    }
    res.iterations = it + 1;
    if (opt.on_step) opt.on_step(it + 1, x, f);
  }
  res.x = std::move(x);
  res.f = f;
  return res;
}

}  // namespace singmin

#endif  // SINGMIN_OPTIM_HPP
