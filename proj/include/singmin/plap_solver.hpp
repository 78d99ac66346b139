#ifndef SINGMIN_PLAP_SOLVER_HPP
#define SINGMIN_PLAP_SOLVER_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <thread>
#include <vector>

#include <Eigen/Core>

#include "singmin/analysis.hpp"
#include "singmin/error.hpp"
#include "singmin/field.hpp"
#include "singmin/field_ops.hpp"
#include "singmin/geometry.hpp"
#include "singmin/optim.hpp"
#include "singmin/radial_oracle.hpp"

namespace singmin {

struct MinimizerResult {
  ScalarField field;
  double objective = 0.0;
  int iterations = 0;
  int restarts_agreeing = 0;
  /// log of lambda_q (or of mu); objective = exp(log_value) * |Omega|^{p/q} for lambda_q
  double log_value = 0.0;
  /// the minimizer normalized to int u^q = 1 is exp(log_scale) * field
  double log_scale = 0.0;
  std::vector<double> restart_objectives;
  std::vector<ScalarField> restart_fields;
};

/// Per-domain cache: the factored stiffness matrix and torsion functions.
class SolverWorkspace {
public:
  explicit SolverWorkspace(DomainPtr domain)
      : domain_(std::move(domain)), pre_(std::make_shared<LaplacianPreconditioner>(*domain_)) {}

  const DomainPtr& domain() const noexcept { return domain_; }
  const LaplacianPreconditioner& preconditioner() const noexcept { return *pre_; }

  /// Torsion function for p, computed once.
  const ScalarField& torsion(double p, const SolverConfig& cfg);

private:
  DomainPtr domain_;
  std::shared_ptr<LaplacianPreconditioner> pre_;
  std::mutex mutex_;
  std::map<double, ScalarField> torsion_;
};

/// Optional knobs for one minimization.
struct MinimizeOptions {
  std::shared_ptr<SolverWorkspace> workspace;
  /// replaces the torsion seed for restart 0 (warm start)
  std::optional<ScalarField> initial;
  std::function<void(int, const Eigen::VectorXd&, double)> observer;
};

namespace detail {

/// Exact P1 load vector for int v: a third of each incident triangle.
inline Eigen::VectorXd p1_load(const GridDomain& d) {
  Eigen::VectorXd b = Eigen::VectorXd::Zero(d.interior_count());
  const double share = d.triangle_area() / 3.0;
  for (const Triangle& t : d.triangles()) {
    for (int v : t.nodes()) {
      const int k = d.unknown_of(v);
      if (k >= 0) b[k] += share;
    }
  }
  return b;
}

inline ScalarField torsion_solve(const DomainPtr& domain, const LaplacianPreconditioner& pre, double p,
                                 const SolverConfig& cfg) {
  const GridDomain& d = *domain;
  const Eigen::VectorXd b = p1_load(d);
  const double delta = cfg.delta_for(p);
  Objective f = [&](const Eigen::VectorXd& x, Eigen::VectorXd* g) {
    const double e = energy_interior(d, x, p, delta, g);
    if (g) *g = *g / p - b;
    return e / p - b.dot(x);
  };
  // p = 2 solution, rescaled by the exact 1-D optimum along its ray
  Eigen::VectorXd x = pre.apply(b);
  const double e0 = energy_interior(d, x, p, delta, nullptr);
  x *= std::pow(b.dot(x) / e0, 1.0 / (p - 1.0));
  DescentOptions opt;
  opt.tol = cfg.tol_rel;
  opt.relative_stop = true;
  opt.max_iter = cfg.max_iter;
  opt.memory = cfg.lbfgs_memory;
  auto res = minimize_lbfgs(f, x, pre, opt);
  ScalarField u = ScalarField::from_interior(domain, res.x);
  if (!res.converged) throw ConvergenceError("torsion solve did not converge", u.values());
  for (int n : d.interior_nodes()) {
    if (!(u[n] > 0.0)) throw SolverDefectError("torsion function is not positive in the interior");
  }
  return u;
}

/// log E - p log m_q (q > 0) or log E - p beta (q == 0), with gradient.
inline Objective log_quotient_objective(const GridDomain& d, double p, double q, double delta) {
  return [&d, p, q, delta](const Eigen::VectorXd& x, Eigen::VectorXd* g) {
    if (x.minCoeff() <= 0.0) return std::numeric_limits<double>::infinity();
    Eigen::VectorXd ge;
    const double e = energy_interior(d, x, p, delta, g ? &ge : nullptr);
    if (!(e > 0.0)) return std::numeric_limits<double>::infinity();
    const auto& w = d.weights();
    const double V = d.volume();
    double lm;
    if (q > 0.0) lm = log_q_mean_interior(d, x, q);
    else lm = log_mean_interior(d, x);
    if (g) {
      *g = ge / e;
      const double lS = std::log(V) + q * lm;  // log sum w x^q
      for (Eigen::Index k = 0; k < x.size(); ++k) {
        const double wk = w[static_cast<std::size_t>(k)];
        (*g)[k] -= p * wk * std::exp((q - 1.0) * std::log(x[k]) - lS);
      }
    }
    return std::log(e) - p * lm;
  };
}

inline std::vector<Eigen::VectorXd> multistart_seeds(const DomainPtr& domain, const Eigen::VectorXd& base,
                                                     const SolverConfig& cfg) {
  std::vector<Eigen::VectorXd> seeds;
  seeds.push_back(base);
  const auto& nodes = domain->interior_nodes();
  for (int k = 1; k < cfg.multistart; ++k) {
    std::mt19937_64 rng(cfg.seed + static_cast<unsigned long long>(k));
    const ScalarField noise = smooth_noise(domain, rng);
    Eigen::VectorXd x = base;
    for (std::size_t j = 0; j < nodes.size(); ++j)
      x[static_cast<Eigen::Index>(j)] *= std::exp(0.5 * noise[nodes[j]]);
    seeds.push_back(std::move(x));
  }
  return seeds;
}

/// Runs job(i) for i in [0, n) on up to `workers` threads; results stay indexed.
template <class Job>
void run_indexed(int n, int workers, Job&& job) {
  workers = std::max(1, std::min(workers, n));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) job(i);
    return;
  }
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (int i = w; i < n; i += workers) {
        try {
          job(i);
        } catch (...) {
          errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

/// Shared driver for the two 0-homogeneous quotients (q == 0 selects the log-mean).
inline MinimizerResult minimize_log_quotient(const DomainPtr& domain, double p, double q,
                                             const SolverConfig& cfg, const MinimizeOptions& mo) {
  cfg.validate();
  auto ws = mo.workspace ? mo.workspace : std::make_shared<SolverWorkspace>(domain);
  if (ws->domain().get() != domain.get()) throw ArgumentError("workspace belongs to another domain");
  const GridDomain& d = *domain;
  Eigen::VectorXd base = mo.initial ? mo.initial->interior() : ws->torsion(p, cfg).interior();
  if (base.minCoeff() <= 0.0) throw DegenerateFieldError("initial field must be positive in the interior");
  const auto seeds = multistart_seeds(domain, base, cfg);
  const Objective f = log_quotient_objective(d, p, q, cfg.delta_for(p));
  DescentOptions opt;
  opt.tol = cfg.tol_rel;
  opt.max_iter = cfg.max_iter;
  opt.memory = cfg.lbfgs_memory;
  opt.floor_rel = cfg.eps_rel;
  if (q > 0.0) opt.normalizer = [&d, q](const Eigen::VectorXd& x) { return std::exp(log_q_mean_interior(d, x, q)); };
  else opt.normalizer = [&d](const Eigen::VectorXd& x) { return std::exp(log_mean_interior(d, x)); };
  opt.on_step = mo.observer;

  const int n = static_cast<int>(seeds.size());
  std::vector<DescentResult> runs(static_cast<std::size_t>(n));
  run_indexed(n, cfg.workers, [&](int i) {
    runs[static_cast<std::size_t>(i)] = minimize_lbfgs(f, seeds[static_cast<std::size_t>(i)],
                                                       ws->preconditioner(), opt);
  });

  int best = -1;
  for (int i = 0; i < n; ++i) {
    const auto& r = runs[static_cast<std::size_t>(i)];
    if (!r.converged) continue;
    if (best < 0 || r.f < runs[static_cast<std::size_t>(best)].f) best = i;
  }
  if (best < 0) {
    throw ConvergenceError("no restart converged within max_iter",
                           ScalarField::from_interior(domain, runs[0].x).values());
  }
  MinimizerResult out;
  const double fbest = runs[static_cast<std::size_t>(best)].f;
  for (int i = 0; i < n; ++i) {
    const auto& r = runs[static_cast<std::size_t>(i)];
    out.restart_objectives.push_back(std::exp(r.f));
    out.restart_fields.push_back(ScalarField::from_interior(domain, r.x));
    if (r.converged && std::abs(std::expm1(r.f - fbest)) <= 10.0 * cfg.tol_rel) ++out.restarts_agreeing;
    out.iterations += r.iterations;
  }
  if (n > 1 && out.restarts_agreeing < 2)
    throw NonuniquenessError("multistart minimizers disagree beyond 10*tol_rel");
  out.field = out.restart_fields[static_cast<std::size_t>(best)];
  out.objective = std::exp(fbest);
  const double logV = std::log(d.volume());
  if (q > 0.0) {
    out.log_value = fbest - p / q * logV;
    out.log_scale = -logV / q;
  } else {
    out.log_value = fbest;
    out.log_scale = 0.0;
  }
  return out;
}

}  // namespace detail

inline const ScalarField& SolverWorkspace::torsion(double p, const SolverConfig& cfg) {
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = torsion_.find(p);
  if (it == torsion_.end()) it = torsion_.emplace(p, detail::torsion_solve(domain_, *pre_, p, cfg)).first;
  return it->second;
}

/// Minimizer of (1/p) int |grad v|^p - int v over dirichlet fields.
inline ScalarField solve_torsion(const DomainPtr& domain, double p, const SolverConfig& cfg = {}) {
  detail::check_p(p);
  cfg.validate();
  LaplacianPreconditioner pre(*domain);
  return detail::torsion_solve(domain, pre, p, cfg);
}

/// Minimizer of the q-quotient. The field is normalized to m_q = 1; objective
/// is lambda_q |Omega|^{p/q}, log_value is log lambda_q.
inline MinimizerResult minimize_lambda_q(const DomainPtr& domain, double p, double q,
                                         const SolverConfig& cfg = {}, const MinimizeOptions& mo = {}) {
  detail::check_p(p);
  detail::check_q(q);
  return detail::minimize_log_quotient(domain, p, q, cfg, mo);
}

/// Minimizer of the log-quotient: objective mu(Omega), field with theta = 1.
inline MinimizerResult minimize_mu(const DomainPtr& domain, double p, const SolverConfig& cfg = {},
                                   const MinimizeOptions& mo = {}) {
  detail::check_p(p);
  return detail::minimize_log_quotient(domain, p, 0.0, cfg, mo);
}

/// lambda_p(B_1) cache feeding C_{N,p} and K_{N,p} for planar domains.
inline double planar_linfty_constant(double p) {
  static std::mutex m;
  static std::map<double, double> cache;
  std::lock_guard<std::mutex> lock(m);
  auto it = cache.find(p);
  if (it != cache.end()) return it->second;
  const double C = poincare_constant(2, p, radial_eigen_p(2, p, 1e-10));
  return cache[p] = linfty_constant(2, p, C);
}

/// Bracket constants for the singular solution at level lam (N = 2).
struct SingularBrackets {
  double lower_coef = 0.0;  // u >= lower_coef * phi_p
  double upper = 0.0;       // u <= upper
};

inline SingularBrackets singular_brackets(double volume, double p, double lam) {
  const int N = 2;
  const double K = planar_linfty_constant(p);
  const double kv = K * std::pow(volume, 1.0 / N);
  SingularBrackets b;
  b.lower_coef = std::pow(kv, -1.0 / (p - 1.0)) * std::pow(lam, 1.0 / p);
  b.upper = kv * std::pow(lam, 1.0 / p);
  return b;
}

struct SingularResult {
  ScalarField field;
  int iterations = 0;
  /// max over interior nodes of |dJ/du_i| / (lam w_i / u_i)
  double residual = 0.0;
  SingularBrackets brackets;
};

/// Positive solution of -Delta_p u = lam / u, as the minimizer of the convex
/// functional (1/p) int |grad u|^p - lam int log u.
inline SingularResult solve_singular_detailed(const DomainPtr& domain, double p, double lam,
                                              const SolverConfig& cfg = {}, const MinimizeOptions& mo = {}) {
  detail::check_p(p);
  if (!(lam > 0.0)) throw ArgumentError("solve_singular requires lam > 0");
  cfg.validate();
  auto ws = mo.workspace ? mo.workspace : std::make_shared<SolverWorkspace>(domain);
  const GridDomain& d = *domain;
  const ScalarField& phi = ws->torsion(p, cfg);
  SingularResult out;
  out.brackets = singular_brackets(d.volume(), p, lam);
  Eigen::VectorXd x0 = mo.initial ? mo.initial->interior() : Eigen::VectorXd(out.brackets.lower_coef * phi.interior());
  const auto& w = d.weights();
  const double delta = cfg.delta_for(p);
  Objective f = [&](const Eigen::VectorXd& x, Eigen::VectorXd* g) {
    if (x.minCoeff() <= 0.0) return std::numeric_limits<double>::infinity();
    const double e = detail::energy_interior(d, x, p, delta, g);
    double slog = 0.0;
    for (Eigen::Index k = 0; k < x.size(); ++k) slog += w[static_cast<std::size_t>(k)] * std::log(x[k]);
    if (g) {
      *g /= p;
      for (Eigen::Index k = 0; k < x.size(); ++k) (*g)[k] -= lam * w[static_cast<std::size_t>(k)] / x[k];
    }
    return e / p - lam * slog;
  };
  DescentOptions opt;
  opt.tol = cfg.tol_rel;
  opt.relative_stop = true;
  opt.abs_scale = lam * d.volume() / p;
  opt.max_iter = cfg.max_iter;
  opt.memory = cfg.lbfgs_memory;
  opt.floor_rel = cfg.eps_rel;
  opt.on_step = mo.observer;
  auto res = minimize_lbfgs(f, x0, ws->preconditioner(), opt);
  out.field = ScalarField::from_interior(domain, res.x);
  out.iterations = res.iterations;
  if (!res.converged) throw ConvergenceError("singular solve did not converge", out.field.values());
  Eigen::VectorXd g;
  f(res.x, &g);
  for (Eigen::Index k = 0; k < g.size(); ++k) {
    const double force = lam * w[static_cast<std::size_t>(k)] / res.x[k];
    out.residual = std::max(out.residual, std::abs(g[k]) / force);
  }
  const double slack = 0.01;
  for (int n : d.interior_nodes()) {
    const double u = out.field[n];
    if (u < (1.0 - slack) * out.brackets.lower_coef * phi[n] || u > (1.0 + slack) * out.brackets.upper)
      throw SolverDefectError("singular solution violates its analytic bracket");
  }
  return out;
}

inline ScalarField solve_singular(const DomainPtr& domain, double p, double lam, const SolverConfig& cfg = {},
                                  const MinimizeOptions& mo = {}) {
  return solve_singular_detailed(domain, p, lam, cfg, mo).field;
}

/// (lam |Omega| / mu)^{1/p} u for a theta-normalized u.
inline ScalarField rescale_to_lambda(const ScalarField& u, double mu, double lam, double volume, double p) {
  if (!(mu > 0.0) || !(lam > 0.0) || !(volume > 0.0)) throw ArgumentError("mu, lam and volume must be positive");
  detail::check_p(p);
  const MeanValue m = log_mean(u);
  if (!(std::abs(m.log_value) <= 1e-8)) throw ArgumentError("rescale_to_lambda requires |beta_u| <= 1e-8");
  return u.scaled(std::pow(lam * volume / mu, 1.0 / p));
}

/// lam |Omega| e^{-p beta(u_lam)}.
inline double mu_from_singular(const ScalarField& u_lam, double lam, double p, double volume) {
  const MeanValue m = log_mean(u_lam);
  if (std::isinf(m.log_value)) throw DegenerateFieldError("log-mean of the singular solution is -inf");
  return lam * volume * std::exp(-p * m.log_value);
}

}  // namespace singmin

#endif  // SINGMIN_PLAP_SOLVER_HPP
