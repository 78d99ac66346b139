#ifndef SINGMIN_RADIAL_ORACLE_HPP
#define SINGMIN_RADIAL_ORACLE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "singmin/analysis.hpp"
#include "singmin/error.hpp"

namespace singmin {

enum class RadialKind { lambda_q, eigen, singular };

inline std::string to_string(RadialKind k) {
  switch (k) {
    case RadialKind::lambda_q: return "lambda_q";
    case RadialKind::eigen: return "eigen";
    case RadialKind::singular: return "singular";
  }
  return "unknown";
}

/// Radial profile on [0, radius]. The stored profile is the shape with
/// profile[0] = 1; actual values are exp(log_scale) * profile.
struct RadialSolution {
  RadialKind kind = RadialKind::lambda_q;
  int N = 2;
  double p = 2.0;
  double q_or_lam = 1.0;
  double radius = 1.0;
  std::vector<double> grid;
  std::vector<double> profile;
  double log_scale = 0.0;
  double lambda = 0.0;       // lambda_q, lambda_p or the given lam
  double log_lambda = 0.0;
  double mu = 0.0;           // singular only: lam |B| e^{-p beta}
  double log_mean = 0.0;     // beta over the ball
  double sup_norm() const { return std::exp(log_scale); }

  /// Actual value at radius r (linear interpolation; 0 outside).
  double value_at(double r) const { return std::exp(log_scale) * shape_at(r); }

  double shape_at(double r) const {
    if (r < 0.0) r = -r;
    if (r >= grid.back()) return 0.0;
    const auto it = std::upper_bound(grid.begin(), grid.end(), r);
    if (it == grid.begin()) return profile.front();
    const std::size_t j = static_cast<std::size_t>(it - grid.begin());
    const double t = (r - grid[j - 1]) / (grid[j] - grid[j - 1]);
    return profile[j - 1] + t * (profile[j] - profile[j - 1]);
  }
};

namespace detail {

/// One shot of -(r^{N-1}|w'|^{p-2}w')' = lam r^{N-1} g(w), w(0) = a, w'(0) = 0,
/// integrated in tau = log(a/w) until w = a e^{-tau_max}.
struct RadialShot {
  double zero = 0.0;                   // first zero of w
  double int_h = 0.0;                  // int_0^zero t^{N-1} h(w) dt
  double int_log = 0.0;                // int_0^zero t^{N-1} log w dt
  std::vector<double> r, w;            // sampled profile
};

// g(w) = w^{gexp}; h(w) = w^{hexp}
inline RadialShot radial_shot(int N, double p, double lam, double gexp, double hexp, double a,
                              double tol, int samples = 2000) {
  namespace ode = boost::numeric::odeint;
  using State = std::array<double, 4>;  // r, s, I_h, I_log
  const double la = std::log(a);
  const double inv = 1.0 / (p - 1.0);
  auto rhs = [&](const State& x, State& dx, double tau) {
    const double lw = la - tau;
    const double w = std::exp(lw);
    // clamped so that rejected trial steps stay finite
    const double r = std::max(x[0], 0.0);
    const double rn1 = std::pow(r, N - 1);
    const double drdt = w * std::pow(rn1 / std::max(x[1], 1e-300), inv);
    dx[0] = drdt;
    dx[1] = lam * rn1 * std::exp(gexp * lw) * drdt;
    dx[2] = rn1 * std::exp(hexp * lw) * drdt;
    dx[3] = rn1 * lw * drdt;
  };
  const double ga = std::exp(gexp * la);
  // series start w = a - c r^{p/(p-1)}, at the radius where the drop is 1e-8 a
  const double c = (p - 1.0) / p * std::pow(lam * ga / N, inv);
  const double r0 = std::clamp(std::pow(1e-8 * a / c, (p - 1.0) / p), 1e-12, 1e-3);
  const double w0 = a - c * std::pow(r0, p * inv);
  if (!(w0 > 0.0)) throw OracleError("series start left the positive range");
  const double r0n = std::pow(r0, N) / N;
  State x{r0, lam * ga * std::pow(r0, N) / N, std::exp(hexp * la) * r0n, la * r0n};
  const double tau0 = std::log(a / w0);
  const double tau_max = 40.0;
  std::vector<double> times(static_cast<std::size_t>(samples) + 1);
  for (int k = 0; k <= samples; ++k) {
    const double s = static_cast<double>(k) / samples;
    times[static_cast<std::size_t>(k)] = tau0 + (tau_max - tau0) * s * s * s;
  }
  RadialShot shot;
  shot.r.reserve(times.size() + 1);
  shot.w.reserve(times.size() + 1);
  shot.r.push_back(0.0);
  shot.w.push_back(a);
  const double etol = std::clamp(1e-2 * tol, 1e-14, 1e-6);
  auto stepper = ode::make_dense_output(etol, etol, ode::runge_kutta_dopri5<State>());
  bool finite = true;
  try {
    ode::integrate_times(stepper, rhs, x, times.begin(), times.end(), 1e-3 * tau0,
                         [&](const State& s, double tau) {
                           finite = finite && std::isfinite(s[0]) && std::isfinite(s[1]);
                           shot.r.push_back(s[0]);
                           shot.w.push_back(std::exp(la - tau));
                         });
  } catch (const std::exception& e) {
    throw OracleError(std::string("radial integration failed: ") + e.what());
  }
  if (!finite || !(x[0] > 0.0)) throw OracleError("radial integration diverged");
  shot.zero = x[0];
  shot.int_h = x[2];
  shot.int_log = x[3];
  // far into the tail r no longer moves in double precision; keep strictly
  // increasing radii and close the profile at (zero, 0)
  std::size_t kept = 1;
  for (std::size_t k = 1; k < shot.r.size(); ++k) {
    if (shot.r[k] > shot.r[kept - 1] && shot.r[k] < shot.zero * (1.0 - 1e-12)) {
      shot.r[kept] = shot.r[k];
      shot.w[kept] = shot.w[k];
      ++kept;
    }
  }
  shot.r.resize(kept);
  shot.w.resize(kept);
  shot.r.push_back(shot.zero);
  shot.w.push_back(0.0);
  return shot;
}

inline void check_radial_args(int N, double p, double tol) {
  if (N < 2) throw ArgumentError("radial oracle requires N >= 2");
  if (!(p > 1.0)) throw ArgumentError("radial oracle requires p > 1");
  if (!(tol > 0.0)) throw ArgumentError("radial oracle requires tol > 0");
}

/// Shape W(R1 r) on [0, radius], with W(0) = 1.
inline void fill_profile(RadialSolution& sol, const RadialShot& shot, double radius) {
  sol.grid.resize(shot.r.size());
  sol.profile.resize(shot.w.size());
  for (std::size_t k = 0; k < shot.r.size(); ++k) {
    sol.grid[k] = shot.r[k] / shot.zero * radius;
    sol.profile[k] = shot.w[k] / shot.w.front();
  }
  sol.grid.back() = radius;
  sol.radius = radius;
}

}  // namespace detail

/// lambda_q of the ball of the given radius, profile normalized by int w^q = 1.
inline RadialSolution radial_lambda_q(int N, double p, double q, double tol, double radius = 1.0) {
  detail::check_radial_args(N, p, tol);
  if (!(q > 0.0 && q <= 1.0)) throw ArgumentError("radial_lambda_q requires q in (0,1]");
  if (!(radius > 0.0)) throw ArgumentError("radius must be positive");
  const auto shot = detail::radial_shot(N, p, 1.0, q - 1.0, q, 1.0, tol);
  const double lR1 = std::log(shot.zero);
  const double lR = std::log(radius);
  // w(r) = A W(R1 r / R): lambda = A^{p-q} (R1/R)^p, N omega A^q (R/R1)^N J = 1
  const double logA =
      (-std::log(N * unit_ball_volume(N) * shot.int_h) - N * (lR - lR1)) / q;
  RadialSolution sol;
  sol.kind = RadialKind::lambda_q;
  sol.N = N;
  sol.p = p;
  sol.q_or_lam = q;
  detail::fill_profile(sol, shot, radius);
  sol.log_scale = logA;
  sol.log_lambda = (p - q) * logA + p * (lR1 - lR);
  sol.lambda = std::exp(sol.log_lambda);
  sol.log_mean = logA + N * std::pow(shot.zero, -N) * shot.int_log;
  return sol;
}

/// First eigenvalue of the p-Laplacian on the unit ball.
inline double radial_eigen_p(int N, double p, double tol) {
  detail::check_radial_args(N, p, tol);
  const auto shot = detail::radial_shot(N, p, 1.0, p - 1.0, 1.0, 1.0, tol);
  return std::pow(shot.zero, p);
}

/// -Delta_p w = lam / w on the unit ball, by bisection on w(0). The bracket
/// search starts from `start` (default lam^{1/p}).
inline RadialSolution radial_singular(int N, double p, double lam, double tol, double start = 0.0) {
  detail::check_radial_args(N, p, tol);
  if (!(lam > 0.0)) throw ArgumentError("radial_singular requires lam > 0");
  auto zero_of = [&](double a) { return detail::radial_shot(N, p, lam, -1.0, 1.0, a, tol, 64).zero; };
  // the zero grows with w(0); expand a log bracket around 1
  if (start < 0.0) throw ArgumentError("radial_singular start must be positive");
  double lo = std::log(start > 0.0 ? start : std::pow(lam, 1.0 / p)), hi = lo;
  double zlo = zero_of(std::exp(lo)), zhi = zlo;
  for (int k = 0; zlo > 1.0 && k < 200; ++k) {
    hi = lo;
    zhi = zlo;
    lo -= 1.0;
    zlo = zero_of(std::exp(lo));
  }
  for (int k = 0; zhi < 1.0 && k < 200; ++k) {
    lo = hi;
    zlo = zhi;
    hi += 1.0;
    zhi = zero_of(std::exp(hi));
  }
  if (!(zlo <= 1.0 && zhi >= 1.0)) throw OracleError("could not bracket the singular center value");
  for (int k = 0; k < 200 && hi - lo > 0.1 * tol; ++k) {
    const double mid = 0.5 * (lo + hi);
    if (zero_of(std::exp(mid)) > 1.0) hi = mid;
    else lo = mid;
  }
  const double a = std::exp(0.5 * (lo + hi));
  const auto shot = detail::radial_shot(N, p, lam, -1.0, 1.0, a, tol);
  RadialSolution sol;
  sol.kind = RadialKind::singular;
  sol.N = N;
  sol.p = p;
  sol.q_or_lam = lam;
  detail::fill_profile(sol, shot, 1.0);
  sol.log_scale = std::log(a);
  sol.lambda = lam;
  sol.log_lambda = std::log(lam);
  // beta = N int_0^1 r^{N-1} log w(r) dr, with w(r) = W(zero * r)
  sol.log_mean = N * std::pow(shot.zero, -N) * shot.int_log;
  sol.mu = lam * unit_ball_volume(N) * std::exp(-p * sol.log_mean);
  return sol;
}

/// Closed-form center value of the unit-ball singular solution: one unit shot
/// rescaled by homogeneity (independent of the bisection).
inline double radial_singular_center(int N, double p, double lam, double tol) {
  detail::check_radial_args(N, p, tol);
  const auto shot = detail::radial_shot(N, p, 1.0, -1.0, 1.0, 1.0, tol);
  return std::pow(lam, 1.0 / p) / shot.zero;
}

}  // namespace singmin

#endif  // SINGMIN_RADIAL_ORACLE_HPP
