#ifndef SINGMIN_ANALYSIS_HPP
#define SINGMIN_ANALYSIS_HPP

#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "singmin/error.hpp"
#include "singmin/quadrature.hpp"

namespace singmin {

/// A named closed-form constant with the inputs it was evaluated at.
struct ConstantReport {
  std::string name;
  double value = 0.0;
  std::map<std::string, double> inputs;
  std::string provenance;
};

// --------------------------------------------------------------------------
// Gamma function: Lanczos approximation, g = 7, 9 coefficients.

namespace detail {
inline constexpr double kLanczosG = 7.0;
inline constexpr std::array<double, 9> kLanczosCoef{
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};
}  // namespace detail

/// log|Gamma(x)| for x > 0.
inline double lanczos_lgamma(double x) {
  if (!(x > 0.0)) throw ArgumentError("lanczos_lgamma requires x > 0");
  if (x < 0.5) {
    // reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
    return std::log(std::numbers::pi / std::sin(std::numbers::pi * x)) - lanczos_lgamma(1.0 - x);
  }
  const double z = x - 1.0;
  double sum = detail::kLanczosCoef[0];
  for (int i = 1; i < 9; ++i) sum += detail::kLanczosCoef[i] / (z + i);
  const double t = z + detail::kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t + std::log(sum);
}

inline double lanczos_gamma(double x) {
  if (x < 0.5) {
    return std::numbers::pi / (std::sin(std::numbers::pi * x) * lanczos_gamma(1.0 - x));
  }
  const double z = x - 1.0;
  double sum = detail::kLanczosCoef[0];
  for (int i = 1; i < 9; ++i) sum += detail::kLanczosCoef[i] / (z + i);
  const double t = z + detail::kLanczosG + 0.5;
  return std::sqrt(2.0 * std::numbers::pi) * std::pow(t, z + 0.5) * std::exp(-t) * sum;
}

// --------------------------------------------------------------------------

/// omega_N = |B_1| in R^N.
inline double unit_ball_volume(int N) {
  if (N < 1) throw ArgumentError("dimension must be positive");
  return std::exp(0.5 * N * std::log(std::numbers::pi) - lanczos_lgamma(0.5 * N + 1.0));
}

inline double harmonic_number(int N) {
  double s = 0.0;
  for (int k = N; k >= 1; --k) s += 1.0 / k;
  return s;
}

/// e^{-(1 + 1/2 + ... + 1/N)}: the q -> 0 limit of the cone moment.
inline double harmonic_limit(int N) {
  if (N < 2) throw ArgumentError("harmonic_limit requires N >= 2");
  return std::exp(-harmonic_number(N));
}

/// (int_0^1 (1 - t^{1/q})^N dt)^{1/q}. The complement 1 - inner is integrated
/// so that the 1/q power keeps full relative accuracy for small q.
inline double cone_moment(double q, int N) {
  if (!(q > 0.0 && q <= 1.0)) throw ArgumentError("cone_moment requires q in (0,1]");
  if (N < 1) throw ArgumentError("cone_moment requires N >= 1");
  auto complement = [q, N](double t) {
    if (t <= 0.0) return 0.0;
    const double x = std::exp(std::log(t) / q);
    if (x >= 1.0) return 1.0;
    return -std::expm1(N * std::log1p(-x));
  };
  const auto r = integrate(complement, 0.0, 1.0, 1e-14, 0.0);
  return std::exp(std::log1p(-r.value) / q);
}

/// I(N) = N int_0^1 (1-tau)^{N-1} ln(tau) d tau, via tau = e^{-s} on [0, 60].
inline double log_moment_I(int N) {
  if (N < 2) throw ArgumentError("log_moment_I requires N >= 2");
  auto integrand = [N](double s) {
    const double one_minus = -std::expm1(-s);
    return -s * std::exp(-s) * std::pow(one_minus, N - 1);
  };
  const auto r = integrate(integrand, 0.0, 60.0, 1e-14, 0.0);
  return N * r.value;
}

/// Best Sobolev constant S_{N,p}, valid for 1 < p < N.
inline double sobolev_constant(int N, double p) {
  if (!(p > 1.0) || !(p < N)) throw ArgumentError("sobolev_constant requires 1 < p < N");
  const double Nd = N;
  const double log_ratio = lanczos_lgamma(Nd / p) + lanczos_lgamma(1.0 + Nd - Nd / p) -
                           lanczos_lgamma(1.0 + 0.5 * Nd) - lanczos_lgamma(Nd);
  return std::pow(std::numbers::pi, 0.5 * p) * Nd * std::pow((Nd - p) / (p - 1.0), p - 1.0) *
         std::exp(p / Nd * log_ratio);
}

/// p-torsion function of B_R at radius r.
inline double ball_torsion(int N, double p, double R, double r) {
  if (!(p > 1.0)) throw ArgumentError("ball_torsion requires p > 1");
  if (!(R > 0.0)) throw ArgumentError("ball_torsion requires R > 0");
  if (r < 0.0 || r > R) throw ArgumentError("ball_torsion requires 0 <= r <= R");
  const double e = p / (p - 1.0);
  return (p - 1.0) / p * std::pow(static_cast<double>(N), -1.0 / (p - 1.0)) *
         (std::pow(R, e) - std::pow(r, e));
}

/// ||phi_{p,B_R}||_1 in closed form.
inline double ball_torsion_l1(int N, double p, double R) {
  if (!(p > 1.0) || !(R > 0.0)) throw ArgumentError("ball_torsion_l1 requires p > 1, R > 0");
  const double e = p / (p - 1.0);
  return std::pow(static_cast<double>(N), -1.0 / (p - 1.0)) * unit_ball_volume(N) *
         std::pow(R, N + e) / (N + e);
}

/// lambda_1(B_R) = ||phi_{p,B_R}||_1^{1-p}.
inline double lambda1_ball(int N, double p, double R) {
  return std::pow(ball_torsion_l1(N, p, R), 1.0 - p);
}

/// C_{N,p} = lambda_p(B_1) omega_N^{p/N}.
inline double poincare_constant(int N, double p, double lambda_p_B1) {
  if (!(lambda_p_B1 > 0.0)) throw ArgumentError("poincare_constant requires lambda_p(B_1) > 0");
  return lambda_p_B1 * std::pow(unit_ball_volume(N), p / N);
}

/// The q-dependent factor whose supremum over [0,1] defines K_{N,p}.
inline double linfty_integrand(int N, double p, double C_Np, double q) {
  const double Nd = N;
  return std::pow(C_Np, -1.0 / (p - q)) *
         std::pow((p + Nd * (p - q)) / p, (p + Nd * (p - 1.0)) / (Nd * (p - q)));
}

/// K_{N,p}: golden-section search on [0,1] refined to 1e-10, compared against
/// both endpoints.
inline double linfty_constant(int N, double p, double C_Np) {
  if (!(C_Np > 0.0)) throw ArgumentError("linfty_constant requires C_{N,p} > 0");
  if (!(p > 1.0)) throw ArgumentError("linfty_constant requires p > 1");
  auto f = [&](double q) { return linfty_integrand(N, p, C_Np, q); };
  const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = 0.0, b = 1.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > 1e-10) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return std::max({f(0.0), f(1.0), f(0.5 * (a + b))});
}

/// Explicit lower bound N (N + p/(p-1))^{p-1} omega_N^{p/N} |Omega|^{1-p/N} for mu.
inline double mu_lower_bound(int N, double p, double volume) {
  if (!(volume > 0.0)) throw ArgumentError("mu_lower_bound requires a positive volume");
  const double Nd = N;
  return Nd * std::pow(Nd + p / (p - 1.0), p - 1.0) * std::pow(unit_ball_volume(N), p / Nd) *
         std::pow(volume, 1.0 - p / Nd);
}

/// lambda_q of the ball with the given volume, from lambda_q(B_1).
inline double ball_lambda_q(double lambda_q_B1, double volume, int N, double p, double q) {
  if (!(lambda_q_B1 > 0.0) || !(volume > 0.0) || !(q > 0.0) || !(p > 0.0))
    throw ArgumentError("ball_lambda_q requires positive inputs");
  const double Nd = N;
  return lambda_q_B1 * std::pow(volume / unit_ball_volume(N), 1.0 - p / Nd - p / q);
}

/// log of ball_lambda_q; finite where the power itself would over/underflow.
inline double ball_log_lambda_q(double log_lambda_q_B1, double volume, int N, double p, double q) {
  if (!(volume > 0.0) || !(q > 0.0)) throw ArgumentError("ball_log_lambda_q requires positive inputs");
  const double Nd = N;
  return log_lambda_q_B1 + (1.0 - p / Nd - p / q) * std::log(volume / unit_ball_volume(N));
}

/// C_{N,p,|Omega|}: reciprocal of mu_lower_bound.
inline double logsob_explicit_constant(int N, double p, double volume) {
  if (!(volume > 0.0)) throw ArgumentError("logsob_explicit_constant requires a positive volume");
  const double Nd = N;
  return 1.0 / Nd * std::pow(Nd + p / (p - 1.0), 1.0 - p) * std::pow(unit_ball_volume(N), -p / Nd) *
         std::pow(volume, p / Nd - 1.0);
}

/// The closed-form constants for (N, p, |Omega|). lambda_p_B1 feeds C and K;
/// pass 0 to skip those two. S_{N,p} is included only when 1 < p < N.
inline std::vector<ConstantReport> constant_reports(int N, double p, double volume, double lambda_p_B1 = 0.0) {
  const std::map<std::string, double> in{{"N", static_cast<double>(N)}, {"p", p}, {"volume", volume}};
  std::vector<ConstantReport> out;
  out.push_back({"omega_N", unit_ball_volume(N), {{"N", static_cast<double>(N)}}, "pi^{N/2} / Gamma(N/2 + 1)"});
  out.push_back({"harmonic_sum", harmonic_number(N), {{"N", static_cast<double>(N)}}, "1 + 1/2 + ... + 1/N"});
  out.push_back({"I_N", log_moment_I(N), {{"N", static_cast<double>(N)}}, "N int_0^1 (1-t)^{N-1} ln t dt"});
  if (p > 1.0 && p < N)
    out.push_back({"S_Np", sobolev_constant(N, p), {{"N", static_cast<double>(N)}, {"p", p}}, "best Sobolev constant"});
  if (lambda_p_B1 > 0.0) {
    const double C = poincare_constant(N, p, lambda_p_B1);
    out.push_back({"C_Np", C, {{"N", static_cast<double>(N)}, {"p", p}, {"lambda_p_B1", lambda_p_B1}},
                   "lambda_p(B_1) omega_N^{p/N}"});
    out.push_back({"K_Np", linfty_constant(N, p, C), {{"N", static_cast<double>(N)}, {"p", p}, {"C_Np", C}},
                   "sup_q C^{-1/(p-q)} ((p+N(p-q))/p)^{(p+N(p-1))/(N(p-q))}"});
  }
  out.push_back({"mu_lower_bound", mu_lower_bound(N, p, volume), in,
                 "N (N + p/(p-1))^{p-1} omega_N^{p/N} |Omega|^{1-p/N}"});
  out.push_back({"C_Np_volume", logsob_explicit_constant(N, p, volume), in, "1 / mu_lower_bound"});
  return out;
}

}  // namespace singmin

#endif  // SINGMIN_ANALYSIS_HPP
