#include <cmath>
#include <numbers>
#include <random>

#include "catch_amalgamated.hpp"

#include "singmin/analysis.hpp"

using namespace singmin;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

constexpr double pi = std::numbers::pi;

// Beta-function form of the inner cone integral: int_0^1 (1 - t^{1/q})^N dt
// = Gamma(q+1) N! / Gamma(N+q+1).
double cone_moment_beta(double q, int N) {
  const double inner = std::exp(std::lgamma(q + 1.0) + std::lgamma(N + 1.0) - std::lgamma(N + q + 1.0));
  return std::pow(inner, 1.0 / q);
}

}  // namespace

TEST_CASE("Lanczos gamma matches the standard library", "[analysis]") {
  for (double x : {0.1, 0.5, 1.0, 1.5, 2.5, 3.7, 10.0, 25.3}) {
    CHECK_THAT(lanczos_gamma(x), WithinRel(std::tgamma(x), 1e-12));
    CHECK_THAT(lanczos_lgamma(x), WithinAbs(std::lgamma(x), 1e-12 * std::max(1.0, std::abs(std::lgamma(x)))));
  }
  CHECK_THROWS_AS(lanczos_lgamma(0.0), ArgumentError);
}

TEST_CASE("unit ball volumes", "[analysis]") {
  CHECK_THAT(unit_ball_volume(2), WithinRel(pi, 1e-13));
  CHECK_THAT(unit_ball_volume(3), WithinRel(4.0 * pi / 3.0, 1e-13));
  CHECK_THAT(unit_ball_volume(4), WithinRel(pi * pi / 2.0, 1e-13));
}

TEST_CASE("harmonic_limit", "[analysis]") {
  CHECK_THAT(harmonic_limit(2), WithinAbs(0.2231302, 1e-7));
  CHECK_THAT(harmonic_limit(3), WithinAbs(std::exp(-11.0 / 6.0), 1e-15));
  CHECK_THAT(harmonic_limit(3), WithinAbs(0.1598797, 1e-7));
  CHECK(harmonic_limit(3) < harmonic_limit(2));
  CHECK_THROWS_AS(harmonic_limit(1), ArgumentError);
}

TEST_CASE("cone_moment closed forms and limit", "[analysis]") {
  CHECK_THAT(cone_moment(1.0, 2), WithinAbs(1.0 / 3.0, 1e-13));
  CHECK_THAT(cone_moment(0.5, 2), WithinAbs(64.0 / 225.0, 1e-13));
  CHECK_THAT(cone_moment(1e-3, 2), WithinAbs(std::exp(-1.5), 2e-3));
  for (int N : {2, 3, 4}) CHECK_THAT(cone_moment(1e-3, N), WithinAbs(harmonic_limit(N), 5e-3));
  CHECK_THROWS_AS(cone_moment(0.0, 2), ArgumentError);
  CHECK_THROWS_AS(cone_moment(1.5, 2), ArgumentError);
}

TEST_CASE("cone_moment agrees with the Beta-function oracle and increases in q", "[analysis]") {
  for (int N : {2, 3, 5}) {
    double prev = 0.0;
    for (double q : {1e-3, 3e-3, 1e-2, 0.03, 0.1, 0.3, 0.5, 0.8, 1.0}) {
      const double c = cone_moment(q, N);
      CHECK_THAT(c, WithinRel(cone_moment_beta(q, N), 1e-9));
      CHECK(c > prev);
      prev = c;
    }
  }
}

TEST_CASE("log_moment_I closed values and recursion", "[analysis]") {
  CHECK_THAT(log_moment_I(2), WithinAbs(-1.5, 1e-10));
  CHECK_THAT(log_moment_I(3), WithinAbs(-11.0 / 6.0, 1e-10));
  CHECK_THAT(log_moment_I(4), WithinAbs(-25.0 / 12.0, 1e-10));
  for (int N = 2; N < 10; ++N) CHECK_THAT(log_moment_I(N + 1), WithinAbs(log_moment_I(N) - 1.0 / (N + 1), 1e-9));
}

TEST_CASE("Sobolev constant", "[analysis]") {
  CHECK_THAT(sobolev_constant(3, 2.0), WithinRel(3.0 * std::pow(pi / 2.0, 4.0 / 3.0), 1e-12));
  // oracle: pi^{p/2} N ((N-p)/(p-1))^{p-1} (Gamma(N/p) Gamma(1+N-N/p) / (Gamma(1+N/2) Gamma(N)))^{p/N}
  auto oracle = [](int N, double p) {
    const double r = std::tgamma(N / p) * std::tgamma(1 + N - N / p) / (std::tgamma(1 + N / 2.0) * std::tgamma(N));
    return std::pow(pi, p / 2) * N * std::pow((N - p) / (p - 1), p - 1) * std::pow(r, p / N);
  };
  CHECK_THAT(sobolev_constant(3, 2.0), WithinAbs(5.4779, 1e-4));
  CHECK_THAT(sobolev_constant(3, 2.0), WithinRel(oracle(3, 2.0), 1e-12));
  CHECK_THAT(sobolev_constant(5, 2.5), WithinRel(oracle(5, 2.5), 1e-12));
  const double s4 = sobolev_constant(4, 2.0);
  CHECK(std::isfinite(s4));
  CHECK(s4 > 0.0);
  CHECK_THROWS_AS(sobolev_constant(3, 3.0), ArgumentError);
  CHECK_THROWS_AS(sobolev_constant(3, 1.0), ArgumentError);
}

TEST_CASE("ball torsion function", "[analysis]") {
  CHECK_THAT(ball_torsion(2, 2.0, 1.0, 0.0), WithinAbs(0.25, 1e-15));
  CHECK_THAT(ball_torsion(2, 2.0, 1.0, 0.5), WithinAbs(3.0 / 16.0, 1e-15));
  for (int N : {2, 3}) {
    for (double p : {1.5, 2.0, 3.0}) CHECK(ball_torsion(N, p, 1.7, 1.7) == 0.0);
  }
  CHECK_THROWS_AS(ball_torsion(2, 2.0, 1.0, 1.5), ArgumentError);
}

TEST_CASE("ball torsion L1 norm matches radial quadrature", "[analysis]") {
  for (double p : {1.5, 2.0, 3.0}) {
    const auto r = integrate([p](double s) { return 2.0 * pi * s * ball_torsion(2, p, 1.3, s); }, 0.0, 1.3, 1e-14, 1e-13);
    CHECK_THAT(ball_torsion_l1(2, p, 1.3), WithinRel(r.value, 1e-10));
  }
}

TEST_CASE("lambda1 of balls", "[analysis]") {
  CHECK_THAT(lambda1_ball(2, 2.0, 1.0), WithinRel(8.0 / pi, 1e-13));
  CHECK_THAT(lambda1_ball(2, 2.0, 2.0), WithinRel(8.0 / pi / 16.0, 1e-13));
  for (double p : {1.5, 2.5, 4.0}) CHECK(lambda1_ball(3, p, 0.7) > 0.0);
}

TEST_CASE("Poincare constant", "[analysis]") {
  CHECK_THAT(poincare_constant(2, 2.0, 1.0), WithinRel(pi, 1e-14));
  CHECK_THAT(poincare_constant(2, 4.0, 1.0), WithinRel(pi * pi, 1e-13));
  CHECK_THAT(poincare_constant(2, 2.0, 5.783185962946784), WithinAbs(18.168, 1e-3));
  CHECK_THROWS_AS(poincare_constant(2, 2.0, 0.0), ArgumentError);
}

TEST_CASE("L-infinity constant K", "[analysis]") {
  const double C = 18.168;
  CHECK_THAT(linfty_integrand(2, 2.0, C, 0.0), WithinAbs(3.0 / std::sqrt(C), 1e-12));
  CHECK_THAT(linfty_integrand(2, 2.0, C, 0.0), WithinAbs(0.7038, 1e-4));
  const double K = linfty_constant(2, 2.0, C);
  CHECK_THAT(K, WithinRel(std::max(linfty_integrand(2, 2.0, C, 0.0), linfty_integrand(2, 2.0, C, 1.0)), 1e-9));
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 1000; ++k) CHECK(K >= linfty_integrand(2, 2.0, C, u(rng)) * (1 - 1e-12));
  CHECK(K >= linfty_integrand(2, 2.0, C, 0.5));
  CHECK(linfty_constant(2, 2.0, 1e12) < 1e-5);
  CHECK(linfty_constant(2, 2.0, 1e3) < linfty_constant(2, 2.0, 1e2));
  CHECK_THROWS_AS(linfty_constant(2, 2.0, 0.0), ArgumentError);
}

TEST_CASE("mu lower bound and the explicit log-Sobolev constant", "[analysis]") {
  CHECK_THAT(mu_lower_bound(2, 2.0, 1.0), WithinRel(8.0 * pi, 1e-13));
  CHECK_THAT(mu_lower_bound(2, 2.0, pi), WithinRel(8.0 * pi, 1e-13));
  CHECK_THAT(mu_lower_bound(2, 3.0, 1.0), WithinRel(24.5 * std::pow(pi, 1.5), 1e-13));
  for (double V : {0.3, 1.0, 4.0, 17.0})
    for (double p : {1.5, 2.0, 3.0}) CHECK_THAT(logsob_explicit_constant(2, p, V) * mu_lower_bound(2, p, V), WithinAbs(1.0, 1e-14));
  CHECK_THAT(logsob_explicit_constant(2, 2.0, 1.0), WithinRel(1.0 / (8.0 * pi), 1e-13));
  CHECK_THAT(logsob_explicit_constant(2, 2.0, 4.0), WithinRel(1.0 / (8.0 * pi), 1e-13));
  CHECK_THROWS_AS(mu_lower_bound(2, 2.0, 0.0), ArgumentError);
}

TEST_CASE("ball_lambda_q volume transport", "[analysis]") {
  CHECK_THAT(ball_lambda_q(3.7, pi, 2, 2.0, 0.5), WithinRel(3.7, 1e-14));
  CHECK_THAT(ball_lambda_q(3.7, 4.0 * pi, 2, 2.0, 1.0), WithinRel(3.7 / 16.0, 1e-13));
  for (double q : {0.1, 0.5, 1.0}) {
    const double t = 1.9;
    const double V = pi * t * t;
    CHECK_THAT(ball_lambda_q(2.0, V, 2, 3.0, q), WithinRel(2.0 * std::pow(t, 2.0 - 3.0 - 2.0 * 3.0 / q), 1e-12));
    CHECK_THAT(ball_log_lambda_q(std::log(2.0), V, 2, 3.0, q), WithinAbs(std::log(ball_lambda_q(2.0, V, 2, 3.0, q)), 1e-12));
  }
  CHECK_THROWS_AS(ball_lambda_q(1.0, -1.0, 2, 2.0, 0.5), ArgumentError);
}

TEST_CASE("constant reports echo their inputs", "[analysis]") {
  const auto reports = constant_reports(3, 2.0, 2.5, 9.8696);
  REQUIRE(reports.size() >= 7);
  for (const auto& r : reports) {
    CHECK(std::isfinite(r.value));
    CHECK(!r.provenance.empty());
    if (r.inputs.count("p")) CHECK(r.inputs.at("p") == 2.0);
    if (r.inputs.count("volume")) CHECK(r.inputs.at("volume") == 2.5);
  }
}
