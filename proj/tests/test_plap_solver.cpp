#include <cmath>
#include <numbers>
#include <random>

#include "catch_amalgamated.hpp"

#include "singmin/analysis.hpp"
#include "singmin/experiments.hpp"
#include "singmin/field_ops.hpp"
#include "singmin/plap_solver.hpp"
#include "singmin/radial_oracle.hpp"

using namespace singmin;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

constexpr double pi = std::numbers::pi;

// Torsion function of the unit square from its double sine series.
double square_torsion_series(double x, double y, int terms = 401) {
  double s = 0.0;
  for (int m = 1; m <= terms; m += 2)
    for (int n = 1; n <= terms; n += 2)
      s += 16.0 / (std::pow(pi, 4) * m * n * (m * m + n * n)) * std::sin(m * pi * x) * std::sin(n * pi * y);
  return s;
}

double max_rel_diff(const ScalarField& a, const ScalarField& b) {
  double m = 0.0;
  for (int n : a.domain().interior_nodes()) m = std::max(m, std::abs(a[n] - b[n]) / std::abs(b[n]));
  return m;
}

double max_abs_diff(const ScalarField& a, const ScalarField& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.values().size(); ++k) m = std::max(m, std::abs(a.values()[k] - b.values()[k]));
  return m;
}

// Central differences at 20 random coordinates against the analytic gradient.
void gradient_check(const Objective& f, const Eigen::VectorXd& x, unsigned seed) {
  Eigen::VectorXd g;
  f(x, &g);
  const double gscale = g.cwiseAbs().maxCoeff();
  std::mt19937 rng(seed);
  std::uniform_int_distribution<Eigen::Index> pick(0, x.size() - 1);
  for (int k = 0; k < 20; ++k) {
    const Eigen::Index i = pick(rng);
    const double h = 1e-6 * std::max(std::abs(x[i]), 1e-3);
    Eigen::VectorXd xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    const double fd = (f(xp, nullptr) - f(xm, nullptr)) / (2.0 * h);
    CHECK(std::abs(fd - g[i]) <= 1e-5 * std::max(std::abs(g[i]), 1e-2 * gscale));
  }
}

}  // namespace

TEST_CASE("torsion: unit disk matches the ball formula", "[plap][torsion]") {
  const auto disk = make_domain(ShapeSpec::disk(1.0, 128));
  const auto u = solve_torsion(disk, 2.0);
  CHECK(u.is_dirichlet());
  CHECK_THAT(u[disk->node_index(disk->nx() / 2, disk->ny() / 2)], WithinAbs(0.25, 5e-3));
  for (int n : disk->interior_nodes()) CHECK(u[n] > 0.0);
}

TEST_CASE("torsion: unit square matches the Fourier series", "[plap][torsion]") {
  const double oracle = square_torsion_series(0.5, 0.5);
  CHECK_THAT(oracle, WithinAbs(0.07367, 1e-5));
  const auto sq = make_domain(ShapeSpec::rect(1.0, 1.0, 64));
  const auto u = solve_torsion(sq, 2.0);
  CHECK_THAT(sup_norm(u), WithinAbs(oracle, 1e-3));
  // pointwise, at a few off-center nodes
  for (int n : sq->interior_nodes()) {
    const Point x = sq->position(n);
    if (sq->ix_of(n) % 16 == 0 && sq->iy_of(n) % 16 == 0) CHECK_THAT(u[n], WithinAbs(square_torsion_series(x.x, x.y), 1e-3));
  }
}

TEST_CASE("torsion: p = 3 on the unit disk", "[plap][torsion]") {
  const auto disk = make_domain(ShapeSpec::disk(1.0, 128));
  const auto u = solve_torsion(disk, 3.0);
  CHECK_THAT(sup_norm(u), WithinRel(ball_torsion(2, 3.0, 1.0, 0.0), 0.02));
  CHECK_THAT(sup_norm(u), WithinRel(2.0 / 3.0 / std::sqrt(2.0), 0.02));
}

TEST_CASE("torsion: iteration cap raises a convergence error with the last iterate", "[plap][torsion]") {
  const auto sq = make_domain(ShapeSpec::rect(1.0, 1.0, 32));
  SolverConfig cfg;
  cfg.max_iter = 1;
  try {
    solve_torsion(sq, 3.0, cfg);
    FAIL("expected a convergence error");
  } catch (const ConvergenceError& e) {
    CHECK(e.last_iterate().size() == static_cast<std::size_t>(sq->node_count()));
  }
}

TEST_CASE("solver config validation", "[plap]") {
  SolverConfig c;
  CHECK_NOTHROW(c.validate());
  c.eps_rel = 0.05;
  CHECK_THROWS_AS(c.validate(), ArgumentError);
  c = SolverConfig{};
  c.multistart = 0;
  CHECK_THROWS_AS(c.validate(), ArgumentError);
  c = SolverConfig{};
  c.tol_rel = 0.0;
  CHECK_THROWS_AS(c.validate(), ArgumentError);
  c = SolverConfig{};
  c.grad_reg = -1.0;
  CHECK_THROWS_AS(c.validate(), ArgumentError);
}

TEST_CASE("gradients match central differences", "[plap][gradient]") {
  const auto sq = make_domain(ShapeSpec::rect(1.0, 1.0, 16));
  const auto fields = random_admissible_fields(solve_torsion(sq, 2.0), 2, 3);
  const Eigen::VectorXd x = fields[0].interior();
  const GridDomain& d = *sq;
  for (double p : {1.5, 2.0, 3.0}) {
    const double delta = SolverConfig{}.delta_for(p);
    gradient_check([&](const Eigen::VectorXd& y, Eigen::VectorXd* g) { return detail::energy_interior(d, y, p, delta, g); },
                   x, 1);
    for (double q : {1.0, 0.5, 0.01, 0.0}) gradient_check(detail::log_quotient_objective(d, p, q, delta), x, 2);
    // J_lambda = E/p - lam sum w log x
    const double lam = 0.7;
    gradient_check(
        [&](const Eigen::VectorXd& y, Eigen::VectorXd* g) {
          double e = detail::energy_interior(d, y, p, delta, g) / p;
          if (g) *g /= p;
          for (Eigen::Index k = 0; k < y.size(); ++k) {
            e -= lam * d.weights()[k] * std::log(y[k]);
            if (g) (*g)[k] -= lam * d.weights()[k] / y[k];
          }
          return e;
        },
        x, 3);
  }
}

TEST_CASE("minimize_lambda_q: q = 1 on the disk against 8/pi", "[plap][lambda]") {
  const auto disk = make_domain(ShapeSpec::disk(1.0, 128));
  const auto r = minimize_lambda_q(disk, 2.0, 1.0);
  // the grid disk is slightly smaller than B_1; compare with the equal-volume ball
  CHECK_THAT(std::exp(r.log_value), WithinRel(ball_lambda_q(8.0 / pi, disk->volume(), 2, 2.0, 1.0), 0.02));
  CHECK_THAT(std::exp(r.log_value), WithinRel(8.0 / pi, 0.03));
  CHECK_THAT(r.objective, WithinRel(std::exp(r.log_value) * std::pow(disk->volume(), 2.0), 1e-12));
  CHECK_THAT(q_mean(r.field, 1.0), WithinRel(1.0, 1e-12));
  CHECK_THAT(r.objective, WithinRel(quotient_q(r.field, 2.0, 1.0), 1e-12));
  CHECK(r.restarts_agreeing >= 2);
  for (int n : disk->interior_nodes()) CHECK(r.field[n] > 0.0);
}

TEST_CASE("minimize_lambda_q: q = 1/2 matches the radial oracle", "[plap][lambda]") {
  const auto disk = make_domain(ShapeSpec::disk(1.0, 128));
  const auto r = minimize_lambda_q(disk, 2.0, 0.5);
  const auto rad = radial_lambda_q(2, 2.0, 0.5, 1e-10);
  CHECK_THAT(r.log_value, WithinAbs(ball_log_lambda_q(rad.log_lambda, disk->volume(), 2, 2.0, 0.5), std::log(1.02)));
  // minimality against the torsion function and random competitors
  for (const auto& v : random_admissible_fields(solve_torsion(disk, 2.0), 10, 4))
    CHECK(r.objective <= quotient_q(v, 2.0, 0.5) * (1.0 + 1e-12));
  // int u^q = 1 after the reported rescaling
  const double lq = log_q_mean(r.field, 0.5);
  CHECK_THAT(lq, WithinAbs(0.0, 1e-12));
  CHECK_THAT(r.log_scale, WithinAbs(-std::log(disk->volume()) / 0.5, 1e-12));
}

TEST_CASE("minimize_lambda_q: Euler-Lagrange residual against random test fields", "[plap][lambda]") {
  const auto sq = make_domain(ShapeSpec::rect(1.0, 1.0, 48));
  for (double p : {1.5, 2.0, 3.0}) {
    const double q = 0.5;
    const auto r = minimize_lambda_q(sq, p, q);
    const Eigen::VectorXd x = r.field.interior();
    const double delta = SolverConfig{}.delta_for(p);
    Eigen::VectorXd gE, gF;
    const double E = detail::energy_interior(*sq, x, p, delta, &gE);
    detail::log_quotient_objective(*sq, p, q, delta)(x, &gF);
    std::mt19937_64 rng(9);
    for (int k = 0; k < 20; ++k) {
      const Eigen::VectorXd v = smooth_noise(sq, rng).interior();
      // d/dt [log E - p log m_q](u + t v) at 0: the two first variations cancel
      const double dE = gE.dot(v) / E, dF = gF.dot(v);
      const double dM = dE - dF;
      CHECK(std::abs(dF) <= 1e-3 * (std::abs(dE) + std::abs(dM)));
    }
  }
}

TEST_CASE("minimize_lambda_q argument checks", "[plap][lambda]") {
  const auto sq = make_domain(ShapeSpec::rect(1.0, 1.0, 16));
  CHECK_THROWS_AS(minimize_lambda_q(sq, 2.0, 0.0), ArgumentError);
  CHECK_THROWS_AS(minimize_lambda_q(sq, 2.0, 1.5), ArgumentError);
  CHECK_THROWS_AS(minimize_lambda_q(sq, 1.0, 0.5), ArgumentError);
}

TEST_CASE("minimize_mu on the unit disk", "[plap][mu]") {
  const auto disk = make_domain(ShapeSpec::disk(1.0, 128));
  auto ws = std::make_shared<SolverWorkspace>(disk);
  std::vector<double> accepted;
  bool mixed_sign_near_min = false;
  MinimizeOptions mo;
  mo.workspace = ws;
  mo.observer = [&](int, const Eigen::VectorXd& x, double f) {
    accepted.push_back(f);
    if (x.minCoeff() < 0.0 && x.maxCoeff() > 0.0) mixed_sign_near_min = true;
  };
  const auto r = minimize_mu(disk, 2.0, SolverConfig{}, mo);
  const double mu = r.objective;

  CHECK(mu >= 8.0 * pi * 0.99);
  CHECK(std::abs(log_mean(r.field).log_value) <= 1e-10);
  CHECK_THAT(mu, WithinRel(quotient_log(r.field, 2.0), 1e-12));
  CHECK_FALSE(mixed_sign_near_min);
  CHECK_FALSE(accepted.empty());

  // cross-route: radial singular solution, mu is volume independent for N = p = 2
  CHECK_THAT(mu, WithinRel(radial_singular(2, 2.0, 1.0, 1e-10).mu, 0.02));

  // J(u) = mu / p is the global minimum
  const double V = disk->volume();
  CHECK_THAT(energy_J(r.field, 2.0, mu / V), WithinRel(mu / 2.0, 0.005));
  for (const auto& v : random_admissible_fields(ws->torsion(2.0, SolverConfig{}), 50, 5))
    CHECK(energy_J(v, 2.0, mu / V) >= mu / 2.0 - 1e-9);

  // sandwich between the analytic brackets (lambda = 1 rescaled)
  const auto b = singular_brackets(V, 2.0, 1.0);
  const double s = std::pow(mu / V, 0.5);
  const auto& phi = ws->torsion(2.0, SolverConfig{});
  for (int n : disk->interior_nodes()) {
    CHECK(r.field[n] >= 0.99 * s * b.lower_coef * phi[n]);
    CHECK(r.field[n] <= 1.01 * s * b.upper);
  }
}

TEST_CASE("minimize_mu: multistarts agree up to sign", "[plap][mu]") {
  const auto sq = make_domain(ShapeSpec::rect(1.0, 1.0, 48));
  SolverConfig cfg;
  cfg.multistart = 4;
  const auto r = minimize_mu(sq, 2.0, cfg);
  REQUIRE(r.restart_fields.size() == 4);
  CHECK(r.restarts_agreeing == 4);
  for (const auto& f : r.restart_fields) {
    CHECK(std::abs(log_mean(f).log_value) <= 1e-10);
    CHECK(max_abs_diff(f, r.field) <= 1e-3 * sup_norm(r.field));
  }
}

TEST_CASE("minimize_mu is deterministic and independent of the worker count", "[plap][mu]") {
  const auto sq = make_domain(ShapeSpec::lshape(1.0, 1.0, 0.5, 24));
  SolverConfig a;
  a.workers = 1;
  SolverConfig b = a;
  b.workers = 3;
  const auto ra = minimize_mu(sq, 2.0, a);
  const auto rb = minimize_mu(sq, 2.0, a);
  const auto rc = minimize_mu(sq, 2.0, b);
  CHECK(ra.field.values() == rb.field.values());
  CHECK(ra.objective == rb.objective);
  CHECK(ra.field.values() == rc.field.values());
}

TEST_CASE("solve_singular on the unit disk", "[plap][singular]") {
  const auto disk = make_domain(ShapeSpec::disk(1.0, 128));
  auto ws = std::make_shared<SolverWorkspace>(disk);
  MinimizeOptions mo;
  mo.workspace = ws;
  const auto r1 = solve_singular_detailed(disk, 2.0, 1.0, SolverConfig{}, mo);
  const auto r2 = solve_singular(disk, 2.0, 2.0, SolverConfig{}, mo);
  CHECK(r1.field.is_dirichlet());
  for (int n : disk->interior_nodes()) CHECK(r1.field[n] > 0.0);
  CHECK(r1.residual <= 1e-3);

  // against the radial profile on the equal-volume ball, u_R(x) = R w(x/R)
  const auto rad = radial_singular(2, 2.0, 1.0, 1e-10);
  const double R = schwarz_radius(*disk);
  CHECK_THAT(sup_norm(r1.field), WithinRel(R * rad.sup_norm(), 0.02));

  CHECK(max_rel_diff(r2, r1.field.scaled(std::sqrt(2.0))) <= 1e-3);

  // mu from the log-mean of the singular solution agrees with the direct route
  const double mu_s = mu_from_singular(r1.field, 1.0, 2.0, disk->volume());
  const double mu_d = minimize_mu(disk, 2.0, SolverConfig{}, mo).objective;
  CHECK_THAT(mu_s, WithinRel(mu_d, 0.02));
  CHECK_THAT(mu_from_singular(r2, 2.0, 2.0, disk->volume()), WithinRel(mu_s, 1e-3));
}

TEST_CASE("solve_singular: J_lambda decreases monotonically along the iteration", "[plap][singular]") {
  const auto sq = make_domain(ShapeSpec::rect(1.0, 1.0, 32));
  std::vector<double> values;
  MinimizeOptions mo;
  mo.observer = [&](int, const Eigen::VectorXd&, double f) { values.push_back(f); };
  solve_singular(sq, 3.0, 1.0, SolverConfig{}, mo);
  REQUIRE(values.size() > 2);
  for (std::size_t k = 1; k < values.size(); ++k) CHECK(values[k] <= values[k - 1] + 1e-12 * std::abs(values[k - 1]));
}

TEST_CASE("solve_singular argument checks", "[plap][singular]") {
  const auto sq = make_domain(ShapeSpec::rect(1.0, 1.0, 16));
  CHECK_THROWS_AS(solve_singular(sq, 2.0, 0.0), ArgumentError);
  CHECK_THROWS_AS(solve_singular(sq, 0.5, 1.0), ArgumentError);
}

TEST_CASE("rescale_to_lambda and mu_from_singular", "[plap][singular]") {
  const auto sq = make_domain(ShapeSpec::rect(1.0, 1.0, 32));
  const auto r = minimize_mu(sq, 2.0);
  const double mu = r.objective, V = sq->volume();
  const ScalarField& u = r.field;

  CHECK(max_abs_diff(rescale_to_lambda(u, mu, mu / V, V, 2.0), u) <= 1e-15 * sup_norm(u));

  const double lam_e = std::exp(2.0) * mu / V;
  CHECK_THAT(log_mean(rescale_to_lambda(u, mu, lam_e, V, 2.0)).log_value, WithinAbs(1.0, 1e-12));

  for (double lam : {0.3, 1.0, 7.0}) {
    const ScalarField ul = rescale_to_lambda(u, mu, lam, V, 2.0);
    CHECK_THAT(sup_norm(ul), WithinRel(std::sqrt(lam * V / mu) * sup_norm(u), 1e-14));
    CHECK_THAT(mu_from_singular(ul, lam, 2.0, V), WithinRel(mu, 1e-12));
    // log-mean identity: int log u_lam = (|Omega|/p) log(lam |Omega| / mu)
    CHECK_THAT(V * log_mean(ul).log_value, WithinAbs(V / 2.0 * std::log(lam * V / mu), 1e-12));
  }
  CHECK_THROWS_AS(rescale_to_lambda(u.scaled(2.0), mu, 1.0, V, 2.0), ArgumentError);
  CHECK_THROWS_AS(rescale_to_lambda(u, -1.0, 1.0, V, 2.0), ArgumentError);

  ScalarField z = u;
  z[sq->interior_nodes()[0]] = 0.0;
  CHECK_THROWS_AS(mu_from_singular(z, 1.0, 2.0, V), DegenerateFieldError);
}

TEST_CASE("singular brackets use the planar K constant", "[plap][singular]") {
  const double K = planar_linfty_constant(2.0);
  const double C = poincare_constant(2, 2.0, 2.404825557695773 * 2.404825557695773);
  CHECK_THAT(K, WithinRel(linfty_constant(2, 2.0, C), 1e-8));
  const auto b = singular_brackets(pi, 2.0, 4.0);
  CHECK_THAT(b.upper, WithinRel(K * std::sqrt(pi) * 2.0, 1e-12));
  CHECK_THAT(b.lower_coef, WithinRel(2.0 / (K * std::sqrt(pi)), 1e-12));
}
