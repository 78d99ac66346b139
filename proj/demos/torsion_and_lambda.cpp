// Torsion function and the sublinear eigenvalues lambda_q on an L-shaped domain,
// compared with the ball of the same area.
#include <cmath>
#include <cstdio>

#include "singmin/analysis.hpp"
#include "singmin/field_ops.hpp"
#include "singmin/plap_solver.hpp"
#include "singmin/radial_oracle.hpp"

using namespace singmin;

int main() {
  const DomainPtr d = make_domain(ShapeSpec::lshape(1.0, 1.0, 0.5, 64));
  const double p = 2.0;
  std::printf("L-shape: area %.6f, %d interior nodes\n", d->volume(), d->interior_count());

  const ScalarField phi = solve_torsion(d, p);
  std::printf("torsion: sup %.6f, energy %.6f\n\n", sup_norm(phi), p_energy(phi, p));

  auto ws = std::make_shared<SolverWorkspace>(d);
  MinimizeOptions mo;
  mo.workspace = ws;
  std::printf("%6s %14s %14s %8s\n", "q", "lambda_q", "ball", "ratio");
  for (double q : {1.0, 0.75, 0.5, 0.25, 0.1}) {
    const MinimizerResult r = minimize_lambda_q(d, p, q, SolverConfig{}, mo);
    mo.initial = r.field;  // warm start the next q
    const double ball = ball_log_lambda_q(radial_lambda_q(2, p, q, 1e-10).log_lambda, d->volume(), 2, p, q);
    std::printf("%6.2f %14.6f %14.6f %8.4f\n", q, std::exp(r.log_value), std::exp(ball), std::exp(r.log_value - ball));
  }
  return 0;
}
