// mu of a square by three routes, and the singular problem -Delta_p u = lam/u
// reconstructed from the mu-minimizer.
#include <cmath>
#include <cstdio>

#include "singmin/analysis.hpp"
#include "singmin/experiments.hpp"
#include "singmin/field_ops.hpp"
#include "singmin/plap_solver.hpp"

using namespace singmin;

int main() {
  const DomainPtr d = make_domain(ShapeSpec::rect(1.0, 1.0, 48));
  const double p = 2.0, V = d->volume();

  const MuReport rep = reconcile_mu(d, p);
  std::printf("mu: sweep %.6f, direct %.6f, singular %.6f (spread %.2e)\n", rep.mu_sweep, rep.mu_direct,
              rep.mu_singular, rep.spread);
  std::printf("explicit lower bound %.6f\n\n", rep.lower_bound);

  const MinimizerResult m = minimize_mu(d, p);
  for (double lam : {0.5, 1.0, 4.0}) {
    const ScalarField scaled = rescale_to_lambda(m.field, m.objective, lam, V, p);
    const ScalarField direct = solve_singular(d, p, lam);
    double gap = 0.0;
    for (int n : d->interior_nodes()) gap = std::max(gap, std::abs(scaled[n] / direct[n] - 1.0));
    std::printf("lam %.2f: sup %.6f, rescaled vs solved max rel gap %.2e, mu from u_lam %.6f\n", lam,
                sup_norm(direct), gap, mu_from_singular(direct, lam, p, V));
  }
  return 0;
}
