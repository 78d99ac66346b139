// singmin: command-line front end for the domain, solver and experiment layers.

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "singmin/analysis.hpp"
#include "singmin/experiments.hpp"
#include "singmin/io.hpp"
#include "singmin/plap_solver.hpp"
#include "singmin/svg.hpp"

namespace {

using namespace singmin;
namespace fs = std::filesystem;

constexpr int kExitPass = 0;
constexpr int kExitCheckFail = 1;
constexpr int kExitUsage = 2;

struct DomainFlags {
  std::string shape = "disk";
  double r = 1.0;
  double w = 1.0;
  double height = -1.0;  // defaults to w
  double cut = 0.5;
  std::string mask;
  double spacing = 0.0;
  double resolution = 64.0;
  std::vector<double> center;

  void attach(CLI::App* app) {
    app->add_option("--shape", shape, "disk | square | rect | lshape | mask")
        ->check(CLI::IsMember({"disk", "square", "rect", "lshape", "mask"}));
    app->add_option("--r", r, "disk radius");
    app->add_option("--w", w, "width (square side, rect/lshape width)");
    app->add_option("--height", height, "rect/lshape height (defaults to --w)");
    app->add_option("--cut", cut, "lshape: side of the removed corner square");
    app->add_option("--mask", mask, "mask file: '#' inside, '.' outside, first line on top");
    app->add_option("--spacing", spacing, "mask file grid spacing");
    app->add_option("--resolution", resolution, "nodes per unit length (1/h)");
    app->add_option("--center", center, "star-shaped gauge center x y")->expected(2);
  }

  ShapeSpec spec() const {
    const double hh = height > 0.0 ? height : w;
    ShapeSpec s;
    if (shape == "disk") s = ShapeSpec::disk(r, resolution);
    else if (shape == "square") s = ShapeSpec::rect(w, w, resolution);
    else if (shape == "rect") s = ShapeSpec::rect(w, hh, resolution);
    else if (shape == "lshape") s = ShapeSpec::lshape(w, hh, cut, resolution);
    else {
      if (mask.empty()) throw ArgumentError("--shape mask requires --mask");
      s = ShapeSpec::mask_file(mask, spacing > 0.0 ? spacing : 1.0 / resolution);
    }
    if (center.size() == 2) s.center = Point{center[0], center[1]};
    return s;
  }
};

struct SolverFlags {
  double p = 2.0;
  unsigned long long seed = 12345;
  int workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  double tol = 1e-10;
  int max_iter = 5000;
  int multistart = 4;

  void attach(CLI::App* app) {
    app->add_option("--p", p, "exponent p > 1");
    app->add_option("--seed", seed, "PRNG seed (SINGMIN_SEED overrides)");
    app->add_option("--workers", workers, "parallel solves (default: hardware threads)");
    app->add_option("--tol", tol, "relative stopping threshold");
    app->add_option("--max-iter", max_iter, "iteration cap per solve");
    app->add_option("--multistart", multistart, "randomized restarts");
  }

  SolverConfig config() const {
    if (!(p > 1.0)) throw ArgumentError("--p must be > 1");
    SolverConfig c;
    c.seed = seed;
    if (const char* env = std::getenv("SINGMIN_SEED")) {
      try {
        c.seed = std::stoull(env);
      } catch (const std::exception&) {
        throw ArgumentError("SINGMIN_SEED is not an unsigned integer");
      }
    }
    c.workers = workers;
    c.tol_rel = tol;
    c.max_iter = max_iter;
    c.multistart = multistart;
    c.validate();
    return c;
  }
};

struct Outputs {
  std::string dir = ".";
  std::string prefix = "singmin";
  std::vector<std::string> written;

  void attach(CLI::App* app, const std::string& default_prefix) {
    prefix = default_prefix;
    app->add_option("--out-dir", dir, "output directory");
    app->add_option("--prefix", prefix, "output file prefix");
  }
  std::string path(const std::string& suffix) const { return (fs::path(dir) / (prefix + suffix)).string(); }
  void write(const std::string& suffix, const std::string& text) {
    fs::create_directories(dir);
    const std::string p = path(suffix);
    write_text(p, text);
    written.push_back(p);
  }
  void write_file(const std::string& p, const std::string& text) {
    write_text(p, text);
    written.push_back(p);
  }
};

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

void write_manifest(Outputs& out, const std::string& command, const json& config, unsigned long long seed,
                    const std::string& started, bool passed) {
  json files = json::array();
  for (const auto& f : out.written) files.push_back(f);
  const json m{{"schema_version", kSchemaVersion}, {"tool", "singmin"}, {"tool_version", kToolVersion},
               {"command", command}, {"config", config}, {"seed", seed}, {"started", started},
               {"finished", utc_now()}, {"outputs", files}, {"passed", passed}};
  fs::create_directories(out.dir);
  write_text(out.path("_manifest.json"), m.dump(2) + "\n");
}

// ---------------------------------------------------------------------------

int cmd_verify(int N, double p, bool quick, double resolution, const SolverFlags& sf, Outputs& out) {
  const std::string started = utc_now();
  if (!(p > 1.0)) throw ArgumentError("--p must be > 1");
  if (N < 2) throw ArgumentError("--n must be >= 2");
  const SolverConfig cfg = sf.config();
  IdentityReport rep;
  auto add = [&](std::string name, double v, double e, double tol) {
    rep.checks.push_back({std::move(name), std::abs(v - e) <= tol, v, e, tol, {}});
  };
  // dimension-N analysis checks
  add("I(" + std::to_string(N) + ") = -H_N", log_moment_I(N), -harmonic_number(N), 1e-9);
  add("cone moment at q=1e-3 vs e^{-H_N} (N=" + std::to_string(N) + ")", cone_moment(1e-3, N), harmonic_limit(N), 5e-3);
  add("unit ball volume via Lanczos gamma", unit_ball_volume(N),
      std::pow(M_PI, 0.5 * N) / std::tgamma(0.5 * N + 1.0), 1e-12 * unit_ball_volume(N));
  add("ball torsion L1 norm vs lambda_1", lambda1_ball(N, p, 1.0) * std::pow(ball_torsion_l1(N, p, 1.0), p - 1.0),
      1.0, 1e-12);
  const double lam_rad = radial_lambda_q(N, p, 1.0, 1e-10).lambda;
  add("radial lambda_1(B_1) vs closed form (relative)", lam_rad / lambda1_ball(N, p, 1.0), 1.0, 1e-6);
  const double C = poincare_constant(N, p, radial_eigen_p(N, p, 1e-10));
  add("K_{N,p} dominates both endpoints",
      linfty_constant(N, p, C) >= std::max(linfty_integrand(N, p, C, 0.0), linfty_integrand(N, p, C, 1.0)) ? 1.0 : 0.0,
      1.0, 0.0);
  add("log-Sobolev explicit constant is the reciprocal of the mu bound",
      logsob_explicit_constant(N, p, 2.0) * mu_lower_bound(N, p, 2.0), 1.0, 1e-12);
  if (!quick) {
    const IdentityReport grid = verify_identities(cfg, resolution, p);
    rep.checks.insert(rep.checks.end(), grid.checks.begin(), grid.checks.end());
  } else {
    const IdentityReport grid = verify_identities(cfg, std::min(resolution, 24.0), p);
    for (const auto& c : grid.checks)
      if (c.name.find("log moment") != std::string::npos || c.name.find("cone") != std::string::npos)
        rep.checks.push_back(c);
  }
  const bool ok = rep.all_passed();
  out.write("_verify.json", to_json(rep).dump(2) + "\n");
  out.write("_verify.md", to_markdown(rep));
  for (const auto& c : rep.checks) std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << "\n";
  std::cout << rep.checks.size() << " checks, " << (ok ? "all passed" : "failures present") << "\n";
  write_manifest(out, "verify", {{"n", N}, {"p", p}, {"quick", quick}, {"resolution", resolution}, {"solver", to_json(cfg)}},
                 cfg.seed, started, ok);
  return ok ? kExitPass : kExitCheckFail;
}

int cmd_solve(const DomainFlags& df, const SolverFlags& sf, const std::string& task, double q, double lam,
              const std::string& svg_path, Outputs& out) {
  const std::string started = utc_now();
  const SolverConfig cfg = sf.config();
  const double p = sf.p;
  const DomainPtr d = make_domain(df.spec());
  json summary{{"schema_version", kSchemaVersion}, {"task", task}, {"p", p}, {"domain", to_json(*d)},
               {"config", to_json(cfg)}};
  json header{{"schema_version", kSchemaVersion}, {"domain", to_json(d->spec())}, {"p", p}, {"task", task}};
  ScalarField field;
  bool ok = true;
  auto ws = std::make_shared<SolverWorkspace>(d);
  MinimizeOptions mo;
  mo.workspace = ws;
  try {
    if (task == "torsion") {
      field = ws->torsion(p, cfg);
      summary["sup_norm"] = sup_norm(field);
      summary["energy"] = p_energy(field, p);
    } else if (task == "lambda-q") {
      if (!(q > 0.0 && q <= 1.0)) throw ArgumentError("--q must lie in (0, 1]");
      header["q"] = q;
      const auto r = minimize_lambda_q(d, p, q, cfg, mo);
      field = r.field;
      summary["q"] = q;
      summary["Lambda_q"] = num(r.objective);
      summary["log_lambda_q"] = num(r.log_value);
      summary["lambda_q"] = num(std::exp(r.log_value));
      summary["field_normalization"] = "m_q = 1; multiply by exp(log_scale) for int u^q = 1";
      summary["result"] = to_json(r);
    } else if (task == "mu") {
      const auto r = minimize_mu(d, p, cfg, mo);
      field = r.field;
      summary["mu"] = num(r.objective);
      summary["log_mean"] = log_mean(field).log_value;
      summary["result"] = to_json(r);
    } else {
      if (!(lam > 0.0)) throw ArgumentError("--lambda must be positive");
      header["lambda"] = lam;
      const auto r = solve_singular_detailed(d, p, lam, cfg, mo);
      field = r.field;
      const ScalarField& phi = ws->torsion(p, cfg);
      bool lower = true, upper = true;
      for (int n : d->interior_nodes()) {
        lower = lower && field[n] >= 0.99 * r.brackets.lower_coef * phi[n];
        upper = upper && field[n] <= 1.01 * r.brackets.upper;
      }
      summary["lambda"] = lam;
      summary["iterations"] = r.iterations;
      summary["residual"] = r.residual;
      summary["bracket_lower_coef"] = r.brackets.lower_coef;
      summary["bracket_upper"] = r.brackets.upper;
      summary["bracket_lower_ok"] = lower;
      summary["bracket_upper_ok"] = upper;
      summary["mu_from_singular"] = num(mu_from_singular(field, lam, p, d->volume()));
      ok = lower && upper;
    }
  } catch (const Error& e) {
    if (dynamic_cast<const ArgumentError*>(&e)) throw;
    summary["error"] = e.what();
    out.write("_summary.json", summary.dump(2) + "\n");
    write_manifest(out, "solve", summary["config"], cfg.seed, started, false);
    std::cerr << "solve failed: " << e.what() << "\n";
    return kExitCheckFail;
  }
  summary["sup_norm"] = sup_norm(field);
  out.write("_field.csv", field_csv(field, header));
  if (!svg_path.empty()) out.write_file(svg_path, svg_heatmap(field, task));
  out.write("_summary.json", summary.dump(2) + "\n");
  write_manifest(out, "solve", {{"task", task}, {"domain", to_json(d->spec())}, {"solver", to_json(cfg)}},
                 cfg.seed, started, ok);
  std::cout << summary.dump(2) << "\n";
  return ok ? kExitPass : kExitCheckFail;
}

int cmd_sweep(const DomainFlags& df, const SolverFlags& sf, double q_from, double q_to, double q_factor,
              bool with_mu, Outputs& out) {
  const std::string started = utc_now();
  const SolverConfig cfg = sf.config();
  const double p = sf.p;
  const auto grid = geometric_q_grid(q_from, q_to, q_factor);
  const DomainPtr d = make_domain(df.spec());
  auto ws = std::make_shared<SolverWorkspace>(d);
  const auto recs = q_sweep(d, p, grid, cfg, ws);
  const AsymptoticClass cls = classify_asymptotics(*d, p, recs);
  bool monotone = true, bounds = true;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    bounds = bounds && recs[i].sup_bound_ok && recs[i].lower_bound_ok;
    if (i > 0) monotone = monotone && recs[i].Lambda_q >= recs[i - 1].Lambda_q * (1.0 - 0.005);
  }
  json j{{"schema_version", kSchemaVersion}, {"p", p}, {"domain", to_json(*d)}, {"config", to_json(cfg)},
         {"classification", to_json(cls)}, {"monotone", monotone}, {"bounds_ok", bounds}};
  json rj = json::array();
  for (const auto& r : recs) rj.push_back(to_json(r));
  j["records"] = rj;
  std::optional<MuReport> mu;
  if (with_mu) {
    mu = reconcile_mu_from_sweep(d, p, recs, cfg, ws);
    j["mu"] = to_json(*mu);
  }
  out.write("_sweep.csv", sweep_csv(recs));
  out.write("_sweep.json", j.dump(2) + "\n");
  out.write("_sweep.md", to_markdown(recs, mu ? &*mu : nullptr, &cls));
  const bool ok = monotone && bounds;
  write_manifest(out, "sweep",
                 {{"domain", to_json(d->spec())}, {"q_from", q_from}, {"q_to", q_to}, {"q_factor", q_factor},
                  {"solver", to_json(cfg)}},
                 cfg.seed, started, ok);
  std::cout << to_markdown(recs, mu ? &*mu : nullptr, &cls);
  return ok ? kExitPass : kExitCheckFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"singmin: sublinear p-Laplacian eigenvalues, the log-Sobolev constant mu and the singular problem"};
  app.require_subcommand(1);

  auto* verify = app.add_subcommand("verify", "run the identity and inequality checks");
  int n_dim = 2;
  double vp = 2.0;
  bool quick = false;
  double v_res = 64.0;
  SolverFlags vsf;
  Outputs vout;
  verify->add_option("--n", n_dim, "dimension for the closed-form checks");
  verify->add_option("--p", vp, "exponent p > 1");
  verify->add_flag("--quick", quick, "closed-form subset plus a coarse grid");
  verify->add_option("--resolution", v_res, "grid resolution for the domain checks");
  verify->add_option("--seed", vsf.seed, "PRNG seed (SINGMIN_SEED overrides)");
  verify->add_option("--workers", vsf.workers, "parallel solves");
  vout.attach(verify, "verify");

  auto* solve = app.add_subcommand("solve", "solve one variational problem on a domain");
  DomainFlags sdf;
  SolverFlags ssf;
  Outputs sout;
  std::string task = "torsion";
  double q = 0.5, lam = 1.0;
  std::string svg;
  sdf.attach(solve);
  ssf.attach(solve);
  sout.attach(solve, "solve");
  solve->add_option("--task", task, "torsion | lambda-q | mu | singular")
      ->check(CLI::IsMember({"torsion", "lambda-q", "mu", "singular"}));
  solve->add_option("--q", q, "q in (0,1] for lambda-q");
  solve->add_option("--lambda", lam, "lambda > 0 for singular");
  solve->add_option("--svg", svg, "write an SVG heatmap of the field to this path");

  auto* sweep = app.add_subcommand("sweep", "q-sweep with bounds, classification and mu reconciliation");
  DomainFlags wdf;
  SolverFlags wsf;
  Outputs wout;
  double q_from = 0.5, q_to = 0.005, q_factor = 0.5;
  bool no_mu = false;
  wdf.attach(sweep);
  wsf.attach(sweep);
  wout.attach(sweep, "sweep");
  sweep->add_option("--q-from", q_from, "largest q");
  sweep->add_option("--q-to", q_to, "smallest q");
  sweep->add_option("--q-factor", q_factor, "geometric ratio in (0,1)");
  sweep->add_flag("--no-mu", no_mu, "skip the three-route mu reconciliation");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }

  try {
    if (*verify) {
      vsf.p = vp > 1.0 ? vp : 2.0;
      if (!(vp > 1.0)) throw ArgumentError("--p must be > 1");
      return cmd_verify(n_dim, vp, quick, v_res, vsf, vout);
    }
    if (*solve) return cmd_solve(sdf, ssf, task, q, lam, svg, sout);
    if (*sweep) return cmd_sweep(wdf, wsf, q_from, q_to, q_factor, !no_mu, wout);
  } catch (const ArgumentError& e) {
    std::cerr << "argument error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConstructionError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "failed: " << e.what() << "\n";
    return kExitCheckFail;
  }
  return kExitUsage;
}
