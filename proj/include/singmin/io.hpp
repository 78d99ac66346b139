#ifndef SINGMIN_IO_HPP
#define SINGMIN_IO_HPP

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <utility>
#include <vector>

#include "json.hpp"

#include "singmin/error.hpp"
#include "singmin/experiments.hpp"
#include "singmin/field.hpp"
#include "singmin/geometry.hpp"
#include "singmin/optim.hpp"
#include "singmin/plap_solver.hpp"
#include "singmin/radial_oracle.hpp"

namespace singmin {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolVersion = "1.0.0";

/// Shortest decimal form that parses back to the same double.
inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) throw IoError("could not format a double");
  return std::string(buf, end);
}

inline double parse_double(std::string_view s) {
  if (s == "nan") return std::nan("");
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw IoError("malformed number '" + std::string(s) + "'");
  return v;
}

/// JSON number, or null for non-finite values.
inline json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw IoError("write to '" + path + "' failed");
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline json to_json(const ShapeSpec& s) {
  json j{{"kind", to_string(s.kind)}};
  switch (s.kind) {
    case ShapeKind::disk: j["radius"] = s.radius; break;
    case ShapeKind::rect: j["width"] = s.width; j["height"] = s.height; break;
    case ShapeKind::lshape: j["width"] = s.width; j["height"] = s.height; j["cut"] = s.cut; break;
    case ShapeKind::mask_file: j["mask_path"] = s.mask_path; j["spacing"] = s.mask_spacing; break;
  }
  if (s.kind != ShapeKind::mask_file) j["resolution"] = s.resolution;
  if (s.center) j["center"] = {s.center->x, s.center->y};
  return j;
}

inline json to_json(const GridDomain& d) {
  return {{"spec", to_json(d.spec())}, {"nx", d.nx()}, {"ny", d.ny()}, {"h", d.h()},
          {"volume", d.volume()}, {"scale", d.scale()}, {"interior_nodes", d.interior_count()},
          {"triangles", d.triangles().size()}};
}

inline json to_json(const SolverConfig& c) {
  return {{"grad_reg", c.grad_reg}, {"eps_rel", c.eps_rel}, {"tol_rel", c.tol_rel}, {"max_iter", c.max_iter},
          {"multistart", c.multistart}, {"seed", c.seed}, {"workers", c.workers},
          {"lbfgs_memory", c.lbfgs_memory}};
}

// --------------------------------------------------------------------------
// Field CSV: "# <json header>", "ix,iy,value", then one row per lattice node.

inline std::string field_csv(const ScalarField& f, const json& header) {
  const GridDomain& d = f.domain();
  std::string s = "# " + header.dump() + "\nix,iy,value\n";
  for (int n = 0; n < d.node_count(); ++n) {
    s += std::to_string(d.ix_of(n));
    s += ',';
    s += std::to_string(d.iy_of(n));
    s += ',';
    s += format_double(f[n]);
    s += '\n';
  }
  return s;
}

inline void write_field_csv(const std::string& path, const ScalarField& f, const json& header) {
  write_text(path, field_csv(f, header));
}

struct FieldFile {
  json header;
  ScalarField field;
};

/// Reads a field written by write_field_csv back onto `domain`.
inline FieldFile read_field_csv(const std::string& path, const DomainPtr& domain) {
  std::istringstream in(read_text(path));
  std::string line;
  FieldFile out;
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0) throw IoError("field CSV lacks its header line");
  try {
    out.header = json::parse(line.substr(2));
  } catch (const json::exception& e) {
    throw IoError(std::string("field CSV header is not JSON: ") + e.what());
  }
  if (!std::getline(in, line) || line != "ix,iy,value") throw IoError("field CSV lacks the column row");
  std::vector<double> values(static_cast<std::size_t>(domain->node_count()), 0.0);
  std::vector<char> seen(values.size(), 0);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos) throw IoError("malformed field CSV row: " + line);
    const int ix = static_cast<int>(parse_double(std::string_view(line).substr(0, c1)));
    const int iy = static_cast<int>(parse_double(std::string_view(line).substr(c1 + 1, c2 - c1 - 1)));
    if (ix < 0 || iy < 0 || ix >= domain->nx() || iy >= domain->ny()) throw IoError("field CSV node out of range");
    const int n = domain->node_index(ix, iy);
    values[static_cast<std::size_t>(n)] = parse_double(std::string_view(line).substr(c2 + 1));
    seen[static_cast<std::size_t>(n)] = 1;
  }
  for (char s : seen)
    if (!s) throw IoError("field CSV does not cover every node");
  out.field = ScalarField(domain, std::move(values));
  return out;
}

// --------------------------------------------------------------------------
// Result summaries.

inline json to_json(const MinimizerResult& r) {
  json objs = json::array();
  for (double o : r.restart_objectives) objs.push_back(num(o));
  return {{"objective", num(r.objective)}, {"log_value", num(r.log_value)}, {"log_scale", num(r.log_scale)},
          {"iterations", r.iterations}, {"restarts_agreeing", r.restarts_agreeing}, {"restart_objectives", objs}};
}

inline json to_json(const QSweepRecord& r) {
  return {{"q", r.q}, {"Lambda_q", num(r.Lambda_q)}, {"log_lambda_q", num(r.log_lambda_q)},
          {"sup_norm", num(r.sup_norm_uq)}, {"log_sup_norm", num(r.log_sup_norm_uq)},
          {"sup_bound_ok", r.sup_bound_ok}, {"lower_bound_ok", r.lower_bound_ok}, {"level_set_ok", r.level_set_ok},
          {"iterations", r.iterations}};
}

inline std::string sweep_csv(const std::vector<QSweepRecord>& records) {
  std::string s = "q,Lambda_q,log_lambda_q,sup_norm,sup_bound_ok,lower_bound_ok\n";
  for (const auto& r : records) {
    s += format_double(r.q) + ',' + format_double(r.Lambda_q) + ',' + format_double(r.log_lambda_q) + ',' +
         format_double(r.sup_norm_uq) + ',' + (r.sup_bound_ok ? "1" : "0") + ',' + (r.lower_bound_ok ? "1" : "0") +
         '\n';
  }
  return s;
}

inline json to_json(const MuReport& m) {
  json notes = json::array();
  for (const auto& n : m.notes) notes.push_back(n);
  return {{"mu_sweep", num(m.mu_sweep)}, {"mu_direct", num(m.mu_direct)}, {"mu_singular", num(m.mu_singular)},
          {"spread", num(m.spread)}, {"lower_bound", num(m.lower_bound)}, {"consistent", m.consistent},
          {"notes", notes}};
}

inline json to_json(const AsymptoticClass& c) {
  json j{{"volume", c.volume},
         {"lambda_observed", to_string(c.lambda_observed)},
         {"lambda_predicted", to_string(c.lambda_predicted)},
         {"sup_observed", to_string(c.sup_observed)},
         {"sup_predicted", to_string(c.sup_predicted)},
         {"mismatch", c.mismatch}};
  if (c.sup_bracket) j["sup_over_mu_root_bracket"] = {num(c.sup_bracket->first), num(c.sup_bracket->second)};
  if (c.mu_estimate) j["mu_estimate"] = num(*c.mu_estimate);
  return j;
}

inline json to_json(const IdentityReport& r) {
  json checks = json::array();
  for (const auto& c : r.checks) {
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"value", num(c.value)},
                      {"expected", num(c.expected)}, {"tolerance", num(c.tolerance)}, {"detail", c.detail}});
  }
  return {{"schema_version", kSchemaVersion}, {"all_passed", r.all_passed()}, {"checks", checks}};
}

inline std::string to_markdown(const IdentityReport& r) {
  std::string s = "# Identity checks\n\n| check | result | value | expected | tolerance |\n|---|---|---|---|---|\n";
  for (const auto& c : r.checks) {
    s += "| " + c.name + " | " + (c.passed ? "pass" : "FAIL") + " | " + format_double(c.value) + " | " +
         format_double(c.expected) + " | " + format_double(c.tolerance) + " |\n";
  }
  s += std::string("\nOverall: ") + (r.all_passed() ? "pass" : "FAIL") + "\n";
  return s;
}

inline std::string to_markdown(const std::vector<QSweepRecord>& recs, const MuReport* mu, const AsymptoticClass* c) {
  std::string s = "# q-sweep\n\n| q | Lambda_q | log lambda_q | sup norm | sup bound | lower bound |\n|---|---|---|---|---|---|\n";
  for (const auto& r : recs) {
    s += "| " + format_double(r.q) + " | " + format_double(r.Lambda_q) + " | " + format_double(r.log_lambda_q) +
         " | " + format_double(r.sup_norm_uq) + " | " + (r.sup_bound_ok ? "ok" : "FAIL") + " | " +
         (r.lower_bound_ok ? "ok" : "FAIL") + " |\n";
  }
  if (c) {
    s += "\nlambda_q: observed " + to_string(c->lambda_observed) + ", predicted " + to_string(c->lambda_predicted) +
         "\nsup norm: observed " + to_string(c->sup_observed) + ", predicted " + to_string(c->sup_predicted) + "\n";
  }
  if (mu) {
    s += "\nmu: sweep " + format_double(mu->mu_sweep) + ", direct " + format_double(mu->mu_direct) + ", singular " +
         format_double(mu->mu_singular) + ", spread " + format_double(mu->spread) + "\n";
  }
  return s;
}

// --------------------------------------------------------------------------
// Radial solutions.

inline std::string radial_csv(const RadialSolution& s) {
  std::string out = "r,w\n";
  const double scale = std::exp(s.log_scale);
  for (std::size_t k = 0; k < s.grid.size(); ++k)
    out += format_double(s.grid[k]) + ',' + format_double(scale * s.profile[k]) + '\n';
  return out;
}

inline json to_json(const RadialSolution& s) {
  return {{"schema_version", kSchemaVersion}, {"kind", to_string(s.kind)}, {"N", s.N}, {"p", s.p},
          {"q_or_lam", s.q_or_lam}, {"radius", s.radius}, {"lambda", num(s.lambda)},
          {"log_lambda", num(s.log_lambda)}, {"mu", num(s.mu)}, {"log_mean", num(s.log_mean)},
          {"log_sup_norm", num(s.log_scale)}, {"sup_norm", num(s.sup_norm())}};
}

}  // namespace singmin

#endif  // SINGMIN_IO_HPP
