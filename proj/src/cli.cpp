#include "adlab/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "adlab/divisor.hpp"
#include "adlab/error_term.hpp"
#include "adlab/meansquare.hpp"
#include "adlab/voronoi.hpp"

namespace adlab {

namespace {

using ojson = nlohmann::ordered_json;

ojson num(double v) { return std::isfinite(v) ? ojson(v) : ojson(nullptr); }

ojson params_json(const Params& p) {
  return {{"a", p.a}, {"b", p.b}, {"M1", p.m1}, {"M2", p.m2}, {"l1", p.l1}, {"l2", p.l2}};
}

std::string csv_cell(const ojson& v) {
  if (v.is_null()) return "";
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_float()) return fmt15(v.get<double>());
  if (v.is_boolean()) return v.get<bool>() ? "1" : "0";
  return v.dump();
}

// Every command but meansquare emits {command, params, rows: [...]}.
void emit(std::ostream& os, const RunConfig& cfg, const std::string& name, const ojson& rows) {
  if (cfg.format == OutputFormat::json) {
    ojson doc;
    doc["command"] = name;
    doc["params"] = params_json(cfg.params);
    doc["rows"] = rows;
    os << doc.dump(2) << '\n';
    return;
  }
  if (rows.empty()) return;
  bool first = true;
  for (const auto& [k, v] : rows.front().items()) {
    os << (first ? "" : ",") << k;
    first = false;
  }
  os << '\n';
  for (const auto& row : rows) {
    first = true;
    for (const auto& [k, v] : row.items()) {
      os << (first ? "" : ",") << csv_cell(v);
      first = false;
    }
    os << '\n';
  }
}

void check_budget(u128 n, const RunConfig& cfg, const char* what) {
  if (n > cfg.max_n) {
    throw BudgetError(std::string(what) + " = " + to_string(n) + " exceeds --max-n " + std::to_string(cfg.max_n));
  }
}

u64 scaled_n(double x, const Params& p) {
  const long double n = std::floor(static_cast<long double>(x) * static_cast<long double>(p.scale()));
  if (!(n >= 1.0L && n < 0x1p63L)) throw BudgetError("scaled abscissa out of range");
  return static_cast<u64>(n);
}

void run_tau(std::ostream& os, const RunConfig& cfg) {
  const u128 n = parse_u128(cfg.n);
  if (n == 0) throw std::invalid_argument("--n must be >= 1");
  check_budget(ikth_root(n, std::max(cfg.params.a, cfg.params.b)), cfg, "enumeration length n^{1/max(a,b)}");
  const u64 t = tau_point(n, cfg.params);
  if (cfg.format == OutputFormat::csv) {
    os << t << '\n';
    return;
  }
  emit(os, cfg, "tau", ojson::array({{{"n", to_string(n)}, {"tau", t}}}));
}

void run_sieve(std::ostream& os, const RunConfig& cfg) {
  check_budget(cfg.nmax, cfg, "--nmax");
  const auto counts = tau_sieve(cfg.nmax, cfg.params, cfg.threads);
  if (!cfg.dump.empty()) {
    std::ofstream f(cfg.dump, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + cfg.dump);
    write_sieve_dump(f, cfg.params, 0, std::vector<std::uint32_t>(counts.begin() + 1, counts.end()));
  }
  ojson rows = ojson::array();
  for (u64 n = 1; n <= cfg.nmax; ++n) rows.push_back({{"n", n}, {"tau", counts[n]}});
  emit(os, cfg, "sieve", rows);
}

ojson delta_json(const DeltaRow& r) {
  return {{"n", to_string(r.n)},
          {"x", num(r.x)},
          {"summatory", to_string(r.summatory)},
          {"main_term", num(r.main_term)},
          {"delta", num(r.delta)}};
}

void run_delta(std::ostream& os, const RunConfig& cfg) {
  const u128 n = parse_u128(cfg.n);
  check_budget(n, cfg, "--n");
  const EvalPoint pt(n, cfg.params.scale());
  emit(os, cfg, "delta", ojson::array({delta_json(delta_row(pt, cfg.params, MainTermCoeffs::from(cfg.params)))}));
}

void run_sweep(std::ostream& os, const RunConfig& cfg) {
  const Params& p = cfg.params;
  const u64 lo = scaled_n(1.0, p);
  const u64 hi = scaled_n(cfg.t, p);
  check_budget(hi, cfg, "N = M1^a M2^b T");
  if (cfg.points < 2) throw std::invalid_argument("--points must be >= 2");
  const MainTermCoeffs mt = MainTermCoeffs::from(p);
  ojson rows = ojson::array();
  u128 prev = 0;
  for (u64 i = 0; i < cfg.points; ++i) {
    const u128 n = lo + static_cast<u128>(hi - lo) * i / (cfg.points - 1);
    if (i > 0 && n == prev) continue;
    prev = n;
    rows.push_back(delta_json(delta_row(EvalPoint(n, p.scale()), p, mt)));
  }
  emit(os, cfg, "sweep", rows);
}

void run_voronoi(std::ostream& os, const RunConfig& cfg) {
  const Params& p = cfg.params;
  const u64 lo = scaled_n(cfg.t, p);
  const u64 hi = scaled_n(2.0 * cfg.t, p);
  check_budget(hi, cfg, "N = M1^a M2^b 2T");
  if (cfg.points < 2) throw std::invalid_argument("--points must be >= 2");
  const double z = cfg.z >= 0.0 ? cfg.z : default_z(cfg.t, p);
  if (z > 1e6) throw BudgetError("--z exceeds 1e6");
  const VoronoiTable table(p, z);
  const MainTermCoeffs mt = MainTermCoeffs::from(p);
  ojson rows = ojson::array();
  for (u64 i = 0; i < cfg.points; ++i) {
    const u128 n = lo + static_cast<u128>(hi - lo) * i / (cfg.points - 1);
    const EvalPoint pt(n, p.scale());
    const double d = delta(pt, p, mt);
    const double ds = table(pt.x());
    rows.push_back({{"x", num(pt.x())}, {"delta", num(d)}, {"delta_star", num(ds)}, {"remainder", num(d - ds)}});
  }
  emit(os, cfg, "voronoi", rows);
}

void run_meansquare(std::ostream& os, const RunConfig& cfg) {
  const u64 hi = scaled_n(cfg.t, cfg.params);
  check_budget(hi, cfg, "N = M1^a M2^b T");
  const auto grid = doubling_grid(std::min(cfg.t_min, cfg.t), cfg.t);
  const MeanSquareReport r = meansquare_report(cfg.params, grid, cfg.nmax);
  if (cfg.format == OutputFormat::json) {
    write_report_json(os, r);
  } else {
    write_report_csv(os, r);
  }
}

void run_cstar(std::ostream& os, const RunConfig& cfg) {
  check_budget(cfg.nmax, cfg, "--nmax");
  const SeriesBracket b = cstar(cfg.params, cfg.nmax);
  emit(os, cfg, "cstar",
       ojson::array({{{"value", num(b.value)},
                      {"lower", num(b.lower)},
                      {"upper", num(b.upper)},
                      {"terms", b.terms_used},
                      {"tail_exponent", num(b.tail_exponent)}}}));
}

void run_diag(std::ostream& os, const RunConfig& cfg) {
  const Params& p = cfg.params;
  ojson rows = ojson::array();
  if (cfg.kind == "psi") {
    SplitMix64 rng(cfg.seed);
    for (u64 i = 0; i < cfg.points; ++i) {
      const double u = rng.uniform();
      const double t = psi_truncated(u, cfg.h_order);
      rows.push_back({{"u", num(u)},
                      {"psi", num(psi_saw(u))},
                      {"psi_truncated", num(t)},
                      {"error", num(std::abs(psi_saw(u) - t))},
                      {"bound", num(psi_truncation_bound(u, cfg.h_order))}});
    }
  } else if (cfg.kind == "bprocess") {
    const auto w0 = BProcessWindow::make(0, 1, cfg.t, p);
    for (u64 h = 1; h <= static_cast<u64>(cfg.h_order); ++h) {
      for (long j = 0; j <= w0.J; ++j) {
        const auto w = BProcessWindow::make(static_cast<unsigned>(j), h, cfg.t, p);
        try {
          const auto r = bprocess_check(w, p);
          rows.push_back({{"j", j},
                          {"h", h},
                          {"lhs_re", num(r.lhs.real())},
                          {"lhs_im", num(r.lhs.imag())},
                          {"rhs_re", num(r.rhs.real())},
                          {"rhs_im", num(r.rhs.imag())},
                          {"diff", num(r.diff)},
                          {"lhs_terms", r.lhs_terms},
                          {"rhs_terms", r.rhs_terms}});
        } catch (const std::invalid_argument&) {
          // empty window
        }
      }
    }
  } else if (cfg.kind == "remainder") {
    const double z = cfg.z >= 0.0 ? cfg.z : default_z(cfg.t, p);
    check_budget(scaled_n(2.0 * cfg.t, p), cfg, "N = M1^a M2^b 2T");
    const auto r = remainder_meansquare(cfg.t, z, p);
    rows.push_back({{"T", num(cfg.t)}, {"z", num(z)}, {"e2", num(r.e2)}, {"d2", num(r.d2)}, {"ratio", num(r.ratio)}});
  } else if (cfg.kind == "sab") {
    rows.push_back({{"T", num(cfg.t)}, {"cap", num(cfg.cap)}, {"S_ab", num(eval_S_ab(cfg.t, cfg.cap, p))}});
  } else {
    throw std::invalid_argument("--kind must be one of psi, bprocess, remainder, sab");
  }
  emit(os, cfg, "diag-" + cfg.kind, rows);
}

void dispatch(std::ostream& os, const RunConfig& cfg) {
  switch (cfg.command) {
    case Command::tau: return run_tau(os, cfg);
    case Command::sieve: return run_sieve(os, cfg);
    case Command::delta: return run_delta(os, cfg);
    case Command::sweep: return run_sweep(os, cfg);
    case Command::voronoi: return run_voronoi(os, cfg);
    case Command::meansquare: return run_meansquare(os, cfg);
    case Command::cstar: return run_cstar(os, cfg);
    case Command::diag: return run_diag(os, cfg);
  }
}

}  // namespace

int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"adlab: congruence-restricted asymmetric divisor problem lab"};
  app.require_subcommand(1);
  RunConfig cfg;
  unsigned a = 1, b = 1;
  u64 m1 = 1, m2 = 1, l1 = 1, l2 = 1;
  std::string format = "csv";

  const std::map<std::string, Command> names = {
      {"tau", Command::tau},         {"sieve", Command::sieve},     {"delta", Command::delta},
      {"sweep", Command::sweep},     {"voronoi", Command::voronoi}, {"meansquare", Command::meansquare},
      {"cstar", Command::cstar},     {"diag", Command::diag}};
  for (const auto& [name, cmd] : names) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--a", a)->required();
    sub->add_option("--b", b)->required();
    sub->add_option("--m1", m1);
    sub->add_option("--m2", m2);
    sub->add_option("--l1", l1);
    sub->add_option("--l2", l2);
    sub->add_option("--n", cfg.n, "argument N (decimal, 128-bit)");
    sub->add_option("--t", cfg.t, "T or x");
    sub->add_option("--t-min", cfg.t_min, "smallest T of the report grid");
    sub->add_option("--z", cfg.z, "Voronoi cutoff (default: the log-adjusted x^{a/b})");
    sub->add_option("--h-order", cfg.h_order, "H for psi truncation; largest h for bprocess");
    sub->add_option("--nmax", cfg.nmax);
    sub->add_option("--points", cfg.points);
    sub->add_option("--cap", cfg.cap, "S_ab cap");
    sub->add_option("--kind", cfg.kind, "diag kind: psi, bprocess, remainder, sab");
    sub->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--out", cfg.out);
    sub->add_option("--dump", cfg.dump, "binary sieve dump path");
    sub->add_option("--threads", cfg.threads)->check(CLI::PositiveNumber);
    sub->add_option("--seed", cfg.seed);
    sub->add_option("--max-n", cfg.max_n, "largest scaled N any command may touch");
    sub->callback([&cfg, cmd = cmd] { cfg.command = cmd; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, err, err);
    err << app.help();
    return kExitUsage;
  }

  try {
    cfg.params = Params::make(a, b, m1, m2, l1, l2);
    cfg.format = format == "json" ? OutputFormat::json : OutputFormat::csv;
    if (cfg.out.empty()) {
      dispatch(out, cfg);
    } else {
      std::ofstream f(cfg.out);
      if (!f) throw std::runtime_error("cannot open " + cfg.out);
      dispatch(f, cfg);
    }
  } catch (const BudgetError& e) {
    err << "error: " << e.what() << '\n';
    return kExitBudget;
  } catch (const std::overflow_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitBudget;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return kExitOk;
}

}  // namespace adlab
