#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <future>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "xres/acceptance.hpp"
#include "xres/airy.hpp"
#include "xres/config.hpp"
#include "xres/crossing.hpp"
#include "xres/errors.hpp"
#include "xres/exactsys.hpp"
#include "xres/genairy.hpp"
#include "xres/output.hpp"
#include "xres/resonances.hpp"

namespace xres::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitNumeric = 1;
inline constexpr int kExitUsage = 2;

// "a:b:step" or a single value.
inline std::vector<double> parse_range(const std::string& s) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  try {
    if (parts.size() == 1) return {std::stod(parts[0])};
    if (parts.size() != 3) throw ConfigError("range must be a value or lo:hi:step");
    const double lo = std::stod(parts[0]), hi = std::stod(parts[1]), step = std::stod(parts[2]);
    if (!(step > 0.0) || hi < lo) throw ConfigError("range needs lo <= hi and a positive step");
    const long count = std::lround(std::floor((hi - lo) / step + 1e-9));
    std::vector<double> out;
    for (long i = 0; i <= count; ++i) out.push_back(lo + step * static_cast<double>(i));
    return out;
  } catch (const std::logic_error& e) {
    if (dynamic_cast<const ConfigError*>(&e)) throw;
    throw ConfigError("cannot parse range '" + s + "'");
  }
}

inline std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  for (std::string p; std::getline(ss, p, ',');) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(p, &used));
      if (used != p.size()) throw ConfigError("");
    } catch (const std::logic_error&) {
      throw ConfigError("cannot parse number '" + p + "'");
    }
  }
  return out;
}

inline std::vector<double> parse_h_grid(const std::string& s) {
  const std::vector<double> hs = parse_list(s);
  if (hs.empty()) throw ConfigError("h-grid is empty");
  for (std::size_t i = 0; i < hs.size(); ++i) {
    if (!(hs[i] > 0.0)) throw ConfigError("h values must be positive");
    if (i > 0 && !(hs[i] < hs[i - 1])) throw ConfigError("h-grid must be strictly decreasing");
  }
  return hs;
}

// Runs f(0..n-1) concurrently; results keep index order.
template <class T>
std::vector<T> parallel_map(std::size_t n, const std::function<T(std::size_t)>& f) {
  const std::size_t workers = std::clamp(std::thread::hardware_concurrency(), 1u, 4u);
  std::vector<T> out(n);
  for (std::size_t base = 0; base < n; base += workers) {
    std::vector<std::future<T>> batch;
    for (std::size_t i = base; i < std::min(n, base + workers); ++i) batch.push_back(std::async(std::launch::async, f, i));
    for (std::size_t i = 0; i < batch.size(); ++i) out[base + i] = batch[i].get();
  }
  return out;
}

struct Sink {
  std::ostream& out;
  std::string path;
  OutputFormat format = OutputFormat::csv;

  void emit(const std::vector<Table>& tables) const {
    if (path.empty() || path == "-") {
      for (const Table& t : tables) write_table(out, t, format);
      return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open output file " + path);
    for (const Table& t : tables) write_table(f, t, format);
  }
};

struct CommonArgs {
  std::string output;
  std::string format = "csv";
};

inline void add_common(CLI::App* sub, CommonArgs& a) {
  sub->add_option("-o,--output", a.output, "output file (default stdout)");
  sub->add_option("-f,--format", a.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
}

inline ModelConfig load_with_override(const std::string& path, double r0_override, bool has_override) {
  ModelConfig m = load_model_config(path);
  if (has_override) m.interaction.r0_amplitude = r0_override;
  return m;
}

inline std::vector<Cell> matrix_cells(const Eigen::Matrix2cd& m) {
  std::vector<Cell> c;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      c.emplace_back(m(i, j).real());
      c.emplace_back(m(i, j).imag());
    }
  return c;
}

inline std::vector<std::string> matrix_columns(const std::string& prefix) {
  std::vector<std::string> c;
  for (const char* e : {"11", "12", "21", "22"}) {
    c.push_back(prefix + e + "_re");
    c.push_back(prefix + e + "_im");
  }
  return c;
}

struct AiryArgs {
  CommonArgs common;
  int n = 1;
  std::string y = "0";
};

inline Table cmd_airy(const AiryArgs& a) {
  if (a.n < 1 || a.n > kGenAiryMaxOrder) throw ConfigError("n must be between 1 and 6");
  const std::vector<double> ys = parse_range(a.y);
  Table t{"airy", {"n", "y", "ai", "ai_deriv", "bi", "bi_deriv", "ci_re", "ci_im", "gen_airy", "method", "est_error"}, {}};
  for (double y : ys) {
    const AiryPair p = airy_eval(y);
    const CiPair c = detail::ci_from(p);
    const GenAiryResult g = gen_airy(a.n, y);
    t.add({static_cast<long long>(a.n), y, p.ai, p.ai_deriv, p.bi, p.bi_deriv, c.ci.real(), c.ci.imag(), g.value,
           std::string(to_string(g.method)), g.est_error});
  }
  return t;
}

struct ScanArgs {
  CommonArgs common;
  std::string model;
  std::string h_grid;
  std::string lambda = "0";
  double L = 1.0;
  double r0 = 1.0;
  bool has_r0 = false;
};

inline std::vector<Table> cmd_scan_integral(const ScanArgs& a) {
  const std::vector<double> hs = parse_h_grid(a.h_grid);
  const std::vector<double> lambdas = parse_list(a.lambda);
  if (lambdas.empty()) throw ConfigError("lambda grid is empty");
  const ModelConfig m = load_with_override(a.model, a.r0, a.has_r0);
  const CrossingData cd = detect_contact_order(m.potentials);
  struct Row {
    SemiclassicalPoint p;
    IntegralResult I;
    AsymptoticIntegral lead;
  };
  const std::size_t total = hs.size() * lambdas.size();
  for (double lam : lambdas)
    for (double h : hs) make_point_at_lambda(lam, h, cd.n, a.L);  // validates the window before any work
  const std::vector<Row> rows = parallel_map<Row>(total, [&](std::size_t k) {
    const double lam = lambdas[k / hs.size()], h = hs[k % hs.size()];
    const SemiclassicalPoint p = make_point_at_lambda(lam, h, cd.n, a.L);
    return Row{p, crossing_integral(m.potentials, m.interaction, p.E.real(), h),
               crossing_integral_asymptotic(p, cd, m.interaction.r0_at_0())};
  });
  Table t{"scan-integral",
          {"n", "lambda", "h", "E", "window", "I_quadrature", "est_error", "I_leading", "ratio", "residual", "kappa",
           "error_order", "panels"},
          {}};
  Table s{"scan-integral-summary", {"n", "lambda", "points", "residual_slope"}, {}};
  for (std::size_t li = 0; li < lambdas.size(); ++li) {
    std::vector<double> hv, rv;
    for (std::size_t hi = 0; hi < hs.size(); ++hi) {
      const Row& r = rows[li * hs.size() + hi];
      const double ratio = r.lead.value != 0.0 ? r.I.value / r.lead.value : 0.0;
      const double residual = std::abs(ratio - 1.0);
      const double kappa =
          kappa_n(cd, m.interaction.r0_at_0(), r.p.window == EnergyWindow::small ? 0.0 : r.p.lambda);
      t.add({static_cast<long long>(cd.n), lambdas[li], r.p.h, r.p.E.real(), std::string(to_string(r.p.window)),
             r.I.value, r.I.est_error, r.lead.value, ratio, residual, kappa, r.lead.error_order,
             static_cast<long long>(r.I.panels)});
      if (r.lead.value != 0.0 && residual > 0.0) {
        hv.push_back(r.p.h);
        rv.push_back(residual);
      }
    }
    const double slope = hv.size() >= 2 ? loglog_slope(hv, rv) : std::nan("");
    s.add({static_cast<long long>(cd.n), lambdas[li], static_cast<long long>(hv.size()), slope});
  }
  return {t, s};
}

struct TransferArgs {
  CommonArgs common;
  std::string model;
  std::string h_grid;
  std::string lambda = "0";
  double r0 = 1.0;
  bool has_r0 = false;
};

inline Table cmd_transfer(const TransferArgs& a) {
  const std::vector<double> hs = parse_h_grid(a.h_grid);
  const std::vector<double> lambdas = parse_list(a.lambda);
  if (lambdas.empty()) throw ConfigError("lambda grid is empty");
  const ModelConfig m = load_with_override(a.model, a.r0, a.has_r0);
  const CrossingData cd = detect_contact_order(m.potentials);
  const std::size_t total = hs.size() * lambdas.size();
  const std::vector<TransferOracleReport> reps = parallel_map<TransferOracleReport>(total, [&](std::size_t k) {
    const double lam = lambdas[k / hs.size()], h = hs[k % hs.size()];
    return transfer_matrix_numeric(m.potentials, m.interaction, lam * std::pow(h, 2.0 / (2.0 * cd.n + 1.0)), h);
  });
  std::vector<std::string> cols{"E", "h", "n"};
  for (const auto& c : matrix_columns("T_numeric_")) cols.push_back(c);
  for (const auto& c : matrix_columns("T_asymptotic_")) cols.push_back(c);
  for (const char* c : {"offdiag_ratio_re", "offdiag_ratio_im", "diag_deviation", "contraction_ratio",
                        "system_residual", "wronskian_drift", "condition"})
    cols.push_back(c);
  Table t{"transfer", cols, {}};
  for (const TransferOracleReport& r : reps) {
    std::vector<Cell> row{r.E, r.h, static_cast<long long>(r.n)};
    for (const Cell& c : matrix_cells(r.numeric.entries)) row.push_back(c);
    for (const Cell& c : matrix_cells(r.asymptotic.entries)) row.push_back(c);
    for (double v : {r.offdiag_ratio[0].real(), r.offdiag_ratio[0].imag(), r.diag_deviation, r.contraction_ratio,
                     r.residual, r.wronskian_drift, r.condition})
      row.emplace_back(v);
    t.add(std::move(row));
  }
  return t;
}

struct ResonanceArgs {
  CommonArgs common;
  std::string model;
  double h = 0.0;
  double L = 1.0;
  std::string window = "full";
  double delta1 = 0.0;
};

inline Table cmd_resonances(const ResonanceArgs& a) {
  if (!(a.h > 0.0)) throw ConfigError("h must be positive");
  const ModelConfig m = load_model_config(a.model);
  const CrossingData cd = detect_contact_order(m.potentials);
  ResonanceWindow w;
  if (a.window == "small") {
    if (!(a.delta1 > 0.0)) throw ConfigError("the small window needs --delta1 > 0");
    w = small_window(a.h, cd.n, a.delta1, a.L);
  } else {
    w = full_window(a.h, cd.n, a.L);
  }
  Table t{"resonances",
          {"E_bs", "re_z", "im_z", "lambda", "kappa", "window", "boundary_flag", "error_exponent_re",
           "error_exponent_im"},
          {}};
  for (const ResonancePrediction& p : predict_resonances(m.potentials, m.interaction, w))
    t.add({p.E_bs, p.z.real(), p.z.imag(), p.lambda, p.kappa, std::string(to_string(p.window)), p.boundary,
           p.error_exponent_re, p.error_exponent_im});
  return t;
}

struct CheckArgs {
  std::vector<int> criteria{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  bool quick = false;
};

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Crossing-resonance toolkit: Airy tables, crossing integrals, transfer oracle, resonance tables"};
  app.set_config("--config", "", "read options from a TOML/INI file");
  app.set_help_flag("--help", "print help and exit");  // -h is taken by resonances --h
  app.require_subcommand(1);

  AiryArgs airy;
  CLI::App* s_airy = app.add_subcommand("airy", "Ai/Bi/Ci and generalized Airy A_n on a grid");
  s_airy->add_option("--n", airy.n, "order of A_n (1-6)");
  s_airy->add_option("--y", airy.y, "value or lo:hi:step");
  add_common(s_airy, airy.common);

  ScanArgs scan;
  CLI::App* s_scan = app.add_subcommand("scan-integral", "crossing integral against its leading asymptotics");
  s_scan->add_option("--model", scan.model, "model JSON file")->required();
  s_scan->add_option("--h-grid", scan.h_grid, "comma-separated, strictly decreasing")->required();
  s_scan->add_option("--lambda", scan.lambda, "comma-separated scaled energies");
  s_scan->add_option("--L", scan.L, "window half-width factor");
  CLI::Option* scan_r0 = s_scan->add_option("--r0", scan.r0, "override the interaction amplitude r0");
  add_common(s_scan, scan.common);

  TransferArgs tr;
  tr.common.format = "json";
  CLI::App* s_tr = app.add_subcommand("transfer", "numeric transfer matrix against the asymptotic form");
  s_tr->add_option("--model", tr.model, "model JSON file")->required();
  s_tr->add_option("--h-grid", tr.h_grid, "comma-separated, strictly decreasing")->required();
  s_tr->add_option("--lambda", tr.lambda, "comma-separated scaled energies");
  CLI::Option* tr_r0 = s_tr->add_option("--r0", tr.r0, "override the interaction amplitude r0");
  add_common(s_tr, tr.common);

  ResonanceArgs res;
  CLI::App* s_res = app.add_subcommand("resonances", "Bohr-Sommerfeld points and predicted resonances");
  s_res->add_option("--model", res.model, "model JSON file")->required();
  s_res->add_option("--h", res.h, "semiclassical parameter")->required();
  s_res->add_option("--L", res.L, "window half-width factor");
  s_res->add_option("--window", res.window, "full or small")->check(CLI::IsMember({"full", "small"}));
  s_res->add_option("--delta1", res.delta1, "half-width of the small window");
  add_common(s_res, res.common);

  CheckArgs chk;
  CLI::App* s_chk = app.add_subcommand("check", "run the acceptance suite");
  s_chk->add_option("--criteria", chk.criteria, "criterion numbers (default all)")->delimiter(',');
  s_chk->add_flag("--quick", chk.quick, "short h-grids (smoke run, not a certification)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (s_airy->parsed()) {
      Sink{out, airy.common.output, parse_format(airy.common.format)}.emit({cmd_airy(airy)});
    } else if (s_scan->parsed()) {
      scan.has_r0 = scan_r0->count() > 0;
      Sink{out, scan.common.output, parse_format(scan.common.format)}.emit(cmd_scan_integral(scan));
    } else if (s_tr->parsed()) {
      tr.has_r0 = tr_r0->count() > 0;
      Sink{out, tr.common.output, parse_format(tr.common.format)}.emit({cmd_transfer(tr)});
    } else if (s_res->parsed()) {
      Sink{out, res.common.output, parse_format(res.common.format)}.emit({cmd_resonances(res)});
    } else if (s_chk->parsed()) {
      for (int id : chk.criteria)
        if (id < 1 || id > 10) throw ConfigError("criteria are numbered 1 to 10");
      AcceptanceOptions opt;
      opt.quick = chk.quick;
      bool all = true;
      run_acceptance(chk.criteria, opt, [&](const CriterionResult& r) {
        out << format_criterion(r) << '\n' << std::flush;
        all = all && r.pass;
      });
      return all ? kExitOk : kExitNumeric;
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ModelError& e) {
    err << "model error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const RangeError& e) {
    err << "range error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConditioningError& e) {
    err << "numeric error: " << e.what() << " (condition number " << e.condition << ")\n";
    return kExitNumeric;
  } catch (const ConvergenceError& e) {
    err << "numeric error: " << e.what() << " (contraction ratio " << e.ratio << ")\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    err << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  }
  return kExitOk;
}

}  // namespace xres::cli
