#pragma once

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <exception>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "bvortex.hpp"

namespace bvortex::cli {

using json = nlohmann::ordered_json;

inline constexpr const char* tool_version = "0.1.0";

enum exit_code : int { exit_ok = 0, exit_invalid = 2, exit_numerical = 3, exit_usage = 64, exit_io = 74 };

struct io_error : error {
  using error::error;
};

// 64-bit FNV-1a, printed as 16 hex digits.
inline std::string fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Runs f(0..n-1) on up to `threads` workers; the first failure (by index) is rethrown.
inline void parallel_for(int n, int threads, const std::function<void(int)>& f) {
  threads = std::max(1, std::min(threads, n));
  std::vector<std::exception_ptr> errs(n);
  if (threads == 1) {
    for (int i = 0; i < n; ++i) {
      try {
        f(i);
      } catch (...) {
        errs[i] = std::current_exception();
      }
    }
  } else {
    std::mutex mu;
    int next = 0;
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (;;) {
          int i;
          {
            std::lock_guard<std::mutex> lk(mu);
            if (next >= n) return;
            i = next++;
          }
          try {
            f(i);
          } catch (...) {
            errs[i] = std::current_exception();
          }
        }
      });
    for (auto& th : pool) th.join();
  }
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
}

struct Output {
  std::vector<std::string> columns;
  json rows = json::array();
  json summary = json::object();

  void add(std::initializer_list<json> values) {
    json row = json::object();
    size_t k = 0;
    for (const auto& v : values) row[columns.at(k++)] = v;
    rows.push_back(std::move(row));
  }
};

// ---------------------------------------------------------------------------
// Config access. Values come from the JSON config file, overridden by flags.

inline const json& need(const json& cfg, const std::string& key) {
  if (!cfg.contains(key) || cfg.at(key).is_null()) throw config_error("missing parameter --" + key);
  return cfg.at(key);
}

inline double num(const json& v, const std::string& key) {
  if (!v.is_number()) throw config_error("parameter --" + key + " must be a number");
  return v.get<double>();
}

inline double get_real(const json& cfg, const std::string& key) { return num(need(cfg, key), key); }
inline double get_real(const json& cfg, const std::string& key, double dflt) {
  return cfg.contains(key) ? get_real(cfg, key) : dflt;
}

inline long long get_int(const json& cfg, const std::string& key, long long dflt) {
  if (!cfg.contains(key)) return dflt;
  const json& v = cfg.at(key);
  if (!v.is_number_integer()) throw config_error("parameter --" + key + " must be an integer");
  return v.get<long long>();
}

inline std::vector<double> get_reals(const json& cfg, const std::string& key) {
  const json& v = need(cfg, key);
  std::vector<double> out;
  if (v.is_array()) {
    for (const auto& x : v) out.push_back(num(x, key));
  } else {
    out.push_back(num(v, key));
  }
  if (out.empty()) throw config_error("parameter --" + key + " must not be empty");
  return out;
}

inline std::vector<double> get_reals(const json& cfg, const std::string& key, std::vector<double> dflt) {
  return cfg.contains(key) ? get_reals(cfg, key) : dflt;
}

inline std::string get_text(const json& cfg, const std::string& key, const std::string& dflt) {
  if (!cfg.contains(key)) return dflt;
  if (!cfg.at(key).is_string()) throw config_error("parameter --" + key + " must be a string");
  return cfg.at(key).get<std::string>();
}

inline DmiVector get_delta(const json& cfg) {
  auto v = get_reals(cfg, "delta", {0.0, 0.0});
  if (v.size() != 2) throw config_error("--delta takes two components");
  return {v[0], v[1]};
}

inline std::uint64_t get_seed(const json& cfg) {
  if (!cfg.contains("seed")) return 0;
  const json& v = cfg.at("seed");
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
    throw config_error("--seed must be a non-negative integer");
  return v.get<std::uint64_t>();
}

inline json energy_json(const EnergyBreakdown& e) {
  return {{"dirichlet", e.dirichlet},
          {"dmi", e.dmi},
          {"boundary_penalty", e.boundary_penalty},
          {"potential", e.potential},
          {"total", e.total}};
}

inline MinimizeOptions minimize_options(const json& cfg) {
  MinimizeOptions o;
  o.restarts = static_cast<int>(get_int(cfg, "restarts", 1));
  o.max_iter = static_cast<int>(get_int(cfg, "max-iter", o.max_iter));
  o.seed = get_seed(cfg);
  if (o.restarts > 1 && !cfg.contains("seed")) throw config_error("--seed is required when --restarts > 1");
  return o;
}

// ---------------------------------------------------------------------------
// Commands.

inline void cmd_renorm(const json& cfg, int, Output& out) {
  VortexConfig c;
  c.angles = get_reals(cfg, "angles");
  if (cfg.contains("degrees")) {
    for (double d : get_reals(cfg, "degrees")) {
      if (d != std::floor(d)) throw config_error("--degrees must be integers");
      c.degrees.push_back(static_cast<int>(d));
    }
  } else {
    c.degrees.assign(c.angles.size(), 1);
  }
  DmiVector delta = get_delta(cfg);
  int M = static_cast<int>(get_int(cfg, "mesh", 4096));
  auto ma = get_reals(cfg, "moebius-a", {0.4, 0.0});
  if (ma.size() != 2) throw config_error("--moebius-a takes two components");
  validate(c);
  BoundaryMesh mesh = disk_boundary_mesh(M);
  out.columns = {"route", "W"};
  double wd = w_disk(c, delta);
  out.add({"disk", wd});
  out.add({"conformal-identity", w_conformal(c, delta, ConformalChart::identity(), mesh)});
  out.add({"conformal-moebius", w_conformal(c, delta, ConformalChart::moebius(cplx(ma[0], ma[1])), mesh)});
  out.add({"neumann", w_neumann(c, delta, neumann_psi(c), mesh)});
  VortexConfig cc = canonical(c);
  double dmin = 2.0;
  for (int j = 0; j < cc.size(); ++j)
    for (int k = j + 1; k < cc.size(); ++k) dmin = std::min(dmin, std::abs(cc.point(j) - cc.point(k)));
  double r0 = 0.5 * dmin;
  auto radii = get_reals(cfg, "radii", {0.4 * r0, 0.2 * r0, 0.1 * r0, 0.05 * r0});
  NumericLimit nl = w_numeric_limit(c, delta, radii);
  out.add({"numeric-limit", nl.extrapolated});
  double spread = 0.0;
  for (const auto& row : out.rows)
    if (row["route"] != "numeric-limit") spread = std::max(spread, std::abs(row["W"].get<double>() - wd));
  out.summary["closed_form_spread"] = spread;
  out.summary["numeric_limit_error"] = std::abs(nl.extrapolated - wd);
  out.summary["numeric_limit_radii"] = nl.radii;
  out.summary["numeric_limit_estimates"] = nl.estimates;
}

inline void cmd_optimal_pair(const json& cfg, int, Output& out) {
  DmiVector delta = get_delta(cfg);
  auto [a, b] = optimal_pair(delta);
  PairState s = newton_classify(delta, {a, b});
  auto [sa, sb] = aligned_saddle(delta);
  auto [ca, cb] = canonical_pair(sa, sb);
  PairState sd = pair_energy_derivatives(ca, cb, delta);
  out.columns = {"kind", "phi1", "phi2", "W", "det_hessian", "lambda1", "lambda2", "classification"};
  auto W = [&](double p, double q) { return w_disk(VortexConfig{{p, q}, {1, 1}}, delta); };
  out.add({"optimal", s.phi1, s.phi2, W(s.phi1, s.phi2), s.det(), s.eigenvalues[0], s.eigenvalues[1],
           to_string(s.classification)});
  out.add({"aligned", sd.phi1, sd.phi2, W(sd.phi1, sd.phi2), sd.det(), sd.eigenvalues[0], sd.eigenvalues[1],
           to_string(sd.classification)});
  out.summary["theta_delta"] = theta_delta(delta.magnitude());
  out.summary["closed_form"] = {a, b};
  out.summary["newton_iterations"] = s.iterations;
}

inline void cmd_minimize(const json& cfg, int, Output& out) {
  double eps = get_real(cfg, "eps");
  DmiVector delta = get_delta(cfg);
  MinimizeOptions opt = minimize_options(cfg);
  int M = static_cast<int>(get_int(cfg, "nodes", 0));
  BoundarySolve s = solve_boundary(eps, delta, opt, M);
  out.columns = {"angle", "degree"};
  for (int j = 0; j < s.vortices.size(); ++j) out.add({s.vortices.angles[j], s.vortices.degrees[j]});
  out.summary["energy"] = energy_json(s.result.breakdown);
  out.summary["vortices"] = {{"angles", s.vortices.angles}, {"degrees", s.vortices.degrees}};
  out.summary["iterations"] = s.result.iterations;
  out.summary["grad_norm"] = s.result.grad_norm;
  out.summary["restart"] = s.result.restart;
  out.summary["nodes"] = s.M;
}

inline void cmd_sweep_gamma(const json& cfg, int threads, Output& out) {
  auto eps = get_reals(cfg, "eps");
  DmiVector delta = get_delta(cfg);
  MinimizeOptions opt = minimize_options(cfg);
  VortexConfig best{{0.0, pi}, {1, 1}};
  if (delta.magnitude() > 0.0) {
    auto [a, b] = optimal_pair(delta);
    best.angles = {a, b};
  }
  std::vector<double> G(eps.size());
  parallel_for(static_cast<int>(eps.size()), threads,
               [&](int i) { G[i] = solve_boundary(eps[i], delta, opt).result.breakdown.total; });
  out.columns = {"eps", "minG", "prediction", "defect"};
  for (size_t i = 0; i < eps.size(); ++i) {
    double p = gamma_prediction(eps[i], best, delta);
    out.add({eps[i], G[i], p, std::abs(G[i] - p)});
  }
  out.summary["min_W"] = w_disk(best, delta);
  out.summary["gamma0"] = gamma0();
}

inline void cmd_core_constant(const json& cfg, int, Output& out) {
  auto eps = get_reals(cfg, "eps", {1e-5, 3e-6, 1e-6});
  auto r = get_reals(cfg, "r", {0.2, 0.1, 0.05});
  DmiVector delta = get_delta(cfg);
  HalfDiskGridOptions go;
  go.tau = get_real(cfg, "tau", go.tau);
  CoreConstantResult res = core_constant_extract(eps, r, delta, go);
  out.columns = {"eps", "r", "value", "defect"};
  for (const auto& e : res.table) out.add({e.eps, e.r, e.value, e.defect});
  out.summary["estimate"] = res.estimate;
  out.summary["error_bar"] = res.error_bar;
  out.summary["alpha"] = res.alpha;
  out.summary["amplitude"] = res.amplitude;
  out.summary["eps_limits"] = res.eps_limits;
  out.summary["gamma0"] = gamma0();
}

inline void cmd_strayfield(const json& cfg, int threads, Output& out) {
  auto hs = get_reals(cfg, "h");
  std::string field = get_text(cfg, "field", "m3");
  int nr = static_cast<int>(get_int(cfg, "nr", 128));
  int nt = static_cast<int>(get_int(cfg, "nt", 2 * nr));
  StrayOptions so;
  so.xi_max_factor = get_real(cfg, "xi-factor", so.xi_max_factor);
  SheetField m;
  if (field == "m3") {
    m = SheetField::uniform(nr, nt, 0.0, 0.0, 1.0);
  } else if (field == "inplane") {
    m = SheetField::uniform(nr, nt, 1.0, 0.0, 0.0);
  } else if (field == "phistar") {
    auto ang = get_reals(cfg, "angles", {0.1, 0.1 + pi});
    VortexConfig c{ang, std::vector<int>(ang.size(), 1)};
    validate(c);
    m = SheetField(phi_star_field(c, nr, nt));
  } else {
    throw config_error("--field must be one of m3, inplane, phistar");
  }
  std::vector<StrayTerms> T(hs.size());
  parallel_for(static_cast<int>(hs.size()), threads, [&](int i) { T[i] = strayfield_terms(m, hs[i], so); });
  out.columns = {"h", "fourier_exact", "volume_charge", "lateral_charge", "surface_charge", "tail", "ratio"};
  for (size_t i = 0; i < hs.size(); ++i) {
    const auto& t = T[i];
    double asym = t.volume_charge + t.lateral_charge + t.surface_charge;
    json ratio = asym > 0.0 ? json(t.fourier_exact / asym) : json(nullptr);
    out.add({hs[i], t.fourier_exact, t.volume_charge, t.lateral_charge, t.surface_charge, t.tail, ratio});
  }
  out.summary["field"] = field;
}

inline void cmd_regime(const json& cfg, int, Output& out) {
  auto hs = get_reals(cfg, "h");
  double p = get_real(cfg, "p", 0.75);
  RegimeTable t = regime_probe(hs, p);
  out.columns = {"h", "eta", "eps", "eps_log_h", "eps_log_h_over_loglog"};
  for (const auto& r : t.rows) out.add({r.h, r.eta, r.eps, r.r13, r.r14});
  out.summary["eps_log_h_increasing"] = t.r13_increasing;
  out.summary["eps_log_h_over_loglog_increasing"] = t.r14_increasing;
  out.summary["eps_decreasing"] = t.eps_decreasing;
}

// ---------------------------------------------------------------------------
// Option tables. Kinds: r real, R real list, P pair, i integer, s string.

struct OptionDef {
  const char* key;
  char kind;
  const char* help;
};

struct Command {
  const char* name;
  const char* help;
  std::vector<OptionDef> opts;
  void (*run)(const json&, int, Output&);
};

inline const std::vector<Command>& commands() {
  static const std::vector<Command> cmds = {
      {"renorm", "Renormalized energy W by every route",
       {{"angles", 'R', "vortex angles (radians)"},
        {"degrees", 'R', "vortex degrees (default all +1)"},
        {"delta", 'P', "DMI vector"},
        {"mesh", 'i', "boundary nodes"},
        {"moebius-a", 'P', "Moebius chart parameter"},
        {"radii", 'R', "decreasing excision radii for the numeric limit"}},
       cmd_renorm},
      {"optimal-pair", "Closed-form optimal vortex pair and Hessian classification",
       {{"delta", 'P', "DMI vector (nonzero)"}}, cmd_optimal_pair},
      {"minimize", "Minimize the reduced boundary functional",
       {{"delta", 'P', "DMI vector"},
        {"eps", 'r', "core size"},
        {"restarts", 'i', "number of starts"},
        {"max-iter", 'i', "L-BFGS iteration cap"},
        {"nodes", 'i', "boundary nodes (0 = automatic)"}},
       cmd_minimize},
      {"sweep-gamma", "min G against the second-order prediction over eps",
       {{"delta", 'P', "DMI vector"},
        {"eps", 'R', "core sizes"},
        {"restarts", 'i', "number of starts"},
        {"max-iter", 'i', "L-BFGS iteration cap"}},
       cmd_sweep_gamma},
      {"core-constant", "Extract the core constant from the half-disk functional",
       {{"eps", 'R', "core sizes"}, {"r", 'R', "half-disk radii"}, {"delta", 'P', "DMI vector"},
        {"tau", 'r', "grid grading (cell size / distance)"}},
       cmd_core_constant},
      {"strayfield", "Exact stray-field energy and its thin-film terms",
       {{"h", 'R', "aspect ratios"},
        {"field", 's', "m3 | inplane | phistar"},
        {"angles", 'R', "vortex angles for phistar"},
        {"nr", 'i', "radial cells"},
        {"nt", 'i', "angular cells"},
        {"xi-factor", 'r', "frequency cutoff times h"}},
       cmd_strayfield},
      {"regime", "Regime ratios along eta^2 = h |log h|^p",
       {{"h", 'R', "aspect ratios"}, {"p", 'r', "path exponent in (1/2, 1)"}}, cmd_regime},
  };
  return cmds;
}

inline json convert(const std::vector<std::string>& raw, char kind, const std::string& key) {
  auto to_real = [&](const std::string& s) {
    size_t pos = 0;
    double v;
    try {
      v = std::stod(s, &pos);
    } catch (const std::exception&) {
      throw config_error("--" + key + ": '" + s + "' is not a number");
    }
    if (pos != s.size()) throw config_error("--" + key + ": '" + s + "' is not a number");
    return v;
  };
  switch (kind) {
    case 'r': return to_real(raw.at(0));
    case 'i': {
      double v = to_real(raw.at(0));
      if (v != std::floor(v)) throw config_error("--" + key + " must be an integer");
      return static_cast<long long>(v);
    }
    case 's': return raw.at(0);
    default: {
      json a = json::array();
      for (const auto& s : raw) a.push_back(to_real(s));
      return a;
    }
  }
}

inline std::string utc_now() {
  std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline std::string csv_cell(const json& v) {
  if (v.is_null()) return "";
  if (v.is_number_float()) return format_number(v.get<double>());
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

inline void write_csv(std::ostream& os, const json& meta, const json& cfg, const Output& out) {
  for (const auto& [k, v] : meta.items()) os << "# " << k << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
  os << "# config: " << cfg.dump() << "\n";
  for (const auto& [k, v] : out.summary.items()) os << "# result." << k << ": " << v.dump() << "\n";
  for (size_t i = 0; i < out.columns.size(); ++i) os << (i ? "," : "") << out.columns[i];
  os << "\n";
  for (const auto& row : out.rows) {
    for (size_t i = 0; i < out.columns.size(); ++i) os << (i ? "," : "") << csv_cell(row[out.columns[i]]);
    os << "\n";
  }
}

inline json load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw io_error("cannot read config file " + path);
  json j;
  try {
    j = json::parse(f);
  } catch (const json::parse_error& e) {
    throw config_error("config file " + path + " is not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw config_error("config file must hold a JSON object");
  return j;
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Boundary vortices in thin ferromagnetic films with DMI"};
  app.name("bvortex");
  app.footer(
      "Angles are in radians in [0, 2pi); energies are dimensionless.\n"
      "Parameters may come from --config FILE (JSON object keyed by option name); flags override it.\n"
      "Exit codes: 0 ok, 2 invalid config, 3 numerical failure, 64 usage, 74 I/O.");
  app.fallthrough();
  app.require_subcommand(1);
  std::string config_path, out_path, format;
  int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::vector<std::string> seed_raw;
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--threads", threads, "worker threads for sweeps");
  app.add_option("--seed", seed_raw, "random seed (u64)")->expected(1)->type_name("UINT");
  app.add_option("--out", out_path, "output file (default stdout)");
  app.add_option("--format", format, "csv | json (default from --out extension)")->check(CLI::IsMember({"csv", "json"}));

  std::map<std::string, std::map<std::string, std::vector<std::string>>> raw;
  std::map<std::string, CLI::App*> subs;
  for (const auto& c : commands()) {
    CLI::App* s = app.add_subcommand(c.name, c.help);
    s->set_help_flag("--help", "print this help and exit");
    subs[c.name] = s;
    for (const auto& o : c.opts) {
      auto& slot = raw[c.name][o.key];
      CLI::Option* opt = s->add_option(std::string("--") + o.key, slot, o.help);
      opt->type_name(o.kind == 'i' ? "INT" : o.kind == 's' ? "TEXT" : "FLOAT");
      if (o.kind == 'P') opt->expected(2);
      else if (o.kind == 'R') opt->expected(1, CLI::detail::expected_max_vector_size)->delimiter(',');
      else opt->expected(1);
    }
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n" << app.help();
    return exit_usage;
  }

  const Command* cmd = nullptr;
  for (const auto& c : commands())
    if (subs[c.name]->parsed()) cmd = &c;
  if (!cmd) {
    err << "usage error: no command given\n";
    return exit_usage;
  }

  auto t0 = std::chrono::steady_clock::now();
  std::string started = utc_now();
  try {
    json cfg = json::object();
    if (!config_path.empty()) {
      cfg = load_config(config_path);
      if (cfg.contains("command")) {
        if (cfg["command"] != cmd->name) throw config_error("config file is for command " + cfg["command"].dump());
        cfg.erase("command");
      }
    }
    for (const auto& o : cmd->opts) {
      const auto& v = raw[cmd->name][o.key];
      if (subs[cmd->name]->count(std::string("--") + o.key) > 0) cfg[o.key] = convert(v, o.kind, o.key);
    }
    if (!seed_raw.empty()) {
      const std::string& s = seed_raw[0];
      if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
        throw config_error("--seed must be an unsigned 64-bit integer");
      try {
        cfg["seed"] = static_cast<std::uint64_t>(std::stoull(s));
      } catch (const std::exception&) {
        throw config_error("--seed must be an unsigned 64-bit integer");
      }
    }
    if (threads < 1) throw config_error("--threads must be positive");
    if (format.empty()) {
      auto ends = [&](const std::string& suf) {
        return out_path.size() >= suf.size() && out_path.compare(out_path.size() - suf.size(), suf.size(), suf) == 0;
      };
      format = ends(".json") ? "json" : "csv";
    }

    Output res;
    cmd->run(cfg, threads, res);
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    json canonical = json::object();
    canonical["command"] = cmd->name;
    canonical["parameters"] = cfg;
    json meta = json::object();
    meta["tool"] = "bvortex";
    meta["version"] = tool_version;
    meta["command"] = cmd->name;
    meta["config_hash"] = fnv1a(canonical.dump());
    if (cfg.contains("seed")) meta["seed"] = cfg["seed"];
    meta["threads"] = threads;
    meta["started_utc"] = started;
    meta["wall_time_s"] = wall;

    std::ostringstream doc;
    if (format == "json") {
      json j = json::object();
      j["meta"] = meta;
      j["config"] = cfg;
      j["results"] = {{"columns", res.columns}, {"rows", res.rows}, {"summary", res.summary}};
      doc << j.dump(2) << "\n";
    } else {
      write_csv(doc, meta, cfg, res);
    }
    if (out_path.empty()) {
      out << doc.str();
    } else {
      std::ofstream f(out_path, std::ios::binary);
      if (!f) throw io_error("cannot open output file " + out_path);
      f << doc.str();
      f.flush();
      if (!f) throw io_error("failed writing output file " + out_path);
    }
    return exit_ok;
  } catch (const io_error& e) {
    err << "I/O error: " << e.what() << "\n";
    return exit_io;
  } catch (const convergence_error& e) {
    err << "numerical failure: " << e.what() << "\n";
    return exit_numerical;
  } catch (const resolution_error& e) {
    err << "numerical failure: " << e.what() << "\n";
    return exit_numerical;
  } catch (const detection_error& e) {
    err << "numerical failure: " << e.what() << "\n";
    return exit_numerical;
  } catch (const error& e) {
    err << "invalid configuration: " << e.what() << "\n";
    return exit_invalid;
  } catch (const json::exception& e) {
    err << "invalid configuration: " << e.what() << "\n";
    return exit_invalid;
  }
}

inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  std::vector<const char*> argv{"bvortex"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace bvortex::cli
