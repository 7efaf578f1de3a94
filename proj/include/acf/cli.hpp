#pragma once

// Command-line front end. parse() turns argv into a validated RunConfig;
// execute() runs one subcommand and writes CSV or JSON.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "acf/channels.hpp"
#include "acf/errors.hpp"
#include "acf/quadrature.hpp"
#include "acf/roots.hpp"
#include "acf/sae_spectrum.hpp"
#include "acf/scattering.hpp"
#include "acf/shell_model.hpp"
#include "acf/specfun.hpp"
#include "json.hpp"

namespace acf::cli {

inline constexpr const char* version = "0.1.0";

/// Malformed command line; maps to exit code 2.
class usage_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// --help was given; what() holds the help text.
class help_requested : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Command { classify, bound, spectrum, shell, flow, scatter, polescan, specfun, check };
enum class Format { csv, json };

struct RunConfig {
  Command command = Command::check;
  std::map<std::string, std::string> parameters;  // validated flag values, as typed
  std::vector<std::string> positional;             // specfun arguments
  std::optional<Format> output_format;             // unset: command default
  std::optional<std::string> output_path;
  bool emit_gnuplot = false;
};

namespace detail {

enum class Kind { real, positive, negative, unit_open, integer, positive_int, choice, spin, flag };

struct OptSpec {
  const char* name;
  Kind kind;
  std::optional<std::string> def;  // nullopt: required unless optional_value
  bool optional_value = false;     // may be absent with no default
  std::vector<std::string> choices = {};
};

struct CommandSpec {
  Command command;
  const char* name;
  const char* help;
  std::vector<OptSpec> options;
};

inline const std::vector<CommandSpec>& command_specs() {
  static const std::vector<CommandSpec> specs = {
      {Command::classify, "classify", "classify (k, s) channels for a coupling Ma",
       {{"ma", Kind::real, std::nullopt}, {"kmin", Kind::integer, "-3"}, {"kmax", Kind::integer, "3"}}},
      {Command::bound, "bound", "bound level of one extension-family channel",
       {{"gamma", Kind::unit_open, std::nullopt, true},
        {"xi", Kind::real, std::nullopt},
        {"m", Kind::positive, "1"},
        {"log", Kind::flag, std::nullopt, true}}},
      {Command::spectrum, "spectrum", "channels and bound levels for (Ma, xi)",
       {{"ma", Kind::real, std::nullopt},
        {"xi", Kind::real, std::nullopt},
        {"kmin", Kind::integer, "-2"},
        {"kmax", Kind::integer, "2"},
        {"m", Kind::positive, "1"}}},
      {Command::shell, "shell", "delta-shell bound level",
       {{"l", Kind::integer, "0"},
        {"gamma", Kind::unit_open, std::nullopt, true},
        {"ma", Kind::real, std::nullopt},
        {"m", Kind::positive, "1"},
        {"R", Kind::positive, "1e-3"},
        {"method", Kind::choice, "all", false, {"closed", "exact", "numerov", "all"}},
        {"interior", Kind::choice, "modified", false, {"modified", "oscillatory"}}}},
      {Command::flow, "flow", "renormalization flow Ma(R) at fixed bound energy",
       {{"etarget", Kind::negative, "-1"},
        {"l", Kind::integer, "0"},
        {"m", Kind::positive, "1"},
        {"rmin", Kind::positive, "1e-6"},
        {"rmax", Kind::positive, "1e-2"},
        {"decades", Kind::positive, std::nullopt, true},
        {"per-decade", Kind::positive_int, "2"},
        {"gamma", Kind::unit_open, std::nullopt, true}}},
      {Command::scatter, "scatter", "amplitude and cross section table",
       {{"ma", Kind::real, std::nullopt},
        {"p", Kind::positive, "1"},
        {"spin", Kind::spin, "z:+1"},
        {"phimin", Kind::real, "0.2"},
        {"phimax", Kind::real, "6.08"},
        {"points", Kind::positive_int, "200"}}},
      {Command::polescan, "polescan", "ingoing coefficient B(E) on a log grid of E < 0",
       {{"xi", Kind::real, std::nullopt},
        {"gamma", Kind::unit_open, std::nullopt},
        {"m", Kind::positive, "1"},
        {"emin", Kind::negative, "-100"},
        {"emax", Kind::negative, "-1e-4"},
        {"points", Kind::positive_int, "201"}}},
      {Command::specfun, "specfun", "evaluate gamma, j, n (y), i or k: specfun j 0.7 5.0", {}},
      {Command::check, "check", "run the cross-oracle suite", {}},
  };
  return specs;
}

inline double to_real(const std::string& flag, const std::string& v) {
  std::size_t pos = 0;
  double d;
  try {
    d = std::stod(v, &pos);
  } catch (const std::exception&) {
    throw usage_error("--" + flag + ": '" + v + "' is not a number");
  }
  if (pos != v.size() || !std::isfinite(d)) throw usage_error("--" + flag + ": '" + v + "' is not a finite number");
  return d;
}

inline long to_int(const std::string& flag, const std::string& v) {
  std::size_t pos = 0;
  long n;
  try {
    n = std::stol(v, &pos);
  } catch (const std::exception&) {
    throw usage_error("--" + flag + ": '" + v + "' is not an integer");
  }
  if (pos != v.size()) throw usage_error("--" + flag + ": '" + v + "' is not an integer");
  return n;
}

inline SpinState to_spin(const std::string& flag, const std::string& v) {
  const auto colon = v.find(':');
  if (colon == std::string::npos) throw usage_error("--" + flag + ": expected z:+1, z:-1, x:+1 or x:-1");
  const std::string axis = v.substr(0, colon), ev = v.substr(colon + 1);
  int e;
  if (ev == "+1" || ev == "1") {
    e = 1;
  } else if (ev == "-1") {
    e = -1;
  } else {
    throw usage_error("--" + flag + ": eigenvalue must be +1 or -1");
  }
  if (axis == "z") return SpinState::z(e);
  if (axis == "x") return SpinState::x(e);
  throw usage_error("--" + flag + ": axis must be z or x");
}

inline void validate(const OptSpec& o, const std::string& v) {
  const std::string f = o.name;
  switch (o.kind) {
    case Kind::real: to_real(f, v); break;
    case Kind::positive:
      if (!(to_real(f, v) > 0.0)) throw usage_error("--" + f + ": must be positive");
      break;
    case Kind::negative:
      if (!(to_real(f, v) < 0.0)) throw usage_error("--" + f + ": must be negative");
      break;
    case Kind::unit_open: {
      const double d = to_real(f, v);
      if (!(d > 0.0 && d < 1.0)) throw usage_error("--" + f + ": must lie in (0, 1)");
      break;
    }
    case Kind::integer: to_int(f, v); break;
    case Kind::positive_int:
      if (to_int(f, v) < 1) throw usage_error("--" + f + ": must be a positive integer");
      break;
    case Kind::choice:
      if (std::find(o.choices.begin(), o.choices.end(), v) == o.choices.end())
        throw usage_error("--" + f + ": unknown value '" + v + "'");
      break;
    case Kind::spin: to_spin(f, v); break;
    case Kind::flag: break;
  }
}

}  // namespace detail

/// argv without the program name.
inline RunConfig parse(const std::vector<std::string>& args) {
  CLI::App app{"acf: channel classification, bound levels, delta-shell levels and scattering tables"};
  app.name("acf");
  app.require_subcommand(1);
  app.fallthrough();
  std::string format, output;
  bool gnuplot = false;
  app.add_option("--format", format, "csv or json (default depends on the command)");
  app.add_option("--output", output, "write to this file instead of stdout");
  app.add_flag("--emit-gnuplot", gnuplot, "also write <output stem>.gp");

  const auto& specs = detail::command_specs();
  std::map<std::string, std::map<std::string, std::string>> values;
  std::map<std::string, bool> flags;
  std::vector<std::string> positional;
  std::vector<CLI::App*> subs;
  for (const auto& cs : specs) {
    auto* sub = app.add_subcommand(cs.name, cs.help);
    subs.push_back(sub);
    for (const auto& o : cs.options) {
      const std::string flag = std::string("--") + o.name;
      if (o.kind == detail::Kind::flag) {
        sub->add_flag(flag, flags[std::string(cs.name) + "." + o.name]);
      } else {
        sub->add_option(flag, values[cs.name][o.name]);
      }
    }
    if (cs.command == Command::specfun) sub->add_option("args", positional, "function name and arguments");
  }

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    const CLI::App* shown = &app;
    for (auto* sub : subs)
      if (sub->parsed()) shown = sub;
    throw help_requested(shown->help());
  } catch (const CLI::ParseError& e) {
    std::string what = e.what();
    if (what.empty()) what = e.get_name();
    throw usage_error(what);
  }

  RunConfig cfg;
  if (!format.empty()) {
    if (format == "csv") {
      cfg.output_format = Format::csv;
    } else if (format == "json") {
      cfg.output_format = Format::json;
    } else {
      throw usage_error("--format: must be csv or json");
    }
  }
  if (!output.empty()) cfg.output_path = output;
  cfg.emit_gnuplot = gnuplot;
  if (gnuplot && !cfg.output_path) throw usage_error("--emit-gnuplot: requires --output");

  for (std::size_t i = 0; i < specs.size(); ++i) {
    if (!subs[i]->parsed()) continue;
    const auto& cs = specs[i];
    cfg.command = cs.command;
    for (const auto& o : cs.options) {
      if (o.kind == detail::Kind::flag) {
        if (flags[std::string(cs.name) + "." + o.name]) cfg.parameters[o.name] = "true";
        continue;
      }
      const bool given = subs[i]->count(std::string("--") + o.name) > 0;
      std::string v = values[cs.name][o.name];
      if (!given) {
        if (o.def) {
          v = *o.def;
        } else if (o.optional_value) {
          continue;
        } else {
          throw usage_error(std::string("--") + o.name + ": required by '" + cs.name + "'");
        }
      }
      detail::validate(o, v);
      cfg.parameters[o.name] = v;
    }
    if (cs.command == Command::specfun) {
      if (positional.empty()) throw usage_error("specfun: expected a function name");
      const std::string& fn = positional[0];
      const std::size_t want = fn == "gamma" ? 1 : 2;
      if (fn != "gamma" && fn != "j" && fn != "n" && fn != "y" && fn != "i" && fn != "k")
        throw usage_error("specfun: unknown function '" + fn + "'");
      if (positional.size() != want + 1)
        throw usage_error("specfun " + fn + ": expected " + std::to_string(want) + " numeric argument(s)");
      for (std::size_t a = 1; a < positional.size(); ++a) detail::to_real("specfun", positional[a]);
      cfg.positional = positional;
    }
    const auto& p = cfg.parameters;
    if (cs.command == Command::classify || cs.command == Command::spectrum) {
      if (detail::to_int("kmin", p.at("kmin")) > detail::to_int("kmax", p.at("kmax")))
        throw usage_error("--kmin: must not exceed --kmax");
    }
    if (cs.command == Command::bound && !p.count("log") && !p.count("gamma"))
      throw usage_error("--gamma: required by 'bound' unless --log is given");
    if (cs.command == Command::flow && !(detail::to_real("rmin", p.at("rmin")) < detail::to_real("rmax", p.at("rmax"))))
      throw usage_error("--rmin: must be below --rmax");
    if (cs.command == Command::polescan &&
        !(detail::to_real("emin", p.at("emin")) < detail::to_real("emax", p.at("emax"))))
      throw usage_error("--emin: must be below --emax");
    if (cs.command == Command::scatter &&
        !(detail::to_real("phimin", p.at("phimin")) <= detail::to_real("phimax", p.at("phimax"))))
      throw usage_error("--phimin: must not exceed --phimax");
    return cfg;
  }
  throw usage_error("no command given");
}

// ---------------------------------------------------------------------------

using Cell = std::variant<std::monostate, double, long long, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

struct Outcome {
  nlohmann::json inputs = nlohmann::json::object();
  nlohmann::json results = nlohmann::json::object();
  std::vector<std::string> equations;
  Table table;
  Format default_format = Format::csv;
  std::string gnuplot;  // body with @CSV@ placeholder; empty: nothing to plot
  int exit_code = 0;
};

namespace detail {

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string cell_text(const Cell& c) {
  if (std::holds_alternative<double>(c)) return format_double(std::get<double>(c));
  if (std::holds_alternative<long long>(c)) return std::to_string(std::get<long long>(c));
  if (std::holds_alternative<std::string>(c)) return std::get<std::string>(c);
  return "";
}

inline nlohmann::json cell_json(const Cell& c) {
  if (std::holds_alternative<double>(c)) return std::get<double>(c);
  if (std::holds_alternative<long long>(c)) return std::get<long long>(c);
  if (std::holds_alternative<std::string>(c)) return std::get<std::string>(c);
  return nullptr;
}

inline nlohmann::json table_json(const Table& t) {
  auto rows = nlohmann::json::array();
  for (const auto& r : t.rows) {
    auto o = nlohmann::json::object();
    for (std::size_t i = 0; i < t.columns.size(); ++i) o[t.columns[i]] = cell_json(r[i]);
    rows.push_back(std::move(o));
  }
  return rows;
}

struct Params {
  const std::map<std::string, std::string>& m;
  double real(const char* k) const { return to_real(k, m.at(k)); }
  int integer(const char* k) const { return static_cast<int>(to_int(k, m.at(k))); }
  bool has(const char* k) const { return m.count(k) > 0; }
  const std::string& str(const char* k) const { return m.at(k); }
};

inline nlohmann::json echo_inputs(const RunConfig& cfg) {
  auto in = nlohmann::json::object();
  for (const auto& [k, v] : cfg.parameters) {
    try {
      std::size_t pos = 0;
      const long long n = std::stoll(v, &pos);
      if (pos == v.size()) {
        in[k] = n;
        continue;
      }
    } catch (const std::exception&) {
    }
    try {
      std::size_t pos = 0;
      const double d = std::stod(v, &pos);
      if (pos == v.size()) {
        in[k] = d;
        continue;
      }
    } catch (const std::exception&) {
    }
    in[k] = v;
  }
  if (!cfg.positional.empty()) in["args"] = cfg.positional;
  return in;
}

inline Cell opt_cell(const std::optional<double>& v) { return v ? Cell{*v} : Cell{}; }

inline Outcome run_classify(const Params& p) {
  Outcome o;
  const Coupling c = decompose(p.real("ma"));
  o.equations = {"coupling-decomposition", "region-classification"};
  o.table.columns = {"k", "s", "l", "region", "nu_or_gamma"};
  for (const auto& ch : enumerate_channels(c, p.integer("kmin"), p.integer("kmax")))
    o.table.rows.push_back({Cell{static_cast<long long>(ch.k)}, Cell{static_cast<long long>(ch.s)},
                            Cell{static_cast<long long>(ch.l)}, Cell{std::string(to_string(ch.region))},
                            Cell{ch.order()}});
  o.results["n"] = c.n;
  o.results["mu"] = c.mu;
  o.results["channels"] = table_json(o.table);
  o.gnuplot =
      "set datafile separator ','\nset key autotitle columnhead\nset xlabel 'k'\nset ylabel 'order'\n"
      "plot '@CSV@' using 1:($2>0?$5:1/0) with points title 's=+1', '' using 1:($2<0?$5:1/0) with points title 's=-1'\n";
  return o;
}

inline Outcome run_bound(const Params& p) {
  Outcome o;
  o.default_format = Format::json;
  const double xi = p.real("xi"), m = p.real("m");
  if (p.has("log")) {
    o.equations = {"log-case-level", "log-case-matching", "bound-state-normalization"};
    const auto bs = make_log_bound_state(xi, m);
    const double pole = log_case_pole(xi, m);
    o.results["energy_closed"] = bs.energy;
    o.results["energy_pole"] = pole;
    o.results["kappa"] = bs.kappa;
    o.results["norm_const"] = bs.norm_const;
    o.results["closed_norm_const"] = closed_norm_const(bs);
    o.results["norm_ratio"] = bs.norm_const / closed_norm_const(bs);
    o.results["xi_flagged"] = log_case_xi_flagged(xi);
    o.table.columns = {"energy_closed", "energy_pole", "kappa", "norm_const", "closed_norm_const", "xi_flagged"};
    o.table.rows.push_back({Cell{bs.energy}, Cell{pole}, Cell{bs.kappa}, Cell{bs.norm_const},
                            Cell{closed_norm_const(bs)}, Cell{static_cast<long long>(log_case_xi_flagged(xi))}});
    return o;
  }
  const double g = p.real("gamma");
  o.equations = {"ingoing-coefficient", "closed-form-level", "bound-state-normalization"};
  if (!(xi < 0.0)) throw acf::domain_error("no bound state: the ingoing coefficient B(E) has no zero unless xi < 0");
  const auto bs = make_bound_state(g, xi, m);
  const double pole = find_pole(xi, g, m);
  o.results["energy_closed"] = bs.energy;
  o.results["energy_pole"] = pole;
  o.results["kappa"] = bs.kappa;
  o.results["norm_const"] = bs.norm_const;
  o.results["closed_norm_const"] = closed_norm_const(bs);
  o.results["norm_ratio"] = bs.norm_const / closed_norm_const(bs);
  o.table.columns = {"energy_closed", "energy_pole", "kappa", "norm_const", "closed_norm_const"};
  o.table.rows.push_back(
      {Cell{bs.energy}, Cell{pole}, Cell{bs.kappa}, Cell{bs.norm_const}, Cell{closed_norm_const(bs)}});
  return o;
}

inline Outcome run_spectrum(const Params& p) {
  Outcome o;
  const Coupling c = decompose(p.real("ma"));
  const double xi = p.real("xi"), m = p.real("m");
  const auto rep = spectrum_report(c, xi, p.integer("kmin"), p.integer("kmax"), m);
  o.equations = {"region-classification", "closed-form-level", "log-case-level", "level-degeneracy"};
  o.table.columns = {"k", "s", "l", "region", "order", "energy", "kappa", "norm_const"};
  for (const auto& e : rep.entries) {
    const auto& ch = e.channel;
    std::optional<double> en, ka, nc;
    if (e.bound) {
      en = e.bound->energy;
      ka = e.bound->kappa;
      nc = e.bound->norm_const;
    }
    o.table.rows.push_back({Cell{static_cast<long long>(ch.k)}, Cell{static_cast<long long>(ch.s)},
                            Cell{static_cast<long long>(ch.l)}, Cell{std::string(to_string(ch.region))},
                            Cell{ch.order()}, opt_cell(en), opt_cell(ka), opt_cell(nc)});
  }
  o.results["channels"] = table_json(o.table);
  o.results["e0_minus"] = rep.e0_minus ? nlohmann::json(*rep.e0_minus) : nlohmann::json(nullptr);
  o.results["e1_minus"] = rep.e1_minus ? nlohmann::json(*rep.e1_minus) : nlohmann::json(nullptr);
  auto groups = nlohmann::json::array();
  for (const auto& g : rep.degenerate_groups) {
    auto members = nlohmann::json::array();
    for (auto i : g) members.push_back({{"k", rep.entries[i].channel.k}, {"s", rep.entries[i].channel.s}});
    groups.push_back({{"energy", rep.entries[g.front()].bound->energy}, {"channels", members}});
  }
  o.results["degenerate_groups"] = groups;
  o.results["log_xi_flagged"] = rep.log_xi_flagged;
  return o;
}

inline ShellConfig shell_config(const Params& p) {
  ShellConfig c;
  c.l = p.integer("l");
  c.ma = p.real("ma");
  c.m = p.real("m");
  c.R = p.real("R");
  if (p.has("gamma")) {
    c.gamma = p.real("gamma");
  } else {
    c.gamma = std::abs(std::abs(c.l) - decompose(c.ma).mu);
    if (!(c.gamma > 0.0 && c.gamma < 1.0))
      throw acf::domain_error("shell: gamma = ||l| - mu| from Ma is outside (0, 1); pass --gamma");
  }
  return c;
}

inline Outcome run_shell(const Params& p) {
  Outcome o;
  o.default_format = Format::json;
  const ShellConfig c = shell_config(p);
  const std::string method = p.str("method");
  const Interior in = p.str("interior") == "oscillatory" ? Interior::Oscillatory : Interior::Modified;
  o.equations = {"shell-matching-equation"};
  o.results["gamma"] = c.gamma;
  o.results["attraction_window"] = attraction_window(c.l, c.gamma, c.ma);
  o.table.columns = {"method", "energy", "X"};
  auto add = [&](const std::string& name, double E) {
    const double X = c.R * std::sqrt(-2.0 * c.m * E);
    o.results["energy_" + name] = E;
    o.results["X_" + name] = X;
    o.table.rows.push_back({Cell{name}, Cell{E}, Cell{X}});
  };
  const bool all = method == "all";
  std::vector<std::string> failures;
  auto attempt = [&](const std::string& name, auto&& fn) {
    try {
      add(name, fn());
    } catch (const acf::domain_error& e) {
      if (!all) throw;
      failures.push_back(name + ": " + e.what());
      o.results["energy_" + name] = nullptr;
    } catch (const acf::no_root_error& e) {
      if (!all) throw;
      failures.push_back(name + ": " + e.what());
      o.results["energy_" + name] = nullptr;
    }
  };
  if (all || method == "closed") {
    o.equations.push_back("shell-closed-form");
    attempt("closed", [&] { return shell_bound_energy_closed(c); });
  }
  if (all || method == "exact") attempt("exact", [&] { return shell_bound_energy_exact(c, in); });
  if (all || method == "numerov") {
    o.equations.push_back("numerov-shooting");
    attempt("numerov", [&] { return numerov_bound_energy(c); });
  }
  o.results["failures"] = failures;
  if (o.table.rows.empty()) throw acf::no_root_error("shell: no method produced a bound level");
  return o;
}

inline Outcome run_flow(const Params& p) {
  Outcome o;
  const double et = p.real("etarget"), m = p.real("m");
  const int l = p.integer("l");
  const double rmax = p.real("rmax");
  const double rmin = p.has("decades") ? rmax / std::pow(10.0, p.real("decades")) : p.real("rmin");
  const double decades = std::log10(rmax / rmin);
  const int points = std::max(2, static_cast<int>(std::lround(decades * p.integer("per-decade"))) + 1);
  std::optional<double> g;
  if (p.has("gamma")) g = p.real("gamma");
  o.equations = {"shell-matching-equation", "coupling-renormalization"};
  const auto flow = renormalization_flow(et, l, m, roots::logspace(rmin, rmax, points), g);
  o.table.columns = {"R", "Ma", "gamma", "E_check"};
  double worst = 0.0;
  for (const auto& f : flow) {
    o.table.rows.push_back({Cell{f.R}, Cell{f.ma}, Cell{f.gamma}, Cell{f.energy_check}});
    worst = std::max(worst, std::abs(f.energy_check - et) / std::abs(et));
  }
  o.results["rows"] = table_json(o.table);
  o.results["max_rel_energy_drift"] = worst;
  o.gnuplot =
      "set datafile separator ','\nset key autotitle columnhead\nset logscale x\nset xlabel 'R'\n"
      "set ylabel 'Ma(R)'\nplot '@CSV@' using 1:2 with linespoints\n";
  return o;
}

inline Outcome run_scatter(const Params& p) {
  Outcome o;
  const Coupling c = decompose(p.real("ma"));
  const SpinState spin = to_spin("spin", p.str("spin"));
  const auto tab = scattering_table(p.real("p"), c, spin, p.real("phimin"), p.real("phimax"), p.integer("points"));
  o.equations = {spin.axis == SpinAxis::Z ? "spin-z-amplitude" : "spin-x-amplitude", "differential-cross-section"};
  o.table.columns = {"phi", "re_f1", "im_f1", "re_f2", "im_f2", "dsigma"};
  for (const auto& r : tab.rows)
    o.table.rows.push_back({Cell{r.phi}, Cell{r.amplitude[0].real()}, Cell{r.amplitude[0].imag()},
                            Cell{r.amplitude[1].real()}, Cell{r.amplitude[1].imag()}, Cell{r.dsigma_dphi}});
  o.results["rows"] = table_json(o.table);
  o.gnuplot =
      "set datafile separator ','\nset key autotitle columnhead\nset logscale y\nset xlabel 'phi'\n"
      "set ylabel 'dsigma/dphi'\nplot '@CSV@' using 1:6 with lines\n";
  return o;
}

inline Outcome run_polescan(const Params& p) {
  Outcome o;
  const double xi = p.real("xi"), g = p.real("gamma"), m = p.real("m");
  const auto mags = roots::logspace(-p.real("emax"), -p.real("emin"), p.integer("points"));
  std::vector<double> grid;
  for (auto it = mags.rbegin(); it != mags.rend(); ++it) grid.push_back(-*it);
  o.equations = {"ingoing-coefficient"};
  o.table.columns = {"E", "B"};
  const auto scan = pole_scan(xi, g, m, grid);
  std::optional<double> lo, hi;
  for (std::size_t i = 0; i < scan.size(); ++i) {
    o.table.rows.push_back({Cell{scan[i].energy}, Cell{scan[i].coefficient}});
    if (i > 0 && !lo && (scan[i - 1].coefficient > 0.0) != (scan[i].coefficient > 0.0)) {
      lo = scan[i - 1].energy;
      hi = scan[i].energy;
    }
  }
  o.results["rows"] = table_json(o.table);
  o.results["sign_change"] = lo ? nlohmann::json::array({*lo, *hi}) : nlohmann::json(nullptr);
  o.gnuplot =
      "set datafile separator ','\nset key autotitle columnhead\nset xlabel 'E'\nset ylabel 'B(E)'\n"
      "set xzeroaxis\nplot '@CSV@' using 1:2 with lines\n";
  return o;
}

inline Outcome run_specfun(const std::vector<std::string>& a) {
  Outcome o;
  o.equations = {"special-functions"};
  const std::string& fn = a[0];
  const double v1 = to_real("specfun", a[1]);
  double value, nu = NAN, x;
  if (fn == "gamma") {
    x = v1;
    value = specfun::gamma(x);
  } else {
    nu = v1;
    x = to_real("specfun", a[2]);
    if (fn == "j") value = specfun::bessel_j(nu, x);
    else if (fn == "n" || fn == "y") value = specfun::bessel_n(nu, x);
    else if (fn == "i") value = specfun::bessel_i(nu, x);
    else value = specfun::bessel_k(nu, x);
  }
  o.table.columns = {"function", "nu", "x", "value"};
  o.table.rows.push_back({Cell{fn}, fn == "gamma" ? Cell{} : Cell{nu}, Cell{x}, Cell{value}});
  o.results["value"] = value;
  return o;
}

struct CheckRow {
  std::string name;
  double value;
  double tolerance;
};

/// Cross-oracle suite behind the check command.
inline std::vector<CheckRow> run_checks() {
  std::vector<CheckRow> rows;
  {
    double worst = 0.0;
    for (int gi = 1; gi <= 9; ++gi)
      for (double xi : {-0.1, -1.0, -10.0})
        for (double m : {0.5, 1.0, 2.0}) {
          const double g = gi / 10.0;
          const double a = find_pole(xi, g, m), b = bound_energy_closed(g, xi, m);
          worst = std::max(worst, std::abs(a - b) / std::abs(b));
        }
    rows.push_back({"pole_vs_closed_form", worst, 1e-10});
  }
  {
    double worst = 0.0;
    for (int i = 1; i <= 9; ++i) {
      const double mu = i / 10.0;
      const auto r1 = spectrum_report(decompose(mu), -1.0, -2, 2);
      const auto r2 = spectrum_report(decompose(1.0 - mu), -1.0, -2, 2);
      worst = std::max(worst, std::abs(*r1.e0_minus - *r2.e1_minus) / std::abs(*r1.e0_minus));
    }
    rows.push_back({"degeneracy_mu_vs_one_minus_mu", worst, 1e-12});
  }
  rows.push_back({"log_case_level_at_xi_C", std::abs(bound_energy_log(specfun::euler_gamma, 1.0) + 4.0) / 4.0, 1e-12});
  {
    const ShellConfig c{1e-3, -0.35, 1.0, 0, 0.3};
    const double closed = shell_bound_energy_closed(c), exact = shell_bound_energy_exact(c);
    const double numerov = numerov_bound_energy(c);
    rows.push_back({"shell_closed_vs_exact_attractive", std::abs(closed - exact) / std::abs(exact), 1e-2});
    rows.push_back({"shell_exact_vs_numerov_attractive", std::abs(numerov - exact) / std::abs(exact), 5e-3});
  }
  {
    const double pi = std::numbers::pi;
    const ShellConfig c{1e-6, 0.3, 1.0, 0, 0.3};
    rows.push_back({"shell_angle_s_plus", angle_distance(effective_extension_parameter(c, 0.5, 1).theta, 0.0), 1e-3});
    rows.push_back({"shell_angle_s_minus", angle_distance(effective_extension_parameter(c, 0.5, -1).theta, pi), 1e-3});
  }
  {
    const Coupling c = decompose(0.5);
    const std::vector<double> phis = {0.2, 1.0, 2.0, std::numbers::pi};
    const auto f = extract_amplitude(1.0, c, 1, phis, 200.0);
    double worst = 0.0;
    for (std::size_t i = 0; i < phis.size(); ++i) {
      const double ref = std::abs(amplitude_spin_z(phis[i], 1.0, c, 1)[0]);
      worst = std::max(worst, std::abs(std::abs(f[i]) - ref) / ref);
    }
    rows.push_back({"amplitude_extraction_modulus", worst, 1e-3});
  }
  {
    const auto bs = make_bound_state(0.3, -1.0, 1.0);
    auto f2 = [&](double r) {
      const double v = bound_wavefunction(bs, r);
      return v * v;
    };
    const double s = 1.0 / bs.kappa;
    const double total = quad::tanh_sinh(f2, 0.0, s).value + quad::tanh_sinh(f2, s, 10.0 * s).value +
                         quad::tanh_sinh(f2, 10.0 * s, 80.0 * s).value;
    rows.push_back({"bound_state_normalization", std::abs(total - 1.0), 1e-10});
  }
  {
    double worst = 0.0;
    const Coupling c = decompose(1.3);
    for (int i = 1; i < 100; ++i) {
      const double phi = 2.0 * std::numbers::pi * i / 100.0;
      for (int s : {1, -1}) {
        const double a = cross_section_spin_z(phi, 1.0, c.mu), b = doublet_norm2(amplitude_spin_z(phi, 1.0, c, s));
        worst = std::max(worst, std::abs(a - b) / a);
      }
    }
    rows.push_back({"cross_section_equals_modulus_squared", worst, 1e-14});
  }
  return rows;
}

inline Outcome run_check() {
  Outcome o;
  o.equations = {"ingoing-coefficient",     "closed-form-level", "log-case-level",
                 "shell-matching-equation", "shell-closed-form", "numerov-shooting",
                 "spin-z-amplitude",        "partial-wave-field"};
  o.table.columns = {"check", "value", "tolerance", "pass"};
  bool ok = true;
  for (const auto& r : run_checks()) {
    const bool pass = r.value <= r.tolerance;
    ok = ok && pass;
    o.table.rows.push_back({Cell{r.name}, Cell{r.value}, Cell{r.tolerance}, Cell{std::string(pass ? "pass" : "FAIL")}});
  }
  o.results["checks"] = table_json(o.table);
  o.results["all_passed"] = ok;
  o.exit_code = ok ? 0 : 1;
  return o;
}

inline void write_csv(std::ostream& os, const Table& t) {
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << '\n';
  for (const auto& r : t.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << cell_text(r[i]);
    os << '\n';
  }
}

}  // namespace detail

inline const char* command_name(Command c) {
  for (const auto& cs : detail::command_specs())
    if (cs.command == c) return cs.name;
  return "?";
}

/// Runs the command. Payload goes to `out` unless cfg.output_path is set;
/// diagnostics go to `err`. Returns the process exit code.
inline int execute(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  Outcome o;
  try {
    const detail::Params p{cfg.parameters};
    switch (cfg.command) {
      case Command::classify: o = detail::run_classify(p); break;
      case Command::bound: o = detail::run_bound(p); break;
      case Command::spectrum: o = detail::run_spectrum(p); break;
      case Command::shell: o = detail::run_shell(p); break;
      case Command::flow: o = detail::run_flow(p); break;
      case Command::scatter: o = detail::run_scatter(p); break;
      case Command::polescan: o = detail::run_polescan(p); break;
      case Command::specfun: o = detail::run_specfun(cfg.positional); break;
      case Command::check: o = detail::run_check(); break;
    }
  } catch (const acf::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const usage_error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << '\n';
    return 1;
  }

  const Format fmt = cfg.output_format.value_or(o.default_format);
  if (cfg.emit_gnuplot && (fmt != Format::csv || o.gnuplot.empty())) {
    err << "error: --emit-gnuplot needs CSV output from a plottable command\n";
    return 2;
  }
  if (cfg.command == Command::classify || cfg.command == Command::spectrum) {
    if (detail::Params{cfg.parameters}.real("ma") < 0.0)
      err << "warning: Ma < 0; the extension-family analysis assumes Ma > 0\n";
  }

  std::ostringstream body;
  if (fmt == Format::csv) {
    detail::write_csv(body, o.table);
  } else {
    nlohmann::json j;
    j["inputs"] = detail::echo_inputs(cfg);
    j["inputs"]["command"] = command_name(cfg.command);
    j["results"] = o.results;
    j["meta"] = {{"version", version}, {"equations", o.equations}};
    body << j.dump(2) << '\n';
  }

  if (cfg.output_path) {
    const std::filesystem::path path(*cfg.output_path);
    std::ofstream f(path, std::ios::binary);
    if (!f) {
      err << "error: cannot write " << path.string() << '\n';
      return 2;
    }
    f << body.str();
    if (cfg.emit_gnuplot) {
      std::filesystem::path gp = path;
      gp.replace_extension(".gp");
      std::string script = o.gnuplot;
      const std::string csv_name = path.filename().string();
      for (std::size_t pos; (pos = script.find("@CSV@")) != std::string::npos;) script.replace(pos, 5, csv_name);
      std::ofstream g(gp, std::ios::binary);
      if (!g) {
        err << "error: cannot write " << gp.string() << '\n';
        return 2;
      }
      g << script;
    }
  } else {
    out << body.str();
  }
  return o.exit_code;
}

/// parse + execute with usage errors mapped to exit code 2.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  try {
    cfg = parse(args);
  } catch (const help_requested& h) {
    out << h.what();
    return 0;
  } catch (const usage_error& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const acf::domain_error& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  }
  return execute(cfg, out, err);
}

}  // namespace acf::cli
