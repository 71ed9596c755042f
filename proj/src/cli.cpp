#include "fw/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "fw/dirac_algebra.hpp"
#include "fw/fw_transform.hpp"
#include "fw/landau_spectra.hpp"
#include "fw/pauli_grid.hpp"

namespace fw::cli {

namespace {

using HP = landau::HighPrecision;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Precondition : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Format { text, csv, latex };

struct Common {
  std::string units = "natural";
  std::string format = "text";
  int precision = 12;

  Format output() const { return format == "csv" ? Format::csv : format == "latex" ? Format::latex : Format::text; }
  landau::Units<HP> physical() const { return units == "si" ? landau::Units<HP>::si() : landau::Units<HP>::natural(); }
};

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char ch : s) {
    if (ch == '"') quoted += '"';
    quoted += ch;
  }
  return quoted + "\"";
}

std::string latex_escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    if (ch == '_' || ch == '&' || ch == '%' || ch == '#') out += '\\';
    out += ch;
  }
  return out;
}

void emit(const Table& t, Format format, std::ostream& out) {
  auto line = [&](const std::vector<std::string>& cells, const std::vector<std::size_t>& widths) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (format == Format::csv) {
        out << (i ? "," : "") << csv_field(cells[i]);
      } else if (format == Format::latex) {
        out << (i ? " & " : "") << latex_escape(cells[i]);
      } else {
        out << (i ? "  " : "") << std::setw(static_cast<int>(widths[i])) << cells[i];
      }
    }
    out << (format == Format::latex ? " \\\\\n" : "\n");
  };
  std::vector<std::size_t> widths(t.header.size());
  for (std::size_t i = 0; i < widths.size(); ++i) {
    widths[i] = t.header[i].size();
    for (const auto& row : t.rows) widths[i] = std::max(widths[i], row[i].size());
  }
  if (format == Format::latex) out << "\\begin{tabular}{" << std::string(t.header.size(), 'r') << "}\n";
  line(t.header, widths);
  if (format == Format::latex) out << "\\hline\n";
  for (const auto& row : t.rows) line(row, widths);
  if (format == Format::latex) out << "\\end{tabular}\n";
}

std::string show(const HP& x, int precision) {
  if (x == 0) return "0";
  return x.str(precision, std::ios_base::fmtflags(0));
}

std::string show(double x, int precision) {
  std::ostringstream s;
  s << std::setprecision(precision) << x;
  return s.str();
}

HP parse_number(const std::string& text, const std::string& what) {
  char* end = nullptr;
  const double probe = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size() || !std::isfinite(probe)) {
    throw ConfigError(what + ": '" + text + "' is not a number");
  }
  return HP(text);
}

std::vector<HP> parse_numbers(const std::vector<std::string>& texts, const std::string& what) {
  std::vector<HP> out;
  for (const auto& t : texts) out.push_back(parse_number(t, what));
  return out;
}

// ----- verbs -------------------------------------------------------------------

struct ExpandArgs {
  std::string branch = "upper";
  int order = 2;
  bool ledger = false;
  bool uniform_B = false;
};

void run_expand(const ExpandArgs& a, const Common& common, std::ostream& out) {
  if (a.order != 2) {
    throw Precondition("expand: only --order 2 (accuracy (1/c)^2) is implemented, got " + std::to_string(a.order));
  }
  const OperatorFlags flags{.curl_free_E = true, .uniform_B = a.uniform_B};
  const ExpansionReport report = fw_reduce(dirac_hamiltonian(flags));
  const Format format = common.output();
  const RenderFormat style = format == Format::latex ? RenderFormat::latex : RenderFormat::plain;

  Table terms{{"term", "form", "expression"}, {}};
  OperatorSum h = report.even_hamiltonian;
  if (a.branch == "none") {
    terms.rows.push_back({"even Hamiltonian", "", render(h, style)});
  } else {
    h = two_component(report, a.branch == "upper" ? Branch::upper : Branch::lower);
    for (const NamedTerm& t : identify_terms(h)) terms.rows.push_back({t.name, t.pretty, render(t.value, style)});
  }
  Table dropped{{"stage", "nesting", "c_degree", "terms"}, {}};
  for (const DroppedEntry& d : report.dropped) {
    dropped.rows.push_back({std::to_string(d.stage), std::to_string(d.nesting), std::to_string(d.c_degree),
                            std::to_string(d.count)});
  }

  if (format == Format::csv) {
    emit(terms, format, out);
    if (a.ledger) {
      out << "\n";
      emit(dropped, format, out);
    }
    return;
  }
  const char* comment = format == Format::latex ? "% " : "# ";
  if (a.branch != "none") {
    for (const auto& row : terms.rows) out << comment << row[0] << ": " << (row[1].empty() ? row[2] : row[1]) << "\n";
  }
  if (a.ledger) {
    for (const auto& row : dropped.rows) {
      out << comment << "dropped stage=" << row[0] << " nesting=" << row[1] << " c_degree=" << row[2]
          << " terms=" << row[3] << "\n";
    }
  }
  out << render(h, style) << "\n";
}

struct SpectrumArgs {
  std::vector<std::string> B{"0.02"};
  int n_max = 5;
  std::string p_z = "0";
};

void run_spectrum(const SpectrumArgs& a, const Common& common, std::ostream& out, std::ostream& err) {
  const landau::Units<HP> u = common.physical();
  const auto rows = landau::spectrum<HP>(a.n_max, parse_number(a.p_z, "--pz"), parse_numbers(a.B, "--B"), u);
  const int p = common.precision;
  Table t{{"n", "p_z", "s", "B", "D", "epsilon_exact", "epsilon_expanded", "residual", "splitting"}, {}};
  for (const auto& r : rows) {
    // Without a field the two spin states coincide; list each level once.
    if (r.B == 0 && r.quantum.s == -1) continue;
    if (!landau::expansion_valid(r.D, u)) {
      err << "warning: 2D >= mc^2 at n=" << r.quantum.n << ", B=" << show(r.B, p)
          << "; the 1/c^2 expansion does not apply\n";
    }
    t.rows.push_back({std::to_string(r.quantum.n), show(r.quantum.p_z, p), std::to_string(r.quantum.s), show(r.B, p),
                      show(r.D, p), show(r.epsilon_exact, p), show(r.epsilon_expanded, p), show(r.residual, p),
                      show(r.splitting, p)});
  }
  emit(t, common.output(), out);
}

void run_moment(const std::vector<std::string>& factors, const Common& common, std::ostream& out) {
  const landau::Units<HP> u = common.physical();
  const HP mu_b = u.bohr_magneton();
  Table t{{"epsilon_factor", "epsilon", "mu", "mu_over_muB"}, {}};
  for (const HP& f : parse_numbers(factors, "--epsilon-factors")) {
    const HP eps = f * u.rest_energy();
    const HP mu = landau::magnetic_moment(eps, u);
    const int p = common.precision;
    t.rows.push_back({show(f, p), show(eps, p), show(mu, p), show(mu / mu_b, p)});
  }
  emit(t, common.output(), out);
}

struct SplittingArgs {
  std::vector<std::string> B{"0.005", "0.01", "0.02"};
  int n_max = 20;
  std::string p_z = "0";
};

void run_splitting(const SplittingArgs& a, const Common& common, std::ostream& out) {
  if (a.n_max < 0) throw Precondition("splitting: --n must be nonnegative");
  const landau::Units<HP> u = common.physical();
  const HP p_z = parse_number(a.p_z, "--pz");
  Table t{{"B", "n", "splitting", "pauli_splitting", "ratio"}, {}};
  const int p = common.precision;
  for (const HP& B : parse_numbers(a.B, "--B")) {
    const HP pauli = 2 * u.bohr_magneton() * B;
    for (int n = 0; n <= a.n_max; ++n) {
      const HP s = landau::spin_splitting(n, p_z, B, u);
      t.rows.push_back({show(B, p), std::to_string(n), show(s, p), show(pauli, p), show(s / pauli, p)});
    }
  }
  emit(t, common.output(), out);
}

struct GaugeArgs {
  std::map<std::string, std::string> settings;
  bool pi_form = false;
  bool p_form = false;
};

void run_gauge_check(const GaugeArgs& a, const Common& common, std::ostream& out, std::ostream& err) {
  if (common.units != "natural") throw Precondition("gauge-check: the grid solver runs in natural units only");
  grid::GridConfig config;
  try {
    config = grid::GridConfig::from_settings(a.settings);
    if (a.pi_form || a.p_form) {
      if (a.settings.count("spin_orbit")) throw grid::ToggleConflict("--spin_orbit cannot be combined with --pi-form or --p-form");
      config.toggles.spin_orbit = grid::TermToggles::spin_orbit_from_flags(a.pi_form, a.p_form);
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const grid::GaugeReport r =
      grid::gauge_invariance_report(config.grid, config.fields, config.toggles, config.eigenvalues, {}, config.eigen);
  for (const auto& w : r.warnings) err << "warning: " << w << "\n";

  const int p = common.precision;
  if (common.output() != Format::text) {
    Table t{{"index", "landau", "symmetric", "relative_discrepancy"}, {}};
    for (std::size_t i = 0; i < r.landau.size(); ++i) {
      const double rel = std::abs(r.landau[i] - r.symmetric[i]) / std::abs(r.landau[i]);
      t.rows.push_back({std::to_string(i), show(r.landau[i], p), show(r.symmetric[i], p), show(rel, p)});
    }
    emit(t, common.output(), out);
    return;
  }
  const char* forms[] = {"off", "pi_form", "p_form"};
  out << "N = " << config.grid.N << "\n"
      << "L = " << show(config.grid.L, p) << "\n"
      << "h = " << show(config.grid.spacing(), p) << "\n"
      << "B = " << show(config.fields.B, p) << "\n"
      << "potential = " << (config.fields.potential == grid::PotentialProfile::harmonic ? "harmonic" : "none") << "\n"
      << "k = " << show(config.fields.k, p) << "\n"
      << "spin_orbit = " << forms[static_cast<int>(config.toggles.spin_orbit)] << "\n"
      << "eigenvalues = " << config.eigenvalues << "\n";
  for (std::size_t i = 0; i < r.landau.size(); ++i) {
    out << "level " << i << ": landau = " << show(r.landau[i], p) << ", symmetric = " << show(r.symmetric[i], p)
        << "\n";
  }
  out << "max_relative_discrepancy = " << show(r.max_relative_discrepancy, p) << "\n"
      << "matrix_covariance_error = " << show(r.matrix_covariance_error, p) << "\n";
}

int run_identities(std::uint64_t seed, int pairs, const Common& common, std::ostream& out) {
  if (pairs < 0) throw Precondition("identities: --pairs must be nonnegative");
  const IdentityReport r = run_identity_suite(seed, pairs);
  if (common.output() == Format::text) {
    for (const auto& c : r.checks) out << (c.passed ? "PASS " : "FAIL ") << c.name << "\n";
    out << "passed " << r.passed() << " failed " << r.failed() << "\n";
  } else {
    Table t{{"check", "passed"}, {}};
    for (const auto& c : r.checks) t.rows.push_back({c.name, c.passed ? "1" : "0"});
    emit(t, common.output(), out);
  }
  return r.failed() == 0 ? ok : 1;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Foldy-Wouthuysen workbench"};
  app.name("fwx");
  app.require_subcommand(1, 1);
  app.fallthrough();
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.set_config("--config", "", "key = value file; verb options go in a [verb] section");

  Common common;
  if (const char* env = std::getenv("FWX_UNITS")) {
    common.units = env;
    if (common.units != "natural" && common.units != "si") {
      err << "fwx: error: FWX_UNITS must be natural or si, got '" << common.units << "'\n";
      return config_error;
    }
  }
  app.add_option("--units", common.units, "natural or si; default from FWX_UNITS")
      ->check(CLI::IsMember({"natural", "si"}));
  app.add_option("--format", common.format, "text, csv or latex")->check(CLI::IsMember({"text", "csv", "latex"}));
  app.add_option("--precision", common.precision, "significant digits")->check(CLI::Range(1, 60));

  ExpandArgs expand;
  auto* expand_cmd = app.add_subcommand("expand", "Print the even Hamiltonian to order 1/c^2");
  expand_cmd->add_option("--branch", expand.branch, "upper, lower or none (four components)")
      ->check(CLI::IsMember({"upper", "lower", "none"}));
  expand_cmd->add_option("--order", expand.order, "power of 1/c kept");
  expand_cmd->add_flag("--ledger", expand.ledger, "list the products dropped by truncation");
  expand_cmd->add_flag("--uniform-B", expand.uniform_B, "drop all derivatives of B");

  SpectrumArgs spectrum;
  auto* spectrum_cmd = app.add_subcommand("spectrum", "Exact and expanded Landau energies");
  spectrum_cmd->add_option("--B", spectrum.B, "field strengths")->delimiter(',');
  spectrum_cmd->add_option("--n", spectrum.n_max, "highest Landau index");
  spectrum_cmd->add_option("--pz", spectrum.p_z, "momentum along the field");

  std::vector<std::string> factors{"1", "2", "4"};
  auto* moment_cmd = app.add_subcommand("moment", "Energy-dependent magnetic moment");
  moment_cmd->add_option("--epsilon-factors", factors, "energies in units of mc^2")->delimiter(',');

  SplittingArgs splitting;
  auto* splitting_cmd = app.add_subcommand("splitting", "Spin splitting against Landau index");
  splitting_cmd->add_option("--B", splitting.B, "field strengths")->delimiter(',');
  splitting_cmd->add_option("--n", splitting.n_max, "highest Landau index");
  splitting_cmd->add_option("--pz", splitting.p_z, "momentum along the field");

  GaugeArgs gauge;
  auto* gauge_cmd = app.add_subcommand("gauge-check", "Compare grid spectra in Landau and symmetric gauge");
  for (const char* key : {"N", "L", "B", "potential", "k", "gauge", "kinetic", "zeeman", "mass_correction", "darwin",
                          "spin_orbit", "eigenvalues", "tol", "max_iterations"}) {
    const std::string name = key;
    gauge_cmd->add_option_function<std::string>(
        "--" + name, [&gauge, name](const std::string& v) { gauge.settings[name] = v; }, "grid setting " + name);
  }
  gauge_cmd->add_flag("--pi-form", gauge.pi_form, "spin-orbit built from Π");
  gauge_cmd->add_flag("--p-form", gauge.p_form, "spin-orbit built from p");

  std::uint64_t seed = 1;
  int pairs = 100;
  auto* identities_cmd = app.add_subcommand("identities", "Run the Clifford identity suite");
  identities_cmd->add_option("--seed", seed);
  identities_cmd->add_option("--pairs", pairs, "random vector pairs");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    err << "fwx: error: " << e.what() << "\n";
    return config_error;
  }
  try {
    if (expand_cmd->parsed()) run_expand(expand, common, out);
    if (spectrum_cmd->parsed()) run_spectrum(spectrum, common, out, err);
    if (moment_cmd->parsed()) run_moment(factors, common, out);
    if (splitting_cmd->parsed()) run_splitting(splitting, common, out);
    if (gauge_cmd->parsed()) run_gauge_check(gauge, common, out, err);
    if (identities_cmd->parsed()) return run_identities(seed, pairs, common, out);
  } catch (const ConfigError& e) {
    err << "fwx: error: " << e.what() << "\n";
    return config_error;
  } catch (const NonConvergence& e) {
    err << "fwx: error: " << e.what() << "\n";
    return non_convergence;
  } catch (const std::exception& e) {
    // Module preconditions: domain errors, grid limits, unsupported orders.
    err << "fwx: error: " << e.what() << "\n";
    return precondition_violation;
  }
  return ok;
}

}  // namespace fw::cli
