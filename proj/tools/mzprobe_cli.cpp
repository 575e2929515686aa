// Command-line surface over the interferometer library: Fisher-information
// tables, window distinguishability, the scatter sweep, and the Monte Carlo
// estimation and misidentification experiments.

#include "CLI11.hpp"
#include "json.hpp"

#include "mzprobe/disting.hpp"
#include "mzprobe/estimation.hpp"
#include "mzprobe/fisher.hpp"
#include "mzprobe/info_metrics.hpp"
#include "mzprobe/rotation.hpp"
#include "mzprobe/spin.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numeric>
#include <string>
#include <variant>
#include <vector>

namespace {

using mz::kPi;

struct IoFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using Cell = std::variant<long long, double, std::string>;

struct Table {
  std::vector<std::string> headers;
  std::vector<std::vector<Cell>> rows;
};

std::string format_cell(const Cell& cell) {
  if (const auto* i = std::get_if<long long>(&cell))
    return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&cell)) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", *d);
    return buf;
  }
  return std::get<std::string>(cell);
}

std::string render_csv(const Table& t) {
  std::string out;
  for (size_t c = 0; c < t.headers.size(); ++c) {
    if (c) out += ',';
    out += t.headers[c];
  }
  out += '\n';
  for (const auto& row : t.rows) {
    for (size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += format_cell(row[c]);
    }
    out += '\n';
  }
  return out;
}

std::string render_json(const Table& t) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& row : t.rows) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (size_t c = 0; c < row.size(); ++c) {
      const std::string& key = t.headers[c];
      if (const auto* i = std::get_if<long long>(&row[c]))
        obj[key] = *i;
      else if (const auto* d = std::get_if<double>(&row[c])) {
        if (std::isfinite(*d))
          obj[key] = *d;
        else
          obj[key] = nullptr;
      } else {
        obj[key] = *std::get_if<std::string>(&row[c]);
      }
    }
    arr.push_back(std::move(obj));
  }
  return arr.dump(2) + "\n";
}

// Destination resolution: --out wins; otherwise MZPROBE_OUT_DIR provides a
// directory for <command>.<ext>; otherwise stdout, except commands that
// always produce a file fall back to the working directory.
std::string resolve_out(const std::string& flag, const std::string& name,
                        const std::string& format, bool file_by_default) {
  if (!flag.empty()) return flag;
  const std::string ext = (format == "json") ? ".json" : ".csv";
  if (const char* dir = std::getenv("MZPROBE_OUT_DIR"); dir && *dir)
    return std::string(dir) + "/" + name + ext;
  if (file_by_default) return name + ext;
  return {};
}

void write_table(const Table& t, const std::string& format,
                 const std::string& path) {
  const std::string payload =
      (format == "json") ? render_json(t) : render_csv(t);
  if (path.empty()) {
    std::cout << payload;
    if (!std::cout.good()) throw IoFailure("failed writing to stdout");
    return;
  }
  std::ofstream ofs(path, std::ios::binary);
  if (!ofs) throw IoFailure("cannot open '" + path + "' for writing");
  ofs << payload;
  ofs.flush();
  if (!ofs.good()) throw IoFailure("failed writing '" + path + "'");
}

// Angles accept decimal radians or fractions of pi via suffix, e.g. 0.5pi.
double parse_angle(const std::string& text) {
  std::string body = text;
  double scale = 1.0;
  if (body.size() >= 2 && body.compare(body.size() - 2, 2, "pi") == 0) {
    scale = kPi;
    body.erase(body.size() - 2);
    if (body.empty() || body == "+") body = "1";
    if (body == "-") body = "-1";
  }
  size_t pos = 0;
  double value = 0.0;
  try {
    value = std::stod(body, &pos);
  } catch (const std::exception&) {
    pos = std::string::npos;
  }
  if (pos != body.size())
    throw std::invalid_argument("cannot parse angle '" + text + "'");
  return value * scale;
}

std::vector<double> parse_angle_list(const std::string& text) {
  std::vector<double> out;
  size_t start = 0;
  while (start <= text.size()) {
    const size_t comma = text.find(',', start);
    const size_t end = (comma == std::string::npos) ? text.size() : comma;
    out.push_back(parse_angle(text.substr(start, end - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (out.empty()) throw std::invalid_argument("empty angle list");
  return out;
}

struct ProbeFlags {
  std::string family = "noon";
  int n = 0;
  double m = 0.0;
  std::string zeta = "0";
  std::string gamma = "0.5pi";
};

void add_probe_flags(CLI::App* cmd, ProbeFlags& pf, bool family_required) {
  auto* fam = cmd->add_option("--family", pf.family,
                              "Probe family: noon, fockz, phase");
  if (family_required) fam->required();
  cmd->add_option("--n", pf.n, "Photon number (n = 2j)")->required();
  cmd->add_option("--m", pf.m,
                  "Field imbalance m for fockz, integer or half-integer");
  cmd->add_option("--zeta", pf.zeta, "NOON relative phase (radians or Npi)");
  cmd->add_option("--gamma", pf.gamma,
                  "Phase-state parameter (radians or Npi)");
}

mz::ProbeFamily family_from_flags(const ProbeFlags& pf) {
  if (pf.family == "noon") return mz::ProbeFamily::noon(parse_angle(pf.zeta));
  if (pf.family == "phase")
    return mz::ProbeFamily::phase_state(parse_angle(pf.gamma));
  if (pf.family == "fockz") {
    const double doubled = 2.0 * pf.m;
    const long long two_m = std::llround(doubled);
    if (std::abs(doubled - two_m) > 1e-9)
      throw mz::InvalidM("m must be an integer or half-integer");
    return mz::ProbeFamily::fockz(static_cast<int>(two_m));
  }
  throw mz::UnsupportedFamily("unknown family '" + pf.family +
                              "' (expected noon, fockz, or phase)");
}

mz::SpinState probe_from_flags(const ProbeFlags& pf) {
  return mz::make_probe(mz::SpinJ(pf.n), family_from_flags(pf));
}

double max_rel_disagreement(std::initializer_list<double> values) {
  double worst = 0.0;
  for (double a : values)
    for (double b : values) {
      const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
      worst = std::max(worst, std::abs(a - b) / scale);
    }
  return worst;
}

void add_output_flags(CLI::App* cmd, std::string& format, std::string& out) {
  cmd->add_option("--format", format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--out", out, "Output path (default per MZPROBE_OUT_DIR)");
}

struct Fig2Flags {
  int n = 0;
  std::string chi_list = "0.5pi,0.75pi,pi";
  std::string delta_list = "1e-3,pi";
  int nodes = 0;
};

void run_fig2(const Fig2Flags& ff, const std::string& format,
              const std::string& out) {
  std::vector<int> n_list;
  if (ff.n != 0) {
    if (ff.n < 1 || ff.n > 200)
      throw mz::InvalidInterval("n must lie in [1, 200]");
    n_list.push_back(ff.n);
  } else {
    for (int n = 5; n <= 50; ++n) n_list.push_back(n);
  }
  const std::vector<double> chis = parse_angle_list(ff.chi_list);
  const std::vector<double> deltas = parse_angle_list(ff.delta_list);
  if (chis.empty() || deltas.empty())
    throw std::invalid_argument("chi and delta lists must be non-empty");
  const mz::QuadratureSpec quad{ff.nodes, mz::QuadratureRule::GaussLegendre};

  struct Entry {
    std::string label;
    std::function<mz::ProbeFamily(int)> make;
  };
  const std::vector<Entry> families = {
      {"noon", [](int) { return mz::ProbeFamily::noon(0.0); }},
      {"fockz0", [](int) { return mz::ProbeFamily::fockz(0); }},
      {"fockzj", [](int n) { return mz::ProbeFamily::fockz(n); }},
      {"phase", [](int) { return mz::ProbeFamily::phase_state(0.5 * kPi); }},
  };

  Table t;
  t.headers = {"family", "n",      "chi", "delta",
               "d_value", "clamped_fraction", "flag"};
  const double nan = std::nan("");
  for (const Entry& entry : families) {
    const auto rows =
        mz::disting_sweep(entry.make, n_list, chis, deltas, quad);
    for (const auto& row : rows) {
      const bool ok = row.flag.empty();
      t.rows.push_back({entry.label, static_cast<long long>(row.n), row.chi,
                        row.delta, ok ? row.result.value : nan,
                        ok ? row.result.clamped_fraction : nan, row.flag});
    }
  }
  write_table(t, format, resolve_out(out, "fig2", format, true));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mach-Zehnder spin-j probe toolkit"};
  app.require_subcommand(1);

  // fisher
  auto* fisher = app.add_subcommand(
      "fisher", "Fisher information by three routes across angles");
  ProbeFlags pf_fisher;
  std::string fisher_thetas;
  std::string fisher_fmt = "csv", fisher_out;
  add_probe_flags(fisher, pf_fisher, true);
  fisher->add_option("--theta", fisher_thetas, "Comma-separated angles")
      ->required();
  add_output_flags(fisher, fisher_fmt, fisher_out);
  fisher->callback([&]() {
    const mz::ProbeFamily fam = family_from_flags(pf_fisher);
    const mz::SpinJ j(pf_fisher.n);
    const mz::SpinState probe = mz::make_probe(j, fam);
    const auto engine = mz::shared_engine(j);
    const double closed = mz::closed_form_fisher(fam, j).value;
    Table t;
    t.headers = {"family",         "n",     "theta", "j_eq7", "j_eq11",
                 "j_closed_form", "max_rel_disagreement"};
    for (double theta : parse_angle_list(fisher_thetas)) {
      const double a = mz::fisher_prob_derivative(*engine, probe, theta).value;
      const double b =
          mz::fisher_energy_discrepancy(*engine, probe, theta).value;
      t.rows.push_back({fam.label(), static_cast<long long>(pf_fisher.n),
                        theta, a, b, closed,
                        max_rel_disagreement({a, b, closed})});
    }
    write_table(t, fisher_fmt, resolve_out(fisher_out, "fisher", fisher_fmt,
                                           false));
  });

  // disting
  auto* disting = app.add_subcommand(
      "disting", "Window-average relative entropy for one cell");
  ProbeFlags pf_disting;
  std::string disting_chi, disting_delta;
  int disting_nodes = 0;
  std::string disting_fmt = "csv", disting_out;
  add_probe_flags(disting, pf_disting, true);
  disting->add_option("--chi", disting_chi, "Window center")->required();
  disting->add_option("--delta", disting_delta, "Window width")->required();
  disting->add_option("--nodes", disting_nodes,
                      "Quadrature nodes per axis (0 = default)");
  add_output_flags(disting, disting_fmt, disting_out);
  disting->callback([&]() {
    mz::DistinguishabilityQuery q;
    q.probe = probe_from_flags(pf_disting);
    q.chi = parse_angle(disting_chi);
    q.delta = parse_angle(disting_delta);
    q.quadrature.nodes_per_axis = disting_nodes;
    const mz::DistinguishabilityResult r = mz::disting(q);
    Table t;
    t.headers = {"family", "n",     "chi",
                 "delta",  "value", "clamped_fraction",
                 "nodes_used"};
    t.rows.push_back({family_from_flags(pf_disting).label(),
                      static_cast<long long>(pf_disting.n), q.chi, q.delta,
                      r.value, r.clamped_fraction,
                      static_cast<long long>(r.nodes_used)});
    write_table(t, disting_fmt,
                resolve_out(disting_out, "disting", disting_fmt, false));
  });

  // fig2
  auto* fig2 = app.add_subcommand(
      "fig2", "Distinguishability scatter sweep over the standard grid");
  Fig2Flags ff;
  std::string fig2_fmt = "csv", fig2_out;
  fig2->add_option("--n", ff.n, "Restrict to a single photon number");
  fig2->add_option("--chi", ff.chi_list, "Comma-separated window centers");
  fig2->add_option("--delta", ff.delta_list, "Comma-separated window widths");
  fig2->add_option("--nodes", ff.nodes,
                   "Quadrature nodes per axis (0 = default)");
  add_output_flags(fig2, fig2_fmt, fig2_out);
  fig2->callback([&]() { run_fig2(ff, fig2_fmt, fig2_out); });

  // estimate
  auto* estimate = app.add_subcommand(
      "estimate", "Monte Carlo MSE of the grid MLE against the CRB");
  ProbeFlags pf_est;
  pf_est.family = "phase";
  std::string est_theta, est_window, est_center;
  int est_k = 0, est_trials = 0, est_grid = 601;
  std::uint64_t est_seed = 1;
  std::string est_fmt = "csv", est_out;
  add_probe_flags(estimate, pf_est, false);
  estimate->add_option("--theta", est_theta, "True phase")->required();
  estimate->add_option("--window", est_window, "Window width")->required();
  estimate->add_option("--chi", est_center,
                       "Window center (default: the true phase)");
  estimate->add_option("--k", est_k, "Measurements per trial")->required();
  estimate->add_option("--trials", est_trials, "Trial count")->required();
  estimate->add_option("--seed", est_seed, "Random seed");
  estimate->add_option("--grid-points", est_grid, "Likelihood grid size");
  add_output_flags(estimate, est_fmt, est_out);
  estimate->callback([&]() {
    const mz::SpinState probe = probe_from_flags(pf_est);
    const double theta_true = parse_angle(est_theta);
    mz::Window window;
    window.width = parse_angle(est_window);
    window.center =
        est_center.empty() ? theta_true : parse_angle(est_center);
    const mz::EstimationRun run = mz::mse_experiment(
        probe, theta_true, window, est_k, est_trials, est_seed, est_grid);
    Table t;
    t.headers = {"empirical_mse", "crb", "ratio", "trials", "seed"};
    t.rows.push_back({run.empirical_mse, run.crb,
                      run.empirical_mse / run.crb,
                      static_cast<long long>(run.trials),
                      static_cast<long long>(est_seed)});
    write_table(t, est_fmt, resolve_out(est_out, "estimate", est_fmt, false));
  });

  // misid
  auto* misid = app.add_subcommand(
      "misid", "Misidentification experiment between two probe phases");
  ProbeFlags pf_misid;
  std::string misid_thetas;
  int misid_k = 0, misid_trials = 0;
  std::uint64_t misid_seed = 1;
  std::string misid_fmt = "csv", misid_out;
  add_probe_flags(misid, pf_misid, true);
  misid->add_option("--theta", misid_thetas, "Two angles: true,confusable")
      ->required();
  misid->add_option("--k", misid_k, "Draws per dataset")->required();
  misid->add_option("--trials", misid_trials, "Dataset count")->required();
  misid->add_option("--seed", misid_seed, "Random seed");
  add_output_flags(misid, misid_fmt, misid_out);
  misid->callback([&]() {
    const mz::SpinState probe = probe_from_flags(pf_misid);
    const auto thetas = parse_angle_list(misid_thetas);
    if (thetas.size() != 2)
      throw std::invalid_argument("--theta needs exactly two angles");
    const auto engine = mz::shared_engine(probe.j);
    const auto p1 = mz::distribution(engine->evolve(probe, thetas[0]));
    const auto p2 = mz::distribution(engine->evolve(probe, thetas[1]));
    const mz::MisidResult r =
        mz::misid_experiment(p1, p2, misid_k, misid_trials, misid_seed);
    const double exact = (p1.probs.size() == 2 && misid_k <= 10000)
                             ? mz::exact_binary_misid(p1, p2, misid_k)
                             : std::nan("");
    Table t;
    t.headers = {"p_empirical", "p_exact", "exponent", "upper",
                 "lower",       "k",       "trials",   "seed"};
    t.rows.push_back({r.p_empirical, exact, r.bounds.exponent,
                      r.bounds.upper, r.bounds.lower,
                      static_cast<long long>(misid_k),
                      static_cast<long long>(misid_trials),
                      static_cast<long long>(misid_seed)});
    write_table(t, misid_fmt, resolve_out(misid_out, "misid", misid_fmt,
                                          false));
  });

  // bounds
  auto* bounds = app.add_subcommand(
      "bounds", "Method-of-types bracket for two probe phases");
  ProbeFlags pf_bounds;
  std::string bounds_thetas;
  int bounds_k = 0;
  std::string bounds_fmt = "csv", bounds_out;
  add_probe_flags(bounds, pf_bounds, true);
  bounds->add_option("--theta", bounds_thetas, "Two angles: true,confusable")
      ->required();
  bounds->add_option("--k", bounds_k, "Sample size")->required();
  add_output_flags(bounds, bounds_fmt, bounds_out);
  bounds->callback([&]() {
    const mz::SpinState probe = probe_from_flags(pf_bounds);
    const auto thetas = parse_angle_list(bounds_thetas);
    if (thetas.size() != 2)
      throw std::invalid_argument("--theta needs exactly two angles");
    const auto engine = mz::shared_engine(probe.j);
    const auto p1 = mz::distribution(engine->evolve(probe, thetas[0]));
    const auto p2 = mz::distribution(engine->evolve(probe, thetas[1]));
    const mz::TypeBounds tb = mz::type_bounds(p1, p2, bounds_k);
    Table t;
    t.headers = {"exponent", "upper", "lower", "k"};
    t.rows.push_back({tb.exponent, tb.upper, tb.lower,
                      static_cast<long long>(tb.k)});
    write_table(t, bounds_fmt, resolve_out(bounds_out, "bounds", bounds_fmt,
                                           false));
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const IoFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const mz::InvalidM& e) {
    std::cerr << "error: InvalidM: " << e.what() << "\n";
    return 2;
  } catch (const mz::DimensionMismatch& e) {
    std::cerr << "error: DimensionMismatch: " << e.what() << "\n";
    return 2;
  } catch (const mz::NonHermitian& e) {
    std::cerr << "error: NonHermitian: " << e.what() << "\n";
    return 2;
  } catch (const mz::InvalidInterval& e) {
    std::cerr << "error: InvalidInterval: " << e.what() << "\n";
    return 2;
  } catch (const mz::UnsupportedDimension& e) {
    std::cerr << "error: UnsupportedDimension: " << e.what() << "\n";
    return 2;
  } catch (const mz::UnsupportedFamily& e) {
    std::cerr << "error: UnsupportedFamily: " << e.what() << "\n";
    return 2;
  } catch (const mz::ZeroInformation& e) {
    std::cerr << "error: ZeroInformation: " << e.what() << "\n";
    return 2;
  } catch (const mz::DegenerateLikelihood& e) {
    std::cerr << "error: DegenerateLikelihood: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
