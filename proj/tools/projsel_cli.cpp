// projsel: command-line front end for the project-selection library.
//
// Exit codes: 0 success (audit: mechanism is IC), 1 audit found a profitable
// deviation, 2 invalid input or runtime failure.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "projsel/projsel.hpp"

namespace {

using namespace projsel;

constexpr std::uint64_t kDefaultSeed = 20261016;
constexpr int kExitOk = 0;
constexpr int kExitNotIc = 1;
constexpr int kExitError = 2;

// Writes to `path` via a sibling temporary and rename, or to stdout when the
// path is empty or "-".
void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  const std::filesystem::path target(path);
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
    if (!out.flush()) throw std::runtime_error("cannot write " + path);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw std::runtime_error("cannot write " + path + ": " + ec.message());
  }
}

std::string csv_line(std::initializer_list<std::string> cells) {
  std::string line;
  for (const auto& c : cells) {
    if (!line.empty()) line += ',';
    line += c;
  }
  return line + '\n';
}

std::string fmt(double x) { return format_real(x); }

struct Flags {
  std::size_t n = 2;
  std::size_t n_min = 2;
  std::size_t n_max = 10;
  double tol = 1e-15;
  std::uint64_t samples = 1'000'000;
  std::uint64_t seed = kDefaultSeed;
  std::size_t grid = 5;
  std::string out;
  std::string format = "json";
  std::string mechanism_path;
  std::string quantity = "profit";
  std::string decisions_csv;
  bool unrestricted = false;
};

int run_optimize(const Flags& f) {
  const auto r = optimal_single_cutoff(f.n, f.tol);
  if (f.format == "csv") {
    emit(f.out, csv_line({"N", "cutoff", "eu", "residual"}) +
                    csv_line({std::to_string(r.n_projects), fmt(r.cutoff),
                              fmt(r.expected_utility), fmt(r.residual)}));
  } else {
    emit(f.out, to_json(r).dump(2) + "\n");
  }
  return kExitOk;
}

int run_sweep(const Flags& f) {
  if (f.n_min < 2 || f.n_max < f.n_min) throw std::invalid_argument("need 2 <= n-min <= n-max");
  std::string text = csv_line({"N", "cutoff", "eu", "sqrtN_times_gap"});
  for (std::size_t n = f.n_min; n <= f.n_max; ++n) {
    const auto r = optimal_single_cutoff(n, f.tol);
    text += csv_line({std::to_string(n), fmt(r.cutoff), fmt(r.expected_utility),
                      fmt(std::sqrt(static_cast<double>(n)) * (1.0 - r.cutoff))});
  }
  emit(f.out, text);
  return kExitOk;
}

int run_compare(const Flags& f) {
  if (f.n_min < 2 || f.n_max < f.n_min) throw std::invalid_argument("need 2 <= n-min <= n-max");
  std::string text = csv_line({"N", "no_verif", "dynamic", "static", "transfers"});
  for (std::size_t n = f.n_min; n <= f.n_max; ++n) {
    const auto transfers = transfers_eu(n, f.samples, f.seed);
    text += csv_line({std::to_string(n), fmt(no_verifiability_eu(n)),
                      fmt(dynamic_profit(n)),
                      fmt(optimal_single_cutoff(n, f.tol).expected_utility),
                      fmt(transfers.principal.mean)});
  }
  emit(f.out, text);
  return kExitOk;
}

int run_dynamics(const Flags& f) {
  if (f.n_min < 2 || f.n_max < f.n_min) throw std::invalid_argument("need 2 <= n-min <= n-max");
  std::string text = csv_line({"N", "c1", "dynamic", "static"});
  for (std::size_t n = f.n_min; n <= f.n_max; ++n) {
    text += csv_line({std::to_string(n), fmt(dynamic_cutoffs(n).front()),
                      fmt(dynamic_profit(n)),
                      fmt(optimal_single_cutoff(n, f.tol).expected_utility)});
  }
  emit(f.out, text);
  return kExitOk;
}

GridMechanism as_grid(const Mechanism& m, std::size_t grid) {
  if (const auto* c = std::get_if<CutoffVector>(&m)) {
    return GridMechanism::from_table(cutoff_to_grid(*c, grid));
  }
  if (const auto* t = std::get_if<TableMechanismGrid>(&m)) {
    return GridMechanism::from_table(*t);
  }
  return std::get<GridMechanism>(m);
}

int run_audit(const Flags& f) {
  const auto mech = as_grid(load_mechanism(f.mechanism_path), f.grid);
  if (!f.decisions_csv.empty()) {
    std::ostringstream csv;
    write_decisions_csv(csv, mech);
    emit(f.decisions_csv, csv.str());
  }
  AuditOptions options;
  if (f.unrestricted) options.rule = MessageRule::kUnrestricted;
  const auto report = audit_ic(mech, options);
  emit(f.out, to_json(report).dump(2) + "\n");
  return report.is_ic() ? kExitOk : kExitNotIc;
}

int run_search(const Flags& f) {
  emit(f.out, to_json(best_table_mechanism_n2(f.grid)).dump(2) + "\n");
  return kExitOk;
}

int run_simulate(const Flags& f) {
  const auto mech = load_mechanism(f.mechanism_path);
  const bool agent = f.quantity == "agent";
  EstimateWithError est{};
  auto estimate = [&](std::size_t n, auto rule) {
    return agent ? estimate_agent_payoff(n, rule, f.samples, f.seed)
                 : estimate_eu(n, rule, f.samples, f.seed);
  };
  if (const auto* c = std::get_if<CutoffVector>(&mech)) {
    est = estimate(c->n_projects(), cutoff_rule(*c));
  } else if (const auto* t = std::get_if<TableMechanismGrid>(&mech)) {
    est = estimate(t->n_projects(), table_rule(*t));
  } else {
    const auto& g = std::get<GridMechanism>(mech);
    // Continuous values are floored onto the mechanism's grid.
    est = estimate(g.n_projects(), [&g](std::span<const double> p,
                                        std::span<const double> a) {
      const GridShape& shape = g.shape();
      const auto k = static_cast<double>(shape.resolution() - 1);
      std::size_t pf = 0, af = 0;
      for (std::size_t i = 0; i < p.size(); ++i) {
        pf = pf * shape.resolution() + static_cast<std::size_t>(std::floor(p[i] * k));
        af = af * shape.resolution() + static_cast<std::size_t>(std::floor(a[i] * k));
      }
      return g.decision(pf, af);
    });
  }
  Json j = to_json(est);
  j["quantity"] = agent ? "agent_payoff" : "principal_profit";
  emit(f.out, j.dump(2) + "\n");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Project selection with no-overselling: optimize, audit, simulate"};
  app.set_config("--config", "", "INI/TOML file supplying default flag values");
  app.require_subcommand(1);
  Flags f;

  auto add_n_range = [&](CLI::App* cmd) {
    cmd->add_option("--n-min", f.n_min, "Smallest N")->capture_default_str();
    cmd->add_option("--n-max", f.n_max, "Largest N")->capture_default_str();
  };
  auto add_out = [&](CLI::App* cmd) {
    cmd->add_option("--out", f.out, "Output path (default stdout)");
  };
  auto add_tol = [&](CLI::App* cmd) {
    cmd->add_option("--tol", f.tol, "Root-finder tolerance")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
  };
  auto add_sampling = [&](CLI::App* cmd) {
    cmd->add_option("--samples", f.samples, "Monte Carlo sample count")
        ->check(CLI::Range(std::uint64_t{2}, std::uint64_t{1} << 40))
        ->capture_default_str();
    cmd->add_option("--seed", f.seed, "Random seed")->capture_default_str();
  };

  auto* optimize = app.add_subcommand("optimize", "Optimal single cutoff for N projects");
  optimize->add_option("--n", f.n, "Number of projects")->required()->check(CLI::Range(2, 100'000'000));
  add_tol(optimize);
  optimize->add_option("--format", f.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  add_out(optimize);

  auto* sweep = app.add_subcommand("sweep", "CSV: N, cutoff, eu, sqrtN_times_gap");
  add_n_range(sweep);
  add_tol(sweep);
  add_out(sweep);

  auto* compare = app.add_subcommand("compare", "CSV: N, no_verif, dynamic, static, transfers");
  add_n_range(compare);
  add_tol(compare);
  add_sampling(compare);
  add_out(compare);

  auto* dynamics = app.add_subcommand("dynamics", "CSV: N, c1, dynamic, static");
  add_n_range(dynamics);
  add_tol(dynamics);
  add_out(dynamics);

  auto* audit = app.add_subcommand("audit", "IC audit of a mechanism file");
  audit->add_option("mechanism", f.mechanism_path, "Mechanism JSON")->required();
  audit->add_option("--grid", f.grid, "Grid resolution used for cutoff files")
      ->check(CLI::Range(2, 64))
      ->capture_default_str();
  audit->add_flag("--unrestricted", f.unrestricted, "Allow overselling reports");
  audit->add_option("--decisions-csv", f.decisions_csv, "Also write per-profile decisions");
  add_out(audit);

  auto* search = app.add_subcommand("search", "Best table mechanism for N = 2 on a k-grid");
  search->add_option("--grid", f.grid, "Grid resolution k")
      ->check(CLI::Range(2, static_cast<int>(kMaxSearchResolution)))
      ->capture_default_str();
  add_out(search);

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimate for a mechanism file");
  simulate->add_option("mechanism", f.mechanism_path, "Mechanism JSON")->required();
  simulate->add_option("--quantity", f.quantity, "profit or agent")
      ->check(CLI::IsMember({"profit", "agent"}))
      ->capture_default_str();
  add_sampling(simulate);
  add_out(simulate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (*optimize) return run_optimize(f);
    if (*sweep) return run_sweep(f);
    if (*compare) return run_compare(f);
    if (*dynamics) return run_dynamics(f);
    if (*audit) return run_audit(f);
    if (*search) return run_search(f);
    if (*simulate) return run_simulate(f);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
