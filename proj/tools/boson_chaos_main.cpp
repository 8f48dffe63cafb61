// boson-chaos: disorder-ensemble experiments on the interacting Aubry-Andre chain.
//
// Exit codes: 0 success, 2 configuration error, 3 numeric failure.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "boson_chaos/ensemble.hpp"
#include "boson_chaos/errors.hpp"
#include "boson_chaos/output.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct Flags {
  std::vector<double> w;
  std::optional<double> j, u, beta;
  std::optional<double> c_lo, c_hi;
  std::string c_range;
  std::optional<double> fit_tmin, fit_tmax;
};

void add_common(CLI::App& sub, boson_chaos::RunConfig& c, Flags& f) {
  sub.add_option("--n", c.particles, "number of bosons N")->capture_default_str();
  sub.add_option("--l", c.sites, "number of sites L")->capture_default_str();
  sub.add_option("--w", f.w, "disorder amplitude W (comma list for sweeps)")->delimiter(',');
  sub.add_option("--j", f.j, "hopping J (default 1/2)");
  sub.add_option("--u", f.u, "interaction U (default 4/(N-1))");
  sub.add_option("--beta", f.beta, "incommensuration beta (default 1.618)");
  sub.add_option("--realizations", c.realizations, "disorder phases")->capture_default_str();
  sub.add_option("--seed", c.seed, "master seed")->capture_default_str();
  sub.add_option("--delta-e", c.delta_e, "LDoS/eta bin width")->capture_default_str();
  sub.add_option("--trim", c.trim, "spectrum fraction dropped at each edge")->capture_default_str();
  sub.add_option("--window", c.rolling_window, "rolling average width in grid points")
      ->capture_default_str();
  sub.add_option("--tmin", c.t_min, "first time point")->capture_default_str();
  sub.add_option("--tmax", c.t_max, "last time point")->capture_default_str();
  sub.add_option("--ppd", c.per_decade, "time points per decade")->capture_default_str();
  sub.add_option("--out", c.out_dir, "output directory")->capture_default_str();
  sub.add_option("--workers", c.workers, "parallel realizations (0 = all cores)")
      ->capture_default_str();
  sub.add_option("--memory-gb", c.memory_budget_gb, "budget for concurrent dense solves")
      ->capture_default_str();
  sub.add_option("--max-dim", c.max_dimension, "refuse larger Hilbert spaces")
      ->capture_default_str();
}

void add_states(CLI::App& sub, boson_chaos::RunConfig& c, Flags& f) {
  sub.add_option("--state", c.states, "initial state, comma occupations (repeatable)");
  sub.add_option("--c-range", f.c_range, "crowding interval lo,hi for PR extremes");
  sub.add_option("--k", c.k, "states per PR extreme")->capture_default_str();
  sub.add_option("--nu-sigma", c.nu_sigma, "nu_bar window half-width in sigma")
      ->capture_default_str();
  sub.add_option("--hole-threshold", c.hole_threshold, "hole presence cut in units of 1/eta")
      ->capture_default_str();
  sub.add_option("--fit-tmin", f.fit_tmin, "power-law fit start");
  sub.add_option("--fit-tmax", f.fit_tmax, "power-law fit end");
}

void finish(boson_chaos::RunConfig& c, const Flags& f) {
  if (!f.w.empty()) c.disorders = f.w;
  c.hopping = f.j;
  c.interaction = f.u;
  c.beta = f.beta;
  c.fit_t_lo = f.fit_tmin;
  c.fit_t_hi = f.fit_tmax;
  if (!f.c_range.empty()) {
    std::istringstream in(f.c_range);
    double lo = 0.0, hi = 0.0;
    char comma = 0;
    if (!(in >> lo >> comma >> hi) || comma != ',') {
      throw boson_chaos::DomainError("--c-range expects lo,hi");
    }
    c.c_range = std::pair{lo, hi};
  }
}

}  // namespace

int main(int argc, char** argv) {
  boson_chaos::relaunch_with_fallback_blas(argv);
  CLI::App app{"Level statistics and survival-probability dynamics of bosons on a "
               "quasiperiodic chain"};
  app.require_subcommand(1);

  boson_chaos::RunConfig config;
  Flags flags;
  std::string replay_path;

  auto* sweep = app.add_subcommand("ratio-sweep", "mean spacing ratio versus W");
  add_common(*sweep, config, flags);

  auto* energy = app.add_subcommand("ratio-energy", "spacing ratio versus E/N plus DOS");
  add_common(*energy, config, flags);
  energy->add_option("--energy-window", config.energy_window, "levels per window (0 = dim/12)");
  energy->add_option("--bins", config.dos_bins, "DOS bins")->capture_default_str();

  auto* classify = app.add_subcommand("classify", "C, E/N and PR of every Fock state");
  add_common(*classify, config, flags);

  auto* survival = app.add_subcommand("survival", "survival probability analysis");
  add_common(*survival, config, flags);
  add_states(*survival, config, flags);

  auto* prsweep = app.add_subcommand("pr-sweep", "survival across a PR-ordered C cluster");
  add_common(*prsweep, config, flags);
  add_states(*prsweep, config, flags);
  prsweep->add_option("--c", config.c_value, "crowding value of the cluster")->required();
  prsweep->add_option("--count", config.sweep_count, "states in the sweep")->capture_default_str();

  auto* etascan = app.add_subcommand("eta-scan", "eta versus LDoS bin width");
  add_common(*etascan, config, flags);
  etascan->add_option("--state", config.states, "initial state")->required();
  etascan->add_option("--de-min", config.eta_de_min)->capture_default_str();
  etascan->add_option("--de-max", config.eta_de_max)->capture_default_str();
  etascan->add_option("--de-step", config.eta_de_step)->capture_default_str();
  etascan->add_option("--stable-min", config.eta_stable_min)->capture_default_str();
  etascan->add_option("--stable-max", config.eta_stable_max)->capture_default_str();

  auto* etapr = app.add_subcommand("eta-pr", "eta and PR of every Fock state");
  add_common(*etapr, config, flags);

  auto* dump = app.add_subcommand("dump-matrix", "write one realization as MatrixMarket");
  add_common(*dump, config, flags);

  auto* replay = app.add_subcommand("replay", "rerun from a config.json snapshot");
  replay->add_option("config", replay_path, "config.json written by an earlier run")->required();
  replay->add_option("--out", config.out_dir, "output directory")->capture_default_str();
  replay->add_option("--workers", config.workers, "parallel realizations")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (replay->parsed()) {
      std::ifstream in(replay_path);
      if (!in) throw boson_chaos::DomainError("cannot read " + replay_path);
      std::stringstream text;
      text << in.rdbuf();
      auto loaded = boson_chaos::config_from_json(text.str());
      loaded.out_dir = config.out_dir;
      loaded.workers = config.workers;
      config = std::move(loaded);
    } else {
      config.experiment = app.get_subcommands().front()->get_name();
      finish(config, flags);
    }
    const auto dir = boson_chaos::run_experiment(config);
    std::cerr << config.experiment << ": wrote " << dir.string() << '\n';
  } catch (const boson_chaos::DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const boson_chaos::NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  }
  return 0;
}
