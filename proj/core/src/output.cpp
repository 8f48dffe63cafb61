#include "boson_chaos/output.hpp"

#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "boson_chaos/errors.hpp"

#ifndef BOSON_CHAOS_VERSION
#define BOSON_CHAOS_VERSION "dev"
#endif

namespace boson_chaos {

using Json = nlohmann::ordered_json;

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

namespace {

template <class T>
Json optional_json(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

Json config_json(const RunConfig& c) {
  Json j;
  j["experiment"] = c.experiment;
  j["n"] = c.particles;
  j["l"] = c.sites;
  j["w"] = c.disorders;
  j["j"] = optional_json(c.hopping);
  j["u"] = optional_json(c.interaction);
  j["beta"] = optional_json(c.beta);
  j["realizations"] = c.realizations;
  j["seed"] = c.seed;
  j["delta_e"] = c.delta_e;
  j["trim"] = c.trim;
  j["window"] = c.rolling_window;
  j["tmin"] = c.t_min;
  j["tmax"] = c.t_max;
  j["ppd"] = c.per_decade;
  j["dos_bins"] = c.dos_bins;
  j["energy_window"] = c.energy_window;
  j["nu_sigma"] = c.nu_sigma;
  j["hole_threshold"] = c.hole_threshold;
  j["fit_tmin"] = optional_json(c.fit_t_lo);
  j["fit_tmax"] = optional_json(c.fit_t_hi);
  j["states"] = c.states;
  j["c_range"] = c.c_range ? Json::array({c.c_range->first, c.c_range->second}) : Json(nullptr);
  j["k"] = c.k;
  j["c"] = optional_json(c.c_value);
  j["sweep_count"] = c.sweep_count;
  j["eta_scan"] = {c.eta_de_min, c.eta_de_max, c.eta_de_step};
  j["eta_stable"] = {c.eta_stable_min, c.eta_stable_max};
  j["max_dim"] = c.max_dimension;
  return j;
}

std::string config_line(const RunConfig& c) { return "# config: " + config_json(c).dump() + "\n"; }

std::filesystem::path prepare_dir(const RunConfig& c) {
  std::filesystem::path dir(c.out_dir);
  std::filesystem::create_directories(dir);
  Json snapshot;
  snapshot["schema_version"] = kSchemaVersion;
  snapshot["code_version"] = BOSON_CHAOS_VERSION;
  snapshot["config"] = config_json(c);
  Json reals = Json::array();
  for (const auto& r : sample_phases(c.seed, c.realizations)) {
    reals.push_back({{"index", r.index}, {"seed", r.seed}, {"phase", r.phase}});
  }
  snapshot["realizations"] = std::move(reals);
  std::ofstream(dir / "config.json") << snapshot.dump(2) << '\n';
  return dir;
}

std::ofstream open_csv(const std::filesystem::path& path, const RunConfig& c,
                       const std::string& header) {
  std::ofstream out(path);
  if (!out) throw DomainError("cannot write " + path.string());
  out << config_line(c) << header << '\n';
  return out;
}

std::string join(std::initializer_list<double> values) {
  std::string line;
  bool first = true;
  for (double v : values) {
    if (!first) line += ',';
    line += format_double(v);
    first = false;
  }
  return line;
}

template <class T>
T get_or(const Json& j, const char* key, T fallback) {
  if (!j.contains(key) || j[key].is_null()) return fallback;
  return j[key].get<T>();
}

template <class T>
std::optional<T> get_optional(const Json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return j[key].get<T>();
}

Json hole_json(const HoleReport& h) {
  return {{"present", h.present},
          {"depth", h.depth},
          {"t_min", h.t_min},
          {"sp_min", h.sp_min},
          {"t_end", optional_json(h.t_end)},
          {"threshold", h.threshold},
          {"t_search", h.t_search},
          {"noise", h.noise}};
}

Json analysis_json(const RunConfig& c, const SurvivalAnalysis& a) {
  Json j;
  j["state"] = a.state.str();
  j["rank"] = a.rank;
  j["crowding"] = a.crowding;
  j["ipr"] = a.ipr;
  j["ipr_corrected"] = a.ipr_corrected;
  j["pr"] = a.pr;
  j["eta"] = a.eta;
  j["eta_sem"] = a.eta_sem;
  j["nu_bar"] = a.nu_bar;
  j["heisenberg_time"] = a.heisenberg_time();
  j["degenerate_realizations"] = a.degenerate_realizations;
  j["gaussian_fit"] = {{"center", a.ldos_fit.center},
                       {"sigma", a.ldos_fit.width},
                       {"rss", a.ldos_fit.rss},
                       {"moment_fallback", a.ldos_fit.moment_fallback}};
  j["hole"] = hole_json(a.hole);
  if (a.power_law) {
    j["power_law"] = {{"exponent", a.power_law->exponent},
                      {"prefactor", a.power_law->prefactor},
                      {"rms_residual", a.power_law->rms_residual},
                      {"points", a.power_law->points},
                      {"used_peaks", a.power_law->used_peaks},
                      {"poor", a.power_law->poor},
                      {"t_lo", a.fit_t_lo},
                      {"t_hi", a.fit_t_hi}};
  } else {
    j["power_law"] = nullptr;
  }
  j["delta_e"] = c.delta_e;
  j["window"] = c.rolling_window;
  j["seed"] = c.seed;
  j["realizations"] = c.realizations;
  j["config"] = config_json(c);
  return j;
}

void write_survival_files(const std::filesystem::path& dir, const RunConfig& c,
                          const SurvivalAnalysis& a) {
  const std::string label = a.state.label();
  {
    auto out = open_csv(dir / ("survival_" + label + ".csv"), c,
                        "t,sp_mean,sp_rolled,sp_rolled_stderr,sp_analytic,sp_single");
    for (std::size_t i = 0; i < a.times.size(); ++i) {
      const double analytic = a.sp_analytic.empty() ? std::nan("") : a.sp_analytic[i];
      out << join({a.times[i], a.sp_mean[i], a.sp_rolled[i], a.sp_rolled_sem[i], analytic,
                       a.sp_raw.front()[i]})
          << '\n';
    }
  }
  {
    auto out = open_csv(dir / ("ldos_" + label + ".csv"), c, "kind,energy,mass");
    for (const auto& p : a.ldos_exact) out << "exact," << join({p.energy, p.mass}) << '\n';
    for (std::size_t b = 0; b < a.ldos_smoothed.masses.size(); ++b) {
      out << "smoothed," << join({a.ldos_smoothed.centers[b], a.ldos_smoothed.masses[b]}) << '\n';
    }
  }
  std::ofstream(dir / ("analysis_" + label + ".json")) << analysis_json(c, a).dump(2) << '\n';
}

}  // namespace

std::string config_to_json(const RunConfig& config) { return config_json(config).dump(2); }

RunConfig config_from_json(const std::string& text) {
  Json root;
  try {
    root = Json::parse(text);
  } catch (const Json::exception& e) {
    throw DomainError(std::string("config: cannot parse JSON: ") + e.what());
  }
  const Json& j = root.contains("config") ? root["config"] : root;
  RunConfig c;
  try {
    c.experiment = get_or<std::string>(j, "experiment", "");
    c.particles = get_or<unsigned>(j, "n", c.particles);
    c.sites = get_or<unsigned>(j, "l", c.sites);
    c.disorders = get_or<std::vector<double>>(j, "w", c.disorders);
    c.hopping = get_optional<double>(j, "j");
    c.interaction = get_optional<double>(j, "u");
    c.beta = get_optional<double>(j, "beta");
    c.realizations = get_or<unsigned>(j, "realizations", c.realizations);
    c.seed = get_or<std::uint64_t>(j, "seed", c.seed);
    c.delta_e = get_or<double>(j, "delta_e", c.delta_e);
    c.trim = get_or<double>(j, "trim", c.trim);
    c.rolling_window = get_or<std::size_t>(j, "window", c.rolling_window);
    c.t_min = get_or<double>(j, "tmin", c.t_min);
    c.t_max = get_or<double>(j, "tmax", c.t_max);
    c.per_decade = get_or<unsigned>(j, "ppd", c.per_decade);
    c.dos_bins = get_or<std::size_t>(j, "dos_bins", c.dos_bins);
    c.energy_window = get_or<std::size_t>(j, "energy_window", c.energy_window);
    c.nu_sigma = get_or<double>(j, "nu_sigma", c.nu_sigma);
    c.hole_threshold = get_or<double>(j, "hole_threshold", c.hole_threshold);
    c.fit_t_lo = get_optional<double>(j, "fit_tmin");
    c.fit_t_hi = get_optional<double>(j, "fit_tmax");
    c.states = get_or<std::vector<std::string>>(j, "states", {});
    if (auto range = get_optional<std::vector<double>>(j, "c_range")) {
      if (range->size() != 2) throw DomainError("config: c_range needs two values");
      c.c_range = std::pair{(*range)[0], (*range)[1]};
    }
    c.k = get_or<std::size_t>(j, "k", c.k);
    c.c_value = get_optional<double>(j, "c");
    c.sweep_count = get_or<std::size_t>(j, "sweep_count", c.sweep_count);
    if (auto scan = get_optional<std::vector<double>>(j, "eta_scan")) {
      if (scan->size() != 3) throw DomainError("config: eta_scan needs min, max, step");
      c.eta_de_min = (*scan)[0];
      c.eta_de_max = (*scan)[1];
      c.eta_de_step = (*scan)[2];
    }
    if (auto stable = get_optional<std::vector<double>>(j, "eta_stable")) {
      if (stable->size() != 2) throw DomainError("config: eta_stable needs min, max");
      c.eta_stable_min = (*stable)[0];
      c.eta_stable_max = (*stable)[1];
    }
    c.max_dimension = get_or<std::size_t>(j, "max_dim", c.max_dimension);
  } catch (const Json::exception& e) {
    throw DomainError(std::string("config: ") + e.what());
  }
  return c;
}

void write_ratio_sweep(const RunConfig& config, std::span<const RatioSweepRow> rows) {
  const auto dir = prepare_dir(config);
  auto out = open_csv(dir / "ratios_vs_W.csv", config, "W,mean_r,stderr,degenerate");
  for (const auto& r : rows) {
    out << join({r.disorder, r.mean, r.sem}) << ',' << r.degenerate << '\n';
  }
}

void write_ratio_energy(const RunConfig& config, const RatioEnergyResult& result) {
  const auto dir = prepare_dir(config);
  {
    auto out = open_csv(dir / "ratio_vs_energy.csv", config, "E_per_N,mean_r,spacings,degenerate");
    for (const auto& w : result.windows) {
      out << join({w.energy_per_particle, w.mean_ratio}) << ',' << w.spacings << ','
          << w.degenerate << '\n';
    }
  }
  auto out = open_csv(dir / "dos.csv", config, "E_per_N,density");
  for (std::size_t b = 0; b < result.dos.centers.size(); ++b) {
    out << join({result.dos.centers[b], result.dos.density[b]}) << '\n';
  }
}

void write_profiles(const RunConfig& config, std::span<const StateProfile> profiles) {
  const auto dir = prepare_dir(config);
  auto out = open_csv(dir / "profiles.csv", config,
                      "state,rank,C,cluster,E_per_N,E_per_N_stderr,PR,PR_over_dim,IPR,PR_of_mean_IPR");
  for (const auto& p : profiles) {
    out << '"' << p.state.str() << "\"," << p.rank << ','
        << join({p.crowding, crowding_cluster(p.crowding), p.energy_per_particle,
                 p.energy_per_particle_sem, p.pr, p.pr_over_dim, p.ipr, p.pr_of_mean_ipr})
        << '\n';
  }
}

void write_survival(const RunConfig& config, std::span<const SurvivalAnalysis> analyses) {
  const auto dir = prepare_dir(config);
  for (const auto& a : analyses) write_survival_files(dir, config, a);
}

void write_pr_sweep(const RunConfig& config, const PrSweepResult& result) {
  const auto dir = prepare_dir(config);
  for (const auto& a : result.curves) write_survival_files(dir, config, a);
  auto out = open_csv(dir / "pr_sweep.csv", config,
                      "state,rank,C,PR,eta,ipr,hole_depth,hole_present,t_end");
  for (const auto& a : result.curves) {
    out << '"' << a.state.str() << "\"," << a.rank << ','
        << join({a.crowding, a.pr, a.eta, a.ipr, a.hole.depth}) << ','
        << (a.hole.present ? 1 : 0) << ','
        << (a.hole.t_end ? format_double(*a.hole.t_end) : std::string("nan")) << '\n';
  }
  Json summary;
  summary["c"] = result.c_value;
  summary["depth_non_decreasing"] = result.depth_non_decreasing;
  summary["config"] = config_json(config);
  std::ofstream(dir / "pr_sweep.json") << summary.dump(2) << '\n';
}

void write_eta_scan(const RunConfig& config, const EtaScanResult& result) {
  const auto dir = prepare_dir(config);
  {
    auto out = open_csv(dir / "eta_scan.csv", config, "delta_e,eta_mean,eta_stderr");
    for (const auto& r : result.rows) out << join({r.delta_e, r.mean, r.sem}) << '\n';
  }
  Json summary;
  summary["state"] = result.state.str();
  summary["stable_range"] = {config.eta_stable_min, config.eta_stable_max};
  summary["eta_mean"] = result.stable_mean;
  summary["eta_dispersion"] = result.stable_dispersion;
  summary["relative_dispersion"] = result.relative_dispersion();
  summary["eta_sem"] = result.stable_sem;
  summary["relative_sem"] = result.relative_sem();
  summary["config"] = config_json(config);
  std::ofstream(dir / "eta_summary.json") << summary.dump(2) << '\n';
}

void write_eta_vs_pr(const RunConfig& config, std::span<const EtaPrRow> rows) {
  const auto dir = prepare_dir(config);
  auto out = open_csv(dir / "eta_pr.csv", config, "state,PR,eta,C");
  for (const auto& r : rows) {
    out << '"' << r.state.str() << "\"," << join({r.pr, r.eta, r.crowding}) << '\n';
  }
}

std::filesystem::path run_experiment(const RunConfig& config) {
  const std::string& e = config.experiment;
  if (e == "ratio-sweep") {
    write_ratio_sweep(config, run_ratio_sweep(config));
  } else if (e == "ratio-energy") {
    write_ratio_energy(config, run_ratio_energy(config));
  } else if (e == "classify") {
    write_profiles(config, run_classify(config));
  } else if (e == "survival") {
    const auto states = resolve_states(config);
    write_survival(config, run_survival(config, states));
  } else if (e == "pr-sweep") {
    write_pr_sweep(config, run_pr_sweep(config));
  } else if (e == "eta-scan") {
    if (config.states.size() != 1) throw DomainError("eta-scan: give exactly one --state");
    write_eta_scan(config, run_eta_scan(config, FockState::parse(config.states.front())));
  } else if (e == "eta-pr") {
    write_eta_vs_pr(config, run_eta_vs_pr(config));
  } else if (e == "dump-matrix") {
    config.validate();
    const auto table = BasisTable::build(config.particles, config.sites, config.max_dimension);
    const auto phase = sample_phases(config.seed, 1).front().phase;
    const auto h = assemble(config.model(config.disorders.front(), phase), table);
    const auto dir = prepare_dir(config);
    std::ofstream out(dir / "hamiltonian.mtx");
    h.write_matrix_market(out, config_json(config).dump());
  } else {
    throw DomainError("unknown experiment '" + e + "'");
  }
  return std::filesystem::path(config.out_dir);
}

}  // namespace boson_chaos
