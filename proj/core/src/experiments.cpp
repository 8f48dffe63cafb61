#include "boson_chaos/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "boson_chaos/errors.hpp"
#include "boson_chaos/numerics.hpp"

namespace boson_chaos {

namespace {

void require_positive_disorder(double w) {
  if (w == 0.0) {
    throw DomainError(
        "W = 0 is refused: without the quasiperiodic potential the chain has invariant "
        "subspaces, and level ratios mixed across them do not measure chaos");
  }
}

std::vector<double> to_std(const arma::vec& v) { return {v.begin(), v.end()}; }

struct StateRealization {
  std::vector<double> weights;
  std::vector<double> sp;
  Asymptote asymptote;
  double eta = 0.0;
};

struct SurvivalRealization {
  std::vector<double> energies;
  std::vector<StateRealization> states;
};

std::vector<std::size_t> ranks_of(const BasisTable& table, std::span<const FockState> states) {
  std::vector<std::size_t> ranks;
  ranks.reserve(states.size());
  for (const auto& s : states) ranks.push_back(table.rank(s));
  return ranks;
}

std::vector<double> weights_from(const arma::vec& components) {
  std::vector<double> p(components.n_elem);
  for (arma::uword m = 0; m < components.n_elem; ++m) p[m] = components[m] * components[m];
  return p;
}

// From a few decay times after the start to where the curve stops lying
// significantly above IPR, i.e. where the hole search begins.
std::pair<double, double> power_law_range(const RunConfig& config, const SurvivalAnalysis& a) {
  const double lo = config.fit_t_lo.value_or(3.0 / a.ldos_fit.width);
  const double hi = config.fit_t_hi.value_or(a.hole.t_search);
  return {lo, hi};
}

// Standard error of the rolled ensemble mean, from the spread of the
// per-realization rolled curves.
std::vector<double> rolled_sem(std::span<const std::vector<double>> sp, std::size_t window) {
  const std::size_t n = sp.front().size();
  std::vector<std::vector<double>> rolled;
  rolled.reserve(sp.size());
  for (const auto& s : sp) rolled.push_back(rolling_average(s, window));
  std::vector<double> out(n, 0.0);
  if (sp.size() < 2) return out;
  std::vector<double> column(sp.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t r = 0; r < sp.size(); ++r) column[r] = rolled[r][i];
    out[i] = mean_error(column).sem;
  }
  return out;
}

SurvivalAnalysis reduce_state(const RunConfig& config, const BasisTable& table,
                              const FockState& state, std::span<const SurvivalRealization> runs,
                              std::size_t which, std::span<const double> times) {
  SurvivalAnalysis a;
  a.state = state;
  a.rank = table.rank(state);
  a.crowding = crowding(state);
  a.times.assign(times.begin(), times.end());
  const auto count = static_cast<double>(runs.size());

  std::vector<std::vector<double>> sp;
  std::vector<double> ipr, corrected, pr, eta;
  sp.reserve(runs.size());
  for (const auto& run : runs) {
    const auto& s = run.states[which];
    sp.push_back(s.sp);
    ipr.push_back(s.asymptote.ipr);
    corrected.push_back(s.asymptote.corrected);
    pr.push_back(1.0 / s.asymptote.ipr);
    eta.push_back(s.eta);
    a.degenerate_realizations += s.asymptote.degenerate() ? 1 : 0;
  }
  a.sp_mean = pairwise_sum(std::span<const std::vector<double>>(sp));
  for (double& v : a.sp_mean) v /= count;
  a.sp_raw = std::move(sp);
  a.ipr = mean_error(ipr).mean;
  a.ipr_corrected = mean_error(corrected).mean;
  a.pr = mean_error(pr).mean;
  const auto eta_stats = mean_error(eta);
  a.eta = eta_stats.mean;
  a.eta_sem = eta_stats.sem;

  a.ldos_exact = exact_ldos(runs[0].states[which].weights, runs[0].energies);
  std::vector<LdosPoint> pooled;
  double lowest = std::numeric_limits<double>::infinity();
  for (const auto& run : runs) {
    const auto& w = run.states[which].weights;
    for (std::size_t m = 0; m < w.size(); ++m) {
      pooled.push_back({run.energies[m], w[m] / count});
      lowest = std::min(lowest, run.energies[m]);
    }
  }
  a.ldos_smoothed = smooth_ldos(pooled, config.delta_e, lowest);
  a.ldos_fit = fit_gaussian(a.ldos_smoothed);

  std::vector<double> nu;
  for (const auto& run : runs) {
    nu.push_back(mean_level_density(run.energies, a.ldos_fit.center,
                                    config.nu_sigma * a.ldos_fit.width));
  }
  a.nu_bar = mean_error(nu).mean;

  const double asymptote = a.degenerate_realizations > 0 ? a.ipr_corrected : a.ipr;
  AnalyticInputs inputs{asymptote, a.eta, a.nu_bar, a.ldos_fit};
  if (a.eta > 1.0 && a.nu_bar > 0.0) a.sp_analytic = analytic_sp(inputs, times);
  a.sp_rolled = rolling_average(a.sp_mean, config.rolling_window);
  a.sp_rolled_sem = rolled_sem(a.sp_raw, config.rolling_window);
  HoleSearch search;
  search.noise = a.sp_rolled_sem;
  if (a.nu_bar > 0.0) search.t_stop = a.heisenberg_time();
  a.hole = detect_hole(a.sp_rolled, times, asymptote, a.eta, config.hole_threshold, search);

  const auto [lo, hi] = power_law_range(config, a);
  a.fit_t_lo = lo;
  a.fit_t_hi = hi;
  try {
    a.power_law = fit_power_law(a.sp_rolled, times, lo, hi);
  } catch (const DomainError&) {
    a.power_law.reset();  // range too short for a fit
  }
  return a;
}

}  // namespace

double SurvivalAnalysis::heisenberg_time() const { return 2.0 * std::numbers::pi * nu_bar; }

std::vector<RatioSweepRow> run_ratio_sweep(const RunConfig& config) {
  config.validate();
  for (double w : config.disorders) require_positive_disorder(w);
  pin_blas_threads();
  const auto table = BasisTable::build(config.particles, config.sites, config.max_dimension);
  const auto phases = sample_phases(config.seed, config.realizations);
  const unsigned workers = effective_workers(config, phases.size(), table.size());

  std::vector<RatioSweepRow> rows;
  for (double w : config.disorders) {
    auto results = run_indexed<RatioSummary>(phases.size(), workers, [&](std::size_t i) {
      const auto h = assemble(config.model(w, phases[i].phase), table);
      const auto values = eigenvalues_only(h, phases[i].seed);
      return mean_ratio_trimmed(std::span<const double>(values.memptr(), values.n_elem),
                                config.trim);
    });
    std::vector<double> means;
    RatioSweepRow row;
    row.disorder = w;
    for (const auto& r : results) {
      means.push_back(r.mean);
      row.degenerate += r.degenerate;
    }
    const auto stats = mean_error(means);
    row.mean = stats.mean;
    row.sem = stats.sem;
    rows.push_back(row);
  }
  return rows;
}

RatioEnergyResult run_ratio_energy(const RunConfig& config) {
  config.validate();
  const double w = config.disorders.front();
  require_positive_disorder(w);
  pin_blas_threads();
  const auto table = BasisTable::build(config.particles, config.sites, config.max_dimension);
  const auto phases = sample_phases(config.seed, config.realizations);
  const unsigned workers = effective_workers(config, phases.size(), table.size());

  auto spectra = run_indexed<std::vector<double>>(phases.size(), workers, [&](std::size_t i) {
    const auto h = assemble(config.model(w, phases[i].phase), table);
    return to_std(eigenvalues_only(h, phases[i].seed));
  });
  RatioEnergyResult out;
  out.window = config.energy_window ? config.energy_window : std::max<std::size_t>(3, table.size() / 12);
  out.windows = ratio_vs_energy(spectra, out.window, config.particles);
  out.dos = dos_histogram(spectra, config.particles, config.dos_bins);
  return out;
}

std::vector<StateProfile> run_classify(const RunConfig& config) {
  config.validate();
  const double w = config.disorders.front();
  pin_blas_threads();
  const auto table = BasisTable::build(config.particles, config.sites, config.max_dimension);
  const auto phases = sample_phases(config.seed, config.realizations);
  const unsigned workers = effective_workers(config, phases.size(), table.size());

  auto samples = run_indexed<StateSample>(phases.size(), workers, [&](std::size_t i) {
    const auto params = config.model(w, phases[i].phase);
    const auto decomp = diagonalize(assemble(params, table), phases[i].seed);
    return sample_states(table, params, decomp);
  });
  return classify_all(table, samples);
}

std::vector<FockState> resolve_states(const RunConfig& config) {
  std::vector<FockState> states;
  for (const auto& text : config.states) states.push_back(FockState::parse(text));
  if (!states.empty()) return states;
  if (!config.c_range) throw DomainError("survival: give --state or --c-range");
  const auto profiles = run_classify(config);
  const auto extremes =
      select_extremes(profiles, config.c_range->first, config.c_range->second, config.k);
  for (const auto& p : extremes.highest) states.push_back(p.state);
  for (const auto& p : extremes.lowest) states.push_back(p.state);
  return states;
}

std::vector<SurvivalAnalysis> run_survival(const RunConfig& config,
                                           std::span<const FockState> states) {
  config.validate();
  if (states.empty()) throw DomainError("survival: empty state list");
  const double w = config.disorders.front();
  pin_blas_threads();
  const auto table = BasisTable::build(config.particles, config.sites, config.max_dimension);
  for (const auto& s : states) {
    if (s.sites() != table.sites() || s.particles() != table.particles()) {
      throw DomainError("survival: state " + s.str() + " is not in the N=" +
                        std::to_string(table.particles()) + ", L=" +
                        std::to_string(table.sites()) + " basis");
    }
  }
  const auto ranks = ranks_of(table, states);
  const auto phases = sample_phases(config.seed, config.realizations);
  const unsigned workers = effective_workers(config, phases.size(), table.size());
  const auto grid = config.grid();

  auto runs = run_indexed<SurvivalRealization>(phases.size(), workers, [&](std::size_t i) {
    const auto h = assemble(config.model(w, phases[i].phase), table);
    const auto spec = diagonalize_projected(h, ranks, phases[i].seed);
    SurvivalRealization run;
    run.energies = to_std(spec.eigenvalues);
    for (std::size_t j = 0; j < ranks.size(); ++j) {
      StateRealization s;
      s.weights = weights_from(spec.components.col(j));
      s.sp = survival_probability(s.weights, run.energies, grid.points);
      s.asymptote = long_time_average(s.weights, run.energies);
      s.eta = estimate_eta(s.weights, run.energies, config.delta_e);
      run.states.push_back(std::move(s));
    }
    return run;
  });

  std::vector<SurvivalAnalysis> out;
  for (std::size_t j = 0; j < states.size(); ++j) {
    out.push_back(reduce_state(config, table, states[j], runs, j, grid.points));
  }
  return out;
}

PrSweepResult run_pr_sweep(const RunConfig& config) {
  config.validate();
  if (!config.c_value) throw DomainError("pr-sweep: --c is required");
  if (config.sweep_count < 2) throw DomainError("pr-sweep: need at least 2 states in the sweep");
  const auto profiles = run_classify(config);
  std::vector<StateProfile> cluster;
  for (const auto& p : profiles) {
    if (std::abs(p.crowding - *config.c_value) < 1e-9) cluster.push_back(p);
  }
  if (cluster.size() < 4) {
    throw DomainError("pr-sweep: C = " + std::to_string(*config.c_value) + " is realized by " +
                      std::to_string(cluster.size()) + " states, need at least 4");
  }
  std::sort(cluster.begin(), cluster.end(), [](const StateProfile& a, const StateProfile& b) {
    return a.pr != b.pr ? a.pr < b.pr : a.rank < b.rank;
  });

  // constant PR steps from the lowest to the highest PR, nearest unused state
  PrSweepResult out;
  out.c_value = *config.c_value;
  const std::size_t count = std::min(config.sweep_count, cluster.size());
  const double lo = cluster.front().pr;
  const double hi = cluster.back().pr;
  std::vector<bool> used(cluster.size(), false);
  for (std::size_t j = 0; j < count; ++j) {
    const double target = lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(count - 1);
    std::size_t best = cluster.size();
    for (std::size_t i = 0; i < cluster.size(); ++i) {
      if (used[i]) continue;
      if (best == cluster.size() ||
          std::abs(cluster[i].pr - target) < std::abs(cluster[best].pr - target)) {
        best = i;
      }
    }
    used[best] = true;
    out.selected.push_back(cluster[best]);
  }
  std::sort(out.selected.begin(), out.selected.end(),
            [](const StateProfile& a, const StateProfile& b) {
              return a.pr != b.pr ? a.pr < b.pr : a.rank < b.rank;
            });
  std::vector<FockState> states;
  for (const auto& p : out.selected) states.push_back(p.state);
  out.curves = run_survival(config, states);
  out.depth_non_decreasing = true;
  for (std::size_t j = 1; j < out.curves.size(); ++j) {
    if (out.curves[j].hole.depth < out.curves[j - 1].hole.depth) out.depth_non_decreasing = false;
  }
  return out;
}

EtaScanResult run_eta_scan(const RunConfig& config, const FockState& state) {
  config.validate();
  const double w = config.disorders.front();
  pin_blas_threads();
  const auto table = BasisTable::build(config.particles, config.sites, config.max_dimension);
  const std::size_t rank = table.rank(state);
  const auto phases = sample_phases(config.seed, config.realizations);
  const unsigned workers = effective_workers(config, phases.size(), table.size());
  const std::size_t ranks[] = {rank};

  using Spectrum = std::pair<std::vector<double>, std::vector<double>>;  // energies, weights
  auto runs = run_indexed<Spectrum>(phases.size(), workers, [&](std::size_t i) {
    const auto h = assemble(config.model(w, phases[i].phase), table);
    const auto spec = diagonalize_projected(h, ranks, phases[i].seed);
    return Spectrum{to_std(spec.eigenvalues), weights_from(spec.components.col(0))};
  });

  EtaScanResult out;
  out.state = state;
  const auto steps = static_cast<std::size_t>(
      std::floor((config.eta_de_max - config.eta_de_min) / config.eta_de_step + 1e-9));
  std::vector<double> stable;
  for (std::size_t j = 0; j <= steps; ++j) {
    const double de = config.eta_de_min + config.eta_de_step * static_cast<double>(j);
    std::vector<double> etas;
    for (const auto& [energies, weights] : runs) etas.push_back(estimate_eta(weights, energies, de));
    const auto stats = mean_error(etas);
    out.rows.push_back({de, stats.mean, stats.sem});
    if (de >= config.eta_stable_min - 1e-9 && de <= config.eta_stable_max + 1e-9) {
      stable.push_back(stats.mean);
    }
  }
  if (stable.empty()) throw DomainError("eta-scan: stable range holds no scan point");
  const auto s = mean_error(stable);
  out.stable_mean = s.mean;
  out.stable_dispersion = s.stddev;
  out.stable_sem = s.sem;
  return out;
}

std::vector<EtaPrRow> run_eta_vs_pr(const RunConfig& config) {
  config.validate();
  const double w = config.disorders.front();
  pin_blas_threads();
  const auto table = BasisTable::build(config.particles, config.sites, config.max_dimension);
  const auto phases = sample_phases(config.seed, config.realizations);
  const unsigned workers = effective_workers(config, phases.size(), table.size());
  const std::size_t dim = table.size();

  using PerState = std::pair<std::vector<double>, std::vector<double>>;  // pr, eta
  auto runs = run_indexed<PerState>(phases.size(), workers, [&](std::size_t i) {
    const auto h = assemble(config.model(w, phases[i].phase), table);
    const auto decomp = diagonalize(h, phases[i].seed);
    const auto energies = to_std(decomp.eigenvalues);
    const arma::mat vt = decomp.eigenvectors.t();
    PerState out{std::vector<double>(dim), std::vector<double>(dim)};
    std::vector<double> weights(dim);
    for (std::size_t k = 0; k < dim; ++k) {
      const double* c = vt.colptr(k);
      for (std::size_t m = 0; m < dim; ++m) weights[m] = c[m] * c[m];
      out.first[k] = participation_ratio(std::span<const double>(c, dim));
      out.second[k] = estimate_eta(weights, energies, config.delta_e);
    }
    return out;
  });

  std::vector<EtaPrRow> rows(dim);
  std::vector<double> pr(runs.size()), eta(runs.size());
  for (std::size_t k = 0; k < dim; ++k) {
    for (std::size_t r = 0; r < runs.size(); ++r) {
      pr[r] = runs[r].first[k];
      eta[r] = runs[r].second[k];
    }
    rows[k] = {table[k], mean_error(pr).mean, mean_error(eta).mean, crowding(table[k])};
  }
  return rows;
}

}  // namespace boson_chaos
