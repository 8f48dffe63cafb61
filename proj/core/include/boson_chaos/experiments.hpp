#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "boson_chaos/dynamics.hpp"
#include "boson_chaos/ensemble.hpp"
#include "boson_chaos/spectral_stats.hpp"
#include "boson_chaos/state_classify.hpp"

namespace boson_chaos {

struct RatioSweepRow {
  double disorder = 0.0;
  double mean = 0.0;  // realization mean of the trimmed mean ratio
  double sem = 0.0;
  std::size_t degenerate = 0;
};

// Refuses W = 0: the clean Bose-Hubbard chain splits into invariant subspaces
// whose ratios must be analysed separately.
std::vector<RatioSweepRow> run_ratio_sweep(const RunConfig& config);

struct RatioEnergyResult {
  std::size_t window = 0;
  std::vector<EnergyWindowRatio> windows;
  Histogram dos;
};

RatioEnergyResult run_ratio_energy(const RunConfig& config);

std::vector<StateProfile> run_classify(const RunConfig& config);

struct SurvivalAnalysis {
  FockState state;
  std::size_t rank = 0;
  double crowding = 0.0;
  std::vector<double> times;
  std::vector<std::vector<double>> sp_raw;  // per realization
  std::vector<double> sp_mean;
  std::vector<double> sp_rolled;
  std::vector<double> sp_rolled_sem;  // spread of per-realization rolled curves / sqrt(R)
  std::vector<double> sp_analytic;

  double ipr = 0.0;            // realization mean of sum |c|^4
  double ipr_corrected = 0.0;  // with degenerate cross terms
  double pr = 0.0;             // realization mean of 1 / IPR
  double eta = 0.0;            // realization mean
  double eta_sem = 0.0;
  double nu_bar = 0.0;
  std::size_t degenerate_realizations = 0;

  std::vector<LdosPoint> ldos_exact;  // first realization
  LdosHistogram ldos_smoothed;        // realization average
  GaussianLdosFit ldos_fit;
  HoleReport hole;
  std::optional<PowerLawFit> power_law;
  double fit_t_lo = 0.0;
  double fit_t_hi = 0.0;

  double heisenberg_time() const;
};

// States from config.states, or the PR extremes of config.c_range when empty.
std::vector<FockState> resolve_states(const RunConfig& config);

std::vector<SurvivalAnalysis> run_survival(const RunConfig& config,
                                           std::span<const FockState> states);

struct PrSweepResult {
  double c_value = 0.0;
  std::vector<StateProfile> selected;      // ascending PR
  std::vector<SurvivalAnalysis> curves;    // same order
  bool depth_non_decreasing = false;
};

PrSweepResult run_pr_sweep(const RunConfig& config);

struct EtaScanRow {
  double delta_e = 0.0;
  double mean = 0.0;
  double sem = 0.0;
};

struct EtaScanResult {
  FockState state;
  std::vector<EtaScanRow> rows;
  double stable_mean = 0.0;        // mean over delta_e in the stable range
  double stable_dispersion = 0.0;  // standard deviation over that range
  double stable_sem = 0.0;         // standard error of stable_mean
  double relative_dispersion() const { return stable_dispersion / stable_mean; }
  double relative_sem() const { return stable_sem / stable_mean; }
};

EtaScanResult run_eta_scan(const RunConfig& config, const FockState& state);

struct EtaPrRow {
  FockState state;
  double pr = 0.0;
  double eta = 0.0;
  double crowding = 0.0;
};

std::vector<EtaPrRow> run_eta_vs_pr(const RunConfig& config);

}  // namespace boson_chaos
