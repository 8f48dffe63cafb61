#pragma once

#include <filesystem>
#include <string>

#include "boson_chaos/ensemble.hpp"
#include "boson_chaos/experiments.hpp"

namespace boson_chaos {

// "%.17g"
std::string format_double(double value);

// Snapshot of every setting that influences the numbers. out_dir, workers and
// the memory budget are execution details and are left out.
std::string config_to_json(const RunConfig& config);
RunConfig config_from_json(const std::string& text);

// One directory per experiment: config.json plus the artifact files. Every CSV
// starts with a "# config: {...}" line holding the same snapshot.
void write_ratio_sweep(const RunConfig& config, std::span<const RatioSweepRow> rows);
void write_ratio_energy(const RunConfig& config, const RatioEnergyResult& result);
void write_profiles(const RunConfig& config, std::span<const StateProfile> profiles);
void write_survival(const RunConfig& config, std::span<const SurvivalAnalysis> analyses);
void write_pr_sweep(const RunConfig& config, const PrSweepResult& result);
void write_eta_scan(const RunConfig& config, const EtaScanResult& result);
void write_eta_vs_pr(const RunConfig& config, std::span<const EtaPrRow> rows);

// Runs config.experiment and writes its outputs; returns the output directory.
std::filesystem::path run_experiment(const RunConfig& config);

}  // namespace boson_chaos
