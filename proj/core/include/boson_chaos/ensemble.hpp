#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "boson_chaos/dynamics.hpp"
#include "boson_chaos/fock_basis.hpp"
#include "boson_chaos/hamiltonian.hpp"
#include "boson_chaos/spectral_stats.hpp"

namespace boson_chaos {

inline constexpr int kSchemaVersion = 1;

struct RunConfig {
  std::string experiment;
  unsigned particles = 7;
  unsigned sites = 7;
  std::vector<double> disorders{0.6};
  std::optional<double> hopping;
  std::optional<double> interaction;
  std::optional<double> beta;

  unsigned realizations = 40;
  std::uint64_t seed = 20240611;

  double delta_e = kDefaultLdosBinWidth;
  double trim = kDefaultTrim;
  std::size_t rolling_window = kDefaultRollingWindow;
  double t_min = 0.1;
  double t_max = 1e6;
  unsigned per_decade = 100;
  std::size_t dos_bins = kDefaultDosBins;
  std::size_t energy_window = 0;  // levels per window; 0 -> dim / 12
  double nu_sigma = 1.0;          // nu_bar window half-width in units of sigma
  double hole_threshold = kDefaultHoleThreshold;
  std::optional<double> fit_t_lo;
  std::optional<double> fit_t_hi;

  std::vector<std::string> states;  // comma occupations
  std::optional<std::pair<double, double>> c_range;
  std::size_t k = 3;
  std::optional<double> c_value;  // pr-sweep cluster
  std::size_t sweep_count = 6;
  double eta_de_min = 0.2;
  double eta_de_max = 1.8;
  double eta_de_step = 0.05;
  double eta_stable_min = 0.3;
  double eta_stable_max = 1.8;

  std::size_t max_dimension = kDefaultMaxDimension;

  // execution only; never part of the snapshot
  std::string out_dir = "out";
  unsigned workers = 0;  // 0 -> hardware concurrency
  double memory_budget_gb = 4.0;

  void validate() const;
  ModelParams model(double disorder, double phase) const;
  TimeGrid grid() const;
};

// phi_i uniform on [0, 2 pi), keyed by (seed, i) so adding realizations never
// changes earlier phases.
struct Realization {
  std::size_t index = 0;
  std::uint64_t seed = 0;  // derived per-realization seed
  double phase = 0.0;
};

std::vector<Realization> sample_phases(std::uint64_t master_seed, std::size_t count);

// Effective number of concurrent dense solves for a matrix of size dim.
unsigned effective_workers(const RunConfig& config, std::size_t tasks, std::size_t dim);

// Runs task(i) for i in [0, count) on `workers` threads and returns results in
// index order. The first failure by index is rethrown after all workers stop.
template <class Result>
std::vector<Result> run_indexed(std::size_t count, unsigned workers,
                                const std::function<Result(std::size_t)>& task) {
  std::vector<std::optional<Result>> slots(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        slots[i].emplace(task(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<Result> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

// Pins the BLAS backend to one thread so results do not depend on how many
// realizations run side by side. Throws NumericError if blas_self_test fails.
void pin_blas_threads();

// True when a blocked dgemm agrees with a plain loop. Evaluated once.
bool blas_self_test();

// For executables: if the self-test fails and OPENBLAS_CORETYPE is unset,
// re-executes the current binary with a known-good OpenBLAS kernel. Returns
// normally when nothing needs doing or the exec is impossible.
void relaunch_with_fallback_blas(char** argv);

}  // namespace boson_chaos
