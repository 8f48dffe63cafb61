#include "boson_chaos/ensemble.hpp"

#include <unistd.h>

#include <algorithm>
#include <armadillo>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <random>

#include "boson_chaos/errors.hpp"

extern "C" void openblas_set_num_threads(int) __attribute__((weak));

namespace boson_chaos {

void RunConfig::validate() const {
  if (particles == 0 || sites == 0) throw DomainError("config: need N >= 1 and L >= 1");
  if (realizations == 0) throw DomainError("config: need at least one realization");
  if (disorders.empty()) throw DomainError("config: no disorder value given");
  for (double w : disorders) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw DomainError("config: W must be finite and >= 0");
  }
  if (hopping && !(*hopping >= 0.0)) throw DomainError("config: J must be >= 0");
  if (beta && !(*beta > 0.0)) throw DomainError("config: beta must be > 0");
  if (!(delta_e > 0.0)) throw DomainError("config: delta-e must be positive");
  if (!(trim >= 0.0 && trim < 0.5)) throw DomainError("config: trim must lie in [0, 0.5)");
  if (rolling_window == 0) throw DomainError("config: rolling window must be >= 1");
  if (!(t_min > 0.0 && t_max > t_min)) throw DomainError("config: need 0 < tmin < tmax");
  if (per_decade == 0) throw DomainError("config: ppd must be positive");
  if (dos_bins < 10) throw DomainError("config: need at least 10 DOS bins");
  if (!(nu_sigma > 0.0)) throw DomainError("config: nu-sigma must be positive");
  if (!(hole_threshold > 0.0)) throw DomainError("config: hole threshold must be positive");
  if (c_range && !(c_range->second > c_range->first)) {
    throw DomainError("config: c-range must satisfy lo < hi");
  }
  if (k == 0) throw DomainError("config: k must be positive");
  if (!(eta_de_min > 0.0 && eta_de_max >= eta_de_min && eta_de_step > 0.0)) {
    throw DomainError("config: bad delta-e scan range");
  }
  if (!(memory_budget_gb > 0.0)) throw DomainError("config: memory budget must be positive");
}

ModelParams RunConfig::model(double disorder, double phase) const {
  ModelParams p = ModelParams::standard(particles, sites, disorder, phase);
  if (hopping) p.hopping = *hopping;
  if (interaction) p.interaction = *interaction;
  if (beta) p.beta = *beta;
  return p;
}

TimeGrid RunConfig::grid() const { return TimeGrid::logarithmic(t_min, t_max, per_decade); }

std::vector<Realization> sample_phases(std::uint64_t master_seed, std::size_t count) {
  std::vector<Realization> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto idx = static_cast<std::uint64_t>(i);
    // seed_seq and mt19937_64 are fully specified by the standard, so the
    // phases are identical on every conforming platform
    std::seed_seq seq{static_cast<std::uint32_t>(master_seed),
                      static_cast<std::uint32_t>(master_seed >> 32),
                      static_cast<std::uint32_t>(idx), static_cast<std::uint32_t>(idx >> 32)};
    std::mt19937_64 engine(seq);
    const std::uint64_t draw = engine();
    double phase = static_cast<double>(draw >> 11) * 0x1.0p-53 * 2.0 * std::numbers::pi;
    if (phase >= 2.0 * std::numbers::pi) phase = std::nextafter(2.0 * std::numbers::pi, 0.0);
    out[i] = {i, engine(), phase};
  }
  return out;
}

unsigned effective_workers(const RunConfig& config, std::size_t tasks, std::size_t dim) {
  unsigned workers = config.workers;
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  // a dense solve holds about three dim x dim matrices
  const double per_solve = 3.0 * 8.0 * static_cast<double>(dim) * static_cast<double>(dim);
  const double budget = config.memory_budget_gb * 1024.0 * 1024.0 * 1024.0;
  const auto by_memory = static_cast<unsigned>(std::max(1.0, std::floor(budget / per_solve)));
  workers = std::min(workers, by_memory);
  workers = std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(tasks, 1)));
  return std::max(1u, workers);
}

bool blas_self_test() {
  // Some OpenBLAS builds pick a kernel that returns wrong dgemm results on
  // newer CPUs once the blocking kicks in (n >= 257). Compare one product of
  // that size against a plain loop.
  static const bool trusted = [] {
    constexpr arma::uword n = 300;
    arma::mat a(n, n);
    arma::mat b(n, n);
    for (arma::uword j = 0; j < n; ++j) {
      for (arma::uword i = 0; i < n; ++i) {
        a(i, j) = std::sin(0.37 * static_cast<double>(i) + 1.1 * static_cast<double>(j));
        b(i, j) = std::cos(0.53 * static_cast<double>(i) - 0.7 * static_cast<double>(j));
      }
    }
    const arma::mat c = a * b;
    double worst = 0.0;
    for (arma::uword j = 0; j < n; ++j) {
      for (arma::uword i = 0; i < n; ++i) {
        double s = 0.0;
        for (arma::uword k = 0; k < n; ++k) s += a(i, k) * b(k, j);
        worst = std::max(worst, std::abs(s - c(i, j)));
      }
    }
    return worst < 1e-9;
  }();
  return trusted;
}

void relaunch_with_fallback_blas(char** argv) {
  if (blas_self_test() || std::getenv("OPENBLAS_CORETYPE") != nullptr) return;
  const char* core = __builtin_cpu_supports("avx512f") ? "SkylakeX" : "Haswell";
  if (::setenv("OPENBLAS_CORETYPE", core, 1) != 0) return;
  ::execv("/proc/self/exe", argv);  // returns only on failure
}

void pin_blas_threads() {
  if (!blas_self_test()) {
    throw NumericError(
        "BLAS self-test failed: matrix products are wrong on this CPU; "
        "set OPENBLAS_CORETYPE (for example SkylakeX or Haswell) and rerun");
  }
  if (openblas_set_num_threads) openblas_set_num_threads(1);
}

}  // namespace boson_chaos
