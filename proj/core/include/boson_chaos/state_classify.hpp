#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "boson_chaos/fock_basis.hpp"
#include "boson_chaos/hamiltonian.hpp"
#include "boson_chaos/spectral_stats.hpp"

namespace boson_chaos {

// C = (1/N) sum_i n_i^2; 1 for the Mott state, N when all bosons share a site.
double crowding(const FockState& state);

// Left edge of the half-open cluster [c, c + width) that contains `c_value`.
double crowding_cluster(double c_value, double width = 0.25);

// PR = 1 / sum_m |c_m|^4. Throws NumericError if sum_m |c_m|^2 deviates from 1
// by more than 1e-10.
double participation_ratio(std::span<const double> components);
double participation_ratio(const FockState& state, const BasisTable& table,
                           const SpectralDecomposition& decomp);

// Per-realization energies <k|H|k> and participation ratios of every basis state.
struct StateSample {
  std::vector<double> energy;
  std::vector<double> pr;
};

StateSample sample_states(const BasisTable& table, const ModelParams& params,
                          const SpectralDecomposition& decomp);

struct StateProfile {
  FockState state;
  std::size_t rank = 0;
  double crowding = 0.0;
  double energy_per_particle = 0.0;      // realization mean of E_k / N
  double energy_per_particle_sem = 0.0;  // standard error over realizations
  double pr = 0.0;                       // mean of per-realization PR
  double ipr = 0.0;                      // mean of per-realization 1/PR
  double pr_of_mean_ipr = 0.0;           // 1 / ipr
  double pr_over_dim = 0.0;
};

std::vector<StateProfile> classify_all(const BasisTable& table,
                                       std::span<const StateSample> ensemble);

struct Extremes {
  std::vector<StateProfile> highest;  // descending PR
  std::vector<StateProfile> lowest;   // ascending PR
};

// k highest- and k lowest-PR profiles with C in [c_lo, c_hi); ties go to the
// lower basis rank.
Extremes select_extremes(std::span<const StateProfile> profiles, double c_lo, double c_hi,
                         std::size_t k);

}  // namespace boson_chaos
