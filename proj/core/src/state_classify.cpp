#include "boson_chaos/state_classify.hpp"

#include <algorithm>
#include <cmath>

#include "boson_chaos/errors.hpp"
#include "boson_chaos/numerics.hpp"

namespace boson_chaos {

double crowding(const FockState& state) {
  if (state.particles() == 0) throw DomainError("crowding: state has no particles");
  double sum = 0.0;
  for (auto n : state.occupations()) sum += static_cast<double>(n) * n;
  return sum / state.particles();
}

double crowding_cluster(double c_value, double width) {
  if (!(width > 0.0)) throw DomainError("crowding_cluster: width must be positive");
  // nudge so that exact multiples land in their own bin despite rounding
  return std::floor(c_value / width + 1e-9) * width;
}

double participation_ratio(std::span<const double> components) {
  double norm = 0.0;
  double fourth = 0.0;
  for (double c : components) {
    const double p = c * c;
    norm += p;
    fourth += p * p;
  }
  if (std::abs(norm - 1.0) > 1e-10) {
    throw NumericError("participation_ratio: components not normalized (sum |c|^2 = " +
                       std::to_string(norm) + ")");
  }
  return 1.0 / fourth;
}

double participation_ratio(const FockState& state, const BasisTable& table,
                           const SpectralDecomposition& decomp) {
  if (decomp.dim() != table.size()) throw DomainError("participation_ratio: dimension mismatch");
  const arma::vec c = decomp.components(table.rank(state));
  return participation_ratio(std::span<const double>(c.memptr(), c.n_elem));
}

StateSample sample_states(const BasisTable& table, const ModelParams& params,
                          const SpectralDecomposition& decomp) {
  if (decomp.dim() != table.size()) throw DomainError("sample_states: dimension mismatch");
  StateSample s;
  s.energy.resize(table.size());
  s.pr.resize(table.size());
  // row k of V holds c_m for state k; transpose once for contiguous access
  const arma::mat vt = decomp.eigenvectors.t();
  for (std::size_t k = 0; k < table.size(); ++k) {
    s.energy[k] = diagonal_expectation(table[k], params);
    s.pr[k] = participation_ratio(std::span<const double>(vt.colptr(k), vt.n_rows));
  }
  return s;
}

std::vector<StateProfile> classify_all(const BasisTable& table,
                                       std::span<const StateSample> ensemble) {
  if (ensemble.empty()) throw DomainError("classify_all: empty ensemble");
  const std::size_t dim = table.size();
  for (const auto& s : ensemble) {
    if (s.energy.size() != dim || s.pr.size() != dim) {
      throw DomainError("classify_all: sample size does not match basis");
    }
  }
  const double n = table.particles();
  std::vector<StateProfile> out(dim);
  std::vector<double> energy(ensemble.size());
  std::vector<double> pr(ensemble.size());
  std::vector<double> ipr(ensemble.size());
  for (std::size_t k = 0; k < dim; ++k) {
    for (std::size_t r = 0; r < ensemble.size(); ++r) {
      energy[r] = ensemble[r].energy[k] / n;
      pr[r] = ensemble[r].pr[k];
      ipr[r] = 1.0 / ensemble[r].pr[k];
    }
    auto& p = out[k];
    p.state = table[k];
    p.rank = k;
    p.crowding = crowding(table[k]);
    const auto e = mean_error(energy);
    p.energy_per_particle = e.mean;
    p.energy_per_particle_sem = e.sem;
    p.pr = mean_error(pr).mean;
    p.ipr = mean_error(ipr).mean;
    p.pr_of_mean_ipr = 1.0 / p.ipr;
    p.pr_over_dim = p.pr / static_cast<double>(dim);
  }
  return out;
}

Extremes select_extremes(std::span<const StateProfile> profiles, double c_lo, double c_hi,
                         std::size_t k) {
  if (k == 0) throw DomainError("select_extremes: k must be positive");
  std::vector<StateProfile> in_range;
  for (const auto& p : profiles) {
    if (p.crowding >= c_lo - 1e-12 && p.crowding < c_hi - 1e-12) in_range.push_back(p);
  }
  if (in_range.empty()) throw DomainError("select_extremes: no states with C in the range");
  if (in_range.size() < 2 * k) {
    throw DomainError("select_extremes: only " + std::to_string(in_range.size()) +
                      " states in range, need " + std::to_string(2 * k));
  }
  Extremes out;
  auto by_pr_desc = [](const StateProfile& a, const StateProfile& b) {
    return a.pr != b.pr ? a.pr > b.pr : a.rank < b.rank;
  };
  auto by_pr_asc = [](const StateProfile& a, const StateProfile& b) {
    return a.pr != b.pr ? a.pr < b.pr : a.rank < b.rank;
  };
  std::sort(in_range.begin(), in_range.end(), by_pr_desc);
  out.highest.assign(in_range.begin(), in_range.begin() + static_cast<std::ptrdiff_t>(k));
  std::sort(in_range.begin(), in_range.end(), by_pr_asc);
  out.lowest.assign(in_range.begin(), in_range.begin() + static_cast<std::ptrdiff_t>(k));
  return out;
}

}  // namespace boson_chaos
