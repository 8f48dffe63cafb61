#pragma once

#include <armadillo>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "boson_chaos/hamiltonian.hpp"

namespace boson_chaos {

// Full eigendecomposition; column m of `eigenvectors` is |E_m> in the Fock basis.
struct SpectralDecomposition {
  arma::vec eigenvalues;  // ascending
  arma::mat eigenvectors;

  std::size_t dim() const { return eigenvalues.n_elem; }
  // c_m = <E_m|k> for basis state k, i.e. row k of the eigenvector matrix
  arma::vec components(std::size_t basis_index) const;
};

// Eigenvalues plus the eigenbasis components of a few selected basis states.
// components.col(j) holds c_m for basis_indices[j].
struct ProjectedSpectrum {
  arma::vec eigenvalues;
  arma::mat components;
  std::vector<std::size_t> basis_indices;
};

// Dense divide-and-conquer solve. `seed` only labels the error message.
SpectralDecomposition diagonalize(const SparseHamiltonian& h,
                                  std::optional<std::uint64_t> seed = std::nullopt);

arma::vec eigenvalues_only(const SparseHamiltonian& h,
                           std::optional<std::uint64_t> seed = std::nullopt);

// Householder tridiagonalization, MRRR on the tridiagonal matrix, and the
// reflectors applied to the selected unit vectors only. Same spectrum as
// diagonalize() at roughly half the cost when few states are needed.
ProjectedSpectrum diagonalize_projected(const SparseHamiltonian& h,
                                        std::span<const std::size_t> basis_indices,
                                        std::optional<std::uint64_t> seed = std::nullopt);

struct DecompositionQuality {
  double max_residual = 0.0;        // max_m ||H v_m - E_m v_m||_2
  double orthonormality = 0.0;      // max |V^T V - I|
};
DecompositionQuality check_decomposition(const SparseHamiltonian& h,
                                         const SpectralDecomposition& decomp);

struct RatioSeries {
  std::vector<double> ratios;    // r_n in [0, 1]
  std::vector<double> energies;  // E_n, the level shared by both spacings
  std::size_t degenerate = 0;    // ratios forced to 0 by s_n = s_{n-1} = 0
};

// r_n = min(s_n, s_{n-1}) / max(s_n, s_{n-1}); needs >= 3 ascending levels.
RatioSeries spacing_ratios(std::span<const double> eigenvalues);

struct RatioSummary {
  double mean = 0.0;
  std::size_t count = 0;
  std::size_t degenerate = 0;
};

inline constexpr double kDefaultTrim = 0.10;

// Mean ratio over the central (1 - 2 trim) fraction of the levels.
RatioSummary mean_ratio_trimmed(std::span<const double> eigenvalues, double trim = kDefaultTrim);
RatioSummary mean_ratio_trimmed(const SpectralDecomposition& decomp, double trim = kDefaultTrim);

struct EnergyWindowRatio {
  double energy_per_particle = 0.0;  // mean E/N of the levels in the window
  double mean_ratio = 0.0;
  std::size_t spacings = 0;          // pooled ratio count
  std::size_t degenerate = 0;
};

// Splits every spectrum into consecutive windows of ~`window` levels and pools
// window j across realizations. All spectra must have the same size.
std::vector<EnergyWindowRatio> ratio_vs_energy(std::span<const std::vector<double>> spectra,
                                               std::size_t window, unsigned particles);

struct Histogram {
  double lower = 0.0;
  double width = 0.0;
  std::vector<double> centers;
  std::vector<double> density;  // sum(density) * width == 1
};

inline constexpr std::size_t kDefaultDosBins = 50;

// Normalized histogram of E/N pooled over all spectra.
Histogram dos_histogram(std::span<const std::vector<double>> spectra, unsigned particles,
                        std::size_t bins = kDefaultDosBins);

// Mean ratio of the GOE and Poisson limits: 4 - 2 sqrt(3) and 2 ln 2 - 1.
inline const double kGoeMeanRatio = 4.0 - 2.0 * std::sqrt(3.0);
inline const double kPoissonMeanRatio = 2.0 * std::log(2.0) - 1.0;

}  // namespace boson_chaos
