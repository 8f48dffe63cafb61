#include "boson_chaos/spectral_stats.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "boson_chaos/errors.hpp"
#include "boson_chaos/numerics.hpp"

namespace boson_chaos {

namespace {

std::string seed_suffix(std::optional<std::uint64_t> seed) {
  return seed ? " (realization seed " + std::to_string(*seed) + ")" : std::string();
}

}  // namespace

arma::vec SpectralDecomposition::components(std::size_t basis_index) const {
  if (basis_index >= eigenvectors.n_rows) throw DomainError("components: basis index out of range");
  return eigenvectors.row(basis_index).t();
}

SpectralDecomposition diagonalize(const SparseHamiltonian& h, std::optional<std::uint64_t> seed) {
  SpectralDecomposition out;
  const arma::mat dense = h.to_dense();
  if (!arma::eig_sym(out.eigenvalues, out.eigenvectors, dense, "dc")) {
    throw NumericError("diagonalize: eigensolver did not converge for dim " +
                       std::to_string(h.dim()) + seed_suffix(seed));
  }
  return out;
}

arma::vec eigenvalues_only(const SparseHamiltonian& h, std::optional<std::uint64_t> seed) {
  arma::vec values;
  const arma::mat dense = h.to_dense();
  if (!arma::eig_sym(values, dense)) {
    throw NumericError("eigenvalues: eigensolver did not converge for dim " +
                       std::to_string(h.dim()) + seed_suffix(seed));
  }
  return values;
}

ProjectedSpectrum diagonalize_projected(const SparseHamiltonian& h,
                                        std::span<const std::size_t> basis_indices,
                                        std::optional<std::uint64_t> seed) {
  const auto n = static_cast<lapack_int>(h.dim());
  const auto k = static_cast<lapack_int>(basis_indices.size());
  for (auto idx : basis_indices) {
    if (idx >= h.dim()) throw DomainError("diagonalize_projected: basis index out of range");
  }
  ProjectedSpectrum out;
  out.basis_indices.assign(basis_indices.begin(), basis_indices.end());
  if (n == 0) return out;

  arma::mat a = h.to_dense();
  std::vector<double> diag(static_cast<std::size_t>(n));
  std::vector<double> off(static_cast<std::size_t>(n), 0.0);
  std::vector<double> tau(static_cast<std::size_t>(std::max<lapack_int>(n - 1, 1)));

  auto fail = [&](const char* stage, lapack_int info) {
    throw NumericError(std::string("diagonalize_projected: ") + stage + " failed (info " +
                       std::to_string(info) + ") for dim " + std::to_string(n) +
                       seed_suffix(seed));
  };

  lapack_int info = LAPACKE_dsytrd(LAPACK_COL_MAJOR, 'U', n, a.memptr(), n, diag.data(),
                                   off.data(), tau.data());
  if (info != 0) fail("dsytrd", info);

  // y_j = Q^T e_{k_j}
  arma::mat y(static_cast<arma::uword>(n), static_cast<arma::uword>(std::max<lapack_int>(k, 1)),
              arma::fill::zeros);
  for (lapack_int j = 0; j < k; ++j) y(basis_indices[static_cast<std::size_t>(j)], j) = 1.0;
  if (k > 0 && n > 1) {
    info = LAPACKE_dormtr(LAPACK_COL_MAJOR, 'L', 'U', 'T', n, k, a.memptr(), n, tau.data(),
                          y.memptr(), n);
    if (info != 0) fail("dormtr", info);
  }
  a.reset();

  out.eigenvalues.set_size(static_cast<arma::uword>(n));
  arma::mat z(static_cast<arma::uword>(n), static_cast<arma::uword>(n));
  std::vector<lapack_int> support(2 * static_cast<std::size_t>(n));
  lapack_int found = 0;
  lapack_logical tryrac = 1;
  info = LAPACKE_dstemr(LAPACK_COL_MAJOR, 'V', 'A', n, diag.data(), off.data(), 0.0, 0.0, 0, 0,
                        &found, out.eigenvalues.memptr(), z.memptr(), n, n, support.data(),
                        &tryrac);
  if (info != 0 || found != n) {
    // MRRR can fail on pathological clusters; the full solve is the fallback.
    auto full = diagonalize(h, seed);
    out.eigenvalues = std::move(full.eigenvalues);
    out.components.set_size(static_cast<arma::uword>(n), static_cast<arma::uword>(k));
    for (lapack_int j = 0; j < k; ++j) {
      out.components.col(j) = full.eigenvectors.row(basis_indices[static_cast<std::size_t>(j)]).t();
    }
    return out;
  }
  out.components = z.t() * y.cols(0, static_cast<arma::uword>(std::max<lapack_int>(k, 1) - 1));
  if (k == 0) out.components.set_size(static_cast<arma::uword>(n), 0);
  return out;
}

DecompositionQuality check_decomposition(const SparseHamiltonian& h,
                                         const SpectralDecomposition& decomp) {
  DecompositionQuality q;
  const arma::mat dense = h.to_dense();
  const arma::mat residual =
      dense * decomp.eigenvectors - decomp.eigenvectors * arma::diagmat(decomp.eigenvalues);
  for (arma::uword m = 0; m < residual.n_cols; ++m) {
    q.max_residual = std::max(q.max_residual, arma::norm(residual.col(m), 2));
  }
  const arma::mat gram = decomp.eigenvectors.t() * decomp.eigenvectors;
  q.orthonormality =
      arma::abs(gram - arma::eye<arma::mat>(gram.n_rows, gram.n_cols)).max();
  return q;
}

RatioSeries spacing_ratios(std::span<const double> eigenvalues) {
  if (eigenvalues.size() < 3) throw DomainError("spacing_ratios: need at least 3 levels");
  RatioSeries out;
  out.ratios.reserve(eigenvalues.size() - 2);
  out.energies.reserve(eigenvalues.size() - 2);
  for (std::size_t n = 1; n + 1 < eigenvalues.size(); ++n) {
    const double s_prev = eigenvalues[n] - eigenvalues[n - 1];
    const double s_next = eigenvalues[n + 1] - eigenvalues[n];
    if (s_prev < 0.0 || s_next < 0.0) throw DomainError("spacing_ratios: levels not ascending");
    const double hi = std::max(s_prev, s_next);
    double r = 0.0;
    if (hi == 0.0) {
      ++out.degenerate;
    } else {
      r = std::min(s_prev, s_next) / hi;
    }
    out.ratios.push_back(r);
    out.energies.push_back(eigenvalues[n]);
  }
  return out;
}

RatioSummary mean_ratio_trimmed(std::span<const double> eigenvalues, double trim) {
  if (!(trim >= 0.0 && trim < 0.5)) throw DomainError("mean_ratio_trimmed: trim must lie in [0, 0.5)");
  const auto cut = static_cast<std::size_t>(std::floor(trim * static_cast<double>(eigenvalues.size())));
  if (eigenvalues.size() < 2 * cut + 3) {
    throw DomainError("mean_ratio_trimmed: fewer than 3 levels left after trimming");
  }
  const auto central = eigenvalues.subspan(cut, eigenvalues.size() - 2 * cut);
  const auto series = spacing_ratios(central);
  RatioSummary out;
  out.count = series.ratios.size();
  out.degenerate = series.degenerate;
  out.mean = pairwise_sum(series.ratios) / static_cast<double>(out.count);
  return out;
}

RatioSummary mean_ratio_trimmed(const SpectralDecomposition& decomp, double trim) {
  return mean_ratio_trimmed(std::span<const double>(decomp.eigenvalues.memptr(), decomp.dim()), trim);
}

std::vector<EnergyWindowRatio> ratio_vs_energy(std::span<const std::vector<double>> spectra,
                                               std::size_t window, unsigned particles) {
  if (spectra.empty()) throw DomainError("ratio_vs_energy: no spectra");
  if (particles == 0) throw DomainError("ratio_vs_energy: particle count must be positive");
  const std::size_t dim = spectra.front().size();
  for (const auto& s : spectra) {
    if (s.size() != dim) throw DomainError("ratio_vs_energy: spectra differ in size");
  }
  if (window < 3 || window > dim) throw DomainError("ratio_vs_energy: window must hold 3..dim levels");
  if ((window - 2) * spectra.size() < 50) {
    throw DomainError("ratio_vs_energy: fewer than 50 pooled spacings per window");
  }
  const std::size_t windows = dim / window;

  std::vector<EnergyWindowRatio> out(windows);
  for (std::size_t w = 0; w < windows; ++w) {
    const std::size_t begin = w * dim / windows;
    const std::size_t end = (w + 1) * dim / windows;
    std::vector<double> ratios;
    std::vector<double> energies;
    std::size_t degenerate = 0;
    for (const auto& s : spectra) {
      std::span<const double> levels(s.data() + begin, end - begin);
      auto series = spacing_ratios(levels);
      ratios.insert(ratios.end(), series.ratios.begin(), series.ratios.end());
      energies.insert(energies.end(), levels.begin(), levels.end());
      degenerate += series.degenerate;
    }
    out[w].energy_per_particle =
        pairwise_sum(energies) / static_cast<double>(energies.size()) / particles;
    out[w].mean_ratio = pairwise_sum(ratios) / static_cast<double>(ratios.size());
    out[w].spacings = ratios.size();
    out[w].degenerate = degenerate;
  }
  return out;
}

Histogram dos_histogram(std::span<const std::vector<double>> spectra, unsigned particles,
                        std::size_t bins) {
  if (bins < 10) throw DomainError("dos_histogram: need at least 10 bins");
  if (particles == 0) throw DomainError("dos_histogram: particle count must be positive");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  std::size_t total = 0;
  for (const auto& s : spectra) {
    for (double e : s) {
      lo = std::min(lo, e / particles);
      hi = std::max(hi, e / particles);
    }
    total += s.size();
  }
  if (total == 0) throw DomainError("dos_histogram: no levels");
  if (hi <= lo) hi = lo + 1.0;

  Histogram h;
  h.lower = lo;
  h.width = (hi - lo) / static_cast<double>(bins);
  h.centers.resize(bins);
  std::vector<std::size_t> counts(bins, 0);
  for (std::size_t b = 0; b < bins; ++b) h.centers[b] = lo + (static_cast<double>(b) + 0.5) * h.width;
  for (const auto& s : spectra) {
    for (double e : s) {
      auto b = static_cast<std::size_t>((e / particles - lo) / h.width);
      ++counts[std::min(b, bins - 1)];
    }
  }
  h.density.resize(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    h.density[b] = static_cast<double>(counts[b]) / (static_cast<double>(total) * h.width);
  }
  return h;
}

}  // namespace boson_chaos
