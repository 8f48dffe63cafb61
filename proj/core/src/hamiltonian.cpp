#include "boson_chaos/hamiltonian.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "boson_chaos/errors.hpp"

namespace boson_chaos {

ModelParams ModelParams::standard(unsigned particles, unsigned sites, double disorder,
                                  double phase) {
  ModelParams p;
  p.particles = particles;
  p.sites = sites;
  p.hopping = 0.5;
  p.interaction = particles > 1 ? 4.0 / static_cast<double>(particles - 1) : 4.0;
  p.disorder = disorder;
  p.beta = 1.618;
  p.phase = phase;
  return p;
}

void ModelParams::validate() const {
  if (particles == 0 || sites == 0) throw DomainError("model: need N >= 1 and L >= 1");
  if (!(hopping >= 0.0)) throw DomainError("model: J must be >= 0");
  if (!(disorder >= 0.0)) throw DomainError("model: W must be >= 0");
  if (!(beta > 0.0)) throw DomainError("model: beta must be > 0");
  if (!std::isfinite(interaction)) throw DomainError("model: U must be finite");
  if (!(phase >= 0.0 && phase < 2.0 * std::numbers::pi)) {
    throw DomainError("model: phi must lie in [0, 2 pi)");
  }
  if (boundary == Boundary::kPeriodic) {
    throw DomainError("model: periodic boundaries are not implemented");
  }
}

double ModelParams::onsite_potential(std::size_t site) const {
  const double i = static_cast<double>(site + 1);
  return disorder * std::cos(2.0 * std::numbers::pi * beta * i + phase);
}

SparseHamiltonian::SparseHamiltonian(std::size_t dim, std::vector<double> diagonal,
                                     std::vector<Entry> upper)
    : dim_(dim), diagonal_(std::move(diagonal)), upper_(std::move(upper)) {
  if (diagonal_.size() != dim_) throw DomainError("sparse matrix: diagonal size mismatch");
  std::vector<std::size_t> counts(dim_, 0);
  for (const auto& e : upper_) {
    if (e.row >= e.col || e.col >= dim_) {
      throw DomainError("sparse matrix: entries must be strictly upper triangular");
    }
    ++counts[e.row];
    ++counts[e.col];
  }
  row_start_.assign(dim_ + 1, 0);
  for (std::size_t i = 0; i < dim_; ++i) row_start_[i + 1] = row_start_[i] + counts[i];
  col_index_.resize(row_start_.back());
  values_.resize(row_start_.back());
  std::vector<std::size_t> fill(row_start_.begin(), row_start_.end() - 1);
  for (const auto& e : upper_) {
    col_index_[fill[e.row]] = e.col;
    values_[fill[e.row]++] = e.value;
    col_index_[fill[e.col]] = e.row;
    values_[fill[e.col]++] = e.value;
  }
  // sort each row by column for deterministic traversal
  for (std::size_t i = 0; i < dim_; ++i) {
    std::vector<std::pair<std::size_t, double>> row;
    for (auto k = row_start_[i]; k < row_start_[i + 1]; ++k) row.emplace_back(col_index_[k], values_[k]);
    std::sort(row.begin(), row.end());
    for (std::size_t k = 0; k < row.size(); ++k) {
      col_index_[row_start_[i] + k] = row[k].first;
      values_[row_start_[i] + k] = row[k].second;
    }
  }
}

double SparseHamiltonian::at(std::size_t row, std::size_t col) const {
  if (row >= dim_ || col >= dim_) throw DomainError("sparse matrix: index out of range");
  if (row == col) return diagonal_[row];
  const auto begin = col_index_.begin() + static_cast<std::ptrdiff_t>(row_start_[row]);
  const auto end = col_index_.begin() + static_cast<std::ptrdiff_t>(row_start_[row + 1]);
  const auto it = std::lower_bound(begin, end, col);
  if (it == end || *it != col) return 0.0;
  return values_[static_cast<std::size_t>(it - col_index_.begin())];
}

std::size_t SparseHamiltonian::row_nonzeros(std::size_t row) const {
  return row_start_[row + 1] - row_start_[row];
}

double SparseHamiltonian::trace() const {
  double t = 0.0;
  for (double d : diagonal_) t += d;
  return t;
}

double SparseHamiltonian::frobenius_norm() const {
  double s = 0.0;
  for (double d : diagonal_) s += d * d;
  for (const auto& e : upper_) s += 2.0 * e.value * e.value;
  return std::sqrt(s);
}

void SparseHamiltonian::apply(std::span<const double> x, std::span<double> y) const {
  if (x.size() != dim_ || y.size() != dim_) throw DomainError("sparse matrix: apply size mismatch");
  for (std::size_t i = 0; i < dim_; ++i) {
    double acc = diagonal_[i] * x[i];
    for (auto k = row_start_[i]; k < row_start_[i + 1]; ++k) acc += values_[k] * x[col_index_[k]];
    y[i] = acc;
  }
}

arma::mat SparseHamiltonian::to_dense() const {
  arma::mat dense(dim_, dim_, arma::fill::zeros);
  for (std::size_t i = 0; i < dim_; ++i) dense(i, i) = diagonal_[i];
  for (const auto& e : upper_) {
    dense(e.row, e.col) = e.value;
    dense(e.col, e.row) = e.value;
  }
  return dense;
}

void SparseHamiltonian::write_matrix_market(std::ostream& out, std::string_view comment) const {
  std::size_t nnz = upper_.size();
  for (double d : diagonal_) nnz += d != 0.0 ? 1 : 0;
  out << "%%MatrixMarket matrix coordinate real symmetric\n";
  if (!comment.empty()) out << "% " << comment << '\n';
  out << dim_ << ' ' << dim_ << ' ' << nnz << '\n';
  std::vector<Entry> lower;
  lower.reserve(nnz);
  for (std::size_t i = 0; i < dim_; ++i) {
    if (diagonal_[i] != 0.0) lower.push_back({i, i, diagonal_[i]});
  }
  for (const auto& e : upper_) lower.push_back({e.col, e.row, e.value});
  std::sort(lower.begin(), lower.end(), [](const Entry& a, const Entry& b) {
    return a.col != b.col ? a.col < b.col : a.row < b.row;
  });
  char buf[64];
  for (const auto& e : lower) {
    std::snprintf(buf, sizeof buf, "%.17g", e.value);
    out << e.row + 1 << ' ' << e.col + 1 << ' ' << buf << '\n';
  }
}

double diagonal_expectation(const FockState& state, const ModelParams& params) {
  double interaction = 0.0;
  double potential = 0.0;
  for (std::size_t i = 0; i < state.sites(); ++i) {
    const double n = state[i];
    interaction += n * (n - 1.0);
    potential += params.onsite_potential(i) * n;
  }
  return 0.5 * params.interaction * interaction + potential;
}

SparseHamiltonian assemble(const ModelParams& params, const BasisTable& table) {
  params.validate();
  if (table.particles() != params.particles || table.sites() != params.sites) {
    throw DomainError("assemble: basis (N=" + std::to_string(table.particles()) +
                      ", L=" + std::to_string(table.sites()) + ") does not match model (N=" +
                      std::to_string(params.particles) + ", L=" + std::to_string(params.sites) +
                      ")");
  }
  const std::size_t dim = table.size();
  const std::size_t L = table.sites();

  std::vector<double> potential(L);
  for (std::size_t i = 0; i < L; ++i) potential[i] = params.onsite_potential(i);

  std::vector<double> diagonal(dim);
  std::vector<SparseHamiltonian::Entry> upper;
  upper.reserve(dim * (L > 1 ? L - 1 : 0));

  for (std::size_t k = 0; k < dim; ++k) {
    const FockState& s = table[k];
    double interaction = 0.0;
    double onsite = 0.0;
    for (std::size_t i = 0; i < L; ++i) {
      const double n = s[i];
      interaction += n * (n - 1.0);
      onsite += potential[i] * n;
    }
    diagonal[k] = 0.5 * params.interaction * interaction + onsite;

    if (params.hopping == 0.0) continue;
    // open chain: bonds (i, i+1), i = 0..L-2, both hop directions
    for (std::size_t i = 0; i + 1 < L; ++i) {
      for (auto [from, to] : {std::pair{i, i + 1}, std::pair{i + 1, i}}) {
        auto hop = hop_image(s, from, to);
        if (!hop) continue;
        const std::size_t target = table.rank(hop->state);
        assert(hop->state.particles() == s.particles());
        if (target > k) upper.push_back({k, target, -params.hopping * hop->amplitude});
      }
    }
  }
  return SparseHamiltonian(dim, std::move(diagonal), std::move(upper));
}

}  // namespace boson_chaos
