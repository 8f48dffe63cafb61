#pragma once

#include <armadillo>
#include <cstddef>
#include <iosfwd>
#include <numbers>
#include <span>
#include <string_view>
#include <vector>

#include "boson_chaos/fock_basis.hpp"

namespace boson_chaos {

enum class Boundary { kOpen, kPeriodic };

// Parameters of the interacting Aubry-Andre chain
//   H = -J sum_<ij> b_i^+ b_j + U/2 sum_i n_i (n_i - 1) + W sum_i cos(2 pi beta i + phi) n_i
// with sites i = 1..L inside the cosine.
struct ModelParams {
  unsigned particles = 0;
  unsigned sites = 0;
  double hopping = 0.5;      // J
  double interaction = 0.0;  // U
  double disorder = 0.0;     // W
  double beta = 1.618;
  double phase = 0.0;        // phi in [0, 2 pi)
  Boundary boundary = Boundary::kOpen;

  // J = 1/2, U = 4/(N-1), beta = 1.618 (U = 4 when N = 1).
  static ModelParams standard(unsigned particles, unsigned sites, double disorder,
                              double phase = 0.0);

  void validate() const;
  double onsite_potential(std::size_t site) const;  // 0-based site, W cos(2 pi beta (site+1) + phi)
};

// Real symmetric sparse matrix. Each off-diagonal element is stored once
// (upper triangle) and mirrored into the CSR rows, so H[i,j] == H[j,i] bit for bit.
class SparseHamiltonian {
 public:
  struct Entry {
    std::size_t row;
    std::size_t col;
    double value;
  };

  SparseHamiltonian(std::size_t dim, std::vector<double> diagonal, std::vector<Entry> upper);

  std::size_t dim() const { return dim_; }
  const std::vector<double>& diagonal() const { return diagonal_; }
  const std::vector<Entry>& upper() const { return upper_; }

  double at(std::size_t row, std::size_t col) const;
  std::size_t row_nonzeros(std::size_t row) const;  // off-diagonal only
  double trace() const;
  double frobenius_norm() const;

  // y = H x
  void apply(std::span<const double> x, std::span<double> y) const;
  arma::mat to_dense() const;

  // MatrixMarket "coordinate real symmetric", lower triangle, 1-based, 17 digits.
  void write_matrix_market(std::ostream& out, std::string_view comment = {}) const;

 private:
  std::size_t dim_;
  std::vector<double> diagonal_;
  std::vector<Entry> upper_;
  // full symmetric off-diagonal pattern in CSR form
  std::vector<std::size_t> row_start_;
  std::vector<std::size_t> col_index_;
  std::vector<double> values_;
};

SparseHamiltonian assemble(const ModelParams& params, const BasisTable& table);

// <k|H|k> for the given phase.
double diagonal_expectation(const FockState& state, const ModelParams& params);

}  // namespace boson_chaos
