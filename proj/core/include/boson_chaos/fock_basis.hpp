#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace boson_chaos {

using Occupation = std::uint16_t;

// Occupation-number state |n_1, ..., n_L> of N bosons on L sites.
// Sites are addressed 0-based in the C++ API.
class FockState {
 public:
  FockState() = default;
  explicit FockState(std::vector<Occupation> occupations);
  FockState(std::initializer_list<Occupation> occupations)
      : FockState(std::vector<Occupation>(occupations)) {}

  // Accepts "1,1,0,2" or a bare digit string "1102" (single-digit sites).
  static FockState parse(std::string_view text);

  std::size_t sites() const { return occ_.size(); }
  unsigned particles() const { return particles_; }
  Occupation operator[](std::size_t site) const { return occ_[site]; }
  std::span<const Occupation> occupations() const { return occ_; }

  // "2,2,0,0" for display; label() gives a filename-safe token "2-2-0-0".
  std::string str() const;
  std::string label() const;

  friend bool operator==(const FockState&, const FockState&) = default;
  friend std::strong_ordering operator<=>(const FockState& a, const FockState& b) {
    return a.occ_ <=> b.occ_;
  }

 private:
  std::vector<Occupation> occ_;
  unsigned particles_ = 0;
};

// Image of b_to^dagger b_from acting on a Fock state.
struct Hop {
  FockState state;
  double amplitude;  // sqrt(n_from * (n_to + 1))
};

// Moves one boson from `from` to `to`. Empty when the source site is empty.
std::optional<Hop> hop_image(const FockState& state, std::size_t from, std::size_t to);

// Number of compositions of n into k non-negative parts, C(n+k-1, k-1).
// Saturates at UINT64_MAX instead of overflowing.
std::uint64_t composition_count(unsigned n, unsigned k);

inline constexpr std::size_t kDefaultMaxDimension = 100000;

// All Fock states with fixed N and L in lexicographically descending order,
// |N,0,...,0> first and |0,...,0,N> last. Immutable after construction.
class BasisTable {
 public:
  static BasisTable build(unsigned particles, unsigned sites,
                          std::size_t max_dimension = kDefaultMaxDimension);

  unsigned particles() const { return particles_; }
  unsigned sites() const { return sites_; }
  std::size_t size() const { return states_.size(); }
  const std::vector<FockState>& states() const { return states_; }
  const FockState& operator[](std::size_t index) const { return states_[index]; }
  const FockState& unrank(std::size_t index) const;

  // Combinatorial rank, O(L * N); throws DomainError for foreign states.
  std::size_t rank(const FockState& state) const;

  // Index of the state with one particle per site; only meaningful for N == L.
  std::optional<std::size_t> mott_index() const;

 private:
  BasisTable(unsigned particles, unsigned sites);

  unsigned particles_;
  unsigned sites_;
  std::vector<FockState> states_;
  // counts_[k][n] = compositions of n into k parts, k <= L, n <= N
  std::vector<std::vector<std::uint64_t>> counts_;
};

}  // namespace boson_chaos
