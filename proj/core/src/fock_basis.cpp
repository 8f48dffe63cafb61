#include "boson_chaos/fock_basis.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>

#include "boson_chaos/errors.hpp"

namespace boson_chaos {

FockState::FockState(std::vector<Occupation> occupations) : occ_(std::move(occupations)) {
  particles_ = std::accumulate(occ_.begin(), occ_.end(), 0u);
}

FockState FockState::parse(std::string_view text) {
  std::vector<Occupation> occ;
  const bool separated = text.find_first_of(",-_ ") != std::string_view::npos;
  if (!separated) {
    for (char c : text) {
      if (c < '0' || c > '9') throw DomainError("bad occupation string: " + std::string(text));
      occ.push_back(static_cast<Occupation>(c - '0'));
    }
  } else {
    std::size_t pos = 0;
    while (pos <= text.size()) {
      std::size_t end = text.find_first_of(",-_ ", pos);
      if (end == std::string_view::npos) end = text.size();
      auto token = text.substr(pos, end - pos);
      unsigned value = 0;
      auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
      if (token.empty() || ec != std::errc() || ptr != token.data() + token.size() ||
          value > std::numeric_limits<Occupation>::max()) {
        throw DomainError("bad occupation string: " + std::string(text));
      }
      occ.push_back(static_cast<Occupation>(value));
      pos = end + 1;
    }
  }
  if (occ.empty()) throw DomainError("empty occupation string");
  return FockState(std::move(occ));
}

std::string FockState::str() const {
  std::string out;
  for (std::size_t i = 0; i < occ_.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(occ_[i]);
  }
  return out;
}

std::string FockState::label() const {
  std::string out;
  for (std::size_t i = 0; i < occ_.size(); ++i) {
    if (i) out += '-';
    out += std::to_string(occ_[i]);
  }
  return out;
}

std::optional<Hop> hop_image(const FockState& state, std::size_t from, std::size_t to) {
  if (from == to) throw DomainError("hop_image: source and target site coincide");
  if (from >= state.sites() || to >= state.sites()) {
    throw DomainError("hop_image: site index out of range");
  }
  const unsigned n_from = state[from];
  if (n_from == 0) return std::nullopt;
  const unsigned n_to = state[to];
  std::vector<Occupation> occ(state.occupations().begin(), state.occupations().end());
  occ[from] -= 1;
  occ[to] += 1;
  const double amplitude =
      std::sqrt(static_cast<double>(static_cast<std::uint64_t>(n_from) * (n_to + 1)));
  return Hop{FockState(std::move(occ)), amplitude};
}

std::uint64_t composition_count(unsigned n, unsigned k) {
  if (k == 0) return n == 0 ? 1 : 0;
  // C(n + k - 1, min(n, k - 1)) with overflow saturation
  const std::uint64_t top = static_cast<std::uint64_t>(n) + k - 1;
  const std::uint64_t r = std::min<std::uint64_t>(n, k - 1);
  std::uint64_t result = 1;
  for (std::uint64_t i = 1; i <= r; ++i) {
    const std::uint64_t factor = top - r + i;
    // result * factor / i is exact at every step
    if (result > std::numeric_limits<std::uint64_t>::max() / factor) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    result = result * factor / i;
  }
  return result;
}

BasisTable::BasisTable(unsigned particles, unsigned sites)
    : particles_(particles), sites_(sites) {}

namespace {

void enumerate(std::vector<Occupation>& work, std::size_t site, unsigned remaining,
               std::vector<FockState>& out) {
  if (site + 1 == work.size()) {
    work[site] = static_cast<Occupation>(remaining);
    out.emplace_back(work);
    return;
  }
  for (unsigned v = remaining + 1; v-- > 0;) {
    work[site] = static_cast<Occupation>(v);
    enumerate(work, site + 1, remaining - v, out);
  }
}

}  // namespace

BasisTable BasisTable::build(unsigned particles, unsigned sites, std::size_t max_dimension) {
  if (particles == 0 || sites == 0) {
    throw DomainError("build_basis: need N >= 1 and L >= 1");
  }
  if (particles > std::numeric_limits<Occupation>::max()) {
    throw DomainError("build_basis: particle count exceeds occupation range");
  }
  const std::uint64_t dim = composition_count(particles, sites);
  if (dim > max_dimension) {
    throw DomainError("build_basis: dimension " + std::to_string(dim) +
                      " exceeds the configured cap " + std::to_string(max_dimension));
  }

  BasisTable table(particles, sites);
  table.counts_.assign(sites + 1, std::vector<std::uint64_t>(particles + 1));
  for (unsigned k = 0; k <= sites; ++k) {
    for (unsigned n = 0; n <= particles; ++n) table.counts_[k][n] = composition_count(n, k);
  }

  table.states_.reserve(dim);
  std::vector<Occupation> work(sites);
  enumerate(work, 0, particles, table.states_);
  return table;
}

const FockState& BasisTable::unrank(std::size_t index) const {
  if (index >= states_.size()) throw DomainError("unrank: index out of range");
  return states_[index];
}

std::size_t BasisTable::rank(const FockState& state) const {
  if (state.sites() != sites_) {
    throw DomainError("rank: state " + state.str() + " has " + std::to_string(state.sites()) +
                      " sites, basis has " + std::to_string(sites_));
  }
  if (state.particles() != particles_) {
    throw DomainError("rank: state " + state.str() + " has " +
                      std::to_string(state.particles()) + " particles, basis has " +
                      std::to_string(particles_));
  }
  std::uint64_t index = 0;
  unsigned remaining = particles_;
  for (std::size_t site = 0; site + 1 < sites_; ++site) {
    const unsigned n = state[site];
    // states with a larger occupation here come first:
    // sum_{v=n+1}^{remaining} comp(remaining - v, L-site-1) = comp(remaining - n - 1, L-site)
    if (n < remaining) index += counts_[sites_ - site][remaining - n - 1];
    remaining -= n;
  }
  return static_cast<std::size_t>(index);
}

std::optional<std::size_t> BasisTable::mott_index() const {
  if (particles_ != sites_) return std::nullopt;
  return rank(FockState(std::vector<Occupation>(sites_, 1)));
}

}  // namespace boson_chaos
