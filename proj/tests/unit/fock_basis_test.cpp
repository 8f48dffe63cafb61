#include "boson_chaos/fock_basis.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <set>

#include "boson_chaos/errors.hpp"

namespace bc = boson_chaos;

TEST(FockState, ParsesBothSpellings) {
  EXPECT_EQ(bc::FockState::parse("1,1,0"), (bc::FockState{1, 1, 0}));
  EXPECT_EQ(bc::FockState::parse("110"), (bc::FockState{1, 1, 0}));
  EXPECT_EQ(bc::FockState::parse("10,0"), (bc::FockState{10, 0}));
  EXPECT_THROW(bc::FockState::parse("1,a"), bc::DomainError);
  EXPECT_THROW(bc::FockState::parse(""), bc::DomainError);
}

TEST(FockState, Labels) {
  const bc::FockState s{2, 2, 0};
  EXPECT_EQ(s.str(), "2,2,0");
  EXPECT_EQ(s.label(), "2-2-0");
  EXPECT_EQ(s.particles(), 4u);
  EXPECT_EQ(s.sites(), 3u);
}

TEST(BasisTable, Dimensions) {
  EXPECT_EQ(bc::BasisTable::build(7, 7).size(), 1716u);
  EXPECT_EQ(bc::BasisTable::build(8, 8).size(), 6435u);
  EXPECT_EQ(bc::composition_count(9, 9), 24310u);
  EXPECT_EQ(bc::composition_count(0, 4), 1u);
}

TEST(BasisTable, TwoBosonsOnTwoSites) {
  const auto t = bc::BasisTable::build(2, 2);
  ASSERT_EQ(t.size(), 3u);
  EXPECT_EQ(t[0], (bc::FockState{2, 0}));
  EXPECT_EQ(t[1], (bc::FockState{1, 1}));
  EXPECT_EQ(t[2], (bc::FockState{0, 2}));
}

TEST(BasisTable, RankRoundTripsForEveryState) {
  const auto t = bc::BasisTable::build(7, 7);
  std::set<bc::FockState> seen;
  for (std::size_t k = 0; k < t.size(); ++k) {
    const auto& s = t.unrank(k);
    EXPECT_EQ(s.particles(), 7u);
    EXPECT_EQ(t.rank(s), k);
    seen.insert(s);
  }
  EXPECT_EQ(seen.size(), t.size());
  EXPECT_EQ(t.rank(bc::FockState{7, 0, 0, 0, 0, 0, 0}), 0u);
  EXPECT_EQ(t.rank(bc::FockState{0, 0, 0, 0, 0, 0, 7}), t.size() - 1);
}

TEST(BasisTable, OrderIsStrictlyDescending) {
  const auto t = bc::BasisTable::build(4, 5);
  for (std::size_t k = 1; k < t.size(); ++k) EXPECT_GT(t[k - 1], t[k]);
}

TEST(BasisTable, MottIndexOnlyAtUnitFilling) {
  const auto t = bc::BasisTable::build(5, 5);
  ASSERT_TRUE(t.mott_index().has_value());
  EXPECT_EQ(t[*t.mott_index()], (bc::FockState{1, 1, 1, 1, 1}));
  EXPECT_FALSE(bc::BasisTable::build(4, 5).mott_index().has_value());
}

TEST(BasisTable, RejectsForeignStatesAndOversizedBases) {
  const auto t = bc::BasisTable::build(3, 3);
  EXPECT_THROW(t.rank(bc::FockState{1, 1, 0}), bc::DomainError);
  EXPECT_THROW(t.rank(bc::FockState{1, 1, 1, 0}), bc::DomainError);
  EXPECT_THROW(bc::BasisTable::build(9, 9, 20000), bc::DomainError);
  EXPECT_THROW(bc::BasisTable::build(3, 0), bc::DomainError);
}

TEST(HopImage, Amplitudes) {
  const auto a = bc::hop_image(bc::FockState{1, 1}, 1, 0);
  ASSERT_TRUE(a);
  EXPECT_EQ(a->state, (bc::FockState{2, 0}));
  EXPECT_DOUBLE_EQ(a->amplitude, std::sqrt(2.0));

  const auto b = bc::hop_image(bc::FockState{2, 0}, 0, 1);
  ASSERT_TRUE(b);
  EXPECT_EQ(b->state, (bc::FockState{1, 1}));
  EXPECT_DOUBLE_EQ(b->amplitude, std::sqrt(2.0));

  EXPECT_FALSE(bc::hop_image(bc::FockState{0, 2}, 0, 1));
  EXPECT_THROW(bc::hop_image(bc::FockState{1, 1}, 0, 0), bc::DomainError);
  EXPECT_THROW(bc::hop_image(bc::FockState{1, 1}, 0, 2), bc::DomainError);
}

TEST(HopImage, ConservesParticles) {
  const auto t = bc::BasisTable::build(4, 4);
  for (const auto& s : t.states()) {
    for (std::size_t i = 0; i + 1 < s.sites(); ++i) {
      for (auto [from, to] : {std::pair{i, i + 1}, std::pair{i + 1, i}}) {
        const auto h = bc::hop_image(s, from, to);
        if (!h) continue;
        EXPECT_EQ(h->state.particles(), 4u);
        EXPECT_NO_THROW(t.rank(h->state));
        EXPECT_DOUBLE_EQ(h->amplitude * h->amplitude, s[from] * (s[to] + 1.0));
      }
    }
  }
}
