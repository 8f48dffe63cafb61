#include "boson_chaos/state_classify.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "boson_chaos/errors.hpp"
#include "boson_chaos/fock_basis.hpp"
#include "boson_chaos/hamiltonian.hpp"
#include "boson_chaos/spectral_stats.hpp"

namespace bc = boson_chaos;

TEST(Crowding, KnownStates) {
  EXPECT_DOUBLE_EQ(bc::crowding(bc::FockState{1, 1, 1, 1, 1, 1, 1, 1}), 1.0);
  EXPECT_DOUBLE_EQ(bc::crowding(bc::FockState{0, 0, 8, 0, 0, 0, 0, 0}), 8.0);
  EXPECT_DOUBLE_EQ(bc::crowding(bc::FockState{2, 2, 0, 0, 0, 0, 2, 2}), 2.0);
  EXPECT_DOUBLE_EQ(bc::crowding(bc::FockState{0, 2, 0, 1, 2, 3, 0, 0}), 2.25);
  EXPECT_DOUBLE_EQ(bc::crowding_cluster(2.25), 2.25);
  EXPECT_DOUBLE_EQ(bc::crowding_cluster(2.3), 2.25);
}

TEST(ParticipationRatio, Limits) {
  const std::vector<double> single{0.0, 1.0, 0.0};
  EXPECT_DOUBLE_EQ(bc::participation_ratio(single), 1.0);
  const std::vector<double> spread(16, 0.25);
  EXPECT_NEAR(bc::participation_ratio(spread), 16.0, 1e-12);
  const std::vector<double> broken{1.0, 1.0};
  EXPECT_THROW(bc::participation_ratio(broken), bc::NumericError);
}

TEST(ParticipationRatio, BoundedByDimension) {
  const auto t = bc::BasisTable::build(5, 5);
  const auto d = bc::diagonalize(bc::assemble(bc::ModelParams::standard(5, 5, 0.6, 0.2), t));
  for (std::size_t k = 0; k < t.size(); ++k) {
    const double pr = bc::participation_ratio(t[k], t, d);
    EXPECT_GE(pr, 1.0 - 1e-12);
    EXPECT_LE(pr, static_cast<double>(t.size()) + 1e-9);
  }
}

class ClassifyFixture : public ::testing::Test {
 protected:
  void SetUp() override {
    table = bc::BasisTable::build(5, 5);
    for (double phi : {0.3, 1.7, 3.1, 4.4, 5.9}) {
      const auto p = bc::ModelParams::standard(5, 5, 0.6, phi);
      samples.push_back(bc::sample_states(table, p, bc::diagonalize(bc::assemble(p, table))));
    }
    profiles = bc::classify_all(table, samples);
  }
  bc::BasisTable table = bc::BasisTable::build(1, 1);
  std::vector<bc::StateSample> samples;
  std::vector<bc::StateProfile> profiles;
};

TEST_F(ClassifyFixture, OneMottState) {
  ASSERT_EQ(profiles.size(), table.size());
  std::size_t mott = 0;
  for (const auto& p : profiles) mott += p.crowding == 1.0 ? 1 : 0;
  EXPECT_EQ(mott, 1u);
}

TEST_F(ClassifyFixture, AveragesAreConsistent) {
  for (const auto& p : profiles) {
    EXPECT_GE(p.pr, p.pr_of_mean_ipr - 1e-9);  // Jensen
    EXPECT_NEAR(p.pr_of_mean_ipr, 1.0 / p.ipr, 1e-9);
    EXPECT_NEAR(p.pr_over_dim, p.pr / static_cast<double>(table.size()), 1e-15);
    EXPECT_EQ(table[p.rank], p.state);
  }
}

TEST_F(ClassifyFixture, ExtremesAreSortedAndDisjoint) {
  const auto ex = bc::select_extremes(profiles, 2.0, 3.0, 2);
  ASSERT_EQ(ex.highest.size(), 2u);
  ASSERT_EQ(ex.lowest.size(), 2u);
  EXPECT_GE(ex.highest[0].pr, ex.highest[1].pr);
  EXPECT_LE(ex.lowest[0].pr, ex.lowest[1].pr);
  EXPECT_GT(ex.highest.back().pr, ex.lowest.back().pr);
  for (const auto& s : ex.highest) {
    EXPECT_GE(s.crowding, 2.0);
    EXPECT_LT(s.crowding, 3.0);
  }
  EXPECT_THROW(bc::select_extremes(profiles, 2.0, 3.0, 1000), bc::DomainError);
  EXPECT_THROW(bc::select_extremes(profiles, 10.0, 11.0, 1), bc::DomainError);
}

TEST(Classify, CleanEnergiesFollowCrowding) {
  // with W = 0, E_k / N = U (C - 1) / 2 exactly
  const auto t = bc::BasisTable::build(6, 6);
  auto p = bc::ModelParams::standard(6, 6, 0.0);
  const auto s = bc::sample_states(t, p, bc::diagonalize(bc::assemble(p, t)));
  const std::vector<bc::StateSample> ens{s};
  for (const auto& prof : bc::classify_all(t, ens)) {
    EXPECT_NEAR(prof.energy_per_particle, p.interaction * (prof.crowding - 1.0) / 2.0, 1e-12);
  }
}
