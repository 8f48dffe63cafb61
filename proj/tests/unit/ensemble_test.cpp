#include "boson_chaos/ensemble.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "boson_chaos/errors.hpp"
#include "boson_chaos/numerics.hpp"

namespace bc = boson_chaos;

TEST(Phases, DeterministicAndInRange) {
  const auto a = bc::sample_phases(42, 100);
  const auto b = bc::sample_phases(42, 100);
  ASSERT_EQ(a.size(), 100u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].phase, b[i].phase);
    EXPECT_EQ(a[i].seed, b[i].seed);
    EXPECT_EQ(a[i].index, i);
    EXPECT_GE(a[i].phase, 0.0);
    EXPECT_LT(a[i].phase, 2.0 * std::numbers::pi);
  }
  EXPECT_NE(bc::sample_phases(43, 1)[0].phase, a[0].phase);
}

TEST(Phases, PrefixStable) {
  const auto short_run = bc::sample_phases(7, 5);
  const auto long_run = bc::sample_phases(7, 50);
  for (std::size_t i = 0; i < short_run.size(); ++i) EXPECT_EQ(short_run[i].phase, long_run[i].phase);
}

TEST(Phases, UniformMoments) {
  const auto p = bc::sample_phases(20240611, 10000);
  double c = 0.0;
  double s = 0.0;
  for (const auto& r : p) {
    c += std::cos(r.phase);
    s += std::sin(r.phase);
  }
  EXPECT_NEAR(c / p.size(), 0.0, 0.03);
  EXPECT_NEAR(s / p.size(), 0.0, 0.03);
}

TEST(RunIndexed, OrderedAndWorkerIndependent) {
  const std::function<double(std::size_t)> task = [](std::size_t i) {
    return std::sin(static_cast<double>(i)) * 1e-3 + static_cast<double>(i);
  };
  const auto one = bc::run_indexed<double>(37, 1, task);
  const auto four = bc::run_indexed<double>(37, 4, task);
  ASSERT_EQ(one.size(), 37u);
  for (std::size_t i = 0; i < one.size(); ++i) {
    EXPECT_EQ(one[i], task(i));
    EXPECT_EQ(one[i], four[i]);
  }
  EXPECT_EQ(bc::pairwise_sum(one), bc::pairwise_sum(four));
}

TEST(RunIndexed, RethrowsLowestFailingIndex) {
  const std::function<int(std::size_t)> task = [](std::size_t i) -> int {
    if (i == 5) throw std::runtime_error("five");
    if (i == 9) throw std::runtime_error("nine");
    return static_cast<int>(i);
  };
  try {
    bc::run_indexed<int>(12, 3, task);
    FAIL() << "expected an exception";
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "five");
  }
}

TEST(Numerics, PairwiseSumAndMeanError) {
  std::vector<double> v(1001);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i);
  EXPECT_EQ(bc::pairwise_sum(v), 500500.0);
  const std::vector<double> x{1.0, 2.0, 3.0, 4.0};
  const auto m = bc::mean_error(x);
  EXPECT_DOUBLE_EQ(m.mean, 2.5);
  EXPECT_NEAR(m.stddev, std::sqrt(5.0 / 3.0), 1e-15);
  EXPECT_NEAR(m.sem, std::sqrt(5.0 / 3.0) / 2.0, 1e-15);
  EXPECT_EQ(m.count, 4u);
}

TEST(RunConfig, DefaultsAndValidation) {
  bc::RunConfig c;
  EXPECT_NO_THROW(c.validate());
  const auto p = c.model(0.6, 1.0);
  EXPECT_DOUBLE_EQ(p.hopping, 0.5);
  EXPECT_DOUBLE_EQ(p.interaction, 4.0 / 6.0);
  c.hopping = 1.0;
  EXPECT_DOUBLE_EQ(c.model(0.6, 1.0).hopping, 1.0);

  bc::RunConfig bad;
  bad.realizations = 0;
  EXPECT_THROW(bad.validate(), bc::DomainError);
  bad = {};
  bad.disorders = {-1.0};
  EXPECT_THROW(bad.validate(), bc::DomainError);
  bad = {};
  bad.t_min = 10.0;
  bad.t_max = 1.0;
  EXPECT_THROW(bad.validate(), bc::DomainError);
}

TEST(RunConfig, WorkersRespectMemory) {
  bc::RunConfig c;
  c.workers = 8;
  c.memory_budget_gb = 1.0;
  // one dim-6435 solve needs about 1 GB, so only one fits
  EXPECT_EQ(bc::effective_workers(c, 40, 6435), 1u);
  EXPECT_EQ(bc::effective_workers(c, 3, 100), 3u);
}

TEST(Blas, SelfTestPasses) {
  // the test binaries relaunch with a safe kernel when this would fail
  EXPECT_TRUE(bc::blas_self_test());
}
