#include "boson_chaos/dynamics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "boson_chaos/errors.hpp"
#include "boson_chaos/fock_basis.hpp"
#include "boson_chaos/hamiltonian.hpp"
#include "boson_chaos/spectral_stats.hpp"

namespace bc = boson_chaos;

namespace {

double gaussian_density(double e, double center, double sigma) {
  return std::exp(-0.5 * std::pow((e - center) / sigma, 2)) / (sigma * std::sqrt(2.0 * std::numbers::pi));
}

bc::LdosHistogram gaussian_histogram(double center, double sigma, double width) {
  bc::LdosHistogram h;
  h.width = width;
  h.origin = center - 8.0 * sigma;
  for (double lo = h.origin; lo < center + 8.0 * sigma; lo += width) {
    // exact bin mass from the error function
    const double a = (lo - center) / (sigma * std::sqrt(2.0));
    const double b = (lo + width - center) / (sigma * std::sqrt(2.0));
    h.centers.push_back(lo + width / 2.0);
    h.masses.push_back(0.5 * (std::erf(b) - std::erf(a)));
  }
  return h;
}

}  // namespace

TEST(TimeGrid, Logarithmic) {
  const auto g = bc::TimeGrid::logarithmic(0.1, 1e6, 100);
  ASSERT_EQ(g.size(), 701u);
  EXPECT_DOUBLE_EQ(g.points.front(), 0.1);
  EXPECT_NEAR(g.points.back(), 1e6, 1e-6);
  for (std::size_t i = 1; i < g.size(); ++i) EXPECT_GT(g.points[i], g.points[i - 1]);
  EXPECT_THROW(bc::TimeGrid::logarithmic(0.0, 1.0, 10), bc::DomainError);
}

TEST(SurvivalProbability, TwoLevels) {
  const std::vector<double> w{0.5, 0.5};
  const std::vector<double> e{0.0, 1.0};
  const auto grid = bc::TimeGrid::linear(0.0, 10.0, 101);
  const auto sp = bc::survival_probability(w, e, grid.points);
  EXPECT_EQ(sp.front(), 1.0);
  for (std::size_t i = 0; i < sp.size(); ++i) {
    EXPECT_NEAR(sp[i], std::pow(std::cos(grid.points[i] / 2.0), 2), 1e-14);
  }
  const double t_pi[] = {std::numbers::pi};
  EXPECT_NEAR(bc::survival_probability(w, e, t_pi)[0], 0.0, 1e-15);
}

TEST(SurvivalProbability, StationaryState) {
  const std::vector<double> w{0.0, 1.0, 0.0};
  const std::vector<double> e{-1.0, 0.3, 2.0};
  for (double v : bc::survival_probability(w, e, bc::TimeGrid::logarithmic(0.1, 1e4, 10).points)) {
    EXPECT_DOUBLE_EQ(v, 1.0);
  }
}

TEST(SurvivalProbability, MatchesUnitaryPropagation) {
  const auto t = bc::BasisTable::build(3, 3);
  const auto h = bc::assemble(bc::ModelParams::standard(3, 3, 0.6, 0.9), t);
  const auto d = bc::diagonalize(h);
  const std::size_t k = t.rank(bc::FockState{1, 1, 1});
  const arma::vec c = d.components(k);
  const arma::vec p = arma::square(c);
  const std::vector<double> w(p.begin(), p.end());
  const std::vector<double> e(d.eigenvalues.begin(), d.eigenvalues.end());
  const auto grid = bc::TimeGrid::logarithmic(0.1, 1e3, 20);
  const auto sp = bc::survival_probability(w, e, grid.points);

  // propagate step by step with a fixed small step, plus one remainder step
  const arma::cx_mat hc(h.to_dense(), arma::mat(t.size(), t.size(), arma::fill::zeros));
  const std::complex<double> minus_i(0.0, -1.0);
  constexpr double dt = 0.01;
  const arma::cx_mat step = arma::expmat(minus_i * dt * hc);
  arma::cx_vec psi(t.size(), arma::fill::zeros);
  psi[k] = 1.0;
  const arma::cx_vec psi0 = psi;
  double now = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double target = grid.points[i];
    const auto steps = static_cast<std::size_t>(std::floor((target - now) / dt));
    for (std::size_t s = 0; s < steps; ++s) psi = step * psi;
    now += static_cast<double>(steps) * dt;
    const arma::cx_vec at = arma::expmat(minus_i * (target - now) * hc) * psi;
    EXPECT_NEAR(sp[i], std::norm(arma::cdot(psi0, at)), 1e-8) << "t = " << target;
  }
}

TEST(LongTimeAverage, Limits) {
  const std::vector<double> uniform(8, 0.125);
  std::vector<double> e{0, 1, 2, 3, 4, 5, 6, 7};
  EXPECT_NEAR(bc::long_time_average(uniform, e).ipr, 0.125, 1e-15);
  const std::vector<double> single{1.0, 0, 0, 0, 0, 0, 0, 0};
  EXPECT_DOUBLE_EQ(bc::long_time_average(single, e).ipr, 1.0);

  e[1] = e[0];  // degenerate pair merges weights
  const auto a = bc::long_time_average(uniform, e);
  EXPECT_EQ(a.degenerate_pairs, 1u);
  EXPECT_NEAR(a.corrected, 0.125 + 2.0 * 0.125 * 0.125, 1e-15);
}

TEST(Ldos, ExactAndSmoothedConserveMass) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> w(300), e(300);
  double total = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = u(rng);
    total += w[i];
    e[i] = -5.0 + 0.033 * static_cast<double>(i);
  }
  for (auto& x : w) x /= total;
  const auto exact = bc::exact_ldos(w, e);
  double mass = 0.0;
  for (const auto& p : exact) mass += p.mass;
  EXPECT_NEAR(mass, 1.0, 1e-12);
  for (double width : {0.01, 0.2, 0.74, 1.5, 7.0}) {
    const auto h = bc::smooth_ldos(exact, width);
    double m = 0.0;
    for (double x : h.masses) m += x;
    EXPECT_NEAR(m, 1.0, 1e-12) << width;
  }
  // bins finer than the level spacing keep one level per occupied bin
  const auto fine = bc::smooth_ldos(exact, 0.01);
  std::size_t occupied = 0;
  for (double x : fine.masses) occupied += x > 0.0 ? 1 : 0;
  EXPECT_EQ(occupied, w.size());
}

TEST(Ldos, EigenstateGivesUnitMass) {
  const std::vector<double> w{0.0, 0.0, 1.0};
  const std::vector<double> e{0.0, 1.0, 2.0};
  const auto exact = bc::exact_ldos(w, e);
  double top = 0.0;
  for (const auto& p : exact) top = std::max(top, p.mass);
  EXPECT_DOUBLE_EQ(top, 1.0);
}

TEST(GaussianFit, RecoversSyntheticGaussian) {
  const auto h = gaussian_histogram(1.3, 2.0, 0.2);
  const auto fit = bc::fit_gaussian(h);
  EXPECT_FALSE(fit.moment_fallback);
  EXPECT_NEAR(fit.center, 1.3, 0.01 * 2.0);
  EXPECT_NEAR(fit.width, 2.0, 0.01 * 2.0);
  const auto mom = bc::gaussian_moments(h);
  EXPECT_NEAR(mom.center, fit.center, 0.01 * 2.0);
  EXPECT_NEAR(mom.width, fit.width, 0.01 * fit.width);
}

TEST(GaussianFit, SymmetricHistogramCenter) {
  bc::LdosHistogram h;
  h.width = 0.5;
  h.origin = -2.5;
  h.masses = {0.05, 0.1, 0.2, 0.3, 0.2, 0.1, 0.05};
  for (std::size_t i = 0; i < h.masses.size(); ++i) h.centers.push_back(-2.25 + 0.5 * i);
  const auto fit = bc::fit_gaussian(h);
  EXPECT_NEAR(fit.center, -0.75, h.width / 10.0);
}

TEST(SurvivalBeforeCorrelations, ClosedFormAgainstQuadrature) {
  const bc::GaussianLdosFit fit{0.4, 1.7, 0.0, false};
  const auto grid = bc::TimeGrid::linear(0.0, 3.0, 61);
  const auto closed = bc::analytic_sp_bc(fit, grid.points);
  const auto quad = bc::sp_bc_quadrature([&](double e) { return gaussian_density(e, 0.4, 1.7); },
                                         0.4 - 14.0, 0.4 + 14.0, 20001, grid.points);
  EXPECT_EQ(closed.front(), 1.0);
  for (std::size_t i = 0; i < closed.size(); ++i) EXPECT_NEAR(closed[i], quad[i], 1e-6);
}

TEST(SurvivalBeforeCorrelations, WidthScaling) {
  // the 1/e time of exp(-sigma^2 t^2) is 1/sigma
  const bc::GaussianLdosFit narrow{0.0, 1.0, 0.0, false};
  const bc::GaussianLdosFit wide{0.0, 2.0, 0.0, false};
  const double t1[] = {1.0};
  const double t2[] = {0.5};
  EXPECT_NEAR(bc::analytic_sp_bc(narrow, t1)[0], std::exp(-1.0), 1e-15);
  EXPECT_NEAR(bc::analytic_sp_bc(wide, t2)[0], std::exp(-1.0), 1e-15);
}

TEST(SurvivalBeforeCorrelations, HistogramTransform) {
  const auto h = gaussian_histogram(0.0, 1.5, 0.05);
  const bc::GaussianLdosFit fit{0.0, 1.5, 0.0, false};
  const auto grid = bc::TimeGrid::linear(0.0, 2.0, 41);
  const auto exact = bc::sp_bc_histogram(h, grid.points);
  const auto closed = bc::analytic_sp_bc(fit, grid.points);
  EXPECT_NEAR(exact.front(), 1.0, 1e-12);
  for (std::size_t i = 0; i < exact.size(); ++i) EXPECT_NEAR(exact[i], closed[i], 1e-3);
}

TEST(TwoLevelFormFactor, Properties) {
  EXPECT_EQ(bc::b2(0.0), 1.0);
  const double below = 1.0 - 2.0 + std::log(3.0);
  const double above = std::log(3.0) - 1.0;
  EXPECT_NEAR(bc::b2(1.0), std::log(3.0) - 1.0, 1e-12);
  EXPECT_NEAR(below, above, 1e-12);
  EXPECT_NEAR(bc::b2(1.0 - 1e-9), bc::b2(1.0 + 1e-9), 1e-8);
  EXPECT_LT(bc::b2(100.0), 2e-5);
  EXPECT_GT(bc::b2(100.0), 0.0);
  double prev = 1.0;
  for (double t = 0.01; t < 50.0; t *= 1.1) {
    const double v = bc::b2(t);
    EXPECT_LE(v, prev + 1e-15);
    prev = v;
  }
}

TEST(Eta, UniformStateGivesDimension) {
  const std::size_t dim = 2000;
  std::vector<double> e(dim), w(dim, 1.0 / dim);
  for (std::size_t i = 0; i < dim; ++i) e[i] = -10.0 + 20.0 * static_cast<double>(i) / dim;
  for (double width : {0.3, 0.74, 1.8}) {
    EXPECT_NEAR(bc::estimate_eta(w, e, width), static_cast<double>(dim), 0.01 * dim) << width;
  }
}

TEST(Eta, SingleLevelAndPreconditions) {
  const std::vector<double> e{0.0, 0.5, 3.0};
  const std::vector<double> w{0.0, 0.0, 1.0};
  EXPECT_DOUBLE_EQ(bc::estimate_eta(w, e, 0.74), 1.0);
  bc::LdosHistogram h;
  h.width = 1.0;
  h.masses = {1.0};
  h.centers = {0.5};
  const std::vector<double> none{0.0};
  EXPECT_THROW(bc::estimate_eta(h, none), bc::DomainError);
}

TEST(AnalyticSurvival, Endpoints) {
  const bc::AnalyticInputs in{0.005, 550.0, 120.0, {0.0, 2.5, 0.0, false}};
  const double ts[] = {0.0, 1e9};
  const auto sp = bc::analytic_sp(in, ts);
  EXPECT_NEAR(sp[0], 1.0, 1e-14);
  EXPECT_NEAR(sp[1], in.ipr, 1e-12);
  bc::AnalyticInputs bad = in;
  bad.eta = 1.0;
  EXPECT_THROW(bc::analytic_sp(bad, ts), bc::DomainError);
}

TEST(AnalyticSurvival, HoleDepthBoundedByInverseEta) {
  const bc::AnalyticInputs in{0.002, 800.0, 100.0, {0.0, 2.0, 0.0, false}};
  const auto grid = bc::TimeGrid::logarithmic(0.1, 1e6, 100);
  const auto sp = bc::analytic_sp(in, grid.points);
  const double low = *std::min_element(sp.begin(), sp.end());
  EXPECT_LE(in.ipr - low, 1.0 / in.eta + 1e-12);
  EXPECT_NEAR(in.ipr - low, 1.0 / in.eta, 0.05 / in.eta);
}

TEST(RollingAverage, BasicProperties) {
  const std::vector<double> x{1, 5, 2, 8, 3, 9, 4};
  EXPECT_EQ(bc::rolling_average(x, 1), x);
  const std::vector<double> flat(50, 0.25);
  for (double v : bc::rolling_average(flat, 25)) EXPECT_NEAR(v, 0.25, 1e-15);
  std::vector<double> osc(4000);
  for (std::size_t i = 0; i < osc.size(); ++i) osc[i] = std::pow(std::cos(0.37 * i), 2);
  const auto r = bc::rolling_average(osc, 301);
  for (std::size_t i = 150; i + 150 < r.size(); ++i) EXPECT_NEAR(r[i], 0.5, 0.05);
  EXPECT_THROW(bc::rolling_average(x, 0), bc::DomainError);
}

TEST(PowerLaw, ExactExponent) {
  const auto grid = bc::TimeGrid::logarithmic(1.0, 1e4, 50);
  std::vector<double> sp;
  for (double t : grid.points) sp.push_back(0.3 * std::pow(t, -0.5));
  const auto fit = bc::fit_power_law(sp, grid.points, 1.0, 1e4);
  EXPECT_NEAR(fit.exponent, 0.5, 0.01);
  EXPECT_NEAR(fit.prefactor, 0.3, 1e-6);
  EXPECT_FALSE(fit.poor);
}

TEST(PowerLaw, EnvelopeOfOscillation) {
  const auto grid = bc::TimeGrid::logarithmic(1.0, 1e4, 200);
  std::vector<double> sp;
  for (double t : grid.points) {
    sp.push_back(std::pow(t, -0.5) * (0.6 + 0.4 * std::pow(std::cos(3.0 * std::log(t)), 2)));
  }
  const auto fit = bc::fit_power_law(sp, grid.points, 1.0, 1e4);
  EXPECT_TRUE(fit.used_peaks);
  EXPECT_NEAR(fit.exponent, 0.5, 0.05);
}

TEST(PowerLaw, ExponentialIsPoor) {
  const auto grid = bc::TimeGrid::linear(1.0, 10.0, 60);
  std::vector<double> sp;
  for (double t : grid.points) sp.push_back(std::exp(-t));
  EXPECT_TRUE(bc::fit_power_law(sp, grid.points, 1.0, 10.0).poor);
}

TEST(Hole, AnalyticCurveSelfConsistent) {
  const bc::AnalyticInputs in{0.004, 600.0, 120.0, {0.0, 2.6, 0.0, false}};
  const auto grid = bc::TimeGrid::logarithmic(0.1, 1e6, 100);
  const auto sp = bc::analytic_sp(in, grid.points);
  const auto hole = bc::detect_hole(sp, grid.points, in.ipr, in.eta);
  // after S_bc has decayed the depth is (1 - IPR)/(eta - 1) * b2, with b2 close to 1
  const double expected = (1.0 - in.ipr) / (in.eta - 1.0);
  EXPECT_TRUE(hole.present);
  EXPECT_NEAR(hole.depth, expected, 0.1 * expected);
  ASSERT_TRUE(hole.t_end.has_value());
  const double t_h = 2.0 * std::numbers::pi * in.nu_bar;
  EXPECT_GT(*hole.t_end, 0.1 * t_h);
  EXPECT_LT(*hole.t_end, 100.0 * t_h);
}

TEST(Hole, FlatCurveHasNoHole) {
  const auto grid = bc::TimeGrid::logarithmic(0.1, 1e5, 50);
  std::vector<double> sp;
  for (double t : grid.points) sp.push_back(0.01 + 0.99 * std::exp(-t * t));
  const auto hole = bc::detect_hole(sp, grid.points, 0.01, 500.0);
  EXPECT_FALSE(hole.present);
}

TEST(Hole, RefusesUnequilibratedCurve) {
  const auto grid = bc::TimeGrid::logarithmic(0.1, 1e3, 50);
  std::vector<double> sp;
  for (double t : grid.points) sp.push_back(1.0 / (1.0 + t));
  EXPECT_THROW(bc::detect_hole(sp, grid.points, 0.01, 100.0), bc::DomainError);
}

namespace {

// decays from above onto `ipr`, with an optional Gaussian dip in log time
// centred at t = 300
std::vector<double> approach_with_dip(std::span<const double> times, double ipr, double dip) {
  std::vector<double> sp;
  for (double t : times) {
    const double above = (1.0 - ipr) * std::exp(-t / 5.0);
    const double lg = std::log10(t / 300.0);
    sp.push_back(ipr + above - dip * std::exp(-lg * lg / 0.3));
  }
  return sp;
}

}  // namespace

TEST(Hole, DipWithinNoiseIsAbsent) {
  const auto grid = bc::TimeGrid::logarithmic(0.1, 1e6, 100);
  const double ipr = 0.02;
  const auto sp = approach_with_dip(grid.points, ipr, 8e-4);
  const std::vector<double> noise(sp.size(), 1e-3);
  bc::HoleSearch search;
  search.noise = noise;
  const auto hole = bc::detect_hole(sp, grid.points, ipr, 1000.0, 0.3, search);
  EXPECT_GT(hole.depth, hole.threshold);  // deep enough, but not significant
  EXPECT_FALSE(hole.present);
  EXPECT_NEAR(hole.t_min, 300.0, 30.0);
}

TEST(Hole, SignificantDipIsPresent) {
  const auto grid = bc::TimeGrid::logarithmic(0.1, 1e6, 100);
  const double ipr = 0.02;
  const auto sp = approach_with_dip(grid.points, ipr, 8e-4);
  const std::vector<double> noise(sp.size(), 1e-4);
  bc::HoleSearch search;
  search.noise = noise;
  search.t_stop = 3000.0;
  const auto hole = bc::detect_hole(sp, grid.points, ipr, 1000.0, 0.3, search);
  EXPECT_TRUE(hole.present);
  EXPECT_NEAR(hole.depth, 8e-4, 1e-5);
  EXPECT_GT(hole.t_search, 1.0);  // the approach from above is skipped
  ASSERT_TRUE(hole.t_end.has_value());
  EXPECT_GT(*hole.t_end, hole.t_min);
}

TEST(Hole, EarlyDipBeforeApproachIsSkipped) {
  const auto grid = bc::TimeGrid::logarithmic(0.1, 1e6, 100);
  const double ipr = 0.02;
  auto sp = approach_with_dip(grid.points, ipr, 0.0);
  // a deep transient dip at t ~ 0.5, followed by the approach from above
  for (std::size_t i = 0; i < sp.size(); ++i) {
    if (grid.points[i] > 0.4 && grid.points[i] < 0.6) sp[i] = 1e-4;
  }
  const std::vector<double> noise(sp.size(), 1e-4);
  bc::HoleSearch search;
  search.noise = noise;
  const auto hole = bc::detect_hole(sp, grid.points, ipr, 1000.0, 0.3, search);
  EXPECT_FALSE(hole.present);
  EXPECT_GT(hole.t_min, 1.0);
}
