#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace boson_chaos {

struct TimeGrid {
  std::vector<double> points;

  // per_decade points per decade from t_min to t_max inclusive
  static TimeGrid logarithmic(double t_min = 0.1, double t_max = 1e6, unsigned per_decade = 100);
  static TimeGrid linear(double t_start, double t_stop, std::size_t count);

  std::size_t size() const { return points.size(); }
};

// SP(t) = |sum_m p_m exp(-i E_m t)|^2 with p_m = |c_m|^2. Weights must sum to
// 1 within 1e-10. SP(0) is exactly 1.
std::vector<double> survival_probability(std::span<const double> weights,
                                         std::span<const double> energies,
                                         std::span<const double> times);

struct Asymptote {
  double ipr = 0.0;            // sum_m p_m^2
  double corrected = 0.0;      // sum over degenerate groups of (sum_g p)^2
  std::size_t degenerate_pairs = 0;
  bool degenerate() const { return degenerate_pairs > 0; }
};

// Long-time average of SP. Levels closer than `tolerance` count as degenerate;
// the default scales 1e-10 with the spectral width.
Asymptote long_time_average(std::span<const double> weights, std::span<const double> energies,
                            std::optional<double> tolerance = std::nullopt);

struct LdosPoint {
  double energy;
  double mass;
};

std::vector<LdosPoint> exact_ldos(std::span<const double> weights, std::span<const double> energies);

inline constexpr double kDefaultLdosBinWidth = 0.74;

// Masses in equally spaced bins [origin + i w, origin + (i+1) w), centers at
// origin + (i + 1/2) w.
struct LdosHistogram {
  double origin = 0.0;
  double width = 0.0;
  std::vector<double> centers;
  std::vector<double> masses;

  double density(std::size_t bin) const { return masses[bin] / width; }
};

// origin defaults to the lowest energy in `ldos`.
LdosHistogram smooth_ldos(std::span<const LdosPoint> ldos, double width = kDefaultLdosBinWidth,
                          std::optional<double> origin = std::nullopt);

// Level counts on the same binning as `like`; levels outside are dropped.
std::vector<double> bin_levels(std::span<const double> energies, const LdosHistogram& like);

struct GaussianLdosFit {
  double center = 0.0;
  double width = 0.0;   // sigma
  double rss = 0.0;     // residual sum of squares against density
  bool moment_fallback = false;
};

// Least-squares normalized Gaussian through the bin densities; moment matching
// when the Levenberg-Marquardt iteration fails.
GaussianLdosFit fit_gaussian(const LdosHistogram& hist);
GaussianLdosFit gaussian_moments(const LdosHistogram& hist);

// S_bc(t) = exp(-sigma^2 t^2), the squared Fourier transform of the Gaussian LDoS.
std::vector<double> analytic_sp_bc(const GaussianLdosFit& fit, std::span<const double> times);

// |int density(E) exp(-i E t) dE|^2 by the trapezoidal rule on [lo, hi].
std::vector<double> sp_bc_quadrature(const std::function<double(double)>& density, double lo,
                                     double hi, std::size_t points,
                                     std::span<const double> times);

// Exact transform of the piecewise-constant histogram density.
std::vector<double> sp_bc_histogram(const LdosHistogram& hist, std::span<const double> times);

// GOE two-level form factor.
double b2(double t);

// eta = 1 / sum_i w rho_i^2 / nu_i with rho the LDoS density and nu the level
// density on a common binning.
double estimate_eta(const LdosHistogram& rho, std::span<const double> level_counts);
double estimate_eta(std::span<const double> weights, std::span<const double> energies,
                    double width = kDefaultLdosBinWidth);

// Levels per unit energy in [center - half_width, center + half_width].
double mean_level_density(std::span<const double> energies, double center, double half_width);

struct AnalyticInputs {
  double ipr = 0.0;
  double eta = 0.0;
  double nu_bar = 0.0;
  GaussianLdosFit ldos_fit;
};

// <SP(t)> = (1-IPR)/(eta-1) [eta S_bc(t) - b2(t / (2 pi nu_bar))] + IPR
std::vector<double> analytic_sp(const AnalyticInputs& inputs, std::span<const double> times);
std::vector<double> analytic_sp(const AnalyticInputs& inputs, std::span<const double> times,
                                std::span<const double> sp_bc);

inline constexpr std::size_t kDefaultRollingWindow = 25;

// Centered moving mean over `window` points, truncated at the ends.
std::vector<double> rolling_average(std::span<const double> series, std::size_t window);

struct PowerLawFit {
  double exponent = 0.0;   // SP ~ prefactor * t^(-exponent)
  double prefactor = 0.0;
  double rms_residual = 0.0;  // in ln SP
  std::size_t points = 0;
  bool used_peaks = false;
  bool poor = false;
};

inline constexpr double kPoorFitResidual = 0.05;

// Log-log least squares over the local maxima of `series` inside [t_lo, t_hi]
// (all points when fewer than 4 maxima exist).
PowerLawFit fit_power_law(std::span<const double> series, std::span<const double> times,
                          double t_lo, double t_hi, double poor_residual = kPoorFitResidual);

inline constexpr double kDefaultHoleThreshold = 0.3;

struct HoleReport {
  bool present = false;
  double depth = 0.0;      // IPR - min SP over the search window
  double t_min = 0.0;
  double sp_min = 0.0;
  std::optional<double> t_end;  // back within 10% of the depth from IPR
  double threshold = 0.0;       // presence cut, threshold / eta
  double t_search = 0.0;        // where the post-decay search starts
  double noise = 0.0;           // standard error of the curve at t_min
};

// Optional inputs for detect_hole. `noise` is the standard error of each
// point of the curve (for an ensemble mean: spread over realizations / sqrt R);
// when empty, the rms deviation of the last decade from IPR stands in.
struct HoleSearch {
  std::optional<double> t_stop;  // upper end of the search, e.g. the Heisenberg time
  std::span<const double> noise;
  double significance = 3.0;     // depth must also exceed this many standard errors
};

// The search starts after the last point (before t_stop) where the curve lies
// significantly above IPR, which skips the initial decay and any power-law
// regime approaching IPR from above.
HoleReport detect_hole(std::span<const double> series, std::span<const double> times, double ipr,
                       double eta, double threshold = kDefaultHoleThreshold,
                       const HoleSearch& search = {});

}  // namespace boson_chaos
