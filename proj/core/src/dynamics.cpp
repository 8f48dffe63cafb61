#include "boson_chaos/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "boson_chaos/errors.hpp"
#include "boson_chaos/numerics.hpp"

namespace boson_chaos {

TimeGrid TimeGrid::logarithmic(double t_min, double t_max, unsigned per_decade) {
  if (!(t_min > 0.0) || !(t_max > t_min)) throw DomainError("time grid: need 0 < t_min < t_max");
  if (per_decade == 0) throw DomainError("time grid: need at least one point per decade");
  const double lo = std::log10(t_min);
  const double hi = std::log10(t_max);
  const auto steps = static_cast<std::size_t>(std::llround(std::ceil((hi - lo) * per_decade - 1e-9)));
  TimeGrid grid;
  grid.points.reserve(steps + 1);
  for (std::size_t j = 0; j <= steps; ++j) {
    const double exponent = std::min(hi, lo + static_cast<double>(j) / per_decade);
    grid.points.push_back(std::pow(10.0, exponent));
  }
  return grid;
}

TimeGrid TimeGrid::linear(double t_start, double t_stop, std::size_t count) {
  if (count < 2 || !(t_stop > t_start) || t_start < 0.0) {
    throw DomainError("time grid: need count >= 2 and 0 <= t_start < t_stop");
  }
  TimeGrid grid;
  grid.points.resize(count);
  for (std::size_t j = 0; j < count; ++j) {
    grid.points[j] = t_start + (t_stop - t_start) * static_cast<double>(j) / static_cast<double>(count - 1);
  }
  return grid;
}

namespace {

void check_weights(std::span<const double> weights, std::span<const double> energies,
                   const char* who) {
  if (weights.size() != energies.size()) {
    throw DomainError(std::string(who) + ": weights and energies differ in length");
  }
  double norm = 0.0;
  for (double p : weights) {
    if (p < 0.0) throw DomainError(std::string(who) + ": negative weight");
    norm += p;
  }
  if (std::abs(norm - 1.0) > 1e-10) {
    throw DomainError(std::string(who) + ": weights sum to " + std::to_string(norm) + ", not 1");
  }
}

}  // namespace

std::vector<double> survival_probability(std::span<const double> weights,
                                         std::span<const double> energies,
                                         std::span<const double> times) {
  check_weights(weights, energies, "survival_probability");
  double total = 0.0;
  for (double p : weights) total += p;
  const double norm2 = total * total;

  std::vector<double> sp(times.size());
  for (std::size_t j = 0; j < times.size(); ++j) {
    const double t = times[j];
    double re = 0.0;
    double im = 0.0;
    for (std::size_t m = 0; m < weights.size(); ++m) {
      const double phase = energies[m] * t;
      re += weights[m] * std::cos(phase);
      im -= weights[m] * std::sin(phase);
    }
    sp[j] = std::min(1.0, (re * re + im * im) / norm2);
  }
  return sp;
}

Asymptote long_time_average(std::span<const double> weights, std::span<const double> energies,
                            std::optional<double> tolerance) {
  check_weights(weights, energies, "long_time_average");
  Asymptote out;
  std::vector<std::size_t> order(energies.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return energies[a] < energies[b]; });
  double tol = 0.0;
  if (tolerance) {
    tol = *tolerance;
  } else if (!order.empty()) {
    const double spread = energies[order.back()] - energies[order.front()];
    tol = 1e-10 * std::max(1.0, spread);
  }

  for (double p : weights) out.ipr += p * p;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i + 1;
    while (j < order.size() && energies[order[j]] - energies[order[j - 1]] <= tol) ++j;
    double group = 0.0;
    for (std::size_t g = i; g < j; ++g) group += weights[order[g]];
    out.corrected += group * group;
    out.degenerate_pairs += (j - i) * (j - i - 1) / 2;
    i = j;
  }
  return out;
}

std::vector<LdosPoint> exact_ldos(std::span<const double> weights, std::span<const double> energies) {
  check_weights(weights, energies, "exact_ldos");
  std::vector<LdosPoint> out(weights.size());
  for (std::size_t m = 0; m < weights.size(); ++m) out[m] = {energies[m], weights[m]};
  return out;
}

LdosHistogram smooth_ldos(std::span<const LdosPoint> ldos, double width,
                          std::optional<double> origin) {
  if (!(width > 0.0)) throw DomainError("smooth_ldos: bin width must be positive");
  if (ldos.empty()) throw DomainError("smooth_ldos: empty LDoS");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& p : ldos) {
    lo = std::min(lo, p.energy);
    hi = std::max(hi, p.energy);
  }
  LdosHistogram h;
  h.origin = origin.value_or(lo);
  if (lo < h.origin) throw DomainError("smooth_ldos: origin above the lowest level");
  h.width = width;
  const auto bins = static_cast<std::size_t>(std::floor((hi - h.origin) / width)) + 1;
  h.centers.resize(bins);
  h.masses.assign(bins, 0.0);
  for (std::size_t b = 0; b < bins; ++b) {
    h.centers[b] = h.origin + (static_cast<double>(b) + 0.5) * width;
  }
  for (const auto& p : ldos) {
    auto b = static_cast<std::size_t>(std::floor((p.energy - h.origin) / width));
    h.masses[std::min(b, bins - 1)] += p.mass;
  }
  return h;
}

std::vector<double> bin_levels(std::span<const double> energies, const LdosHistogram& like) {
  std::vector<double> counts(like.masses.size(), 0.0);
  for (double e : energies) {
    const double x = std::floor((e - like.origin) / like.width);
    if (x < 0.0) continue;
    const auto b = static_cast<std::size_t>(x);
    if (b < counts.size()) counts[b] += 1.0;
  }
  return counts;
}

GaussianLdosFit gaussian_moments(const LdosHistogram& hist) {
  double total = 0.0;
  double mean = 0.0;
  for (std::size_t b = 0; b < hist.masses.size(); ++b) {
    total += hist.masses[b];
    mean += hist.masses[b] * hist.centers[b];
  }
  if (!(total > 0.0)) throw DomainError("gaussian_moments: empty histogram");
  mean /= total;
  double var = 0.0;
  for (std::size_t b = 0; b < hist.masses.size(); ++b) {
    const double d = hist.centers[b] - mean;
    var += hist.masses[b] * d * d;
  }
  var /= total;
  GaussianLdosFit fit;
  fit.center = mean;
  fit.width = var > 0.0 ? std::sqrt(var) : hist.width / std::sqrt(12.0);
  fit.moment_fallback = true;
  return fit;
}

namespace {

double gaussian_density(double e, double center, double sigma) {
  const double z = (e - center) / sigma;
  return std::exp(-0.5 * z * z) / (std::sqrt(2.0 * std::numbers::pi) * sigma);
}

double fit_rss(const LdosHistogram& hist, double center, double sigma) {
  double rss = 0.0;
  for (std::size_t b = 0; b < hist.masses.size(); ++b) {
    const double r = gaussian_density(hist.centers[b], center, sigma) - hist.density(b);
    rss += r * r;
  }
  return rss;
}

}  // namespace

GaussianLdosFit fit_gaussian(const LdosHistogram& hist) {
  std::size_t nonzero = 0;
  for (double m : hist.masses) nonzero += m > 0.0 ? 1 : 0;
  if (nonzero < 4) throw DomainError("fit_gaussian: need at least 4 nonzero bins");

  const GaussianLdosFit start = gaussian_moments(hist);
  // Levenberg-Marquardt in (center, log sigma)
  double center = start.center;
  double log_sigma = std::log(start.width);
  double rss = fit_rss(hist, center, std::exp(log_sigma));
  double lambda = 1e-3;
  bool converged = false;
  for (int iter = 0; iter < 200; ++iter) {
    const double sigma = std::exp(log_sigma);
    double jtj[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
    double jtr[2] = {0.0, 0.0};
    for (std::size_t b = 0; b < hist.masses.size(); ++b) {
      const double e = hist.centers[b];
      const double f = gaussian_density(e, center, sigma);
      const double d = e - center;
      const double r = f - hist.density(b);
      const double dc = f * d / (sigma * sigma);
      const double ds = f * (d * d / (sigma * sigma) - 1.0);  // d f / d log sigma
      jtj[0][0] += dc * dc;
      jtj[0][1] += dc * ds;
      jtj[1][1] += ds * ds;
      jtr[0] += dc * r;
      jtr[1] += ds * r;
    }
    jtj[1][0] = jtj[0][1];
    bool improved = false;
    for (int attempt = 0; attempt < 30 && !improved; ++attempt) {
      const double a = jtj[0][0] * (1.0 + lambda);
      const double d = jtj[1][1] * (1.0 + lambda);
      const double det = a * d - jtj[0][1] * jtj[1][0];
      if (!(std::abs(det) > 0.0)) break;
      const double step_c = -(d * jtr[0] - jtj[0][1] * jtr[1]) / det;
      const double step_s = -(a * jtr[1] - jtj[1][0] * jtr[0]) / det;
      const double trial = fit_rss(hist, center + step_c, std::exp(log_sigma + step_s));
      if (std::isfinite(trial) && trial <= rss) {
        const double change = std::abs(step_c) / std::exp(log_sigma) + std::abs(step_s);
        center += step_c;
        log_sigma += step_s;
        const double gain = rss - trial;
        rss = trial;
        lambda = std::max(lambda * 0.3, 1e-12);
        improved = true;
        if (change < 1e-12 || gain <= 1e-15 * rss) converged = true;
      } else {
        lambda *= 10.0;
      }
    }
    if (!improved) converged = true;  // no downhill step left: at a minimum
    if (converged) break;
  }

  GaussianLdosFit fit;
  fit.center = center;
  fit.width = std::exp(log_sigma);
  fit.rss = rss;
  if (!converged || !std::isfinite(center) || !(fit.width > 0.0) ||
      !std::isfinite(fit.width)) {
    fit = start;
    fit.rss = fit_rss(hist, fit.center, fit.width);
  }
  return fit;
}

std::vector<double> analytic_sp_bc(const GaussianLdosFit& fit, std::span<const double> times) {
  if (!(fit.width > 0.0)) throw DomainError("analytic_sp_bc: sigma must be positive");
  std::vector<double> out(times.size());
  const double s2 = fit.width * fit.width;
  for (std::size_t j = 0; j < times.size(); ++j) out[j] = std::exp(-s2 * times[j] * times[j]);
  return out;
}

std::vector<double> sp_bc_quadrature(const std::function<double(double)>& density, double lo,
                                     double hi, std::size_t points,
                                     std::span<const double> times) {
  if (points < 2 || !(hi > lo)) throw DomainError("sp_bc_quadrature: bad integration range");
  const double h = (hi - lo) / static_cast<double>(points - 1);
  std::vector<double> e(points);
  std::vector<double> f(points);
  for (std::size_t i = 0; i < points; ++i) {
    e[i] = lo + h * static_cast<double>(i);
    f[i] = density(e[i]) * ((i == 0 || i + 1 == points) ? 0.5 * h : h);
  }
  std::vector<double> out(times.size());
  for (std::size_t j = 0; j < times.size(); ++j) {
    double re = 0.0;
    double im = 0.0;
    for (std::size_t i = 0; i < points; ++i) {
      re += f[i] * std::cos(e[i] * times[j]);
      im -= f[i] * std::sin(e[i] * times[j]);
    }
    out[j] = re * re + im * im;
  }
  return out;
}

std::vector<double> sp_bc_histogram(const LdosHistogram& hist, std::span<const double> times) {
  double total = 0.0;
  for (double m : hist.masses) total += m;
  if (!(total > 0.0)) throw DomainError("sp_bc_histogram: empty histogram");
  std::vector<double> out(times.size());
  for (std::size_t j = 0; j < times.size(); ++j) {
    const double t = times[j];
    double re = 0.0;
    double im = 0.0;
    for (std::size_t b = 0; b < hist.masses.size(); ++b) {
      re += hist.masses[b] * std::cos(hist.centers[b] * t);
      im -= hist.masses[b] * std::sin(hist.centers[b] * t);
    }
    const double x = 0.5 * hist.width * t;
    const double sinc = x == 0.0 ? 1.0 : std::sin(x) / x;
    out[j] = sinc * sinc * (re * re + im * im) / (total * total);
  }
  return out;
}

double b2(double t) {
  if (t < 0.0) throw DomainError("b2: t must be non-negative");
  if (t <= 1.0) return 1.0 - 2.0 * t + t * std::log1p(2.0 * t);
  // ln((2t+1)/(2t-1)) = log1p(2 / (2t - 1)) keeps the tail accurate
  return t * std::log1p(2.0 / (2.0 * t - 1.0)) - 1.0;
}

double estimate_eta(const LdosHistogram& rho, std::span<const double> level_counts) {
  if (level_counts.size() != rho.masses.size()) {
    throw DomainError("estimate_eta: LDoS and DOS binnings differ");
  }
  double integral = 0.0;
  bool overlap = false;
  for (std::size_t b = 0; b < rho.masses.size(); ++b) {
    if (rho.masses[b] <= 0.0) continue;
    if (level_counts[b] <= 0.0) {
      throw DomainError("estimate_eta: LDoS weight in a bin without levels");
    }
    overlap = true;
    const double rho_density = rho.masses[b] / rho.width;
    const double nu_density = level_counts[b] / rho.width;
    integral += rho.width * rho_density * rho_density / nu_density;
  }
  if (!overlap) throw DomainError("estimate_eta: LDoS and DOS supports do not overlap");
  return 1.0 / integral;
}

double estimate_eta(std::span<const double> weights, std::span<const double> energies,
                    double width) {
  const auto ldos = exact_ldos(weights, energies);
  const auto rho = smooth_ldos(ldos, width);
  const auto counts = bin_levels(energies, rho);
  return estimate_eta(rho, counts);
}

double mean_level_density(std::span<const double> energies, double center, double half_width) {
  if (!(half_width > 0.0)) throw DomainError("mean_level_density: window must be positive");
  std::size_t count = 0;
  for (double e : energies) count += std::abs(e - center) <= half_width ? 1 : 0;
  return static_cast<double>(count) / (2.0 * half_width);
}

std::vector<double> analytic_sp(const AnalyticInputs& inputs, std::span<const double> times) {
  return analytic_sp(inputs, times, analytic_sp_bc(inputs.ldos_fit, times));
}

std::vector<double> analytic_sp(const AnalyticInputs& inputs, std::span<const double> times,
                                std::span<const double> sp_bc) {
  if (!(inputs.eta > 1.0)) throw DomainError("analytic_sp: eta must exceed 1");
  if (!(inputs.nu_bar > 0.0)) throw DomainError("analytic_sp: mean level density must be positive");
  if (sp_bc.size() != times.size()) throw DomainError("analytic_sp: S_bc length mismatch");
  const double scale = (1.0 - inputs.ipr) / (inputs.eta - 1.0);
  const double heisenberg = 2.0 * std::numbers::pi * inputs.nu_bar;
  std::vector<double> out(times.size());
  for (std::size_t j = 0; j < times.size(); ++j) {
    out[j] = scale * (inputs.eta * sp_bc[j] - b2(times[j] / heisenberg)) + inputs.ipr;
  }
  return out;
}

std::vector<double> rolling_average(std::span<const double> series, std::size_t window) {
  if (window == 0) throw DomainError("rolling_average: window must be >= 1");
  const std::size_t n = series.size();
  std::vector<double> out(n);
  const std::size_t back = window / 2;
  const std::size_t ahead = window - 1 - back;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= back ? i - back : 0;
    const std::size_t hi = std::min(n - 1, i + ahead);
    double s = 0.0;
    for (std::size_t k = lo; k <= hi; ++k) s += series[k];
    out[i] = s / static_cast<double>(hi - lo + 1);
  }
  return out;
}

PowerLawFit fit_power_law(std::span<const double> series, std::span<const double> times,
                          double t_lo, double t_hi, double poor_residual) {
  if (series.size() != times.size()) throw DomainError("fit_power_law: length mismatch");
  std::vector<std::size_t> range;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] >= t_lo && times[i] <= t_hi) range.push_back(i);
  }
  if (range.size() < 10) throw DomainError("fit_power_law: fewer than 10 points in range");
  for (auto i : range) {
    if (!(series[i] > 0.0) || !(times[i] > 0.0)) {
      throw DomainError("fit_power_law: non-positive values in range");
    }
  }
  std::vector<std::size_t> peaks;
  for (auto i : range) {
    if (i == 0 || i + 1 >= series.size()) continue;
    if (series[i] > series[i - 1] && series[i] >= series[i + 1]) peaks.push_back(i);
  }
  PowerLawFit fit;
  fit.used_peaks = peaks.size() >= 4;
  const auto& use = fit.used_peaks ? peaks : range;

  const double n = static_cast<double>(use.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (auto i : use) {
    const double x = std::log(times[i]);
    const double y = std::log(series[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = n * sxx - sx * sx;
  if (!(denom > 0.0)) throw DomainError("fit_power_law: degenerate time range");
  const double slope = (n * sxy - sx * sy) / denom;
  const double intercept = (sy - slope * sx) / n;
  double ss = 0.0;
  for (auto i : use) {
    const double r = std::log(series[i]) - (intercept + slope * std::log(times[i]));
    ss += r * r;
  }
  fit.exponent = -slope;
  fit.prefactor = std::exp(intercept);
  fit.points = use.size();
  fit.rms_residual = std::sqrt(ss / n);
  fit.poor = fit.rms_residual > poor_residual;
  return fit;
}

HoleReport detect_hole(std::span<const double> series, std::span<const double> times, double ipr,
                       double eta, double threshold, const HoleSearch& search) {
  const std::size_t n = series.size();
  if (times.size() != n || n < 10) throw DomainError("detect_hole: need at least 10 matching points");
  if (!(eta > 0.0)) throw DomainError("detect_hole: eta must be positive");
  if (!search.noise.empty() && search.noise.size() != n) {
    throw DomainError("detect_hole: noise length differs from the curve");
  }
  // equilibration: the two halves of the last decade agree within 10%
  std::size_t tail = n;
  while (tail > 0 && times[tail - 1] >= times.back() / 10.0) --tail;
  if (n - tail < 10) tail = n - std::max<std::size_t>(10, n / 5);
  const std::size_t mid = tail + (n - tail) / 2;
  const auto first = series.subspan(tail, mid - tail);
  const auto second = series.subspan(mid);
  const double m1 = pairwise_sum(first) / static_cast<double>(first.size());
  const double m2 = pairwise_sum(second) / static_cast<double>(second.size());
  if (std::abs(m1 - m2) > 0.1 * std::max(m1, m2)) {
    throw DomainError("detect_hole: curve does not equilibrate on the grid; extend t_max");
  }

  double tail_rms = 0.0;
  for (std::size_t i = tail; i < n; ++i) tail_rms += (series[i] - ipr) * (series[i] - ipr);
  tail_rms = std::sqrt(tail_rms / static_cast<double>(n - tail));
  auto noise_at = [&](std::size_t i) { return search.noise.empty() ? tail_rms : search.noise[i]; };

  std::size_t stop = n;
  if (search.t_stop) {
    stop = static_cast<std::size_t>(std::upper_bound(times.begin(), times.end(), *search.t_stop) -
                                    times.begin());
  }
  std::size_t begin = 0;
  for (std::size_t i = 0; i < stop; ++i) {
    if (series[i] > ipr + search.significance * noise_at(i)) begin = i + 1;
  }

  HoleReport report;
  report.threshold = threshold / eta;
  if (begin >= stop) {
    // the curve never settles below the band before t_stop
    report.t_search = begin < n ? times[begin] : times.back();
    return report;
  }
  report.t_search = times[begin];
  const auto it = std::min_element(series.begin() + static_cast<std::ptrdiff_t>(begin),
                                   series.begin() + static_cast<std::ptrdiff_t>(stop));
  const auto imin = static_cast<std::size_t>(it - series.begin());
  report.sp_min = *it;
  report.t_min = times[imin];
  report.depth = ipr - report.sp_min;
  report.noise = noise_at(imin);
  report.present = report.depth > report.threshold &&
                   report.depth > search.significance * report.noise;
  if (report.depth > 0.0) {
    const double level = ipr - 0.1 * report.depth;
    for (std::size_t i = imin; i < n; ++i) {
      if (series[i] >= level) {
        report.t_end = times[i];
        break;
      }
    }
  }
  return report;
}

}  // namespace boson_chaos
