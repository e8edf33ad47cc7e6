#include "mesoent/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace mesoent {

DuanReport number_state_duan(const DetectionRecord& rec) {
  if (rec.n < 0 || rec.m < 0) throw std::invalid_argument("number_state_duan: counts must be nonnegative");
  DuanReport report;
  report.var_q_sum = 2.0 * rec.n + 1.0;
  report.var_p_diff = 2.0 * rec.m + 1.0;
  report.total = report.var_q_sum + report.var_p_diff;
  report.entangled_detected = report.total < 2.0;
  return report;
}

double GaussianStateWavefunction::s() const { return std::cosh(2.0 * alpha); }

std::complex<double> GaussianStateWavefunction::operator()(double qa, double qb) const {
  const double width = s();
  const double mu = std::cosh(alpha), nu = std::sinh(alpha);
  const double sum = qa + qb, diff = qa - qb;
  const double magnitude = -width * sum * sum / 4.0 - diff * diff / (4.0 * width);
  const double phase =
      2.0 * std::sqrt(2.0) * mu * nu * (p_obs * diff / width + q_obs * sum);
  return std::pow(M_PI, -0.5) * std::exp(magnitude) *
         std::complex<double>(std::cos(phase), std::sin(phase));
}

DuanReport gaussian_state_duan(double alpha, double p_obs, double q_obs) {
  if (!(alpha > 0.0)) throw std::invalid_argument("gaussian_state_duan: alpha must be positive");
  (void)p_obs;  // measured values shift the means, not the variances
  (void)q_obs;
  const double width = std::cosh(2.0 * alpha);
  DuanReport report;
  report.var_q_sum = 1.0 / width;
  report.var_p_diff = 1.0 / width;
  report.total = 2.0 / width;
  report.entangled_detected = report.total < 2.0;
  return report;
}

double lossy_variance(double var_ideal, double eta) {
  if (var_ideal < 0.0) throw std::invalid_argument("lossy_variance: variance must be nonnegative");
  if (!(eta >= 0.0 && eta <= 1.0)) throw std::invalid_argument("lossy_variance: eta must lie in [0, 1]");
  return eta * var_ideal + (1.0 - eta);
}

double electronic_noise_efficiency(double signal_coeff, double sigma_e) {
  if (!(signal_coeff > 0.0))
    throw std::invalid_argument("electronic_noise_efficiency: signal coefficient must be positive");
  if (sigma_e < 0.0)
    throw std::invalid_argument("electronic_noise_efficiency: sigma must be nonnegative");
  if (sigma_e == 0.0) return 1.0;
  const double a2 = signal_coeff * signal_coeff;
  return a2 / (a2 + sigma_e * sigma_e);
}

double NumberStateWavefunction::operator()(double xa, double xb) const {
  const double inv_sqrt2 = M_SQRT1_2;
  return hermite_gaussian(n, (xb + xa) * inv_sqrt2) * hermite_gaussian(m, (xb - xa) * inv_sqrt2);
}

HomodyneSampler::HomodyneSampler(std::vector<std::complex<double>> amplitudes)
    : amps_(std::move(amplitudes)) {
  if (amps_.empty() || amps_.size() > 101)
    throw std::invalid_argument("HomodyneSampler: cutoff must lie in [0, 100]");
  double norm = 0.0;
  for (const auto& c : amps_) {
    norm += std::norm(c);
    if (std::norm(c) > 0.0) ++support_;
  }
  if (norm <= 0.0) throw std::invalid_argument("HomodyneSampler: state must be nonzero");
  const double scale = 1.0 / std::sqrt(norm);
  for (auto& c : amps_) c *= scale;

  // Refine the value grid until successive refinements agree to well under
  // the 1e-4 L1 contract.
  std::size_t points = 2048;
  build_grid(points, mixture_);
  while (points < 16384) {
    const double coarse_lo = lo_, coarse_step = step_;
    std::vector<double> fine;
    build_grid(points * 2, fine);
    double l1 = 0.0, mass = 0.0;
    for (std::size_t g = 0; g < fine.size(); ++g) {
      const double x = lo_ + double(g) * step_;
      const double offset = std::max(0.0, (x - coarse_lo) / coarse_step);
      const std::size_t bin = std::min(std::size_t(offset), mixture_.size() - 2);
      const double frac = std::clamp(offset - double(bin), 0.0, 1.0);
      const double interp = mixture_[bin] * (1.0 - frac) + mixture_[bin + 1] * frac;
      l1 += std::abs(fine[g] - interp) * step_;
      mass += fine[g] * step_;
    }
    mixture_ = std::move(fine);  // keep the finer grid either way
    points *= 2;
    if (l1 / mass <= 5e-6) break;
  }
  cumulative_.assign(points, 0.0);
  for (std::size_t g = 1; g < points; ++g)
    cumulative_[g] = cumulative_[g - 1] + 0.5 * (mixture_[g - 1] + mixture_[g]) * step_;
}

void HomodyneSampler::build_grid(std::size_t points, std::vector<double>& mixture) {
  const int cutoff = int(amps_.size()) - 1;
  const double reach = std::sqrt(2.0 * cutoff + 1.0) + 8.0;
  lo_ = -reach;
  step_ = 2.0 * reach / double(points - 1);
  mixture.assign(points, 0.0);
  for (std::size_t g = 0; g < points; ++g)
    mixture[g] = phase_averaged_density(lo_ + double(g) * step_);
}

double HomodyneSampler::density(double q, double phase) const {
  std::complex<double> psi = 0.0;
  for (std::size_t n = 0; n < amps_.size(); ++n) {
    if (std::norm(amps_[n]) == 0.0) continue;
    psi += amps_[n] * std::complex<double>(std::cos(n * phase), std::sin(n * phase)) *
           hermite_gaussian(int(n), q);
  }
  return std::norm(psi);
}

double HomodyneSampler::phase_averaged_density(double q) const {
  double rho = 0.0;
  for (std::size_t n = 0; n < amps_.size(); ++n) {
    if (std::norm(amps_[n]) == 0.0) continue;
    const double phi = hermite_gaussian(int(n), q);
    rho += std::norm(amps_[n]) * phi * phi;
  }
  return rho;
}

std::vector<HomodyneSample> HomodyneSampler::draw(std::size_t count, std::uint64_t seed) const {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const std::size_t points = mixture_.size();

  std::vector<HomodyneSample> samples;
  samples.reserve(count);
  for (std::size_t s = 0; s < count; ++s) {
    // Value from the phase-averaged density via the tabulated CDF.
    const double target = uniform(rng) * cumulative_[points - 1];
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
    const std::size_t bin =
        std::min(std::size_t(std::max<long>(1, it - cumulative_.begin())), points - 1) - 1;
    // Invert the piecewise-linear density inside the bin (quadratic CDF).
    const double rho0 = mixture_[bin];
    const double rho1 = mixture_[bin + 1];
    const double residual = (target - cumulative_[bin]) / step_;
    const double slope = rho1 - rho0;
    double t;
    if (std::abs(slope) < 1e-14 * (rho0 + rho1 + 1e-300)) {
      t = rho0 > 0.0 ? residual / rho0 : 0.5;
    } else {
      const double disc = rho0 * rho0 + 2.0 * slope * residual;
      t = (std::sqrt(std::max(disc, 0.0)) - rho0) / slope;
    }
    const double value = lo_ + (double(bin) + std::clamp(t, 0.0, 1.0)) * step_;

    // Phase from the conditional density by exact rejection against the
    // uniform proposal: |psi_phi(q)|^2 <= support * phase-averaged density
    // pointwise (Cauchy-Schwarz), and the bound uses the exact densities, so
    // the conditional draw is exact.
    double phase = 2.0 * M_PI * uniform(rng);
    if (support_ > 1) {
      const double bound = support_ * phase_averaged_density(value);
      int guard = 0;
      while (bound > 0.0 && uniform(rng) * bound > density(value, phase)) {
        phase = 2.0 * M_PI * uniform(rng);
        if (++guard > 1000000)
          throw std::logic_error("HomodyneSampler: rejection bound violated");
      }
    }
    samples.push_back({value, phase});
  }
  return samples;
}

std::vector<HomodyneSample> homodyne_sample(const std::vector<std::complex<double>>& state,
                                            std::size_t count, std::uint64_t seed) {
  return HomodyneSampler(state).draw(count, seed);
}

MomentEstimate richter_estimate(std::span<const HomodyneSample> samples, int k, int l) {
  if (samples.empty()) throw std::invalid_argument("richter_estimate: no samples");
  if (k < 0 || l < 0) throw std::invalid_argument("richter_estimate: powers must be nonnegative");

  const double scale = 1.0 / (std::sqrt(std::pow(2.0, k + l)) * to_double(binomial(k + l, k)));
  const int phase_multiple = k - l;

  double sum_re = 0.0, sum_im = 0.0, sum_re2 = 0.0, sum_im2 = 0.0;
  for (const HomodyneSample& sample : samples) {
    const double weight = scale * hermite(k + l, sample.value);
    const double re = weight * std::cos(phase_multiple * sample.phase);
    const double im = weight * std::sin(phase_multiple * sample.phase);
    sum_re += re;
    sum_im += im;
    sum_re2 += re * re;
    sum_im2 += im * im;
  }
  const double n = double(samples.size());
  MomentEstimate estimate;
  estimate.count = samples.size();
  estimate.value = {sum_re / n, sum_im / n};
  const double var_re = std::max(0.0, sum_re2 / n - (sum_re / n) * (sum_re / n));
  const double var_im = std::max(0.0, sum_im2 / n - (sum_im / n) * (sum_im / n));
  estimate.std_error_re = std::sqrt(var_re / n);
  estimate.std_error_im = std::sqrt(var_im / n);
  return estimate;
}

}  // namespace mesoent
