#include "mesoent/fock.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mesoent {

BsAmplitude::BsAmplitude(Integer series, Rational radicand, int total_photons)
    : series_(std::move(series)), radicand_(std::move(radicand)), total_(total_photons) {
  if (radicand_ < 0) throw std::invalid_argument("BsAmplitude: radicand must be nonnegative");
}

int BsAmplitude::sign() const {
  if (series_ == 0) return 0;
  return series_ < 0 ? -1 : 1;
}

Rational BsAmplitude::squared() const {
  Rational sq(series_ * series_);
  sq *= radicand_;
  Integer two_pow = Integer(1) << total_;
  return sq / Rational(two_pow);
}

double BsAmplitude::value() const {
  if (series_ == 0) return 0.0;
  double magnitude = std::sqrt(to_double(squared()));
  return sign() < 0 ? -magnitude : magnitude;
}

BsAmplitude bs_coefficient(int n, int m, int i) {
  if (n < 0 || m < 0) throw std::invalid_argument("bs_coefficient: n, m must be nonnegative");
  const int total = n + m;
  if (i < 0 || i > total) throw std::invalid_argument("bs_coefficient: i must lie in [0, n+m]");
  const int j = total - i;

  Integer series = 0;
  const int k_lo = std::max(0, i - m);
  const int k_hi = std::min(i, n);
  for (int k = k_lo; k <= k_hi; ++k) {
    Integer term = binomial(n, k) * binomial(m, i - k);
    if ((i - k) % 2 != 0) term = -term;
    series += term;
  }

  Rational radicand(factorial(i) * factorial(j), factorial(n) * factorial(m));
  return BsAmplitude(std::move(series), std::move(radicand), total);
}

std::vector<BsAmplitude> conditioned_amplitudes(const DetectionRecord& rec) {
  if (rec.n < 0 || rec.m < 0)
    throw std::invalid_argument("conditioned_amplitudes: counts must be nonnegative");
  const int total = rec.total();
  std::vector<BsAmplitude> amps;
  amps.reserve(total + 1);
  for (int i = 0; i <= total; ++i) amps.push_back(bs_coefficient(i, total - i, rec.n));

  // Fix the global sign: first nonzero amplitude positive.
  for (const BsAmplitude& a : amps) {
    if (a.is_zero()) continue;
    if (a.sign() < 0)
      for (BsAmplitude& b : amps) b.negate();
    break;
  }
  return amps;
}

JointFockState conditioned_state(const DetectionRecord& rec) {
  JointFockState state;
  state.total = rec.total();
  const auto exact = conditioned_amplitudes(rec);
  state.amplitudes.reserve(exact.size());
  for (const BsAmplitude& a : exact) state.amplitudes.push_back(a.value());
  return state;
}

double squeezed_amplitude(const SqueezingParams& params, Cell cell, int i) {
  if (i < 0) throw std::invalid_argument("squeezed_amplitude: i must be nonnegative");
  const double a = cell == Cell::A ? params.alpha : params.beta;
  if (a < 0) throw std::invalid_argument("squeezed_amplitude: squeezing must be nonnegative");
  return std::pow(std::tanh(a), i) / std::cosh(a);
}

std::vector<double> conditioned_state_from_squeezing(const SqueezingParams& params,
                                                     const DetectionRecord& rec) {
  const int total = rec.total();
  std::vector<double> amps(total + 1);
  for (int i = 0; i <= total; ++i) {
    const double weight =
        squeezed_amplitude(params, Cell::A, i) * squeezed_amplitude(params, Cell::B, total - i);
    amps[i] = weight * bs_coefficient(i, total - i, rec.n).value();
  }
  return amps;
}

std::vector<double> marginal_distribution(const JointFockState& state) {
  std::vector<double> probs(state.amplitudes.size());
  for (std::size_t i = 0; i < probs.size(); ++i) probs[i] = state.amplitudes[i] * state.amplitudes[i];
  return probs;
}

double stokes_joint_probability(const SqueezingParams& params, const DetectionRecord& rec) {
  if (!params.is_symmetric())
    throw std::invalid_argument("stokes_joint_probability: requires alpha == beta");
  if (rec.n < 0 || rec.m < 0)
    throw std::invalid_argument("stokes_joint_probability: counts must be nonnegative");
  const double t2 = std::tanh(params.alpha) * std::tanh(params.alpha);
  const double sech2 = 1.0 - t2;
  auto geometric = [&](int k) { return sech2 * std::pow(t2, k); };
  return geometric(rec.n) * geometric(rec.m);
}

}  // namespace mesoent
