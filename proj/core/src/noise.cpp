#include "mesoent/noise.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace mesoent {

namespace {

void check_tail_eps(double tail_eps) {
  if (!(tail_eps > 0)) throw std::invalid_argument("tail_eps must be positive");
}

Rational rational_from_unit_interval(double x, const char* what) {
  if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument(std::string(what) + " must lie in [0, 1]");
  return Rational(x);
}

std::string format_num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", x);
  return buf;
}

// Binomial pmf C(j, s) eta^s (1-eta)^{j-s}, stable for the sizes used here.
double binomial_pmf(int j, int s, double eta) {
  if (s < 0 || s > j) return 0.0;
  return to_double(binomial(j, s)) * std::pow(eta, s) * std::pow(1.0 - eta, j - s);
}

}  // namespace

ReadoutLoss::ReadoutLoss(double a, double b)
    : eta_a(rational_from_unit_interval(a, "eta_a")), eta_b(rational_from_unit_interval(b, "eta_b")) {}

ReadoutLoss::ReadoutLoss(Rational a, Rational b) : eta_a(std::move(a)), eta_b(std::move(b)) {
  if (eta_a < 0 || eta_a > 1 || eta_b < 0 || eta_b > 1)
    throw std::invalid_argument("ReadoutLoss transmissions must lie in [0, 1]");
}

std::string model_label(const NoiseModel& model) {
  return std::visit(
      [](const auto& m) -> std::string {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Ideal>) return "ideal";
        if constexpr (std::is_same_v<T, DetectorEfficiency>)
          return "eff:" + format_num(m.eta_c) + "," + format_num(m.eta_d);
        if constexpr (std::is_same_v<T, DetectorGaussian>)
          return "gauss:" + format_num(m.sigma_c) + "," + format_num(m.sigma_d);
        if constexpr (std::is_same_v<T, ReadoutLoss>)
          return "loss:" + format_num(to_double(m.eta_a)) + "," + format_num(to_double(m.eta_b));
      },
      model);
}

double ConditionalDistribution::mean() const {
  double mu = 0.0;
  for (std::size_t d = 0; d < weights.size(); ++d) mu += weights[d] * (support_offset + double(d));
  return mu;
}

double ConditionalDistribution::probability(int i) const {
  const long d = long(i) - support_offset;
  if (d < 0 || d >= long(weights.size())) return 0.0;
  return weights[d];
}

ConditionalDistribution efficiency_posterior(int n, double eta, double tail_eps) {
  if (n < 0) throw std::invalid_argument("efficiency_posterior: n must be nonnegative");
  if (!(eta > 0.0 && eta <= 1.0))
    throw std::invalid_argument("efficiency_posterior: eta must lie in (0, 1]; eta = 0 carries no information");
  check_tail_eps(tail_eps);

  ConditionalDistribution dist;
  dist.support_offset = n;
  if (eta == 1.0) {
    dist.weights = {1.0};
    dist.truncation_bound = 0.0;
    return dist;
  }

  // Unnormalized recurrence from w(n) = 1; the true weights are eta^{n+1} times
  // this, so relative truncation bounds carry over unchanged.
  const double q = 1.0 - eta;
  double w = 1.0;
  double sum = 0.0;
  double tail_bound = 0.0;
  long i = n;
  for (;;) {
    dist.weights.push_back(w);
    sum += w;
    const double ratio = q * double(i + 1) / double(i + 1 - n);
    w *= ratio;
    ++i;
    if (ratio < 1.0) {
      tail_bound = w / (1.0 - ratio);
      if (tail_bound < tail_eps * (sum + tail_bound)) break;
    }
    if (i - n > 100000000L) throw std::runtime_error("efficiency_posterior: series failed to converge");
  }
  const double total = sum + tail_bound;
  for (double& x : dist.weights) x /= sum;
  dist.truncation_bound = tail_bound / total;
  return dist;
}

ConditionalDistribution gaussian_posterior(int n, double sigma, double tail_eps) {
  if (n < 0) throw std::invalid_argument("gaussian_posterior: n must be nonnegative");
  if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_posterior: sigma must be positive");
  check_tail_eps(tail_eps);

  const double k_width = std::sqrt(2.0 * std::log(1.0 / tail_eps)) + 2.0;
  const long half_width = long(std::ceil(k_width * sigma));
  const long lo = std::max(0L, long(n) - half_width);
  const long hi = long(n) + half_width;

  ConditionalDistribution dist;
  dist.support_offset = int(lo);
  dist.weights.resize(hi - lo + 1);
  double sum = 0.0;
  for (long i = lo; i <= hi; ++i) {
    const double d = double(i - n);
    const double w = std::exp(-d * d / (2.0 * sigma * sigma));
    dist.weights[i - lo] = w;
    sum += w;
  }
  // Discarded mass beyond the window, relative to the kept mass.
  const double r_step = std::exp(-(2.0 * double(half_width) + 1.0) / (2.0 * sigma * sigma));
  const double edge = std::exp(-double(half_width + 1) * double(half_width + 1) / (2.0 * sigma * sigma));
  const double tail = 2.0 * edge / std::max(1.0 - r_step, 1e-300);
  for (double& x : dist.weights) x /= sum;
  dist.truncation_bound = tail / (sum + tail);
  return dist;
}

std::vector<Real> efficiency_falling_moments(int n, double eta, int h_max, double tail_eps) {
  if (n < 0 || h_max < 0) throw std::invalid_argument("efficiency_falling_moments: bad arguments");
  if (!(eta > 0.0 && eta <= 1.0))
    throw std::invalid_argument("efficiency_falling_moments: eta must lie in (0, 1]");
  check_tail_eps(tail_eps);

  std::vector<Real> moments(h_max + 1, Real(0));
  if (eta == 1.0) {  // delta posterior at i = n
    Real f = 1;
    for (int h = 0; h <= h_max; ++h) {
      moments[h] = f;
      f *= Real(n - h);
    }
    return moments;
  }

  const Real q = Real(1) - Real(eta);
  Real w = 1;
  Real mass = 0;
  long i = n;
  for (;;) {
    Real f = 1;
    for (int h = 0; h <= h_max; ++h) {
      moments[h] += w * f;
      f *= Real(i - h);
    }
    mass += w;

    const Real ratio = q * Real(i + 1) / Real(i + 1 - n);
    const Real next_w = w * ratio;
    // Growth bound for the heaviest moment term: fall(i+1,h)/fall(i,h) <= (i+1)/(i+1-h).
    Real term_ratio = ratio;
    if (i + 1 > h_max) term_ratio = ratio * Real(i + 1) / Real(i + 1 - h_max);
    if (term_ratio < Real(0.995)) {
      Real next_top_term = next_w;  // next_w * fall(i+1, h_max)
      for (int t = 0; t < h_max; ++t) next_top_term *= Real(i + 1 - t);
      const Real mom_tail = next_top_term / (Real(1) - term_ratio);
      const Real mass_tail = next_w / (Real(1) - ratio);
      if (mom_tail < Real(tail_eps) * (moments[h_max] + mass) && mass_tail < Real(tail_eps) * mass)
        break;
    }
    w = next_w;
    ++i;
    if (i - n > 10000000L) throw std::runtime_error("efficiency_falling_moments: failed to converge");
  }
  for (Real& mh : moments) mh /= mass;
  return moments;
}

std::vector<Real> gaussian_falling_moments(int n, double sigma, int h_max, double tail_eps) {
  if (n < 0 || h_max < 0) throw std::invalid_argument("gaussian_falling_moments: bad arguments");
  if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_falling_moments: sigma must be positive");
  check_tail_eps(tail_eps);

  const double k_width = std::sqrt(2.0 * std::log(1.0 / tail_eps)) + 2.0;
  const long half_width = long(std::ceil(k_width * sigma));
  const long lo = std::max(0L, long(n) - half_width);
  const long hi = long(n) + half_width;

  std::vector<Real> moments(h_max + 1, Real(0));
  Real mass = 0;
  const Real r_step = exp(Real(-1) / (Real(2) * Real(sigma) * Real(sigma)));
  const Real r_step_sq = r_step * r_step;
  auto accumulate = [&](long i, const Real& w) {
    Real f = 1;
    for (int h = 0; h <= h_max; ++h) {
      moments[h] += w * f;
      f *= Real(i - h);
    }
    mass += w;
  };
  // Walk outward from the peak, updating e^{-(d+1)^2 c} = e^{-d^2 c} r^{2d+1}
  // incrementally instead of calling exp per term.
  accumulate(n, Real(1));
  Real w_up = 1, step_up = r_step;
  for (long i = n + 1; i <= hi; ++i) {
    w_up *= step_up;
    step_up *= r_step_sq;
    accumulate(i, w_up);
  }
  Real w_down = 1, step_down = r_step;
  for (long i = n - 1; i >= lo; --i) {
    w_down *= step_down;
    step_down *= r_step_sq;
    accumulate(i, w_down);
  }
  for (Real& mh : moments) mh /= mass;
  return moments;
}

double loss_amplitude(int i, int total, int r, int s, double eta_a, double eta_b) {
  if (i < 0 || total < i) throw std::invalid_argument("loss_amplitude: need 0 <= i <= total");
  const int j = total - i;
  if (r < 0 || r > i || s < 0 || s > j)
    throw std::invalid_argument("loss_amplitude: need r <= i and s <= total - i");
  if (!(eta_a >= 0 && eta_a <= 1 && eta_b >= 0 && eta_b <= 1))
    throw std::invalid_argument("loss_amplitude: transmissions must lie in [0, 1]");
  const double squared = to_double(binomial(i, r)) * to_double(binomial(j, s)) *
                         std::pow(eta_a, r) * std::pow(1.0 - eta_a, i - r) * std::pow(eta_b, s) *
                         std::pow(1.0 - eta_b, j - s);
  return std::sqrt(squared);
}

std::vector<double> lossy_photoelectron_distribution(const DetectionRecord& rec, double eta_a,
                                                     double eta_b) {
  if (!(eta_a >= 0 && eta_a <= 1 && eta_b >= 0 && eta_b <= 1))
    throw std::invalid_argument("lossy_photoelectron_distribution: transmissions must lie in [0, 1]");
  (void)eta_b;  // tracing cell B removes its loss parameter from the A marginal
  const int total = rec.total();
  const auto amps = conditioned_amplitudes(rec);
  std::vector<double> probs(total + 1, 0.0);
  for (int i = 0; i <= total; ++i) {
    if (amps[i].is_zero()) continue;
    const double p_i = to_double(amps[i].squared());
    for (int r = 0; r <= i; ++r) probs[r] += p_i * binomial_pmf(i, r, eta_a);
  }
  return probs;
}

namespace {

ConditionalDistribution posterior_for(const NoiseModel& model, int count, bool first,
                                      double tail_eps) {
  if (const auto* eff = std::get_if<DetectorEfficiency>(&model))
    return efficiency_posterior(count, first ? eff->eta_c : eff->eta_d, tail_eps);
  if (const auto* gauss = std::get_if<DetectorGaussian>(&model))
    return gaussian_posterior(count, first ? gauss->sigma_c : gauss->sigma_d, tail_eps);
  throw std::invalid_argument("mixed marginal requires a DetectorEfficiency or DetectorGaussian model");
}

}  // namespace

std::vector<double> mixed_marginal_vector(const DetectionRecord& rec, const NoiseModel& model,
                                          double tail_eps) {
  const ConditionalDistribution p_c = posterior_for(model, rec.n, true, tail_eps);
  const ConditionalDistribution p_d = posterior_for(model, rec.m, false, tail_eps);

  const int i_hi = p_c.support_offset + int(p_c.weights.size()) - 1;
  const int j_hi = p_d.support_offset + int(p_d.weights.size()) - 1;
  std::vector<double> probs(i_hi + j_hi + 1, 0.0);

  for (std::size_t a = 0; a < p_c.weights.size(); ++a) {
    const int i = p_c.support_offset + int(a);
    for (std::size_t b = 0; b < p_d.weights.size(); ++b) {
      const int j = p_d.support_offset + int(b);
      const double weight = p_c.weights[a] * p_d.weights[b];
      if (weight == 0.0) continue;
      const auto amps = conditioned_amplitudes({i, j});
      for (int r = 0; r <= i + j; ++r) {
        if (amps[r].is_zero()) continue;
        probs[r] += weight * to_double(amps[r].squared());
      }
    }
  }
  return probs;
}

double mixed_marginal_distribution(const DetectionRecord& rec, const NoiseModel& model, int r,
                                   double tail_eps) {
  if (r < 0) return 0.0;
  const auto probs = mixed_marginal_vector(rec, model, tail_eps);
  return r < int(probs.size()) ? probs[r] : 0.0;
}

}  // namespace mesoent
