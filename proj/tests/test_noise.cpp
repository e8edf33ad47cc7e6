#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "mesoent/noise.hpp"
#include "test_helpers.hpp"

using namespace mesoent;

namespace {

double weight_sum(const ConditionalDistribution& dist) {
  return std::accumulate(dist.weights.begin(), dist.weights.end(), 0.0);
}

// Independent Bayes oracle: binomial likelihood times a uniform prior over
// i <= prior_cap, normalized directly.
std::vector<double> bayes_posterior(int n, double eta, int prior_cap) {
  std::vector<double> weights(prior_cap + 1, 0.0);
  double total = 0.0;
  for (int i = n; i <= prior_cap; ++i) {
    weights[i] = to_double(binomial(i, n)) * std::pow(eta, n) * std::pow(1.0 - eta, i - n);
    total += weights[i];
  }
  for (double& w : weights) w /= total;
  return weights;
}

// Closed-form negative-binomial falling moments:
//   E[fall(i,h)] = sum_j C(h,j) rise(n+1,j) (q/eta)^j fall(n,h-j).
double nb_falling_moment_closed_form(int n, double eta, int h) {
  const double q = 1.0 - eta;
  double sum = 0.0;
  for (int j = 0; j <= h; ++j) {
    double rise = 1.0;
    for (int t = 0; t < j; ++t) rise *= n + 1 + t;
    sum += to_double(binomial(h, j)) * rise * std::pow(q / eta, j) *
           to_double(falling_factorial(n, h - j));
  }
  return sum;
}

}  // namespace

TEST_CASE("efficiency_posterior: perfect detector and parameter validation") {
  const auto delta = efficiency_posterior(7, 1.0);
  CHECK(delta.support_offset == 7);
  CHECK(delta.weights == std::vector<double>{1.0});
  CHECK(delta.truncation_bound == 0.0);
  CHECK_THROWS_AS(efficiency_posterior(3, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(efficiency_posterior(-1, 0.5), std::invalid_argument);
}

TEST_CASE("negative-binomial normalization identity") {
  // sum_{i>=n} C(i,n) eta^{n+1} (1-eta)^{i-n} = 1
  for (double eta : {0.4, 0.75, 0.9}) {
    for (int n : {0, 3, 10}) {
      double sum = 0.0;
      for (int i = n; i <= n + 2000; ++i)
        sum += to_double(binomial(i, n)) * std::pow(eta, n + 1) * std::pow(1.0 - eta, i - n);
      CHECK(std::abs(sum - 1.0) < 1e-10);
      CHECK(std::abs(weight_sum(efficiency_posterior(n, eta)) - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("efficiency_posterior matches direct Bayesian inversion") {
  const int n = 10;
  const double eta = 0.9;
  const auto posterior = efficiency_posterior(n, eta);
  const auto oracle = bayes_posterior(n, eta, 10 * n);

  double oracle_mean = 0.0;
  int oracle_mode = 0;
  for (int i = 0; i <= 10 * n; ++i) {
    oracle_mean += i * oracle[i];
    if (oracle[i] > oracle[oracle_mode]) oracle_mode = i;
  }
  CHECK(std::abs(posterior.mean() - oracle_mean) < 1e-9);

  int mode = posterior.support_offset;
  for (std::size_t d = 0; d < posterior.weights.size(); ++d)
    if (posterior.weights[d] > posterior.probability(mode)) mode = posterior.support_offset + int(d);
  CHECK(mode == oracle_mode);

  for (int i = n; i <= 3 * n; ++i) CHECK(std::abs(posterior.probability(i) - oracle[i]) < 1e-9);
}

TEST_CASE("efficiency_posterior mean exceeds n unless the detector is perfect") {
  for (int n : {0, 2, 10}) {
    CHECK(efficiency_posterior(n, 1.0).mean() == double(n));
    for (double eta : {0.5, 0.9, 0.99}) CHECK(efficiency_posterior(n, eta).mean() > double(n));
  }
}

TEST_CASE("gaussian_posterior: sharp limit, symmetry, mean") {
  const auto sharp = gaussian_posterior(6, 1e-3);
  CHECK(sharp.probability(6) > 1.0 - 1e-12);

  const auto dist = gaussian_posterior(10, 2.0);
  for (int d = 1; d <= 8; ++d)
    CHECK(dist.probability(10 + d) == doctest::Approx(dist.probability(10 - d)).epsilon(1e-13));

  // n >= 8 sigma: clipping negligible, mean equals n
  CHECK(std::abs(gaussian_posterior(20, 2.0).mean() - 20.0) < 1e-9);
  CHECK_THROWS_AS(gaussian_posterior(5, 0.0), std::invalid_argument);
}

TEST_CASE("posteriors are valid probability vectors") {
  for (const auto& dist :
       {efficiency_posterior(10, 0.9), efficiency_posterior(0, 0.4), gaussian_posterior(10, 2.0),
        gaussian_posterior(2, 5.0)}) {
    CHECK(dist.support_offset >= 0);
    for (double w : dist.weights) CHECK(w >= 0.0);
    CHECK(std::abs(weight_sum(dist) - 1.0) < 1e-12);
    CHECK(dist.truncation_bound < 1e-11);
  }
}

TEST_CASE("falling moments match the truncated-sum and closed-form routes") {
  for (int n : {3, 10})
    for (double eta : {0.5, 0.9}) {
      const auto moments = efficiency_falling_moments(n, eta, 6);
      for (int h = 0; h <= 6; ++h) {
        const double closed = nb_falling_moment_closed_form(n, eta, h);
        CHECK(std::abs(to_double(moments[h]) - closed) <= 1e-12 * std::max(1.0, closed));
      }
    }

  // Gaussian route vs direct double-precision summation.
  const int n = 10;
  const double sigma = 2.0;
  const auto moments = gaussian_falling_moments(n, sigma, 4);
  for (int h = 0; h <= 4; ++h) {
    double direct = 0.0, mass = 0.0;
    for (int i = 0; i <= n + 60; ++i) {
      const double w = std::exp(-0.5 * (i - n) * (i - n) / (sigma * sigma));
      direct += w * to_double(falling_factorial(i, h));
      mass += w;
    }
    direct /= mass;
    CHECK(std::abs(to_double(moments[h]) - direct) <= 1e-10 * std::max(1.0, direct));
  }
}

TEST_CASE("loss_amplitude: lossless, opaque, and binomial normalization") {
  CHECK(loss_amplitude(3, 7, 3, 4, 1.0, 1.0) == 1.0);
  CHECK(loss_amplitude(3, 7, 2, 4, 1.0, 1.0) == 0.0);
  CHECK(loss_amplitude(3, 7, 0, 0, 0.0, 0.0) == 1.0);
  CHECK(loss_amplitude(3, 7, 1, 0, 0.0, 0.0) == 0.0);
  CHECK_THROWS_AS(loss_amplitude(3, 7, 4, 0, 0.5, 0.5), std::invalid_argument);

  for (double eta : {0.3, 0.7})
    for (int i = 0; i <= 10; ++i)
      for (int j = 0; j <= 10; ++j) {
        double norm = 0.0;
        for (int r = 0; r <= i; ++r)
          for (int s = 0; s <= j; ++s) {
            const double b = loss_amplitude(i, i + j, r, s, eta, eta);
            norm += b * b;
          }
        CHECK(std::abs(norm - 1.0) < 1e-12);
      }
}

TEST_CASE("lossy_photoelectron_distribution: lossless limit and mean scaling") {
  const DetectionRecord rec{10, 10};
  const auto lossless = lossy_photoelectron_distribution(rec, 1.0, 1.0);
  const auto ideal = marginal_distribution(conditioned_state(rec));
  REQUIRE(lossless.size() == ideal.size());
  for (std::size_t r = 0; r < ideal.size(); ++r) CHECK(std::abs(lossless[r] - ideal[r]) < 1e-14);

  const auto half = lossy_photoelectron_distribution(rec, 0.5, 0.5);
  double mean = 0.0, sum = 0.0;
  for (std::size_t r = 0; r < half.size(); ++r) {
    mean += double(r) * half[r];
    sum += half[r];
  }
  CHECK(std::abs(sum - 1.0) < 1e-12);
  CHECK(std::abs(mean - 5.0) < 1e-10);  // eta (n+m)/2

  // losses shift the distribution down and wash out the parity zeros
  CHECK(mean < 10.0);
  CHECK(half[9] > 0.0);
}

TEST_CASE("lossy photoelectron mean is eta_A (n+m)/2 across the grid") {
  for (double eta : {0.3, 0.7})
    for (int n = 0; n <= 12; ++n)
      for (int m = 0; m <= 12; ++m) {
        const auto probs = lossy_photoelectron_distribution({n, m}, eta, 0.55);
        double mean = 0.0;
        for (std::size_t r = 0; r < probs.size(); ++r) mean += double(r) * probs[r];
        CHECK(std::abs(mean - eta * (n + m) / 2.0) < 1e-10);
      }
}

TEST_CASE("mixed_marginal_distribution: ideal limit") {
  const DetectionRecord rec{4, 3};
  const NoiseModel perfect = DetectorEfficiency{1.0, 1.0};
  const auto mixed = mixed_marginal_vector(rec, perfect);
  const auto ideal = marginal_distribution(conditioned_state(rec));
  REQUIRE(mixed.size() == ideal.size());
  for (std::size_t r = 0; r < ideal.size(); ++r) CHECK(std::abs(mixed[r] - ideal[r]) < 1e-14);
  CHECK(mixed_marginal_distribution(rec, perfect, 2) == doctest::Approx(ideal[2]).epsilon(1e-13));
}

TEST_CASE("mixed_marginal_distribution: oscillation partially survives eta = 0.9") {
  const auto probs = mixed_marginal_vector({10, 10}, DetectorEfficiency{0.9, 0.9});
  // odd-r suppression persists around the bulk of the distribution
  for (int r = 5; r <= 15; r += 2) {
    CHECK(probs[r] < probs[r - 1]);
    CHECK(probs[r] < probs[r + 1]);
  }
}

TEST_CASE("mixed_marginal_distribution: gaussian noise keeps normalization") {
  const auto probs = mixed_marginal_vector({10, 10}, DetectorGaussian{2.0, 2.0});
  const double sum = std::accumulate(probs.begin(), probs.end(), 0.0);
  CHECK(std::abs(sum - 1.0) < 1e-9);
}

TEST_CASE("mixed marginal is close to ideal at eta = 0.999") {
  const DetectionRecord rec{5, 5};
  const auto near = mixed_marginal_vector(rec, DetectorEfficiency{0.999, 0.999});
  const auto ideal = marginal_distribution(conditioned_state(rec));
  double l1 = 0.0;
  for (std::size_t r = 0; r < near.size(); ++r)
    l1 += std::abs(near[r] - (r < ideal.size() ? ideal[r] : 0.0));
  CHECK(l1 < 0.05);
}

TEST_CASE("model labels") {
  CHECK(model_label(Ideal{}) == "ideal");
  CHECK(model_label(DetectorEfficiency{0.9, 0.8}) == "eff:0.9,0.8");
  CHECK(model_label(DetectorGaussian{2.0, 2.0}) == "gauss:2,2");
  CHECK(model_label(ReadoutLoss{0.5, 0.25}) == "loss:0.5,0.25");
}
