#ifndef MESOENT_NOISE_HPP
#define MESOENT_NOISE_HPP

#include <string>
#include <variant>
#include <vector>

#include "mesoent/exact.hpp"
#include "mesoent/fock.hpp"

namespace mesoent {

inline constexpr double kDefaultTailEps = 1e-12;

struct Ideal {};

/// Stokes detector quantum efficiencies, in (0, 1].
struct DetectorEfficiency {
  double eta_c = 1.0;
  double eta_d = 1.0;
};

/// Stokes detector additive electronic noise, standard deviations in
/// equivalent-noise-photon-number units ( > 0 ).
struct DetectorGaussian {
  double sigma_c = 1.0;
  double sigma_d = 1.0;
};

/// Anti-Stokes readout/detection losses, modeled as one effective beam
/// splitter per arm with transmission eta = eta_read * eta_detect in [0, 1].
/// Stored as exact rationals so the loss-scaling law of the moment matrices
/// holds exactly for whatever values were configured.
struct ReadoutLoss {
  Rational eta_a = 1;
  Rational eta_b = 1;

  ReadoutLoss() = default;
  ReadoutLoss(double a, double b);
  ReadoutLoss(Rational a, Rational b);
  double eta_a_value() const { return to_double(eta_a); }
  double eta_b_value() const { return to_double(eta_b); }
};

using NoiseModel = std::variant<Ideal, DetectorEfficiency, DetectorGaussian, ReadoutLoss>;

std::string model_label(const NoiseModel& model);

/// Conditional distribution p(i | count) of the true Stokes photon number i
/// given a photoelectron count, truncated and renormalized.
struct ConditionalDistribution {
  int support_offset = 0;          // photon number of weights[0]
  std::vector<double> weights;     // sums to 1 after renormalization
  double truncation_bound = 0.0;   // discarded tail mass before renormalization

  double mean() const;
  /// p(i); 0 outside the stored support.
  double probability(int i) const;
};

/// Negative-binomial posterior for a detector with quantum efficiency eta:
///   p(i|n) = C(i,n) eta^{n+1} (1-eta)^{i-n},  i >= n,
/// truncated once the remaining tail mass is below tail_eps. eta = 0 carries
/// no information and is rejected.
ConditionalDistribution efficiency_posterior(int n, double eta, double tail_eps = kDefaultTailEps);

/// Discretized Gaussian posterior p(i|n) ~ exp(-(i-n)^2 / 2 sigma^2) over
/// integers i >= 0, clipped and renormalized; the window half-width K*sigma is
/// chosen so the discarded mass is below tail_eps.
ConditionalDistribution gaussian_posterior(int n, double sigma, double tail_eps = kDefaultTailEps);

/// Posterior expectations E[ i(i-1)...(i-h+1) ] for h = 0..h_max, evaluated in
/// high precision. These are the only posterior functionals the noisy moment
/// formulas need; Eq.-style double sums factorize through them.
std::vector<Real> efficiency_falling_moments(int n, double eta, int h_max,
                                             double tail_eps = kDefaultTailEps);
std::vector<Real> gaussian_falling_moments(int n, double sigma, int h_max,
                                           double tail_eps = kDefaultTailEps);

/// Effective-BS loss amplitude
///   b_{r,s}^{i,j} = sqrt( C(i,r) C(j,s) etaA^r (1-etaA)^{i-r}
///                                      etaB^s (1-etaB)^{j-s} ),  j = total-i.
/// Rejects r > i or s > total-i.
double loss_amplitude(int i, int total, int r, int s, double eta_a, double eta_b);

/// Distribution of detected anti-Stokes photoelectrons r from cell A after
/// lossy readout/detection, tracing over the loss modes and over cell B
/// (incoherent sum; the unobserved indices are traced, not summed coherently).
std::vector<double> lossy_photoelectron_distribution(const DetectionRecord& rec, double eta_a,
                                                     double eta_b);

/// Marginal anti-Stokes photoelectron distribution under an uncertain Stokes
/// state: p_r = sum_{i,j} p_C(i|n) p_D(j|m) |B_r^{i,j}|^2.
/// Model must be DetectorEfficiency or DetectorGaussian.
double mixed_marginal_distribution(const DetectionRecord& rec, const NoiseModel& model, int r,
                                   double tail_eps = kDefaultTailEps);

/// All r at once (support ends where the posteriors are truncated).
std::vector<double> mixed_marginal_vector(const DetectionRecord& rec, const NoiseModel& model,
                                          double tail_eps = kDefaultTailEps);

}  // namespace mesoent

#endif  // MESOENT_NOISE_HPP
