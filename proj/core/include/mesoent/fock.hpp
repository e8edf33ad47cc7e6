#ifndef MESOENT_FOCK_HPP
#define MESOENT_FOCK_HPP

#include <vector>

#include "mesoent/exact.hpp"

namespace mesoent {

/// Squeezing parameters of the two Stokes pump processes. Several derived
/// quantities (tanh/cosh, the Gaussian-state width s = cosh^2 + sinh^2) hang
/// off the same numbers, so they live here.
struct SqueezingParams {
  double alpha = 0.0;
  double beta = 0.0;

  static SqueezingParams symmetric(double a) { return {a, a}; }
  bool is_symmetric() const { return alpha == beta; }
};

/// Photoelectron counts (n, m) registered at the two Stokes detectors.
struct DetectionRecord {
  int n = 0;
  int m = 0;
  int total() const { return n + m; }
};

enum class Cell { A, B };

/// Exact value of a 50:50 beam-splitter Fock matrix element:
///   series * sqrt(radicand) / sqrt(2)^total
/// where `series` is the alternating binomial sum and `radicand` a ratio of
/// factorials. Keeping the pieces separate preserves exact zeros and signs;
/// the alternating sum cancels catastrophically in floating point exactly at
/// the Hong-Ou-Mandel-type zeros that carry the physics.
class BsAmplitude {
 public:
  BsAmplitude() = default;
  BsAmplitude(Integer series, Rational radicand, int total_photons);

  int sign() const;
  bool is_zero() const { return series_ == 0; }
  /// Exact square: series^2 * radicand / 2^total.
  Rational squared() const;
  double value() const;
  void negate() { series_ = -series_; }

  const Integer& series() const { return series_; }
  const Rational& radicand() const { return radicand_; }
  int total_photons() const { return total_; }

 private:
  Integer series_ = 0;
  Rational radicand_ = 0;
  int total_ = 0;
};

/// B_i^{n,m} = <n,m| B |i, n+m-i>: amplitude connecting the two-mode input
/// |i, n+m-i> to detected outputs (n, m) on a 50:50 beam splitter,
///   B_i^{n,m} = sum_k (-1)^{i-k} (1/sqrt 2)^{n+m} C(n,k) C(m,i-k)
///               * sqrt(i!(n+m-i)!/(n!m!)).
/// Rejects i outside [0, n+m].
BsAmplitude bs_coefficient(int n, int m, int i);

/// Joint anti-Stokes state conditioned on a detection record: a real unit
/// vector over |i>_A |N-i>_B with N = n+m. Sign convention: the first nonzero
/// amplitude is positive, so regression values are deterministic.
struct JointFockState {
  int total = 0;
  std::vector<double> amplitudes;  // size total+1
};

/// Exact amplitudes of the conditioned state, amplitudes[i] = B_n^{i, n+m-i},
/// with the sign convention already applied. Unit norm (exactly).
std::vector<BsAmplitude> conditioned_amplitudes(const DetectionRecord& rec);

/// Double-precision view of conditioned_amplitudes().
JointFockState conditioned_state(const DetectionRecord& rec);

/// Per-cell two-mode-squeezed amplitude C_i = (cosh a)^{-1} (tanh a)^i.
double squeezed_amplitude(const SqueezingParams& params, Cell cell, int i);

/// Unnormalized conditioned state built from the squeezed amplitudes, allowing
/// alpha != beta. Cross-check builder only: after normalization and for
/// alpha == beta it reproduces conditioned_state().
std::vector<double> conditioned_state_from_squeezing(const SqueezingParams& params,
                                                     const DetectionRecord& rec);

/// p_i = amplitudes[i]^2.
std::vector<double> marginal_distribution(const JointFockState& state);

/// Probability of registering (n, m) at ideal Stokes detectors for equal
/// squeezing: the product of two geometric laws
///   P(n, m) = P_g(n) P_g(m),  P_g(k) = sech^2(a) tanh^{2k}(a),
/// because two identical thermal marginals are invariant under a 50:50 BS.
double stokes_joint_probability(const SqueezingParams& params, const DetectionRecord& rec);

}  // namespace mesoent

#endif  // MESOENT_FOCK_HPP
