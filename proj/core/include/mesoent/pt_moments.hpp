#ifndef MESOENT_PT_MOMENTS_HPP
#define MESOENT_PT_MOMENTS_HPP

#include <string>
#include <variant>
#include <vector>

#include "mesoent/exact.hpp"
#include "mesoent/fock.hpp"
#include "mesoent/noise.hpp"

namespace mesoent {

/// The diagonal even operator family: index t stands for the term
/// a^{2(t-1)} b^{2(t-1)}, so index 1 is the identity. A spec like {1,2,3}
/// selects which terms enter the moment matrix.
struct TensorFunctionSpec {
  std::vector<int> indices;  // nonempty, strictly increasing, >= 1

  explicit TensorFunctionSpec(std::vector<int> idx);
  static TensorFunctionSpec parse(const std::string& text);  // "1,2,3"

  int size() const { return int(indices.size()); }
  int operator_power(int pos) const { return 2 * (indices[pos] - 1); }
  /// Sum of (t-1) over the selected indices; controls the determinant degree
  /// d = 4 * degree_sum and the loss-scaling exponent.
  long degree_sum() const;
  std::string label() const;  // "f_{1,2,3}"
};

/// Moment matrix of the partially transposed state for a tensor-function spec.
/// Entry (a,b) is the moment <a†^k a^l b†^l b^k> with k = 2(t_a - 1),
/// l = 2(t_b - 1); exact rationals under Ideal/ReadoutLoss, high-precision
/// reals under the detector-noise models.
struct MomentMatrix {
  int dim = 0;
  bool transposed = true;  // this artifact only builds M(rho^Gamma)
  std::variant<std::vector<Rational>, std::vector<Real>> entries;  // row-major

  bool is_exact() const { return std::holds_alternative<std::vector<Rational>>(entries); }
  const Rational& exact_at(int a, int b) const;
  Real real_at(int a, int b) const;  // converts when exact
};

/// g(h) = 2^{-(k+l)} sum_{r,i} (-1)^{r+i} C(k,r) C(l,h-r) C(l,i) C(k,h-i),
/// with out-of-range binomials equal to zero.
Rational g_coefficient(int k, int l, int h);

/// Ideal PT moment, exact:
///   sum_{h=0}^{k+l} g(h) * fall(n,h) * fall(m, k+l-h).
Rational pt_moment_ideal(int k, int l, const DetectionRecord& rec);

/// Posterior-averaged PT moment under Stokes detector noise; the double sum
/// over (i,j) factorizes through the posterior falling-factorial moments.
/// Model must be DetectorEfficiency or DetectorGaussian.
Real pt_moment_noisy(int k, int l, const DetectionRecord& rec, const NoiseModel& model,
                     double tail_eps = kDefaultTailEps);

/// Readout-loss PT moment: (sqrt(etaA etaB))^{k+l} times the ideal moment.
/// Exact for the even family (k+l even); odd k+l is rejected.
Rational pt_moment_lossy(int k, int l, const DetectionRecord& rec, const ReadoutLoss& loss);

MomentMatrix build_pt_matrix(const TensorFunctionSpec& spec, const DetectionRecord& rec,
                             const NoiseModel& model, double tail_eps = kDefaultTailEps);

/// Same moment evaluated in the Schrödinger picture by explicit operator
/// action on the conditioned Fock state (loss modes traced out under
/// ReadoutLoss). Independent of the g(h) route; exact. Rejects records with
/// n+m above oracle_bound and models other than Ideal/ReadoutLoss.
Rational schrodinger_oracle_moment(int k, int l, const DetectionRecord& rec,
                                   const NoiseModel& model, int oracle_bound = 60);

/// Entanglement verdict for a PT moment matrix. Exact entries get exact sign
/// analysis (Descartes on the characteristic polynomial, whose coefficients
/// are principal-minor sums); real entries get a symmetric eigendecomposition
/// after congruence scaling to unit diagonal, with a zero threshold of
/// 1e-10 times the scaled matrix norm. Detection also checks every principal
/// minor (all 2^r - 1 of them for r <= 4, leading ones beyond).
struct PTVerdict {
  std::variant<Rational, Real> determinant;
  int negative_eigenvalues = 0;
  bool entangled_detected = false;

  double determinant_value() const;
};

PTVerdict verdict(const MomentMatrix& matrix);

/// Determinant of the f_{1,2} PT matrix at n = m, closed form:
///   -(3/4) n + (11/8) n^2 - (7/4) n^3 + (1/8) n^4.
Rational det_f12_closed_form(long n);

}  // namespace mesoent

#endif  // MESOENT_PT_MOMENTS_HPP
