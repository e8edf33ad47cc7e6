#ifndef MESOENT_CORRELATIONS_HPP
#define MESOENT_CORRELATIONS_HPP

#include <optional>

#include "mesoent/fock.hpp"
#include "mesoent/noise.hpp"

namespace mesoent {

/// Conditional photon-number correlation between the two anti-Stokes fields.
/// An absent optional means the correlation is undefined (zero variance, e.g.
/// the record (0,0) or total loss).
struct CorrelationReport {
  double mean_na = 0.0;
  double mean_nb = 0.0;
  double mean_nanb = 0.0;
  double var_na = 0.0;
  double var_nb = 0.0;
  double correlation = 0.0;
};

/// Ideal detection: <nA nB> = (n^2+m^2-n-m)/4, <nA> = (n+m)/2,
/// <nA^2> = (n^2+m^2+4nm+n+m)/4, and C = -1 exactly whenever the variance is
/// nonzero. Evaluated in exact rationals, so the returned -1 is bit-exact.
std::optional<CorrelationReport> ideal_correlation(const DetectionRecord& rec);

/// Uncertain Stokes state (DetectorEfficiency or DetectorGaussian): the
/// conditional moments are averaged over the photon-number posteriors
/// p_C(i|n) p_D(j|m). The reported variances are the posterior-averaged
/// *conditional* variances E[Var(nA | i,j)], and C is the inferred correlation
///   C = E[Cov(nA,nB | i,j)] / sqrt(E[Var(nA|i,j)] E[Var(nB|i,j)]),
/// which equals -1 identically: each conditioned component is perfectly
/// anticorrelated with Var(nA|ij) = Var(nB|ij). (The Pearson correlation of
/// the mixture itself is strictly above -1 for any non-degenerate posterior;
/// what the inference scheme preserves is the conditional anticorrelation.)
std::optional<CorrelationReport> uncertain_stokes_correlation(const DetectionRecord& rec,
                                                              const NoiseModel& model,
                                                              double tail_eps = kDefaultTailEps);

/// Readout loss eta_A = eta_B = eta, closed form: the moments pick up eta
/// factors plus a vacuum-fluctuation term in <nA^2>, and
///   C = -1 / (1 + (2(1-eta)/eta) * (n+m)/(n+m+2nm)).
std::optional<CorrelationReport> lossy_correlation(const DetectionRecord& rec, double eta);

/// Same quantities computed from the state itself: the joint photoelectron
/// distribution built from the conditioned amplitudes and per-arm binomial
/// thinning. Accepts unequal transmissions (exploratory use); with
/// eta_a = eta_b it must agree with the closed forms above.
std::optional<CorrelationReport> schrodinger_correlation(const DetectionRecord& rec, double eta_a,
                                                         double eta_b);

}  // namespace mesoent

#endif  // MESOENT_CORRELATIONS_HPP
