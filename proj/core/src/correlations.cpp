#include "mesoent/correlations.hpp"

#include <cmath>
#include <stdexcept>

namespace mesoent {

namespace {

double binomial_pmf(int j, int s, double eta) {
  if (s < 0 || s > j) return 0.0;
  return to_double(binomial(j, s)) * std::pow(eta, s) * std::pow(1.0 - eta, j - s);
}

}  // namespace

std::optional<CorrelationReport> ideal_correlation(const DetectionRecord& rec) {
  if (rec.n < 0 || rec.m < 0) throw std::invalid_argument("ideal_correlation: counts must be nonnegative");
  const Integer n(rec.n), m(rec.m);
  const Rational mean = Rational(n + m) / 2;
  const Rational nanb = Rational(n * n + m * m - n - m) / 4;
  const Rational na2 = Rational(n * n + m * m + 4 * n * m + n + m) / 4;
  const Rational var = na2 - mean * mean;   // (2nm + n + m)/4
  const Rational cov = nanb - mean * mean;  // equals -var

  CorrelationReport report;
  report.mean_na = report.mean_nb = to_double(mean);
  report.mean_nanb = to_double(nanb);
  report.var_na = report.var_nb = to_double(var);
  if (var == 0) return std::nullopt;
  report.correlation = to_double(cov / var);
  return report;
}

std::optional<CorrelationReport> uncertain_stokes_correlation(const DetectionRecord& rec,
                                                              const NoiseModel& model,
                                                              double tail_eps) {
  std::vector<Real> mom_c, mom_d;
  if (const auto* eff = std::get_if<DetectorEfficiency>(&model)) {
    mom_c = efficiency_falling_moments(rec.n, eff->eta_c, 2, tail_eps);
    mom_d = efficiency_falling_moments(rec.m, eff->eta_d, 2, tail_eps);
  } else if (const auto* gauss = std::get_if<DetectorGaussian>(&model)) {
    mom_c = gaussian_falling_moments(rec.n, gauss->sigma_c, 2, tail_eps);
    mom_d = gaussian_falling_moments(rec.m, gauss->sigma_d, 2, tail_eps);
  } else {
    throw std::invalid_argument(
        "uncertain_stokes_correlation: model must be DetectorEfficiency or DetectorGaussian");
  }
  const Real ei = mom_c[1], ej = mom_d[1];
  const Real ei2 = mom_c[2] + mom_c[1];  // i^2 = fall(i,2) + fall(i,1)
  const Real ej2 = mom_d[2] + mom_d[1];

  const Real mean = (ei + ej) / 2;
  const Real nanb = (ei2 + ej2 - ei - ej) / 4;
  // Posterior averages of the conditional (per-(i,j)) second moments.
  const Real pooled_var = (ei + ej + 2 * ei * ej) / 4;          // E[Var(nA | i,j)]
  const Real pooled_meansq = (ei2 + ej2 + 2 * ei * ej) / 4;     // E[<nA><nB> | i,j]
  const Real pooled_cov = nanb - pooled_meansq;                 // E[Cov(nA,nB | i,j)]

  CorrelationReport report;
  report.mean_na = report.mean_nb = to_double(mean);
  report.mean_nanb = to_double(nanb);
  report.var_na = report.var_nb = to_double(pooled_var);
  if (pooled_var == 0) return std::nullopt;
  report.correlation = to_double(pooled_cov / pooled_var);
  return report;
}

std::optional<CorrelationReport> lossy_correlation(const DetectionRecord& rec, double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw std::invalid_argument("lossy_correlation: eta must lie in [0, 1]");
  const double n = rec.n, m = rec.m;
  const double mean = 0.5 * eta * (n + m);
  const double nanb = 0.25 * eta * eta * (n * n + m * m - n - m);
  const double na2 = 0.25 * eta * eta * (n * n + m * m + 4 * n * m + n + m) +
                     0.5 * eta * (1.0 - eta) * (n + m);
  const double var = na2 - mean * mean;

  CorrelationReport report;
  report.mean_na = report.mean_nb = mean;
  report.mean_nanb = nanb;
  report.var_na = report.var_nb = var;
  if (eta == 0.0 || var == 0.0) return std::nullopt;
  report.correlation = (nanb - mean * mean) / var;
  return report;
}

std::optional<CorrelationReport> schrodinger_correlation(const DetectionRecord& rec, double eta_a,
                                                         double eta_b) {
  if (!(eta_a >= 0 && eta_a <= 1 && eta_b >= 0 && eta_b <= 1))
    throw std::invalid_argument("schrodinger_correlation: transmissions must lie in [0, 1]");
  const int total = rec.total();
  const auto amps = conditioned_amplitudes(rec);

  double mean_a = 0, mean_b = 0, mean_ab = 0, mean_a2 = 0, mean_b2 = 0;
  for (int i = 0; i <= total; ++i) {
    if (amps[i].is_zero()) continue;
    const double p_i = to_double(amps[i].squared());
    const int j = total - i;
    // Binomial thinning per arm; given (i, j) the two arms are independent.
    double ea = 0, ea2 = 0, eb = 0, eb2 = 0;
    for (int r = 0; r <= i; ++r) {
      const double w = binomial_pmf(i, r, eta_a);
      ea += w * r;
      ea2 += w * r * r;
    }
    for (int s = 0; s <= j; ++s) {
      const double w = binomial_pmf(j, s, eta_b);
      eb += w * s;
      eb2 += w * s * s;
    }
    mean_a += p_i * ea;
    mean_b += p_i * eb;
    mean_ab += p_i * ea * eb;
    mean_a2 += p_i * ea2;
    mean_b2 += p_i * eb2;
  }

  CorrelationReport report;
  report.mean_na = mean_a;
  report.mean_nb = mean_b;
  report.mean_nanb = mean_ab;
  report.var_na = mean_a2 - mean_a * mean_a;
  report.var_nb = mean_b2 - mean_b * mean_b;
  if (report.var_na <= 0.0 || report.var_nb <= 0.0) return std::nullopt;
  report.correlation =
      (mean_ab - mean_a * mean_b) / std::sqrt(report.var_na * report.var_nb);
  return report;
}

}  // namespace mesoent
