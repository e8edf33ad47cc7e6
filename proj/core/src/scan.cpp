#include "mesoent/scan.hpp"

#include <cmath>
#include <stdexcept>

namespace mesoent {

namespace {

bool detected(const TensorFunctionSpec& spec, const DetectionRecord& rec, const NoiseModel& model,
              double tail_eps) {
  return verdict(build_pt_matrix(spec, rec, model, tail_eps)).entangled_detected;
}

}  // namespace

std::optional<DiagonalScanResult> find_max_n(const TensorFunctionSpec& spec,
                                             const NoiseModel& model, const ScanConfig& config) {
  if (config.n_cap < 1) throw std::invalid_argument("find_max_n: n_cap must be positive");
  std::optional<DiagonalScanResult> window;
  int misses_since_hit = 0;
  for (int n = 1; n <= config.n_cap; ++n) {
    if (detected(spec, {n, n}, model, config.tail_eps)) {
      if (!window) {
        window = DiagonalScanResult{n, n, true};
      } else {
        if (misses_since_hit > 0) window->contiguous = false;
        window->max_n = n;
      }
      misses_since_hit = 0;
    } else if (window) {
      if (++misses_since_hit >= config.early_exit_window) break;
    }
  }
  return window;
}

ScanResult region_scan(const TensorFunctionSpec& spec, const NoiseModel& model, int n_max,
                       int m_max, std::optional<double> alpha, double tail_eps) {
  if (n_max < 1 || m_max < 1) throw std::invalid_argument("region_scan: grid bounds must be positive");
  ScanResult result{spec, model_label(model), {}, {}, {}, {}, {}};
  result.cells.reserve(std::size_t(n_max) * m_max);

  const bool weighted = alpha.has_value();
  const SqueezingParams params = weighted ? SqueezingParams::symmetric(*alpha) : SqueezingParams{};
  double detected_mass = 0.0;

  for (int n = 0; n < n_max; ++n)
    for (int m = 0; m < m_max; ++m) {
      RegionCell cell{n, m, false, 0.0};
      cell.detected = detected(spec, {n, m}, model, tail_eps);
      if (weighted) cell.weight = stokes_joint_probability(params, {n, m});
      if (cell.detected) {
        result.region.emplace(n, m);
        detected_mass += cell.weight;
        if (n == m) {
          if (!result.min_n) result.min_n = n;
          result.max_n = n;
        }
      }
      result.cells.push_back(cell);
    }
  if (weighted) result.apriori_probability = detected_mass;
  return result;
}

double apriori_probability(const TensorFunctionSpec& spec, double alpha, double tail_eps,
                           int n_cap) {
  if (alpha < 0) throw std::invalid_argument("apriori_probability: alpha must be nonnegative");
  const double t2 = std::tanh(alpha) * std::tanh(alpha);
  const SqueezingParams params = SqueezingParams::symmetric(alpha);

  // Grid size from the geometric tails: mass beyond N per marginal is
  // t2^{N+1}; keep the total discarded mass under tail_eps.
  int grid = 0;
  if (t2 > 0.0) {
    const double needed = std::log(tail_eps / 2.0) / std::log(t2);
    grid = int(std::min(double(n_cap), std::ceil(needed)));
  }

  double mass = 0.0;
  for (int n = 0; n <= grid; ++n)
    for (int m = n; m <= grid; ++m) {  // region and weights are (n,m)-symmetric
      if (!detected(spec, {n, m}, Ideal{}, tail_eps)) continue;
      const double w = stokes_joint_probability(params, {n, m});
      mass += (n == m) ? w : 2.0 * w;
    }
  return mass;
}

std::vector<SweepPoint> efficiency_sweep(const TensorFunctionSpec& spec,
                                         const std::vector<double>& eta_grid,
                                         const ScanConfig& config) {
  std::vector<SweepPoint> points;
  points.reserve(eta_grid.size());
  for (double eta : eta_grid) {
    if (!(eta > 0.0 && eta <= 1.0))
      throw std::invalid_argument("efficiency_sweep: eta grid must lie in (0, 1]");
    points.push_back({eta, find_max_n(spec, DetectorEfficiency{eta, eta}, config)});
  }
  return points;
}

SigmaSweepResult sigma_sweep(const TensorFunctionSpec& spec, const std::vector<double>& sigma_grid,
                             const ScanConfig& config) {
  SigmaSweepResult result;
  result.points.reserve(sigma_grid.size());
  for (double sigma : sigma_grid) {
    if (!(sigma > 0.0)) throw std::invalid_argument("sigma_sweep: sigma grid must be positive");
    result.points.push_back({sigma, find_max_n(spec, DetectorGaussian{sigma, sigma}, config)});
  }

  auto nonempty = [&](double sigma) {
    return find_max_n(spec, DetectorGaussian{sigma, sigma}, config).has_value();
  };

  // Bracket the closure point: last detecting sigma from the sweep (or a tiny
  // default), then grow until detection is lost.
  double lo = 0.0;
  bool have_lo = false;
  double hi = 0.0;
  bool have_hi = false;
  for (const SweepPoint& point : result.points) {
    if (point.window) {
      lo = point.parameter;
      have_lo = true;
    } else if (have_lo && !have_hi) {
      hi = point.parameter;
      have_hi = true;
    }
  }
  if (have_hi && hi <= lo) have_hi = false;  // grid was not monotone in detection
  if (!have_lo) {
    const double probe = sigma_grid.empty() ? 0.05 : sigma_grid.front() / 16.0;
    if (probe > 0.0 && nonempty(probe)) {
      lo = probe;
      have_lo = true;
    } else {
      return result;  // this spec never detects under Gaussian noise
    }
  }
  if (!have_hi) {
    hi = std::max(lo, 0.5);
    do {
      hi *= 2.0;
      if (hi > 1024.0) return result;  // no closure within any plausible range
    } while (nonempty(hi));
    have_hi = true;
  }

  while (hi - lo > 0.005) {
    const double mid = 0.5 * (lo + hi);
    if (nonempty(mid))
      lo = mid;
    else
      hi = mid;
  }
  result.closure_sigma = std::round(0.5 * (lo + hi) * 1000.0) / 1000.0;
  return result;
}

}  // namespace mesoent
