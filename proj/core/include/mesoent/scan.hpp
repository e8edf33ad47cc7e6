#ifndef MESOENT_SCAN_HPP
#define MESOENT_SCAN_HPP

#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "mesoent/pt_moments.hpp"

namespace mesoent {

struct ScanConfig {
  int n_cap = 600;
  /// Upward diagonal scans stop after this many consecutive non-detections,
  /// counted only once a detection has been seen: with detector noise the
  /// detected window starts well above n = 1, so misses before the first hit
  /// must not abort the scan.
  int early_exit_window = 50;
  double tail_eps = kDefaultTailEps;
};

/// Detected window on the diagonal n = m.
struct DiagonalScanResult {
  int min_n = 0;
  int max_n = 0;
  bool contiguous = true;  // reported, never assumed
};

/// Exhaustive diagonal scan over n = m in [1, n_cap]; nullopt when nothing is
/// detected.
std::optional<DiagonalScanResult> find_max_n(const TensorFunctionSpec& spec,
                                             const NoiseModel& model, const ScanConfig& config = {});

struct RegionCell {
  int n = 0;
  int m = 0;
  bool detected = false;
  double weight = 0.0;  // stokes_joint_probability when alpha given, else 0
};

struct ScanResult {
  TensorFunctionSpec spec;
  std::string model;
  std::optional<int> min_n;  // diagonal window inside the grid
  std::optional<int> max_n;
  std::vector<RegionCell> cells;               // row-major over the grid
  std::set<std::pair<int, int>> region;        // detected (n, m) pairs
  std::optional<double> apriori_probability;   // weighted detected mass, when alpha given
};

/// Verdict for every (n, m) with 0 <= n < n_max, 0 <= m < m_max.
ScanResult region_scan(const TensorFunctionSpec& spec, const NoiseModel& model, int n_max,
                       int m_max, std::optional<double> alpha = std::nullopt,
                       double tail_eps = kDefaultTailEps);

/// A-priori detection probability: the stokes_joint_probability mass carried
/// by the detected region under ideal verdicts, truncated below tail_eps.
double apriori_probability(const TensorFunctionSpec& spec, double alpha,
                           double tail_eps = kDefaultTailEps, int n_cap = 600);

struct SweepPoint {
  double parameter = 0.0;  // eta or sigma
  std::optional<DiagonalScanResult> window;
};

/// MaxN/MinN versus matched detector efficiency eta_C = eta_D.
std::vector<SweepPoint> efficiency_sweep(const TensorFunctionSpec& spec,
                                         const std::vector<double>& eta_grid,
                                         const ScanConfig& config = {});

struct SigmaSweepResult {
  std::vector<SweepPoint> points;
  /// Sigma beyond which no n = m is detected, located by bisection to a grid
  /// step of 0.005 and rounded to 3 decimals; absent when the sweep never
  /// detects anything at all.
  std::optional<double> closure_sigma;
};

/// (MinN, MaxN) versus matched Gaussian detector noise sigma_C = sigma_D.
SigmaSweepResult sigma_sweep(const TensorFunctionSpec& spec, const std::vector<double>& sigma_grid,
                             const ScanConfig& config = {});

}  // namespace mesoent

#endif  // MESOENT_SCAN_HPP
