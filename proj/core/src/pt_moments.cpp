#include "mesoent/pt_moments.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>

namespace mesoent {

namespace {

Rational rational_pow(Rational base, long exp) {
  if (exp < 0) return Rational(1) / rational_pow(std::move(base), -exp);
  Rational result = 1;
  while (exp) {
    if (exp & 1) result *= base;
    base *= base;
    exp >>= 1;
  }
  return result;
}

// 2^{k+l} g(h) is an integer; cache rows since scans reuse the same (k, l)
// pairs tens of thousands of times. Synchronized: scans may run concurrently.
const std::vector<Integer>& g_integer_row(int k, int l) {
  static std::map<std::pair<int, int>, std::vector<Integer>> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto [it, inserted] = cache.try_emplace({k, l});
  if (inserted) {
    std::vector<Integer>& row = it->second;
    row.resize(k + l + 1);
    for (int h = 0; h <= k + l; ++h) {
      Integer sum = 0;
      for (int r = 0; r <= k; ++r) {
        const Integer left = binomial(k, r) * binomial(l, h - r);
        if (left == 0) continue;
        for (int i = 0; i <= l; ++i) {
          const Integer right = binomial(l, i) * binomial(k, h - i);
          if (right == 0) continue;
          if ((r + i) % 2 != 0)
            sum -= left * right;
          else
            sum += left * right;
        }
      }
      row[h] = std::move(sum);
    }
  }
  return it->second;
}

template <typename T>
T det_laplace(const std::vector<T>& a, int k) {
  if (k == 0) return T(1);
  if (k == 1) return a[0];
  if (k == 2) return a[0] * a[3] - a[1] * a[2];
  T sum(0);
  std::vector<T> minor((k - 1) * (k - 1));
  for (int c = 0; c < k; ++c) {
    if (a[c] == 0) continue;
    int idx = 0;
    for (int r = 1; r < k; ++r)
      for (int cc = 0; cc < k; ++cc)
        if (cc != c) minor[idx++] = a[r * k + cc];
    const T term = a[c] * det_laplace(minor, k - 1);
    if (c % 2 != 0)
      sum -= term;
    else
      sum += term;
  }
  return sum;
}

template <typename T>
T principal_minor(const std::vector<T>& m, int dim, const std::vector<int>& subset) {
  const int k = int(subset.size());
  std::vector<T> sub(k * k);
  for (int r = 0; r < k; ++r)
    for (int c = 0; c < k; ++c) sub[r * k + c] = m[subset[r] * dim + subset[c]];
  return det_laplace(sub, k);
}

std::vector<std::vector<int>> all_index_subsets(int dim) {
  std::vector<std::vector<int>> subsets;
  for (unsigned mask = 1; mask < (1u << dim); ++mask) {
    std::vector<int> subset;
    for (int b = 0; b < dim; ++b)
      if (mask & (1u << b)) subset.push_back(b);
    subsets.push_back(std::move(subset));
  }
  return subsets;
}

// Number of sign variations in a coefficient sequence, zeros skipped. For
// det(xI + M) = sum e_k x^{r-k} with all-real roots this counts the positive
// roots exactly, i.e. the negative eigenvalues of M.
int sign_variations(const std::vector<int>& signs) {
  int variations = 0;
  int last = 0;
  for (int s : signs) {
    if (s == 0) continue;
    if (last != 0 && s != last) ++variations;
    last = s;
  }
  return variations;
}

// Faddeev-LeVerrier: elementary symmetric functions e_1..e_r of the
// eigenvalues, exact. Used when dim > 4 (all-subset minors get costly).
std::vector<Rational> elementary_symmetric_fl(const std::vector<Rational>& m, int dim) {
  std::vector<Rational> e(dim + 1);
  e[0] = 1;
  std::vector<Rational> mk = m;  // M_k = M * B_{k-1}
  for (int k = 1; k <= dim; ++k) {
    Rational trace = 0;
    for (int i = 0; i < dim; ++i) trace += mk[i * dim + i];
    e[k] = trace / k;
    if (k == dim) break;
    std::vector<Rational> b = mk;  // B_k = M_k - e_k I
    for (int i = 0; i < dim; ++i) b[i * dim + i] -= e[k];
    std::vector<Rational> next(dim * dim, Rational(0));
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) {
        Rational acc = 0;
        for (int t = 0; t < dim; ++t) acc += m[i * dim + t] * b[t * dim + j];
        next[i * dim + j] = std::move(acc);
      }
    mk = std::move(next);
  }
  return e;
}

// Cyclic Jacobi eigenvalues for a symmetric matrix in high precision.
std::vector<Real> jacobi_eigenvalues(std::vector<Real> a, int n) {
  using std::abs;
  using std::sqrt;
  Real scale = 0;
  for (int i = 0; i < n * n; ++i) scale += a[i] * a[i];
  scale = sqrt(scale);
  if (scale == 0) return std::vector<Real>(n, Real(0));
  const Real stop = scale * Real(1e-45);

  for (int sweep = 0; sweep < 100; ++sweep) {
    Real off = 0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += a[p * n + q] * a[p * n + q];
    if (sqrt(Real(2) * off) < stop) break;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) {
        const Real apq = a[p * n + q];
        if (abs(apq) * Real(1e60) < scale) continue;
        const Real theta = (a[q * n + q] - a[p * n + p]) / (Real(2) * apq);
        Real t = Real(1) / (abs(theta) + sqrt(theta * theta + Real(1)));
        if (theta < 0) t = -t;
        const Real c = Real(1) / sqrt(t * t + Real(1));
        const Real s = t * c;
        const Real tau = s / (Real(1) + c);

        const Real app = a[p * n + p], aqq = a[q * n + q];
        a[p * n + p] = app - t * apq;
        a[q * n + q] = aqq + t * apq;
        a[p * n + q] = a[q * n + p] = 0;
        for (int i = 0; i < n; ++i) {
          if (i == p || i == q) continue;
          const Real aip = a[i * n + p], aiq = a[i * n + q];
          a[i * n + p] = a[p * n + i] = aip - s * (aiq + tau * aip);
          a[i * n + q] = a[q * n + i] = aiq + s * (aip - tau * aiq);
        }
      }
  }
  std::vector<Real> eigenvalues(n);
  for (int i = 0; i < n; ++i) eigenvalues[i] = a[i * n + i];
  return eigenvalues;
}

Real lu_determinant(std::vector<Real> a, int n) {
  using std::abs;
  Real det = 1;
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r)
      if (abs(a[r * n + col]) > abs(a[pivot * n + col])) pivot = r;
    if (a[pivot * n + col] == 0) return Real(0);
    if (pivot != col) {
      for (int c = 0; c < n; ++c) std::swap(a[pivot * n + c], a[col * n + c]);
      det = -det;
    }
    det *= a[col * n + col];
    for (int r = col + 1; r < n; ++r) {
      const Real factor = a[r * n + col] / a[col * n + col];
      for (int c = col; c < n; ++c) a[r * n + c] -= factor * a[col * n + c];
    }
  }
  return det;
}

}  // namespace

TensorFunctionSpec::TensorFunctionSpec(std::vector<int> idx) : indices(std::move(idx)) {
  if (indices.empty()) throw std::invalid_argument("TensorFunctionSpec: at least one index required");
  int prev = 0;
  for (int t : indices) {
    if (t < 1) throw std::invalid_argument("TensorFunctionSpec: indices must be positive");
    if (t <= prev) throw std::invalid_argument("TensorFunctionSpec: indices must be strictly increasing");
    prev = t;
  }
}

TensorFunctionSpec TensorFunctionSpec::parse(const std::string& text) {
  std::vector<int> idx;
  std::stringstream stream(text);
  std::string piece;
  while (std::getline(stream, piece, ',')) {
    if (piece.empty()) continue;
    std::size_t used = 0;
    const int value = std::stoi(piece, &used);
    if (used != piece.size()) throw std::invalid_argument("TensorFunctionSpec: bad index '" + piece + "'");
    idx.push_back(value);
  }
  return TensorFunctionSpec(std::move(idx));
}

long TensorFunctionSpec::degree_sum() const {
  long sum = 0;
  for (int t : indices) sum += t - 1;
  return sum;
}

std::string TensorFunctionSpec::label() const {
  std::string text = "f_{";
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (i) text += ',';
    text += std::to_string(indices[i]);
  }
  text += '}';
  return text;
}

const Rational& MomentMatrix::exact_at(int a, int b) const {
  return std::get<std::vector<Rational>>(entries)[a * dim + b];
}

Real MomentMatrix::real_at(int a, int b) const {
  if (is_exact()) return to_real(exact_at(a, b));
  return std::get<std::vector<Real>>(entries)[a * dim + b];
}

Rational g_coefficient(int k, int l, int h) {
  if (k < 0 || l < 0 || h < 0 || h > k + l)
    throw std::invalid_argument("g_coefficient: need 0 <= h <= k+l and k, l >= 0");
  return Rational(g_integer_row(k, l)[h], Integer(1) << (k + l));
}

Rational pt_moment_ideal(int k, int l, const DetectionRecord& rec) {
  if (k < 0 || l < 0) throw std::invalid_argument("pt_moment_ideal: powers must be nonnegative");
  const auto& g = g_integer_row(k, l);
  Integer acc = 0;
  for (int h = 0; h <= k + l; ++h) {
    if (g[h] == 0) continue;
    acc += g[h] * falling_factorial(rec.n, h) * falling_factorial(rec.m, k + l - h);
  }
  return Rational(acc, Integer(1) << (k + l));
}

namespace {

std::pair<std::vector<Real>, std::vector<Real>> posterior_moment_pair(const DetectionRecord& rec,
                                                                      const NoiseModel& model,
                                                                      int h_max, double tail_eps) {
  if (const auto* eff = std::get_if<DetectorEfficiency>(&model))
    return {efficiency_falling_moments(rec.n, eff->eta_c, h_max, tail_eps),
            efficiency_falling_moments(rec.m, eff->eta_d, h_max, tail_eps)};
  if (const auto* gauss = std::get_if<DetectorGaussian>(&model))
    return {gaussian_falling_moments(rec.n, gauss->sigma_c, h_max, tail_eps),
            gaussian_falling_moments(rec.m, gauss->sigma_d, h_max, tail_eps)};
  throw std::invalid_argument("pt_moment_noisy: model must be DetectorEfficiency or DetectorGaussian");
}

Real noisy_moment_from(const std::vector<Real>& ec, const std::vector<Real>& ed, int k, int l) {
  const auto& g = g_integer_row(k, l);
  const Real scale = Real(1) / to_real(Rational(Integer(1) << (k + l)));
  Real sum = 0;
  for (int h = 0; h <= k + l; ++h) {
    if (g[h] == 0) continue;
    sum += to_real(Rational(g[h])) * ec[h] * ed[k + l - h];
  }
  return sum * scale;
}

}  // namespace

Real pt_moment_noisy(int k, int l, const DetectionRecord& rec, const NoiseModel& model,
                     double tail_eps) {
  if (k < 0 || l < 0) throw std::invalid_argument("pt_moment_noisy: powers must be nonnegative");
  auto [ec, ed] = posterior_moment_pair(rec, model, k + l, tail_eps);
  return noisy_moment_from(ec, ed, k, l);
}

Rational pt_moment_lossy(int k, int l, const DetectionRecord& rec, const ReadoutLoss& loss) {
  if (k < 0 || l < 0) throw std::invalid_argument("pt_moment_lossy: powers must be nonnegative");
  if ((k + l) % 2 != 0)
    throw std::invalid_argument("pt_moment_lossy: k+l must be even (diagonal even family)");
  return rational_pow(loss.eta_a * loss.eta_b, (k + l) / 2) * pt_moment_ideal(k, l, rec);
}

MomentMatrix build_pt_matrix(const TensorFunctionSpec& spec, const DetectionRecord& rec,
                             const NoiseModel& model, double tail_eps) {
  const int r = spec.size();
  MomentMatrix matrix;
  matrix.dim = r;

  if (std::holds_alternative<Ideal>(model) || std::holds_alternative<ReadoutLoss>(model)) {
    std::vector<Rational> entries(r * r);
    for (int a = 0; a < r; ++a)
      for (int b = a; b < r; ++b) {
        const int k = spec.operator_power(a), l = spec.operator_power(b);
        Rational value = std::holds_alternative<Ideal>(model)
                             ? pt_moment_ideal(k, l, rec)
                             : pt_moment_lossy(k, l, rec, std::get<ReadoutLoss>(model));
        entries[b * r + a] = value;
        entries[a * r + b] = std::move(value);
      }
    matrix.entries = std::move(entries);
    return matrix;
  }

  const int h_max = 2 * spec.operator_power(r - 1);
  auto [ec, ed] = posterior_moment_pair(rec, model, h_max, tail_eps);
  std::vector<Real> entries(r * r);
  for (int a = 0; a < r; ++a)
    for (int b = a; b < r; ++b) {
      const int k = spec.operator_power(a), l = spec.operator_power(b);
      const Real value = noisy_moment_from(ec, ed, k, l);
      entries[b * r + a] = value;
      entries[a * r + b] = value;
    }
  matrix.entries = std::move(entries);
  return matrix;
}

Rational schrodinger_oracle_moment(int k, int l, const DetectionRecord& rec,
                                   const NoiseModel& model, int oracle_bound) {
  if (k < 0 || l < 0)
    throw std::invalid_argument("schrodinger_oracle_moment: powers must be nonnegative");
  const int total = rec.total();
  if (total > oracle_bound)
    throw std::domain_error("schrodinger_oracle_moment: n+m exceeds the oracle bound");

  const auto amps = conditioned_amplitudes(rec);
  const Integer record_fact = factorial(rec.n) * factorial(rec.m);
  const Integer two_pow = Integer(1) << total;

  if (std::holds_alternative<Ideal>(model)) {
    Rational sum = 0;
    for (int i = l; i <= total; ++i) {
      const int ip = i + k - l;  // bra-side occupation of mode A
      const int j = total - i;
      if (ip < 0 || ip > total || j < k) continue;
      if (amps[i].is_zero() || amps[ip].is_zero()) continue;
      const Integer numer = amps[i].series() * amps[ip].series() * record_fact;
      const Integer denom = two_pow * factorial(i - l) * factorial(j - k);
      sum += Rational(numer, denom);
    }
    return sum;
  }

  if (const auto* loss = std::get_if<ReadoutLoss>(&model)) {
    if ((k + l) % 2 != 0)
      throw std::invalid_argument("schrodinger_oracle_moment: loss model requires k+l even");
    const Rational qa = Rational(1) - loss->eta_a;
    const Rational qb = Rational(1) - loss->eta_b;
    Rational sum = 0;
    for (int i = l; i <= total; ++i) {
      const int ip = i + k - l;
      const int j = total - i;
      if (ip < 0 || ip > total || j < k) continue;
      if (amps[i].is_zero() || amps[ip].is_zero()) continue;
      const Rational state_part(amps[i].series() * amps[ip].series() * record_fact, two_pow);
      for (int r = l; r <= i; ++r)
        for (int s = k; s <= j; ++s) {
          const Rational term =
              state_part * rational_pow(loss->eta_a, r + (k - l) / 2) * rational_pow(qa, i - r) *
              rational_pow(loss->eta_b, s + (l - k) / 2) * rational_pow(qb, j - s) /
              Rational(factorial(i - r) * factorial(r - l) * factorial(j - s) * factorial(s - k));
          sum += term;
        }
    }
    return sum;
  }

  throw std::invalid_argument("schrodinger_oracle_moment: model must be Ideal or ReadoutLoss");
}

double PTVerdict::determinant_value() const {
  if (const auto* exact = std::get_if<Rational>(&determinant)) return to_double(*exact);
  return to_double(std::get<Real>(determinant));
}

namespace {

PTVerdict exact_verdict(const std::vector<Rational>& m, int dim) {
  PTVerdict result;
  std::vector<Rational> elementary(dim + 1);
  bool minor_violation = false;

  if (dim <= 4) {
    elementary[0] = 1;
    Rational full_det = 0;
    for (const auto& subset : all_index_subsets(dim)) {
      const Rational det = principal_minor(m, dim, subset);
      if (det < 0) minor_violation = true;
      elementary[subset.size()] += det;
      if (int(subset.size()) == dim) full_det = det;
    }
    result.determinant = full_det;
  } else {
    elementary = elementary_symmetric_fl(m, dim);
    // Leading minors only beyond dim 4.
    for (int k = 1; k <= dim; ++k) {
      std::vector<int> lead(k);
      for (int i = 0; i < k; ++i) lead[i] = i;
      if (principal_minor(m, dim, lead) < 0) minor_violation = true;
    }
    result.determinant = elementary[dim];
  }

  std::vector<int> signs;
  signs.reserve(dim + 1);
  signs.push_back(1);  // e_0
  for (int k = 1; k <= dim; ++k)
    signs.push_back(elementary[k] == 0 ? 0 : (elementary[k] < 0 ? -1 : 1));
  result.negative_eigenvalues = sign_variations(signs);
  result.entangled_detected = result.negative_eigenvalues > 0 || minor_violation;
  return result;
}

PTVerdict real_verdict(const std::vector<Real>& m, int dim) {
  using std::abs;
  using std::sqrt;
  PTVerdict result;
  result.determinant = lu_determinant(m, dim);

  // Congruence-scale to unit diagonal: Sylvester inertia keeps the eigenvalue
  // signature, and it removes the enormous dynamic range the raw moments have
  // (smallest eigenvalues can sit ~70 orders of magnitude under the norm).
  std::vector<Real> d(dim, Real(1));
  for (int a = 0; a < dim; ++a)
    if (m[a * dim + a] > 0) d[a] = Real(1) / sqrt(m[a * dim + a]);
  std::vector<Real> scaled(dim * dim);
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b) scaled[a * dim + b] = d[a] * d[b] * m[a * dim + b];

  Real norm = 0;
  for (const Real& x : scaled) norm += x * x;
  norm = sqrt(norm);
  const Real tol = norm * Real(1e-10);

  int negatives = 0;
  for (const Real& lambda : jacobi_eigenvalues(scaled, dim))
    if (lambda < -tol) ++negatives;
  result.negative_eigenvalues = negatives;

  bool minor_violation = false;
  auto check_subset = [&](const std::vector<int>& subset) {
    Real hadamard = 1;
    for (int row : subset) {
      Real row_norm = 0;
      for (int col : subset) row_norm += scaled[row * dim + col] * scaled[row * dim + col];
      hadamard *= sqrt(row_norm);
    }
    const Real minor_tol = Real(1e-10) * std::max(hadamard, Real(1));
    if (principal_minor(scaled, dim, subset) < -minor_tol) minor_violation = true;
  };
  if (dim <= 4) {
    for (const auto& subset : all_index_subsets(dim)) check_subset(subset);
  } else {
    for (int k = 1; k <= dim; ++k) {
      std::vector<int> lead(k);
      for (int i = 0; i < k; ++i) lead[i] = i;
      check_subset(lead);
    }
  }
  result.entangled_detected = negatives > 0 || minor_violation;
  return result;
}

}  // namespace

PTVerdict verdict(const MomentMatrix& matrix) {
  if (matrix.dim <= 0) throw std::invalid_argument("verdict: empty matrix");
  if (const auto* exact = std::get_if<std::vector<Rational>>(&matrix.entries)) {
    for (int a = 0; a < matrix.dim; ++a)
      for (int b = a + 1; b < matrix.dim; ++b)
        if ((*exact)[a * matrix.dim + b] != (*exact)[b * matrix.dim + a])
          throw std::invalid_argument("verdict: matrix must be symmetric");
    return exact_verdict(*exact, matrix.dim);
  }
  const auto& real_entries = std::get<std::vector<Real>>(matrix.entries);
  for (int a = 0; a < matrix.dim; ++a)
    for (int b = a + 1; b < matrix.dim; ++b)
      if (real_entries[a * matrix.dim + b] != real_entries[b * matrix.dim + a])
        throw std::invalid_argument("verdict: matrix must be symmetric");
  return real_verdict(real_entries, matrix.dim);
}

Rational det_f12_closed_form(long n) {
  if (n < 0) throw std::invalid_argument("det_f12_closed_form: n must be nonnegative");
  const Rational nn{Integer(n)};
  // Horner form of -(3/4) n + (11/8) n^2 - (7/4) n^3 + (1/8) n^4.
  return nn * (Rational(-3, 4) +
               nn * (Rational(11, 8) + nn * (Rational(-7, 4) + nn * Rational(1, 8))));
}

}  // namespace mesoent
