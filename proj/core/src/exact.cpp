#include "mesoent/exact.hpp"

#include <cmath>
#include <stdexcept>

namespace mesoent {

double to_double(const Rational& r) {
  // Route through cpp_bin_float so huge numerator/denominator pairs with a
  // modest ratio (factorial quotients) convert without overflow.
  Real num(boost::multiprecision::numerator(r));
  Real den(boost::multiprecision::denominator(r));
  return (num / den).convert_to<double>();
}

double to_double(const Real& x) { return x.convert_to<double>(); }

Real to_real(const Rational& r) {
  Real num(boost::multiprecision::numerator(r));
  Real den(boost::multiprecision::denominator(r));
  return num / den;
}

Integer binomial(long n, long k) {
  if (n < 0) throw std::invalid_argument("binomial: n must be nonnegative");
  if (k < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  Integer result = 1;
  for (long step = 1; step <= k; ++step) {
    result *= n - k + step;
    result /= step;  // exact at every step: product of `step` consecutive integers
  }
  return result;
}

Integer falling_factorial(long n, long h) {
  if (n < 0 || h < 0) throw std::invalid_argument("falling_factorial: arguments must be nonnegative");
  if (h > n) return 0;
  Integer result = 1;
  for (long step = 0; step < h; ++step) result *= n - step;
  return result;
}

Integer factorial(long n) { return falling_factorial(n, n); }

double hermite(int k, double x) {
  if (k < 0) throw std::invalid_argument("hermite: order must be nonnegative");
  double prev = 1.0;  // H_0
  if (k == 0) return prev;
  double curr = 2.0 * x;  // H_1
  for (int order = 1; order < k; ++order) {
    double next = 2.0 * x * curr - 2.0 * order * prev;
    prev = curr;
    curr = next;
  }
  return curr;
}

double hermite_gaussian(int n, double x) {
  if (n < 0) throw std::invalid_argument("hermite_gaussian: order must be nonnegative");
  const double ground = std::pow(M_PI, -0.25) * std::exp(-0.5 * x * x);
  double prev = ground;  // phi_0
  if (n == 0) return prev;
  double curr = std::sqrt(2.0) * x * ground;  // phi_1
  for (int order = 1; order < n; ++order) {
    double next = x * std::sqrt(2.0 / (order + 1)) * curr -
                  std::sqrt(static_cast<double>(order) / (order + 1)) * prev;
    prev = curr;
    curr = next;
  }
  return curr;
}

}  // namespace mesoent
