#ifndef MESOENT_EXACT_HPP
#define MESOENT_EXACT_HPP

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

namespace mesoent {

/// Arbitrary-precision integer / rational used wherever a result must be exact
/// (combinatorial sums, beam-splitter amplitudes, moment-matrix determinants).
using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// High-precision real (50 decimal digits) for the detector-noise paths, where
/// posterior averaging makes entries irrational but verdicts still need far
/// more headroom than a double provides.
using Real = boost::multiprecision::cpp_bin_float_50;

/// Explicit one-way conversions out of the exact domain.
double to_double(const Rational& r);
double to_double(const Real& x);
Real to_real(const Rational& r);

/// C(n, k). Returns 0 when k < 0 or k > n, so summation formulas need no
/// boundary casework. Requires n >= 0.
Integer binomial(long n, long k);

/// n (n-1) ... (n-h+1); empty product = 1, and 0 when h > n (annihilating more
/// quanta than are present). Requires n, h >= 0.
Integer falling_factorial(long n, long h);

/// n!
Integer factorial(long n);

/// Physicists' Hermite polynomial H_k(x), three-term recurrence.
double hermite(int k, double x);

/// Orthonormal harmonic-oscillator eigenfunction
///   phi_n(x) = (2^n n! sqrt(pi))^{-1/2} H_n(x) e^{-x^2/2},
/// evaluated by the normalized recurrence
///   phi_{n+1} = x sqrt(2/(n+1)) phi_n - sqrt(n/(n+1)) phi_{n-1},
/// which stays bounded for n well beyond 500 (raw H_n overflows near n ~ 150).
double hermite_gaussian(int n, double x);

}  // namespace mesoent

#endif  // MESOENT_EXACT_HPP
