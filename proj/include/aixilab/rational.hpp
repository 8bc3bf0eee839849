#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace aixilab {

// Exact arithmetic for prior masses, mixture likelihoods and expectimax values.
using rational = boost::multiprecision::cpp_rational;
using bigint = boost::multiprecision::cpp_int;

// 2^-k as an exact rational.
inline rational pow2_neg(unsigned k) {
  rational r(1);
  r /= rational(bigint(1) << k);
  return r;
}

inline double to_double(const rational& r) { return r.convert_to<double>(); }

inline std::string rational_str(const rational& r) {
  return numerator(r).str() + "/" + denominator(r).str();
}

// Parse "a/b" or a plain integer; used for CLI parameters such as --theta 3/4.
inline rational parse_rational(const std::string& text) {
  auto slash = text.find('/');
  try {
    if (slash == std::string::npos) return rational(bigint(text));
    bigint num(text.substr(0, slash));
    bigint den(text.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator");
    return rational(num, den);
  } catch (const std::exception&) {
    throw std::invalid_argument("could not parse rational: '" + text + "'");
  }
}

// Elias gamma code length of i >= 1: 2*floor(log2 i) + 1.
inline unsigned elias_gamma_length(uint64_t i) {
  if (i == 0) throw std::invalid_argument("elias gamma is defined for i >= 1");
  unsigned floor_log = 0;
  while ((i >> (floor_log + 1)) != 0) ++floor_log;
  return 2 * floor_log + 1;
}

// Surrogate prior over component indexes 1..n: w_i proportional to 2^-len(gamma(i)).
// `normalized` sums the weights to one (hand-built mixtures); raw weights keep the
// Kraft property (sum < 1) for suite scoring.
inline std::vector<rational> elias_gamma_weights(std::size_t n, bool normalized) {
  std::vector<rational> w;
  w.reserve(n);
  rational total(0);
  for (std::size_t i = 1; i <= n; ++i) {
    rational wi = pow2_neg(elias_gamma_length(i));
    w.push_back(wi);
    total += wi;
  }
  if (normalized)
    for (auto& wi : w) wi /= total;
  return w;
}

}  // namespace aixilab
