#pragma once

#include <cmath>
#include <complex>
#include <numbers>

namespace prelog {

/// sin(pi x) with exact argument reduction; exact zeros at integers.
inline double sinpi(double x) {
  double r = std::remainder(x, 2.0);  // [-1, 1]
  if (r > 0.5)
    r = 1.0 - r;
  else if (r < -0.5)
    r = -1.0 - r;
  return std::sin(std::numbers::pi * r);
}

/// cos(pi x) with exact argument reduction.
inline double cospi(double x) {
  const double r = std::fabs(std::remainder(x, 2.0));  // [0, 1]
  return sinpi(0.5 - r);
}

/// exp(i 2 pi t). The phase is reduced in turns before scaling by 2 pi, so
/// integer multiples of a dyadic frequency stay exact.
inline std::complex<double> cis_turns(double turns) {
  const double t = std::remainder(turns, 1.0);
  return {cospi(2.0 * t), sinpi(2.0 * t)};
}

/// Digamma function for x > 0.
inline double digamma(double x) {
  double acc = 0.0;
  while (x < 6.0) {
    acc -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  return acc + std::log(x) - 0.5 * inv -
         inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 * (1.0 / 252.0 - inv2 * (1.0 / 240.0))));
}

}  // namespace prelog
