#pragma once

// Reference implementations for tests. These evaluate the textbook forms
// (raw determinants, raw powers, brute force) in 50-digit arithmetic or with
// exact rationals, independently of the library code paths.

#include <array>
#include <cstdint>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

namespace oracle {

using Real = boost::multiprecision::cpp_bin_float_50;
using Rational = boost::multiprecision::cpp_rational;

struct Prefactors {
  Real f;
  Real g;
};

inline Prefactors prefactors(std::int64_t n, double nu_d) {
  const Real n_r = n;
  const Real nu = nu_d;
  Prefactors p;
  p.f = (n_r + nu - 2) / (nu - 2);
  p.g = boost::math::tgamma((n_r + nu) / 2) * boost::math::tgamma((nu - 1) / 2) /
        (boost::math::tgamma((n_r + nu - 1) / 2) * boost::math::tgamma(nu / 2));
  return p;
}

/// Raw Bayes factors (not logs) of the eleven models against the full model.
inline std::array<Real, 11> bayes_factors(double r12_d, double r13_d, double r23_d, std::int64_t n, double nu_d) {
  const Real r12 = r12_d, r13 = r13_d, r23 = r23_d;
  const auto [f, g] = prefactors(n, nu_d);
  const Real h = (Real(n) + Real(nu_d)) / 2;
  const Real h1 = (Real(n) + Real(nu_d) - 1) / 2;
  const Real det = 1 + 2 * r12 * r13 * r23 - r12 * r12 - r13 * r13 - r23 * r23;
  const Real q12 = 1 - r12 * r12, q13 = 1 - r13 * r13, q23 = 1 - r23 * r23;
  using boost::multiprecision::pow;
  std::array<Real, 11> bf;
  bf[0] = 1;
  bf[1] = f / g * pow(q12, h1);
  bf[2] = f / g * pow(q23, h1);
  bf[3] = f / g * pow(q13, h1);
  bf[4] = g * pow(det / (q13 * q23), h);
  bf[5] = g * pow(det / (q12 * q13), h);
  bf[6] = g * pow(det / (q12 * q23), h);
  bf[7] = f * pow(det / q23, h);
  bf[8] = f * pow(det / q13, h);
  bf[9] = f * pow(det / q12, h);
  bf[10] = f * g * pow(det, h);
  return bf;
}

inline std::array<double, 11> log_bayes_factors(double r12, double r13, double r23, std::int64_t n, double nu) {
  const auto bf = bayes_factors(r12, r13, r23, n, nu);
  std::array<double, 11> out;
  for (int j = 0; j < 11; ++j) out[j] = static_cast<double>(boost::multiprecision::log(bf[j]));
  return out;
}

/// Posterior over the eleven models by plain summation of BF_j * w_j.
inline std::array<double, 11> posterior(double r12, double r13, double r23, std::int64_t n, double nu,
                                        const std::array<double, 11>& w) {
  const auto bf = bayes_factors(r12, r13, r23, n, nu);
  Real total = 0;
  for (int j = 0; j < 11; ++j) total += bf[j] * Real(w[j]);
  std::array<double, 11> out;
  for (int j = 0; j < 11; ++j) out[j] = static_cast<double>(bf[j] * Real(w[j]) / total);
  return out;
}

using RationalMatrix3 = std::array<std::array<Rational, 3>, 3>;

/// Exact inverse by the adjugate.
inline RationalMatrix3 inverse(const RationalMatrix3& a) {
  auto cof = [&](int r, int c) {
    const int r0 = (r + 1) % 3, r1 = (r + 2) % 3, c0 = (c + 1) % 3, c1 = (c + 2) % 3;
    return a[r0][c0] * a[r1][c1] - a[r0][c1] * a[r1][c0];
  };
  const Rational det = a[0][0] * cof(0, 0) + a[0][1] * cof(0, 1) + a[0][2] * cof(0, 2);
  RationalMatrix3 inv;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) inv[c][r] = cof(r, c) / det;
  }
  return inv;
}

}  // namespace oracle
