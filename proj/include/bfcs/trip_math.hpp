#pragma once

// Closed-form Bayes factors of the eleven covariance structures over a
// triplet of Gaussian variables, and the posterior over those structures.
//
// Everything here is templated on the scalar type and header-only. All Bayes
// factors are natural logs relative to the full model (index 0); exponents of
// (n + nu) / 2 make raw values overflow at realistic sample sizes.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "bfcs/ci_model.hpp"
#include "bfcs/errors.hpp"

namespace bfcs {

/// Correlation matrices with determinant at or below this are rejected.
inline constexpr double kDeterminantTolerance = 1e-12;
/// Default prior degrees of freedom (uniform marginals on correlations).
inline constexpr double kDefaultNu = 4.0;

template <typename Scalar>
using ModelVector = Eigen::Matrix<Scalar, kNumModels, 1>;

/// log BF_j = log p(D | M_j) - log p(D | M_0).
template <typename Scalar>
using BayesFactorVector = ModelVector<Scalar>;

template <typename Scalar>
using PosteriorVector = ModelVector<Scalar>;

/// Sufficient statistic of a triplet: pairwise correlations and sample count.
template <typename Scalar = double>
struct TripletCorrelation {
  Scalar r12{};
  Scalar r13{};
  Scalar r23{};
  std::int64_t n = 1;
  Scalar nu = Scalar(kDefaultNu);

  Scalar r(int a, int b) const {
    switch (pair_index(a, b)) {
      case 0: return r12;
      case 1: return r23;
      default: return r13;
    }
  }

  /// Variable v of *this becomes variable perm[v] of the result.
  TripletCorrelation permuted(const std::array<int, 3>& perm) const {
    TripletCorrelation out = *this;
    for (int pair = 0; pair < 3; ++pair) {
      const auto [a, b] = pair_nodes(pair);
      const Scalar value = r(a, b);
      switch (pair_index(perm[a], perm[b])) {
        case 0: out.r12 = value; break;
        case 1: out.r23 = value; break;
        default: out.r13 = value; break;
      }
    }
    return out;
  }
};

/// Nonnegative prior over the eleven CI models, summing to one.
template <typename Scalar = double>
class PriorWeights {
 public:
  static constexpr double kSumTolerance = 1e-12;

  explicit PriorWeights(const ModelVector<Scalar>& w) : w_(w) {
    using std::abs;
    using std::isfinite;
    for (int j = 0; j < kNumModels; ++j) {
      if (!(w_[j] >= Scalar(0)) || !isfinite(w_[j])) {
        throw DomainError("prior weight " + std::to_string(j) + " is negative or not finite");
      }
    }
    if (abs(w_.sum() - Scalar(1)) > Scalar(kSumTolerance)) {
      throw DomainError("prior weights do not sum to one");
    }
  }

  /// Rescales nonnegative weights to sum to one.
  static PriorWeights normalized(const ModelVector<Scalar>& raw) {
    const Scalar total = raw.sum();
    if (!(total > Scalar(0))) throw DomainError("prior weights have zero total mass");
    return PriorWeights(raw / total);
  }

  static PriorWeights uniform() {
    return PriorWeights(ModelVector<Scalar>::Constant(Scalar(1) / Scalar(kNumModels)));
  }

  const ModelVector<Scalar>& weights() const { return w_; }
  Scalar operator[](int j) const { return w_[j]; }
  Scalar operator[](CiModelId id) const { return w_[index(id)]; }

  /// Natural logs; -inf for zero weights.
  ModelVector<Scalar> log_weights() const {
    using std::log;
    ModelVector<Scalar> out;
    for (int j = 0; j < kNumModels; ++j) {
      out[j] = w_[j] > Scalar(0) ? Scalar(log(w_[j])) : -std::numeric_limits<Scalar>::infinity();
    }
    return out;
  }

 private:
  ModelVector<Scalar> w_;
};

template <typename Scalar>
struct LogPrefactors {
  Scalar log_f;  // log((n + nu - 2) / (nu - 2))
  Scalar log_g;  // log of the gamma-function ratio
};

/// log Gamma(x + 1/2) - log Gamma(x) for x > 0.
///
/// For large x the two log-gammas are huge and nearly equal, so their
/// difference is taken from the Stirling series instead, where the leading
/// terms combine without cancellation.
template <typename Scalar>
Scalar log_gamma_half_step(Scalar x) {
  using std::lgamma;
  using std::log;
  using std::log1p;
  if (x < Scalar(20)) return lgamma(x + Scalar(0.5)) - lgamma(x);
  auto tail = [](Scalar y) {
    const Scalar y2 = y * y;
    return (Scalar(1) / Scalar(12) -
            (Scalar(1) / Scalar(360) - (Scalar(1) / Scalar(1260) - Scalar(1) / (Scalar(1680) * y2)) / y2) / y2) /
           y;
  };
  return x * log1p(Scalar(0.5) / x) + Scalar(0.5) * log(x) - Scalar(0.5) + (tail(x + Scalar(0.5)) - tail(x));
}

/// log f(n, nu) and log g(n, nu), through log-gamma only.
template <typename Scalar>
LogPrefactors<Scalar> log_prefactors(std::int64_t n, Scalar nu) {
  using std::log;
  if (!(nu > Scalar(2))) throw DomainError("nu must exceed 2");
  if (n < 1) throw DomainError("sample count must be at least 1");
  const Scalar n_s = static_cast<Scalar>(n);
  const Scalar half = Scalar(0.5);
  LogPrefactors<Scalar> out;
  out.log_f = log((n_s + nu - Scalar(2)) / (nu - Scalar(2)));
  out.log_g = log_gamma_half_step((n_s + nu - Scalar(1)) * half) - log_gamma_half_step((nu - Scalar(1)) * half);
  return out;
}

/// |R| of the 3x3 correlation matrix, as a symmetric function of the three
/// correlations: permuting the arguments gives a bit-identical result.
template <typename Scalar>
Scalar correlation_determinant(Scalar r12, Scalar r13, Scalar r23) {
  using std::sqrt;
  std::array<Scalar, 3> v{r12, r13, r23};
  std::sort(v.begin(), v.end());
  const Scalar qa = Scalar(1) - v[0] * v[0];
  const Scalar qb = Scalar(1) - v[1] * v[1];
  const Scalar rho = (v[2] - v[0] * v[1]) / sqrt(qa * qb);
  return qa * qb * (Scalar(1) - rho * rho);
}

/// Bayes factor evaluator with the (n, nu) prefactors hoisted out.
///
/// One instance serves any number of triplets sharing the same n and nu.
template <typename Scalar = double>
class BayesFactorKernel {
 public:
  BayesFactorKernel(std::int64_t n, Scalar nu)
      : n_(n),
        nu_(nu),
        pre_(log_prefactors(n, nu)),
        half_(Scalar(0.5) * (static_cast<Scalar>(n) + nu)),
        half_minus_(Scalar(0.5) * (static_cast<Scalar>(n) + nu - Scalar(1))) {}

  std::int64_t n() const { return n_; }
  Scalar nu() const { return nu_; }
  const LogPrefactors<Scalar>& prefactors() const { return pre_; }

  /// Fills `out` and returns true, or returns false for a correlation
  /// matrix that is not positive definite within kDeterminantTolerance.
  bool evaluate(Scalar r12, Scalar r13, Scalar r23, BayesFactorVector<Scalar>& out) const {
    using std::abs;
    using std::log1p;
    if (!(abs(r12) < Scalar(1)) || !(abs(r13) < Scalar(1)) || !(abs(r23) < Scalar(1))) {
      return false;
    }
    return evaluate(r12, r13, r23, log1p(-r12 * r12), log1p(-r13 * r13), log1p(-r23 * r23), out);
  }

  /// As above with lm_ab = log(1 - r_ab^2) supplied by the caller, which
  /// lets a scan reuse them across triplets. |r| < 1 is assumed.
  bool evaluate(Scalar r12, Scalar r13, Scalar r23, Scalar lm12, Scalar lm13, Scalar lm23,
                BayesFactorVector<Scalar>& out) const {
    using std::log1p;
    using std::sqrt;
    const Scalar q12 = Scalar(1) - r12 * r12;
    const Scalar q13 = Scalar(1) - r13 * r13;
    const Scalar q23 = Scalar(1) - r23 * r23;

    // Symmetric log-determinant: sort, peel off two pairs, finish with the
    // partial correlation of the remaining pair.
    std::array<std::array<Scalar, 2>, 3> v{{{r12, lm12}, {r13, lm13}, {r23, lm23}}};
    std::sort(v.begin(), v.end(), [](const auto& x, const auto& y) { return x[0] < y[0]; });
    const Scalar qa = Scalar(1) - v[0][0] * v[0][0];
    const Scalar qb = Scalar(1) - v[1][0] * v[1][0];
    const Scalar rho = (v[2][0] - v[0][0] * v[1][0]) / sqrt(qa * qb);
    const Scalar rho_sq = rho * rho;
    const Scalar det = qa * qb * (Scalar(1) - rho_sq);
    if (!(det > Scalar(kDeterminantTolerance))) return false;

    // Squared partial correlations, pair given the third variable.
    const Scalar d12 = r12 - r13 * r23;
    const Scalar d23 = r23 - r12 * r13;
    const Scalar d13 = r13 - r12 * r23;
    const Scalar p12 = d12 * d12 / (q13 * q23);
    const Scalar p23 = d23 * d23 / (q12 * q13);
    const Scalar p13 = d13 * d13 / (q12 * q23);
    if (!(p12 < Scalar(1)) || !(p23 < Scalar(1)) || !(p13 < Scalar(1)) || !(rho_sq < Scalar(1))) {
      return false;
    }

    const Scalar log_det = v[0][1] + v[1][1] + log1p(-rho_sq);

    const Scalar lf = pre_.log_f;
    const Scalar lg = pre_.log_g;
    out[0] = Scalar(0);
    out[1] = lf - lg + half_minus_ * lm12;
    out[2] = lf - lg + half_minus_ * lm23;
    out[3] = lf - lg + half_minus_ * lm13;
    out[4] = lg + half_ * log1p(-p12);
    out[5] = lg + half_ * log1p(-p23);
    out[6] = lg + half_ * log1p(-p13);
    out[7] = lf + half_ * (log_det - lm23);
    out[8] = lf + half_ * (log_det - lm13);
    out[9] = lf + half_ * (log_det - lm12);
    out[10] = lf + lg + half_ * log_det;
    return true;
  }

  BayesFactorVector<Scalar> operator()(Scalar r12, Scalar r13, Scalar r23) const {
    BayesFactorVector<Scalar> out;
    if (!evaluate(r12, r13, r23, out)) {
      throw DegenerateInput("correlation matrix is not positive definite (determinant <= 1e-12)");
    }
    return out;
  }

 private:
  std::int64_t n_;
  Scalar nu_;
  LogPrefactors<Scalar> pre_;
  Scalar half_;
  Scalar half_minus_;
};

template <typename Scalar>
void validate(const TripletCorrelation<Scalar>& t) {
  using std::abs;
  if (t.n < 1) throw DomainError("sample count must be at least 1");
  if (!(t.nu > Scalar(2))) throw DomainError("nu must exceed 2");
  if (!(abs(t.r12) < Scalar(1)) || !(abs(t.r13) < Scalar(1)) || !(abs(t.r23) < Scalar(1))) {
    throw DegenerateInput("correlations must lie strictly inside (-1, 1)");
  }
  if (!(correlation_determinant(t.r12, t.r13, t.r23) > Scalar(kDeterminantTolerance))) {
    throw DegenerateInput("correlation matrix is not positive definite (determinant <= 1e-12)");
  }
}

template <typename Scalar>
BayesFactorVector<Scalar> compute_log_bayes_factors(const TripletCorrelation<Scalar>& t) {
  validate(t);
  return BayesFactorKernel<Scalar>(t.n, t.nu)(t.r12, t.r13, t.r23);
}

/// log p(M_target | D) from log Bayes factors and log prior weights.
template <typename Scalar>
Scalar log_posterior(const BayesFactorVector<Scalar>& log_bf, const ModelVector<Scalar>& log_prior,
                     int target) {
  using std::exp;
  using std::log;
  Scalar peak = -std::numeric_limits<Scalar>::infinity();
  for (int j = 0; j < kNumModels; ++j) peak = std::max<Scalar>(peak, log_bf[j] + log_prior[j]);
  Scalar total = Scalar(0);
  for (int j = 0; j < kNumModels; ++j) {
    const Scalar d = log_bf[j] + log_prior[j] - peak;
    // The peak term contributes exactly 1, so anything below e^-50 is lost
    // in the sum anyway. Clamping keeps exp off its slow large-argument path
    // and makes the cost per call independent of the data.
    total += exp(std::max<Scalar>(d, Scalar(-50)));
  }
  return log_bf[target] + log_prior[target] - peak - log(total);
}

/// p(M_j | D) = BF_j p(M_j) / sum_i BF_i p(M_i), via log-sum-exp.
template <typename Scalar>
PosteriorVector<Scalar> posterior_over_models(const BayesFactorVector<Scalar>& log_bf,
                                              const PriorWeights<Scalar>& prior) {
  using std::exp;
  const ModelVector<Scalar> log_prior = prior.log_weights();
  const ModelVector<Scalar> terms = log_bf + log_prior;
  const Scalar peak = terms.maxCoeff();
  PosteriorVector<Scalar> p;
  for (int j = 0; j < kNumModels; ++j) {
    p[j] = prior[j] > Scalar(0) ? Scalar(exp(terms[j] - peak)) : Scalar(0);
  }
  return p / p.sum();
}

/// Largest possible posterior of X3 _||_ X1 | X2 at this (n, nu, prior),
/// attained when r13 = r12 * r23 and every model but M0 and M6 is negligible.
template <typename Scalar>
Scalar posterior_upper_bound(std::int64_t n, Scalar nu, const PriorWeights<Scalar>& prior) {
  using std::exp;
  using std::log;
  const Scalar w6 = prior[CiModelId::kIndep31Given2];
  const Scalar w0 = prior[CiModelId::kFull];
  const Scalar log_g = log_prefactors(n, nu).log_g;
  if (!(w6 > Scalar(0))) return Scalar(0);
  if (!(w0 > Scalar(0))) return Scalar(1);
  return Scalar(1) / (Scalar(1) + exp(log(w0) - log_g - log(w6)));
}

/// Zero pattern of a positive definite 3x3 covariance. Entries are
/// normalized (correlation, partial correlation) before the |x| < tol test.
template <typename Scalar>
ZeroPattern detect_zero_pattern(const Eigen::Matrix<Scalar, 3, 3>& cov, Scalar tol = Scalar(1e-9)) {
  using std::abs;
  using std::sqrt;
  if (!(tol > Scalar(0))) throw DomainError("zero tolerance must be positive");
  if (!cov.isApprox(cov.transpose())) throw DegenerateInput("covariance matrix is not symmetric");
  Eigen::LLT<Eigen::Matrix<Scalar, 3, 3>> llt(cov);
  if (llt.info() != Eigen::Success) throw DegenerateInput("covariance matrix is not positive definite");

  const Eigen::Matrix<Scalar, 3, 3> precision = llt.solve(Eigen::Matrix<Scalar, 3, 3>::Identity());
  ZeroPattern z;
  for (int pair = 0; pair < 3; ++pair) {
    const auto [a, b] = pair_nodes(pair);
    const Scalar corr = cov(a, b) / sqrt(cov(a, a) * cov(b, b));
    const Scalar pcorr = -precision(a, b) / sqrt(precision(a, a) * precision(b, b));
    if (abs(corr) < tol) z.marginal |= static_cast<std::uint8_t>(1U << pair);
    if (abs(pcorr) < tol) z.conditional |= static_cast<std::uint8_t>(1U << pair);
  }
  return z;
}

/// The CI model whose zero pattern matches `cov`, or nullopt when the
/// detected pattern is one no positive definite matrix can have exactly.
template <typename Scalar>
std::optional<CiModelId> classify_zero_pattern(const Eigen::Matrix<Scalar, 3, 3>& cov,
                                               Scalar tol = Scalar(1e-9)) {
  const ZeroPattern z = detect_zero_pattern(cov, tol);
  if (!is_consistent(z)) return std::nullopt;
  return model_from_pattern(z);
}

}  // namespace bfcs
