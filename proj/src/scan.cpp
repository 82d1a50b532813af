#include "bfcs/scan.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>

#ifdef BFCS_HAVE_OPENMP
#include <omp.h>
#endif

namespace bfcs {

namespace {

constexpr int kChain = index(CiModelId::kIndep31Given2);
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_inputs(const JointCorrelation& corr) {
  if (corr.l < 1) throw DomainError("scan needs at least one marker");
  if (corr.m < 2) throw DomainError("scan needs at least two traits");
  if (corr.r.rows() != corr.l + corr.m || corr.r.cols() != corr.l + corr.m) {
    throw DomainError("correlation matrix size does not match marker and trait counts");
  }
  if (corr.n < 1) throw DomainError("sample count must be at least 1");
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace

std::string_view to_string(ScanStrategy s) {
  return s == ScanStrategy::kMaxOverMarkers ? "max-over-markers" : "local-linkage";
}

ScanStrategy parse_strategy(std::string_view s) {
  if (s == "max-over-markers" || s == "max") return ScanStrategy::kMaxOverMarkers;
  if (s == "local-linkage" || s == "loclink") return ScanStrategy::kLocalLinkage;
  throw DomainError("unknown scan strategy '" + std::string(s) + "'");
}

std::optional<double> chain_log_posterior(const BayesFactorKernel<double>& kernel,
                                          const ModelVector<double>& log_prior, double r12, double r13,
                                          double r23) {
  BayesFactorVector<double> bf;
  if (!kernel.evaluate(r12, r13, r23, bf)) return std::nullopt;
  return log_posterior(bf, log_prior, kChain);
}

void chain_log_posterior_block(const BayesFactorKernel<double>& kernel, const ModelVector<double>& log_prior,
                               std::span<const double> r12, std::span<const double> r13, double r23,
                               std::span<const double> lm12, std::span<const double> lm13, double lm23,
                               std::span<double> out) {
  BayesFactorVector<double> bf;
  const std::size_t count = out.size();
  for (std::size_t k = 0; k < count; ++k) {
    const bool inside = std::abs(r12[k]) < 1.0 && std::abs(r13[k]) < 1.0 && std::abs(r23) < 1.0;
    if (inside && kernel.evaluate(r12[k], r13[k], r23, lm12[k], lm13[k], lm23, bf)) {
      out[k] = log_posterior(bf, log_prior, kChain);
    } else {
      out[k] = kNaN;
    }
  }
}

ScanResult full_scan(const JointCorrelation& corr, const PriorWeights<double>& prior, const ScanOptions& options) {
  check_inputs(corr);
  const BayesFactorKernel<double> kernel(corr.n, options.nu);
  const ModelVector<double> log_prior = prior.log_weights();
  const Eigen::Index l = corr.l;
  const Eigen::Index m = corr.m;

  ScanResult res;
  res.prob = Eigen::MatrixXd::Zero(m, m);
  res.prob.diagonal().setConstant(kNaN);
  res.best_marker = IndexMatrix::Constant(m, m, kNoMarker);
  res.meta.n = corr.n;
  res.meta.nu = options.nu;
  res.meta.prior_label = options.prior_label;
  res.meta.strategy = options.strategy;
  res.meta.upper_bound = posterior_upper_bound(corr.n, options.nu, prior);

  // log(1 - r^2) for every pair, shared by all triplets that use the pair.
  const Eigen::MatrixXd log_one_minus_sq = corr.r.unaryExpr([](double r) { return std::log1p(-r * r); });

  // Local linkage: strongest |corr(L_k, T_i)| per regulator, lowest k on ties.
  std::vector<Eigen::Index> linked(static_cast<std::size_t>(m), 0);
  if (options.strategy == ScanStrategy::kLocalLinkage) {
    for (Eigen::Index i = 0; i < m; ++i) {
      Eigen::Index best = 0;
      for (Eigen::Index k = 1; k < l; ++k) {
        if (std::abs(corr.marker_trait(k, i)) > std::abs(corr.marker_trait(best, i))) best = k;
      }
      linked[static_cast<std::size_t>(i)] = best;
    }
  }

  std::vector<std::int64_t> skipped(static_cast<std::size_t>(m), 0);
  std::mutex progress_mutex;
  Eigen::Index rows_done = 0;

  auto scan_row = [&](Eigen::Index i, std::vector<double>& scratch) {
    const Eigen::Index ti = l + i;
    std::int64_t row_skipped = 0;
    for (Eigen::Index j = 0; j < m; ++j) {
      if (j == i) continue;
      const Eigen::Index tj = l + j;
      const double r23 = corr.r(ti, tj);
      double best = -std::numeric_limits<double>::infinity();
      std::int64_t best_k = kNoMarker;

      if (options.strategy == ScanStrategy::kLocalLinkage) {
        const Eigen::Index k = linked[static_cast<std::size_t>(i)];
        const auto value = chain_log_posterior(kernel, log_prior, corr.r(k, ti), corr.r(k, tj), r23);
        if (value) {
          best = *value;
          best_k = k;
        } else {
          ++row_skipped;
        }
      } else if (options.inner_loop == InnerLoop::kBatch) {
        // Marker rows of columns ti and tj are contiguous in column-major r.
        const std::span<const double> r12(corr.r.col(ti).data(), static_cast<std::size_t>(l));
        const std::span<const double> r13(corr.r.col(tj).data(), static_cast<std::size_t>(l));
        const std::span<const double> lm12(log_one_minus_sq.col(ti).data(), static_cast<std::size_t>(l));
        const std::span<const double> lm13(log_one_minus_sq.col(tj).data(), static_cast<std::size_t>(l));
        chain_log_posterior_block(kernel, log_prior, r12, r13, r23, lm12, lm13, log_one_minus_sq(ti, tj),
                                  scratch);
        for (Eigen::Index k = 0; k < l; ++k) {
          const double value = scratch[static_cast<std::size_t>(k)];
          if (std::isnan(value)) {
            ++row_skipped;
          } else if (value > best) {
            best = value;
            best_k = k;
          }
        }
      } else {
        for (Eigen::Index k = 0; k < l; ++k) {
          const auto value = chain_log_posterior(kernel, log_prior, corr.r(k, ti), corr.r(k, tj), r23);
          if (!value) {
            ++row_skipped;
          } else if (*value > best) {
            best = *value;
            best_k = k;
          }
        }
      }

      res.prob(i, j) = best_k == kNoMarker ? 0.0 : std::exp(best);
      res.best_marker(i, j) = best_k;
    }
    skipped[static_cast<std::size_t>(i)] = row_skipped;
    if (options.progress) {
      std::lock_guard<std::mutex> lock(progress_mutex);
      options.progress(++rows_done, m);
    }
  };

  const int threads = resolve_threads(options.threads);
#ifdef BFCS_HAVE_OPENMP
#pragma omp parallel num_threads(threads)
  {
    std::vector<double> scratch(static_cast<std::size_t>(l));
#pragma omp for schedule(dynamic, 1)
    for (Eigen::Index i = 0; i < m; ++i) scan_row(i, scratch);
  }
#else
  {
    std::vector<std::thread> pool;
    std::atomic<Eigen::Index> next{0};
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        std::vector<double> scratch(static_cast<std::size_t>(l));
        for (Eigen::Index i = next++; i < m; i = next++) scan_row(i, scratch);
      });
    }
    for (auto& th : pool) th.join();
  }
#endif

  res.meta.skipped_triplets = std::accumulate(skipped.begin(), skipped.end(), std::int64_t{0});
  return res;
}

std::vector<RankedEdge> rank_edges(const ScanResult& res, std::size_t top_k) {
  std::vector<RankedEdge> edges;
  const Eigen::Index m = res.m();
  edges.reserve(static_cast<std::size_t>(m * (m - 1)));
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      if (i != j) edges.push_back({i, j, res.prob(i, j), res.best_marker(i, j)});
    }
  }
  // Cells are generated in (i, j) order, so a stable sort keeps the tie-break.
  std::stable_sort(edges.begin(), edges.end(),
                   [](const RankedEdge& a, const RankedEdge& b) { return a.probability > b.probability; });
  if (edges.size() > top_k) edges.resize(top_k);
  return edges;
}

MediationReport mediation_scan(const ScanResult& res, const JointCorrelation& corr,
                               const PriorWeights<double>& prior, double nu, Eigen::Index regulator,
                               Eigen::Index target, double threshold) {
  const Eigen::Index m = res.m();
  if (regulator < 0 || regulator >= m || target < 0 || target >= m || regulator == target) {
    throw DomainError("mediation edge indices out of range");
  }
  if (!(res.prob(regulator, target) >= threshold)) {
    throw DomainError("edge probability " + std::to_string(res.prob(regulator, target)) +
                      " is below the mediation threshold");
  }
  const BayesFactorKernel<double> kernel(corr.n, nu);
  const ModelVector<double> log_prior = prior.log_weights();

  MediationReport report{regulator, target, {}};
  for (Eigen::Index med = 0; med < m; ++med) {
    if (med == regulator || med == target) continue;
    const double in = res.prob(regulator, med);
    const double out = res.prob(med, target);
    if (!(in >= threshold && out >= threshold)) continue;
    // X1 = T_regulator, X2 = T_mediator, X3 = T_target; M6 is X1 _||_ X3 | X2.
    const auto value = chain_log_posterior(kernel, log_prior, corr.trait_trait(regulator, med),
                                           corr.trait_trait(regulator, target), corr.trait_trait(med, target));
    MediatorCandidate c;
    c.mediator = med;
    c.prob_regulator_to_mediator = in;
    c.prob_mediator_to_target = out;
    c.posterior = value ? std::exp(*value) : kNaN;
    c.verdict = value && c.posterior > threshold ? MediationVerdict::kMediated : MediationVerdict::kUndetermined;
    report.candidates.push_back(c);
  }
  return report;
}

}  // namespace bfcs
