#pragma once

// Triplet scan over (marker, regulator trait, target trait): the posterior of
// L_k -> T_i -> T_j for every triplet, aggregated into a trait-by-trait
// matrix of regulation probabilities.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "bfcs/data_io.hpp"
#include "bfcs/trip_math.hpp"

namespace bfcs {

enum class ScanStrategy {
  kMaxOverMarkers,  // max_k p(L_k -> T_i -> T_j | D)
  kLocalLinkage,    // single k per regulator: argmax_k |corr(L_k, T_i)|
};

/// Per-(i, j) evaluation of the marker loop.
enum class InnerLoop {
  kBatch,   // one call per block of markers, shared log terms precomputed
  kScalar,  // compute_log_bayes_factors-style per triplet
};

std::string_view to_string(ScanStrategy s);
ScanStrategy parse_strategy(std::string_view s);

/// Marker index stored where no triplet could be evaluated.
inline constexpr std::int64_t kNoMarker = -1;

using IndexMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

struct ScanOptions {
  double nu = kDefaultNu;
  ScanStrategy strategy = ScanStrategy::kMaxOverMarkers;
  InnerLoop inner_loop = InnerLoop::kBatch;
  /// 0 picks the hardware concurrency.
  int threads = 1;
  std::string prior_label = "custom";
  /// Called with (rows finished, total rows); may run on worker threads but
  /// never concurrently.
  std::function<void(Eigen::Index, Eigen::Index)> progress;
};

struct ScanMeta {
  std::int64_t n = 0;
  double nu = kDefaultNu;
  std::string prior_label;
  ScanStrategy strategy = ScanStrategy::kMaxOverMarkers;
  /// Triplets with a non positive definite correlation submatrix.
  std::int64_t skipped_triplets = 0;
  double upper_bound = 0.0;
};

struct ScanResult {
  Eigen::MatrixXd prob;     // m x m, prob(i, j) ~ p(T_i -> T_j | D); NaN diagonal
  IndexMatrix best_marker;  // m x m, kNoMarker where nothing was evaluated
  ScanMeta meta;

  Eigen::Index m() const { return prob.rows(); }
};

ScanResult full_scan(const JointCorrelation& corr, const PriorWeights<double>& prior,
                     const ScanOptions& options = {});

/// log p(M6 | D) for each k of a block of triplets sharing X2 and X3:
/// r12[k] = corr(X1_k, X2), r13[k] = corr(X1_k, X3). lm12/lm13/lm23 are the
/// matching log(1 - r^2). Degenerate triplets get NaN.
void chain_log_posterior_block(const BayesFactorKernel<double>& kernel, const ModelVector<double>& log_prior,
                               std::span<const double> r12, std::span<const double> r13, double r23,
                               std::span<const double> lm12, std::span<const double> lm13, double lm23,
                               std::span<double> out);

/// Same quantity for one triplet, nullopt if degenerate.
std::optional<double> chain_log_posterior(const BayesFactorKernel<double>& kernel,
                                          const ModelVector<double>& log_prior, double r12, double r13,
                                          double r23);

struct RankedEdge {
  Eigen::Index regulator = 0;
  Eigen::Index target = 0;
  double probability = 0.0;
  std::int64_t best_marker = kNoMarker;
};

/// Cells sorted by probability (descending), ties by (regulator, target).
std::vector<RankedEdge> rank_edges(const ScanResult& res, std::size_t top_k);

enum class MediationVerdict { kMediated, kUndetermined };

struct MediatorCandidate {
  Eigen::Index mediator = 0;
  double prob_regulator_to_mediator = 0.0;
  double prob_mediator_to_target = 0.0;
  /// p(T_i _||_ T_j | T_m), NaN if the triplet is degenerate.
  double posterior = 0.0;
  MediationVerdict verdict = MediationVerdict::kUndetermined;
};

struct MediationReport {
  Eigen::Index regulator = 0;
  Eigen::Index target = 0;
  std::vector<MediatorCandidate> candidates;
};

/// Single-mediator analysis of the edge regulator -> target.
MediationReport mediation_scan(const ScanResult& res, const JointCorrelation& corr,
                               const PriorWeights<double>& prior, double nu, Eigen::Index regulator,
                               Eigen::Index target, double threshold);

}  // namespace bfcs
