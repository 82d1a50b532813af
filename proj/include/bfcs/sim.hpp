#pragma once

// Synthetic data: three-variable linear SEMs and marker/trait regulatory
// networks with known structure.

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace bfcs {

using BoolMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// X1 := e1; X2 := e2 + b21 X1; X3 := e3 + b31 X1 + b32 X2.
enum class GeneratingModel {
  kCausal,       // b31 = 0
  kIndependent,  // b32 = 0
  kFull,
};

enum class NoiseKind { kGaussian, kBernoulli };

std::string_view to_string(GeneratingModel model);
GeneratingModel parse_generating_model(std::string_view s);

struct TripletSemSpec {
  GeneratingModel model = GeneratingModel::kCausal;
  NoiseKind noise1 = NoiseKind::kGaussian;
  /// Success probability of a Bernoulli X1; drawn from U(0.1, 0.5) if unset.
  std::optional<double> bernoulli_p;
  std::uint64_t seed = 0;
};

struct TripletCoefficients {
  double b21 = 0.0;
  double b31 = 0.0;
  double b32 = 0.0;
  double bernoulli_p = 0.0;  // 0 for Gaussian X1
};

struct TripletData {
  Eigen::MatrixXd x;  // n x 3, columns (X1, X2, X3)
  TripletCoefficients coefficients;
};

/// Nonzero coefficients are standard normal draws.
TripletData gen_triplet_data(const TripletSemSpec& spec, std::int64_t n);

struct GrnSpec {
  Eigen::Index m = 100;  // traits
  Eigen::Index l = 100;  // markers
  double marker_link_prob = 0.05;
  double edge_count_target = 54.0;  // expected number of trait -> trait edges
  double coef_lo = -1.0;
  double coef_hi = 1.0;
  std::uint64_t seed = 0;

  static GrnSpec sparse(std::uint64_t seed);  // 54 expected edges
  static GrnSpec dense(std::uint64_t seed);   // 247 expected edges
};

struct GroundTruth {
  BoolMatrix direct;     // direct(i, j): T_i -> T_j
  BoolMatrix ancestral;  // transitive closure of direct
};

struct GrnModel {
  Eigen::MatrixXd A;  // m x l, marker -> trait effects
  Eigen::MatrixXd B;  // m x m, B(j, i) != 0 iff T_i -> T_j
  std::vector<Eigen::Index> order;  // topological order of the traits
  GroundTruth truth;
};

/// Random DAG over a uniformly drawn topological order, each admissible edge
/// kept with probability edge_count_target / (m (m - 1) / 2).
GrnModel gen_grn(const GrnSpec& spec);

struct GrnSample {
  Eigen::MatrixXd markers;  // n x l, Bernoulli(p_k)
  Eigen::MatrixXd traits;   // n x m
  Eigen::VectorXd marker_probs;
};

/// t = B t + A l + e, solved by forward substitution in topological order.
/// Draws come from a stream derived from spec.seed, separate from gen_grn's.
GrnSample sample_grn_data(const GrnModel& model, const GrnSpec& spec, std::int64_t n);

/// Reachability closure, self-loops excluded.
BoolMatrix transitive_closure(const BoolMatrix& direct);

/// True when B, permuted into `order`, is strictly lower triangular.
bool is_topologically_ordered(const Eigen::MatrixXd& B, const std::vector<Eigen::Index>& order);

}  // namespace bfcs
