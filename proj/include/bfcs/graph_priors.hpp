#pragma once

// Three-node causal graphs (DAGs and directed MAGs), their CI models under
// d-/m-separation, and the priors over CI models they induce.

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bfcs/ci_model.hpp"
#include "bfcs/trip_math.hpp"

namespace bfcs {

enum class GraphKind { kDag, kDmag };

/// Mark on the unordered pair (a, b) = pair_nodes(p): `kForward` is a -> b,
/// `kBackward` is b -> a.
enum class EdgeMark { kAbsent, kForward, kBackward, kBidirected };

struct DirectedEdge {
  int from = 0;
  int to = 0;
  friend bool operator==(const DirectedEdge&, const DirectedEdge&) = default;
};

class CausalGraph3 {
 public:
  CausalGraph3(GraphKind kind, const std::array<EdgeMark, 3>& marks) : kind_(kind), marks_(marks) {}

  GraphKind kind() const { return kind_; }
  const std::array<EdgeMark, 3>& marks() const { return marks_; }
  EdgeMark mark(int pair) const { return marks_[pair]; }

  bool adjacent(int a, int b) const { return marks_[pair_index(a, b)] != EdgeMark::kAbsent; }
  bool directed(int from, int to) const;
  /// True if the edge between a and b carries an arrowhead at `at`.
  bool arrowhead_at(int a, int b, int at) const;
  int edge_count() const;

  /// DAG: acyclic with no bidirected edges. DMAG: ancestral (no directed or
  /// almost-directed cycle).
  bool is_valid() const;

  std::string to_string() const;

 private:
  GraphKind kind_;
  std::array<EdgeMark, 3> marks_;
};

struct PriorSpec {
  GraphKind kind = GraphKind::kDmag;
  /// Node that may receive no arrowheads (background knowledge).
  std::optional<int> bk_root;
  /// Independent per-pair edge probability; orientation ignored.
  std::optional<double> edge_prob_q;
  std::vector<DirectedEdge> forbidden_edges;
  std::vector<DirectedEdge> required_edges;
};

/// Rejects out-of-range nodes, q outside [0, 1] and overlapping
/// forbidden/required sets.
void validate(const PriorSpec& spec);

/// All valid graphs that satisfy the background knowledge and edge
/// constraints, in mark-assignment order.
std::vector<CausalGraph3> enumerate_graphs(const PriorSpec& spec);

/// CI model entailed by separation among the three singleton pairs.
CiModelId ci_model_of(const CausalGraph3& g);

/// Number of surviving graphs in each CI model class.
std::array<int, kNumModels> class_counts(const PriorSpec& spec);

/// Uniform over surviving graphs, or q-weighted per graph when
/// edge_prob_q is set; summed per class and normalized.
PriorWeights<double> build_prior(const PriorSpec& spec);

/// Named specs used by the CLI: "dag", "dag-bk", "dmag", "dmag-bk"
/// (BK puts X1 first).
PriorSpec named_prior_spec(std::string_view name);

}  // namespace bfcs
