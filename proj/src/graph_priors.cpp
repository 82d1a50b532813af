#include "bfcs/graph_priors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bfcs {

bool CausalGraph3::directed(int from, int to) const {
  const int pair = pair_index(from, to);
  const EdgeMark m = marks_[pair];
  const bool forward = pair_nodes(pair)[0] == from;
  return forward ? m == EdgeMark::kForward : m == EdgeMark::kBackward;
}

bool CausalGraph3::arrowhead_at(int a, int b, int at) const {
  const int other = at == a ? b : a;
  return directed(other, at) || marks_[pair_index(a, b)] == EdgeMark::kBidirected;
}

int CausalGraph3::edge_count() const {
  return static_cast<int>(std::count_if(marks_.begin(), marks_.end(),
                                        [](EdgeMark m) { return m != EdgeMark::kAbsent; }));
}

bool CausalGraph3::is_valid() const {
  const bool cycle = (directed(0, 1) && directed(1, 2) && directed(2, 0)) ||
                     (directed(0, 2) && directed(2, 1) && directed(1, 0));
  if (cycle) return false;
  for (int pair = 0; pair < 3; ++pair) {
    if (marks_[pair] != EdgeMark::kBidirected) continue;
    if (kind_ == GraphKind::kDag) return false;
    // almost-directed cycle: a <-> b together with a -> c -> b (or reverse)
    const auto [a, b] = pair_nodes(pair);
    const int c = third_node(a, b);
    if ((directed(a, c) && directed(c, b)) || (directed(b, c) && directed(c, a))) return false;
  }
  return true;
}

std::string CausalGraph3::to_string() const {
  std::string out;
  for (int pair = 0; pair < 3; ++pair) {
    if (marks_[pair] == EdgeMark::kAbsent) continue;
    const auto [a, b] = pair_nodes(pair);
    const std::string xa = "X" + std::to_string(a + 1);
    const std::string xb = "X" + std::to_string(b + 1);
    if (!out.empty()) out += ", ";
    switch (marks_[pair]) {
      case EdgeMark::kForward: out += xa + "->" + xb; break;
      case EdgeMark::kBackward: out += xb + "->" + xa; break;
      case EdgeMark::kBidirected: out += xa + "<->" + xb; break;
      case EdgeMark::kAbsent: break;
    }
  }
  return out.empty() ? "(empty)" : out;
}

namespace {

bool valid_node(int v) { return v >= 0 && v < 3; }

bool satisfies(const CausalGraph3& g, const PriorSpec& spec) {
  if (spec.bk_root) {
    const int root = *spec.bk_root;
    for (int other = 0; other < 3; ++other) {
      if (other != root && g.adjacent(root, other) && g.arrowhead_at(root, other, root)) return false;
    }
  }
  for (const auto& e : spec.forbidden_edges) {
    if (g.directed(e.from, e.to)) return false;
  }
  for (const auto& e : spec.required_edges) {
    if (!g.directed(e.from, e.to)) return false;
  }
  return true;
}

}  // namespace

void validate(const PriorSpec& spec) {
  if (spec.bk_root && !valid_node(*spec.bk_root)) throw DomainError("background-knowledge node out of range");
  if (spec.edge_prob_q && !(*spec.edge_prob_q >= 0.0 && *spec.edge_prob_q <= 1.0)) {
    throw DomainError("edge probability q must lie in [0, 1]");
  }
  auto check = [](const DirectedEdge& e) {
    if (!valid_node(e.from) || !valid_node(e.to) || e.from == e.to) {
      throw DomainError("edge constraint must join two distinct nodes in 0..2");
    }
  };
  for (const auto& e : spec.forbidden_edges) check(e);
  for (const auto& e : spec.required_edges) {
    check(e);
    if (std::find(spec.forbidden_edges.begin(), spec.forbidden_edges.end(), e) != spec.forbidden_edges.end()) {
      throw DomainError("an edge is both required and forbidden");
    }
  }
}

std::vector<CausalGraph3> enumerate_graphs(const PriorSpec& spec) {
  validate(spec);
  const int marks_per_pair = spec.kind == GraphKind::kDag ? 3 : 4;
  std::vector<CausalGraph3> out;
  for (int m0 = 0; m0 < marks_per_pair; ++m0) {
    for (int m1 = 0; m1 < marks_per_pair; ++m1) {
      for (int m2 = 0; m2 < marks_per_pair; ++m2) {
        const CausalGraph3 g(spec.kind, {static_cast<EdgeMark>(m0), static_cast<EdgeMark>(m1),
                                         static_cast<EdgeMark>(m2)});
        if (g.is_valid() && satisfies(g, spec)) out.push_back(g);
      }
    }
  }
  return out;
}

CiModelId ci_model_of(const CausalGraph3& g) {
  ZeroPattern z;
  for (int pair = 0; pair < 3; ++pair) {
    const auto [a, b] = pair_nodes(pair);
    if (g.adjacent(a, b)) continue;
    const int c = third_node(a, b);
    const auto bit = static_cast<std::uint8_t>(1U << pair);
    if (g.adjacent(a, c) && g.adjacent(c, b)) {
      // the only path is a *-* c *-* b; conditioning on c opens a collider
      // and blocks a non-collider
      const bool collider = g.arrowhead_at(a, c, c) && g.arrowhead_at(c, b, c);
      if (collider) {
        z.marginal |= bit;
      } else {
        z.conditional |= bit;
      }
    } else {
      z.marginal |= bit;
      z.conditional |= bit;
    }
  }
  const auto model = model_from_pattern(z);
  if (!model) throw std::logic_error("graph " + g.to_string() + " entails no CI model");
  return *model;
}

std::array<int, kNumModels> class_counts(const PriorSpec& spec) {
  std::array<int, kNumModels> counts{};
  for (const auto& g : enumerate_graphs(spec)) ++counts[index(ci_model_of(g))];
  return counts;
}

PriorWeights<double> build_prior(const PriorSpec& spec) {
  const auto graphs = enumerate_graphs(spec);
  if (graphs.empty()) throw DomainError("prior constraints leave no admissible graph");
  ModelVector<double> raw = ModelVector<double>::Zero();
  for (const auto& g : graphs) {
    double weight = 1.0;
    if (spec.edge_prob_q) {
      const double q = *spec.edge_prob_q;
      const int present = g.edge_count();
      weight = std::pow(q, present) * std::pow(1.0 - q, 3 - present);
    }
    raw[index(ci_model_of(g))] += weight;
  }
  return PriorWeights<double>::normalized(raw);
}

PriorSpec named_prior_spec(std::string_view name) {
  PriorSpec spec;
  if (name == "dag") {
    spec.kind = GraphKind::kDag;
  } else if (name == "dag-bk") {
    spec.kind = GraphKind::kDag;
    spec.bk_root = 0;
  } else if (name == "dmag") {
    spec.kind = GraphKind::kDmag;
  } else if (name == "dmag-bk") {
    spec.kind = GraphKind::kDmag;
    spec.bk_root = 0;
  } else {
    throw DomainError("unknown prior '" + std::string(name) + "' (expected dag, dag-bk, dmag or dmag-bk)");
  }
  return spec;
}

}  // namespace bfcs
