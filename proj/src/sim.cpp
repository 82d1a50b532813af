#include "bfcs/sim.hpp"

#include <algorithm>
#include <string>

#include "bfcs/errors.hpp"
#include "bfcs/random.hpp"

namespace bfcs {

std::string_view to_string(GeneratingModel model) {
  switch (model) {
    case GeneratingModel::kCausal: return "causal";
    case GeneratingModel::kIndependent: return "independent";
    case GeneratingModel::kFull: return "full";
  }
  return "";
}

GeneratingModel parse_generating_model(std::string_view s) {
  if (s == "causal") return GeneratingModel::kCausal;
  if (s == "independent") return GeneratingModel::kIndependent;
  if (s == "full") return GeneratingModel::kFull;
  throw DomainError("unknown generating model '" + std::string(s) + "'");
}

TripletData gen_triplet_data(const TripletSemSpec& spec, std::int64_t n) {
  if (n < 1) throw DomainError("sample count must be at least 1");
  Rng rng(spec.seed);
  TripletData out;
  auto& c = out.coefficients;
  c.b21 = rng.normal();
  c.b31 = rng.normal();
  c.b32 = rng.normal();
  if (spec.model == GeneratingModel::kCausal) c.b31 = 0.0;
  if (spec.model == GeneratingModel::kIndependent) c.b32 = 0.0;
  if (spec.noise1 == NoiseKind::kBernoulli) {
    c.bernoulli_p = spec.bernoulli_p ? *spec.bernoulli_p : rng.uniform(0.1, 0.5);
    if (!(c.bernoulli_p > 0.0 && c.bernoulli_p < 1.0)) throw DomainError("Bernoulli probability must lie in (0, 1)");
  }

  out.x.resize(n, 3);
  for (std::int64_t s = 0; s < n; ++s) {
    const double x1 = spec.noise1 == NoiseKind::kBernoulli ? (rng.bernoulli(c.bernoulli_p) ? 1.0 : 0.0) : rng.normal();
    const double x2 = rng.normal() + c.b21 * x1;
    const double x3 = rng.normal() + c.b31 * x1 + c.b32 * x2;
    out.x(s, 0) = x1;
    out.x(s, 1) = x2;
    out.x(s, 2) = x3;
  }
  return out;
}

GrnSpec GrnSpec::sparse(std::uint64_t seed) {
  GrnSpec spec;
  spec.edge_count_target = 54.0;
  spec.seed = seed;
  return spec;
}

GrnSpec GrnSpec::dense(std::uint64_t seed) {
  GrnSpec spec;
  spec.edge_count_target = 247.0;
  spec.seed = seed;
  return spec;
}

namespace {

void validate(const GrnSpec& spec) {
  if (spec.m < 1 || spec.l < 0) throw DomainError("GRN needs at least one trait");
  if (!(spec.marker_link_prob >= 0.0 && spec.marker_link_prob <= 1.0)) {
    throw DomainError("marker link probability must lie in [0, 1]");
  }
  if (!(spec.edge_count_target >= 0.0)) throw DomainError("edge count target must be nonnegative");
  if (!(spec.coef_lo < spec.coef_hi)) throw DomainError("coefficient range is empty");
}

double nonzero_uniform(Rng& rng, double lo, double hi) {
  double v = 0.0;
  do {
    v = rng.uniform(lo, hi);
  } while (v == 0.0);
  return v;
}

}  // namespace

GrnModel gen_grn(const GrnSpec& spec) {
  validate(spec);
  Rng rng(mix_seed(spec.seed, 0));
  const Eigen::Index m = spec.m;
  GrnModel model;

  // Fisher-Yates with our own integer draws, so the order is portable.
  model.order.resize(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) model.order[static_cast<std::size_t>(i)] = i;
  for (Eigen::Index i = m - 1; i > 0; --i) {
    const auto j = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(i + 1)));
    std::swap(model.order[static_cast<std::size_t>(i)], model.order[static_cast<std::size_t>(j)]);
  }

  const double pairs = 0.5 * static_cast<double>(m) * static_cast<double>(m - 1);
  const double edge_prob = pairs > 0.0 ? std::min(1.0, spec.edge_count_target / pairs) : 0.0;
  model.B = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = a + 1; b < m; ++b) {
      if (!rng.bernoulli(edge_prob)) continue;
      const Eigen::Index from = model.order[static_cast<std::size_t>(a)];
      const Eigen::Index to = model.order[static_cast<std::size_t>(b)];
      model.B(to, from) = nonzero_uniform(rng, spec.coef_lo, spec.coef_hi);
    }
  }

  model.A = Eigen::MatrixXd::Zero(m, spec.l);
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index k = 0; k < spec.l; ++k) {
      if (rng.bernoulli(spec.marker_link_prob)) model.A(j, k) = nonzero_uniform(rng, spec.coef_lo, spec.coef_hi);
    }
  }

  model.truth.direct = (model.B.transpose().array() != 0.0).matrix();
  model.truth.ancestral = transitive_closure(model.truth.direct);
  return model;
}

GrnSample sample_grn_data(const GrnModel& model, const GrnSpec& spec, std::int64_t n) {
  if (n < 1) throw DomainError("sample count must be at least 1");
  if (!is_topologically_ordered(model.B, model.order)) throw DomainError("B is not acyclic in the given order");
  Rng rng(mix_seed(spec.seed, 1));
  const Eigen::Index m = model.B.rows();
  const Eigen::Index l = model.A.cols();

  GrnSample out;
  out.marker_probs.resize(l);
  for (Eigen::Index k = 0; k < l; ++k) out.marker_probs[k] = rng.uniform(0.1, 0.5);

  out.markers.resize(n, l);
  Eigen::MatrixXd noise(n, m);
  for (std::int64_t s = 0; s < n; ++s) {
    for (Eigen::Index k = 0; k < l; ++k) out.markers(s, k) = rng.bernoulli(out.marker_probs[k]) ? 1.0 : 0.0;
    for (Eigen::Index j = 0; j < m; ++j) noise(s, j) = rng.normal();
  }

  out.traits = out.markers * model.A.transpose() + noise;
  for (const Eigen::Index j : model.order) {
    for (Eigen::Index i = 0; i < m; ++i) {
      const double b = model.B(j, i);
      if (b != 0.0) out.traits.col(j) += b * out.traits.col(i);
    }
  }
  return out;
}

BoolMatrix transitive_closure(const BoolMatrix& direct) {
  BoolMatrix reach = direct;
  const Eigen::Index m = reach.rows();
  for (Eigen::Index k = 0; k < m; ++k) {
    for (Eigen::Index i = 0; i < m; ++i) {
      if (!reach(i, k)) continue;
      for (Eigen::Index j = 0; j < m; ++j) {
        if (reach(k, j)) reach(i, j) = true;
      }
    }
  }
  reach.diagonal().setConstant(false);
  return reach;
}

bool is_topologically_ordered(const Eigen::MatrixXd& B, const std::vector<Eigen::Index>& order) {
  const Eigen::Index m = B.rows();
  if (B.cols() != m || static_cast<Eigen::Index>(order.size()) != m) return false;
  std::vector<Eigen::Index> position(static_cast<std::size_t>(m), -1);
  for (std::size_t p = 0; p < order.size(); ++p) {
    const Eigen::Index v = order[p];
    if (v < 0 || v >= m || position[static_cast<std::size_t>(v)] != -1) return false;
    position[static_cast<std::size_t>(v)] = static_cast<Eigen::Index>(p);
  }
  for (Eigen::Index to = 0; to < m; ++to) {
    for (Eigen::Index from = 0; from < m; ++from) {
      if (B(to, from) != 0.0 &&
          position[static_cast<std::size_t>(from)] >= position[static_cast<std::size_t>(to)]) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace bfcs
