// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/LU>

#include "bfcs/data_io.hpp"
#include "bfcs/eval.hpp"
#include "bfcs/graph_priors.hpp"
#include "bfcs/random.hpp"
#include "bfcs/scan.hpp"
#include "bfcs/sim.hpp"
#include "bfcs/trip_math.hpp"
#include "oracle/oracle.hpp"

namespace {

using namespace bfcs;
using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

const PriorWeights<double>& dmag_bk() {
  static const PriorWeights<double> p = build_prior(named_prior_spec("dmag-bk"));
  return p;
}

TripletCorrelation<double> random_triplet(Rng& rng, std::int64_t n) {
  for (;;) {
    TripletCorrelation<double> t{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1), n};
    if (correlation_determinant(t.r12, t.r13, t.r23) > 1e-9) return t;
  }
}

Verdict graph_counts() {
  using Counts = std::array<int, kNumModels>;
  const std::array<const char*, 4> names = {"dag", "dag-bk", "dmag", "dmag-bk"};
  const std::array<Counts, 4> reference = {{{6, 1, 1, 1, 3, 3, 3, 2, 2, 2, 1},
                                            {2, 1, 0, 1, 1, 1, 1, 2, 1, 1, 1},
                                            {19, 3, 3, 3, 5, 5, 5, 3, 3, 3, 1},
                                            {3, 2, 0, 2, 1, 1, 1, 3, 1, 1, 1}}};
  const auto t0 = Clock::now();
  bool ok = true;
  std::string detail = "totals";
  std::string mismatches;
  for (int c = 0; c < 4; ++c) {
    const Counts counts = class_counts(named_prior_spec(names[c]));
    int total = 0, expected = 0;
    for (int j = 0; j < kNumModels; ++j) {
      total += counts[j];
      expected += reference[c][j];
      if (counts[j] != reference[c][j]) {
        ok = false;
        mismatches += fmt(" %s/M%d=%d(expected %d)", names[c], j, counts[j], reference[c][j]);
      }
    }
    detail += fmt(" %s=%d/%d", names[c], total, expected);
  }
  const double elapsed = seconds_since(t0);
  ok = ok && elapsed < 1.0;
  detail += fmt("; %.4f s", elapsed);
  if (!mismatches.empty()) detail += ";" + mismatches;
  return {ok, detail};
}

Verdict upper_bounds() {
  const double dmag = posterior_upper_bound<double>(112, 4.0, dmag_bk());
  const double dag = posterior_upper_bound<double>(112, 4.0, build_prior(named_prior_spec("dag-bk")));
  const bool ok = std::abs(dmag - 0.6909) <= 5e-4 && std::abs(dag - 0.7703) <= 5e-4;
  return {ok, fmt("DMAG-BK %.6f (target 0.6909), DAG-BK %.6f (target 0.7703)", dmag, dag)};
}

/// p(M6 | D) for data drawn from one generating model.
double chain_posterior(GeneratingModel model, NoiseKind noise, std::uint64_t seed, std::int64_t n) {
  const TripletData data = gen_triplet_data({model, noise, std::nullopt, seed}, n);
  const Eigen::MatrixXd r = column_correlations(data.x);
  BayesFactorVector<double> bf;
  if (!BayesFactorKernel<double>(n, 4.0).evaluate(r(0, 1), r(0, 2), r(1, 2), bf)) return 0.0;
  return posterior_over_models(bf, dmag_bk())[6];
}

std::vector<double> chain_posteriors(GeneratingModel model, NoiseKind noise, std::int64_t n, std::uint64_t base) {
  std::vector<double> out;
  for (std::uint64_t rep = 0; rep < 200; ++rep) out.push_back(chain_posterior(model, noise, base + rep, n));
  return out;
}

Verdict consistency() {
  const auto t0 = Clock::now();
  std::vector<double> causal;
  for (std::int64_t n : {100, 1000, 10000}) {
    causal.push_back(median(chain_posteriors(GeneratingModel::kCausal, NoiseKind::kGaussian, n, 1000)));
  }
  const double bound = posterior_upper_bound<double>(10000, 4.0, dmag_bk());
  const double indep = median(chain_posteriors(GeneratingModel::kIndependent, NoiseKind::kGaussian, 100000, 2000));
  const double full = median(chain_posteriors(GeneratingModel::kFull, NoiseKind::kGaussian, 100000, 3000));
  const bool monotone = causal[0] <= causal[1] && causal[1] <= causal[2];
  const bool ok = monotone && causal[2] >= 0.9 * bound && indep <= 0.05 && full <= 0.05;
  return {ok, fmt("causal medians %.4f, %.4f, %.4f (need >= %.4f at 1e4); independent %.2e, full %.2e at 1e5; %.1f s",
                  causal[0], causal[1], causal[2], 0.9 * bound, indep, full, seconds_since(t0))};
}

Verdict bernoulli() {
  const double med = median(chain_posteriors(GeneratingModel::kCausal, NoiseKind::kBernoulli, 100000, 4000));
  const double bound = posterior_upper_bound<double>(100000, 4.0, dmag_bk());
  return {med >= 0.8 * bound, fmt("causal median %.4f at n=1e5 (need >= %.4f)", med, 0.8 * bound)};
}

/// Random covariance from a linear SEM over a DAG in the model's class, with
/// random coefficients and per-variable scale.
Eigen::Matrix3d random_covariance(const CausalGraph3& g, Rng& rng) {
  auto coef = [&rng] { return (rng.bernoulli(0.5) ? 1.0 : -1.0) * rng.uniform(0.3, 2.0); };
  Eigen::Matrix3d b = Eigen::Matrix3d::Zero();
  for (int from = 0; from < 3; ++from) {
    for (int to = 0; to < 3; ++to) {
      if (from != to && g.directed(from, to)) b(to, from) = coef();
    }
  }
  const Eigen::Vector3d noise(rng.uniform(0.2, 3.0), rng.uniform(0.2, 3.0), rng.uniform(0.2, 3.0));
  const Eigen::Matrix3d t = (Eigen::Matrix3d::Identity() - b).inverse();
  const Eigen::Vector3d scale(std::exp(rng.uniform(-3, 3)), std::exp(rng.uniform(-3, 3)), std::exp(rng.uniform(-3, 3)));
  return scale.asDiagonal() * (t * noise.asDiagonal() * t.transpose()) * scale.asDiagonal();
}

Verdict lemma() {
  int consistent = 0;
  bool bijective = true;
  for (int code = 0; code < 64; ++code) {
    const ZeroPattern z = ZeroPattern::from_code(code);
    if (!is_consistent(z)) continue;
    ++consistent;
    const auto id = model_from_pattern(z);
    bijective = bijective && id && implied_pattern(*id) == z;
  }
  std::array<std::vector<CausalGraph3>, kNumModels> members;
  for (const auto& g : enumerate_graphs(named_prior_spec("dag"))) members[index(ci_model_of(g))].push_back(g);

  Rng rng(5);
  int wrong = 0, total = 0;
  for (int j = 0; j < kNumModels; ++j) {
    for (int rep = 0; rep < 1000; ++rep) {
      const auto& pool = members[j];
      const CausalGraph3& g = pool[rng.below(pool.size())];
      const auto got = classify_zero_pattern<double>(random_covariance(g, rng));
      wrong += got != model_from_index(j) ? 1 : 0;
      ++total;
    }
  }
  const bool ok = consistent == 11 && bijective && wrong == 0;
  return {ok, fmt("%d of 64 patterns consistent, one-to-one with models: %s; %d/%d random matrices misclassified",
                  consistent, bijective ? "yes" : "no", wrong, total)};
}

Verdict bound_dominance() {
  Rng rng(6);
  int violations = 0;
  double worst = -1.0;
  for (std::int64_t n : {10, 100, 1000}) {
    const double bound = posterior_upper_bound<double>(n, 4.0, dmag_bk());
    for (int rep = 0; rep < 10000; ++rep) {
      TripletCorrelation<double> t = random_triplet(rng, n);
      if (rep % 2) t.r13 = t.r12 * t.r23 + rng.uniform(-1e-3, 1e-3);  // near the maximizer
      BayesFactorVector<double> bf;
      if (!BayesFactorKernel<double>(n, 4.0).evaluate(t.r12, t.r13, t.r23, bf)) continue;
      const double p = posterior_over_models(bf, dmag_bk())[6];
      worst = std::max(worst, p - bound);
      violations += p > bound + 1e-12 ? 1 : 0;
    }
  }
  return {violations == 0, fmt("%d violations over 30000 triplets; max p6 - bound = %.3e", violations, worst)};
}

Verdict equivariance() {
  constexpr std::array<std::array<int, 3>, 6> perms = {
      {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  Rng rng(7);
  double perm_dev = 0.0;
  for (int rep = 0; rep < 1000; ++rep) {
    const auto t = random_triplet(rng, 3 + static_cast<std::int64_t>(rng.below(100000)));
    const auto bf = compute_log_bayes_factors(t);
    for (const auto& perm : perms) {
      const auto moved = compute_log_bayes_factors(t.permuted(perm));
      for (int j = 0; j < kNumModels; ++j) {
        perm_dev = std::max(perm_dev, std::abs(moved[index(permute(model_from_index(j), perm))] - bf[j]));
      }
    }
  }
  double scale_dev = 0.0;
  for (int rep = 0; rep < 200; ++rep) {
    const TripletData data = gen_triplet_data({GeneratingModel::kFull, NoiseKind::kGaussian, std::nullopt,
                                               static_cast<std::uint64_t>(rep)}, 300);
    Eigen::Vector3d d;
    for (int c = 0; c < 3; ++c) d[c] = std::exp(rng.uniform(-5, 5));
    const Eigen::MatrixXd scaled = data.x * d.asDiagonal();
    const Eigen::MatrixXd ra = column_correlations(data.x), rb = column_correlations(scaled);
    const auto pa = posterior_over_models(compute_log_bayes_factors(TripletCorrelation<double>{ra(0, 1), ra(0, 2), ra(1, 2), 300}), dmag_bk());
    const auto pb = posterior_over_models(compute_log_bayes_factors(TripletCorrelation<double>{rb(0, 1), rb(0, 2), rb(1, 2), 300}), dmag_bk());
    scale_dev = std::max(scale_dev, (pa - pb).cwiseAbs().maxCoeff());
  }
  return {perm_dev <= 1e-12 && scale_dev <= 1e-10,
          fmt("max permutation deviation %.3e (log space), max posterior deviation under rescaling %.3e", perm_dev,
              scale_dev)};
}

Verdict oracle_equivalence() {
  Rng rng(8);
  double worst = 0.0;
  for (int rep = 0; rep < 1000; ++rep) {
    const std::int64_t n = 3 + static_cast<std::int64_t>(rng.below(100000));
    const double nu = rep % 4 == 0 ? rng.uniform(2.1, 20.0) : 4.0;
    auto t = random_triplet(rng, n);
    t.nu = nu;
    const auto bf = compute_log_bayes_factors(t);
    const auto ref = oracle::log_bayes_factors(t.r12, t.r13, t.r23, n, nu);
    for (int j = 0; j < kNumModels; ++j) {
      worst = std::max(worst, std::abs(bf[j] - ref[j]) / std::max(1.0, std::abs(ref[j])));
    }
  }
  return {worst <= 1e-10, fmt("max relative log-space deviation %.3e over 1000 triplets", worst)};
}

JointCorrelation grn_correlation(const GrnModel& model, const GrnSpec& spec, std::int64_t n) {
  const GrnSample s = sample_grn_data(model, spec, n);
  ExpressionDataset d{s.markers, s.traits, std::vector<std::string>(static_cast<std::size_t>(spec.l), "L"),
                      std::vector<std::string>(static_cast<std::size_t>(spec.m), "T")};
  // A marker that never varies has no correlation; nudge it like a missing
  // genotype call would be dropped in practice.
  for (Eigen::Index k = 0; k < d.l(); ++k) {
    if ((d.markers.col(k).array() == d.markers(0, k)).all()) d.markers(0, k) = 1.0 - d.markers(0, k);
  }
  return correlation_matrix(d);
}

Verdict grn_pipeline() {
  const auto t0 = Clock::now();
  const GrnSpec spec = GrnSpec::sparse(1);
  const GrnModel model = gen_grn(spec);
  const auto prior = dmag_bk();
  ScanOptions loc;
  loc.strategy = ScanStrategy::kLocalLinkage;

  const JointCorrelation c100 = grn_correlation(model, spec, 100);
  const JointCorrelation c1000 = grn_correlation(model, spec, 1000);
  const double auc100 = roc_auc(labeled_scores(full_scan(c100, prior).prob, model.truth.direct)).auc;
  const double auc1000 = roc_auc(labeled_scores(full_scan(c1000, prior).prob, model.truth.direct)).auc;
  const double loc100 = roc_auc(labeled_scores(full_scan(c100, prior, loc).prob, model.truth.direct)).auc;
  const bool ok = auc1000 >= auc100 && auc1000 >= 0.7 && auc100 >= loc100;
  return {ok, fmt("%lld direct edges; AUC n=100 %.4f, n=1000 %.4f; local-linkage n=100 %.4f; %.1f s",
                  static_cast<long long>(model.truth.direct.count()), auc100, auc1000, loc100, seconds_since(t0))};
}

double min_scan_seconds(const JointCorrelation& corr, int repeats) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const auto t0 = Clock::now();
    const ScanResult res = full_scan(corr, dmag_bk());
    best = std::min(best, seconds_since(t0));
    if (res.prob(0, 1) < 0) std::puts("");  // keep the result alive
  }
  return best;
}

Verdict performance() {
  GrnSpec spec = GrnSpec::sparse(2);
  const GrnModel model = gen_grn(spec);
  const JointCorrelation small_n = grn_correlation(model, spec, 100);
  const JointCorrelation large_n = grn_correlation(model, spec, 100000);
  GrnSpec wide = spec;
  wide.m = 200;
  wide.edge_count_target = 54.0 * 4;
  const GrnModel wide_model = gen_grn(wide);
  const JointCorrelation wide_corr = grn_correlation(wide_model, wide, 100);

  const double t_small = min_scan_seconds(small_n, 5);
  const double t_large = min_scan_seconds(large_n, 5);
  const double t_wide = min_scan_seconds(wide_corr, 3);
  const double n_ratio = std::abs(t_large - t_small) / t_small;
  const double m_factor = t_wide / t_small;

  ScanOptions scalar;
  scalar.inner_loop = InnerLoop::kScalar;
  const ScanResult batch_res = full_scan(small_n, dmag_bk());
  const ScanResult scalar_res = full_scan(small_n, dmag_bk(), scalar);
  double log_dev = 0.0;
  for (Eigen::Index i = 0; i < batch_res.m(); ++i) {
    for (Eigen::Index j = 0; j < batch_res.m(); ++j) {
      if (i != j) log_dev = std::max(log_dev, std::abs(std::log(batch_res.prob(i, j)) - std::log(scalar_res.prob(i, j))));
    }
  }
  const bool ok = t_small <= 5.0 && n_ratio <= 0.10 && m_factor >= 3.0 && m_factor <= 5.5 && log_dev <= 1e-12;
  return {ok, fmt("m=l=100 scan %.3f s; n=1e5 scan %.3f s (%.1f%% difference); m=200 factor %.2f; batch/scalar "
                  "max log deviation %.1e",
                  t_small, t_large, 100.0 * n_ratio, m_factor, log_dev)};
}

Verdict calibration() {
  Rng rng(11);
  LabeledScores s;
  for (int k = 0; k < 10000; ++k) {
    const double p = rng.uniform();
    s.push_back({p, rng.bernoulli(p)});
  }
  double worst = 0.0;
  std::string detail;
  for (const auto& b : calibration_table(s, 5)) {
    worst = std::max(worst, std::abs(b.mean_score - b.event_rate));
    detail += fmt(" %.3f/%.3f", b.mean_score, b.event_rate);
  }
  return {worst <= 0.05, fmt("max |midpoint - observed| %.4f; bins (mean/observed):%s", worst, detail.c_str())};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"graph counts per CI model", graph_counts},
      {"posterior upper bounds at n=112", upper_bounds},
      {"consistency experiment (Gaussian)", consistency},
      {"Bernoulli X1 robustness", bernoulli},
      {"zero-pattern lemma and classifier", lemma},
      {"bound dominance", bound_dominance},
      {"permutation equivariance and scale invariance", equivariance},
      {"high-precision oracle equivalence", oracle_equivalence},
      {"GRN pipeline ROC", grn_pipeline},
      {"performance contract", performance},
      {"calibration machinery", calibration},
  };
  int failed = 0;
  for (std::size_t c = 0; c < criteria.size(); ++c) {
    Verdict v{false, ""};
    try {
      v = criteria[c].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failed += v.pass ? 0 : 1;
    std::printf("%s  %2zu  %s: %s\n", v.pass ? "PASS" : "FAIL", c + 1, criteria[c].first, v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu of %zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
