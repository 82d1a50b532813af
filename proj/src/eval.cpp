#include "bfcs/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "bfcs/errors.hpp"

namespace bfcs {

namespace {

struct ClassTotals {
  std::size_t positives = 0;
  std::size_t negatives = 0;
};

ClassTotals totals(const LabeledScores& s) {
  ClassTotals t;
  for (const auto& x : s) {
    if (!std::isfinite(x.score)) throw DomainError("scores must be finite");
    (x.label ? t.positives : t.negatives) += 1;
  }
  return t;
}

/// Indices sorted by descending score; equal scores stay in input order.
std::vector<std::size_t> descending_order(const LabeledScores& s) {
  std::vector<std::size_t> idx(s.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return s[a].score > s[b].score; });
  return idx;
}

}  // namespace

LabeledScores labeled_scores(const Eigen::MatrixXd& prob, const BoolMatrix& truth) {
  if (prob.rows() != prob.cols() || truth.rows() != prob.rows() || truth.cols() != prob.cols()) {
    throw DomainError("probability and truth matrices must be square and the same size");
  }
  LabeledScores out;
  out.reserve(static_cast<std::size_t>(prob.rows() * (prob.rows() - 1)));
  for (Eigen::Index i = 0; i < prob.rows(); ++i) {
    for (Eigen::Index j = 0; j < prob.cols(); ++j) {
      if (i != j) out.push_back({prob(i, j), truth(i, j)});
    }
  }
  return out;
}

RocCurve roc_auc(const LabeledScores& s) {
  const ClassTotals t = totals(s);
  if (t.positives == 0 || t.negatives == 0) throw DomainError("ROC needs both positive and negative labels");
  const auto idx = descending_order(s);

  RocCurve curve;
  curve.points.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
  std::size_t tp = 0, fp = 0;
  double pairs_won = 0.0;  // positive-over-negative pairs, ties count 1/2
  for (std::size_t a = 0; a < idx.size();) {
    const double score = s[idx[a]].score;
    std::size_t pos = 0, neg = 0;
    std::size_t b = a;
    for (; b < idx.size() && s[idx[b]].score == score; ++b) (s[idx[b]].label ? pos : neg) += 1;
    pairs_won += static_cast<double>(neg) * (static_cast<double>(tp) + 0.5 * static_cast<double>(pos));
    tp += pos;
    fp += neg;
    curve.points.push_back({static_cast<double>(fp) / static_cast<double>(t.negatives),
                            static_cast<double>(tp) / static_cast<double>(t.positives), score});
    a = b;
  }
  curve.auc = pairs_won / (static_cast<double>(t.positives) * static_cast<double>(t.negatives));
  return curve;
}

PrCurve pr_auc(const LabeledScores& s) {
  const ClassTotals t = totals(s);
  if (t.positives == 0) throw DomainError("precision-recall needs at least one positive label");
  const auto idx = descending_order(s);

  PrCurve curve;
  std::size_t tp = 0, seen = 0;
  double previous_recall = 0.0;
  for (std::size_t a = 0; a < idx.size();) {
    const double score = s[idx[a]].score;
    std::size_t b = a;
    for (; b < idx.size() && s[idx[b]].score == score; ++b) {
      if (s[idx[b]].label) ++tp;
      ++seen;
    }
    const double recall = static_cast<double>(tp) / static_cast<double>(t.positives);
    const double precision = static_cast<double>(tp) / static_cast<double>(seen);
    curve.auc += (recall - previous_recall) * precision;
    previous_recall = recall;
    curve.points.push_back({recall, precision, score});
    a = b;
  }
  return curve;
}

std::vector<CalibrationBin> calibration_table(const LabeledScores& s, std::size_t bins, Binning binning) {
  if (bins < 1) throw DomainError("calibration needs at least one bin");
  totals(s);
  std::vector<CalibrationBin> table(bins);

  if (binning == Binning::kEqualCount) {
    if (s.size() < bins) throw DomainError("fewer scored pairs than calibration bins");
    std::vector<std::size_t> idx(s.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return s[a].score < s[b].score; });
    const std::size_t base = s.size() / bins;
    const std::size_t extra = s.size() % bins;
    std::size_t pos = 0;
    for (std::size_t b = 0; b < bins; ++b) {
      const std::size_t size = base + (b < extra ? 1 : 0);
      double score_sum = 0.0, events = 0.0;
      for (std::size_t k = 0; k < size; ++k, ++pos) {
        score_sum += s[idx[pos]].score;
        events += s[idx[pos]].label ? 1.0 : 0.0;
      }
      table[b] = {score_sum / static_cast<double>(size), events / static_cast<double>(size), size};
    }
    return table;
  }

  std::vector<double> score_sum(bins, 0.0), events(bins, 0.0);
  for (const auto& x : s) {
    const double clamped = std::clamp(x.score, 0.0, 1.0);
    const auto b = std::min(bins - 1, static_cast<std::size_t>(clamped * static_cast<double>(bins)));
    score_sum[b] += x.score;
    events[b] += x.label ? 1.0 : 0.0;
    ++table[b].count;
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t b = 0; b < bins; ++b) {
    const auto c = static_cast<double>(table[b].count);
    table[b].mean_score = table[b].count ? score_sum[b] / c : nan;
    table[b].event_rate = table[b].count ? events[b] / c : nan;
  }
  return table;
}

}  // namespace bfcs
