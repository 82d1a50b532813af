#pragma once

// Scoring of regulation probabilities against a known edge set: ROC and
// precision-recall curves, and binned calibration tables.

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "bfcs/sim.hpp"

namespace bfcs {

struct LabeledScore {
  double score = 0.0;
  bool label = false;
};

using LabeledScores = std::vector<LabeledScore>;

/// One entry per ordered pair (i, j), i != j, in row-major order.
LabeledScores labeled_scores(const Eigen::MatrixXd& prob, const BoolMatrix& truth);

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  double threshold = 0.0;
};

struct PrPoint {
  double recall = 0.0;
  double precision = 0.0;
  double threshold = 0.0;
};

struct RocCurve {
  std::vector<RocPoint> points;  // starts at (0, 0), one point per distinct score
  double auc = 0.0;
};

struct PrCurve {
  std::vector<PrPoint> points;  // one point per distinct score, descending
  double auc = 0.0;
};

/// AUC is the Mann-Whitney statistic with ties counted one half.
RocCurve roc_auc(const LabeledScores& s);

/// AUC by right-continuous step integration: sum of dRecall * precision.
PrCurve pr_auc(const LabeledScores& s);

enum class Binning {
  kEqualCount,  // sort, then split into equal-size groups
  kEqualWidth,  // [0, 1] split into equal intervals
};

struct CalibrationBin {
  double mean_score = 0.0;
  double event_rate = 0.0;
  std::size_t count = 0;
};

/// Equal-count bins put the remainder into the leading bins. Equal-width
/// bins can be empty; their means are NaN.
std::vector<CalibrationBin> calibration_table(const LabeledScores& s, std::size_t bins = 5,
                                              Binning binning = Binning::kEqualCount);

}  // namespace bfcs
