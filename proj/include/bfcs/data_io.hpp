#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace bfcs {

/// Samples in rows, named variables in columns.
struct NamedMatrix {
  Eigen::MatrixXd values;
  std::vector<std::string> names;
};

struct ExpressionDataset {
  Eigen::MatrixXd markers;  // n x l
  Eigen::MatrixXd traits;   // n x m
  std::vector<std::string> marker_names;
  std::vector<std::string> trait_names;

  Eigen::Index n() const { return markers.rows(); }
  Eigen::Index l() const { return markers.cols(); }
  Eigen::Index m() const { return traits.cols(); }
};

/// Pearson correlations over markers followed by traits.
struct JointCorrelation {
  Eigen::MatrixXd r;  // (l + m) x (l + m)
  std::int64_t n = 0;
  Eigen::Index l = 0;
  Eigen::Index m = 0;

  double marker_trait(Eigen::Index k, Eigen::Index i) const { return r(k, l + i); }
  double trait_trait(Eigen::Index i, Eigen::Index j) const { return r(l + i, l + j); }
};

struct FormatOptions {
  char delimiter = '\t';
};

/// Header row of names, then one sample per row. No quoting, no missing
/// cells. Errors name the file, row and column.
NamedMatrix read_table(const std::filesystem::path& path, const FormatOptions& options = {});

/// Writes shortest round-trip decimals, so reloading is bit-exact.
void write_table(const std::filesystem::path& path, const NamedMatrix& table,
                 const FormatOptions& options = {});

/// Loads both files and checks shapes and zero-variance columns.
ExpressionDataset load_dataset(const std::filesystem::path& marker_path,
                               const std::filesystem::path& trait_path,
                               const FormatOptions& options = {});

/// Throws DataError on mismatched rows, non-finite values or constant columns.
void validate(const ExpressionDataset& d);

/// Column correlations with the 1/n (mean-centred scatter) convention.
JointCorrelation correlation_matrix(const ExpressionDataset& d);

/// Correlations of the columns of a single matrix, same convention.
Eigen::MatrixXd column_correlations(const Eigen::MatrixXd& x);

/// Shortest decimal that parses back to the same double (at most 17
/// significant digits).
std::string format_double(double value);

}  // namespace bfcs
