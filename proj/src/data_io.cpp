#include "bfcs/data_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "bfcs/errors.hpp"

namespace bfcs {

namespace {

std::vector<std::string_view> split(std::string_view line, char delimiter) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(delimiter, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.remove_suffix(1);
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  return s;
}

}  // namespace

std::string format_double(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

NamedMatrix read_table(const std::filesystem::path& path, const FormatOptions& options) {
  std::ifstream in(path);
  if (!in) throw DataError(path.string() + ": cannot open file");

  std::string line;
  if (!std::getline(in, line)) throw DataError(path.string() + ": empty file");
  NamedMatrix table;
  for (auto name : split(line, options.delimiter)) table.names.emplace_back(trim(name));
  const std::size_t cols = table.names.size();

  std::vector<double> cells;
  std::size_t rows = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split(line, options.delimiter);
    if (fields.size() != cols) {
      throw DataError(path.string() + ": row " + std::to_string(line_no) + " has " +
                      std::to_string(fields.size()) + " fields, expected " + std::to_string(cols));
    }
    for (std::size_t c = 0; c < cols; ++c) {
      const std::string_view cell = trim(fields[c]);
      const std::string where = path.string() + ": row " + std::to_string(line_no) + ", column '" +
                                table.names[c] + "'";
      if (cell.empty() || cell == "NA" || cell == "NaN" || cell == "nan") {
        throw DataError(where + ": missing value");
      }
      double value = 0.0;
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), value);
      if (res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
        throw DataError(where + ": non-numeric value '" + std::string(cell) + "'");
      }
      if (!std::isfinite(value)) throw DataError(where + ": non-finite value");
      cells.push_back(value);
    }
    ++rows;
  }

  table.values.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      table.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = cells[r * cols + c];
    }
  }
  return table;
}

void write_table(const std::filesystem::path& path, const NamedMatrix& table, const FormatOptions& options) {
  std::ofstream out(path);
  if (!out) throw DataError(path.string() + ": cannot open for writing");
  for (std::size_t c = 0; c < table.names.size(); ++c) {
    if (c) out << options.delimiter;
    out << table.names[c];
  }
  out << '\n';
  for (Eigen::Index r = 0; r < table.values.rows(); ++r) {
    for (Eigen::Index c = 0; c < table.values.cols(); ++c) {
      if (c) out << options.delimiter;
      out << format_double(table.values(r, c));
    }
    out << '\n';
  }
  if (!out) throw DataError(path.string() + ": write failed");
}

void validate(const ExpressionDataset& d) {
  if (d.markers.rows() != d.traits.rows()) {
    throw DataError("marker and trait tables have different sample counts (" +
                    std::to_string(d.markers.rows()) + " vs " + std::to_string(d.traits.rows()) + ")");
  }
  if (d.marker_names.size() != static_cast<std::size_t>(d.l()) ||
      d.trait_names.size() != static_cast<std::size_t>(d.m())) {
    throw DataError("column names do not match matrix widths");
  }
  if (d.n() < 2) throw DataError("at least two samples are required");
  auto check_columns = [](const Eigen::MatrixXd& x, const std::vector<std::string>& names, const char* what) {
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      if (!x.col(c).allFinite()) throw DataError(std::string(what) + " column '" + names[c] + "' has non-finite values");
      if ((x.col(c).array() == x(0, c)).all()) {
        throw DataError(std::string(what) + " column '" + names[c] + "' is constant");
      }
    }
  };
  check_columns(d.markers, d.marker_names, "marker");
  check_columns(d.traits, d.trait_names, "trait");
}

ExpressionDataset load_dataset(const std::filesystem::path& marker_path, const std::filesystem::path& trait_path,
                               const FormatOptions& options) {
  NamedMatrix markers = read_table(marker_path, options);
  NamedMatrix traits = read_table(trait_path, options);
  if (markers.values.rows() != traits.values.rows()) {
    throw DataError(marker_path.string() + " has " + std::to_string(markers.values.rows()) + " samples but " +
                    trait_path.string() + " has " + std::to_string(traits.values.rows()));
  }
  ExpressionDataset d{std::move(markers.values), std::move(traits.values), std::move(markers.names),
                      std::move(traits.names)};
  validate(d);
  return d;
}

Eigen::MatrixXd column_correlations(const Eigen::MatrixXd& x) {
  const double inv_n = 1.0 / static_cast<double>(x.rows());
  // Centre and scale each column to unit 1/n variance; the Gram matrix of
  // the scaled columns is then the correlation matrix.
  Eigen::MatrixXd z = x.rowwise() - x.colwise().mean();
  const Eigen::RowVectorXd scale = (z.colwise().squaredNorm() * inv_n).cwiseSqrt().cwiseInverse();
  z = z * scale.asDiagonal();

  const Eigen::Index p = x.cols();
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(p, p);
  r.selfadjointView<Eigen::Lower>().rankUpdate(z.transpose(), inv_n);
  r = r.selfadjointView<Eigen::Lower>();
  r = r.cwiseMax(-1.0).cwiseMin(1.0);
  r.diagonal().setOnes();
  return r;
}

JointCorrelation correlation_matrix(const ExpressionDataset& d) {
  validate(d);
  Eigen::MatrixXd joint(d.n(), d.l() + d.m());
  joint << d.markers, d.traits;
  return {column_correlations(joint), static_cast<std::int64_t>(d.n()), d.l(), d.m()};
}

}  // namespace bfcs
