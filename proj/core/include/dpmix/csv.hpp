#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

namespace dpmix {

/// Per-column affine transform applied during ingestion: model-scale value =
/// (raw - shift) / scale. Identity when standardization is off.
struct ColumnTransform {
  Eigen::VectorXd shift;
  Eigen::VectorXd scale;

  Eigen::MatrixXd apply(const Eigen::MatrixXd& raw) const;
  Eigen::MatrixXd invert(const Eigen::MatrixXd& scaled) const;
};

struct CsvOptions {
  std::vector<int> columns;  // 1-based; empty selects all columns
  int group_column = 0;      // 1-based; 0 means no grouping
  bool header = false;       // skip the first line
  bool standardize = false;  // per-column zero mean, unit s.d.
};

struct CsvData {
  Eigen::MatrixXd data;       // n x d, already transformed
  ColumnTransform transform;  // identity unless standardize was set
  std::vector<int> group_of_row;      // empty when no group column
  std::vector<std::string> group_ids; // distinct group keys, first-seen order
};

/// Reads a numeric CSV. Errors name the offending 1-based row and column;
/// header lines are not counted as data rows.
CsvData ingest_csv(const std::string& path, const CsvOptions& options);

/// Splits the rows of an ingested grouped CSV into one matrix per group, in
/// group_ids order.
std::vector<Eigen::MatrixXd> split_groups(const CsvData& csv);

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns);

}  // namespace dpmix
