#include "dpmix/csv.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "dpmix/errors.hpp"

namespace dpmix {

Eigen::MatrixXd ColumnTransform::apply(const Eigen::MatrixXd& raw) const {
  Eigen::MatrixXd out = raw;
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    out.col(j) = (out.col(j).array() - shift(j)) / scale(j);
  }
  return out;
}

Eigen::MatrixXd ColumnTransform::invert(const Eigen::MatrixXd& scaled) const {
  Eigen::MatrixXd out = scaled;
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    out.col(j) = out.col(j).array() * scale(j) + shift(j);
  }
  return out;
}

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

double parse_cell(const std::string& cell, int row, int col) {
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) {
    throw DataDomainError("ingest_csv: non-numeric cell at row " +
                          std::to_string(row) + ", column " + std::to_string(col));
  }
  return value;
}

}  // namespace

CsvData ingest_csv(const std::string& path, const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw DataDomainError("ingest_csv: cannot open " + path);

  std::vector<std::vector<std::string>> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (first && options.header) {
      first = false;
      continue;
    }
    first = false;
    if (trim(line).empty()) continue;
    rows.push_back(split_line(line));
  }
  if (rows.empty()) throw DataDomainError("ingest_csv: no data rows in " + path);

  int width = static_cast<int>(rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (static_cast<int>(rows[r].size()) != width) {
      throw DataDomainError("ingest_csv: row " + std::to_string(r + 1) +
                            " has " + std::to_string(rows[r].size()) +
                            " cells, expected " + std::to_string(width));
    }
  }

  std::vector<int> columns = options.columns;
  if (columns.empty()) {
    for (int c = 1; c <= width; ++c) {
      if (c != options.group_column) columns.push_back(c);
    }
  }
  if (columns.empty()) throw ConfigError("ingest_csv: empty column selection");
  for (int c : columns) {
    if (c < 1 || c > width) {
      throw ConfigError("ingest_csv: column " + std::to_string(c) +
                        " out of range 1.." + std::to_string(width));
    }
  }
  if (options.group_column != 0 &&
      (options.group_column < 1 || options.group_column > width)) {
    throw ConfigError("ingest_csv: group column " +
                      std::to_string(options.group_column) + " out of range");
  }

  CsvData out;
  out.data.resize(static_cast<Eigen::Index>(rows.size()),
                  static_cast<Eigen::Index>(columns.size()));
  std::map<std::string, int> group_index;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t j = 0; j < columns.size(); ++j) {
      int c = columns[j];
      out.data(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) =
          parse_cell(rows[r][static_cast<std::size_t>(c - 1)],
                     static_cast<int>(r + 1), c);
    }
    if (options.group_column != 0) {
      const std::string& key =
          rows[r][static_cast<std::size_t>(options.group_column - 1)];
      auto [it, inserted] =
          group_index.emplace(key, static_cast<int>(out.group_ids.size()));
      if (inserted) out.group_ids.push_back(key);
      out.group_of_row.push_back(it->second);
    }
  }

  Eigen::Index d = out.data.cols();
  out.transform.shift = Eigen::VectorXd::Zero(d);
  out.transform.scale = Eigen::VectorXd::Ones(d);
  if (options.standardize) {
    for (Eigen::Index j = 0; j < d; ++j) {
      double mean = out.data.col(j).mean();
      double var = (out.data.col(j).array() - mean).square().sum() /
                   static_cast<double>(out.data.rows() - 1);
      if (!(var > 0.0)) {
        throw DataDomainError("ingest_csv: column " +
                              std::to_string(columns[static_cast<std::size_t>(j)]) +
                              " is constant, cannot standardize");
      }
      out.transform.shift(j) = mean;
      out.transform.scale(j) = std::sqrt(var);
    }
    out.data = out.transform.apply(out.data);
  }
  return out;
}

std::vector<Eigen::MatrixXd> split_groups(const CsvData& csv) {
  if (csv.group_of_row.empty()) {
    throw ConfigError("split_groups: no group column was ingested");
  }
  std::vector<int> counts(csv.group_ids.size(), 0);
  for (int g : csv.group_of_row) ++counts[static_cast<std::size_t>(g)];
  std::vector<Eigen::MatrixXd> groups;
  for (int c : counts) {
    groups.emplace_back(c, csv.data.cols());
  }
  std::vector<int> cursor(csv.group_ids.size(), 0);
  for (Eigen::Index r = 0; r < csv.data.rows(); ++r) {
    int g = csv.group_of_row[static_cast<std::size_t>(r)];
    groups[static_cast<std::size_t>(g)].row(cursor[static_cast<std::size_t>(g)]++) =
        csv.data.row(r);
  }
  return groups;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns) {
  std::ofstream out(path);
  if (!out) throw DataDomainError("write_csv: cannot open " + path);
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (j) out << ',';
    out << header[j];
  }
  out << '\n';
  std::size_t n = columns.empty() ? 0 : columns.front().size();
  char buf[64];
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < columns.size(); ++j) {
      if (j) out << ',';
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), columns[j][i]);
      out.write(buf, ptr - buf);
      (void)ec;
    }
    out << '\n';
  }
}

}  // namespace dpmix
