#include "tailfield/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include <json.hpp>

namespace tailfield {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

namespace {

double parse_double(const std::string& token, std::size_t row, std::size_t col) {
  double value = 0.0;
  const char* begin = token.data();
  const char* end = begin + token.size();
  while (begin != end && (*begin == ' ' || *begin == '\t')) ++begin;
  while (end != begin && (*(end - 1) == ' ' || *(end - 1) == '\t' || *(end - 1) == '\r')) --end;
  const auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc{} || res.ptr != end) {
    std::ostringstream msg;
    msg << "CSV parse error at row " << row + 1 << ", column " << col + 1 << ": '" << token << "'";
    throw io_error(msg.str());
  }
  return value;
}

std::vector<std::vector<double>> read_numeric_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open file: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t row_idx = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") {
      ++row_idx;
      continue;
    }
    std::vector<double> row;
    std::size_t start = 0;
    std::size_t col_idx = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      const std::string token =
          (comma == std::string::npos) ? line.substr(start) : line.substr(start, comma - start);
      row.push_back(parse_double(token, row_idx, col_idx));
      ++col_idx;
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    rows.push_back(std::move(row));
    ++row_idx;
  }
  return rows;
}

}  // namespace

void write_sample_csv(const std::string& path, const FunctionalSample& sample) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot open file for writing: " + path);
  const int m = sample.grid.points();
  for (int j = 0; j < m; ++j) {
    if (j) out << ',';
    out << format_double(sample.grid.locations[j]);
  }
  out << '\n';
  for (int i = 0; i < sample.n(); ++i) {
    for (int j = 0; j < m; ++j) {
      if (j) out << ',';
      out << format_double(sample.values(i, j));
    }
    out << '\n';
  }
  if (!out) throw io_error("write failed: " + path);
}

FunctionalSample read_sample_csv(const std::string& path) {
  const auto rows = read_numeric_csv(path);
  if (rows.size() < 2) throw io_error("sample CSV needs a grid header and at least one row: " + path);
  const std::size_t m = rows[0].size();
  FunctionalSample sample;
  sample.grid = Grid(rows[0]);
  sample.values = Matrix(rows.size() - 1, m);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].size() != m) {
      std::ostringstream msg;
      msg << "CSV parse error at row " << i + 1 << ": expected " << m << " columns, got "
          << rows[i].size();
      throw io_error(msg.str());
    }
    for (std::size_t j = 0; j < m; ++j) sample.values(i - 1, j) = rows[i][j];
  }
  sample.model_tag = "file";
  sample.check_valid();
  return sample;
}

void write_sample_metadata(const std::string& path, const FunctionalSample& sample) {
  nlohmann::json meta;
  meta["model"] = sample.model_tag;
  meta["seed"] = sample.seed;
  meta["n"] = sample.n();
  meta["grid_points"] = sample.grid.points();
  meta["grid"] = sample.grid.locations;
  std::ofstream out(path);
  if (!out) throw io_error("cannot open file for writing: " + path);
  out << meta.dump(2) << '\n';
  if (!out) throw io_error("write failed: " + path);
}

void write_matrix_csv(const std::string& path, const Matrix& m,
                      const std::vector<std::string>& header) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot open file for writing: " + path);
  if (!header.empty()) {
    for (std::size_t j = 0; j < header.size(); ++j) {
      if (j) out << ',';
      out << header[j];
    }
    out << '\n';
  }
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
  if (!out) throw io_error("write failed: " + path);
}

std::string metadata_path_for(const std::string& csv_path) {
  const std::size_t dot = csv_path.rfind('.');
  if (dot == std::string::npos || csv_path.substr(dot) != ".csv")
    return csv_path + ".meta.json";
  return csv_path.substr(0, dot) + ".meta.json";
}

}  // namespace tailfield
