#include "specreg/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "specreg/error.hpp"

namespace specreg::io {

namespace {

double parse_number(const std::string& cell, const std::filesystem::path& path, std::size_t line) {
  const auto first = cell.find_first_not_of(" \t\r");
  const auto last = cell.find_last_not_of(" \t\r");
  if (first == std::string::npos) {
    throw InvalidArgument("invalid input: empty cell in " + path.string() + " line " + std::to_string(line));
  }
  const std::string trimmed = cell.substr(first, last - first + 1);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(trimmed.c_str(), &end);
  if (end != trimmed.c_str() + trimmed.size() || errno == ERANGE) {
    throw InvalidArgument("invalid input: '" + trimmed + "' is not a number in " + path.string() +
                          " line " + std::to_string(line));
  }
  return v;
}

}  // namespace

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidArgument("cannot write " + path.string());
  out << text;
  if (!out) throw InvalidArgument("write failed for " + path.string());
}

Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path) {
  std::istringstream in(read_text(path));
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<double> row;
    std::stringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) row.push_back(parse_number(cell, path, line_no));
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw InvalidArgument("invalid input: ragged row at " + path.string() + " line " + std::to_string(line_no));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InvalidArgument("invalid input: " + path.string() + " is empty");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return m;
}

std::vector<double> read_vector_csv(const std::filesystem::path& path) {
  const auto m = read_matrix_csv(path);
  if (m.cols() != 1 && m.rows() != 1) {
    throw InvalidArgument("invalid input: " + path.string() + " must hold a single row or column");
  }
  return {m.data(), m.data() + m.size()};
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace specreg::io
