#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <string>
#include <vector>

namespace specreg::io {

// Row-major numeric CSV without header. Rows must all have the same width.
Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path);
// A vector stored either as one column or as one row.
std::vector<double> read_vector_csv(const std::filesystem::path& path);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

// %.17g: round-trips every double.
std::string format_double(double v);

}  // namespace specreg::io
