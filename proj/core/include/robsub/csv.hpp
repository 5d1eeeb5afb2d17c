#pragma once

#include <string>

#include "robsub/matcore.hpp"

namespace robsub {

// Matrix CSV: one row per matrix row, columns are samples, optional
// leading "# n=<n> m=<m>" line. Values are written in shortest round-trip form.
Mat parse_matrix_csv(const std::string& text);
std::string format_matrix_csv(const Mat& a, bool header = true);

Mat read_matrix_csv(const std::string& path);
void write_matrix_csv(const std::string& path, const Mat& a, bool header = true);

}  // namespace robsub
