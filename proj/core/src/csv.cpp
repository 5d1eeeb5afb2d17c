#include "robsub/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

#include "robsub/error.hpp"

namespace robsub {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_cell(const std::string& cell, std::size_t line) {
  const std::string t = trim(cell);
  double v = 0.0;
  const char* first = t.data();
  if (!t.empty() && t[0] == '+') ++first;
  auto res = std::from_chars(first, t.data() + t.size(), v);
  require(!t.empty() && res.ec == std::errc() && res.ptr == t.data() + t.size(), ErrorCode::IoError,
          "bad numeric cell '" + t + "' on line " + std::to_string(line));
  return v;
}

void parse_header(const std::string& line, long& n, long& m) {
  std::istringstream in(line.substr(1));
  std::string tok;
  while (in >> tok) {
    if (tok.rfind("n=", 0) == 0) n = std::stol(tok.substr(2));
    else if (tok.rfind("m=", 0) == 0) m = std::stol(tok.substr(2));
  }
}

}  // namespace

Mat parse_matrix_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::vector<double>> rows;
  long hn = -1, hm = -1;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t[0] == '#') {
      require(rows.empty(), ErrorCode::IoError, "comment line after data on line " + std::to_string(lineno));
      parse_header(t, hn, hm);
      continue;
    }
    std::vector<double> row;
    std::size_t start = 0;
    while (true) {
      const auto comma = t.find(',', start);
      row.push_back(parse_cell(t.substr(start, comma == std::string::npos ? std::string::npos : comma - start), lineno));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    require(rows.empty() || row.size() == rows.front().size(), ErrorCode::IoError,
            "ragged row on line " + std::to_string(lineno));
    rows.push_back(std::move(row));
  }
  require(!rows.empty(), ErrorCode::IoError, "matrix file has no rows");
  const Index n = static_cast<Index>(rows.size());
  const Index m = static_cast<Index>(rows.front().size());
  require(hn < 0 || hn == n, ErrorCode::IoError, "header row count disagrees with data");
  require(hm < 0 || hm == m, ErrorCode::IoError, "header column count disagrees with data");
  Mat a(n, m);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < m; ++j) a(i, j) = rows[i][j];
  return a;
}

std::string format_matrix_csv(const Mat& a, bool header) {
  std::string out;
  if (header) out += "# n=" + std::to_string(a.rows()) + " m=" + std::to_string(a.cols()) + "\n";
  char buf[64];
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      if (j) out += ',';
      auto res = std::to_chars(buf, buf + sizeof(buf), a(i, j));
      out.append(buf, res.ptr);
    }
    out += '\n';
  }
  return out;
}

Mat read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::IoError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_matrix_csv(ss.str());
}

void write_matrix_csv(const std::string& path, const Mat& a, bool header) {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorCode::IoError, "cannot write " + path);
  out << format_matrix_csv(a, header);
  require(static_cast<bool>(out), ErrorCode::IoError, "write failed for " + path);
}

}  // namespace robsub
