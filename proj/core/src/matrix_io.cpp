#include "reflsolve/matrix_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "reflsolve/errors.hpp"

namespace reflsolve {

DenseMatrix read_matrix(std::istream& in) {
  std::string line;
  while (std::getline(in, line) && line.find_first_not_of(" \t\r") == std::string::npos) {
  }
  std::istringstream header(line);
  long long rows = 0;
  long long cols = 0;
  if (!(header >> rows >> cols) || rows < 1 || cols < 1) {
    throw ConfigError("matrix file: expected header \"rows cols\" with positive counts");
  }

  std::vector<double> entries;
  entries.reserve(static_cast<std::size_t>(rows * cols));
  for (long long i = 0; i < rows; ++i) {
    if (!std::getline(in, line)) {
      throw ConfigError("matrix file: expected " + std::to_string(rows) + " rows, got " +
                        std::to_string(i));
    }
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      --i;
      continue;
    }
    std::istringstream row(line);
    double v = 0.0;
    long long count = 0;
    while (row >> v) {
      if (!std::isfinite(v)) throw ConfigError("matrix file: non-finite entry");
      entries.push_back(v);
      ++count;
    }
    if (!row.eof() || count != cols) {
      throw ConfigError("matrix file: row " + std::to_string(i) + " has malformed or " +
                        std::to_string(count) + " entries, expected " + std::to_string(cols));
    }
  }
  return DenseMatrix(static_cast<std::size_t>(rows), static_cast<std::size_t>(cols),
                     std::move(entries));
}

DenseMatrix read_matrix_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open matrix file " + path.string());
  return read_matrix(in);
}

Vector read_vector(std::istream& in) {
  const DenseMatrix m = read_matrix(in);
  if (m.rows() != 1 && m.cols() != 1) {
    throw ConfigError("vector file: expected a single row or a single column");
  }
  return Vector(m.entries().begin(), m.entries().end());
}

Vector read_vector_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open vector file " + path.string());
  return read_vector(in);
}

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_matrix(std::ostream& out, const DenseMatrix& a) {
  out << a.rows() << ' ' << a.cols() << '\n';
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto row = a.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out << ' ';
      out << format_double(row[j]);
    }
    out << '\n';
  }
}

void write_vector(std::ostream& out, std::span<const double> x) {
  out << x.size() << " 1\n";
  for (double v : x) out << format_double(v) << '\n';
}

}  // namespace reflsolve
