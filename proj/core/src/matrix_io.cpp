#include "qfirob/matrix_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "qfirob/error.hpp"

namespace qfirob {

namespace {

class LineReader {
 public:
  LineReader(std::istream& in, const std::string& source)
      : in_(in), source_(source) {}

  // Next non-blank, non-comment line; false at end of input.
  bool next(std::string& line) {
    while (std::getline(in_, line)) {
      ++line_no_;
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos || line[first] == '#') continue;
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& reason) const {
    throw Error(ErrorKind::ConfigError,
                source_ + ":" + std::to_string(line_no_) + ": " + reason);
  }

 private:
  std::istream& in_;
  const std::string& source_;
  int line_no_ = 0;
};

bool parse_real(std::string_view text, double& out) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size() &&
         !text.empty() && std::isfinite(out);
}

Index read_dim(LineReader& reader) {
  std::string line;
  if (!reader.next(line)) reader.fail("missing dimension line");
  std::istringstream ss(line);
  long long dim = 0;
  std::string extra;
  if (!(ss >> dim) || (ss >> extra) || dim < 1) {
    reader.fail("dimension must be a single positive integer");
  }
  return static_cast<Index>(dim);
}

std::vector<Complex> read_row(LineReader& reader, Index expected, Index row) {
  std::string line;
  if (!reader.next(line)) {
    reader.fail("expected " + std::to_string(expected) + " more row(s)");
  }
  std::istringstream ss(line);
  std::vector<Complex> values;
  std::string token;
  while (ss >> token) {
    const auto comma = token.find(',');
    double re = 0.0, im = 0.0;
    if (comma == std::string::npos ||
        !parse_real(std::string_view(token).substr(0, comma), re) ||
        !parse_real(std::string_view(token).substr(comma + 1), im)) {
      reader.fail("row " + std::to_string(row) + ": '" + token +
                  "' is not a re,im pair");
    }
    values.emplace_back(re, im);
  }
  if (static_cast<Index>(values.size()) != expected) {
    reader.fail("row " + std::to_string(row) + " has " +
                std::to_string(values.size()) + " entries, expected " +
                std::to_string(expected));
  }
  return values;
}

void expect_end(LineReader& reader) {
  std::string line;
  if (reader.next(line)) reader.fail("trailing content after the last row");
}

std::string pair_text(Complex z) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g,%.17g", z.real(), z.imag());
  return buf;
}

}  // namespace

CMatrix read_matrix(std::istream& in, const std::string& source) {
  LineReader reader(in, source);
  const Index d = read_dim(reader);
  CMatrix m(d, d);
  for (Index i = 0; i < d; ++i) {
    const auto row = read_row(reader, d, i);
    for (Index j = 0; j < d; ++j) m(i, j) = row[static_cast<std::size_t>(j)];
  }
  expect_end(reader);
  return m;
}

CVector read_vector(std::istream& in, const std::string& source) {
  LineReader reader(in, source);
  const Index d = read_dim(reader);
  CVector v(d);
  for (Index i = 0; i < d; ++i) v(i) = read_row(reader, 1, i)[0];
  expect_end(reader);
  return v;
}

CMatrix load_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, path.string() + ": cannot open");
  return read_matrix(in, path.string());
}

CVector load_vector(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, path.string() + ": cannot open");
  return read_vector(in, path.string());
}

void write_matrix(std::ostream& out, const CMatrix& m) {
  out << m.rows() << '\n';
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      out << (j ? " " : "") << pair_text(m(i, j));
    }
    out << '\n';
  }
}

void write_vector(std::ostream& out, const CVector& v) {
  out << v.size() << '\n';
  for (Index i = 0; i < v.size(); ++i) out << pair_text(v(i)) << '\n';
}

}  // namespace qfirob
