#pragma once

// Text interchange for dense complex matrices: the first line holds the
// dimension d, followed by d rows of d whitespace-separated `re,im` pairs.
// A vector file is the same with one pair per row. Blank lines and lines
// starting with '#' are skipped.

#include <filesystem>
#include <istream>
#include <ostream>
#include <string>

#include "qfirob/linalg.hpp"

namespace qfirob {

// Malformed content throws ConfigError "<source>:<line>: reason".
CMatrix read_matrix(std::istream& in, const std::string& source);
CVector read_vector(std::istream& in, const std::string& source);

// IoError when the file cannot be opened.
CMatrix load_matrix(const std::filesystem::path& path);
CVector load_vector(const std::filesystem::path& path);

// Round-trip-safe (17 significant digits).
void write_matrix(std::ostream& out, const CMatrix& m);
void write_vector(std::ostream& out, const CVector& v);

}  // namespace qfirob
