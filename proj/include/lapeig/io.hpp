#pragma once

#include "lapeig/common.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace lapeig::io {

/// Matrix Market coordinate format, `real symmetric`, lower triangle stored.
void write_matrix_market(const std::string& path, const SparseMatrix& m);
SparseMatrix read_matrix_market(const std::string& path);

/// Matrix Market `array real general`, column-major.
void write_dense_matrix_market(const std::string& path, const Matrix& m);

/// One value per line, full precision.
void write_vector(const std::string& path, const Vector& v);
Vector read_vector(const std::string& path);

/// Minimal CSV table: a header row and numeric rows.
struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    int column(const std::string& name) const; // -1 if absent
    std::vector<double> values(const std::string& name) const;
};

CsvTable read_csv(const std::string& path);
CsvTable parse_csv(std::istream& in);

/// Shortest round-trip formatting for doubles.
std::string format_double(double v);

} // namespace lapeig::io
