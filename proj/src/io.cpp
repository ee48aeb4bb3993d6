#include "lapeig/io.hpp"

#include <unsupported/Eigen/SparseExtra>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace lapeig::io {

void write_matrix_market(const std::string& path, const SparseMatrix& m)
{
    const Eigen::SparseMatrix<double, Eigen::ColMajor, int> lower = m.triangularView<Eigen::Lower>();
    if (!Eigen::saveMarket(lower, path, Eigen::Symmetric))
        throw std::runtime_error("cannot write " + path);
}

SparseMatrix read_matrix_market(const std::string& path)
{
    Eigen::SparseMatrix<double, Eigen::ColMajor, int> m;
    if (!Eigen::loadMarket(m, path))
        throw std::runtime_error("cannot read " + path);
    std::ifstream in(path);
    std::string banner;
    std::getline(in, banner);
    if (banner.find("symmetric") != std::string::npos) {
        const Eigen::SparseMatrix<double, Eigen::ColMajor, int> lower = m.triangularView<Eigen::Lower>();
        return SparseMatrix(lower.selfadjointView<Eigen::Lower>());
    }
    return SparseMatrix(m);
}

void write_dense_matrix_market(const std::string& path, const Matrix& m)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write " + path);
    out << "%%MatrixMarket matrix array real general\n" << m.rows() << " " << m.cols() << "\n";
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            out << format_double(m(i, j)) << "\n";
}

void write_vector(const std::string& path, const Vector& v)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write " + path);
    for (double x : v)
        out << format_double(x) << "\n";
}

Vector read_vector(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot read " + path);
    std::vector<double> values;
    double x;
    while (in >> x)
        values.push_back(x);
    return Eigen::Map<Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

int CsvTable::column(const std::string& name) const
{
    auto it = std::find(columns.begin(), columns.end(), name);
    return it == columns.end() ? -1 : static_cast<int>(it - columns.begin());
}

std::vector<double> CsvTable::values(const std::string& name) const
{
    const int c = column(name);
    if (c < 0)
        throw std::invalid_argument("missing columns: " + name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows)
        out.push_back(r.at(c));
    return out;
}

CsvTable read_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot read " + path);
    return parse_csv(in);
}

CsvTable parse_csv(std::istream& in)
{
    CsvTable t;
    std::string line;
    if (!std::getline(in, line))
        return t;
    std::istringstream header(line);
    for (std::string col; std::getline(header, col, ',');)
        t.columns.push_back(col);
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::vector<double> row;
        std::istringstream cells(line);
        for (std::string cell; std::getline(cells, cell, ',');)
            row.push_back(std::stod(cell));
        if (row.size() != t.columns.size())
            throw std::invalid_argument("ragged CSV row: " + line);
        t.rows.push_back(std::move(row));
    }
    return t;
}

std::string format_double(double v)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

} // namespace lapeig::io
