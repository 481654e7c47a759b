#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ntkspectra/errors.hpp"
#include "ntkspectra/linalg.hpp"

namespace ntkspectra {

// Shortest-exact float formatting: 17 significant digits round-trip doubles.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline double parse_double(const std::string& cell, long line, long column) {
    std::size_t pos = 0;
    double v;
    try {
        v = std::stod(cell, &pos);
    } catch (const std::exception&) {
        throw ParseError("not a number: '" + cell + "'", line, column);
    }
    while (pos < cell.size() && (cell[pos] == ' ' || cell[pos] == '\r')) ++pos;
    if (pos != cell.size()) throw ParseError("trailing garbage: '" + cell + "'", line, column);
    return v;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

// Matrix CSV: one row per line, comma-separated, no header.
inline void save_matrix_csv(const std::string& path, const Matrix& m) {
    std::ofstream out(path);
    if (!out) throw IOError("cannot open for writing: " + path);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) out << ',';
            out << format_double(m(i, j));
        }
        out << '\n';
    }
}

inline Matrix load_matrix_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IOError("cannot open: " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        const auto cells = split_csv_line(line);
        std::vector<double> row;
        row.reserve(cells.size());
        for (std::size_t c = 0; c < cells.size(); ++c)
            row.push_back(parse_double(cells[c], lineno, static_cast<long>(c) + 1));
        if (!rows.empty() && row.size() != rows.front().size())
            throw ParseError("ragged row", lineno, 1);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError("empty matrix file: " + path, 0, 0);
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows.front().size(); ++j)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return m;
}

inline void save_vector_csv(const std::string& path, const Vector& v) {
    save_matrix_csv(path, Matrix(v));
}

inline Vector load_vector_csv(const std::string& path) {
    const Matrix m = load_matrix_csv(path);
    if (m.cols() != 1) throw ParseError("expected a single-column vector file: " + path, 1, 2);
    return m.col(0);
}

}  // namespace ntkspectra
