#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "rcsvd/io/atomic_file.hpp"
#include "rcsvd/matrix.hpp"

namespace rcsvd::io {

namespace detail {

inline std::string lowercase(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

inline FormatError mm_error(std::size_t line, const std::string& what) {
    return FormatError("Matrix Market line " + std::to_string(line) + ": " + what);
}

inline bool parse_double(const std::string& token, double& out) {
    // strtod accepts the exponent forms Matrix Market writers emit (1e+00, 1E-3).
    char* end = nullptr;
    out = std::strtod(token.c_str(), &end);
    return end == token.c_str() + token.size() && !token.empty();
}

} // namespace detail

/**
 * Reads a dense `%%MatrixMarket matrix array real general` file. Values are
 * column-major, any whitespace-separated layout is accepted. Coordinate
 * format and non-real fields are rejected.
 */
inline DenseMatrix read_matrix_market(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;

    if (!std::getline(in, line)) throw detail::mm_error(1, "empty input");
    ++lineno;
    std::istringstream header(line);
    std::string banner, object, format, field, symmetry;
    header >> banner >> object >> format >> field >> symmetry;
    if (banner != "%%MatrixMarket") throw detail::mm_error(lineno, "missing %%MatrixMarket banner");
    if (detail::lowercase(object) != "matrix")
        throw detail::mm_error(lineno, "unsupported object '" + object + "'");
    if (detail::lowercase(format) != "array")
        throw detail::mm_error(lineno, "unsupported format '" + format + "' (only array)");
    const std::string f = detail::lowercase(field);
    if (f != "real" && f != "double" && f != "integer")
        throw detail::mm_error(lineno, "unsupported field '" + field + "' (only real)");
    if (detail::lowercase(symmetry) != "general")
        throw detail::mm_error(lineno, "unsupported symmetry '" + symmetry + "' (only general)");

    // Size line: first non-comment, non-blank line.
    std::size_t rows = 0, cols = 0, size_line = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '%' ||
            line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        std::istringstream dims(line);
        long long r = 0, c = 0;
        std::string extra;
        if (!(dims >> r >> c) || (dims >> extra) || r <= 0 || c <= 0)
            throw detail::mm_error(lineno, "malformed size line '" + line + "'");
        rows = static_cast<std::size_t>(r);
        cols = static_cast<std::size_t>(c);
        size_line = lineno;
        break;
    }
    if (size_line == 0) throw detail::mm_error(lineno, "missing size line");

    const std::size_t expected = rows * cols;
    std::vector<double> colmajor;
    colmajor.reserve(expected);
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line[0] == '%') continue;
        std::istringstream tokens(line);
        std::string tok;
        while (tokens >> tok) {
            double v = 0.0;
            if (!detail::parse_double(tok, v))
                throw detail::mm_error(lineno, "non-numeric value '" + tok + "'");
            if (!std::isfinite(v)) throw detail::mm_error(lineno, "non-finite value '" + tok + "'");
            if (colmajor.size() == expected)
                throw detail::mm_error(size_line, "size line declares " + std::to_string(rows) +
                                                      "x" + std::to_string(cols) + " = " +
                                                      std::to_string(expected) +
                                                      " values, found more (line " +
                                                      std::to_string(lineno) + ")");
            colmajor.push_back(v);
        }
    }
    if (colmajor.size() != expected) {
        throw detail::mm_error(size_line, "size line declares " + std::to_string(rows) + "x" +
                                              std::to_string(cols) + " = " +
                                              std::to_string(expected) + " values, found " +
                                              std::to_string(colmajor.size()));
    }

    DenseMatrix out(rows, cols);
    for (std::size_t j = 0; j < cols; ++j)
        for (std::size_t i = 0; i < rows; ++i) out(i, j) = colmajor[j * rows + i];
    return out;
}

inline DenseMatrix read_matrix_market(const std::filesystem::path& path) {
    std::ifstream in = open_for_reading(path);
    try {
        return read_matrix_market(in);
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

/// Writes the array format with 17 significant digits, column-major.
inline void write_matrix_market(const DenseMatrix& a, std::ostream& out) {
    out << "%%MatrixMarket matrix array real general\n";
    out << a.rows() << ' ' << a.cols() << '\n';
    char buf[32];
    for (std::size_t j = 0; j < a.cols(); ++j) {
        for (std::size_t i = 0; i < a.rows(); ++i) {
            const int len = std::snprintf(buf, sizeof buf, "%.17g\n", a(i, j));
            out.write(buf, len);
        }
    }
}

inline void write_matrix_market(const DenseMatrix& a, const std::filesystem::path& path) {
    write_atomically(path, [&](std::ostream& out) { write_matrix_market(a, out); });
}

} // namespace rcsvd::io
