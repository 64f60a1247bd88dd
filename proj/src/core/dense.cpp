#include "dense.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "errors.hpp"

namespace lrr {

Matrix gaussian_matrix(Index m, Index n, GaussianStream& stream, double sigma) {
    Matrix x(m, n);
    for (Index j = 0; j < n; ++j) {
        for (Index i = 0; i < m; ++i) {
            x(i, j) = sigma * stream.normal();
        }
    }
    return x;
}

void require_finite(const Matrix& x, const char* what) {
    if (!x.allFinite()) {
        throw std::invalid_argument(std::string(what) + ": entries must be finite");
    }
}

void require_finite(const Vector& x, const char* what) {
    if (!x.allFinite()) {
        throw std::invalid_argument(std::string(what) + ": entries must be finite");
    }
}

Matrix parse_matrix_text(const std::string& text) {
    std::istringstream in(text);
    long long m = 0, n = 0;
    if (!(in >> m >> n)) {
        throw IoError("matrix text: missing or malformed size header");
    }
    if (m <= 0 || n <= 0) {
        throw IoError("matrix text: dimensions must be positive");
    }
    Matrix x(m, n);
    for (long long i = 0; i < m; ++i) {
        for (long long j = 0; j < n; ++j) {
            double v;
            if (!(in >> v)) {
                throw IoError("matrix text: expected " + std::to_string(m * n) +
                              " entries, ran out at row " + std::to_string(i));
            }
            if (!std::isfinite(v)) {
                throw IoError("matrix text: non-finite entry at (" + std::to_string(i) +
                              ", " + std::to_string(j) + ")");
            }
            x(i, j) = v;
        }
    }
    double extra;
    if (in >> extra) {
        throw IoError("matrix text: trailing data after " + std::to_string(m * n) + " entries");
    }
    return x;
}

std::string format_matrix_text(const Matrix& x) {
    std::string out;
    out.reserve(static_cast<std::size_t>(x.size()) * 24 + 32);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%lld %lld\n", static_cast<long long>(x.rows()),
                  static_cast<long long>(x.cols()));
    out += buf;
    for (Index i = 0; i < x.rows(); ++i) {
        for (Index j = 0; j < x.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", x(i, j));
            if (j) out += ' ';
            out += buf;
        }
        out += '\n';
    }
    return out;
}

Matrix read_matrix_text(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open for reading: " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_matrix_text(buf.str());
}

void write_matrix_text(const Matrix& x, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open for writing: " + path);
    }
    out << format_matrix_text(x);
    if (!out) {
        throw IoError("write failed: " + path);
    }
}

} // namespace lrr
