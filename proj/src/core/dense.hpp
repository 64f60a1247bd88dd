#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

#include "rng.hpp"

namespace lrr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// vec(X): stack the columns of X into a single vector of length m*n.
inline Vector vec(const Matrix& x) {
    return Eigen::Map<const Vector>(x.data(), x.size());
}

/// mat(y): inverse of vec for an m-by-n target shape.
inline Matrix unvec(const Vector& y, Index m, Index n) {
    return Eigen::Map<const Matrix>(y.data(), m, n);
}

/// m-by-n matrix with i.i.d. N(0, sigma^2) entries drawn from the stream.
/// Entries are emitted column by column so the layout matches vec().
Matrix gaussian_matrix(Index m, Index n, GaussianStream& stream, double sigma = 1.0);

/// Throws std::invalid_argument if the matrix contains NaN or Inf.
void require_finite(const Matrix& x, const char* what);
void require_finite(const Vector& x, const char* what);

/// Matrix text format: first line "m n", then m lines of n space-separated
/// decimal reals. Values are written with 17 significant digits so that a
/// write/read round trip reproduces every double bit-for-bit. The reader
/// rejects NaN/Inf and shape mismatches.
Matrix read_matrix_text(const std::string& path);
void write_matrix_text(const Matrix& x, const std::string& path);

/// Same format through strings (used by the CLI's "-" stdout convention and
/// by tests).
Matrix parse_matrix_text(const std::string& text);
std::string format_matrix_text(const Matrix& x);

} // namespace lrr
