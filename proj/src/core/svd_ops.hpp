#pragma once

#include "dense.hpp"

namespace lrr {

/// Thin singular value decomposition X = U * diag(sigma) * V^T.
/// U is m-by-k and V is n-by-k with orthonormal columns; sigma is
/// nonincreasing and nonnegative. k never exceeds min(m, n).
struct SvdFactors {
    Matrix u;
    Vector sigma;
    Matrix v;

    Index rank_above(double tol) const;
    Matrix compose() const;
};

inline constexpr Index kFullRank = -1;

/// Exact SVD. k = kFullRank (or k >= min(m,n)) gives the full thin
/// decomposition; otherwise the leading k triples are returned (ties are
/// resolved by keeping the first k in the decomposition's order).
/// Throws std::invalid_argument on non-finite input or k = 0 / k < -1, and
/// NumericalError if the underlying iteration fails to converge.
SvdFactors svd(const Matrix& x, Index k = kFullRank);

/// Leading singular triples via an eigendecomposition of the smaller Gram
/// matrix. Several times faster than svd() on small inputs, at the cost of
/// squared conditioning: each sigma_i carries an absolute error on the
/// order of eps * sigma_1^2 / sigma_i, so values far below sigma_1 are
/// unreliable (a column whose image vanishes is returned as zero). Suited
/// to thresholding updates that only retain values above a fraction of
/// sigma_1; use svd() when small singular values must be resolved.
SvdFactors svd_gram(const Matrix& x, Index k = kFullRank);

/// Best rank-r approximation: recompose the leading r singular triples.
/// r must lie in [1, min(m, n)].
Matrix hard_threshold(const Matrix& y, Index r);

/// Singular value shrinkage: replace each sigma_i by max(sigma_i - nu, 0).
/// nu must be >= 0; nu = 0 returns the input unchanged.
Matrix soft_shrink(const Matrix& x, double nu);

struct Norms {
    double frobenius;
    double spectral;
    double nuclear;
};

/// All three norms from one decomposition of x.
Norms norms(const Matrix& x);

double frobenius_norm(const Matrix& x);
double spectral_norm(const Matrix& x);
double nuclear_norm(const Matrix& x);

} // namespace lrr
