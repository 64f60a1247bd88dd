#include "svd_ops.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <stdexcept>

#include "errors.hpp"

namespace lrr {

Index SvdFactors::rank_above(double tol) const {
    Index r = 0;
    while (r < sigma.size() && sigma[r] > tol) ++r;
    return r;
}

Matrix SvdFactors::compose() const {
    return u * sigma.asDiagonal() * v.transpose();
}

SvdFactors svd(const Matrix& x, Index k) {
    require_finite(x, "svd");
    const Index kmax = std::min(x.rows(), x.cols());
    if (k == kFullRank || k >= kmax) {
        k = kmax;
    } else if (k < 1) {
        throw std::invalid_argument("svd: k must be kFullRank or in [1, min(m,n)]");
    }

    Eigen::BDCSVD<Matrix> dec(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (dec.info() != Eigen::Success) {
        throw NumericalError("svd: iterative bidiagonal solver failed to converge");
    }

    SvdFactors out;
    if (k == kmax) {
        out.u = dec.matrixU();
        out.sigma = dec.singularValues();
        out.v = dec.matrixV();
    } else {
        out.u = dec.matrixU().leftCols(k);
        out.sigma = dec.singularValues().head(k);
        out.v = dec.matrixV().leftCols(k);
    }
    return out;
}

SvdFactors svd_gram(const Matrix& x, Index k) {
    require_finite(x, "svd_gram");
    const Index kmax = std::min(x.rows(), x.cols());
    if (k == kFullRank || k >= kmax) {
        k = kmax;
    } else if (k < 1) {
        throw std::invalid_argument("svd_gram: k must be kFullRank or in [1, min(m,n)]");
    }

    // Factor the smaller side: eigenvectors of X X^T are left singular
    // vectors, those of X^T X are right ones.
    const bool wide = x.rows() <= x.cols();
    const Matrix c = wide ? Matrix(x * x.transpose()) : Matrix(x.transpose() * x);
    Eigen::SelfAdjointEigenSolver<Matrix> es(c);
    if (es.info() != Eigen::Success) {
        throw NumericalError("svd_gram: eigendecomposition failed to converge");
    }

    SvdFactors out;
    out.sigma.resize(k);
    Matrix w(c.rows(), k);
    for (Index i = 0; i < k; ++i) {
        const Index j = c.rows() - 1 - i;  // eigenvalues come back ascending
        out.sigma[i] = std::sqrt(std::max(0.0, es.eigenvalues()[j]));
        w.col(i) = es.eigenvectors().col(j);
    }

    // Recover the other factor by mapping through x and renormalizing, so a
    // poorly resolved sigma cannot inflate its column.
    Matrix t = wide ? Matrix(x.transpose() * w) : Matrix(x * w);
    for (Index i = 0; i < k; ++i) {
        const double norm = t.col(i).norm();
        if (norm > 0.0) {
            t.col(i) /= norm;
        } else {
            t.col(i).setZero();
            out.sigma[i] = 0.0;
        }
    }
    out.u = wide ? std::move(w) : std::move(t);
    out.v = wide ? std::move(t) : std::move(w);
    return out;
}

Matrix hard_threshold(const Matrix& y, Index r) {
    if (r < 1 || r > std::min(y.rows(), y.cols())) {
        throw std::invalid_argument("hard_threshold: rank outside [1, min(m,n)]");
    }
    const SvdFactors f = svd(y, r);
    return f.compose();
}

Matrix soft_shrink(const Matrix& x, double nu) {
    if (!(nu >= 0.0)) {
        throw std::invalid_argument("soft_shrink: nu must be >= 0");
    }
    if (nu == 0.0) {
        return x;
    }
    SvdFactors f = svd(x);
    Index keep = 0;
    while (keep < f.sigma.size() && f.sigma[keep] > nu) ++keep;
    if (keep == 0) {
        return Matrix::Zero(x.rows(), x.cols());
    }
    const Vector shrunk = f.sigma.head(keep).array() - nu;
    return f.u.leftCols(keep) * shrunk.asDiagonal() * f.v.leftCols(keep).transpose();
}

Norms norms(const Matrix& x) {
    const SvdFactors f = svd(x);
    Norms out;
    out.frobenius = x.norm();
    out.spectral = f.sigma.size() ? f.sigma[0] : 0.0;
    out.nuclear = f.sigma.sum();
    return out;
}

double frobenius_norm(const Matrix& x) { return x.norm(); }
double spectral_norm(const Matrix& x) { return norms(x).spectral; }
double nuclear_norm(const Matrix& x) { return norms(x).nuclear; }

} // namespace lrr
