#include "subspace.hpp"

#include <stdexcept>

namespace lrr {

namespace {
double trace_dot(const Matrix& a, const Matrix& b) {
    return a.cwiseProduct(b).sum();
}
} // namespace

MatrixSubspace MatrixSubspace::span_of(const std::vector<Matrix>& generators,
                                       double drop_tol) {
    MatrixSubspace out;
    for (const Matrix& gen : generators) {
        if (!out.basis_.empty() &&
            (gen.rows() != out.basis_.front().rows() || gen.cols() != out.basis_.front().cols())) {
            throw std::invalid_argument("MatrixSubspace: generators must share a shape");
        }
        const double gen_norm = gen.norm();
        if (gen_norm == 0.0) continue;
        Matrix w = gen;
        for (int pass = 0; pass < 2; ++pass) {
            for (const Matrix& gamma : out.basis_) {
                w -= trace_dot(gamma, w) * gamma;
            }
        }
        const double w_norm = w.norm();
        if (w_norm > drop_tol * gen_norm) {
            out.basis_.push_back(w / w_norm);
        }
    }
    return out;
}

Matrix MatrixSubspace::project(const Matrix& x) const {
    if (basis_.empty()) {
        return Matrix::Zero(x.rows(), x.cols());
    }
    if (x.rows() != basis_.front().rows() || x.cols() != basis_.front().cols()) {
        throw std::invalid_argument("MatrixSubspace::project: shape mismatch");
    }
    Matrix out = Matrix::Zero(x.rows(), x.cols());
    for (const Matrix& gamma : basis_) {
        out += trace_dot(gamma, x) * gamma;
    }
    return out;
}

std::vector<Matrix> svd_basis(const Matrix& x, Index r) {
    if (r < 1 || r > std::min(x.rows(), x.cols())) {
        throw std::invalid_argument("svd_basis: rank outside [1, min(m,n)]");
    }
    const SvdFactors f = svd(x, r);
    std::vector<Matrix> out;
    out.reserve(static_cast<std::size_t>(r));
    for (Index i = 0; i < r; ++i) {
        out.push_back(f.u.col(i) * f.v.col(i).transpose());
    }
    return out;
}

std::vector<Matrix> random_rank_one_set(Index m, Index n, Index r, GaussianStream& stream) {
    std::vector<Matrix> out;
    out.reserve(static_cast<std::size_t>(r));
    for (Index i = 0; i < r; ++i) {
        const Matrix a = gaussian_matrix(m, 1, stream);
        const Matrix b = gaussian_matrix(n, 1, stream);
        out.push_back(a * b.transpose());
    }
    return out;
}

} // namespace lrr
