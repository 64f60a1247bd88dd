#pragma once

#include <vector>

#include "dense.hpp"
#include "svd_ops.hpp"

namespace lrr {

/// Orthonormal basis of a subspace of m-by-n matrices under the trace inner
/// product <A, B> = sum_ij A_ij B_ij, with the orthogonal projector onto it.
class MatrixSubspace {
public:
    /// Gram-Schmidt over the generating set (two passes per vector for
    /// stability); generators whose residual falls below drop_tol times
    /// their own norm are discarded as dependent.
    static MatrixSubspace span_of(const std::vector<Matrix>& generators,
                                  double drop_tol = 1e-10);

    Index dim() const { return static_cast<Index>(basis_.size()); }
    const std::vector<Matrix>& basis() const { return basis_; }

    /// P(X) = sum_i <gamma_i, X> gamma_i.
    Matrix project(const Matrix& x) const;

private:
    std::vector<Matrix> basis_;
};

/// Rank-one elements {u_i v_i^T} from the leading r singular triples of x.
/// The set is orthonormal in the trace inner product, and every element of
/// its span has rank at most r.
std::vector<Matrix> svd_basis(const Matrix& x, Index r);

/// r random rank-one generators a_i b_i^T with standard Gaussian factors.
std::vector<Matrix> random_rank_one_set(Index m, Index n, Index r, GaussianStream& stream);

} // namespace lrr
