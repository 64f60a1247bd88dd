#pragma once

#include <cstdint>
#include <vector>

#include "dense.hpp"

namespace lrr {

/// Column-sampling parameters for the randomized SVD sketch: cs columns are
/// drawn with replacement according to probs (empty = uniform), and the top
/// ks approximate left singular directions are kept. Requires
/// 1 <= ks <= cs <= n; probs, when given, must be nonnegative and sum to 1
/// within 1e-12.
struct SamplerParams {
    Index cs = 0;
    Index ks = 0;
    std::vector<double> probs;  // empty means uniform 1/n
    std::uint64_t seed = 0;
};

/// Sketched factors: h has k_eff orthonormal columns (approximate left
/// singular vectors of A), sigma holds the corresponding nonincreasing
/// positive singular values of the sampled sketch C. k_eff < ks happens when
/// trailing sketch values fall below 1e-12 times the largest (k_eff = 0 when
/// every sampled column is zero).
struct ApproxSvd {
    Matrix h;
    Vector sigma;
    Index k_eff = 0;
    std::vector<Index> columns;  // sampled column indices, in draw order
};

/// Randomized sketch: C's t-th column is A's i_t-th column scaled by
/// 1/sqrt(cs * p_{i_t}); the eigendecomposition of C^T C yields sigma and,
/// through h_t = C y_t / sigma_t, the approximate left singular directions.
ApproxSvd linear_time_svd(const Matrix& a, const SamplerParams& params);

/// Rank-k_eff reconstruction H (H^T A), i.e. the projection of A onto the
/// sketched left subspace. Throws std::invalid_argument when k_eff = 0.
Matrix reconstruct(const ApproxSvd& f, const Matrix& a);

} // namespace lrr
