#include "approx_svd.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "rng.hpp"

namespace lrr {

namespace {
constexpr double kDropFactor = 1e-12;

void validate(const Matrix& a, const SamplerParams& params) {
    const Index n = a.cols();
    if (params.ks < 1 || params.ks > params.cs || params.cs > n) {
        throw std::invalid_argument("linear_time_svd: need 1 <= ks <= cs <= n");
    }
    if (!params.probs.empty()) {
        if (static_cast<Index>(params.probs.size()) != n) {
            throw std::invalid_argument("linear_time_svd: probs must have one entry per column");
        }
        double sum = 0.0;
        for (double q : params.probs) {
            if (!(q >= 0.0)) {
                throw std::invalid_argument("linear_time_svd: probs must be nonnegative");
            }
            sum += q;
        }
        if (std::abs(sum - 1.0) > 1e-12) {
            throw std::invalid_argument("linear_time_svd: probs must sum to 1");
        }
    }
    require_finite(a, "linear_time_svd");
}

Index draw_column(const SamplerParams& params, Index n, GaussianStream& stream) {
    if (params.probs.empty()) {
        return static_cast<Index>(stream.below(static_cast<std::uint64_t>(n)));
    }
    const double u = stream.uniform();
    double acc = 0.0;
    Index last_positive = 0;
    for (Index i = 0; i < n; ++i) {
        const double q = params.probs[static_cast<std::size_t>(i)];
        if (q > 0.0) last_positive = i;
        acc += q;
        if (u < acc) return i;
    }
    return last_positive;
}
} // namespace

ApproxSvd linear_time_svd(const Matrix& a, const SamplerParams& params) {
    validate(a, params);
    const Index n = a.cols();
    const double uniform_prob = 1.0 / static_cast<double>(n);

    GaussianStream stream(params.seed);
    Matrix c(a.rows(), params.cs);
    ApproxSvd out;
    out.columns.reserve(static_cast<std::size_t>(params.cs));
    for (Index t = 0; t < params.cs; ++t) {
        const Index pick = draw_column(params, n, stream);
        out.columns.push_back(pick);
        const double prob = params.probs.empty()
                                ? uniform_prob
                                : params.probs[static_cast<std::size_t>(pick)];
        c.col(t) = a.col(pick) / std::sqrt(static_cast<double>(params.cs) * prob);
    }

    // Exact eigendecomposition of the small Gram matrix C^T C.
    Eigen::SelfAdjointEigenSolver<Matrix> eig(c.transpose() * c);
    if (eig.info() != Eigen::Success) {
        throw std::runtime_error("linear_time_svd: Gram eigendecomposition failed");
    }
    // Eigenvalues come back ascending; walk from the top.
    const Vector evals = eig.eigenvalues();
    const double top = std::sqrt(std::max(evals[params.cs - 1], 0.0));
    const double drop = kDropFactor * top;

    std::vector<Index> keep;
    for (Index j = 0; j < params.ks; ++j) {
        const Index src = params.cs - 1 - j;
        const double sigma = std::sqrt(std::max(evals[src], 0.0));
        if (sigma <= drop || sigma == 0.0) break;
        keep.push_back(src);
    }

    out.k_eff = static_cast<Index>(keep.size());
    out.sigma = Vector(out.k_eff);
    out.h = Matrix(a.rows(), out.k_eff);
    for (Index j = 0; j < out.k_eff; ++j) {
        const Index src = keep[static_cast<std::size_t>(j)];
        const double sigma = std::sqrt(std::max(evals[src], 0.0));
        out.sigma[j] = sigma;
        out.h.col(j) = c * eig.eigenvectors().col(src) / sigma;
    }
    return out;
}

Matrix reconstruct(const ApproxSvd& f, const Matrix& a) {
    if (f.k_eff == 0) {
        throw std::invalid_argument("reconstruct: degenerate factors (k_eff = 0)");
    }
    if (f.h.rows() != a.rows()) {
        throw std::invalid_argument("reconstruct: row count mismatch");
    }
    return f.h * (f.h.transpose() * a);
}

} // namespace lrr
