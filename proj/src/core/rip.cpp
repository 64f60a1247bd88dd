#include "rip.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rng.hpp"
#include "subspace.hpp"
#include "svd_ops.hpp"

namespace lrr {

namespace {
constexpr std::uint64_t kTagRipSample = 0x72697073ULL;
constexpr std::uint64_t kTagProp = 0x70726f70ULL;

void check_rank_arg(const LinearMap& map, Index r) {
    if (r < 1 || r > std::min(map.rows(), map.cols())) {
        throw std::invalid_argument("rip: rank outside [1, min(m,n)]");
    }
}
} // namespace

RipEstimate estimate_rip(const LinearMap& map, Index r, Index trials, std::uint64_t seed) {
    check_rank_arg(map, r);
    if (trials < 1) throw std::invalid_argument("estimate_rip: trials must be >= 1");

    RipEstimate out;
    out.r = r;
    out.trials = trials;
    out.seed = seed;
    out.delta_lower = -1.0;

    for (Index rank = 1; rank <= r; ++rank) {
        for (Index t = 0; t < trials; ++t) {
            GaussianStream stream(mix_seed(seed, kTagRipSample,
                                           static_cast<std::uint64_t>(rank),
                                           static_cast<std::uint64_t>(t)));
            const Matrix g = gaussian_matrix(map.rows(), rank, stream);
            const Matrix h = gaussian_matrix(map.cols(), rank, stream);
            Matrix x = g * h.transpose();
            const double norm = x.norm();
            if (norm == 0.0) continue;
            x /= norm;
            const double dev = std::abs(map.apply(x).squaredNorm() - 1.0);
            if (dev > out.delta_lower) {
                out.delta_lower = dev;
                out.witness = x;
            }
        }
    }
    if (out.delta_lower < 0.0) {
        out.delta_lower = 0.0;
        out.witness = Matrix::Zero(map.rows(), map.cols());
    }

    const double lam = map.spectral_upper_bound();
    out.delta_upper = delta_upper_from_bounds(lam, map.lambda_min_lower_bound());
    return out;
}

PropositionReport check_propositions(const LinearMap& map, Index r, Index trials,
                                     std::uint64_t seed) {
    check_rank_arg(map, r);
    if (trials < 1) throw std::invalid_argument("check_propositions: trials must be >= 1");

    const Index m = map.rows(), n = map.cols(), p = map.measurements();
    const double lam = map.spectral_upper_bound();
    const double delta = delta_upper_from_bounds(lam, map.lambda_min_lower_bound());

    PropositionReport rep;
    rep.delta_upper = delta;
    rep.trials = trials;
    rep.seed = seed;

    constexpr double kTol = -1e-9;
    const double sq = std::sqrt(1.0 + delta);

    double m_adj = 1e300, m_gu = 1e300, m_gl = 1e300, m_cross = 1e300, m_mixed = 1e300;

    for (Index t = 0; t < trials; ++t) {
        GaussianStream stream(mix_seed(seed, kTagProp, static_cast<std::uint64_t>(t)));

        // Subspace with rank-<=r projections: span of r random rank-ones.
        const MatrixSubspace psi = MatrixSubspace::span_of(random_rank_one_set(m, n, r, stream));

        // ||P(A* b)||F <= sqrt(1+d) ||b||2, unit b.
        Vector b(p);
        for (Index i = 0; i < p; ++i) b[i] = stream.normal();
        const double bn = b.norm();
        if (bn > 0.0) b /= bn;
        m_adj = std::min(m_adj, sq - psi.project(map.adjoint(b)).norm());

        // Two-sided bound for the compressed Gram operator on span(Psi).
        const Matrix x1 = gaussian_matrix(m, n, stream);
        const Matrix w = psi.project(x1);
        const double wn = w.norm();
        if (wn > 0.0) {
            const double mid = psi.project(map.adjoint(map.apply(w))).norm();
            m_gu = std::min(m_gu, (1.0 + delta) * wn - mid);
            m_gl = std::min(m_gl, mid - (1.0 - delta) * wn);
        }

        // Cross term: operator mixes span(Psi) with a disjoint span(Psi')
        // only up to delta. Sizes split r so joint projections stay rank<=r.
        const Index s1 = (r + 1) / 2;
        const Index s2 = r - s1;
        if (s2 >= 1) {
            const MatrixSubspace sub1 =
                MatrixSubspace::span_of(random_rank_one_set(m, n, s1, stream));
            const MatrixSubspace sub2 =
                MatrixSubspace::span_of(random_rank_one_set(m, n, s2, stream));
            Matrix x2 = Matrix::Zero(m, n);
            for (const Matrix& gamma : sub2.basis()) x2 += stream.normal() * gamma;
            const double x2n = x2.norm();
            if (x2n > 0.0) {
                x2 /= x2n;
                const Matrix outside = x2 - sub1.project(x2);
                const double lhs = sub1.project(map.adjoint(map.apply(outside))).norm();
                m_cross = std::min(m_cross, delta * outside.norm() - lhs);
            }
        } else {
            m_cross = std::min(m_cross, 0.0);
        }

        // Mixed-norm bound for arbitrary (full-rank) matrices.
        Matrix x3 = gaussian_matrix(m, n, stream);
        x3 /= x3.norm();
        const Norms nm = norms(x3);
        const double rhs = sq * (nm.frobenius + nm.nuclear / std::sqrt(static_cast<double>(r)));
        m_mixed = std::min(m_mixed, rhs - map.apply(x3).norm());
    }

    rep.margin_projected_adjoint = m_adj;
    rep.margin_gram_upper = m_gu;
    rep.margin_gram_lower = m_gl;
    rep.margin_cross_term = m_cross;
    rep.margin_mixed_norm = m_mixed;
    for (double v : {m_adj, m_gu, m_gl, m_cross, m_mixed}) {
        if (v < kTol) ++rep.violations;
    }
    return rep;
}

} // namespace lrr
