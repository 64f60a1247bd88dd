#pragma once

// Test-side oracle: one-sided Jacobi SVD, written independently of the
// library's decomposition path. The algorithm orthogonalizes the columns of
// a working copy W = X * V by plane rotations until all column pairs are
// numerically orthogonal; then sigma_j = ||W_j||, U_j = W_j / sigma_j.
// Deliberately simple and slow; used only to cross-check the production SVD
// and operators built on it.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace oracle {

struct JacobiSvd {
    Eigen::MatrixXd u;      // m x k, orthonormal columns
    Eigen::VectorXd sigma;  // k, nonincreasing, >= 0
    Eigen::MatrixXd v;      // n x k, orthonormal columns
};

// One-sided Jacobi on an m x n matrix with m >= n. Returns thin factors with
// k = n columns.
inline JacobiSvd one_sided_jacobi_tall(const Eigen::MatrixXd& x) {
    const Eigen::Index m = x.rows(), n = x.cols();
    if (m < n) throw std::invalid_argument("one_sided_jacobi_tall: need m >= n");

    Eigen::MatrixXd w = x;                              // working copy, becomes U * diag(sigma)
    Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);

    const double scale = w.norm();
    const double tol = 1e-14;
    const int max_sweeps = 60;

    if (scale > 0.0) {
        for (int sweep = 0; sweep < max_sweeps; ++sweep) {
            double off = 0.0;  // largest |cos angle| between column pairs this sweep
            for (Eigen::Index p = 0; p + 1 < n; ++p) {
                for (Eigen::Index q = p + 1; q < n; ++q) {
                    const double alpha = w.col(p).squaredNorm();
                    const double beta = w.col(q).squaredNorm();
                    const double gamma = w.col(p).dot(w.col(q));
                    const double denom = std::sqrt(alpha * beta);
                    if (denom == 0.0) continue;
                    off = std::max(off, std::abs(gamma) / denom);
                    if (std::abs(gamma) <= tol * denom) continue;

                    // Jacobi rotation zeroing the (p,q) inner product.
                    const double zeta = (beta - alpha) / (2.0 * gamma);
                    const double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                                     (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                    const double c = 1.0 / std::sqrt(1.0 + t * t);
                    const double s = c * t;

                    const Eigen::VectorXd wp = w.col(p);
                    w.col(p) = c * wp - s * w.col(q);
                    w.col(q) = s * wp + c * w.col(q);
                    const Eigen::VectorXd vp = v.col(p);
                    v.col(p) = c * vp - s * v.col(q);
                    v.col(q) = s * vp + c * v.col(q);
                }
            }
            if (off <= tol) break;
            if (sweep == max_sweeps - 1) {
                throw std::runtime_error("one_sided_jacobi_tall: no convergence");
            }
        }
    }

    JacobiSvd out;
    out.sigma = Eigen::VectorXd(n);
    out.u = Eigen::MatrixXd(m, n);
    out.v = Eigen::MatrixXd(n, n);

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    Eigen::VectorXd lens(n);
    for (Eigen::Index j = 0; j < n; ++j) lens[j] = w.col(j).norm();
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return lens[a] > lens[b]; });

    for (Eigen::Index j = 0; j < n; ++j) {
        const Eigen::Index src = order[static_cast<std::size_t>(j)];
        const double len = lens[src];
        out.sigma[j] = len;
        out.v.col(j) = v.col(src);
        if (len > 0.0) {
            out.u.col(j) = w.col(src) / len;
        } else {
            // Null direction: any unit vector orthogonal to the previous
            // columns keeps U orthonormal. Gram-Schmidt a canonical basis
            // vector against what we have so far.
            Eigen::VectorXd cand = Eigen::VectorXd::Zero(m);
            for (Eigen::Index e = 0; e < m; ++e) {
                cand.setZero();
                cand[e] = 1.0;
                for (Eigen::Index prev = 0; prev < j; ++prev) {
                    cand -= out.u.col(prev).dot(cand) * out.u.col(prev);
                }
                if (cand.norm() > 0.5) break;
            }
            out.u.col(j) = cand / cand.norm();
        }
    }
    return out;
}

// General shape: transpose when wide, swapping the roles of U and V.
inline JacobiSvd one_sided_jacobi(const Eigen::MatrixXd& x) {
    if (x.rows() >= x.cols()) return one_sided_jacobi_tall(x);
    JacobiSvd t = one_sided_jacobi_tall(x.transpose());
    JacobiSvd out;
    out.u = t.v;
    out.sigma = t.sigma;
    out.v = t.u;
    return out;
}

} // namespace oracle
