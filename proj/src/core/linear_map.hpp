#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dense.hpp"

namespace lrr {

enum class MapKind {
    DenseGaussian,  // p x (m*n) matrix with i.i.d. N(0, 1/p) entries
    Identity,       // p = m*n, measures vec(X) itself
    EntryMask,      // measures p distinct entries of X
    DenseExplicit,  // caller-supplied dense matrix (not serializable)
};

/// Linear measurement operator on m-by-n matrices: y = A(X) in R^p, where
/// matrices are flattened column by column (vec). Immutable after
/// construction and safe to share across threads.
class LinearMap {
public:
    static LinearMap gaussian(Index m, Index n, Index p, std::uint64_t seed);
    static LinearMap identity(Index m, Index n);
    /// Mask over p distinct entries, sampled uniformly from the seed.
    static LinearMap entry_mask(Index m, Index n, Index p, std::uint64_t seed);
    /// Explicit p x (m*n) payload; intended for tests and bespoke operators.
    static LinearMap dense(Index m, Index n, const Matrix& a);

    MapKind kind() const { return kind_; }
    Index rows() const { return m_; }
    Index cols() const { return n_; }
    Index measurements() const { return p_; }
    std::uint64_t seed() const { return seed_; }

    /// y = A vec(X).
    Vector apply(const Matrix& x) const;
    /// mat(A^T y): adjoint in the trace inner product.
    Matrix adjoint(const Vector& y) const;

    /// Estimate of lambda_max(A^* A) by power iteration, stopping when the
    /// eigen-residual drops below rel_tol * lambda. Identity and entry-mask
    /// operators return their exact value (1) directly. Throws
    /// NumericalError if the cap is exceeded.
    double spectral_upper_bound(double rel_tol = 1e-6, int max_iters = 20000) const;

    /// Certified lower bound on lambda_min(A^* A): exact (1) for identity
    /// and for a full entry mask, otherwise 0 (any map with p < m*n has a
    /// kernel; for seeded dense payloads no cheaper certificate is kept).
    double lambda_min_lower_bound() const;

    /// JSON header {kind, m, n, p, seed}; payloads are regenerated from the
    /// seed on load and never stored. DenseExplicit maps refuse to
    /// serialize.
    std::string to_json() const;
    static LinearMap from_json(const std::string& text);

    /// Entry-mask support, as column-major linear indices (sorted).
    const std::vector<Index>& mask_indices() const { return mask_; }
    /// Dense payload (p x m*n); empty for identity/entry-mask kinds.
    const Matrix& payload() const { return a_; }

private:
    LinearMap(MapKind kind, Index m, Index n, Index p, std::uint64_t seed)
        : kind_(kind), m_(m), n_(n), p_(p), seed_(seed) {}

    MapKind kind_;
    Index m_, n_, p_;
    std::uint64_t seed_;
    Matrix a_;                  // DenseGaussian / DenseExplicit payload
    std::vector<Index> mask_;   // EntryMask support
};

/// Conservative restricted-isometry upper certificate from spectral bounds:
/// max(lambda_max - 1, 1 - lambda_min_lb, 0).
double delta_upper_from_bounds(double lambda_max, double lambda_min_lb);

} // namespace lrr
