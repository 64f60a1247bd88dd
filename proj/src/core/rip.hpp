#pragma once

#include <cstdint>

#include "linear_map.hpp"

namespace lrr {

/// Empirical two-sided estimate of the restricted isometry constant of a map
/// at rank r. delta_lower is a certified lower bound: the largest deviation
/// |  ||A(X)||^2 - 1 | over sampled unit-Frobenius matrices of rank <= r,
/// with the maximizing sample kept as a witness. delta_upper is the
/// conservative spectral certificate max(lambda_max - 1, 1 - lambda_min_lb, 0).
struct RipEstimate {
    Index r = 0;
    double delta_lower = 0.0;
    double delta_upper = 0.0;
    Index trials = 0;          // samples per rank level
    std::uint64_t seed = 0;
    Matrix witness;            // unit-Frobenius, rank <= r
};

/// Samples `trials` random factored matrices at every rank level 1..r (so
/// the sample set at rank r contains the sets at all lower ranks, making the
/// lower bound monotone in r by construction).
RipEstimate estimate_rip(const LinearMap& map, Index r, Index trials, std::uint64_t seed);

/// Margins (RHS - LHS, minimum over trials) for the adjoint-restriction
/// inequalities implied by restricted isometry, evaluated with the
/// conservative delta_upper certificate. A negative margin beyond rounding
/// (-1e-9) counts as a violation; violations are reported, never thrown.
struct PropositionReport {
    double delta_upper = 0.0;
    double margin_projected_adjoint = 0.0;  // ||P(A* b)||F       <= sqrt(1+d) ||b||2
    double margin_gram_upper = 0.0;         // ||P A*A P X||F     <= (1+d) ||P X||F
    double margin_gram_lower = 0.0;         // ||P A*A P X||F     >= (1-d) ||P X||F
    double margin_cross_term = 0.0;         // ||P A*A (I-P) X||F <= d ||(I-P) X||F
    double margin_mixed_norm = 0.0;         // ||A X||2 <= sqrt(1+d)(||X||F + ||X||*/sqrt(r))
    Index trials = 0;
    std::uint64_t seed = 0;
    Index violations = 0;
};

/// The projector subspaces are spanned by random rank-one sets sized so that
/// every projected matrix has rank <= r (the cross-term check splits r
/// between the two subspaces; with r = 1 that check is vacuous and reports a
/// zero margin).
PropositionReport check_propositions(const LinearMap& map, Index r, Index trials,
                                     std::uint64_t seed);

} // namespace lrr
