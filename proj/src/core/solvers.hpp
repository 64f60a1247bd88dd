#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "linear_map.hpp"

namespace lrr {

enum class SvdMode {
    Exact,       // thin SVD of the full iterate every step
    MonteCarlo,  // column-sampled sketch for the rank-r projection
};

enum class RankMode {
    Fixed,     // run at the caller-supplied rank
    Adaptive,  // start at r_max and adjust from the iterate's spectrum
};

/// Shared knobs for the iterative solvers. Zero-valued fields marked
/// "derived" are filled in per solve:
///   tau   -> rank-projected solvers: min(1, 2/curvature), where the
///            curvature is estimated on differences of rank <= 2*r
///            matrices ((1 + sqrt(dof/p))^2 for the isotropic Gaussian
///            ensemble; other kinds scale their measured global bound by
///            the same restricted/full ratio). Projector-like maps
///            (identity, entry masks) get step 1. The plain fixed-point
///            scheme uses 1/lambda_max.
///   mu_1  -> eta_mu * sigma_1(A*(b)) anchors the continuation schedule;
///   cs    -> max(2*r_max + 2, 3*rank) sketch columns, clamped to n;
///   rank  -> fixed solvers: required; adaptive solvers: optional override
///            for the working-rank cap (default r_max).
/// Adaptive solvers start from the largest rank whose degree-of-freedom
/// count stays 25% below the measurement budget (the cap itself has no
/// contraction margin and the spectrum heuristic cannot descend through
/// the sampling noise of early iterates), then adjust per iteration. In
/// MonteCarlo mode a solve that stops improving while far from tolerance
/// falls back to exact decompositions (recorded in the trace warnings).
struct SolverConfig {
    double tau = 0.0;              // derived when 0
    double mu_bar = 1e-8;          // continuation floor
    double eta_mu = 0.25;          // continuation decrease factor, in (0,1)
    double mu_1 = 0.0;             // derived when 0
    double xtol = 1e-6;            // relative step tolerance
    double eps_s = 0.01;           // adaptive rank: sigma_i > eps_s * sigma_1 survives
    Index cs = 0;                  // derived when 0
    Index max_inner_iters = 500;   // per continuation stage (non-final)
    Index max_total_iters = 10000; // across all stages
    RankMode rank_mode = RankMode::Adaptive;
    Index rank = 0;
    SvdMode svd_mode = SvdMode::MonteCarlo;
    double grad_blowup = 10.0;     // rank bump when ||g|| grows by this factor
    bool nonexpansive_rule = false;    // alternative rank-bump trigger
    Index nonexpansive_limit = 10;     // violations per bump
    std::uint64_t seed = 0;        // drives the sketch sampler
};

struct TraceRecord {
    Index iter = 0;        // 1-based, global across continuation stages
    double mu = 0.0;       // shrinkage level in effect (0 for pure hard thresholding)
    Index rank = 0;        // rank of the new iterate
    double residual = 0.0; // ||A(X) - b||_2 at the new iterate
    double step = 0.0;     // ||X_new - X||_F / max(1, ||X||_F)
    double rel_err = 0.0;  // ||X_new - M||_F / ||M||_F; NaN when no truth given
};

struct SolveTrace {
    Matrix x;                       // final iterate
    std::vector<TraceRecord> records;
    bool converged = false;         // step tolerance met (and schedule exhausted)
    Index iterations = 0;
    double wall_seconds = 0.0;
    double final_residual = 0.0;
    double final_rel_err = 0.0;     // NaN when no truth given
    double truth_norm = 0.0;        // ||M||_F when truth was given, else 0
    std::vector<std::string> warnings;

    /// Lines "iter,mu,rank,residual,step,rel_err" under a header; rel_err
    /// cells are empty when no ground truth was supplied.
    std::string to_csv() const;
};

/// Fixed-point shrinkage scheme for the penalized problem
/// min mu ||X||_* + 1/2 ||A(X) - b||^2: X <- S_{tau*mu}(X - tau A*(A(X)-b)).
/// tau defaults to 1/lambda_max(A*A) and is clamped (with a warning) into
/// (0, 2/lambda_max).
SolveTrace fpc_solve(const LinearMap& map, const Vector& b, double mu,
                     const SolverConfig& cfg, const Matrix* truth = nullptr);

/// Hard-thresholded gradient iteration X <- R_r(X - tau A*(A(X)-b)); rank
/// fixed or adaptive per cfg.rank_mode.
SolveTrace iht_solve(const LinearMap& map, const Vector& b,
                     const SolverConfig& cfg, const Matrix* truth = nullptr);

/// Hard thresholding with a fixed per-iteration shrinkage mu:
/// X <- R_r(S_mu(Y)). mu = 0 reproduces iht_solve exactly.
SolveTrace ihtms_solve(const LinearMap& map, const Vector& b, double mu,
                       const SolverConfig& cfg, const Matrix* truth = nullptr);

/// Fixed-rank continuation: for each mu in the schedule run
/// X <- S_mu(R_r(Y)) to tolerance, warm-starting the next stage; terminates
/// only once the step rule holds at mu = mu_bar. cfg.rank is required.
SolveTrace fpcar_solve(const LinearMap& map, const Vector& b,
                       const SolverConfig& cfg, const Matrix* truth = nullptr);

/// Continuation with the adaptive rank heuristic and (by default) the
/// sketched rank-r projection: X <- S_{tau*mu}(R_r(Y)).
SolveTrace fpca_solve(const LinearMap& map, const Vector& b,
                      const SolverConfig& cfg, const Matrix* truth = nullptr);

/// Largest rank whose degrees of freedom r(m+n-r) stay below p; 0 when even
/// rank 1 is overdetermined by no measurement budget.
Index max_recoverable_rank(Index m, Index n, Index p);

/// Strictly decreasing geometric schedule mu_1, eta*mu_1, ... ending exactly
/// at mu_bar; collapses to {mu_bar} when mu_1 <= mu_bar.
std::vector<double> mu_schedule(double mu_1, double eta, double mu_bar);

/// Adaptive rank rule: count sigma_i > eps_s * sigma_1 in the previous
/// iterate's spectrum (empty spectrum gives 1), bump by one when the
/// gradient norm grew by more than `blowup` between the last two entries of
/// grad_history, clamp to [1, r_max]. sigma_1 is passed separately so
/// truncated spectra can still report their true head.
Index rank_heuristic(const std::vector<double>& prev_sigma, double sigma_1,
                     double eps_s, const std::vector<double>& grad_history,
                     double blowup, Index r_max);

} // namespace lrr
