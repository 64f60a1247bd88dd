#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "linear_map.hpp"
#include "solvers.hpp"

namespace lrr {

/// A random recovery instance: ground truth M of the requested rank, a
/// seeded Gaussian measurement map, and b = A(vec M) (+ optional noise of a
/// prescribed Euclidean norm).
struct ProblemInstance {
    LinearMap map;
    Vector b;
    Matrix truth;
    Index m = 0, n = 0, p = 0, r = 0;
    std::uint64_t seed = 0;
    double noise_norm = 0.0;
};

/// M = M_L M_R^T with i.i.d. standard normal factors; the map payload has
/// i.i.d. N(0, 1/p) entries. All randomness derives from `seed`.
ProblemInstance generate_instance(Index m, Index n, Index p, Index r,
                                  std::uint64_t seed, double noise_norm = 0.0);

/// Full-spectrum target: unit top-r singular values followed by a geometric
/// tail decay, decay^2, ... (decay in [0,1); decay = 0 gives exact rank r),
/// with random orthonormal factors. Measurements are noiseless.
ProblemInstance near_lowrank_instance(Index m, Index n, Index p, Index r,
                                      double decay, std::uint64_t seed);

struct CellMetrics {
    double sr = 0.0;   // sampling ratio p / (m n)
    double fr = 0.0;   // degrees-of-freedom ratio r (m + n - r) / p
    Index r_max = 0;   // largest rank with fr < 1
};

CellMetrics metrics(Index m, Index n, Index p, Index r);

/// ||X - M||_F / ||M||_F; M must be nonzero.
double rel_err(const Matrix& x, const Matrix& m);

/// An instance counts as recovered when rel_err < 1e-3.
inline constexpr double kRecoveryThreshold = 1e-3;

/// Expand a solver selector into canonical ids. Accepts the six mode names
/// (ihtr, iht, ihtmsr, ihtms, fpcar, fpca), "-adaptive" aliases
/// (iht-adaptive, ...), plain "fpc", "all" (the six modes), and
/// comma-separated lists. Throws std::invalid_argument on unknown names.
std::vector<std::string> resolve_solver_ids(const std::string& selector);

/// Dispatch on a canonical solver id: fixed-rank ids take their rank from
/// `rank`, adaptive ids ignore it (the config's rank fields are overridden
/// accordingly); `mu` feeds the schemes with a fixed shrinkage level (fpc,
/// ihtms/ihtmsr) and is ignored by the others.
SolveTrace solve_by_id(const std::string& id, const LinearMap& map, const Vector& b,
                       Index rank, double mu, SolverConfig cfg,
                       const Matrix* truth = nullptr);

/// Bench wrapper around solve_by_id: folds the instance seed into the
/// config seed, supplies the instance's truth, and pins the fixed shrinkage
/// level to cfg.mu_bar (the continuation floor) so multistage runs match the
/// plain hard-thresholding runs up to that floor.
SolveTrace solve_with(const std::string& id, const ProblemInstance& inst,
                      Index rank, SolverConfig cfg);

struct CampaignCell {
    Index m = 0, n = 0, p = 0, r = 0;
};

struct ReportRow {
    std::string solver;
    Index m = 0, n = 0, p = 0;
    Index r = 0;               // campaign: instance rank; rank study: given rank
    bool adaptive_rank = false; // rank-study rows where r does not apply
    double sr = 0.0, fr = 0.0;
    Index ns = 0;              // recovered count
    Index instances = 0;
    double avg_time_s = 0.0;   // over recovered instances; NaN when ns = 0
    double avg_rel_err = 0.0;  // over recovered instances; NaN when ns = 0
    std::vector<std::string> failures;  // solver errors, recorded not thrown
};

struct BenchReport {
    std::vector<ReportRow> rows;
    std::vector<std::string> warnings;
    Index true_rank = 0;       // rank-study reports only
    bool rank_study = false;

    /// Campaign header: solver,m,n,p,r,SR,FR,NS,avg_time_s,avg_rel_err.
    /// Rank studies use solver,m,n,p,true_r,given_r,NS,avg_time_s,avg_rel_err.
    /// Unavailable averages (NS = 0) print as "---".
    std::string to_csv() const;
    std::string to_text() const;
};

struct CampaignOptions {
    std::vector<CampaignCell> cells;
    Index instances_per_cell = 10;
    std::vector<std::string> solvers;  // canonical ids
    SolverConfig config;
    std::uint64_t master_seed = 0;
    double noise_norm = 0.0;
    int threads = 0;  // 0: LRR_THREADS env var, else hardware concurrency
};

/// Runs every requested solver on the same per-cell instance pool. Instance
/// seeds are mix_seed(master_seed, m, n, p, r, index), so reports are
/// reproducible bit-for-bit (timing column aside) for a given master seed.
/// Cells with FR >= 1 run anyway but are flagged in `warnings`. Rows are
/// ordered cell-major in input order, then by solver in input order.
BenchReport run_campaign(const CampaignOptions& opts);

struct RankStudyOptions {
    Index m = 0, n = 0, p = 0;
    Index true_rank = 0;
    std::vector<Index> given_ranks;
    std::vector<std::string> solvers;  // fixed ids get one row per given rank
    Index instances = 10;
    SolverConfig config;
    std::uint64_t master_seed = 0;
    int threads = 0;
};

/// Feeds deliberately wrong ranks to the fixed-rank solvers (adaptive ids
/// contribute a single row each) over a shared instance pool of the true
/// rank.
BenchReport wrong_rank_study(const RankStudyOptions& opts);

} // namespace lrr
