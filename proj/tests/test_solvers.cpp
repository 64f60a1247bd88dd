// Iterative solver checks: closed-form fixed points, scheme equivalences,
// schedule/heuristic units, invariants along the iteration, determinism, and
// failure-mode reporting.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "core/bench.hpp"
#include "core/dense.hpp"
#include "core/rng.hpp"
#include "core/solvers.hpp"
#include "core/svd_ops.hpp"

using namespace lrr;

namespace {

bool has_warning(const SolveTrace& tr, const std::string& needle) {
    for (const std::string& w : tr.warnings)
        if (w.find(needle) != std::string::npos) return true;
    return false;
}

SolverConfig exact_cfg() {
    SolverConfig cfg;
    cfg.svd_mode = SvdMode::Exact;
    return cfg;
}

} // namespace

TEST_CASE("solver configs are validated up front") {
    LinearMap map = LinearMap::identity(3, 3);
    Vector b = Vector::Ones(9);
    SolverConfig cfg;

    cfg.mu_bar = 0.0;
    CHECK_THROWS_AS(fpca_solve(map, b, cfg), std::invalid_argument);
    cfg = SolverConfig{};
    cfg.eta_mu = 1.0;
    CHECK_THROWS_AS(fpca_solve(map, b, cfg), std::invalid_argument);
    cfg = SolverConfig{};
    cfg.xtol = 0.0;
    CHECK_THROWS_AS(fpca_solve(map, b, cfg), std::invalid_argument);
    cfg = SolverConfig{};
    cfg.eps_s = 1.5;
    CHECK_THROWS_AS(fpca_solve(map, b, cfg), std::invalid_argument);
    cfg = SolverConfig{};
    cfg.max_total_iters = 0;
    CHECK_THROWS_AS(fpca_solve(map, b, cfg), std::invalid_argument);
    cfg = SolverConfig{};
    cfg.tau = -1.0;
    CHECK_THROWS_AS(fpca_solve(map, b, cfg), std::invalid_argument);
    cfg = SolverConfig{};
    cfg.grad_blowup = 1.0;
    CHECK_THROWS_AS(fpca_solve(map, b, cfg), std::invalid_argument);

    cfg = SolverConfig{};
    CHECK_THROWS_AS(fpc_solve(map, b, -0.5, cfg), std::invalid_argument);
    CHECK_THROWS_AS(ihtms_solve(map, b, -0.5, cfg), std::invalid_argument);

    cfg = SolverConfig{};
    cfg.rank_mode = RankMode::Fixed;
    cfg.rank = 0;
    CHECK_THROWS_AS(iht_solve(map, b, cfg), std::invalid_argument);
    cfg.rank = 4;  // > min(m,n)
    CHECK_THROWS_AS(fpcar_solve(map, b, cfg), std::invalid_argument);

    CHECK_THROWS_AS(fpca_solve(map, Vector::Ones(5), cfg), std::invalid_argument);
}

TEST_CASE("zero measurements give the zero matrix immediately") {
    LinearMap map = LinearMap::gaussian(6, 5, 12, 3);
    Vector b = Vector::Zero(12);
    for (const char* id : {"fpc", "ihtr", "ihtms", "fpcar", "fpca"}) {
        SolverConfig cfg = exact_cfg();
        SolveTrace tr = solve_by_id(id, map, b, 2, 0.1, cfg);
        CHECK(tr.converged);
        CHECK(tr.x.norm() == 0.0);
        CHECK(tr.iterations <= 2);
    }
}

TEST_CASE("fpc on the identity map solves the shrinkage prox in closed form") {
    // min mu ||X||_* + 1/2 ||X - B||_F^2 has the exact solution S_mu(B).
    Matrix b_mat = Matrix::Zero(2, 2);
    b_mat(0, 0) = 3.0;
    b_mat(1, 1) = 2.0;
    LinearMap map = LinearMap::identity(2, 2);
    SolverConfig cfg = exact_cfg();

    SolveTrace tr = fpc_solve(map, vec(b_mat), 0.5, cfg);
    CHECK(tr.converged);
    Matrix want = Matrix::Zero(2, 2);
    want(0, 0) = 2.5;
    want(1, 1) = 1.5;
    CHECK((tr.x - want).norm() < 1e-10);

    // Shrinkage beyond the top singular value collapses the solution to zero.
    SolveTrace zero = fpc_solve(map, vec(b_mat), 3.5, cfg);
    CHECK(zero.converged);
    CHECK(zero.x.norm() < 1e-12);
}

TEST_CASE("fpc follows the manual iteration and decreases its objective") {
    GaussianStream s(11);
    LinearMap map = LinearMap::gaussian(8, 6, 30, 19);
    Matrix m0 = gaussian_matrix(8, 2, s) * gaussian_matrix(6, 2, s).transpose();
    Vector b = map.apply(m0);
    const double mu = 0.05;
    const double tau = 1.0 / map.spectral_upper_bound(1e-9);
    const Index steps = 30;

    SolverConfig cfg = exact_cfg();
    cfg.tau = tau;
    cfg.xtol = 1e-15;  // run the full budget
    cfg.max_total_iters = steps;
    SolveTrace tr = fpc_solve(map, b, mu, cfg);

    Matrix x = Matrix::Zero(8, 6);
    auto objective = [&](const Matrix& z) {
        return mu * nuclear_norm(z) + 0.5 * (map.apply(z) - b).squaredNorm();
    };
    double prev = objective(x);
    for (Index k = 0; k < steps; ++k) {
        x = soft_shrink(x - tau * map.adjoint(map.apply(x) - b), tau * mu);
        const double now = objective(x);
        CHECK(now <= prev + 1e-10);
        prev = now;
    }
    CHECK((tr.x - x).norm() < 1e-10 * (1.0 + x.norm()));
}

TEST_CASE("fpc clamps an unstable caller step size and says so") {
    LinearMap map = LinearMap::gaussian(6, 6, 18, 5);
    GaussianStream s(6);
    Vector b = map.apply(gaussian_matrix(6, 6, s));
    SolverConfig cfg = exact_cfg();
    cfg.tau = 100.0;  // far above 2 / lambda_max
    cfg.max_total_iters = 50;
    SolveTrace tr = fpc_solve(map, b, 0.5, cfg);
    CHECK(has_warning(tr, "clamped"));
    CHECK(tr.x.allFinite());
}

TEST_CASE("hard thresholding is stationary at a measured low-rank matrix") {
    // With b = A(M) and the identity map the first update already lands on M
    // (tau = 1): Y = 0 - (0 - M) = M and R_r(M) = M.
    GaussianStream s(21);
    Matrix m0 = gaussian_matrix(7, 2, s) * gaussian_matrix(6, 2, s).transpose();
    LinearMap map = LinearMap::identity(7, 6);
    SolverConfig cfg = exact_cfg();
    cfg.rank_mode = RankMode::Fixed;
    cfg.rank = 2;
    SolveTrace tr = iht_solve(map, map.apply(m0), cfg, &m0);
    CHECK(tr.converged);
    CHECK(tr.iterations <= 3);
    CHECK((tr.x - m0).norm() < 1e-10 * (1.0 + m0.norm()));
}

TEST_CASE("multistage shrinkage with mu = 0 reproduces plain hard thresholding") {
    ProblemInstance inst = generate_instance(15, 12, 90, 2, 77);
    SolverConfig cfg;  // default sketched projection
    cfg.rank_mode = RankMode::Fixed;
    cfg.rank = 2;
    cfg.seed = 5;
    SolveTrace a = iht_solve(inst.map, inst.b, cfg, &inst.truth);
    SolveTrace b = ihtms_solve(inst.map, inst.b, 0.0, cfg, &inst.truth);
    CHECK(a.x == b.x);
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t k = 0; k < a.records.size(); ++k) {
        CHECK(a.records[k].step == b.records[k].step);
        CHECK(a.records[k].residual == b.records[k].residual);
        CHECK(a.records[k].rank == b.records[k].rank);
    }
}

TEST_CASE("a single-stage continuation equals fixed shrinkage at the floor") {
    ProblemInstance inst = generate_instance(15, 12, 90, 2, 78);
    SolverConfig cfg = exact_cfg();
    cfg.rank_mode = RankMode::Fixed;
    cfg.rank = 2;
    cfg.mu_1 = cfg.mu_bar;  // collapses the schedule to {mu_bar}
    SolveTrace a = fpcar_solve(inst.map, inst.b, cfg, &inst.truth);
    SolveTrace b = ihtms_solve(inst.map, inst.b, cfg.mu_bar, cfg, &inst.truth);
    CHECK((a.x - b.x).norm() < 1e-12 * (1.0 + b.x.norm()));
    CHECK(a.iterations == b.iterations);
}

TEST_CASE("longer continuation stages do not hurt the final accuracy") {
    ProblemInstance inst = generate_instance(20, 20, 160, 2, 41);
    SolverConfig cfg = exact_cfg();
    cfg.rank_mode = RankMode::Fixed;
    cfg.rank = 2;
    cfg.max_inner_iters = 40;
    SolveTrace short_stages = fpcar_solve(inst.map, inst.b, cfg, &inst.truth);
    cfg.max_inner_iters = 80;
    SolveTrace long_stages = fpcar_solve(inst.map, inst.b, cfg, &inst.truth);
    CHECK(short_stages.final_rel_err < 1e-3);
    CHECK(long_stages.final_rel_err < 1e-3);
    CHECK(std::abs(long_stages.final_rel_err - short_stages.final_rel_err) < 1e-6);
}

TEST_CASE("continuation starts at eta_mu times the top adjoint singular value") {
    ProblemInstance inst = generate_instance(12, 12, 100, 2, 13);
    SolverConfig cfg = exact_cfg();
    SolveTrace tr = fpca_solve(inst.map, inst.b, cfg, &inst.truth);
    REQUIRE(!tr.records.empty());
    const double want = cfg.eta_mu * spectral_norm(inst.map.adjoint(inst.b));
    CHECK(tr.records.front().mu == doctest::Approx(want).epsilon(1e-12));
    // The schedule must end at the floor.
    CHECK(tr.records.back().mu == doctest::Approx(cfg.mu_bar).epsilon(1e-15));

    cfg.mu_1 = 0.123;
    SolveTrace pinned = fpca_solve(inst.map, inst.b, cfg, &inst.truth);
    CHECK(pinned.records.front().mu == doctest::Approx(0.123).epsilon(1e-15));
}

TEST_CASE("fixed-rank runs never exceed their rank") {
    ProblemInstance inst = generate_instance(20, 16, 140, 3, 55);
    SolverConfig cfg = exact_cfg();
    cfg.rank_mode = RankMode::Fixed;
    cfg.rank = 3;
    for (const char* id : {"ihtr", "ihtmsr", "fpcar"}) {
        SolveTrace tr = solve_by_id(id, inst.map, inst.b, 3, cfg.mu_bar, cfg,
                                    &inst.truth);
        for (const TraceRecord& rec : tr.records) CHECK(rec.rank <= 3);
        SvdFactors f = svd(tr.x);
        CHECK(f.sigma[3] <= 1e-8 * (1.0 + f.sigma[0]));
    }
}

TEST_CASE("adaptive runs keep the working rank inside [1, min(m,n)]") {
    ProblemInstance inst = generate_instance(14, 10, 70, 2, 66);
    SolverConfig cfg;  // sketched mode exercises the resampling path too
    cfg.seed = 9;
    SolveTrace tr = fpca_solve(inst.map, inst.b, cfg, &inst.truth);
    for (const TraceRecord& rec : tr.records) {
        CHECK(rec.rank >= 1);
        CHECK(rec.rank <= 10);
    }
}

TEST_CASE("rank heuristic: spectral count, gradient bump, clamps") {
    CHECK(rank_heuristic({10.0, 5.0, 0.05}, 10.0, 0.01, {}, 10.0, 8) == 2);
    CHECK(rank_heuristic({1.0}, 1.0, 0.01, {}, 10.0, 8) == 1);
    CHECK(rank_heuristic({}, 0.0, 0.01, {}, 10.0, 8) == 1);

    // Survival needs sigma_i strictly above eps_s * sigma_1.
    CHECK(rank_heuristic({10.0, 0.1}, 10.0, 0.01, {}, 10.0, 8) == 1);
    CHECK(rank_heuristic({10.0, 0.1001}, 10.0, 0.01, {}, 10.0, 8) == 2);

    // A gradient blow-up adds one to the working rank.
    CHECK(rank_heuristic({10.0, 5.0, 0.05}, 10.0, 0.01, {1.0, 15.0}, 10.0, 8) == 3);
    CHECK(rank_heuristic({10.0, 5.0, 0.05}, 10.0, 0.01, {1.0, 5.0}, 10.0, 8) == 2);
    CHECK(rank_heuristic({10.0, 5.0, 0.05}, 10.0, 0.01, {15.0}, 10.0, 8) == 2);

    // Clamped to [1, r_max] in all cases.
    CHECK(rank_heuristic({3.0, 2.9, 2.8, 2.7}, 3.0, 0.01, {}, 10.0, 2) == 2);
    CHECK(rank_heuristic({10.0, 5.0}, 10.0, 0.01, {1.0, 50.0}, 10.0, 2) == 2);

    CHECK_THROWS_AS(rank_heuristic({1.0}, 1.0, 0.01, {}, 10.0, 0),
                    std::invalid_argument);
    CHECK_THROWS_AS(rank_heuristic({1.0}, 1.0, 2.0, {}, 10.0, 3),
                    std::invalid_argument);
}

TEST_CASE("mu_schedule walks geometrically down to the floor") {
    std::vector<double> sched = mu_schedule(1.0, 0.25, 1e-2);
    REQUIRE(sched.size() == 5);
    CHECK(sched[0] == 1.0);
    CHECK(sched[1] == 0.25);
    CHECK(sched[2] == 0.0625);
    CHECK(sched[3] == 0.015625);
    CHECK(sched[4] == 1e-2);
    for (std::size_t i = 0; i + 1 < sched.size(); ++i)
        CHECK(sched[i] > sched[i + 1]);

    CHECK(mu_schedule(0.5, 0.25, 0.5) == std::vector<double>{0.5});
    CHECK(mu_schedule(0.1, 0.25, 0.5) == std::vector<double>{0.5});

    CHECK_THROWS_AS(mu_schedule(1.0, 0.0, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(mu_schedule(1.0, 1.0, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(mu_schedule(1.0, 0.25, 0.0), std::invalid_argument);
}

TEST_CASE("max_recoverable_rank counts strictly feasible ranks") {
    CHECK(max_recoverable_rank(60, 60, 720) == 6);
    CHECK(max_recoverable_rank(40, 40, 320) == 4);
    CHECK(max_recoverable_rank(5, 5, 25) == 4);   // r = 5 needs p > 25
    CHECK(max_recoverable_rank(2, 2, 1) == 0);
    CHECK(max_recoverable_rank(10, 10, 10000) == 10);  // capped at min(m,n)
}

TEST_CASE("the trace CSV carries one row per iteration") {
    ProblemInstance inst = generate_instance(10, 10, 60, 1, 31);
    SolverConfig cfg = exact_cfg();
    SolveTrace tr = fpca_solve(inst.map, inst.b, cfg, &inst.truth);
    std::istringstream csv(tr.to_csv());
    std::string line;
    REQUIRE(std::getline(csv, line));
    CHECK(line == "iter,mu,rank,residual,step,rel_err");
    std::size_t rows = 0;
    while (std::getline(csv, line)) {
        ++rows;
        CHECK(std::count(line.begin(), line.end(), ',') == 5);
    }
    CHECK(rows == tr.records.size());
    CHECK(Index(rows) == tr.iterations);
    CHECK(tr.final_residual == tr.records.back().residual);
    CHECK(tr.final_rel_err == tr.records.back().rel_err);

    // Without ground truth the rel_err cells stay empty.
    SolveTrace blind = fpca_solve(inst.map, inst.b, cfg);
    std::istringstream csv2(blind.to_csv());
    std::getline(csv2, line);
    REQUIRE(std::getline(csv2, line));
    CHECK(line.back() == ',');
    CHECK(std::isnan(blind.final_rel_err));
}

TEST_CASE("hitting the iteration cap is reported, not hidden") {
    ProblemInstance inst = generate_instance(20, 20, 120, 3, 91);
    SolverConfig cfg = exact_cfg();
    cfg.max_total_iters = 3;
    SolveTrace tr = fpca_solve(inst.map, inst.b, cfg, &inst.truth);
    CHECK(!tr.converged);
    CHECK(tr.iterations == 3);
    CHECK(has_warning(tr, "iteration cap reached"));
}

TEST_CASE("sketched solves are deterministic in the seed") {
    ProblemInstance inst = generate_instance(20, 20, 160, 2, 17);
    SolverConfig cfg;
    cfg.seed = 1;
    SolveTrace a = fpca_solve(inst.map, inst.b, cfg, &inst.truth);
    SolveTrace b = fpca_solve(inst.map, inst.b, cfg, &inst.truth);
    CHECK(a.x == b.x);
    CHECK(a.iterations == b.iterations);
    cfg.seed = 2;
    SolveTrace c = fpca_solve(inst.map, inst.b, cfg, &inst.truth);
    CHECK(a.x != c.x);
}

TEST_CASE("a sketched solve that stops progressing rescues itself") {
    // At desk scale the sketched projection cannot reach the step tolerance;
    // the engine must hand off to exact decompositions and still recover.
    ProblemInstance inst = generate_instance(40, 40, 320, 2,
                                             mix_seed(20260814, 40, 40, 320, 2, 0));
    SolverConfig cfg;
    cfg.seed = mix_seed(inst.seed, 0x736f6c76ULL);
    SolveTrace tr = fpca_solve(inst.map, inst.b, cfg, &inst.truth);
    CHECK(tr.converged);
    CHECK(tr.final_rel_err < 1e-3);
    CHECK(has_warning(tr, "sketched projection stalled"));
}

TEST_CASE("desk-scale recovery spot checks") {
    ProblemInstance inst = generate_instance(40, 40, 320, 2, 123);
    SolverConfig cfg;
    cfg.seed = 7;
    SolverConfig fixed = cfg;
    fixed.rank_mode = RankMode::Fixed;
    fixed.rank = 2;
    CHECK(iht_solve(inst.map, inst.b, fixed, &inst.truth).final_rel_err < 1e-3);
    CHECK(fpca_solve(inst.map, inst.b, cfg, &inst.truth).final_rel_err < 1e-3);
}

TEST_CASE("noisy measurements leave an error near the noise level") {
    const double noise = 1e-3;
    ProblemInstance inst = generate_instance(40, 40, 480, 2, 202, noise);
    SolverConfig cfg = exact_cfg();
    SolveTrace tr = iht_solve(inst.map, inst.b, cfg, &inst.truth);
    const double err = (tr.x - inst.truth).norm();
    CHECK(err <= 10.0 * noise);

    SolveTrace ms = ihtms_solve(inst.map, inst.b, 1e-6, cfg, &inst.truth);
    const double err_ms = (ms.x - inst.truth).norm();
    CHECK(err_ms <= err + 5e-6 * std::sqrt(40.0));
}
