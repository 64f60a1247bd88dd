#include "solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "approx_svd.hpp"
#include "errors.hpp"
#include "rng.hpp"
#include "svd_ops.hpp"

namespace lrr {

namespace {

constexpr std::uint64_t kTagSketch = 0x736b7463ULL;
constexpr double kRankGate = 0.02;  // rank recount waits for steps this small
const double kNan = std::numeric_limits<double>::quiet_NaN();

enum class Scheme { Fpc, Iht, Ihtms, FpcarFixed, FpcaAdaptive };

struct Plan {
    Scheme scheme;
    bool continuation = false;
    bool hard = false;          // rank-r projection in the update
    bool adaptive = false;      // rank chosen by the spectrum heuristic
    bool shrink_by_tau = false; // shrinkage amount is tau*mu instead of mu
    double tau = 1.0;
    std::vector<double> stages; // mu per continuation stage
    Index rank = 0;             // fixed rank, or the cap when adaptive
    Index start_rank = 0;       // first working rank; 0 means rank
    Index cs = 0;               // sketch width before the per-iteration clamp
};

void validate_config(const SolverConfig& cfg) {
    if (!(cfg.mu_bar > 0.0)) throw std::invalid_argument("solver config: mu_bar must be > 0");
    if (!(cfg.eta_mu > 0.0 && cfg.eta_mu < 1.0)) {
        throw std::invalid_argument("solver config: eta_mu must lie in (0,1)");
    }
    if (!(cfg.xtol > 0.0)) throw std::invalid_argument("solver config: xtol must be > 0");
    if (!(cfg.eps_s > 0.0 && cfg.eps_s < 1.0)) {
        throw std::invalid_argument("solver config: eps_s must lie in (0,1)");
    }
    if (cfg.max_inner_iters < 1 || cfg.max_total_iters < 1) {
        throw std::invalid_argument("solver config: iteration caps must be >= 1");
    }
    if (cfg.tau < 0.0) throw std::invalid_argument("solver config: tau must be >= 0");
    if (!(cfg.grad_blowup > 1.0)) {
        throw std::invalid_argument("solver config: grad_blowup must exceed 1");
    }
    if (cfg.nonexpansive_limit < 1) {
        throw std::invalid_argument("solver config: nonexpansive_limit must be >= 1");
    }
}

Index fixed_rank_arg(const LinearMap& map, const SolverConfig& cfg, const char* who) {
    if (cfg.rank < 1 || cfg.rank > std::min(map.rows(), map.cols())) {
        throw std::invalid_argument(std::string(who) + ": rank outside [1, min(m,n)]");
    }
    return cfg.rank;
}

Index adaptive_rank_cap(const LinearMap& map, const SolverConfig& cfg, const char* who) {
    Index r_max = cfg.rank > 0 ? cfg.rank
                               : max_recoverable_rank(map.rows(), map.cols(), map.measurements());
    r_max = std::min(r_max, std::min(map.rows(), map.cols()));
    if (r_max < 1) {
        throw std::invalid_argument(std::string(who) +
                                    ": no recoverable rank for this measurement budget");
    }
    return r_max;
}

Index sketch_width(const LinearMap& map, const SolverConfig& cfg, Index r_hat) {
    if (cfg.cs > 0) return cfg.cs;
    const Index r_max = max_recoverable_rank(map.rows(), map.cols(), map.measurements());
    // Narrower samples (the classical 2*r_max - 2) lose signal directions
    // once the working rank approaches capacity and the iteration then
    // wanders instead of contracting; three samples per retained direction
    // measurably restores recovery at the capacity edge.
    const Index cs = std::max<Index>({2 * r_max + 2, 3 * r_hat, 1});
    return std::min(cs, map.cols());
}

/// Default step for the rank-projected gradient schemes. Contraction only
/// requires 2/curvature along differences of rank <= 2*r_hat matrices. For
/// a map in isotropic position (E[A*A] = I, as with the seeded Gaussian
/// ensemble) that restricted curvature concentrates near
/// (1 + sqrt(dof/p))^2 with dof = min(k(m+n-k), mn), k = min(2*r_hat,
/// min(m,n)) -- far below the full-space curvature when p << mn, where a
/// globally safe step would crawl and the classical unit step diverges.
/// Other map kinds scale their measured global bound by the same
/// restricted/full ratio; projector-like maps (identity, entry masks) land
/// back at step 1. The result is capped at 1.
double derived_hard_step(const LinearMap& map, Index r_hat) {
    const double m = static_cast<double>(map.rows());
    const double n = static_cast<double>(map.cols());
    const double p = static_cast<double>(map.measurements());
    const double mn = m * n;
    const double k = std::min(2.0 * static_cast<double>(r_hat), std::min(m, n));
    const double dof = std::min(k * (m + n - k), mn);
    const double restricted = std::pow(1.0 + std::sqrt(dof / p), 2.0);
    double curv = restricted;
    if (map.kind() != MapKind::DenseGaussian) {
        const double full = std::pow(1.0 + std::sqrt(mn / p), 2.0);
        curv = map.spectral_upper_bound() * (restricted / full);
    }
    if (!(curv > 0.0)) return 1.0;
    return std::min(1.0, 2.0 / curv);
}

/// Starting rank for the adaptive solvers. r_max (FR < 1) is an information
/// bound, not an algorithmic one: started exactly there, the projected
/// iteration has no contraction margin and measurably stalls, while the
/// spectrum heuristic cannot descend because the tail singular values of
/// early iterates sit at the sampling noise floor (40-70% of sigma_1), far
/// above any usable eps_s. A 25% margin on the degree-of-freedom count
/// keeps the start inside the contractive region; the gradient-growth rule
/// can still push the working rank up toward the cap.
Index adaptive_start_rank(const LinearMap& map, Index cap) {
    const double m = static_cast<double>(map.rows());
    const double n = static_cast<double>(map.cols());
    const double p = static_cast<double>(map.measurements());
    Index best = 1;
    for (Index r = 1; r <= cap; ++r) {
        const double dof = static_cast<double>(r) * (m + n - static_cast<double>(r));
        if (1.25 * dof <= p) best = r;
    }
    return std::clamp<Index>(best, 1, cap);
}

double continuation_anchor(const LinearMap& map, const Vector& b, const SolverConfig& cfg) {
    if (cfg.mu_1 > 0.0) return cfg.mu_1;
    return cfg.eta_mu * spectral_norm(map.adjoint(b));
}

/// One thresholded update from the gradient-shifted point y: the rank-r
/// projection (exact or sketched) followed by singular value shrinkage by
/// nu. Fills the new iterate and its surviving spectrum.
void build_iterate(const Matrix& y, bool hard, Index r, double nu, SvdMode mode,
                   Index cs, std::uint64_t solve_seed, Index iter,
                   Matrix* x_out, std::vector<double>* sigma_out) {
    sigma_out->clear();

    if (hard && mode == SvdMode::MonteCarlo) {
        SamplerParams sp;
        sp.ks = r;
        sp.cs = std::min(y.cols(), std::max(cs, r));
        sp.seed = mix_seed(solve_seed, kTagSketch, static_cast<std::uint64_t>(iter));
        const ApproxSvd apx = linear_time_svd(y, sp);
        if (apx.k_eff > 0) {
            // Project onto the sketched left subspace, then shrink inside it:
            // y ~ H (H^T y); the small factor carries the singular values.
            const Matrix w = apx.h.transpose() * y;
            const SvdFactors f = svd(w);
            Index keep = 0;
            while (keep < f.sigma.size() && f.sigma[keep] - nu > 0.0) ++keep;
            if (keep == 0) {
                *x_out = Matrix::Zero(y.rows(), y.cols());
                return;
            }
            Vector vals = f.sigma.head(keep);
            if (nu > 0.0) vals.array() -= nu;
            *x_out = (apx.h * f.u.leftCols(keep)) * vals.asDiagonal() *
                     f.v.leftCols(keep).transpose();
            sigma_out->assign(vals.data(), vals.data() + keep);
            return;
        }
        // Collapsed sketch (all sampled columns zero): fall back to the
        // exact projection for this iteration.
    }

    // The rank-r truncation only keeps values that are a meaningful
    // fraction of sigma_1, so the faster Gram-matrix route is accurate
    // enough; the soft path must resolve values near small thresholds and
    // stays on the full decomposition.
    const SvdFactors f = hard ? svd_gram(y, r) : svd(y, kFullRank);
    Index keep = 0;
    while (keep < f.sigma.size() && f.sigma[keep] - nu > 0.0) ++keep;
    if (keep == 0) {
        *x_out = Matrix::Zero(y.rows(), y.cols());
        return;
    }
    Vector vals = f.sigma.head(keep);
    if (nu > 0.0) vals.array() -= nu;
    *x_out = f.u.leftCols(keep) * vals.asDiagonal() * f.v.leftCols(keep).transpose();
    sigma_out->assign(vals.data(), vals.data() + keep);
}

SolveTrace run_engine(const LinearMap& map, const Vector& b, const Plan& plan,
                      const SolverConfig& cfg, const Matrix* truth,
                      std::vector<std::string> warnings) {
    const auto t0 = std::chrono::steady_clock::now();

    if (b.size() != map.measurements()) {
        throw std::invalid_argument("solve: measurement vector length mismatch");
    }
    require_finite(b, "solve: b");
    double truth_norm = 0.0;
    if (truth) {
        if (truth->rows() != map.rows() || truth->cols() != map.cols()) {
            throw std::invalid_argument("solve: ground truth shape mismatch");
        }
        truth_norm = truth->norm();
        if (truth_norm == 0.0) {
            throw std::invalid_argument("solve: ground truth must be nonzero");
        }
    }

    SolveTrace tr;
    tr.warnings = std::move(warnings);

    Matrix x = Matrix::Zero(map.rows(), map.cols());
    Matrix prev_y;  // only kept for the nonexpansive bump rule
    std::vector<double> prev_sigma;
    std::vector<double> grad_history;
    const bool track_nonexp = plan.adaptive && cfg.nonexpansive_rule;

    Index r = plan.start_rank > 0 ? plan.start_rank : plan.rank;
    Index rank_boost = 0;
    Index nonexp_count = 0;
    std::size_t stage = 0;
    Index inner = 0;
    bool want_stop = false;
    bool converged = false;
    double resn = 0.0;

    // The sketched projection occasionally locks a solve into a metastable
    // wander (step norms hovering far above the tolerance for thousands of
    // iterations, re-randomized sketches never escaping). Watch the best
    // step per window; when a window stops improving while still far from
    // the tolerance, finish with exact decompositions.
    SvdMode svd_now = cfg.svd_mode;
    constexpr Index kStallWindow = 150;
    const double kInf = std::numeric_limits<double>::infinity();
    double win_best = kInf, win_prev = kInf;
    Index win_count = 0;

    for (Index k = 1;; ++k) {
        Vector res = map.apply(x);
        res -= b;
        resn = res.norm();
        if (!tr.records.empty() && std::isnan(tr.records.back().residual)) {
            tr.records.back().residual = resn;
        }
        if (want_stop) break;

        const Matrix g = map.adjoint(res);
        grad_history.push_back(g.norm());

        if (plan.adaptive && k >= 2) {
            const double sigma_1 = prev_sigma.empty() ? 0.0 : prev_sigma.front();
            static const std::vector<double> kNoHistory;
            const std::vector<double>& hist =
                cfg.nonexpansive_rule ? kNoHistory : grad_history;
            // The spectrum of a fast-moving iterate is sampling noise; a
            // (sketched) count taken mid-transient can collapse the rank
            // into a wrong, self-consistent basin the solve never leaves.
            // Refresh the count only once the subproblem settles; the
            // growth bump stays live throughout.
            Index base;
            if (tr.records.back().step < kRankGate) {
                base = rank_heuristic(prev_sigma, sigma_1, cfg.eps_s, hist,
                                      cfg.grad_blowup, plan.rank);
            } else {
                base = r;
                if (hist.size() >= 2) {
                    const double prev = hist[hist.size() - 2];
                    if (prev > 0.0 && hist.back() > cfg.grad_blowup * prev) ++base;
                }
            }
            r = std::clamp<Index>(base + rank_boost, 1, plan.rank);
        }

        const double mu_now = plan.stages[stage];
        const double nu = plan.shrink_by_tau ? plan.tau * mu_now : mu_now;
        const Matrix y = x - plan.tau * g;

        Matrix x_new;
        std::vector<double> sigma_new;
        build_iterate(y, plan.hard, r, nu, svd_now, plan.cs, cfg.seed, k,
                      &x_new, &sigma_new);

        if (track_nonexp) {
            // The exact shrinkage is nonexpansive; a violation signals that
            // the sketched projection lost signal, so the rank is too small.
            if (prev_y.size() &&
                (x_new - x).norm() > (y - prev_y).norm() * (1.0 + 1e-12)) {
                if (++nonexp_count >= cfg.nonexpansive_limit) {
                    ++rank_boost;
                    nonexp_count = 0;
                }
            }
            prev_y = y;
        }

        const double step = (x_new - x).norm() / std::max(1.0, x.norm());
        const double rel = truth ? (x_new - *truth).norm() / truth_norm : kNan;

        if (svd_now == SvdMode::MonteCarlo && plan.hard) {
            win_best = std::min(win_best, step);
            if (++win_count >= kStallWindow) {
                if (win_prev < kInf && win_best > 0.6 * win_prev &&
                    win_best > 100.0 * cfg.xtol) {
                    svd_now = SvdMode::Exact;
                    tr.warnings.push_back(
                        "sketched projection stalled; finishing with exact "
                        "decompositions");
                }
                win_prev = win_best;
                win_best = kInf;
                win_count = 0;
            }
        }

        TraceRecord rec;
        rec.iter = k;
        rec.mu = mu_now;
        rec.rank = static_cast<Index>(sigma_new.size());
        rec.residual = kNan;  // completed at the top of the next pass
        rec.step = step;
        rec.rel_err = rel;
        tr.records.push_back(rec);

        ++inner;
        const bool at_final = (stage + 1 == plan.stages.size());
        if (step < cfg.xtol) {
            if (at_final) {
                want_stop = true;
                converged = true;
            } else {
                ++stage;
                inner = 0;
                win_best = win_prev = kInf;
                win_count = 0;
            }
        } else if (!at_final && inner >= cfg.max_inner_iters) {
            // Move on with a warm start; the final stage is bounded by the
            // total budget instead, so it is never truncated early.
            ++stage;
            inner = 0;
            win_best = win_prev = kInf;
            win_count = 0;
        }
        if (k >= cfg.max_total_iters && !want_stop) {
            want_stop = true;
            converged = false;
            tr.warnings.push_back("iteration cap reached before the step tolerance");
        }

        x = std::move(x_new);
        prev_sigma = std::move(sigma_new);
    }

    tr.x = std::move(x);
    tr.iterations = static_cast<Index>(tr.records.size());
    tr.converged = converged;
    tr.final_residual = resn;
    tr.final_rel_err = truth ? (tr.x - *truth).norm() / truth_norm : kNan;
    tr.truth_norm = truth_norm;
    tr.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return tr;
}

} // namespace

std::string SolveTrace::to_csv() const {
    std::string out = "iter,mu,rank,residual,step,rel_err\n";
    char buf[192];
    for (const TraceRecord& r : records) {
        int len = std::snprintf(buf, sizeof buf, "%lld,%.17g,%lld,%.17g,%.17g,",
                                static_cast<long long>(r.iter), r.mu,
                                static_cast<long long>(r.rank), r.residual, r.step);
        out.append(buf, static_cast<std::size_t>(len));
        if (!std::isnan(r.rel_err)) {
            len = std::snprintf(buf, sizeof buf, "%.17g", r.rel_err);
            out.append(buf, static_cast<std::size_t>(len));
        }
        out += '\n';
    }
    return out;
}

SolveTrace fpc_solve(const LinearMap& map, const Vector& b, double mu,
                     const SolverConfig& cfg, const Matrix* truth) {
    validate_config(cfg);
    if (!(mu >= 0.0)) throw std::invalid_argument("fpc_solve: mu must be >= 0");

    std::vector<std::string> warnings;
    const double lambda = map.spectral_upper_bound();
    double tau = cfg.tau > 0.0 ? cfg.tau : (lambda > 0.0 ? 1.0 / lambda : 1.0);
    if (lambda > 0.0 && tau >= 2.0 / lambda) {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "tau %.6g outside (0, 2/lambda_max); clamped to %.6g", tau,
                      0.9999 * 2.0 / lambda);
        warnings.push_back(buf);
        tau = 0.9999 * 2.0 / lambda;
    }

    Plan plan;
    plan.scheme = Scheme::Fpc;
    plan.hard = false;
    plan.shrink_by_tau = true;
    plan.tau = tau;
    plan.stages = {mu};
    plan.rank = std::min(map.rows(), map.cols());
    return run_engine(map, b, plan, cfg, truth, std::move(warnings));
}

SolveTrace iht_solve(const LinearMap& map, const Vector& b,
                     const SolverConfig& cfg, const Matrix* truth) {
    validate_config(cfg);
    Plan plan;
    plan.scheme = Scheme::Iht;
    plan.hard = true;
    plan.stages = {0.0};
    plan.adaptive = cfg.rank_mode == RankMode::Adaptive;
    plan.rank = plan.adaptive ? adaptive_rank_cap(map, cfg, "iht_solve")
                              : fixed_rank_arg(map, cfg, "iht_solve");
    if (plan.adaptive) plan.start_rank = adaptive_start_rank(map, plan.rank);
    plan.tau = cfg.tau > 0.0 ? cfg.tau : derived_hard_step(map, plan.rank);
    plan.cs = sketch_width(map, cfg, plan.rank);
    return run_engine(map, b, plan, cfg, truth, {});
}

SolveTrace ihtms_solve(const LinearMap& map, const Vector& b, double mu,
                       const SolverConfig& cfg, const Matrix* truth) {
    validate_config(cfg);
    if (!(mu >= 0.0)) throw std::invalid_argument("ihtms_solve: mu must be >= 0");
    Plan plan;
    plan.scheme = Scheme::Ihtms;
    plan.hard = true;
    plan.stages = {mu};
    plan.adaptive = cfg.rank_mode == RankMode::Adaptive;
    plan.rank = plan.adaptive ? adaptive_rank_cap(map, cfg, "ihtms_solve")
                              : fixed_rank_arg(map, cfg, "ihtms_solve");
    if (plan.adaptive) plan.start_rank = adaptive_start_rank(map, plan.rank);
    plan.tau = cfg.tau > 0.0 ? cfg.tau : derived_hard_step(map, plan.rank);
    plan.cs = sketch_width(map, cfg, plan.rank);
    return run_engine(map, b, plan, cfg, truth, {});
}

SolveTrace fpcar_solve(const LinearMap& map, const Vector& b,
                       const SolverConfig& cfg, const Matrix* truth) {
    validate_config(cfg);
    Plan plan;
    plan.scheme = Scheme::FpcarFixed;
    plan.continuation = true;
    plan.hard = true;
    plan.stages = mu_schedule(continuation_anchor(map, b, cfg), cfg.eta_mu, cfg.mu_bar);
    plan.rank = fixed_rank_arg(map, cfg, "fpcar_solve");
    plan.tau = cfg.tau > 0.0 ? cfg.tau : derived_hard_step(map, plan.rank);
    plan.cs = sketch_width(map, cfg, plan.rank);
    return run_engine(map, b, plan, cfg, truth, {});
}

SolveTrace fpca_solve(const LinearMap& map, const Vector& b,
                      const SolverConfig& cfg, const Matrix* truth) {
    validate_config(cfg);
    Plan plan;
    plan.scheme = Scheme::FpcaAdaptive;
    plan.continuation = true;
    plan.hard = true;
    plan.adaptive = true;
    plan.shrink_by_tau = true;
    plan.stages = mu_schedule(continuation_anchor(map, b, cfg), cfg.eta_mu, cfg.mu_bar);
    plan.rank = adaptive_rank_cap(map, cfg, "fpca_solve");
    plan.start_rank = adaptive_start_rank(map, plan.rank);
    plan.tau = cfg.tau > 0.0 ? cfg.tau : derived_hard_step(map, plan.rank);
    plan.cs = sketch_width(map, cfg, plan.rank);
    return run_engine(map, b, plan, cfg, truth, {});
}

Index max_recoverable_rank(Index m, Index n, Index p) {
    Index best = 0;
    const Index cap = std::min(m, n);
    for (Index r = 1; r <= cap; ++r) {
        if (r * (m + n - r) < p) best = r;
    }
    return best;
}

std::vector<double> mu_schedule(double mu_1, double eta, double mu_bar) {
    if (!(mu_bar > 0.0)) throw std::invalid_argument("mu_schedule: mu_bar must be > 0");
    if (!(eta > 0.0 && eta < 1.0)) {
        throw std::invalid_argument("mu_schedule: eta must lie in (0,1)");
    }
    if (!(mu_1 < 1e300)) throw std::invalid_argument("mu_schedule: mu_1 must be finite");
    if (mu_1 <= mu_bar) return {mu_bar};
    std::vector<double> stages{mu_1};
    while (stages.back() > mu_bar) {
        stages.push_back(std::max(eta * stages.back(), mu_bar));
    }
    return stages;
}

Index rank_heuristic(const std::vector<double>& prev_sigma, double sigma_1,
                     double eps_s, const std::vector<double>& grad_history,
                     double blowup, Index r_max) {
    if (r_max < 1) throw std::invalid_argument("rank_heuristic: r_max must be >= 1");
    if (!(eps_s > 0.0 && eps_s < 1.0)) {
        throw std::invalid_argument("rank_heuristic: eps_s must lie in (0,1)");
    }
    Index r = 0;
    if (!prev_sigma.empty() && sigma_1 > 0.0) {
        const double cut = eps_s * sigma_1;
        for (double s : prev_sigma) {
            if (s > cut) ++r;
        }
    }
    if (r < 1) r = 1;
    if (grad_history.size() >= 2) {
        const double prev = grad_history[grad_history.size() - 2];
        const double cur = grad_history.back();
        if (prev > 0.0 && cur > blowup * prev) ++r;
    }
    return std::clamp<Index>(r, 1, r_max);
}

} // namespace lrr
