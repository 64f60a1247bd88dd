#include "bench.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <thread>

#include "rng.hpp"
#include "svd_ops.hpp"

namespace lrr {

namespace {

constexpr std::uint64_t kTagFactorL = 0x666c6674ULL;
constexpr std::uint64_t kTagFactorR = 0x72676874ULL;
constexpr std::uint64_t kTagMap = 0x6d617030ULL;
constexpr std::uint64_t kTagNoise = 0x6e6f6973ULL;
constexpr std::uint64_t kTagOrtho = 0x6f727468ULL;

const double kNan = std::numeric_limits<double>::quiet_NaN();

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("LRR_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1) return static_cast<int>(v);
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc ? static_cast<int>(hc) : 1;
}

/// Run fn(0..count-1) on up to `threads` workers. Tasks must handle their
/// own exceptions; results go into pre-sized slots so aggregation order does
/// not depend on scheduling.
void run_parallel(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
    const int workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
        });
    }
    for (std::thread& t : pool) t.join();
}

struct RunOutcome {
    bool ok = false;
    bool recovered = false;
    double rel = kNan;
    double seconds = 0.0;
    std::string failure;
};

RunOutcome run_one(const std::string& id, const ProblemInstance& inst, Index rank,
                   const SolverConfig& cfg) {
    RunOutcome out;
    try {
        const SolveTrace tr = solve_with(id, inst, rank, cfg);
        out.ok = true;
        out.rel = tr.final_rel_err;
        out.seconds = tr.wall_seconds;
        out.recovered = std::isfinite(tr.final_rel_err) && tr.final_rel_err < kRecoveryThreshold;
    } catch (const std::exception& e) {
        out.failure = e.what();
    }
    return out;
}

void fold_outcomes(ReportRow& row, const std::vector<RunOutcome>& outcomes) {
    double time_sum = 0.0, err_sum = 0.0;
    for (const RunOutcome& o : outcomes) {
        ++row.instances;
        if (!o.ok) {
            row.failures.push_back(o.failure);
            continue;
        }
        if (o.recovered) {
            ++row.ns;
            time_sum += o.seconds;
            err_sum += o.rel;
        }
    }
    if (row.ns > 0) {
        row.avg_time_s = time_sum / static_cast<double>(row.ns);
        row.avg_rel_err = err_sum / static_cast<double>(row.ns);
    } else {
        row.avg_time_s = kNan;
        row.avg_rel_err = kNan;
    }
}

std::string fmt_avg_time(double v) {
    if (std::isnan(v)) return "---";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string fmt_avg_err(double v) {
    if (std::isnan(v)) return "---";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

} // namespace

ProblemInstance generate_instance(Index m, Index n, Index p, Index r,
                                  std::uint64_t seed, double noise_norm) {
    if (m < 1 || n < 1) throw std::invalid_argument("generate_instance: m, n must be >= 1");
    if (r < 1 || r > std::min(m, n)) {
        throw std::invalid_argument("generate_instance: rank outside [1, min(m,n)]");
    }
    if (p < 1) throw std::invalid_argument("generate_instance: p must be >= 1");
    if (!(noise_norm >= 0.0)) {
        throw std::invalid_argument("generate_instance: noise_norm must be >= 0");
    }

    GaussianStream left(mix_seed(seed, kTagFactorL));
    GaussianStream right(mix_seed(seed, kTagFactorR));
    const Matrix ml = gaussian_matrix(m, r, left);
    const Matrix mr = gaussian_matrix(n, r, right);

    ProblemInstance inst{LinearMap::gaussian(m, n, p, mix_seed(seed, kTagMap)),
                         Vector(), ml * mr.transpose(), m, n, p, r, seed, noise_norm};
    inst.b = inst.map.apply(inst.truth);
    if (noise_norm > 0.0) {
        GaussianStream noise(mix_seed(seed, kTagNoise));
        Vector e(p);
        for (Index i = 0; i < p; ++i) e[i] = noise.normal();
        const double en = e.norm();
        if (en > 0.0) inst.b += (noise_norm / en) * e;
    }
    return inst;
}

ProblemInstance near_lowrank_instance(Index m, Index n, Index p, Index r,
                                      double decay, std::uint64_t seed) {
    if (m < 1 || n < 1) throw std::invalid_argument("near_lowrank_instance: m, n must be >= 1");
    if (r < 1 || r > std::min(m, n)) {
        throw std::invalid_argument("near_lowrank_instance: rank outside [1, min(m,n)]");
    }
    if (p < 1) throw std::invalid_argument("near_lowrank_instance: p must be >= 1");
    if (!(decay >= 0.0 && decay < 1.0)) {
        throw std::invalid_argument("near_lowrank_instance: decay must lie in [0,1)");
    }

    const Index k = std::min(m, n);
    GaussianStream stream(mix_seed(seed, kTagOrtho));
    const Matrix qu = Eigen::HouseholderQR<Matrix>(gaussian_matrix(m, k, stream))
                          .householderQ() * Matrix::Identity(m, k);
    const Matrix qv = Eigen::HouseholderQR<Matrix>(gaussian_matrix(n, k, stream))
                          .householderQ() * Matrix::Identity(n, k);
    Vector sigma(k);
    for (Index i = 0; i < k; ++i) {
        sigma[i] = i < r ? 1.0 : std::pow(decay, static_cast<double>(i - r + 1));
    }

    ProblemInstance inst{LinearMap::gaussian(m, n, p, mix_seed(seed, kTagMap)),
                         Vector(), qu * sigma.asDiagonal() * qv.transpose(),
                         m, n, p, r, seed, 0.0};
    inst.b = inst.map.apply(inst.truth);
    return inst;
}

CellMetrics metrics(Index m, Index n, Index p, Index r) {
    if (m < 1 || n < 1 || p < 1) throw std::invalid_argument("metrics: m, n, p must be >= 1");
    if (r < 1 || r > std::min(m, n)) {
        throw std::invalid_argument("metrics: rank outside [1, min(m,n)]");
    }
    CellMetrics out;
    out.sr = static_cast<double>(p) / static_cast<double>(m * n);
    out.fr = static_cast<double>(r * (m + n - r)) / static_cast<double>(p);
    out.r_max = max_recoverable_rank(m, n, p);
    return out;
}

double rel_err(const Matrix& x, const Matrix& m) {
    if (x.rows() != m.rows() || x.cols() != m.cols()) {
        throw std::invalid_argument("rel_err: shape mismatch");
    }
    const double denom = m.norm();
    if (denom == 0.0) throw std::invalid_argument("rel_err: reference matrix must be nonzero");
    return (x - m).norm() / denom;
}

std::vector<std::string> resolve_solver_ids(const std::string& selector) {
    static const std::vector<std::string> kAll = {"ihtr", "iht", "ihtmsr",
                                                  "ihtms", "fpcar", "fpca"};
    std::vector<std::string> out;
    auto push = [&out](const std::string& id) {
        if (std::find(out.begin(), out.end(), id) == out.end()) out.push_back(id);
    };

    std::size_t start = 0;
    while (start <= selector.size()) {
        std::size_t end = selector.find(',', start);
        if (end == std::string::npos) end = selector.size();
        std::string tok = selector.substr(start, end - start);
        start = end + 1;
        // trim
        while (!tok.empty() && tok.front() == ' ') tok.erase(tok.begin());
        while (!tok.empty() && tok.back() == ' ') tok.pop_back();
        if (tok.empty()) continue;
        for (char& c : tok) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));

        if (tok == "all") {
            for (const std::string& id : kAll) push(id);
        } else if (tok == "iht-adaptive") {
            push("iht");
        } else if (tok == "ihtms-adaptive") {
            push("ihtms");
        } else if (tok == "fpca-adaptive") {
            push("fpca");
        } else if (std::find(kAll.begin(), kAll.end(), tok) != kAll.end() || tok == "fpc") {
            push(tok);
        } else {
            throw std::invalid_argument("unknown solver id: '" + tok + "'");
        }
    }
    if (out.empty()) throw std::invalid_argument("no solver selected");
    return out;
}

SolveTrace solve_by_id(const std::string& id, const LinearMap& map, const Vector& b,
                       Index rank, double mu, SolverConfig cfg, const Matrix* truth) {
    if (id == "fpc") {
        return fpc_solve(map, b, mu, cfg, truth);
    }
    if (id == "ihtr" || id == "ihtmsr" || id == "fpcar") {
        cfg.rank_mode = RankMode::Fixed;
        cfg.rank = rank;
    } else if (id == "iht" || id == "ihtms" || id == "fpca") {
        cfg.rank_mode = RankMode::Adaptive;
        cfg.rank = 0;  // derive r_max from the cell
    } else {
        throw std::invalid_argument("unknown solver id: '" + id + "'");
    }
    if (id == "ihtr" || id == "iht") return iht_solve(map, b, cfg, truth);
    if (id == "ihtmsr" || id == "ihtms") return ihtms_solve(map, b, mu, cfg, truth);
    if (id == "fpcar") return fpcar_solve(map, b, cfg, truth);
    return fpca_solve(map, b, cfg, truth);
}

SolveTrace solve_with(const std::string& id, const ProblemInstance& inst,
                      Index rank, SolverConfig cfg) {
    cfg.seed = mix_seed(cfg.seed, inst.seed);
    return solve_by_id(id, inst.map, inst.b, rank, cfg.mu_bar, cfg, &inst.truth);
}

BenchReport run_campaign(const CampaignOptions& opts) {
    if (opts.cells.empty()) throw std::invalid_argument("run_campaign: no cells");
    if (opts.solvers.empty()) throw std::invalid_argument("run_campaign: no solvers");
    if (opts.instances_per_cell < 1) {
        throw std::invalid_argument("run_campaign: instances_per_cell must be >= 1");
    }

    BenchReport report;
    const std::size_t n_solvers = opts.solvers.size();
    const std::size_t n_cells = opts.cells.size();
    const std::size_t n_inst = static_cast<std::size_t>(opts.instances_per_cell);

    for (const CampaignCell& cell : opts.cells) {
        const CellMetrics cm = metrics(cell.m, cell.n, cell.p, cell.r);
        if (cm.fr >= 1.0) {
            char buf[160];
            std::snprintf(buf, sizeof buf,
                          "cell m=%lld n=%lld p=%lld r=%lld has FR=%.4g >= 1; "
                          "exact recovery is information-theoretically impossible",
                          static_cast<long long>(cell.m), static_cast<long long>(cell.n),
                          static_cast<long long>(cell.p), static_cast<long long>(cell.r),
                          cm.fr);
            report.warnings.push_back(buf);
        }
    }

    // outcome[cell][solver][instance]
    std::vector<std::vector<std::vector<RunOutcome>>> outcomes(
        n_cells, std::vector<std::vector<RunOutcome>>(n_solvers,
                                                      std::vector<RunOutcome>(n_inst)));

    std::vector<std::pair<std::size_t, std::size_t>> tasks;  // (cell, instance)
    tasks.reserve(n_cells * n_inst);
    for (std::size_t c = 0; c < n_cells; ++c) {
        for (std::size_t i = 0; i < n_inst; ++i) tasks.emplace_back(c, i);
    }

    run_parallel(tasks.size(), resolve_threads(opts.threads), [&](std::size_t t) {
        const auto [c, i] = tasks[t];
        const CampaignCell& cell = opts.cells[c];
        const std::uint64_t seed = mix_seed(
            opts.master_seed, static_cast<std::uint64_t>(cell.m),
            static_cast<std::uint64_t>(cell.n), static_cast<std::uint64_t>(cell.p),
            static_cast<std::uint64_t>(cell.r), static_cast<std::uint64_t>(i));
        std::optional<ProblemInstance> inst;
        try {
            inst.emplace(generate_instance(cell.m, cell.n, cell.p, cell.r, seed,
                                           opts.noise_norm));
        } catch (const std::exception& e) {
            for (std::size_t s = 0; s < n_solvers; ++s) {
                outcomes[c][s][i].failure = std::string("instance generation: ") + e.what();
            }
            return;
        }
        for (std::size_t s = 0; s < n_solvers; ++s) {
            outcomes[c][s][i] = run_one(opts.solvers[s], *inst, cell.r, opts.config);
        }
    });

    for (std::size_t c = 0; c < n_cells; ++c) {
        const CampaignCell& cell = opts.cells[c];
        const CellMetrics cm = metrics(cell.m, cell.n, cell.p, cell.r);
        for (std::size_t s = 0; s < n_solvers; ++s) {
            ReportRow row;
            row.solver = opts.solvers[s];
            row.m = cell.m;
            row.n = cell.n;
            row.p = cell.p;
            row.r = cell.r;
            row.sr = cm.sr;
            row.fr = cm.fr;
            fold_outcomes(row, outcomes[c][s]);
            report.rows.push_back(std::move(row));
        }
    }
    return report;
}

BenchReport wrong_rank_study(const RankStudyOptions& opts) {
    if (opts.given_ranks.empty()) throw std::invalid_argument("wrong_rank_study: no ranks");
    if (opts.solvers.empty()) throw std::invalid_argument("wrong_rank_study: no solvers");
    if (opts.instances < 1) {
        throw std::invalid_argument("wrong_rank_study: instances must be >= 1");
    }
    (void)metrics(opts.m, opts.n, opts.p, opts.true_rank);  // validates the cell

    struct Combo {
        std::string id;
        Index rank;      // 0 for adaptive rows
        bool adaptive;
    };
    std::vector<Combo> combos;
    for (const std::string& id : opts.solvers) {
        const bool adaptive = (id == "iht" || id == "ihtms" || id == "fpca" || id == "fpc");
        if (adaptive) {
            combos.push_back({id, 0, true});
        } else {
            for (Index r : opts.given_ranks) {
                if (r < 1 || r > std::min(opts.m, opts.n)) {
                    throw std::invalid_argument("wrong_rank_study: given rank outside [1, min(m,n)]");
                }
                combos.push_back({id, r, false});
            }
        }
    }

    const std::size_t n_inst = static_cast<std::size_t>(opts.instances);
    std::vector<std::vector<RunOutcome>> outcomes(combos.size(),
                                                  std::vector<RunOutcome>(n_inst));

    run_parallel(n_inst, resolve_threads(opts.threads), [&](std::size_t i) {
        const std::uint64_t seed = mix_seed(
            opts.master_seed, static_cast<std::uint64_t>(opts.m),
            static_cast<std::uint64_t>(opts.n), static_cast<std::uint64_t>(opts.p),
            static_cast<std::uint64_t>(opts.true_rank), static_cast<std::uint64_t>(i));
        std::optional<ProblemInstance> inst;
        try {
            inst.emplace(generate_instance(opts.m, opts.n, opts.p, opts.true_rank, seed));
        } catch (const std::exception& e) {
            for (std::size_t s = 0; s < combos.size(); ++s) {
                outcomes[s][i].failure = std::string("instance generation: ") + e.what();
            }
            return;
        }
        for (std::size_t s = 0; s < combos.size(); ++s) {
            outcomes[s][i] = run_one(combos[s].id, *inst, combos[s].rank, opts.config);
        }
    });

    BenchReport report;
    report.rank_study = true;
    report.true_rank = opts.true_rank;
    const CellMetrics cm = metrics(opts.m, opts.n, opts.p, opts.true_rank);
    for (std::size_t s = 0; s < combos.size(); ++s) {
        ReportRow row;
        row.solver = combos[s].id;
        row.m = opts.m;
        row.n = opts.n;
        row.p = opts.p;
        row.r = combos[s].rank;
        row.adaptive_rank = combos[s].adaptive;
        row.sr = cm.sr;
        row.fr = cm.fr;
        fold_outcomes(row, outcomes[s]);
        report.rows.push_back(std::move(row));
    }
    return report;
}

std::string BenchReport::to_csv() const {
    std::string out = rank_study ? "solver,m,n,p,true_r,given_r,NS,avg_time_s,avg_rel_err\n"
                                 : "solver,m,n,p,r,SR,FR,NS,avg_time_s,avg_rel_err\n";
    char buf[256];
    for (const ReportRow& row : rows) {
        if (rank_study) {
            std::snprintf(buf, sizeof buf, "%s,%lld,%lld,%lld,%lld,", row.solver.c_str(),
                          static_cast<long long>(row.m), static_cast<long long>(row.n),
                          static_cast<long long>(row.p), static_cast<long long>(true_rank));
            out += buf;
            out += row.adaptive_rank ? "adaptive" : std::to_string(row.r);
            std::snprintf(buf, sizeof buf, ",%lld,%s,%s\n", static_cast<long long>(row.ns),
                          fmt_avg_time(row.avg_time_s).c_str(),
                          fmt_avg_err(row.avg_rel_err).c_str());
            out += buf;
        } else {
            std::snprintf(buf, sizeof buf, "%s,%lld,%lld,%lld,%lld,%.6g,%.6g,%lld,%s,%s\n",
                          row.solver.c_str(), static_cast<long long>(row.m),
                          static_cast<long long>(row.n), static_cast<long long>(row.p),
                          static_cast<long long>(row.r), row.sr, row.fr,
                          static_cast<long long>(row.ns),
                          fmt_avg_time(row.avg_time_s).c_str(),
                          fmt_avg_err(row.avg_rel_err).c_str());
            out += buf;
        }
    }
    return out;
}

std::string BenchReport::to_text() const {
    std::string out;
    char buf[256];
    for (const std::string& w : warnings) {
        out += "# warning: " + w + "\n";
    }
    if (rank_study) {
        std::snprintf(buf, sizeof buf, "# wrong-rank study: true rank %lld\n",
                      static_cast<long long>(true_rank));
        out += buf;
        out += "solver     m    n      p  given_r  NS  avg_time_s  avg_rel_err\n";
        for (const ReportRow& row : rows) {
            const std::string given = row.adaptive_rank ? "adaptive" : std::to_string(row.r);
            std::snprintf(buf, sizeof buf, "%-8s %4lld %4lld %6lld %8s %3lld %11s %12s\n",
                          row.solver.c_str(), static_cast<long long>(row.m),
                          static_cast<long long>(row.n), static_cast<long long>(row.p),
                          given.c_str(), static_cast<long long>(row.ns),
                          fmt_avg_time(row.avg_time_s).c_str(),
                          fmt_avg_err(row.avg_rel_err).c_str());
            out += buf;
        }
    } else {
        out += "solver     m    n      p  r      SR      FR  NS  avg_time_s  avg_rel_err\n";
        for (const ReportRow& row : rows) {
            std::snprintf(buf, sizeof buf,
                          "%-8s %4lld %4lld %6lld %2lld %7.4f %7.4f %3lld %11s %12s\n",
                          row.solver.c_str(), static_cast<long long>(row.m),
                          static_cast<long long>(row.n), static_cast<long long>(row.p),
                          static_cast<long long>(row.r), row.sr, row.fr,
                          static_cast<long long>(row.ns),
                          fmt_avg_time(row.avg_time_s).c_str(),
                          fmt_avg_err(row.avg_rel_err).c_str());
            out += buf;
        }
    }
    return out;
}

} // namespace lrr
