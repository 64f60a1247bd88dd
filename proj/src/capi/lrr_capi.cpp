#include "lrr/lrr.h"

#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <new>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "../core/approx_svd.hpp"
#include "../core/bench.hpp"
#include "../core/dense.hpp"
#include "../core/errors.hpp"
#include "../core/linear_map.hpp"
#include "../core/rip.hpp"
#include "../core/solvers.hpp"
#include "../core/svd_ops.hpp"

struct lrr_matrix {
    lrr::Matrix v;
};
struct lrr_map {
    lrr::LinearMap v;
};
struct lrr_sketch {
    lrr::ApproxSvd v;
};
struct lrr_trace {
    lrr::SolveTrace v;
};
struct lrr_instance {
    lrr::ProblemInstance v;
    lrr_map map_handle;  // aliased view returned by lrr_instance_map
};
struct lrr_report {
    lrr::BenchReport v;
    std::string csv;
    std::string text;
};

namespace {

thread_local std::string t_last_error;

template <typename F>
lrr_status guarded(F&& body) {
    try {
        body();
        t_last_error.clear();
        return LRR_OK;
    } catch (const std::invalid_argument& e) {
        t_last_error = e.what();
        return LRR_ERR_ARGUMENT;
    } catch (const lrr::NumericalError& e) {
        t_last_error = e.what();
        return LRR_ERR_NUMERIC;
    } catch (const lrr::IoError& e) {
        t_last_error = e.what();
        return LRR_ERR_IO;
    } catch (const std::bad_alloc&) {
        t_last_error = "out of memory";
        return LRR_ERR_INTERNAL;
    } catch (const std::exception& e) {
        t_last_error = e.what();
        return LRR_ERR_INTERNAL;
    } catch (...) {
        t_last_error = "unknown error";
        return LRR_ERR_INTERNAL;
    }
}

void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

/// "-" sends the payload to stdout; anything else is a file path.
void write_text_output(const std::string& path, const std::string& content) {
    if (path == "-") {
        std::fwrite(content.data(), 1, content.size(), stdout);
        std::fflush(stdout);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw lrr::IoError("cannot open '" + path + "' for writing");
    out << content;
    out.flush();
    if (!out) throw lrr::IoError("failed while writing '" + path + "'");
}

lrr::Matrix matrix_from_row_major(int64_t rows, int64_t cols, const double* data,
                                  const char* what) {
    require(rows >= 1 && cols >= 1, "matrix dimensions must be positive");
    lrr::Matrix x = lrr::Matrix::Zero(rows, cols);
    if (data != nullptr) {
        for (int64_t i = 0; i < rows; ++i)
            for (int64_t j = 0; j < cols; ++j) x(i, j) = data[i * cols + j];
        lrr::require_finite(x, what);
    }
    return x;
}

lrr::Vector vector_from(const double* data, int64_t n, const char* what) {
    require(data != nullptr || n == 0, "vector data must not be null");
    require(n >= 0, "vector length must be nonnegative");
    lrr::Vector y(n);
    for (int64_t i = 0; i < n; ++i) y[i] = data[i];
    lrr::require_finite(y, what);
    return y;
}

lrr::SolverConfig to_core(const lrr_solver_config* cfg) {
    if (cfg == nullptr) return lrr::SolverConfig{};
    require(cfg->rank_mode == LRR_RANK_FIXED || cfg->rank_mode == LRR_RANK_ADAPTIVE,
            "rank_mode must be LRR_RANK_FIXED or LRR_RANK_ADAPTIVE");
    require(cfg->svd_mode == LRR_SVD_EXACT || cfg->svd_mode == LRR_SVD_MONTE_CARLO,
            "svd_mode must be LRR_SVD_EXACT or LRR_SVD_MONTE_CARLO");
    lrr::SolverConfig k;
    k.tau = cfg->tau;
    k.mu_bar = cfg->mu_bar;
    k.eta_mu = cfg->eta_mu;
    k.mu_1 = cfg->mu_1;
    k.xtol = cfg->xtol;
    k.eps_s = cfg->eps_s;
    k.cs = cfg->cs;
    k.max_inner_iters = cfg->max_inner_iters;
    k.max_total_iters = cfg->max_total_iters;
    k.rank_mode = cfg->rank_mode == LRR_RANK_FIXED ? lrr::RankMode::Fixed
                                                   : lrr::RankMode::Adaptive;
    k.rank = cfg->rank;
    k.svd_mode =
        cfg->svd_mode == LRR_SVD_EXACT ? lrr::SvdMode::Exact : lrr::SvdMode::MonteCarlo;
    k.grad_blowup = cfg->grad_blowup;
    k.nonexpansive_rule = cfg->nonexpansive_rule != 0;
    k.nonexpansive_limit = cfg->nonexpansive_limit;
    k.seed = cfg->seed;
    return k;
}

lrr_report* make_report(lrr::BenchReport&& rep) {
    auto* handle = new lrr_report{std::move(rep), {}, {}};
    handle->csv = handle->v.to_csv();
    handle->text = handle->v.to_text();
    return handle;
}

lrr_instance* make_instance(lrr::ProblemInstance&& inst) {
    lrr_map view{inst.map};
    return new lrr_instance{std::move(inst), std::move(view)};
}

}  // namespace

extern "C" {

const char* lrr_version(void) { return "1.0.0"; }

const char* lrr_status_name(lrr_status s) {
    switch (s) {
        case LRR_OK: return "LRR_OK";
        case LRR_ERR_ARGUMENT: return "LRR_ERR_ARGUMENT";
        case LRR_ERR_NUMERIC: return "LRR_ERR_NUMERIC";
        case LRR_ERR_IO: return "LRR_ERR_IO";
        case LRR_ERR_INTERNAL: return "LRR_ERR_INTERNAL";
    }
    return "LRR_ERR_INTERNAL";
}

const char* lrr_last_error(void) { return t_last_error.c_str(); }

/* -------- dense matrices -------- */

lrr_status lrr_matrix_create(int64_t rows, int64_t cols, const double* row_major,
                             lrr_matrix** out) {
    return guarded([&] {
        require(out != nullptr, "out must not be null");
        *out = new lrr_matrix{matrix_from_row_major(rows, cols, row_major, "matrix data")};
    });
}

lrr_status lrr_matrix_read_text(const char* path, lrr_matrix** out) {
    return guarded([&] {
        require(path != nullptr && out != nullptr, "path and out must not be null");
        *out = new lrr_matrix{lrr::read_matrix_text(path)};
    });
}

lrr_status lrr_matrix_write_text(const lrr_matrix* x, const char* path) {
    return guarded([&] {
        require(x != nullptr && path != nullptr, "matrix and path must not be null");
        write_text_output(path, lrr::format_matrix_text(x->v));
    });
}

int64_t lrr_matrix_rows(const lrr_matrix* x) { return x == nullptr ? 0 : x->v.rows(); }

int64_t lrr_matrix_cols(const lrr_matrix* x) { return x == nullptr ? 0 : x->v.cols(); }

lrr_status lrr_matrix_get(const lrr_matrix* x, int64_t i, int64_t j, double* out) {
    return guarded([&] {
        require(x != nullptr && out != nullptr, "matrix and out must not be null");
        require(i >= 0 && i < x->v.rows() && j >= 0 && j < x->v.cols(),
                "matrix index out of range");
        *out = x->v(i, j);
    });
}

lrr_status lrr_matrix_copy(const lrr_matrix* x, double* row_major_out, int64_t capacity) {
    return guarded([&] {
        require(x != nullptr && row_major_out != nullptr,
                "matrix and output buffer must not be null");
        require(capacity >= x->v.size(), "output buffer too small");
        for (int64_t i = 0; i < x->v.rows(); ++i)
            for (int64_t j = 0; j < x->v.cols(); ++j)
                row_major_out[i * x->v.cols() + j] = x->v(i, j);
    });
}

void lrr_matrix_destroy(lrr_matrix* x) { delete x; }

/* -------- spectral operators -------- */

lrr_status lrr_svd(const lrr_matrix* x, int64_t k, lrr_matrix** u, lrr_matrix** sigma,
                   lrr_matrix** v) {
    return guarded([&] {
        require(x != nullptr && u != nullptr && sigma != nullptr && v != nullptr,
                "null argument");
        lrr::SvdFactors f = lrr::svd(x->v, k);
        *u = new lrr_matrix{std::move(f.u)};
        *sigma = new lrr_matrix{lrr::Matrix(f.sigma)};
        *v = new lrr_matrix{std::move(f.v)};
    });
}

lrr_status lrr_hard_threshold(const lrr_matrix* y, int64_t r, lrr_matrix** out) {
    return guarded([&] {
        require(y != nullptr && out != nullptr, "matrix and out must not be null");
        *out = new lrr_matrix{lrr::hard_threshold(y->v, r)};
    });
}

lrr_status lrr_soft_shrink(const lrr_matrix* x, double nu, lrr_matrix** out) {
    return guarded([&] {
        require(x != nullptr && out != nullptr, "matrix and out must not be null");
        *out = new lrr_matrix{lrr::soft_shrink(x->v, nu)};
    });
}

lrr_status lrr_norms(const lrr_matrix* x, double* frobenius, double* spectral,
                     double* nuclear) {
    return guarded([&] {
        require(x != nullptr, "matrix must not be null");
        lrr::Norms n = lrr::norms(x->v);
        if (frobenius != nullptr) *frobenius = n.frobenius;
        if (spectral != nullptr) *spectral = n.spectral;
        if (nuclear != nullptr) *nuclear = n.nuclear;
    });
}

/* -------- measurement operators -------- */

lrr_status lrr_map_gaussian(int64_t m, int64_t n, int64_t p, uint64_t seed,
                            lrr_map** out) {
    return guarded([&] {
        require(out != nullptr, "out must not be null");
        *out = new lrr_map{lrr::LinearMap::gaussian(m, n, p, seed)};
    });
}

lrr_status lrr_map_identity(int64_t m, int64_t n, lrr_map** out) {
    return guarded([&] {
        require(out != nullptr, "out must not be null");
        *out = new lrr_map{lrr::LinearMap::identity(m, n)};
    });
}

lrr_status lrr_map_entry_mask(int64_t m, int64_t n, int64_t p, uint64_t seed,
                              lrr_map** out) {
    return guarded([&] {
        require(out != nullptr, "out must not be null");
        *out = new lrr_map{lrr::LinearMap::entry_mask(m, n, p, seed)};
    });
}

lrr_status lrr_map_dense(int64_t m, int64_t n, int64_t p, const double* a_row_major,
                         lrr_map** out) {
    return guarded([&] {
        require(out != nullptr && a_row_major != nullptr,
                "out and sensing matrix must not be null");
        require(m >= 1 && n >= 1 && p >= 1, "dimensions must be positive");
        lrr::Matrix a = matrix_from_row_major(p, m * n, a_row_major, "sensing matrix");
        *out = new lrr_map{lrr::LinearMap::dense(m, n, a)};
    });
}

lrr_status lrr_map_read_json(const char* path, lrr_map** out) {
    return guarded([&] {
        require(path != nullptr && out != nullptr, "path and out must not be null");
        std::ifstream in(path, std::ios::binary);
        if (!in) throw lrr::IoError(std::string("cannot open '") + path + "' for reading");
        std::string text((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
        *out = new lrr_map{lrr::LinearMap::from_json(text)};
    });
}

lrr_status lrr_map_write_json(const lrr_map* map, const char* path) {
    return guarded([&] {
        require(map != nullptr && path != nullptr, "map and path must not be null");
        write_text_output(path, map->v.to_json() + "\n");
    });
}

int64_t lrr_map_rows(const lrr_map* map) { return map == nullptr ? 0 : map->v.rows(); }

int64_t lrr_map_cols(const lrr_map* map) { return map == nullptr ? 0 : map->v.cols(); }

int64_t lrr_map_measurements(const lrr_map* map) {
    return map == nullptr ? 0 : map->v.measurements();
}

lrr_status lrr_map_apply(const lrr_map* map, const lrr_matrix* x, double* y_out) {
    return guarded([&] {
        require(map != nullptr && x != nullptr && y_out != nullptr, "null argument");
        lrr::Vector y = map->v.apply(x->v);
        for (lrr::Index i = 0; i < y.size(); ++i) y_out[i] = y[i];
    });
}

lrr_status lrr_map_adjoint(const lrr_map* map, const double* y, int64_t p,
                           lrr_matrix** out) {
    return guarded([&] {
        require(map != nullptr && out != nullptr, "map and out must not be null");
        require(p == map->v.measurements(), "measurement vector has the wrong length");
        *out = new lrr_matrix{map->v.adjoint(vector_from(y, p, "measurements"))};
    });
}

lrr_status lrr_map_spectral_bound(const lrr_map* map, double* lambda_max) {
    return guarded([&] {
        require(map != nullptr && lambda_max != nullptr, "map and out must not be null");
        *lambda_max = map->v.spectral_upper_bound();
    });
}

void lrr_map_destroy(lrr_map* map) { delete map; }

/* -------- restricted isometry diagnostics -------- */

lrr_status lrr_estimate_rip(const lrr_map* map, int64_t r, int64_t trials,
                            uint64_t seed, lrr_rip_report* out, lrr_matrix** witness) {
    return guarded([&] {
        require(map != nullptr && out != nullptr, "map and out must not be null");
        lrr::RipEstimate est = lrr::estimate_rip(map->v, r, trials, seed);
        out->delta_lower = est.delta_lower;
        out->delta_upper = est.delta_upper;
        out->r = est.r;
        out->trials = est.trials;
        out->seed = est.seed;
        if (witness != nullptr) *witness = new lrr_matrix{std::move(est.witness)};
    });
}

lrr_status lrr_check_propositions(const lrr_map* map, int64_t r, int64_t trials,
                                  uint64_t seed, lrr_prop_report* out) {
    return guarded([&] {
        require(map != nullptr && out != nullptr, "map and out must not be null");
        lrr::PropositionReport rep = lrr::check_propositions(map->v, r, trials, seed);
        out->delta_upper = rep.delta_upper;
        out->margin_projected_adjoint = rep.margin_projected_adjoint;
        out->margin_gram_upper = rep.margin_gram_upper;
        out->margin_gram_lower = rep.margin_gram_lower;
        out->margin_cross_term = rep.margin_cross_term;
        out->margin_mixed_norm = rep.margin_mixed_norm;
        out->trials = rep.trials;
        out->violations = rep.violations;
        out->seed = rep.seed;
    });
}

/* -------- randomized column-sampling SVD -------- */

lrr_status lrr_linear_time_svd(const lrr_matrix* a, int64_t cs, int64_t ks,
                               const double* probs, uint64_t seed, lrr_sketch** out) {
    return guarded([&] {
        require(a != nullptr && out != nullptr, "matrix and out must not be null");
        lrr::SamplerParams params;
        params.cs = cs;
        params.ks = ks;
        params.seed = seed;
        if (probs != nullptr) params.probs.assign(probs, probs + a->v.cols());
        *out = new lrr_sketch{lrr::linear_time_svd(a->v, params)};
    });
}

int64_t lrr_sketch_rank(const lrr_sketch* s) { return s == nullptr ? 0 : s->v.k_eff; }

lrr_status lrr_sketch_values(const lrr_sketch* s, double* out, int64_t capacity) {
    return guarded([&] {
        require(s != nullptr && out != nullptr, "sketch and out must not be null");
        require(capacity >= s->v.k_eff, "output buffer too small");
        for (lrr::Index i = 0; i < s->v.k_eff; ++i) out[i] = s->v.sigma[i];
    });
}

lrr_status lrr_sketch_vectors(const lrr_sketch* s, lrr_matrix** h) {
    return guarded([&] {
        require(s != nullptr && h != nullptr, "sketch and out must not be null");
        *h = new lrr_matrix{s->v.h};
    });
}

lrr_status lrr_sketch_columns(const lrr_sketch* s, int64_t* out, int64_t capacity) {
    return guarded([&] {
        require(s != nullptr && out != nullptr, "sketch and out must not be null");
        require(capacity >= static_cast<int64_t>(s->v.columns.size()),
                "output buffer too small");
        for (std::size_t i = 0; i < s->v.columns.size(); ++i) out[i] = s->v.columns[i];
    });
}

lrr_status lrr_sketch_reconstruct(const lrr_sketch* s, const lrr_matrix* a,
                                  lrr_matrix** out) {
    return guarded([&] {
        require(s != nullptr && a != nullptr && out != nullptr, "null argument");
        *out = new lrr_matrix{lrr::reconstruct(s->v, a->v)};
    });
}

void lrr_sketch_destroy(lrr_sketch* s) { delete s; }

/* -------- solvers -------- */

void lrr_solver_config_init(lrr_solver_config* cfg) {
    if (cfg == nullptr) return;
    lrr::SolverConfig d;
    cfg->tau = d.tau;
    cfg->mu = 1e-8;
    cfg->mu_bar = d.mu_bar;
    cfg->eta_mu = d.eta_mu;
    cfg->mu_1 = d.mu_1;
    cfg->xtol = d.xtol;
    cfg->eps_s = d.eps_s;
    cfg->grad_blowup = d.grad_blowup;
    cfg->cs = d.cs;
    cfg->max_inner_iters = d.max_inner_iters;
    cfg->max_total_iters = d.max_total_iters;
    cfg->rank = d.rank;
    cfg->nonexpansive_limit = d.nonexpansive_limit;
    cfg->rank_mode =
        d.rank_mode == lrr::RankMode::Fixed ? LRR_RANK_FIXED : LRR_RANK_ADAPTIVE;
    cfg->svd_mode =
        d.svd_mode == lrr::SvdMode::Exact ? LRR_SVD_EXACT : LRR_SVD_MONTE_CARLO;
    cfg->nonexpansive_rule = d.nonexpansive_rule ? 1 : 0;
    cfg->seed = d.seed;
}

lrr_status lrr_solve(lrr_solver_kind kind, const lrr_map* map, const double* b,
                     int64_t p, const lrr_solver_config* cfg, const lrr_matrix* truth,
                     lrr_trace** out) {
    return guarded([&] {
        require(map != nullptr && out != nullptr, "map and out must not be null");
        require(p == map->v.measurements(), "measurement vector has the wrong length");
        lrr::Vector rhs = vector_from(b, p, "measurements");
        lrr::SolverConfig core = to_core(cfg);
        double mu = cfg != nullptr ? cfg->mu : 1e-8;
        const lrr::Matrix* m = truth != nullptr ? &truth->v : nullptr;
        lrr::SolveTrace trace;
        switch (kind) {
            case LRR_SOLVER_FPC: trace = lrr::fpc_solve(map->v, rhs, mu, core, m); break;
            case LRR_SOLVER_IHT: trace = lrr::iht_solve(map->v, rhs, core, m); break;
            case LRR_SOLVER_IHTMS:
                trace = lrr::ihtms_solve(map->v, rhs, mu, core, m);
                break;
            case LRR_SOLVER_FPCAR: trace = lrr::fpcar_solve(map->v, rhs, core, m); break;
            case LRR_SOLVER_FPCA: trace = lrr::fpca_solve(map->v, rhs, core, m); break;
            default: throw std::invalid_argument("unknown solver kind");
        }
        *out = new lrr_trace{std::move(trace)};
    });
}

lrr_status lrr_solve_id(const char* solver_id, const lrr_map* map, const double* b,
                        int64_t p, int64_t rank, const lrr_solver_config* cfg,
                        const lrr_matrix* truth, lrr_trace** out) {
    return guarded([&] {
        require(solver_id != nullptr && map != nullptr && out != nullptr,
                "null argument");
        require(p == map->v.measurements(), "measurement vector has the wrong length");
        lrr::Vector rhs = vector_from(b, p, "measurements");
        double mu = cfg != nullptr ? cfg->mu : 1e-8;
        const lrr::Matrix* m = truth != nullptr ? &truth->v : nullptr;
        *out = new lrr_trace{
            lrr::solve_by_id(solver_id, map->v, rhs, rank, mu, to_core(cfg), m)};
    });
}

int lrr_trace_converged(const lrr_trace* t) {
    return (t != nullptr && t->v.converged) ? 1 : 0;
}

int64_t lrr_trace_iterations(const lrr_trace* t) {
    return t == nullptr ? 0 : t->v.iterations;
}

double lrr_trace_seconds(const lrr_trace* t) {
    return t == nullptr ? 0.0 : t->v.wall_seconds;
}

double lrr_trace_final_residual(const lrr_trace* t) {
    return t == nullptr ? 0.0 : t->v.final_residual;
}

double lrr_trace_final_rel_err(const lrr_trace* t) {
    return t == nullptr ? std::nan("") : t->v.final_rel_err;
}

lrr_status lrr_trace_solution(const lrr_trace* t, lrr_matrix** x) {
    return guarded([&] {
        require(t != nullptr && x != nullptr, "trace and out must not be null");
        *x = new lrr_matrix{t->v.x};
    });
}

int64_t lrr_trace_length(const lrr_trace* t) {
    return t == nullptr ? 0 : static_cast<int64_t>(t->v.records.size());
}

lrr_status lrr_trace_record(const lrr_trace* t, int64_t i, int64_t* iter, double* mu,
                            int64_t* rank, double* residual, double* step,
                            double* rel_err) {
    return guarded([&] {
        require(t != nullptr, "trace must not be null");
        require(i >= 0 && i < static_cast<int64_t>(t->v.records.size()),
                "trace record index out of range");
        const lrr::TraceRecord& rec = t->v.records[static_cast<std::size_t>(i)];
        if (iter != nullptr) *iter = rec.iter;
        if (mu != nullptr) *mu = rec.mu;
        if (rank != nullptr) *rank = rec.rank;
        if (residual != nullptr) *residual = rec.residual;
        if (step != nullptr) *step = rec.step;
        if (rel_err != nullptr) *rel_err = rec.rel_err;
    });
}

lrr_status lrr_trace_csv(const lrr_trace* t, const char* path) {
    return guarded([&] {
        require(t != nullptr && path != nullptr, "trace and path must not be null");
        write_text_output(path, t->v.to_csv());
    });
}

lrr_status lrr_trace_plot_csv(const lrr_trace* t, const char* path) {
    return guarded([&] {
        require(t != nullptr && path != nullptr, "trace and path must not be null");
        require(t->v.truth_norm > 0.0,
                "plot output needs a ground-truth matrix at solve time");
        std::string text = "iter,log10_abs_err\n";
        char line[64];
        for (const lrr::TraceRecord& rec : t->v.records) {
            if (!std::isfinite(rec.rel_err)) continue;
            double abs_err = std::max(rec.rel_err * t->v.truth_norm, 1e-300);
            std::snprintf(line, sizeof line, "%lld,%.17g\n",
                          static_cast<long long>(rec.iter), std::log10(abs_err));
            text += line;
        }
        write_text_output(path, text);
    });
}

int64_t lrr_trace_warning_count(const lrr_trace* t) {
    return t == nullptr ? 0 : static_cast<int64_t>(t->v.warnings.size());
}

const char* lrr_trace_warning(const lrr_trace* t, int64_t i) {
    if (t == nullptr || i < 0 || i >= static_cast<int64_t>(t->v.warnings.size()))
        return "";
    return t->v.warnings[static_cast<std::size_t>(i)].c_str();
}

void lrr_trace_destroy(lrr_trace* t) { delete t; }

/* -------- instances and benchmarks -------- */

lrr_status lrr_generate_instance(int64_t m, int64_t n, int64_t p, int64_t r,
                                 uint64_t seed, double noise_norm, lrr_instance** out) {
    return guarded([&] {
        require(out != nullptr, "out must not be null");
        *out = make_instance(lrr::generate_instance(m, n, p, r, seed, noise_norm));
    });
}

lrr_status lrr_near_lowrank_instance(int64_t m, int64_t n, int64_t p, int64_t r,
                                     double decay, uint64_t seed, lrr_instance** out) {
    return guarded([&] {
        require(out != nullptr, "out must not be null");
        *out = make_instance(lrr::near_lowrank_instance(m, n, p, r, decay, seed));
    });
}

const lrr_map* lrr_instance_map(const lrr_instance* inst) {
    return inst == nullptr ? nullptr : &inst->map_handle;
}

int64_t lrr_instance_rank(const lrr_instance* inst) {
    return inst == nullptr ? 0 : inst->v.r;
}

lrr_status lrr_instance_b(const lrr_instance* inst, double* out, int64_t capacity) {
    return guarded([&] {
        require(inst != nullptr && out != nullptr, "instance and out must not be null");
        require(capacity >= inst->v.b.size(), "output buffer too small");
        for (lrr::Index i = 0; i < inst->v.b.size(); ++i) out[i] = inst->v.b[i];
    });
}

lrr_status lrr_instance_truth(const lrr_instance* inst, lrr_matrix** out) {
    return guarded([&] {
        require(inst != nullptr && out != nullptr, "instance and out must not be null");
        *out = new lrr_matrix{inst->v.truth};
    });
}

lrr_status lrr_solve_instance(const char* solver_id, const lrr_instance* inst,
                              int64_t rank, const lrr_solver_config* cfg,
                              lrr_trace** out) {
    return guarded([&] {
        require(solver_id != nullptr && inst != nullptr && out != nullptr,
                "null argument");
        *out = new lrr_trace{lrr::solve_with(solver_id, inst->v, rank, to_core(cfg))};
    });
}

void lrr_instance_destroy(lrr_instance* inst) { delete inst; }

lrr_status lrr_metrics(int64_t m, int64_t n, int64_t p, int64_t r, double* sr,
                       double* fr, int64_t* r_max) {
    return guarded([&] {
        lrr::CellMetrics c = lrr::metrics(m, n, p, r);
        if (sr != nullptr) *sr = c.sr;
        if (fr != nullptr) *fr = c.fr;
        if (r_max != nullptr) *r_max = c.r_max;
    });
}

lrr_status lrr_rel_err(const lrr_matrix* x, const lrr_matrix* m, double* out) {
    return guarded([&] {
        require(x != nullptr && m != nullptr && out != nullptr, "null argument");
        *out = lrr::rel_err(x->v, m->v);
    });
}

lrr_status lrr_run_campaign(const int64_t* cells, int64_t ncells,
                            int64_t instances_per_cell, const char* solvers,
                            const lrr_solver_config* cfg, uint64_t master_seed,
                            double noise_norm, int threads, lrr_report** out) {
    return guarded([&] {
        require(cells != nullptr && ncells > 0, "at least one cell is required");
        require(solvers != nullptr && out != nullptr, "solvers and out must not be null");
        lrr::CampaignOptions opts;
        opts.cells.reserve(static_cast<std::size_t>(ncells));
        for (int64_t i = 0; i < ncells; ++i)
            opts.cells.push_back(
                {cells[4 * i], cells[4 * i + 1], cells[4 * i + 2], cells[4 * i + 3]});
        opts.instances_per_cell = instances_per_cell;
        opts.solvers = lrr::resolve_solver_ids(solvers);
        opts.config = to_core(cfg);
        opts.master_seed = master_seed;
        opts.noise_norm = noise_norm;
        opts.threads = threads;
        *out = make_report(lrr::run_campaign(opts));
    });
}

lrr_status lrr_wrong_rank_study(int64_t m, int64_t n, int64_t p, int64_t true_rank,
                                const int64_t* given_ranks, int64_t nranks,
                                const char* solvers, int64_t instances,
                                const lrr_solver_config* cfg, uint64_t master_seed,
                                int threads, lrr_report** out) {
    return guarded([&] {
        require(solvers != nullptr && out != nullptr, "solvers and out must not be null");
        require(given_ranks != nullptr || nranks == 0, "given_ranks must not be null");
        lrr::RankStudyOptions opts;
        opts.m = m;
        opts.n = n;
        opts.p = p;
        opts.true_rank = true_rank;
        opts.given_ranks.assign(given_ranks, given_ranks + nranks);
        opts.solvers = lrr::resolve_solver_ids(solvers);
        opts.instances = instances;
        opts.config = to_core(cfg);
        opts.master_seed = master_seed;
        opts.threads = threads;
        *out = make_report(lrr::wrong_rank_study(opts));
    });
}

const char* lrr_report_csv(const lrr_report* rep) {
    return rep == nullptr ? "" : rep->csv.c_str();
}

const char* lrr_report_text(const lrr_report* rep) {
    return rep == nullptr ? "" : rep->text.c_str();
}

lrr_status lrr_report_write_csv(const lrr_report* rep, const char* path) {
    return guarded([&] {
        require(rep != nullptr && path != nullptr, "report and path must not be null");
        write_text_output(path, rep->csv);
    });
}

lrr_status lrr_report_write_text(const lrr_report* rep, const char* path) {
    return guarded([&] {
        require(rep != nullptr && path != nullptr, "report and path must not be null");
        write_text_output(path, rep->text);
    });
}

void lrr_report_destroy(lrr_report* rep) { delete rep; }

}  // extern "C"
