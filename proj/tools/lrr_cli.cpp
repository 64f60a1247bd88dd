// lrr: command-line front end for the low-rank recovery library.
//
// Subcommands: solve (run one solver on one problem), bench (random recovery
// campaign), wrong-rank (fixed-rank sensitivity study), rip (restricted
// isometry diagnostics), svd (randomized column-sampling SVD report).
//
// Exit codes: 0 success; 2 usage or argument error; 3 the solver finished
// without meeting its stopping tolerance (requested artifacts are still
// written); 1 anything else.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "lrr/lrr.h"

using nlohmann::json;

namespace {

[[noreturn]] void fail(lrr_status status) {
    std::cerr << "error: " << lrr_last_error() << " [" << lrr_status_name(status)
              << "]\n";
    std::exit(status == LRR_ERR_ARGUMENT ? 2 : 1);
}

void check(lrr_status status) {
    if (status != LRR_OK) fail(status);
}

[[noreturn]] void usage_error(const std::string& msg) {
    std::cerr << "error: " << msg << "\n";
    std::exit(2);
}

/// "-" routes to stdout, everything else is a file path.
void write_output(const std::string& path, const std::string& content) {
    if (path == "-") {
        std::cout << content;
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) usage_error("cannot open '" + path + "' for writing");
    out << content;
    if (!out) {
        std::cerr << "error: failed while writing '" << path << "'\n";
        std::exit(1);
    }
}

// RAII wrappers so early exits cannot leak handles.
struct MatrixPtr {
    lrr_matrix* p = nullptr;
    ~MatrixPtr() { lrr_matrix_destroy(p); }
};
struct MapPtr {
    lrr_map* p = nullptr;
    ~MapPtr() { lrr_map_destroy(p); }
};
struct TracePtr {
    lrr_trace* p = nullptr;
    ~TracePtr() { lrr_trace_destroy(p); }
};
struct InstancePtr {
    lrr_instance* p = nullptr;
    ~InstancePtr() { lrr_instance_destroy(p); }
};
struct ReportPtr {
    lrr_report* p = nullptr;
    ~ReportPtr() { lrr_report_destroy(p); }
};
struct SketchPtr {
    lrr_sketch* p = nullptr;
    ~SketchPtr() { lrr_sketch_destroy(p); }
};

std::string canonical_solver_id(std::string id) {
    for (char& c : id) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    const std::string suffix = "-adaptive";
    if (id.size() > suffix.size() &&
        id.compare(id.size() - suffix.size(), suffix.size(), suffix) == 0) {
        id.erase(id.size() - suffix.size());
    }
    static const std::vector<std::string> known = {"fpc",   "ihtr",  "iht", "ihtmsr",
                                                   "ihtms", "fpcar", "fpca"};
    for (const std::string& k : known) {
        if (id == k) return id;
    }
    usage_error("unknown solver '" + id +
                "' (expected fpc, ihtr, iht, ihtmsr, ihtms, fpcar or fpca)");
}

bool needs_fixed_rank(const std::string& canonical_id) {
    return canonical_id == "ihtr" || canonical_id == "ihtmsr" || canonical_id == "fpcar";
}

// ---- solver configuration: defaults < JSON config file < explicit flags ----

struct SolverFlags {
    std::string config_path;
    double tau = 0.0, mu = 0.0, mu_bar = 0.0, eta_mu = 0.0, mu_1 = 0.0, xtol = 0.0,
           eps_s = 0.0, grad_blowup = 0.0;
    std::int64_t cs = 0, max_inner = 0, max_total = 0, nonexp_limit = 0;
    std::string svd_mode;
    bool nonexp_rule = false;
    CLI::Option *o_tau = nullptr, *o_mu = nullptr, *o_mu_bar = nullptr,
                *o_eta_mu = nullptr, *o_mu_1 = nullptr, *o_xtol = nullptr,
                *o_eps_s = nullptr, *o_blowup = nullptr, *o_cs = nullptr,
                *o_inner = nullptr, *o_total = nullptr, *o_nonexp_limit = nullptr,
                *o_svd = nullptr, *o_nonexp_rule = nullptr;
};

void add_solver_flags(CLI::App* cmd, SolverFlags& f) {
    cmd->add_option("--config", f.config_path,
                    "JSON file with solver settings (flags override it)");
    f.o_tau = cmd->add_option("--tau", f.tau, "step size (0 derives a default)");
    f.o_mu = cmd->add_option("--mu", f.mu, "fixed shrinkage level for fpc/ihtms");
    f.o_mu_bar = cmd->add_option("--mu-bar", f.mu_bar, "continuation floor");
    f.o_eta_mu = cmd->add_option("--eta-mu", f.eta_mu, "continuation decrease factor");
    f.o_mu_1 = cmd->add_option("--mu1", f.mu_1, "first continuation level (0 derives)");
    f.o_xtol = cmd->add_option("--xtol", f.xtol, "relative step stopping tolerance");
    f.o_eps_s = cmd->add_option("--eps-s", f.eps_s, "adaptive rank survival threshold");
    f.o_blowup = cmd->add_option("--grad-blowup", f.grad_blowup,
                                 "gradient growth factor that bumps the rank");
    f.o_cs = cmd->add_option("--cs", f.cs,
                             "sketch columns (0 derives max(2*r_max+2, 3*rank))");
    f.o_inner = cmd->add_option("--max-inner", f.max_inner,
                                "iteration cap per continuation stage");
    f.o_total = cmd->add_option("--max-iters", f.max_total, "total iteration cap");
    f.o_svd = cmd->add_option("--svd", f.svd_mode, "projection engine: exact | sketch")
                  ->check(CLI::IsMember({"exact", "sketch"}));
    f.o_nonexp_rule = cmd->add_flag("--rank-bump-on-nonexpansive", f.nonexp_rule,
                                    "bump the rank on repeated non-expansive "
                                    "violations instead of gradient growth");
    f.o_nonexp_limit = cmd->add_option("--nonexpansive-limit", f.nonexp_limit,
                                       "violations tolerated per rank bump");
}

void apply_config_file(lrr_solver_config& cfg, const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) usage_error("cannot open config file '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        usage_error("config file '" + path + "': " + e.what());
    }
    if (!doc.is_object()) usage_error("config file '" + path + "' must hold an object");
    for (const auto& [key, value] : doc.items()) {
        try {
            if (key == "tau") cfg.tau = value.get<double>();
            else if (key == "mu") cfg.mu = value.get<double>();
            else if (key == "mu_bar") cfg.mu_bar = value.get<double>();
            else if (key == "eta_mu") cfg.eta_mu = value.get<double>();
            else if (key == "mu_1") cfg.mu_1 = value.get<double>();
            else if (key == "xtol") cfg.xtol = value.get<double>();
            else if (key == "eps_s") cfg.eps_s = value.get<double>();
            else if (key == "grad_blowup") cfg.grad_blowup = value.get<double>();
            else if (key == "cs") cfg.cs = value.get<std::int64_t>();
            else if (key == "max_inner_iters") cfg.max_inner_iters = value.get<std::int64_t>();
            else if (key == "max_total_iters") cfg.max_total_iters = value.get<std::int64_t>();
            else if (key == "nonexpansive_limit") cfg.nonexpansive_limit = value.get<std::int64_t>();
            else if (key == "nonexpansive_rule") cfg.nonexpansive_rule = value.get<bool>() ? 1 : 0;
            else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
            else if (key == "svd_mode") {
                const std::string mode = value.get<std::string>();
                if (mode == "exact") cfg.svd_mode = LRR_SVD_EXACT;
                else if (mode == "sketch") cfg.svd_mode = LRR_SVD_MONTE_CARLO;
                else usage_error("config key 'svd_mode' must be \"exact\" or \"sketch\"");
            } else {
                usage_error("config file '" + path + "': unknown key '" + key + "'");
            }
        } catch (const json::exception& e) {
            usage_error("config key '" + key + "': " + e.what());
        }
    }
}

lrr_solver_config resolve_config(const SolverFlags& f, std::uint64_t seed) {
    lrr_solver_config cfg;
    lrr_solver_config_init(&cfg);
    if (!f.config_path.empty()) apply_config_file(cfg, f.config_path);
    if (f.o_tau->count() > 0) cfg.tau = f.tau;
    if (f.o_mu->count() > 0) cfg.mu = f.mu;
    if (f.o_mu_bar->count() > 0) cfg.mu_bar = f.mu_bar;
    if (f.o_eta_mu->count() > 0) cfg.eta_mu = f.eta_mu;
    if (f.o_mu_1->count() > 0) cfg.mu_1 = f.mu_1;
    if (f.o_xtol->count() > 0) cfg.xtol = f.xtol;
    if (f.o_eps_s->count() > 0) cfg.eps_s = f.eps_s;
    if (f.o_blowup->count() > 0) cfg.grad_blowup = f.grad_blowup;
    if (f.o_cs->count() > 0) cfg.cs = f.cs;
    if (f.o_inner->count() > 0) cfg.max_inner_iters = f.max_inner;
    if (f.o_total->count() > 0) cfg.max_total_iters = f.max_total;
    if (f.o_nonexp_limit->count() > 0) cfg.nonexpansive_limit = f.nonexp_limit;
    if (f.o_nonexp_rule->count() > 0) cfg.nonexpansive_rule = f.nonexp_rule ? 1 : 0;
    if (f.o_svd->count() > 0)
        cfg.svd_mode = f.svd_mode == "exact" ? LRR_SVD_EXACT : LRR_SVD_MONTE_CARLO;
    cfg.seed = seed;
    return cfg;
}

std::vector<std::int64_t> parse_int_list(const std::string& text, const char* what) {
    std::vector<std::int64_t> out;
    std::string token;
    std::istringstream in(text);
    while (std::getline(in, token, ',')) {
        try {
            std::size_t pos = 0;
            out.push_back(std::stoll(token, &pos));
            if (pos != token.size()) throw std::invalid_argument(token);
        } catch (const std::exception&) {
            usage_error(std::string(what) + ": '" + token + "' is not an integer");
        }
    }
    if (out.empty()) usage_error(std::string(what) + ": empty list");
    return out;
}

// ---- solve ----

struct SolveArgs {
    SolverFlags flags;
    std::string solver = "fpca";
    std::int64_t m = 0, n = 0, p = 0, true_rank = 0, given_rank = -1;
    double noise = 0.0;
    std::uint64_t seed = 1;
    std::string map_path, b_path, truth_path;
    std::string out_path, trace_path, plot_path;
    std::string summary_path = "-";
    CLI::Option* o_given_rank = nullptr;
};

int run_solve(const SolveArgs& a) {
    const std::string id = canonical_solver_id(a.solver);
    if (needs_fixed_rank(id) && a.o_given_rank->count() == 0) {
        usage_error("solver '" + id + "' needs --rank (the rank it should impose)");
    }
    const lrr_solver_config cfg = resolve_config(a.flags, a.seed);

    TracePtr trace;
    if (!a.map_path.empty()) {
        if (a.b_path.empty()) usage_error("--map also needs --b");
        MapPtr map;
        check(lrr_map_read_json(a.map_path.c_str(), &map.p));
        MatrixPtr bmat;
        check(lrr_matrix_read_text(a.b_path.c_str(), &bmat.p));
        const std::int64_t p = lrr_matrix_rows(bmat.p) * lrr_matrix_cols(bmat.p);
        if (lrr_matrix_rows(bmat.p) != 1 && lrr_matrix_cols(bmat.p) != 1) {
            usage_error("--b must hold a single row or column of measurements");
        }
        std::vector<double> b(static_cast<std::size_t>(p));
        check(lrr_matrix_copy(bmat.p, b.data(), p));
        MatrixPtr truth;
        if (!a.truth_path.empty())
            check(lrr_matrix_read_text(a.truth_path.c_str(), &truth.p));
        check(lrr_solve_id(id.c_str(), map.p, b.data(), p, a.given_rank, &cfg, truth.p,
                           &trace.p));
    } else {
        if (a.m < 1 || a.n < 1 || a.p < 1 || a.true_rank < 1) {
            usage_error("either --map/--b or all of --m --n --p --true-rank are needed");
        }
        InstancePtr inst;
        check(lrr_generate_instance(a.m, a.n, a.p, a.true_rank, a.seed, a.noise,
                                    &inst.p));
        check(lrr_solve_instance(id.c_str(), inst.p, a.given_rank, &cfg, &trace.p));
    }

    if (!a.out_path.empty()) {
        MatrixPtr x;
        check(lrr_trace_solution(trace.p, &x.p));
        check(lrr_matrix_write_text(x.p, a.out_path.c_str()));
    }
    if (!a.trace_path.empty()) check(lrr_trace_csv(trace.p, a.trace_path.c_str()));
    if (!a.plot_path.empty()) check(lrr_trace_plot_csv(trace.p, a.plot_path.c_str()));

    const double rel = lrr_trace_final_rel_err(trace.p);
    json summary = {
        {"solver", id},
        {"converged", lrr_trace_converged(trace.p) != 0},
        {"iterations", lrr_trace_iterations(trace.p)},
        {"final_residual", lrr_trace_final_residual(trace.p)},
        {"wall_seconds", lrr_trace_seconds(trace.p)},
    };
    summary["rel_err"] = std::isfinite(rel) ? json(rel) : json(nullptr);
    summary["config"] = {
        {"tau", cfg.tau},
        {"mu", cfg.mu},
        {"mu_bar", cfg.mu_bar},
        {"eta_mu", cfg.eta_mu},
        {"mu_1", cfg.mu_1},
        {"xtol", cfg.xtol},
        {"eps_s", cfg.eps_s},
        {"grad_blowup", cfg.grad_blowup},
        {"cs", cfg.cs},
        {"max_inner_iters", cfg.max_inner_iters},
        {"max_total_iters", cfg.max_total_iters},
        {"nonexpansive_limit", cfg.nonexpansive_limit},
        {"nonexpansive_rule", cfg.nonexpansive_rule != 0},
        {"svd_mode", cfg.svd_mode == LRR_SVD_EXACT ? "exact" : "sketch"},
        {"seed", cfg.seed},
    };
    json warnings = json::array();
    for (std::int64_t i = 0; i < lrr_trace_warning_count(trace.p); ++i)
        warnings.push_back(lrr_trace_warning(trace.p, i));
    summary["warnings"] = warnings;
    if (!a.summary_path.empty()) write_output(a.summary_path, summary.dump(2) + "\n");

    if (lrr_trace_converged(trace.p) == 0) {
        std::cerr << "warning: stopped before the step tolerance was met\n";
        return 3;
    }
    return 0;
}

// ---- bench / wrong-rank ----

struct BenchArgs {
    SolverFlags flags;
    std::string preset;
    std::vector<std::string> cells;
    std::string solvers = "all";
    std::int64_t instances = 10;
    double noise = 0.0;
    std::uint64_t seed = 1;
    int threads = 0;
    std::string csv_path, text_path;
};

int run_bench(const BenchArgs& a) {
    std::vector<std::int64_t> cells;
    if (a.preset == "desk") {
        for (std::int64_t r : {1, 2, 3}) {
            cells.insert(cells.end(), {40, 40, 320, r});
        }
    } else if (a.preset == "paper") {
        for (std::int64_t r : {1, 2, 3, 4, 5}) {
            cells.insert(cells.end(), {60, 60, 720, r});
        }
    } else if (!a.preset.empty()) {
        usage_error("unknown preset '" + a.preset + "' (expected desk or paper)");
    }
    for (const std::string& spec : a.cells) {
        const std::vector<std::int64_t> quad = parse_int_list(spec, "--cell");
        if (quad.size() != 4) usage_error("--cell needs four integers m,n,p,r");
        cells.insert(cells.end(), quad.begin(), quad.end());
    }
    if (cells.empty()) usage_error("no cells: pass --preset and/or --cell");

    const lrr_solver_config cfg = resolve_config(a.flags, a.seed);
    ReportPtr rep;
    check(lrr_run_campaign(cells.data(), static_cast<std::int64_t>(cells.size() / 4),
                           a.instances, a.solvers.c_str(), &cfg, a.seed, a.noise,
                           a.threads, &rep.p));
    if (!a.csv_path.empty()) check(lrr_report_write_csv(rep.p, a.csv_path.c_str()));
    if (!a.text_path.empty()) check(lrr_report_write_text(rep.p, a.text_path.c_str()));
    if (a.csv_path.empty() && a.text_path.empty()) std::cout << lrr_report_text(rep.p);
    return 0;
}

struct RankStudyArgs {
    SolverFlags flags;
    std::int64_t m = 40, n = 40, p = 320, true_rank = 3;
    std::string ranks = "1,2,3";
    std::string solvers = "ihtr,iht";
    std::int64_t instances = 10;
    std::uint64_t seed = 1;
    int threads = 0;
    std::string csv_path, text_path;
};

int run_wrong_rank(const RankStudyArgs& a) {
    const std::vector<std::int64_t> ranks = parse_int_list(a.ranks, "--ranks");
    const lrr_solver_config cfg = resolve_config(a.flags, a.seed);
    ReportPtr rep;
    check(lrr_wrong_rank_study(a.m, a.n, a.p, a.true_rank, ranks.data(),
                               static_cast<std::int64_t>(ranks.size()),
                               a.solvers.c_str(), a.instances, &cfg, a.seed, a.threads,
                               &rep.p));
    if (!a.csv_path.empty()) check(lrr_report_write_csv(rep.p, a.csv_path.c_str()));
    if (!a.text_path.empty()) check(lrr_report_write_text(rep.p, a.text_path.c_str()));
    if (a.csv_path.empty() && a.text_path.empty()) std::cout << lrr_report_text(rep.p);
    return 0;
}

// ---- rip ----

struct RipArgs {
    std::string map_path, kind = "gaussian";
    std::int64_t m = 40, n = 40, p = 320;
    std::uint64_t map_seed = 7, seed = 1;
    std::int64_t r = 2, trials = 50;
    bool props = false;
    std::string out_path = "-";
};

int run_rip(const RipArgs& a) {
    MapPtr map;
    if (!a.map_path.empty()) {
        check(lrr_map_read_json(a.map_path.c_str(), &map.p));
    } else if (a.kind == "gaussian") {
        check(lrr_map_gaussian(a.m, a.n, a.p, a.map_seed, &map.p));
    } else if (a.kind == "mask") {
        check(lrr_map_entry_mask(a.m, a.n, a.p, a.map_seed, &map.p));
    } else if (a.kind == "identity") {
        check(lrr_map_identity(a.m, a.n, &map.p));
    } else {
        usage_error("unknown map kind '" + a.kind +
                    "' (expected gaussian, mask or identity)");
    }

    lrr_rip_report est{};
    check(lrr_estimate_rip(map.p, a.r, a.trials, a.seed, &est, nullptr));
    double lambda_max = 0.0;
    check(lrr_map_spectral_bound(map.p, &lambda_max));

    json doc = {
        {"map",
         {{"m", lrr_map_rows(map.p)},
          {"n", lrr_map_cols(map.p)},
          {"p", lrr_map_measurements(map.p)}}},
        {"r", est.r},
        {"trials_per_rank", est.trials},
        {"seed", est.seed},
        {"lambda_max", lambda_max},
        {"delta_lower", est.delta_lower},
        {"delta_upper", est.delta_upper},
    };
    if (a.props) {
        lrr_prop_report rep{};
        check(lrr_check_propositions(map.p, a.r, a.trials, a.seed, &rep));
        doc["propositions"] = {
            {"delta_upper", rep.delta_upper},
            {"margin_projected_adjoint", rep.margin_projected_adjoint},
            {"margin_gram_upper", rep.margin_gram_upper},
            {"margin_gram_lower", rep.margin_gram_lower},
            {"margin_cross_term", rep.margin_cross_term},
            {"margin_mixed_norm", rep.margin_mixed_norm},
            {"trials", rep.trials},
            {"violations", rep.violations},
        };
    }
    write_output(a.out_path, doc.dump(2) + "\n");
    return 0;
}

// ---- svd ----

struct SvdArgs {
    std::string in_path;
    std::int64_t m = 0, n = 0, rank = 0;
    double decay = 0.0;
    std::int64_t cs = 0, ks = 0;
    std::uint64_t seed = 1;
    std::string out_path = "-";
};

int run_svd(const SvdArgs& a) {
    MatrixPtr input;
    if (!a.in_path.empty()) {
        check(lrr_matrix_read_text(a.in_path.c_str(), &input.p));
    } else {
        if (a.m < 1 || a.n < 1 || a.rank < 1) {
            usage_error("either --in or all of --m --n --rank are needed");
        }
        InstancePtr inst;
        check(lrr_near_lowrank_instance(a.m, a.n, 1, a.rank, a.decay, a.seed, &inst.p));
        check(lrr_instance_truth(inst.p, &input.p));
    }
    if (a.cs < 1 || a.ks < 1) usage_error("--cs and --ks must be at least 1");

    SketchPtr sketch;
    check(lrr_linear_time_svd(input.p, a.cs, a.ks, nullptr, a.seed, &sketch.p));
    const std::int64_t k_eff = lrr_sketch_rank(sketch.p);

    std::vector<double> sigma(static_cast<std::size_t>(k_eff));
    if (k_eff > 0) check(lrr_sketch_values(sketch.p, sigma.data(), k_eff));
    std::vector<std::int64_t> columns(static_cast<std::size_t>(a.cs));
    check(lrr_sketch_columns(sketch.p, columns.data(), a.cs));

    json doc = {
        {"m", lrr_matrix_rows(input.p)}, {"n", lrr_matrix_cols(input.p)},
        {"cs", a.cs},                    {"ks", a.ks},
        {"k_eff", k_eff},                {"seed", a.seed},
        {"sigma", sigma},                {"columns", columns},
    };
    if (k_eff > 0) {
        MatrixPtr recon;
        check(lrr_sketch_reconstruct(sketch.p, input.p, &recon.p));
        double rel = 0.0;
        check(lrr_rel_err(recon.p, input.p, &rel));
        doc["reconstruction_rel_err"] = rel;
    } else {
        doc["reconstruction_rel_err"] = nullptr;
    }
    write_output(a.out_path, doc.dump(2) + "\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"lrr: affinely constrained low-rank matrix recovery toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", []() { return std::string(lrr_version()); });

    SolveArgs solve_args;
    CLI::App* solve = app.add_subcommand(
        "solve", "Run one solver on a generated instance or on map/measurement files");
    solve->add_option("--solver", solve_args.solver,
                      "fpc | ihtr | iht | ihtmsr | ihtms | fpcar | fpca");
    solve->add_option("--m", solve_args.m, "target rows (generated instances)");
    solve->add_option("--n", solve_args.n, "target columns");
    solve->add_option("--p", solve_args.p, "number of measurements");
    solve->add_option("--true-rank", solve_args.true_rank, "rank of the hidden target");
    solve_args.o_given_rank = solve->add_option(
        "--rank", solve_args.given_rank, "rank imposed by ihtr/ihtmsr/fpcar");
    solve->add_option("--noise", solve_args.noise, "Euclidean norm of added noise");
    solve->add_option("--seed", solve_args.seed, "master seed");
    solve->add_option("--map", solve_args.map_path, "measurement map JSON file");
    solve->add_option("--b", solve_args.b_path, "measurement vector (matrix text)");
    solve->add_option("--truth", solve_args.truth_path,
                      "ground-truth matrix for error reporting");
    solve->add_option("--out", solve_args.out_path, "write the recovered matrix here");
    solve->add_option("--trace", solve_args.trace_path, "write per-iteration CSV here");
    solve->add_option("--plot", solve_args.plot_path,
                      "write iter,log10_abs_err CSV here (needs ground truth)");
    solve->add_option("--summary", solve_args.summary_path,
                      "summary JSON destination ('-' stdout, '' none)");
    add_solver_flags(solve, solve_args.flags);

    BenchArgs bench_args;
    CLI::App* bench =
        app.add_subcommand("bench", "Random recovery campaign over problem cells");
    bench->add_option("--preset", bench_args.preset,
                      "desk (40x40, p=320, r=1..3) or paper (60x60, p=720, r=1..5)");
    bench->add_option("--cell", bench_args.cells,
                      "explicit cell m,n,p,r (repeatable)");
    bench->add_option("--solvers", bench_args.solvers,
                      "comma list of solver ids, or 'all'");
    bench->add_option("--instances", bench_args.instances, "instances per cell");
    bench->add_option("--noise", bench_args.noise, "noise norm per instance");
    bench->add_option("--seed", bench_args.seed, "master seed");
    bench->add_option("--threads", bench_args.threads,
                      "worker threads (0: LRR_THREADS or hardware)");
    bench->add_option("--csv", bench_args.csv_path, "write the CSV report here");
    bench->add_option("--text", bench_args.text_path, "write the text report here");
    add_solver_flags(bench, bench_args.flags);

    RankStudyArgs rank_args;
    CLI::App* wrong = app.add_subcommand(
        "wrong-rank", "Recovery when fixed-rank solvers are given the wrong rank");
    wrong->add_option("--m", rank_args.m, "target rows");
    wrong->add_option("--n", rank_args.n, "target columns");
    wrong->add_option("--p", rank_args.p, "number of measurements");
    wrong->add_option("--true-rank", rank_args.true_rank, "rank of the hidden target");
    wrong->add_option("--ranks", rank_args.ranks, "comma list of imposed ranks");
    wrong->add_option("--solvers", rank_args.solvers, "comma list of solver ids");
    wrong->add_option("--instances", rank_args.instances, "instances in the pool");
    wrong->add_option("--seed", rank_args.seed, "master seed");
    wrong->add_option("--threads", rank_args.threads,
                      "worker threads (0: LRR_THREADS or hardware)");
    wrong->add_option("--csv", rank_args.csv_path, "write the CSV report here");
    wrong->add_option("--text", rank_args.text_path, "write the text report here");
    add_solver_flags(wrong, rank_args.flags);

    RipArgs rip_args;
    CLI::App* rip = app.add_subcommand(
        "rip", "Restricted isometry diagnostics for a measurement map");
    rip->add_option("--map", rip_args.map_path, "measurement map JSON file");
    rip->add_option("--kind", rip_args.kind, "gaussian | mask | identity");
    rip->add_option("--m", rip_args.m, "target rows");
    rip->add_option("--n", rip_args.n, "target columns");
    rip->add_option("--p", rip_args.p, "number of measurements");
    rip->add_option("--map-seed", rip_args.map_seed, "seed of the generated map");
    rip->add_option("--r", rip_args.r, "rank level to probe");
    rip->add_option("--trials", rip_args.trials, "samples per rank level");
    rip->add_option("--seed", rip_args.seed, "sampling seed");
    rip->add_flag("--props", rip_args.props, "also check the inequality families");
    rip->add_option("--out", rip_args.out_path, "JSON destination ('-' stdout)");

    SvdArgs svd_args;
    CLI::App* svd = app.add_subcommand(
        "svd", "Randomized column-sampling SVD of a matrix, with error report");
    svd->add_option("--in", svd_args.in_path, "input matrix (text format)");
    svd->add_option("--m", svd_args.m, "rows of the generated test matrix");
    svd->add_option("--n", svd_args.n, "columns of the generated test matrix");
    svd->add_option("--rank", svd_args.rank, "leading rank of the generated matrix");
    svd->add_option("--decay", svd_args.decay,
                    "tail decay of the generated spectrum, in [0,1)");
    svd->add_option("--cs", svd_args.cs, "columns to sample")->required();
    svd->add_option("--ks", svd_args.ks, "directions to keep")->required();
    svd->add_option("--seed", svd_args.seed, "sampling seed");
    svd->add_option("--out", svd_args.out_path, "JSON destination ('-' stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (solve->parsed()) return run_solve(solve_args);
        if (bench->parsed()) return run_bench(bench_args);
        if (wrong->parsed()) return run_wrong_rank(rank_args);
        if (rip->parsed()) return run_rip(rip_args);
        if (svd->parsed()) return run_svd(svd_args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
