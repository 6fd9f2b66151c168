#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "cnmc/branch.hpp"
#include "cnmc/io.hpp"
#include "cnmc/linearized.hpp"
#include "cnmc/nmc.hpp"
#include "cnmc/verify.hpp"

using namespace cnmc;
namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kVerifyFailed = 1, kInput = 2, kNumerics = 3, kFirstStep = 4 };

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path.string());
    out << text;
}

// "start:step:stop", inclusive of stop up to rounding
std::vector<double> parse_grid(const std::string& spec) {
    double a, h, b;
    char c1, c2;
    std::istringstream is(spec);
    if (!(is >> a >> c1 >> h >> c2 >> b) || c1 != ':' || c2 != ':' || !(h > 0.0) || b < a)
        throw InputError("grid must look like start:step:stop with step > 0, got '" + spec + "'");
    std::vector<double> g;
    const int n = static_cast<int>(std::floor((b - a) / h + 1e-9));
    for (int i = 0; i <= n; ++i) g.push_back(a + i * h);
    return g;
}

struct Common {
    int N = 3;
    double alpha = 0.5;
    int threads = 1;
    std::string format = "csv";
};

int cmd_kernels(const Common& c, const std::vector<double>& taus, const std::string& tau_grid,
                const std::string& h_grid) {
    const ModelParams P{c.N, c.alpha};
    P.validate();
    std::vector<double> tg = taus, hg;
    if (!tau_grid.empty())
        for (double t : parse_grid(tau_grid)) tg.push_back(t);
    if (!h_grid.empty()) hg = parse_grid(h_grid);
    const KernelConstants k = kernel_constants(P);
    struct Row {
        std::string q;
        double x;
        double v;
        bool has_x;
    };
    std::vector<Row> rows = {{"b_alpha", 0, k.b_alpha, false}};
    if (P.N >= 3) rows.push_back({"g0", 0, k.g0, false});
    rows.push_back({"h_limit_const", 0, k.h_limit_const, false});
    for (double t : tg) rows.push_back({"G", t, G_alpha(t, P), true});
    for (double b : hg) rows.push_back({"h", b, h_of_b(b, P), true});
    if (c.format == "json") {
        std::cout << "[";
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const Row& r = rows[i];
            std::cout << (i ? ",\n " : "") << "{\"quantity\": " << json_string(r.q);
            if (r.has_x) std::cout << ", \"x\": " << fmt17(r.x);
            std::cout << ", \"value\": " << fmt17(r.v) << "}";
        }
        std::cout << "]\n";
    } else {
        std::cout << "quantity,x,value\n";
        for (const Row& r : rows) std::cout << r.q << "," << (r.has_x ? fmt17(r.x) : "") << "," << fmt17(r.v) << "\n";
    }
    return kOk;
}

int cmd_bifurcation(const Common& c, int kmax) {
    const ModelParams P{c.N, c.alpha};
    P.validate();
    const double ms = find_mu_star(P);
    const double hp = transversality(ms, P);
    const SpectralData d = spectral_data(ms, kmax, P, {}, c.threads);
    if (c.format == "json") {
        std::cout << "{\"N\": " << P.N << ", \"alpha\": " << fmt17(P.alpha) << ", \"b_alpha\": " << fmt17(d.b_alpha)
                  << ", \"mu_star\": " << fmt17(ms) << ", \"h_prime_at_star\": " << fmt17(hp)
                  << ", \"lambda\": " << json_array(d.eigenvalues) << "}\n";
    } else {
        std::cout << "quantity,k,value\n";
        std::cout << "mu_star,," << fmt17(ms) << "\n";
        std::cout << "h_prime_at_star,," << fmt17(hp) << "\n";
        std::cout << "b_alpha,," << fmt17(d.b_alpha) << "\n";
        for (int k = 0; k <= kmax; ++k) std::cout << "lambda," << k << "," << fmt17(d.eigenvalues[k]) << "\n";
    }
    return kOk;
}

struct TraceFlags {
    std::string config;
    std::string output_dir;
    int K = -1, M = -1, max_iters = -1;
    double a_step = -1, a_max = -1, tol = -1;
};

template <class T>
void take(const nlohmann::json& j, const char* key, T& dst) {
    if (j.contains(key)) dst = j.at(key).get<T>();
}

int cmd_trace(Common c, const TraceFlags& f, bool n_set, bool alpha_set, bool format_set) {
    BranchConfig cfg;
    QuadSpec quad;
    std::string out_dir = "branch_out";
    if (!f.config.empty()) {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(read_file(f.config));
            if (j.contains("params")) {
                if (!n_set) take(j["params"], "N", c.N);
                if (!alpha_set) take(j["params"], "alpha", c.alpha);
            }
            if (j.contains("quad")) {
                const auto& q = j["quad"];
                take(q, "abs_tol", quad.abs_tol);
                take(q, "rel_tol", quad.rel_tol);
                take(q, "max_subdivisions", quad.max_subdivisions);
                take(q, "tail_rel_tol", quad.tail_rel_tol);
                take(q, "de_levels", quad.de_levels);
            }
            if (j.contains("branch")) {
                const auto& b = j["branch"];
                take(b, "K", cfg.K);
                take(b, "M", cfg.M);
                take(b, "a_step", cfg.a_step);
                take(b, "a_max", cfg.a_max);
                take(b, "newton_tol", cfg.newton_tol);
                take(b, "newton_max_iters", cfg.newton_max_iters);
                take(b, "fd_step", cfg.fd_step);
            }
            take(j, "output_dir", out_dir);
            if (!format_set) take(j, "format", c.format);
        } catch (const nlohmann::json::exception& e) {
            throw InputError(std::string("config: ") + e.what());
        }
    }
    if (f.K > 0) cfg.K = f.K;
    if (f.M > 0) cfg.M = f.M;
    if (f.max_iters > 0) cfg.newton_max_iters = f.max_iters;
    if (f.a_step > 0) cfg.a_step = f.a_step;
    if (f.a_max > 0) cfg.a_max = f.a_max;
    if (f.tol > 0) cfg.newton_tol = f.tol;
    if (!f.output_dir.empty()) out_dir = f.output_dir;
    if (c.format != "csv" && c.format != "json") throw InputError("format must be csv or json");
    cfg.threads = c.threads;
    const ModelParams P{c.N, c.alpha};
    P.validate();
    quad.validate();
    cfg.validate();

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec || !fs::is_directory(out_dir)) throw InputError("output_dir not writable: " + out_dir);

    const BranchTrace tr = trace_branch(cfg, P, quad);
    if (c.format == "csv") {
        write_file(fs::path(out_dir) / "branch.csv", branch_csv(tr.points));
    } else {
        std::string s = "[";
        for (std::size_t i = 0; i < tr.points.size(); ++i) {
            const BranchPoint& p = tr.points[i];
            s += std::string(i ? ",\n " : "") + "{\"a\": " + fmt17(p.a) + ", \"mu\": " + fmt17(p.mu) +
                 ", \"lambda\": " + fmt17(p.lambda) + ", \"residual_sup\": " + fmt17(p.residual_sup) +
                 ", \"newton_iters\": " + std::to_string(p.newton_iters) + "}";
        }
        write_file(fs::path(out_dir) / "branch.json", s + "]\n");
    }
    for (std::size_t i = 0; i < tr.points.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "point_%03zu.json", i);
        write_file(fs::path(out_dir) / name, branch_point_to_json(tr.points[i], P) + "\n");
    }

    double res = 0.0, lo = INFINITY, hi = -INFINITY;
    int neg = 0, pos = 0;
    for (const BranchPoint& p : tr.points) {
        res = std::max(res, p.residual_sup);
        lo = std::min(lo, p.lambda);
        hi = std::max(hi, p.lambda);
        neg += p.a < 0;
        pos += p.a > 0;
    }
    std::cout << "mu_star " << fmt17(tr.mu_star) << "\n";
    std::cout << "points " << tr.points.size() << " (a<0: " << neg << ", a>0: " << pos << ")\n";
    std::cout << "max_residual " << fmt17(res) << "\n";
    std::cout << "lambda_range " << fmt17(lo) << " " << fmt17(hi) << "\n";
    for (const std::string& d : tr.diagnostics) std::cerr << "warning: " << d << "\n";
    if (tr.first_step_failed) {
        std::cerr << "error: continuation failed at the first step\n";
        return kFirstStep;
    }
    return kOk;
}

int cmd_nmc(Common c, const std::string& profile, const std::string& points, std::vector<std::string> exprs,
            bool n_set, bool alpha_set) {
    const ProfileFile pf = profile_from_json(read_file(profile));
    ModelParams P = pf.params;
    if (n_set) P.N = c.N;
    if (alpha_set) P.alpha = c.alpha;
    P.validate();
    std::vector<double> s;
    {
        std::istringstream is(points);
        std::string tok;
        while (std::getline(is, tok, ',')) {
            try {
                std::size_t used = 0;
                s.push_back(std::stod(tok, &used));
                if (used != tok.size()) throw std::invalid_argument(tok);
            } catch (const std::exception&) {
                throw InputError("bad point '" + tok + "'");
            }
        }
    }
    if (s.empty()) throw InputError("--points is empty");
    if (exprs.empty()) exprs = {"lemma22"};
    std::vector<std::vector<double>> cols;
    for (const std::string& e : exprs) {
        if (e == "lemma22") {
            cols.push_back(nmc_eval_batch(pf.profile, s, P, {}, c.threads));
        } else if (e == "lemma21" || e == "iform") {
            std::vector<double> v;
            for (double x : s)
                v.push_back(e == "lemma21" ? nmc_eval_lemma21(pf.profile, x, P) : nmc_eval_iform(pf.profile, x, P));
            cols.push_back(v);
        } else {
            throw InputError("unknown expression '" + e + "'");
        }
    }
    if (c.format == "json") {
        std::cout << "[";
        for (std::size_t i = 0; i < s.size(); ++i) {
            std::cout << (i ? ",\n " : "") << "{\"s\": " << fmt17(s[i]);
            for (std::size_t j = 0; j < exprs.size(); ++j) std::cout << ", " << json_string(exprs[j]) << ": " << fmt17(cols[j][i]);
            std::cout << "}";
        }
        std::cout << "]\n";
    } else {
        std::cout << "s";
        for (const std::string& e : exprs) std::cout << "," << e;
        std::cout << "\n";
        for (std::size_t i = 0; i < s.size(); ++i) {
            std::cout << fmt17(s[i]);
            for (const auto& col : cols) std::cout << "," << fmt17(col[i]);
            std::cout << "\n";
        }
    }
    return kOk;
}

int cmd_verify(const Common& c, const std::string& suite, const std::string& json_path) {
    const VerifyReport r = run_verify(suite, c.threads);
    std::cout << r.text();
    std::cout << r.json();
    if (!json_path.empty()) write_file(json_path, r.json());
    return r.all_pass() ? kOk : kVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Periodic cylinders of constant nonlocal mean curvature"};
    app.require_subcommand(1);
    app.fallthrough();
    Common c;
    app.add_option("--threads", c.threads, "worker threads")->check(CLI::PositiveNumber);
    app.add_option("--format", c.format, "output format")->check(CLI::IsMember({"csv", "json"}));
    auto* n_opt = app.add_option("--N", c.N, "ambient dimension of the cross-section plus one");
    auto* a_opt = app.add_option("--alpha", c.alpha, "fractional order in (0, 1)");

    auto* kern = app.add_subcommand("kernels", "kernel constants and samples of G and h");
    std::vector<double> taus;
    std::string tau_grid, h_grid;
    kern->add_option("--tau", taus, "tau values for G");
    kern->add_option("--tau-grid", tau_grid, "start:step:stop");
    kern->add_option("--h-grid", h_grid, "start:step:stop");

    auto* bif = app.add_subcommand("bifurcation", "bifurcation radius and spectrum");
    int kmax = 8;
    bif->add_option("--kmax", kmax, "highest eigenvalue index")->check(CLI::NonNegativeNumber);

    auto* tr = app.add_subcommand("trace", "trace the bifurcating branch");
    TraceFlags tf;
    tr->add_option("config", tf.config, "RunConfig JSON");
    tr->add_option("--output-dir", tf.output_dir);
    tr->add_option("--K", tf.K);
    tr->add_option("--M", tf.M);
    tr->add_option("--a-step", tf.a_step);
    tr->add_option("--a-max", tf.a_max);
    tr->add_option("--newton-tol", tf.tol);
    tr->add_option("--newton-max-iters", tf.max_iters);

    auto* nmc = app.add_subcommand("nmc", "evaluate the nonlocal mean curvature of a profile");
    std::string profile, points;
    std::vector<std::string> exprs;
    nmc->add_option("profile", profile, "profile JSON")->required();
    nmc->add_option("--points", points, "comma-separated s values")->required();
    nmc->add_option("--expr", exprs, "lemma22, lemma21, iform")->delimiter(',');

    auto* ver = app.add_subcommand("verify", "run the invariant suite");
    std::string suite, json_path;
    ver->add_option("--suite", suite, "quad, kernels, nmc, linearized or branch");
    ver->add_option("--json", json_path, "also write the JSON summary here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kInput;
    }
    std::cout.precision(17);
    try {
        if (*kern) return cmd_kernels(c, taus, tau_grid, h_grid);
        if (*bif) return cmd_bifurcation(c, kmax);
        if (*tr) return cmd_trace(c, tf, n_opt->count() > 0, a_opt->count() > 0, app.get_option("--format")->count() > 0);
        if (*nmc) return cmd_nmc(c, profile, points, exprs, n_opt->count() > 0, a_opt->count() > 0);
        if (*ver) return cmd_verify(c, suite, json_path);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInput;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInput;
    } catch (const PositivityViolation& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInput;
    } catch (const NewtonDivergence& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFirstStep;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kNumerics;
    }
    return kInput;
}
