#include "dipde/harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>
#include <thread>

#include "dipde/io.hpp"
#include "dipde/rng.hpp"
#include "dipde/svg.hpp"

namespace dipde {

namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kTestSalt = 1000;
constexpr std::uint64_t kNoiseSalt = 0x6e6f697365ULL;

std::map<std::string, double> experiment_constants(const ExperimentConfig& cfg) {
    std::map<std::string, double> c = builtin_system(cfg.system).constants;
    for (const auto& [k, v] : cfg.solver.parameters) c[k] = v;
    return c;
}

}  // namespace

RunData generate_run_data(const ExperimentConfig& cfg, int run) {
    RunData d;
    const Eigen::ArrayXd x = periodic_grid(cfg.solver.nx, cfg.solver.length);
    auto make = [&](std::uint64_t k) {
        const std::uint64_t s = derive_seed(cfg.seed, static_cast<std::uint64_t>(run), k);
        TrajectoryGrid tr = solve_pde(cfg.system, sample_initial_condition(x, cfg.solver.length, s, cfg.ic), cfg.solver);
        tr.meta.ic_seed = s;
        return tr;
    };
    for (int k = 0; k < cfg.train_ics; ++k) {
        TrajectoryGrid tr = make(static_cast<std::uint64_t>(k));
        add_noise(tr, cfg.noise_sigma, derive_seed(cfg.seed ^ kNoiseSalt, static_cast<std::uint64_t>(run), k));
        d.train.push_back(std::move(tr));
    }
    for (int k = 0; k < cfg.test_ics; ++k) d.test.push_back(make(kTestSalt + static_cast<std::uint64_t>(k)));
    return d;
}

MethodSetup method_setup(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto& info = builtin_system(cfg.system);
    MethodSetup s;
    s.constants = experiment_constants(cfg);
    s.truth_equation = info.equation;

    InvariantSet set = info.invariants;
    if (cfg.invariants) {
        std::vector<VectorField> g;
        for (const auto& [xi, phi] : cfg.invariants->generators) g.push_back(VectorField::parse(xi, phi));
        std::vector<Expr> etas;
        for (const auto& e : cfg.invariants->etas) etas.push_back(parse(e));
        set = make_invariant_set(cfg.system, std::move(g), std::move(etas), s.constants);
        auto rep = verify_set(set, 200, cfg.seed);
        if (!rep.pass()) {
            std::string msg = "configured invariant set failed verification:";
            for (const auto& f : rep.failures) msg += "\n  " + f;
            throw ConfigError(msg);
        }
    }
    s.generators = set.generators;

    LibrarySpec lib;
    if (cfg.library) {
        lib = *cfg.library;
    } else if (cfg.method == Method::DiSindy) {
        lib.mode = LibrarySpec::Mode::Linear;
        lib.inputs = set.features();
        lib.include_constant = cfg.include_constant;
    } else {
        lib.mode = LibrarySpec::Mode::Poly2;
        lib.inputs = {sym::u(), sym::u("x"), sym::u("xx"), sym::u("xxx"), sym::u("xxxx")};
        lib.include_constant = cfg.include_constant;
    }
    if (cfg.method == Method::DiSindy)
        s.target = set.target();
    else
        s.target = cfg.system == "nkdv" ? simplify(exp(-sym::t() / sym::c("t0")) * sym::u("t")) : sym::u("t");
    s.features = build_library(lib);
    s.truth = truth_model(s.truth_equation, s.target, s.features, s.constants, cfg.threshold);
    return s;
}

bool success(const SparseModel& m, const SparseModel& truth) {
    if (m.features.size() != truth.features.size()) throw RegressError("models use different feature lists");
    for (std::size_t j = 0; j < m.features.size(); ++j)
        if (!(m.features[j] == truth.features[j])) throw RegressError("models use different feature lists");
    return m.mask == truth.mask;
}

RmseResult rmse(std::span<const SparseModel> runs, const SparseModel& truth) {
    if (runs.empty()) throw RegressError("rmse needs at least one run");
    double all = 0.0, good = 0.0;
    int ngood = 0;
    for (const auto& m : runs) {
        const double e2 = (m.W() - truth.W()).squaredNorm();
        all += e2;
        if (success(m, truth)) {
            good += e2;
            ++ngood;
        }
    }
    RmseResult r;
    r.all = std::sqrt(all / static_cast<double>(runs.size()));
    if (ngood > 0) r.successful = std::sqrt(good / ngood);
    return r;
}

SolverConfig integration_config(const ExperimentConfig& cfg) {
    SolverConfig s = cfg.solver;
    s.transient = 0.0;
    s.substeps = cfg.integrate_substeps;
    return s;
}

LongTermSeries long_term_mse(const SparseModel& m, const std::map<std::string, double>& constants,
                             std::span<const TrajectoryGrid> tests, const SolverConfig& integrator, int steps) {
    if (tests.empty()) throw std::invalid_argument("long_term_mse needs test trajectories");
    LongTermSeries out;
    Eigen::Index len = steps + 1;
    std::vector<Eigen::ArrayXd> per_ic;
    for (const auto& test : tests) {
        if (test.nt() < steps + 1) throw std::invalid_argument("test trajectory shorter than the requested steps");
        SolverConfig c = integrator;
        c.nt = std::max(steps + 1, 8);
        IntegrationResult res;
        try {
            res = integrate_model(m, constants, test.u.row(0).transpose(), c, test.t[0]);
        } catch (const BlowUpError&) {
            res.blowup_step = 0;
        }
        const Eigen::Index got = std::min<Eigen::Index>(res.traj.nt(), steps + 1);
        if (res.blowup_step && *res.blowup_step <= steps) out.blew_up = true;
        Eigen::ArrayXd e(got);
        for (Eigen::Index k = 0; k < got; ++k) e[k] = (res.traj.u.row(k) - test.u.row(k)).square().mean();
        len = std::min(len, got);
        per_ic.push_back(std::move(e));
    }
    out.mse = Eigen::ArrayXd::Zero(len);
    for (const auto& e : per_ic) out.mse += e.head(len);
    out.mse /= static_cast<double>(per_ic.size());
    return out;
}

RunResult run_one(const ExperimentConfig& cfg, const MethodSetup& setup, const RunData& data, int run) {
    RunResult r;
    r.run = run;
    try {
        std::vector<JetGrid> jets;
        std::vector<FeatureMatrix> parts;
        for (std::size_t k = 0; k < data.train.size(); ++k) {
            jets.push_back(finite_differences(data.train[k], 4));
            parts.push_back(evaluate_features(jets.back(), setup.features, setup.target, setup.constants, cfg.features,
                                              static_cast<int>(k)));
        }
        const FeatureMatrix fm = concatenate(parts);
        parts.clear();
        r.rows = fm.rows();
        r.dropped = fm.dropped;
        StlsqOptions opts{cfg.threshold, cfg.max_iters};
        if (cfg.method == Method::EquivR) {
            std::vector<ProlongedVectorField> pv;
            for (const auto& g : setup.generators) pv.push_back(prolong(g, 4));
            const SymmetryPenalty pen = symmetry_penalty(jets, fm, pv, setup.constants);
            r.model = stlsq_regularized(fm, pen, cfg.lambda, opts);
        } else {
            r.model = stlsq(fm, opts);
        }
    } catch (const std::exception& e) {
        r.failure = e.what();
        r.model = setup.truth;
        r.model.coef.setZero();
        std::fill(r.model.mask.begin(), r.model.mask.end(), false);
        r.model.history.clear();
    }
    r.success = !r.failure && success(r.model, setup.truth);
    r.error_norm = (r.model.W() - setup.truth.W()).norm();
    if (cfg.long_term_steps > 0 && !r.failure) {
        const SolverConfig ic = integration_config(cfg);
        try {
            r.long_term = long_term_mse(r.model, setup.constants, data.test, ic, cfg.long_term_steps);
        } catch (const std::exception& e) {
            r.failure = std::string("long-term: ") + e.what();
        }
        r.long_term_truth = long_term_mse(setup.truth, setup.constants, data.test, ic, cfg.long_term_steps);
    }
    return r;
}

int worker_count() {
    if (const char* v = std::getenv("DIPDE_WORKERS")) {
        const int n = std::atoi(v);
        if (n >= 1) return n;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

DiscoveryReport run_experiment(const ExperimentConfig& cfg, const std::vector<RunData>* data, int workers) {
    const MethodSetup setup = method_setup(cfg);
    if (data && static_cast<int>(data->size()) < cfg.runs) throw ConfigError("fewer datasets than runs");
    DiscoveryReport rep;
    rep.config = cfg;
    rep.truth = setup.truth;
    rep.runs.resize(static_cast<std::size_t>(cfg.runs));
    rep.config_hash = [&] {
        std::ostringstream os;
        os << std::hex << std::setw(16) << std::setfill('0') << std::hash<std::string>{}(config_to_json(cfg, -1));
        return os.str();
    }();

    std::atomic<int> next{0};
    auto work = [&] {
        for (int r; (r = next++) < cfg.runs;) {
            if (data) {
                rep.runs[r] = run_one(cfg, setup, (*data)[r], r);
            } else {
                RunResult res;
                try {
                    const RunData d = generate_run_data(cfg, r);
                    res = run_one(cfg, setup, d, r);
                } catch (const std::exception& e) {
                    res.run = r;
                    res.failure = std::string("data: ") + e.what();
                    res.model = setup.truth;
                    res.model.coef.setZero();
                    std::fill(res.model.mask.begin(), res.model.mask.end(), false);
                    res.error_norm = setup.truth.W().norm();
                }
                rep.runs[r] = std::move(res);
            }
        }
    };
    const int n = std::min(workers > 0 ? workers : worker_count(), cfg.runs);
    if (n <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (int i = 0; i < n; ++i) pool.emplace_back(work);
    }

    const SummaryRow s = summarize(rep);
    rep.success_rate = s.success_rate;
    rep.rmse = {s.rmse_successful, s.rmse_all};
    return rep;
}

namespace {

SummaryRow aggregate(const std::vector<std::pair<bool, double>>& rows) {
    SummaryRow s;
    s.runs = static_cast<int>(rows.size());
    double all = 0.0, good = 0.0;
    int ngood = 0;
    for (const auto& [ok, e] : rows) {
        all += e * e;
        if (ok) {
            good += e * e;
            ++ngood;
        }
    }
    s.success_rate = s.runs ? static_cast<double>(ngood) / s.runs : 0.0;
    s.rmse_all = s.runs ? std::sqrt(all / s.runs) : 0.0;
    if (ngood > 0) s.rmse_successful = std::sqrt(good / ngood);
    return s;
}

std::string csv_quote(const std::string& s) {
    std::string o = "\"";
    for (char c : s) {
        if (c == '"') o += '"';
        o += c == '\n' ? ' ' : c;
    }
    return o + "\"";
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool q = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (q) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                q = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            q = true;
        } else if (c == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(std::move(cur));
    return out;
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream os(p);
    if (!os) throw IoError("cannot write " + p.string());
    os << text;
}

}  // namespace

SummaryRow summarize(const DiscoveryReport& r) {
    std::vector<std::pair<bool, double>> rows;
    for (const auto& run : r.runs) rows.emplace_back(run.success, run.error_norm);
    SummaryRow s = aggregate(rows);
    s.system = r.config.system;
    s.method = to_string(r.config.method);
    s.lambda = r.config.lambda;
    return s;
}

SummaryRow summarize_runs_csv(const std::string& path, const std::string& system, const std::string& method,
                              double lambda) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path);
    std::string line;
    std::getline(in, line);
    const auto header = split_csv(line);
    auto col = [&](const std::string& name) {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw IoError(path + ": missing column " + name);
        return static_cast<std::size_t>(it - header.begin());
    };
    const std::size_t cs = col("success"), ce = col("error_norm");
    std::vector<std::pair<bool, double>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv(line);
        rows.emplace_back(f.at(cs) == "1", parse_double(f.at(ce)));
    }
    SummaryRow s = aggregate(rows);
    s.system = system;
    s.method = method;
    s.lambda = lambda;
    return s;
}

std::string summary_csv_header() { return "system,method,lambda,runs,success_rate,rmse_successful,rmse_all"; }

std::string summary_csv_row(const SummaryRow& s) {
    std::ostringstream os;
    os << s.system << ',' << s.method << ',' << format_double(s.lambda) << ',' << s.runs << ','
       << format_double(s.success_rate) << ',' << (s.rmse_successful ? format_double(*s.rmse_successful) : "N/A")
       << ',' << format_double(s.rmse_all);
    return os.str();
}

std::string render_table(std::span<const SummaryRow> rows) {
    std::ostringstream os;
    auto sci = [](double v) {
        std::ostringstream o;
        o << std::scientific << std::setprecision(2) << v;
        return o.str();
    };
    os << std::left << std::setw(10) << "system" << std::setw(22) << "method" << std::setw(14) << "success rate"
       << std::setw(18) << "RMSE (successful)" << "RMSE (all)\n";
    for (const auto& r : rows) {
        std::string m = r.method;
        if (r.method == "equiv-r") m += " (lambda=" + format_double(r.lambda) + ")";
        std::ostringstream pct;
        pct << std::fixed << std::setprecision(0) << 100.0 * r.success_rate << "%";
        os << std::left << std::setw(10) << r.system << std::setw(22) << m << std::setw(14) << pct.str()
           << std::setw(18) << (r.rmse_successful ? sci(*r.rmse_successful) : "N/A") << sci(r.rmse_all) << '\n';
    }
    return os.str();
}

void write_report(const DiscoveryReport& r, const std::string& dir) {
    const fs::path root(dir);
    fs::create_directories(root / "models");
    write_file(root / "config.json", config_to_json(r.config) + "\n");
    write_file(root / "truth.json", model_to_json(r.truth) + "\n");

    std::ostringstream runs;
    runs << "run,success,error_norm,active,iterations,rows,dropped,failure";
    for (std::size_t j = 0; j < r.truth.features.size(); ++j) runs << ',' << csv_quote("w:" + to_string(r.truth.features[j]));
    runs << '\n';
    for (const auto& run : r.runs) {
        runs << run.run << ',' << (run.success ? 1 : 0) << ',' << format_double(run.error_norm) << ','
             << run.model.active() << ',' << run.model.iterations << ',' << run.rows << ',' << run.dropped << ','
             << csv_quote(run.failure.value_or(""));
        const Eigen::VectorXd w = run.model.W();
        for (Eigen::Index j = 0; j < w.size(); ++j) runs << ',' << format_double(w[j]);
        runs << '\n';
        write_file(root / "models" / ("run_" + std::to_string(run.run) + ".json"), model_to_json(run.model) + "\n");
    }
    write_file(root / "runs.csv", runs.str());

    const SummaryRow s = summarize(r);
    std::ostringstream sum;
    sum << summary_csv_header() << ",config_hash,seed,noise_sigma,include_constant\n"
        << summary_csv_row(s) << ',' << r.config_hash << ',' << r.config.seed << ','
        << format_double(r.config.noise_sigma) << ',' << (r.config.include_constant ? 1 : 0) << '\n';
    write_file(root / "summary.csv", sum.str());

    // long-term prediction: mean and std over runs of the per-run IC-averaged series
    std::vector<const RunResult*> lt;
    for (const auto& run : r.runs)
        if (run.long_term) lt.push_back(&run);
    if (lt.empty()) return;
    Eigen::Index len = std::numeric_limits<Eigen::Index>::max();
    for (const auto* run : lt) len = std::min({len, run->long_term->mse.size(), run->long_term_truth->mse.size()});
    auto stats = [&](auto get) {
        Eigen::ArrayXd mean = Eigen::ArrayXd::Zero(len), sq = Eigen::ArrayXd::Zero(len);
        for (const auto* run : lt) {
            const Eigen::ArrayXd v = get(*run).head(len);
            mean += v;
            sq += v.square();
        }
        mean /= static_cast<double>(lt.size());
        Eigen::ArrayXd sd = (sq / static_cast<double>(lt.size()) - mean.square()).max(0.0).sqrt();
        return std::pair{mean, sd};
    };
    const auto [mm, ms] = stats([](const RunResult& x) -> const Eigen::ArrayXd& { return x.long_term->mse; });
    const auto [tm, ts] = stats([](const RunResult& x) -> const Eigen::ArrayXd& { return x.long_term_truth->mse; });
    std::ostringstream lc;
    lc << "step,t,mse_mean,mse_std,truth_mse_mean,truth_mse_std\n";
    for (Eigen::Index k = 0; k < len; ++k)
        lc << k << ',' << format_double(k * r.config.solver.dt) << ',' << format_double(mm[k]) << ','
           << format_double(ms[k]) << ',' << format_double(tm[k]) << ',' << format_double(ts[k]) << '\n';
    write_file(root / "long_term.csv", lc.str());
    std::vector<SvgSeries> series{{to_string(r.config.method), mm, ms, "#1f77b4"},
                                  {"true equation", tm, ts, "#d62728"}};
    write_file(root / "long_term.svg",
               log_plot_svg(series, r.config.system + ": long-term prediction", "step", "MSE"));
}

}  // namespace dipde
