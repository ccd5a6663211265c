// dipde command line: data generation, discovery, verification, evaluation, reporting.
#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "dipde/harness.hpp"
#include "dipde/io.hpp"
#include "dipde/svg.hpp"

namespace fs = std::filesystem;
using namespace dipde;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    if (!in) throw IoError("cannot read " + p.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path run_dir(const std::string& root, int r) { return fs::path(root) / ("run_" + std::to_string(r)); }

int cmd_generate(const std::string& config, const std::string& out) {
    const ExperimentConfig cfg = load_config(config);
    cfg.validate();
    for (int r = 0; r < cfg.runs; ++r) {
        const RunData d = generate_run_data(cfg, r);
        write_dataset((run_dir(out, r) / "train").string(), d.train);
        if (!d.test.empty()) write_dataset((run_dir(out, r) / "test").string(), d.test);
        std::cout << "run " << r << ": " << d.train.size() << " train, " << d.test.size() << " test trajectories\n";
    }
    std::ofstream(fs::path(out) / "config.json") << config_to_json(cfg) << '\n';
    return 0;
}

std::vector<RunData> load_runs(const std::string& root, int runs) {
    std::vector<RunData> data;
    for (int r = 0; r < runs; ++r) {
        RunData d;
        d.train = read_dataset((run_dir(root, r) / "train").string());
        if (fs::exists(run_dir(root, r) / "test" / "manifest")) d.test = read_dataset((run_dir(root, r) / "test").string());
        data.push_back(std::move(d));
    }
    return data;
}

void print_summary(const DiscoveryReport& rep) {
    const SummaryRow s = summarize(rep);
    std::cout << render_table(std::span(&s, 1));
    int failures = 0;
    for (const auto& r : rep.runs) failures += r.failure ? 1 : 0;
    if (failures) std::cout << failures << " run(s) recorded a failure; see runs.csv\n";
}

int cmd_discover(const std::string& config, const std::string& data_dir, const std::string& out) {
    ExperimentConfig cfg = load_config(config);
    const auto data = load_runs(data_dir, cfg.runs);
    cfg.test_ics = static_cast<int>(data.front().test.size());
    if (cfg.test_ics == 0) cfg.long_term_steps = 0;
    const DiscoveryReport rep = run_experiment(cfg, &data);
    write_report(rep, out);
    print_summary(rep);
    return 0;
}

int cmd_run(const std::string& config, const std::string& out) {
    const ExperimentConfig cfg = load_config(config);
    const DiscoveryReport rep = run_experiment(cfg);
    write_report(rep, out.empty() ? cfg.output_dir : out);
    print_summary(rep);
    return 0;
}

int cmd_verify(const std::string& system, int samples, std::uint64_t seed) {
    const SystemInfo* info = nullptr;
    try {
        info = &builtin_system(system);
    } catch (const CatalogError& e) {
        std::cerr << e.what() << '\n';
        return 1;
    }
    const auto& s = info->invariants;
    const auto rep = verify_set(s, samples, seed);
    std::cout << "system " << system << "\n";
    for (std::size_t g = 0; g < s.generators.size(); ++g) std::cout << "  v" << g + 1 << " = " << to_string(s.generators[g], s.space) << '\n';
    for (std::size_t e = 0; e < s.etas.size(); ++e)
        std::cout << "  eta" << e + 1 << " = " << to_string(s.etas[e], s.space) << (s.lhs && *s.lhs == e ? "   (lhs)" : "")
                  << '\n';
    double worst = 0.0;
    for (const auto& p : rep.invariance) worst = std::max(worst, p.report.max_abs);
    std::cout << "invariance: " << (rep.invariance_ok() ? "symbolic zero" : "FAILED") << ", max |pr v[eta]| = " << worst
              << " over " << samples << " points\n";
    std::cout << "independence: full rank at " << rep.full_rank_samples << "/" << rep.samples
              << " points, min singular value " << rep.min_singular_value << '\n';
    bool ok = rep.pass();
    if (!info->equation.is_zero()) {
        for (std::size_t g = 0; g < s.generators.size(); ++g) {
            const auto c = check_symmetry_criterion(prolong(s.generators[g], s.space.order(), s.space), info->equation);
            std::cout << "criterion v" << g + 1 << ": pr v[F] = " << to_string(c.residual, s.space) << '\n';
            ok = ok && c.symbolic_zero;
        }
    }
    for (const auto& f : rep.failures) std::cout << "  " << f << '\n';
    std::cout << (ok ? "PASS" : "FAIL") << '\n';
    return ok ? 0 : 1;
}

int cmd_evaluate(const std::string& models, const std::string& data_dir, const std::string& out, int steps) {
    ExperimentConfig cfg = config_from_json(slurp(fs::path(models) / "config.json"));
    if (steps > 0) cfg.long_term_steps = steps;
    if (cfg.long_term_steps <= 0) cfg.long_term_steps = 50;
    DiscoveryReport rep;
    rep.config = cfg;
    rep.truth = model_from_json(slurp(fs::path(models) / "truth.json"));
    const auto setup = method_setup(cfg);
    for (int r = 0; r < cfg.runs; ++r) {
        RunResult res;
        res.run = r;
        res.model = model_from_json(slurp(fs::path(models) / "models" / ("run_" + std::to_string(r) + ".json")));
        res.success = success(res.model, rep.truth);
        res.error_norm = (res.model.W() - rep.truth.W()).norm();
        const auto test = read_dataset((run_dir(data_dir, r) / "test").string());
        const SolverConfig ic = integration_config(cfg);
        res.long_term = long_term_mse(res.model, setup.constants, test, ic, cfg.long_term_steps);
        res.long_term_truth = long_term_mse(rep.truth, setup.constants, test, ic, cfg.long_term_steps);
        std::cout << "run " << r << ": mse[" << res.long_term->mse.size() - 1
                  << "] = " << res.long_term->mse[res.long_term->mse.size() - 1]
                  << (res.long_term->blew_up ? " (blew up)" : "") << '\n';
        rep.runs.push_back(std::move(res));
    }
    const SummaryRow s = summarize(rep);
    rep.success_rate = s.success_rate;
    rep.rmse = {s.rmse_successful, s.rmse_all};
    write_report(rep, out);
    return 0;
}

int cmd_report(const std::vector<std::string>& dirs) {
    std::vector<SummaryRow> rows;
    for (const auto& d : dirs) {
        const ExperimentConfig cfg = config_from_json(slurp(fs::path(d) / "config.json"));
        rows.push_back(summarize_runs_csv((fs::path(d) / "runs.csv").string(), cfg.system, to_string(cfg.method),
                                          cfg.lambda));
        std::ofstream(fs::path(d) / "summary_recomputed.csv") << summary_csv_header() << '\n'
                                                              << summary_csv_row(rows.back()) << '\n';
        const fs::path lt = fs::path(d) / "long_term.csv";
        if (fs::exists(lt)) {
            std::ifstream in(lt);
            std::string line;
            std::getline(in, line);
            std::vector<double> m, sd, tm, ts;
            while (std::getline(in, line)) {
                std::vector<std::string> f;
                std::stringstream ss(line);
                for (std::string x; std::getline(ss, x, ',');) f.push_back(x);
                m.push_back(parse_double(f.at(2)));
                sd.push_back(parse_double(f.at(3)));
                tm.push_back(parse_double(f.at(4)));
                ts.push_back(parse_double(f.at(5)));
            }
            auto arr = [](const std::vector<double>& v) {
                return Eigen::ArrayXd(Eigen::Map<const Eigen::ArrayXd>(v.data(), static_cast<Eigen::Index>(v.size())));
            };
            std::ofstream(fs::path(d) / "long_term.svg")
                << log_plot_svg({{to_string(cfg.method), arr(m), arr(sd), "#1f77b4"},
                                 {"true equation", arr(tm), arr(ts), "#d62728"}},
                                cfg.system + ": long-term prediction", "step", "MSE");
        }
    }
    std::cout << render_table(rows);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Discover PDEs from gridded data with differential invariants"};
    app.require_subcommand(1);

    std::string config, out, data, models, system;
    std::vector<std::string> inputs;
    int samples = 1000, steps = 0;
    std::uint64_t seed = 1;

    auto* gen = app.add_subcommand("generate", "solve the configured system and write datasets");
    gen->add_option("--config", config, "experiment config (JSON)")->required();
    gen->add_option("--out", out, "output directory")->required();

    auto* disc = app.add_subcommand("discover", "fit models on generated datasets");
    disc->add_option("--config", config)->required();
    disc->add_option("--data", data, "directory written by generate")->required();
    disc->add_option("--out", out)->required();

    auto* run = app.add_subcommand("run", "generate and discover in one go, without writing datasets");
    run->add_option("--config", config)->required();
    run->add_option("--out", out, "defaults to output_dir from the config");

    auto* ver = app.add_subcommand("verify", "verify a catalog invariant set and the infinitesimal criterion");
    ver->add_option("--system", system, "kdv, ks, burgers, nkdv or so2-demo")->required();
    ver->add_option("--samples", samples, "random jet points")->check(CLI::PositiveNumber);
    ver->add_option("--seed", seed);

    auto* ev = app.add_subcommand("evaluate", "long-term prediction of discovered models on test data");
    ev->add_option("--models", models, "directory written by discover")->required();
    ev->add_option("--data", data)->required();
    ev->add_option("--out", out)->required();
    ev->add_option("--steps", steps, "prediction steps (default from config, else 50)");

    auto* rep = app.add_subcommand("report", "recompute summaries and plots from result directories");
    rep->add_option("--in", inputs, "result directories")->required();

    CLI11_PARSE(app, argc, argv);
    try {
        if (*gen) return cmd_generate(config, out);
        if (*disc) return cmd_discover(config, data, out);
        if (*run) return cmd_run(config, out);
        if (*ver) return cmd_verify(system, samples, seed);
        if (*ev) return cmd_evaluate(models, data, out, steps);
        if (*rep) return cmd_report(inputs);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
