#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dipde/harness.hpp"
#include "dipde/io.hpp"

using namespace dipde;
namespace fs = std::filesystem;

namespace {

Expr P(const char* s) { return simplify(parse(s)); }

SparseModel model(std::vector<double> w) {
    SparseModel m;
    m.target = P("u_t");
    for (std::size_t j = 0; j < w.size(); ++j) m.features.push_back(Expr::named("f" + std::to_string(j)));
    m.coef = Eigen::Map<Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
    for (double v : w) m.mask.push_back(v != 0.0);
    return m;
}

ExperimentConfig small(const std::string& system, Method method) {
    ExperimentConfig c = default_config(system, method);
    c.runs = 2;
    c.train_ics = 1;
    c.test_ics = 1;
    c.solver.nt = 41;
    c.solver.nx = 64;
    return c;
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("dipde_test_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("success compares masks") {
    const auto truth = model({0, 0, -1, 0});
    CHECK(success(model({0, 0, -0.97, 0}), truth));
    CHECK_FALSE(success(model({0, 0.6, -1, 0}), truth));
    CHECK_FALSE(success(model({0, 0, 0, 0}), truth));
    CHECK_THROWS_AS(success(model({0, 0, -1}), truth), RegressError);
}

TEST_CASE("rmse aggregates") {
    const auto truth = model({1, 0});
    const std::vector<SparseModel> one = {model({1.1, 0})};
    auto r = rmse(one, truth);
    REQUIRE(r.successful);
    CHECK(*r.successful == doctest::Approx(0.1));
    CHECK(r.all == doctest::Approx(0.1));

    const std::vector<SparseModel> two = {model({1.1, 0}), model({1.3, 0})};
    CHECK(rmse(two, truth).all == doctest::Approx(std::sqrt(0.05)));

    const std::vector<SparseModel> none = {model({0, 0.7})};
    r = rmse(none, truth);
    CHECK_FALSE(r.successful);
    CHECK(r.all == doctest::Approx(std::sqrt(1 + 0.49)));
    CHECK_THROWS(rmse(std::span<const SparseModel>{}, truth));
}

TEST_CASE("table shows N/A when no run succeeds") {
    SummaryRow s{"ks", "sindy", 0.0, 10, 0.0, std::nullopt, 3.5};
    const std::string t = render_table(std::span(&s, 1));
    CHECK(t.find("N/A") != std::string::npos);
    CHECK(t.find("success rate") != std::string::npos);
    CHECK(summary_csv_row(s).find("N/A") != std::string::npos);
}

TEST_CASE("config round trip and validation") {
    ExperimentConfig c = default_config("burgers", Method::EquivR);
    c.lambda = 1e-2;
    c.noise_sigma = 1e-3;
    c.solver.nx = 128;
    c.seed = 99;
    c.features.t_stride = 2;
    c.library = LibrarySpec{LibrarySpec::Mode::Poly2, {P("u"), P("u_x")}, true};
    const auto back = config_from_json(config_to_json(c));
    CHECK(config_to_json(back) == config_to_json(c));
    CHECK(back.threshold == 5e-3);
    CHECK(back.method == Method::EquivR);
    CHECK(default_config("kdv", Method::DiSindy).threshold == 0.5);

    ExperimentConfig bad = c;
    bad.runs = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    CHECK_THROWS_AS(config_from_json(R"({"system": "heat"})"), ConfigError);
    CHECK_THROWS(config_from_json(R"({"system": "kdv", "method": "lasso"})"));
    const auto partial = config_from_json(R"({"system": "ks", "runs": 3})");
    CHECK(partial.runs == 3);
    CHECK(partial.solver.transient == 25.0);
}

TEST_CASE("dataset round trip is lossless") {
    const auto c = small("kdv", Method::DiSindy);
    const auto data = generate_run_data(c, 0);
    const fs::path dir = scratch("dataset");
    write_dataset(dir.string(), data.train);
    const auto back = read_dataset(dir.string());
    REQUIRE(back.size() == data.train.size());
    CHECK((back[0].u - data.train[0].u).abs().maxCoeff() == 0.0);
    CHECK((back[0].t - data.train[0].t).abs().maxCoeff() == 0.0);
    CHECK(back[0].length == data.train[0].length);
    CHECK(back[0].meta.ic_seed == data.train[0].meta.ic_seed);
    CHECK_THROWS_AS(read_dataset((dir / "missing").string()), IoError);
    for (double v : {0.1, -1e-300, 3.141592653589793, 1.0 / 3.0}) CHECK(parse_double(format_double(v)) == v);
    fs::remove_all(dir);
}

TEST_CASE("run data seeds and noise") {
    ExperimentConfig c = small("kdv", Method::DiSindy);
    c.noise_sigma = 1e-2;
    const auto a = generate_run_data(c, 0), b = generate_run_data(c, 1);
    CHECK(a.train[0].meta.ic_seed != b.train[0].meta.ic_seed);
    CHECK(a.train[0].meta.noise_sigma == 1e-2);
    CHECK(a.test[0].meta.noise_sigma == 0.0);
    CHECK(a.train[0].meta.ic_seed != a.test[0].meta.ic_seed);
}

TEST_CASE("method setup") {
    const auto di = method_setup(default_config("kdv", Method::DiSindy));
    CHECK(di.features.size() == 4);
    CHECK(di.truth.mask == Mask{false, false, true, false});
    const auto sindy = method_setup(default_config("nkdv", Method::Sindy));
    CHECK(sindy.target == P("exp(-t/t0)*u_t"));
    CHECK(sindy.features.size() == 20);
    CHECK(sindy.truth.active() == 2);
    CHECK(method_setup(default_config("burgers", Method::EquivR)).generators.size() == 3);
}

TEST_CASE("long-term prediction") {
    ExperimentConfig c = small("kdv", Method::DiSindy);
    const auto data = generate_run_data(c, 0);
    const auto setup = method_setup(c);
    const auto ic = integration_config(c);
    const auto good = long_term_mse(setup.truth, setup.constants, data.test, ic, 20);
    REQUIRE(good.mse.size() == 21);
    CHECK(good.mse[0] == 0.0);
    CHECK_FALSE(good.blew_up);
    SparseModel wrong = setup.truth;
    wrong.coef[2] += 1.0;  // u_xxx coefficient off by one
    const auto bad = long_term_mse(wrong, setup.constants, data.test, ic, 20);
    CHECK(bad.mse[10] > good.mse[10]);
}

TEST_CASE("reports are reproducible and independent of worker count") {
    ExperimentConfig c = small("kdv", Method::DiSindy);
    c.runs = 3;
    c.long_term_steps = 5;
    const fs::path a = scratch("rep_a"), b = scratch("rep_b");
    write_report(run_experiment(c, nullptr, 1), a.string());
    write_report(run_experiment(c, nullptr, 3), b.string());
    for (const char* f : {"runs.csv", "summary.csv", "long_term.csv", "config.json", "truth.json", "models/run_2.json"})
        CHECK_MESSAGE(slurp(a / f) == slurp(b / f), f);
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("summary is recomputable from runs.csv") {
    ExperimentConfig c = small("burgers", Method::Sindy);
    c.runs = 3;
    const auto rep = run_experiment(c);
    const fs::path d = scratch("summary");
    write_report(rep, d.string());
    const SummaryRow s = summarize_runs_csv((d / "runs.csv").string(), c.system, to_string(c.method), c.lambda);
    std::ifstream in(d / "summary.csv");
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    // provenance columns follow the aggregates
    CHECK(header.starts_with(summary_csv_header() + ","));
    CHECK(row.starts_with(summary_csv_row(s) + ","));
    fs::remove_all(d);
}

TEST_CASE("worker count comes from the environment") {
    setenv("DIPDE_WORKERS", "3", 1);
    CHECK(worker_count() == 3);
    unsetenv("DIPDE_WORKERS");
    CHECK(worker_count() >= 1);
}

TEST_CASE("failed runs are recorded and the batch continues") {
    ExperimentConfig c = small("kdv", Method::DiSindy);
    std::vector<RunData> data = {generate_run_data(c, 0), generate_run_data(c, 1)};
    data[1].train[0].u(3, 3) = std::numeric_limits<double>::quiet_NaN();
    const auto rep = run_experiment(c, &data, 1);
    REQUIRE(rep.runs.size() == 2);
    CHECK_FALSE(rep.runs[0].failure);
    CHECK(rep.runs[1].failure);
    CHECK_FALSE(rep.runs[1].success);
    CHECK(rep.runs[1].model.active() == 0);
}
