#include <doctest.h>

#include <random>

#include "dipde/dynamics.hpp"
#include "dipde/invariants.hpp"
#include "dipde/regress.hpp"

using namespace dipde;

namespace {

Expr P(const char* s) { return simplify(parse(s)); }

std::vector<std::string> text(const std::vector<Expr>& es) {
    std::vector<std::string> out;
    for (const auto& e : es) out.push_back(to_string(e));
    return out;
}

Eigen::MatrixXd gaussian(std::mt19937_64& rng, int n, int m) {
    std::normal_distribution<double> d;
    Eigen::MatrixXd A(n, m);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) A(i, j) = d(rng);
    return A;
}

FeatureMatrix toy_matrix(const Eigen::MatrixXd& A, const Eigen::VectorXd& y) {
    FeatureMatrix fm;
    for (Eigen::Index j = 0; j < A.cols(); ++j) fm.columns.push_back(Expr::named("f" + std::to_string(j + 1)));
    fm.target = P("u_t");
    fm.values = A;
    fm.y = y;
    fm.index.resize(A.rows());
    return fm;
}

}  // namespace

TEST_CASE("library enumeration") {
    LibrarySpec lin{LibrarySpec::Mode::Linear, {P("u_x"), P("u_xx")}, false};
    CHECK(text(build_library(lin)) == std::vector<std::string>{"u_x", "u_xx"});

    LibrarySpec q{LibrarySpec::Mode::Poly2, {P("u"), P("u_x")}, true};
    CHECK(text(build_library(q)) == std::vector<std::string>{"1", "u", "u_x", "u^2", "u*u_x", "u_x^2"});

    LibrarySpec base{LibrarySpec::Mode::Poly2, {P("u"), P("u_x"), P("u_xx"), P("u_xxx"), P("u_xxxx")}, false};
    CHECK(build_library(base).size() == 20);
    base.include_constant = true;
    CHECK(build_library(base).size() == 21);
    CHECK(parse_library_mode(to_string(LibrarySpec::Mode::Poly2)) == LibrarySpec::Mode::Poly2);
}

TEST_CASE("stlsq recovers a planted sparse model") {
    std::mt19937_64 rng(1);
    const Eigen::MatrixXd A = gaussian(rng, 400, 6);
    Eigen::VectorXd w = Eigen::VectorXd::Zero(6);
    w[0] = 2.0;
    w[2] = -3.0;
    const auto m = stlsq(A, A * w, {});
    CHECK(m.mask == Mask{true, false, true, false, false, false});
    CHECK((m.W() - w).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(m.active() == 2);
}

TEST_CASE("zero target gives the empty model") {
    std::mt19937_64 rng(2);
    const Eigen::MatrixXd A = gaussian(rng, 100, 4);
    const auto m = stlsq(A, Eigen::VectorXd::Zero(100), {});
    CHECK(m.active() == 0);
    CHECK(m.W().isZero(0.0));
}

TEST_CASE("masks shrink monotonically and the loop converges fast") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> c(-2, 2);
    for (int k = 0; k < 30; ++k) {
        const Eigen::MatrixXd A = gaussian(rng, 60, 8);
        Eigen::VectorXd w(8);
        for (int j = 0; j < 8; ++j) w[j] = c(rng);
        const Eigen::VectorXd y = A * w + 0.3 * gaussian(rng, 60, 1).col(0);
        const auto m = stlsq(A, y, {});
        for (std::size_t h = 1; h < m.history.size(); ++h)
            for (std::size_t j = 0; j < 8; ++j) CHECK((m.history[h - 1][j] || !m.history[h][j]));
        CHECK(m.iterations <= 8 + 1);
        for (std::size_t j = 0; j < 8; ++j) {
            if (m.mask[j]) CHECK(std::abs(m.coef[j]) >= 0.5);
            else CHECK(m.coef[j] == 0.0);
        }
        // refitting on the model's own prediction keeps the support
        const auto again = stlsq(A, A * m.W(), {});
        CHECK(again.mask == m.mask);
    }
}

TEST_CASE("KdV invariant regression") {
    auto c = default_solver("kdv");
    c.nt = 51;
    const auto tr = solve_pde("kdv", sample_initial_condition(periodic_grid(c.nx, c.length), c.length, 12), c);
    const auto& set = builtin_set("kdv");
    const auto fm = evaluate_features(finite_differences(tr), set.features(), set.target(), {});
    const auto m = stlsq(fm, {});
    CHECK(m.mask == Mask{false, false, true, false});
    CHECK(m.coef[2] == doctest::Approx(-1.0).epsilon(0.02));
    const Expr eq = model_to_equation(m);
    CHECK(eq == simplify(set.target() - m.coef[2] * P("u_xxx")));
    for (const auto& g : set.generators) CHECK(check_symmetry_criterion(prolong(g, 4), eq).symbolic_zero);
}

TEST_CASE("empty model prints as its target") {
    SparseModel m;
    m.target = P("u_t");
    m.features = {P("u_x")};
    m.coef = Eigen::VectorXd::Zero(1);
    m.mask = {false};
    CHECK(model_to_equation(m) == P("u_t"));
}

TEST_CASE("truth projection") {
    const auto& kdv = builtin_set("kdv");
    const auto w = project_truth(builtin_system("kdv").equation, kdv.target(), kdv.features(), {});
    REQUIRE(w);
    CHECK(*w == Eigen::Vector4d(0, 0, -1, 0));

    const std::vector<Expr> base = build_library(
        {LibrarySpec::Mode::Poly2, {P("u"), P("u_x"), P("u_xx"), P("u_xxx"), P("u_xxxx")}, false});
    const auto& burgers = builtin_system("burgers");
    const auto wb = project_truth(burgers.equation, P("u_t"), base, burgers.constants);
    REQUIRE(wb);
    CHECK(wb->cwiseAbs().sum() == doctest::Approx(1.1));
    for (std::size_t j = 0; j < base.size(); ++j) {
        if (base[j] == P("u*u_x")) CHECK((*wb)[j] == -1.0);
        if (base[j] == P("u_xx")) CHECK((*wb)[j] == 0.1);
    }
    // exp(-t) u_t is not a linear combination of u_t and the library
    CHECK_FALSE(project_truth(builtin_system("nkdv").equation, P("u_t"), base, {{"t0", 1.0}}));
    const auto wn = project_truth(builtin_system("nkdv").equation, P("exp(-t/t0)*u_t"), base, {{"t0", 1.0}});
    REQUIRE(wn);
    CHECK(wn->cwiseAbs().sum() == doctest::Approx(2.0));
}

TEST_CASE("model json round trip") {
    std::mt19937_64 rng(4);
    const Eigen::MatrixXd A = gaussian(rng, 50, 3);
    auto m = stlsq(A, A * Eigen::Vector3d(1.25, 0, -0.7), {});
    m.target = P("exp(-t/t0)*u_t + u*u_x");
    m.features = {P("u_x"), P("u_xx"), P("u_xxx")};
    const auto back = model_from_json(model_to_json(m));
    CHECK(back.target == m.target);
    CHECK(back.features == m.features);
    CHECK(back.mask == m.mask);
    CHECK(back.coef == m.coef);
    CHECK(back.threshold == m.threshold);
    CHECK(back.history == m.history);
    CHECK_THROWS(model_from_json("{\"target\": 3}"));
}

TEST_CASE("regularised regression at zero weight equals plain stlsq") {
    std::mt19937_64 rng(5);
    const Eigen::MatrixXd A = gaussian(rng, 200, 5);
    const Eigen::VectorXd y = A * Eigen::VectorXd::LinSpaced(5, -2, 2) + 0.1 * gaussian(rng, 200, 1).col(0);
    const auto fm = toy_matrix(A, y);
    SymmetryPenalty pen;
    pen.A = gaussian(rng, 200, 5);
    pen.b = gaussian(rng, 200, 1).col(0);
    pen.rows_per_generator = 100;
    const auto a = stlsq(fm, {});
    const auto b = stlsq_regularized(fm, pen, 0.0, {});
    CHECK(a.mask == b.mask);
    CHECK(a.coef == b.coef);
}

TEST_CASE("regularised closed form matches gradient descent") {
    std::mt19937_64 rng(6);
    const int n = 120, m = 4, r = 60;
    const Eigen::MatrixXd A = gaussian(rng, n, m);
    const Eigen::VectorXd y = gaussian(rng, n, 1).col(0);
    SymmetryPenalty pen;
    pen.A = gaussian(rng, 2 * r, m);
    pen.b = gaussian(rng, 2 * r, 1).col(0);
    pen.rows_per_generator = r;
    const double lambda = 0.3;
    StlsqOptions o;
    o.threshold = 1e-9;
    const auto fit = stlsq_regularized(toy_matrix(A, y), pen, lambda, o);

    // mean|y - A w|^2 + lambda * sum over generator blocks of mean|b - P w|^2
    const Eigen::MatrixXd H = 2.0 * (A.transpose() * A / n + lambda * pen.A.transpose() * pen.A / r);
    const Eigen::VectorXd g0 = 2.0 * (A.transpose() * y / n + lambda * pen.A.transpose() * pen.b / r);
    const double step = 1.0 / Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(H).eigenvalues().maxCoeff();
    Eigen::VectorXd w = Eigen::VectorXd::Zero(m);
    for (int it = 0; it < 20000; ++it) w -= step * (H * w - g0);
    CHECK((fit.W() - w).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("large symmetry weight suppresses the violating feature") {
    std::mt19937_64 rng(7);
    const Eigen::MatrixXd A = gaussian(rng, 300, 2);
    const Eigen::VectorXd y = A * Eigen::Vector2d(1.0, 1.0);
    SymmetryPenalty pen;
    pen.A = Eigen::MatrixXd::Zero(300, 2);
    pen.A.col(1) = gaussian(rng, 300, 1).col(0);  // only f2 is not invariant
    pen.b = Eigen::VectorXd::Zero(300);
    pen.rows_per_generator = 300;
    StlsqOptions o;
    o.threshold = 1e-9;
    double prev = 2.0;
    for (double lambda : {0.0, 1.0, 1e2, 1e4, 1e6}) {
        const double w2 = std::abs(stlsq_regularized(toy_matrix(A, y), pen, lambda, o).W()[1]);
        CHECK(w2 <= prev + 1e-12);
        prev = w2;
    }
    CHECK(prev < 1e-4);  // the last fit may mask f2 outright
}

TEST_CASE("symmetry penalty rows are pr v of features and target") {
    auto c = default_solver("burgers");
    c.nt = 11;
    c.nx = 64;
    const auto tr = solve_pde("burgers", sample_initial_condition(periodic_grid(c.nx, c.length), c.length, 3), c);
    const std::vector<JetGrid> jets = {finite_differences(tr)};
    const std::vector<Expr> feats = {P("u*u_x"), P("u_xx")};
    const auto fm = evaluate_features(jets[0], feats, P("u_t"), {});
    const auto& set = builtin_set("burgers");
    std::vector<ProlongedVectorField> pvs;
    for (const auto& g : set.generators) pvs.push_back(prolong(g, 4));
    const auto pen = symmetry_penalty(jets, fm, pvs, {});
    CHECK(pen.rows_per_generator == fm.rows());
    CHECK(pen.A.rows() == fm.rows() * static_cast<Eigen::Index>(pvs.size()));
    // boost: pr v[u_t] = -u_x, pr v[u u_x] = u_x, pr v[u_xx] = 0
    const Eigen::Index off = 2 * fm.rows();
    const Eigen::VectorXd ux = evaluate_at(jets, {P("u_x")}, fm.index, {}).col(0);
    CHECK((pen.A.block(off, 0, fm.rows(), 1).col(0) - ux).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(pen.A.block(off, 1, fm.rows(), 1).cwiseAbs().maxCoeff() == 0.0);
    CHECK((pen.b.segment(off, fm.rows()) + ux).cwiseAbs().maxCoeff() < 1e-12);
}
