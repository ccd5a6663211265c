#include <doctest.h>

#include <random>

#include "dipde/invariants.hpp"
#include "dipde/liealg.hpp"

using namespace dipde;

namespace {

const JetSpace& J = JetSpace::standard();

Expr P(const char* s, const JetSpace& space = J) { return simplify(parse(s, space)); }

const Expr& coef(const ProlongedVectorField& pv, const char* name) { return pv.coefficient(*pv.space().lookup(name)); }

}  // namespace

TEST_CASE("SO(2) first prolongation") {
    const JetSpace so2({"x"}, {"u"}, 1, false);
    const auto v = VectorField::parse({"-u"}, {"x"}, so2);
    const auto pv = prolong(v, 1, so2);
    CHECK(coef(pv, "u_x") == P("1 + u_x^2", so2));
    CHECK(is_identically_zero(apply(pv, P("x^2 + u^2", so2))));
}

TEST_CASE("Galilean boost prolongation") {
    const auto pv = prolong(VectorField::parse({"0", "t"}, {"1"}), 4);
    CHECK(coef(pv, "u_t") == P("-u_x"));
    for (const char* n : {"u_x", "u_xx", "u_xxx", "u_xxxx"}) CHECK(coef(pv, n).is_zero());
    CHECK(is_identically_zero(apply(pv, P("u_t + u*u_x"))));
}

TEST_CASE("time reparametrisation prolongation") {
    const auto pv = prolong(VectorField::parse({"exp(-t/t0)", "0"}, {"0"}), 4);
    CHECK(coef(pv, "u_t") == P("t0^-1*exp(-t/t0)*u_t"));
    for (const char* n : {"u_x", "u_xx", "u_xxx", "u_xxxx"}) CHECK(coef(pv, n).is_zero());
}

TEST_CASE("nKdV boost prolongation") {
    const auto pv = prolong(VectorField::parse({"0", "t0*(exp(t/t0) - 1)"}, {"1"}), 4);
    CHECK(coef(pv, "u_t") == P("-exp(t/t0)*u_x"));
}

TEST_CASE("translations prolong to themselves") {
    const auto pv = prolong(VectorField::parse({"0", "1"}, {"0"}), 4);
    for (const auto& [v, c] : pv.coefficients()) CHECK(c.is_zero());
    CHECK(pv.translation_axis() == 1);
    CHECK(is_identically_zero(apply(pv, P("u"))));
    CHECK_FALSE(prolong(VectorField::parse({"0", "t"}, {"1"}), 4).translation_axis());
}

TEST_CASE("point symmetry validation") {
    CHECK_THROWS_AS(VectorField::parse({"0", "u_x"}, {"0"}).validate(J), LieError);
    CHECK_THROWS_AS(VectorField::parse({"0"}, {"0"}).validate(J), LieError);
}

TEST_CASE("check_invariant examples") {
    const auto& kdv = builtin_set("kdv");
    const auto pv3 = prolong(kdv.generators[2], 4);
    const auto r = check_invariant(pv3, P("u"), 50, 1);
    CHECK_FALSE(r.symbolic_zero);
    CHECK(r.residual == Expr(1.0));
    CHECK(r.max_abs == doctest::Approx(1.0));

    const auto& nkdv = builtin_set("nkdv");
    SamplingOptions opts;
    opts.constants = nkdv.constants;
    for (const auto& g : nkdv.generators) {
        const auto c = check_invariant(prolong(g, 4), P("exp(-t/t0)*u_t + u*u_x"), 200, 2, opts);
        CHECK(c.invariant());
    }
}

TEST_CASE("infinitesimal criterion on every catalog equation") {
    for (const char* s : {"kdv", "ks", "burgers", "nkdv"}) {
        const auto& sys = builtin_system(s);
        for (const auto& g : sys.invariants.generators) {
            const auto c = check_symmetry_criterion(prolong(g, 4), sys.equation);
            CHECK_MESSAGE(c.symbolic_zero, s, ": ", to_string(c.residual));
        }
    }
}

TEST_CASE("criterion detects a broken equation") {
    const auto& kdv = builtin_set("kdv");
    const auto c = check_symmetry_criterion(prolong(kdv.generators[2], 4), P("u_t + u_xxx"));
    CHECK_FALSE(c.symbolic_zero);
    CHECK(c.residual == P("-u_x"));
}

TEST_CASE("property: apply is linear and obeys Leibniz") {
    std::mt19937_64 rng(17);
    const std::vector<Expr> corpus = {P("u_t + u*u_x"), P("u_xx"), P("t*u_x + u^2"), P("x*u_xxx"), P("exp(t)*u"),
                                      P("u_x^2*u_xxxx"), P("t^2 + x*u")};
    std::vector<ProlongedVectorField> pvs;
    for (const char* s : {"kdv", "nkdv"})
        for (const auto& g : builtin_set(s).generators) pvs.push_back(prolong(g, 4));
    std::uniform_int_distribution<int> pick(0, static_cast<int>(corpus.size()) - 1);
    std::uniform_real_distribution<double> k(-3, 3);
    for (int n = 0; n < 40; ++n) {
        const auto& pv = pvs[n % pvs.size()];
        const Expr& a = corpus[pick(rng)];
        const Expr& b = corpus[pick(rng)];
        const double ca = std::round(4 * k(rng)) / 4, cb = std::round(4 * k(rng)) / 4;
        CHECK(apply(pv, ca * a + cb * b) == simplify(ca * apply(pv, a) + cb * apply(pv, b)));
        CHECK(apply(pv, a * b) == simplify(apply(pv, a) * b + a * apply(pv, b)));
    }
}

TEST_CASE("property: truncated prolongation equals lower-order prolongation") {
    for (const char* s : {"kdv", "nkdv", "burgers"})
        for (const auto& g : builtin_set(s).generators) {
            const auto lo = prolong(g, 1).coefficients();
            const auto tr = prolong(g, 4).truncated(1).coefficients();
            CHECK(lo == tr);
        }
}

TEST_CASE("random jet sampling stays in the box and avoids small denominators") {
    SamplingOptions opts;
    const std::vector<Expr> guard = {P("u + 1")};
    for (std::uint64_t i = 0; i < 100; ++i) {
        const Binding b = sample_jet_point(J, guard, 9, i, opts);
        for (const auto& [v, val] : b.variables()) {
            CHECK(val >= -2.0);
            CHECK(val <= 2.0);
        }
        CHECK(std::abs(evaluate(guard[0], b).value) >= 1e-3);
    }
    const Binding a = sample_jet_point(J, {}, 9, 3, opts), c = sample_jet_point(J, {}, 9, 3, opts);
    CHECK(a.variables() == c.variables());
}
