#include <doctest.h>

#include "dipde/invariants.hpp"

using namespace dipde;

namespace {

Expr P(const char* s) { return simplify(parse(s)); }

std::vector<std::string> names(const std::vector<JetVariable>& vs) {
    std::vector<std::string> out;
    for (const auto& v : vs) out.push_back(JetSpace::standard().name(v));
    return out;
}

}  // namespace

TEST_CASE("catalog sets") {
    CHECK(builtin_systems() == std::vector<std::string>{"kdv", "ks", "burgers", "nkdv", "so2-demo"});
    const std::vector<Expr> derivs = {P("u_x"), P("u_xx"), P("u_xxx"), P("u_xxxx")};
    for (const char* s : {"kdv", "ks", "burgers"}) {
        const auto& set = builtin_set(s);
        REQUIRE(set.etas.size() == 5);
        CHECK(set.target() == P("u_t + u*u_x"));
        CHECK(set.features() == derivs);
    }
    const auto& nkdv = builtin_set("nkdv");
    REQUIRE(nkdv.etas.size() == 5);
    CHECK(nkdv.target() == P("exp(-t/t0)*u_t + u*u_x"));
    CHECK(nkdv.features() == derivs);

    const auto& so2 = builtin_set("so2-demo");
    CHECK(so2.etas.size() == 2);
    CHECK_FALSE(so2.lhs.has_value());
    CHECK_THROWS_AS(builtin_set("heat"), CatalogError);
}

TEST_CASE("catalog equations") {
    CHECK(builtin_system("kdv").equation == P("u_t + u*u_x + u_xxx"));
    CHECK(builtin_system("ks").equation == P("u_t + u*u_x + u_xx + u_xxxx"));
    CHECK(builtin_system("burgers").equation == P("u_t + u*u_x - nu*u_xx"));
    CHECK(builtin_system("nkdv").equation == P("exp(-t/t0)*u_t + u*u_x + u_xxx"));
}

TEST_CASE("evolution invariant rule") {
    const auto& sp = JetSpace::standard();
    CHECK(find_evolution_invariant({P("u_x"), P("u_t + u*u_x")}, sp) == 1);
    CHECK_FALSE(find_evolution_invariant({P("u_x"), P("u_xx")}, sp));
    CHECK_THROWS_AS(find_evolution_invariant({P("u_t"), P("u_t + u_x")}, sp), CatalogError);
}

TEST_CASE("translation elimination") {
    const auto dx = VectorField::parse({"0", "1"}, {"0"});
    const auto dt = VectorField::parse({"1", "0"}, {"0"});
    const auto boost = VectorField::parse({"0", "t"}, {"1"});

    const auto none = eliminate_translations({}, 4);
    CHECK(names(none.coordinates) ==
          std::vector<std::string>{"t", "x", "u", "u_t", "u_x", "u_xx", "u_xxx", "u_xxxx"});

    const auto one = eliminate_translations({dx}, 4);
    CHECK(names(one.coordinates) == std::vector<std::string>{"t", "u", "u_t", "u_x", "u_xx", "u_xxx", "u_xxxx"});
    CHECK(names(one.eliminated) == std::vector<std::string>{"x"});

    const auto two = eliminate_translations({dx, dt, boost}, 4);
    CHECK(names(two.coordinates) == std::vector<std::string>{"u", "u_t", "u_x", "u_xx", "u_xxx", "u_xxxx"});
    CHECK(two.remaining_generators == std::vector<std::size_t>{2});
    for (const auto& e : builtin_set("kdv").etas)
        for (const auto& v : two.eliminated) CHECK_FALSE(depends_on(e, v));
}

TEST_CASE("verify_set accepts every catalog set") {
    for (const auto& s : builtin_systems()) {
        const auto rep = verify_set(builtin_set(s), 1000, 42);
        CHECK_MESSAGE(rep.pass(), s);
        CHECK(rep.invariance_ok());
        CHECK(rep.full_rank_fraction() >= 0.99);
        CHECK(rep.min_singular_value > 1e-8);
        for (const auto& p : rep.invariance) CHECK(p.report.max_abs < 1e-9);
    }
}

TEST_CASE("verify_set rejects a non-invariant eta") {
    const auto& kdv = builtin_set("kdv");
    auto etas = kdv.etas;
    etas[*kdv.lhs] = P("u_t");
    const auto bad = make_invariant_set("kdv-bad", kdv.generators, etas);
    const auto rep = verify_set(bad, 200, 1);
    CHECK_FALSE(rep.pass());
    CHECK_FALSE(rep.invariance_ok());
    bool found = false;
    for (const auto& p : rep.invariance)
        if (p.generator == 2 && p.eta == *kdv.lhs) {
            CHECK(p.report.residual == P("-u_x"));
            found = true;
        }
    CHECK(found);
}

TEST_CASE("verify_set rejects dependent invariants") {
    const auto dx = VectorField::parse({"0", "1"}, {"0"});
    const auto s = make_invariant_set("dep", {dx}, {P("u_x"), P("2*u_x")}, {}, JetSpace::standard(), false);
    const auto rep = verify_set(s, 200, 1);
    CHECK(rep.invariance_ok());
    CHECK_FALSE(rep.independence_ok());
    CHECK(rep.min_rank == 1);
}

TEST_CASE("model over invariants admits the group") {
    // sufficiency direction at the level of the infinitesimal criterion
    for (const char* s : {"kdv", "ks", "burgers", "nkdv"}) {
        const auto& set = builtin_set(s);
        const Expr F = set.target() + 0.7 * set.features()[2] - 1.9 * set.features()[1];
        for (const auto& g : set.generators) CHECK(check_symmetry_criterion(prolong(g, 4), F).symbolic_zero);
    }
}
